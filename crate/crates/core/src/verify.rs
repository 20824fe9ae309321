//! Seeded sampling of generic quadrics and covectors, and the consistency
//! harness comparing closed formulas with direct computation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::FieldElement;
use crate::desing::{predict_branch, transform_branch_oracle, PredictorRules};
use crate::error::{Error, Result};
use crate::geometry::branch::{normalize_at_working_precision, Branch, BranchType};
use crate::geometry::curve::{CurveSpec, RationalCurve};
use crate::geometry::halphen::halphen_rational;
use crate::geometry::quadric::Quadric;
use crate::invariants::{
    class_rational, genus_from_rank, image_degree, piene_class, rank_formula_ci, rank_rational,
    rational_stationary_indices, theorem_invariants, GenusSource, StationaryIndices,
};

pub const PRNG: &str = "ChaCha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub trials: usize,
    pub bound: i64,
    pub quorum: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0, trials: 3, bound: 10_000, quorum: 3 }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.quorum < 2 || self.trials < self.quorum {
            return Err(Error::Invalid(format!(
                "need trials >= quorum >= 2 (trials {}, quorum {})",
                self.trials, self.quorum
            )));
        }
        if self.bound < 1 {
            return Err(Error::Invalid("coefficient bound must be positive".into()));
        }
        Ok(())
    }
}

/// Independent random streams, one per kind of sampled object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Quadric = 0,
    Covector = 1,
    Parameter = 2,
    Series = 3,
}

/// The generator for draw `index` of a stream; depends only on `(seed, stream, index)`.
pub fn rng_for(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) | index);
    rng
}

pub fn random_ints(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()
}

const MAX_ATTEMPTS: usize = 1000;

/// A symmetric integer quadric with `m44 = 1`, `m14 m24 m34 != 0` and `det M != 0`.
pub fn sample_quadric(cfg: &SampleConfig, index: u64) -> Result<Quadric> {
    let mut rng = rng_for(cfg.seed, Stream::Quadric, index);
    for _ in 0..MAX_ATTEMPTS {
        let v = random_ints(&mut rng, 9, cfg.bound);
        let m = [[v[0], v[1], v[2], v[6]], [v[1], v[3], v[4], v[7]], [v[2], v[4], v[5], v[8]], [v[6], v[7], v[8], 1]];
        let q = Quadric::from_ints(m)?;
        if q.flags().all() {
            return Ok(q);
        }
    }
    Err(Error::ExhaustedResampling(MAX_ATTEMPTS))
}

/// A nonzero integer covector of length `n`.
pub fn sample_covector(cfg: &SampleConfig, index: u64, n: usize) -> Vec<FieldElement> {
    let mut rng = rng_for(cfg.seed, Stream::Covector, index);
    loop {
        let v = random_ints(&mut rng, n, cfg.bound);
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(FieldElement::from_int).collect();
        }
    }
}

/// A random rational `p/q` with `|p|, q <= bound`.
pub fn sample_parameter(cfg: &SampleConfig, index: u64) -> FieldElement {
    let mut rng = rng_for(cfg.seed, Stream::Parameter, index);
    let p = rng.gen_range(-cfg.bound..=cfg.bound);
    let q = rng.gen_range(1..=cfg.bound);
    FieldElement::from_ratio(p, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub curve: String,
    pub check: String,
    /// Trial index, absent for records about the curve itself.
    pub trial: Option<usize>,
    pub status: Status,
    pub prng: String,
    pub seed: u64,
    /// Which formulas or computations produced the values.
    pub route: String,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    pub records: Vec<Record>,
}

impl Report {
    fn from_records(records: Vec<Record>, passed: bool) -> Self {
        let status = if records.iter().all(|r| r.status == Status::Skipped) {
            Status::Skipped
        } else if passed {
            Status::Pass
        } else {
            Status::Fail
        };
        Report { status, records }
    }

    pub fn to_json_lines(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

fn record(curve: &str, check: &str, trial: Option<usize>, cfg: &SampleConfig, status: Status, route: &str, details: Value) -> Record {
    Record {
        curve: curve.to_string(),
        check: check.to_string(),
        trial,
        status,
        prng: PRNG.to_string(),
        seed: cfg.seed,
        route: route.to_string(),
        details,
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn quadric_json(q: &Quadric) -> Value {
    q.to_json()
}

/// Map degree of the reduced transform over `cfg.trials` sampled quadrics.
///
/// Passes when at least `quorum` samples give map degree 1 and none gives more.
pub fn check_birational(name: &str, rc: &RationalCurve, cfg: &SampleConfig) -> Result<Report> {
    cfg.validate()?;
    if rc.is_line() {
        let r = record(name, "birational", None, cfg, Status::Skipped, "line", json!({"note": "a line is its own transform"}));
        return Ok(Report::from_records(vec![r], true));
    }
    let records: Vec<Record> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let route = "map degree of reduced psi by fiber counting";
            let q = match sample_quadric(cfg, i as u64) {
                Ok(q) => q,
                Err(e) => return record(name, "birational", Some(i), cfg, Status::Error, route, json!({"error": e.to_string()})),
            };
            let out = (|| -> Result<Value> {
                let im = halphen_rational(rc, &q)?;
                let reduced = image_degree(im.reduced.components(), cfg)?;
                let raw = image_degree(&im.raw, cfg)?;
                Ok(json!({
                    "quadric": quadric_json(&q),
                    "draw": i,
                    "gcd_degree": im.gcd.degree(),
                    "reduced": reduced,
                    "raw_image_degree": raw.image_degree,
                }))
            })();
            match out {
                Ok(d) => {
                    let map = d["reduced"]["map_degree"].as_u64().unwrap_or(0);
                    let same = d["raw_image_degree"] == d["reduced"]["image_degree"];
                    let mut status = pass_if(map == 1 && same);
                    if map > 1 {
                        status = Status::Fail;
                    }
                    record(name, "birational", Some(i), cfg, status, route, d)
                }
                Err(e) => record(name, "birational", Some(i), cfg, Status::Error, route, json!({"quadric": quadric_json(&q), "error": e.to_string()})),
            }
        })
        .collect();
    let passes = records.iter().filter(|r| r.status == Status::Pass).count();
    let counterexample = records.iter().any(|r| r.status == Status::Fail);
    Ok(Report::from_records(records, passes >= cfg.quorum && !counterexample))
}

/// Invariants of `C` gathered once, before any quadric is drawn.
#[derive(Clone, Debug, Serialize)]
pub struct BaseInvariants {
    pub degree: u32,
    pub rank: u32,
    pub genus: u32,
    pub genus_source: GenusSource,
    pub branch_types: Vec<BranchType>,
    pub k0: u32,
    pub k1: u32,
    pub class: Option<i64>,
}

fn branch_types(branches: &[Branch]) -> Result<Vec<BranchType>> {
    branches.iter().map(|b| Ok(normalize_at_working_precision(b)?.ty)).collect()
}

/// Degree, rank, genus and stationary indices of `C`, each by every available
/// route; disagreements are recorded as failures.
pub fn base_invariants(name: &str, spec: &CurveSpec, branches: &[Branch], cfg: &SampleConfig) -> Result<(BaseInvariants, Vec<Record>)> {
    let mut records = Vec::new();
    let degree = spec.degree();
    let types = branch_types(branches)?;
    let local = StationaryIndices::of(&types);
    let mut ranks = Vec::new();
    if let Some(rc) = spec.rational() {
        ranks.push(("tangent map image degree", rank_rational(rc, cfg)?));
    }
    if let Some(ci) = spec.complete_intersection() {
        let fv = rank_formula_ci(ci, branches, cfg)?;
        ranks.push(("polar surface correction", fv.value.max(0) as u32));
    }
    let rank = ranks[0].1;
    let ranks_json: Value = ranks.iter().map(|(r, v)| (r.to_string(), json!(v))).collect::<serde_json::Map<_, _>>().into();
    records.push(record(name, "rank", None, cfg, pass_if(ranks.iter().all(|r| r.1 == rank)), "all rank routes", ranks_json));

    let (mut k0, mut k1) = (local.k0, local.k1);
    if let Some(rc) = spec.rational() {
        let (g0, g1) = rational_stationary_indices(rc)?;
        let ok = !spec.complete_branch_data || (g0, g1) == (local.k0, local.k1);
        records.push(record(
            name,
            "stationary indices",
            None,
            cfg,
            pass_if(ok),
            "branch types vs base loci of tangent and osculating maps",
            json!({"branches": [local.k0, local.k1], "global": [g0, g1], "complete_branch_data": spec.complete_branch_data}),
        ));
        (k0, k1) = (g0, g1);
    }

    let (genus, genus_source) = match (spec.genus, spec.rational()) {
        (Some(g), _) => (g, GenusSource::Given),
        (None, Some(_)) => (0, GenusSource::RationalZero),
        (None, None) => (genus_from_rank(degree as i64, rank as i64, k0 as i64)? as u32, GenusSource::PieneInverted),
    };
    let complete = spec.complete_branch_data || spec.rational().is_some();
    let class = complete.then(|| piene_class(degree as i64, genus as i64, k0 as i64, k1 as i64));
    if let (Some(c), Some(rc)) = (class, spec.rational()) {
        let direct = class_rational(rc, cfg)?;
        records.push(record(
            name,
            "class",
            None,
            cfg,
            pass_if(direct as i64 == c),
            "Piene formula vs osculating map image degree",
            json!({"piene": c, "osculating": direct}),
        ));
    }
    Ok((BaseInvariants { degree, rank, genus, genus_source, branch_types: types, k0, k1, class }, records))
}

/// End-to-end check of the transform formulas for one curve.
///
/// Per trial: transform every branch with a sampled quadric, sum the
/// stationary indices of the images, evaluate the closed formulas and, for a
/// rational curve, compare with the degree of the reduced transform.
pub fn check_theorem(name: &str, spec: &CurveSpec, branches: &[Branch], cfg: &SampleConfig) -> Result<Report> {
    cfg.validate()?;
    let (base, mut records) = base_invariants(name, spec, branches, cfg)?;
    records.push(record(name, "invariants of C", None, cfg, Status::Pass, "base routes", serde_json::to_value(&base).unwrap()));
    let trials: Vec<Record> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let route = "closed formulas from transformed branch types; psi image degree";
            match theorem_trial(spec, branches, &base, cfg, i) {
                Ok((ok, d)) => record(name, "theorem", Some(i), cfg, pass_if(ok), route, d),
                Err(e) => record(name, "theorem", Some(i), cfg, Status::Error, route, json!({"draw": i, "error": e.to_string()})),
            }
        })
        .collect();
    records.extend(trials);
    let passed = records.iter().all(|r| matches!(r.status, Status::Pass | Status::Skipped));
    Ok(Report::from_records(records, passed))
}

fn theorem_trial(spec: &CurveSpec, branches: &[Branch], base: &BaseInvariants, cfg: &SampleConfig, i: usize) -> Result<(bool, Value)> {
    let q = sample_quadric(cfg, i as u64)?;
    let mut images = Vec::new();
    let mut audit = Vec::new();
    for b in branches {
        let nm = transform_branch_oracle(b, &q)?;
        let pred = predict_branch(b, PredictorRules::Amended);
        audit.push(json!({
            "oracle": nm.ty,
            "predicted": pred.as_ref().map(|p| json!({"type": p.0, "case": p.1})).unwrap_or_else(|e| json!({"error": e.to_string()})),
        }));
        images.push(nm.ty);
    }
    let st = StationaryIndices::of(&images);
    let inv = theorem_invariants(base.degree, base.rank, base.genus, base.genus_source, st.k0, Some(st.k1));
    let mut ok = inv.piene_consistent();
    let mut d = json!({
        "draw": i,
        "quadric": quadric_json(&q),
        "branches": audit,
        "transform": inv,
        "complete_branch_data": spec.complete_branch_data,
    });
    if let Some(rc) = spec.rational() {
        let im = halphen_rational(rc, &q)?;
        let deg = image_degree(im.reduced.components(), cfg)?;
        ok &= deg.image_degree == inv.degree && deg.map_degree == 1;
        d["psi"] = serde_json::to_value(&deg).unwrap();
    }
    Ok((ok, d))
}
