//! How the Halphen map changes the type of a branch.
//!
//! [`predict_transformed_type`] evaluates the closed case formulas on a
//! normalized branch; [`transform_branch_oracle`] computes the image branch
//! directly and normalizes it. [`desing_iterate`] applies the map repeatedly.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FieldElement, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::branch::{normalize_at_working_precision, normalize_branch, Branch, BranchType, Normalization};
use crate::geometry::curve::CompleteIntersection;
use crate::geometry::halphen::{halphen_branch, halphen_branch_ci};
use crate::geometry::quadric::Quadric;
use crate::verify::{sample_quadric, SampleConfig};

/// Which reading of the case formulas to apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorRules {
    /// The formulas as printed.
    Stated,
    /// `val(α1 α2 - α3)` in the case `r = 2e, s = 3e`, and the extra bound `r`
    /// in the case `s = 2e`; both agree with direct computation.
    #[default]
    Amended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseId {
    #[serde(rename = "generic")]
    Generic,
    #[serde(rename = "r2e-a")]
    R2eA,
    #[serde(rename = "r2e-b")]
    R2eB,
    #[serde(rename = "r2e-c")]
    R2eC,
    #[serde(rename = "s2e")]
    S2e,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::Generic => "generic",
            CaseId::R2eA => "r2e-a",
            CaseId::R2eB => "r2e-b",
            CaseId::R2eC => "r2e-c",
            CaseId::S2e => "s2e",
        })
    }
}

/// The case taken by the predictor and the data it used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DesingCase {
    pub case: CaseId,
    pub rules: PredictorRules,
    /// Auxiliary valuations by name (`v1` .. `v4`), capped where only a bound matters.
    pub valuations: BTreeMap<String, u32>,
    /// The coefficient `γ` of `u^s` in `α1² - α2`, when used.
    pub gamma: Option<String>,
    /// Unsorted triple given by the case formula.
    pub raw: [u32; 3],
    /// `min(...)` expressions whose minimum is attained more than once.
    pub ties: Vec<String>,
}

fn coeff(s: &TruncSeries, k: usize) -> Result<FieldElement> {
    s.coeff(k).cloned().ok_or_else(|| Error::InsufficientPrecision(format!("coefficient of u^{k} unknown")))
}

/// `min` over labelled arguments, recording a tie.
fn min_with_ties(name: &str, args: &[(&str, u32)], ties: &mut Vec<String>) -> u32 {
    let m = args.iter().map(|a| a.1).min().unwrap();
    let at: Vec<&str> = args.iter().filter(|a| a.1 == m).map(|a| a.0).collect();
    if at.len() > 1 {
        ties.push(format!("{name}: {} = {m}", at.join(" = ")));
    }
    m
}

/// Predicted type of the image of a normalized branch under a generic Halphen map.
pub fn predict_transformed_type(nm: &Normalization, rules: PredictorRules) -> Result<(BranchType, DesingCase)> {
    let BranchType { e, r, s } = nm.ty;
    let a = nm.alpha();
    let (a1, a2, a3) = (&a[0], &a[1], &a[2]);
    let (eu, su) = (e as usize, s as usize);
    let mut valuations = BTreeMap::new();
    let mut ties = Vec::new();
    let mut gamma = None;

    let (case, raw) = if r != 2 * e && s != 2 * e {
        (CaseId::Generic, [e, r - e, s - e])
    } else if r == 2 * e {
        let p = &(a1 * a1) - a2;
        let v = p.valuation_capped(3 * eu)? as u32;
        valuations.insert("v1".to_string(), v);
        let g = coeff(&p, su)?;
        let w = (&p - &a3.scale(&g)).valuation_capped(4 * eu)? as u32;
        gamma = Some(g.to_string());
        if s != v.min(3 * e) {
            let second = min_with_ties("min(2e, v1 - e)", &[("2e", 2 * e), ("v1 - e", v - e)], &mut ties);
            (CaseId::R2eA, [e, second, s - e])
        } else if s == v && v < 3 * e {
            valuations.insert("v2".to_string(), w);
            let third = min_with_ties("min(2e, v2 - e)", &[("2e", 2 * e), ("v2 - e", w - e)], &mut ties);
            (CaseId::R2eB, [e, s - e, third])
        } else {
            valuations.insert("v2".to_string(), w);
            let k = match rules {
                PredictorRules::Stated => 2,
                PredictorRules::Amended => 1,
            };
            let q = &(a1 * a2) - &a3.scale(&FieldElement::from_int(k));
            let x = q.valuation_capped(4 * eu)? as u32;
            let (d1, d2, d3) = (a1.derivative(), a2.derivative(), a3.derivative());
            let y = (&(&(&d1 * a2) - &(&d2 * a1).scale(&FieldElement::from_int(2))) + &d3)
                .valuation_capped(4 * eu - 1)? as u32;
            valuations.insert("v3".to_string(), x);
            valuations.insert("v4".to_string(), y);
            let third = min_with_ties(
                "min(3e, v2 - e, v3 - e, v4 - e + 1)",
                &[("3e", 3 * e), ("v2 - e", w - e), ("v3 - e", x - e), ("v4 - e + 1", y + 1 - e)],
                &mut ties,
            );
            (CaseId::R2eC, [e, 2 * e, third])
        }
    } else {
        let v = (&(a1 * a1) - a3).valuation_capped(3 * eu)? as u32;
        valuations.insert("v1".to_string(), v);
        let third = match rules {
            PredictorRules::Stated => min_with_ties("min(v1 - e, 2e)", &[("v1 - e", v - e), ("2e", 2 * e)], &mut ties),
            PredictorRules::Amended => {
                min_with_ties("min(v1 - e, 2e, r)", &[("v1 - e", v - e), ("2e", 2 * e), ("r", r)], &mut ties)
            }
        };
        (CaseId::S2e, [r - e, e, third])
    };
    let ty = BranchType::sorted(raw)?;
    Ok((ty, DesingCase { case, rules, valuations, gamma, raw, ties }))
}

/// Normalize (raising precision for exact branches) and predict.
pub fn predict_branch(b: &Branch, rules: PredictorRules) -> Result<(BranchType, DesingCase)> {
    let nm = normalize_at_working_precision(b)?;
    match predict_transformed_type(&nm, rules) {
        Err(Error::InsufficientPrecision(_)) if b.is_exact() => {
            let n = 2 * nm.branch.precision().max(nm.ty.working_precision());
            predict_transformed_type(&normalize_branch(&b.with_precision(n)?)?, rules)
        }
        other => other,
    }
}

/// The image branch under `Φ` for the quadric `q`, normalized.
pub fn transform_branch_oracle(b: &Branch, q: &Quadric) -> Result<Normalization> {
    normalize_at_working_precision(&halphen_branch(b, q)?)
}

/// The same through `∧³(∇F, ∇G, ∇Q)` on a branch of `V(F, G)`.
pub fn transform_branch_oracle_ci(ci: &CompleteIntersection, b: &Branch, q: &Quadric) -> Result<Normalization> {
    normalize_branch(&halphen_branch_ci(ci, b, q)?)
}

/// Oracle types for a quorum of sampled quadrics; all must agree.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub ty: BranchType,
    /// Draw indices of the quadrics used.
    pub draws: Vec<u64>,
    pub image: Normalization,
}

pub fn oracle_quorum(b: &Branch, cfg: &SampleConfig, first_draw: u64) -> Result<OracleRun> {
    oracle_quorum_with(cfg, first_draw, |q| transform_branch_oracle(b, q))
}

pub fn oracle_quorum_with<F>(cfg: &SampleConfig, first_draw: u64, f: F) -> Result<OracleRun>
where
    F: Fn(&Quadric) -> Result<Normalization> + Sync,
{
    let mut seen = Vec::new();
    for round in 0..5u64 {
        let draws: Vec<u64> = (0..cfg.quorum as u64).map(|i| first_draw + round * cfg.quorum as u64 + i).collect();
        let results: Vec<Result<Normalization>> = draws.par_iter().map(|&d| f(&sample_quadric(cfg, d)?)).collect();
        let mut images = Vec::new();
        for r in results {
            match r {
                Ok(nm) => images.push(nm),
                Err(Error::IdenticallyZero) => break,
                Err(e) => return Err(e),
            }
        }
        let types: Vec<BranchType> = images.iter().map(|n| n.ty).collect();
        if types.len() == draws.len() && types.iter().all(|t| *t == types[0]) {
            let image = images.swap_remove(0);
            return Ok(OracleRun { ty: types[0], draws, image });
        }
        seen.push(types.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    }
    Err(Error::NonGenericQuadric(format!("sampled quadrics disagree on the image type: {}", seen.join("; "))))
}

/// Decrease of `(e, r, s)` under one application of `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    /// `e' <= e`, `r' <= r` and `s' <= s`.
    pub holds: bool,
    /// The type changed.
    pub strict: bool,
    /// The branch satisfies the valuation condition under which the type may stay fixed.
    pub exceptional: bool,
}

impl Monotonicity {
    /// Monotone, and strict unless the exceptional condition is present.
    pub fn ok(&self) -> bool {
        self.holds && (self.strict || self.exceptional)
    }
}

/// Whether the branch meets the fixed-point condition: `r = 2e`, `s = 3e` and
/// every competing term of the `r2e-c` formula is at least `3e`.
pub fn exceptional_condition(nm: &Normalization, rules: PredictorRules) -> Result<bool> {
    let t = nm.ty;
    if t.r != 2 * t.e || t.s != 3 * t.e {
        return Ok(false);
    }
    let (_, case) = match predict_transformed_type(nm, rules) {
        Ok(p) => p,
        Err(Error::DegenerateType(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(case.case == CaseId::R2eC && case.raw[2] == 3 * t.e)
}

pub fn monotonicity(before: &Normalization, after: BranchType, rules: PredictorRules) -> Result<Monotonicity> {
    let b = before.ty;
    Ok(Monotonicity {
        holds: after.e <= b.e && after.r <= b.r && after.s <= b.s,
        strict: after != b,
        exceptional: exceptional_condition(before, rules)?,
    })
}

/// One application of `Φ` in an iteration.
#[derive(Clone, Debug, Serialize)]
pub struct DesingStep {
    pub before: BranchType,
    /// Predicted type and case, or the error the predictor raised.
    pub predicted: std::result::Result<(BranchType, DesingCase), String>,
    pub oracle: BranchType,
    pub draws: Vec<u64>,
    pub monotonicity: Monotonicity,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesingTrace {
    pub initial: BranchType,
    pub steps: Vec<DesingStep>,
    pub reached_ordinary: bool,
    /// The type stopped changing (the exceptional fixed point).
    pub fixed_point: bool,
}

impl DesingTrace {
    pub fn types(&self) -> Vec<BranchType> {
        std::iter::once(self.initial).chain(self.steps.iter().map(|s| s.oracle)).collect()
    }
}

/// Iterate the Halphen map on a branch, at most `max_steps` times.
///
/// Each step predicts from the current series, then replaces it by the
/// oracle image for the first of a quorum of sampled quadrics.
pub fn desing_iterate(b: &Branch, max_steps: usize, cfg: &SampleConfig, rules: PredictorRules) -> Result<DesingTrace> {
    let mut nm = normalize_at_working_precision(b)?;
    let mut current = b.clone();
    let initial = nm.ty;
    let mut steps = Vec::new();
    let mut fixed_point = false;
    while !nm.ty.is_ordinary() && steps.len() < max_steps {
        let predicted = match predict_transformed_type(&nm, rules) {
            Err(Error::InsufficientPrecision(_)) if current.is_exact() => predict_branch(&current, rules),
            other => other,
        }
        .map_err(|e| e.to_string());
        let run = oracle_quorum(&current, cfg, 64 * steps.len() as u64)?;
        let mono = monotonicity(&nm, run.ty, rules)?;
        let before = nm.ty;
        steps.push(DesingStep { before, predicted, oracle: run.ty, draws: run.draws, monotonicity: mono });
        nm = run.image;
        // Later types are no larger, so their working precision suffices; the
        // spare orders cover the derivative taken by each transform.
        let keep = (nm.ty.working_precision() + 4).min(nm.branch.precision());
        current = if nm.branch.is_exact() { nm.branch.clone() } else { nm.branch.with_precision(keep)? };
        if nm.ty == before {
            fixed_point = true;
            break;
        }
    }
    Ok(DesingTrace { initial, reached_ordinary: nm.ty.is_ordinary(), fixed_point, steps })
}
