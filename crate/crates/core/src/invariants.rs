//! Degree, rank, class and genus of a curve and of its Halphen transform.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::binary::{gcd_all, BinaryForm, UniPoly};
use crate::algebra::modp::{self, common_tower, Reduction};
use crate::algebra::{FieldElement, HomoPoly};
use crate::error::{Error, Result};
use crate::geometry::branch::{Branch, BranchType};
use crate::geometry::curve::{reduce_forms, CompleteIntersection, RationalCurve};
use crate::geometry::halphen::polar_surface;
use crate::geometry::wedge::{dot, wedge2, wedge3};
use crate::verify::{sample_covector, sample_parameter, SampleConfig};

/// Number of quorum rounds before a generic quantity is declared unstable.
const ROUNDS: usize = 5;

pub fn stationary_indices(t: &BranchType) -> (u32, u32) {
    (t.k0(), t.k1())
}

/// Per-branch and summed stationary indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StationaryIndices {
    pub per_branch: Vec<(u32, u32)>,
    pub k0: u32,
    pub k1: u32,
}

impl StationaryIndices {
    pub fn of(types: &[BranchType]) -> Self {
        let per_branch: Vec<(u32, u32)> = types.iter().map(stationary_indices).collect();
        StationaryIndices {
            k0: per_branch.iter().map(|p| p.0).sum(),
            k1: per_branch.iter().map(|p| p.1).sum(),
            per_branch,
        }
    }
}

/// `val(S∘α)` for one branch.
pub fn branch_intersection(b: &Branch, s: &HomoPoly) -> Result<u32> {
    let b = if b.is_exact() {
        let k = s.degree().ok_or(Error::ZeroPolynomial)? as usize;
        b.with_precision(k * b.poly_len().max(1) + 1)?
    } else {
        b.clone()
    };
    let c = s.compose_series(b.coords());
    if c.is_zero_to_precision() {
        return Err(if b.is_exact() {
            Error::BranchInsideSurface
        } else {
            Error::InsufficientPrecision(format!("surface composed with the branch vanishes to order {}", c.precision()))
        });
    }
    Ok(c.valuation()? as u32)
}

/// `Σ val(S∘α)` over the branches at a point.
pub fn intersection_multiplicity(branches: &[Branch], s: &HomoPoly) -> Result<u32> {
    branches.iter().map(|b| branch_intersection(b, s)).sum()
}

/// A quantity that must agree across a quorum of random samples.
fn quorum_value<F>(cfg: &SampleConfig, what: &str, unstable: fn(String) -> Error, mut f: F) -> Result<(u32, Vec<u32>)>
where
    F: FnMut(u64) -> Result<u32>,
{
    let mut seen = Vec::new();
    for round in 0..ROUNDS {
        let vals = (0..cfg.quorum)
            .map(|i| f((round * cfg.quorum + i) as u64))
            .collect::<Result<Vec<u32>>>()?;
        if vals.iter().all(|v| *v == vals[0]) {
            return Ok((vals[0], vals));
        }
        seen.push(vals);
    }
    Err(unstable(format!("{what}: samples {seen:?}")))
}

/// The correction `Σ i_m(C, P_B)` for generic `B`, certified by the quorum.
pub fn polar_correction(ci: &CompleteIntersection, branches: &[Branch], cfg: &SampleConfig) -> Result<(u32, Vec<u32>)> {
    quorum_value(cfg, "polar surface correction", Error::UnstableCorrection, |i| {
        let p = polar_surface(ci, &sample_covector(cfg, i, 6))?;
        intersection_multiplicity(branches, &p)
    })
}

/// A formula value with its correction term and the agreeing samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaValue {
    pub value: i64,
    pub naive: i64,
    pub correction: u32,
    pub samples: Vec<u32>,
}

fn corrected(ci: &CompleteIntersection, branches: &[Branch], cfg: &SampleConfig, shift: i64) -> Result<FormulaValue> {
    let d = ci.curve_degree() as i64;
    let naive = d * (ci.deg_f() as i64 + ci.deg_g() as i64 - shift);
    let (correction, samples) = polar_correction(ci, branches, cfg)?;
    Ok(FormulaValue { value: naive - correction as i64, naive, correction, samples })
}

/// `deg C^Q = deg C (deg F + deg G - 1) - Σ i_m(C, P_B)`.
///
/// `branches` must cover every point of `C ∩ sing C1`.
pub fn degree_formula(ci: &CompleteIntersection, branches: &[Branch], cfg: &SampleConfig) -> Result<FormulaValue> {
    corrected(ci, branches, cfg, 1)
}

/// `rank C = deg C (deg F + deg G - 2) - Σ i_m(C, P_B)`.
pub fn rank_formula_ci(ci: &CompleteIntersection, branches: &[Branch], cfg: &SampleConfig) -> Result<FormulaValue> {
    corrected(ci, branches, cfg, 2)
}

/// Degree of the image and of the map `P^1 -> image` for a vector of binary forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageDegree {
    pub image_degree: u32,
    pub map_degree: u32,
    /// Degree of the forms after removing their gcd.
    pub reduced_degree: u32,
    /// Distinct roots of a generic hyperplane section (equals `reduced_degree`).
    pub hyperplane_roots: u32,
}

/// An upper bound on `deg gcd(polys)`, certified modulo a prime, when one of
/// the polynomials keeps its degree there.
fn modular_gcd_bound(polys: &[&UniPoly]) -> Option<usize> {
    let tower = common_tower(polys.iter().flat_map(|p| p.coeffs()))?;
    let red = Reduction::new(&tower, 0)?;
    let reduced: Vec<Vec<u64>> = polys.iter().map(|p| red.reduce_poly(p.coeffs())).collect::<Option<_>>()?;
    let keeps_degree = reduced.iter().zip(polys).any(|(r, p)| p.lead().is_some() && r.last().is_some_and(|c| *c != 0));
    if !keeps_degree {
        return None;
    }
    modp::gcd_degree(&reduced, red.prime())
}

/// Number of distinct roots of a binary form.
fn distinct_roots(h: &BinaryForm) -> u32 {
    let at_infinity = u32::from(h.v_multiplicity() > 0);
    let f = h.dehomogenized();
    if let Some(df) = f.lead().map(|_| f.derivative()) {
        if modular_gcd_bound(&[f, &df]) == Some(0) {
            return f.degree().unwrap_or(0) as u32 + at_infinity;
        }
    }
    h.squarefree().degree()
}

/// Size of the fiber through the parameter `t0`.
fn fiber_size(f: &[BinaryForm], t0: &FieldElement) -> Result<Option<u32>> {
    let one = FieldElement::one();
    let w: Vec<FieldElement> = f.iter().map(|g| g.eval(t0, &one)).collect();
    if w.iter().all(FieldElement::is_zero) {
        return Ok(None);
    }
    let d = f[0].degree();
    let mut minors = Vec::new();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let m = f[i].dehomogenized().scale(&w[j]).sub(&f[j].dehomogenized().scale(&w[i]));
            if !m.is_zero() {
                minors.push(BinaryForm::new(d, m));
            }
        }
    }
    // Every minor vanishes at t0; a gcd bound of 1 with no common root at
    // infinity settles the fiber without the exact gcd.
    let finite: Vec<&UniPoly> = minors.iter().map(BinaryForm::dehomogenized).collect();
    if minors.iter().any(|m| m.v_multiplicity() == 0) && modular_gcd_bound(&finite) == Some(1) {
        return Ok(Some(1));
    }
    match gcd_all(&minors) {
        // All minors vanish: the map is constant.
        None => Ok(Some(0)),
        Some(g) => Ok(Some(g.squarefree().degree())),
    }
}

/// Image degree by counting the fiber over a random point of the image.
pub fn image_degree(forms: &[HomoPoly], cfg: &SampleConfig) -> Result<ImageDegree> {
    let (reduced, _) = reduce_forms(forms)?;
    // Zero components contribute nothing to fibers or hyperplane sections.
    let reduced: Vec<HomoPoly> = reduced.into_iter().filter(|p| !p.is_zero()).collect();
    let dprime = reduced[0].degree().unwrap();
    let f: Vec<BinaryForm> = reduced.iter().map(BinaryForm::from_poly).collect::<Result<_>>()?;
    if dprime == 0 {
        return Ok(ImageDegree { image_degree: 0, map_degree: 0, reduced_degree: 0, hyperplane_roots: 0 });
    }
    let mut seen = Vec::new();
    for round in 0..ROUNDS {
        let mut vals = Vec::new();
        let mut draw = (round * cfg.quorum * 4) as u64;
        while vals.len() < cfg.quorum {
            let t0 = sample_parameter(cfg, draw);
            let ell = sample_covector(cfg, draw, f.len());
            draw += 1;
            let Some(k) = fiber_size(&f, &t0)? else { continue };
            if k == 0 || dprime % k != 0 {
                vals.push((0, k, 0));
                continue;
            }
            let mut h = HomoPoly::zero(reduced[0].vars());
            for (c, p) in ell.iter().zip(&reduced) {
                h = &h + &p.scale(c);
            }
            let roots = if h.is_zero() { 0 } else { distinct_roots(&BinaryForm::from_poly(&h)?) };
            vals.push((dprime / k, k, roots));
        }
        if vals.iter().all(|v| *v == vals[0]) && vals[0].1 > 0 && vals[0].0 > 0 {
            let (image_degree, map_degree, hyperplane_roots) = vals[0];
            return Ok(ImageDegree { image_degree, map_degree, reduced_degree: dprime, hyperplane_roots });
        }
        seen.push(vals);
    }
    Err(Error::InconsistentSamples(format!("(image degree, map degree, hyperplane roots) samples {seen:?}")))
}

/// The tangent map `∧²(γ_u, γ_v)` of a rational curve.
pub fn tangent_map(rc: &RationalCurve) -> Vec<HomoPoly> {
    wedge2(&rc.derivative_u(), &rc.derivative_v())
}

/// Rank of a rational curve: degree of the image of its tangent map.
pub fn rank_rational(rc: &RationalCurve, cfg: &SampleConfig) -> Result<u32> {
    if rc.is_line() {
        return Err(Error::DegenerateTangentMap);
    }
    let eta = tangent_map(rc);
    if eta.iter().all(HomoPoly::is_zero) {
        return Err(Error::DegenerateTangentMap);
    }
    Ok(image_degree(&eta, cfg)?.image_degree)
}

/// The osculating map `∧³(γ_uu, γ_uv, γ_vv)`, a covector-valued form of degree `3(d - 2)`.
pub fn osculating_map(rc: &RationalCurve) -> Vec<HomoPoly> {
    let (gu, gv) = (rc.derivative_u(), rc.derivative_v());
    let d = |g: &[HomoPoly], i: usize| g.iter().map(|p| p.derivative(i)).collect::<Vec<_>>();
    wedge3(&d(&gu, 0), &d(&gu, 1), &d(&gv, 1))
}

/// `det(γ_uuu, γ_uuv, γ_uvv, γ_vvv)`, of degree `4(d - 3)`; a branch of type
/// `(e, r, s)` is a root of order `e + r + s - 6`.
pub fn wronskian(rc: &RationalCurve) -> HomoPoly {
    let third = |a: usize, b: usize, c: usize| -> Vec<HomoPoly> {
        rc.components().iter().map(|p| p.derivative(a).derivative(b).derivative(c)).collect()
    };
    dot(&wedge3(&third(0, 0, 0), &third(0, 0, 1), &third(0, 1, 1)), &third(1, 1, 1))
}

fn base_degree(forms: &[HomoPoly]) -> Result<u32> {
    if forms.iter().all(HomoPoly::is_zero) {
        return Err(Error::DegenerateTangentMap);
    }
    let (_, g) = reduce_forms(forms)?;
    Ok(g.degree().unwrap_or(0))
}

/// Global `(k0, k1)` of a rational curve, from the base loci of its tangent
/// and osculating maps: `k0 = deg gcd ∧²(γ_u, γ_v)` and
/// `2 k0 + k1 = deg gcd ∧³(γ_uu, γ_uv, γ_vv)`.
pub fn rational_stationary_indices(rc: &RationalCurve) -> Result<(u32, u32)> {
    if rc.is_line() {
        return Err(Error::DegenerateTangentMap);
    }
    let k0 = base_degree(&tangent_map(rc))?;
    let osc = base_degree(&osculating_map(rc))?;
    Ok((k0, osc - 2 * k0))
}

/// Class of a rational curve: degree of the image of its osculating map.
pub fn class_rational(rc: &RationalCurve, cfg: &SampleConfig) -> Result<u32> {
    let omega = osculating_map(rc);
    if rc.is_line() || omega.iter().all(HomoPoly::is_zero) {
        return Err(Error::DegenerateTangentMap);
    }
    Ok(image_degree(&omega, cfg)?.image_degree)
}

pub fn piene_rank(deg: i64, genus: i64, k0: i64) -> i64 {
    2 * (deg + genus - 1) - k0
}

pub fn piene_class(deg: i64, genus: i64, k0: i64, k1: i64) -> i64 {
    3 * (deg + 2 * genus - 2) - 2 * k0 - k1
}

/// Invert the rank formula: `g = (rank + k0)/2 + 1 - deg`.
pub fn genus_from_rank(deg: i64, rank: i64, k0: i64) -> Result<i64> {
    let twice = rank + k0 + 2 - 2 * deg;
    if twice % 2 != 0 {
        return Err(Error::NonIntegerGenus(twice));
    }
    if twice < 0 {
        return Err(Error::Invalid(format!("rank {rank}, k0 {k0} and degree {deg} give negative genus")));
    }
    Ok(twice / 2)
}

/// Where a genus value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenusSource {
    Given,
    RationalZero,
    PieneInverted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveInvariants {
    pub degree: u32,
    pub rank: u32,
    pub class: Option<i64>,
    pub genus: u32,
    pub genus_source: GenusSource,
    pub k0: u32,
    pub k1: Option<u32>,
    /// How each field was obtained.
    pub provenance: BTreeMap<String, String>,
}

impl CurveInvariants {
    /// Check the two rank/class identities on the fields that are present.
    pub fn piene_consistent(&self) -> bool {
        let (d, g, k0) = (self.degree as i64, self.genus as i64, self.k0 as i64);
        let rank_ok = piene_rank(d, g, k0) == self.rank as i64;
        let class_ok = match (self.class, self.k1) {
            (Some(c), Some(k1)) => piene_class(d, g, k0, k1 as i64) == c,
            _ => true,
        };
        rank_ok && class_ok
    }
}

/// Invariants of `C^Q` from those of `C` and the stationary indices of `C^Q`.
pub fn theorem_invariants(deg: u32, rank: u32, genus: u32, genus_source: GenusSource, k0q: u32, k1q: Option<u32>) -> CurveInvariants {
    let (d, r, g) = (deg as i64, rank as i64, genus as i64);
    let degree = (d + r) as u32;
    let rank_q = 2 * (d + r + g - 1) - k0q as i64;
    let class = k1q.map(|k1| 3 * d + 3 * r + 6 * g - 6 - 2 * k0q as i64 - k1 as i64);
    let mut provenance = BTreeMap::new();
    provenance.insert("degree".into(), "deg C + rank C".into());
    provenance.insert("rank".into(), "2(deg C + rank C + g - 1) - k0(C^Q)".into());
    provenance.insert("genus".into(), "g(C^Q) = g(C)".into());
    provenance.insert("k0".into(), "transformed branch types".into());
    match k1q {
        Some(_) => {
            provenance.insert("class".into(), "3 deg C + 3 rank C + 6g - 6 - 2 k0(C^Q) - k1(C^Q)".into());
            provenance.insert("k1".into(), "transformed branch types".into());
        }
        None => {
            provenance.insert("class".into(), "omitted: k1(C^Q) unknown without complete branch data".into());
        }
    }
    CurveInvariants { degree, rank: rank_q.max(0) as u32, class, genus, genus_source, k0: k0q, k1: k1q, provenance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, Vars};

    fn cfg() -> SampleConfig {
        SampleConfig::default()
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(stationary_indices(&BranchType::new(1, 2, 3).unwrap()), (0, 0));
        assert_eq!(stationary_indices(&BranchType::new(2, 3, 5).unwrap()), (1, 0));
        assert_eq!(stationary_indices(&BranchType::new(3, 4, 6).unwrap()), (2, 0));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_from_rank(6, 10, 2), Ok(1));
        assert_eq!(genus_from_rank(6, 7, 3), Ok(0));
        assert_eq!(genus_from_rank(3, 4, 0), Ok(0));
        assert_eq!(genus_from_rank(3, 5, 0), Err(Error::NonIntegerGenus(1)));
    }

    #[test]
    fn piene_examples() {
        assert_eq!(piene_rank(6, 0, 3), 7);
        assert_eq!(piene_class(6, 0, 3, 0), 6);
        assert_eq!(piene_rank(5, 0, 0), 8);
    }

    #[test]
    fn theorem_examples() {
        let s = theorem_invariants(6, 7, 0, GenusSource::RationalZero, 0, Some(1));
        assert_eq!((s.degree, s.rank, s.class), (13, 24, Some(32)));
        assert!(s.piene_consistent());
        let e6 = theorem_invariants(6, 10, 1, GenusSource::PieneInverted, 0, None);
        assert_eq!((e6.degree, e6.rank, e6.class), (16, 32, None));
        assert_eq!(theorem_invariants(3, 4, 0, GenusSource::RationalZero, 0, Some(0)).degree, 7);
    }

    #[test]
    fn image_degree_examples() {
        let uv = Vars::uv();
        let p = |s: &str| parse_poly(s, &uv).unwrap();
        let cubic = [p("u^3"), p("u^2*v"), p("u*v^2"), p("v^3")];
        let d = image_degree(&cubic, &cfg()).unwrap();
        assert_eq!((d.image_degree, d.map_degree), (3, 1));
        let double = [p("u^4"), p("u^2*v^2"), p("v^4"), HomoPoly::zero(&uv)];
        let d = image_degree(&double, &cfg()).unwrap();
        assert_eq!((d.image_degree, d.map_degree), (2, 2));
        assert_eq!(d.hyperplane_roots, 4);
    }

    #[test]
    fn rank_of_rational_curves() {
        let tc = RationalCurve::parse(&["u^3", "u^2*v", "u*v^2", "v^3"]).unwrap();
        assert_eq!(rank_rational(&tc, &cfg()), Ok(4));
        let sextic = RationalCurve::parse(&["-u^4*v^2", "-sqrt(2)/2*u^3*v^3", "sqrt(2)/2*u*v^5 - 1/2*v^6", "u^6"]).unwrap();
        assert_eq!(rank_rational(&sextic, &cfg()), Ok(7));
        let line = RationalCurve::parse(&["u", "v", "0", "0"]).unwrap();
        assert_eq!(rank_rational(&line, &cfg()), Err(Error::DegenerateTangentMap));
    }

    #[test]
    fn stationary_indices_of_rational_curves() {
        let tc = RationalCurve::parse(&["u^3", "u^2*v", "u*v^2", "v^3"]).unwrap();
        assert_eq!(rational_stationary_indices(&tc), Ok((0, 0)));
        assert!(wronskian(&tc).degree().is_some_and(|d| d == 0));
        let sextic = RationalCurve::parse(&["-u^4*v^2", "-sqrt(2)/2*u^3*v^3", "sqrt(2)/2*u*v^5 - 1/2*v^6", "u^6"]).unwrap();
        assert_eq!(rational_stationary_indices(&sextic), Ok((3, 0)));
        assert_eq!(class_rational(&sextic, &cfg()), Ok(6));
        // u^7 v^4 (u - 6√2/5 v): orders 7 and 4 at the two cusps, plus a simple root.
        let w = BinaryForm::from_poly(&wronskian(&sextic)).unwrap();
        assert_eq!(w.degree(), 12);
        assert_eq!(w.v_multiplicity(), 4);
        let u7 = BinaryForm::from_poly(&parse_poly("u^7", &Vars::uv()).unwrap()).unwrap();
        assert!(w.div_exact(&u7).is_ok());
    }

    #[test]
    fn plane_missing_the_center() {
        let b = Branch::from_polys(vec![
            vec![FieldElement::zero(), FieldElement::one()],
            vec![FieldElement::zero(), FieldElement::zero(), FieldElement::one()],
            vec![FieldElement::zero(), FieldElement::zero(), FieldElement::zero(), FieldElement::one()],
            vec![FieldElement::one()],
        ])
        .unwrap();
        let plane = parse_poly("t + x", &Vars::xyzt()).unwrap();
        assert_eq!(intersection_multiplicity(&[b.clone()], &plane), Ok(0));
        let inside = parse_poly("x^2 - y*t", &Vars::xyzt()).unwrap();
        assert_eq!(intersection_multiplicity(&[b], &inside), Err(Error::BranchInsideSurface));
    }
}
