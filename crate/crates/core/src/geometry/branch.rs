//! Local branches of space curves and their normal form.
//!
//! A branch is a germ `u -> [α1(u):α2(u):α3(u):α4(u)]`. After a projective
//! change of coordinates and division by one coordinate it can be brought to
//!
//! ```text
//! α1 = u^e (1 + ...),  α2 = u^r (1 + ...),  α3 = u^s (1 + ...),  α4 = 1
//! ```
//!
//! with `0 < e < r < s`, no `u^r` term in `α1` and no `u^s` term in `α2`.
//! The triple `(e, r, s)` is the type of the branch.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::json::{field_from_json, field_to_json};
use crate::algebra::{FieldElement, PolyParser, TruncSeries, UniPoly};
use crate::error::{Error, Result};

use super::curve::RationalCurve;
use crate::algebra::binary::{gcd_all, BinaryForm};

/// Serialized as `[e, r, s]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "[u32; 3]")]
pub struct BranchType {
    pub e: u32,
    pub r: u32,
    pub s: u32,
}

impl BranchType {
    pub fn new(e: u32, r: u32, s: u32) -> Result<Self> {
        if 0 < e && e < r && r < s {
            Ok(BranchType { e, r, s })
        } else {
            Err(Error::DegenerateType([e, r, s]))
        }
    }

    /// Sort an unordered triple; coinciding entries are an error.
    pub fn sorted(mut t: [u32; 3]) -> Result<Self> {
        t.sort_unstable();
        Self::new(t[0], t[1], t[2])
    }

    pub fn ordinary() -> Self {
        BranchType { e: 1, r: 2, s: 3 }
    }

    pub fn is_ordinary(&self) -> bool {
        *self == Self::ordinary()
    }

    /// Stationary index of the first kind, `e - 1`.
    pub fn k0(&self) -> u32 {
        self.e - 1
    }

    /// Stationary index of the second kind, `r - e - 1`.
    pub fn k1(&self) -> u32 {
        self.r - self.e - 1
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.e, self.r, self.s]
    }

    /// Default working precision `2(e+s)+6`.
    pub fn working_precision(&self) -> usize {
        2 * (self.e + self.s) as usize + 6
    }
}

impl From<BranchType> for [u32; 3] {
    fn from(t: BranchType) -> Self {
        t.as_array()
    }
}

impl fmt::Display for BranchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.e, self.r, self.s)
    }
}

/// A branch given by four power series.
///
/// An exact branch has polynomial coordinates known completely, so its
/// precision can be raised at will.
#[derive(Clone, Debug)]
pub struct Branch {
    center: Vec<FieldElement>,
    coords: Vec<TruncSeries>,
    exact: bool,
    normalized: bool,
}

fn center_of(coords: &[TruncSeries]) -> Result<Vec<FieldElement>> {
    let v0 = coords.iter().map(TruncSeries::valuation_bound).min().unwrap_or(0);
    if coords.iter().all(|c| v0 >= c.precision()) {
        return Err(Error::InsufficientPrecision("branch coordinates vanish to precision".into()));
    }
    Ok(coords.iter().map(|c| c.coeff(v0).cloned().unwrap_or_else(FieldElement::zero)).collect())
}

fn proportional(a: &[FieldElement], b: &[FieldElement]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| (&a[i] * &b[j]) == (&a[j] * &b[i])))
}

impl Branch {
    /// Branch from truncated series; the center is read off the lowest order terms.
    pub fn from_series(coords: Vec<TruncSeries>) -> Result<Self> {
        if coords.len() != 4 {
            return Err(Error::Invalid("a branch needs four coordinates".into()));
        }
        let center = center_of(&coords)?;
        Ok(Branch { center, coords, exact: false, normalized: false })
    }

    /// Branch with polynomial coordinates (coefficient lists from `u^0`).
    pub fn from_polys(polys: Vec<Vec<FieldElement>>) -> Result<Self> {
        if polys.len() != 4 {
            return Err(Error::Invalid("a branch needs four coordinates".into()));
        }
        let len = polys.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let coords: Vec<TruncSeries> = polys.into_iter().map(|p| TruncSeries::from_coeffs(p, len)).collect();
        if coords.iter().all(TruncSeries::is_zero_to_precision) {
            return Err(Error::NotACurveBranch("all coordinates vanish".into()));
        }
        let center = center_of(&coords)?;
        Ok(Branch { center, coords, exact: true, normalized: false })
    }

    pub fn center(&self) -> &[FieldElement] {
        &self.center
    }

    pub fn coords(&self) -> &[TruncSeries] {
        &self.coords
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn precision(&self) -> usize {
        self.coords.iter().map(TruncSeries::precision).min().unwrap()
    }

    /// Polynomial degree bound of an exact branch.
    pub fn poly_len(&self) -> usize {
        self.coords.iter().map(|c| c.coeffs().iter().rposition(|x| !x.is_zero()).map_or(0, |k| k + 1)).max().unwrap()
    }

    /// Same branch at precision `n`; raising the precision needs an exact branch.
    pub fn with_precision(&self, n: usize) -> Result<Self> {
        if n > self.precision() && !self.exact {
            return Err(Error::InsufficientPrecision(format!(
                "branch known to precision {}, {n} requested",
                self.precision()
            )));
        }
        let coords = self.coords.iter().map(|c| TruncSeries::from_coeffs(c.coeffs().to_vec(), n)).collect();
        Ok(Branch { coords, ..self.clone() })
    }

    /// Apply `x -> L x`.
    pub fn transformed(&self, l: &[Vec<FieldElement>]) -> Result<Self> {
        let coords = super::quadric::apply_linear(l, &self.coords);
        let mut b = if self.exact { Self::from_polys(coords.iter().map(|c| c.coeffs().to_vec()).collect())? } else { Self::from_series(coords)? };
        b.coords = b.coords.into_iter().map(|c| c.truncate(self.precision())).collect();
        Ok(b)
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Vec<Value>> = self
            .coords
            .iter()
            .map(|c| {
                let n = if self.exact { self.poly_len() } else { c.precision() };
                c.coeffs()[..n.min(c.precision())].iter().map(field_to_json).collect()
            })
            .collect();
        let mut out = json!({
            "center": self.center.iter().map(field_to_json).collect::<Vec<_>>(),
            "coordinates": coords,
        });
        if !self.exact {
            out["precision"] = json!(self.precision());
        }
        out
    }

    /// Read `{center, coordinates, precision}`; without `precision` the
    /// coordinates are exact polynomials.
    pub fn from_json(v: &Value, ctx: &mut PolyParser) -> Result<Self> {
        let arr = v
            .get("coordinates")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 4)
            .ok_or_else(|| Error::Invalid("branch needs four coordinate lists".into()))?;
        let mut polys = Vec::new();
        for c in arr {
            let list = c.as_array().ok_or_else(|| Error::Invalid("coordinate must be a list of coefficients".into()))?;
            polys.push(list.iter().map(|x| field_from_json(x, ctx)).collect::<Result<Vec<_>>>()?);
        }
        let b = match v.get("precision") {
            None | Some(Value::Null) => Self::from_polys(polys)?,
            Some(p) => {
                let n = p.as_u64().ok_or_else(|| Error::Invalid("precision must be an integer".into()))? as usize;
                if polys.iter().any(|c| c.len() > n) {
                    return Err(Error::Invalid("more coefficients than the stated precision".into()));
                }
                Self::from_series(polys.into_iter().map(|c| TruncSeries::from_coeffs(c, n)).collect())?
            }
        };
        if let Some(c) = v.get("center") {
            let c = c
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| Error::Invalid("center must have four coordinates".into()))?
                .iter()
                .map(|x| field_from_json(x, ctx))
                .collect::<Result<Vec<_>>>()?;
            if !proportional(&c, &b.center) {
                return Err(Error::Invalid("stated center is not the point of the branch".into()));
            }
        }
        Ok(b)
    }
}

/// The projective change of coordinates used by [`normalize_branch`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    /// Normalized coordinates are `L x` (rows of `L`), up to the common factor.
    pub matrix: Vec<Vec<FieldElement>>,
    /// Power of `u` divided out of all coordinates before normalizing.
    pub stripped: usize,
}

#[derive(Clone, Debug)]
pub struct Normalization {
    pub branch: Branch,
    pub ty: BranchType,
    pub change: CoordinateChange,
}

impl Normalization {
    /// The normalized `α1, α2, α3` (with `α4 = 1`).
    pub fn alpha(&self) -> &[TruncSeries] {
        &self.branch.coords[..3]
    }
}

/// Bring a branch to normal form at its current precision.
pub fn normalize_branch(b: &Branch) -> Result<Normalization> {
    let n = b.precision();
    let v0 = b.coords.iter().map(TruncSeries::valuation_bound).min().unwrap();
    if v0 >= n {
        return Err(Error::InsufficientPrecision("branch vanishes to precision".into()));
    }
    let stripped: Vec<TruncSeries> = b.coords.iter().map(|c| c.truncate(n).shift_down(v0)).collect::<Result<_>>()?;
    let short = |why: &str| {
        if b.exact {
            Error::NotACurveBranch(format!("coordinates are linearly dependent ({why})"))
        } else {
            Error::InsufficientPrecision(why.to_string())
        }
    };

    // Echelon by leading exponent, keeping the coefficient rows.
    let unit = |i: usize| (0..4).map(|j| if i == j { FieldElement::one() } else { FieldElement::zero() }).collect::<Vec<_>>();
    let mut pivots: Vec<(usize, TruncSeries, Vec<FieldElement>)> = Vec::new();
    for (i, s) in stripped.iter().enumerate() {
        let (mut s, mut row) = (s.clone(), unit(i));
        loop {
            let v = s.valuation_bound();
            if v >= s.precision() {
                return Err(short("a coordinate reduces to zero"));
            }
            match pivots.iter().find(|p| p.0 == v) {
                Some((_, ps, prow)) => {
                    let f = s.coeffs()[v].div(&ps.coeffs()[v])?;
                    s = &s - &ps.scale(&f);
                    row = row.iter().zip(prow).map(|(a, b)| a - &(&f * b)).collect();
                }
                None => {
                    pivots.push((v, s, row));
                    break;
                }
            }
        }
    }
    pivots.sort_by_key(|p| p.0);
    if pivots[0].0 != 0 {
        return Err(short("no unit coordinate"));
    }
    let (e, r, s) = (pivots[1].0, pivots[2].0, pivots[3].0);
    let ty = BranchType::new(e as u32, r as u32, s as u32)?;

    let inv0 = pivots[0].1.inverse()?;
    let mut alpha = Vec::with_capacity(3);
    let mut rows = Vec::with_capacity(4);
    let inv_lead = pivots[0].1.coeffs()[0].inv()?;
    for (v, ser, row) in &pivots[1..] {
        let q = ser * &inv0;
        let c = q.coeffs()[*v].inv()?;
        alpha.push(q.scale(&c));
        let c = &c * &inv_lead;
        rows.push(row.iter().map(|x| x * &c).collect::<Vec<_>>());
    }
    rows.push(pivots[0].2.iter().map(|x| x * &inv_lead).collect());

    // No u^s term in α2, then no u^r term in α1.
    let coef = |ser: &TruncSeries, k: usize| {
        ser.coeff(k).cloned().ok_or_else(|| Error::InsufficientPrecision(format!("coefficient of u^{k} unknown")))
    };
    let b2 = coef(&alpha[1], s)?;
    alpha[1] = &alpha[1] - &alpha[2].scale(&b2);
    rows[1] = rows[1].iter().zip(&rows[2]).map(|(a, c)| a - &(&b2 * c)).collect();
    let a1 = coef(&alpha[0], r)?;
    alpha[0] = &alpha[0] - &alpha[1].scale(&a1);
    rows[0] = rows[0].iter().zip(&rows[1]).map(|(a, c)| a - &(&a1 * c)).collect();

    let prec = alpha.iter().map(TruncSeries::precision).min().unwrap();
    alpha.push(TruncSeries::one(prec));
    let center = vec![FieldElement::zero(), FieldElement::zero(), FieldElement::zero(), FieldElement::one()];
    Ok(Normalization {
        branch: Branch { center, coords: alpha, exact: false, normalized: true },
        ty,
        change: CoordinateChange { matrix: rows, stripped: v0 },
    })
}

/// Normalize at the default working precision, raising precision for exact
/// branches (one retry at twice the precision).
pub fn normalize_at_working_precision(b: &Branch) -> Result<Normalization> {
    if !b.exact {
        return normalize_branch(b);
    }
    let base = b.poly_len().max(8);
    let first = match normalize_branch(&b.with_precision(base)?) {
        Ok(nm) => nm,
        Err(Error::InsufficientPrecision(_)) => normalize_branch(&b.with_precision(2 * base)?)?,
        Err(e) => return Err(e),
    };
    let n = first.ty.working_precision().max(base);
    match normalize_branch(&b.with_precision(n)?) {
        Err(Error::InsufficientPrecision(_)) => normalize_branch(&b.with_precision(2 * n)?),
        other => other,
    }
}

/// Coefficients of `f(u)` as a polynomial in `t` after `u = 1/t`, times `t^d`.
fn reversed(f: &UniPoly, d: usize) -> Vec<FieldElement> {
    let mut c = vec![FieldElement::zero(); d + 1];
    for (i, x) in f.coeffs().iter().enumerate() {
        c[d - i] = x.clone();
    }
    c
}

/// Parameter values of `rc` mapping to the point `m`.
pub fn preimages(rc: &RationalCurve, m: &[FieldElement]) -> Result<Vec<[FieldElement; 2]>> {
    if m.len() != 4 || m.iter().all(FieldElement::is_zero) {
        return Err(Error::Invalid("a point needs four coordinates, not all zero".into()));
    }
    let g = rc.components();
    let mut minors = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let p = &g[j].scale(&m[i]) - &g[i].scale(&m[j]);
            if !p.is_zero() {
                minors.push(BinaryForm::from_poly(&p)?);
            }
        }
    }
    let Some(h) = gcd_all(&minors) else {
        return Err(Error::Invalid("the curve is a point".into()));
    };
    if h.degree() == 0 {
        return Err(Error::NotOnCurve);
    }
    h.roots()
}

/// One branch per parameter preimage of `m`, as exact Taylor expansions.
pub fn branches_of_rational_curve(rc: &RationalCurve, m: &[FieldElement]) -> Result<Vec<Branch>> {
    let d = rc.degree() as usize;
    preimages(rc, m)?
        .into_iter()
        .map(|[u0, v0]| {
            let polys = rc
                .components()
                .iter()
                .map(|g| {
                    if g.is_zero() {
                        return Ok(vec![FieldElement::zero()]);
                    }
                    let f = BinaryForm::from_poly(g)?;
                    if v0.is_zero() {
                        Ok(reversed(f.dehomogenized(), d))
                    } else {
                        let u0 = u0.div(&v0)?;
                        Ok(f.dehomogenized().taylor_shift(&u0).coeffs().to_vec())
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Branch::from_polys(polys)
        })
        .collect()
}
