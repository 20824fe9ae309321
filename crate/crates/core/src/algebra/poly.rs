//! Homogeneous polynomials over a quadratic tower.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::field::FieldElement;
use super::series::TruncSeries;
use crate::error::{Error, Result};

/// Ordered variable names; compared by content.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Vars(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// The coordinates x, y, z, t of projective 3-space.
    pub fn xyzt() -> Self {
        Self::new(&["x", "y", "z", "t"])
    }

    /// The coordinates u, v of the projective line.
    pub fn uv() -> Self {
        Self::new(&["u", "v"])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

#[derive(Clone, Debug)]
pub struct HomoPoly {
    vars: Vars,
    terms: BTreeMap<Vec<u32>, FieldElement>,
    degree: Option<u32>,
}

fn exp_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl HomoPoly {
    pub fn zero(vars: &Vars) -> Self {
        HomoPoly { vars: vars.clone(), terms: BTreeMap::new(), degree: None }
    }

    pub fn constant(vars: &Vars, c: FieldElement) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, FieldElement::one())
    }

    pub fn monomial(vars: &Vars, exps: Vec<u32>, c: FieldElement) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.degree = Some(exp_degree(&exps));
            p.terms.insert(exps, c);
        }
        p
    }

    /// Build from arbitrary terms, merging repeats and checking homogeneity.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut map: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::Invalid("exponent vector length".into()));
            }
            let entry = map.entry(e).or_insert_with(FieldElement::zero);
            *entry = &*entry + &c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut degree = None;
        let mut first: Option<&Vec<u32>> = None;
        for e in map.keys() {
            match first {
                None => {
                    first = Some(e);
                    degree = Some(exp_degree(e));
                }
                Some(f) if exp_degree(f) != exp_degree(e) => {
                    return Err(Error::NotHomogeneous { first: f.clone(), second: e.clone() });
                }
                _ => {}
            }
        }
        Ok(HomoPoly { vars: vars.clone(), terms: map, degree })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElement {
        self.terms.get(exps).cloned().unwrap_or_else(FieldElement::zero)
    }

    fn check_vars(&self, other: &HomoPoly) {
        assert_eq!(self.vars, other.vars, "polynomials over different variables");
    }

    pub fn scale(&self, c: &FieldElement) -> HomoPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        HomoPoly { vars: self.vars.clone(), terms, degree: self.degree }
    }

    pub fn pow(&self, k: u32) -> HomoPoly {
        let mut acc = Self::constant(&self.vars, FieldElement::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> HomoPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c * &FieldElement::from_int(e[i] as i64));
        }
        out.degree = out.terms.keys().next().map(|e| exp_degree(e));
        out
    }

    pub fn gradient(&self) -> Result<Vec<HomoPoly>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok((0..self.vars.len()).map(|i| self.derivative(i)).collect())
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = FieldElement::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term = &term * &x.pow(k);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.vars.len()];
        for e in self.terms.keys() {
            for (a, &b) in m.iter_mut().zip(e) {
                *a = (*a).max(b);
            }
        }
        m
    }

    /// Substitute a form for each variable.
    pub fn compose(&self, forms: &[HomoPoly]) -> HomoPoly {
        assert_eq!(forms.len(), self.vars.len());
        let target = forms[0].vars.clone();
        let maxe = self.max_exponents();
        let powers: Vec<Vec<HomoPoly>> = forms
            .iter()
            .zip(&maxe)
            .map(|(f, &m)| {
                let mut v = vec![HomoPoly::constant(&target, FieldElement::one())];
                for k in 1..=m as usize {
                    let next = &v[k - 1] * f;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = HomoPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = HomoPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            acc = acc.add_any(&term);
        }
        acc
    }

    /// Addition that tolerates a zero operand of any degree.
    fn add_any(&self, other: &HomoPoly) -> HomoPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self + other
    }

    /// Substitute truncated series for the variables.
    pub fn compose_series(&self, alpha: &[TruncSeries]) -> TruncSeries {
        assert_eq!(alpha.len(), self.vars.len());
        let prec = alpha.iter().map(|a| a.precision()).min().unwrap_or(0);
        let maxe = self.max_exponents();
        let powers: Vec<Vec<TruncSeries>> = alpha
            .iter()
            .zip(&maxe)
            .map(|(a, &m)| {
                let mut v = vec![TruncSeries::one(prec)];
                for k in 1..=m as usize {
                    let next = &v[k - 1] * a;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = TruncSeries::zero(prec);
        for (e, c) in &self.terms {
            let mut term = TruncSeries::constant(c.clone(), prec);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Apply a linear change of variables: variable i becomes sum_j m[i][j] x_j.
    pub fn linear_substitute(&self, m: &[Vec<FieldElement>]) -> HomoPoly {
        let forms: Vec<HomoPoly> = m
            .iter()
            .map(|row| {
                let terms = row.iter().enumerate().map(|(j, c)| {
                    let mut e = vec![0; self.vars.len()];
                    e[j] = 1;
                    (e, c.clone())
                });
                HomoPoly::from_terms(&self.vars, terms).expect("linear forms are homogeneous")
            })
            .collect();
        let out = self.compose(&forms);
        if out.is_zero() {
            HomoPoly::zero(&self.vars)
        } else {
            out
        }
    }

    /// Exact division by a nonzero scalar.
    pub fn div_scalar(&self, c: &FieldElement) -> Result<HomoPoly> {
        Ok(self.scale(&c.inv()?))
    }

    /// Leading coefficient in lexicographic order of exponents (first variable highest).
    pub fn leading_coeff(&self) -> Option<&FieldElement> {
        self.terms.iter().next_back().map(|(_, c)| c)
    }
}

impl PartialEq for HomoPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }
}

fn combine(a: &HomoPoly, b: &HomoPoly, sign: bool) -> HomoPoly {
    a.check_vars(b);
    if let (Some(da), Some(db)) = (a.degree, b.degree) {
        assert_eq!(da, db, "adding forms of different degree");
    }
    let mut terms = a.terms.clone();
    for (e, c) in &b.terms {
        let entry = terms.entry(e.clone()).or_insert_with(FieldElement::zero);
        *entry = if sign { &*entry + c } else { &*entry - c };
    }
    terms.retain(|_, c| !c.is_zero());
    let degree = if terms.is_empty() { None } else { a.degree.or(b.degree) };
    HomoPoly { vars: a.vars.clone(), terms, degree }
}

impl<'a> Add<&'a HomoPoly> for &'a HomoPoly {
    type Output = HomoPoly;
    fn add(self, rhs: &'a HomoPoly) -> HomoPoly {
        combine(self, rhs, true)
    }
}

impl<'a> Sub<&'a HomoPoly> for &'a HomoPoly {
    type Output = HomoPoly;
    fn sub(self, rhs: &'a HomoPoly) -> HomoPoly {
        combine(self, rhs, false)
    }
}

impl<'a> Mul<&'a HomoPoly> for &'a HomoPoly {
    type Output = HomoPoly;
    fn mul(self, rhs: &'a HomoPoly) -> HomoPoly {
        self.check_vars(rhs);
        let mut terms: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let p = c1 * c2;
                let entry = terms.entry(e).or_insert_with(FieldElement::zero);
                *entry = &*entry + &p;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        let degree = if terms.is_empty() { None } else { Some(self.degree.unwrap() + rhs.degree.unwrap()) };
        HomoPoly { vars: self.vars.clone(), terms, degree }
    }
}

impl Neg for &HomoPoly {
    type Output = HomoPoly;
    fn neg(self) -> HomoPoly {
        self.scale(&FieldElement::from_int(-1))
    }
}

impl fmt::Display for HomoPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.names())
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            let mono = mono.join("*");
            let (neg, coef) = if c.term_count() == 1 && c.to_string().starts_with('-') {
                (true, (-c).to_string())
            } else if c.term_count() == 1 {
                (false, c.to_string())
            } else {
                (false, format!("({c})"))
            };
            let body = match (coef.as_str(), mono.is_empty()) {
                (_, true) => coef,
                ("1", false) => mono,
                (_, false) => format!("{coef}*{mono}"),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn p(s: &str) -> HomoPoly {
        parse_poly(s, &Vars::xyzt()).unwrap()
    }

    #[test]
    fn gradient_of_sphere() {
        let g = p("x^2+y^2+z^2-t^2").gradient().unwrap();
        let want = ["2*x", "2*y", "2*z", "-2*t"];
        for (gi, w) in g.iter().zip(want) {
            assert_eq!(*gi, p(w));
        }
    }

    #[test]
    fn gradient_of_twisted_cubic_quadric() {
        let g = p("y^2-z*x").gradient().unwrap();
        assert_eq!(g[0], p("-z"));
        assert_eq!(g[1], p("2*y"));
        assert_eq!(g[2], p("-x"));
        assert!(g[3].is_zero());
    }

    #[test]
    fn gradient_rejects_zero() {
        assert_eq!(p("x-x").gradient().unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn euler_identity_cubic() {
        let f = p("x^3 - 2*x*y*t + 5/3*z^2*t - t^3 + y*z*x");
        let g = f.gradient().unwrap();
        let vars = Vars::xyzt();
        let mut acc = HomoPoly::zero(&vars);
        for (i, gi) in g.iter().enumerate() {
            acc = acc.add_any(&(&HomoPoly::var(&vars, i) * gi));
        }
        assert_eq!(acc, f.scale(&FieldElement::from_int(3)));
    }

    #[test]
    fn display_round_trip_shape() {
        let f = p("x^2 - 3/2*y*t + sqrt(2)*z^2 - t^2");
        assert_eq!(f.to_string(), "x^2 - 3/2*y*t + sqrt(2)*z^2 - t^2");
    }

    #[test]
    fn compose_with_twisted_cubic() {
        let uv = Vars::uv();
        let gamma: Vec<HomoPoly> =
            ["u^3", "u^2*v", "u*v^2", "v^3"].iter().map(|s| parse_poly(s, &uv).unwrap()).collect();
        assert!(p("y^2-z*x").compose(&gamma).is_zero());
        assert!(p("y*z-x*t").compose(&gamma).is_zero());
        assert_eq!(p("x*t").compose(&gamma).degree(), Some(6));
    }
}
