//! Binary forms in (u, v): gcd, squarefree part and exact roots.
//!
//! A form of degree `D` is handled through its dehomogenization `f(u, 1)`,
//! a dense univariate polynomial, together with `D`; the power of `v` that
//! divides the form is `D - deg f(u, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{FieldElement, Rational};
use super::poly::{HomoPoly, Vars};
use crate::error::{Error, Result};

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly(Vec<FieldElement>);

impl UniPoly {
    pub fn new(mut c: Vec<FieldElement>) -> Self {
        while c.last().is_some_and(FieldElement::is_zero) {
            c.pop();
        }
        UniPoly(c)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&FieldElement> {
        self.0.last()
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        UniPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero lead")),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = FieldElement::zero();
        UniPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = FieldElement::zero();
        UniPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FieldElement::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        UniPoly::new(out)
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.lead().ok_or(Error::DivisionByZero)?.inv()?;
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut q = vec![FieldElement::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &dl;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * dj);
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((UniPoly::new(q), UniPoly::new(r)))
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * &FieldElement::from_int(k as i64)).collect())
    }

    /// Monic gcd; the gcd of two zeros is zero.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).expect("gcd divides").0.monic()
    }

    /// `self(x + c)`.
    pub fn taylor_shift(&self, c: &FieldElement) -> Self {
        let mut acc = UniPoly::zero();
        let lin = UniPoly::new(vec![c.clone(), FieldElement::one()]);
        for a in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&UniPoly::new(vec![a.clone()]));
        }
        acc
    }
}

/// A binary form as (degree, coefficients of u^i v^(D-i)).
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm {
    degree: u32,
    dehom: UniPoly,
}

impl BinaryForm {
    pub fn from_poly(p: &HomoPoly) -> Result<Self> {
        if p.vars().len() != 2 {
            return Err(Error::Invalid("binary form expected".into()));
        }
        let d = p.degree().ok_or(Error::ZeroPolynomial)?;
        let mut c = vec![FieldElement::zero(); d as usize + 1];
        for (e, x) in p.terms() {
            c[e[0] as usize] = x.clone();
        }
        Ok(BinaryForm { degree: d, dehom: UniPoly::new(c) })
    }

    pub fn new(degree: u32, dehom: UniPoly) -> Self {
        assert!(dehom.degree().is_some_and(|k| k <= degree as usize), "degree mismatch");
        BinaryForm { degree, dehom }
    }

    pub fn to_poly(&self, vars: &Vars) -> HomoPoly {
        let d = self.degree;
        let terms = self.dehom.coeffs().iter().enumerate().map(|(i, c)| (vec![i as u32, d - i as u32], c.clone()));
        HomoPoly::from_terms(vars, terms).expect("binary forms are homogeneous")
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dehomogenized(&self) -> &UniPoly {
        &self.dehom
    }

    /// Exponent of the largest power of v dividing the form.
    pub fn v_multiplicity(&self) -> u32 {
        self.degree - self.dehom.degree().unwrap() as u32
    }

    pub fn eval(&self, u: &FieldElement, v: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero();
        for (i, c) in self.dehom.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(&(c * &u.pow(i as u32)) * &v.pow(self.degree - i as u32));
            }
        }
        acc
    }

    /// Monic gcd (leading coefficient of the highest u-power is 1).
    pub fn gcd(&self, o: &BinaryForm) -> BinaryForm {
        let vm = self.v_multiplicity().min(o.v_multiplicity());
        let g = self.dehom.gcd(&o.dehom);
        BinaryForm { degree: g.degree().unwrap() as u32 + vm, dehom: g }
    }

    pub fn squarefree(&self) -> BinaryForm {
        let g = self.dehom.squarefree();
        let vm = self.v_multiplicity().min(1);
        BinaryForm { degree: g.degree().unwrap() as u32 + vm, dehom: g }
    }

    /// Exact quotient by a divisor.
    pub fn div_exact(&self, d: &BinaryForm) -> Result<BinaryForm> {
        let (q, r) = self.dehom.divrem(&d.dehom)?;
        if !r.is_zero() || d.v_multiplicity() > self.v_multiplicity() {
            return Err(Error::Invalid("binary form division is not exact".into()));
        }
        Ok(BinaryForm { degree: self.degree - d.degree, dehom: q })
    }

    /// Distinct projective roots `[u:v]`, exact in the coefficient tower.
    pub fn roots(&self) -> Result<Vec<[FieldElement; 2]>> {
        let mut out = Vec::new();
        if self.v_multiplicity() > 0 {
            out.push([FieldElement::one(), FieldElement::zero()]);
        }
        for r in univariate_roots(&self.dehom.squarefree())? {
            out.push([r, FieldElement::one()]);
        }
        Ok(out)
    }
}

/// gcd of several binary forms.
pub fn gcd_all(forms: &[BinaryForm]) -> Option<BinaryForm> {
    let mut it = forms.iter();
    let mut g = it.next()?.clone();
    for f in it {
        if g.degree == 0 {
            break;
        }
        g = g.gcd(f);
    }
    Some(g)
}

/// gcd of binary forms given as polynomials; zero inputs are skipped.
pub fn poly_gcd(a: &HomoPoly, b: &HomoPoly) -> Result<HomoPoly> {
    let vars = a.vars().clone();
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Err(Error::ZeroPolynomial),
        (true, false) => Ok(BinaryForm::from_poly(b)?.gcd(&BinaryForm::from_poly(b)?).to_poly(&vars)),
        (false, true) => Ok(BinaryForm::from_poly(a)?.gcd(&BinaryForm::from_poly(a)?).to_poly(&vars)),
        (false, false) => Ok(BinaryForm::from_poly(a)?.gcd(&BinaryForm::from_poly(b)?).to_poly(&vars)),
    }
}

pub fn poly_squarefree(a: &HomoPoly) -> Result<HomoPoly> {
    Ok(BinaryForm::from_poly(a)?.squarefree().to_poly(a.vars()))
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() || n.bits() > 48 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            if &i * &i != n {
                out.push(&n / &i);
            }
        }
        i += 1;
    }
    Some(out)
}

fn rational_roots(p: &UniPoly) -> Vec<FieldElement> {
    let Some(qs) = p.coeffs().iter().map(FieldElement::to_rational).collect::<Option<Vec<Rational>>>() else {
        return Vec::new();
    };
    let l = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = qs.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let (Some(a0), Some(an)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        return Vec::new();
    };
    let mut out: Vec<FieldElement> = Vec::new();
    for p in &a0 {
        for q in &an {
            for sign in [1, -1] {
                let r = FieldElement::from_rational(Rational::new(p * sign, q.clone()));
                if !out.contains(&r) && p_eval_zero(&qs, &r) {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn p_eval_zero(qs: &[Rational], r: &FieldElement) -> bool {
    let r = r.to_rational().unwrap();
    let mut acc = Rational::zero();
    for c in qs.iter().rev() {
        acc = acc * &r + c;
    }
    acc.is_zero()
}

/// Roots of a squarefree polynomial, all of which must lie in the tower.
pub fn univariate_roots(p: &UniPoly) -> Result<Vec<FieldElement>> {
    let mut p = p.monic();
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    if p.coeffs()[0].is_zero() {
        out.push(FieldElement::zero());
        p = p.divrem(&UniPoly::new(vec![FieldElement::zero(), FieldElement::one()]))?.0;
    }
    if p.degree().unwrap() > 2 {
        for r in rational_roots(&p) {
            p = p.divrem(&UniPoly::new(vec![-&r, FieldElement::one()]))?.0;
            out.push(r);
        }
    }
    match p.degree().unwrap() {
        0 => {}
        1 => out.push(-&p.coeffs()[0]),
        2 => {
            let (c, b) = (&p.coeffs()[0], &p.coeffs()[1]);
            let disc = &(b * b) - &(&FieldElement::from_int(4) * c);
            let s = disc.sqrt().ok_or_else(|| Error::RootOutsideField(format!("u^2 + ({b})*u + {c}")))?;
            let half = FieldElement::from_ratio(1, 2);
            out.push(&(&s - b) * &half);
            out.push(&(&(-&s) - b) * &half);
        }
        d => return Err(Error::RootOutsideField(format!("a degree-{d} factor"))),
    }
    Ok(out)
}
