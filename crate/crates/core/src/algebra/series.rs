//! Truncated power series in one variable with precision tracking.
//!
//! A series of precision `N` knows its coefficients of `u^0 .. u^(N-1)`;
//! everything from `u^N` on is unknown. Products use the pessimistic rule
//! `min(Na + vb, Nb + va)` where `v` is the (lower bound on the) valuation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::FieldElement;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TruncSeries {
    coeffs: Vec<FieldElement>,
}

impl TruncSeries {
    /// `coeffs[k]` is the coefficient of `u^k`; the precision is `coeffs.len()`.
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        TruncSeries { coeffs }
    }

    /// Known coefficients padded or cut to `prec`.
    pub fn from_coeffs(mut coeffs: Vec<FieldElement>, prec: usize) -> Self {
        coeffs.resize(prec, FieldElement::zero());
        TruncSeries { coeffs }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_coeffs(Vec::new(), prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::constant(FieldElement::one(), prec)
    }

    pub fn constant(c: FieldElement, prec: usize) -> Self {
        Self::from_coeffs(vec![c], prec)
    }

    /// `c * u^k` with the given precision.
    pub fn monomial(c: FieldElement, k: usize, prec: usize) -> Self {
        let mut v = vec![FieldElement::zero(); k];
        v.push(c);
        Self::from_coeffs(v, prec)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `u^k`, or `None` when `k` is beyond the precision.
    pub fn coeff(&self, k: usize) -> Option<&FieldElement> {
        self.coeffs.get(k)
    }

    /// Index of the first nonzero known coefficient, or the precision.
    pub fn valuation_bound(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len())
    }

    /// Certified valuation.
    pub fn valuation(&self) -> Result<usize> {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(v) => Ok(v),
            None => Err(Error::InsufficientPrecision(format!(
                "all {} known coefficients vanish",
                self.coeffs.len()
            ))),
        }
    }

    /// `min(valuation, cap)`, certified whenever either side is known.
    pub fn valuation_capped(&self, cap: usize) -> Result<usize> {
        let v = self.valuation_bound();
        if v < self.coeffs.len() || v >= cap {
            Ok(v.min(cap))
        } else {
            Err(Error::InsufficientPrecision(format!(
                "valuation beyond precision {} but below cap {cap}",
                self.coeffs.len()
            )))
        }
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    pub fn leading_coeff(&self) -> Result<FieldElement> {
        Ok(self.coeffs[self.valuation()?].clone())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        TruncSeries { coeffs: self.coeffs[..prec.min(self.coeffs.len())].to_vec() }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &FieldElement::from_int(k as i64))
            .collect();
        TruncSeries { coeffs }
    }

    /// Multiply by `u^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![FieldElement::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        TruncSeries { coeffs: v }
    }

    /// Divide by `u^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if self.coeffs.len() < k || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::Invalid(format!("series is not divisible by u^{k}")));
        }
        Ok(TruncSeries { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.coeffs.len();
        let c0 = self.coeffs.first().ok_or_else(|| Error::InsufficientPrecision("empty series".into()))?;
        let inv0 = c0.inv().map_err(|_| Error::Invalid("series is not a unit".into()))?;
        let mut out: Vec<FieldElement> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut acc = FieldElement::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(-&(&acc * &inv0));
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// `self(g(u))` for `g` with zero constant term.
    pub fn compose(&self, g: &TruncSeries) -> Result<Self> {
        if g.coeffs.first().is_some_and(|c| !c.is_zero()) {
            return Err(Error::Invalid("inner series must have zero constant term".into()));
        }
        let n = self.coeffs.len();
        let mut acc = TruncSeries::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &TruncSeries::constant(c.clone(), n);
        }
        Ok(acc)
    }

    pub fn is_exactly_equal(&self, other: &TruncSeries) -> bool {
        self.coeffs.len() == other.coeffs.len() && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }
}

fn linear(a: &TruncSeries, b: &TruncSeries, sign: bool) -> TruncSeries {
    let n = a.coeffs.len().min(b.coeffs.len());
    let coeffs = (0..n).map(|k| if sign { &a.coeffs[k] + &b.coeffs[k] } else { &a.coeffs[k] - &b.coeffs[k] }).collect();
    TruncSeries { coeffs }
}

impl<'a> Add<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &'a TruncSeries) -> TruncSeries {
        linear(self, rhs, true)
    }
}

impl<'a> Sub<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &'a TruncSeries) -> TruncSeries {
        linear(self, rhs, false)
    }
}

impl<'a> Mul<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &'a TruncSeries) -> TruncSeries {
        let (va, vb) = (self.valuation_bound(), rhs.valuation_bound());
        let prec = (self.coeffs.len() + vb).min(rhs.coeffs.len() + va);
        let mut out = vec![FieldElement::zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().skip(va) {
            if i >= prec {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().skip(vb) {
                if i + j >= prec {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        TruncSeries { coeffs: out }
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = if c.term_count() > 1 { format!("({c})") } else { c.to_string() };
            parts.push(match k {
                0 => c,
                1 => format!("{c}*u"),
                _ => format!("{c}*u^{k}"),
            });
        }
        parts.push(format!("O(u^{})", self.coeffs.len()));
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(cs: &[i64], prec: usize) -> TruncSeries {
        TruncSeries::from_coeffs(cs.iter().map(|&c| FieldElement::from_int(c)).collect(), prec)
    }

    #[test]
    fn product_precision_is_pessimistic() {
        let a = s(&[0, 0, 1, 3], 6); // u^2 + ...
        let b = s(&[0, 1], 4); // u
        let p = &a * &b;
        assert_eq!(p.precision(), 6.min(4 + 2));
        assert_eq!(p.valuation().unwrap(), 3);
    }

    #[test]
    fn zero_series_has_no_valuation() {
        let z = TruncSeries::zero(5);
        assert!(matches!(z.valuation(), Err(Error::InsufficientPrecision(_))));
        assert_eq!(z.valuation_capped(5).unwrap(), 5);
        assert_eq!(z.valuation_capped(3).unwrap(), 3);
        assert!(z.valuation_capped(7).is_err());
    }

    #[test]
    fn inverse_of_geometric() {
        let a = s(&[1, -1], 8);
        let inv = a.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| c.is_one()));
        assert!((&a * &inv).coeffs().iter().skip(1).all(|c| c.is_zero()));
    }

    #[test]
    fn derivative_drops_precision() {
        let a = s(&[1, 2, 3], 5);
        let d = a.derivative();
        assert_eq!(d.precision(), 4);
        assert_eq!(d.coeffs()[1], FieldElement::from_int(6));
    }

    #[test]
    fn compose_reparametrizes() {
        let a = s(&[0, 0, 1], 8); // u^2
        let g = s(&[0, 1, 1], 8); // u + u^2
        let c = a.compose(&g).unwrap(); // u^2 + 2u^3 + u^4
        assert_eq!(c.coeffs()[2], FieldElement::from_int(1));
        assert_eq!(c.coeffs()[3], FieldElement::from_int(2));
        assert_eq!(c.coeffs()[4], FieldElement::from_int(1));
        assert!(c.coeffs()[5..].iter().all(|x| x.is_zero()));
    }
}
