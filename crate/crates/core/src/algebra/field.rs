//! Exact arithmetic in towers of quadratic extensions of the rationals.
//!
//! An element of a tower of depth `k` is stored as `2^k` rationals in the
//! product basis of the generators: index bit `i` selects generator `i+1`.
//! The top generator `g` splits an element as `lo + hi*g` where `lo` and `hi`
//! live one level down, so every algorithm below recurses on halves.

use std::borrow::Cow;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// One level of a tower: the parent field and the radicand adjoined on top.
#[derive(Debug)]
pub struct FieldTower {
    parent: Option<Arc<FieldTower>>,
    radicand: FieldElement,
    depth: usize,
}

pub type TowerRef = Option<Arc<FieldTower>>;

impl FieldTower {
    /// Adjoin `sqrt(radicand)` on top of the radicand's field.
    ///
    /// Fails if the radicand already has a square root there.
    pub fn extend(base: &TowerRef, radicand: &FieldElement) -> Result<Arc<FieldTower>> {
        let (parent, r) = match unify(base, &radicand.tower) {
            Unified::Left | Unified::Right => {
                let t = deeper(base, &radicand.tower);
                (t.clone(), radicand.promote_to(&t))
            }
            Unified::Merged(t, images) => (Some(t.clone()), radicand.embed(&Some(t), &images)),
        };
        if r.sqrt().is_some() {
            return Err(Error::Invalid(format!("{r} is already a square")));
        }
        let depth = depth_of(&parent) + 1;
        Ok(Arc::new(FieldTower { parent, radicand: r, depth }))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parent(&self) -> &TowerRef {
        &self.parent
    }

    pub fn radicand(&self) -> &FieldElement {
        &self.radicand
    }

    /// Radicands from the bottom level up.
    pub fn radicands(&self) -> Vec<FieldElement> {
        let mut out = vec![self.radicand.clone()];
        let mut cur = &self.parent;
        while let Some(t) = cur {
            out.push(t.radicand.clone());
            cur = &t.parent;
        }
        out.reverse();
        out
    }
}

fn depth_of(t: &TowerRef) -> usize {
    t.as_ref().map_or(0, |t| t.depth)
}

fn deeper<'a>(a: &'a TowerRef, b: &'a TowerRef) -> &'a TowerRef {
    if depth_of(a) >= depth_of(b) {
        a
    } else {
        b
    }
}

fn ancestor(t: &Arc<FieldTower>, depth: usize) -> Option<&Arc<FieldTower>> {
    let mut cur = t;
    while cur.depth > depth {
        cur = cur.parent.as_ref()?;
    }
    Some(cur)
}

fn same_tower(a: &Arc<FieldTower>, b: &Arc<FieldTower>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    if a.depth != b.depth || a.radicand.coords != b.radicand.coords {
        return false;
    }
    match (&a.parent, &b.parent) {
        (None, None) => true,
        (Some(p), Some(q)) => same_tower(p, q),
        _ => false,
    }
}

enum Unified {
    /// The left tower contains the right one.
    Left,
    /// The right tower contains the left one.
    Right,
    /// Neither contains the other; a compositum was built on top of the left
    /// tower, with the images of the right tower's generators.
    Merged(Arc<FieldTower>, Vec<FieldElement>),
}

fn unify(a: &TowerRef, b: &TowerRef) -> Unified {
    match (a, b) {
        (_, None) => Unified::Left,
        (None, Some(_)) => Unified::Right,
        (Some(x), Some(y)) => {
            if Arc::ptr_eq(x, y) {
                return Unified::Left;
            }
            if x.depth >= y.depth {
                if ancestor(x, y.depth).is_some_and(|anc| same_tower(anc, y)) {
                    return Unified::Left;
                }
            } else if ancestor(y, x.depth).is_some_and(|anc| same_tower(anc, x)) {
                return Unified::Right;
            }
            let (t, images) = merge(x, y);
            Unified::Merged(t, images)
        }
    }
}

/// Adjoin the generators of `b` to `a` one by one, reusing square roots that
/// already exist.
fn merge(a: &Arc<FieldTower>, b: &Arc<FieldTower>) -> (Arc<FieldTower>, Vec<FieldElement>) {
    let mut chain = Vec::new();
    let mut cur = Some(b);
    while let Some(t) = cur {
        chain.push(t.clone());
        cur = t.parent.as_ref();
    }
    chain.reverse();
    let mut top: TowerRef = Some(a.clone());
    let mut images: Vec<FieldElement> = Vec::new();
    for level in chain {
        let r = level.radicand.embed(&top, &images);
        match r.sqrt() {
            Some(s) => images.push(s),
            None => {
                let depth = depth_of(&top) + 1;
                let t = Arc::new(FieldTower { parent: top.clone(), radicand: r, depth });
                images.push(FieldElement::generator(&t));
                top = Some(t);
            }
        }
    }
    (top.expect("merge keeps the left tower"), images)
}

/// Exact scalar in a quadratic tower.
#[derive(Clone, Debug)]
pub struct FieldElement {
    tower: TowerRef,
    coords: Vec<Rational>,
}

impl FieldElement {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        FieldElement { tower: None, coords: vec![q] }
    }

    /// Zero expressed in `tower`.
    pub fn zero_in(tower: &TowerRef) -> Self {
        FieldElement { tower: tower.clone(), coords: vec![Rational::zero(); 1 << depth_of(tower)] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// The top generator of `tower`.
    pub fn generator(tower: &Arc<FieldTower>) -> Self {
        let n = 1usize << tower.depth;
        let mut coords = vec![Rational::zero(); n];
        coords[n / 2] = Rational::one();
        FieldElement { tower: Some(tower.clone()), coords }
    }

    /// Build from coordinates in the product basis of `tower`.
    pub fn from_coords(tower: TowerRef, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != 1 << depth_of(&tower) {
            return Err(Error::Invalid("coordinate count does not match tower depth".into()));
        }
        Ok(FieldElement { tower, coords })
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        depth_of(&self.tower)
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coords[0].clone())
    }

    /// Embed into a tower that contains this element's tower as a prefix.
    fn promote_to(&self, tower: &TowerRef) -> FieldElement {
        let mut coords = self.coords.clone();
        coords.resize(1 << depth_of(tower), Rational::zero());
        FieldElement { tower: tower.clone(), coords }
    }

    /// Evaluate the product-basis expansion with the given generator images.
    fn embed(&self, tower: &TowerRef, images: &[FieldElement]) -> FieldElement {
        let mut acc = FieldElement::zero().promote_to(tower);
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = FieldElement::from_rational(c.clone());
            for (bit, img) in images.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    term = &term * img;
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Express this element in the tower of `other` (or a common extension).
    pub fn unify_with(&self, other: &FieldElement) -> (FieldElement, FieldElement) {
        let (t, a, b) = align(self, other);
        (
            FieldElement { tower: t.clone(), coords: a.into_owned() },
            FieldElement { tower: t, coords: b.into_owned() },
        )
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let coords = inv_s(self.tower.as_deref(), &self.coords);
        Ok(FieldElement { tower: self.tower.clone(), coords })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> FieldElement {
        let mut acc = FieldElement::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact square root inside the current tower, if one exists.
    pub fn sqrt(&self) -> Option<FieldElement> {
        let coords = sqrt_s(self.tower.as_deref(), &self.coords)?;
        Some(FieldElement { tower: self.tower.clone(), coords })
    }

    /// Square root, adjoining a new generator when none exists.
    pub fn sqrt_or_extend(&self) -> FieldElement {
        if let Some(s) = self.sqrt() {
            return s;
        }
        let t = FieldTower::extend(&self.tower, self).expect("non-square radicand");
        FieldElement::generator(&t)
    }

    /// Drop top generators whose coefficient is zero.
    pub fn reduced(&self) -> FieldElement {
        let mut tower = self.tower.clone();
        let mut n = self.coords.len();
        while let Some(t) = tower.clone() {
            if self.coords[n / 2..n].iter().any(|c| !c.is_zero()) {
                break;
            }
            n /= 2;
            tower = t.parent.clone();
        }
        FieldElement { tower, coords: self.coords[..n].to_vec() }
    }

    /// Split as `lo + hi*g` over the parent field.
    pub fn split(&self) -> Option<(FieldElement, FieldElement)> {
        let t = self.tower.as_ref()?;
        let h = self.coords.len() / 2;
        Some((
            FieldElement { tower: t.parent.clone(), coords: self.coords[..h].to_vec() },
            FieldElement { tower: t.parent.clone(), coords: self.coords[h..].to_vec() },
        ))
    }

    fn generator_names(&self) -> Vec<String> {
        match &self.tower {
            None => Vec::new(),
            Some(t) => t.radicands().iter().map(|r| format!("sqrt({r})")).collect(),
        }
    }

    /// Whether this element's tower is a prefix of `tower`.
    pub fn lives_in(&self, tower: &TowerRef) -> bool {
        match (&self.tower, tower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(t)) => ancestor(t, x.depth).is_some_and(|a| same_tower(a, x)),
        }
    }

    /// Number of nonzero product-basis coordinates.
    pub fn term_count(&self) -> usize {
        self.coords.iter().filter(|c| !c.is_zero()).count()
    }
}

fn align<'a>(a: &'a FieldElement, b: &'a FieldElement) -> (TowerRef, Cow<'a, [Rational]>, Cow<'a, [Rational]>) {
    if a.coords.len() == b.coords.len() {
        let fast = match (&a.tower, &b.tower) {
            (None, None) => true,
            (Some(x), Some(y)) => Arc::ptr_eq(x, y),
            _ => false,
        };
        if fast {
            return (a.tower.clone(), Cow::Borrowed(&a.coords), Cow::Borrowed(&b.coords));
        }
    }
    match unify(&a.tower, &b.tower) {
        Unified::Left => {
            let t = a.tower.clone();
            (t.clone(), Cow::Borrowed(&a.coords), Cow::Owned(b.promote_to(&t).coords))
        }
        Unified::Right => {
            let t = b.tower.clone();
            (t.clone(), Cow::Owned(a.promote_to(&t).coords), Cow::Borrowed(&b.coords))
        }
        Unified::Merged(t, images) => {
            let t = Some(t);
            let a2 = a.promote_to(&t);
            let b2 = b.embed(&t, &images);
            (t, Cow::Owned(a2.coords), Cow::Owned(b2.coords))
        }
    }
}

fn add_s(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_s(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn zero_s(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

fn mul_s(t: Option<&FieldTower>, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let Some(t) = t else {
        return vec![&a[0] * &b[0]];
    };
    let h = a.len() / 2;
    let p = t.parent.as_deref();
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let (za, zb) = (zero_s(a1), zero_s(b1));
    let (lo, hi) = if za && zb {
        (mul_s(p, a0, b0), vec![Rational::zero(); h])
    } else if za {
        (mul_s(p, a0, b0), mul_s(p, a0, b1))
    } else if zb {
        (mul_s(p, a0, b0), mul_s(p, a1, b0))
    } else {
        let d = &t.radicand.coords;
        let p00 = mul_s(p, a0, b0);
        let p11 = mul_s(p, a1, b1);
        let cross = mul_s(p, &add_s(a0, a1), &add_s(b0, b1));
        let hi = sub_s(&sub_s(&cross, &p00), &p11);
        (add_s(&p00, &mul_s(p, d, &p11)), hi)
    };
    let mut out = lo;
    out.extend(hi);
    out
}

fn scale_s(a: &[Rational], c: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * c).collect()
}

fn inv_s(t: Option<&FieldTower>, a: &[Rational]) -> Vec<Rational> {
    let Some(t) = t else {
        return vec![a[0].recip()];
    };
    let h = a.len() / 2;
    let p = t.parent.as_deref();
    let (a0, a1) = a.split_at(h);
    if zero_s(a1) {
        let mut out = inv_s(p, a0);
        out.resize(a.len(), Rational::zero());
        return out;
    }
    let d = &t.radicand.coords;
    let norm = sub_s(&mul_s(p, a0, a0), &mul_s(p, d, &mul_s(p, a1, a1)));
    let ninv = inv_s(p, &norm);
    let mut out = mul_s(p, a0, &ninv);
    out.extend(mul_s(p, a1, &ninv).iter().map(|x| -x));
    out
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

fn sqrt_s(t: Option<&FieldTower>, a: &[Rational]) -> Option<Vec<Rational>> {
    let Some(t) = t else {
        return rational_sqrt(&a[0]).map(|s| vec![s]);
    };
    let h = a.len() / 2;
    let p = t.parent.as_deref();
    let d = &t.radicand.coords;
    let (lo, hi) = a.split_at(h);
    let zeros = vec![Rational::zero(); h];
    if zero_s(hi) {
        if let Some(s) = sqrt_s(p, lo) {
            let mut out = s;
            out.extend(zeros);
            return Some(out);
        }
        let c = sqrt_s(p, &mul_s(p, lo, &inv_s(p, d)))?;
        let mut out = zeros;
        out.extend(c);
        return Some(out);
    }
    // (x + y g)^2 = lo + hi g  gives  x^2 = (lo +- sqrt(lo^2 - d hi^2)) / 2, y = hi / 2x
    let norm = sub_s(&mul_s(p, lo, lo), &mul_s(p, d, &mul_s(p, hi, hi)));
    let n = sqrt_s(p, &norm)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    for cand in [add_s(lo, &n), sub_s(lo, &n)] {
        let x2 = scale_s(&cand, &half);
        if zero_s(&x2) {
            continue;
        }
        if let Some(x) = sqrt_s(p, &x2) {
            let y = mul_s(p, hi, &inv_s(p, &scale_s(&x, &Rational::from_integer(BigInt::from(2)))));
            let mut out = x;
            out.extend(y);
            return Some(out);
        }
    }
    None
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        let (_, a, b) = align(self, other);
        a == b
    }
}

impl Eq for FieldElement {}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        let (tower, a, b) = align(self, rhs);
        FieldElement { tower, coords: add_s(&a, &b) }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        let (tower, a, b) = align(self, rhs);
        FieldElement { tower, coords: sub_s(&a, &b) }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        if self.coords.len() == 1 && rhs.coords.len() > 1 {
            return FieldElement { tower: rhs.tower.clone(), coords: scale_s(&rhs.coords, &self.coords[0]) };
        }
        if rhs.coords.len() == 1 {
            return FieldElement { tower: self.tower.clone(), coords: scale_s(&self.coords, &rhs.coords[0]) };
        }
        let (tower, a, b) = align(self, rhs);
        let coords = mul_s(tower.as_deref(), &a, &b);
        FieldElement { tower, coords }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { tower: self.tower.clone(), coords: self.coords.iter().map(|x| -x).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_int(n)
    }
}

impl From<Rational> for FieldElement {
    fn from(q: Rational) -> Self {
        FieldElement::from_rational(q)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.generator_names();
        let mut out = String::new();
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let gens: Vec<&str> =
                (0..names.len()).filter(|b| mask >> b & 1 == 1).map(|b| names[b].as_str()).collect();
            let term = if gens.is_empty() {
                c.to_string()
            } else if c.is_one() {
                gens.join("*")
            } else if (-c).is_one() {
                format!("-{}", gens.join("*"))
            } else {
                format!("{}*{}", c, gens.join("*"))
            };
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
