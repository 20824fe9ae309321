//! Reduction of tower elements modulo a large prime.
//!
//! Used only to certify upper bounds on gcd degrees: if `p` is odd, every
//! radicand is a nonzero square mod `p`, and the inputs are `p`-integral with
//! a unit leading coefficient, then `deg gcd(f mod p) >= deg gcd(f)`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::field::{FieldElement, TowerRef};

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1;
    a %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        k >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    (a % p != 0).then(|| pow_mod(a, p - 2, p))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Tonelli-Shanks; `None` for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, (q + 1) / 2, p));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

fn big_mod(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r < BigInt::zero() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("residue fits")
}

/// A ring homomorphism from a tower (localized at `p`) onto `F_p`.
#[derive(Clone, Debug)]
pub struct Reduction {
    p: u64,
    tower: TowerRef,
    /// Images of the generators, bottom level first.
    gens: Vec<u64>,
}

impl Reduction {
    /// A reduction for `tower` with `p` near `2^61`, skipping `skip` suitable primes.
    pub fn new(tower: &TowerRef, skip: usize) -> Option<Self> {
        let mut p = (1u64 << 61) - 1;
        let mut found = 0;
        for _ in 0..200 {
            while !is_prime(p) {
                p -= 2;
            }
            if let Some(r) = Self::with_prime(tower, p) {
                if found == skip {
                    return Some(r);
                }
                found += 1;
            }
            p -= 2;
        }
        None
    }

    fn with_prime(tower: &TowerRef, p: u64) -> Option<Self> {
        let mut red = Reduction { p, tower: None, gens: Vec::new() };
        if let Some(t) = tower {
            for (level, d) in t.radicands().iter().enumerate() {
                let dr = red.reduce_coords(d.coords(), level)?;
                if dr == 0 {
                    return None;
                }
                red.gens.push(sqrt_mod(dr, p)?);
            }
        }
        red.tower = tower.clone();
        Some(red)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn reduce_coords(&self, coords: &[num_rational::BigRational], depth: usize) -> Option<u64> {
        let mut acc = 0;
        for (mask, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut v = mul_mod(big_mod(c.numer(), self.p), inv_mod(big_mod(c.denom(), self.p), self.p)?, self.p);
            for bit in 0..depth {
                if mask >> bit & 1 == 1 {
                    v = mul_mod(v, self.gens[bit], self.p);
                }
            }
            acc = (acc + v) % self.p;
        }
        Some(acc)
    }

    /// `None` when `x` has a denominator divisible by `p` or lives outside the tower.
    pub fn reduce(&self, x: &FieldElement) -> Option<u64> {
        if !x.lives_in(&self.tower) {
            return None;
        }
        self.reduce_coords(x.coords(), x.depth())
    }

    /// Coefficients lowest degree first; `None` if any coefficient fails to reduce.
    pub fn reduce_poly(&self, c: &[FieldElement]) -> Option<Vec<u64>> {
        c.iter().map(|x| self.reduce(x)).collect()
    }
}

/// The deepest tower among `xs`, if every element lives in it.
pub fn common_tower<'a, I: IntoIterator<Item = &'a FieldElement>>(xs: I) -> Option<TowerRef> {
    let xs: Vec<&FieldElement> = xs.into_iter().collect();
    let top = xs.iter().max_by_key(|x| x.depth())?.tower().clone();
    xs.iter().all(|x| x.lives_in(&top)).then_some(top)
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let inv = inv_mod(*b.last().unwrap(), p).unwrap();
    let db = b.len() - 1;
    while r.len() > db {
        let c = mul_mod(*r.last().unwrap(), inv, p);
        let k = r.len() - 1 - db;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mul_mod(c, *bj, p)) % p;
        }
        trim(&mut r);
    }
    r
}

/// Degree of the gcd over `F_p`; the gcd of zeros is reported as `None`.
pub fn gcd_degree(polys: &[Vec<u64>], p: u64) -> Option<usize> {
    let mut g: Vec<u64> = Vec::new();
    for f in polys {
        let mut b = f.clone();
        trim(&mut b);
        let mut a = std::mem::take(&mut g);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        g = a;
        if g.len() == 1 {
            return Some(0);
        }
    }
    (!g.is_empty()).then(|| g.len() - 1)
}

pub fn derivative(a: &[u64], p: u64) -> Vec<u64> {
    a.iter().enumerate().skip(1).map(|(k, c)| mul_mod(*c, k as u64 % p, p)).collect()
}
