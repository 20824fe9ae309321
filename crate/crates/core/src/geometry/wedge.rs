//! Exterior products of 4-vectors over any coefficient ring used here.

use crate::algebra::{FieldElement, HomoPoly, TruncSeries};

/// The arithmetic needed by wedge products and bilinear forms.
pub trait Ring: Clone {
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_scale(&self, c: &FieldElement) -> Self;
    fn r_is_zero(&self) -> bool;
}

impl Ring for FieldElement {
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_scale(&self, c: &FieldElement) -> Self {
        self * c
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for HomoPoly {
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_scale(&self, c: &FieldElement) -> Self {
        self.scale(c)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for TruncSeries {
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_scale(&self, c: &FieldElement) -> Self {
        self.scale(c)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero_to_precision()
    }
}

fn minor<T: Ring>(u: &[T], v: &[T], i: usize, j: usize) -> T {
    u[i].r_mul(&v[j]).r_sub(&u[j].r_mul(&v[i]))
}

/// Plücker coordinates of `u ∧ v` in the order
/// (12, 13, 14, 23, 24, 34), entry `ij` being `u_i v_j - u_j v_i`.
pub fn wedge2<T: Ring>(u: &[T], v: &[T]) -> Vec<T> {
    assert!(u.len() == 4 && v.len() == 4);
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().map(|&(i, j)| minor(u, v, i, j)).collect()
}

fn det3<T: Ring>(a: [&T; 3], b: [&T; 3], c: [&T; 3]) -> T {
    let m0 = b[1].r_mul(c[2]).r_sub(&b[2].r_mul(c[1]));
    let m1 = b[0].r_mul(c[2]).r_sub(&b[2].r_mul(c[0]));
    let m2 = b[0].r_mul(c[1]).r_sub(&b[1].r_mul(c[0]));
    a[0].r_mul(&m0).r_sub(&a[1].r_mul(&m1)).r_add(&a[2].r_mul(&m2))
}

/// `a ∧ b ∧ c` as a point: `(-D1, D2, -D3, D4)` where `Di` is the minor of
/// the 4x3 matrix `(a b c)` with row `i` removed.
pub fn wedge3<T: Ring>(a: &[T], b: &[T], c: &[T]) -> Vec<T> {
    assert!(a.len() == 4 && b.len() == 4 && c.len() == 4);
    (0..4)
        .map(|skip| {
            let idx: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            let d = det3(
                [&a[idx[0]], &b[idx[0]], &c[idx[0]]],
                [&a[idx[1]], &b[idx[1]], &c[idx[1]]],
                [&a[idx[2]], &b[idx[2]], &c[idx[2]]],
            );
            if skip % 2 == 0 {
                d.r_scale(&FieldElement::from_int(-1))
            } else {
                d
            }
        })
        .collect()
}

/// Euclidean pairing `sum x_i y_i`.
pub fn dot<T: Ring>(x: &[T], y: &[T]) -> T {
    let mut acc = x[0].r_mul(&y[0]);
    for (a, b) in x.iter().zip(y).skip(1) {
        acc = acc.r_add(&a.r_mul(b));
    }
    acc
}

/// The Plücker quadric `x1 x6 - x2 x5 + x3 x4`.
pub fn plucker_relation<T: Ring>(x: &[T]) -> T {
    x[0].r_mul(&x[5]).r_sub(&x[1].r_mul(&x[4])).r_add(&x[2].r_mul(&x[3]))
}
