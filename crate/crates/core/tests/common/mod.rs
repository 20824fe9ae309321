#![allow(dead_code)]

use halphen::algebra::{FieldElement, TruncSeries};
use halphen::geometry::branch::{Branch, BranchType};
use halphen::verify::{random_ints, rng_for, Stream};

pub fn fe(n: i64) -> FieldElement {
    FieldElement::from_int(n)
}

pub fn point(xs: &[i64]) -> Vec<FieldElement> {
    xs.iter().map(|&x| fe(x)).collect()
}

pub fn matrix(rows: &[[i64; 4]; 4]) -> Vec<Vec<FieldElement>> {
    rows.iter().map(|r| point(r)).collect()
}

/// `u^k (1 + c1 u + c2 u^2 + ...)` to precision `prec`.
pub fn unit_times_power(k: usize, tail: &[i64], prec: usize) -> TruncSeries {
    let mut c = vec![FieldElement::zero(); prec];
    if k < prec {
        c[k] = FieldElement::one();
    }
    for (i, t) in tail.iter().enumerate() {
        if k + 1 + i < prec {
            c[k + 1 + i] = fe(*t);
        }
    }
    TruncSeries::from_coeffs(c, prec)
}

/// A branch at `[0:0:0:1]` whose coordinates have orders `e < r < s`, so its
/// type is `(e, r, s)`. `tails` supplies the higher coefficients.
pub fn branch_of_type(ty: BranchType, tails: [&[i64]; 3], prec: usize) -> Branch {
    let [e, r, s] = ty.as_array();
    let coords = vec![
        unit_times_power(e as usize, tails[0], prec),
        unit_times_power(r as usize, tails[1], prec),
        unit_times_power(s as usize, tails[2], prec),
        TruncSeries::one(prec),
    ];
    Branch::from_series(coords).unwrap()
}

/// A branch of the given type with coefficients drawn from the series stream.
pub fn random_branch(ty: BranchType, seed: u64, index: u64, bound: i64) -> Branch {
    let prec = ty.working_precision() + 8;
    let mut rng = rng_for(seed, Stream::Series, index);
    let tails: Vec<Vec<i64>> = (0..3).map(|_| random_ints(&mut rng, prec, bound)).collect();
    branch_of_type(ty, [&tails[0], &tails[1], &tails[2]], prec)
}

/// A random branch of type `(e, 2e, s)` with `α2 - α1^2` of order at least `v`.
pub fn branch_r2e(e: u32, s: u32, v: usize, seed: u64, index: u64, bound: i64) -> Branch {
    let ty = BranchType::new(e, 2 * e, s).unwrap();
    let prec = ty.working_precision() + 8;
    let mut rng = rng_for(seed, Stream::Series, index);
    let a1 = unit_times_power(e as usize, &random_ints(&mut rng, prec, bound), prec);
    let extra = TruncSeries::from_coeffs(
        (0..prec).map(|k| if k >= v { fe(random_ints(&mut rng, 1, bound)[0]) } else { FieldElement::zero() }).collect(),
        prec,
    );
    let a2 = &(&a1 * &a1) + &extra;
    let a3 = unit_times_power(s as usize, &random_ints(&mut rng, prec, bound), prec);
    Branch::from_series(vec![a1, a2, a3, TruncSeries::one(prec)]).unwrap()
}

/// A random branch of type `(e, r, 2e)` with `α3 - α1^2` of order at least `v`.
pub fn branch_s2e(e: u32, r: u32, v: usize, seed: u64, index: u64, bound: i64) -> Branch {
    let ty = BranchType::new(e, r, 2 * e).unwrap();
    let prec = ty.working_precision() + 8;
    let mut rng = rng_for(seed, Stream::Series, index);
    let a1 = unit_times_power(e as usize, &random_ints(&mut rng, prec, bound), prec);
    let a2 = unit_times_power(r as usize, &random_ints(&mut rng, prec, bound), prec);
    let extra = TruncSeries::from_coeffs(
        (0..prec).map(|k| if k >= v { fe(random_ints(&mut rng, 1, bound)[0]) } else { FieldElement::zero() }).collect(),
        prec,
    );
    let a3 = &(&a1 * &a1) + &extra;
    Branch::from_series(vec![a1, a2, a3, TruncSeries::one(prec)]).unwrap()
}
