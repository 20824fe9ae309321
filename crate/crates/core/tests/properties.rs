mod common;

use common::{branch_of_type, fe, point};
use halphen::algebra::{FieldElement, HomoPoly, PolyParser, TruncSeries, Vars};
use halphen::desing::{predict_transformed_type, PredictorRules};
use halphen::geometry::branch::{normalize_at_working_precision, Branch, BranchType};
use halphen::geometry::curve::{CompleteIntersection, RationalCurve};
use halphen::geometry::halphen::{
    halphen_map, halphen_rational, lambda_from_theta, plucker_lambda, plucker_theta, tangent_direction,
};
use halphen::geometry::quadric::{apply_linear, invert4, Quadric};
use halphen::geometry::wedge::{dot, plucker_relation, wedge2, wedge3};
use halphen::invariants::{theorem_invariants, GenusSource};
use halphen::Error;
use proptest::prelude::*;

fn small() -> impl Strategy<Value = i64> {
    -6i64..=6
}

fn rational() -> impl Strategy<Value = FieldElement> {
    (-20i64..=20, 1i64..=7).prop_map(|(p, q)| FieldElement::from_ratio(p, q))
}

/// `c0 + c1 √2 + c2 √3 + c3 √6` truncated to the requested depth.
fn tower_element(depth: usize, c: [FieldElement; 4]) -> FieldElement {
    let mut ctx = PolyParser::new();
    let s2 = ctx.sqrt(&fe(2));
    let s3 = ctx.sqrt(&fe(3));
    let basis = [FieldElement::one(), s2.clone(), s3.clone(), &s2 * &s3];
    let used = [1, 2, 2, 4][depth];
    let mut acc = FieldElement::zero();
    for (b, x) in basis.iter().zip(c.iter()).take(used) {
        acc = &acc + &(b * x);
    }
    acc
}

fn coeffs4() -> impl Strategy<Value = [FieldElement; 4]> {
    [rational(), rational(), rational(), rational()]
}

fn xyzt() -> Vars {
    Vars::xyzt()
}

/// A homogeneous polynomial of degree `deg` in x, y, z, t with a few terms.
fn homo_poly(deg: u32) -> impl Strategy<Value = HomoPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=deg, 3), small(), any::<bool>()), 1..6).prop_map(move |terms| {
        let vars = xyzt();
        let mut ctx = PolyParser::new();
        let s2 = ctx.sqrt(&fe(2));
        let mut p = HomoPoly::zero(&vars);
        for (mut e, c, irrational) in terms {
            // Clamp the first three exponents, put the rest on t.
            let mut left = deg;
            for x in e.iter_mut() {
                *x = (*x).min(left);
                left -= *x;
            }
            e.push(left);
            let c = if irrational { &fe(c) * &s2 } else { fe(c) };
            p = &p + &HomoPoly::monomial(&vars, e, c);
        }
        p
    })
}

fn int_vector(n: usize) -> impl Strategy<Value = Vec<FieldElement>> {
    prop::collection::vec(-9i64..=9, n).prop_map(|v| point(&v))
}

fn invertible_matrix() -> impl Strategy<Value = Vec<Vec<FieldElement>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 4)
        .prop_map(|rows| rows.iter().map(|r| point(r)).collect::<Vec<_>>())
        .prop_filter("singular", |l: &Vec<Vec<FieldElement>>| invert4(l).is_ok())
}

fn symmetric_quadric() -> impl Strategy<Value = Quadric> {
    prop::collection::vec(-9i64..=9, 10).prop_map(|v| {
        let mut m = [[0i64; 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                m[i][j] = v[k];
                m[j][i] = v[k];
                k += 1;
            }
        }
        Quadric::from_ints(m).unwrap()
    })
}

fn twisted_cubic_ci() -> CompleteIntersection {
    CompleteIntersection::parse("y^2-x*z", "y*z-x*t").unwrap()
}

fn twisted_cubic_point(s: &FieldElement) -> Vec<FieldElement> {
    vec![s.pow(3), s.pow(2), s.clone(), FieldElement::one()]
}

fn proportional(a: &[FieldElement], b: &[FieldElement]) -> bool {
    let pad = |x: &[FieldElement]| {
        let mut v = x.to_vec();
        v.resize(4, FieldElement::zero());
        v
    };
    wedge2(&pad(a), &pad(b)).iter().all(FieldElement::is_zero)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_division_undoes_multiplication(depth in 0usize..=2, a in coeffs4(), b in coeffs4()) {
        let a = tower_element(depth, a);
        let b = tower_element(depth, b);
        prop_assume!(!a.is_zero());
        prop_assert_eq!(&(&a * &b) * &a.inv().unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_print_round_trip(p in homo_poly(3)) {
        let mut ctx = PolyParser::new();
        ctx.sqrt(&fe(2));
        let q = ctx.parse_poly(&p.to_string(), &xyzt()).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn operations_keep_homogeneity(p in homo_poly(2), q in homo_poly(3), l in invertible_matrix()) {
        prop_assume!(!q.is_zero());
        let (dp, dq) = (p.degree(), q.degree());
        let sum = &p + &p.scale(&fe(3));
        prop_assert!(sum.is_zero() || sum.degree() == dp);
        if let (Some(a), Some(b)) = (dp, dq) {
            prop_assert_eq!((&p * &q).degree(), Some(a + b));
        }
        for g in q.gradient().unwrap() {
            prop_assert!(g.is_zero() || g.degree() == dq.map(|d| d - 1));
        }
        let sub = q.linear_substitute(&l);
        prop_assert_eq!(sub.degree(), dq);
        // Substituting back with the inverse recovers the polynomial.
        prop_assert_eq!(sub.linear_substitute(&invert4(&l).unwrap()), q);
    }

    #[test]
    fn euler_identity(p in homo_poly(4)) {
        prop_assume!(!p.is_zero());
        let vars = xyzt();
        let mut acc = HomoPoly::zero(&vars);
        for (i, g) in p.gradient().unwrap().iter().enumerate() {
            acc = &acc + &(&HomoPoly::var(&vars, i) * g);
        }
        prop_assert_eq!(acc, p.scale(&fe(p.degree().unwrap() as i64)));
    }

    #[test]
    fn series_valuations_add(
        va in 0usize..6, vb in 0usize..6,
        a in prop::collection::vec(small(), 12), b in prop::collection::vec(small(), 12),
        lead_a in 1i64..5, lead_b in -5i64..0,
    ) {
        let prec = 12;
        let build = |v: usize, lead: i64, tail: &[i64]| {
            let c: Vec<FieldElement> = (0..prec)
                .map(|k| if k < v { FieldElement::zero() } else if k == v { fe(lead) } else { fe(tail[k]) })
                .collect();
            TruncSeries::from_coeffs(c, prec)
        };
        let (sa, sb) = (build(va, lead_a, &a), build(vb, lead_b, &b));
        prop_assert_eq!(sa.valuation().unwrap(), va);
        prop_assert_eq!((&sa * &sb).valuation().unwrap(), va + vb);
    }

    #[test]
    fn wedge3_is_orthogonal_to_its_factors(a in int_vector(4), b in int_vector(4), c in int_vector(4)) {
        let w = wedge3(&a, &b, &c);
        for x in [&a, &b, &c] {
            prop_assert!(dot(&w, x).is_zero());
        }
    }

    #[test]
    fn plucker_coordinates_satisfy_the_relation(p in -40i64..=40, q in 1i64..=9) {
        // s = 0 is where the residual line x = y = 0 meets the cubic.
        prop_assume!(p != 0);
        let ci = twisted_cubic_ci();
        let m = twisted_cubic_point(&FieldElement::from_ratio(p, q));
        let th = plucker_theta(&ci, &m).unwrap();
        let la = plucker_lambda(&ci, &m).unwrap();
        prop_assert!(plucker_relation(&th).is_zero());
        prop_assert!(plucker_relation(&la).is_zero());
        prop_assert_eq!(la, lambda_from_theta(&th, &m[3]));
    }

    #[test]
    fn halphen_point_is_on_the_tangent_and_polar(p in -40i64..=40, q in 1i64..=9, quad in symmetric_quadric()) {
        let ci = twisted_cubic_ci();
        let m = twisted_cubic_point(&FieldElement::from_ratio(p, q));
        match halphen_map(&ci, &quad, &m) {
            Ok(phi) => {
                let t = tangent_direction(&ci, &m).unwrap();
                prop_assert!(wedge3(&m, &t, &phi).iter().all(FieldElement::is_zero));
                prop_assert!(quad.bilinear(&m, &phi).is_zero());
            }
            Err(e) => prop_assert_eq!(e, Error::BasePoint),
        }
    }

    #[test]
    fn polarization_identity(quad in symmetric_quadric(), x in int_vector(4), y in int_vector(4)) {
        let sum: Vec<FieldElement> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = quad.eval(&sum);
        let b = quad.bilinear(&x, &y);
        let rhs = &(&(&quad.eval(&x) + &quad.eval(&y)) + &b) + &b;
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(quad.bilinear(&x, &y), quad.bilinear(&y, &x));
    }

    #[test]
    fn rational_transform_is_linearly_equivariant(
        gamma in prop::collection::vec(prop::collection::vec(-5i64..=5, 5), 4),
        quad in symmetric_quadric(),
        l in invertible_matrix(),
    ) {
        // Four random binary quartics; skip degenerate draws.
        let uv = Vars::uv();
        let forms: Vec<HomoPoly> = gamma
            .iter()
            .map(|c| {
                let mut p = HomoPoly::zero(&uv);
                for (k, x) in c.iter().enumerate() {
                    p = &p + &HomoPoly::monomial(&uv, vec![4 - k as u32, k as u32], fe(*x));
                }
                p
            })
            .collect();
        prop_assume!(forms.iter().all(|p| !p.is_zero()));
        let Ok(rc) = RationalCurve::new(forms) else { return Ok(()) };
        let Ok(im) = halphen_rational(&rc, &quad) else { return Ok(()) };
        let moved = halphen_rational(&rc.transformed(&l).unwrap(), &quad.transformed(&l).unwrap()).unwrap();
        prop_assert_eq!(&moved.raw, &apply_linear(&l, &im.raw));
        // Pointwise at a few parameters.
        for t in [-2i64, 1, 3] {
            let (u, v) = (fe(t), FieldElement::one());
            let p0: Vec<FieldElement> = im.raw.iter().map(|f| f.evaluate(&[u.clone(), v.clone()])).collect();
            let p1: Vec<FieldElement> = moved.raw.iter().map(|f| f.evaluate(&[u.clone(), v.clone()])).collect();
            prop_assert!(proportional(&p1, &apply_linear(&l, &p0)));
        }
    }

    #[test]
    fn complete_intersection_transform_is_equivariant(
        p in -20i64..=20, q in 1i64..=5, quad in symmetric_quadric(), l in invertible_matrix(),
    ) {
        let ci = twisted_cubic_ci();
        let m = twisted_cubic_point(&FieldElement::from_ratio(p, q));
        let Ok(phi) = halphen_map(&ci, &quad, &m) else { return Ok(()) };
        let ci2 = ci.transformed(&l).unwrap();
        let phi2 = halphen_map(&ci2, &quad.transformed(&l).unwrap(), &apply_linear(&l, &m)).unwrap();
        prop_assert!(proportional(&phi2, &apply_linear(&l, &phi)));
    }
}

fn branch_type() -> impl Strategy<Value = BranchType> {
    (1u32..=4, 1u32..=4, 1u32..=5).prop_map(|(e, dr, ds)| BranchType::new(e, e + dr, e + dr + ds).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn type_is_invariant_under_reparametrization(
        ty in branch_type(),
        tails in prop::collection::vec(prop::collection::vec(small(), 40), 3),
        c in prop_oneof![-5i64..=-1, 1i64..=5],
        l in invertible_matrix(),
    ) {
        let prec = ty.working_precision();
        let b = branch_of_type(ty, [&tails[0], &tails[1], &tails[2]], prec);
        prop_assert_eq!(normalize_at_working_precision(&b).unwrap().ty, ty);
        // u -> u (1 + c u)
        let g = TruncSeries::from_coeffs(vec![FieldElement::zero(), FieldElement::one(), fe(c)], prec);
        let coords: Vec<TruncSeries> = b.coords().iter().map(|s| s.compose(&g).unwrap()).collect();
        let re = Branch::from_series(coords).unwrap();
        prop_assert_eq!(normalize_at_working_precision(&re).unwrap().ty, ty);
        let moved = b.transformed(&l).unwrap();
        prop_assert_eq!(normalize_at_working_precision(&moved).unwrap().ty, ty);
    }

    #[test]
    fn predictions_are_strictly_increasing_or_degenerate(
        ty in branch_type(),
        tails in prop::collection::vec(prop::collection::vec(small(), 40), 3),
    ) {
        let b = branch_of_type(ty, [&tails[0], &tails[1], &tails[2]], ty.working_precision());
        let nm = normalize_at_working_precision(&b).unwrap();
        for rules in [PredictorRules::Stated, PredictorRules::Amended] {
            match predict_transformed_type(&nm, rules) {
                Ok((t, _)) => prop_assert!(0 < t.e && t.e < t.r && t.r < t.s),
                Err(e) => prop_assert!(matches!(e, Error::DegenerateType(_)), "{e}"),
            }
        }
    }

    #[test]
    fn transform_invariants_satisfy_piene(
        deg in 2u32..12, rank in 2u32..30, genus in 0u32..4, k0 in 0u32..5, k1 in 0u32..5,
    ) {
        prop_assume!(2 * (deg + rank + genus) >= 2 + k0);
        let inv = theorem_invariants(deg, rank, genus, GenusSource::Given, k0, Some(k1));
        prop_assert!(inv.piene_consistent());
        prop_assert_eq!(inv.degree, deg + rank);
    }
}
