//! Checks of the worked examples against the values and expansions printed
//! for them in the literature, including where the printed data needed a fix.

use halphen::algebra::{FieldElement, HomoPoly, PolyParser, Vars};
use halphen::corpus;
use halphen::geometry::halphen::polar_surface;
use halphen::invariants::intersection_multiplicity;

fn fe(n: i64) -> FieldElement {
    FieldElement::from_int(n)
}

#[test]
fn e6_series_extends_the_printed_prefix() {
    let e = corpus::entry("e6_sextic").unwrap();
    let b = &e.branches().unwrap()[0];
    let mut ctx = PolyParser::new();
    let mut s = |t: &str| ctx.parse_scalar(t).unwrap();
    let a = s("sqrt(2)/sqrt(sqrt(3))");
    let printed_x = [
        (3, a.clone()),
        (5, &a * &s("-1/(2*sqrt(3))")),
        (7, &a * &s("-1/48")),
    ];
    // The printed y = +t^4 contradicts the equations for a real x-coefficient.
    let printed_y = [(4, fe(-1))];
    let printed_z = [(6, s("1/sqrt(3)")), (8, s("1/6"))];
    for (coord, printed) in [(0, &printed_x[..]), (1, &printed_y[..]), (2, &printed_z[..])] {
        let series = &b.coords()[coord];
        for k in 0..9 {
            let want = printed.iter().find(|p| p.0 == k).map(|p| p.1.clone()).unwrap_or_else(FieldElement::zero);
            assert_eq!(series.coeff(k).unwrap(), &want, "coordinate {coord}, order {k}");
        }
    }
}

#[test]
fn e6_series_solves_the_equations() {
    let e = corpus::entry("e6_sextic").unwrap();
    let ci = e.curve().unwrap();
    let ci = ci.complete_intersection().unwrap();
    let b = &e.branches().unwrap()[0];
    assert_eq!(b.precision(), 24);
    for p in [&ci.f, &ci.g] {
        assert!(p.compose_series(b.coords()).is_zero_to_precision());
    }
}

#[test]
fn e6_polar_surface_is_twice_the_printed_one() {
    let e = corpus::entry("e6_sextic").unwrap();
    let ci = e.curve().unwrap();
    let ci = ci.complete_intersection().unwrap();
    let xyzt = Vars::xyzt();
    let printed = [
        "2*x*y*z - 3*x*y^2",
        "2*x*z^2 - 4*x*z*t - x^3",
        "-3*x*z^2",
        "3*y^2*z - 3*y^2*t - y*x^2 - 2*y*z*t",
        "-(3*y^2*z + y*z^2)",
        "-(z^3 + z^2*t + x^2*z)",
    ];
    for (theta, p) in ci.theta_polys().iter().zip(printed) {
        let p = halphen::algebra::parse_poly(p, &xyzt).unwrap();
        assert_eq!(theta, &p.scale(&fe(2)));
    }
}

#[test]
fn e6_polar_intersection_at_the_singular_point() {
    let e = corpus::entry("e6_sextic").unwrap();
    let ci = e.curve().unwrap();
    let ci = ci.complete_intersection().unwrap();
    let branches = e.branches().unwrap();
    for b in [[1, 2, 3, 4, 5, 6], [-3, 1, 4, -1, 5, 9], [2, -7, 1, 8, -2, 8]] {
        let p = polar_surface(ci, &b.map(fe)).unwrap();
        assert_eq!(intersection_multiplicity(&branches, &p).unwrap(), 8);
    }
}

#[test]
fn viviani_polar_surface_is_transverse_at_the_node() {
    let e = corpus::entry("viviani").unwrap();
    let ci = e.curve().unwrap();
    let ci = ci.complete_intersection().unwrap();
    let branches = e.branches().unwrap();
    let p = polar_surface(ci, &[1, 2, 3, 4, 5, 6].map(fe)).unwrap();
    // Linear part at [1:0:0:1] in the affine chart x = 1: 2(b1 + b5) y - 2(b2 + b6) z.
    let xyzt = Vars::xyzt();
    let lin: HomoPoly = halphen::algebra::parse_poly("12*y - 16*z", &xyzt).unwrap();
    let dy = p.derivative(1).evaluate(&[fe(1), fe(0), fe(0), fe(1)]);
    let dz = p.derivative(2).evaluate(&[fe(1), fe(0), fe(0), fe(1)]);
    assert_eq!((dy, dz), (lin.coeff(&[0, 1, 0, 0]), lin.coeff(&[0, 0, 1, 0])));
    assert_eq!(intersection_multiplicity(&branches, &p).unwrap(), 2);
}
