//! The Halphen map and the tangent-line maps it is built from.
//!
//! For a point `m` of `C`, `Φ(m)` is the intersection of the tangent line
//! `T_m C` with the polar plane of `m` with respect to `Q`.

use super::branch::Branch;
use super::curve::{reduce_forms, CompleteIntersection, RationalCurve};
use super::quadric::Quadric;
use super::wedge::{wedge2, wedge3};
use crate::algebra::{FieldElement, HomoPoly, TruncSeries};
use crate::error::{Error, Result};

fn eval_all(ps: &[HomoPoly], m: &[FieldElement]) -> Vec<FieldElement> {
    ps.iter().map(|p| p.evaluate(m)).collect()
}

fn on_curve(ci: &CompleteIntersection, m: &[FieldElement]) -> Result<()> {
    if m.len() != 4 || m.iter().all(FieldElement::is_zero) {
        return Err(Error::Invalid("a point needs four coordinates, not all zero".into()));
    }
    if !ci.contains(m) {
        return Err(Error::NotOnCurve);
    }
    Ok(())
}

/// `ϑ(m) = ∧²(∇F(m), ∇G(m))`.
pub fn plucker_theta(ci: &CompleteIntersection, m: &[FieldElement]) -> Result<Vec<FieldElement>> {
    on_curve(ci, m)?;
    let th = wedge2(&eval_all(&ci.grad_f(), m), &eval_all(&ci.grad_g(), m));
    if th.iter().all(FieldElement::is_zero) {
        return Err(Error::SingularPoint);
    }
    Ok(th)
}

/// `t∞(m) = (FyGz - FzGy, FzGx - FxGz, FxGy - FyGx, 0)`.
pub fn tangent_direction(ci: &CompleteIntersection, m: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let th = plucker_theta(ci, m)?;
    if m[3].is_zero() {
        return Err(Error::AtInfinity);
    }
    Ok(vec![th[3].clone(), -&th[1], th[0].clone(), FieldElement::zero()])
}

/// `λ(m) = ∧²(m, t∞(m))`.
pub fn plucker_lambda(ci: &CompleteIntersection, m: &[FieldElement]) -> Result<Vec<FieldElement>> {
    Ok(wedge2(m, &tangent_direction(ci, m)?))
}

/// The right-hand side of the identity expressing `λ` through `ϑ`:
/// `-t (ϑ6, -ϑ5, ϑ4, ϑ3, -ϑ2, ϑ1)`.
pub fn lambda_from_theta(theta: &[FieldElement], t: &FieldElement) -> Vec<FieldElement> {
    let mt = -t;
    [(5, 1), (4, -1), (3, 1), (2, 1), (1, -1), (0, 1)]
        .iter()
        .map(|&(i, s)| {
            let x = &mt * &theta[i];
            if s < 0 {
                -x
            } else {
                x
            }
        })
        .collect()
}

/// `Φ(m) = ∧³(∇F(m), ∇G(m), ∇Q(m))`.
pub fn halphen_map(ci: &CompleteIntersection, q: &Quadric, m: &[FieldElement]) -> Result<Vec<FieldElement>> {
    on_curve(ci, m)?;
    let phi = wedge3(&eval_all(&ci.grad_f(), m), &eval_all(&ci.grad_g(), m), &q.gradient(m));
    if phi.iter().all(FieldElement::is_zero) {
        return Err(Error::BasePoint);
    }
    Ok(phi)
}

/// `P_B = B(∧²(∇F, ∇G))`.
pub fn polar_surface(ci: &CompleteIntersection, b: &[FieldElement]) -> Result<HomoPoly> {
    if b.len() != 6 || b.iter().all(FieldElement::is_zero) {
        return Err(Error::Invalid("covector must have six entries, not all zero".into()));
    }
    let th = ci.theta_polys();
    let mut acc = HomoPoly::zero(ci.f.vars());
    for (bi, p) in b.iter().zip(&th) {
        if !bi.is_zero() {
            acc = &acc + &p.scale(bi);
        }
    }
    Ok(acc)
}

/// The parametrized transform of a rational curve, before and after gcd removal.
#[derive(Clone, Debug)]
pub struct HalphenImage {
    /// `ψ = b_Q(γ, γ_u) γ_v - b_Q(γ, γ_v) γ_u`, degree `3d - 2`.
    pub raw: Vec<HomoPoly>,
    pub gcd: HomoPoly,
    pub reduced: RationalCurve,
}

pub fn halphen_rational(rc: &RationalCurve, q: &Quadric) -> Result<HalphenImage> {
    let g = rc.components();
    let (gu, gv) = (rc.derivative_u(), rc.derivative_v());
    let bu = q.bilinear(g, &gu);
    let bv = q.bilinear(g, &gv);
    let raw: Vec<HomoPoly> = (0..4).map(|i| &(&bu * &gv[i]) - &(&bv * &gu[i])).collect();
    if raw.iter().all(HomoPoly::is_zero) {
        return Err(Error::IdenticallyZero);
    }
    let (reduced, gcd) = reduce_forms(&raw)?;
    Ok(HalphenImage { raw, gcd, reduced: RationalCurve::new(reduced)? })
}

/// `Ψ(α) = b_Q(α, α') α - Q(α) α'` on series.
pub fn psi_series(alpha: &[TruncSeries], q: &Quadric) -> Vec<TruncSeries> {
    let d: Vec<TruncSeries> = alpha.iter().map(TruncSeries::derivative).collect();
    let b = q.bilinear(alpha, &d);
    let qa = q.eval(alpha);
    (0..4).map(|i| &(&b * &alpha[i]) - &(&qa * &d[i])).collect()
}

/// Image of a branch under the Halphen map, via its parametrization.
///
/// Exact branches give exact images; truncated ones lose one order to the derivative.
pub fn halphen_branch(b: &Branch, q: &Quadric) -> Result<Branch> {
    let out = if b.is_exact() {
        let n = 3 * b.poly_len();
        let psi = psi_series(b.with_precision(n)?.coords(), q);
        Branch::from_polys(psi.iter().map(|s| s.coeffs().to_vec()).collect())
    } else {
        Branch::from_series(psi_series(b.coords(), q))
    };
    match out {
        Err(Error::NotACurveBranch(_)) => Err(Error::IdenticallyZero),
        Err(Error::InsufficientPrecision(_)) if b.is_exact() => Err(Error::IdenticallyZero),
        other => other,
    }
}

/// Image of a branch of `V(F, G)` computed as `∧³(∇F∘α, ∇G∘α, ∇Q∘α)`.
pub fn halphen_branch_ci(ci: &CompleteIntersection, b: &Branch, q: &Quadric) -> Result<Branch> {
    let alpha = b.coords();
    let gf: Vec<TruncSeries> = ci.grad_f().iter().map(|p| p.compose_series(alpha)).collect();
    let gg: Vec<TruncSeries> = ci.grad_g().iter().map(|p| p.compose_series(alpha)).collect();
    Branch::from_series(wedge3(&gf, &gg, &q.gradient(alpha)))
}
