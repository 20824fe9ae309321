//! Curve models: complete intersections and rational parametrizations.

use serde_json::{json, Value};

use super::quadric::Quadric;
use super::wedge::{wedge2, wedge3};
use crate::algebra::binary::{gcd_all, BinaryForm};
use crate::algebra::{FieldElement, HomoPoly, PolyParser, Vars};
use crate::error::{Error, Result};

/// `C1 = V(F, G)` in P^3, possibly with the degree of the component of interest.
#[derive(Clone, Debug)]
pub struct CompleteIntersection {
    pub f: HomoPoly,
    pub g: HomoPoly,
    /// Degree of the component C of V(F, G) under study, when C is a proper component.
    pub component_degree: Option<u32>,
}

impl CompleteIntersection {
    pub fn new(f: HomoPoly, g: HomoPoly) -> Result<Self> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.vars() != &Vars::xyzt() || g.vars() != &Vars::xyzt() {
            return Err(Error::Invalid("equations must be in x, y, z, t".into()));
        }
        let ci = CompleteIntersection { f, g, component_degree: None };
        if ci.theta_polys().iter().all(HomoPoly::is_zero) {
            return Err(Error::Invalid("F and G are proportional".into()));
        }
        Ok(ci)
    }

    pub fn parse(f: &str, g: &str) -> Result<Self> {
        let mut ctx = PolyParser::new();
        Self::new(ctx.parse_poly(f, &Vars::xyzt())?, ctx.parse_poly(g, &Vars::xyzt())?)
    }

    pub fn with_component_degree(mut self, d: u32) -> Self {
        self.component_degree = Some(d);
        self
    }

    pub fn deg_f(&self) -> u32 {
        self.f.degree().unwrap()
    }

    pub fn deg_g(&self) -> u32 {
        self.g.degree().unwrap()
    }

    /// Degree of the curve C (the component if annotated, else deg F deg G).
    pub fn curve_degree(&self) -> u32 {
        self.component_degree.unwrap_or(self.deg_f() * self.deg_g())
    }

    pub fn grad_f(&self) -> Vec<HomoPoly> {
        self.f.gradient().expect("nonzero")
    }

    pub fn grad_g(&self) -> Vec<HomoPoly> {
        self.g.gradient().expect("nonzero")
    }

    /// `∧²(∇F, ∇G)` as six polynomials.
    pub fn theta_polys(&self) -> Vec<HomoPoly> {
        wedge2(&self.grad_f(), &self.grad_g())
    }

    /// The polynomial Halphen map `∧³(∇F, ∇G, ∇Q)`.
    pub fn halphen_polys(&self, q: &Quadric) -> Vec<HomoPoly> {
        let vars = Vars::xyzt();
        let xs: Vec<HomoPoly> = (0..4).map(|i| HomoPoly::var(&vars, i)).collect();
        wedge3(&self.grad_f(), &self.grad_g(), &q.gradient(&xs))
    }

    pub fn contains(&self, m: &[FieldElement]) -> bool {
        self.f.evaluate(m).is_zero() && self.g.evaluate(m).is_zero()
    }

    /// Apply `x -> L x` to the curve.
    pub fn transformed(&self, l: &[Vec<FieldElement>]) -> Result<Self> {
        let linv = super::quadric::invert4(l)?;
        let mut ci = CompleteIntersection::new(self.f.linear_substitute(&linv), self.g.linear_substitute(&linv))?;
        ci.component_degree = self.component_degree;
        Ok(ci)
    }
}

/// A morphism `γ: P^1 -> P^3` by four binary forms of common degree without common factor.
#[derive(Clone, Debug)]
pub struct RationalCurve {
    gamma: Vec<HomoPoly>,
}

impl RationalCurve {
    /// Build from four forms, dividing out their gcd.
    pub fn new(gamma: Vec<HomoPoly>) -> Result<Self> {
        let (reduced, _) = reduce_forms(&gamma)?;
        Ok(RationalCurve { gamma: reduced })
    }

    pub fn parse(gamma: &[&str]) -> Result<Self> {
        let mut ctx = PolyParser::new();
        let g = gamma.iter().map(|s| ctx.parse_poly(s, &Vars::uv())).collect::<Result<Vec<_>>>()?;
        Self::new(g)
    }

    pub fn components(&self) -> &[HomoPoly] {
        &self.gamma
    }

    pub fn degree(&self) -> u32 {
        self.gamma.iter().find_map(HomoPoly::degree).unwrap()
    }

    pub fn derivative_u(&self) -> Vec<HomoPoly> {
        self.gamma.iter().map(|g| g.derivative(0)).collect()
    }

    pub fn derivative_v(&self) -> Vec<HomoPoly> {
        self.gamma.iter().map(|g| g.derivative(1)).collect()
    }

    pub fn point(&self, u: &FieldElement, v: &FieldElement) -> Vec<FieldElement> {
        self.gamma.iter().map(|g| g.evaluate(&[u.clone(), v.clone()])).collect()
    }

    pub fn is_line(&self) -> bool {
        self.degree() == 1
    }

    pub fn transformed(&self, l: &[Vec<FieldElement>]) -> Result<Self> {
        Self::new(super::quadric::apply_linear(l, &self.gamma))
    }
}

/// Divide a vector of binary forms by the gcd of its nonzero entries.
///
/// Returns the reduced forms and the gcd.
pub fn reduce_forms(forms: &[HomoPoly]) -> Result<(Vec<HomoPoly>, HomoPoly)> {
    let vars = forms.first().map(|f| f.vars().clone()).ok_or(Error::ZeroPolynomial)?;
    let degree = forms.iter().find_map(HomoPoly::degree).ok_or(Error::IdenticallyZero)?;
    if forms.iter().any(|f| f.degree().is_some_and(|d| d != degree)) {
        return Err(Error::Invalid("components must have a common degree".into()));
    }
    let bfs: Vec<BinaryForm> = forms.iter().filter(|f| !f.is_zero()).map(BinaryForm::from_poly).collect::<Result<_>>()?;
    let g = gcd_all(&bfs).unwrap();
    let reduced = forms
        .iter()
        .map(|f| {
            if f.is_zero() {
                Ok(HomoPoly::zero(&vars))
            } else {
                Ok(BinaryForm::from_poly(f)?.div_exact(&g)?.to_poly(&vars))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reduced, g.to_poly(&vars)))
}

/// Either kind of curve, with the optional extras a curve file may carry.
#[derive(Clone, Debug)]
pub enum CurveModel {
    CompleteIntersection(CompleteIntersection),
    Rational(RationalCurve),
}

/// A curve file: the model plus optional second description and metadata.
#[derive(Clone, Debug)]
pub struct CurveSpec {
    pub name: Option<String>,
    pub model: CurveModel,
    /// A rational parametrization of the same curve, when the model is implicit.
    pub parametrization: Option<RationalCurve>,
    /// Equations of a complete intersection containing the curve, when the model is rational.
    pub equations: Option<CompleteIntersection>,
    pub genus: Option<u32>,
    /// Whether the attached branch data covers every singular and inflectional branch.
    pub complete_branch_data: bool,
    pub branches: Option<Value>,
}

fn poly_field(v: &Value, key: &str, ctx: &mut PolyParser, vars: &Vars) -> Result<HomoPoly> {
    let s = v.get(key).and_then(Value::as_str).ok_or_else(|| Error::Invalid(format!("curve lacks string `{key}`")))?;
    ctx.parse_poly(s, vars)
}

fn gamma_field(v: &Value, key: &str, ctx: &mut PolyParser) -> Result<RationalCurve> {
    let arr = v
        .get(key)
        .and_then(Value::as_array)
        .filter(|a| a.len() == 4)
        .ok_or_else(|| Error::Invalid(format!("`{key}` must be a list of four forms")))?;
    let forms = arr
        .iter()
        .map(|s| {
            let s = s.as_str().ok_or_else(|| Error::Invalid("forms must be strings".into()))?;
            ctx.parse_poly(s, &Vars::uv())
        })
        .collect::<Result<Vec<_>>>()?;
    RationalCurve::new(forms)
}

impl CurveSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        let mut ctx = PolyParser::new();
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Invalid("curve lacks `kind`".into()))?;
        let ci_of = |v: &Value, ctx: &mut PolyParser| -> Result<CompleteIntersection> {
            let mut ci = CompleteIntersection::new(
                poly_field(v, "F", ctx, &Vars::xyzt())?,
                poly_field(v, "G", ctx, &Vars::xyzt())?,
            )?;
            if let Some(d) = v.get("degree").and_then(Value::as_u64) {
                ci.component_degree = Some(d as u32);
            }
            Ok(ci)
        };
        let (model, parametrization, equations) = match kind {
            "complete_intersection" => {
                let ci = ci_of(v, &mut ctx)?;
                let par = if v.get("gamma").is_some() { Some(gamma_field(v, "gamma", &mut ctx)?) } else { None };
                (CurveModel::CompleteIntersection(ci), par, None)
            }
            "rational" => {
                let rc = gamma_field(v, "gamma", &mut ctx)?;
                let eq = if v.get("F").is_some() { Some(ci_of(v, &mut ctx)?) } else { None };
                (CurveModel::Rational(rc), None, eq)
            }
            other => return Err(Error::Invalid(format!("unknown curve kind `{other}`"))),
        };
        Ok(CurveSpec {
            name: v.get("name").and_then(Value::as_str).map(str::to_string),
            model,
            parametrization,
            equations,
            genus: v.get("genus").and_then(Value::as_u64).map(|g| g as u32),
            complete_branch_data: v.get("complete_branch_data").and_then(Value::as_bool).unwrap_or(false),
            branches: v.get("branches").cloned(),
        })
    }

    pub fn to_json(&self) -> Value {
        let gamma_json = |rc: &RationalCurve| json!(rc.components().iter().map(|g| g.to_string()).collect::<Vec<_>>());
        let mut out = match &self.model {
            CurveModel::CompleteIntersection(ci) => {
                let mut o = json!({"kind": "complete_intersection", "F": ci.f.to_string(), "G": ci.g.to_string()});
                if let Some(d) = ci.component_degree {
                    o["degree"] = json!(d);
                }
                if let Some(p) = &self.parametrization {
                    o["gamma"] = gamma_json(p);
                }
                o
            }
            CurveModel::Rational(rc) => {
                let mut o = json!({"kind": "rational", "gamma": gamma_json(rc)});
                if let Some(ci) = &self.equations {
                    o["F"] = json!(ci.f.to_string());
                    o["G"] = json!(ci.g.to_string());
                    if let Some(d) = ci.component_degree {
                        o["degree"] = json!(d);
                    }
                }
                o
            }
        };
        if let Some(n) = &self.name {
            out["name"] = json!(n);
        }
        if let Some(g) = self.genus {
            out["genus"] = json!(g);
        }
        if self.complete_branch_data {
            out["complete_branch_data"] = json!(true);
        }
        if let Some(b) = &self.branches {
            out["branches"] = b.clone();
        }
        out
    }

    /// The rational parametrization, from either description.
    pub fn rational(&self) -> Option<&RationalCurve> {
        match &self.model {
            CurveModel::Rational(rc) => Some(rc),
            CurveModel::CompleteIntersection(_) => self.parametrization.as_ref(),
        }
    }

    /// The complete intersection, from either description.
    pub fn complete_intersection(&self) -> Option<&CompleteIntersection> {
        match &self.model {
            CurveModel::CompleteIntersection(ci) => Some(ci),
            CurveModel::Rational(_) => self.equations.as_ref(),
        }
    }

    pub fn degree(&self) -> u32 {
        match &self.model {
            CurveModel::CompleteIntersection(ci) => ci.curve_degree(),
            CurveModel::Rational(rc) => rc.degree(),
        }
    }
}
