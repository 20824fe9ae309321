//! Quadrics `Q(m) = m^T M m` with symmetric `M`.

use serde_json::{json, Value};

use super::wedge::Ring;
use crate::algebra::json::{field_from_json, field_to_json};
use crate::algebra::{FieldElement, HomoPoly, PolyParser, Vars};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Quadric {
    m: [[FieldElement; 4]; 4],
}

/// Which of the standing genericity conditions a quadric satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericityFlags {
    pub m44_nonzero: bool,
    pub m_i4_nonzero: bool,
    pub det_nonzero: bool,
}

impl GenericityFlags {
    pub fn all(&self) -> bool {
        self.m44_nonzero && self.m_i4_nonzero && self.det_nonzero
    }
}

fn det(m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut d = FieldElement::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return FieldElement::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -&d;
        }
        d = &d * &a[col][col];
        let inv = a[col][col].inv().expect("pivot is nonzero");
        for r in col + 1..n {
            let f = &a[r][col] * &inv;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let s = &a[col][c] * &f;
                a[r][c] = &a[r][c] - &s;
            }
        }
    }
    d
}

impl Quadric {
    /// Build from a symmetric matrix.
    pub fn new(m: [[FieldElement; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(Error::Invalid("quadric matrix must be symmetric".into()));
                }
            }
        }
        Ok(Quadric { m })
    }

    pub fn from_ints(m: [[i64; 4]; 4]) -> Result<Self> {
        Self::new(m.map(|row| row.map(FieldElement::from_int)))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).unwrap()
    }

    pub fn matrix(&self) -> &[[FieldElement; 4]; 4] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.m[i][j]
    }

    pub fn determinant(&self) -> FieldElement {
        det(&self.m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    pub fn flags(&self) -> GenericityFlags {
        GenericityFlags {
            m44_nonzero: !self.m[3][3].is_zero(),
            m_i4_nonzero: (0..3).all(|i| !self.m[i][3].is_zero()),
            det_nonzero: !self.determinant().is_zero(),
        }
    }

    /// `b_Q(x, y) = x^T M y`, over any coefficient ring.
    pub fn bilinear<T: Ring>(&self, x: &[T], y: &[T]) -> T {
        let mut acc: Option<T> = None;
        for i in 0..4 {
            for j in 0..4 {
                if self.m[i][j].is_zero() {
                    continue;
                }
                let t = x[i].r_mul(&y[j]).r_scale(&self.m[i][j]);
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.r_add(&t),
                });
            }
        }
        acc.unwrap_or_else(|| x[0].r_mul(&y[0]).r_scale(&FieldElement::zero()))
    }

    pub fn eval<T: Ring>(&self, x: &[T]) -> T {
        self.bilinear(x, x)
    }

    /// `2 M m`.
    pub fn gradient<T: Ring>(&self, x: &[T]) -> Vec<T> {
        (0..4)
            .map(|i| {
                let mut acc = x[0].r_scale(&(&self.m[i][0] * &FieldElement::from_int(2)));
                for j in 1..4 {
                    acc = acc.r_add(&x[j].r_scale(&(&self.m[i][j] * &FieldElement::from_int(2))));
                }
                acc
            })
            .collect()
    }

    pub fn as_poly(&self) -> HomoPoly {
        let vars = Vars::xyzt();
        let xs: Vec<HomoPoly> = (0..4).map(|i| HomoPoly::var(&vars, i)).collect();
        self.eval(&xs)
    }

    /// The polar form `x -> 2 (M m) . x` of the point `m`.
    pub fn polar_plane(&self, m: &[FieldElement]) -> Result<HomoPoly> {
        let vars = Vars::xyzt();
        let g = self.gradient(m);
        let terms = g.iter().enumerate().map(|(j, c)| {
            let mut e = vec![0; 4];
            e[j] = 1;
            (e, c.clone())
        });
        let p = HomoPoly::from_terms(&vars, terms)?;
        if p.is_zero() {
            return Err(Error::DegeneratePolar);
        }
        Ok(p)
    }

    /// The quadric `Q'` with `Q'(L m) = Q(m)`, i.e. matrix `L^-T M L^-1`.
    pub fn transformed(&self, l: &[Vec<FieldElement>]) -> Result<Quadric> {
        let linv = invert4(l)?;
        let mut out: [[FieldElement; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| FieldElement::zero()));
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = FieldElement::zero();
                for a in 0..4 {
                    for b in 0..4 {
                        if self.m[a][b].is_zero() {
                            continue;
                        }
                        acc = &acc + &(&(&linv[a][i] * &self.m[a][b]) * &linv[b][j]);
                    }
                }
                *cell = acc;
            }
        }
        Quadric::new(out)
    }

    pub fn to_json(&self) -> Value {
        json!(self.m.iter().map(|r| r.iter().map(field_to_json).collect::<Vec<_>>()).collect::<Vec<_>>())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let mut ctx = PolyParser::new();
        let rows = v.as_array().filter(|r| r.len() == 4).ok_or_else(|| Error::Invalid("quadric needs 4 rows".into()))?;
        let mut m: [[FieldElement; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| FieldElement::zero()));
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == 4).ok_or_else(|| Error::Invalid("quadric rows need 4 entries".into()))?;
            for (j, x) in row.iter().enumerate() {
                m[i][j] = field_from_json(x, &mut ctx)?;
            }
        }
        Quadric::new(m)
    }
}

/// Inverse of a 4x4 matrix by Gauss-Jordan elimination.
pub fn invert4(l: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let n = l.len();
    let mut a: Vec<Vec<FieldElement>> = l
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { FieldElement::one() } else { FieldElement::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::DivisionByZero)?;
        a.swap(p, col);
        let inv = a[col][col].inv()?;
        for c in 0..2 * n {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let s = &a[col][c] * &f;
                a[r][c] = &a[r][c] - &s;
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Apply a 4x4 matrix to a vector over any ring.
pub fn apply_linear<T: Ring>(l: &[Vec<FieldElement>], x: &[T]) -> Vec<T> {
    l.iter()
        .map(|row| {
            let mut acc = x[0].r_scale(&row[0]);
            for j in 1..x.len() {
                acc = acc.r_add(&x[j].r_scale(&row[j]));
            }
            acc
        })
        .collect()
}
