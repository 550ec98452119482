//! JSON documents for algebras and tensors.
//!
//! ```json
//! { "dim": 3, "field": "real",
//!   "f":    [[[0, 0, 0], ...], ...],      // f[a][b][c]
//!   "gram": [[0, 1, 0], ...],
//!   "rep":  [[[1, 0], [0, 0], [0, 0], [-1, 0]], ...] }
//! ```
//!
//! Scalars in `f` and `gram` are either plain numbers or `[re, im]` pairs;
//! `rep` holds each matrix flattened row-major as `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{FieldTag, LieAlgebra};
use crate::scalar::{to_c64, Cx, Mat, Real};
use crate::tensor::{ThreeTensor, TwoTensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn to_cx<R: Real>(self) -> Cx<R> {
        match self {
            Scalar::Real(x) => Cx::new(R::lit(x), R::zero()),
            Scalar::Complex([a, b]) => Cx::new(R::lit(a), R::lit(b)),
        }
    }

    fn from_cx<R: Real>(z: Cx<R>, field: FieldTag) -> Self {
        let c = to_c64(z);
        if field == FieldTag::Real && c.im == 0.0 {
            Scalar::Real(c.re)
        } else {
            Scalar::Complex([c.re, c.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub field: FieldTag,
    pub f: Vec<Vec<Vec<Scalar>>>,
    pub gram: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Vec<Vec<[f64; 2]>>>,
}

impl AlgebraDocument {
    pub fn from_algebra<R: Real>(l: &LieAlgebra<R>) -> Self {
        let n = l.dim();
        let field = l.field();
        let f = (0..n)
            .map(|a| (0..n).map(|b| (0..n).map(|c| Scalar::from_cx(l.f(a, b, c), field)).collect()).collect())
            .collect();
        let gram = (0..n).map(|a| (0..n).map(|b| Scalar::from_cx(l.gram()[(a, b)], field)).collect()).collect();
        let rep = l.rep().map(|mats| {
            mats.iter()
                .map(|m| {
                    let k = m.nrows();
                    (0..k * k)
                        .map(|p| {
                            let c = to_c64(m[(p / k, p % k)]);
                            [c.re, c.im]
                        })
                        .collect()
                })
                .collect()
        });
        Self { dim: n, field, f, gram, rep }
    }

    /// Builds the algebra, verifying every invariant.
    pub fn to_algebra<R: Real>(&self) -> Result<LieAlgebra<R>> {
        let n = self.dim;
        if self.f.len() != n || self.f.iter().any(|row| row.len() != n || row.iter().any(|s| s.len() != n)) {
            return Err(Error::Parse(format!("f must be a {n}x{n}x{n} nested array")));
        }
        if self.gram.len() != n || self.gram.iter().any(|row| row.len() != n) {
            return Err(Error::Parse(format!("gram must be a {n}x{n} nested array")));
        }
        let mut f = Vec::with_capacity(n * n * n);
        for a in &self.f {
            for b in a {
                for c in b {
                    f.push(c.to_cx::<R>());
                }
            }
        }
        let gram = Mat::<R>::from_fn(n, n, |a, b| self.gram[a][b].to_cx());
        let rep = match &self.rep {
            None => None,
            Some(mats) => {
                let mut out = Vec::with_capacity(mats.len());
                for m in mats {
                    let k = (m.len() as f64).sqrt().round() as usize;
                    if k * k != m.len() || k == 0 {
                        return Err(Error::Parse(format!("rep matrix with {} entries is not square", m.len())));
                    }
                    out.push(Mat::<R>::from_fn(k, k, |i, j| {
                        let [a, b] = m[i * k + j];
                        Cx::new(R::lit(a), R::lit(b))
                    }));
                }
                Some(out)
            }
        };
        LieAlgebra::from_parts(n, f, gram, rep, self.field)
    }
}

pub fn load_algebra<R: Real>(text: &str) -> Result<LieAlgebra<R>> {
    let doc: AlgebraDocument = serde_json::from_str(text)?;
    doc.to_algebra()
}

pub fn save_algebra<R: Real>(l: &LieAlgebra<R>) -> String {
    serde_json::to_string_pretty(&AlgebraDocument::from_algebra(l)).expect("algebra document serializes")
}

/// Two- or three-tensor coefficients as nested `[re, im]` arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TensorDocument {
    Two { coeffs: Vec<Vec<[f64; 2]>> },
    Three { coeffs: Vec<Vec<Vec<[f64; 2]>>> },
}

impl TensorDocument {
    pub fn from_two<R: Real>(t: &TwoTensor<R>) -> Self {
        let n = t.dim();
        let coeffs = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let c = to_c64(t.coeffs()[(a, b)]);
                        [c.re, c.im]
                    })
                    .collect()
            })
            .collect();
        TensorDocument::Two { coeffs }
    }

    pub fn from_three<R: Real>(u: &ThreeTensor<R>) -> Self {
        let n = u.dim();
        let coeffs = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|c| {
                                let z = to_c64(u.get(a, b, c));
                                [z.re, z.im]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TensorDocument::Three { coeffs }
    }

    pub fn to_two<R: Real>(&self) -> Result<TwoTensor<R>> {
        match self {
            TensorDocument::Two { coeffs } => {
                let n = coeffs.len();
                if coeffs.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse("two-tensor must be square".into()));
                }
                Ok(TwoTensor::new(Mat::<R>::from_fn(n, n, |a, b| {
                    let [x, y] = coeffs[a][b];
                    Cx::new(R::lit(x), R::lit(y))
                })))
            }
            TensorDocument::Three { .. } => Err(Error::Parse("expected a two-tensor".into())),
        }
    }

    pub fn to_three<R: Real>(&self) -> Result<ThreeTensor<R>> {
        match self {
            TensorDocument::Three { coeffs } => {
                let n = coeffs.len();
                let mut u = ThreeTensor::zeros(n);
                for (a, plane) in coeffs.iter().enumerate() {
                    if plane.len() != n || plane.iter().any(|r| r.len() != n) {
                        return Err(Error::Parse("three-tensor must be cubic".into()));
                    }
                    for (b, row) in plane.iter().enumerate() {
                        for (c, [x, y]) in row.iter().enumerate() {
                            u.set(a, b, c, Cx::new(R::lit(*x), R::lit(*y)));
                        }
                    }
                }
                Ok(u)
            }
            TensorDocument::Two { .. } => Err(Error::Parse("expected a three-tensor".into())),
        }
    }
}
