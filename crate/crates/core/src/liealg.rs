//! Self-dual Lie algebras with a fixed invariant form, their adjoint maps,
//! and group elements realized in a faithful matrix representation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, SpanSolver};
use crate::scalar::{max_abs, modulus, to_c64, Coeffs, Cx, Mat, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Real,
    Complex,
}

/// Which construction produced the algebra. Root data is only known for
/// the built-in matrix algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    Sl(usize),
    Gl(usize),
    Custom,
}

/// Residuals of the defining invariants, each a max over all index triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantResiduals {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub invariance: f64,
    pub symmetry_of_form: f64,
    pub duality: f64,
    /// Smallest over largest singular value of the Gram matrix.
    pub gram_inverse_condition: f64,
}

impl InvariantResiduals {
    pub fn max_residual(&self) -> f64 {
        self.antisymmetry
            .max(self.jacobi)
            .max(self.invariance)
            .max(self.symmetry_of_form)
            .max(self.duality)
    }
}

/// A Lie algebra with basis `T_a`, brackets `[T_a, T_b] = f_ab^c T_c`,
/// invariant Gram matrix `g_ab = <T_a, T_b>` and optional faithful
/// representation. The dual basis is `T^a = gram_inv^{ab} T_b`.
#[derive(Debug, Clone)]
pub struct LieAlgebra<R: Real> {
    dim: usize,
    struct_consts: Vec<Cx<R>>,
    gram: Mat<R>,
    gram_inv: Mat<R>,
    rep: Option<Vec<Mat<R>>>,
    rep_solver: Option<SpanSolver<R>>,
    field: FieldTag,
    kind: AlgebraKind,
    labels: Vec<String>,
}

impl<R: Real> LieAlgebra<R> {
    /// Assembles an algebra and verifies every invariant, failing with the
    /// first violated one. `f` is indexed `[a][b][c]` flattened row-major.
    pub fn from_parts(
        dim: usize,
        struct_consts: Vec<Cx<R>>,
        gram: Mat<R>,
        rep: Option<Vec<Mat<R>>>,
        field: FieldTag,
    ) -> Result<Self> {
        let tol = R::LOOSE_TOL;
        let alg = Self::assemble(dim, struct_consts, gram, rep, field, AlgebraKind::Custom, None, tol)?;
        Ok(alg)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        dim: usize,
        struct_consts: Vec<Cx<R>>,
        gram: Mat<R>,
        rep: Option<Vec<Mat<R>>>,
        field: FieldTag,
        kind: AlgebraKind,
        labels: Option<Vec<String>>,
        tol: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("algebra dimension must be positive".into()));
        }
        if struct_consts.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, got: struct_consts.len() });
        }
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: gram.nrows() });
        }
        let cond = linalg::inverse_condition(&gram);
        if cond < R::lit(R::TIGHT_TOL) {
            return Err(Error::InvariantViolation {
                invariant: "nondegeneracy",
                max_residual: cond.to_f64_lossy(),
                indices: vec![],
            });
        }
        let gram_inv = linalg::inverse(&gram)?;
        let rep_solver = match &rep {
            Some(mats) => {
                if mats.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: mats.len() });
                }
                let n = mats[0].nrows();
                let mut basis = Mat::<R>::zeros(n * n, dim);
                for (a, m) in mats.iter().enumerate() {
                    if m.nrows() != n || m.ncols() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
                    }
                    for i in 0..n {
                        for j in 0..n {
                            basis[(i * n + j, a)] = m[(i, j)];
                        }
                    }
                }
                Some(SpanSolver::new(basis).map_err(|_| Error::InvariantViolation {
                    invariant: "faithfulness of representation",
                    max_residual: 0.0,
                    indices: vec![],
                })?)
            }
            None => None,
        };
        let labels = labels.unwrap_or_else(|| (0..dim).map(|a| format!("T{a}")).collect());
        let alg = Self { dim, struct_consts, gram, gram_inv, rep, rep_solver, field, kind, labels };
        alg.validate(tol)?;
        Ok(alg)
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let n = self.dim;
        let scale = max_abs_slice(&self.struct_consts).max(R::one()) * max_abs(&self.gram).max(R::one());
        let tol_r = R::lit(tol) * scale;
        let check = |name: &'static str, (res, idx): (R, Vec<usize>)| -> Result<()> {
            if res > tol_r {
                Err(Error::InvariantViolation { invariant: name, max_residual: res.to_f64_lossy(), indices: idx })
            } else {
                Ok(())
            }
        };
        check("antisymmetry", self.antisymmetry_residual())?;
        check("symmetry of the form", self.form_symmetry_residual())?;
        check("jacobi identity", self.jacobi_residual())?;
        check("invariance of the form", self.invariance_residual())?;
        if let (Some(rep), Some(_)) = (&self.rep, &self.rep_solver) {
            // ρ([T_a, T_b]) = [ρ(T_a), ρ(T_b)]
            let mut worst = (R::zero(), vec![]);
            for a in 0..n {
                for b in 0..n {
                    let lhs = linalg::commutator(&rep[a], &rep[b]);
                    let mut rhs = Mat::<R>::zeros(lhs.nrows(), lhs.ncols());
                    for (c, t) in rep.iter().enumerate() {
                        rhs += t * self.f(a, b, c);
                    }
                    let r = max_abs(&(lhs - rhs));
                    if r > worst.0 {
                        worst = (r, vec![a, b]);
                    }
                }
            }
            check("representation homomorphism", worst)?;
        }
        Ok(())
    }

    fn antisymmetry_residual(&self) -> (R, Vec<usize>) {
        let n = self.dim;
        let mut worst = (R::zero(), vec![]);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let r = modulus(self.f(a, b, c) + self.f(b, a, c));
                    if r > worst.0 {
                        worst = (r, vec![a, b, c]);
                    }
                }
            }
        }
        worst
    }

    fn form_symmetry_residual(&self) -> (R, Vec<usize>) {
        let n = self.dim;
        let mut worst = (R::zero(), vec![]);
        for a in 0..n {
            for b in 0..n {
                let r = modulus(self.gram[(a, b)] - self.gram[(b, a)]);
                if r > worst.0 {
                    worst = (r, vec![a, b]);
                }
            }
        }
        worst
    }

    fn jacobi_residual(&self) -> (R, Vec<usize>) {
        let n = self.dim;
        let mut worst = (R::zero(), vec![]);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = Cx::new(R::zero(), R::zero());
                        for e in 0..n {
                            s += self.f(a, b, e) * self.f(e, c, d)
                                + self.f(b, c, e) * self.f(e, a, d)
                                + self.f(c, a, e) * self.f(e, b, d);
                        }
                        let r = modulus(s);
                        if r > worst.0 {
                            worst = (r, vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        worst
    }

    /// `<[T_a, T_b], T_c> + <T_b, [T_a, T_c]>` over all triples.
    fn invariance_residual(&self) -> (R, Vec<usize>) {
        let n = self.dim;
        let mut worst = (R::zero(), vec![]);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = Cx::new(R::zero(), R::zero());
                    for e in 0..n {
                        s += self.f(a, b, e) * self.gram[(e, c)] + self.f(a, c, e) * self.gram[(b, e)];
                    }
                    let r = modulus(s);
                    if r > worst.0 {
                        worst = (r, vec![a, b, c]);
                    }
                }
            }
        }
        worst
    }

    pub fn invariant_residuals(&self) -> InvariantResiduals {
        let duality = max_abs(&(&self.gram * &self.gram_inv - linalg::identity::<R>(self.dim)));
        InvariantResiduals {
            antisymmetry: self.antisymmetry_residual().0.to_f64_lossy(),
            jacobi: self.jacobi_residual().0.to_f64_lossy(),
            invariance: self.invariance_residual().0.to_f64_lossy(),
            symmetry_of_form: self.form_symmetry_residual().0.to_f64_lossy(),
            duality: duality.to_f64_lossy(),
            gram_inverse_condition: linalg::inverse_condition(&self.gram).to_f64_lossy(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `f_ab^c`.
    #[inline]
    pub fn f(&self, a: usize, b: usize, c: usize) -> Cx<R> {
        self.struct_consts[(a * self.dim + b) * self.dim + c]
    }

    pub fn struct_consts(&self) -> &[Cx<R>] {
        &self.struct_consts
    }

    pub fn gram(&self) -> &Mat<R> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &Mat<R> {
        &self.gram_inv
    }

    pub fn rep(&self) -> Option<&[Mat<R>]> {
        self.rep.as_deref()
    }

    /// Size of the representation matrices.
    pub fn rep_dim(&self) -> Option<usize> {
        self.rep.as_ref().map(|r| r[0].nrows())
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basis_vector(&self, a: usize) -> Coeffs<R> {
        let mut v = Coeffs::<R>::zeros(self.dim);
        v[a] = Cx::new(R::one(), R::zero());
        v
    }

    /// Coefficients of the dual basis element `T^a`.
    pub fn dual_basis_vector(&self, a: usize) -> Coeffs<R> {
        self.gram_inv.column(a).into_owned()
    }

    fn check_len(&self, x: &Coeffs<R>) -> Result<()> {
        if x.len() != self.dim {
            Err(Error::DimensionMismatch { expected: self.dim, got: x.len() })
        } else {
            Ok(())
        }
    }

    /// `<x, y>`.
    pub fn form(&self, x: &Coeffs<R>, y: &Coeffs<R>) -> Cx<R> {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &Coeffs<R>, y: &Coeffs<R>) -> Result<Coeffs<R>> {
        Ok(self.ad(x)? * y)
    }

    /// Matrix of `ad_x`: `(ad_x)^c_b = x^a f_ab^c`.
    pub fn ad(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        self.check_len(x)?;
        let n = self.dim;
        let mut m = Mat::<R>::zeros(n, n);
        for a in 0..n {
            let xa = x[a];
            if xa.re == R::zero() && xa.im == R::zero() {
                continue;
            }
            for b in 0..n {
                for c in 0..n {
                    m[(c, b)] += xa * self.f(a, b, c);
                }
            }
        }
        Ok(m)
    }

    fn rep_or_err(&self) -> Result<(&[Mat<R>], &SpanSolver<R>)> {
        match (&self.rep, &self.rep_solver) {
            (Some(r), Some(s)) => Ok((r.as_slice(), s)),
            _ => Err(Error::MissingRepresentation),
        }
    }

    /// `ρ(x) = x^a ρ(T_a)`.
    pub fn rep_matrix(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        self.check_len(x)?;
        let (rep, _) = self.rep_or_err()?;
        let n = rep[0].nrows();
        let mut m = Mat::<R>::zeros(n, n);
        for (a, t) in rep.iter().enumerate() {
            m += t * x[a];
        }
        Ok(m)
    }

    /// Expands a representation matrix in the basis; fails if it is not in
    /// the span of `ρ(T_a)`.
    pub fn coeffs_of(&self, m: &Mat<R>) -> Result<Coeffs<R>> {
        let (rep, solver) = self.rep_or_err()?;
        let n = rep[0].nrows();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let y = nalgebra::DVector::from_fn(n * n, |k, _| m[(k / n, k % n)]);
        let (c, res) = solver.solve(&y);
        let tol = R::lit(R::LOOSE_TOL) * max_abs(m).max(R::one());
        if res > tol {
            return Err(Error::NotInSpan { residual: res.to_f64_lossy() });
        }
        Ok(c)
    }

    /// Matrix of `y ↦ [X, y]` on the algebra for a representation-space
    /// matrix `X` that normalizes `ρ(𝒢)` (e.g. a `gl(n)` logarithm of a
    /// matrix near `SL(n)`).
    pub fn ad_of_rep_matrix(&self, x: &Mat<R>) -> Result<Mat<R>> {
        let (rep, _) = self.rep_or_err()?;
        let n = self.dim;
        let mut m = Mat::<R>::zeros(n, n);
        for (b, t) in rep.iter().enumerate() {
            let col = self.coeffs_of(&linalg::commutator(x, t))?;
            m.set_column(b, &col);
        }
        Ok(m)
    }

    /// Matrix of `Ad_q: y ↦ q y q^{-1}` in the algebra basis.
    pub fn big_ad(&self, q: &GroupElement<R>) -> Result<Mat<R>> {
        self.big_ad_matrix(q.matrix())
    }

    pub fn big_ad_matrix(&self, q: &Mat<R>) -> Result<Mat<R>> {
        let (rep, _) = self.rep_or_err()?;
        let qi = linalg::inverse(q)?;
        let n = self.dim;
        let mut m = Mat::<R>::zeros(n, n);
        for (b, t) in rep.iter().enumerate() {
            let col = self.coeffs_of(&(q * t * &qi))?;
            m.set_column(b, &col);
        }
        Ok(m)
    }

    pub fn exp_elem(&self, x: &Coeffs<R>) -> Result<GroupElement<R>> {
        let m = linalg::expm(&self.rep_matrix(x)?)?;
        Ok(GroupElement { matrix: m, provenance: Provenance::Exp(x.clone()) })
    }

    /// Principal logarithm, expanded in the algebra basis.
    pub fn log_principal(&self, q: &GroupElement<R>) -> Result<Coeffs<R>> {
        self.coeffs_of(&linalg::logm(q.matrix())?)
    }

    /// Draws a regular semisimple element: `ad_x` diagonalizable with all
    /// nonzero eigenvalues pairwise separated by more than `1e-6`.
    /// Gaussian coefficients are rescaled to a norm in `[radius/4, radius]`.
    pub fn sample_regular_semisimple(&self, seed: u64, radius: f64) -> Result<Coeffs<R>> {
        self.sample_regular_semisimple_where(seed, radius, |_| true)
    }

    /// As [`Self::sample_regular_semisimple`], additionally requiring
    /// `accept(ad eigenvalues)`.
    pub fn sample_regular_semisimple_where<F>(&self, seed: u64, radius: f64, accept: F) -> Result<Coeffs<R>>
    where
        F: Fn(&[Cx<R>]) -> bool,
    {
        const ATTEMPTS: usize = 100;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..ATTEMPTS {
            let x = gaussian_element::<R>(&mut rng, self.dim, radius);
            let Ok(eig) = linalg::diagonalize(&self.ad(&x)?) else { continue };
            if is_regular(&eig.values) && accept(&eig.values) {
                return Ok(x);
            }
        }
        Err(Error::SamplingFailed { attempts: ATTEMPTS })
    }
}

/// Gaussian coefficient vector rescaled to norm `radius * u`, `u ∈ [1/4, 1]`.
pub fn gaussian_element<R: Real>(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Coeffs<R> {
    let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let u: f64 = rand::Rng::random_range(&mut *rng, 0.25..=1.0);
    let nrm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let s = radius * u / nrm;
    Coeffs::<R>::from_iterator(dim, raw.into_iter().map(|v| Cx::new(R::lit(v * s), R::zero())))
}

const REGULAR_GAP: f64 = 1e-6;

fn is_regular<R: Real>(values: &[Cx<R>]) -> bool {
    let gap = R::lit(REGULAR_GAP);
    let nonzero: Vec<Cx<R>> = values.iter().copied().filter(|l| modulus(*l) > gap).collect();
    for i in 0..nonzero.len() {
        for j in 0..i {
            if modulus(nonzero[i] - nonzero[j]) <= gap {
                return false;
            }
        }
    }
    true
}

fn max_abs_slice<R: Real>(v: &[Cx<R>]) -> R {
    v.iter().fold(R::zero(), |acc, z| acc.max(modulus(*z)))
}

/// How a group element was produced.
#[derive(Debug, Clone)]
pub enum Provenance<R: Real> {
    Exp(Coeffs<R>),
    Raw,
}

/// An invertible matrix in the representation of the algebra.
#[derive(Debug, Clone)]
pub struct GroupElement<R: Real> {
    matrix: Mat<R>,
    provenance: Provenance<R>,
}

impl<R: Real> GroupElement<R> {
    pub fn from_matrix(matrix: Mat<R>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        if linalg::inverse_condition(&matrix) < R::lit(R::TIGHT_TOL) {
            return Err(Error::Singular);
        }
        Ok(Self { matrix, provenance: Provenance::Raw })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: linalg::identity(n), provenance: Provenance::Raw }
    }

    pub fn matrix(&self) -> &Mat<R> {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance<R> {
        &self.provenance
    }

    pub fn inverse(&self) -> Result<Self> {
        let provenance = match &self.provenance {
            Provenance::Exp(x) => Provenance::Exp(-x.clone()),
            Provenance::Raw => Provenance::Raw,
        };
        Ok(Self { matrix: linalg::inverse(&self.matrix)?, provenance })
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix, provenance: Provenance::Raw }
    }

    /// `q Ω q^{-1}` with `self = Ω`.
    pub fn conjugated_by(&self, q: &Self) -> Result<Self> {
        let qi = linalg::inverse(&q.matrix)?;
        Ok(Self { matrix: &q.matrix * &self.matrix * qi, provenance: Provenance::Raw })
    }
}

/// Matrix unit `E_ij` of size `n`.
pub fn matrix_unit<R: Real>(n: usize, i: usize, j: usize) -> Mat<R> {
    let mut m = Mat::<R>::zeros(n, n);
    m[(i, j)] = Cx::new(R::one(), R::zero());
    m
}

/// Structure constants and trace-form Gram matrix of a list of matrices
/// that spans a Lie algebra closed under commutators.
fn from_matrix_basis<R: Real>(basis: &[Mat<R>]) -> Result<(Vec<Cx<R>>, Mat<R>)> {
    let d = basis.len();
    let gram = Mat::<R>::from_fn(d, d, |a, b| (&basis[a] * &basis[b]).trace());
    let gram_inv = linalg::inverse(&gram)?;
    let mut f = vec![Cx::new(R::zero(), R::zero()); d * d * d];
    for a in 0..d {
        for b in 0..d {
            let br = linalg::commutator(&basis[a], &basis[b]);
            let lowered: Vec<Cx<R>> = basis.iter().map(|t| (t * &br).trace()).collect();
            for c in 0..d {
                let mut s = Cx::new(R::zero(), R::zero());
                for (e, l) in lowered.iter().enumerate() {
                    s += gram_inv[(c, e)] * l;
                }
                f[(a * d + b) * d + c] = s;
            }
        }
    }
    Ok((f, gram))
}

/// Index of the basis element `E_ij` (i ≠ j) in [`build_sl`]'s ordering.
pub fn sl_root_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j);
    let k = i * n + j;
    // skip diagonal positions 0, n+1, ..., i*(n+1) that precede (i, j)
    k - (i + usize::from(j > i))
}

/// `sl(n)` with basis `E_ij (i ≠ j)` in lexicographic order followed by
/// `H_k = E_kk - E_{k+1,k+1}`, the trace form of the defining representation,
/// and that representation.
pub fn build_sl<R: Real>(n: usize) -> Result<LieAlgebra<R>> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("sl(n) needs n >= 2, got {n}")));
    }
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(matrix_unit::<R>(n, i, j));
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
    }
    for k in 0..n - 1 {
        basis.push(matrix_unit::<R>(n, k, k) - matrix_unit::<R>(n, k + 1, k + 1));
        labels.push(format!("H{}", k + 1));
    }
    let (f, gram) = from_matrix_basis(&basis)?;
    let dim = basis.len();
    LieAlgebra::assemble(dim, f, gram, Some(basis), FieldTag::Complex, AlgebraKind::Sl(n), Some(labels), R::TIGHT_TOL)
}

/// `gl(n)` with basis `E_ij` in lexicographic order and the trace form.
pub fn build_gl_trace<R: Real>(n: usize) -> Result<LieAlgebra<R>> {
    if n < 1 {
        return Err(Error::InvalidDimension("gl(n) needs n >= 1".into()));
    }
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            basis.push(matrix_unit::<R>(n, i, j));
            labels.push(format!("E{}{}", i + 1, j + 1));
        }
    }
    let (f, gram) = from_matrix_basis(&basis)?;
    let dim = basis.len();
    LieAlgebra::assemble(dim, f, gram, Some(basis), FieldTag::Complex, AlgebraKind::Gl(n), Some(labels), R::TIGHT_TOL)
}

/// Basis indices of the diagonal Cartan subalgebra of `sl(n)`.
pub fn sl_cartan_indices(n: usize) -> std::ops::Range<usize> {
    (n * n - n)..(n * n - 1)
}

/// Root vectors `E_ij` of `sl(n)` as `(basis index, i, j)`; the root is
/// `α(ω) = ω_i - ω_j` on a diagonal `ω`.
pub fn sl_roots(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push((sl_root_index(n, i, j), i, j));
            }
        }
    }
    out
}

impl<R: Real> LieAlgebra<R> {
    /// Human-readable coefficients as `f64` pairs; used by `algebra info`.
    pub fn describe_element(&self, x: &Coeffs<R>) -> String {
        let parts: Vec<String> = x
            .iter()
            .zip(&self.labels)
            .filter(|(c, _)| modulus(**c) > R::zero())
            .map(|(c, l)| {
                let c = to_c64(*c);
                format!("({:.4}{:+.4}i){}", c.re, c.im, l)
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use proptest::prelude::*;

    type L = LieAlgebra<f64>;

    fn sl2() -> L {
        build_sl(2).unwrap()
    }

    fn idx(l: &L, name: &str) -> usize {
        l.labels().iter().position(|s| s == name).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_sl::<f64>(2).unwrap().dim(), 3);
        assert_eq!(build_sl::<f64>(3).unwrap().dim(), 8);
        assert_eq!(build_gl_trace::<f64>(2).unwrap().dim(), 4);
        assert!(matches!(build_sl::<f64>(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(build_gl_trace::<f64>(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn trace_form_of_h() {
        let l = sl2();
        let h = idx(&l, "H1");
        assert_eq!(l.gram()[(h, h)], cx(2.0, 0.0));
    }

    #[test]
    fn sl2_defining_relation() {
        let l = sl2();
        let (h, e) = (l.basis_vector(idx(&l, "H1")), l.basis_vector(idx(&l, "E12")));
        let he = l.bracket(&h, &e).unwrap();
        assert!((he - e * cx(2.0, 0.0)).camax() < 1e-15);
    }

    #[test]
    fn builtins_satisfy_invariants() {
        for l in [build_sl::<f64>(2).unwrap(), build_sl(3).unwrap(), build_gl_trace(2).unwrap(), build_gl_trace(3).unwrap()] {
            let inv = l.invariant_residuals();
            assert!(inv.max_residual() < 1e-12, "{inv:?}");
            assert!(inv.gram_inverse_condition > 1e-3);
        }
    }

    #[test]
    fn gl_identity_is_central() {
        let l = build_gl_trace::<f64>(2).unwrap();
        let mut id = Coeffs::<f64>::zeros(4);
        id[idx(&l, "E11")] = cx(1.0, 0.0);
        id[idx(&l, "E22")] = cx(1.0, 0.0);
        assert_eq!(max_abs(&l.ad(&id).unwrap()), 0.0);
    }

    #[test]
    fn sl_root_index_matches_labels() {
        let l = build_sl::<f64>(3).unwrap();
        for (k, i, j) in sl_roots(3) {
            assert_eq!(l.labels()[k], format!("E{}{}", i + 1, j + 1));
        }
        for k in sl_cartan_indices(3) {
            assert!(l.labels()[k].starts_with('H'));
        }
    }

    #[test]
    fn ad_requires_matching_length() {
        let l = sl2();
        assert!(matches!(l.ad(&Coeffs::<f64>::zeros(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn big_ad_of_identity_and_of_exponential() {
        let l = build_sl::<f64>(3).unwrap();
        let ad_id = l.big_ad(&GroupElement::identity(3)).unwrap();
        assert!(max_abs(&(ad_id - linalg::identity::<f64>(8))) < 1e-15);
        let x = l.sample_regular_semisimple(3, 1.0).unwrap();
        let q = l.exp_elem(&x).unwrap();
        let lhs = l.big_ad(&q).unwrap();
        let rhs = linalg::expm(&l.ad(&x).unwrap()).unwrap();
        assert!(max_abs(&(&lhs - rhs)) < 1e-10);
        assert!(lhs.determinant().norm() > 1e-6);
    }

    #[test]
    fn big_ad_needs_rep() {
        let l = sl2();
        let bare = LieAlgebra::from_parts(3, l.struct_consts().to_vec(), l.gram().clone(), None, FieldTag::Real).unwrap();
        assert!(matches!(bare.big_ad(&GroupElement::identity(2)), Err(Error::MissingRepresentation)));
    }

    #[test]
    fn exp_log_round_trip_sl3() {
        let l = build_sl::<f64>(3).unwrap();
        assert!(max_abs(&(l.exp_elem(&Coeffs::zeros(8)).unwrap().matrix() - linalg::identity::<f64>(3))) == 0.0);
        for seed in 0..10 {
            let x = l.sample_regular_semisimple(seed, 0.5).unwrap();
            let back = l.log_principal(&l.exp_elem(&x).unwrap()).unwrap();
            assert!((back - &x).camax() < 1e-11);
        }
    }

    #[test]
    fn log_on_branch_cut_is_domain_error() {
        let l = sl2();
        let q = GroupElement::from_matrix(linalg::identity::<f64>(2) * cx(-1.0, 0.0)).unwrap();
        assert!(matches!(l.log_principal(&q), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn regular_sampling_sl2() {
        let l = sl2();
        let x = l.sample_regular_semisimple(1, 1.0).unwrap();
        let y = l.sample_regular_semisimple(1, 1.0).unwrap();
        assert_eq!(x, y);
        let mut ev = linalg::eigenvalues(&l.ad(&x).unwrap()).unwrap();
        ev.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        assert!(ev[0].norm() < 1e-12);
        assert!(ev[1].norm() > 1e-6);
        assert!((ev[1] + ev[2]).norm() < 1e-12);
    }

    #[test]
    fn regular_sampling_sl3() {
        let l = build_sl::<f64>(3).unwrap();
        let x = l.sample_regular_semisimple(11, 1.0).unwrap();
        let ev = linalg::eigenvalues(&l.ad(&x).unwrap()).unwrap();
        assert_eq!(ev.len(), 8);
        let nz: Vec<_> = ev.iter().filter(|z| z.norm() > 1e-6).collect();
        assert_eq!(nz.len(), 6);
        for i in 0..6 {
            for j in 0..i {
                assert!((nz[i] - nz[j]).norm() > 1e-6);
            }
        }
    }

    #[test]
    fn sampling_failure_reports_attempts() {
        let l = sl2();
        let err = l.sample_regular_semisimple_where(0, 1.0, |_| false).unwrap_err();
        assert_eq!(err, Error::SamplingFailed { attempts: 100 });
    }

    #[test]
    fn f32_algebra_builds() {
        let l = build_sl::<f32>(3).unwrap();
        assert!(l.invariant_residuals().max_residual() < 1e-5);
    }

    fn rand_elem(l: &L, seed: u64, r: f64) -> Coeffs<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gaussian_element(&mut rng, l.dim(), r)
    }

    proptest! {
        #[test]
        fn ad_is_antisymmetric_for_the_form(seed in any::<u64>()) {
            let l = build_sl::<f64>(3).unwrap();
            let (x, y, z) = (rand_elem(&l, seed, 1.0), rand_elem(&l, seed ^ 1, 1.0), rand_elem(&l, seed ^ 2, 1.0));
            let adx = l.ad(&x).unwrap();
            let lhs = l.form(&(&adx * &y), &z) + l.form(&y, &(&adx * &z));
            prop_assert!(lhs.norm() < 1e-12);
            prop_assert!((&adx * &x).camax() < 1e-14);
        }

        #[test]
        fn ad_is_a_homomorphism(seed in any::<u64>()) {
            let l = build_sl::<f64>(3).unwrap();
            let (x, y) = (rand_elem(&l, seed, 1.0), rand_elem(&l, seed ^ 7, 1.0));
            let (adx, ady) = (l.ad(&x).unwrap(), l.ad(&y).unwrap());
            let lhs = l.ad(&l.bracket(&x, &y).unwrap()).unwrap();
            prop_assert!(max_abs(&(lhs - linalg::commutator(&adx, &ady))) < 1e-10);
        }

        #[test]
        fn big_ad_is_a_homomorphism(seed in any::<u64>()) {
            let l = build_sl::<f64>(3).unwrap();
            let q1 = l.exp_elem(&rand_elem(&l, seed, 0.8)).unwrap();
            let q2 = l.exp_elem(&rand_elem(&l, seed ^ 3, 0.8)).unwrap();
            let lhs = l.big_ad(&q1.mul(&q2)).unwrap();
            let rhs = l.big_ad(&q1).unwrap() * l.big_ad(&q2).unwrap();
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }
}
