//! Poisson brackets on `𝒢 × G × 𝒢` and `G × G × G` as coordinate bivectors
//! on ambient matrix entries, with finite-difference Jacobi checks.
//!
//! Brackets of matrix entries use the tensor convention
//! `{A_ij, B_kl} = M[(i·n + k), (j·n + l)]` for `{A_1, B_2} = M`, where
//! `A_1 = A ⊗ 1` and `B_2 = 1 ⊗ B` are Kronecker products.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liealg::{GroupElement, LieAlgebra};
use crate::linalg;
use crate::rmatrix::{Case, GroupPoint, LinearPoint, RMatrixFamily};
use crate::scalar::{max_abs, max_abs_iter, modulus, Coeffs, Cx, Mat, Real};
use crate::tensor::{check_antisymmetric, modified_cybe_residual, r_minus, r_plus, rep_two_tensor, two_tensor_from_endo, TwoTensor};
use crate::verify::{point_seed, sample_admissible};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Left,
    Middle,
    Right,
}

/// A point `(left, g, right)` stored as its flattened ambient coordinates.
///
/// Linear case: `[ω^L coefficients, g entries, ω^R coefficients]`; group
/// case: `[Ω^L entries, g entries, Ω^R entries]`, all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<R: Real> {
    case: Case,
    dim: usize,
    rep_dim: usize,
    coords: Vec<Cx<R>>,
}

fn flatten<R: Real>(m: &Mat<R>, out: &mut Vec<Cx<R>>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
}

impl<R: Real> PhasePoint<R> {
    pub fn linear(l: &LieAlgebra<R>, left: &Coeffs<R>, g: &GroupElement<R>, right: &Coeffs<R>) -> Result<Self> {
        let d = l.dim();
        let n = l.rep_dim().ok_or(Error::MissingRepresentation)?;
        for v in [left, right] {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        if g.matrix().nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.matrix().nrows() });
        }
        let mut coords = Vec::with_capacity(2 * d + n * n);
        coords.extend(left.iter().copied());
        flatten(g.matrix(), &mut coords);
        coords.extend(right.iter().copied());
        Ok(Self { case: Case::Linear, dim: d, rep_dim: n, coords })
    }

    pub fn group(left: &GroupElement<R>, g: &GroupElement<R>, right: &GroupElement<R>) -> Result<Self> {
        let n = g.matrix().nrows();
        for m in [left, right] {
            if m.matrix().nrows() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.matrix().nrows() });
            }
        }
        let mut coords = Vec::with_capacity(3 * n * n);
        flatten(left.matrix(), &mut coords);
        flatten(g.matrix(), &mut coords);
        flatten(right.matrix(), &mut coords);
        Ok(Self { case: Case::Group, dim: n * n, rep_dim: n, coords })
    }

    pub fn from_coordinates(case: Case, dim: usize, rep_dim: usize, coords: Vec<Cx<R>>) -> Result<Self> {
        let dim = if case == Case::Group { rep_dim * rep_dim } else { dim };
        let want = 2 * dim + rep_dim * rep_dim;
        if coords.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: coords.len() });
        }
        Ok(Self { case, dim, rep_dim, coords })
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn coordinates(&self) -> &[Cx<R>] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn range(&self, block: Block) -> Range<usize> {
        let nn = self.rep_dim * self.rep_dim;
        match block {
            Block::Left => 0..self.dim,
            Block::Middle => self.dim..self.dim + nn,
            Block::Right => self.dim + nn..2 * self.dim + nn,
        }
    }

    fn block_matrix(&self, block: Block) -> Mat<R> {
        let n = self.rep_dim;
        let s = &self.coords[self.range(block)];
        Mat::<R>::from_fn(n, n, |i, j| s[i * n + j])
    }

    fn block_vector(&self, block: Block) -> Coeffs<R> {
        Coeffs::<R>::from_column_slice(&self.coords[self.range(block)])
    }

    pub fn g(&self) -> Mat<R> {
        self.block_matrix(Block::Middle)
    }

    /// `ω^L` coefficients (linear case) or `Ω^L` entries as a column.
    pub fn left_coeffs(&self) -> Coeffs<R> {
        self.block_vector(Block::Left)
    }

    pub fn right_coeffs(&self) -> Coeffs<R> {
        self.block_vector(Block::Right)
    }

    /// `Ω^L` (group case).
    pub fn left_matrix(&self) -> Result<Mat<R>> {
        self.require(Case::Group)?;
        Ok(self.block_matrix(Block::Left))
    }

    pub fn right_matrix(&self) -> Result<Mat<R>> {
        self.require(Case::Group)?;
        Ok(self.block_matrix(Block::Right))
    }

    fn require(&self, case: Case) -> Result<()> {
        if self.case != case {
            return Err(Error::Domain(format!("expected a {case:?} phase point, got {:?}", self.case)));
        }
        Ok(())
    }

    /// Copy with coordinate `k` shifted by `h`.
    pub fn shifted(&self, k: usize, h: Cx<R>) -> Self {
        let mut out = self.clone();
        out.coords[k] += h;
        out
    }
}

/// Which bracket ansatz to evaluate. Constant r-matrices are checked by
/// [`Bracket::new`].
#[derive(Debug, Clone)]
pub enum BracketSpec<R: Real> {
    /// `{g1, g2} = 0` with the `ω^{L,R}` blocks of the cotangent bundle.
    Linear0,
    /// As `Linear0` with `{g1, g2} = ℛ(ω^L) g1 g2 − g1 g2 ℛ(ω^R)`.
    LinearR(RMatrixFamily<R>),
    /// The Heisenberg-double bracket built from a constant `r`.
    Group0 { r: TwoTensor<R> },
    /// As `Group0` with `r` replaced by `r + R(Ω^{L,R})` in `{g1, g2}`.
    GroupR { r: TwoTensor<R>, family: RMatrixFamily<R> },
    /// `{g1, g2} = r g1 g2 − g1 g2 r`, all other blocks zero.
    Sklyanin { r: TwoTensor<R> },
}

impl<R: Real> BracketSpec<R> {
    pub fn case(&self) -> Case {
        match self {
            BracketSpec::Linear0 | BracketSpec::LinearR(_) => Case::Linear,
            _ => Case::Group,
        }
    }

    fn constant_r(&self) -> Option<&TwoTensor<R>> {
        match self {
            BracketSpec::Group0 { r } | BracketSpec::GroupR { r, .. } | BracketSpec::Sklyanin { r } => Some(r),
            _ => None,
        }
    }
}

/// A bracket bound to an algebra, with its representation tensors cached.
pub struct Bracket<'a, R: Real> {
    l: &'a LieAlgebra<R>,
    spec: BracketSpec<R>,
    n: usize,
    r: Mat<R>,
    r_plus: Mat<R>,
    r_minus: Mat<R>,
}

/// Largest modified-CYBE residual accepted for the constant r-matrix.
fn r_matrix_tol<R: Real>() -> R {
    R::lit(R::TIGHT_TOL * 100.0)
}

fn fill<R: Real>(p: &mut Mat<R>, n: usize, rows: Range<usize>, cols: Range<usize>, m: &Mat<R>) {
    let same = rows.start == cols.start;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = m[(i * n + k, j * n + l)];
                    p[(rows.start + i * n + j, cols.start + k * n + l)] = v;
                    if !same {
                        p[(cols.start + k * n + l, rows.start + i * n + j)] = -v;
                    }
                }
            }
        }
    }
}

impl<'a, R: Real> Bracket<'a, R> {
    pub fn new(l: &'a LieAlgebra<R>, spec: BracketSpec<R>) -> Result<Self> {
        let n = l.rep_dim().ok_or(Error::MissingRepresentation)?;
        let zero = Mat::<R>::zeros(n * n, n * n);
        let (r, r_plus_m, r_minus_m) = match spec.constant_r() {
            Some(r) => {
                if r.dim() != l.dim() {
                    return Err(Error::DimensionMismatch { expected: l.dim(), got: r.dim() });
                }
                check_antisymmetric(r)?;
                let res = modified_cybe_residual(l, r)?.max_abs();
                if res > r_matrix_tol() {
                    return Err(Error::InvariantViolation {
                        invariant: "modified CYBE",
                        max_residual: res.to_f64_lossy(),
                        indices: vec![],
                    });
                }
                (rep_two_tensor(l, r)?, rep_two_tensor(l, &r_plus(l, r))?, rep_two_tensor(l, &r_minus(l, r))?)
            }
            None => (zero.clone(), zero.clone(), zero),
        };
        let fam = match &spec {
            BracketSpec::LinearR(f) | BracketSpec::GroupR { family: f, .. } => Some(f),
            _ => None,
        };
        if let Some(f) = fam {
            if !f.supports(spec.case()) {
                return Err(Error::Unsupported(format!("family {} in the {:?} case", f.label(), spec.case())));
            }
        }
        Ok(Self { l, spec, n, r, r_plus: r_plus_m, r_minus: r_minus_m })
    }

    pub fn spec(&self) -> &BracketSpec<R> {
        &self.spec
    }

    pub fn algebra(&self) -> &LieAlgebra<R> {
        self.l
    }

    fn check_point(&self, p: &PhasePoint<R>) -> Result<()> {
        p.require(self.spec.case())?;
        if p.rep_dim != self.n || (p.case == Case::Linear && p.dim != self.l.dim()) {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.rep_dim });
        }
        Ok(())
    }

    /// `{x_i, x_j}` for all ambient coordinates.
    pub fn matrix(&self, p: &PhasePoint<R>) -> Result<Mat<R>> {
        self.check_point(p)?;
        match p.case {
            Case::Linear => self.linear_matrix(p),
            Case::Group => self.group_matrix(p),
        }
    }

    pub fn bivector(&self, p: &PhasePoint<R>, i: usize, j: usize) -> Result<Cx<R>> {
        if i >= p.len() || j >= p.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), got: i.max(j) });
        }
        Ok(self.matrix(p)?[(i, j)])
    }

    fn rep_r(&self, endo: &Mat<R>) -> Result<Mat<R>> {
        rep_two_tensor(self.l, &two_tensor_from_endo(self.l, endo)?)
    }

    fn linear_matrix(&self, p: &PhasePoint<R>) -> Result<Mat<R>> {
        let l = self.l;
        let (d, n) = (l.dim(), self.n);
        let rep = l.rep().ok_or(Error::MissingRepresentation)?;
        let mut out = Mat::<R>::zeros(p.len(), p.len());
        let half = Cx::new(R::lit(0.5), R::zero());
        let g = p.g();
        let mr = p.range(Block::Middle);
        // ρ(T^a) = G^{ad} ρ(T_d)
        let dual: Vec<Mat<R>> = (0..d)
            .map(|a| (0..d).fold(Mat::<R>::zeros(n, n), |acc, e| acc + &rep[e] * l.gram_inv()[(a, e)]))
            .collect();
        for (block, sign) in [(Block::Left, R::one()), (Block::Right, -R::one())] {
            let w = if block == Block::Left { p.left_coeffs() } else { p.right_coeffs() };
            let off = p.range(block).start;
            // A^{ab} = G^{ad} ω^e f_{de}^b
            let ad_w = Mat::<R>::from_fn(d, d, |dd, b| (0..d).fold(Cx::new(R::zero(), R::zero()), |s, e| s + w[e] * l.f(dd, e, b)));
            let a = l.gram_inv() * ad_w;
            for i in 0..d {
                for j in 0..d {
                    out[(off + i, off + j)] = (a[(i, j)] - a[(j, i)]) * half * Cx::new(sign, R::zero());
                }
            }
            for (a_idx, t) in dual.iter().enumerate() {
                let m = if block == Block::Left { t * &g } else { &g * t };
                for k in 0..n {
                    for c in 0..n {
                        let v = m[(k, c)];
                        out[(off + a_idx, mr.start + k * n + c)] = v;
                        out[(mr.start + k * n + c, off + a_idx)] = -v;
                    }
                }
            }
        }
        if let BracketSpec::LinearR(fam) = &self.spec {
            let rl = self.rep_r(LinearPoint::new(fam, l, &p.left_coeffs())?.value())?;
            let rr_m = self.rep_r(LinearPoint::new(fam, l, &p.right_coeffs())?.value())?;
            let gg = g.kronecker(&g);
            fill(&mut out, n, mr.clone(), mr.clone(), &(&rl * &gg - &gg * &rr_m));
        }
        Ok(out)
    }

    /// `r Ω1 Ω2 + Ω1 Ω2 r − Ω1 r^- Ω2 − Ω2 r^+ Ω1`.
    fn sts(&self, omega: &Mat<R>) -> Mat<R> {
        let id = linalg::identity::<R>(self.n);
        let o1 = omega.kronecker(&id);
        let o2 = id.kronecker(omega);
        let o12 = &o1 * &o2;
        &self.r * &o12 + &o12 * &self.r - &o1 * &self.r_minus * &o2 - &o2 * &self.r_plus * &o1
    }

    /// `r^+ Ω1 − Ω1 r^-`.
    fn mixed(&self, omega: &Mat<R>) -> Mat<R> {
        let o1 = omega.kronecker(&linalg::identity::<R>(self.n));
        &self.r_plus * &o1 - &o1 * &self.r_minus
    }

    fn group_matrix(&self, p: &PhasePoint<R>) -> Result<Mat<R>> {
        let n = self.n;
        let id = linalg::identity::<R>(n);
        let (lr, mr, rr) = (p.range(Block::Left), p.range(Block::Middle), p.range(Block::Right));
        let (om_l, g, om_r) = (p.left_matrix()?, p.g(), p.right_matrix()?);
        let gg = g.kronecker(&g);
        let g2 = id.kronecker(&g);
        let mut out = Mat::<R>::zeros(p.len(), p.len());
        let (rl, rrm) = match &self.spec {
            BracketSpec::GroupR { family, .. } => {
                let left = GroupElement::from_matrix(om_l.clone())?;
                let right = GroupElement::from_matrix(om_r.clone())?;
                let vl = self.rep_r(GroupPoint::new(family, self.l, &left)?.value())?;
                let vr = self.rep_r(GroupPoint::new(family, self.l, &right)?.value())?;
                (&self.r + vl, &self.r + vr)
            }
            _ => (self.r.clone(), self.r.clone()),
        };
        fill(&mut out, n, mr.clone(), mr.clone(), &(&rl * &gg - &gg * &rrm));
        if matches!(self.spec, BracketSpec::Sklyanin { .. }) {
            return Ok(out);
        }
        fill(&mut out, n, lr.clone(), lr.clone(), &self.sts(&om_l));
        fill(&mut out, n, lr, mr.clone(), &(self.mixed(&om_l) * &g2));
        fill(&mut out, n, rr.clone(), rr.clone(), &(-self.sts(&om_r)));
        fill(&mut out, n, rr, mr, &(&g2 * self.mixed(&om_r)));
        Ok(out)
    }

    /// `∂_k {x_i, x_j}` for every coordinate `k`, by central differences.
    pub fn derivatives(&self, p: &PhasePoint<R>, step: f64) -> Result<Vec<Mat<R>>> {
        if !(1e-7..=1e-2).contains(&step) {
            return Err(Error::Domain(format!("finite-difference step {step} outside [1e-7, 1e-2]")));
        }
        self.check_point(p)?;
        let h = Cx::new(R::lit(step), R::zero());
        let inv = Cx::new(R::lit(0.5 / step), R::zero());
        (0..p.len())
            .into_par_iter()
            .map(|k| Ok((self.matrix(&p.shifted(k, h))? - self.matrix(&p.shifted(k, -h))?) * inv))
            .collect()
    }

    /// `{x_i, {x_j, x_k}} + cycl.` with the inner brackets differentiated
    /// numerically.
    pub fn jacobi_residual_fd(&self, p: &PhasePoint<R>, i: usize, j: usize, k: usize, step: f64) -> Result<Cx<R>> {
        let m = self.matrix(p)?;
        let d = self.derivatives(p, step)?;
        for idx in [i, j, k] {
            if idx >= p.len() {
                return Err(Error::DimensionMismatch { expected: p.len(), got: idx });
            }
        }
        Ok(jacobiator_entry(&m, &d, i, j, k))
    }

    /// Jacobiator over all coordinate triples.
    pub fn jacobi_sweep(&self, p: &PhasePoint<R>, step: f64) -> Result<JacobiSweep<R>> {
        let m = self.matrix(p)?;
        let d = self.derivatives(p, step)?;
        Ok(JacobiSweep::new(&m, &d))
    }

    /// The right side of `{{g1, g2}, Ω^L_3} + cycl. = A^- Ω^L_3 g1 g2 − Ω^L_3 A^+ g1 g2`,
    /// `A^± = [R12, r^±13 + r^±23] − r^±_{ab} 𝒟^a_- R12 T^b_3`, compared with
    /// the numerical Jacobiator on (g, g, Ω^L) triples.
    pub fn mixed_jacobi(&self, p: &PhasePoint<R>, step: f64) -> Result<MixedJacobiCheck<R>> {
        let BracketSpec::GroupR { r, family } = &self.spec else {
            return Err(Error::Unsupported("the mixed Jacobi relation needs a GroupR bracket".into()));
        };
        self.check_point(p)?;
        let l = self.l;
        let n = self.n;
        let rep = l.rep().ok_or(Error::MissingRepresentation)?;
        let id = linalg::identity::<R>(n);
        let (om, g) = (p.left_matrix()?, p.g());
        let gp = GroupPoint::new(family, l, &GroupElement::from_matrix(om.clone())?)?;
        let r12 = self.rep_r(gp.value())?.kronecker(&id);
        let dminus: Vec<Mat<R>> = (0..l.dim()).map(|c| self.rep_r(&gp.dminus(&l.basis_vector(c))?)).collect::<Result<_>>()?;
        let a_term = |t: &TwoTensor<R>| -> Mat<R> {
            let mut s13_23 = Mat::<R>::zeros(n * n * n, n * n * n);
            let mut deriv = Mat::<R>::zeros(n * n * n, n * n * n);
            for a in 0..l.dim() {
                for b in 0..l.dim() {
                    let v = t.coeffs()[(a, b)];
                    if modulus(v) == R::zero() {
                        continue;
                    }
                    s13_23 += (rep[a].kronecker(&id).kronecker(&rep[b]) + id.kronecker(&rep[a]).kronecker(&rep[b])) * v;
                    deriv += dminus[a].kronecker(&rep[b]) * v;
                }
            }
            linalg::commutator(&r12, &s13_23) - deriv
        };
        let a_minus = a_term(&r_minus(l, r));
        let a_plus = a_term(&r_plus(l, r));
        let o3 = id.kronecker(&id).kronecker(&om);
        let g12 = g.kronecker(&g).kronecker(&id);
        let rhs = (&a_minus * &o3 - &o3 * &a_plus) * &g12;

        let m = self.matrix(p)?;
        let d = self.derivatives(p, step)?;
        let (mr, lr) = (p.range(Block::Middle), p.range(Block::Left));
        let nn = n * n;
        let mut lhs = Mat::<R>::zeros(n * nn, n * nn);
        for (i1, j1, i2, j2, i3, j3) in index6(n) {
            let x = mr.start + i1 * n + j1;
            let y = mr.start + i2 * n + j2;
            let z = lr.start + i3 * n + j3;
            lhs[(i1 * nn + i2 * n + i3, j1 * nn + j2 * n + j3)] = -jacobiator_entry(&m, &d, x, y, z);
        }
        Ok(MixedJacobiCheck { rhs_max: max_abs(&rhs), fd_max: max_abs(&lhs), disagreement: max_abs(&(lhs - rhs)) })
    }

    fn constraint_values(&self, p: &PhasePoint<R>, kind: ConstraintKind) -> Result<Vec<Cx<R>>> {
        let g = p.g();
        match p.case {
            Case::Linear => {
                let right = p.right_coeffs();
                let target = match kind {
                    ConstraintKind::Conjugation => {
                        let w = self.l.rep_matrix(&p.left_coeffs())?;
                        self.l.coeffs_of(&(linalg::inverse(&g)? * w * &g))?
                    }
                    ConstraintKind::Identity => p.left_coeffs(),
                };
                Ok((right - target).iter().copied().collect())
            }
            Case::Group => {
                let om_l = p.left_matrix()?;
                let target = match kind {
                    ConstraintKind::Conjugation => linalg::inverse(&g)? * om_l * &g,
                    ConstraintKind::Identity => om_l,
                };
                let mut out = Vec::new();
                flatten(&(p.right_matrix()? - target), &mut out);
                Ok(out)
            }
        }
    }

    /// `max |{Φ_α, x_j}|` over constraint components `Φ_α` and coordinates
    /// `x_j`, at a point on the constraint surface.
    pub fn constraint_compatibility(&self, p: &PhasePoint<R>, kind: ConstraintKind, step: f64) -> Result<R> {
        self.check_point(p)?;
        let phi = self.constraint_values(p, kind)?;
        let off = max_abs_iter(phi.iter());
        let scale = max_abs_iter(p.coords.iter()).max(R::one());
        if off > R::lit(1e-10) * scale {
            return Err(Error::Domain(format!("point is {:.3e} off the constraint surface", off.to_f64_lossy())));
        }
        let h = Cx::new(R::lit(step), R::zero());
        let inv = Cx::new(R::lit(0.5 / step), R::zero());
        let mut jac = Mat::<R>::zeros(phi.len(), p.len());
        for k in 0..p.len() {
            let up = self.constraint_values(&p.shifted(k, h), kind)?;
            let dn = self.constraint_values(&p.shifted(k, -h), kind)?;
            for a in 0..phi.len() {
                jac[(a, k)] = (up[a] - dn[a]) * inv;
            }
        }
        Ok(max_abs(&(jac * self.matrix(p)?)))
    }
}

fn index6(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize, usize, usize)> {
    (0..n.pow(6)).map(move |mut k| {
        let mut digit = || {
            let v = k % n;
            k /= n;
            v
        };
        let (a, b, c, d, e, f) = (digit(), digit(), digit(), digit(), digit(), digit());
        (f, e, d, c, b, a)
    })
}

fn jacobiator_entry<R: Real>(m: &Mat<R>, d: &[Mat<R>], i: usize, j: usize, k: usize) -> Cx<R> {
    let mut s = Cx::new(R::zero(), R::zero());
    for (l, dl) in d.iter().enumerate() {
        s += m[(i, l)] * dl[(j, k)] + m[(j, l)] * dl[(k, i)] + m[(k, l)] * dl[(i, j)];
    }
    s
}

/// Worst Jacobiator entry over all triples `i < j < k`.
#[derive(Debug, Clone)]
pub struct JacobiSweep<R: Real> {
    pub max_abs: R,
    pub worst: (usize, usize, usize),
    pub triples: usize,
}

impl<R: Real> JacobiSweep<R> {
    fn new(m: &Mat<R>, d: &[Mat<R>]) -> Self {
        let n = m.nrows();
        // t[(i, j·n + k)] = Σ_l {x_i, x_l} ∂_l {x_j, x_k}
        let flat = Mat::<R>::from_fn(n, n * n, |l, jk| d[l][(jk / n, jk % n)]);
        let t = m * flat;
        let mut best = (R::zero(), (0, 0, 0));
        let mut triples = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = modulus(t[(i, j * n + k)] + t[(j, k * n + i)] + t[(k, i * n + j)]);
                    triples += 1;
                    if v > best.0 {
                        best = (v, (i, j, k));
                    }
                }
            }
        }
        Self { max_abs: best.0, worst: best.1, triples }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MixedJacobiCheck<R: Real> {
    /// Max entry of the closed-form right side.
    pub rhs_max: R,
    /// Max entry of the numerical left side.
    pub fd_max: R,
    pub disagreement: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `right = g^{-1} left g`.
    Conjugation,
    /// `right = left`, which is not a Poisson submanifold.
    Identity,
}

/// Composes `p̄ · p` when `Ω̄^L = Ω^R`: the result has `Ω^R` from `p̄`,
/// `ḡ g` in the middle and `Ω^L` from `p`.
pub fn groupoid_compose<R: Real>(p_bar: &PhasePoint<R>, p: &PhasePoint<R>) -> Result<PhasePoint<R>> {
    p_bar.require(Case::Group)?;
    p.require(Case::Group)?;
    if p_bar.rep_dim != p.rep_dim {
        return Err(Error::DimensionMismatch { expected: p_bar.rep_dim, got: p.rep_dim });
    }
    let mismatch = max_abs(&(p_bar.left_matrix()? - p.right_matrix()?));
    let scale = max_abs(&p.right_matrix()?).max(R::one());
    if mismatch > R::lit(1e-10) * scale {
        return Err(Error::CompositionUndefined { mismatch: mismatch.to_f64_lossy() });
    }
    let g = p_bar.g() * p.g();
    PhasePoint::group(
        &GroupElement::from_matrix(p.left_matrix()?)?,
        &GroupElement::from_matrix(g)?,
        &GroupElement::from_matrix(p_bar.right_matrix()?)?,
    )
}

/// Where sampled phase points are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Generic,
    /// `right = g^{-1} left g`.
    Constrained,
    /// `right = left`.
    Diagonal,
}

/// A seeded phase point built from exponentials of elements of norm scale
/// `radius`; the dynamical blocks avoid the poles of `family`.
pub fn sample_phase_point<R: Real>(
    l: &LieAlgebra<R>,
    case: Case,
    family: Option<&RMatrixFamily<R>>,
    seed: u64,
    radius: f64,
    placement: Placement,
) -> Result<PhasePoint<R>> {
    let f = family.and_then(|f| f.spectral_function());
    let left = sample_admissible(l, f.as_ref(), point_seed(seed, 0), radius)?;
    let g = l.exp_elem(&l.sample_regular_semisimple(point_seed(seed, 1), radius)?)?;
    let right = sample_admissible(l, f.as_ref(), point_seed(seed, 2), radius)?;
    match case {
        Case::Linear => {
            let right = match placement {
                Placement::Generic => right,
                Placement::Diagonal => left.clone(),
                Placement::Constrained => {
                    let w = l.rep_matrix(&left)?;
                    l.coeffs_of(&(linalg::inverse(g.matrix())? * w * g.matrix()))?
                }
            };
            PhasePoint::linear(l, &left, &g, &right)
        }
        Case::Group => {
            let big_left = l.exp_elem(&left)?;
            let big_right = match placement {
                Placement::Generic => l.exp_elem(&right)?,
                Placement::Diagonal => big_left.clone(),
                Placement::Constrained => big_left.conjugated_by(&g.inverse()?)?,
            };
            PhasePoint::group(&big_left, &g, &big_right)
        }
    }
}
