//! Dense complex linear algebra for small matrices: exponential, principal
//! logarithm, diagonalization, analytic matrix functions and their Fréchet
//! derivatives.

use nalgebra::{Schur, SVD};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{max_abs, modulus, to_c64, Cx, Mat, Real};

pub fn identity<R: Real>(n: usize) -> Mat<R> {
    Mat::<R>::identity(n, n)
}

pub fn zeros<R: Real>(n: usize, m: usize) -> Mat<R> {
    Mat::<R>::zeros(n, m)
}

/// Maximum absolute column sum.
pub fn norm1<R: Real>(m: &Mat<R>) -> R {
    let mut best = R::zero();
    for col in m.column_iter() {
        let s = col.iter().fold(R::zero(), |acc, z| acc + modulus(*z));
        best = best.max(s);
    }
    best
}

pub fn inverse<R: Real>(m: &Mat<R>) -> Result<Mat<R>> {
    m.clone().try_inverse().ok_or(Error::Singular)
}

/// Commutator `ab - ba`.
pub fn commutator<R: Real>(a: &Mat<R>, b: &Mat<R>) -> Mat<R> {
    a * b - b * a
}

/// Smallest singular value divided by the largest.
pub fn inverse_condition<R: Real>(m: &Mat<R>) -> R {
    let svd = SVD::new(m.clone(), false, false);
    let sv = &svd.singular_values;
    if sv.is_empty() {
        return R::one();
    }
    let (mut lo, mut hi) = (sv[0], sv[0]);
    for s in sv.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    if hi == R::zero() {
        R::zero()
    } else {
        lo / hi
    }
}

fn schur_eigenvalues<R: Real>(a: &Mat<R>) -> Result<Vec<Cx<R>>> {
    let schur = Schur::try_new(a.clone(), R::lit(R::EPSILON), 10_000).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues<R: Real>(a: &Mat<R>) -> Result<Vec<Cx<R>>> {
    schur_eigenvalues(a)
}

const PADE_DEGREE: usize = 8;

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant
/// of degree 8, applied once the scaled norm is at most 1/2.
pub fn expm<R: Real>(a: &Mat<R>) -> Result<Mat<R>> {
    let n = a.nrows();
    let nrm = norm1(a).to_f64_lossy();
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = R::lit(2f64.powi(-s));
    let x = a * Cx::new(scale, R::zero());

    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
    let q = PADE_DEGREE;
    let mut coeffs = vec![1.0f64; q + 1];
    for k in 1..=q {
        coeffs[k] = coeffs[k - 1] * ((q - k + 1) as f64) / (((2 * q - k + 1) * k) as f64);
    }
    let mut num = identity::<R>(n) * Cx::new(R::lit(coeffs[0]), R::zero());
    let mut den = num.clone();
    let mut power = identity::<R>(n);
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = &power * Cx::new(R::lit(*c), R::zero());
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }
    let mut e = den.lu().solve(&num).ok_or(Error::Singular)?;
    for _ in 0..s {
        e = &e * &e;
    }
    Ok(e)
}

/// Principal square root by the Denman-Beavers iteration.
pub fn sqrtm<R: Real>(a: &Mat<R>) -> Result<Mat<R>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity::<R>(n);
    let half = Cx::new(R::lit(0.5), R::zero());
    let tol = R::lit(R::EPSILON * 10.0);
    for _ in 0..100 {
        let yi = inverse(&y)?;
        let zi = inverse(&z)?;
        let y_next = (&y + &zi) * half;
        let z_next = (&z + &yi) * half;
        let delta = max_abs(&(&y_next - &y));
        let scale = max_abs(&y_next).max(R::one());
        y = y_next;
        z = z_next;
        if delta <= tol * scale {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence)
}

/// Rejects matrices with an eigenvalue on the closed negative real axis.
pub fn check_principal_branch<R: Real>(a: &Mat<R>) -> Result<()> {
    let scale = max_abs(a).max(R::one());
    for lam in schur_eigenvalues(a)? {
        let m = modulus(lam);
        let on_cut = lam.re <= R::zero() && lam.im.abs() <= R::lit(R::TIGHT_TOL) * m;
        if m <= R::lit(R::TIGHT_TOL) * scale || on_cut {
            let c = to_c64(lam);
            return Err(Error::BranchCut { re: c.re, im: c.im });
        }
    }
    Ok(())
}

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// square roots until the matrix is within 1/4 of the identity, then the
/// series `log X = 2 atanh((X - I)(X + I)^{-1})`.
pub fn logm<R: Real>(a: &Mat<R>) -> Result<Mat<R>> {
    check_principal_branch(a)?;
    let n = a.nrows();
    let id = identity::<R>(n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while norm1(&(&x - &id)) > R::lit(0.25) {
        if roots > 60 {
            return Err(Error::NoConvergence);
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    let s = (&x + &id).lu().solve(&(&x - &id)).ok_or(Error::Singular)?;
    let s2 = &s * &s;
    let mut term = s.clone();
    let mut acc = s.clone();
    for k in 1..40 {
        term = &term * &s2;
        acc += &term * Cx::new(R::one() / R::lit((2 * k + 1) as f64), R::zero());
        if max_abs(&term) < R::lit(R::EPSILON) * R::lit(1e-4) {
            break;
        }
    }
    Ok(acc * Cx::new(R::lit(2f64.powi(roots as i32 + 1)), R::zero()))
}

/// Eigendecomposition `A = V diag(values) V^{-1}` of a diagonalizable matrix.
///
/// Eigenvalues closer than `CLUSTER_TOL * max(1, |A|)` are merged and share
/// their mean; each cluster's eigenvectors span the numerical null space of
/// `A - mean`, so semisimple repeated eigenvalues (the Cartan kernel of an
/// adjoint map) are handled without back substitution.
#[derive(Debug, Clone)]
pub struct Eigen<R: Real> {
    pub values: Vec<Cx<R>>,
    pub vectors: Mat<R>,
    pub inverse: Mat<R>,
}

pub fn diagonalize<R: Real>(a: &Mat<R>) -> Result<Eigen<R>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: zeros(0, 0), inverse: zeros(0, 0) });
    }
    let scale = max_abs(a).max(R::one());
    let raw = schur_eigenvalues(a)?;
    let cluster_tol = R::lit(R::CLUSTER_TOL) * scale;

    // Greedy clustering; each cluster keeps its members.
    let mut clusters: Vec<Vec<Cx<R>>> = Vec::new();
    for lam in raw {
        match clusters.iter_mut().find(|c| modulus(lam - mean(c)) <= cluster_tol) {
            Some(c) => c.push(lam),
            None => clusters.push(vec![lam]),
        }
    }

    let mut values = Vec::with_capacity(n);
    let mut vectors = zeros::<R>(n, n);
    let mut col = 0;
    for members in &clusters {
        let mu = mean(members);
        let m = members.len();
        let spread = members.iter().fold(R::zero(), |acc, z| acc.max(modulus(*z - mu)));
        let shifted = a - identity::<R>(n) * mu;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd.v_t.as_ref().ok_or(Error::NoConvergence)?;
        let sv = &svd.singular_values;
        // Sorted descending: the last m singular values span the null space.
        let null_tol = (R::lit(R::LOOSE_TOL * 0.1) * scale).max(spread * R::lit(10.0));
        if sv[n - m] > null_tol {
            let c = to_c64(mu);
            return Err(Error::NotDiagonalizable { re: c.re, im: c.im });
        }
        for k in (n - m)..n {
            for i in 0..n {
                vectors[(i, col)] = v_t[(k, i)].conj();
            }
            values.push(mu);
            col += 1;
        }
    }
    let inv = inverse(&vectors).map_err(|_| {
        let c = to_c64(values[0]);
        Error::NotDiagonalizable { re: c.re, im: c.im }
    })?;
    let cond = max_abs(&vectors) * max_abs(&inv);
    if cond > R::lit(1e12).min(R::one() / R::lit(R::EPSILON * 1e4)) {
        let c = to_c64(values[0]);
        return Err(Error::NotDiagonalizable { re: c.re, im: c.im });
    }
    Ok(Eigen { values, vectors, inverse: inv })
}

fn mean<R: Real>(zs: &[Cx<R>]) -> Cx<R> {
    let s = zs.iter().fold(Complex::new(R::zero(), R::zero()), |acc, z| acc + z);
    s / Cx::new(R::lit(zs.len() as f64), R::zero())
}

/// Eigenvalue pairs closer than this use the derivative at their midpoint
/// in place of a divided difference.
pub const COINCIDENCE_TOL: f64 = 1e-8;

impl<R: Real> Eigen<R> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) V^{-1}`.
    pub fn apply<F>(&self, f: F) -> Result<Mat<R>>
    where
        F: Fn(Cx<R>) -> Result<Cx<R>>,
    {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        let mut cache: Vec<(Cx<R>, Cx<R>)> = Vec::new();
        for j in 0..n {
            let lam = self.values[j];
            let fl = match cache.iter().find(|(l, _)| *l == lam) {
                Some((_, v)) => *v,
                None => {
                    let v = f(lam)?;
                    cache.push((lam, v));
                    v
                }
            };
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        Ok(scaled * &self.inverse)
    }

    /// Fréchet derivative `d/dt f(A + tE)` at `t = 0`.
    ///
    /// Equals the (1,2) block of `f([[A, E], [0, A]])`; evaluated in the
    /// eigenbasis of `A` as the Hadamard product of `V^{-1} E V` with the
    /// divided-difference matrix `f[λ_i, λ_j]`.
    pub fn frechet<F, D>(&self, f: F, df: D, e: &Mat<R>) -> Result<Frechet<R>>
    where
        F: Fn(Cx<R>) -> Result<Cx<R>>,
        D: Fn(Cx<R>) -> Result<Cx<R>>,
    {
        let n = self.dim();
        if e.nrows() != n || e.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: e.nrows() });
        }
        let fv: Vec<Cx<R>> = self.values.iter().map(|l| f(*l)).collect::<Result<_>>()?;
        let mut e_eig = &self.inverse * e * &self.vectors;
        let tol = R::lit(COINCIDENCE_TOL);
        let half = Cx::new(R::lit(0.5), R::zero());
        let mut near_coincident = 0usize;
        let mut dcache: Vec<(Cx<R>, Cx<R>)> = Vec::new();
        let mut deriv = |z: Cx<R>| -> Result<Cx<R>> {
            if let Some((_, v)) = dcache.iter().find(|(l, _)| *l == z) {
                return Ok(*v);
            }
            let v = df(z)?;
            dcache.push((z, v));
            Ok(v)
        };
        for i in 0..n {
            for j in 0..n {
                let (li, lj) = (self.values[i], self.values[j]);
                let gap = li - lj;
                let dd = if li == lj {
                    deriv(li)?
                } else if modulus(gap) < tol {
                    near_coincident += 1;
                    deriv((li + lj) * half)?
                } else {
                    (fv[i] - fv[j]) / gap
                };
                e_eig[(i, j)] *= dd;
            }
        }
        Ok(Frechet {
            value: &self.vectors * e_eig * &self.inverse,
            near_coincident_pairs: near_coincident,
        })
    }
}

/// Fréchet derivative together with the number of eigenvalue pairs that
/// needed the midpoint-derivative fallback.
#[derive(Debug, Clone)]
pub struct Frechet<R: Real> {
    pub value: Mat<R>,
    pub near_coincident_pairs: usize,
}

/// Least-squares coordinates of `y` in the span of the columns of `basis`,
/// with the max-norm residual of the reconstruction.
#[derive(Debug, Clone)]
pub struct SpanSolver<R: Real> {
    basis: Mat<R>,
    pinv: Mat<R>,
}

impl<R: Real> SpanSolver<R> {
    pub fn new(basis: Mat<R>) -> Result<Self> {
        let gram = basis.adjoint() * &basis;
        let pinv = inverse(&gram)? * basis.adjoint();
        Ok(Self { basis, pinv })
    }

    pub fn solve(&self, y: &nalgebra::DVector<Cx<R>>) -> (nalgebra::DVector<Cx<R>>, R) {
        let c = &self.pinv * y;
        let back = &self.basis * &c;
        let res = (back - y).iter().fold(R::zero(), |acc, z| acc.max(modulus(*z)));
        (c, res)
    }
}
