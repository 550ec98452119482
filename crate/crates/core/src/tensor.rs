//! Elements of `𝒢⊗𝒢` and `𝒢⊗𝒢⊗𝒢` as dense coefficient arrays.
//!
//! A two-tensor `t = t^{ab} T_a ⊗ T_b` corresponds to the endomorphism
//! `X ↦ t^{ab} <T_b, X> T_a`, whose matrix on coefficient vectors is
//! `t · gram`. A three-tensor stores `u^{abc}` for `T_a ⊗ T_b ⊗ T_c`.

use crate::error::{Error, Result};
use crate::liealg::{matrix_unit, AlgebraKind, LieAlgebra};
use crate::scalar::{max_abs, max_abs_iter, modulus, Coeffs, Cx, Mat, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoTensor<R: Real> {
    coeffs: Mat<R>,
}

impl<R: Real> TwoTensor<R> {
    pub fn new(coeffs: Mat<R>) -> Self {
        assert!(coeffs.is_square(), "two-tensor coefficients must be square");
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: Mat::<R>::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &Mat<R> {
        &self.coeffs
    }

    pub fn transpose(&self) -> Self {
        Self { coeffs: self.coeffs.transpose() }
    }

    /// `max |t^{ab} + t^{ba}|`.
    pub fn antisymmetry_residual(&self) -> R {
        max_abs(&(&self.coeffs + self.coeffs.transpose()))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coeffs: &self.coeffs + &other.coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { coeffs: &self.coeffs - &other.coeffs }
    }

    pub fn scale(&self, s: Cx<R>) -> Self {
        Self { coeffs: &self.coeffs * s }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeTensor<R: Real> {
    n: usize,
    coeffs: Vec<Cx<R>>,
}

impl<R: Real> ThreeTensor<R> {
    pub fn zeros(n: usize) -> Self {
        Self { n, coeffs: vec![Cx::new(R::zero(), R::zero()); n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Cx<R>) -> Self {
        let mut coeffs = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    coeffs.push(f(a, b, c));
                }
            }
        }
        Self { n, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n + b) * self.n + c
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> Cx<R> {
        self.coeffs[self.idx(a, b, c)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: Cx<R>) {
        let i = self.idx(a, b, c);
        self.coeffs[i] = v;
    }

    #[inline]
    fn add_at(&mut self, a: usize, b: usize, c: usize, v: Cx<R>) {
        let i = self.idx(a, b, c);
        self.coeffs[i] += v;
    }

    pub fn as_slice(&self) -> &[Cx<R>] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: Cx<R>) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn max_abs(&self) -> R {
        max_abs_iter(&self.coeffs)
    }

    pub fn mean_abs(&self) -> R {
        if self.coeffs.is_empty() {
            return R::zero();
        }
        let s = self.coeffs.iter().fold(R::zero(), |acc, z| acc + modulus(*z));
        s / R::lit(self.coeffs.len() as f64)
    }

    /// `v[a][b][c] ↦ v[a][b][c] + v[b][c][a] + v[c][a][b]`: the sum of the
    /// images of `v` under the cyclic permutations of the tensor slots.
    pub fn cyclic_sum(&self) -> Self {
        Self::from_fn(self.n, |a, b, c| self.get(a, b, c) + self.get(b, c, a) + self.get(c, a, b))
    }

    /// Largest `|u^{abc} + u^{bac}|`, `|u^{abc} + u^{acb}|`.
    pub fn antisymmetry_residual(&self) -> R {
        let n = self.n;
        let mut worst = R::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let u = self.get(a, b, c);
                    worst = worst.max(modulus(u + self.get(b, a, c))).max(modulus(u + self.get(a, c, b)));
                }
            }
        }
        worst
    }

    /// `<u, X⊗Y⊗Z> = u^{abc} <T_a, X> <T_b, Y> <T_c, Z>`.
    pub fn contract(&self, l: &LieAlgebra<R>, x: &Coeffs<R>, y: &Coeffs<R>, z: &Coeffs<R>) -> Cx<R> {
        let (gx, gy, gz) = (l.gram() * x, l.gram() * y, l.gram() * z);
        let n = self.n;
        let mut acc = Cx::new(R::zero(), R::zero());
        for a in 0..n {
            for b in 0..n {
                let w = gx[a] * gy[b];
                for c in 0..n {
                    acc += self.get(a, b, c) * w * gz[c];
                }
            }
        }
        acc
    }
}

fn check_dim<R: Real>(l: &LieAlgebra<R>, n: usize) -> Result<()> {
    if l.dim() != n {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: n });
    }
    Ok(())
}

/// `C = T_a ⊗ T^a`; its coefficients are `gram_inv`.
pub fn casimir<R: Real>(l: &LieAlgebra<R>) -> TwoTensor<R> {
    TwoTensor::new(l.gram_inv().clone())
}

/// `f = f_ab^c T^a ⊗ T^b ⊗ T_c`, re-expressed in the `T_a⊗T_b⊗T_c` basis.
pub fn f_tensor<R: Real>(l: &LieAlgebra<R>) -> ThreeTensor<R> {
    let n = l.dim();
    let gi = l.gram_inv();
    // raise the first index, then the second
    let mut half = ThreeTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = l.f(a, b, c);
                if modulus(v) == R::zero() {
                    continue;
                }
                for p in 0..n {
                    half.add_at(p, b, c, gi[(p, a)] * v);
                }
            }
        }
    }
    let mut out = ThreeTensor::zeros(n);
    for p in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = half.get(p, b, c);
                if modulus(v) == R::zero() {
                    continue;
                }
                for q in 0..n {
                    out.add_at(p, q, c, gi[(q, b)] * v);
                }
            }
        }
    }
    out
}

/// `[r12, s13] + [r12, s23] + [r13, s23]`.
pub fn cybe_lhs<R: Real>(l: &LieAlgebra<R>, r: &TwoTensor<R>, s: &TwoTensor<R>) -> Result<ThreeTensor<R>> {
    let n = l.dim();
    check_dim(l, r.dim())?;
    check_dim(l, s.dim())?;
    let (r, s) = (r.coeffs(), s.coeffs());
    let mut out = ThreeTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let rab = r[(a, b)];
            if modulus(rab) == R::zero() {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    let w = rab * s[(c, d)];
                    if modulus(w) == R::zero() {
                        continue;
                    }
                    for e in 0..n {
                        // [T_a, T_c] in slot 1
                        out.add_at(e, b, d, w * l.f(a, c, e));
                        // [T_b, T_c] in slot 2
                        out.add_at(a, e, d, w * l.f(b, c, e));
                        // [T_b, T_d] in slot 3
                        out.add_at(a, c, e, w * l.f(b, d, e));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `[r12, r13] + cycl. + ¼ f`, which vanishes for solutions of the
/// modified classical Yang-Baxter equation.
pub fn modified_cybe_residual<R: Real>(l: &LieAlgebra<R>, r: &TwoTensor<R>) -> Result<ThreeTensor<R>> {
    check_dim(l, r.dim())?;
    check_antisymmetric(r)?;
    let lhs = cybe_lhs(l, r, r)?;
    Ok(lhs.add(&f_tensor(l).scale(Cx::new(R::lit(0.25), R::zero()))))
}

pub(crate) fn check_antisymmetric<R: Real>(r: &TwoTensor<R>) -> Result<()> {
    let res = r.antisymmetry_residual();
    let scale = max_abs(r.coeffs()).max(R::one());
    if res > R::lit(R::TIGHT_TOL) * scale {
        let n = r.dim();
        let mut at = vec![0, 0];
        let mut worst = R::zero();
        for a in 0..n {
            for b in 0..n {
                let v = modulus(r.coeffs()[(a, b)] + r.coeffs()[(b, a)]);
                if v > worst {
                    worst = v;
                    at = vec![a, b];
                }
            }
        }
        return Err(Error::InvariantViolation { invariant: "antisymmetry", max_residual: res.to_f64_lossy(), indices: at });
    }
    Ok(())
}

/// Standard constant r-matrix `½ Σ_{i<j} (E_ij ⊗ E_ji − E_ji ⊗ E_ij)` on
/// `sl(n)` or `gl(n)` built by this crate.
pub fn drinfeld_jimbo_r<R: Real>(l: &LieAlgebra<R>) -> Result<TwoTensor<R>> {
    let n = match l.kind() {
        AlgebraKind::Sl(n) | AlgebraKind::Gl(n) => n,
        AlgebraKind::Custom => {
            return Err(Error::Unsupported("the standard r-matrix needs a built-in sl(n) or gl(n)".into()))
        }
    };
    let half = Cx::new(R::lit(0.5), R::zero());
    let mut rep_sum = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            rep_sum.push((i, j));
        }
    }
    let d = l.dim();
    let mut t = Mat::<R>::zeros(d, d);
    for (i, j) in rep_sum {
        let a = l.coeffs_of(&matrix_unit::<R>(n, i, j))?;
        let b = l.coeffs_of(&matrix_unit::<R>(n, j, i))?;
        t += (&a * b.transpose() - &b * a.transpose()) * half;
    }
    Ok(TwoTensor::new(t))
}

/// `r^± = r ± ½C`.
pub fn r_plus<R: Real>(l: &LieAlgebra<R>, r: &TwoTensor<R>) -> TwoTensor<R> {
    r.add(&casimir(l).scale(Cx::new(R::lit(0.5), R::zero())))
}

pub fn r_minus<R: Real>(l: &LieAlgebra<R>, r: &TwoTensor<R>) -> TwoTensor<R> {
    r.sub(&casimir(l).scale(Cx::new(R::lit(0.5), R::zero())))
}

/// `max |(ad_x⊗1⊗1 + 1⊗ad_x⊗1 + 1⊗1⊗ad_x) u|`.
pub fn invariance_residual<R: Real>(l: &LieAlgebra<R>, u: &ThreeTensor<R>, x: &Coeffs<R>) -> Result<R> {
    check_dim(l, u.dim())?;
    let ad = l.ad(x)?;
    let n = u.dim();
    let out = ThreeTensor::from_fn(n, |a, b, c| {
        let mut acc = Cx::new(R::zero(), R::zero());
        for p in 0..n {
            acc += ad[(a, p)] * u.get(p, b, c) + ad[(b, p)] * u.get(a, p, c) + ad[(c, p)] * u.get(a, b, p);
        }
        acc
    });
    Ok(out.max_abs())
}

/// `max |(ad_x⊗1 + 1⊗ad_x) t|`.
pub fn two_tensor_invariance_residual<R: Real>(l: &LieAlgebra<R>, t: &TwoTensor<R>, x: &Coeffs<R>) -> Result<R> {
    check_dim(l, t.dim())?;
    let ad = l.ad(x)?;
    Ok(max_abs(&(&ad * t.coeffs() + t.coeffs() * ad.transpose())))
}

/// Matrix of `X ↦ t^{ab} <T_b, X> T_a` on coefficient vectors.
pub fn endo_from_two_tensor<R: Real>(l: &LieAlgebra<R>, t: &TwoTensor<R>) -> Result<Mat<R>> {
    check_dim(l, t.dim())?;
    Ok(t.coeffs() * l.gram())
}

pub fn two_tensor_from_endo<R: Real>(l: &LieAlgebra<R>, m: &Mat<R>) -> Result<TwoTensor<R>> {
    check_dim(l, m.nrows())?;
    Ok(TwoTensor::new(m * l.gram_inv()))
}

/// `max |<M X, Y> + <X, M Y>|` over basis pairs, i.e. `|G M + Mᵀ G|`.
pub fn form_antisymmetry_residual<R: Real>(l: &LieAlgebra<R>, m: &Mat<R>) -> R {
    max_abs(&(l.gram() * m + m.transpose() * l.gram()))
}

/// `Σ_d s^{kd} D_d` placed as `(D_d·gram_inv)^{ij} T_i ⊗ T_j ⊗ T_k`, then
/// summed over the three cyclic slot permutations.
///
/// With `s = gram_inv` this is `T^d_3 D_d R12 + cycl.`; with `s = r` and
/// `D_d` the derivative along `T_d` it is `T^a_3 r_ab D^b R12 + cycl.`
pub fn slot3_derivative_term<R: Real>(l: &LieAlgebra<R>, s: &TwoTensor<R>, derivs: &[Mat<R>]) -> Result<ThreeTensor<R>> {
    let n = l.dim();
    check_dim(l, s.dim())?;
    if derivs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: derivs.len() });
    }
    let coeffs: Vec<Mat<R>> = derivs.iter().map(|d| d * l.gram_inv()).collect();
    let s = s.coeffs();
    let mut p = ThreeTensor::zeros(n);
    for (d, dm) in coeffs.iter().enumerate() {
        for k in 0..n {
            let w = s[(k, d)];
            if modulus(w) == R::zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    p.add_at(i, j, k, w * dm[(i, j)]);
                }
            }
        }
    }
    Ok(p.cyclic_sum())
}

/// `u^{abc} ρ(T_a)⊗ρ(T_b)⊗ρ(T_c)` as a Kronecker-product matrix.
pub fn rep_three_tensor<R: Real>(l: &LieAlgebra<R>, u: &ThreeTensor<R>) -> Result<Mat<R>> {
    let rep = l.rep().ok_or(Error::MissingRepresentation)?;
    let k = rep[0].nrows();
    let n = u.dim();
    let mut out = Mat::<R>::zeros(k * k * k, k * k * k);
    for a in 0..n {
        for b in 0..n {
            let ab = rep[a].kronecker(&rep[b]);
            for (c, t) in rep.iter().enumerate().take(n) {
                let v = u.get(a, b, c);
                if modulus(v) == R::zero() {
                    continue;
                }
                out += ab.kronecker(t) * v;
            }
        }
    }
    Ok(out)
}

/// `t^{ab} ρ(T_a)⊗ρ(T_b)`.
pub fn rep_two_tensor<R: Real>(l: &LieAlgebra<R>, t: &TwoTensor<R>) -> Result<Mat<R>> {
    let rep = l.rep().ok_or(Error::MissingRepresentation)?;
    let k = rep[0].nrows();
    let n = t.dim();
    let mut out = Mat::<R>::zeros(k * k, k * k);
    for a in 0..n {
        for b in 0..n {
            let v = t.coeffs()[(a, b)];
            if modulus(v) == R::zero() {
                continue;
            }
            out += rep[a].kronecker(&rep[b]) * v;
        }
    }
    Ok(out)
}
