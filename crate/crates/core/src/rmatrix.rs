//! Dynamical r-matrix families as endomorphisms of the algebra, their
//! derivatives along invariant vector fields, and equivariance checks.
//!
//! Conventions for a group-case family `R` at `Ω`:
//!
//! * `dplus(X)  = ½ d/dt R(e^{tX} Ω e^{tX})`
//! * `dminus(X) =   d/dt R(e^{-tX} Ω e^{tX})`, which equals `[R, ad_X]`
//!   for equivariant families.
//!
//! For `R(e^ω) = F(ad_ω)`, `dplus(X) = DF(ad_ω)[ad_{h(ad_ω)X}]` and
//! `dminus(X) = DF(ad_ω)[ad_{[ω, X]}]`.

use crate::error::{Error, Result};
use crate::liealg::{sl_cartan_indices, sl_roots, AlgebraKind, GroupElement, LieAlgebra};
use crate::linalg::{self, diagonalize, Eigen, Frechet};
use crate::scalar::{max_abs, max_abs_iter, modulus, Coeffs, Cx, Mat, Real};
use crate::specfun::SpectralFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Linear,
    Group,
}

#[derive(Debug, Clone)]
pub enum RMatrixFamily<R: Real> {
    /// `ℛ(ω) = 𝔉_τ(ad_ω)` on the algebra.
    Canonical(Cx<R>),
    /// `R(e^ω) = F_ν(ad_ω)` on the group.
    PoissonLie(Cx<R>),
    /// `R(Ω) = ½(Ad_Ω - 1)(Ad_Ω + 1)^{-1}`, evaluated without logarithms.
    CayleyNu1,
    Zero,
    CustomSpectral { func: SpectralFunction<R>, case: Case },
    /// `Ad_q ∘ R_base(Ω) ∘ Ad_q^{-1}` for a fixed `q`: antisymmetric but not
    /// equivariant.
    Conjugated { base: Box<RMatrixFamily<R>>, q: GroupElement<R> },
}

impl<R: Real> RMatrixFamily<R> {
    pub fn canonical(tau: f64) -> Self {
        RMatrixFamily::Canonical(Cx::new(R::lit(tau), R::zero()))
    }

    pub fn poisson_lie(nu: f64) -> Self {
        RMatrixFamily::PoissonLie(Cx::new(R::lit(nu), R::zero()))
    }

    /// Whether the family is evaluated on the algebra or on the group.
    /// `Zero` works in both.
    pub fn supports(&self, case: Case) -> bool {
        match self {
            RMatrixFamily::Canonical(_) => case == Case::Linear,
            RMatrixFamily::PoissonLie(_) | RMatrixFamily::CayleyNu1 => case == Case::Group,
            RMatrixFamily::Zero => true,
            RMatrixFamily::CustomSpectral { case: c, .. } => *c == case,
            RMatrixFamily::Conjugated { base, .. } => case == Case::Group && base.supports(Case::Group),
        }
    }

    /// `μ` with `𝓘 = μ f` for the known solution families.
    pub fn mu(&self) -> Option<Cx<R>> {
        match self {
            RMatrixFamily::Canonical(tau) => Some(-(tau * tau)),
            RMatrixFamily::PoissonLie(nu) => Some(Cx::new(R::lit(0.25), R::zero()) - nu * nu),
            RMatrixFamily::CayleyNu1 => Some(Cx::new(R::lit(-0.75), R::zero())),
            RMatrixFamily::Zero => Some(Cx::new(R::zero(), R::zero())),
            RMatrixFamily::CustomSpectral { .. } => None,
            RMatrixFamily::Conjugated { base, .. } => base.mu(),
        }
    }

    /// The scalar function `F` with `R = F(ad_ω)`, if the family has one.
    pub fn spectral_function(&self) -> Option<SpectralFunction<R>> {
        match self {
            RMatrixFamily::Canonical(tau) => Some(SpectralFunction::FCan(*tau)),
            RMatrixFamily::PoissonLie(nu) => Some(SpectralFunction::FNu(*nu)),
            RMatrixFamily::CayleyNu1 => Some(SpectralFunction::f_nu(1.0)),
            RMatrixFamily::Zero => Some(SpectralFunction::Zero),
            RMatrixFamily::CustomSpectral { func, .. } => Some(func.clone()),
            RMatrixFamily::Conjugated { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            RMatrixFamily::Canonical(tau) => format!("canonical(tau={})", crate::specfun::fmt_cx(*tau)),
            RMatrixFamily::PoissonLie(nu) => format!("pl(nu={})", crate::specfun::fmt_cx(*nu)),
            RMatrixFamily::CayleyNu1 => "cayley1".into(),
            RMatrixFamily::Zero => "zero".into(),
            RMatrixFamily::CustomSpectral { func, case } => format!("custom({}, {:?})", func.label(), case),
            RMatrixFamily::Conjugated { base, .. } => format!("conjugated({})", base.label()),
        }
    }
}

fn unsupported<R: Real>(fam: &RMatrixFamily<R>, case: Case) -> Error {
    Error::Unsupported(format!("family {} is not a {:?}-case family", fam.label(), case))
}

/// `DF(A)[E]` through the eigendecomposition of `A`.
pub fn frechet_matrix_function<R: Real>(f: &SpectralFunction<R>, a: &Mat<R>, e: &Mat<R>) -> Result<Frechet<R>> {
    let eig = diagonalize(a)?;
    eig.frechet(|z| f.eval(z), |z| f.deriv(z), e)
}

/// `F(A)` through the eigendecomposition of `A`.
pub fn matrix_function<R: Real>(f: &SpectralFunction<R>, a: &Mat<R>) -> Result<Mat<R>> {
    diagonalize(a)?.apply(|z| f.eval(z))
}

/// A linear-case family evaluated at `ω`, ready for repeated derivatives.
pub struct LinearPoint<'a, R: Real> {
    l: &'a LieAlgebra<R>,
    f: SpectralFunction<R>,
    eig: Option<Eigen<R>>,
    value: Mat<R>,
}

impl<'a, R: Real> LinearPoint<'a, R> {
    pub fn new(fam: &RMatrixFamily<R>, l: &'a LieAlgebra<R>, omega: &Coeffs<R>) -> Result<Self> {
        if !fam.supports(Case::Linear) {
            return Err(unsupported(fam, Case::Linear));
        }
        let f = fam.spectral_function().expect("linear families carry a spectral function");
        let n = l.dim();
        if let SpectralFunction::Zero = f {
            l.ad(omega)?;
            return Ok(Self { l, f, eig: None, value: Mat::<R>::zeros(n, n) });
        }
        let eig = diagonalize(&l.ad(omega)?)?;
        let value = eig.apply(|z| f.eval(z))?;
        Ok(Self { l, f, eig: Some(eig), value })
    }

    pub fn value(&self) -> &Mat<R> {
        &self.value
    }

    /// `∂ℛ/∂ω^a = DF(ad_ω)[ad_{T_a}]`.
    pub fn partial(&self, a: usize) -> Result<Mat<R>> {
        self.directional(&self.l.basis_vector(a))
    }

    /// `d/dt ℛ(ω + tX)`.
    pub fn directional(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        match &self.eig {
            None => Ok(Mat::<R>::zeros(self.l.dim(), self.l.dim())),
            Some(eig) => Ok(eig.frechet(|z| self.f.eval(z), |z| self.f.deriv(z), &self.l.ad(x)?)?.value),
        }
    }

    pub fn partials(&self) -> Result<Vec<Mat<R>>> {
        (0..self.l.dim()).map(|a| self.partial(a)).collect()
    }
}

pub fn eval_r_linear<R: Real>(fam: &RMatrixFamily<R>, l: &LieAlgebra<R>, omega: &Coeffs<R>) -> Result<Mat<R>> {
    Ok(LinearPoint::new(fam, l, omega)?.value)
}

/// `d/dt ℛ(ω + t T_a)` for every basis direction.
pub fn linear_partials<R: Real>(fam: &RMatrixFamily<R>, l: &LieAlgebra<R>, omega: &Coeffs<R>) -> Result<Vec<Mat<R>>> {
    LinearPoint::new(fam, l, omega)?.partials()
}

enum GroupCache<R: Real> {
    /// `R = F(ad_ω)` with `ω = log Ω` (a representation matrix).
    Log { f: SpectralFunction<R>, omega: Mat<R>, eig: Eigen<R>, h: Mat<R> },
    /// Cayley form: `A = Ad_Ω`, `P = (A + 1)^{-1}`.
    Cayley { a: Mat<R>, p: Mat<R> },
    Zero,
    Conjugated { base: Box<GroupCache<R>>, adq: Mat<R>, adq_inv: Mat<R> },
}

impl<R: Real> GroupCache<R> {
    fn build(fam: &RMatrixFamily<R>, l: &LieAlgebra<R>, big_omega: &GroupElement<R>) -> Result<(Self, Mat<R>)> {
        let n = l.dim();
        match fam {
            RMatrixFamily::Zero => {
                let _ = l.rep().ok_or(Error::MissingRepresentation)?;
                Ok((GroupCache::Zero, Mat::<R>::zeros(n, n)))
            }
            RMatrixFamily::CayleyNu1 => {
                let a = l.big_ad(big_omega)?;
                let id = linalg::identity::<R>(n);
                let ap = &a + &id;
                if linalg::inverse_condition(&ap) < R::lit(R::TIGHT_TOL) {
                    return Err(Error::EigenvalueMinusOne);
                }
                let p = linalg::inverse(&ap)?;
                let value = (&a - &id) * &p * Cx::new(R::lit(0.5), R::zero());
                Ok((GroupCache::Cayley { a, p }, value))
            }
            RMatrixFamily::PoissonLie(_) | RMatrixFamily::CustomSpectral { .. } => {
                let f = fam.spectral_function().expect("spectral family");
                let omega = linalg::logm(big_omega.matrix())?;
                let eig = diagonalize(&l.ad_of_rep_matrix(&omega)?)?;
                let value = eig.apply(|z| f.eval(z))?;
                let hf = SpectralFunction::<R>::H;
                let h = eig.apply(|z| hf.eval(z))?;
                Ok((GroupCache::Log { f, omega, eig, h }, value))
            }
            RMatrixFamily::Conjugated { base, q } => {
                let (inner, inner_value) = GroupCache::build(base, l, big_omega)?;
                let adq = l.big_ad(q)?;
                let adq_inv = linalg::inverse(&adq)?;
                let value = &adq * inner_value * &adq_inv;
                Ok((GroupCache::Conjugated { base: Box::new(inner), adq, adq_inv }, value))
            }
            RMatrixFamily::Canonical(_) => Err(unsupported(fam, Case::Group)),
        }
    }

    fn dplus(&self, l: &LieAlgebra<R>, x: &Coeffs<R>) -> Result<Mat<R>> {
        match self {
            GroupCache::Zero => {
                l.ad(x)?;
                Ok(Mat::<R>::zeros(l.dim(), l.dim()))
            }
            GroupCache::Log { f, eig, h, .. } => {
                let dir = h * x;
                Ok(eig.frechet(|z| f.eval(z), |z| f.deriv(z), &l.ad(&dir)?)?.value)
            }
            GroupCache::Cayley { a, p } => {
                let adx = l.ad(x)?;
                let da = &adx * a + a * &adx;
                Ok(p * da * p * Cx::new(R::lit(0.5), R::zero()))
            }
            GroupCache::Conjugated { base, adq, adq_inv } => Ok(adq * base.dplus(l, x)? * adq_inv),
        }
    }

    fn dminus(&self, l: &LieAlgebra<R>, x: &Coeffs<R>) -> Result<Mat<R>> {
        match self {
            GroupCache::Zero => {
                l.ad(x)?;
                Ok(Mat::<R>::zeros(l.dim(), l.dim()))
            }
            GroupCache::Log { f, omega, eig, .. } => {
                let dir = linalg::commutator(omega, &l.rep_matrix(x)?);
                let e = l.ad_of_rep_matrix(&dir)?;
                Ok(eig.frechet(|z| f.eval(z), |z| f.deriv(z), &e)?.value)
            }
            GroupCache::Cayley { a, p } => {
                let adx = l.ad(x)?;
                let da = a * &adx - &adx * a;
                Ok(p * da * p)
            }
            GroupCache::Conjugated { base, adq, adq_inv } => Ok(adq * base.dminus(l, x)? * adq_inv),
        }
    }
}

/// A group-case family evaluated at `Ω`, ready for repeated derivatives.
pub struct GroupPoint<'a, R: Real> {
    l: &'a LieAlgebra<R>,
    cache: GroupCache<R>,
    value: Mat<R>,
}

impl<'a, R: Real> GroupPoint<'a, R> {
    pub fn new(fam: &RMatrixFamily<R>, l: &'a LieAlgebra<R>, omega: &GroupElement<R>) -> Result<Self> {
        if !fam.supports(Case::Group) {
            return Err(unsupported(fam, Case::Group));
        }
        let (cache, value) = GroupCache::build(fam, l, omega)?;
        Ok(Self { l, cache, value })
    }

    pub fn value(&self) -> &Mat<R> {
        &self.value
    }

    /// `½ 𝒟^+_X R`.
    pub fn dplus(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        self.cache.dplus(self.l, x)
    }

    /// `𝒟_-^X R = d/dt R(e^{-tX} Ω e^{tX})`.
    pub fn dminus(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        self.cache.dminus(self.l, x)
    }

    /// `[R, ad_X]`, the value of `dminus(X)` implied by equivariance.
    pub fn equivariance_commutator(&self, x: &Coeffs<R>) -> Result<Mat<R>> {
        Ok(linalg::commutator(&self.value, &self.l.ad(x)?))
    }
}

pub fn eval_r_group<R: Real>(fam: &RMatrixFamily<R>, l: &LieAlgebra<R>, omega: &GroupElement<R>) -> Result<Mat<R>> {
    Ok(GroupPoint::new(fam, l, omega)?.value)
}

/// `½ 𝒟^+_X R(Ω)`.
pub fn dplus_derivative<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
) -> Result<Mat<R>> {
    GroupPoint::new(fam, l, omega)?.dplus(x)
}

/// `½ 𝒟^+_X R` for `R(e^ω) = F(ad_ω)`, whatever closed form the family has.
/// For the Cayley family with `F = F_1` this is an independent route.
pub fn dplus_via_logarithm<R: Real>(
    f: &SpectralFunction<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
) -> Result<Mat<R>> {
    let fam = RMatrixFamily::CustomSpectral { func: f.clone(), case: Case::Group };
    GroupPoint::new(&fam, l, omega)?.dplus(x)
}

/// `𝒟_-^X R(Ω)`.
pub fn dminus_derivative<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
) -> Result<Mat<R>> {
    GroupPoint::new(fam, l, omega)?.dminus(x)
}

fn exp_rep<R: Real>(l: &LieAlgebra<R>, x: &Coeffs<R>, t: f64) -> Result<Mat<R>> {
    linalg::expm(&(l.rep_matrix(x)? * Cx::new(R::lit(t), R::zero())))
}

/// Group-side central difference of `½ d/dt R(e^{tX} Ω e^{tX})`.
pub fn dplus_group_fd<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
    step: f64,
) -> Result<Mat<R>> {
    let at = |t: f64| -> Result<Mat<R>> {
        let e = exp_rep(l, x, t)?;
        let p = GroupElement::from_matrix(&e * omega.matrix() * &e)?;
        eval_r_group(fam, l, &p)
    };
    Ok((at(step)? - at(-step)?) * Cx::new(R::lit(0.25 / step), R::zero()))
}

/// Group-side central difference of `d/dt R(e^{-tX} Ω e^{tX})`.
pub fn dminus_group_fd<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
    step: f64,
) -> Result<Mat<R>> {
    let at = |t: f64| -> Result<Mat<R>> {
        let p = GroupElement::from_matrix(exp_rep(l, x, -t)? * omega.matrix() * exp_rep(l, x, t)?)?;
        eval_r_group(fam, l, &p)
    };
    Ok((at(step)? - at(-step)?) * Cx::new(R::lit(0.5 / step), R::zero()))
}

/// `max |R(qΩq^{-1}) − Ad_q R(Ω) Ad_q^{-1}|`.
pub fn equivariance_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    q: &GroupElement<R>,
) -> Result<R> {
    let lhs = eval_r_group(fam, l, &omega.conjugated_by(q)?)?;
    let adq = l.big_ad(q)?;
    let rhs = &adq * eval_r_group(fam, l, omega)? * linalg::inverse(&adq)?;
    Ok(max_abs(&(lhs - rhs)))
}

/// `max |FD d/dt R(e^{-tX} Ω e^{tX}) − [R, ad_X]|`: the infinitesimal form of
/// equivariance, checked against a central difference with `step`.
pub fn infinitesimal_equivariance_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
    step: f64,
) -> Result<R> {
    let fd = dminus_group_fd(fam, l, omega, x, step)?;
    let comm = GroupPoint::new(fam, l, omega)?.equivariance_commutator(x)?;
    Ok(max_abs(&(fd - comm)))
}

/// Residuals of the root-space description of `R(e^ω)` and its `𝒟^+`
/// derivatives at a regular diagonal `ω` of `sl(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralActionResiduals<R: Real> {
    /// `max |R H_i|`.
    pub cartan_kernel: R,
    /// `max |R E_α − F(α(ω)) E_α|`.
    pub root_eigen: R,
    /// `𝒟^+_{E_α} R E_β = 2θ(α(ω)) (F(α(ω)+β(ω)) − F(β(ω))) [E_α, E_β]`.
    pub root_root: R,
    /// `𝒟^+_{E_α} R H_i = −2α(H_i) θ(α(ω)) F(α(ω)) E_α`.
    pub root_cartan: R,
    /// `𝒟^+_{H_i} R E_α = 2α(H_i) F'(α(ω)) E_α`.
    pub cartan_root: R,
    /// `𝒟^+_{H_i} R H_j = 0`.
    pub cartan_cartan: R,
}

impl<R: Real> SpectralActionResiduals<R> {
    pub fn max(&self) -> R {
        self.cartan_kernel
            .max(self.root_eigen)
            .max(self.root_root)
            .max(self.root_cartan)
            .max(self.cartan_root)
            .max(self.cartan_cartan)
    }
}

pub fn spectral_action_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &Coeffs<R>,
) -> Result<SpectralActionResiduals<R>> {
    let n = match l.kind() {
        AlgebraKind::Sl(n) => n,
        _ => return Err(Error::Unsupported("root-space checks need a built-in sl(n)".into())),
    };
    let f = fam
        .spectral_function()
        .ok_or_else(|| Error::Unsupported(format!("family {} has no spectral function", fam.label())))?;
    let cartan = sl_cartan_indices(n);
    let scale = max_abs_iter(omega.iter()).max(R::one());
    for (a, c) in omega.iter().enumerate() {
        if !cartan.contains(&a) && modulus(*c) > R::lit(R::TIGHT_TOL) * scale {
            return Err(Error::Domain(format!("ω has a component along the non-Cartan basis vector {a}")));
        }
    }
    let diag = l.rep_matrix(omega)?;
    let root_value = |i: usize, j: usize| diag[(i, i)] - diag[(j, j)];
    let roots = sl_roots(n);
    for &(_, i, j) in &roots {
        if modulus(root_value(i, j)) <= R::lit(R::LOOSE_TOL) * scale {
            return Err(Error::Domain("ω is not regular: a root vanishes on it".into()));
        }
    }

    let big = l.exp_elem(omega)?;
    let gp = GroupPoint::new(fam, l, &big)?;
    let r = gp.value();
    let two = Cx::new(R::lit(2.0), R::zero());
    let theta = SpectralFunction::<R>::Theta;
    // α(H_k) for H_k = E_kk − E_{k+1,k+1}
    let alpha_on_h = |i: usize, j: usize, k: usize| -> Cx<R> {
        let hk = |m: usize| -> f64 {
            if m == k {
                1.0
            } else if m == k + 1 {
                -1.0
            } else {
                0.0
            }
        };
        Cx::new(R::lit(hk(i) - hk(j)), R::zero())
    };

    let mut out = SpectralActionResiduals {
        cartan_kernel: R::zero(),
        root_eigen: R::zero(),
        root_root: R::zero(),
        root_cartan: R::zero(),
        cartan_root: R::zero(),
        cartan_cartan: R::zero(),
    };
    let vmax = |v: &Coeffs<R>| v.iter().fold(R::zero(), |acc, z| acc.max(modulus(*z)));

    for h in cartan.clone() {
        out.cartan_kernel = out.cartan_kernel.max(vmax(&(r * l.basis_vector(h))));
    }
    for &(a, i, j) in &roots {
        let e = l.basis_vector(a);
        let fa = f.eval(root_value(i, j))?;
        out.root_eigen = out.root_eigen.max(vmax(&(r * &e - &e * fa)));
    }

    let dplus: Vec<Mat<R>> = (0..l.dim()).map(|a| gp.dplus(&l.basis_vector(a)).map(|m| m * two)).collect::<Result<_>>()?;

    for &(a, i, j) in &roots {
        let alpha = root_value(i, j);
        let th = theta.eval(alpha)?;
        let fa = f.eval(alpha)?;
        let ea = l.basis_vector(a);
        for &(b, k, m) in &roots {
            let beta = root_value(k, m);
            let eb = l.basis_vector(b);
            let lhs = &dplus[a] * &eb;
            let f_sum = if modulus(alpha + beta) <= R::lit(R::LOOSE_TOL) * scale {
                Cx::new(R::zero(), R::zero())
            } else {
                f.eval(alpha + beta)?
            };
            let rhs = l.bracket(&ea, &eb)? * (two * th * (f_sum - f.eval(beta)?));
            out.root_root = out.root_root.max(vmax(&(lhs - rhs)));
        }
        for (hk, h) in cartan.clone().enumerate() {
            let lhs = &dplus[a] * l.basis_vector(h);
            let rhs = &ea * (-two * alpha_on_h(i, j, hk) * th * fa);
            out.root_cartan = out.root_cartan.max(vmax(&(lhs - rhs)));
        }
    }
    for (hk, h) in cartan.clone().enumerate() {
        for &(a, i, j) in &roots {
            let ea = l.basis_vector(a);
            let lhs = &dplus[h] * &ea;
            let rhs = &ea * (two * alpha_on_h(i, j, hk) * f.deriv(root_value(i, j))?);
            out.cartan_root = out.cartan_root.max(vmax(&(lhs - rhs)));
        }
        for h2 in cartan.clone() {
            out.cartan_cartan = out.cartan_cartan.max(vmax(&(&dplus[h] * l.basis_vector(h2))));
        }
    }
    Ok(out)
}
