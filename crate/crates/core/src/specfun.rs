//! Scalar spectral functions and the residuals of their identities.
//!
//! Every built-in function is written through the regular odd function
//! `g(w) = coth w - 1/w`, so the removable singularities at the origin never
//! cancel numerically:
//!
//! * `h(z)   = 1 + (z/2) g(z/2)`            (`= (z/2) coth(z/2)`)
//! * `θ(z)   = 1/z + g(z/2)/2`              (`= coth(z/2)/2`)
//! * `F_ν(z) = ν g(νz) - g(z/2)/2`          (`= ν coth(νz) - coth(z/2)/2`)
//! * `𝔉_τ(z) = τ g(τz)`                     (`= τ coth(τz) - 1/z`)
//! * `χ_ν(z) = 1/z + ν g(νz)`               (`= ν coth(νz)`)
//!
//! `g` uses its Bernoulli series inside the unit disc and `coth w - 1/w`
//! outside it.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{modulus, to_c64, Cx, Real};

/// `2^{2n} B_{2n} / (2n)!`, the coefficient of `w^{2n-1}` in `coth w`, n = 1..=22.
const COTH_SERIES: [f64; 22] = [
    0.3333333333333333,
    -0.022222222222222223,
    0.0021164021164021165,
    -0.00021164021164021165,
    2.1377799155576935e-05,
    -2.1644042808063972e-06,
    2.1925947851873778e-07,
    -2.2214608789979678e-08,
    2.2507846516808994e-09,
    -2.2805151204592183e-10,
    2.3106432599002624e-11,
    -2.3411706819824882e-12,
    2.3721017400233653e-13,
    -2.4034415333307705e-14,
    2.4351954029183367e-15,
    -2.4673688045172075e-16,
    2.499967277122081e-17,
    -2.532996435740635e-18,
    2.566461970282629e-19,
    -2.6003696460137274e-20,
    2.63472530441538e-21,
    -2.669534864157395e-22,
];

/// `g` and `g'` switch from series to closed form at this modulus.
pub const SERIES_CUTOFF: f64 = 1.0;

/// Arguments closer than this to a genuine pole are rejected.
pub const POLE_EXCLUSION: f64 = 1e-8;

/// Step of the central difference used for custom functions.
pub const CUSTOM_FD_STEP: f64 = 1e-6;

fn czero<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::zero())
}

fn creal<R: Real>(x: f64) -> Cx<R> {
    Complex::new(R::lit(x), R::zero())
}

/// `e^z - 1` without cancellation near `z = 0`.
pub fn expm1<R: Real>(z: Cx<R>) -> Cx<R> {
    let (a, b) = (z.re, z.im);
    let half_sin = (b * R::lit(0.5)).sin();
    let two = R::lit(2.0);
    let re = a.exp_m1() * b.cos() - two * half_sin * half_sin;
    let im = a.exp() * b.sin();
    Complex::new(re, im)
}

/// `coth z`, stable for large `|Re z|`; infinite at the poles `iπk`.
pub fn coth<R: Real>(z: Cx<R>) -> Cx<R> {
    if z.re < R::zero() {
        return -coth(-z);
    }
    let em = expm1(z * creal::<R>(-2.0));
    -(em + creal::<R>(2.0)) / em
}

fn series_g<R: Real>(w: Cx<R>) -> Cx<R> {
    let w2 = w * w;
    let mut acc = czero::<R>();
    for c in COTH_SERIES.iter().rev() {
        acc = acc * w2 + creal::<R>(*c);
    }
    acc * w
}

fn series_dg<R: Real>(w: Cx<R>) -> Cx<R> {
    let w2 = w * w;
    let mut acc = czero::<R>();
    for (k, c) in COTH_SERIES.iter().enumerate().rev() {
        acc = acc * w2 + creal::<R>(*c * (2 * k + 1) as f64);
    }
    acc
}

fn closed_g<R: Real>(w: Cx<R>) -> Cx<R> {
    coth(w) - w.inv()
}

fn closed_dg<R: Real>(w: Cx<R>) -> Cx<R> {
    let c = coth(w);
    creal::<R>(1.0) - c * c + (w * w).inv()
}

/// `g(w) = coth w - 1/w`, `g(0) = 0`.
pub fn coth_minus_inv<R: Real>(w: Cx<R>) -> Cx<R> {
    if modulus(w) < R::lit(SERIES_CUTOFF) {
        series_g(w)
    } else {
        closed_g(w)
    }
}

/// `g'(w) = 1 - coth² w + 1/w²`, `g'(0) = 1/3`.
pub fn coth_minus_inv_deriv<R: Real>(w: Cx<R>) -> Cx<R> {
    if modulus(w) < R::lit(SERIES_CUTOFF) {
        series_dg(w)
    } else {
        closed_dg(w)
    }
}

/// Both evaluation paths of `g`, exposed for agreement checks at the switch.
pub fn coth_minus_inv_paths<R: Real>(w: Cx<R>) -> (Cx<R>, Cx<R>) {
    (series_g(w), closed_g(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    None,
}

type ScalarFn<R> = Arc<dyn Fn(Cx<R>) -> Cx<R> + Send + Sync>;

/// A user-supplied holomorphic function with declared properties.
#[derive(Clone)]
pub struct CustomFn<R: Real> {
    pub name: String,
    pub func: ScalarFn<R>,
    pub parity: Parity,
    pub regular_at_zero: bool,
}

impl<R: Real> fmt::Debug for CustomFn<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("parity", &self.parity)
            .field("regular_at_zero", &self.regular_at_zero)
            .finish()
    }
}

impl<R: Real> CustomFn<R> {
    pub fn new(
        name: impl Into<String>,
        parity: Parity,
        regular_at_zero: bool,
        func: impl Fn(Cx<R>) -> Cx<R> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), func: Arc::new(func), parity, regular_at_zero }
    }

    /// Odd polynomial `Σ_k c_k z^{2k+1}`.
    pub fn odd_polynomial(coeffs: Vec<Cx<R>>) -> Self {
        let name = format!("odd polynomial of degree {}", 2 * coeffs.len().max(1) - 1);
        Self::new(name, Parity::Odd, true, move |z| {
            let z2 = z * z;
            let mut acc = Complex::new(R::zero(), R::zero());
            for c in coeffs.iter().rev() {
                acc = acc * z2 + c;
            }
            acc * z
        })
    }
}

/// The scalar functions that generate the r-matrix families.
#[derive(Debug, Clone)]
pub enum SpectralFunction<R: Real> {
    /// `F_ν(z) = ν coth(νz) - ½ coth(½z)`.
    FNu(Cx<R>),
    /// `𝔉_τ(z) = τ coth(τz) - 1/z`.
    FCan(Cx<R>),
    /// `θ(z) = ½ coth(½z)`.
    Theta,
    /// `h(z) = ½z coth(½z)`.
    H,
    /// `χ_ν(z) = ν coth(νz)`.
    Chi(Cx<R>),
    Zero,
    /// `base(z) + eps·z³`: an odd perturbation that keeps `F(0) = 0`.
    Perturbed { base: Box<SpectralFunction<R>>, eps: Cx<R> },
    Custom(CustomFn<R>),
}

impl<R: Real> SpectralFunction<R> {
    pub fn f_nu(nu: f64) -> Self {
        SpectralFunction::FNu(creal(nu))
    }

    pub fn f_can(tau: f64) -> Self {
        SpectralFunction::FCan(creal(tau))
    }

    pub fn perturbed(self, eps: f64) -> Self {
        SpectralFunction::Perturbed { base: Box::new(self), eps: creal(eps) }
    }

    /// `μ = ¼ - ν²` for `F_ν`.
    pub fn mu(&self) -> Option<Cx<R>> {
        match self {
            SpectralFunction::FNu(nu) => Some(creal::<R>(0.25) - nu * nu),
            SpectralFunction::Zero => Some(czero()),
            _ => None,
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            SpectralFunction::FNu(_)
            | SpectralFunction::FCan(_)
            | SpectralFunction::Theta
            | SpectralFunction::Chi(_)
            | SpectralFunction::Zero => Parity::Odd,
            SpectralFunction::H => Parity::Even,
            SpectralFunction::Perturbed { base, .. } => base.parity(),
            SpectralFunction::Custom(c) => c.parity,
        }
    }

    /// Nearest genuine pole and its distance from `z` (`None` if the function is entire).
    pub fn nearest_pole(&self, z: Cx<R>) -> Option<(Cx<R>, R)> {
        let two_pi_i = Complex::new(R::zero(), R::two_pi());
        let pi_i = Complex::new(R::zero(), R::pi());
        match self {
            SpectralFunction::FNu(nu) => {
                let mut cands = Vec::new();
                if !is_zero(*nu) {
                    cands.extend(lattice_candidates(z, pi_i / nu, false));
                }
                cands.extend(lattice_candidates(z, two_pi_i, false));
                // where the two lattices meet the residues (both 1) cancel
                let genuine = cands.into_iter().filter(|p| {
                    let on_half = on_lattice(*p, two_pi_i);
                    let on_nu = !is_zero(*nu) && on_lattice(*p, pi_i / nu);
                    !(on_half && on_nu)
                });
                closest(z, genuine)
            }
            SpectralFunction::FCan(tau) => {
                if is_zero(*tau) {
                    None
                } else {
                    closest(z, lattice_candidates(z, pi_i / tau, false))
                }
            }
            SpectralFunction::Theta => closest(z, lattice_candidates(z, two_pi_i, true)),
            SpectralFunction::H => closest(z, lattice_candidates(z, two_pi_i, false)),
            SpectralFunction::Chi(nu) => {
                if is_zero(*nu) {
                    closest(z, std::iter::once(czero()))
                } else {
                    closest(z, lattice_candidates(z, pi_i / nu, true))
                }
            }
            SpectralFunction::Zero => None,
            SpectralFunction::Perturbed { base, .. } => base.nearest_pole(z),
            SpectralFunction::Custom(c) => {
                if c.regular_at_zero {
                    None
                } else {
                    closest(z, std::iter::once(czero()))
                }
            }
        }
    }

    pub fn pole_distance(&self, z: Cx<R>) -> R {
        self.nearest_pole(z).map(|(_, d)| d).unwrap_or_else(R::infinity)
    }

    fn check_poles(&self, z: Cx<R>) -> Result<()> {
        if let Some((p, d)) = self.nearest_pole(z) {
            if d <= R::lit(POLE_EXCLUSION) {
                let (zc, pc) = (to_c64(z), to_c64(p));
                return Err(Error::PoleProximity {
                    z_re: zc.re,
                    z_im: zc.im,
                    pole_re: pc.re,
                    pole_im: pc.im,
                    distance: d.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Cx<R>) -> Result<Cx<R>> {
        self.check_poles(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: Cx<R>) -> Cx<R> {
        let half = creal::<R>(0.5);
        match self {
            SpectralFunction::FNu(nu) => nu * coth_minus_inv(nu * z) - coth_minus_inv(z * half) * half,
            SpectralFunction::FCan(tau) => tau * coth_minus_inv(tau * z),
            SpectralFunction::Theta => z.inv() + coth_minus_inv(z * half) * half,
            SpectralFunction::H => creal::<R>(1.0) + z * half * coth_minus_inv(z * half),
            SpectralFunction::Chi(nu) => z.inv() + nu * coth_minus_inv(nu * z),
            SpectralFunction::Zero => czero(),
            SpectralFunction::Perturbed { base, eps } => base.eval_unchecked(z) + eps * z * z * z,
            SpectralFunction::Custom(c) => (c.func)(z),
        }
    }

    /// First derivative; analytic for built-in kinds, central differences
    /// with step [`CUSTOM_FD_STEP`] for custom functions.
    pub fn deriv(&self, z: Cx<R>) -> Result<Cx<R>> {
        self.check_poles(z)?;
        Ok(self.deriv_unchecked(z))
    }

    fn deriv_unchecked(&self, z: Cx<R>) -> Cx<R> {
        let half = creal::<R>(0.5);
        let quarter = creal::<R>(0.25);
        match self {
            SpectralFunction::FNu(nu) => nu * nu * coth_minus_inv_deriv(nu * z) - coth_minus_inv_deriv(z * half) * quarter,
            SpectralFunction::FCan(tau) => tau * tau * coth_minus_inv_deriv(tau * z),
            SpectralFunction::Theta => -(z * z).inv() + coth_minus_inv_deriv(z * half) * quarter,
            SpectralFunction::H => coth_minus_inv(z * half) * half + z * quarter * coth_minus_inv_deriv(z * half),
            SpectralFunction::Chi(nu) => -(z * z).inv() + nu * nu * coth_minus_inv_deriv(nu * z),
            SpectralFunction::Zero => czero(),
            SpectralFunction::Perturbed { base, eps } => base.deriv_unchecked(z) + eps * creal::<R>(3.0) * z * z,
            SpectralFunction::Custom(c) => {
                let h = creal::<R>(CUSTOM_FD_STEP);
                ((c.func)(z + h) - (c.func)(z - h)) / (h * creal::<R>(2.0))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpectralFunction::FNu(nu) => format!("F_nu(nu={})", fmt_cx(*nu)),
            SpectralFunction::FCan(tau) => format!("F_can(tau={})", fmt_cx(*tau)),
            SpectralFunction::Theta => "theta".into(),
            SpectralFunction::H => "h".into(),
            SpectralFunction::Chi(nu) => format!("chi(nu={})", fmt_cx(*nu)),
            SpectralFunction::Zero => "zero".into(),
            SpectralFunction::Perturbed { base, eps } => format!("{} + {}*z^3", base.label(), fmt_cx(*eps)),
            SpectralFunction::Custom(c) => format!("custom({})", c.name),
        }
    }
}

pub(crate) fn fmt_cx<R: Real>(z: Cx<R>) -> String {
    let c = to_c64(z);
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

fn is_zero<R: Real>(z: Cx<R>) -> bool {
    z.re == R::zero() && z.im == R::zero()
}

/// Lattice points `k·step` nearest to `z`, a few on each side of the projection.
fn lattice_candidates<R: Real>(z: Cx<R>, step: Cx<R>, include_zero: bool) -> Vec<Cx<R>> {
    let s2 = step.re * step.re + step.im * step.im;
    let t = ((z * step.conj()).re / s2).to_f64_lossy();
    let base = t.floor() as i64;
    (base - 3..=base + 4)
        .filter(|k| include_zero || *k != 0)
        .map(|k| step * creal::<R>(k as f64))
        .collect()
}

fn on_lattice<R: Real>(p: Cx<R>, step: Cx<R>) -> bool {
    let q = to_c64(p / step);
    let k = q.re.round();
    (q.re - k).abs() < 1e-9 && q.im.abs() < 1e-9 && k != 0.0
}

fn closest<R: Real>(z: Cx<R>, cands: impl IntoIterator<Item = Cx<R>>) -> Option<(Cx<R>, R)> {
    cands
        .into_iter()
        .map(|p| (p, modulus(z - p)))
        .fold(None, |best, (p, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((p, d)),
        })
}

/// `F'(z) + 2θ(z)F(z) + F(z)² + μ`.
pub fn riccati_residual<R: Real>(f: &SpectralFunction<R>, z: Cx<R>, mu: Cx<R>) -> Result<Cx<R>> {
    let theta = SpectralFunction::<R>::Theta.eval(z)?;
    let fz = f.eval(z)?;
    let dfz = f.deriv(z)?;
    Ok(dfz + creal::<R>(2.0) * theta * fz + fz * fz + mu)
}

/// Left side minus right side of the functional equation obtained from the
/// root-vector triples `(E_α, E_β, E_{-α-β})`.
pub fn addition_law_residual<R: Real>(f: &SpectralFunction<R>, z: Cx<R>, w: Cx<R>, mu: Cx<R>) -> Result<Cx<R>> {
    let s = z + w;
    let scale = modulus(z).max(modulus(w)).max(R::one());
    if modulus(s) <= R::lit(R::TIGHT_TOL) * scale {
        return Err(Error::Domain("z + w = 0 is excluded from the functional equation".into()));
    }
    let theta = SpectralFunction::<R>::Theta;
    let (fz, fw, fs) = (f.eval(z)?, f.eval(w)?, f.eval(s)?);
    let (tz, tw, ts) = (theta.eval(z)?, theta.eval(w)?, theta.eval(s)?);
    Ok(fz * fw - fs * (fz + fw) - tz * (fs - fw) - tw * (fs - fz) - ts * (fz + fw) - mu)
}

/// Residuals of the scalar identities that drive the solution of the ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarIdentityResiduals<R: Real> {
    /// `θ² + θ' - ¼` at `z`.
    pub theta_riccati: Cx<R>,
    /// `coth z coth w - coth(z+w)(coth z + coth w) + 1`.
    pub coth_addition: Cx<R>,
    /// `χ' + χ² - ν²` at `z` for `χ = ν coth(νz)`.
    pub chi_riccati: Cx<R>,
    /// `lim_{z→0} z χ(z) - 1`, Richardson-extrapolated from `z = 10⁻³`
    /// and `z = 5·10⁻⁴` so the `O(z²)` approach term cancels.
    pub chi_limit: Cx<R>,
}

impl<R: Real> ScalarIdentityResiduals<R> {
    pub fn max_abs(&self) -> R {
        [self.theta_riccati, self.coth_addition, self.chi_riccati, self.chi_limit]
            .iter()
            .fold(R::zero(), |acc, z| acc.max(modulus(*z)))
    }
}

pub fn scalar_identity_residuals<R: Real>(z: Cx<R>, w: Cx<R>, nu: Cx<R>) -> Result<ScalarIdentityResiduals<R>> {
    let theta = SpectralFunction::<R>::Theta;
    let t = theta.eval(z)?;
    let theta_riccati = t * t + theta.deriv(z)? - creal::<R>(0.25);

    let pi_i = Complex::new(R::zero(), R::pi());
    for arg in [z, w, z + w] {
        if let Some((p, d)) = closest(arg, lattice_candidates(arg, pi_i, true)) {
            if d <= R::lit(POLE_EXCLUSION) {
                let (ac, pc) = (to_c64(arg), to_c64(p));
                return Err(Error::PoleProximity { z_re: ac.re, z_im: ac.im, pole_re: pc.re, pole_im: pc.im, distance: d.to_f64_lossy() });
            }
        }
    }
    let (cz, cw, cs) = (coth(z), coth(w), coth(z + w));
    let coth_addition = cz * cw - cs * (cz + cw) + creal::<R>(1.0);

    let chi = SpectralFunction::Chi(nu);
    let c = chi.eval(z)?;
    let chi_riccati = chi.deriv(z)? + c * c - nu * nu;

    let z1 = creal::<R>(1e-3);
    let z2 = creal::<R>(5e-4);
    let l1 = z1 * chi.eval(z1)?;
    let l2 = z2 * chi.eval(z2)?;
    let chi_limit = (l2 * creal::<R>(4.0) - l1) / creal::<R>(3.0) - creal::<R>(1.0);

    Ok(ScalarIdentityResiduals { theta_riccati, coth_addition, chi_riccati, chi_limit })
}

/// Max of `|F(-z) + F(z)|` over `zs` for functions declared odd.
pub fn oddness_residual<R: Real>(f: &SpectralFunction<R>, zs: &[Cx<R>]) -> Result<R> {
    let mut worst = R::zero();
    for z in zs {
        worst = worst.max(modulus(f.eval(-*z)? + f.eval(*z)?));
    }
    Ok(worst)
}
