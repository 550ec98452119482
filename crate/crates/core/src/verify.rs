//! Tensor-valued residuals of the dynamical Yang-Baxter equations and the
//! summaries that aggregate them over sampled points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{GroupElement, LieAlgebra};
use crate::rmatrix::{GroupPoint, LinearPoint, RMatrixFamily};
use crate::scalar::{modulus, Coeffs, Cx, Mat, Real};
use crate::specfun::{riccati_residual, SpectralFunction};
use crate::tensor::{casimir, cybe_lhs, f_tensor, slot3_derivative_term, two_tensor_from_endo, ThreeTensor, TwoTensor};

/// Number of worst points kept in a summary.
pub const DIAGNOSTIC_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointResidual {
    pub seed: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub check_name: String,
    pub points_evaluated: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The worst points, largest residual first.
    pub diagnostics: Vec<PointResidual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ResidualSummary {
    /// Summarizes per-point residuals; panics on an empty list.
    pub fn from_points(name: impl Into<String>, tolerance: f64, points: &[PointResidual]) -> Self {
        assert!(!points.is_empty(), "a summary needs at least one point");
        let max_abs = points.iter().fold(0.0f64, |m, p| m.max(p.residual));
        let nan = points.iter().any(|p| p.residual.is_nan());
        let mean_abs = points.iter().map(|p| p.residual).sum::<f64>() / points.len() as f64;
        let mut worst = points.to_vec();
        worst.sort_by(|a, b| b.residual.total_cmp(&a.residual).then(a.seed.cmp(&b.seed)));
        worst.truncate(DIAGNOSTIC_POINTS);
        let max_abs = if nan { f64::MAX } else { max_abs };
        Self {
            check_name: name.into(),
            points_evaluated: points.len(),
            max_abs,
            mean_abs: if nan { f64::MAX } else { mean_abs },
            tolerance,
            passed: max_abs <= tolerance,
            diagnostics: worst,
            error: None,
            notes: Vec::new(),
        }
    }

    /// A failed summary for a check that could not be evaluated. The
    /// residual fields are set to `f64::MAX`.
    pub fn failed(name: impl Into<String>, tolerance: f64, points_evaluated: usize, error: impl Into<String>) -> Self {
        Self {
            check_name: name.into(),
            points_evaluated: points_evaluated.max(1),
            max_abs: f64::MAX,
            mean_abs: f64::MAX,
            tolerance,
            passed: false,
            diagnostics: Vec::new(),
            error: Some(error.into()),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Residual of a linear-case family against `𝓘`:
/// `[ℛ12, ℛ13] + T^a_3 ∂_a ℛ12 + cycl. − 𝓘`.
pub fn cdybe_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &Coeffs<R>,
    inv: &ThreeTensor<R>,
) -> Result<ThreeTensor<R>> {
    let point = LinearPoint::new(fam, l, omega)?;
    let rt = two_tensor_from_endo(l, point.value())?;
    let lhs = cybe_lhs(l, &rt, &rt)?.add(&slot3_derivative_term(l, &casimir(l), &point.partials()?)?);
    Ok(lhs.sub(inv))
}

fn all_dplus<R: Real>(gp: &GroupPoint<'_, R>, l: &LieAlgebra<R>) -> Result<Vec<Mat<R>>> {
    (0..l.dim()).map(|a| gp.dplus(&l.basis_vector(a))).collect()
}

/// `[R12, R13] + ½ T^a_3 𝒟^+_a R12 + cycl.`
pub fn pl_cdybe_lhs<R: Real>(fam: &RMatrixFamily<R>, l: &LieAlgebra<R>, omega: &GroupElement<R>) -> Result<ThreeTensor<R>> {
    let gp = GroupPoint::new(fam, l, omega)?;
    pl_cdybe_lhs_at(&gp, l)
}

fn pl_cdybe_lhs_at<R: Real>(gp: &GroupPoint<'_, R>, l: &LieAlgebra<R>) -> Result<ThreeTensor<R>> {
    let rt = two_tensor_from_endo(l, gp.value())?;
    Ok(cybe_lhs(l, &rt, &rt)?.add(&slot3_derivative_term(l, &casimir(l), &all_dplus(gp, l)?)?))
}

/// `[R12, R13] + ½ T^a_3 𝒟^+_a R12 + cycl. − μ f`.
pub fn pl_cdybe_tensor_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    mu: Cx<R>,
) -> Result<ThreeTensor<R>> {
    Ok(pl_cdybe_lhs(fam, l, omega)?.sub(&f_tensor(l).scale(mu)))
}

/// `<[RX, RY] − ½𝒟^+_X R Y, Z> + cycl. − μ <[X, Y], Z>`.
#[allow(clippy::too_many_arguments)]
pub fn pl_cdybe_scalar_residual<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    x: &Coeffs<R>,
    y: &Coeffs<R>,
    z: &Coeffs<R>,
    mu: Cx<R>,
) -> Result<Cx<R>> {
    let gp = GroupPoint::new(fam, l, omega)?;
    pl_cdybe_scalar_at(&gp, l, x, y, z, mu)
}

fn pl_cdybe_scalar_at<R: Real>(
    gp: &GroupPoint<'_, R>,
    l: &LieAlgebra<R>,
    x: &Coeffs<R>,
    y: &Coeffs<R>,
    z: &Coeffs<R>,
    mu: Cx<R>,
) -> Result<Cx<R>> {
    let r = gp.value();
    let term = |a: &Coeffs<R>, b: &Coeffs<R>, c: &Coeffs<R>| -> Result<Cx<R>> {
        let br = l.bracket(&(r * a), &(r * b))?;
        let d = gp.dplus(a)? * b;
        Ok(l.form(&(br - d), c))
    };
    let lhs = term(x, y, z)? + term(y, z, x)? + term(z, x, y)?;
    Ok(lhs - mu * l.form(&l.bracket(x, y)?, z))
}

/// Max over all basis triples of the scalar residual and of its difference
/// from the contracted tensor residual.
pub fn pl_cdybe_basis_sweep<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    omega: &GroupElement<R>,
    mu: Cx<R>,
) -> Result<(R, R)> {
    let gp = GroupPoint::new(fam, l, omega)?;
    let tensor = pl_cdybe_lhs_at(&gp, l)?.sub(&f_tensor(l).scale(mu));
    let n = l.dim();
    let basis: Vec<Coeffs<R>> = (0..n).map(|a| l.basis_vector(a)).collect();
    let mut worst = R::zero();
    let mut disagreement = R::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let s = pl_cdybe_scalar_at(&gp, l, &basis[a], &basis[b], &basis[c], mu)?;
                let t = tensor.contract(l, &basis[a], &basis[b], &basis[c]);
                worst = worst.max(modulus(s));
                disagreement = disagreement.max(modulus(s - t));
            }
        }
    }
    Ok((worst, disagreement))
}

/// `ℰ(Ω)` together with the residual of its decomposition
/// `[r+R, r+R] + cycl. = [r, r] + [R, R] − T^a_3 r_ab 𝒟^b_- R12 + cycl.`
#[derive(Debug, Clone)]
pub struct ETensor<R: Real> {
    pub e: ThreeTensor<R>,
    pub decomposition_residual: R,
}

/// `ℰ(Ω) = [r12+R12, r13+R13] + T^a_3 (r_ab 𝒟^b_- + ½𝒟^+_a) R12 + cycl.`
///
/// `𝒟_-` is taken from infinitesimal equivariance, `𝒟_-^X R = [R, ad_X]`.
pub fn e_tensor<R: Real>(
    fam: &RMatrixFamily<R>,
    l: &LieAlgebra<R>,
    r: &TwoTensor<R>,
    omega: &GroupElement<R>,
) -> Result<ETensor<R>> {
    crate::tensor::check_antisymmetric(r)?;
    let gp = GroupPoint::new(fam, l, omega)?;
    let rt = two_tensor_from_endo(l, gp.value())?;
    let sum = r.add(&rt);
    let dminus: Vec<Mat<R>> = (0..l.dim()).map(|a| gp.equivariance_commutator(&l.basis_vector(a))).collect::<Result<_>>()?;
    let minus_term = slot3_derivative_term(l, r, &dminus)?;
    let plus_term = slot3_derivative_term(l, &casimir(l), &all_dplus(&gp, l)?)?;
    let mixed = cybe_lhs(l, &sum, &sum)?;
    let e = mixed.add(&minus_term).add(&plus_term);
    let split = cybe_lhs(l, r, r)?.add(&cybe_lhs(l, &rt, &rt)?).sub(&minus_term);
    Ok(ETensor { e, decomposition_residual: mixed.sub(&split).max_abs() })
}

/// `max_z |γ F_{τ/γ}(γz) − 𝔉_τ(z)|`; for `τ = 0` the sequence `ν_γ = γ` is used.
pub fn scaling_limit_error<R: Real>(tau: Cx<R>, gamma: f64, z_grid: &[Cx<R>]) -> Result<R> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::Domain(format!("scaling parameter must be positive, got {gamma}")));
    }
    let g = Cx::new(R::lit(gamma), R::zero());
    let nu = if modulus(tau) == R::zero() { g } else { tau / g };
    let f = SpectralFunction::FNu(nu);
    let limit = SpectralFunction::FCan(tau);
    let mut worst = R::zero();
    for z in z_grid {
        worst = worst.max(modulus(g * f.eval(g * z)? - limit.eval(*z)?));
    }
    Ok(worst)
}

/// `max |γ R_{PL(τ/γ)}(e^{γω}) − ℛ_τ(ω)|` as endomorphisms.
pub fn scaling_limit_endo_error<R: Real>(l: &LieAlgebra<R>, tau: f64, gamma: f64, omega: &Coeffs<R>) -> Result<R> {
    let g = Cx::new(R::lit(gamma), R::zero());
    let big = l.exp_elem(&(omega * g))?;
    let pl = crate::rmatrix::eval_r_group(&RMatrixFamily::poisson_lie(tau / gamma), l, &big)? * g;
    let lin = crate::rmatrix::eval_r_linear(&RMatrixFamily::canonical(tau), l, omega)?;
    Ok(crate::scalar::max_abs(&(pl - lin)))
}

/// `max_z |riccati_residual|` of `F_ν + ε z³` for each `ε`.
pub fn uniqueness_probe<R: Real>(nu: Cx<R>, eps_list: &[f64], z_grid: &[Cx<R>]) -> Result<Vec<(f64, R)>> {
    let base = SpectralFunction::FNu(nu);
    let mu = base.mu().expect("F_nu has a mu");
    eps_list
        .iter()
        .map(|&eps| {
            let f = base.clone().perturbed(eps);
            let mut worst = R::zero();
            for z in z_grid {
                worst = worst.max(modulus(riccati_residual(&f, *z, mu)?));
            }
            Ok((eps, worst))
        })
        .collect()
}

/// First-order prediction `ε |3z² + 2θ(z) z³ + 2F_ν(z) z³|` of the probe.
pub fn uniqueness_prediction<R: Real>(nu: Cx<R>, eps: f64, z: Cx<R>) -> Result<R> {
    let f = SpectralFunction::FNu(nu).eval(z)?;
    let th = SpectralFunction::<R>::Theta.eval(z)?;
    let z2 = z * z;
    let z3 = z2 * z;
    let three = Cx::new(R::lit(3.0), R::zero());
    let two = Cx::new(R::lit(2.0), R::zero());
    Ok(R::lit(eps.abs()) * modulus(three * z2 + two * th * z3 + two * f * z3))
}

/// Seed of the `i`-th point drawn from `base` (SplitMix64 finalizer).
pub fn point_seed(base: u64, i: u64) -> u64 {
    let mut z = base.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Distance kept between `ad_ω` eigenvalues and the poles of the functions
/// evaluated on them.
pub const POLE_MARGIN: f64 = 0.3;

/// A regular semisimple `ω` whose `ad` spectrum keeps [`POLE_MARGIN`] away
/// from the poles of `f` and of `h` (the latter enters `𝒟^+`).
pub fn sample_admissible<R: Real>(l: &LieAlgebra<R>, f: Option<&SpectralFunction<R>>, seed: u64, radius: f64) -> Result<Coeffs<R>> {
    let h = SpectralFunction::<R>::H;
    let margin = R::lit(POLE_MARGIN);
    l.sample_regular_semisimple_where(seed, radius, |values| {
        values.iter().all(|z| h.pole_distance(*z) > margin && f.is_none_or(|f| f.pole_distance(*z) > margin))
    })
}

/// As [`sample_admissible`], additionally requiring a real `ad` spectrum.
pub fn sample_admissible_real<R: Real>(l: &LieAlgebra<R>, f: Option<&SpectralFunction<R>>, seed: u64, radius: f64) -> Result<Coeffs<R>> {
    let h = SpectralFunction::<R>::H;
    let margin = R::lit(POLE_MARGIN);
    let tiny = R::lit(R::LOOSE_TOL);
    l.sample_regular_semisimple_where(seed, radius, |values| {
        values
            .iter()
            .all(|z| z.im.abs() <= tiny && h.pole_distance(*z) > margin && f.is_none_or(|f| f.pole_distance(*z) > margin))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_gl_trace, build_sl};
    use crate::scalar::cx;
    use crate::tensor::{drinfeld_jimbo_r, invariance_residual};

    type F = RMatrixFamily<f64>;

    fn omega(l: &LieAlgebra<f64>, fam: &F, seed: u64) -> GroupElement<f64> {
        let f = fam.spectral_function();
        let w = sample_admissible(l, f.as_ref(), seed, 1.0).unwrap();
        l.exp_elem(&w).unwrap()
    }

    #[test]
    fn summary_bookkeeping() {
        let pts: Vec<PointResidual> = (0..8).map(|i| PointResidual { seed: i, residual: i as f64 * 1e-10 }).collect();
        let s = ResidualSummary::from_points("x", 1e-9, &pts);
        assert_eq!(s.points_evaluated, 8);
        assert!((s.max_abs - 7e-10).abs() < 1e-20);
        assert!(s.passed);
        assert_eq!(s.diagnostics.len(), DIAGNOSTIC_POINTS);
        assert_eq!(s.diagnostics[0].seed, 7);
        let s = ResidualSummary::from_points("x", 1e-10, &pts);
        assert!(!s.passed);
        let f = ResidualSummary::failed("x", 1e-8, 0, "boom");
        assert!(!f.passed && f.max_abs > f.tolerance && f.points_evaluated == 1);
    }

    #[test]
    fn summary_is_order_independent() {
        let mut pts: Vec<PointResidual> = (0..20).map(|i| PointResidual { seed: i * 31 % 17, residual: ((i * 7) % 5) as f64 }).collect();
        let a = ResidualSummary::from_points("x", 1.0, &pts);
        pts.reverse();
        let b = ResidualSummary::from_points("x", 1.0, &pts);
        assert_eq!(a.diagnostics, b.diagnostics);
        assert_eq!(a.max_abs, b.max_abs);
    }

    #[test]
    fn canonical_cdybe() {
        let l = build_sl::<f64>(2).unwrap();
        let f = f_tensor(&l);
        for tau in [1.0, 0.5, 1.7] {
            let fam = F::canonical(tau);
            let inv = f.scale(cx(-tau * tau, 0.0));
            for seed in 0..10 {
                let w = sample_admissible(&l, fam.spectral_function().as_ref(), seed, 1.0).unwrap();
                let res = cdybe_residual(&fam, &l, &w, &inv).unwrap();
                assert!(res.max_abs() < 1e-8, "tau={tau}: {}", res.max_abs());
            }
        }
    }

    #[test]
    fn canonical_cdybe_on_sl3_and_zero_family() {
        let l = build_sl::<f64>(3).unwrap();
        let w = sample_admissible(&l, Some(&SpectralFunction::f_can(1.0)), 3, 1.0).unwrap();
        let res = cdybe_residual(&F::canonical(1.0), &l, &w, &f_tensor(&l).scale(cx(-1.0, 0.0))).unwrap();
        assert!(res.max_abs() < 1e-8);
        let z = cdybe_residual(&F::Zero, &l, &w, &ThreeTensor::zeros(8)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn wrong_invariant_is_detected() {
        let l = build_sl::<f64>(2).unwrap();
        let w = sample_admissible(&l, None, 1, 1.0).unwrap();
        let res = cdybe_residual(&F::canonical(1.0), &l, &w, &ThreeTensor::zeros(3)).unwrap();
        assert!(res.max_abs() > 1e-4);
    }

    #[test]
    fn pl_cdybe_solutions() {
        for l in [build_sl::<f64>(2).unwrap(), build_sl(3).unwrap()] {
            for nu in [0.3, 1.0, 2.0] {
                let fam = F::poisson_lie(nu);
                let mu = fam.mu().unwrap();
                for seed in 0..3 {
                    let big = omega(&l, &fam, seed);
                    let res = pl_cdybe_tensor_residual(&fam, &l, &big, mu).unwrap();
                    assert!(res.max_abs() < 1e-8, "nu={nu}: {}", res.max_abs());
                }
            }
        }
    }

    #[test]
    fn cayley_on_gl2() {
        let l = build_gl_trace::<f64>(2).unwrap();
        let fam = F::CayleyNu1;
        for seed in 0..5 {
            let big = omega(&l, &fam, seed);
            let res = pl_cdybe_tensor_residual(&fam, &l, &big, cx(-0.75, 0.0)).unwrap();
            assert!(res.max_abs() < 1e-8);
        }
    }

    #[test]
    fn scalar_and_tensor_forms_agree() {
        let l = build_sl::<f64>(2).unwrap();
        for fam in [F::poisson_lie(1.3), F::CayleyNu1] {
            let big = omega(&l, &fam, 9);
            let (worst, disagreement) = pl_cdybe_basis_sweep(&fam, &l, &big, fam.mu().unwrap()).unwrap();
            assert!(worst < 1e-8);
            assert!(disagreement < 1e-12);
            // with a wrong μ the two still agree
            let (worst, disagreement) = pl_cdybe_basis_sweep(&fam, &l, &big, cx(0.0, 0.0)).unwrap();
            assert!(worst > 1e-2);
            assert!(disagreement < 1e-12);
        }
    }

    #[test]
    fn repeated_argument_vanishes() {
        let l = build_sl::<f64>(3).unwrap();
        let fam = F::poisson_lie(0.3).perturbed_for_tests();
        let big = omega(&l, &F::poisson_lie(0.3), 2);
        let x = l.sample_regular_semisimple(5, 1.0).unwrap();
        let z = l.sample_regular_semisimple(6, 1.0).unwrap();
        let r = pl_cdybe_scalar_residual(&fam, &l, &big, &x, &x, &z, cx(0.7, 0.0)).unwrap();
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn mu_mismatch_offset_is_calibrated() {
        let l = build_sl::<f64>(2).unwrap();
        let fam = F::poisson_lie(1.0);
        let big = omega(&l, &fam, 4);
        let wrong = cx(0.0, 0.0);
        let res = pl_cdybe_tensor_residual(&fam, &l, &big, wrong).unwrap();
        let offset = (fam.mu().unwrap() - wrong).norm() * f_tensor(&l).max_abs();
        assert!((res.max_abs() - offset).abs() < 1e-8);
    }

    #[test]
    fn degenerate_and_equivalent_families() {
        let l = build_sl::<f64>(2).unwrap();
        let big = omega(&l, &F::poisson_lie(1.0), 12);
        let half = pl_cdybe_tensor_residual(&F::poisson_lie(0.5), &l, &big, cx(0.0, 0.0)).unwrap();
        assert!(half.max_abs() < 1e-12);
        let a = pl_cdybe_tensor_residual(&F::poisson_lie(1.0), &l, &big, cx(-0.75, 0.0)).unwrap();
        let b = pl_cdybe_tensor_residual(&F::CayleyNu1, &l, &big, cx(-0.75, 0.0)).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn lhs_is_invariant_for_solutions() {
        let l = build_sl::<f64>(3).unwrap();
        let fam = F::poisson_lie(0.8);
        let lhs = pl_cdybe_lhs(&fam, &l, &omega(&l, &fam, 5)).unwrap();
        let x = l.sample_regular_semisimple(77, 1.0).unwrap();
        assert!(invariance_residual(&l, &lhs, &x).unwrap() < 1e-8);
    }

    #[test]
    fn perturbed_family_is_not_a_solution() {
        let l = build_sl::<f64>(2).unwrap();
        let fam = F::poisson_lie(1.0).perturbed_for_tests();
        let big = omega(&l, &F::poisson_lie(1.0), 3);
        let res = pl_cdybe_tensor_residual(&fam, &l, &big, cx(-0.75, 0.0)).unwrap();
        assert!(res.max_abs() > 1e-4);
    }

    #[test]
    fn e_tensor_is_a_shifted_invariant() {
        let l = build_sl::<f64>(2).unwrap();
        let r = drinfeld_jimbo_r(&l).unwrap();
        let f = f_tensor(&l);
        for nu in [1.0, 0.3] {
            let fam = F::poisson_lie(nu);
            let mut first: Option<ThreeTensor<f64>> = None;
            for seed in 0..5 {
                let et = e_tensor(&fam, &l, &r, &omega(&l, &fam, seed)).unwrap();
                assert!(et.decomposition_residual < 1e-10);
                // ℰ = [r, r] + cycl. + (LHS of the PL-CDYBE) = −¼ f + μ f
                let mu = fam.mu().unwrap();
                let want = f.scale(mu - cx(0.25, 0.0));
                assert!(et.e.sub(&want).max_abs() < 1e-8);
                if let Some(e0) = &first {
                    assert!(et.e.sub(e0).max_abs() < 1e-8);
                } else {
                    first = Some(et.e);
                }
            }
        }
    }

    #[test]
    fn e_tensor_of_zero_family() {
        let l = build_sl::<f64>(2).unwrap();
        let r = drinfeld_jimbo_r(&l).unwrap();
        let et = e_tensor(&F::Zero, &l, &r, &l.exp_elem(&l.sample_regular_semisimple(1, 0.5).unwrap()).unwrap()).unwrap();
        assert!(et.e.add(&f_tensor(&l).scale(cx(0.25, 0.0))).max_abs() < 1e-12);
    }

    #[test]
    fn scaling_limit_converges_quadratically() {
        let grid: Vec<Cx<f64>> = [-1.0, -0.5, 0.5, 1.0, 1.5].iter().map(|x| cx(*x, 0.0)).collect();
        let e1 = scaling_limit_error(cx(1.0, 0.0), 1e-2, &grid).unwrap();
        let e2 = scaling_limit_error(cx(1.0, 0.0), 5e-3, &grid).unwrap();
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        // leading term γ² z / 12 at z = 1.5
        assert!((e1 - 1e-4 * 1.5 / 12.0).abs() < 1e-7);
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let e = scaling_limit_error(cx(1.0, 0.0), 0.04 / 2f64.powi(k), &grid).unwrap();
            assert!(e < prev);
            prev = e;
        }
        assert!(scaling_limit_error(cx(0.0, 0.0), 1e-3, &grid).unwrap() < 1e-6);
    }

    #[test]
    fn scaling_limit_of_endomorphisms() {
        let l = build_sl::<f64>(2).unwrap();
        let w = sample_admissible_real(&l, Some(&SpectralFunction::f_can(1.0)), 8, 1.0).unwrap();
        assert!(scaling_limit_endo_error(&l, 1.0, 1e-3, &w).unwrap() < 1e-4);
    }

    #[test]
    fn uniqueness_probe_is_linear_in_eps() {
        let z = [cx(0.7, 0.0)];
        let nu = cx::<f64>(1.0, 0.0);
        let out = uniqueness_probe(nu, &[0.0, 1e-3, 2e-3], &z).unwrap();
        assert!(out[0].1 < 1e-11);
        let ratio = out[2].1 / out[1].1;
        assert!((1.8..=2.2).contains(&ratio));
        let pred = uniqueness_prediction(nu, 1e-3, z[0]).unwrap();
        assert!((out[1].1 - pred).abs() <= 0.2 * pred);
    }

    #[test]
    fn point_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| point_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(point_seed(7, 3), point_seed(7, 3));
    }

    impl F {
        fn perturbed_for_tests(self) -> F {
            let f = self.spectral_function().unwrap().perturbed(0.05);
            F::CustomSpectral { func: f, case: crate::rmatrix::Case::Group }
        }
    }
}
