//! Divergence-free spectral fields on the square and their Sobolev calculus.
//!
//! The stream function is expanded on sin(m xs) sin(n ys) where
//! xs = (x+pi)/2 in [0,pi] rescales the physical domain [-pi,pi]^2; the
//! velocity u = (d psi/dy, -d psi/dx) is divergence-free with vanishing
//! normal trace by construction. Mode (m,n) carries the model eigenvalue
//! lambda_mn = (m^2+n^2)^2, saturating the spectral lower bound of the
//! fourth-order operator, and the Sobolev scale is realized by coefficient
//! weights: with a_mn the velocity coefficient orthonormal in L^2,
//!
//!   |u|_{H^s}^2 = sum_mn (m^2 + n^2)^s a_mn^2,   s in [-2, 3].
//!
//! s = 0 is the L^2 norm of the velocity and s = 2 the V norm, so that
//! the quadratic form of the diagonal operator is <Au,u> = |u|_V^2. The
//! classical quantities relate to this scale by fixed constants:
//! int |grad u|^2 = |u|_{H^1}^2 / 4 and int |e(u)|^2 = |u|_{H^1}^2 / 8.

mod operators;
mod workspace;

pub use operators::{
    deformation_tensor, measure_b_dual_constant, measure_n_dual_constant,
    measure_trilinear_constant, operator_b, operator_n, stress, stress_lipschitz_bound,
    trilinear_b, velocity_grids, viscosity_mu, Deformation, DualCoeffs,
};
pub use workspace::{Basis, GridWorkspace};

use crate::{Error, Result};
use ndarray::Array2;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Supported Sobolev scale (inclusive).
pub const SOBOLEV_SCALE: (f64, f64) = (-2.0, 3.0);

/// The higher-order viscosity coefficient is fixed to one.
pub const MU1: f64 = 1.0;

/// Constitutive parameters of the shear-thinning stress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhysParams", into = "RawPhysParams")]
pub struct PhysParams {
    mu0: f64,
    epsilon: f64,
    alpha: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawPhysParams {
    mu0: f64,
    epsilon: f64,
    alpha: f64,
}

impl TryFrom<RawPhysParams> for PhysParams {
    type Error = Error;

    fn try_from(raw: RawPhysParams) -> Result<Self> {
        PhysParams::new(raw.mu0, raw.epsilon, raw.alpha)
    }
}

impl From<PhysParams> for RawPhysParams {
    fn from(p: PhysParams) -> Self {
        RawPhysParams {
            mu0: p.mu0,
            epsilon: p.epsilon,
            alpha: p.alpha,
        }
    }
}

impl PhysParams {
    pub fn new(mu0: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(mu0.is_finite() && mu0 > 0.0) {
            return Err(Error::Config(format!("mu0 must be positive, got {mu0}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(PhysParams {
            mu0,
            epsilon,
            alpha,
        })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Pointwise upper bound 2 mu0 epsilon^{-alpha/2} of the viscosity.
    pub fn viscosity_cap(&self) -> f64 {
        2.0 * self.mu0 * self.epsilon.powf(-0.5 * self.alpha)
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            mu0: 1.0,
            epsilon: 0.5,
            alpha: 0.5,
        }
    }
}

/// Model eigenvalue of mode (m,n); modes are 1-based.
pub fn lambda_mode(m: usize, n: usize) -> f64 {
    assert!(m >= 1 && n >= 1);
    let k = (m * m + n * n) as f64;
    k * k
}

/// Stream-function coefficients of a divergence-free velocity field on the
/// N x N sine truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n_trunc: usize,
    /// psi[[m-1, n-1]] multiplies sin(m xs) sin(n ys).
    psi: Array2<f64>,
}

/// a_mn = velocity_scale(m,n) * psi_mn makes the velocity mode orthonormal
/// in L^2.
fn velocity_scale(m: usize, n: usize) -> f64 {
    0.5 * std::f64::consts::PI * ((m * m + n * n) as f64).sqrt()
}

impl SpectralField {
    pub fn zeros(n_trunc: usize) -> Self {
        assert!(n_trunc >= 1, "truncation must keep at least one mode");
        SpectralField {
            n_trunc,
            psi: Array2::zeros((n_trunc, n_trunc)),
        }
    }

    pub fn from_psi(psi: Array2<f64>) -> Self {
        let (rows, cols) = psi.dim();
        assert!(rows >= 1 && rows == cols, "stream coefficients must be square");
        assert!(psi.iter().all(|x| x.is_finite()));
        SpectralField { n_trunc: rows, psi }
    }

    /// Single mode with the given L^2-orthonormal velocity amplitude.
    pub fn mode(n_trunc: usize, m: usize, n: usize, amplitude: f64) -> Self {
        let mut f = SpectralField::zeros(n_trunc);
        f.set_velocity_coeff(m, n, amplitude);
        f
    }

    pub fn from_velocity_coeffs(a: Array2<f64>) -> Self {
        let mut f = SpectralField::from_psi(a);
        for m in 1..=f.n_trunc {
            for n in 1..=f.n_trunc {
                f.psi[[m - 1, n - 1]] /= velocity_scale(m, n);
            }
        }
        f
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn psi(&self) -> &Array2<f64> {
        &self.psi
    }

    pub fn psi_coeff(&self, m: usize, n: usize) -> f64 {
        assert!(m >= 1 && n >= 1 && m <= self.n_trunc && n <= self.n_trunc);
        self.psi[[m - 1, n - 1]]
    }

    pub fn velocity_coeff(&self, m: usize, n: usize) -> f64 {
        self.psi_coeff(m, n) * velocity_scale(m, n)
    }

    pub fn set_velocity_coeff(&mut self, m: usize, n: usize, a: f64) {
        assert!(m >= 1 && n >= 1 && m <= self.n_trunc && n <= self.n_trunc);
        assert!(a.is_finite());
        self.psi[[m - 1, n - 1]] = a / velocity_scale(m, n);
    }

    pub fn velocity_coeffs(&self) -> Array2<f64> {
        let mut a = self.psi.clone();
        for m in 1..=self.n_trunc {
            for n in 1..=self.n_trunc {
                a[[m - 1, n - 1]] *= velocity_scale(m, n);
            }
        }
        a
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c.is_finite());
        SpectralField {
            n_trunc: self.n_trunc,
            psi: &self.psi * c,
        }
    }

    /// self += c * other.
    pub fn add_scaled(&mut self, c: f64, other: &SpectralField) {
        assert_eq!(self.n_trunc, other.n_trunc);
        assert!(c.is_finite());
        self.psi.zip_mut_with(&other.psi, |a, b| *a += c * b);
    }
}

/// Sobolev norm on the spectral scale; s = 0 is the L^2 norm of the
/// velocity, s = 2 the V norm.
pub fn norm_sobolev(u: &SpectralField, s: f64) -> Result<f64> {
    if !(s >= SOBOLEV_SCALE.0 && s <= SOBOLEV_SCALE.1) {
        return Err(Error::Domain(format!(
            "Sobolev index {s} outside the supported scale [{}, {}]",
            SOBOLEV_SCALE.0, SOBOLEV_SCALE.1
        )));
    }
    let mut sum = 0.0;
    for m in 1..=u.n_trunc {
        for n in 1..=u.n_trunc {
            let a = u.velocity_coeff(m, n);
            sum += ((m * m + n * n) as f64).powf(s) * a * a;
        }
    }
    Ok(sum.sqrt())
}

fn mode_decay(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x > 700.0 {
        0.0
    } else {
        (-x).exp()
    }
}

/// Diagonal semigroup: mode (m,n) is damped by e^{-lambda_mn t}.
pub fn semigroup_apply(u: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!(
            "semigroup time must be finite and nonnegative, got {t}"
        )));
    }
    let mut psi = u.psi.clone();
    for m in 1..=u.n_trunc {
        for n in 1..=u.n_trunc {
            psi[[m - 1, n - 1]] *= mode_decay(lambda_mode(m, n) * t);
        }
    }
    Ok(SpectralField {
        n_trunc: u.n_trunc,
        psi,
    })
}

/// Gaussian battery field with velocity coefficients damped by
/// (m^2+n^2)^{-decay}; deterministic given the RNG state.
pub fn random_field(n_trunc: usize, decay: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    assert!(decay >= 0.0);
    let mut f = SpectralField::zeros(n_trunc);
    for m in 1..=n_trunc {
        for n in 1..=n_trunc {
            let xi: f64 = StandardNormal.sample(rng);
            f.set_velocity_coeff(m, n, xi * ((m * m + n * n) as f64).powf(-decay));
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn phys_params_are_validated() {
        assert!(PhysParams::new(1.0, 0.5, 0.5).is_ok());
        assert!(matches!(PhysParams::new(0.0, 0.5, 0.5), Err(Error::Config(_))));
        assert!(matches!(PhysParams::new(1.0, 0.0, 0.5), Err(Error::Config(_))));
        assert!(matches!(PhysParams::new(1.0, 0.5, 0.0), Err(Error::Config(_))));
        assert!(matches!(PhysParams::new(1.0, 0.5, 1.5), Err(Error::Config(_))));
        let p = PhysParams::new(2.0, 0.25, 1.0).unwrap();
        assert!((p.viscosity_cap() - 2.0 * 2.0 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_has_zero_norms_on_the_whole_scale() {
        let u = SpectralField::zeros(4);
        for s in [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
            assert_eq!(norm_sobolev(&u, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_mode_norms_follow_the_weights() {
        let u = SpectralField::mode(3, 1, 1, 1.0);
        let l2 = norm_sobolev(&u, 0.0).unwrap();
        let h1 = norm_sobolev(&u, 1.0).unwrap();
        assert!((l2 - 1.0).abs() < 1e-14);
        // H1/L2 ratio of squared norms is m^2+n^2 = 2
        assert!((h1 * h1 / (l2 * l2) - 2.0).abs() < 1e-14);
        let v = SpectralField::mode(4, 2, 3, 0.5);
        let r = norm_sobolev(&v, 2.0).unwrap() / norm_sobolev(&v, 0.0).unwrap();
        assert!((r * r - 169.0).abs() < 1e-11);
        assert!(matches!(norm_sobolev(&u, 3.5), Err(Error::Domain(_))));
        assert!(matches!(norm_sobolev(&u, -2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn poincare_chain_holds_on_random_fields() {
        // lambda_1 = 4, so |u|^2 <= lambda_1^{-1/2} |u|_{H1}^2
        let mut rng = stream(11, Purpose::FieldBattery, 0, 0);
        for _ in 0..50 {
            let u = random_field(5, 0.6, &mut rng);
            let l2 = norm_sobolev(&u, 0.0).unwrap();
            let h1 = norm_sobolev(&u, 1.0).unwrap();
            let v = norm_sobolev(&u, 2.0).unwrap();
            assert!(l2 * l2 <= 0.5 * h1 * h1 * (1.0 + 1e-14));
            assert!(h1 * h1 <= 0.5 * v * v * (1.0 + 1e-14));
        }
    }

    #[test]
    fn semigroup_identity_and_single_mode_decay() {
        let mut rng = stream(12, Purpose::FieldBattery, 0, 0);
        let u = random_field(4, 0.5, &mut rng);
        let s0 = semigroup_apply(&u, 0.0).unwrap();
        assert_eq!(s0.psi(), u.psi());
        let m = SpectralField::mode(2, 1, 1, 1.0);
        let st = semigroup_apply(&m, 0.1).unwrap();
        assert!((st.velocity_coeff(1, 1) - (-0.4f64).exp()).abs() < 1e-15);
        assert!(matches!(semigroup_apply(&u, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn semigroup_contracts_on_the_whole_scale() {
        let mut rng = stream(13, Purpose::FieldBattery, 0, 0);
        let u = random_field(5, 0.4, &mut rng);
        for t in [1e-3, 0.1, 1.0] {
            let su = semigroup_apply(&u, t).unwrap();
            for s in [-2.0, 0.0, 1.0, 2.0, 3.0] {
                assert!(norm_sobolev(&su, s).unwrap() <= norm_sobolev(&u, s).unwrap());
            }
            // spectral gap: |S(t)u| <= e^{-4t} |u|
            let bound = (-4.0 * t).exp() * norm_sobolev(&u, 0.0).unwrap();
            assert!(norm_sobolev(&su, 0.0).unwrap() <= bound * (1.0 + 1e-14));
        }
    }

    #[test]
    fn semigroup_is_strongly_continuous() {
        let mut rng = stream(14, Purpose::FieldBattery, 0, 0);
        let u = random_field(4, 0.8, &mut rng);
        let norm = norm_sobolev(&u, 0.0).unwrap();
        let lambda_max = lambda_mode(4, 4);
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let t = 10f64.powi(-k);
            let mut diff = semigroup_apply(&u, t).unwrap();
            diff.add_scaled(-1.0, &u);
            let d = norm_sobolev(&diff, 0.0).unwrap();
            assert!(d <= prev);
            assert!(d <= lambda_max * t * norm);
            prev = d;
        }
    }

    #[test]
    fn stream_and_velocity_coefficients_round_trip() {
        let mut u = SpectralField::zeros(3);
        u.set_velocity_coeff(2, 3, 0.7);
        assert!((u.velocity_coeff(2, 3) - 0.7).abs() < 1e-15);
        let expected_psi = 0.7 / (0.5 * std::f64::consts::PI * 13f64.sqrt());
        assert!((u.psi_coeff(2, 3) - expected_psi).abs() < 1e-15);
        let a = u.velocity_coeffs();
        let back = SpectralField::from_velocity_coeffs(a);
        assert!((back.psi_coeff(2, 3) - u.psi_coeff(2, 3)).abs() < 1e-15);
    }

    #[test]
    fn field_algebra_is_linear() {
        let mut rng = stream(15, Purpose::FieldBattery, 0, 0);
        let u = random_field(4, 0.5, &mut rng);
        let v = random_field(4, 0.5, &mut rng);
        let mut w = u.scaled(2.0);
        w.add_scaled(-2.0, &u);
        assert!(norm_sobolev(&w, 0.0).unwrap() < 1e-14);
        let mut q = u.clone();
        q.add_scaled(3.0, &v);
        let direct = u.velocity_coeff(2, 2) + 3.0 * v.velocity_coeff(2, 2);
        assert!((q.velocity_coeff(2, 2) - direct).abs() < 1e-13);
    }
}
