//! Infinite-dimensional fractional noise truncated to finitely many modes.
//!
//! The state space is spanned by eigenmodes indexed by integer pairs (m, n)
//! with eigenvalues lambda = (m^2 + n^2)^2. Noise enters through diagonal
//! covariance weights q_diag and diagonal map weights phi_diag; four
//! assumption variants (A1..A4) restrict which of those may differ from one
//! and what must be summable. Per-mode stochastic convolutions and their
//! mean-square statistics live in the submodules.

mod convolve;
mod mean_square;

pub use convolve::{
    convolve_field, convolve_field_replica, convolve_mode, stationary_z, stationary_z_replica,
    ConvolutionSample, SampleKind,
};
pub use mean_square::{
    mean_square_it, mode_mean_square, stationary_mean_square_h, stationary_mean_square_h1,
    stationary_mode_variance,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Diagonal weight sequence over the sorted mode list, with an analytic
/// continuation beyond any finite truncation so tail sums can be certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DiagonalLaw {
    /// Constant one.
    One,
    /// k^{-exponent} in the sorted mode index k = 1, 2, ...
    PowerMode { exponent: f64 },
    /// lambda_k^{-exponent}.
    PowerLambda { exponent: f64 },
}

impl DiagonalLaw {
    /// Weight of the mode with 1-based sorted index `index` and eigenvalue
    /// `lambda`.
    pub fn value(&self, index: usize, lambda: f64) -> f64 {
        assert!(index >= 1 && lambda > 0.0);
        match *self {
            DiagonalLaw::One => 1.0,
            DiagonalLaw::PowerMode { exponent } => (index as f64).powf(-exponent),
            DiagonalLaw::PowerLambda { exponent } => lambda.powf(-exponent),
        }
    }

    /// Upper bound on the sum of the law beyond the first `k_trunc` modes of
    /// the infinite lattice, or infinity when the series diverges. Lambda
    /// tails use the counting bound lambda_k >= (4k/pi)^2.
    pub fn tail_sum_bound(&self, k_trunc: usize) -> f64 {
        assert!(k_trunc >= 1);
        let kf = k_trunc as f64;
        match *self {
            DiagonalLaw::One => f64::INFINITY,
            DiagonalLaw::PowerMode { exponent } => {
                if exponent > 1.0 {
                    kf.powf(1.0 - exponent) / (exponent - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            DiagonalLaw::PowerLambda { exponent } => {
                if 2.0 * exponent > 1.0 {
                    (std::f64::consts::FRAC_PI_4).powf(2.0 * exponent)
                        * kf.powf(1.0 - 2.0 * exponent)
                        / (2.0 * exponent - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Law of the squared weights.
    pub fn squared(&self) -> DiagonalLaw {
        match *self {
            DiagonalLaw::One => DiagonalLaw::One,
            DiagonalLaw::PowerMode { exponent } => DiagonalLaw::PowerMode { exponent: 2.0 * exponent },
            DiagonalLaw::PowerLambda { exponent } => {
                DiagonalLaw::PowerLambda { exponent: 2.0 * exponent }
            }
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, DiagonalLaw::One)
    }
}

/// Finite mode list with eigenvalues and diagonal noise weights.
///
/// Invariants: modes sorted by nondecreasing lambda (ties by (m, n)),
/// lambda[k] = (m^2 + n^2)^2 > 0, weights nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    modes: Vec<(u32, u32)>,
    lambda: Vec<f64>,
    q_diag: Vec<f64>,
    phi_diag: Vec<f64>,
}

impl ModeSpectrum {
    /// Canonical N x N tensor truncation: modes (m, n) for 1 <= m, n <= N
    /// with unit weights.
    pub fn square(n_trunc: usize) -> ModeSpectrum {
        assert!(n_trunc >= 1, "truncation must keep at least one mode");
        let mut modes = Vec::with_capacity(n_trunc * n_trunc);
        for m in 1..=n_trunc as u32 {
            for n in 1..=n_trunc as u32 {
                modes.push((m, n));
            }
        }
        modes.sort_by_key(|&(m, n)| (m * m + n * n, m, n));
        let lambda: Vec<f64> = modes
            .iter()
            .map(|&(m, n)| {
                let r2 = (m * m + n * n) as f64;
                r2 * r2
            })
            .collect();
        let k = modes.len();
        ModeSpectrum {
            modes,
            lambda,
            q_diag: vec![1.0; k],
            phi_diag: vec![1.0; k],
        }
    }

    /// The `count` lattice modes of smallest eigenvalue; any mode among the
    /// first `count` in sorted order has both indices at most `count`.
    pub fn first_modes(count: usize) -> ModeSpectrum {
        assert!(count >= 1);
        let mut full = ModeSpectrum::square(count);
        full.modes.truncate(count);
        full.lambda.truncate(count);
        full.q_diag.truncate(count);
        full.phi_diag.truncate(count);
        full
    }

    fn apply_laws(&mut self, q_law: DiagonalLaw, phi_law: DiagonalLaw) {
        for k in 0..self.len() {
            self.q_diag[k] = q_law.value(k + 1, self.lambda[k]);
            self.phi_diag[k] = phi_law.value(k + 1, self.lambda[k]);
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, k: usize) -> (u32, u32) {
        self.modes[k]
    }

    pub fn modes(&self) -> &[(u32, u32)] {
        &self.modes
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambda[k]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// Smallest eigenvalue of the truncation.
    pub fn lambda_min(&self) -> f64 {
        self.lambda[0]
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q_diag[k]
    }

    pub fn phi(&self, k: usize) -> f64 {
        self.phi_diag[k]
    }

    /// Amplitude multiplying the mode-k scalar fBm: sqrt(q_k) phi_k.
    pub fn scale(&self, k: usize) -> f64 {
        self.q_diag[k].sqrt() * self.phi_diag[k]
    }
}

/// Which structural assumption the noise configuration claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssumptionVariant {
    /// Trace-class covariance: sum q_diag finite, phi identically one.
    A1,
    /// Identity covariance, Hilbert-Schmidt map: sum phi_diag^2 finite.
    A2,
    /// Identity covariance, phi phi* trace class; diagonal case coincides
    /// with the A2 summability condition.
    A3,
    /// Identity covariance and map on the square domain; no summability
    /// condition is required.
    A4,
}

/// A noise configuration: a variant tag, a truncated spectrum, and the laws
/// generating the diagonal weights (kept for tail certificates).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseAssumption {
    variant: AssumptionVariant,
    spectrum: ModeSpectrum,
    q_law: DiagonalLaw,
    phi_law: DiagonalLaw,
}

impl NoiseAssumption {
    /// Build a configuration, enforcing the shape each variant fixes: A1
    /// pins phi to one, A2/A3 pin q to one, A4 pins both. Divergence of the
    /// free law is not rejected here; `check_assumption` reports it.
    pub fn new(
        variant: AssumptionVariant,
        mut spectrum: ModeSpectrum,
        q_law: DiagonalLaw,
        phi_law: DiagonalLaw,
    ) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::Domain("noise spectrum is empty".into()));
        }
        let shape_ok = match variant {
            AssumptionVariant::A1 => phi_law.is_one(),
            AssumptionVariant::A2 | AssumptionVariant::A3 => q_law.is_one(),
            AssumptionVariant::A4 => q_law.is_one() && phi_law.is_one(),
        };
        if !shape_ok {
            return Err(Error::Config(format!(
                "variant {variant:?} fixes the complementary weight law to one, got q={q_law:?}, phi={phi_law:?}"
            )));
        }
        spectrum.apply_laws(q_law, phi_law);
        Ok(NoiseAssumption {
            variant,
            spectrum,
            q_law,
            phi_law,
        })
    }

    /// Unit covariance and map on the canonical N x N truncation.
    pub fn a4_square(n_trunc: usize) -> Self {
        NoiseAssumption::new(
            AssumptionVariant::A4,
            ModeSpectrum::square(n_trunc),
            DiagonalLaw::One,
            DiagonalLaw::One,
        )
        .expect("A4 shape is always valid")
    }

    pub fn variant(&self) -> AssumptionVariant {
        self.variant
    }

    pub fn spectrum(&self) -> &ModeSpectrum {
        &self.spectrum
    }

    pub fn q_law(&self) -> DiagonalLaw {
        self.q_law
    }

    pub fn phi_law(&self) -> DiagonalLaw {
        self.phi_law
    }
}

/// Outcome of the summability check backing an assumption variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub variant: AssumptionVariant,
    /// Truncated value of the variant's defining series (mode count for A4).
    pub trace_value: f64,
    /// Certified bound on the series tail beyond the truncation; infinite
    /// when the continuation diverges or no condition applies.
    pub tail_bound: f64,
    pub satisfied: bool,
}

/// Evaluate the summability condition of the configured variant: the
/// truncated trace plus an integral-test tail bound for the law's infinite
/// continuation. A4 carries no condition and is satisfied vacuously.
pub fn check_assumption(noise: &NoiseAssumption) -> Result<AssumptionReport> {
    let spectrum = noise.spectrum();
    if spectrum.is_empty() {
        return Err(Error::Domain("noise spectrum is empty".into()));
    }
    let k = spectrum.len();
    let (trace_value, tail_bound, satisfied) = match noise.variant() {
        AssumptionVariant::A1 => {
            let trace: f64 = (0..k).map(|i| spectrum.q(i)).sum();
            let tail = noise.q_law().tail_sum_bound(k);
            (trace, tail, tail.is_finite())
        }
        AssumptionVariant::A2 | AssumptionVariant::A3 => {
            let trace: f64 = (0..k).map(|i| spectrum.phi(i) * spectrum.phi(i)).sum();
            let tail = noise.phi_law().squared().tail_sum_bound(k);
            (trace, tail, tail.is_finite())
        }
        AssumptionVariant::A4 => (k as f64, f64::INFINITY, true),
    };
    Ok(AssumptionReport {
        variant: noise.variant(),
        trace_value,
        tail_bound,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_spectrum_is_sorted_with_canonical_eigenvalues() {
        let spec = ModeSpectrum::square(4);
        assert_eq!(spec.len(), 16);
        assert_eq!(spec.mode(0), (1, 1));
        assert_eq!(spec.lambda_min(), 4.0);
        for k in 0..spec.len() {
            let (m, n) = spec.mode(k);
            let r2 = (m * m + n * n) as f64;
            assert_eq!(spec.lambda(k), r2 * r2);
            if k > 0 {
                assert!(spec.lambda(k) >= spec.lambda(k - 1));
            }
        }
    }

    #[test]
    fn first_modes_orders_by_eigenvalue() {
        let spec = ModeSpectrum::first_modes(5);
        assert_eq!(
            spec.modes(),
            &[(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)]
        );
        assert_eq!(spec.lambdas(), &[4.0, 25.0, 25.0, 64.0, 100.0]);
    }

    #[test]
    fn basel_trace_is_certified() {
        // q_k = k^{-2}: the full series is pi^2/6 and the truncated trace
        // plus integral tail must bracket it
        let noise = NoiseAssumption::new(
            AssumptionVariant::A1,
            ModeSpectrum::square(40),
            DiagonalLaw::PowerMode { exponent: 2.0 },
            DiagonalLaw::One,
        )
        .unwrap();
        let report = check_assumption(&noise).unwrap();
        let basel = std::f64::consts::PI.powi(2) / 6.0;
        assert!(report.satisfied);
        assert!(report.trace_value < basel);
        assert!(report.trace_value + report.tail_bound > basel);
        assert!(report.tail_bound < 1e-3);
    }

    #[test]
    fn a4_is_vacuously_satisfied() {
        let noise = NoiseAssumption::a4_square(3);
        let report = check_assumption(&noise).unwrap();
        assert!(report.satisfied);
        assert_eq!(report.trace_value, 9.0);
        assert!(report.tail_bound.is_infinite());
    }

    #[test]
    fn a2_with_constant_phi_diverges() {
        let noise = NoiseAssumption::new(
            AssumptionVariant::A2,
            ModeSpectrum::square(6),
            DiagonalLaw::One,
            DiagonalLaw::One,
        )
        .unwrap();
        let report = check_assumption(&noise).unwrap();
        assert!(!report.satisfied);
        assert!(report.tail_bound.is_infinite());
    }

    #[test]
    fn a2_with_summable_phi_squared_passes() {
        // phi_k = k^{-0.75}: phi^2 sums like k^{-1.5}
        let noise = NoiseAssumption::new(
            AssumptionVariant::A2,
            ModeSpectrum::square(8),
            DiagonalLaw::One,
            DiagonalLaw::PowerMode { exponent: 0.75 },
        )
        .unwrap();
        let report = check_assumption(&noise).unwrap();
        assert!(report.satisfied);
        assert!(report.tail_bound.is_finite());
    }

    #[test]
    fn lambda_law_tail_uses_counting_bound() {
        // phi_k^2 = lambda_k^{-1}: summable since lambda_k grows like k^2
        let law = DiagonalLaw::PowerLambda { exponent: 0.5 };
        assert!(law.squared().tail_sum_bound(16).is_finite());
        // lambda^{-1/4} squared decays like 1/sqrt(lambda) ~ 1/k, divergent
        let slow = DiagonalLaw::PowerLambda { exponent: 0.25 };
        assert!(slow.squared().tail_sum_bound(16).is_infinite());
        // tail bound actually dominates the lattice tail it certifies:
        // sum over the first 100 modes past k=16 of lambda^{-1}
        let spec = ModeSpectrum::square(40);
        let partial: f64 = (16..spec.len()).map(|k| 1.0 / spec.lambda(k)).sum();
        assert!(partial < DiagonalLaw::PowerLambda { exponent: 1.0 }.tail_sum_bound(16));
    }

    #[test]
    fn variant_shape_is_enforced() {
        let err = NoiseAssumption::new(
            AssumptionVariant::A1,
            ModeSpectrum::square(2),
            DiagonalLaw::One,
            DiagonalLaw::PowerMode { exponent: 1.0 },
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = NoiseAssumption::new(
            AssumptionVariant::A4,
            ModeSpectrum::square(2),
            DiagonalLaw::PowerMode { exponent: 2.0 },
            DiagonalLaw::One,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn diagonal_law_serde_round_trip() {
        for law in [
            DiagonalLaw::One,
            DiagonalLaw::PowerMode { exponent: 2.0 },
            DiagonalLaw::PowerLambda { exponent: 0.5 },
        ] {
            let text = serde_json::to_string(&law).unwrap();
            let back: DiagonalLaw = serde_json::from_str(&text).unwrap();
            assert_eq!(law, back);
        }
    }
}
