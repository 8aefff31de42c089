//! Deterministic mean-square statistics of the stochastic convolution.
//!
//! For a single mode with decay rate lambda the convolution
//! z(t) = int_0^t e^{-lambda (t-s)} dbeta^H(s) has
//!
//!   E z(t)^2 = H(2H-1) lambda^{-2H}
//!              int_0^{lambda t} y^{2H-2} e^{-y} (1 - e^{-2(lambda t - y)}) dy,
//!
//! the reduced single-integral form of the twisted-product double integral;
//! the prefactor H(2H-1) is the twisted-product density constant. As t grows
//! the integral tends to Gamma(2H-1), so the stationary variance is
//! H Gamma(2H) lambda^{-2H}.

use crate::fbm::HurstParam;
use crate::noise::NoiseAssumption;
use crate::quad::JacobiRule;
use crate::specfun::{gamma, lower_gamma_regularized};

/// Threshold on lambda*t beyond which the finite-horizon correction factor
/// e^{-2(lambda t - y)} is below double rounding and the incomplete-gamma
/// form is used directly.
const LARGE_HORIZON: f64 = 40.0;

fn mode_ms(lambda: f64, hh: f64, t: f64, rule: &JacobiRule) -> f64 {
    let horizon = lambda * t;
    let prefactor = hh * (2.0 * hh - 1.0) * lambda.powf(-2.0 * hh);
    if horizon <= LARGE_HORIZON {
        // weight y^{2H-2} handled by the rule; 1 - e^{-x} via expm1 so the
        // integrand never cancels
        let reduced =
            rule.integrate_shifted(0.0, horizon, |y| (-y).exp() * (-(-2.0 * (horizon - y)).exp_m1()));
        prefactor * reduced
    } else {
        let g = gamma(2.0 * hh - 1.0).expect("2H-1 > 0");
        prefactor * g * lower_gamma_regularized(2.0 * hh - 1.0, horizon)
    }
}

/// Mean square E z_k(t)^2 of one unit-amplitude mode. `n_quad` controls the
/// Jacobi rule resolving the y^{2H-2} endpoint.
pub fn mode_mean_square(lambda: f64, hurst: HurstParam, t: f64, n_quad: usize) -> f64 {
    assert!(lambda > 0.0 && t > 0.0, "mode mean square needs lambda > 0, t > 0");
    let hh = hurst.get();
    let rule = JacobiRule::new(n_quad, 2.0 * hh - 2.0);
    mode_ms(lambda, hh, t, &rule)
}

/// Mean square of the state-space norm of the truncated convolution,
/// E |z(t)|^2 = sum_k q_k phi_k^2 E z_k(t)^2, by per-mode quadrature.
pub fn mean_square_it(noise: &NoiseAssumption, hurst: HurstParam, t: f64, n_quad: usize) -> f64 {
    assert!(t > 0.0, "mean square is defined for t > 0");
    let hh = hurst.get();
    let rule = JacobiRule::new(n_quad, 2.0 * hh - 2.0);
    let spectrum = noise.spectrum();
    (0..spectrum.len())
        .map(|k| {
            let scale = spectrum.scale(k);
            scale * scale * mode_ms(spectrum.lambda(k), hh, t, &rule)
        })
        .sum()
}

/// Stationary variance H Gamma(2H) lambda^{-2H} of one unit-amplitude mode.
pub fn stationary_mode_variance(lambda: f64, hurst: HurstParam) -> f64 {
    assert!(lambda > 0.0);
    let hh = hurst.get();
    hh * gamma(2.0 * hh).expect("2H > 0") * lambda.powf(-2.0 * hh)
}

/// Stationary mean square of the state-space norm, sum_k q_k phi_k^2
/// H Gamma(2H) lambda_k^{-2H}.
pub fn stationary_mean_square_h(noise: &NoiseAssumption, hurst: HurstParam) -> f64 {
    let spectrum = noise.spectrum();
    (0..spectrum.len())
        .map(|k| {
            let scale = spectrum.scale(k);
            scale * scale * stationary_mode_variance(spectrum.lambda(k), hurst)
        })
        .sum()
}

/// Stationary mean square of the first-order Sobolev norm: mode k weighted
/// by (m^2 + n^2) = lambda_k^{1/2}.
pub fn stationary_mean_square_h1(noise: &NoiseAssumption, hurst: HurstParam) -> f64 {
    let spectrum = noise.spectrum();
    (0..spectrum.len())
        .map(|k| {
            let scale = spectrum.scale(k);
            scale * scale
                * spectrum.lambda(k).sqrt()
                * stationary_mode_variance(spectrum.lambda(k), hurst)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::twisted_inner;
    use crate::noise::NoiseAssumption;
    use crate::quad::{integrate_geometric, QuadRule};
    use crate::specfun::convolution_l2_bound;

    fn hurst(h: f64) -> HurstParam {
        HurstParam::new(h).unwrap()
    }

    /// Independent oracle for E z(t)^2: the raw double integral
    /// H(2H-1) int_0^t int_0^t e^{-lambda(2t-u-v)} |u-v|^{2H-2} du dv
    /// written as 2 int_0^t e^{-2 lambda a} int_0^{t-a} e^{-lambda w} w^{2H-2} dw da
    /// with both pieces quadratured directly.
    fn double_integral_oracle(lambda: f64, hh: f64, t: f64) -> f64 {
        let jac = JacobiRule::new(48, 2.0 * hh - 2.0);
        let gl = QuadRule::legendre(32);
        let outer = integrate_geometric(
            |a: f64| {
                let inner = jac.integrate_shifted(0.0, t - a, |w| (-lambda * w).exp());
                (-2.0 * lambda * a).exp() * inner
            },
            0.0,
            t * (1.0 - 1e-14),
            false,
            30,
            &gl,
        );
        hh * (2.0 * hh - 1.0) * 2.0 * outer
    }

    #[test]
    fn matches_double_integral_oracle() {
        for (lambda, hh, t) in [(4.0, 0.75, 0.6), (1.0, 0.6, 1.5), (9.0, 0.9, 0.25)] {
            let got = mode_mean_square(lambda, hurst(hh), t, 32);
            let oracle = double_integral_oracle(lambda, hh, t);
            assert!(
                (got - oracle).abs() < 1e-6 * oracle,
                "lambda={lambda} H={hh} t={t}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn matches_twisted_product_of_exponentials() {
        // E z(t)^2 is the twisted inner product of f(s) = e^{-lambda(t-s)}
        // with itself on [0, t]
        for (lambda, hh, t) in [(4.0, 0.75, 0.8), (2.0, 0.6, 1.2)] {
            let got = mode_mean_square(lambda, hurst(hh), t, 32);
            let f = |s: f64| (-lambda * (t - s)).exp();
            let oracle = twisted_inner(f, f, t, hurst(hh), 4096, 1e-3).unwrap();
            assert!(
                (got - oracle).abs() < 5e-4 * oracle,
                "lambda={lambda} H={hh} t={t}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn vanishes_at_short_times_and_grows_monotonically() {
        let noise = NoiseAssumption::a4_square(3);
        let h = hurst(0.75);
        assert!(mean_square_it(&noise, h, 1e-10, 24) < 1e-12);
        let mut prev = 0.0;
        for i in 1..=40 {
            let t = 12.0 * i as f64 / 40.0;
            let v = mean_square_it(&noise, h, t, 24);
            // rounding-level slack: the curve plateaus near stationarity
            assert!(v >= prev * (1.0 - 1e-12), "t={t}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn stationary_limit_and_seam_are_consistent() {
        let h = hurst(0.7);
        let lambda = 3.0;
        // far past the seam the mode variance equals the closed form
        let far = mode_mean_square(lambda, h, 60.0 / lambda, 32);
        let stat = stationary_mode_variance(lambda, h);
        assert!((far - stat).abs() < 1e-12 * stat);
        // continuity across the quadrature/incomplete-gamma switch
        let below = mode_mean_square(lambda, h, (LARGE_HORIZON - 1e-6) / lambda, 48);
        let above = mode_mean_square(lambda, h, (LARGE_HORIZON + 1e-6) / lambda, 48);
        assert!((above - below).abs() < 1e-9 * stat);
    }

    #[test]
    fn stationary_limit_matches_truncated_double_integral() {
        // the infinite-horizon double integral evaluated at a horizon long
        // enough that the truncation bias is negligible
        let h = hurst(0.8);
        let lambda = 2.0;
        let oracle = double_integral_oracle(lambda, 0.8, 18.0 / lambda);
        let stat = stationary_mode_variance(lambda, h);
        assert!((oracle - stat).abs() < 1e-5 * stat, "{oracle} vs {stat}");
    }

    #[test]
    fn respects_the_scaling_law() {
        // E z^2 = lambda^{-2H} F(lambda t): equal lambda t means the values
        // differ exactly by the lambda prefactor
        let h = hurst(0.65);
        let a = mode_mean_square(3.0, h, 0.7, 32);
        let b = mode_mean_square(7.0, h, 0.3, 32);
        let ratio = (7.0f64 / 3.0).powf(2.0 * 0.65);
        assert!((a / b - ratio).abs() < 1e-10 * ratio);
    }

    #[test]
    fn dominated_by_the_closed_form_bound_on_all_truncations() {
        for hh in [0.6, 0.75, 0.9] {
            let h = hurst(hh);
            let bound = convolution_l2_bound(h);
            let mut prev = 0.0;
            for n in [4usize, 8, 16] {
                let noise = NoiseAssumption::a4_square(n);
                for t in [0.1, 1.0, 10.0] {
                    let v = mean_square_it(&noise, h, t, 32);
                    assert!(v < bound, "H={hh} N={n} t={t}: {v} vs {bound}");
                }
                let at_one = mean_square_it(&noise, h, 1.0, 32);
                assert!(at_one >= prev);
                prev = at_one;
            }
        }
    }

    #[test]
    fn sobolev_weighted_stationary_sum_is_dominated() {
        use crate::specfun::stationary_h1_bound;
        for hh in [0.6, 0.75, 0.9] {
            let h = hurst(hh);
            let bound = stationary_h1_bound(h);
            for n in [4usize, 8, 16] {
                let noise = NoiseAssumption::a4_square(n);
                let v = stationary_mean_square_h1(&noise, h);
                assert!(v < bound, "H={hh} N={n}: {v} vs {bound}");
            }
        }
    }
}
