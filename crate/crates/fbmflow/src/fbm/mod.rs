//! One dimensional fractional Brownian motion with long-range dependence:
//! covariance, Volterra kernel calculus, the twisted inner product, path
//! samplers, and Wiener-type integrals of deterministic integrands.

mod inner;
mod kernel;
mod sampler;
mod wiener;

pub use inner::{rect_weight, twisted_inner, twisted_inner_steps};
pub use kernel::{c_h, kernel_dkdt, kernel_kh, kstar_apply, kstar_apply_smooth, KstarQuad};
pub use sampler::{generate_fbm_circulant, generate_fbm_exact, CirculantEmbedding, ExactSampler};
pub use wiener::{
    fbm_values_from_bm, generate_fbm_from_bm, wiener_integral, wiener_integral_sampled,
};

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Hurst parameter restricted to the long-range-dependent range (1/2, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParam(f64);

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.5 && h < 1.0) {
            return Err(Error::Domain(format!(
                "Hurst parameter must lie strictly in (1/2, 1), got {h}"
            )));
        }
        Ok(HurstParam(h))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for HurstParam {
    type Error = Error;
    fn try_from(h: f64) -> Result<Self> {
        HurstParam::new(h)
    }
}

impl From<HurstParam> for f64 {
    fn from(h: HurstParam) -> f64 {
        h.0
    }
}

/// Uniform time grid: node k is t0 + k dt for 0 <= k <= n_steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTimeGrid", into = "RawTimeGrid")]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n_steps: usize,
}

#[derive(Serialize, Deserialize)]
struct RawTimeGrid {
    t0: f64,
    dt: f64,
    n_steps: usize,
}

impl TryFrom<RawTimeGrid> for TimeGrid {
    type Error = Error;
    fn try_from(r: RawTimeGrid) -> Result<Self> {
        TimeGrid::new(r.t0, r.dt, r.n_steps)
    }
}

impl From<TimeGrid> for RawTimeGrid {
    fn from(g: TimeGrid) -> RawTimeGrid {
        RawTimeGrid { t0: g.t0, dt: g.dt, n_steps: g.n_steps }
    }
}

impl TimeGrid {
    /// `n_steps = 0` is allowed and yields the single-point grid {t0}.
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(t0.is_finite() && dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!(
                "time grid requires finite t0 and dt > 0, got t0={t0}, dt={dt}"
            )));
        }
        Ok(TimeGrid { t0, dt, n_steps })
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, n_steps + 1.
    #[inline]
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        assert!(k <= self.n_steps);
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.node(self.n_steps)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }
}

/// A sampled fractional Brownian path on a uniform grid starting at zero.
#[derive(Debug, Clone)]
pub struct FbmPath {
    pub grid: TimeGrid,
    /// Path values at the grid nodes; values[0] = 0.
    pub values: Vec<f64>,
    /// Underlying Brownian path when generated through the kernel
    /// representation; same grid, starts at zero.
    pub driving_bm: Option<Vec<f64>>,
    pub hurst: HurstParam,
    pub seed: u64,
}

impl FbmPath {
    fn check(&self) {
        assert_eq!(self.values.len(), self.grid.len());
        assert_eq!(self.values[0], 0.0, "fBm paths start at zero");
        if let Some(bm) = &self.driving_bm {
            assert_eq!(bm.len(), self.grid.len());
        }
    }

    /// Path increment between nodes k and k+1.
    pub fn increment(&self, k: usize) -> f64 {
        self.values[k + 1] - self.values[k]
    }
}

/// Piecewise constant function phi(t) = sum_i a_i 1_{(t_i, t_{i+1}]}(t).
#[derive(Debug, Clone)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    coefficients: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, coefficients: Vec<f64>) -> Self {
        assert!(breakpoints.len() == coefficients.len() + 1 && !coefficients.is_empty());
        assert!(
            breakpoints.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must be strictly increasing"
        );
        StepFunction { breakpoints, coefficients }
    }

    /// Indicator a * 1_{(lo, hi]}.
    pub fn indicator(lo: f64, hi: f64, a: f64) -> Self {
        StepFunction::new(vec![lo, hi], vec![a])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Pointwise value; zero outside the support.
    pub fn eval(&self, t: f64) -> f64 {
        for (i, a) in self.coefficients.iter().enumerate() {
            if t > self.breakpoints[i] && t <= self.breakpoints[i + 1] {
                return *a;
            }
        }
        0.0
    }
}

/// Covariance of fractional Brownian motion,
/// R(t, s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
pub fn covariance_r(t: f64, s: f64, h: HurstParam) -> Result<f64> {
    if !(t.is_finite() && s.is_finite()) || t < 0.0 || s < 0.0 {
        return Err(Error::Domain(format!(
            "covariance requires nonnegative times, got t={t}, s={s}"
        )));
    }
    let two_h = 2.0 * h.get();
    Ok(0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h)))
}
