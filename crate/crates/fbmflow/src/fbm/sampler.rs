//! Path samplers: a dense-Cholesky sampler that serves as the
//! distributional oracle, and a circulant-embedding sampler for the
//! production O(n log n) path.

use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::Error;
use crate::fbm::{covariance_r, FbmPath, HurstParam, TimeGrid};
use crate::rng::{stream, Purpose};
use crate::Result;

/// Largest step count accepted by the dense sampler; the cubic Cholesky
/// cost and the quadratic memory footprint are unreasonable beyond this.
pub const MAX_EXACT_STEPS: usize = 1 << 14;

/// Dense sampler: factors the exact covariance matrix of the path values
/// once, then draws paths by matrix-vector products.
pub struct ExactSampler {
    grid: TimeGrid,
    hurst: HurstParam,
    /// Lower-triangular Cholesky factor of [R(t_i, t_j)] over nodes 1..=n.
    chol: Array2<f64>,
}

impl ExactSampler {
    pub fn new(grid: TimeGrid, hurst: HurstParam) -> Result<Self> {
        assert!(grid.t0() == 0.0, "fBm paths are anchored at time zero");
        let n = grid.n_steps();
        assert!(n <= MAX_EXACT_STEPS, "dense sampler limited to {MAX_EXACT_STEPS} steps");
        // node 0 is pinned at zero and excluded from the Gaussian vector
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let v = covariance_r(grid.node(i + 1), grid.node(j + 1), hurst)?;
                a[(i, j)] = v;
            }
        }
        let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
        for j in 0..n {
            for i in j..n {
                let mut sum = a[(i, j)];
                for k in 0..j {
                    sum -= a[(i, k)] * a[(j, k)];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::Factorization {
                            pivot: j,
                            diag: sum,
                            jitter: 1e-12 * max_diag,
                        });
                    }
                    a[(j, j)] = sum.sqrt();
                } else {
                    a[(i, j)] = sum / a[(j, j)];
                }
            }
        }
        Ok(ExactSampler { grid, hurst, chol: a })
    }

    pub fn sample(&self, seed: u64) -> FbmPath {
        let n = self.grid.n_steps();
        let mut rng = stream(seed, Purpose::FbmExact, 0, 0);
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut values = vec![0.0; n + 1];
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += self.chol[(i, k)] * z[k];
            }
            values[i + 1] = acc;
        }
        let path = FbmPath {
            grid: self.grid,
            values,
            driving_bm: None,
            hurst: self.hurst,
            seed,
        };
        path.check();
        path
    }
}

/// Gaussian vector with the exact fBm covariance via dense Cholesky.
/// Deterministic in the seed.
pub fn generate_fbm_exact(grid: TimeGrid, hurst: HurstParam, seed: u64) -> Result<FbmPath> {
    Ok(ExactSampler::new(grid, hurst)?.sample(seed))
}

/// Circulant embedding of stationary fractional Gaussian noise: the
/// autocovariance sequence is embedded in a circulant matrix of order 2n
/// whose eigenvalues come from one FFT; each draw costs one more FFT.
pub struct CirculantEmbedding {
    n: usize,
    hurst: HurstParam,
    /// sqrt(eigenvalue / 2n), premultiplied for the synthesis transform.
    sqrt_eig: Vec<f64>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl CirculantEmbedding {
    /// Embedding for `n` unit-spaced increments. Fails with an embedding
    /// error when a circulant eigenvalue is genuinely negative.
    pub fn new(n: usize, hurst: HurstParam) -> Result<Self> {
        assert!(n >= 1);
        let m = 2 * n;
        let two_h = 2.0 * hurst.get();
        let gamma = |k: f64| {
            0.5 * ((k + 1.0).powf(two_h) + (k - 1.0).abs().powf(two_h) - 2.0 * k.powf(two_h))
        };
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let k = if j <= n { j } else { m - j };
                Complex::new(gamma(k as f64), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);
        let eigs: Vec<f64> = buf.iter().map(|c| c.re).collect();
        let max_eig = eigs.iter().cloned().fold(0.0f64, f64::max);
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-8 * max_eig {
            return Err(Error::Embedding { min_eig });
        }
        let sqrt_eig = eigs
            .iter()
            .map(|&e| (e.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(CirculantEmbedding { n, hurst, sqrt_eig, fft })
    }

    /// One vector of `n` unit-spaced fGn increments.
    pub fn sample_increments(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n;
        let m = 2 * n;
        let mut v = vec![Complex::new(0.0, 0.0); m];
        v[0] = Complex::new(self.sqrt_eig[0] * rng.sample::<f64, _>(StandardNormal), 0.0);
        for j in 1..n {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let s = self.sqrt_eig[j] * std::f64::consts::FRAC_1_SQRT_2;
            v[j] = Complex::new(s * a, s * b);
            v[m - j] = v[j].conj();
        }
        v[n] = Complex::new(self.sqrt_eig[n] * rng.sample::<f64, _>(StandardNormal), 0.0);
        self.fft.process(&mut v);
        v.truncate(n);
        v.into_iter().map(|c| c.re).collect()
    }

    /// A full path on `grid` (which must start at zero): cumulative sum of
    /// increments scaled by dt^H.
    pub fn sample_path(&self, grid: TimeGrid, seed: u64) -> FbmPath {
        assert!(grid.t0() == 0.0, "fBm paths are anchored at time zero");
        assert_eq!(grid.n_steps(), self.n);
        let mut rng = stream(seed, Purpose::FbmCirculant, 0, 0);
        let inc = self.sample_increments(&mut rng);
        let scale = grid.dt().powf(self.hurst.get());
        let mut values = Vec::with_capacity(self.n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for x in inc {
            acc += scale * x;
            values.push(acc);
        }
        let path = FbmPath {
            grid,
            values,
            driving_bm: None,
            hurst: self.hurst,
            seed,
        };
        path.check();
        path
    }
}

/// Production path sampler. Falls back to the dense sampler when the
/// embedding is not nonnegative definite (not observed for H in (1/2, 1),
/// but the fallback keeps the operation total on small grids).
pub fn generate_fbm_circulant(grid: TimeGrid, hurst: HurstParam, seed: u64) -> Result<FbmPath> {
    if grid.n_steps() == 0 {
        return Ok(FbmPath {
            grid,
            values: vec![0.0],
            driving_bm: None,
            hurst,
            seed,
        });
    }
    match CirculantEmbedding::new(grid.n_steps(), hurst) {
        Ok(emb) => Ok(emb.sample_path(grid, seed)),
        Err(Error::Embedding { .. }) if grid.n_steps() <= MAX_EXACT_STEPS => {
            generate_fbm_exact(grid, hurst, seed)
        }
        Err(e) => Err(e),
    }
}
