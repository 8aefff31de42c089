//! Wiener-type integrals of deterministic integrands against sampled fBm
//! paths, plus construction of fBm from a driving Brownian path through the
//! kernel representation (the basis of the dual evaluation cross-check).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::fbm::{kernel_kh, FbmPath, HurstParam, StepFunction, TimeGrid};
use crate::rng::{stream, Purpose};
use crate::Result;

fn node_index(grid: &TimeGrid, b: f64) -> Result<usize> {
    let rel = (b - grid.t0()) / grid.dt();
    let k = rel.round();
    if (rel - k).abs() > 1e-9 * (1.0 + rel.abs()) || k < 0.0 || k > grid.n_steps() as f64 {
        return Err(Error::Alignment(format!(
            "breakpoint {b} does not coincide with a node of the path grid \
             (t0={}, dt={}, n_steps={})",
            grid.t0(),
            grid.dt(),
            grid.n_steps()
        )));
    }
    Ok(k as usize)
}

/// Integral of a step function against the path: exactly
/// sum_i a_i (path(t_{i+1}) - path(t_i)). Breakpoints must coincide with
/// path grid nodes.
pub fn wiener_integral(phi: &StepFunction, path: &FbmPath) -> Result<f64> {
    let mut acc = 0.0;
    for (i, &a) in phi.coefficients().iter().enumerate() {
        let lo = node_index(&path.grid, phi.breakpoints()[i])?;
        let hi = node_index(&path.grid, phi.breakpoints()[i + 1])?;
        acc += a * (path.values[hi] - path.values[lo]);
    }
    Ok(acc)
}

/// Left-point Young sum of a sampled deterministic integrand against the
/// path increments. `phi_at_nodes` holds the integrand at every grid node.
/// A stride-2 coarsening must agree within `tol`, otherwise the refinement
/// check fails with a numerical error.
pub fn wiener_integral_sampled(phi_at_nodes: &[f64], path: &FbmPath, tol: f64) -> Result<f64> {
    let n = path.grid.n_steps();
    assert_eq!(phi_at_nodes.len(), n + 1, "integrand must be sampled at all nodes");
    assert!(n >= 2);
    let mut fine = 0.0;
    for k in 0..n {
        fine += phi_at_nodes[k] * (path.values[k + 1] - path.values[k]);
    }
    let mut coarse = 0.0;
    let mut k = 0;
    while k + 2 <= n {
        coarse += phi_at_nodes[k] * (path.values[k + 2] - path.values[k]);
        k += 2;
    }
    if k < n {
        coarse += phi_at_nodes[k] * (path.values[n] - path.values[k]);
    }
    let diff = (fine - coarse).abs();
    if diff > tol * (1.0 + fine.abs()) {
        return Err(Error::Numerical(format!(
            "Young-sum refinement check failed: fine={fine}, coarse={coarse}, \
             diff={diff}, tol={tol}"
        )));
    }
    Ok(fine)
}

/// Kernel representation values at the requested times:
/// `beta_H(T) = sum_j K(T, m_j) (beta_{j+1} - beta_j)` with midpoint kernel
/// evaluation (the midpoint keeps the integrable s^{1/2-H} blow-up of the
/// kernel at s = 0 away from the evaluation points).
pub fn fbm_values_from_bm(
    bm: &[f64],
    grid: TimeGrid,
    h: HurstParam,
    times: &[f64],
) -> Result<Vec<f64>> {
    assert_eq!(bm.len(), grid.len());
    assert!(grid.t0() == 0.0, "kernel representation is anchored at time zero");
    let dt = grid.dt();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.0 || t > grid.t_end() + 1e-9 * dt {
            return Err(Error::Domain(format!("time {t} outside the driving path span")));
        }
        if t == 0.0 {
            out.push(0.0);
            continue;
        }
        let mut acc = 0.0;
        for j in 0..grid.n_steps() {
            let mid = (j as f64 + 0.5) * dt;
            if mid >= t {
                break;
            }
            acc += kernel_kh(t, mid, h)? * (bm[j + 1] - bm[j]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Draws a Brownian path and pushes it through the kernel representation at
/// every node, recording the driving path. Quadratic in the node count;
/// meant for moderate grids and cross-checks.
pub fn generate_fbm_from_bm(grid: TimeGrid, h: HurstParam, seed: u64) -> Result<FbmPath> {
    assert!(grid.t0() == 0.0, "fBm paths are anchored at time zero");
    let mut rng = stream(seed, Purpose::KernelPath, 0, 0);
    let sd = grid.dt().sqrt();
    let mut bm = Vec::with_capacity(grid.len());
    bm.push(0.0);
    let mut acc = 0.0;
    for _ in 0..grid.n_steps() {
        acc += sd * rng.sample::<f64, _>(StandardNormal);
        bm.push(acc);
    }
    let times = grid.nodes();
    let values = fbm_values_from_bm(&bm, grid, h, &times)?;
    let path = FbmPath {
        grid,
        values,
        driving_bm: Some(bm),
        hurst: h,
        seed,
    };
    path.check();
    Ok(path)
}
