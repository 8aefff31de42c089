//! Rate-of-deformation calculus and the Galerkin nonlinearities.
//!
//! For a stream mode psi = sin(m xs) sin(n ys) the hand-differentiated
//! deformation components are
//!
//!   e11 = (mn/4) psi_mn cos(m xs) cos(n ys) = -e22,
//!   e12 = ((m^2-n^2)/8) psi_mn sin(m xs) sin(n ys),
//!
//! so e11 is a pure cosine series and e12 a pure sine series; every
//! quadrature below therefore reduces to cosine harmonics per direction and
//! the midpoint rule applies at spectral accuracy. Dual-space outputs are
//! reported as pairings against the L^2-orthonormal velocity modes, which
//! makes them directly usable as Galerkin forcing coefficients.

use super::workspace::{Basis, GridWorkspace};
use super::{norm_sobolev, random_field, PhysParams, SpectralField};
use crate::rng::{stream, Purpose};
use crate::Result;
use ndarray::Array2;
use std::f64::consts::PI;

/// Symmetric rate-of-deformation tensor sampled on the collocation grid;
/// e22 = -e11 by incompressibility.
#[derive(Debug, Clone)]
pub struct Deformation {
    e11: Array2<f64>,
    e12: Array2<f64>,
}

impl Deformation {
    pub fn e11(&self) -> &Array2<f64> {
        &self.e11
    }

    pub fn e12(&self) -> &Array2<f64> {
        &self.e12
    }

    pub fn e22(&self) -> Array2<f64> {
        -&self.e11
    }

    /// Pointwise squared Frobenius norm sum_ij e_ij^2 = 2 e11^2 + 2 e12^2.
    pub fn norm_sq(&self) -> Array2<f64> {
        2.0 * (&self.e11 * &self.e11) + 2.0 * (&self.e12 * &self.e12)
    }
}

/// Coefficient array derived from the stream coefficients by a per-mode
/// factor.
fn scaled_coeffs(u: &SpectralField, f: impl Fn(usize, usize) -> f64) -> Array2<f64> {
    let n = u.n_trunc();
    Array2::from_shape_fn((n, n), |(i, j)| u.psi()[[i, j]] * f(i + 1, j + 1))
}

/// Stream coefficient of the L^2-orthonormal velocity mode (m,n).
fn orthonormal_psi(m: usize, n: usize) -> f64 {
    2.0 / (PI * ((m * m + n * n) as f64).sqrt())
}

pub fn deformation_tensor(u: &SpectralField, ws: &GridWorkspace) -> Deformation {
    assert_eq!(u.n_trunc(), ws.n_trunc());
    let c11 = scaled_coeffs(u, |m, n| (m * n) as f64 / 4.0);
    let c12 = scaled_coeffs(u, |m, n| ((m * m) as f64 - (n * n) as f64) / 8.0);
    Deformation {
        e11: ws.eval(&c11, Basis::Cos, Basis::Cos),
        e12: ws.eval(&c12, Basis::Sin, Basis::Sin),
    }
}

/// Shear-thinning viscosity mu = 2 mu0 (epsilon + |e|^2)^{-alpha/2} on the
/// grid; bounded above by PhysParams::viscosity_cap.
pub fn viscosity_mu(def: &Deformation, p: &PhysParams) -> Array2<f64> {
    def.norm_sq()
        .mapv(|q| 2.0 * p.mu0() * (p.epsilon() + q).powf(-0.5 * p.alpha()))
}

/// Constitutive stress on one symmetric tensor [s11, s22, s12].
pub fn stress(s: [f64; 3], p: &PhysParams) -> [f64; 3] {
    let nsq = s[0] * s[0] + s[1] * s[1] + 2.0 * s[2] * s[2];
    let f = 2.0 * p.mu0() * (p.epsilon() + nsq).powf(-0.5 * p.alpha());
    [f * s[0], f * s[1], f * s[2]]
}

/// Pointwise derivative bound of the stress at squared tensor norm
/// `norm_sq`; decreasing in its argument.
pub fn stress_lipschitz_bound(norm_sq: f64, p: &PhysParams) -> f64 {
    assert!(norm_sq >= 0.0);
    let eps = p.epsilon();
    2.0 * p.mu0() * (eps + norm_sq).powf(-0.5 * p.alpha()) * (4.0 + 12.0 / (eps * eps)).sqrt()
}

/// Pairings of a dual-space element with the orthonormal velocity modes.
#[derive(Debug, Clone)]
pub struct DualCoeffs {
    n_trunc: usize,
    c: Array2<f64>,
}

impl DualCoeffs {
    pub fn zeros(n_trunc: usize) -> Self {
        assert!(n_trunc >= 1);
        DualCoeffs {
            n_trunc,
            c: Array2::zeros((n_trunc, n_trunc)),
        }
    }

    fn from_array(c: Array2<f64>) -> Self {
        let (rows, cols) = c.dim();
        assert!(rows == cols && rows >= 1);
        DualCoeffs { n_trunc: rows, c }
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.c
    }

    pub fn coeff(&self, m: usize, n: usize) -> f64 {
        assert!(m >= 1 && n >= 1 && m <= self.n_trunc && n <= self.n_trunc);
        self.c[[m - 1, n - 1]]
    }

    /// Duality pairing with a field on the same truncation.
    pub fn pairing(&self, v: &SpectralField) -> f64 {
        assert_eq!(self.n_trunc, v.n_trunc());
        let mut sum = 0.0;
        for m in 1..=self.n_trunc {
            for n in 1..=self.n_trunc {
                sum += self.coeff(m, n) * v.velocity_coeff(m, n);
            }
        }
        sum
    }

    /// Norm dual to the H^s scale: sup of the pairing over |v|_{H^s} = 1.
    pub fn dual_norm(&self, s: f64) -> Result<f64> {
        if !(s >= super::SOBOLEV_SCALE.0 && s <= super::SOBOLEV_SCALE.1) {
            return Err(crate::Error::Domain(format!(
                "Sobolev index {s} outside the supported scale"
            )));
        }
        let mut sum = 0.0;
        for m in 1..=self.n_trunc {
            for n in 1..=self.n_trunc {
                let c = self.coeff(m, n);
                sum += ((m * m + n * n) as f64).powf(-s) * c * c;
            }
        }
        Ok(sum.sqrt())
    }
}

/// Velocity components of a field on the collocation grid.
pub fn velocity_grids(u: &SpectralField, ws: &GridWorkspace) -> (Array2<f64>, Array2<f64>) {
    assert_eq!(u.n_trunc(), ws.n_trunc());
    let c1 = scaled_coeffs(u, |_, n| n as f64 / 2.0);
    let c2 = scaled_coeffs(u, |m, _| -(m as f64) / 2.0);
    (
        ws.eval(&c1, Basis::Sin, Basis::Cos),
        ws.eval(&c2, Basis::Cos, Basis::Sin),
    )
}

/// Velocity gradient grids (du1/dx, du1/dy, du2/dx); du2/dy = -du1/dx.
fn gradient_grids(u: &SpectralField, ws: &GridWorkspace) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let c1x = scaled_coeffs(u, |m, n| (m * n) as f64 / 4.0);
    let c1y = scaled_coeffs(u, |_, n| -((n * n) as f64) / 4.0);
    let c2x = scaled_coeffs(u, |m, _| (m * m) as f64 / 4.0);
    (
        ws.eval(&c1x, Basis::Cos, Basis::Cos),
        ws.eval(&c1y, Basis::Sin, Basis::Sin),
        ws.eval(&c2x, Basis::Sin, Basis::Sin),
    )
}

/// Galerkin projection of the shear-thinning operator: coefficient (m,n) is
/// int mu(u) e_ij(u) e_ij(w_mn) over the domain.
pub fn operator_n(u: &SpectralField, p: &PhysParams, ws: &GridWorkspace) -> DualCoeffs {
    assert_eq!(u.n_trunc(), ws.n_trunc());
    let def = deformation_tensor(u, ws);
    let mu = viscosity_mu(&def, p);
    let pc = ws.project(&(&mu * def.e11()), Basis::Cos, Basis::Cos);
    let qc = ws.project(&(&mu * def.e12()), Basis::Sin, Basis::Sin);
    let n_trunc = u.n_trunc();
    let c = Array2::from_shape_fn((n_trunc, n_trunc), |(i, j)| {
        let (m, n) = (i + 1, j + 1);
        let beta = orthonormal_psi(m, n);
        // sum_ij e_ij(u) e_ij(w) = 2 e11 e11(w) + 2 e12 e12(w)
        beta * ((m * n) as f64 / 2.0 * pc[[i, j]]
            + ((m * m) as f64 - (n * n) as f64) / 4.0 * qc[[i, j]])
    });
    DualCoeffs::from_array(c)
}

/// Advection form b(u,v,w) = sum_ij int u_i (dv_j/dx_i) w_j.
pub fn trilinear_b(
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
    ws: &GridWorkspace,
) -> f64 {
    assert_eq!(u.n_trunc(), ws.n_trunc());
    assert_eq!(v.n_trunc(), ws.n_trunc());
    assert_eq!(w.n_trunc(), ws.n_trunc());
    let (u1, u2) = velocity_grids(u, ws);
    let (v1x, v1y, v2x) = gradient_grids(v, ws);
    let (w1, w2) = velocity_grids(w, ws);
    let integrand =
        (&u1 * &v1x + &u2 * &v1y) * &w1 + (&u1 * &v2x - &u2 * &v1x) * &w2;
    ws.integrate(&integrand)
}

/// Galerkin projection of the self-advection: coefficient (m,n) equals
/// trilinear_b(u, u, w_mn).
pub fn operator_b(u: &SpectralField, ws: &GridWorkspace) -> DualCoeffs {
    assert_eq!(u.n_trunc(), ws.n_trunc());
    let (u1, u2) = velocity_grids(u, ws);
    let (v1x, v1y, v2x) = gradient_grids(u, ws);
    let g1 = &u1 * &v1x + &u2 * &v1y;
    let g2 = &u1 * &v2x - &u2 * &v1x;
    let psc = ws.project(&g1, Basis::Sin, Basis::Cos);
    let pcs = ws.project(&g2, Basis::Cos, Basis::Sin);
    let n_trunc = u.n_trunc();
    let c = Array2::from_shape_fn((n_trunc, n_trunc), |(i, j)| {
        let (m, n) = (i + 1, j + 1);
        orthonormal_psi(m, n) * (n as f64 / 2.0 * psc[[i, j]] - m as f64 / 2.0 * pcs[[i, j]])
    });
    DualCoeffs::from_array(c)
}

/// Largest observed ratio |b(a, z, a)| / (|a| |z|_{H1} |a|_{H1}) over a
/// deterministic random battery; the constant gating the attractor
/// condition.
pub fn measure_trilinear_constant(
    n_trunc: usize,
    ws: &GridWorkspace,
    samples: usize,
    seed: u64,
) -> f64 {
    assert!(samples >= 1);
    let mut best = 0.0f64;
    for i in 0..samples {
        let mut rng = stream(seed, Purpose::FieldBattery, 2, i as u64);
        let a = random_field(n_trunc, 0.5, &mut rng);
        let z = random_field(n_trunc, 0.5, &mut rng);
        let val = trilinear_b(&a, &z, &a, ws).abs();
        let denom = norm_sobolev(&a, 0.0).unwrap()
            * norm_sobolev(&z, 1.0).unwrap()
            * norm_sobolev(&a, 1.0).unwrap();
        if denom > 0.0 {
            best = best.max(val / denom);
        }
    }
    best
}

/// Largest observed |N(u)|_{V'} / |u|_V over a deterministic battery.
pub fn measure_n_dual_constant(
    n_trunc: usize,
    p: &PhysParams,
    ws: &GridWorkspace,
    samples: usize,
    seed: u64,
) -> f64 {
    assert!(samples >= 1);
    let mut best = 0.0f64;
    for i in 0..samples {
        let mut rng = stream(seed, Purpose::FieldBattery, 3, i as u64);
        let u = random_field(n_trunc, 0.5, &mut rng);
        let dual = operator_n(&u, p, ws).dual_norm(2.0).unwrap();
        let denom = norm_sobolev(&u, 2.0).unwrap();
        if denom > 0.0 {
            best = best.max(dual / denom);
        }
    }
    best
}

/// Largest observed |B(u)|_{V'} / (|u| |u|_V) over a deterministic battery.
pub fn measure_b_dual_constant(
    n_trunc: usize,
    ws: &GridWorkspace,
    samples: usize,
    seed: u64,
) -> f64 {
    assert!(samples >= 1);
    let mut best = 0.0f64;
    for i in 0..samples {
        let mut rng = stream(seed, Purpose::FieldBattery, 4, i as u64);
        let u = random_field(n_trunc, 0.5, &mut rng);
        let dual = operator_b(&u, ws).dual_norm(2.0).unwrap();
        let denom = norm_sobolev(&u, 0.0).unwrap() * norm_sobolev(&u, 2.0).unwrap();
        if denom > 0.0 {
            best = best.max(dual / denom);
        }
    }
    best
}
