//! Midpoint collocation grid and sine/cosine transforms.
//!
//! Collocation nodes sit at the scaled midpoints xs_p = pi (p+1/2) / M.
//! The product midpoint rule integrates cos(k xs) exactly for
//! 0 <= k <= 2M-1, and every integrand assembled by the operators reduces
//! to pure cosine harmonics per direction (each term carries an even number
//! of sine factors), so quadratic and cubic products of fields resolved to
//! N harmonics are integrated exactly once 2M > 3N. The quadrature weight
//! carries the physical scaling dx = 2 dxs per direction.

use crate::{Error, Result};
use ndarray::Array2;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Sin,
    Cos,
}

/// Transform tables between the N x N coefficient space and the M x M
/// collocation grid. Read-only after construction.
#[derive(Debug, Clone)]
pub struct GridWorkspace {
    n_trunc: usize,
    m_grid: usize,
    /// sin_tab[[k-1, p]] = sin(k xs_p), k = 1..=N.
    sin_tab: Array2<f64>,
    cos_tab: Array2<f64>,
}

impl GridWorkspace {
    pub fn new(n_trunc: usize, m_grid: usize) -> Result<Self> {
        assert!(n_trunc >= 1);
        if 2 * m_grid < 3 * n_trunc {
            return Err(Error::Config(format!(
                "collocation grid M={m_grid} under-resolves N={n_trunc}: need 2M >= 3N"
            )));
        }
        let mut sin_tab = Array2::zeros((n_trunc, m_grid));
        let mut cos_tab = Array2::zeros((n_trunc, m_grid));
        for k in 1..=n_trunc {
            for p in 0..m_grid {
                let x = PI * (p as f64 + 0.5) / m_grid as f64;
                sin_tab[[k - 1, p]] = (k as f64 * x).sin();
                cos_tab[[k - 1, p]] = (k as f64 * x).cos();
            }
        }
        Ok(GridWorkspace {
            n_trunc,
            m_grid,
            sin_tab,
            cos_tab,
        })
    }

    /// Smallest comfortable dealiased grid for the truncation.
    pub fn with_default_grid(n_trunc: usize) -> Self {
        GridWorkspace::new(n_trunc, 3 * n_trunc / 2 + 2).expect("default grid is large enough")
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn m_grid(&self) -> usize {
        self.m_grid
    }

    /// Scaled coordinate of collocation index p.
    pub fn scaled_node(&self, p: usize) -> f64 {
        assert!(p < self.m_grid);
        PI * (p as f64 + 0.5) / self.m_grid as f64
    }

    /// Physical coordinate of collocation index p.
    pub fn physical_node(&self, p: usize) -> f64 {
        2.0 * self.scaled_node(p) - PI
    }

    /// 2-D quadrature weight of one collocation node over [-pi,pi]^2.
    pub fn quad_weight(&self) -> f64 {
        let m = self.m_grid as f64;
        4.0 * PI * PI / (m * m)
    }

    fn table(&self, b: Basis) -> &Array2<f64> {
        match b {
            Basis::Sin => &self.sin_tab,
            Basis::Cos => &self.cos_tab,
        }
    }

    /// Evaluate sum_kl c_kl bx(k xs) by(l ys) on the collocation grid.
    pub fn eval(&self, coeffs: &Array2<f64>, bx: Basis, by: Basis) -> Array2<f64> {
        assert_eq!(coeffs.dim(), (self.n_trunc, self.n_trunc));
        self.table(bx).t().dot(coeffs).dot(self.table(by))
    }

    /// Integrals int_O grid(x,y) bx(k xs) by(l ys) dx dy for k,l = 1..=N.
    pub fn project(&self, grid: &Array2<f64>, bx: Basis, by: Basis) -> Array2<f64> {
        assert_eq!(grid.dim(), (self.m_grid, self.m_grid));
        let raw = self.table(bx).dot(grid).dot(&self.table(by).t());
        raw * self.quad_weight()
    }

    /// Quadrature of a grid function over the physical domain.
    pub fn integrate(&self, grid: &Array2<f64>) -> f64 {
        assert_eq!(grid.dim(), (self.m_grid, self.m_grid));
        self.quad_weight() * grid.sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use rand::Rng;

    fn random_coeffs(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = stream(seed, Purpose::FieldBattery, 1, 0);
        Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn undersized_grid_is_refused() {
        assert!(matches!(GridWorkspace::new(8, 11), Err(Error::Config(_))));
        assert!(GridWorkspace::new(8, 12).is_ok());
        let ws = GridWorkspace::with_default_grid(8);
        assert!(2 * ws.m_grid() >= 3 * ws.n_trunc());
    }

    #[test]
    fn constant_integrates_to_the_domain_area() {
        let ws = GridWorkspace::new(3, 6).unwrap();
        let ones = Array2::from_elem((6, 6), 1.0);
        assert!((ws.integrate(&ones) - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn projection_inverts_evaluation_up_to_the_mass_factor() {
        // int sin(k xs)^2 dx = pi per direction, so project(eval(C)) = pi^2 C
        let ws = GridWorkspace::new(4, 8).unwrap();
        for (bx, by) in [
            (Basis::Sin, Basis::Sin),
            (Basis::Cos, Basis::Cos),
            (Basis::Sin, Basis::Cos),
        ] {
            let c = random_coeffs(4, 21);
            let grid = ws.eval(&c, bx, by);
            let back = ws.project(&grid, bx, by);
            for (a, b) in back.iter().zip(c.iter()) {
                assert!((a - PI * PI * b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn evaluation_matches_direct_summation() {
        let ws = GridWorkspace::new(3, 7).unwrap();
        let c = random_coeffs(3, 22);
        let grid = ws.eval(&c, Basis::Cos, Basis::Sin);
        for p in [0, 3, 6] {
            for q in [1, 4] {
                let mut direct = 0.0;
                for k in 1..=3usize {
                    for l in 1..=3usize {
                        direct += c[[k - 1, l - 1]]
                            * (k as f64 * ws.scaled_node(p)).cos()
                            * (l as f64 * ws.scaled_node(q)).sin();
                    }
                }
                assert!((grid[[p, q]] - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn resolved_quadratic_products_integrate_exactly() {
        // total trig degree 2N <= 2M-1 keeps the midpoint rule exact
        let ws = GridWorkspace::new(4, 8).unwrap();
        let c = random_coeffs(4, 23);
        let d = random_coeffs(4, 24);
        let gc = ws.eval(&c, Basis::Sin, Basis::Sin);
        let gd = ws.eval(&d, Basis::Sin, Basis::Sin);
        let quad = ws.integrate(&(&gc * &gd));
        let exact: f64 = PI * PI * (&c * &d).sum();
        assert!((quad - exact).abs() < 1e-11 * (1.0 + exact.abs()));
    }
}
