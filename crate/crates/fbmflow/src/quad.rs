//! Quadrature toolkit for the fractional kernel calculus.
//!
//! The kernels in this crate produce three kinds of one dimensional
//! integrals:
//!
//! * smooth integrands: composite Gauss-Legendre;
//! * integrands with an algebraic factor (t - s)^a, a in (-1, 0), at one
//!   endpoint: Gauss-Jacobi rules that absorb the factor into the weight;
//! * integrands that merely behave like s^p, p in (-1, 0), near zero without
//!   being an exact power times a polynomial: the substitution s = tau^(1/(1+p))
//!   flattens the leading singularity and geometric panels absorb the rest.
//!
//! Plain adaptive quadrature is deliberately not offered; near the kernel
//! singularities it either stalls or silently loses digits.

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Gauss-Legendre rule with `n` points, exact on polynomials of degree
    /// 2n - 1. Newton iteration on the three-term recurrence.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_eval(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        QuadRule { nodes, weights }
    }

    /// Apply the rule to `f` on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// P_n(x) and P_n'(x).
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Jacobi rule on [0, 1] for the weight x^a with a > -1: the returned
/// nodes u_i and weights w_i satisfy
///
/// ```text
/// integral_0^1 x^a g(x) dx ~= sum_i w_i g(u_i)
/// ```
///
/// for smooth g, exactly when g is a polynomial of degree <= 2n - 1.
/// Built by Golub-Welsch from the monic Jacobi recurrence coefficients.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(n: usize, a: f64) -> Self {
        assert!(n >= 1 && a > -1.0);
        // recurrence for weight (1 - x)^0 (1 + x)^a on [-1, 1]
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        diag[0] = a / (a + 2.0);
        for (k, d) in diag.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            let q = 2.0 * kf + a;
            *d = a * a / (q * (q + 2.0));
        }
        for (k, e) in off.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            let b2 = if k == 1 {
                4.0 * (a + 1.0) / ((a + 2.0) * (a + 2.0) * (a + 3.0))
            } else {
                let q = 2.0 * kf + a;
                4.0 * kf * kf * (kf + a) * (kf + a) / (q * q * (q * q - 1.0))
            };
            *e = b2.sqrt();
        }
        let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);

        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiag_eigen_first_row(&mut diag, &mut off, &mut first);

        // sort by node, map [-1,1] -> [0,1] with the singular end at 0
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
        let scale = mu0 * 2f64.powf(-(a + 1.0));
        let nodes: Vec<f64> = idx.iter().map(|&i| 0.5 * (diag[i] + 1.0)).collect();
        let weights: Vec<f64> = idx.iter().map(|&i| scale * first[i] * first[i]).collect();
        JacobiRule { exponent: a, nodes, weights }
    }

    /// integral_s^b (t - s)^a g(t) dt for smooth g.
    pub fn integrate_shifted<F: FnMut(f64) -> f64>(&self, s: f64, b: f64, mut g: F) -> f64 {
        let len = b - s;
        let mut acc = 0.0;
        for (u, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(s + len * u);
        }
        acc * len.powf(self.exponent + 1.0)
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by QL with implicit shifts,
/// tracking the first row of the eigenvector matrix (all Golub-Welsch needs).
/// `d` holds the diagonal (overwritten with eigenvalues), `e` the
/// subdiagonal in e[1..n].
fn tridiag_eigen_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    // shift offdiagonal storage: e[i] couples i-1 and i
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 80, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Composite Gauss-Legendre over geometrically graded panels. The panel
/// widths shrink by factor 2 toward `toward` (which must equal `a` or `b`),
/// so integrable endpoint behavior is resolved without adaptive logic.
pub fn integrate_geometric<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    toward_a: bool,
    n_panels: usize,
    rule: &QuadRule,
) -> f64 {
    assert!(b > a && n_panels >= 1);
    let mut acc = 0.0;
    let len = b - a;
    let mut hi = 1.0f64;
    for k in 0..n_panels {
        let lo = if k + 1 == n_panels { 0.0 } else { hi * 0.5 };
        let (pa, pb) = if toward_a {
            (a + len * lo, a + len * hi)
        } else {
            (b - len * hi, b - len * lo)
        };
        acc += rule.integrate(pa, pb, &mut f);
        hi = lo;
    }
    acc
}

/// integral_0^b f(s) ds where f(s) ~ c s^p near zero with p > -1.
///
/// Substitutes s = tau^(1/(1+p)) so the leading power becomes constant, then
/// integrates with geometric grading in tau. Handles the squared fractional
/// kernels, whose exponents approach -1 as H -> 1.
pub fn integrate_power_left<F: FnMut(f64) -> f64>(
    mut f: F,
    b: f64,
    p: f64,
    n_panels: usize,
    rule: &QuadRule,
) -> f64 {
    assert!(b > 0.0 && p > -1.0);
    let q = 1.0 / (1.0 + p);
    let top = b.powf(1.0 + p);
    integrate_geometric(
        |tau: f64| {
            let s = tau.powf(q);
            f(s) * q * tau.powf(q - 1.0)
        },
        0.0,
        top,
        true,
        n_panels,
        rule,
    )
}
