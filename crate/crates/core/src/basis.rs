//! Cellwise orthogonal polynomial basis on Cartesian elements.
//!
//! Each local function is a product P_a(x − x_j) P_b(y − y_k) of scaled
//! Legendre polynomials, ordered by total degree and then by decreasing a.

use crate::error::{DgError, Result};

/// Derivative multi-indices (order in x, order in y), in storage order.
pub const DERIVS: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

pub const D0: usize = 0;
pub const DX: usize = 1;
pub const DY: usize = 2;
pub const DXX: usize = 3;
pub const DXY: usize = 4;
pub const DYY: usize = 5;
pub const DXXX: usize = 6;
pub const DXXY: usize = 7;
pub const DXYY: usize = 8;
pub const DYYY: usize = 9;

/// k-th derivative of the scaled Legendre polynomial P_a at offset s, cell width h.
pub fn legendre_scaled(a: usize, k: usize, s: f64, h: f64) -> f64 {
    let h2 = h * h;
    match (a, k) {
        (0, 0) => 1.0,
        (1, 0) => s,
        (1, 1) => 1.0,
        (2, 0) => s * s - h2 / 12.0,
        (2, 1) => 2.0 * s,
        (2, 2) => 2.0,
        (3, 0) => s * s * s - 0.15 * h2 * s,
        (3, 1) => 3.0 * s * s - 0.15 * h2,
        (3, 2) => 6.0 * s,
        (3, 3) => 6.0,
        _ => 0.0,
    }
}

/// ∫ P_a² over a cell of width h.
pub fn legendre_mass(a: usize, h: f64) -> f64 {
    match a {
        0 => h,
        1 => h.powi(3) / 12.0,
        2 => h.powi(5) / 180.0,
        3 => h.powi(7) / 2800.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgBasis {
    pub dim: usize,
    pub degree: usize,
    pub modes: Vec<(usize, usize)>,
}

impl DgBasis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(DgError::Unsupported(degree));
        }
        let modes = match dim {
            1 => (0..=degree).map(|a| (a, 0)).collect(),
            2 => {
                let mut v = Vec::new();
                for total in 0..=degree {
                    for b in 0..=total {
                        v.push((total - b, b));
                    }
                }
                v
            }
            _ => return Err(DgError::Config(format!("dimension must be 1 or 2, got {dim}"))),
        };
        Ok(DgBasis { dim, degree, modes })
    }

    pub fn n_local(&self) -> usize {
        self.modes.len()
    }

    /// a^(l) for each local index; in 1D the y-width is taken as 1.
    pub fn mass_diag(&self, dx: f64, dy: f64) -> Vec<f64> {
        self.modes
            .iter()
            .map(|&(a, b)| if self.dim == 1 { legendre_mass(a, dx) } else { legendre_mass(a, dx) * legendre_mass(b, dy) })
            .collect()
    }

    /// ∂x^i ∂y^j v^(l) at offsets (sx, sy) from the cell center.
    pub fn eval(&self, l: usize, deriv: (usize, usize), sx: f64, sy: f64, dx: f64, dy: f64) -> f64 {
        let (a, b) = self.modes[l];
        let (i, j) = deriv;
        if self.dim == 1 {
            if j > 0 {
                return 0.0;
            }
            return legendre_scaled(a, i, sx, dx);
        }
        legendre_scaled(a, i, sx, dx) * legendre_scaled(b, j, sy, dy)
    }

    /// Derivative slots that can be nonzero for this basis, up to total order `order`.
    pub fn active_derivs(&self, order: usize) -> Vec<usize> {
        DERIVS
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| i + j <= order && i + j <= self.degree && (self.dim == 2 || j == 0))
            .map(|(k, _)| k)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadRule;

    #[test]
    fn local_counts() {
        for q in 1..=3 {
            assert_eq!(DgBasis::new(1, q).unwrap().n_local(), q + 1);
            assert_eq!(DgBasis::new(2, q).unwrap().n_local(), (q + 1) * (q + 2) / 2);
        }
        assert_eq!(DgBasis::new(2, 4), Err(DgError::Unsupported(4)));
    }

    #[test]
    fn ordering_in_two_dimensions() {
        let b = DgBasis::new(2, 3).unwrap();
        assert_eq!(
            b.modes,
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]
        );
    }

    // Dense 5-point quadrature is exact for all products in the degree-3 basis.
    fn dense_integral(f: impl Fn(f64, f64) -> f64, dx: f64, dy: f64) -> f64 {
        let r = QuadRule::gauss_legendre(5).unwrap();
        let mut s = 0.0;
        for (&x, &wx) in r.nodes.iter().zip(&r.weights) {
            for (&y, &wy) in r.nodes.iter().zip(&r.weights) {
                s += wx * wy * f(0.5 * dx * x, 0.5 * dy * y);
            }
        }
        s * 0.25 * dx * dy
    }

    #[test]
    fn orthogonal_with_listed_mass() {
        let (dx, dy) = (0.3, 0.7);
        let b = DgBasis::new(2, 3).unwrap();
        let mass = b.mass_diag(dx, dy);
        for l in 0..b.n_local() {
            for k in 0..b.n_local() {
                let v = dense_integral(|x, y| b.eval(l, (0, 0), x, y, dx, dy) * b.eval(k, (0, 0), x, y, dx, dy), dx, dy);
                if l == k {
                    assert!((v - mass[l]).abs() < 1e-13 * mass[l], "l={l}");
                } else {
                    assert!(v.abs() < 1e-16, "l={l} k={k} v={v}");
                }
            }
        }
        assert!((mass[0] - dx * dy).abs() < 1e-15);
        assert!((mass[1] - dx.powi(3) * dy / 12.0).abs() < 1e-15);
        assert!((mass[3] - dx.powi(5) * dy / 180.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_mass() {
        let b = DgBasis::new(1, 3).unwrap();
        let m = b.mass_diag(0.5, 1.0);
        assert!((m[1] - 0.5f64.powi(3) / 12.0).abs() < 1e-16);
        assert!((m[3] - 0.5f64.powi(7) / 2800.0).abs() < 1e-18);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = DgBasis::new(2, 3).unwrap();
        let (dx, dy, h) = (0.4, 0.3, 1e-4);
        let (x, y) = (0.07, -0.05);
        for l in 0..b.n_local() {
            let f = |x: f64, y: f64| b.eval(l, (0, 0), x, y, dx, dy);
            let fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
            let fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
            assert!((b.eval(l, (1, 0), x, y, dx, dy) - fx).abs() < 1e-7);
            assert!((b.eval(l, (0, 1), x, y, dx, dy) - fy).abs() < 1e-7);
        }
    }

    #[test]
    fn active_derivative_slots() {
        assert_eq!(DgBasis::new(1, 2).unwrap().active_derivs(3), vec![D0, DX, DXX]);
        assert_eq!(DgBasis::new(1, 3).unwrap().active_derivs(3), vec![D0, DX, DXX, DXXX]);
        assert_eq!(DgBasis::new(2, 1).unwrap().active_derivs(3), vec![D0, DX, DY]);
        assert_eq!(DgBasis::new(2, 3).unwrap().active_derivs(1), vec![D0, DX, DY]);
    }
}
