use crate::error::{DgError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n == 0 || !a.is_finite() || !b.is_finite() {
            return Err(DgError::Config(format!("bad axis [{a}, {b}] with {n} cells")));
        }
        Ok(Axis { a, b, n })
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Center of cell j (0-based).
    pub fn center(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * self.h()
    }

    /// Cell index containing x, clamped to the axis.
    pub fn locate(&self, x: f64) -> usize {
        let j = ((x - self.a) / self.h()).floor();
        if j < 0.0 {
            0
        } else {
            (j as usize).min(self.n - 1)
        }
    }
}

/// Uniform Cartesian mesh. A 1D mesh carries a single dummy cell of width 1 in y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianMesh {
    pub dim: usize,
    pub x: Axis,
    pub y: Axis,
}

impl CartesianMesh {
    pub fn new_1d(a: f64, b: f64, j: usize) -> Result<Self> {
        Ok(CartesianMesh { dim: 1, x: Axis::new(a, b, j)?, y: Axis { a: -0.5, b: 0.5, n: 1 } })
    }

    pub fn new_2d(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        Ok(CartesianMesh { dim: 2, x: Axis::new(x.0, x.1, nx)?, y: Axis::new(y.0, y.1, ny)? })
    }

    pub fn dx(&self) -> f64 {
        self.x.h()
    }

    pub fn dy(&self) -> f64 {
        self.y.h()
    }

    pub fn n_elem(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn elem(&self, i: usize, j: usize) -> usize {
        j * self.x.n + i
    }

    pub fn elem_ij(&self, e: usize) -> (usize, usize) {
        (e % self.x.n, e / self.x.n)
    }

    pub fn center(&self, e: usize) -> (f64, f64) {
        let (i, j) = self.elem_ij(e);
        if self.dim == 1 {
            (self.x.center(i), 0.0)
        } else {
            (self.x.center(i), self.y.center(j))
        }
    }

    pub fn min_h(&self) -> f64 {
        if self.dim == 1 {
            self.dx()
        } else {
            self.dx().min(self.dy())
        }
    }

    pub fn volume(&self) -> f64 {
        let lx = self.x.b - self.x.a;
        if self.dim == 1 {
            lx
        } else {
            lx * (self.y.b - self.y.a)
        }
    }

    /// Element containing (x, y), clamped to the domain.
    pub fn locate(&self, x: f64, y: f64) -> usize {
        let i = self.x.locate(x);
        let j = if self.dim == 1 { 0 } else { self.y.locate(y) };
        self.elem(i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_centers() {
        let m = CartesianMesh::new_1d(-60.0, 60.0, 400).unwrap();
        assert!((m.dx() - 0.3).abs() < 1e-14);
        assert!((m.x.center(0) - (-60.0 + 0.15)).abs() < 1e-12);
        let m2 = CartesianMesh::new_2d((-2.0, 2.0), (-1.0, 1.0), 20, 10).unwrap();
        assert_eq!(m2.n_elem(), 200);
        assert_eq!(m2.elem_ij(m2.elem(3, 7)), (3, 7));
        assert!((m2.min_h() - 0.2).abs() < 1e-15);
        assert_eq!(m2.locate(-2.5, 0.95), m2.elem(0, 9));
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(CartesianMesh::new_1d(1.0, 1.0, 10).is_err());
        assert!(CartesianMesh::new_1d(0.0, 1.0, 0).is_err());
    }
}
