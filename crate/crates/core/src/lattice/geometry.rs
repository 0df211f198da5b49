use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Direction of a nearest-neighbour hop, always oriented toward increasing
/// coordinate (wrapping across a periodic seam).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A nearest-neighbour bond oriented `from -> to` along `+axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub axis: Axis,
}

/// Square lattice of `nx * ny` sites with unit spacing.
///
/// Sites are indexed row-major with `x` fastest: `i = y * nx + x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    nx: usize,
    ny: usize,
    bc_x: Boundary,
    bc_y: Boundary,
}

impl LatticeGeometry {
    pub fn new(nx: usize, ny: usize, bc_x: Boundary, bc_y: Boundary) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::config(format!("lattice needs nx >= 1 and ny >= 1, got {nx}x{ny}")));
        }
        // A periodic axis of length < 3 would double-count the wrap bond.
        if bc_x == Boundary::Periodic && nx < 3 {
            return Err(Error::config(format!("periodic x needs nx >= 3, got {nx}")));
        }
        if bc_y == Boundary::Periodic && ny < 3 {
            return Err(Error::config(format!("periodic y needs ny >= 3, got {ny}")));
        }
        Ok(Self { nx, ny, bc_x, bc_y })
    }

    pub fn open(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, Boundary::Open, Boundary::Open)
    }

    pub fn periodic_y(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, Boundary::Open, Boundary::Periodic)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bc_x(&self) -> Boundary {
        self.bc_x
    }

    pub fn bc_y(&self) -> Boundary {
        self.bc_y
    }

    pub fn num_sites(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny);
        y * self.nx + x
    }

    #[inline]
    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.nx, i / self.nx)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.nx && y < self.ny
    }

    pub fn check_site(&self, (x, y): (usize, usize)) -> Result<usize> {
        if self.contains(x, y) {
            Ok(self.index(x, y))
        } else {
            Err(Error::config(format!(
                "site ({x}, {y}) outside the {}x{} lattice",
                self.nx, self.ny
            )))
        }
    }

    /// Neighbour of `(x, y)` one step toward `+axis`, honouring the boundary condition.
    pub fn forward(&self, x: usize, y: usize, axis: Axis) -> Option<(usize, usize)> {
        match axis {
            Axis::X if x + 1 < self.nx => Some((x + 1, y)),
            Axis::X if self.bc_x == Boundary::Periodic => Some((0, y)),
            Axis::Y if y + 1 < self.ny => Some((x, y + 1)),
            Axis::Y if self.bc_y == Boundary::Periodic => Some((x, 0)),
            _ => None,
        }
    }

    /// Neighbour of `(x, y)` one step toward `-axis`.
    pub fn backward(&self, x: usize, y: usize, axis: Axis) -> Option<(usize, usize)> {
        match axis {
            Axis::X if x > 0 => Some((x - 1, y)),
            Axis::X if self.bc_x == Boundary::Periodic => Some((self.nx - 1, y)),
            Axis::Y if y > 0 => Some((x, y - 1)),
            Axis::Y if self.bc_y == Boundary::Periodic => Some((x, self.ny - 1)),
            _ => None,
        }
    }

    /// Every undirected nearest-neighbour bond exactly once, oriented toward `+axis`.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::with_capacity(2 * self.num_sites());
        for y in 0..self.ny {
            for x in 0..self.nx {
                let from = self.index(x, y);
                for axis in [Axis::X, Axis::Y] {
                    if let Some((xn, yn)) = self.forward(x, y, axis) {
                        out.push(Bond { from, to: self.index(xn, yn), axis });
                    }
                }
            }
        }
        out
    }

    /// Distance (in sites) from `(x, y)` to the nearest open boundary; `usize::MAX`
    /// if both axes are periodic.
    pub fn distance_to_open_edge(&self, x: usize, y: usize) -> usize {
        let mut d = usize::MAX;
        if self.bc_x == Boundary::Open {
            d = d.min(x).min(self.nx - 1 - x);
        }
        if self.bc_y == Boundary::Open {
            d = d.min(y).min(self.ny - 1 - y);
        }
        d
    }
}
