use crate::error::{Result, SimError};

/// Ghost layers on each side of the interior.
pub const N_GHOST: usize = 2;

/// Uniform cell-centered grid on [-L, L] in the Lagrangian mass coordinate.
///
/// Padded arrays have length `n_cells + 2 * N_GHOST`; interior cell `i`
/// lives at padded index `i + N_GHOST`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassGrid {
    half_width: f64,
    n_cells: usize,
    dx: f64,
}

pub fn make_grid(half_width: f64, n_cells: usize) -> Result<MassGrid> {
    MassGrid::new(half_width, n_cells)
}

impl MassGrid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SimError::InvalidGrid(format!(
                "half width must be finite and > 0, got {half_width}"
            )));
        }
        if n_cells < 8 || !n_cells.is_multiple_of(2) {
            return Err(SimError::InvalidGrid(format!(
                "cell count must be even and >= 8, got {n_cells}"
            )));
        }
        Ok(Self {
            half_width,
            n_cells,
            dx: 2.0 * half_width / n_cells as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n_ghost(&self) -> usize {
        N_GHOST
    }

    pub fn padded_len(&self) -> usize {
        self.n_cells + 2 * N_GHOST
    }

    /// Center of interior cell `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx
    }

    /// Center of padded cell `j` (ghosts included, may lie outside [-L, L]).
    #[inline]
    pub fn x_padded(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 - N_GHOST as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    /// Interior view of a padded array.
    #[inline]
    pub fn interior<'a>(&self, padded: &'a [f64]) -> &'a [f64] {
        &padded[N_GHOST..N_GHOST + self.n_cells]
    }

    #[inline]
    pub fn interior_mut<'a>(&self, padded: &'a mut [f64]) -> &'a mut [f64] {
        &mut padded[N_GHOST..N_GHOST + self.n_cells]
    }

    /// Same cell layout, tolerant to roundoff in L.
    pub fn same_layout(&self, other: &MassGrid) -> bool {
        self.n_cells == other.n_cells
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_spacing_and_first_center() {
        let g = make_grid(1.0, 8).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.x(0), -0.875);
        assert_eq!(g.x(7), 0.875);
        assert_eq!(g.dx() * g.n_cells() as f64, 2.0);
    }

    #[test]
    fn default_grid_spacing() {
        let g = make_grid(16.0, 512).unwrap();
        assert_eq!(g.dx(), 0.0625);
        assert_eq!(g.padded_len(), 516);
        assert_eq!(g.x_padded(0), -16.0 - 1.5 * 0.0625);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(make_grid(1.0, 7).is_err());
        assert!(make_grid(1.0, 6).is_err());
        assert!(make_grid(0.0, 8).is_err());
        assert!(make_grid(-2.0, 8).is_err());
    }
}
