use std::io::Write;

use super::{EmbeddingError, Positions, Side};
use crate::scalar::Scalar;

/// Per-graph vertex counts on a uniform grid over `[-1, 1]^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityGrid {
    /// Cells per side.
    pub bins: usize,
    /// Row-major (`y` bin outer, `x` bin inner) counts for each graph.
    pub counts: [Vec<u64>; 2],
}

impl DensityGrid {
    pub fn count(&self, side: Side, x_bin: usize, y_bin: usize) -> u64 {
        self.counts[side as usize][y_bin * self.bins + x_bin]
    }

    /// CSV with header `x_bin,y_bin,count_g1,count_g2`, one row per cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x_bin,y_bin,count_g1,count_g2")?;
        for y in 0..self.bins {
            for x in 0..self.bins {
                let i = y * self.bins + x;
                writeln!(w, "{x},{y},{},{}", self.counts[0][i], self.counts[1][i])?;
            }
        }
        w.flush()
    }
}

/// Bins normalized positions of both graphs into square cells of side `cell`,
/// counted from the `(-1, -1)` corner. Unpositioned vertices are skipped.
pub fn export_density_grid<T: Scalar>(positions: &Positions<T>, cell: f64) -> Result<DensityGrid, EmbeddingError> {
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(EmbeddingError::BadCellSize(cell));
    }
    let exact = 2.0 / cell;
    let bins = if (exact - exact.round()).abs() < 1e-9 {
        exact.round() as usize
    } else {
        exact.ceil() as usize
    }
    .max(1);
    let bin = |c: f64| (((c + 1.0) / cell).floor().max(0.0) as usize).min(bins - 1);
    let mut counts = [vec![0u64; bins * bins], vec![0u64; bins * bins]];
    for p in positions.iter() {
        if let Some(pt) = p.point {
            let (x, y) = (bin(pt.x.as_f64()), bin(pt.y.as_f64()));
            counts[p.side as usize][y * bins + x] += 1;
        }
    }
    Ok(DensityGrid { bins, counts })
}
