use super::SaliencyMap;
use crate::imgcore::Plane;

pub const THIRDS_CELLS: usize = 25;

/// Cumulative cell boundaries in twelfths: bands of width 1/6 centered on
/// the thirds lines, with 1/4 margins and 1/6 between the bands.
const BOUNDARY_TWELFTHS: [usize; 6] = [0, 3, 5, 7, 9, 12];

/// Mean saliency over the 5×5 composition grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ThirdsMap([f64; THIRDS_CELLS]);

impl ThirdsMap {
    pub fn values(&self) -> &[f64; THIRDS_CELLS] {
        &self.0
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.0[row * 5 + col]
    }
}

/// Pixel boundaries of the five grid bands along an axis of length `len`,
/// rounding the cumulative fractions half up. The bands tile `0..len`.
pub fn thirds_boundaries(len: usize) -> [usize; 6] {
    BOUNDARY_TWELFTHS.map(|t| (2 * len * t + 12) / 24)
}

pub fn thirds_map_of_plane(p: &Plane) -> ThirdsMap {
    let cols = thirds_boundaries(p.width());
    let rows = thirds_boundaries(p.height());
    let mut cells = [0.0; THIRDS_CELLS];
    for r in 0..5 {
        for c in 0..5 {
            let (x0, x1, y0, y1) = (cols[c], cols[c + 1], rows[r], rows[r + 1]);
            let area = (x1 - x0) * (y1 - y0);
            if area == 0 {
                continue;
            }
            let mut sum = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    sum += p.get(x, y);
                }
            }
            cells[r * 5 + c] = sum / area as f64;
        }
    }
    ThirdsMap(cells)
}

/// Average saliency in each cell of the rule-of-thirds grid.
pub fn thirds_map(sal: &SaliencyMap) -> ThirdsMap {
    thirds_map_of_plane(sal.plane())
}
