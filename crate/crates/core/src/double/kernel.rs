use crate::error::Result;
use crate::number::Grid;

pub(crate) struct MinPlus {
    pub grid: Grid,
    /// Row-major flags; empty when no shell was given.
    pub boundary: Vec<bool>,
}

/// `out[x][y] = min_{z < inner} left[x][z] + right[z][y]` for `x < rows`, `y < cols`.
///
/// With `shell = Some(s)`, indices `z ≥ s` form the outermost shell of the
/// evaluation range, and an entry is flagged when its minimum is attained
/// only there.
pub(crate) fn min_plus(
    left: &Grid,
    right: &Grid,
    rows: usize,
    inner: usize,
    cols: usize,
    shell: Option<usize>,
) -> Result<MinPlus> {
    assert!(rows <= left.rows() && inner <= left.cols());
    assert!(inner <= right.rows() && cols <= right.cols());
    assert!(inner > 0, "min-plus over an empty index set");
    let (denom, l, r) = Grid::align(left, right)?;
    let (lc, rc) = (left.cols(), right.cols());
    let split = shell.unwrap_or(inner).min(inner);

    let mut data = vec![0i64; rows * cols];
    let mut boundary = if shell.is_some() { vec![false; rows * cols] } else { Vec::new() };
    let mut inside = vec![i64::MAX; cols];
    let mut outside = vec![i64::MAX; cols];
    for x in 0..rows {
        inside.fill(i64::MAX);
        outside.fill(i64::MAX);
        let lrow = &l[x * lc..x * lc + inner];
        for (z, &lxz) in lrow.iter().enumerate() {
            let rrow = &r[z * rc..z * rc + cols];
            let best = if z < split { &mut inside } else { &mut outside };
            for (b, &rzy) in best.iter_mut().zip(rrow) {
                let v = lxz + rzy;
                if v < *b {
                    *b = v;
                }
            }
        }
        let out = &mut data[x * cols..(x + 1) * cols];
        for y in 0..cols {
            out[y] = inside[y].min(outside[y]);
            if shell.is_some() {
                boundary[x * cols + y] = outside[y] < inside[y];
            }
        }
    }
    Ok(MinPlus { grid: Grid::from_raw(rows, cols, denom, data)?, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::Dist;

    #[test]
    fn matches_brute_force() {
        let a = Grid::from_fn(3, 4, |i, j| Dist::new((i * 7 + j * 3) as i64 % 5, 2).unwrap()).unwrap();
        let b = Grid::from_fn(4, 2, |i, j| Dist::int(((i + 2 * j) % 3) as i64)).unwrap();
        let out = min_plus(&a, &b, 3, 4, 2, Some(2)).unwrap();
        for x in 0..3 {
            for y in 0..2 {
                let terms: Vec<Dist> = (0..4).map(|z| a.get(x, z) + b.get(z, y)).collect();
                let best = *terms.iter().min().unwrap();
                assert_eq!(out.grid.get(x, y), best);
                let inner_best = *terms[..2].iter().min().unwrap();
                assert_eq!(out.boundary[x * 2 + y], inner_best > best);
            }
        }
    }
}
