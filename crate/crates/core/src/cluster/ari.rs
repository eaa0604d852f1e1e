use crate::data::Partition;
use crate::error::{Error, Result};

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Pair sums `(Σ C(n_ij,2), Σ C(a_i,2), Σ C(b_j,2), C(n,2))`.
fn pair_counts(a: &Partition, b: &Partition) -> Result<(f64, f64, f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (ka, kb) = (a.k(), b.k());
    let mut table = vec![0usize; ka * kb];
    for (&x, &y) in a.assignment().iter().zip(b.assignment()) {
        table[x * kb + y] += 1;
    }
    let cells: f64 = table.iter().map(|&c| comb2(c)).sum();
    let rows: f64 = a.sizes().into_iter().map(comb2).sum();
    let cols: f64 = b.sizes().into_iter().map(comb2).sum();
    Ok((cells, rows, cols, comb2(a.len())))
}

/// Fraction of element pairs on which the partitions agree.
pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let (cells, rows, cols, total) = pair_counts(a, b)?;
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok((total + 2.0 * cells - rows - cols) / total)
}

/// Chance-corrected Rand index from the contingency table. Two trivial
/// partitions of the same kind give 1.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let (cells, rows, cols, total) = pair_counts(a, b)?;
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = rows * cols / total;
    let max = 0.5 * (rows + cols);
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((cells - expected) / denom)
}
