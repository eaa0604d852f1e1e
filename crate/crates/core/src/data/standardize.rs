//! Centering and scaling of mixed data.
//!
//! Quantitative columns are centered and divided by their population
//! standard deviation (1/n convention). A qualitative variable with levels
//! `1..L` expands into `L` indicator columns; indicator `s` is centered by its
//! relative frequency `π_s` and divided by `√π_s`. Stacking these columns and
//! scaling by `1/√n` gives the mixed-data matrix whose squared singular values
//! are the principal-component eigenvalues of mixed data: each quantitative
//! column has unit norm and a lone qualitative variable has all nonzero
//! eigenvalues equal to one.

use std::ops::Range;

use ndarray::{Array2, ShapeBuilder};
use serde::{Deserialize, Serialize};

use super::dataset::{Column, Dataset, VariableKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Standardized design. `z` is stored column-major.
#[derive(Debug, Clone)]
pub struct StandardizedMatrix<T> {
    z: Array2<T>,
    centers: Vec<T>,
    scales: Vec<T>,
    column_map: ColumnMap,
}

/// For each original variable, the range of standardized columns it
/// occupies, plus its kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    ranges: Vec<Range<usize>>,
    kinds: Vec<VariableKind>,
}

impl ColumnMap {
    pub fn new(ranges: Vec<Range<usize>>, kinds: Vec<VariableKind>) -> Result<Self> {
        if ranges.len() != kinds.len() {
            return Err(Error::SizeMismatch {
                left: ranges.len(),
                right: kinds.len(),
            });
        }
        let mut next = 0;
        for r in &ranges {
            if r.start != next || r.end <= r.start {
                return Err(Error::Invalid("column ranges must tile 0..width".into()));
            }
            next = r.end;
        }
        Ok(ColumnMap { ranges, kinds })
    }

    /// One column per variable.
    pub fn identity(p: usize) -> Self {
        ColumnMap {
            ranges: (0..p).map(|j| j..j + 1).collect(),
            kinds: vec![VariableKind::Quantitative; p],
        }
    }

    pub fn variables(&self) -> usize {
        self.ranges.len()
    }

    pub fn width(&self) -> usize {
        self.ranges.last().map(|r| r.end).unwrap_or(0)
    }

    pub fn range(&self, variable: usize) -> Range<usize> {
        self.ranges[variable].clone()
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn kind(&self, variable: usize) -> VariableKind {
        self.kinds[variable]
    }

    /// Original variable owning each standardized column.
    pub fn owners(&self) -> Vec<usize> {
        let mut out = vec![0; self.width()];
        for (v, r) in self.ranges.iter().enumerate() {
            for c in r.clone() {
                out[c] = v;
            }
        }
        out
    }
}

impl<T: Scalar> StandardizedMatrix<T> {
    /// Wrap an already-standardized numeric matrix (one column per variable).
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map(Vec::len).unwrap_or(0);
        let mut z = Array2::<T>::zeros((n, p).f());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "column length",
                    expected: n,
                    found: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                z[[i, j]] = v;
            }
        }
        Ok(StandardizedMatrix {
            z,
            centers: vec![T::zero(); p],
            scales: vec![T::one(); p],
            column_map: ColumnMap::identity(p),
        })
    }

    pub fn z(&self) -> &Array2<T> {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    /// Number of standardized columns.
    pub fn width(&self) -> usize {
        self.z.ncols()
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }

    pub fn column_map(&self) -> &ColumnMap {
        &self.column_map
    }

    /// Contiguous column slice.
    pub fn col(&self, j: usize) -> &[T] {
        let n = self.n();
        let data = self.z.as_slice_memory_order().expect("standardized matrix is contiguous");
        &data[j * n..(j + 1) * n]
    }

    /// Row subset, keeping the original centering and scaling.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let p = self.width();
        let mut z = Array2::<T>::zeros((rows.len(), p).f());
        for j in 0..p {
            let c = self.col(j);
            for (i, &r) in rows.iter().enumerate() {
                z[[i, j]] = c[r];
            }
        }
        StandardizedMatrix {
            z,
            centers: self.centers.clone(),
            scales: self.scales.clone(),
            column_map: self.column_map.clone(),
        }
    }

    /// Subset of original variables with their expanded columns.
    pub fn select_variables(&self, vars: &[usize]) -> Self {
        let mut cols = Vec::new();
        let mut ranges = Vec::new();
        let mut kinds = Vec::new();
        for &v in vars {
            let r = self.column_map.range(v);
            let start = cols.len();
            cols.extend(r.clone());
            ranges.push(start..cols.len());
            kinds.push(self.column_map.kind(v));
        }
        let n = self.n();
        let mut z = Array2::<T>::zeros((n, cols.len()).f());
        for (k, &c) in cols.iter().enumerate() {
            z.column_mut(k).assign(&self.z.column(c));
        }
        StandardizedMatrix {
            z,
            centers: cols.iter().map(|&c| self.centers[c]).collect(),
            scales: cols.iter().map(|&c| self.scales[c]).collect(),
            column_map: ColumnMap { ranges, kinds },
        }
    }
}

/// Center and scale every column; expand qualitative variables.
pub fn standardize<T: Scalar>(d: &Dataset<T>) -> Result<StandardizedMatrix<T>> {
    let n = d.n();
    if n == 0 {
        return Err(Error::Invalid("dataset has no observations".into()));
    }
    let width: usize = d.columns().iter().map(Column::width).sum();
    let mut z = Array2::<T>::zeros((n, width).f());
    let mut centers = Vec::with_capacity(width);
    let mut scales = Vec::with_capacity(width);
    let mut ranges = Vec::with_capacity(d.p());
    let nf = T::from_usize_lossy(n);
    let mut next = 0;
    for (j, col) in d.columns().iter().enumerate() {
        match col {
            Column::Quantitative(x) => {
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Invalid(format!("column {j} has non-finite values")));
                }
                if col.is_degenerate() {
                    return Err(Error::ConstantColumn { column: j });
                }
                let mut m = x.iter().copied().sum::<T>() / nf;
                // second pass removes the rounding left in the first mean
                m += x.iter().map(|&v| v - m).sum::<T>() / nf;
                let var = x.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / nf;
                let sd = var.sqrt();
                if sd == T::zero() {
                    return Err(Error::ConstantColumn { column: j });
                }
                let mut out = z.column_mut(next);
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = (v - m) / sd;
                }
                centers.push(m);
                scales.push(sd);
                ranges.push(next..next + 1);
                next += 1;
            }
            Column::Qualitative { codes, levels } => {
                if levels.len() < 2 {
                    return Err(Error::DegenerateQualitative { column: j });
                }
                let mut counts = vec![0usize; levels.len()];
                for &c in codes {
                    counts[c] += 1;
                }
                if let Some(l) = counts.iter().position(|&c| c == 0) {
                    return Err(Error::EmptyCategory {
                        column: j,
                        level: levels[l].clone(),
                    });
                }
                for (l, &count) in counts.iter().enumerate() {
                    let freq = T::from_usize_lossy(count) / nf;
                    let scale = freq.sqrt();
                    let mut out = z.column_mut(next + l);
                    for (o, &c) in out.iter_mut().zip(codes) {
                        let ind = if c == l { T::one() } else { T::zero() };
                        *o = (ind - freq) / scale;
                    }
                    centers.push(freq);
                    scales.push(scale);
                }
                ranges.push(next..next + levels.len());
                next += levels.len();
            }
        }
    }
    Ok(StandardizedMatrix {
        z,
        centers,
        scales,
        column_map: ColumnMap {
            ranges,
            kinds: d.kinds(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::dataset::ResponseKind;
    use approx::assert_abs_diff_eq;

    fn quant(cols: Vec<Vec<f64>>) -> Dataset<f64> {
        let n = cols[0].len();
        Dataset::from_quantitative(cols, vec![0.0; n], ResponseKind::Continuous).unwrap()
    }

    #[test]
    fn symmetric_three_point_column() {
        let s = standardize(&quant(vec![vec![1.0, 2.0, 3.0]])).unwrap();
        let sd = (2.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(s.col(0)[0], -1.0 / sd, epsilon = 1e-15);
        assert_abs_diff_eq!(s.col(0)[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.col(0)[2], 1.0 / sd, epsilon = 1e-15);
        assert_abs_diff_eq!(s.centers()[0], 2.0);
    }

    #[test]
    fn constant_column_is_rejected() {
        let err = standardize(&quant(vec![vec![1.0, 2.0], vec![0.1, 0.1]])).unwrap_err();
        assert!(matches!(err, Error::ConstantColumn { column: 1 }));
    }

    #[test]
    fn single_category_is_rejected() {
        let d = Dataset::<f64>::new(
            vec![Column::Qualitative {
                codes: vec![0, 0, 0],
                levels: vec!["a".into()],
            }],
            vec!["g".into()],
            vec![0.0; 3],
            ResponseKind::Continuous,
        )
        .unwrap();
        assert!(matches!(
            standardize(&d).unwrap_err(),
            Error::DegenerateQualitative { column: 0 }
        ));
    }

    #[test]
    fn unobserved_level_is_rejected() {
        let d = Dataset::<f64>::new(
            vec![Column::Qualitative {
                codes: vec![0, 1, 0],
                levels: vec!["a".into(), "b".into(), "c".into()],
            }],
            vec!["g".into()],
            vec![0.0; 3],
            ResponseKind::Continuous,
        )
        .unwrap();
        match standardize(&d).unwrap_err() {
            Error::EmptyCategory { column, level } => {
                assert_eq!(column, 0);
                assert_eq!(level, "c");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn select_variables_keeps_blocks() {
        let d = Dataset::<f64>::new(
            vec![
                Column::Quantitative(vec![1.0, 2.0, 4.0, 3.0]),
                Column::Qualitative {
                    codes: vec![0, 1, 2, 1],
                    levels: vec!["a".into(), "b".into(), "c".into()],
                },
            ],
            vec!["x".into(), "g".into()],
            vec![0.0; 4],
            ResponseKind::Continuous,
        )
        .unwrap();
        let s = standardize(&d).unwrap();
        assert_eq!(s.width(), 4);
        let sub = s.select_variables(&[1]);
        assert_eq!(sub.width(), 3);
        assert_eq!(sub.column_map().range(0), 0..3);
        assert_eq!(sub.col(2), s.col(3));
    }
}
