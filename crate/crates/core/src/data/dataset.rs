use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Quantitative,
    Qualitative,
}

/// One predictor column.
#[derive(Debug, Clone, PartialEq)]
pub enum Column<T> {
    Quantitative(Vec<T>),
    /// `codes[i]` indexes into `levels`.
    Qualitative { codes: Vec<usize>, levels: Vec<String> },
}

impl<T: Scalar> Column<T> {
    pub fn len(&self) -> usize {
        match self {
            Column::Quantitative(v) => v.len(),
            Column::Qualitative { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> VariableKind {
        match self {
            Column::Quantitative(_) => VariableKind::Quantitative,
            Column::Qualitative { .. } => VariableKind::Qualitative,
        }
    }

    /// Number of standardized columns this variable expands into.
    pub fn width(&self) -> usize {
        match self {
            Column::Quantitative(_) => 1,
            Column::Qualitative { levels, .. } => levels.len(),
        }
    }

    fn take_rows(&self, rows: &[usize]) -> Self {
        match self {
            Column::Quantitative(v) => Column::Quantitative(rows.iter().map(|&i| v[i]).collect()),
            Column::Qualitative { codes, levels } => Column::Qualitative {
                codes: rows.iter().map(|&i| codes[i]).collect(),
                levels: levels.clone(),
            },
        }
    }

    /// Drops levels with zero frequency, remapping codes.
    pub fn without_unobserved_levels(&self) -> Self {
        match self {
            Column::Quantitative(_) => self.clone(),
            Column::Qualitative { codes, levels } => {
                let mut seen = vec![false; levels.len()];
                for &c in codes {
                    seen[c] = true;
                }
                let mut remap = vec![usize::MAX; levels.len()];
                let mut kept = Vec::new();
                for (l, name) in levels.iter().enumerate() {
                    if seen[l] {
                        remap[l] = kept.len();
                        kept.push(name.clone());
                    }
                }
                Column::Qualitative {
                    codes: codes.iter().map(|&c| remap[c]).collect(),
                    levels: kept,
                }
            }
        }
    }

    /// True when the column carries no variation.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Column::Quantitative(v) => v.windows(2).all(|w| w[0] == w[1]),
            Column::Qualitative { codes, .. } => codes.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Continuous,
    Binary,
}

/// Mixed-type design with a response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    columns: Vec<Column<T>>,
    names: Vec<String>,
    y: Vec<T>,
    response_kind: ResponseKind,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        columns: Vec<Column<T>>,
        names: Vec<String>,
        y: Vec<T>,
        response_kind: ResponseKind,
    ) -> Result<Self> {
        let n = y.len();
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                what: "column names",
                expected: columns.len(),
                found: names.len(),
            });
        }
        for c in &columns {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "column length",
                    expected: n,
                    found: c.len(),
                });
            }
            if let Column::Qualitative { codes, levels } = c {
                if let Some(&bad) = codes.iter().find(|&&c| c >= levels.len()) {
                    return Err(Error::Invalid(format!(
                        "category code {bad} outside {} declared levels",
                        levels.len()
                    )));
                }
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("response contains non-finite values".into()));
        }
        if response_kind == ResponseKind::Binary
            && y.iter().any(|&v| v != T::zero() && v != T::one())
        {
            return Err(Error::NonBinaryResponse);
        }
        Ok(Dataset {
            columns,
            names,
            y,
            response_kind,
        })
    }

    /// Quantitative-only dataset from column vectors.
    pub fn from_quantitative(
        columns: Vec<Vec<T>>,
        y: Vec<T>,
        response_kind: ResponseKind,
    ) -> Result<Self> {
        let names = (1..=columns.len()).map(|j| format!("x{j}")).collect();
        Self::new(
            columns.into_iter().map(Column::Quantitative).collect(),
            names,
            y,
            response_kind,
        )
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column<T> {
        &self.columns[j]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn response_kind(&self) -> ResponseKind {
        self.response_kind
    }

    pub fn kinds(&self) -> Vec<VariableKind> {
        self.columns.iter().map(Column::kind).collect()
    }

    /// Every qualitative column must show at least two categories.
    pub fn check_categories(&self) -> Result<()> {
        for (j, c) in self.columns.iter().enumerate() {
            if let Column::Qualitative { codes, .. } = c {
                let first = codes.first().copied();
                if codes.iter().all(|&c| Some(c) == first) {
                    return Err(Error::DegenerateQualitative { column: j });
                }
            }
        }
        Ok(())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Dataset {
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
            y: self.y.clone(),
            response_kind: self.response_kind,
        }
    }

    /// Rows in the given order (repeats allowed). Level lists are kept.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Dataset {
            columns: self.columns.iter().map(|c| c.take_rows(rows)).collect(),
            names: self.names.clone(),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            response_kind: self.response_kind,
        }
    }

    pub fn with_response(&self, y: Vec<T>, kind: ResponseKind) -> Result<Self> {
        Self::new(self.columns.clone(), self.names.clone(), y, kind)
    }

    /// Copy with unobserved levels removed from every qualitative column.
    pub fn compact_levels(&self) -> Self {
        Dataset {
            columns: self.columns.iter().map(Column::without_unobserved_levels).collect(),
            names: self.names.clone(),
            y: self.y.clone(),
            response_kind: self.response_kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_columns() {
        let err = Dataset::<f64>::from_quantitative(
            vec![vec![1.0, 2.0], vec![1.0]],
            vec![0.0, 1.0],
            ResponseKind::Continuous,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn rejects_non_binary_response() {
        let err = Dataset::<f64>::from_quantitative(
            vec![vec![1.0, 2.0]],
            vec![0.0, 2.0],
            ResponseKind::Binary,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonBinaryResponse));
    }

    #[test]
    fn compact_levels_remaps_codes() {
        let col: Column<f64> = Column::Qualitative {
            codes: vec![0, 2, 2],
            levels: vec!["a".into(), "b".into(), "c".into()],
        };
        match col.without_unobserved_levels() {
            Column::Qualitative { codes, levels } => {
                assert_eq!(codes, vec![0, 1, 1]);
                assert_eq!(levels, vec!["a".to_string(), "c".to_string()]);
            }
            _ => unreachable!(),
        }
    }
}
