use serde::{Deserialize, Serialize};

use super::standardize::ColumnMap;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Assignment of items (variables or columns) to disjoint groups.
///
/// Labels are stored zero-based; every label in `0..k` is used. External
/// formats write them one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    /// One-based group label per item.
    assignment: Vec<usize>,
    k: usize,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        if r.assignment.contains(&0) {
            return Err(Error::Invalid("group labels are one-based".into()));
        }
        let p = Partition::new(r.assignment.iter().map(|a| a - 1).collect())?;
        if p.k != r.k {
            return Err(Error::Invalid(format!("declared k={} but found {}", r.k, p.k)));
        }
        Ok(p)
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            assignment: p.assignment.iter().map(|a| a + 1).collect(),
            k: p.k,
        }
    }
}

impl Partition {
    /// Zero-based labels; every label below the maximum must be used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let k = assignment.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut used = vec![false; k];
        for &a in &assignment {
            used[a] = true;
        }
        if let Some(g) = used.iter().position(|u| !u) {
            return Err(Error::EmptyGroup { group: g });
        }
        Ok(Partition { assignment, k })
    }

    /// Relabel arbitrary labels in order of first appearance.
    pub fn from_labels<L: PartialEq>(labels: &[L]) -> Self {
        let mut seen: Vec<&L> = Vec::new();
        let assignment = labels
            .iter()
            .map(|l| match seen.iter().position(|s| *s == l) {
                Some(i) => i,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            })
            .collect();
        Partition {
            assignment,
            k: seen.len(),
        }
    }

    pub fn singletons(p: usize) -> Self {
        Partition {
            assignment: (0..p).collect(),
            k: p,
        }
    }

    pub fn single_block(p: usize) -> Self {
        Partition {
            assignment: vec![0; p],
            k: usize::from(p > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn group_of(&self, item: usize) -> usize {
        self.assignment[item]
    }

    /// Members of each group in ascending item order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &g) in self.assignment.iter().enumerate() {
            out[g].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &g in &self.assignment {
            out[g] += 1;
        }
        out
    }

    /// Same grouping with labels renumbered by first appearance.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.assignment)
    }

    /// Restriction to a subset of items (relabelled canonically).
    pub fn restrict(&self, items: &[usize]) -> Self {
        let labels: Vec<usize> = items.iter().map(|&i| self.assignment[i]).collect();
        Self::from_labels(&labels)
    }
}

/// Map a variable-level partition onto indicator-expanded columns: every
/// column of a qualitative variable inherits that variable's group.
pub fn expand_groups(part: &Partition, column_map: &ColumnMap) -> Result<Partition> {
    if part.len() != column_map.variables() {
        return Err(Error::DimensionMismatch {
            what: "partition length",
            expected: column_map.variables(),
            found: part.len(),
        });
    }
    let mut assignment = Vec::with_capacity(column_map.width());
    for (v, r) in column_map.ranges().iter().enumerate() {
        assignment.extend(std::iter::repeat_n(part.group_of(v), r.len()));
    }
    Ok(Partition {
        assignment,
        k: part.k(),
    })
}

/// Fitted coefficients on the standardized scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients<T> {
    pub intercept: T,
    pub beta: Vec<T>,
    /// Euclidean norm of `beta` restricted to each group.
    pub group_norms: Vec<T>,
}

impl<T: Scalar> Coefficients<T> {
    pub fn new(intercept: T, beta: Vec<T>, groups: &Partition) -> Self {
        let group_norms = group_norms(&beta, groups);
        Coefficients {
            intercept,
            beta,
            group_norms,
        }
    }

    /// Number of nonzero coefficients.
    pub fn df(&self) -> usize {
        self.beta.iter().filter(|b| **b != T::zero()).count()
    }

    /// Variables (per the column map) with any nonzero coefficient.
    pub fn selected_variables(&self, column_map: &ColumnMap) -> Vec<usize> {
        column_map
            .ranges()
            .iter()
            .enumerate()
            .filter(|(_, r)| self.beta[(*r).clone()].iter().any(|b| *b != T::zero()))
            .map(|(v, _)| v)
            .collect()
    }
}

pub fn group_norms<T: Scalar>(beta: &[T], groups: &Partition) -> Vec<T> {
    let mut sq = vec![T::zero(); groups.k()];
    for (j, &b) in beta.iter().enumerate() {
        sq[groups.group_of(j)] += b * b;
    }
    sq.into_iter().map(T::sqrt).collect()
}
