use ndarray::{Array1, Array2};

use crate::data::{standardize, ColumnMap, Dataset, StandardizedMatrix};
use crate::error::{Error, Result};
use crate::linalg::{svd, top_eigenvalue};
use crate::scalar::{dot, Scalar};

/// Singular value decomposition of the scaled mixed-data matrix
/// `W = Z/√n`.
#[derive(Debug, Clone)]
pub struct PcamixResult<T> {
    pub u: Array2<T>,
    pub singular_values: Array1<T>,
    pub v: Array2<T>,
    pub eigenvalues: Array1<T>,
}

pub(crate) fn standardize_for_clustering<T: Scalar>(d: &Dataset<T>) -> Result<StandardizedMatrix<T>> {
    if d.n() < 2 {
        return Err(Error::DegenerateInput("clustering needs at least 2 observations".into()));
    }
    standardize(d).map_err(|e| match e {
        Error::ConstantColumn { column } => {
            Error::DegenerateInput(format!("variable {} is constant", column + 1))
        }
        Error::DegenerateQualitative { column } => {
            Error::DegenerateInput(format!("variable {} has a single category", column + 1))
        }
        other => other,
    })
}

/// Scaled mixed-data matrix `W = Z/√n`.
pub fn pcamix_matrix<T: Scalar>(z: &StandardizedMatrix<T>) -> Array2<T> {
    let scale = T::one() / T::from_usize_lossy(z.n()).sqrt();
    z.z().mapv(|v| v * scale)
}

pub fn pcamix<T: Scalar>(d: &Dataset<T>) -> Result<PcamixResult<T>> {
    if d.p() == 0 {
        return Err(Error::Invalid("pcamix needs at least one variable".into()));
    }
    let z = standardize_for_clustering(d)?;
    let s = svd(&pcamix_matrix(&z))?;
    let eigenvalues = s.s.mapv(|v| v * v);
    Ok(PcamixResult {
        u: s.u,
        singular_values: s.s,
        v: s.v,
        eigenvalues,
    })
}

/// Cross-product `WᵀW` of the scaled mixed-data matrix, from which the
/// homogeneity of any variable subset is a principal-submatrix eigenvalue.
#[derive(Debug, Clone)]
pub struct ClusterGram<T> {
    gram: Vec<T>,
    width: usize,
    column_map: ColumnMap,
}

impl<T: Scalar> ClusterGram<T> {
    pub fn new(z: &StandardizedMatrix<T>) -> Self {
        let w = z.width();
        let n_inv = T::one() / T::from_usize_lossy(z.n());
        let mut gram = vec![T::zero(); w * w];
        for i in 0..w {
            for j in i..w {
                let v = dot(z.col(i), z.col(j)) * n_inv;
                gram[i * w + j] = v;
                gram[j * w + i] = v;
            }
        }
        ClusterGram {
            gram,
            width: w,
            column_map: z.column_map().clone(),
        }
    }

    pub fn from_dataset(d: &Dataset<T>) -> Result<Self> {
        Ok(Self::new(&standardize_for_clustering(d)?))
    }

    pub fn variables(&self) -> usize {
        self.column_map.variables()
    }

    /// First PCAMIX eigenvalue of the given variables.
    pub fn homogeneity(&self, vars: &[usize]) -> Result<T> {
        let cols: Vec<usize> = vars
            .iter()
            .flat_map(|&v| self.column_map.range(v))
            .collect();
        let m = cols.len();
        let mut sub = vec![T::zero(); m * m];
        for (a, &i) in cols.iter().enumerate() {
            let row = &self.gram[i * self.width..(i + 1) * self.width];
            for (b, &j) in cols.iter().enumerate() {
                sub[a * m + b] = row[j];
            }
        }
        top_eigenvalue(&sub, m)
    }

    /// `H(A) + H(B) − H(A∪B)`, clamped at zero.
    pub fn dissimilarity(&self, a: &[usize], b: &[usize]) -> Result<T> {
        let ha = self.homogeneity(a)?;
        let hb = self.homogeneity(b)?;
        let union: Vec<usize> = a.iter().chain(b).copied().collect();
        Ok((ha + hb - self.homogeneity(&union)?).max(T::zero()))
    }
}

/// First PCAMIX eigenvalue of every variable in `d`.
pub fn homogeneity<T: Scalar>(d: &Dataset<T>) -> Result<T> {
    if d.p() == 0 {
        return Err(Error::Invalid("empty cluster".into()));
    }
    let g = ClusterGram::from_dataset(d)?;
    g.homogeneity(&(0..d.p()).collect::<Vec<_>>())
}

/// Dissimilarity between the variables of `a` and those of `b` (same rows).
pub fn dissimilarity<T: Scalar>(a: &Dataset<T>, b: &Dataset<T>) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let mut cols = a.columns().to_vec();
    cols.extend(b.columns().iter().cloned());
    let names: Vec<String> = (0..cols.len()).map(|i| format!("v{i}")).collect();
    let joint = Dataset::new(cols, names, a.y().to_vec(), a.response_kind())?;
    let g = ClusterGram::from_dataset(&joint)?;
    let left: Vec<usize> = (0..a.p()).collect();
    let right: Vec<usize> = (a.p()..a.p() + b.p()).collect();
    g.dissimilarity(&left, &right)
}
