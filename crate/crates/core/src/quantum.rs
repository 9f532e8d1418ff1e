//! Dense density matrices, spectra and entropies.
//!
//! All entropies are in bits. Matrices are stored as `nalgebra` complex
//! matrices; multi-party states use the Kronecker convention where the first
//! factor is the most significant index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as numerical zero.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// Eigenvalues of the second argument of a relative entropy below this are
/// treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight the first argument must put on an unsupported direction before the
/// relative entropy diverges.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-9;

/// Unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let dev = max_abs(&(&m - m.adjoint()));
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&m)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -EIGEN_CLAMP {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix known to be a state (e.g. the output of a CPT map on a
    /// state). The Hermitian part is kept to wash out rounding asymmetry.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self { m }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        Self::new(DMatrix::from_diagonal(&v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self {
            m: CMatrix::identity(dim, dim) * w,
        }
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        PureState::basis(dim, k).to_density()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// `sum_i w_i rho_i`. Weights must form a probability vector.
    pub fn convex_combination(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        check_probabilities(weights)?;
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.dim(),
                });
            }
            acc += s.matrix() * Complex64::new(*w, 0.0);
        }
        Ok(Self::from_matrix_unchecked(acc))
    }

    /// `U rho U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(Self::from_matrix_unchecked(u * &self.m * u.adjoint()))
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    v: CVector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(v: CVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { v })
    }

    /// Rescales `v` to unit norm. Fails on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self {
            v: v / Complex64::new(n, 0.0),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.v
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            m: &self.v * self.v.adjoint(),
        }
    }
}

/// Real eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Shannon entropy of the spectrum in bits.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.values)
    }
}

/// Result of a relative entropy evaluation; `Infinite` when the support
/// condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn is_finite(&self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            RelativeEntropy::Finite(v) => Some(v),
            RelativeEntropy::Infinite => None,
        }
    }

    /// `f64::INFINITY` for the divergent case.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`. Entries at or below zero contribute
/// nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .fold(0.0, |acc, &p| acc - p * p.log2())
}

pub(crate) fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilities("empty".into()));
    }
    if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!(
            "entry {x} is negative or not finite"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("sum is {s}")));
    }
    Ok(())
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, unsorted.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Entropy of a state given by a matrix assumed Hermitian with unit trace.
pub(crate) fn matrix_entropy(m: &CMatrix) -> f64 {
    let ev = hermitian_eigenvalues(m);
    shannon_entropy(&ev)
}

/// Kronecker product of two states.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        m: a.m.kronecker(&b.m),
    }
}

/// Kronecker product of a nonempty list of states.
pub fn tensor_all(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty state list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, s| tensor(&acc, s)))
}

/// Traces out every factor whose index is not in `keep`.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: total,
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: dims.len(),
        });
    }
    let kept = |f: usize| keep.contains(&f);
    let kept_dim: usize = (0..dims.len())
        .filter(|&f| kept(f))
        .map(|f| dims[f])
        .product();

    // Split each full index into (kept index, traced index).
    let split: Vec<(usize, usize)> = (0..total)
        .map(|mut i| {
            let (mut k, mut t, mut kstride, mut tstride) = (0, 0, 1, 1);
            for f in (0..dims.len()).rev() {
                let digit = i % dims[f];
                i /= dims[f];
                if kept(f) {
                    k += digit * kstride;
                    kstride *= dims[f];
                } else {
                    t += digit * tstride;
                    tstride *= dims[f];
                }
            }
            (k, t)
        })
        .collect();

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Descending spectrum; values in `[-EIGEN_CLAMP, 0)` are clamped to zero.
pub fn eigenvalues(rho: &DensityMatrix) -> Spectrum {
    let mut values: Vec<f64> = hermitian_eigenvalues(&rho.m)
        .into_iter()
        .map(|x| {
            if (-EIGEN_CLAMP..0.0).contains(&x) {
                0.0
            } else {
                x
            }
        })
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Spectrum { values }
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    eigenvalues(rho).entropy()
}

/// `S(a || b) = tr(a log2 a) - tr(a log2 b)`.
pub fn relative_entropy(a: &DensityMatrix, b: &DensityMatrix) -> Result<RelativeEntropy> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let neg_entropy_a = -von_neumann_entropy(a);
    let eig = b.m.clone().symmetric_eigen();
    let mut cross = 0.0;
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        // <v|a|v>
        let w = (v.adjoint() * &a.m * v)[(0, 0)].re;
        if lam < SUPPORT_TOL {
            if w > SUPPORT_WEIGHT_TOL {
                return Ok(RelativeEntropy::Infinite);
            }
            continue;
        }
        cross += w * lam.log2();
    }
    Ok(RelativeEntropy::Finite((neg_entropy_a - cross).max(0.0)))
}
