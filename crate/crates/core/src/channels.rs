//! Completely positive trace-preserving maps in operator-sum form, the
//! depolarizing family, and the periodic and convex-combination memory
//! channels built from memoryless branches.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{max_abs, CMatrix, DensityMatrix};

/// Tolerance on `sum K†K = I`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;
/// Kraus terms with `||K||_F^2 / din` below this are dropped.
pub const PRUNE_WEIGHT: f64 = 1e-14;
/// Largest product-channel dimension materialized for `n > 2` uses.
pub const MAX_PRODUCT_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    din: usize,
    dout: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| {
            Error::InvalidArgument("channel needs at least one Kraus operator".into())
        })?;
        let (dout, din) = first.shape();
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dout, din)) {
            return Err(Error::DimensionMismatch {
                expected: din,
                actual: k.ncols(),
            });
        }
        let ch = Self { din, dout, kraus };
        let dev = ch.trace_preservation_error();
        if dev > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            din: d,
            dout: d,
            kraus: vec![CMatrix::identity(d, d)],
        }
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn num_terms(&self) -> usize {
        self.kraus.len()
    }

    /// `max |sum K†K - I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let mut acc = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        max_abs(&(acc - CMatrix::identity(self.din, self.din)))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.din {
            return Err(Error::DimensionMismatch {
                expected: self.din,
                actual: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            self.apply_matrix(rho.matrix()),
        ))
    }

    /// `sum K m K†` without dimension checks.
    pub(crate) fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// The channel `rho -> sum_i w_i Phi_i(rho)`; Kraus terms are the union of
    /// the branch terms scaled by `sqrt(w_i)`.
    pub fn mixture(weights: &[f64], channels: &[KrausChannel]) -> Result<Self> {
        crate::quantum::check_probabilities(weights)?;
        if weights.len() != channels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} channels",
                weights.len(),
                channels.len()
            )));
        }
        let (din, dout) = (channels[0].din, channels[0].dout);
        let mut kraus = Vec::new();
        for (w, ch) in weights.iter().zip(channels) {
            if (ch.din, ch.dout) != (din, dout) {
                return Err(Error::DimensionMismatch {
                    expected: din,
                    actual: ch.din,
                });
            }
            let s = Complex64::new(w.sqrt(), 0.0);
            kraus.extend(ch.kraus.iter().map(|k| k * s));
        }
        let mut ch = Self { din, dout, kraus };
        ch.prune();
        Ok(ch)
    }

    fn prune(&mut self) {
        let din = self.din as f64;
        self.kraus
            .retain(|k| k.iter().map(|z| z.norm_sqr()).sum::<f64>() / din >= PRUNE_WEIGHT);
    }
}

/// Parameters of `rho -> lambda rho + (1 - lambda) I / d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingParams {
    pub d: usize,
    pub lambda: f64,
}

impl DepolarizingParams {
    pub fn new(d: usize, lambda: f64) -> Result<Self> {
        let p = Self { d, lambda };
        p.validate()?;
        Ok(p)
    }

    /// The completely positive range `[-1/(d^2-1), 1]`.
    pub fn cp_interval(d: usize) -> (f64, f64) {
        let d2 = (d * d) as f64;
        (-1.0 / (d2 - 1.0), 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidArgument(format!(
                "depolarizing channel needs d >= 2, got {}",
                self.d
            )));
        }
        let (lo, hi) = Self::cp_interval(self.d);
        let slack = 1e-12;
        if !self.lambda.is_finite() || self.lambda < lo - slack || self.lambda > hi + slack {
            return Err(Error::CpViolation {
                d: self.d,
                lambda: self.lambda,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// Output eigenvalues for a pure input: the large one (multiplicity 1)
    /// and the small one (multiplicity `d - 1`).
    pub fn pure_output_eigenvalues(&self) -> (f64, f64) {
        let d = self.d as f64;
        let small = (1.0 - self.lambda) / d;
        (self.lambda + small, small)
    }
}

/// Discrete Weyl operator `X^a Z^b` with `X|j> = |j+1>`, `Z|j> = w^j |j>`.
fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut w = CMatrix::zeros(d, d);
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    for j in 0..d {
        w[((j + a) % d, j)] = Complex64::from_polar(1.0, omega * ((b * j) % d) as f64);
    }
    w
}

/// Depolarizing channel as `d^2` weighted Weyl conjugations: weight
/// `lambda + (1-lambda)/d^2` on the identity and `(1-lambda)/d^2` on the rest.
/// Zero-weight terms are omitted.
pub fn depolarizing(params: DepolarizingParams) -> Result<KrausChannel> {
    params.validate()?;
    let d = params.d;
    let d2 = (d * d) as f64;
    let other = ((1.0 - params.lambda) / d2).max(0.0);
    let first = (params.lambda + (1.0 - params.lambda) / d2).max(0.0);
    let mut kraus = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let w = if a == 0 && b == 0 { first } else { other };
            kraus.push(weyl(d, a, b) * Complex64::new(w.sqrt(), 0.0));
        }
    }
    let mut ch = KrausChannel {
        din: d,
        dout: d,
        kraus,
    };
    ch.prune();
    Ok(ch)
}

/// Tensor product of channels; its Kraus terms are all Kronecker products of
/// branch terms.
pub fn tensor_channels(channels: &[KrausChannel]) -> Result<KrausChannel> {
    let (first, rest) = channels
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty channel list".into()))?;
    let mut acc = first.clone();
    for ch in rest {
        let mut kraus = Vec::with_capacity(acc.kraus.len() * ch.kraus.len());
        for a in &acc.kraus {
            for b in &ch.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        acc = KrausChannel {
            din: acc.din * ch.din,
            dout: acc.dout * ch.dout,
            kraus,
        };
        acc.prune();
    }
    Ok(acc)
}

fn check_product_size(d: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "number of channel uses must be >= 1".into(),
        ));
    }
    let within = n <= 2
        || d.checked_pow(n as u32)
            .is_some_and(|dim| dim <= MAX_PRODUCT_DIM);
    if !within {
        return Err(Error::Capability(format!(
            "{n} uses of a dimension-{d} channel exceed the product cap (n <= 2 or d^n <= {MAX_PRODUCT_DIM})"
        )));
    }
    Ok(())
}

fn check_square_branches(branches: &[KrausChannel]) -> Result<usize> {
    let first = branches
        .first()
        .ok_or_else(|| Error::InvalidArgument("memory channel needs at least one branch".into()))?;
    let d = first.din;
    for (i, b) in branches.iter().enumerate() {
        if b.din != d || b.dout != d {
            return Err(Error::Branch {
                branch: i,
                source: Box::new(Error::DimensionMismatch {
                    expected: d,
                    actual: if b.din != d { b.din } else { b.dout },
                }),
            });
        }
    }
    Ok(d)
}

fn check_input(rho: &DensityMatrix, d: usize, n: usize) -> Result<()> {
    let expected = d.pow(n as u32);
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// Channel that applies branches `i, i+1, ..., i+n-1` (mod L) to successive
/// uses, with the starting branch uniformly random.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicChannel {
    d: usize,
    branches: Vec<KrausChannel>,
}

impl PeriodicChannel {
    pub fn new(branches: Vec<KrausChannel>) -> Result<Self> {
        let d = check_square_branches(&branches)?;
        Ok(Self { d, branches })
    }

    pub fn depolarizing(d: usize, lambdas: &[f64]) -> Result<Self> {
        Self::new(depolarizing_branches(d, lambdas)?)
    }

    pub fn period(&self) -> usize {
        self.branches.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn branches(&self) -> &[KrausChannel] {
        &self.branches
    }

    /// `Omega_i ⊗ Omega_{i+1} ⊗ ... ⊗ Omega_{i+n-1}`, indices mod L.
    pub fn periodic_branch(&self, i: usize, n: usize) -> Result<KrausChannel> {
        let l = self.period();
        if i >= l {
            return Err(Error::IndexOutOfRange { index: i, len: l });
        }
        check_product_size(self.d, n)?;
        let factors: Vec<KrausChannel> =
            (0..n).map(|k| self.branches[(i + k) % l].clone()).collect();
        tensor_channels(&factors)
    }

    /// The `n`-use channel as a single operator-sum map: the uniform mixture
    /// of the L branch products.
    pub fn n_use_channel(&self, n: usize) -> Result<KrausChannel> {
        let l = self.period();
        let products = (0..l)
            .map(|i| self.periodic_branch(i, n))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::mixture(&vec![1.0 / l as f64; l], &products)
    }

    pub fn apply_periodic(&self, rho_n: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
        check_product_size(self.d, n)?;
        check_input(rho_n, self.d, n)?;
        let l = self.period();
        let mut acc = CMatrix::zeros(rho_n.dim(), rho_n.dim());
        for i in 0..l {
            acc += self.periodic_branch(i, n)?.apply_matrix(rho_n.matrix());
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            acc / Complex64::new(l as f64, 0.0),
        ))
    }
}

/// Channel that applies one memoryless branch `Phi_i^{⊗n}` to the whole
/// codeword, chosen once with probability `gamma_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombinationChannel {
    d: usize,
    branches: Vec<KrausChannel>,
    gammas: Vec<f64>,
}

impl ConvexCombinationChannel {
    pub fn new(branches: Vec<KrausChannel>, gammas: Vec<f64>) -> Result<Self> {
        let d = check_square_branches(&branches)?;
        crate::quantum::check_probabilities(&gammas)?;
        if gammas.len() != branches.len() {
            return Err(Error::InvalidArgument(format!(
                "{} mixing weights for {} branches",
                gammas.len(),
                branches.len()
            )));
        }
        Ok(Self {
            d,
            branches,
            gammas,
        })
    }

    pub fn depolarizing(d: usize, lambdas: &[f64], gammas: Vec<f64>) -> Result<Self> {
        Self::new(depolarizing_branches(d, lambdas)?, gammas)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn branches(&self) -> &[KrausChannel] {
        &self.branches
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `Phi_i^{⊗n}`.
    pub fn memoryless_branch(&self, i: usize, n: usize) -> Result<KrausChannel> {
        let b = self.branches.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.branches.len(),
        })?;
        check_product_size(self.d, n)?;
        tensor_channels(&vec![b.clone(); n])
    }

    pub fn apply_convex(&self, rho_n: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
        check_product_size(self.d, n)?;
        check_input(rho_n, self.d, n)?;
        let mut acc = CMatrix::zeros(rho_n.dim(), rho_n.dim());
        for (i, g) in self.gammas.iter().enumerate() {
            if *g == 0.0 {
                continue;
            }
            acc += self.memoryless_branch(i, n)?.apply_matrix(rho_n.matrix())
                * Complex64::new(*g, 0.0);
        }
        Ok(DensityMatrix::from_matrix_unchecked(acc))
    }
}

fn depolarizing_branches(d: usize, lambdas: &[f64]) -> Result<Vec<KrausChannel>> {
    lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            DepolarizingParams::new(d, lambda)
                .and_then(depolarizing)
                .map_err(|e| Error::Branch {
                    branch: i,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// JSON channel descriptor, e.g. `{"type":"depolarizing","d":2,"lambda":0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelDescriptor {
    Depolarizing {
        d: usize,
        lambda: f64,
    },
    Periodic {
        branches: Vec<ChannelDescriptor>,
    },
    Convex {
        gammas: Vec<f64>,
        branches: Vec<ChannelDescriptor>,
    },
}

impl ChannelDescriptor {
    pub fn periodic_depolarizing(d: usize, lambdas: &[f64]) -> Self {
        Self::Periodic {
            branches: lambdas
                .iter()
                .map(|&lambda| Self::Depolarizing { d, lambda })
                .collect(),
        }
    }

    pub fn convex_depolarizing(d: usize, lambdas: &[f64], gammas: &[f64]) -> Self {
        Self::Convex {
            gammas: gammas.to_vec(),
            branches: lambdas
                .iter()
                .map(|&lambda| Self::Depolarizing { d, lambda })
                .collect(),
        }
    }

    /// Common dimension and the depolarizing parameters of every branch (one
    /// entry for a plain depolarizing descriptor). Memory-channel branches
    /// must themselves be depolarizing with equal `d`.
    pub fn depolarizing_params(&self) -> Result<(usize, Vec<f64>)> {
        match self {
            Self::Depolarizing { d, lambda } => {
                DepolarizingParams::new(*d, *lambda)?;
                Ok((*d, vec![*lambda]))
            }
            Self::Periodic { branches } | Self::Convex { branches, .. } => {
                if branches.is_empty() {
                    return Err(Error::InvalidArgument(
                        "memory channel needs at least one branch".into(),
                    ));
                }
                let mut dim = None;
                let mut lambdas = Vec::with_capacity(branches.len());
                for (i, b) in branches.iter().enumerate() {
                    let wrap = |e| Error::Branch {
                        branch: i,
                        source: Box::new(e),
                    };
                    match b {
                        Self::Depolarizing { d, lambda } => {
                            DepolarizingParams::new(*d, *lambda).map_err(wrap)?;
                            if *dim.get_or_insert(*d) != *d {
                                return Err(wrap(Error::DimensionMismatch {
                                    expected: dim.unwrap(),
                                    actual: *d,
                                }));
                            }
                            lambdas.push(*lambda);
                        }
                        _ => {
                            return Err(wrap(Error::InvalidArgument(
                                "memory-channel branches must be depolarizing".into(),
                            )))
                        }
                    }
                }
                if let Self::Convex { gammas, .. } = self {
                    crate::quantum::check_probabilities(gammas)?;
                    if gammas.len() != lambdas.len() {
                        return Err(Error::InvalidArgument(format!(
                            "{} mixing weights for {} branches",
                            gammas.len(),
                            lambdas.len()
                        )));
                    }
                }
                Ok((dim.unwrap(), lambdas))
            }
        }
    }
}
