//! Ensembles, the Holevo quantity and measured mutual information.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channels::{ConvexCombinationChannel, KrausChannel, PeriodicChannel};
use crate::error::{Error, Result};
use crate::quantum::{
    check_probabilities, hermitian_eigenvalues, matrix_entropy, max_abs, relative_entropy,
    shannon_entropy, CMatrix, DensityMatrix, PureState, EIGEN_CLAMP,
};
use crate::random::ginibre;

/// `{p_j, rho_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        check_probabilities(&probs)?;
        if probs.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn from_pure(probs: Vec<f64>, states: &[PureState]) -> Result<Self> {
        Self::new(probs, states.iter().map(PureState::to_density).collect())
    }

    /// Computational basis states with equal weights.
    pub fn uniform_basis(dim: usize) -> Self {
        Self {
            probs: vec![1.0 / dim as f64; dim],
            states: (0..dim).map(|k| DensityMatrix::basis(dim, k)).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn average_state(&self) -> DensityMatrix {
        DensityMatrix::convex_combination(&self.probs, &self.states)
            .expect("ensemble invariants guarantee a valid mixture")
    }

    /// Same ensemble with every state conjugated by `u`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| s.conjugate(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            probs: self.probs.clone(),
            states,
        })
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub const COMPLETENESS_TOL: f64 = 1e-9;

    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("POVM needs at least one element".into()))?;
        let dim = first.nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &elements {
            if e.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: e.nrows(),
                });
            }
            let herm = max_abs(&(e - e.adjoint()));
            if herm > 1e-10 {
                return Err(Error::NotHermitian(herm));
            }
            let min = hermitian_eigenvalues(e)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if min < -EIGEN_CLAMP {
                return Err(Error::NotPositive(min));
            }
            sum += e;
        }
        let dev = max_abs(&(sum - CMatrix::identity(dim, dim)));
        if dev > Self::COMPLETENESS_TOL {
            return Err(Error::InvalidArgument(format!(
                "POVM elements do not sum to identity (deviation {dev:e})"
            )));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self {
            elements: (0..dim)
                .map(|k| DensityMatrix::basis(dim, k).into_matrix())
                .collect(),
        }
    }

    /// `k` random positive matrices `P_i`, normalized as
    /// `S^{-1/2} P_i S^{-1/2}` with `S = sum P_i`.
    pub fn random<R: Rng + ?Sized>(dim: usize, k: usize, rng: &mut R) -> Self {
        let ps: Vec<CMatrix> = (0..k)
            .map(|_| {
                let g = ginibre(dim, dim, rng);
                &g * g.adjoint()
            })
            .collect();
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &ps {
            sum += p;
        }
        let eig = sum.symmetric_eigen();
        let inv_sqrt =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(1.0 / x.sqrt(), 0.0)));
        let s = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
        let elements = ps
            .iter()
            .map(|p| {
                let e = &s * p * &s;
                (&e + e.adjoint()) * Complex64::new(0.5, 0.0)
            })
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn outputs(ch: &KrausChannel, ens: &Ensemble) -> Result<Vec<DensityMatrix>> {
    if ens.dim() != ch.din() {
        return Err(Error::DimensionMismatch {
            expected: ch.din(),
            actual: ens.dim(),
        });
    }
    ens.states.iter().map(|s| ch.apply(s)).collect()
}

fn average(probs: &[f64], states: &[DensityMatrix]) -> CMatrix {
    let dim = states[0].dim();
    let mut avg = CMatrix::zeros(dim, dim);
    for (p, s) in probs.iter().zip(states) {
        if *p > 0.0 {
            avg += s.matrix() * Complex64::new(*p, 0.0);
        }
    }
    avg
}

/// `S(sum p_j Phi(rho_j)) - sum p_j S(Phi(rho_j))`.
pub fn chi(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    let out = outputs(ch, ens)?;
    let mixed = matrix_entropy(&average(&ens.probs, &out));
    let cond: f64 = ens
        .probs
        .iter()
        .zip(&out)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, s)| p * matrix_entropy(s.matrix()))
        .sum();
    Ok(mixed - cond)
}

/// `sum_k p_k S(Phi(rho_k) || sum_j p_j Phi(rho_j))`.
pub fn chi_via_relative_entropy(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    let out = outputs(ch, ens)?;
    let avg = DensityMatrix::from_matrix_unchecked(average(&ens.probs, &out));
    let mut total = 0.0;
    for (p, s) in ens.probs.iter().zip(&out) {
        if *p > 0.0 {
            total += p * relative_entropy(s, &avg)?.to_f64();
        }
    }
    Ok(total)
}

/// Mutual information between the ensemble label and the outcome of `povm`
/// on the channel output, with `P(k|j) = tr(Phi(rho_j) E_k)`.
pub fn mutual_information(ch: &KrausChannel, ens: &Ensemble, povm: &Povm) -> Result<f64> {
    if povm.dim() != ch.dout() {
        return Err(Error::DimensionMismatch {
            expected: ch.dout(),
            actual: povm.dim(),
        });
    }
    let out = outputs(ch, ens)?;
    let mut joint = Vec::with_capacity(ens.len() * povm.len());
    let mut py = vec![0.0; povm.len()];
    for (p, s) in ens.probs.iter().zip(&out) {
        for (k, e) in povm.elements.iter().enumerate() {
            let cond = (s.matrix() * e).trace().re.max(0.0);
            let pj = p * cond;
            joint.push(pj);
            py[k] += pj;
        }
    }
    Ok(shannon_entropy(&ens.probs) + shannon_entropy(&py) - shannon_entropy(&joint))
}

/// Mean over the L branches of the single-use Holevo quantities.
pub fn chi_periodic_average(ch: &PeriodicChannel, ens: &Ensemble) -> Result<f64> {
    let mut total = 0.0;
    for b in ch.branches() {
        total += chi(b, ens)?;
    }
    Ok(total / ch.period() as f64)
}

/// Smallest single-use Holevo quantity over the memoryless branches.
pub fn chi_branch_min(ch: &ConvexCombinationChannel, ens: &Ensemble) -> Result<f64> {
    let mut best = f64::INFINITY;
    for b in ch.branches() {
        best = best.min(chi(b, ens)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, DepolarizingParams};
    use crate::random::{
        random_density_matrix, random_probabilities, random_pure_state, random_unitary,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const CHI_HALF: f64 = 0.188_721_875_540_867_17;
    const CHI_NINE_TENTHS: f64 = 0.713_603_042_884_043_9;

    fn dep(d: usize, l: f64) -> KrausChannel {
        depolarizing(DepolarizingParams::new(d, l).unwrap()).unwrap()
    }

    fn random_ensemble(d: usize, m: usize, rng: &mut ChaCha8Rng) -> Ensemble {
        let states = (0..m).map(|_| random_density_matrix(d, rng)).collect();
        Ensemble::new(random_probabilities(m, rng), states).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let s = vec![DensityMatrix::basis(2, 0)];
        assert!(Ensemble::new(vec![0.5], s.clone()).is_err());
        assert!(Ensemble::new(vec![0.5, 0.5], s).is_err());
        let mixed = vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(3, 0)];
        assert!(matches!(
            Ensemble::new(vec![0.5, 0.5], mixed),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_state_has_zero_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let ens = Ensemble::new(vec![1.0], vec![random_density_matrix(2, &mut rng)]).unwrap();
        let ch = dep(2, 0.3);
        assert_abs_diff_eq!(chi(&ch, &ens).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            chi_via_relative_entropy(&ch, &ens).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let povm = Povm::computational(2);
        assert_abs_diff_eq!(
            mutual_information(&ch, &ens, &povm).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn noiseless_qubit_carries_one_bit() {
        let ens = Ensemble::uniform_basis(2);
        assert_abs_diff_eq!(
            chi(&KrausChannel::identity(2), &ens).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            chi_via_relative_entropy(&KrausChannel::identity(2), &ens).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn half_depolarizing_on_basis() {
        let ens = Ensemble::uniform_basis(2);
        let ch = dep(2, 0.5);
        assert_abs_diff_eq!(chi(&ch, &ens).unwrap(), CHI_HALF, epsilon = 1e-9);
        assert_abs_diff_eq!(
            chi_via_relative_entropy(&ch, &ens).unwrap(),
            CHI_HALF,
            epsilon = 1e-9
        );
        let mi = mutual_information(&ch, &ens, &Povm::computational(2)).unwrap();
        assert_abs_diff_eq!(mi, CHI_HALF, epsilon = 1e-9);
    }

    #[test]
    fn chi_dimension_mismatch() {
        let ens = Ensemble::uniform_basis(3);
        assert!(matches!(
            chi(&dep(2, 0.5), &ens),
            Err(Error::DimensionMismatch { .. })
        ));
        let ens = Ensemble::uniform_basis(2);
        assert!(mutual_information(&dep(2, 0.5), &ens, &Povm::computational(3)).is_err());
    }

    #[test]
    fn zero_probability_members_are_harmless() {
        let states = vec![
            DensityMatrix::basis(2, 0),
            DensityMatrix::basis(2, 1),
            DensityMatrix::basis(2, 0),
        ];
        let ens = Ensemble::new(vec![0.5, 0.5, 0.0], states).unwrap();
        let v = chi(&KrausChannel::identity(2), &ens).unwrap();
        assert!(v.is_finite());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        let r = chi_via_relative_entropy(&KrausChannel::identity(2), &ens).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dual_path_agrees_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for i in 0..50 {
            let d = 2 + i % 2;
            let (lo, _) = DepolarizingParams::cp_interval(d);
            let l = rng.gen_range(lo..=1.0);
            let ens = random_ensemble(d, 1 + i % 5, &mut rng);
            let ch = dep(d, l);
            let a = chi(&ch, &ens).unwrap();
            let b = chi_via_relative_entropy(&ch, &ens).unwrap();
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
            assert!(a >= -1e-9 && a <= (d as f64).log2() + 1e-9);
        }
    }

    #[test]
    fn random_povm_is_complete_and_bounded_by_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for d in [2, 3] {
            let povm = Povm::random(d, d + 1, &mut rng);
            assert!(Povm::new(povm.elements().to_vec()).is_ok());
            let ens = random_ensemble(d, 3, &mut rng);
            let ch = dep(d, 0.4);
            let mi = mutual_information(&ch, &ens, &povm).unwrap();
            assert!(mi <= chi(&ch, &ens).unwrap() + 1e-9);
            assert!(mi >= -1e-12);
            assert!(mi <= shannon_entropy(ens.probs()).min((povm.len() as f64).log2()) + 1e-12);
        }
    }

    #[test]
    fn povm_validation() {
        let half = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        assert!(Povm::new(vec![half.clone()]).is_err());
        assert!(Povm::new(vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn periodic_average_and_branch_min() {
        let ens = Ensemble::uniform_basis(2);
        let per = PeriodicChannel::depolarizing(2, &[0.9, 0.5]).unwrap();
        assert_abs_diff_eq!(
            chi_periodic_average(&per, &ens).unwrap(),
            (CHI_NINE_TENTHS + CHI_HALF) / 2.0,
            epsilon = 1e-9
        );
        let single = PeriodicChannel::depolarizing(2, &[0.5]).unwrap();
        assert_abs_diff_eq!(
            chi_periodic_average(&single, &ens).unwrap(),
            CHI_HALF,
            epsilon = 1e-9
        );

        let conv = ConvexCombinationChannel::depolarizing(2, &[0.9, 0.5], vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(
            chi_branch_min(&conv, &ens).unwrap(),
            CHI_HALF,
            epsilon = 1e-9
        );
        let twin = ConvexCombinationChannel::depolarizing(2, &[0.3, 0.3], vec![0.2, 0.8]).unwrap();
        assert_abs_diff_eq!(
            chi_branch_min(&twin, &ens).unwrap(),
            chi(&dep(2, 0.3), &ens).unwrap(),
            epsilon = 1e-12
        );

        let one = Ensemble::new(vec![1.0], vec![DensityMatrix::basis(2, 0)]).unwrap();
        assert_abs_diff_eq!(
            chi_periodic_average(&per, &one).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn chi_is_unitarily_covariant_for_depolarizing() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for d in [2, 3] {
            let ch = dep(d, 0.35);
            let states: Vec<PureState> = (0..4).map(|_| random_pure_state(d, &mut rng)).collect();
            let ens = Ensemble::from_pure(random_probabilities(4, &mut rng), &states).unwrap();
            let u = random_unitary(d, &mut rng);
            let a = chi(&ch, &ens).unwrap();
            let b = chi(&ch, &ens.conjugate(&u).unwrap()).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn mixing_branches_never_beats_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let per = PeriodicChannel::depolarizing(2, &[0.9, 0.1, -0.3]).unwrap();
        let mix = per.n_use_channel(1).unwrap();
        for _ in 0..20 {
            let ens = random_ensemble(2, 3, &mut rng);
            assert!(chi(&mix, &ens).unwrap() <= chi_periodic_average(&per, &ens).unwrap() + 1e-9);
        }
    }
}
