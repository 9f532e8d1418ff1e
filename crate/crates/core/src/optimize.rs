//! Multi-start maximization of Holevo-type objectives over pure-state
//! ensembles.
//!
//! Each restart alternates two moves:
//!
//! * a probability step: projected gradient ascent on the simplex with
//!   backtracking, for fixed states (the Holevo quantity is concave in the
//!   probabilities);
//! * a state sweep: one random perturbation per pure state, kept only if the
//!   objective improves, with a per-state step size that grows on success and
//!   shrinks on failure.
//!
//! The maximin objective uses the same loop. Its probability step follows the
//! gradient of the lowest-index active branch and is accepted only when the
//! minimum improves.
//!
//! Restarts draw from independent ChaCha8 streams (`seed`, stream = restart
//! index), run in parallel, and are merged by maximum value with ties going to
//! the lowest restart index, so results do not depend on the thread count.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ConvexCombinationChannel, KrausChannel, PeriodicChannel};
use crate::error::{Error, Result};
use crate::holevo::{chi, chi_branch_min, chi_periodic_average, Ensemble};
use crate::quantum::{hermitian_eigenvalues, shannon_entropy, CMatrix, CVector, PureState};
use crate::random::{complex_gaussian, random_pure_state};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    /// Ensemble size; `None` means `D^2` for input dimension `D`.
    pub m: Option<usize>,
    /// Iteration gains below this count towards convergence.
    pub tol: f64,
    /// Consecutive low-gain iterations that declare convergence.
    pub stall: usize,
    /// Largest input dimension the optimizer accepts.
    pub max_dim: usize,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            iters: 2000,
            seed: 7,
            m: None,
            tol: 1e-10,
            stall: 200,
            max_dim: 16,
            threads: None,
        }
    }
}

impl OptimizerConfig {
    pub fn ensemble_size(&self, dim: usize) -> usize {
        self.m.unwrap_or(dim * dim)
    }
}

/// Search-space point: `m` pure states and a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub states: Vec<PureState>,
    pub probs: Vec<f64>,
}

impl EnsembleParams {
    /// Haar-random states with uniform weights.
    pub fn random<R: Rng + ?Sized>(dim: usize, m: usize, rng: &mut R) -> Self {
        Self {
            states: (0..m).map(|_| random_pure_state(dim, rng)).collect(),
            probs: vec![1.0 / m as f64; m],
        }
    }

    pub fn decode(&self) -> Result<Ensemble> {
        let s: f64 = self.probs.iter().sum();
        let probs = self.probs.iter().map(|p| p.max(0.0) / s).collect();
        Ensemble::from_pure(probs, &self.states)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Objective at `ensemble`, recomputed through [`crate::holevo`].
    pub value: f64,
    pub ensemble: Ensemble,
    pub restarts_used: usize,
    /// Index of the restart that produced `ensemble`.
    pub best_restart: usize,
    /// Iterations run by the best restart.
    pub iterations: usize,
    /// Whether the best restart met the stall criterion before its budget.
    pub converged: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Aggregate {
    Mean,
    Min,
}

struct Objective<'a> {
    branches: &'a [KrausChannel],
    aggregate: Aggregate,
}

impl Objective<'_> {
    fn combine(&self, chis: &[f64]) -> f64 {
        match self.aggregate {
            Aggregate::Mean => chis.iter().sum::<f64>() / chis.len() as f64,
            Aggregate::Min => chis.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Lowest-index branch attaining the minimum.
    fn active_branch(chis: &[f64]) -> usize {
        let min = chis.iter().copied().fold(f64::INFINITY, f64::min);
        chis.iter().position(|&c| c <= min).unwrap_or(0)
    }
}

/// Channel outputs of the current states, per branch.
struct Cache {
    /// `outputs[b][j] = Phi_b(|psi_j><psi_j|)`
    outputs: Vec<Vec<CMatrix>>,
    /// `entropies[b][j] = S(outputs[b][j])`
    entropies: Vec<Vec<f64>>,
}

fn pure_output(ch: &KrausChannel, psi: &CVector) -> CMatrix {
    let mut out = CMatrix::zeros(ch.dout(), ch.dout());
    for k in ch.kraus() {
        let v = k * psi;
        out += &v * v.adjoint();
    }
    out
}

fn entropy(m: &CMatrix) -> f64 {
    shannon_entropy(&hermitian_eigenvalues(m))
}

fn mixture(probs: &[f64], outputs: &[CMatrix]) -> CMatrix {
    let d = outputs[0].nrows();
    let mut acc = CMatrix::zeros(d, d);
    for (p, o) in probs.iter().zip(outputs) {
        if *p > 0.0 {
            acc += o * Complex64::new(*p, 0.0);
        }
    }
    acc
}

fn branch_chi(probs: &[f64], outputs: &[CMatrix], entropies: &[f64]) -> f64 {
    let cond: f64 = probs
        .iter()
        .zip(entropies)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, s)| p * s)
        .sum();
    entropy(&mixture(probs, outputs)) - cond
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Gradient of one branch's Holevo quantity in the probabilities:
/// `-tr(sigma_j log2 avg) - S(sigma_j)`, i.e. the relative entropy of each
/// output to the average, up to a constant shared by all coordinates.
fn branch_gradient(probs: &[f64], outputs: &[CMatrix], entropies: &[f64]) -> Vec<f64> {
    // Floor keeps gradients finite on rank-deficient averages.
    const FLOOR: f64 = 1e-15;
    let eig = mixture(probs, outputs).symmetric_eigen();
    let logs: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(FLOOR).log2())
        .collect();
    outputs
        .iter()
        .zip(entropies)
        .map(|(o, s)| {
            let mut cross = 0.0;
            for (k, lg) in logs.iter().enumerate() {
                let v = eig.eigenvectors.column(k);
                cross += (v.adjoint() * o * v)[(0, 0)].re * lg;
            }
            -cross - s
        })
        .collect()
}

struct Restart<'a> {
    obj: &'a Objective<'a>,
    states: Vec<CVector>,
    probs: Vec<f64>,
    steps: Vec<f64>,
    prob_step: f64,
    cache: Cache,
    chis: Vec<f64>,
    value: f64,
}

impl<'a> Restart<'a> {
    fn new(obj: &'a Objective<'a>, params: EnsembleParams) -> Self {
        let states: Vec<CVector> = params
            .states
            .iter()
            .map(|s| s.amplitudes().clone())
            .collect();
        let outputs: Vec<Vec<CMatrix>> = obj
            .branches
            .iter()
            .map(|b| states.iter().map(|s| pure_output(b, s)).collect())
            .collect();
        let entropies = outputs
            .iter()
            .map(|os| os.iter().map(entropy).collect())
            .collect();
        let m = states.len();
        let mut r = Self {
            obj,
            states,
            probs: params.probs,
            steps: vec![0.5; m],
            prob_step: 1.0,
            cache: Cache { outputs, entropies },
            chis: Vec::new(),
            value: 0.0,
        };
        r.chis = r.branch_chis(&r.probs);
        r.value = obj.combine(&r.chis);
        r
    }

    fn branch_chis(&self, probs: &[f64]) -> Vec<f64> {
        (0..self.obj.branches.len())
            .map(|b| branch_chi(probs, &self.cache.outputs[b], &self.cache.entropies[b]))
            .collect()
    }

    fn probability_step(&mut self) {
        if self.probs.len() < 2 {
            return;
        }
        let grads: Vec<Vec<f64>> = (0..self.obj.branches.len())
            .map(|b| {
                branch_gradient(
                    &self.probs,
                    &self.cache.outputs[b],
                    &self.cache.entropies[b],
                )
            })
            .collect();
        let grad: Vec<f64> = match self.obj.aggregate {
            Aggregate::Mean => (0..self.probs.len())
                .map(|j| grads.iter().map(|g| g[j]).sum::<f64>() / grads.len() as f64)
                .collect(),
            Aggregate::Min => grads[Objective::active_branch(&self.chis)].clone(),
        };
        let mut t = self.prob_step;
        for _ in 0..30 {
            let cand: Vec<f64> = self
                .probs
                .iter()
                .zip(&grad)
                .map(|(p, g)| p + t * g)
                .collect();
            let cand = project_simplex(&cand);
            let ascent: f64 = cand
                .iter()
                .zip(&self.probs)
                .zip(&grad)
                .map(|((c, p), g)| (c - p) * g)
                .sum();
            if ascent <= 0.0 {
                break;
            }
            let chis = self.branch_chis(&cand);
            let value = self.obj.combine(&chis);
            let sufficient = match self.obj.aggregate {
                Aggregate::Mean => value >= self.value + 1e-4 * ascent,
                Aggregate::Min => value > self.value,
            };
            if sufficient {
                self.probs = cand;
                self.chis = chis;
                self.value = value;
                self.prob_step = (t * 2.0).min(1e3);
                return;
            }
            t *= 0.5;
        }
        self.prob_step = (t * 2.0).max(1e-8);
    }

    fn state_sweep(&mut self, rng: &mut ChaCha8Rng) {
        let dim = self.states[0].len();
        let scale = 1.0 / (dim as f64).sqrt();
        for j in 0..self.states.len() {
            if self.probs[j] <= 0.0 {
                continue;
            }
            let step = self.steps[j];
            let noise = DVector::from_fn(dim, |_, _| complex_gaussian(rng) * (step * scale));
            let cand = &self.states[j] + noise;
            let norm = cand.norm();
            if norm == 0.0 || !norm.is_finite() {
                continue;
            }
            let cand = cand / Complex64::new(norm, 0.0);

            let new_out: Vec<CMatrix> = self
                .obj
                .branches
                .iter()
                .map(|b| pure_output(b, &cand))
                .collect();
            let new_ent: Vec<f64> = new_out.iter().map(entropy).collect();
            let mut chis = Vec::with_capacity(new_out.len());
            for (b, (o, s)) in new_out.iter().zip(&new_ent).enumerate() {
                let old_o = std::mem::replace(&mut self.cache.outputs[b][j], o.clone());
                let old_s = std::mem::replace(&mut self.cache.entropies[b][j], *s);
                chis.push(branch_chi(
                    &self.probs,
                    &self.cache.outputs[b],
                    &self.cache.entropies[b],
                ));
                self.cache.outputs[b][j] = old_o;
                self.cache.entropies[b][j] = old_s;
            }
            let value = self.obj.combine(&chis);
            if value > self.value {
                self.states[j] = cand;
                for (b, (o, s)) in new_out.into_iter().zip(new_ent).enumerate() {
                    self.cache.outputs[b][j] = o;
                    self.cache.entropies[b][j] = s;
                }
                self.chis = chis;
                self.value = value;
                self.steps[j] = (step * 1.5).min(1.0);
            } else {
                self.steps[j] = (step * 0.8).max(1e-7);
            }
        }
    }

    fn run(mut self, cfg: &OptimizerConfig, rng: &mut ChaCha8Rng) -> RestartOutcome {
        let mut stall = 0;
        let mut iterations = 0;
        let mut converged = false;
        for _ in 0..cfg.iters {
            iterations += 1;
            let before = self.value;
            self.probability_step();
            self.state_sweep(rng);
            if self.value - before < cfg.tol {
                stall += 1;
                if stall >= cfg.stall {
                    converged = true;
                    break;
                }
            } else {
                stall = 0;
            }
        }
        RestartOutcome {
            params: EnsembleParams {
                states: self
                    .states
                    .into_iter()
                    .map(|v| PureState::normalized(v).expect("states stay nonzero"))
                    .collect(),
                probs: self.probs,
            },
            value: self.value,
            iterations,
            converged,
        }
    }
}

struct RestartOutcome {
    params: EnsembleParams,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn run_search<F>(
    obj: &Objective<'_>,
    dim: usize,
    m: usize,
    cfg: &OptimizerConfig,
    evaluate: F,
) -> Result<OptResult>
where
    F: Fn(&Ensemble) -> Result<f64>,
{
    if m == 0 {
        return Err(Error::InvalidArgument("ensemble size must be >= 1".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    if dim > cfg.max_dim {
        return Err(Error::Capability(format!(
            "input dimension {dim} exceeds the optimizer cap {}",
            cfg.max_dim
        )));
    }

    let one = |r: usize| {
        let mut rng = restart_rng(cfg.seed, r);
        let start = EnsembleParams::random(dim, m, &mut rng);
        Restart::new(obj, start).run(cfg, &mut rng)
    };
    let outcomes: Vec<RestartOutcome> = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| (0..cfg.restarts).into_par_iter().map(one).collect()),
        None => (0..cfg.restarts).into_par_iter().map(one).collect(),
    };

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let o = &outcomes[best];
    let ensemble = o.params.decode()?;
    let value = evaluate(&ensemble)?;
    Ok(OptResult {
        value,
        ensemble,
        restarts_used: cfg.restarts,
        best_restart: best,
        iterations: o.iterations,
        converged: o.converged,
        seed: cfg.seed,
    })
}

/// Lower bound on `chi*(ch)` achieved by the returned ensemble.
pub fn maximize_chi(ch: &KrausChannel, m: usize, cfg: &OptimizerConfig) -> Result<OptResult> {
    let branches = std::slice::from_ref(ch);
    let obj = Objective {
        branches,
        aggregate: Aggregate::Mean,
    };
    run_search(&obj, ch.din(), m, cfg, |e| chi(ch, e))
}

/// Maximizes the mean over branches of the single-use Holevo quantities.
pub fn maximize_avg_chi(
    ch: &PeriodicChannel,
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    let obj = Objective {
        branches: ch.branches(),
        aggregate: Aggregate::Mean,
    };
    run_search(&obj, ch.dim(), m, cfg, |e| chi_periodic_average(ch, e))
}

/// Maximizes the smallest branch Holevo quantity.
pub fn maximize_min_chi(
    ch: &ConvexCombinationChannel,
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    let obj = Objective {
        branches: ch.branches(),
        aggregate: Aggregate::Min,
    };
    run_search(&obj, ch.dim(), m, cfg, |e| chi_branch_min(ch, e))
}

/// Maximin over an explicit list of branch channels sharing one input space,
/// e.g. the two-use memoryless branches of a convex combination.
pub fn maximize_min_chi_branches(
    branches: &[KrausChannel],
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    let first = branches
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least one branch".into()))?;
    if let Some(b) = branches.iter().find(|b| b.din() != first.din()) {
        return Err(Error::DimensionMismatch {
            expected: first.din(),
            actual: b.din(),
        });
    }
    let obj = Objective {
        branches,
        aggregate: Aggregate::Min,
    };
    run_search(&obj, first.din(), m, cfg, |e| {
        branches
            .iter()
            .try_fold(f64::INFINITY, |acc, b| Ok(acc.min(chi(b, e)?)))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityGap {
    /// `search.value - 2 * chi_star_single`
    pub gap: f64,
    pub search: OptResult,
}

/// Entangled search over two-use ensembles of `ch` compared with twice the
/// single-use capacity. Additivity means the gap cannot be positive.
pub fn additivity_gap(
    ch: &KrausChannel,
    chi_star_single: f64,
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<AdditivityGap> {
    let search = maximize_chi(ch, m, cfg)?;
    Ok(AdditivityGap {
        gap: search.value - 2.0 * chi_star_single,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, DepolarizingParams};
    use approx::assert_abs_diff_eq;

    fn dep(d: usize, l: f64) -> KrausChannel {
        depolarizing(DepolarizingParams::new(d, l).unwrap()).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 4,
            iters: 400,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.2, 0.2, 0.2]);
        for x in &p {
            assert_abs_diff_eq!(*x, 1.0 / 3.0, epsilon = 1e-15);
        }
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.6, 0.6]);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        let p = project_simplex(&[0.9, 0.5, 0.1]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = restart_rng(3, 0);
        let ch = dep(2, 0.3);
        let params = EnsembleParams::random(2, 3, &mut rng);
        let outputs: Vec<CMatrix> = params
            .states
            .iter()
            .map(|s| pure_output(&ch, s.amplitudes()))
            .collect();
        let ents: Vec<f64> = outputs.iter().map(entropy).collect();
        let probs = vec![0.2, 0.5, 0.3];
        let g = branch_gradient(&probs, &outputs, &ents);
        // Directional derivative along e_0 - e_1 stays on the simplex.
        let h = 1e-6;
        let plus = branch_chi(&[0.2 + h, 0.5 - h, 0.3], &outputs, &ents);
        let minus = branch_chi(&[0.2 - h, 0.5 + h, 0.3], &outputs, &ents);
        let fd = (plus - minus) / (2.0 * h);
        assert_abs_diff_eq!(fd, g[0] - g[1], epsilon = 1e-6);
    }

    #[test]
    fn noiseless_qubit() {
        let r = maximize_chi(&KrausChannel::identity(2), 2, &quick()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn constant_channel_gives_zero() {
        let r = maximize_chi(&dep(2, 0.0), 4, &quick()).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn single_state_ensemble_gives_zero() {
        let r = maximize_chi(&dep(2, 0.8), 1, &quick()).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn value_is_reproducible_from_ensemble() {
        let ch = dep(3, 0.4);
        let r = maximize_chi(&ch, 5, &quick()).unwrap();
        assert_abs_diff_eq!(r.value, chi(&ch, &r.ensemble).unwrap(), epsilon = 1e-9);
        assert_eq!(r.ensemble.len(), 5);
    }

    #[test]
    fn deterministic_for_fixed_seed_and_thread_count_independent() {
        let ch = dep(2, 0.5);
        let a = maximize_chi(&ch, 4, &quick()).unwrap();
        let b = maximize_chi(
            &ch,
            4,
            &OptimizerConfig {
                threads: Some(1),
                ..quick()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        let c = maximize_chi(&ch, 4, &OptimizerConfig { seed: 8, ..quick() }).unwrap();
        assert_eq!(c.seed, 8);
    }

    #[test]
    fn more_restarts_never_hurt() {
        let ch = dep(2, 0.5);
        let mut last = f64::NEG_INFINITY;
        for restarts in 1..=4 {
            let cfg = OptimizerConfig {
                restarts,
                iters: 50,
                ..OptimizerConfig::default()
            };
            let v = maximize_chi(&ch, 4, &cfg).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = OptimizerConfig {
            max_dim: 2,
            ..quick()
        };
        assert!(matches!(
            maximize_chi(&dep(3, 0.5), 4, &cfg),
            Err(Error::Capability(_))
        ));
        assert!(maximize_chi(&dep(2, 0.5), 0, &quick()).is_err());
        let none = OptimizerConfig {
            restarts: 0,
            ..quick()
        };
        assert!(maximize_chi(&dep(2, 0.5), 2, &none).is_err());
    }

    #[test]
    fn maximin_branch_list_checks_dims() {
        assert!(maximize_min_chi_branches(&[], 2, &quick()).is_err());
        assert!(maximize_min_chi_branches(&[dep(2, 0.5), dep(3, 0.5)], 2, &quick()).is_err());
    }
}
