//! Random states, unitaries and measurements for property checks and
//! optimizer restarts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::quantum::{CMatrix, CVector, DensityMatrix, PureState};

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Hilbert-Schmidt random mixed state `G G† / tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let p = &g * g.adjoint();
    let tr = p.trace();
    DensityMatrix::new(p / tr).expect("Ginibre product is a state")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the diagonal phases of R divided out.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random probability vector drawn uniformly from the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
