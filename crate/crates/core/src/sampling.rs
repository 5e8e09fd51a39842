//! Seeded random inputs for verification runs.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`; ChaCha is
//! counter based, so per-trial streams are independent of evaluation order
//! and can be drawn in parallel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dmodule::BCVector;
use crate::dop::BCMatrix;
use crate::hyperscalar::{Bicomplex, Hyperbolic};

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (independent `N(0,1)` real and imaginary parts).
pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn bicomplex<R: Rng + ?Sized>(rng: &mut R) -> Bicomplex {
    Bicomplex::raw(complex(rng), complex(rng))
}

pub fn hyperbolic<R: Rng + ?Sized>(rng: &mut R) -> Hyperbolic {
    Hyperbolic::raw(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| complex(rng))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BCVector {
    let v1 = complex_vector(rng, n);
    let v2 = complex_vector(rng, n);
    BCVector::raw(v1, v2)
}

/// Both idempotent components uniformly distributed on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BCVector {
    let v = vector(rng, n);
    let d = v.dnorm(crate::dmodule::DNormConfig::L2);
    v.scale_components(1.0 / d.a1(), 1.0 / d.a2())
}

/// A vector whose component ℓ2 norms are independent and uniform on `[0, radius]`.
pub fn vector_in_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> BCVector {
    let u = unit_vector(rng, n);
    let s1 = radius * rng.random::<f64>();
    let s2 = radius * rng.random::<f64>();
    u.scale_components(s1, s2)
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> BCMatrix {
    let m1 = complex_matrix(rng, rows, cols);
    let m2 = complex_matrix(rng, rows, cols);
    BCMatrix::new(m1, m2).expect("finite gaussian entries")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        let b: Vec<f64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let x: f64 = trial_rng(7, 3).random();
        let y: f64 = trial_rng(7, 4).random();
        assert_ne!(x, y);
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..10 {
            let d = unit_vector(&mut rng, 5).dnorm(crate::dmodule::DNormConfig::L2);
            assert!((d.a1() - 1.0).abs() < 1e-14 && (d.a2() - 1.0).abs() < 1e-14);
        }
    }
}
