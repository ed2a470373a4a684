#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tfloc::gabor::WindowBundle;
use tfloc::lattice::{enumerate_subgroups, Lattice};
use tfloc::phase_space::{PhasePoint, Signal, TFMatrix, Window};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut impl Rng, n: usize) -> Signal {
    Signal::new(
        (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    )
}

pub fn random_window(rng: &mut impl Rng, n: usize) -> Window {
    Window::unit(random_signal(rng, n)).expect("random window is nonzero")
}

pub fn random_bundle(rng: &mut impl Rng, n: usize, count: usize) -> WindowBundle {
    WindowBundle::new((0..count).map(|_| random_window(rng, n)).collect()).unwrap()
}

pub fn random_point(rng: &mut impl Rng, n: usize) -> PhasePoint {
    PhasePoint { k: rng.random_range(0..n), l: rng.random_range(0..n) }
}

/// Nonnegative symbol with roughly a third of its entries zero.
pub fn random_symbol(rng: &mut impl Rng, n: usize) -> TFMatrix {
    TFMatrix::from_real_fn(n, |_| if rng.random::<f64>() < 0.33 { 0.0 } else { rng.random::<f64>() * 2.0 })
}

/// Subgroups of `Z_n x Z_n` for each `n` in `ns`, computed once.
pub struct Subgroups(Vec<(usize, Vec<Lattice>)>);

impl Subgroups {
    pub fn new(ns: &[usize]) -> Self {
        Subgroups(ns.iter().map(|&n| (n, enumerate_subgroups(n))).collect())
    }

    /// Uniformly chosen subgroup of `Z_n x Z_n` satisfying `keep`.
    pub fn pick(&self, rng: &mut impl Rng, n: usize, keep: impl Fn(&Lattice) -> bool) -> Lattice {
        let all: Vec<&Lattice> = self
            .0
            .iter()
            .find(|(m, _)| *m == n)
            .expect("n was not enumerated")
            .1
            .iter()
            .filter(|l| keep(l))
            .collect();
        assert!(!all.is_empty(), "no subgroup of Z_{n}^2 satisfies the filter");
        all[rng.random_range(0..all.len())].clone()
    }
}

pub fn random_nonempty_region(rng: &mut impl Rng, n: usize, density: f64) -> Vec<PhasePoint> {
    loop {
        let pts: Vec<PhasePoint> = PhasePoint::all(n).filter(|_| rng.random::<f64>() < density).collect();
        if !pts.is_empty() {
            return pts;
        }
    }
}
