//! Library results against independent brute-force computations and frozen values.

mod common;

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;

use common::*;
use tfloc::gabor::{self, WindowBundle};
use tfloc::lattice::{adjoint_lattice, fundamental_domain, lattice_from_generators, separable_lattice, Lattice};
use tfloc::linalg::hermitian_eigen;
use tfloc::locop::{self, symbols, PhaseRegion, Strategy};
use tfloc::modnorm::{self, NormSpec, Weight};
use tfloc::phase_space::{
    commutation_phase, gaussian_window, stft, stft_adjoint, tf_shift, tf_shift_matrix, PhasePoint, Signal, TFMatrix,
};
use tfloc::Operator;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// `(pi(k,l) f)(t) = e^{2 pi i l t / N} f(t - k)` straight from the definition.
fn naive_shift(k: usize, l: usize, f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n).map(|t| e((l * t) as f64 / n as f64) * f[(t + n - k % n) % n]).collect()
}

fn naive_shift_matrix(k: usize, l: usize, n: usize) -> Operator {
    Operator::from_fn(n, n, |t, s| if (t + n - s) % n == k % n { e((l * t) as f64 / n as f64) } else { c(0.0, 0.0) })
}

fn naive_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for t in 0..a.len() {
        acc += a[t] * b[t].conj();
    }
    acc
}

/// `V_phi f(k,l) = sum_t f(t) conj(phi(t-k)) e^{-2 pi i l t / N}` as a double loop.
fn naive_stft(phi: &[Complex64], f: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = f.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    let mut acc = c(0.0, 0.0);
                    for t in 0..n {
                        acc += f[t] * phi[(t + n - k) % n].conj() * e(-((l * t) as f64) / n as f64);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `sum_{lambda, j} <f, pi(lambda) psi_j> pi(lambda) phi_j` as an explicit matrix.
fn naive_frame_type(phi: &[Signal], psi: &[Signal], lattice: &Lattice) -> Operator {
    let n = lattice.n();
    let mut s = Operator::zeros(n, n);
    for lam in lattice.elements() {
        for (p, q) in phi.iter().zip(psi) {
            let a = naive_shift(lam.k, lam.l, p.values());
            let b = naive_shift(lam.k, lam.l, q.values());
            for r in 0..n {
                for col in 0..n {
                    s[(r, col)] += a[r] * b[col].conj();
                }
            }
        }
    }
    s
}

fn naive_locop(sigma: &TFMatrix, phi: &[Complex64]) -> Operator {
    let n = phi.len();
    let mut h = Operator::zeros(n, n);
    for z in PhasePoint::all(n) {
        let v = naive_shift(z.k, z.l, phi);
        let s = sigma.get(z);
        for r in 0..n {
            for col in 0..n {
                h[(r, col)] += s * v[r] * v[col].conj();
            }
        }
    }
    h / c(n as f64, 0.0)
}

// ---------------------------------------------------------------------------

#[test]
fn shift_matrix_matches_definition() {
    for n in [2usize, 5, 8] {
        for z in PhasePoint::all(n) {
            assert!((tf_shift_matrix(z, n) - naive_shift_matrix(z.k, z.l, n)).norm() < 1e-13);
        }
    }
}

#[test]
fn composition_law() {
    let mut rng = rng(1);
    for _ in 0..50 {
        let n = rng.random_range(2..10usize);
        let (z1, z2) = (random_point(&mut rng, n), random_point(&mut rng, n));
        let lhs = naive_shift_matrix(z1.k, z1.l, n) * naive_shift_matrix(z2.k, z2.l, n);
        let sum = z1.add(z2, n);
        let phase = e(-((z2.l * z1.k) as f64) / n as f64);
        let rhs = tf_shift_matrix(sum, n) * phase;
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn commutation_phase_frozen_value() {
    let n = 4;
    let p = commutation_phase(PhasePoint { k: 1, l: 0 }, PhasePoint { k: 0, l: 1 }, n);
    assert!((p - c(0.0, -1.0)).norm() < 1e-15);
    let a = naive_shift_matrix(1, 0, n) * naive_shift_matrix(0, 1, n);
    let b = naive_shift_matrix(0, 1, n) * naive_shift_matrix(1, 0, n) * p;
    assert!((a - b).norm() < 1e-14);
}

#[test]
fn stft_and_moyal_against_double_sum() {
    let mut rng = rng(2);
    for n in [3usize, 4, 6, 8] {
        let phi = random_window(&mut rng, n);
        let f = random_signal(&mut rng, n);
        let v = stft(&phi, &f).unwrap();
        let naive = naive_stft(phi.values(), f.values());
        let mut energy = 0.0;
        for k in 0..n {
            for l in 0..n {
                assert!((v.get(PhasePoint { k, l }) - naive[k][l]).norm() < 1e-12);
                energy += naive[k][l].norm_sqr();
            }
        }
        let fn2: f64 = f.values().iter().map(|x| x.norm_sqr()).sum();
        assert!((energy - n as f64 * fn2).abs() < 1e-11 * energy);
    }
}

#[test]
fn stft_adjoint_against_definition() {
    let mut rng = rng(3);
    let n = 6;
    let phi = random_window(&mut rng, n);
    let big_f = TFMatrix::from_fn(n, |_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut expected = vec![c(0.0, 0.0); n];
    for z in PhasePoint::all(n) {
        for (t, x) in naive_shift(z.k, z.l, phi.values()).into_iter().enumerate() {
            expected[t] += big_f.get(z) * x;
        }
    }
    let got = stft_adjoint(&phi, &big_f).unwrap();
    for t in 0..n {
        assert!((got.values()[t] - expected[t]).norm() < 1e-12);
    }
}

// ---------------------------------------------------------------------------

#[test]
fn separable_lattice_sizes_and_adjoints() {
    for n in 2..=12usize {
        for a in (1..=n).filter(|a| n % a == 0) {
            for b in (1..=n).filter(|b| n % b == 0) {
                let lat = separable_lattice(n, a, b).unwrap();
                assert_eq!(lat.len(), (n / a) * (n / b));
                assert_eq!(lat.volume(), a * b);
                assert_eq!(adjoint_lattice(&lat), separable_lattice(n, n / b, n / a).unwrap());
            }
        }
    }
}

#[test]
fn cyclic_lattice_from_one_generator() {
    let lat = lattice_from_generators(4, &[PhasePoint { k: 1, l: 2 }]).unwrap();
    let expected: Vec<PhasePoint> =
        [(0, 0), (1, 2), (2, 0), (3, 2)].iter().map(|&(k, l)| PhasePoint { k, l }).collect();
    assert_eq!(lat.elements(), expected.as_slice());
    // Brute-force annihilator of the generator.
    let adj: Vec<PhasePoint> = PhasePoint::all(4).filter(|m| (2 * m.k + 4 - m.l) % 4 == 0).collect();
    assert_eq!(adjoint_lattice(&lat).elements(), adj.as_slice());
}

#[test]
fn fundamental_domain_of_separable_lattice_is_a_box() {
    let lat = separable_lattice(8, 2, 4).unwrap();
    let cells = fundamental_domain(&lat);
    let expected: Vec<PhasePoint> = (0..2).flat_map(|k| (0..4).map(move |l| PhasePoint { k, l })).collect();
    assert_eq!(cells.domain(), expected.as_slice());
}

// ---------------------------------------------------------------------------

#[test]
fn janssen_constant_calibrated_by_least_squares() {
    let mut rng = rng(4);
    let instances = [(6, 1, 2), (6, 2, 3), (8, 2, 1), (8, 4, 2), (4, 1, 1)];
    for (n, a, b) in instances {
        let lat = separable_lattice(n, a, b).unwrap();
        let phi = random_bundle(&mut rng, n, 2).signals();
        let psi = random_bundle(&mut rng, n, 2).signals();
        let s = naive_frame_type(&phi, &psi, &lat);
        let mut basis = Operator::zeros(n, n);
        for mu in adjoint_lattice(&lat).elements() {
            let coef: Complex64 =
                phi.iter().zip(&psi).map(|(p, q)| naive_inner(p.values(), &naive_shift(mu.k, mu.l, q.values()))).sum();
            basis += naive_shift_matrix(mu.k, mu.l, n) * coef;
        }
        let num: Complex64 = s.iter().zip(basis.iter()).map(|(x, y)| x * y.conj()).sum();
        let kappa = num.re / basis.norm_squared();
        assert!((kappa - (n / a * (n / b)) as f64 / n as f64).abs() < 1e-12, "N={n} a={a} b={b}: {kappa}");
        assert!((kappa - gabor::janssen_constant(&lat)).abs() < 1e-12);
        assert!((s - basis * c(kappa, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn synthesis_after_analysis_is_frame_operator() {
    let mut rng = rng(5);
    for (n, a, b) in [(6, 2, 3), (8, 2, 2), (4, 1, 2)] {
        let lat = separable_lattice(n, a, b).unwrap();
        let bundle = random_bundle(&mut rng, n, 2);
        let f = random_signal(&mut rng, n);
        let dc = gabor::synthesis(&bundle, &lat, &gabor::analysis(&bundle, &lat, &f).unwrap()).unwrap();
        let s = naive_frame_type(&bundle.signals(), &bundle.signals(), &lat);
        let sf = Signal::from_vector(&(s.clone() * f.to_vector()));
        assert!(dc.distance(&sf) < 1e-11);
        assert!((gabor::frame_operator(&bundle, &lat).unwrap() - s).norm() < 1e-11);
    }
}

#[test]
fn full_lattice_gaussian_is_tight_with_bound_n() {
    for n in [4usize, 6, 8] {
        let lat = separable_lattice(n, 1, 1).unwrap();
        let r = gabor::frame_bounds(&gabor::frame_operator(&WindowBundle::single(gaussian_window(n)), &lat).unwrap()).unwrap();
        assert!((r.lower_bound - n as f64).abs() < 1e-10 && (r.upper_bound - n as f64).abs() < 1e-10);
    }
}

#[test]
fn trivial_lattice_is_not_a_frame() {
    let lat = lattice_from_generators(6, &[PhasePoint::ORIGIN]).unwrap();
    let r = gabor::frame_bounds(&gabor::frame_operator(&WindowBundle::single(gaussian_window(6)), &lat).unwrap()).unwrap();
    assert!(!r.is_frame);
}

#[test]
fn critical_gaussian_frame_bounds_at_n4() {
    // The even Gaussian at critical density N = 4, a = b = 2 has spectrum {0, 4 - 2 sqrt 2 (twice), 4 sqrt 2 - 4}.
    let lat = separable_lattice(4, 2, 2).unwrap();
    let g = gaussian_window(4);
    let s = naive_frame_type(&[g.signal().clone()], &[g.signal().clone()], &lat);
    let mut naive = hermitian_eigen(&s).unwrap().values;
    naive.reverse();
    let r = gabor::frame_bounds(&gabor::frame_operator(&WindowBundle::single(g), &lat).unwrap()).unwrap();
    let expected = [0.0, 4.0 - 2.0 * SQRT_2, 4.0 - 2.0 * SQRT_2, 4.0 * SQRT_2 - 4.0];
    for i in 0..4 {
        assert!((r.spectrum[i] - expected[i]).abs() < 1e-12, "{:?}", r.spectrum);
        assert!((naive[i] - expected[i]).abs() < 1e-12);
    }
    assert!(!r.is_frame);
    assert!((r.upper_bound - (4.0 * SQRT_2 - 4.0)).abs() < 1e-12);
}

#[test]
fn canonical_dual_reconstructs_at_n6() {
    let mut rng = rng(6);
    let lat = separable_lattice(6, 2, 2).unwrap();
    let bundle = WindowBundle::single(gaussian_window(6));
    let duals = gabor::dual_windows(&bundle, &lat).unwrap();
    let (phi, gamma) = (bundle.signals(), duals.signals());
    for _ in 0..5 {
        let f = random_signal(&mut rng, 6);
        let mut rec = vec![c(0.0, 0.0); 6];
        for lam in lat.elements() {
            let coef = naive_inner(f.values(), &naive_shift(lam.k, lam.l, phi[0].values()));
            for (t, x) in naive_shift(lam.k, lam.l, gamma[0].values()).into_iter().enumerate() {
                rec[t] += coef * x;
            }
        }
        assert!(Signal::new(rec).distance(&f) < 1e-10 * f.norm2());
    }
}

// ---------------------------------------------------------------------------

#[test]
fn localization_operator_against_rank_one_sum_and_weak_form() {
    let mut rng = rng(7);
    for n in [4usize, 6] {
        let phi = random_window(&mut rng, n);
        let sigma = random_symbol(&mut rng, n);
        let h = locop::localization_operator(&sigma, &phi).unwrap();
        assert!((h.matrix() - naive_locop(&sigma, phi.values())).norm() < 1e-12);

        let f = random_signal(&mut rng, n);
        let g = random_signal(&mut rng, n);
        let (vf, vg) = (naive_stft(phi.values(), f.values()), naive_stft(phi.values(), g.values()));
        let mut weak = c(0.0, 0.0);
        for z in PhasePoint::all(n) {
            weak += sigma.get(z) * vf[z.k][z.l] * vg[z.k][z.l].conj();
        }
        weak /= n as f64;
        assert!((h.apply(&f).inner(&g) - weak).norm() < 1e-12);
    }
}

#[test]
fn constant_symbol_with_unit_window_is_identity() {
    let n = 7;
    let h = locop::localization_operator(&TFMatrix::constant(n, 1.0), &gaussian_window(n)).unwrap();
    assert!((h.matrix() - Operator::identity(n, n)).norm() < 1e-12);
}

#[test]
fn intertwining_against_naive_operators() {
    let mut rng = rng(8);
    for _ in 0..20 {
        let n = [4usize, 6, 8][rng.random_range(0..3)];
        let phi = random_window(&mut rng, n);
        let sigma = random_symbol(&mut rng, n);
        let lam = random_point(&mut rng, n);
        let p = naive_shift_matrix(lam.k, lam.l, n);
        let lhs = &p * naive_locop(&sigma, phi.values()) * p.adjoint();
        let translated = TFMatrix::from_fn(n, |z| sigma.get(z.sub(lam, n)));
        let rhs = locop::localization_operator(&translated, &phi).unwrap();
        assert!((lhs - rhs.matrix()).norm() < 1e-12);
    }
}

#[test]
fn top_eigenvalue_bounded_by_symbol_maximum_and_trace_matches() {
    let mut rng = rng(9);
    for _ in 0..20 {
        let n = 6;
        let phi = random_window(&mut rng, n);
        let sigma = random_symbol(&mut rng, n);
        let h = locop::localization_operator(&sigma, &phi).unwrap();
        let d = locop::spectral_decomposition(&h).unwrap();
        assert!(d.eigenvalues[0] <= sigma.max_abs() + 1e-12);
        let trace: f64 = d.eigenvalues.iter().sum();
        let symbol_sum: f64 = sigma.real_parts().iter().sum();
        assert!((trace - symbol_sum / n as f64).abs() < 1e-12);
    }
}

#[test]
fn half_indicator_gives_equality_in_concentration() {
    let mut rng = rng(10);
    let n = 6;
    let omega = PhaseRegion::from_points(n, random_nonempty_region(&mut rng, n, 0.4));
    let sigma = symbols::scaled(&omega.indicator(), 0.5);
    let h = locop::localization_operator(&sigma, &random_window(&mut rng, n)).unwrap();
    let d = locop::spectral_decomposition(&h).unwrap();
    for j in 0..n {
        let r = locop::concentration(&h, &d, j, &omega).unwrap();
        assert_eq!(r.c_sigma, 0.5);
        assert!(r.equality_expected && r.equality_holds);
        assert!((r.lhs - 2.0 * d.eigenvalues[j]).abs() < 1e-12);
    }
}

// ---------------------------------------------------------------------------

#[test]
fn unweighted_l2_modulation_norm_is_scaled_signal_norm() {
    let mut rng = rng(11);
    let spec = NormSpec::unweighted(2.0, 2.0).unwrap();
    for n in [4usize, 9] {
        let f = random_signal(&mut rng, n);
        let v = modnorm::modulation_norm(&f, &random_window(&mut rng, n), &spec).unwrap();
        assert!((v - f.norm2() / (n as f64).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn localization_norm_against_brute_force_at_n6() {
    let mut rng = rng(12);
    let n = 6;
    let lat = separable_lattice(n, 2, 3).unwrap();
    let phi = random_window(&mut rng, n);
    let sigma = random_symbol(&mut rng, n);
    let f = random_signal(&mut rng, n);
    let weight = Weight::Polynomial(1.0);
    for (p, q) in [(1.0, 2.0), (2.0, 2.0), (f64::INFINITY, 1.0)] {
        let spec = NormSpec::unweighted(p, q).unwrap().with_weights(weight, weight);
        // Cells of 2Z x 3Z are {0,1} x {0,1,2} translated by lambda; build the spread by hand.
        let mut spread = vec![0.0; n * n];
        for lam in lat.elements() {
            let translated = TFMatrix::from_fn(n, |z| sigma.get(z.sub(*lam, n)));
            let hf = naive_locop(&translated, phi.values()) * f.to_vector();
            for dk in 0..2 {
                for dl in 0..3 {
                    let z = lam.add(PhasePoint { k: dk, l: dl }, n);
                    spread[z.index(n)] = hf.norm();
                }
            }
        }
        let lp = |xs: Vec<f64>, e: f64| {
            if e.is_infinite() { xs.into_iter().fold(0.0, f64::max) } else { xs.into_iter().map(|x| x.powf(e)).sum::<f64>().powf(1.0 / e) }
        };
        let expected = lp(
            (0..n)
                .map(|l| lp((0..n).map(|k| spread[PhasePoint { k, l }.index(n)] * weight.eval(PhasePoint { k, l }, n)).collect(), p))
                .collect(),
            q,
        );
        let got = modnorm::localization_norm(&f, &sigma, &phi, &lat, &spec).unwrap();
        assert!((got - expected).abs() < 1e-11 * expected, "p={p} q={q}: {got} vs {expected}");
    }
}

#[test]
fn separable_reduction_matches_cell_spread() {
    let mut rng = rng(13);
    for (n, a, b) in [(8, 2, 2), (6, 3, 2), (12, 4, 3)] {
        let lat = separable_lattice(n, a, b).unwrap();
        let values: Vec<f64> = (0..lat.len()).map(|_| rng.random::<f64>()).collect();
        for (p, q) in [(1.0, 1.0), (2.0, 3.0), (f64::INFINITY, 2.0), (1.5, f64::INFINITY)] {
            let spec = NormSpec::unweighted(p, q).unwrap();
            let direct = modnorm::sequence_norm(&values, &lat, &spec).unwrap();
            let reduced = modnorm::separable_sequence_norm(&values, n, a, b, &spec).unwrap();
            assert!((direct - reduced).abs() < 1e-12 * direct, "N={n} a={a} b={b} p={p} q={q}");
        }
    }
}

#[test]
fn coefficient_norm_full_lattice_and_duplicated_window() {
    let mut rng = rng(14);
    let n = 6;
    let spec = NormSpec::unweighted(2.0, 2.0).unwrap();
    let full = separable_lattice(n, 1, 1).unwrap();
    let phi = random_window(&mut rng, n);
    let f = random_signal(&mut rng, n);
    let single = WindowBundle::single(phi.clone());
    let one = modnorm::multiwindow_coefficient_norm(&f, &single, &full, &spec).unwrap();
    assert!((one - (n as f64).sqrt() * f.norm2()).abs() < 1e-12);
    let twice = WindowBundle::new(vec![phi.clone(), phi]).unwrap();
    let lat = separable_lattice(n, 2, 3).unwrap();
    let a = modnorm::multiwindow_coefficient_norm(&f, &single, &lat, &spec).unwrap();
    let b = modnorm::multiwindow_coefficient_norm(&f, &twice, &lat, &spec).unwrap();
    assert!((b - SQRT_2 * a).abs() < 1e-12);
}

#[test]
fn sampling_inequality_with_block_counts() {
    let mut rng = rng(15);
    let groups = Subgroups::new(&[8]);
    for i in 0..30 {
        let lat = groups.pick(&mut rng, 8, |_| true);
        let big_f = stft(&random_window(&mut rng, 8), &random_signal(&mut rng, 8)).unwrap();
        let block = [1usize, 2, 4, 8][i % 4];
        let spec = NormSpec::unweighted(1.0 + i as f64 / 10.0, 2.0).unwrap();
        let r = modnorm::sampling_check(&big_f, &lat, block, &spec).unwrap();
        let mut counts = std::collections::HashMap::new();
        for lam in lat.elements() {
            *counts.entry((lam.k / block, lam.l / block)).or_insert(0usize) += 1;
        }
        assert_eq!(r.c_lambda, *counts.values().max().unwrap() as f64);
        assert!(r.passes && r.lhs <= r.rhs);
    }
}

// ---------------------------------------------------------------------------

#[test]
fn construction_regression_at_n8() {
    let n = 8;
    let lat = separable_lattice(n, 2, 2).unwrap();
    let sigma = symbols::fundamental_cell(&fundamental_domain(&lat));
    let built = locop::construct_multiwindow_frame(&sigma, &gaussian_window(n), &lat, Strategy::First).unwrap();
    assert_eq!(built.n, 1);
    assert_eq!(built.trace.len(), 1);
    assert!((built.report.lower_bound - 2.0).abs() < 1e-10 && (built.report.upper_bound - 2.0).abs() < 1e-10);
    assert!((built.eigenvalues[0] - 0.410_885_173_254_716_7).abs() < 1e-12);
    let s = naive_frame_type(&built.bundle.signals(), &built.bundle.signals(), &lat);
    assert!((s - Operator::identity(n, n) * c(2.0, 0.0)).norm() < 1e-10);
}

#[test]
fn shift_of_delta_is_modulated_delta() {
    let n = 5;
    let f = tf_shift(PhasePoint { k: 2, l: 3 }, &Signal::delta(n, 0));
    for t in 0..n {
        let expected = if t == 2 { e(6.0 / 5.0) } else { c(0.0, 0.0) };
        assert!((f.values()[t] - expected).norm() < 1e-15);
    }
}
