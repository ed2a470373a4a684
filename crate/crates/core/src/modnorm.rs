//! Weights, weighted mixed norms on phase space and on lattice sequences, and the
//! norms they induce on `C^N`: the modulation norm, the localization-operator
//! norm and the multi-window coefficient norm. Also an empirical estimator of
//! equivalence constants between two norms.
//!
//! Mixed norms take the inner `l^p` sum over the time index `k` and the outer
//! `l^q` sum over the frequency index `l`.
//!
//! Normalization constants (for unit `phi`, `p = q = 2`, `m == 1`):
//!
//! | quantity                                  | value              |
//! |-------------------------------------------|--------------------|
//! | `sum_z |V_phi f(z)|^2`                    | `N ||f||^2`        |
//! | `modulation_norm(f)`                      | `||f|| / sqrt(N)`  |
//! | coefficient norm, full lattice, 1 window  | `sqrt(N) ||f||`    |

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Result, TfError};
use crate::gabor::WindowBundle;
use crate::lattice::{fundamental_domain, CellMap, Lattice};
use crate::locop::{localization_operator, partition_check, shifted_locop};
use crate::phase_space::{gaussian_window, stft_matrix, tf_shift, Operator, PhasePoint, Signal, TFMatrix, Window};

/// `sqrt(min(k, N-k)^2 + min(l, N-l)^2)`.
pub fn wrapped_distance(z: PhasePoint, n: usize) -> f64 {
    let dk = z.k.min(n - z.k) as f64;
    let dl = z.l.min(n - z.l) as f64;
    (dk * dk + dl * dl).sqrt()
}

/// Positive weight on `Z_N x Z_N` depending on the wrapped distance to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Constant,
    /// `(1 + |z|)^s`
    Polynomial(f64),
    /// `exp(a |z|^b)`
    Exponential(f64, f64),
}

impl Weight {
    pub fn eval(&self, z: PhasePoint, n: usize) -> f64 {
        match *self {
            Weight::Constant => 1.0,
            Weight::Polynomial(s) => (1.0 + wrapped_distance(z, n)).powf(s),
            Weight::Exponential(a, b) => (a * wrapped_distance(z, n).powf(b)).exp(),
        }
    }

    /// The weight as a phase-space function.
    pub fn table(&self, n: usize) -> Vec<f64> {
        PhasePoint::all(n).map(|z| self.eval(z, n)).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightRepr {
    kind: String,
    #[serde(default)]
    params: Vec<f64>,
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, params) = match *self {
            Weight::Constant => ("constant", vec![]),
            Weight::Polynomial(p) => ("polynomial", vec![p]),
            Weight::Exponential(a, b) => ("exponential", vec![a, b]),
        };
        WeightRepr { kind: kind.into(), params }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = WeightRepr::deserialize(d)?;
        match (r.kind.as_str(), r.params.as_slice()) {
            ("constant", []) => Ok(Weight::Constant),
            ("polynomial", [s]) if *s >= 0.0 => Ok(Weight::Polynomial(*s)),
            ("exponential", [a, b]) if *a >= 0.0 && *b > 0.0 && *b <= 1.0 => Ok(Weight::Exponential(*a, *b)),
            (kind, params) => Err(D::Error::custom(format!("invalid weight {kind} with params {params:?}"))),
        }
    }
}

/// A mixed-norm exponent in `[1, inf]`; JSON accepts a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(TfError::NormSpec(format!("exponent {p} is not in [1, inf]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() { write!(f, "inf") } else { write!(f, "{}", self.0) }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() { s.serialize_str("inf") } else { s.serialize_f64(self.0) }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p).map_err(D::Error::custom),
            Raw::Str(s) if s == "inf" => Ok(Exponent::INF),
            Raw::Str(s) => Err(D::Error::custom(format!("invalid exponent {s:?}"))),
        }
    }
}

/// `(p, q, m, nu)` for a weighted mixed norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub m: Weight,
    pub nu: Weight,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormSpecRepr {
    p: Exponent,
    q: Exponent,
    #[serde(default = "constant_weight")]
    m: Weight,
    #[serde(default = "constant_weight")]
    nu: Weight,
}

fn constant_weight() -> Weight {
    Weight::Constant
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NormSpecRepr::deserialize(d)?;
        Ok(NormSpec { p: r.p, q: r.q, m: r.m, nu: r.nu })
    }
}

impl NormSpec {
    /// Unweighted `l^{p,q}`.
    pub fn unweighted(p: f64, q: f64) -> Result<Self> {
        Ok(NormSpec { p: Exponent::new(p)?, q: Exponent::new(q)?, m: Weight::Constant, nu: Weight::Constant })
    }

    pub fn with_weights(mut self, m: Weight, nu: Weight) -> Self {
        self.m = m;
        self.nu = nu;
        self
    }

    /// Checks that `m` is `nu`-moderate on `Z_N x Z_N`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = moderate_check(&self.m, &self.nu, n);
        if check.passes {
            Ok(())
        } else {
            Err(TfError::NormSpec(format!(
                "m is not nu-moderate: witness {:?}",
                check.worst_pair
            )))
        }
    }
}

fn lp(values: impl Iterator<Item = f64>, p: Exponent) -> f64 {
    if p.is_inf() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(p.0)).sum::<f64>().powf(1.0 / p.0)
    }
}

/// `( sum_l ( sum_k |F(k,l)|^p m(k,l)^p )^{q/p} )^{1/q}` for a nonnegative function
/// given row-major, with the usual sup modifications.
pub fn mixed_norm(values: &[f64], n: usize, spec: &NormSpec) -> Result<f64> {
    check_dim(n * n, values.len())?;
    let m = spec.m.table(n);
    let row = |l: usize| lp((0..n).map(|k| values[k * n + l].abs() * m[k * n + l]), spec.p);
    Ok(lp((0..n).map(row), spec.q))
}

/// `(1/N) || V_phi f ||_{l^{p,q}_m}`, the finite modulation norm.
pub fn modulation_norm(f: &Signal, phi: &Window, spec: &NormSpec) -> Result<f64> {
    ModulationNorm::new(phi, *spec).eval(f)
}

/// Precomputed modulation norm for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ModulationNorm {
    analysis: Operator,
    spec: NormSpec,
    n: usize,
}

impl ModulationNorm {
    pub fn new(phi: &Window, spec: NormSpec) -> Self {
        ModulationNorm { analysis: stft_matrix(phi), spec, n: phi.n() }
    }

    pub fn eval(&self, f: &Signal) -> Result<f64> {
        check_dim(self.n, f.n())?;
        let v = &self.analysis * f.to_vector();
        let mags: Vec<f64> = v.iter().map(|c| c.norm()).collect();
        Ok(mixed_norm(&mags, self.n, &self.spec)? / self.n as f64)
    }
}

/// `|| sum_lambda |a_lambda| chi_{lambda + Q} ||_{L^{p,q}_m}` with `Q` from `cells`.
pub fn sequence_norm_cells(values: &[f64], cells: &CellMap, spec: &NormSpec) -> Result<f64> {
    let lattice = cells.lattice();
    check_dim(lattice.len(), values.len())?;
    let n = lattice.n();
    let spread: Vec<f64> = PhasePoint::all(n).map(|z| values[cells.owner_index(z)].abs()).collect();
    mixed_norm(&spread, n, spec)
}

/// Sequence norm over a lattice, using its greedy fundamental domain.
pub fn sequence_norm(values: &[f64], lattice: &Lattice, spec: &NormSpec) -> Result<f64> {
    sequence_norm_cells(values, &fundamental_domain(lattice), spec)
}

/// `a^{1/p} b^{1/q} ( sum_j ( sum_i |a_{ij}|^p m(ai, bj)^p )^{q/p} )^{1/q}` over
/// `a Z x b Z`, with `values` in the lattice's element order.
///
/// Agrees with [`sequence_norm`] exactly for constant `m`; otherwise the two differ
/// by at most the variation of `m` over one cell.
pub fn separable_sequence_norm(values: &[f64], n: usize, a: usize, b: usize, spec: &NormSpec) -> Result<f64> {
    let lattice = crate::lattice::separable_lattice(n, a, b)?;
    check_dim(lattice.len(), values.len())?;
    let (rows, cols) = (n / a, n / b);
    let value = |i: usize, j: usize| {
        let z = PhasePoint { k: i * a, l: j * b };
        values[lattice.index_of(z).expect("lattice point")].abs() * spec.m.eval(z, n)
    };
    let inner = |j: usize| lp((0..rows).map(|i| value(i, j)), spec.p);
    let base = lp((0..cols).map(inner), spec.q);
    let factor = |e: Exponent, s: usize| if e.is_inf() { 1.0 } else { (s as f64).powf(1.0 / e.0) };
    Ok(base * factor(spec.p, a) * factor(spec.q, b))
}

/// Localization-operator norm `|| (||H_lambda f||_2)_lambda ||` with all `H_lambda` precomputed.
#[derive(Debug, Clone)]
pub struct LocalizationNorm {
    operators: Vec<Operator>,
    cells: CellMap,
    spec: NormSpec,
    n: usize,
    /// Lower bound of the lattice periodization of `sigma`; the norm equivalence needs it positive.
    pub partition_lower: f64,
}

impl LocalizationNorm {
    pub fn new(sigma: &TFMatrix, phi: &Window, lattice: &Lattice, spec: NormSpec) -> Result<Self> {
        let base = localization_operator(sigma, phi)?;
        let operators = lattice
            .elements()
            .iter()
            .map(|&lam| shifted_locop(&base, lam).map(|h| h.matrix().clone()))
            .collect::<Result<Vec<_>>>()?;
        let partition_lower = partition_check(sigma, lattice)?.lower;
        Ok(LocalizationNorm {
            operators,
            cells: fundamental_domain(lattice),
            spec,
            n: phi.n(),
            partition_lower,
        })
    }

    /// `(||H_lambda f||_2)` in lattice element order.
    pub fn local_energies(&self, f: &Signal) -> Result<Vec<f64>> {
        check_dim(self.n, f.n())?;
        let v = f.to_vector();
        Ok(self.operators.iter().map(|h| (h * &v).norm()).collect())
    }

    pub fn eval(&self, f: &Signal) -> Result<f64> {
        sequence_norm_cells(&self.local_energies(f)?, &self.cells, &self.spec)
    }
}

pub fn localization_norm(
    f: &Signal,
    sigma: &TFMatrix,
    phi: &Window,
    lattice: &Lattice,
    spec: &NormSpec,
) -> Result<f64> {
    LocalizationNorm::new(sigma, phi, lattice, *spec)?.eval(f)
}

/// `b_lambda = (sum_j |<f, pi(lambda) phi_j>|^2)^{1/2}` followed by [`sequence_norm`].
pub fn multiwindow_coefficient_norm(f: &Signal, bundle: &WindowBundle, lattice: &Lattice, spec: &NormSpec) -> Result<f64> {
    check_dim(bundle.n(), f.n())?;
    check_dim(bundle.n(), lattice.n())?;
    let b: Vec<f64> = lattice
        .elements()
        .iter()
        .map(|&lam| {
            bundle
                .windows()
                .iter()
                .map(|w| f.inner(&tf_shift(lam, w.signal())).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    sequence_norm(&b, lattice, spec)
}

/// Blockwise maxima of `|F|` spread back over their blocks, then the weighted mixed norm.
pub fn local_sup_norm(big_f: &TFMatrix, block: usize, spec: &NormSpec) -> Result<f64> {
    let n = big_f.n();
    if block == 0 || !n.is_multiple_of(block) {
        return Err(TfError::BlockSize { block, n });
    }
    let nb = n / block;
    let mut maxima = vec![0.0f64; nb * nb];
    for z in PhasePoint::all(n) {
        let b = (z.k / block) * nb + z.l / block;
        maxima[b] = maxima[b].max(big_f.get(z).norm());
    }
    let spread: Vec<f64> = PhasePoint::all(n)
        .map(|z| maxima[(z.k / block) * nb + z.l / block])
        .collect();
    mixed_norm(&spread, n, spec)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplingReport {
    /// `|| F restricted to Lambda ||_{l^{p,q}_m}`.
    pub lhs: f64,
    /// `C_Lambda * local_sup_norm(F)`.
    pub rhs: f64,
    /// Largest number of lattice points in one block.
    pub c_lambda: f64,
    pub passes: bool,
}

/// Sampling inequality `|| F|_Lambda || <= C_Lambda || F ||_{W(L^{p,q}_m)}`.
pub fn sampling_check(big_f: &TFMatrix, lattice: &Lattice, block: usize, spec: &NormSpec) -> Result<SamplingReport> {
    let n = big_f.n();
    check_dim(n, lattice.n())?;
    let sup = local_sup_norm(big_f, block, spec)?;
    let nb = n / block;
    let mut counts = vec![0usize; nb * nb];
    for lam in lattice.elements() {
        counts[(lam.k / block) * nb + lam.l / block] += 1;
    }
    let c_lambda = counts.into_iter().max().unwrap_or(0) as f64;
    let restricted: Vec<f64> = PhasePoint::all(n)
        .map(|z| if lattice.contains(z) { big_f.get(z).norm() } else { 0.0 })
        .collect();
    let lhs = mixed_norm(&restricted, n, spec)?;
    let rhs = c_lambda * sup;
    Ok(SamplingReport { lhs, rhs, c_lambda, passes: lhs <= rhs * (1.0 + 1e-12) })
}

/// Result of an exhaustive or sampled pairwise weight inequality scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightCheck {
    pub passes: bool,
    /// Pair maximizing `lhs / rhs`.
    pub worst_pair: Option<(PhasePoint, PhasePoint)>,
    pub worst_ratio: f64,
}

const EXHAUSTIVE_LIMIT: usize = 8;
const SAMPLED_PAIRS: usize = 20_000;

fn pair_scan(n: usize, ratio: impl Fn(PhasePoint, PhasePoint) -> f64) -> WeightCheck {
    let mut worst = (f64::NEG_INFINITY, None);
    let mut visit = |z1: PhasePoint, z2: PhasePoint| {
        let r = ratio(z1, z2);
        if r > worst.0 {
            worst = (r, Some((z1, z2)));
        }
    };
    if n <= EXHAUSTIVE_LIMIT {
        for z1 in PhasePoint::all(n) {
            for z2 in PhasePoint::all(n) {
                visit(z1, z2);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_PAIRS {
            let a = PhasePoint::from_index(rng.random_range(0..n * n), n);
            let b = PhasePoint::from_index(rng.random_range(0..n * n), n);
            visit(a, b);
        }
    }
    let passes = worst.0 <= 1.0 + 1e-12;
    WeightCheck { passes, worst_pair: if passes { None } else { worst.1 }, worst_ratio: worst.0 }
}

/// `m(z1 + z2) <= nu(z1) m(z2)` for all pairs.
pub fn moderate_check(m: &Weight, nu: &Weight, n: usize) -> WeightCheck {
    pair_scan(n, |z1, z2| m.eval(z1.add(z2, n), n) / (nu.eval(z1, n) * m.eval(z2, n)))
}

/// `nu(z1 + z2) <= nu(z1) nu(z2)` for all pairs.
pub fn submultiplicative_check(nu: &Weight, n: usize) -> WeightCheck {
    moderate_check(nu, nu, n)
}

/// Signal families used by the equivalence estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Complex white Gaussian noise.
    Noise,
    /// A Gaussian moved by a random time-frequency shift.
    ShiftedGaussian,
    /// Linear chirp with random rate and offset.
    Chirp,
    /// One or two impulses with random amplitudes.
    Spike,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Noise, Family::ShiftedGaussian, Family::Chirp, Family::Spike];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub count: usize,
    #[serde(default = "default_mix")]
    pub mix: Vec<Family>,
}

fn default_mix() -> Vec<Family> {
    Family::ALL.to_vec()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> num_complex::Complex64 {
    num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Deterministic ensemble; signal `i` is drawn from family `mix[i % mix.len()]` out of a
/// single sequential stream, so a larger `count` extends a smaller one.
pub fn generate_ensemble(n: usize, spec: &EnsembleSpec, seed: u64) -> Result<Vec<Signal>> {
    if spec.count == 0 || spec.mix.is_empty() {
        return Err(TfError::EmptyEnsemble);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = gaussian_window(n.max(2));
    let mut out = Vec::with_capacity(spec.count);
    let mut i = 0usize;
    while out.len() < spec.count {
        let family = spec.mix[i % spec.mix.len()];
        i += 1;
        let s = match family {
            Family::Noise => Signal::new((0..n).map(|_| complex_normal(&mut rng)).collect()),
            Family::ShiftedGaussian => {
                let z = PhasePoint::from_index(rng.random_range(0..n * n), n);
                let amp = complex_normal(&mut rng);
                tf_shift(z, &Signal::new(gauss.values()[..n].to_vec())).scale(amp)
            }
            Family::Chirp => {
                let rate: f64 = rng.random_range(0.0..n as f64);
                let offset: f64 = rng.random_range(0.0..n as f64);
                let amp = complex_normal(&mut rng);
                Signal::new(
                    (0..n)
                        .map(|t| {
                            let t = t as f64;
                            let phase = std::f64::consts::TAU * (rate * t * t / (2.0 * n as f64) + offset * t / n as f64);
                            num_complex::Complex64::from_polar(1.0, phase) * amp
                        })
                        .collect(),
                )
            }
            Family::Spike => {
                let mut s = vec![num_complex::Complex64::new(0.0, 0.0); n];
                let spikes = rng.random_range(1..=2usize);
                for _ in 0..spikes {
                    let t = rng.random_range(0..n);
                    s[t] += complex_normal(&mut rng);
                }
                Signal::new(s)
            }
        };
        if s.norm2() > 0.0 {
            out.push(s);
        }
    }
    Ok(out)
}

/// Empirical two-sided bounds `r_min ||f||_a <= ||f||_b <= r_max ||f||_a`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// `||f||_b / ||f||_a`, in ensemble order.
    pub ratios: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub condition: f64,
    pub ensemble: EnsembleDescriptor,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleDescriptor {
    pub n: usize,
    pub count: usize,
    pub mix: Vec<Family>,
    pub seed: u64,
}

impl EquivalenceReport {
    /// One row per signal: `index,family,ratio`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| TfError::Numerical(e.to_string());
        w.write_record(["index", "family", "ratio"]).map_err(io)?;
        for (i, r) in self.ratios.iter().enumerate() {
            let fam = serde_json::to_value(self.ensemble.mix[i % self.ensemble.mix.len()])
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            w.write_record([i.to_string(), fam, format!("{r:.17e}")]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| TfError::Numerical(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Evaluates both norms on a seeded ensemble; evaluation may run in parallel but the
/// ratio list is always in ensemble order.
pub fn equivalence_estimate<A, B>(
    norm_a: A,
    norm_b: B,
    n: usize,
    ensemble: &EnsembleSpec,
    seed: u64,
) -> Result<EquivalenceReport>
where
    A: Fn(&Signal) -> Result<f64> + Sync,
    B: Fn(&Signal) -> Result<f64> + Sync,
{
    let signals = generate_ensemble(n, ensemble, seed)?;
    let ratios = signals
        .par_iter()
        .map(|f| {
            let a = norm_a(f)?;
            let b = norm_b(f)?;
            if a > 0.0 && a.is_finite() && b.is_finite() {
                Ok(b / a)
            } else {
                Err(TfError::Numerical(format!("reference norm {a} is not positive")))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let r_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EquivalenceReport {
        condition: r_max / r_min,
        r_min,
        r_max,
        ratios,
        ensemble: EnsembleDescriptor { n, count: ensemble.count, mix: ensemble.mix.clone(), seed },
    })
}
