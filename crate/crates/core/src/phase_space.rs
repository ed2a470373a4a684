//! Finite phase space `Z_N x Z_N`: signals, time-frequency shifts and the
//! short-time Fourier transform.
//!
//! Conventions used throughout the crate:
//!
//! * `(pi(k, l) f)(t) = e^{2 pi i l t / N} f(t - k)` (modulation after translation).
//! * `V_phi f(k, l) = <f, pi(k, l) phi>` with no normalising factor, so that
//!   `V_phi^* V_phi = N ||phi||^2 I`.
//! * Inner products are linear in the first slot and conjugate-linear in the second.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result, TfError};

/// Dense complex `N x N` operator on `C^N`.
pub type Operator = DMatrix<Complex64>;

/// `e^{2 pi i m / n}` with the exponent reduced mod `n`.
pub fn unit_root(m: i64, n: usize) -> Complex64 {
    let r = m.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / n as f64)
}

/// `sum_t a(t) conj(b(t))`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// A point `(k, l)` of `Z_N x Z_N` in canonical representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub k: usize,
    pub l: usize,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { k: 0, l: 0 };

    /// Reduces arbitrary integers to canonical representatives mod `n`.
    pub fn new(k: i64, l: i64, n: usize) -> Self {
        let n = n as i64;
        PhasePoint {
            k: k.rem_euclid(n) as usize,
            l: l.rem_euclid(n) as usize,
        }
    }

    pub fn add(self, other: PhasePoint, n: usize) -> Self {
        PhasePoint {
            k: (self.k + other.k) % n,
            l: (self.l + other.l) % n,
        }
    }

    pub fn neg(self, n: usize) -> Self {
        PhasePoint {
            k: (n - self.k) % n,
            l: (n - self.l) % n,
        }
    }

    pub fn sub(self, other: PhasePoint, n: usize) -> Self {
        self.add(other.neg(n), n)
    }

    /// Row-major index `k * n + l`.
    pub fn index(self, n: usize) -> usize {
        self.k * n + self.l
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        PhasePoint {
            k: idx / n,
            l: idx % n,
        }
    }

    /// Iterates all of `Z_N x Z_N` in row-major order.
    pub fn all(n: usize) -> impl Iterator<Item = PhasePoint> {
        (0..n * n).map(move |i| PhasePoint::from_index(i, n))
    }
}

/// A complex vector of length `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexArrayRepr", into = "ComplexArrayRepr")]
pub struct Signal {
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty(), "signal must have positive length");
        Signal { values }
    }

    pub fn zeros(n: usize) -> Self {
        Signal::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Signal::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit impulse at `t0`.
    pub fn delta(n: usize, t0: usize) -> Self {
        let mut s = Signal::zeros(n);
        s.values[t0 % n] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Signal) -> Complex64 {
        inner(&self.values, &other.values)
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn from_vector(v: &DVector<Complex64>) -> Self {
        Signal::new(v.iter().copied().collect())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Normalization state carried by a [`Window`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    UnitL2,
    Raw,
}

/// A nonzero analysis window.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    signal: Signal,
    normalization: Normalization,
}

impl Window {
    /// Wraps `signal` as-is.
    pub fn raw(signal: Signal) -> Result<Self> {
        if signal.is_zero() {
            return Err(TfError::ZeroWindow);
        }
        Ok(Window {
            signal,
            normalization: Normalization::Raw,
        })
    }

    /// Rescales `signal` to unit l2 norm.
    pub fn unit(signal: Signal) -> Result<Self> {
        let norm = signal.norm2();
        if norm == 0.0 {
            return Err(TfError::ZeroWindow);
        }
        Ok(Window {
            signal: signal.scale(Complex64::new(1.0 / norm, 0.0)),
            normalization: Normalization::UnitL2,
        })
    }

    pub fn n(&self) -> usize {
        self.signal.n()
    }

    pub fn signal(&self) -> &Signal {
        &self.signal
    }

    pub fn values(&self) -> &[Complex64] {
        self.signal.values()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn norm2(&self) -> f64 {
        self.signal.norm2()
    }
}

/// A complex function on `Z_N x Z_N`, stored row-major in `(k, l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexArrayRepr", into = "ComplexArrayRepr")]
pub struct TFMatrix {
    n: usize,
    values: Vec<Complex64>,
}

impl TFMatrix {
    pub fn zeros(n: usize) -> Self {
        TFMatrix {
            n,
            values: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(PhasePoint) -> Complex64) -> Self {
        TFMatrix {
            n,
            values: PhasePoint::all(n).map(&mut f).collect(),
        }
    }

    /// Real-valued function on phase space, e.g. a symbol.
    pub fn from_real_fn(n: usize, mut f: impl FnMut(PhasePoint) -> f64) -> Self {
        TFMatrix::from_fn(n, |z| Complex64::new(f(z), 0.0))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        TFMatrix::from_real_fn(n, |_| c)
    }

    pub fn from_values(n: usize, values: Vec<Complex64>) -> Result<Self> {
        check_dim(n * n, values.len())?;
        Ok(TFMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, z: PhasePoint) -> Complex64 {
        self.values[z.index(self.n)]
    }

    pub fn set(&mut self, z: PhasePoint, v: Complex64) {
        let n = self.n;
        self.values[z.index(n)] = v;
    }

    /// Phase-space inner product `sum_z F(z) conj(G(z))`.
    pub fn inner(&self, other: &TFMatrix) -> Complex64 {
        inner(&self.values, &other.values)
    }

    pub fn abs(&self) -> TFMatrix {
        TFMatrix {
            n: self.n,
            values: self.values.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect(),
        }
    }

    /// Torus translation `(T_lambda F)(z) = F(z - lambda)`.
    pub fn translate(&self, lambda: PhasePoint) -> TFMatrix {
        let n = self.n;
        TFMatrix::from_fn(n, |z| self.get(z.sub(lambda, n)))
    }

    pub fn hadamard(&self, other: &TFMatrix) -> TFMatrix {
        TFMatrix {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// Cyclic convolution on `Z_N x Z_N`.
    pub fn convolve(&self, other: &TFMatrix) -> TFMatrix {
        let n = self.n;
        TFMatrix::from_fn(n, |z| {
            PhasePoint::all(n)
                .map(|w| self.get(w) * other.get(z.sub(w, n)))
                .sum()
        })
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Real parts, row-major.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }
}

/// JSON layout shared by [`Signal`] and [`TFMatrix`]: `{"n": N, "re": [...], "im": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexArrayRepr {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexArrayRepr {
    fn zip(&self) -> Result<Vec<Complex64>> {
        check_dim(self.re.len(), self.im.len())?;
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect())
    }

    fn split(n: usize, values: &[Complex64]) -> Self {
        ComplexArrayRepr {
            n,
            re: values.iter().map(|c| c.re).collect(),
            im: values.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<ComplexArrayRepr> for Signal {
    type Error = TfError;

    fn try_from(r: ComplexArrayRepr) -> Result<Self> {
        if r.n == 0 {
            return Err(TfError::Dimension { expected: 1, found: 0 });
        }
        check_dim(r.n, r.re.len())?;
        Ok(Signal::new(r.zip()?))
    }
}

impl From<Signal> for ComplexArrayRepr {
    fn from(s: Signal) -> Self {
        ComplexArrayRepr::split(s.n(), s.values())
    }
}

impl TryFrom<ComplexArrayRepr> for TFMatrix {
    type Error = TfError;

    fn try_from(r: ComplexArrayRepr) -> Result<Self> {
        if r.n == 0 {
            return Err(TfError::Dimension { expected: 1, found: 0 });
        }
        check_dim(r.n * r.n, r.re.len())?;
        TFMatrix::from_values(r.n, r.zip()?)
    }
}

impl From<TFMatrix> for ComplexArrayRepr {
    fn from(m: TFMatrix) -> Self {
        ComplexArrayRepr::split(m.n, &m.values)
    }
}

fn shift_values(z: PhasePoint, f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|t| unit_root((z.l * t) as i64, n) * f[(t + n - z.k % n) % n])
        .collect()
}

/// `pi(z) f`.
pub fn tf_shift(z: PhasePoint, f: &Signal) -> Signal {
    Signal::new(shift_values(z, f.values()))
}

/// `pi(z) f`, checking `f` against an expected ambient dimension.
pub fn tf_shift_checked(n: usize, z: PhasePoint, f: &Signal) -> Result<Signal> {
    check_dim(n, f.n())?;
    if z.k >= n || z.l >= n {
        return Err(TfError::Dimension { expected: n, found: z.k.max(z.l) + 1 });
    }
    Ok(tf_shift(z, f))
}

/// `pi(z)` as an `N x N` matrix.
pub fn tf_shift_matrix(z: PhasePoint, n: usize) -> Operator {
    let mut m = Operator::zeros(n, n);
    for t in 0..n {
        m[(t, (t + n - z.k) % n)] = unit_root((z.l * t) as i64, n);
    }
    m
}

/// The scalar `c` with `pi(z1) pi(z2) = c pi(z2) pi(z1)`, namely
/// `e^{2 pi i (l1 k2 - l2 k1) / N}`.
pub fn commutation_phase(z1: PhasePoint, z2: PhasePoint, n: usize) -> Complex64 {
    unit_root(symplectic(z1, z2, n) as i64, n)
}

/// `(l1 k2 - l2 k1) mod N`; zero iff `pi(z1)` and `pi(z2)` commute.
pub fn symplectic(z1: PhasePoint, z2: PhasePoint, n: usize) -> usize {
    let a = (z1.l * z2.k) % n;
    let b = (z2.l * z1.k) % n;
    (a + n - b) % n
}

/// The STFT `V_phi f(k, l) = <f, pi(k, l) phi>`.
pub fn stft(phi: &Window, f: &Signal) -> Result<TFMatrix> {
    check_dim(phi.n(), f.n())?;
    let n = f.n();
    Ok(TFMatrix::from_fn(n, |z| {
        inner(f.values(), &shift_values(z, phi.values()))
    }))
}

/// `V_phi^* F = sum_z F(z) pi(z) phi`.
pub fn stft_adjoint(phi: &Window, big_f: &TFMatrix) -> Result<Signal> {
    check_dim(phi.n(), big_f.n())?;
    let n = phi.n();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for z in PhasePoint::all(n) {
        let c = big_f.get(z);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, g) in out.iter_mut().zip(shift_values(z, phi.values())) {
            *o += c * g;
        }
    }
    Ok(Signal::new(out))
}

/// The `N^2 x N` analysis matrix of the full STFT: row `z` is `(pi(z) phi)^*`.
pub fn stft_matrix(phi: &Window) -> Operator {
    let n = phi.n();
    let mut m = Operator::zeros(n * n, n);
    for z in PhasePoint::all(n) {
        let g = shift_values(z, phi.values());
        for t in 0..n {
            m[(z.index(n), t)] = g[t].conj();
        }
    }
    m
}

/// Periodized, l2-normalized Gaussian `sum_j e^{-pi (t + jN)^2 / N}`.
///
/// Evaluated at the centered representative of `t` and summed in symmetric
/// pairs, so `phi(t) == phi(N - t)` holds bit for bit.
pub fn gaussian_window(n: usize) -> Window {
    assert!(n >= 2, "gaussian window needs N >= 2");
    let nf = n as f64;
    // Neglected terms have exponent at most -pi N J^2 < ln(1e-15).
    let reach = (-(1e-15f64).ln() / (PI * nf)).sqrt().ceil() as i64 + 1;
    let g = |x: f64| (-PI * x * x / nf).exp();
    let values: Vec<f64> = (0..n)
        .map(|t| {
            let s = if 2 * t <= n { t as f64 } else { t as f64 - nf };
            let mut acc = g(s);
            for j in 1..=reach {
                let shift = j as f64 * nf;
                acc += g(s + shift) + g(s - shift);
            }
            acc
        })
        .collect();
    Window::unit(Signal::from_real(&values)).expect("gaussian is nonzero")
}

/// Normalized indicator of `{0, .., width - 1}`.
pub fn box_window(n: usize, width: usize) -> Window {
    assert!(width >= 1 && width <= n, "box width must be in 1..=N");
    let values: Vec<f64> = (0..n).map(|t| if t < width { 1.0 } else { 0.0 }).collect();
    Window::unit(Signal::from_real(&values)).expect("box is nonzero")
}

/// Unit impulse at zero.
pub fn impulse_window(n: usize) -> Window {
    Window::unit(Signal::delta(n, 0)).expect("impulse is nonzero")
}
