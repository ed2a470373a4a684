//! Time-frequency localization operators `H_sigma = (1/N) V_phi^* sigma V_phi`,
//! their lattice-shifted family, spectral data and the constructive search for
//! multi-window frames built from eigenfunctions.
//!
//! The `1/N` factor makes `sigma == 1` (with a unit window) give the identity,
//! so eigenvalues are bounded by `max sigma` independently of `N`. Formulas
//! stated for the unnormalized continuous operator carry this factor
//! explicitly in the code below.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result, TfError};
use crate::gabor::{self, FrameReport, WindowBundle};
use crate::lattice::{CellMap, Lattice};
use crate::linalg::{hermitian_eigen, hermitian_residual};
use crate::phase_space::{
    stft, tf_shift, tf_shift_matrix, Operator, PhasePoint, Signal, TFMatrix, Window,
};

/// Eigenvalues in `(-EIGEN_CLIP, 0)` are treated as rounding noise and set to zero.
pub const EIGEN_CLIP: f64 = 1e-12;
/// Relative gap below which consecutive eigenvalues form one degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-10;

/// A localization operator together with the data it was built from.
#[derive(Debug, Clone)]
pub struct LocOp {
    symbol: TFMatrix,
    window: Window,
    matrix: Operator,
}

impl LocOp {
    pub fn symbol(&self) -> &TFMatrix {
        &self.symbol
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.window.n()
    }

    pub fn apply(&self, f: &Signal) -> Signal {
        Signal::from_vector(&(&self.matrix * f.to_vector()))
    }
}

/// Checks that `sigma` is real and entrywise nonnegative.
pub fn validate_symbol(sigma: &TFMatrix) -> Result<()> {
    let n = sigma.n();
    for z in PhasePoint::all(n) {
        let v = sigma.get(z);
        if v.im != 0.0 {
            return Err(TfError::SymbolNotReal { k: z.k, l: z.l });
        }
        if v.re < 0.0 || v.re.is_nan() {
            return Err(TfError::SymbolSign { k: z.k, l: z.l, value: v.re });
        }
    }
    Ok(())
}

/// `H_sigma` with `<H_sigma f, g> = (1/N) sum_z sigma(z) V_phi f(z) conj(V_phi g(z))`.
pub fn localization_operator(sigma: &TFMatrix, phi: &Window) -> Result<LocOp> {
    check_dim(phi.n(), sigma.n())?;
    validate_symbol(sigma)?;
    let n = phi.n();
    let scale = 1.0 / n as f64;
    let mut h = Operator::zeros(n, n);
    for z in PhasePoint::all(n) {
        let s = sigma.get(z).re;
        if s == 0.0 {
            continue;
        }
        let g = tf_shift(z, phi.signal());
        let w = s * scale;
        for r in 0..n {
            let gr = g.values()[r] * w;
            for c in 0..n {
                h[(r, c)] += gr * g.values()[c].conj();
            }
        }
    }
    Ok(LocOp { symbol: sigma.clone(), window: phi.clone(), matrix: h })
}

/// `H_lambda = H_{T_lambda sigma}`, rebuilt from the translated symbol.
pub fn shifted_locop(locop: &LocOp, lambda: PhasePoint) -> Result<LocOp> {
    localization_operator(&locop.symbol.translate(lambda), &locop.window)
}

/// `pi(lambda) H pi(lambda)^*`; equals [`shifted_locop`]'s matrix by the intertwining identity.
pub fn conjugated_matrix(locop: &LocOp, lambda: PhasePoint) -> Operator {
    let p = tf_shift_matrix(lambda, locop.n());
    &p * locop.matrix() * p.adjoint()
}

/// Eigenvalues `c_1 >= c_2 >= ..` and orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Signal>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `sum_j c_j phi_j phi_j^*`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.eigenvectors.first().map(Signal::n).unwrap_or(0);
        let mut out = Operator::zeros(n, n);
        for (c, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let col = v.to_vector();
            out += (&col * col.adjoint()).scale(*c);
        }
        out
    }

    /// `|| [<phi_i, phi_j>] - I ||_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = self.len();
        let gram = Operator::from_fn(m, m, |i, j| self.eigenvectors[i].inner(&self.eigenvectors[j]));
        (gram - Operator::identity(m, m)).norm()
    }
}

/// Spectral decomposition of a hermitian PSD operator.
pub fn decompose(matrix: &Operator) -> Result<SpectralDecomposition> {
    let eig = hermitian_eigen(matrix)?;
    let eigenvalues = eig
        .values
        .iter()
        .map(|&v| if v < 0.0 && v > -EIGEN_CLIP { 0.0 } else { v })
        .collect();
    let eigenvectors = (0..eig.vectors.ncols())
        .map(|j| Signal::new(eig.vectors.column(j).iter().copied().collect()))
        .collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

pub fn spectral_decomposition(locop: &LocOp) -> Result<SpectralDecomposition> {
    decompose(locop.matrix())
}

/// Extremes of the lattice periodization `sum_lambda sigma(z - lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionBounds {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
}

pub fn partition_check(sigma: &TFMatrix, lattice: &Lattice) -> Result<PartitionBounds> {
    check_dim(lattice.n(), sigma.n())?;
    let n = sigma.n();
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for z in PhasePoint::all(n) {
        let s: f64 = lattice.elements().iter().map(|&lam| sigma.get(z.sub(lam, n)).re).sum();
        lower = lower.min(s);
        upper = upper.max(s);
    }
    Ok(PartitionBounds { lower, upper })
}

/// Outcome of the product-convolution majorant
/// `|V_phi(H_sigma f)| <= (1/N) |V_phi phi| * (sigma |V_phi f|)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointwiseReport {
    /// `max_z (lhs - rhs)`; nonpositive when the estimate holds exactly.
    pub max_violation: f64,
    /// `max_z rhs`, the scale the tolerance is measured against.
    pub scale: f64,
    pub passes: bool,
}

pub fn pointwise_estimate_check(sigma: &TFMatrix, phi: &Window, f: &Signal) -> Result<PointwiseReport> {
    let h = localization_operator(sigma, phi)?;
    check_dim(phi.n(), f.n())?;
    let n = phi.n();
    let lhs = stft(phi, &h.apply(f))?.abs();
    let amb = stft(phi, phi.signal())?.abs();
    let weighted = sigma.hadamard(&stft(phi, f)?.abs());
    let rhs = amb.convolve(&weighted);
    let inv_n = 1.0 / n as f64;
    let mut max_violation = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    for z in PhasePoint::all(n) {
        let r = rhs.get(z).re * inv_n;
        scale = scale.max(r);
        max_violation = max_violation.max(lhs.get(z).re - r);
    }
    let passes = max_violation <= 1e-10 * scale.max(f64::MIN_POSITIVE);
    Ok(PointwiseReport { max_violation, scale, passes })
}

/// A subset of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRegion {
    n: usize,
    mask: Vec<bool>,
}

impl PhaseRegion {
    pub fn from_points(n: usize, points: impl IntoIterator<Item = PhasePoint>) -> Self {
        let mut mask = vec![false; n * n];
        for p in points {
            mask[p.index(n)] = true;
        }
        PhaseRegion { n, mask }
    }

    pub fn full(n: usize) -> Self {
        PhaseRegion { n, mask: vec![true; n * n] }
    }

    /// Support of a symbol.
    pub fn support(sigma: &TFMatrix) -> Self {
        let n = sigma.n();
        PhaseRegion::from_points(n, PhasePoint::all(n).filter(|&z| sigma.get(z).norm() != 0.0))
    }

    pub fn contains(&self, z: PhasePoint) -> bool {
        self.mask[z.index(self.n)]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indicator(&self) -> TFMatrix {
        TFMatrix::from_real_fn(self.n, |z| if self.contains(z) { 1.0 } else { 0.0 })
    }
}

/// Phase-space concentration of one eigenfunction against the eigenvalue bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcentrationReport {
    /// `(1/N) sum_{z in Omega} |V_phi phi_j(z)|^2`.
    pub lhs: f64,
    /// `c_j / C_sigma`.
    pub bound: f64,
    pub c_sigma: f64,
    pub holds: bool,
    /// `sigma == C_sigma chi_Omega`, in which case equality is predicted.
    pub equality_expected: bool,
    pub equality_holds: bool,
}

/// Concentration of eigenfunction `j` of `locop` in `omega`, with `C_sigma = max sigma`.
pub fn concentration(
    locop: &LocOp,
    decomp: &SpectralDecomposition,
    j: usize,
    omega: &PhaseRegion,
) -> Result<ConcentrationReport> {
    let n = locop.n();
    check_dim(n, omega.n)?;
    if j >= decomp.len() {
        return Err(TfError::Dimension { expected: decomp.len(), found: j + 1 });
    }
    let sigma = locop.symbol();
    let mut c_sigma = 0.0f64;
    for z in PhasePoint::all(n) {
        let s = sigma.get(z).re;
        if s != 0.0 && !omega.contains(z) {
            return Err(TfError::Support { k: z.k, l: z.l });
        }
        c_sigma = c_sigma.max(s);
    }
    let v = stft(locop.window(), &decomp.eigenvectors[j])?;
    let lhs = PhasePoint::all(n)
        .filter(|&z| omega.contains(z))
        .map(|z| v.get(z).norm_sqr())
        .sum::<f64>()
        / n as f64;
    let bound = if c_sigma > 0.0 { decomp.eigenvalues[j] / c_sigma } else { 0.0 };
    let equality_expected = c_sigma > 0.0
        && PhasePoint::all(n).all(|z| {
            let s = sigma.get(z).re;
            if omega.contains(z) { s == c_sigma } else { s == 0.0 }
        });
    let tol = 1e-10;
    Ok(ConcentrationReport {
        lhs,
        bound,
        c_sigma,
        holds: lhs >= bound - tol,
        equality_expected,
        equality_holds: (lhs - bound).abs() < tol,
    })
}

/// Thresholds used by [`eigenvalue_decay_profile`].
pub const DECAY_LADDER: [f64; 6] = [0.5, 1e-1, 1e-2, 1e-4, 1e-8, 1e-12];

#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    pub eigenvalues: Vec<f64>,
    /// `(threshold, number of c_j above it)`; the count is the 1-based index of the last such `c_j`.
    pub counts: Vec<(f64, usize)>,
    pub trace: f64,
    /// `(1/N) sum_z sigma(z) ||phi||^2`, the trace predicted from the symbol.
    pub symbol_trace: f64,
}

pub fn eigenvalue_decay_profile(decomp: &SpectralDecomposition, locop: &LocOp) -> DecayProfile {
    let n = locop.n() as f64;
    let mass: f64 = locop.symbol().values().iter().map(|c| c.re).sum();
    let counts = DECAY_LADDER
        .iter()
        .map(|&t| (t, decomp.eigenvalues.iter().filter(|&&c| c > t).count()))
        .collect();
    DecayProfile {
        eigenvalues: decomp.eigenvalues.clone(),
        counts,
        trace: decomp.eigenvalues.iter().sum(),
        symbol_trace: mass * locop.window().norm2().powi(2) / n,
    }
}

/// Stopping rule for the eigenfunction search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    /// Stop at the first `n` giving a frame.
    First,
    /// Stop at the first `n` with `B / A <= target`.
    Conditioned { target: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Construction {
    pub n: usize,
    #[serde(skip)]
    pub bundle: WindowBundle,
    pub report: FrameReport,
    /// Eigenvalues of `H_sigma` belonging to the selected windows.
    pub eigenvalues: Vec<f64>,
    /// `(n, condition)` for each cutoff tried.
    pub trace: Vec<(usize, f64)>,
}

/// Cutoffs `n` at which no degenerate cluster is split.
fn cluster_cutoffs(eigenvalues: &[f64]) -> Vec<usize> {
    let top = eigenvalues.first().copied().unwrap_or(0.0).abs().max(1.0);
    let m = eigenvalues.len();
    (1..=m)
        .filter(|&n| n == m || (eigenvalues[n - 1] - eigenvalues[n]).abs() > CLUSTER_TOL * top)
        .collect()
}

/// Builds a multi-window Gabor frame over `lattice` from the leading eigenfunctions of
/// `H_sigma`, growing the number of windows until `strategy` is satisfied.
pub fn construct_multiwindow_frame(
    sigma: &TFMatrix,
    phi: &Window,
    lattice: &Lattice,
    strategy: Strategy,
) -> Result<Construction> {
    let bounds = partition_check(sigma, lattice)?;
    if !(bounds.lower > 0.0) {
        return Err(TfError::Partition { lower: bounds.lower });
    }
    let h = localization_operator(sigma, phi)?;
    let decomp = spectral_decomposition(&h)?;
    let n = h.n();
    let mut s = Operator::zeros(n, n);
    let mut used = 0usize;
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    for cutoff in cluster_cutoffs(&decomp.eigenvalues) {
        for v in &decomp.eigenvectors[used..cutoff] {
            s += gabor::single_window_frame_operator(v, lattice)?;
        }
        used = cutoff;
        let report = gabor::frame_bounds(&s)?;
        trace.push((cutoff, report.condition));
        best = best.min(report.condition);
        let done = match strategy {
            Strategy::First => report.is_frame,
            Strategy::Conditioned { target } => report.is_frame && report.condition <= target,
        };
        if done {
            let windows = decomp.eigenvectors[..cutoff]
                .iter()
                .cloned()
                .map(Window::raw)
                .collect::<Result<Vec<_>>>()?;
            return Ok(Construction {
                n: cutoff,
                bundle: WindowBundle::new(windows)?,
                report,
                eigenvalues: decomp.eigenvalues[..cutoff].to_vec(),
                trace,
            });
        }
    }
    Err(TfError::Exhausted { n_max: n, best_condition: best })
}

/// Named symbol generators.
pub mod symbols {
    use super::*;

    /// Indicator of the wrapped box `{k0..k0+w} x {l0..l0+h}`.
    pub fn indicator_box(n: usize, k0: usize, l0: usize, w: usize, h: usize) -> TFMatrix {
        TFMatrix::from_real_fn(n, |z| {
            let dk = (z.k + n - k0 % n) % n;
            let dl = (z.l + n - l0 % n) % n;
            if dk < w && dl < h { 1.0 } else { 0.0 }
        })
    }

    /// `exp(-pi d(z, center)^2 / width^2)` with the wrapped torus distance.
    pub fn gaussian_bump(n: usize, center: PhasePoint, width: f64) -> TFMatrix {
        TFMatrix::from_real_fn(n, |z| {
            let d = crate::modnorm::wrapped_distance(z.sub(center, n), n);
            (-std::f64::consts::PI * d * d / (width * width)).exp()
        })
    }

    /// `chi_Q` for the fundamental domain of a cell map.
    pub fn fundamental_cell(cells: &CellMap) -> TFMatrix {
        let n = cells.lattice().n();
        TFMatrix::from_real_fn(n, |z| if cells.contains_in_domain(z) { 1.0 } else { 0.0 })
    }

    /// `c * sigma`.
    pub fn scaled(sigma: &TFMatrix, c: f64) -> TFMatrix {
        TFMatrix::from_fn(sigma.n(), |z| sigma.get(z) * Complex64::new(c, 0.0))
    }
}

/// `|| H - H^* ||_F` for a localization operator.
pub fn hermiticity_residual(locop: &LocOp) -> f64 {
    hermitian_residual(locop.matrix())
}
