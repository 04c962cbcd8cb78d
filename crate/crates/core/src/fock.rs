//! Brute-force reference implementation in a truncated photon-number basis.
//!
//! States are built as explicit density matrices, the loss channel acts
//! through its Kraus operators and every discrimination quantity comes from
//! dense eigendecompositions. None of it shares code with the covariance
//! matrix formulas, which is the point.
//!
//! Two-mode basis index: `i1 * dim + i2`, mode 1 is the lossy probe.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::LossChannel;
use crate::chernoff::SqueezedThermal;
use crate::error::{domain, Error, Result};
use crate::gaussian::{CovarianceMatrix, SqueezedThermalSingle, SqueezedThermalTwo};
use crate::optimize::minimize_unit_interval;

pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Largest Hilbert-space dimension the Helstrom computation will tensor up to.
pub const DEFAULT_HELSTROM_CAP: usize = 1024;

const NEGATIVE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below this are outside the support; `0^s = 0` for all `s`.
const SUPPORT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    /// Photon-number cutoff per mode (basis states `0..dim`).
    pub dim: usize,
    pub tail_tol: f64,
}

impl TruncationConfig {
    pub fn new(dim: usize) -> Result<Self> {
        let cfg = Self { dim, tail_tol: DEFAULT_TAIL_TOL };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(domain(format!("Fock cutoff must be >= 2, got {}", self.dim)));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(domain(format!("tail tolerance must lie in (0, 1), got {}", self.tail_tol)));
        }
        Ok(())
    }

    // Room for the squeezer to act without feeling the edge of the basis.
    fn working_dim(&self) -> usize {
        2 * self.dim + 20
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    modes: usize,
    dim: usize,
    rho: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates shape, hermiticity, trace and positivity.
    pub fn from_matrix(modes: usize, dim: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        if !(modes == 1 || modes == 2) || dim < 2 {
            return Err(Error::Dimension(format!("unsupported layout: {modes} modes, cutoff {dim}")));
        }
        let total = dim.pow(modes as u32);
        if rho.shape() != (total, total) {
            return Err(Error::Dimension(format!("expected {total}x{total}, got {:?}", rho.shape())));
        }
        let asym = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::Unphysical(format!("density matrix not Hermitian ({asym:e})")));
        }
        let state = Self { modes, dim, rho };
        let tr = state.trace();
        if !(tr > 0.0 && tr <= 1.0 + NEGATIVE_TOL) {
            return Err(Error::Unphysical(format!("trace {tr} outside (0, 1]")));
        }
        let spec = Spectrum::of(&state.rho)?;
        if spec.values.min() < -NEGATIVE_TOL {
            return Err(Error::Unphysical(format!("negative eigenvalue {:e}", spec.values.min())));
        }
        Ok(state)
    }

    /// `|n><n|` of a single mode.
    pub fn number_state(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(domain(format!("number state {n} does not fit cutoff {dim}")));
        }
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(Self { modes: 1, dim, rho })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Cutoff per mode.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// Probability mass lost to the cutoff.
    pub fn tail(&self) -> f64 {
        1.0 - self.trace()
    }

    fn check_tail(self, tail_tol: f64) -> Result<Self> {
        let mass = self.tail();
        if mass > tail_tol {
            return Err(Error::Truncation { mass, tol: tail_tol });
        }
        Ok(self)
    }

    /// Covariance matrix from the quadrature second moments.
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        let m = self.moments();
        CovarianceMatrix::new(m.covariance)
    }

    /// First moments `(<q1>, <p1>, ...)` and the covariance matrix, both
    /// normalised by the trace.
    pub fn moments(&self) -> Moments {
        let norm = self.trace();
        let dim = self.dim;
        let expect = |op: &dyn Fn(usize, usize) -> Option<(usize, usize, f64)>| -> Complex64 {
            // Tr[rho O] = sum_k <k|rho O|k> with O|k> = c |k'>
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..self.total_dim() {
                let (i1, i2) = if self.modes == 1 { (k, 0) } else { (k / dim, k % dim) };
                if let Some((j1, j2, c)) = op(i1, i2) {
                    if j1 < dim && (self.modes == 1 || j2 < dim) {
                        let target = if self.modes == 1 { j1 } else { j1 * dim + j2 };
                        acc += self.rho[(k, target)] * c;
                    }
                }
            }
            acc / norm
        };
        let sq = |x: usize| (x as f64).sqrt();
        let lower = |i: usize| if i > 0 { Some(i - 1) } else { None };

        let modes = self.modes;
        let annihilate = |mode: usize| {
            move |i1: usize, i2: usize| {
                if mode == 0 {
                    lower(i1).map(|j| (j, i2, sq(i1)))
                } else {
                    lower(i2).map(|j| (i1, j, sq(i2)))
                }
            }
        };
        let number = |mode: usize| move |i1: usize, i2: usize| Some((i1, i2, if mode == 0 { i1 } else { i2 } as f64));
        let square = |mode: usize| {
            move |i1: usize, i2: usize| {
                let i = if mode == 0 { i1 } else { i2 };
                if i < 2 {
                    return None;
                }
                let c = (i as f64 * (i - 1) as f64).sqrt();
                Some(if mode == 0 { (i1 - 2, i2, c) } else { (i1, i2 - 2, c) })
            }
        };

        let mut mean = vec![0.0; 2 * modes];
        let mut cov = DMatrix::zeros(2 * modes, 2 * modes);
        for mode in 0..modes {
            let a = expect(&annihilate(mode));
            mean[2 * mode] = std::f64::consts::SQRT_2 * a.re;
            mean[2 * mode + 1] = std::f64::consts::SQRT_2 * a.im;
            let n = expect(&number(mode)).re;
            let a2 = expect(&square(mode));
            let (q, p) = (2 * mode, 2 * mode + 1);
            cov[(q, q)] = a2.re + n + 0.5;
            cov[(p, p)] = -a2.re + n + 0.5;
            cov[(q, p)] = a2.im;
            cov[(p, q)] = a2.im;
        }
        if modes == 2 {
            let ab = expect(&|i1: usize, i2: usize| {
                (i1 > 0 && i2 > 0).then(|| (i1 - 1, i2 - 1, sq(i1) * sq(i2)))
            });
            // a1^dag a2 |i1, i2> = sqrt((i1 + 1) i2) |i1 + 1, i2 - 1>
            let adb = expect(&|i1: usize, i2: usize| (i2 > 0).then(|| (i1 + 1, i2 - 1, sq(i1 + 1) * sq(i2))));
            cov[(0, 2)] = ab.re + adb.re;
            cov[(1, 3)] = -ab.re + adb.re;
            cov[(0, 3)] = ab.im + adb.im;
            cov[(1, 2)] = ab.im - adb.im;
            for (i, j) in [(0, 2), (1, 3), (0, 3), (1, 2)] {
                cov[(j, i)] = cov[(i, j)];
            }
        }
        for i in 0..2 * modes {
            for j in 0..2 * modes {
                cov[(i, j)] -= mean[i] * mean[j];
            }
        }
        Moments { mean, covariance: cov }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

fn thermal_weights(n: f64, len: usize) -> Vec<f64> {
    if n == 0.0 {
        let mut w = vec![0.0; len];
        w[0] = 1.0;
        return w;
    }
    let ratio = n / (n + 1.0);
    let mut w = Vec::with_capacity(len);
    let mut p = 1.0 / (n + 1.0);
    for _ in 0..len {
        w.push(p);
        p *= ratio;
    }
    w
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `S nu S^dag` with `S = exp[(r/2)(a^dag^2 - a^2)]`, which stretches `q`.
pub fn fock_squeezed_thermal_single(p: SqueezedThermalSingle, cfg: &TruncationConfig) -> Result<FockDensityMatrix> {
    p.validate()?;
    cfg.validate()?;
    let w = cfg.working_dim();
    let mut gen = DMatrix::<f64>::zeros(w, w);
    for k in 0..w - 2 {
        // <k+2| a^dag^2 |k> = sqrt((k+1)(k+2))
        let c = 0.5 * p.r * ((k + 1) as f64 * (k + 2) as f64).sqrt();
        gen[(k + 2, k)] = c;
        gen[(k, k + 2)] = -c;
    }
    let s = gen.exp();
    let nu = DVector::from_vec(thermal_weights(p.n_t, w));
    let full = &s * DMatrix::from_diagonal(&nu) * s.transpose();
    let rho = full.view((0, 0), (cfg.dim, cfg.dim)).into_owned();
    FockDensityMatrix { modes: 1, dim: cfg.dim, rho: to_complex(&rho) }.check_tail(cfg.tail_tol)
}

/// `S2 (nu1 x nu2) S2^dag` with `S2 = exp[r (a^dag b^dag - a b)]`.
///
/// The squeezer conserves `i1 - i2`, so each difference sector is
/// exponentiated on its own.
pub fn fock_squeezed_thermal_two(p: SqueezedThermalTwo, cfg: &TruncationConfig) -> Result<FockDensityMatrix> {
    p.validate()?;
    cfg.validate()?;
    let w = cfg.working_dim() as isize;
    let d = cfg.dim;
    let nu1 = thermal_weights(p.n_t1, w as usize);
    let nu2 = thermal_weights(p.n_t2, w as usize);
    let mut rho = DMatrix::<f64>::zeros(d * d, d * d);
    for diff in -(w - 1)..w {
        // sector states |m + max(diff,0), m + max(-diff,0)>, m = 0..len
        let (o1, o2) = (diff.max(0) as usize, (-diff).max(0) as usize);
        let len = w as usize - diff.unsigned_abs();
        let mut gen = DMatrix::<f64>::zeros(len, len);
        for m in 0..len - 1 {
            // <m+1| a^dag b^dag |m> within the sector
            let c = p.r * (((o1 + m + 1) * (o2 + m + 1)) as f64).sqrt();
            gen[(m + 1, m)] = c;
            gen[(m, m + 1)] = -c;
        }
        let u = gen.exp();
        let keep: Vec<usize> = (0..len).filter(|&m| o1 + m < d && o2 + m < d).collect();
        if keep.is_empty() {
            continue;
        }
        let weights: Vec<f64> = (0..len).map(|m| nu1[o1 + m] * nu2[o2 + m]).collect();
        for &i in &keep {
            for &j in &keep {
                let v: f64 = (0..len).map(|m| u[(i, m)] * weights[m] * u[(j, m)]).sum();
                let row = (o1 + i) * d + (o2 + i);
                let col = (o1 + j) * d + (o2 + j);
                rho[(row, col)] = v;
            }
        }
    }
    FockDensityMatrix { modes: 2, dim: d, rho: to_complex(&rho) }.check_tail(cfg.tail_tol)
}

pub fn fock_squeezed_thermal(p: SqueezedThermal, cfg: &TruncationConfig) -> Result<FockDensityMatrix> {
    match p {
        SqueezedThermal::Single(p) => fock_squeezed_thermal_single(p, cfg),
        SqueezedThermal::Two(p) => fock_squeezed_thermal_two(p, cfg),
    }
}

/// Pure loss on mode 1 through the Kraus operators
/// `V_m = sqrt((1 - eta)^m / m!) a^m eta^{(n - m) / 2}`.
pub fn apply_loss_kraus(state: &FockDensityMatrix, ch: &LossChannel) -> FockDensityMatrix {
    let eta = ch.eta();
    if eta == 1.0 {
        return state.clone();
    }
    let d = state.dim;
    // c[m][k] = <k| V_m |k + m> = sqrt(C(k + m, m) (1 - eta)^m eta^k)
    let mut c = vec![vec![0.0; d]; d];
    for k in 0..d {
        c[0][k] = eta.powf(k as f64 / 2.0);
    }
    for m in 1..d {
        for k in 0..d - m {
            c[m][k] = c[m - 1][k] * ((k + m) as f64 / m as f64 * (1.0 - eta)).sqrt();
        }
    }
    let rest = if state.modes == 1 { 1 } else { d };
    let idx = |i1: usize, i2: usize| i1 * rest + i2;
    let mut out = DMatrix::<Complex64>::zeros(state.total_dim(), state.total_dim());
    for i1 in 0..d {
        for j1 in 0..d {
            for m in 0..d - i1.max(j1) {
                let w = c[m][i1] * c[m][j1];
                if w == 0.0 {
                    continue;
                }
                for i2 in 0..rest {
                    for j2 in 0..rest {
                        out[(idx(i1, i2), idx(j1, j2))] += state.rho[(idx(i1 + m, i2), idx(j1 + m, j2))] * w;
                    }
                }
            }
        }
    }
    FockDensityMatrix { modes: state.modes, dim: d, rho: out }
}

/// Eigendecomposition of a Hermitian matrix, with a real fast path.
struct Spectrum {
    values: DVector<f64>,
    vectors: Vectors,
}

enum Vectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Vectors {
    fn complex(&self) -> DMatrix<Complex64> {
        match self {
            Vectors::Real(v) => to_complex(v),
            Vectors::Complex(v) => v.clone(),
        }
    }
}

impl Spectrum {
    /// Blocks of the sparsity pattern are decomposed independently; the
    /// oracle states split into photon-number sectors and the dense solver
    /// struggles with a large, mostly-zero rank-one matrix.
    fn of(m: &DMatrix<Complex64>) -> Result<Spectrum> {
        let n = m.nrows();
        let real = m.iter().all(|z| z.im == 0.0);
        let mut values = DVector::zeros(n);
        let mut vectors = DMatrix::<Complex64>::zeros(n, n);
        let mut col = 0;
        for idx in blocks(m) {
            let k = idx.len();
            let (vals, vecs) = if real {
                let a = faer::Mat::<f64>::from_fn(k, k, |i, j| m[(idx[i], idx[j])].re);
                let eig = a.self_adjoint_eigen(faer::Side::Lower).map_err(evd_error)?;
                let (u, d) = (eig.U(), eig.S().column_vector());
                (
                    (0..k).map(|i| d[i]).collect::<Vec<_>>(),
                    DMatrix::from_fn(k, k, |i, j| Complex64::new(u[(i, j)], 0.0)),
                )
            } else {
                let a = faer::Mat::<Complex64>::from_fn(k, k, |i, j| m[(idx[i], idx[j])]);
                let eig = a.self_adjoint_eigen(faer::Side::Lower).map_err(evd_error)?;
                let (u, d) = (eig.U(), eig.S().column_vector());
                ((0..k).map(|i| d[i].re).collect(), DMatrix::from_fn(k, k, |i, j| u[(i, j)]))
            };
            for j in 0..k {
                values[col + j] = vals[j];
                for (i, &row) in idx.iter().enumerate() {
                    vectors[(row, col + j)] = vecs[(i, j)];
                }
            }
            col += k;
        }
        let vectors = if real { Vectors::Real(vectors.map(|z| z.re)) } else { Vectors::Complex(vectors) };
        Ok(Spectrum { values, vectors })
    }

    /// Density-matrix spectrum: small negatives are rounding noise.
    fn of_state(state: &FockDensityMatrix) -> Result<Spectrum> {
        let mut spec = Spectrum::of(&state.rho)?;
        clamp_spectrum(&mut spec.values)?;
        Ok(spec)
    }

    /// `|<a_i|b_j>|^2`.
    fn overlap_weights(&self, other: &Spectrum) -> DMatrix<f64> {
        match (&self.vectors, &other.vectors) {
            (Vectors::Real(a), Vectors::Real(b)) => (a.transpose() * b).map(|x| x * x),
            _ => (self.vectors.complex().adjoint() * other.vectors.complex()).map(|z| z.norm_sqr()),
        }
    }

    fn function(&self, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let vals = self.values.map(f);
        match &self.vectors {
            Vectors::Real(v) => to_complex(&(v * DMatrix::from_diagonal(&vals) * v.transpose())),
            Vectors::Complex(v) => v * DMatrix::from_diagonal(&vals.map(|x| Complex64::new(x, 0.0))) * v.adjoint(),
        }
    }
}

/// Index sets of the connected components of the nonzero pattern.
fn blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn evd_error(e: faer::linalg::evd::EvdError) -> Error {
    Error::Numerical(format!("eigendecomposition failed: {e:?}"))
}

fn clamp_spectrum(values: &mut DVector<f64>) -> Result<()> {
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -NEGATIVE_TOL {
                return Err(Error::Numerical(format!("eigenvalue {v:e} below the clamping tolerance")));
            }
            *v = 0.0;
        }
    }
    Ok(())
}

fn check_pair(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<()> {
    if a.modes != b.modes || a.dim != b.dim {
        return Err(Error::Dimension(format!(
            "states differ in layout: {} modes / cutoff {} vs {} modes / cutoff {}",
            a.modes, a.dim, b.modes, b.dim
        )));
    }
    Ok(())
}

fn power(x: f64, s: f64) -> f64 {
    if x < SUPPORT_CUTOFF {
        0.0
    } else if s == 0.0 {
        1.0
    } else {
        x.powf(s)
    }
}

/// Precomputed spectra of a pair for repeated `Tr[A^s B^(1-s)]` evaluations.
pub struct OverlapPair {
    a: DVector<f64>,
    b: DVector<f64>,
    weights: DMatrix<f64>,
}

impl OverlapPair {
    pub fn new(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<Self> {
        check_pair(a, b)?;
        let sa = Spectrum::of_state(a)?;
        let sb = Spectrum::of_state(b)?;
        let weights = sa.overlap_weights(&sb);
        Ok(Self { a: sa.values, b: sb.values, weights })
    }

    /// `Tr[A^s B^(1-s)]` for `s` in `[0, 1]`; at the ends the zero-power
    /// factor is the support projector.
    pub fn at(&self, s: f64) -> f64 {
        let pa = self.a.map(|x| power(x, s));
        let pb = self.b.map(|x| power(x, 1.0 - s));
        (pa.transpose() * &self.weights * pb)[(0, 0)]
    }

    pub fn minimum(&self) -> (f64, f64) {
        minimize_unit_interval(|s| self.at(s), self.at(0.0), self.at(1.0), 1e-6, 1e-10)
    }
}

pub fn s_overlap_fock(a: &FockDensityMatrix, b: &FockDensityMatrix, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(domain(format!("s must lie in [0, 1], got {s}")));
    }
    Ok(OverlapPair::new(a, b)?.at(s))
}

/// `(Q, s_star)` minimised over `s` in `[0, 1]`.
pub fn qcb_fock(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<(f64, f64)> {
    let (s, q) = OverlapPair::new(a, b)?.minimum();
    Ok((q, s))
}

/// `T = 1/2 Tr|A - B|`.
pub fn trace_distance_fock(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    check_pair(a, b)?;
    trace_norm_half(&(&a.rho - &b.rho))
}

fn trace_norm_half(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(0.5 * Spectrum::of(m)?.values.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn helstrom_pe_fock(a: &FockDensityMatrix, b: &FockDensityMatrix, copies: u32) -> Result<f64> {
    helstrom_pe_fock_with_cap(a, b, copies, DEFAULT_HELSTROM_CAP)
}

/// Minimum error probability `(1 - T(A^{xM}, B^{xM})) / 2` for equal priors.
pub fn helstrom_pe_fock_with_cap(a: &FockDensityMatrix, b: &FockDensityMatrix, copies: u32, cap: usize) -> Result<f64> {
    check_pair(a, b)?;
    if copies == 0 {
        return Err(domain("number of copies must be >= 1"));
    }
    let dim = a
        .total_dim()
        .checked_pow(copies)
        .filter(|&d| d <= cap)
        .ok_or(Error::CapExceeded { dim: a.total_dim().saturating_pow(copies), cap })?;
    let (mut ta, mut tb) = (a.rho.clone(), b.rho.clone());
    for _ in 1..copies {
        ta = ta.kronecker(&a.rho);
        tb = tb.kronecker(&b.rho);
    }
    debug_assert_eq!(ta.nrows(), dim);
    let t = trace_norm_half(&(ta - tb))?;
    Ok(0.5 * (1.0 - t))
}

/// `F = ||sqrt(A) sqrt(B)||_1^2`.
pub fn fidelity_fock(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let ra = Spectrum::of_state(a)?.function(f64::sqrt);
    let rb = Spectrum::of_state(b)?.function(f64::sqrt);
    let prod = ra * rb;
    let n = prod.nrows();
    let m = faer::Mat::<Complex64>::from_fn(n, n, |i, j| prod[(i, j)]);
    let sv = m
        .singular_values()
        .map_err(|e| Error::Numerical(format!("singular value decomposition failed: {e:?}")))?;
    let t: f64 = sv.iter().sum();
    Ok(t * t)
}
