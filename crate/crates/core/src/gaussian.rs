//! Covariance matrices of zero-mean single- and two-mode Gaussian states.
//!
//! Quadratures are ordered `(q1, p1, q2, p2)` and the vacuum has covariance
//! `1/2 * I`. Every formula in the crate uses this normalisation.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Covariance of the vacuum in each quadrature.
pub const VACUUM_NOISE: f64 = 0.5;

pub(crate) const SYMMETRY_TOL: f64 = 1e-12;
pub(crate) const PHYSICAL_TOL: f64 = 1e-10;

/// Real symmetric `2n x 2n` second-moment matrix of an `n`-mode state, `n` in {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry and the uncertainty principle `sigma + i/2 Omega >= 0`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || !(rows == 2 || rows == 4) {
            return Err(Error::Dimension(format!(
                "covariance matrix must be 2x2 or 4x4, got {rows}x{cols}"
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Unphysical("non-finite entry".into()));
        }
        let asym = (&entries - entries.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::Unphysical(format!("asymmetry {asym:e}")));
        }
        let cm = Self { modes: rows / 2, entries };
        let min_eig = cm.uncertainty_min_eigenvalue();
        if min_eig < -PHYSICAL_TOL {
            return Err(Error::Unphysical(format!(
                "sigma + i/2 Omega has eigenvalue {min_eig:e}"
            )));
        }
        Ok(cm)
    }

    /// Construction from formulas that are physical by design.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.nrows() == 2 || entries.nrows() == 4);
        Self { modes: entries.nrows() / 2, entries }
    }

    pub fn from_matrix2(m: Matrix2<f64>) -> Result<Self> {
        Self::new(DMatrix::from_iterator(2, 2, m.iter().copied()))
    }

    pub fn from_matrix4(m: Matrix4<f64>) -> Result<Self> {
        Self::new(DMatrix::from_iterator(4, 4, m.iter().copied()))
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        if !(modes == 1 || modes == 2) {
            return Err(Error::Dimension(format!("mode count {modes} not in {{1, 2}}")));
        }
        Ok(Self::from_trusted(DMatrix::identity(2 * modes, 2 * modes) * VACUUM_NOISE))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn determinant(&self) -> f64 {
        if self.modes == 1 {
            det2(&self.as_matrix2())
        } else {
            det4(&self.as_matrix4())
        }
    }

    pub(crate) fn as_matrix2(&self) -> Matrix2<f64> {
        Matrix2::from_iterator(self.entries.iter().copied())
    }

    pub(crate) fn as_matrix4(&self) -> Matrix4<f64> {
        Matrix4::from_iterator(self.entries.iter().copied())
    }

    /// Smallest eigenvalue of the Hermitian matrix `sigma + i/2 Omega`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let omega = symplectic_form(self.modes);
        let h = DMatrix::from_fn(self.entries.nrows(), self.entries.ncols(), |i, j| {
            Complex64::new(self.entries[(i, j)], 0.5 * omega[(i, j)])
        });
        h.symmetric_eigenvalues().min()
    }

    /// Row-major entries, as written by the CLI.
    pub fn row_major(&self) -> Vec<f64> {
        let n = self.entries.nrows();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[(i, j)])
            .collect()
    }

    /// Two-mode block `(row, col)` in {0, 1}^2.
    pub fn block(&self, row: usize, col: usize) -> Matrix2<f64> {
        assert_eq!(self.modes, 2, "blocks are defined for two-mode matrices");
        Matrix2::new(
            self.entries[(2 * row, 2 * col)],
            self.entries[(2 * row, 2 * col + 1)],
            self.entries[(2 * row + 1, 2 * col)],
            self.entries[(2 * row + 1, 2 * col + 1)],
        )
    }
}

/// Block-diagonal symplectic form, one `[[0, 1], [-1, 0]]` block per mode.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Single-mode squeezed thermal state `S(r) nu(n_t) S(r)^dagger`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezedThermalSingle {
    pub r: f64,
    pub n_t: f64,
}

impl SqueezedThermalSingle {
    pub fn new(r: f64, n_t: f64) -> Result<Self> {
        let p = Self { r, n_t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("r", self.r)?;
        check_nonneg("n_t", self.n_t)
    }

    pub fn is_pure(&self) -> bool {
        self.n_t <= crate::chernoff::PURITY_TOL
    }
}

/// Two-mode squeezed thermal state `S2(r) (nu(n_t1) x nu(n_t2)) S2(r)^dagger`.
/// Mode 1 is the probing mode, mode 2 the reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezedThermalTwo {
    pub r: f64,
    pub n_t1: f64,
    pub n_t2: f64,
}

impl SqueezedThermalTwo {
    pub fn new(r: f64, n_t1: f64, n_t2: f64) -> Result<Self> {
        let p = Self { r, n_t1, n_t2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("r", self.r)?;
        check_nonneg("n_t1", self.n_t1)?;
        check_nonneg("n_t2", self.n_t2)
    }

    pub fn is_pure(&self) -> bool {
        self.n_t1 <= crate::chernoff::PURITY_TOL && self.n_t2 <= crate::chernoff::PURITY_TOL
    }
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and >= 0, got {x}")))
    }
}

/// `diag(a, b)` with `a = (1 + 2 n_t) e^{2r} / 2`, `b = (1 + 2 n_t) e^{-2r} / 2`.
///
/// The squeezed quadrature is `p`, so `a >= b`.
pub fn make_single_mode_st(p: SqueezedThermalSingle) -> Result<CovarianceMatrix> {
    p.validate()?;
    let nu = p.n_t + VACUUM_NOISE;
    let m = Matrix2::new(nu * (2.0 * p.r).exp(), 0.0, 0.0, nu * (-2.0 * p.r).exp());
    Ok(CovarianceMatrix::from_trusted(DMatrix::from_iterator(2, 2, m.iter().copied())))
}

/// General single-mode squeezed thermal state with squeezing `zeta = r e^{i phi}`.
///
/// `phi = pi` reproduces [`make_single_mode_st`].
pub fn make_single_mode_st_phase(r: f64, n_t: f64, phi: f64) -> Result<CovarianceMatrix> {
    SqueezedThermalSingle::new(r, n_t)?;
    if !phi.is_finite() {
        return Err(domain("phase must be finite"));
    }
    let nu = n_t + VACUUM_NOISE;
    let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let a = nu * (c2 - s2 * phi.cos());
    let b = nu * (c2 + s2 * phi.cos());
    let c = nu * s2 * phi.sin();
    Ok(CovarianceMatrix::from_trusted(DMatrix::from_row_slice(2, 2, &[a, c, c, b])))
}

/// `(A, B, C)` of the normal form `sigma = 1/2 [[A I, C Z], [C Z, B I]]`.
pub fn two_mode_abc(p: SqueezedThermalTwo) -> (f64, f64, f64) {
    let (ch, sh) = (p.r.cosh(), p.r.sinh());
    let c2r = (2.0 * p.r).cosh();
    let a = c2r + 2.0 * p.n_t1 * ch * ch + 2.0 * p.n_t2 * sh * sh;
    let b = c2r + 2.0 * p.n_t1 * sh * sh + 2.0 * p.n_t2 * ch * ch;
    let c = (1.0 + p.n_t1 + p.n_t2) * (2.0 * p.r).sinh();
    (a, b, c)
}

pub(crate) fn normal_form_matrix(a: f64, b: f64, c: f64) -> Matrix4<f64> {
    Matrix4::new(
        a, 0.0, c, 0.0, //
        0.0, a, 0.0, -c, //
        c, 0.0, b, 0.0, //
        0.0, -c, 0.0, b,
    ) * 0.5
}

pub fn make_two_mode_st(p: SqueezedThermalTwo) -> Result<CovarianceMatrix> {
    p.validate()?;
    let (a, b, c) = two_mode_abc(p);
    let m = normal_form_matrix(a, b, c);
    Ok(CovarianceMatrix::from_trusted(DMatrix::from_iterator(4, 4, m.iter().copied())))
}

/// Analytic single-mode squeezing matrix `diag(e^r, e^-r)`.
pub fn squeezing_matrix_single(r: f64) -> Matrix2<f64> {
    Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp())
}

/// Analytic two-mode squeezing matrix `[[cosh r I, sinh r Z], [sinh r Z, cosh r I]]`.
pub fn squeezing_matrix_two(r: f64) -> Matrix4<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    Matrix4::new(
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, -s, //
        s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    /// `I1 + I2 + 2 I3`
    pub delta: f64,
    /// `I1 + I2 - 2 I3`, the partial-transpose counterpart.
    pub delta_tilde: f64,
}

pub fn symplectic_invariants(cm: &CovarianceMatrix) -> Result<SymplecticInvariants> {
    if cm.modes() != 2 {
        return Err(Error::Dimension("symplectic invariants need a two-mode matrix".into()));
    }
    let i1 = det2(&cm.block(0, 0));
    let i2 = det2(&cm.block(1, 1));
    let i3 = det2(&cm.block(0, 1));
    let i4 = cm.determinant();
    Ok(SymplecticInvariants {
        i1,
        i2,
        i3,
        i4,
        delta: i1 + i2 + 2.0 * i3,
        delta_tilde: i1 + i2 - 2.0 * i3,
    })
}

/// Two-mode invariants evaluated exactly on the (dyadic rational) entries,
/// then rounded once. The closed-form eigenvalues take a square root of the
/// discriminant, which amplifies any cancellation error near a degenerate
/// spectrum; exact evaluation removes it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExactInvariants {
    pub delta: f64,
    pub delta_tilde: f64,
    pub i4: f64,
    /// `Delta^2 - 4 I4`
    pub disc: f64,
    /// `Delta~^2 - 4 I4`
    pub disc_tilde: f64,
}

pub(crate) fn exact_invariants(cm: &CovarianceMatrix) -> Result<ExactInvariants> {
    if cm.modes() != 2 {
        return Err(Error::Dimension("symplectic invariants need a two-mode matrix".into()));
    }
    let q = |i: usize, j: usize| {
        BigRational::from_float(cm.get(i, j))
            .ok_or_else(|| Error::Numerical("non-finite covariance entry".into()))
    };
    let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(4);
    for i in 0..4 {
        m.push((0..4).map(|j| q(i, j)).collect::<Result<_>>()?);
    }
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
    };
    let i1 = minor(0, 1, 0, 1);
    let i2 = minor(2, 3, 2, 3);
    let i3 = minor(0, 1, 2, 3);
    // Laplace expansion along the first two rows
    let i4 = minor(0, 1, 0, 1) * minor(2, 3, 2, 3) - minor(0, 1, 0, 2) * minor(2, 3, 1, 3)
        + minor(0, 1, 0, 3) * minor(2, 3, 1, 2)
        + minor(0, 1, 1, 2) * minor(2, 3, 0, 3)
        - minor(0, 1, 1, 3) * minor(2, 3, 0, 2)
        + minor(0, 1, 2, 3) * minor(2, 3, 0, 1);
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let delta = &i1 + &i2 + &two * &i3;
    let delta_tilde = &i1 + &i2 - &two * &i3;
    let disc = &delta * &delta - &four * &i4;
    let disc_tilde = &delta_tilde * &delta_tilde - &four * &i4;
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    Ok(ExactInvariants {
        delta: f(&delta),
        delta_tilde: f(&delta_tilde),
        i4: f(&i4),
        disc: f(&disc),
        disc_tilde: f(&disc_tilde),
    })
}

/// `sqrt[(x +- sqrt(disc)) / 2]`, descending, with `disc = x^2 - 4 I4`.
///
/// The smaller value uses `d+ d- = sqrt(I4)`.
pub(crate) fn eigen_pair_from_invariants(x: f64, disc: f64, i4: f64) -> Result<(f64, f64)> {
    if disc < -PHYSICAL_TOL {
        return Err(Error::Numerical(format!("negative discriminant {disc:e}")));
    }
    let plus = ((x + disc.max(0.0).sqrt()) / 2.0).max(0.0).sqrt();
    if plus == 0.0 {
        return Ok((0.0, 0.0));
    }
    let minus = i4.max(0.0).sqrt() / plus;
    Ok((plus, minus))
}

/// Symplectic eigenvalues, sorted descending.
///
/// One mode: `sqrt(det sigma)`. Two modes: `d+-` from the invariants
/// `Delta` and `I4`. See [`symplectic_spectrum_numeric`] for the general route.
pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    match cm.modes() {
        1 => {
            let det = cm.determinant();
            if det < -PHYSICAL_TOL {
                return Err(Error::Numerical(format!("negative determinant {det:e}")));
            }
            Ok(vec![det.max(0.0).sqrt()])
        }
        _ => {
            let inv = exact_invariants(cm)?;
            let (plus, minus) = eigen_pair_from_invariants(inv.delta, inv.disc, inv.i4)?;
            Ok(vec![plus, minus])
        }
    }
}

fn sqrt_psd(m: &DMatrix<f64>, inverse: bool) -> Result<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Unphysical("covariance matrix is not positive definite".into()));
    }
    let roots = eig.eigenvalues.map(|x| if inverse { 1.0 / x.sqrt() } else { x.sqrt() });
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose())
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Symplectic eigenvalues as the moduli of the eigenvalues of `i Omega sigma`,
/// computed through the similar Hermitian matrix `i sigma^1/2 Omega sigma^1/2`.
pub fn symplectic_spectrum_numeric(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    let root = sqrt_psd(cm.matrix(), false)?;
    let k = &root * symplectic_form(cm.modes()) * &root;
    let h = to_complex(&k) * Complex64::new(0.0, 1.0);
    let mut positive: Vec<f64> = h.symmetric_eigenvalues().iter().copied().filter(|&x| x > 0.0).collect();
    if positive.len() != cm.modes() {
        return Err(Error::Numerical("spectrum of i Omega sigma is not paired".into()));
    }
    positive.sort_by(|a, b| b.total_cmp(a));
    Ok(positive)
}

/// `sigma = S W S^T` with `S` symplectic and `W = diag(d_k I2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDecomposition {
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, descending.
    pub d: Vec<f64>,
}

impl SymplecticDecomposition {
    pub fn williamson_form(&self) -> DMatrix<f64> {
        let n = self.d.len();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { self.d[i / 2] } else { 0.0 })
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.s * self.williamson_form() * self.s.transpose()
    }
}

/// Numeric Williamson decomposition.
///
/// With `K = sigma^-1/2 Omega sigma^-1/2`, the Hermitian matrix `iK` has
/// eigenvalues `+-1/d_k`. For an eigenvector `v = x + i y` of `+1/d_k` the
/// real pair `(y, x)` (each scaled to unit norm) brings `K` to the block
/// `[[0, 1/d_k], [-1/d_k, 0]]`, and `S = sigma^1/2 O W^-1/2`. Vectors of the
/// `+1/d_k` eigenspace satisfy `v^T w = 0`, so degenerate spectra need no
/// extra pairing step.
pub fn williamson(cm: &CovarianceMatrix) -> Result<SymplecticDecomposition> {
    let n = cm.modes();
    let root = sqrt_psd(cm.matrix(), false)?;
    let inv_root = sqrt_psd(cm.matrix(), true)?;
    let k = &inv_root * symplectic_form(n) * &inv_root;
    let h = to_complex(&k) * Complex64::new(0.0, 1.0);
    let eig = h.symmetric_eigen();

    let mut pairs: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > 0.0)
        .map(|(idx, &mu)| (1.0 / mu, idx))
        .collect();
    if pairs.len() != n {
        return Err(Error::Numerical("spectrum of i K is not paired".into()));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut d = Vec::with_capacity(n);
    for (mode, &(dk, idx)) in pairs.iter().enumerate() {
        if dk < VACUUM_NOISE - PHYSICAL_TOL {
            return Err(Error::Unphysical(format!("symplectic eigenvalue {dk} < 1/2")));
        }
        let v = eig.eigenvectors.column(idx);
        let x: nalgebra::DVector<f64> = v.map(|z| z.re);
        let y: nalgebra::DVector<f64> = v.map(|z| z.im);
        let (xn, yn) = (x.norm(), y.norm());
        if xn < 1e-8 || yn < 1e-8 {
            return Err(Error::Numerical("degenerate Williamson eigenvector".into()));
        }
        o.set_column(2 * mode, &(y / yn));
        o.set_column(2 * mode + 1, &(x / xn));
        d.push(dk);
    }
    let w_inv_root = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j {
            1.0 / d[i / 2].sqrt()
        } else {
            0.0
        }
    });
    let s = root * o * w_inv_root;
    Ok(SymplecticDecomposition { s, d })
}

/// `Tr[rho1 rho2] = 1 / sqrt(det(sigma1 + sigma2))` for zero-mean Gaussian states.
pub fn overlap(cm1: &CovarianceMatrix, cm2: &CovarianceMatrix) -> Result<f64> {
    if cm1.modes() != cm2.modes() {
        return Err(Error::Dimension(format!(
            "overlap of {}-mode and {}-mode states",
            cm1.modes(),
            cm2.modes()
        )));
    }
    let det = match cm1.modes() {
        1 => det2(&(cm1.as_matrix2() + cm2.as_matrix2())),
        _ => det4(&(cm1.as_matrix4() + cm2.as_matrix4())),
    };
    if det <= 0.0 {
        return Err(Error::Numerical(format!("det(sigma1 + sigma2) = {det:e}")));
    }
    Ok(1.0 / det.sqrt())
}

/// Total mean photon number `(Tr sigma - n) / 2`.
pub fn mean_photons(cm: &CovarianceMatrix) -> f64 {
    (cm.matrix().trace() - cm.modes() as f64) / 2.0
}

pub(crate) fn det2(m: &Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Cofactor expansion via 2x2 minors of the first two rows.
pub(crate) fn det4(m: &Matrix4<f64>) -> f64 {
    let s0 = m[(0, 0)] * m[(1, 1)] - m[(1, 0)] * m[(0, 1)];
    let s1 = m[(0, 0)] * m[(1, 2)] - m[(1, 0)] * m[(0, 2)];
    let s2 = m[(0, 0)] * m[(1, 3)] - m[(1, 0)] * m[(0, 3)];
    let s3 = m[(0, 1)] * m[(1, 2)] - m[(1, 1)] * m[(0, 2)];
    let s4 = m[(0, 1)] * m[(1, 3)] - m[(1, 1)] * m[(0, 3)];
    let s5 = m[(0, 2)] * m[(1, 3)] - m[(1, 2)] * m[(0, 3)];

    let c5 = m[(2, 2)] * m[(3, 3)] - m[(3, 2)] * m[(2, 3)];
    let c4 = m[(2, 1)] * m[(3, 3)] - m[(3, 1)] * m[(2, 3)];
    let c3 = m[(2, 1)] * m[(3, 2)] - m[(3, 1)] * m[(2, 2)];
    let c2 = m[(2, 0)] * m[(3, 3)] - m[(3, 0)] * m[(2, 3)];
    let c1 = m[(2, 0)] * m[(3, 2)] - m[(3, 0)] * m[(2, 2)];
    let c0 = m[(2, 0)] * m[(3, 1)] - m[(3, 0)] * m[(2, 1)];

    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}
