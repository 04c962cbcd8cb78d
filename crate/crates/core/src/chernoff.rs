//! Quantum Chernoff bound between zero-mean squeezed thermal states.
//!
//! `Q_s = Tr[rho_A^s rho_B^(1-s)] = Pi_s / sqrt(det Sigma_s)` where `Pi_s` is a
//! product of `G` factors over the thermal numbers and `Sigma_s` adds the
//! squeezed weight matrices `S W S^T`, `W = (Lambda + 1/2) I`, of both states.

use nalgebra::{Matrix2, Matrix4};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian::{
    det2, det4, make_single_mode_st, make_two_mode_st, overlap, squeezing_matrix_single,
    squeezing_matrix_two, CovarianceMatrix, SqueezedThermalSingle, SqueezedThermalTwo,
    VACUUM_NOISE,
};
use crate::optimize::minimize_unit_interval;

/// Thermal numbers at or below this value count as vacuum.
pub const PURITY_TOL: f64 = 1e-9;

/// Interior margin of the s-scan; endpoint values are extrapolated from it.
pub const S_MARGIN: f64 = 1e-6;
pub const S_TOL: f64 = 1e-10;

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("s must lie in (0, 1), got {s}")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("thermal number must be finite and >= 0, got {x}")))
    }
}

/// `G_s(x) = 1 / ((x + 1)^s - x^s)`.
pub fn g_s(x: f64, s: f64) -> Result<f64> {
    check_x(x)?;
    check_s(s)?;
    Ok(g_unchecked(x, s))
}

/// `Lambda_s(x) = x^s / ((x + 1)^s - x^s)`.
pub fn lambda_s(x: f64, s: f64) -> Result<f64> {
    check_x(x)?;
    check_s(s)?;
    Ok(lambda_unchecked(x, s))
}

// Written as x^-s / expm1(s ln(1 + 1/x)) to keep precision at large x.
fn g_unchecked(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    1.0 / (x.powf(s) * (s * (1.0 / x).ln_1p()).exp_m1())
}

fn lambda_unchecked(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    1.0 / (s * (1.0 / x).ln_1p()).exp_m1()
}

fn weight(x: f64, s: f64) -> f64 {
    lambda_unchecked(x, s) + VACUUM_NOISE
}

fn finish(pi: f64, det: f64) -> Result<f64> {
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::SingularSigma(det));
    }
    Ok(pi / det.sqrt())
}

pub fn q_s_single(pa: SqueezedThermalSingle, pb: SqueezedThermalSingle, s: f64) -> Result<f64> {
    check_s(s)?;
    pa.validate()?;
    pb.validate()?;
    q_s_single_unchecked(pa, pb, s)
}

fn q_s_single_unchecked(pa: SqueezedThermalSingle, pb: SqueezedThermalSingle, s: f64) -> Result<f64> {
    let t = squeezing_matrix_single(pb.r - pa.r);
    let wa = Matrix2::identity() * weight(pa.n_t, s);
    let wb = Matrix2::identity() * weight(pb.n_t, 1.0 - s);
    let sigma = wa + t * wb * t.transpose();
    let pi = g_unchecked(pa.n_t, s) * g_unchecked(pb.n_t, 1.0 - s);
    let (scale, unit) = equilibrate2(&sigma);
    finish(pi, scale * det2(&unit))
}

pub fn q_s_two(pa: SqueezedThermalTwo, pb: SqueezedThermalTwo, s: f64) -> Result<f64> {
    check_s(s)?;
    pa.validate()?;
    pb.validate()?;
    q_s_two_unchecked(pa, pb, s)
}

fn diag_weight(n1: f64, n2: f64, s: f64) -> Matrix4<f64> {
    let (w1, w2) = (weight(n1, s), weight(n2, s));
    Matrix4::from_diagonal(&nalgebra::Vector4::new(w1, w1, w2, w2))
}

fn q_s_two_unchecked(pa: SqueezedThermalTwo, pb: SqueezedThermalTwo, s: f64) -> Result<f64> {
    let t = squeezing_matrix_two(pb.r - pa.r);
    let wa = diag_weight(pa.n_t1, pa.n_t2, s);
    let wb = diag_weight(pb.n_t1, pb.n_t2, 1.0 - s);
    let sigma = wa + t * wb * t.transpose();
    let pi = g_unchecked(pa.n_t1, s)
        * g_unchecked(pa.n_t2, s)
        * g_unchecked(pb.n_t1, 1.0 - s)
        * g_unchecked(pb.n_t2, 1.0 - s);
    let (scale, unit) = equilibrate4(&sigma);
    finish(pi, scale * det4(&unit))
}

// Sigma_s is evaluated in the symplectic frame of state A, where
// det(S_A W_A S_A^T + S_B W_B S_B^T) = det(W_A + T W_B T^T) with
// T = S_A^-1 S_B = S(r_B - r_A). Near-pure states give W_A entries that
// dwarf the rest at small s, so the determinant is taken after scaling to
// a unit diagonal.
fn equilibrate2(m: &Matrix2<f64>) -> (f64, Matrix2<f64>) {
    let d = m.diagonal();
    (d.product(), Matrix2::from_fn(|i, j| m[(i, j)] / (d[i] * d[j]).sqrt()))
}

fn equilibrate4(m: &Matrix4<f64>) -> (f64, Matrix4<f64>) {
    let d = m.diagonal();
    (d.product(), Matrix4::from_fn(|i, j| m[(i, j)] / (d[i] * d[j]).sqrt()))
}

/// Either kind of squeezed thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SqueezedThermal {
    Single(SqueezedThermalSingle),
    Two(SqueezedThermalTwo),
}

impl SqueezedThermal {
    pub fn modes(&self) -> usize {
        match self {
            SqueezedThermal::Single(_) => 1,
            SqueezedThermal::Two(_) => 2,
        }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            SqueezedThermal::Single(p) => p.is_pure(),
            SqueezedThermal::Two(p) => p.is_pure(),
        }
    }

    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        match self {
            SqueezedThermal::Single(p) => make_single_mode_st(*p),
            SqueezedThermal::Two(p) => make_two_mode_st(*p),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SqueezedThermal::Single(p) => p.validate(),
            SqueezedThermal::Two(p) => p.validate(),
        }
    }
}

impl From<SqueezedThermalSingle> for SqueezedThermal {
    fn from(p: SqueezedThermalSingle) -> Self {
        SqueezedThermal::Single(p)
    }
}

impl From<SqueezedThermalTwo> for SqueezedThermal {
    fn from(p: SqueezedThermalTwo) -> Self {
        SqueezedThermal::Two(p)
    }
}

/// `Q_s` for a matched pair of states.
pub fn q_s(pa: SqueezedThermal, pb: SqueezedThermal, s: f64) -> Result<f64> {
    match (pa, pb) {
        (SqueezedThermal::Single(a), SqueezedThermal::Single(b)) => q_s_single(a, b, s),
        (SqueezedThermal::Two(a), SqueezedThermal::Two(b)) => q_s_two(a, b, s),
        _ => Err(mode_mismatch(pa, pb)),
    }
}

fn mode_mismatch(pa: SqueezedThermal, pb: SqueezedThermal) -> Error {
    Error::Dimension(format!("cannot compare {}-mode and {}-mode states", pa.modes(), pb.modes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub q: f64,
    pub s_star: f64,
    pub fidelity: Option<f64>,
    pub copies: u32,
    pub pe_upper: f64,
    pub pe_lower: Option<f64>,
    pub pe_fidelity_upper: Option<f64>,
}

/// Single-copy Chernoff bound and the minimising `s`.
pub fn chernoff_minimum(pa: SqueezedThermal, pb: SqueezedThermal) -> Result<(f64, f64)> {
    pa.validate()?;
    pb.validate()?;
    if pa.modes() != pb.modes() {
        return Err(mode_mismatch(pa, pb));
    }
    if pa.is_pure() || pb.is_pure() {
        // Tr[rho_A rho_B]; the infimum sits on the border next to the pure state.
        let q = overlap(&pa.covariance()?, &pb.covariance()?)?;
        let s_star = if pa.is_pure() { 0.0 } else { 1.0 };
        return Ok((q.min(1.0), s_star));
    }

    // Errors inside the scan cannot occur for validated inputs; any that do
    // are surfaced after the search.
    let failure = std::cell::RefCell::new(None);
    let eval = |s: f64| match q_s(pa, pb, s) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let h = S_MARGIN;
    // Linear extrapolation to the endpoints; exactly 1 for full-rank states,
    // below 1 when a two-mode state has a vacuum symplectic eigenvalue.
    let at_zero = 2.0 * eval(h) - eval(2.0 * h);
    let at_one = 2.0 * eval(1.0 - h) - eval(1.0 - 2.0 * h);
    let (s, v) = minimize_unit_interval(eval, at_zero, at_one, h, S_TOL);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((v.clamp(f64::MIN_POSITIVE, 1.0), s))
}

/// Chernoff bound with the `copies`-fold error-probability bounds.
pub fn qcb(pa: SqueezedThermal, pb: SqueezedThermal, copies: u32) -> Result<DiscriminationReport> {
    let (q, s_star) = chernoff_minimum(pa, pb)?;
    let fidelity = if pa.is_pure() || pb.is_pure() { Some(q) } else { None };
    let (pe_lower, pe_upper, pe_fidelity_upper) = error_bounds(q, fidelity, copies)?;
    Ok(DiscriminationReport { q, s_star, fidelity, copies, pe_upper, pe_lower, pe_fidelity_upper })
}

pub fn qcb_single(pa: SqueezedThermalSingle, pb: SqueezedThermalSingle) -> Result<f64> {
    Ok(chernoff_minimum(pa.into(), pb.into())?.0)
}

pub fn qcb_two(pa: SqueezedThermalTwo, pb: SqueezedThermalTwo) -> Result<f64> {
    Ok(chernoff_minimum(pa.into(), pb.into())?.0)
}

/// `(pe_lower, pe_upper, pe_fidelity_upper)` for `m` copies:
/// `(1 - sqrt(1 - F^m)) / 2 <= P_e <= Q^m / 2 <= F^(m/2) / 2`.
pub fn error_bounds(q: f64, f: Option<f64>, m: u32) -> Result<(Option<f64>, f64, Option<f64>)> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(domain(format!("QCB must lie in (0, 1], got {q}")));
    }
    if m == 0 {
        return Err(domain("number of copies must be >= 1"));
    }
    let m = f64::from(m);
    let upper = 0.5 * q.powf(m);
    match f {
        None => Ok((None, upper, None)),
        Some(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(domain(format!("fidelity must lie in (0, 1], got {f}")));
            }
            let fm = f.powf(m);
            // 1 - sqrt(1 - y) = y / (1 + sqrt(1 - y)) avoids cancellation at small y
            let lower = 0.5 * fm / (1.0 + (1.0 - fm).sqrt());
            let fid_upper = 0.5 * f.powf(0.5 * m);
            Ok((Some(lower), upper, Some(fid_upper)))
        }
    }
}
