//! Entanglement, discord and mutual information of two-mode Gaussian states.
//!
//! All entropies use the natural logarithm. [`CorrelationReport::in_bits`]
//! converts a report to base 2.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian::{
    eigen_pair_from_invariants, exact_invariants, symplectic_eigenvalues, symplectic_invariants,
    CovarianceMatrix, VACUUM_NOISE,
};

const FORM_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-10;

fn require_two_modes(cm: &CovarianceMatrix) -> Result<()> {
    if cm.modes() == 2 {
        Ok(())
    } else {
        Err(Error::Dimension("correlation measures need a two-mode matrix".into()))
    }
}

/// Symplectic eigenvalues `(d~+, d~-)` of the partially transposed state.
pub fn pt_symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<(f64, f64)> {
    require_two_modes(cm)?;
    let inv = exact_invariants(cm)?;
    eigen_pair_from_invariants(inv.delta_tilde, inv.disc_tilde, inv.i4)
}

/// `E = max(0, -ln(2 d~-))`.
pub fn log_negativity(cm: &CovarianceMatrix) -> Result<f64> {
    let (_, minus) = pt_symplectic_eigenvalues(cm)?;
    Ok(negativity_from(minus))
}

fn negativity_from(d_tilde_minus: f64) -> f64 {
    (-(2.0 * d_tilde_minus).ln()).max(0.0)
}

/// `h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2)`, von Neumann entropy
/// of a thermal mode with symplectic eigenvalue `x`.
pub fn binary_entropy_h(x: f64) -> Result<f64> {
    if !(x >= VACUUM_NOISE - CLAMP_TOL) || !x.is_finite() {
        return Err(domain(format!("h(x) needs x >= 1/2, got {x}")));
    }
    Ok(entropy_unchecked(x.max(VACUUM_NOISE)))
}

fn entropy_unchecked(x: f64) -> f64 {
    let up = x + 0.5;
    let down = x - 0.5;
    let tail = if down > 0.0 { down * down.ln() } else { 0.0 };
    up * up.ln() - tail
}

/// Normal-form check: diagonal blocks proportional to the identity and the
/// off-diagonal block proportional to `diag(1, -1)`.
fn check_normal_form(cm: &CovarianceMatrix) -> Result<()> {
    let (a, b, c) = (cm.block(0, 0), cm.block(1, 1), cm.block(0, 1));
    let deviation = [
        (a[(0, 0)] - a[(1, 1)]).abs(),
        a[(0, 1)].abs(),
        (b[(0, 0)] - b[(1, 1)]).abs(),
        b[(0, 1)].abs(),
        (c[(0, 0)] + c[(1, 1)]).abs(),
        c[(0, 1)].abs(),
        c[(1, 0)].abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if deviation > FORM_TOL {
        return Err(Error::Form(deviation));
    }
    Ok(())
}

/// Closed-form Gaussian discord of a normal-form two-mode state:
/// `h(sqrt I2) - h(d-) - h(d+) + h[(sqrt I1 + 2 sqrt(I1 I2) + 2 I3) / (1 + 2 sqrt I2)]`.
pub fn discord(cm: &CovarianceMatrix) -> Result<f64> {
    require_two_modes(cm)?;
    check_normal_form(cm)?;
    let inv = symplectic_invariants(cm)?;
    let d = symplectic_eigenvalues(cm)?;
    let (r1, r2) = (inv.i1.sqrt(), inv.i2.sqrt());
    let conditional = (r1 + 2.0 * r1 * r2 + 2.0 * inv.i3) / (1.0 + 2.0 * r2);
    let value = binary_entropy_h(r2)? - binary_entropy_h(d[1])? - binary_entropy_h(d[0])?
        + binary_entropy_h(conditional)?;
    clamp(value, "discord")
}

fn clamp(value: f64, name: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("{name} = {value:e} is negative")))
    }
}

/// Prefactor convention for the mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MutualInfoConvention {
    /// `1/2 [h(sqrt I1) + h(sqrt I2) - h(d+) - h(d-)]`; pure states give `h(sqrt I1)`.
    #[default]
    AsPrinted,
    /// `S(A) + S(B) - S(AB)` without the prefactor; pure states give `2 h(sqrt I1)`.
    Standard,
}

pub fn mutual_information(cm: &CovarianceMatrix) -> Result<f64> {
    mutual_information_with(cm, MutualInfoConvention::AsPrinted)
}

pub fn mutual_information_with(cm: &CovarianceMatrix, convention: MutualInfoConvention) -> Result<f64> {
    require_two_modes(cm)?;
    let inv = symplectic_invariants(cm)?;
    let d = symplectic_eigenvalues(cm)?;
    let total = binary_entropy_h(inv.i1.sqrt())? + binary_entropy_h(inv.i2.sqrt())?
        - binary_entropy_h(d[0])?
        - binary_entropy_h(d[1])?;
    let factor = match convention {
        MutualInfoConvention::AsPrinted => 0.5,
        MutualInfoConvention::Standard => 1.0,
    };
    clamp(factor * total, "mutual information")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub e: f64,
    pub d: f64,
    pub i: f64,
    pub d_tilde_minus: f64,
}

impl CorrelationReport {
    /// Same quantities with base-2 logarithms.
    pub fn in_bits(&self) -> CorrelationReport {
        let k = std::f64::consts::LN_2;
        CorrelationReport { e: self.e / k, d: self.d / k, i: self.i / k, d_tilde_minus: self.d_tilde_minus }
    }

    pub fn is_entangled(&self) -> bool {
        self.e > 0.0
    }
}

pub fn correlation_report(cm: &CovarianceMatrix) -> Result<CorrelationReport> {
    correlation_report_with(cm, MutualInfoConvention::AsPrinted)
}

pub fn correlation_report_with(cm: &CovarianceMatrix, convention: MutualInfoConvention) -> Result<CorrelationReport> {
    let (_, minus) = pt_symplectic_eigenvalues(cm)?;
    Ok(CorrelationReport {
        e: negativity_from(minus),
        d: discord(cm)?,
        i: mutual_information_with(cm, convention)?,
        d_tilde_minus: minus,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(domain("rank correlation needs two samples of equal length >= 2"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(domain("rank correlation needs finite samples"));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(domain("rank correlation of a constant sample is undefined"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end share their mean
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            out[k] = rank;
        }
        start = end;
    }
    out
}
