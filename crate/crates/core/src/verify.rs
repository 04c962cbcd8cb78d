//! Cross-checks of the Gaussian formulas against the Fock-basis oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{evolve, LossChannel};
use crate::chernoff::{chernoff_minimum, SqueezedThermal};
use crate::error::{domain, Result};
use crate::fock::{
    apply_loss_kraus, fidelity_fock, fock_squeezed_thermal, helstrom_pe_fock, FockDensityMatrix, OverlapPair,
    TruncationConfig, DEFAULT_TAIL_TOL,
};
use crate::gaussian::{CovarianceMatrix, SqueezedThermalSingle, SqueezedThermalTwo};
use crate::probe::channel_output;

pub const QCB_TOL: f64 = 1e-6;
pub const MOMENT_TOL: f64 = 1e-8;
pub const MEAN_TOL: f64 = 1e-9;
pub const CHAIN_SLACK: f64 = -1e-9;
pub const DOUBLING_TOL: f64 = 1e-7;

/// Second hypothesis of a case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// The first state sent through a loss channel of this transmissivity.
    Loss(f64),
    State(SqueezedThermal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub name: String,
    pub a: SqueezedThermal,
    pub b: Target,
    /// Per-mode cutoff used unless overridden.
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub dim: Option<usize>,
    pub tail_tol: f64,
    pub doubling: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { dim: None, tail_tol: DEFAULT_TAIL_TOL, doubling: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub case: String,
    pub check: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

fn single(r: f64, n: f64) -> SqueezedThermal {
    SqueezedThermalSingle::new(r, n).expect("valid case").into()
}

fn two(r: f64, n1: f64, n2: f64) -> SqueezedThermal {
    SqueezedThermalTwo::new(r, n1, n2).expect("valid case").into()
}

fn case(name: &str, a: SqueezedThermal, b: Target, dim: usize) -> OracleCase {
    OracleCase { name: name.to_string(), a, b, dim }
}

/// Hand-picked low-energy cases, parameters at most 1.
pub fn standard_cases() -> Vec<OracleCase> {
    use Target::{Loss, State};
    let n1_squeeze = 1f64.sqrt().asinh();
    vec![
        case("sv N=1 eta=0.5", single(n1_squeeze, 0.0), Loss(0.5), 80),
        case("sv r=0.5 eta=0.9", single(0.5, 0.0), Loss(0.9), 60),
        case("th n=0.5 eta=0.3", single(0.0, 0.5), Loss(0.3), 60),
        case("st r=0.5 n=0.3 eta=0.6", single(0.5, 0.3), Loss(0.6), 80),
        case("st r=0.8 n=0.5 eta=0.9", single(0.8, 0.5), Loss(0.9), 140),
        case("st r=0.3 n=1 eta=0.3", single(0.3, 1.0), Loss(0.3), 100),
        case("vac vs th n=1", single(0.0, 0.0), State(single(0.0, 1.0)), 60),
        case("st pair", single(0.3, 0.4), State(single(0.6, 0.2)), 80),
        case("tmsv r=0.5 eta=0.5", two(0.5, 0.0, 0.0), Loss(0.5), 25),
        case("tmst r=0.4 n=(0.2,0.1) eta=0.6", two(0.4, 0.2, 0.1), Loss(0.6), 25),
        case("tmst r=0.3 n=(0.3,0.3) eta=0.9", two(0.3, 0.3, 0.3), Loss(0.9), 25),
        case("tmst r=0.5 n=(0.1,0.3) eta=0.3", two(0.5, 0.1, 0.3), Loss(0.3), 25),
        case("tmst pair", two(0.2, 0.1, 0.1), State(two(0.4, 0.2, 0.05)), 25),
    ]
}

pub fn run_standard(cfg: &VerifyConfig) -> Result<VerifyReport> {
    run_cases(&standard_cases(), cfg)
}

pub fn run_cases(cases: &[OracleCase], cfg: &VerifyConfig) -> Result<VerifyReport> {
    if let Some(d) = cfg.dim {
        TruncationConfig::new(d)?;
    }
    if !(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0) {
        return Err(domain(format!("tail tolerance must lie in (0, 1), got {}", cfg.tail_tol)));
    }
    let rows = cases
        .par_iter()
        .map(|c| run_case(c, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(VerifyReport { rows })
}

fn row(case: &str, check: &str, value: f64, tol: f64, pass: bool) -> CheckRow {
    CheckRow { case: case.to_string(), check: check.to_string(), value, tol, pass, error: None }
}

fn failed(case: &str, check: &str, tol: f64, err: impl ToString) -> CheckRow {
    CheckRow {
        case: case.to_string(),
        check: check.to_string(),
        value: f64::NAN,
        tol,
        pass: false,
        error: Some(err.to_string()),
    }
}

struct Built {
    a: FockDensityMatrix,
    b: FockDensityMatrix,
    cm_b: CovarianceMatrix,
    gaussian_b: SqueezedThermal,
}

fn build(c: &OracleCase, tc: &TruncationConfig) -> Result<Built> {
    let a = fock_squeezed_thermal(c.a, tc)?;
    match c.b {
        Target::Loss(eta) => {
            let ch = LossChannel::from_eta(eta)?;
            let b = apply_loss_kraus(&a, &ch);
            let mass = b.tail();
            if mass > tc.tail_tol {
                return Err(crate::error::Error::Truncation { mass, tol: tc.tail_tol });
            }
            let cm_b = evolve(&c.a.covariance()?, &ch)?;
            Ok(Built { a, b, cm_b, gaussian_b: channel_output(c.a, &ch)? })
        }
        Target::State(sb) => {
            let b = fock_squeezed_thermal(sb, tc)?;
            Ok(Built { a, b, cm_b: sb.covariance()?, gaussian_b: sb })
        }
    }
}

fn moment_rows(name: &str, label: &str, state: &FockDensityMatrix, cm: &CovarianceMatrix) -> [CheckRow; 2] {
    let m = state.moments();
    let mean = m.mean.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let cov = (&m.covariance - cm.matrix()).amax();
    [
        row(name, &format!("mean {label}"), mean, MEAN_TOL, mean < MEAN_TOL),
        row(name, &format!("moments {label}"), cov, MOMENT_TOL, cov <= MOMENT_TOL),
    ]
}

fn run_case(c: &OracleCase, cfg: &VerifyConfig) -> Vec<CheckRow> {
    let name = c.name.as_str();
    let dim = cfg.dim.unwrap_or(c.dim);
    let tc = match TruncationConfig::new(dim) {
        Ok(t) => t.with_tail_tol(cfg.tail_tol),
        Err(e) => return vec![failed(name, "truncation", cfg.tail_tol, e)],
    };
    let built = match build(c, &tc) {
        Ok(b) => b,
        Err(e) => return vec![failed(name, "truncation", cfg.tail_tol, e)],
    };
    let mut rows = Vec::new();
    match c.a.covariance() {
        Ok(cm) => rows.extend(moment_rows(name, "A", &built.a, &cm)),
        Err(e) => rows.push(failed(name, "moments A", MOMENT_TOL, e)),
    }
    rows.extend(moment_rows(name, "B", &built.b, &built.cm_b));

    let fock_q = OverlapPair::new(&built.a, &built.b).map(|p| p.minimum().1);
    match (&fock_q, chernoff_minimum(c.a, built.gaussian_b)) {
        (Ok(qf), Ok((qg, _))) => {
            let diff = (qf - qg).abs();
            rows.push(row(name, "qcb", diff, QCB_TOL, diff <= QCB_TOL));
        }
        (Err(e), _) => rows.push(failed(name, "qcb", QCB_TOL, e)),
        (_, Err(e)) => rows.push(failed(name, "qcb", QCB_TOL, e)),
    }

    if let Ok(q) = fock_q {
        rows.push(match chain_slack(&built.a, &built.b, q) {
            Ok(slack) => row(name, "bound chain", slack, CHAIN_SLACK, slack >= CHAIN_SLACK),
            Err(e) => failed(name, "bound chain", CHAIN_SLACK, e),
        });
        if cfg.doubling {
            rows.push(match doubled_qcb(c, &tc) {
                Ok(q2) => {
                    let diff = (q2 - q).abs();
                    row(name, "doubling", diff, DOUBLING_TOL, diff < DOUBLING_TOL)
                }
                Err(e) => failed(name, "doubling", DOUBLING_TOL, e),
            });
        }
    }
    rows
}

/// Smallest gap in `(1 - sqrt(1 - F))/2 <= P_e <= Q/2 <= sqrt(F)/2`.
fn chain_slack(a: &FockDensityMatrix, b: &FockDensityMatrix, q: f64) -> Result<f64> {
    let f = fidelity_fock(a, b)?.min(1.0);
    let pe = helstrom_pe_fock(a, b, 1)?;
    let lower = 0.5 * f / (1.0 + (1.0 - f).sqrt());
    let gaps = [pe - lower, 0.5 * q - pe, 0.5 * f.sqrt() - 0.5 * q];
    Ok(gaps.into_iter().fold(f64::INFINITY, f64::min))
}

fn doubled_qcb(c: &OracleCase, tc: &TruncationConfig) -> Result<f64> {
    let wide = TruncationConfig::new(2 * tc.dim)?.with_tail_tol(tc.tail_tol);
    let built = build(c, &wide)?;
    Ok(OverlapPair::new(&built.a, &built.b)?.minimum().1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_set_is_large_enough() {
        let cases = standard_cases();
        assert!(cases.len() >= 12);
        assert!(cases.iter().any(|c| c.a.modes() == 2));
    }

    #[test]
    fn small_cutoff_reports_truncation() {
        let cfg = VerifyConfig { dim: Some(12), doubling: false, ..Default::default() };
        let report = run_cases(&standard_cases()[..1], &cfg).unwrap();
        assert!(!report.all_passed());
        assert_eq!(report.rows[0].check, "truncation");
        assert!(report.rows[0].error.as_deref().unwrap().contains("trunc"));
    }

    #[test]
    fn single_case_passes() {
        let cases = [case("st", single(0.3, 0.2), Target::Loss(0.7), 50)];
        let report = run_cases(&cases, &VerifyConfig::default()).unwrap();
        for r in &report.rows {
            assert!(r.pass, "{r:?}");
        }
        assert_eq!(report.rows.len(), 7);
    }

    #[test]
    fn bad_overrides_rejected() {
        assert!(run_standard(&VerifyConfig { dim: Some(1), ..Default::default() }).is_err());
        assert!(run_standard(&VerifyConfig { tail_tol: 0.0, ..Default::default() }).is_err());
    }
}
