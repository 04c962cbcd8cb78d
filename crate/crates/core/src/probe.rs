//! Energy-constrained squeezed thermal probes and the loss-detection figures
//! of merit built on them.
//!
//! A probe is described by its total mean photon number `N`, the fraction
//! `beta` of that energy spent on squeezing and, for two modes, the share
//! `gamma` of thermal photons sitting in the probing mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{output_params_single, output_params_two, LossChannel};
use crate::chernoff::{chernoff_minimum, SqueezedThermal};
use crate::error::{domain, Error, Result};
use crate::gaussian::{SqueezedThermalSingle, SqueezedThermalTwo};
use crate::optimize::{bisect, grid_then_golden};

/// Upper end of the threshold-energy search.
pub const N_MAX: f64 = 1e3;

const PARAM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSpec {
    pub modes: u8,
    pub n: f64,
    pub beta: f64,
    /// Only meaningful for two modes.
    pub gamma: f64,
}

impl ProbeSpec {
    pub fn single(n: f64, beta: f64) -> Result<Self> {
        let spec = Self { modes: 1, n, beta, gamma: 1.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn two(n: f64, beta: f64, gamma: f64) -> Result<Self> {
        let spec = Self { modes: 2, n, beta, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.modes == 1 || self.modes == 2) {
            return Err(domain(format!("modes must be 1 or 2, got {}", self.modes)));
        }
        if !(self.n.is_finite() && self.n >= 0.0) {
            return Err(domain(format!("N must be finite and >= 0, got {}", self.n)));
        }
        check_unit("beta", self.beta)?;
        check_unit("gamma", self.gamma)
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in [0, 1], got {x}")))
    }
}

/// Squeezing `r = asinh(sqrt(n_S))` for `n_S` squeezed photons.
pub fn squeezing_for_photons(n_s: f64) -> f64 {
    n_s.sqrt().asinh()
}

/// Single mode: `n_S = beta N`, `n_T = (1 - beta) N / (1 + 2 beta N)`.
/// Two modes: `n_S = beta N / 2`, thermal total `(1 - beta) N / (1 + beta N)`
/// split as `gamma : 1 - gamma` between probe and reference.
pub fn params_from_spec(spec: ProbeSpec) -> Result<SqueezedThermal> {
    spec.validate()?;
    let (n, beta) = (spec.n, spec.beta);
    if spec.modes == 1 {
        let n_s = beta * n;
        let n_t = (1.0 - beta) * n / (1.0 + 2.0 * n_s);
        Ok(SqueezedThermalSingle::new(squeezing_for_photons(n_s), n_t)?.into())
    } else {
        let n_s = 0.5 * beta * n;
        let thermal = (1.0 - beta) * n / (1.0 + beta * n);
        let p = SqueezedThermalTwo::new(
            squeezing_for_photons(n_s),
            spec.gamma * thermal,
            (1.0 - spec.gamma) * thermal,
        )?;
        Ok(p.into())
    }
}

/// State after the loss channel acts on the probing mode.
pub fn channel_output(input: SqueezedThermal, ch: &LossChannel) -> Result<SqueezedThermal> {
    match input {
        SqueezedThermal::Single(p) => Ok(output_params_single(p, ch)?.into()),
        SqueezedThermal::Two(p) => Ok(output_params_two(p, ch)?.into()),
    }
}

/// Chernoff bound between a probe and its image under the channel.
pub fn q_probe(spec: ProbeSpec, ch: &LossChannel) -> Result<f64> {
    let input = params_from_spec(spec)?;
    let output = channel_output(input, ch)?;
    Ok(chernoff_minimum(input, output)?.0)
}

pub fn q1(n: f64, beta: f64, ch: &LossChannel) -> Result<f64> {
    q_probe(ProbeSpec::single(n, beta)?, ch)
}

pub fn q2(n: f64, beta: f64, gamma: f64, ch: &LossChannel) -> Result<f64> {
    q_probe(ProbeSpec::two(n, beta, gamma)?, ch)
}

fn check_analytic(n: f64, eta: f64) -> Result<()> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(domain(format!("N must be finite and >= 0, got {n}")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("transmissivity must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// `1 / sqrt(1 + N (1 - eta^2))`, the squeezed-vacuum optimum for one mode.
pub fn q1_analytic(n: f64, eta: f64) -> Result<f64> {
    check_analytic(n, eta)?;
    Ok(1.0 / (1.0 + n * (1.0 - eta * eta)).sqrt())
}

/// `4 / (2 + N (1 - sqrt(eta)))^2`, the two-mode squeezed vacuum optimum.
pub fn q2_analytic(n: f64, eta: f64) -> Result<f64> {
    check_analytic(n, eta)?;
    let d = 2.0 + n * (1.0 - eta.sqrt());
    Ok(4.0 / (d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaOptimum {
    pub beta: f64,
    /// Thermal split at the optimum (always 1 for one mode).
    pub gamma: f64,
    pub q: f64,
}

fn minimize_param<F>(f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = std::cell::RefCell::new(None);
    let eval = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let best = grid_then_golden(eval, 0.0, 1.0, 101, PARAM_TOL);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Minimises the Chernoff bound over `beta` (and over `gamma` for two modes
/// unless `gamma` is fixed).
pub fn optimize_beta(n: f64, ch: &LossChannel, modes: u8, gamma: Option<f64>) -> Result<BetaOptimum> {
    match (modes, gamma) {
        (1, _) => {
            let (beta, q) = minimize_param(|b| q1(n, b, ch))?;
            Ok(BetaOptimum { beta, gamma: 1.0, q })
        }
        (2, Some(g)) => {
            check_unit("gamma", g)?;
            let (beta, q) = minimize_param(|b| q2(n, b, g, ch))?;
            Ok(BetaOptimum { beta, gamma: g, q })
        }
        (2, None) => {
            let inner = |b: f64| minimize_param(|g| q2(n, b, g, ch));
            let (beta, q) = minimize_param(|b| Ok(inner(b)?.1))?;
            let (gamma, _) = inner(beta)?;
            Ok(BetaOptimum { beta, gamma, q })
        }
        _ => Err(domain(format!("modes must be 1 or 2, got {modes}"))),
    }
}

/// `Q2 <= Q1` reduces, after dividing out `N`, to the sign of the cubic
/// `u^4 N^3 + 8 u^3 N^2 + 24 u^2 N + 32 u - 16 v` with `u = 1 - sqrt(eta)`,
/// `v = 1 - eta^2`.
fn threshold_cubic(n: f64, eta: f64) -> f64 {
    let u = 1.0 - eta.sqrt();
    let v = 1.0 - eta * eta;
    ((u.powi(4) * n + 8.0 * u.powi(3)) * n + 24.0 * u * u) * n + (32.0 * u - 16.0 * v)
}

/// Smallest energy from which the two-mode squeezed vacuum beats the
/// single-mode one at transmissivity `eta`.
pub fn threshold_energy(eta: f64) -> Result<f64> {
    threshold_energy_with_cap(eta, N_MAX)
}

pub fn threshold_energy_with_cap(eta: f64, n_max: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!("threshold energy needs eta in (0, 1), got {eta}")));
    }
    if threshold_cubic(0.0, eta) >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0_f64.min(n_max);
    while threshold_cubic(hi, eta) < 0.0 {
        if hi >= n_max {
            return Err(Error::NoThreshold(n_max));
        }
        hi = (2.0 * hi).min(n_max);
    }
    let tol = 1e-12 * hi.max(1.0);
    bisect(|n| threshold_cubic(n, eta), 0.0, hi, tol)
        .ok_or_else(|| Error::Numerical("threshold bracket lost its sign change".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdCurvePoint {
    pub eta: f64,
    pub n_th: f64,
}

pub fn threshold_curve(etas: &[f64]) -> Result<Vec<ThresholdCurvePoint>> {
    etas.iter().map(|&eta| Ok(ThresholdCurvePoint { eta, n_th: threshold_energy(eta)? })).collect()
}

/// Real root of `x^3 + x^2 + x - 1`; the critical transmissivity is its square.
pub fn critical_root() -> f64 {
    // Cardano on the depressed cubic t^3 + p t + q with x = t - 1/3
    let p: f64 = 2.0 / 3.0;
    let q: f64 = -34.0 / 27.0;
    let d = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut x = (-q / 2.0 + d).cbrt() + (-q / 2.0 - d).cbrt() - 1.0 / 3.0;
    for _ in 0..3 {
        let f = ((x + 1.0) * x + 1.0) * x - 1.0;
        let df = (3.0 * x + 2.0) * x + 1.0;
        x -= f / df;
    }
    x
}

/// Transmissivity below which the two-mode squeezed vacuum wins at every energy.
pub fn critical_transmissivity() -> f64 {
    critical_root().powi(2)
}

/// `-ln eta_c`.
pub fn critical_damping() -> f64 {
    -critical_transmissivity().ln()
}

/// Independent estimate: bisection on the difference of the small-energy
/// slopes of the two closed-form bounds.
pub fn critical_transmissivity_numeric() -> f64 {
    let h = 1e-6;
    let slope_gap = |eta: f64| {
        let s1 = (1.0 - q1_analytic(h, eta).unwrap()) / h;
        let s2 = (1.0 - q2_analytic(h, eta).unwrap()) / h;
        s2 - s1
    };
    bisect(slope_gap, 0.05, 0.95, 1e-13).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub c1: f64,
    pub c2: f64,
    pub rms: f64,
}

/// Least-squares fit `N_th = c1 (eta - eta_c) + c2 (eta - eta_c)^2` over 50
/// points on `[eta_c, eta_c + 0.05]`.
pub fn threshold_fit_near_critical() -> Result<ThresholdFit> {
    let eta_c = critical_transmissivity();
    let points = 50;
    let data = (0..points)
        .map(|i| {
            let x = 0.05 * i as f64 / (points - 1) as f64;
            Ok((x, threshold_energy(eta_c + x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut s2, mut s3, mut s4, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in &data {
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        t1 += x * y;
        t2 += x * x * y;
    }
    let det = s2 * s4 - s3 * s3;
    let c1 = (t1 * s4 - t2 * s3) / det;
    let c2 = (s2 * t2 - s3 * t1) / det;
    let rms = (data.iter().map(|&(x, y)| (y - c1 * x - c2 * x * x).powi(2)).sum::<f64>()
        / points as f64)
        .sqrt();
    Ok(ThresholdFit { c1, c2, rms })
}

/// `Q1(N, beta) - Q2(N, beta, 1)`.
pub fn delta_q(n: f64, beta: f64, ch: &LossChannel) -> Result<f64> {
    delta_q_gamma(n, beta, 1.0, ch)
}

/// `Q1(N, beta) - Q2(N, beta, gamma)`.
pub fn delta_q_gamma(n: f64, beta: f64, gamma: f64, ch: &LossChannel) -> Result<f64> {
    Ok(q1(n, beta, ch)? - q2(n, beta, gamma, ch)?)
}

/// Sampling box for [`random_sweep`]. `n` and `damping` are sampled on
/// half-open intervals excluding the lower end, `beta` on the closed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRanges {
    pub n: (f64, f64),
    pub beta: (f64, f64),
    pub damping: (f64, f64),
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self { n: (0.0, 5.0), beta: (0.0, 1.0), damping: (0.0, 2.0) }
    }
}

impl SweepRanges {
    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi;
        if !(ok(self.n) && ok(self.beta) && ok(self.damping)) || self.beta.1 > 1.0 {
            return Err(domain(format!("invalid sweep ranges {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: f64,
    pub beta: f64,
    pub damping: f64,
    pub gamma: f64,
    pub delta_q_gamma: f64,
}

/// Draws `(N, beta, Gamma)` for sample `index`. Each index owns its own
/// ChaCha stream, so the result does not depend on evaluation order.
pub fn sample_point(seed: u64, index: u64, ranges: &SweepRanges) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut open_low = |(lo, hi): (f64, f64)| hi - rng.random::<f64>() * (hi - lo);
    let n = open_low(ranges.n);
    let damping = open_low(ranges.damping);
    let u: f64 = rng.random();
    let beta = ranges.beta.0 + u * (ranges.beta.1 - ranges.beta.0);
    (n, beta, damping)
}

pub fn random_sweep(count: usize, ranges: &SweepRanges, gamma: f64, seed: u64) -> Result<Vec<SweepRecord>> {
    ranges.validate()?;
    check_unit("gamma", gamma)?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let (n, beta, damping) = sample_point(seed, i, ranges);
            let ch = LossChannel::from_gamma(damping)?;
            Ok(SweepRecord { n, beta, damping, gamma, delta_q_gamma: delta_q_gamma(n, beta, gamma, &ch)? })
        })
        .collect()
}

/// Fraction of records with a strictly positive reduction.
pub fn positive_fraction(records: &[SweepRecord]) -> f64 {
    if records.is_empty() {
        return f64::NAN;
    }
    records.iter().filter(|r| r.delta_q_gamma > 0.0).count() as f64 / records.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chernoff::SqueezedThermal;
    use crate::gaussian::mean_photons;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn eta(e: f64) -> LossChannel {
        LossChannel::from_eta(e).unwrap()
    }

    #[test]
    fn params_examples() {
        let SqueezedThermal::Single(p) = params_from_spec(ProbeSpec::single(3.0, 0.0).unwrap()).unwrap() else {
            panic!("expected one mode");
        };
        assert_eq!((p.r, p.n_t), (0.0, 3.0));

        let SqueezedThermal::Single(p) = params_from_spec(ProbeSpec::single(3.0, 1.0).unwrap()).unwrap() else {
            panic!("expected one mode");
        };
        assert_abs_diff_eq!(p.r, 3f64.sqrt().asinh(), epsilon = 1e-15);
        assert_eq!(p.n_t, 0.0);

        let spec = ProbeSpec::two(2.0, 0.5, 1.0).unwrap();
        let state = params_from_spec(spec).unwrap();
        let SqueezedThermal::Two(p) = state else { panic!("expected two modes") };
        assert_abs_diff_eq!(p.r.sinh().powi(2), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p.n_t1, 0.5, epsilon = 1e-15);
        assert_eq!(p.n_t2, 0.0);
        assert_abs_diff_eq!(mean_photons(&state.covariance().unwrap()), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn spec_validation() {
        assert!(ProbeSpec::single(-1.0, 0.5).is_err());
        assert!(ProbeSpec::single(1.0, 1.5).is_err());
        assert!(ProbeSpec::two(1.0, 0.5, -0.1).is_err());
        assert!(params_from_spec(ProbeSpec { modes: 3, n: 1.0, beta: 0.5, gamma: 0.5 }).is_err());
        assert!(ProbeSpec::single(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn identity_channel_gives_one() {
        let ch = LossChannel::identity();
        for &(n, b, g) in &[(1.0, 0.3, 0.5), (2.0, 1.0, 1.0), (0.5, 0.0, 0.2)] {
            assert_abs_diff_eq!(q1(n, b, &ch).unwrap(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(q2(n, b, g, &ch).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn analytic_examples() {
        assert_abs_diff_eq!(q1_analytic(1.0, 1e-300).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(q2_analytic(2.0, 0.25).unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        for n in [0.0, 1.0, 7.5] {
            assert_eq!(q1_analytic(n, 1.0).unwrap(), 1.0);
            assert_eq!(q2_analytic(n, 1.0).unwrap(), 1.0);
        }
        assert!(q1_analytic(1.0, 0.0).is_err());
        assert!(q2_analytic(-1.0, 0.5).is_err());
    }

    #[test]
    fn pipeline_matches_closed_forms() {
        for &n in &[0.0, 0.5, 1.0, 3.0, 10.0, 20.0] {
            for &e in &[0.05, 0.2, 0.5, 0.8, 0.99] {
                let ch = eta(e);
                assert!((q1(n, 1.0, &ch).unwrap() - q1_analytic(n, e).unwrap()).abs() < 1e-9);
                for g in [0.0, 0.5, 1.0] {
                    assert!((q2(n, 1.0, g, &ch).unwrap() - q2_analytic(n, e).unwrap()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn optimal_beta_is_one() {
        let ch = LossChannel::from_gamma(0.3).unwrap();
        let one = optimize_beta(1.0, &ch, 1, None).unwrap();
        assert!(one.beta > 1.0 - 1e-2);
        assert_abs_diff_eq!(one.q, q1_analytic(1.0, ch.eta()).unwrap(), epsilon = 1e-9);
        let two = optimize_beta(1.0, &ch, 2, Some(1.0)).unwrap();
        assert!(two.beta > 1.0 - 1e-2);
        assert_abs_diff_eq!(two.q, q2_analytic(1.0, ch.eta()).unwrap(), epsilon = 1e-9);
        let tiny = optimize_beta(1e-9, &ch, 1, None).unwrap();
        assert!((tiny.q - 1.0).abs() < 1e-8);
        assert!(optimize_beta(1.0, &ch, 3, None).is_err());
    }

    #[test]
    fn joint_beta_gamma_optimum() {
        let ch = LossChannel::from_gamma(0.3).unwrap();
        let opt = optimize_beta(1.0, &ch, 2, None).unwrap();
        assert!(opt.beta > 1.0 - 1e-2);
        assert_abs_diff_eq!(opt.q, q2_analytic(1.0, ch.eta()).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn critical_values() {
        let x = critical_root();
        assert!((x.powi(3) + x.powi(2) + x - 1.0).abs() < 1e-12);
        let eta_c = critical_transmissivity();
        assert!((0.294..=0.298).contains(&eta_c));
        assert!((1.21..=1.23).contains(&critical_damping()));
        assert!((critical_transmissivity_numeric() - eta_c).abs() < 1e-5);
        assert_abs_diff_eq!(eta_c, 0.295_597_742_522_084_8, epsilon = 1e-14);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_energy(0.2).unwrap(), 0.0);
        assert_eq!(threshold_energy(critical_transmissivity() * (1.0 - 1e-12)).unwrap(), 0.0);
        let n = threshold_energy(0.35).unwrap();
        assert!(n > 0.0);
        assert_abs_diff_eq!(n, 0.23508, epsilon = 1e-4);
        let gap = |n: f64| q1_analytic(n, 0.35).unwrap() - q2_analytic(n, 0.35).unwrap();
        assert!(gap(n * 0.99) < 0.0 && gap(n * 1.01) > 0.0);
        assert_abs_diff_eq!(threshold_energy(0.99).unwrap(), 192.57, epsilon = 1e-2);
        assert!(threshold_energy(1.0).is_err());
        assert!(threshold_energy(0.0).is_err());
        assert!(matches!(threshold_energy(0.9999), Err(Error::NoThreshold(_))));
        assert!(matches!(threshold_energy_with_cap(0.99, 100.0), Err(Error::NoThreshold(_))));
    }

    #[test]
    fn threshold_is_monotone() {
        let eta_c = critical_transmissivity();
        let curve = threshold_curve(&(0..200).map(|i| eta_c + (0.98 - eta_c) * i as f64 / 199.0).collect::<Vec<_>>()).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].n_th >= w[0].n_th);
        }
    }

    #[test]
    fn threshold_fit() {
        let fit = threshold_fit_near_critical().unwrap();
        assert!((3.5..=4.5).contains(&fit.c1), "c1 = {}", fit.c1);
        assert!((4.5..=6.5).contains(&fit.c2), "c2 = {}", fit.c2);
        assert!(fit.rms < 1e-3);
    }

    #[test]
    fn delta_q_examples() {
        let id = LossChannel::identity();
        assert!(delta_q(1.0, 0.4, &id).unwrap().abs() < 1e-9);
        let ch = eta(0.6);
        let d = delta_q(2.0, 1.0, &ch).unwrap();
        let closed = q1_analytic(2.0, 0.6).unwrap() - q2_analytic(2.0, 0.6).unwrap();
        assert!((d - closed).abs() < 1e-9);
        assert_eq!(delta_q(1.5, 0.3, &ch).unwrap(), delta_q_gamma(1.5, 0.3, 1.0, &ch).unwrap());
    }

    #[test]
    fn sweep_is_deterministic() {
        let ranges = SweepRanges::default();
        let a = random_sweep(64, &ranges, 0.9, 7).unwrap();
        let b = random_sweep(64, &ranges, 0.9, 7).unwrap();
        assert_eq!(a, b);
        let c = random_sweep(64, &ranges, 0.9, 8).unwrap();
        assert_ne!(a, c);
        for r in &a {
            assert!(r.n > 0.0 && r.n <= 5.0);
            assert!((0.0..=1.0).contains(&r.beta));
            assert!(r.damping > 0.0 && r.damping <= 2.0);
        }
        let serial: Vec<_> = (0..64).map(|i| sample_point(7, i, &ranges)).collect();
        for (r, s) in a.iter().zip(&serial) {
            assert_eq!((r.n, r.beta, r.damping), *s);
        }
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let bad = SweepRanges { n: (2.0, 1.0), ..SweepRanges::default() };
        assert!(random_sweep(4, &bad, 1.0, 0).is_err());
        assert!(random_sweep(4, &SweepRanges::default(), 1.5, 0).is_err());
        assert!(positive_fraction(&[]).is_nan());
    }

    #[test]
    fn reduction_is_positive_at_gamma_one() {
        let records = random_sweep(300, &SweepRanges::default(), 1.0, 11).unwrap();
        assert_eq!(positive_fraction(&records), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn parametrization_closure(n in 0.0..20.0f64, beta in 0.0..=1.0f64, gamma in 0.0..=1.0f64) {
            let s1 = params_from_spec(ProbeSpec::single(n, beta).unwrap()).unwrap();
            prop_assert!((mean_photons(&s1.covariance().unwrap()) - n).abs() < 1e-10 * (1.0 + n));
            let s2 = params_from_spec(ProbeSpec::two(n, beta, gamma).unwrap()).unwrap();
            prop_assert!((mean_photons(&s2.covariance().unwrap()) - n).abs() < 1e-10 * (1.0 + n));
        }

        #[test]
        fn closed_forms_are_monotone(n in 0.01..20.0f64, e in 0.05..0.95f64) {
            let (dn, de) = (1e-3, 1e-3);
            prop_assert!(q1_analytic(n + dn, e).unwrap() < q1_analytic(n, e).unwrap());
            prop_assert!(q2_analytic(n + dn, e).unwrap() < q2_analytic(n, e).unwrap());
            prop_assert!(q1_analytic(n, e + de).unwrap() > q1_analytic(n, e).unwrap());
            prop_assert!(q2_analytic(n, e + de).unwrap() > q2_analytic(n, e).unwrap());
        }

        #[test]
        fn gamma_one_is_optimal(n in 0.05..5.0f64, beta in 0.0..1.0f64, damping in 0.01..2.0f64) {
            let ch = LossChannel::from_gamma(damping).unwrap();
            let best = q2(n, beta, 1.0, &ch).unwrap();
            for i in 0..=10 {
                let g = i as f64 / 10.0;
                prop_assert!(best <= q2(n, beta, g, &ch).unwrap() + 1e-12);
            }
        }

        #[test]
        fn beta_one_is_optimal(n in 0.05..5.0f64, damping in 0.01..2.0f64) {
            let ch = LossChannel::from_gamma(damping).unwrap();
            let q1_best = q1(n, 1.0, &ch).unwrap();
            let q2_best = q2(n, 1.0, 1.0, &ch).unwrap();
            for i in 0..20 {
                let b = i as f64 / 20.0;
                prop_assert!(q1_best <= q1(n, b, &ch).unwrap() + 1e-12);
                prop_assert!(q2_best <= q2(n, b, 1.0, &ch).unwrap() + 1e-12);
            }
        }

        #[test]
        // the reduction peaks somewhere in Gamma ∈ [1.4, 2] depending on (N, beta); monotone below that
        fn reduction_grows_with_damping(n in 0.1..5.0f64, beta in 0.0..=1.0f64, g in 0.05..0.9f64) {
            let lo = delta_q(n, beta, &LossChannel::from_gamma(g).unwrap()).unwrap();
            let hi = delta_q(n, beta, &LossChannel::from_gamma(g + 0.1).unwrap()).unwrap();
            prop_assert!(hi >= lo - 1e-12);
        }
    }
}
