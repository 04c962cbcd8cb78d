//! Pure-loss channel coupling a mode to a zero-temperature reservoir.
//!
//! At the covariance level the channel contracts toward the vacuum:
//! `sigma -> eta sigma + (1 - eta) / 2 I` on the lossy mode, with the
//! cross-correlations to an untouched reference mode scaled by `sqrt(eta)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian::{
    two_mode_abc, CovarianceMatrix, SqueezedThermalSingle, SqueezedThermalTwo, VACUUM_NOISE,
};

/// Parameters recovered at the channel output; same semantics as the input
/// parameters (`r_Gamma`, `n_Gamma`).
pub type OutputParamsSingle = SqueezedThermalSingle;
/// Output parameters `(r_Gamma, n_Gamma1, n_Gamma2)` of a two-mode probe.
pub type OutputParamsTwo = SqueezedThermalTwo;

const CLAMP_TOL: f64 = 1e-12;
const RECOVERY_TOL: f64 = 1e-9;

/// Loss channel stored as accumulated damping `Gamma` with `eta = exp(-Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossChannel {
    gamma: f64,
    eta: f64,
}

impl LossChannel {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(domain(format!("damping must be finite and >= 0, got {gamma}")));
        }
        let eta = (-gamma).exp();
        if eta <= 0.0 {
            return Err(domain(format!("damping {gamma} underflows the transmissivity")));
        }
        Ok(Self { gamma, eta })
    }

    pub fn from_eta(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(domain(format!("transmissivity must lie in (0, 1], got {eta}")));
        }
        Ok(Self { gamma: -eta.ln(), eta })
    }

    pub fn identity() -> Self {
        Self { gamma: 0.0, eta: 1.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Sequential composition; damping adds.
    pub fn then(&self, other: &LossChannel) -> LossChannel {
        LossChannel { gamma: self.gamma + other.gamma, eta: self.eta * other.eta }
    }
}

pub fn evolve_single(cm: &CovarianceMatrix, ch: &LossChannel) -> Result<CovarianceMatrix> {
    if cm.modes() != 1 {
        return Err(Error::Dimension("evolve_single needs a single-mode matrix".into()));
    }
    let eta = ch.eta;
    let out = cm.matrix() * eta + DMatrix::identity(2, 2) * ((1.0 - eta) * VACUUM_NOISE);
    Ok(CovarianceMatrix::from_trusted(out))
}

/// Loss on mode 1 only; mode 2 bypasses the channel.
pub fn evolve_two(cm: &CovarianceMatrix, ch: &LossChannel) -> Result<CovarianceMatrix> {
    if cm.modes() != 2 {
        return Err(Error::Dimension("evolve_two needs a two-mode matrix".into()));
    }
    let eta = ch.eta;
    let root = eta.sqrt();
    let scale = [root, root, 1.0, 1.0];
    let mut out = DMatrix::from_fn(4, 4, |i, j| scale[i] * cm.get(i, j) * scale[j]);
    for k in 0..2 {
        out[(k, k)] += (1.0 - eta) * VACUUM_NOISE;
    }
    Ok(CovarianceMatrix::from_trusted(out))
}

pub fn evolve(cm: &CovarianceMatrix, ch: &LossChannel) -> Result<CovarianceMatrix> {
    match cm.modes() {
        1 => evolve_single(cm, ch),
        _ => evolve_two(cm, ch),
    }
}

fn clamp_nonneg(name: &str, x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("recovered {name} = {x:e} is negative")))
    }
}

/// `n_Gamma = sqrt(det sigma') - 1/2`, `r_Gamma = 1/4 ln(a' / b')`.
pub fn output_params_single(p: SqueezedThermalSingle, ch: &LossChannel) -> Result<OutputParamsSingle> {
    p.validate()?;
    let nu = p.n_t + VACUUM_NOISE;
    let eta = ch.eta;
    let a = eta * nu * (2.0 * p.r).exp() + (1.0 - eta) * VACUUM_NOISE;
    let b = eta * nu * (-2.0 * p.r).exp() + (1.0 - eta) * VACUUM_NOISE;
    let n = clamp_nonneg("n_Gamma", (a * b).sqrt() - VACUUM_NOISE)?;
    let r = clamp_nonneg("r_Gamma", 0.25 * (a / b).ln())?;
    Ok(SqueezedThermalSingle { r, n_t: n })
}

/// Inverts the normal form for the evolved `(A', B', C')`:
/// `A' + B' = 2 m cosh 2r`, `C' = m sinh 2r`, `A' - B' = 2 (n1 - n2)` with
/// `m = 1 + n1 + n2`.
pub fn output_params_two(p: SqueezedThermalTwo, ch: &LossChannel) -> Result<OutputParamsTwo> {
    p.validate()?;
    let (a, b, c) = two_mode_abc(p);
    let eta = ch.eta;
    let a_out = eta * a + (1.0 - eta);
    let c_out = eta.sqrt() * c;
    let b_out = b;
    let out = invert_normal_form(a_out, b_out, c_out)?;

    let (ra, rb, rc) = two_mode_abc(out);
    let residual = (ra - a_out).abs().max((rb - b_out).abs()).max((rc - c_out).abs())
        / (1.0 + a_out.max(b_out));
    if residual > RECOVERY_TOL {
        return Err(Error::Solver { residual, tol: RECOVERY_TOL });
    }
    Ok(out)
}

/// Squeezed thermal parameters of a normal-form matrix `1/2 [[A I, C Z], [C Z, B I]]`.
pub fn invert_normal_form(a: f64, b: f64, c: f64) -> Result<SqueezedThermalTwo> {
    let half_sum = 0.5 * (a + b);
    let m2 = half_sum * half_sum - c * c;
    if m2 <= 0.0 {
        return Err(Error::Unphysical(format!("(A + B)^2 / 4 - C^2 = {m2:e}")));
    }
    let m = m2.sqrt();
    let r = 0.5 * (c / half_sum).atanh();
    let diff = 0.5 * (a - b);
    let n1 = clamp_nonneg("n_Gamma1", 0.5 * (m - 1.0 + diff))?;
    let n2 = clamp_nonneg("n_Gamma2", 0.5 * (m - 1.0 - diff))?;
    Ok(SqueezedThermalTwo { r: clamp_nonneg("r_Gamma", r)?, n_t1: n1, n_t2: n2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_single_mode_st, make_two_mode_st, symplectic_eigenvalues};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn st1(r: f64, n: f64) -> CovarianceMatrix {
        make_single_mode_st(SqueezedThermalSingle::new(r, n).unwrap()).unwrap()
    }

    fn st2(r: f64, n1: f64, n2: f64) -> CovarianceMatrix {
        make_two_mode_st(SqueezedThermalTwo::new(r, n1, n2).unwrap()).unwrap()
    }

    #[test]
    fn channel_construction() {
        let ch = LossChannel::from_eta(0.5).unwrap();
        assert_abs_diff_eq!(ch.gamma(), 2f64.ln(), epsilon = 1e-15);
        let ch = LossChannel::from_gamma(0.3).unwrap();
        assert!((ch.eta() - (-0.3f64).exp()).abs() < 1e-14);
        assert!(LossChannel::from_eta(0.0).is_err());
        assert!(LossChannel::from_eta(1.2).is_err());
        assert!(LossChannel::from_gamma(-0.1).is_err());
        assert!(LossChannel::from_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn single_mode_limits() {
        let cm = st1(0.8, 0.3);
        let same = evolve_single(&cm, &LossChannel::identity()).unwrap();
        assert!((same.matrix() - cm.matrix()).amax() < 1e-15);

        let dead = evolve_single(&cm, &LossChannel::from_gamma(60.0).unwrap()).unwrap();
        assert!((dead.matrix() - DMatrix::identity(2, 2) * 0.5).amax() < 1e-12);

        let vac = st1(0.0, 0.0);
        let out = evolve_single(&vac, &LossChannel::from_gamma(0.7).unwrap()).unwrap();
        assert!((out.matrix() - vac.matrix()).amax() < 1e-15);
        assert!(matches!(evolve_single(&st2(0.1, 0.0, 0.0), &LossChannel::identity()), Err(Error::Dimension(_))));
    }

    #[test]
    fn two_mode_limits() {
        let cm = st2(0.5, 0.2, 0.1);
        let same = evolve_two(&cm, &LossChannel::identity()).unwrap();
        assert!((same.matrix() - cm.matrix()).amax() < 1e-15);

        let r: f64 = 0.7;
        let out = evolve_two(&st2(r, 0.0, 0.0), &LossChannel::from_gamma(60.0).unwrap()).unwrap();
        let c2 = (2.0 * r).cosh() / 2.0;
        let expected =
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.5, c2, c2]));
        assert!((out.matrix() - expected).amax() < 1e-12);

        let prod = evolve_two(&st2(0.0, 1.0, 2.0), &LossChannel::from_eta(0.3).unwrap()).unwrap();
        assert_eq!(prod.block(0, 1), nalgebra::Matrix2::zeros());
    }

    #[test]
    fn output_params_single_examples() {
        let p = SqueezedThermalSingle::new(0.9, 0.4).unwrap();
        let same = output_params_single(p, &LossChannel::identity()).unwrap();
        assert_abs_diff_eq!(same.r, p.r, epsilon = 1e-14);
        assert_abs_diff_eq!(same.n_t, p.n_t, epsilon = 1e-14);

        let vac = SqueezedThermalSingle::new(0.0, 0.0).unwrap();
        let out = output_params_single(vac, &LossChannel::from_gamma(1.3).unwrap()).unwrap();
        assert_eq!((out.r, out.n_t), (0.0, 0.0));

        // a' = (e^2 + 1)/4, b' = (e^-2 + 1)/4
        let ch = LossChannel::from_eta(0.5).unwrap();
        let out = output_params_single(SqueezedThermalSingle::new(1.0, 0.0).unwrap(), &ch).unwrap();
        let e2 = 1f64.exp().powi(2);
        let (a, b) = ((e2 + 1.0) / 4.0, (1.0 / e2 + 1.0) / 4.0);
        assert_abs_diff_eq!(a, 2.09726, epsilon = 1e-5);
        assert_abs_diff_eq!(b, 0.28383, epsilon = 1e-5);
        assert_abs_diff_eq!(out.n_t, (a * b).sqrt() - 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(out.n_t, 0.27155, epsilon = 1e-5);
        assert_abs_diff_eq!(out.r, 0.25 * (a / b).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(out.r, 0.50000, epsilon = 1e-5);
    }

    #[test]
    fn output_params_two_examples() {
        let p = SqueezedThermalTwo::new(0.6, 0.2, 0.4).unwrap();
        let same = output_params_two(p, &LossChannel::identity()).unwrap();
        assert_abs_diff_eq!(same.r, p.r, epsilon = 1e-12);
        assert_abs_diff_eq!(same.n_t1, p.n_t1, epsilon = 1e-12);
        assert_abs_diff_eq!(same.n_t2, p.n_t2, epsilon = 1e-12);

        let eta = 0.35;
        let out = output_params_two(
            SqueezedThermalTwo::new(0.0, 1.5, 0.7).unwrap(),
            &LossChannel::from_eta(eta).unwrap(),
        )
        .unwrap();
        assert_eq!(out.r, 0.0);
        assert_abs_diff_eq!(out.n_t1, eta * 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.n_t2, 0.7, epsilon = 1e-12);

        let p = SqueezedThermalTwo::new(0.8, 0.3, 0.1).unwrap();
        let ch = LossChannel::from_eta(0.6).unwrap();
        let out = output_params_two(p, &ch).unwrap();
        let rebuilt = make_two_mode_st(out).unwrap();
        let evolved = evolve_two(&make_two_mode_st(p).unwrap(), &ch).unwrap();
        assert!((rebuilt.matrix() - evolved.matrix()).amax() < 1e-9);
    }

    #[test]
    fn recovered_thermal_numbers_are_symplectic_eigenvalues() {
        let p = SqueezedThermalTwo::new(1.1, 0.0, 0.0).unwrap();
        let ch = LossChannel::from_eta(0.4).unwrap();
        let out = output_params_two(p, &ch).unwrap();
        let d = symplectic_eigenvalues(&evolve_two(&make_two_mode_st(p).unwrap(), &ch).unwrap()).unwrap();
        let mut ns = [out.n_t1 + 0.5, out.n_t2 + 0.5];
        ns.sort_by(|a, b| b.total_cmp(a));
        assert_abs_diff_eq!(ns[0], d[0], epsilon = 1e-10);
        assert_abs_diff_eq!(ns[1], d[1], epsilon = 1e-10);
        // pure input through a single lossy mode keeps one vacuum eigenvalue
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-10);
    }

    fn max_diff(a: &CovarianceMatrix, b: &CovarianceMatrix) -> f64 {
        (a.matrix() - b.matrix()).amax()
    }

    proptest! {
        #[test]
        fn semigroup(r in 0.0..2.0f64, n1 in 0.0..3.0f64, n2 in 0.0..3.0f64, g1 in 0.0..3.0f64, g2 in 0.0..3.0f64) {
            let c1 = LossChannel::from_gamma(g1).unwrap();
            let c2 = LossChannel::from_gamma(g2).unwrap();
            let both = LossChannel::from_gamma(g1 + g2).unwrap();
            let s = st1(r, n1);
            prop_assert!(max_diff(&evolve(&evolve(&s, &c1).unwrap(), &c2).unwrap(), &evolve(&s, &both).unwrap()) < 1e-12 * (1.0 + s.matrix().amax()));
            let t = st2(r, n1, n2);
            prop_assert!(max_diff(&evolve(&evolve(&t, &c1).unwrap(), &c2).unwrap(), &evolve(&t, &both).unwrap()) < 1e-12 * (1.0 + t.matrix().amax()));
        }

        #[test]
        fn physicality_and_closure(r in 0.0..2.5f64, n1 in 0.0..5.0f64, n2 in 0.0..5.0f64, eta in 0.01..1.0f64) {
            let ch = LossChannel::from_eta(eta).unwrap();
            let p1 = SqueezedThermalSingle::new(r, n1).unwrap();
            let out1 = evolve_single(&make_single_mode_st(p1).unwrap(), &ch).unwrap();
            prop_assert!(symplectic_eigenvalues(&out1).unwrap()[0] >= 0.5 - 1e-10);
            prop_assert_eq!(out1.get(0, 1), 0.0);
            let rebuilt = make_single_mode_st(output_params_single(p1, &ch).unwrap()).unwrap();
            prop_assert!(max_diff(&rebuilt, &out1) < 1e-10 * (1.0 + out1.matrix().amax()));

            let p2 = SqueezedThermalTwo::new(r, n1, n2).unwrap();
            let input2 = make_two_mode_st(p2).unwrap();
            let out2 = evolve_two(&input2, &ch).unwrap();
            prop_assert!(symplectic_eigenvalues(&out2).unwrap()[1] >= 0.5 - 1e-10);
            let a = out2.block(0, 0);
            let c = out2.block(0, 1);
            prop_assert!((a[(0, 0)] - a[(1, 1)]).abs() < 1e-12 && a[(0, 1)].abs() < 1e-12);
            prop_assert!((c[(0, 0)] + c[(1, 1)]).abs() < 1e-12 && c[(0, 1)].abs() < 1e-12);
            let rebuilt = make_two_mode_st(output_params_two(p2, &ch).unwrap()).unwrap();
            prop_assert!(max_diff(&rebuilt, &out2) < 1e-9);
            prop_assert!(out2.uncertainty_min_eigenvalue() >= -1e-10);
        }
    }
}
