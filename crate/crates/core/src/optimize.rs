//! Derivative-free scalar searches shared by the s-scan, the probe optimiser
//! and the threshold solver.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(x_min, f_min)` once the bracket is narrower than `tol`.
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any bracket below f64 resolution
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform grid scan followed by golden-section refinement in the cell
/// around the best grid point.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(points >= 3, "grid needs at least three points");
    let step = (hi - lo) / (points - 1) as f64;
    let node = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };
    let (best, fbest) = (0..points)
        .map(|i| (i, f(node(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let a = node(best.saturating_sub(1));
    let b = node((best + 1).min(points - 1));
    let (x, fx) = golden_section(&f, a, b, tol);
    if fx <= fbest {
        (x, fx)
    } else {
        (node(best), fbest)
    }
}

/// Minimum of `f` over the closed unit interval, scanning the interior
/// `[margin, 1 - margin]` and comparing against the supplied endpoint values.
pub fn minimize_unit_interval<F>(f: F, at_zero: f64, at_one: f64, margin: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut s, mut v) = grid_then_golden(&f, margin, 1.0 - margin, 21, tol);
    if at_zero < v {
        s = 0.0;
        v = at_zero;
    }
    if at_one < v {
        s = 1.0;
        v = at_one;
    }
    (s, v)
}

/// Bisection for a sign change of `f` on `[lo, hi]`; `f(lo)` and `f(hi)` must
/// have opposite signs.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let lo_negative = flo < 0.0;
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
