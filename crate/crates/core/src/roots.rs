//! Scalar root finding on brackets.

/// Plain bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign
/// (a zero at either end is accepted). Stops when the bracket is narrower
/// than `xtol` or after enough halvings to exhaust double precision.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-changing bracket: any step that
/// leaves the bracket (or fails to shrink it fast enough) is replaced by
/// a bisection step. `fdf` returns the value and the derivative.
pub fn newton_bisect<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut last_width = (hi - lo).abs();
    for _ in 0..max_iter {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let width = b - a;
        let next =
            if dfx != 0.0 && newton > a && newton < b && width < 0.75 * last_width + f64::EPSILON {
                newton
            } else {
                0.5 * (a + b)
            };
        last_width = width;
        let step = (next - x).abs();
        x = next;
        if step <= xtol || width <= xtol {
            return Some(x);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn newton_bisect_matches_bisection() {
        let f = |x: f64| x.cos() - x;
        let a = newton_bisect(|x| (f(x), -x.sin() - 1.0), 0.0, 1.0, 1e-15, 100).unwrap();
        let b = bisect(f, 0.0, 1.0, 1e-15).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_survives_flat_derivative() {
        // derivative vanishes at the initial midpoint
        let r = newton_bisect(|x| (x * x * x - 0.001, 3.0 * x * x), -1.0, 1.0, 1e-15, 200).unwrap();
        assert!((r - 0.1).abs() < 1e-13);
    }
}
