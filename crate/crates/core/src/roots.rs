//! Bracketing root finders and grid scans shared by every analysis.
//!
//! Everything here is derivative-free on purpose: the functions being
//! solved (return maps, potentials, piecewise models) are only known
//! pointwise and can be non-smooth at segment joints.

/// Sign of `v` as -1, 0 or +1. NaN maps to 0.
pub fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign (or one of them zero). Stops when the bracket is narrower than
/// `xtol` or cannot be split further in floating point.
pub fn bisect<E, F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let flo = f(lo)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi)?;
    if fhi == 0.0 {
        return Ok(hi);
    }
    let slo = sign(flo);
    let (mut flo, mut fhi) = (flo, fhi);
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if sign(fm) == slo {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // Return whichever end of the final bracket has the smaller residual.
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_min<E, F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Uniform grid of `n + 1` points spanning `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

/// Log-spaced grid of `n` points from `lo` to `hi` (both > 0), endpoints exact.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Index pairs `(i, j)`, `i < j`, of consecutive nonzero samples with
/// opposite signs. Exact zeros in between are skipped over, so a run like
/// `+, 0, 0, -` yields one bracket. Infinities keep their sign; NaNs are
/// ignored.
pub fn sign_changes(values: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (i, &v) in values.iter().enumerate() {
        let s = sign(v);
        if v.is_nan() || s == 0 {
            continue;
        }
        if let Some((j, sj)) = last {
            if sj != s {
                out.push((j, i));
            }
        }
        last = Some((i, s));
    }
    out
}

/// Interior grid indices where `|values|` has a strict local minimum while
/// both neighbours share a sign (a touch candidate). The middle value may be
/// an exact zero.
pub fn touch_candidates(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            a.is_finite()
                && b.is_finite()
                && c.is_finite()
                && sign(a) != 0
                && sign(a) == sign(c)
                && (sign(b) == sign(a) || b == 0.0)
                && b.abs() < a.abs()
                && b.abs() <= c.abs()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_handles_infinite_side() {
        // Escape-to-infinity is encoded as +inf by the return-map scan.
        let r = bisect(
            |x| ok(if x > 0.7 { f64::INFINITY } else { x - 0.5 }),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn golden_min_parabola() {
        let (x, fx) = golden_min(|x| ok((x - 0.3) * (x - 0.3) + 1.0), 0.0, 1.0, 1e-10).unwrap();
        // A quadratic minimum is only resolvable to about √ε.
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = linspace(0.0, 1.0, 10);
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
        let l = logspace(1e-3, 10.0, 50);
        assert_eq!(l.len(), 50);
        assert_eq!(l[0], 1e-3);
        assert_eq!(l[49], 10.0);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sign_change_and_touch_detection() {
        let v = [1.0, 0.5, -0.1, -0.2, 0.3, 0.2, 0.01, 0.2];
        assert_eq!(sign_changes(&v), vec![(1, 2), (3, 4)]);
        assert_eq!(touch_candidates(&v), vec![6]);
        assert_eq!(sign_changes(&[1.0, f64::INFINITY, -1.0]), vec![(1, 2)]);
        assert_eq!(sign_changes(&[1.0, 0.0, 0.0, -1.0, 0.0]), vec![(0, 3)]);
    }
}
