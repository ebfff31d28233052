//! One-dimensional maximization: a coarse grid locates the basin, golden
//! section refines it. Used wherever a bound is optimized over a free
//! parameter (ρ, s, x) that is not available in closed form.

/// Golden-section maximization on `[a, b]`; returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes `f` on `[a, b]`: evaluates `grid` equally spaced points
/// (endpoints included), then golden-refines around the best one. NaN values
/// are treated as `-inf`.
pub fn grid_golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, grid: usize, tol: f64) -> (f64, f64) {
    let grid = grid.max(2);
    let step = (b - a) / (grid - 1) as f64;
    let mut g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut best = (a, g(a));
    for i in 1..grid {
        let x = if i == grid - 1 { b } else { a + step * i as f64 };
        let v = g(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let lo = (best.0 - step).max(a);
    let hi = (best.0 + step).min(b);
    let refined = golden_max(&mut g, lo, hi, tol);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = grid_golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 11, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_maximum() {
        let (x, _) = grid_golden_max(|x| x, 0.0, 1.0, 5, 1e-10);
        assert_eq!(x, 1.0);
    }
}
