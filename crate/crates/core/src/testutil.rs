macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    }};
}

/// Relative-error comparison, absolute near zero.
macro_rules! assert_rel {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        let scale = b.abs().max(1.0);
        assert!((a - b).abs() <= tol * scale, "{} vs {} (rel tol {})", a, b, tol);
    }};
}
