//! Fixed-panel composite Simpson quadrature.

use super::scalar::Scalar;

/// Composite Simpson rule with `panels` panels (each panel uses its midpoint).
pub fn simpson<F>(f: F, a: &Scalar, b: &Scalar, panels: usize) -> Scalar
where
    F: Fn(&Scalar) -> Scalar,
{
    let prec = a.prec().max(b.prec());
    let n = panels.max(1) as i64;
    let h = (b - a) / n;
    let mut acc = Scalar::zero(prec);
    let mut left = f(a);
    for i in 0..n {
        let x0 = a + &h * i;
        let xm = &x0 + &(&h / 2);
        let x1 = if i + 1 == n { b.clone() } else { a + &h * (i + 1) };
        let right = f(&x1);
        acc = acc + (&left + &f(&xm) * 4 + &right);
        left = right;
    }
    acc * &h / 6
}

/// Simpson estimate over one panel `[x0, x1]` given the three samples.
pub fn simpson_panel(x0: &Scalar, x1: &Scalar, f0: &Scalar, fm: &Scalar, f1: &Scalar) -> Scalar {
    (x1 - x0) * (f0 + &(fm * 4) + f1) / 6
}
