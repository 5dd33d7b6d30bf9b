use crate::error::{Error, Result};

/// Root of `f` inside a sign-changing bracket, by Brent's method.
///
/// Returns once the bracket is narrower than `tol`.
pub fn refine_root<F: FnMut(f64) -> f64>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (l, r) = bracket;
    let fl = f(l);
    let fr = f(r);
    brent(f, l, r, fl, fr, tol)
}

/// Brent's method with the endpoint values supplied by the caller.
pub(crate) fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange {
            left: a.min(b),
            right: a.max(b),
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let x = refine_root(|t| t - 1.0, (0.0, 2.0), 1e-12).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_root_is_half_pi() {
        let x = refine_root(f64::cos, (1.0, 2.0), 1e-12).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn even_function_has_no_sign_change() {
        assert!(matches!(
            refine_root(|t| t * t, (-1.0, 1.0), 1e-9),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn reversed_bracket_and_exact_endpoint() {
        let x = refine_root(|t| t * t * t - 8.0, (3.0, 0.0), 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
        assert_eq!(refine_root(|t| t - 2.0, (2.0, 5.0), 1e-9).unwrap(), 2.0);
    }
}
