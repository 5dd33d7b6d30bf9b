use super::{Expr, Func};
use crate::error::{Error, Result};

pub(super) fn eval(e: &Expr, t: f64) -> Result<f64> {
    let domain = |reason: &str| Error::Domain {
        t,
        expr: e.to_string(),
        reason: reason.to_string(),
    };
    let v = match e {
        Expr::Const(v) => *v,
        Expr::Time => t,
        Expr::Neg(a) => -eval(a, t)?,
        Expr::Add(a, b) => eval(a, t)? + eval(b, t)?,
        Expr::Sub(a, b) => eval(a, t)? - eval(b, t)?,
        Expr::Mul(a, b) => eval(a, t)? * eval(b, t)?,
        Expr::Div(a, b) => {
            let num = eval(a, t)?;
            let den = eval(b, t)?;
            if den == 0.0 {
                return Err(domain("division by zero"));
            }
            num / den
        }
        Expr::Pow(a, b) => {
            let base = eval(a, t)?;
            let exponent = eval(b, t)?;
            if base < 0.0 && exponent.fract() != 0.0 {
                return Err(domain("negative base with non-integer exponent"));
            }
            if base == 0.0 && exponent < 0.0 {
                return Err(domain("zero raised to a negative power"));
            }
            base.powf(exponent)
        }
        Expr::Call(func, a) => {
            let x = eval(a, t)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.cos() == 0.0 {
                        return Err(domain("tan at a pole"));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain("log of a non-positive argument"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain("sqrt of a negative argument"));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
            }
        }
    };
    if !v.is_finite() {
        return Err(domain("non-finite result"));
    }
    Ok(v)
}
