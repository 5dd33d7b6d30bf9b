use super::{Expr, Func};
use crate::error::{Error, Result};

// Builders that drop identities involving the literals 0 and 1. They only
// touch nodes created here; parsed input is never rewritten.
fn add(a: Expr, b: Expr) -> Expr {
    if a.is_literal(0.0) {
        b
    } else if b.is_literal(0.0) {
        a
    } else {
        Expr::add(a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if b.is_literal(0.0) {
        a
    } else if a.is_literal(0.0) {
        neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn neg(a: Expr) -> Expr {
    if a.is_literal(0.0) {
        a
    } else {
        Expr::neg(a)
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_literal(0.0) || b.is_literal(0.0) {
        Expr::zero()
    } else if a.is_literal(1.0) {
        b
    } else if b.is_literal(1.0) {
        a
    } else {
        Expr::mul(a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if a.is_literal(0.0) || b.is_literal(1.0) {
        a
    } else {
        Expr::div(a, b)
    }
}

pub(super) fn differentiate(e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Time => Expr::one(),
        Expr::Neg(a) => neg(differentiate(a)?),
        Expr::Add(a, b) => add(differentiate(a)?, differentiate(b)?),
        Expr::Sub(a, b) => sub(differentiate(a)?, differentiate(b)?),
        Expr::Mul(a, b) => add(
            mul(differentiate(a)?, (**b).clone()),
            mul((**a).clone(), differentiate(b)?),
        ),
        Expr::Div(a, b) => {
            let da = differentiate(a)?;
            let db = differentiate(b)?;
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                Expr::pow((**b).clone(), Expr::Const(2.0)),
            )
        }
        Expr::Pow(base, exponent) => {
            let base_t = base.depends_on_time();
            let exp_t = exponent.depends_on_time();
            match (base_t, exp_t) {
                (false, false) => Expr::zero(),
                (true, false) => {
                    let reduced = match exponent.as_const() {
                        Some(k) => Expr::num(k - 1.0),
                        None => Expr::sub((**exponent).clone(), Expr::one()),
                    };
                    mul(
                        mul(
                            (**exponent).clone(),
                            Expr::pow((**base).clone(), reduced),
                        ),
                        differentiate(base)?,
                    )
                }
                (false, true) => mul(
                    mul(e.clone(), Expr::call(Func::Log, (**base).clone())),
                    differentiate(exponent)?,
                ),
                (true, true) => {
                    return Err(Error::NotDifferentiable {
                        expr: e.to_string(),
                        reason: "both base and exponent depend on t".into(),
                    })
                }
            }
        }
        Expr::Call(func, arg) => {
            let u = (**arg).clone();
            let du = differentiate(arg)?;
            if du.is_literal(0.0) {
                return Ok(Expr::zero());
            }
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                Func::Tan => Expr::add(
                    Expr::one(),
                    Expr::pow(Expr::call(Func::Tan, u), Expr::Const(2.0)),
                ),
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Log => return Ok(div(du, u)),
                Func::Sqrt => {
                    return Ok(div(
                        du,
                        Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, u)),
                    ))
                }
                Func::Abs => Expr::div(u.clone(), Expr::call(Func::Abs, u)),
                Func::Sinh => Expr::call(Func::Cosh, u),
                Func::Cosh => Expr::call(Func::Sinh, u),
            };
            mul(outer, du)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(src: &str) -> Expr {
        differentiate(&Expr::parse(src).unwrap()).unwrap()
    }

    #[test]
    fn textbook_rules() {
        assert_eq!(d("sin(t)"), Expr::parse("cos(t)").unwrap());
        assert_eq!(d("t^3").eval(2.0).unwrap(), 12.0);
        assert_eq!(d("5"), Expr::zero());
        assert_eq!(d("t"), Expr::one());
        assert!((d("log(t)").eval(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((d("2^t").eval(1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((d("sqrt(t)").eval(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((d("abs(t)").eval(-3.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((d("tan(t)").eval(0.3).unwrap() - 1.0 / 0.3f64.cos().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn product_chain_against_central_difference() {
        let e = Expr::parse("exp(2*t)*t").unwrap();
        let de = differentiate(&e).unwrap();
        let h = 1e-5;
        let fd = (e.eval(1.0 + h).unwrap() - e.eval(1.0 - h).unwrap()) / (2.0 * h);
        let exact = de.eval(1.0).unwrap();
        assert!(((exact - fd) / exact).abs() < 1e-6);
        assert!((exact - 3.0 * 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn variable_base_and_exponent_rejected() {
        let err = differentiate(&Expr::parse("t^t").unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotDifferentiable { .. }));
        // base constant, exponent variable is fine
        assert!(differentiate(&Expr::parse("3^(2*t)").unwrap()).is_ok());
    }
}
