use super::Expr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => POWER,
        Expr::Const(v) if *v < 0.0 => UNARY,
        Expr::Const(_) | Expr::Time | Expr::Call(..) => ATOM,
    }
}

pub(super) fn print(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

fn write(e: &Expr, min: u8, out: &mut String) {
    let wrap = precedence(e) < min;
    if wrap {
        out.push('(');
    }
    match e {
        // f64's Display is the shortest text that reads back to the same bits
        Expr::Const(v) => out.push_str(&v.to_string()),
        Expr::Time => out.push('t'),
        Expr::Neg(a) => {
            out.push('-');
            write(a, UNARY, out);
        }
        Expr::Add(a, b) => binary(a, " + ", b, SUM, out),
        Expr::Sub(a, b) => binary(a, " - ", b, SUM, out),
        Expr::Mul(a, b) => binary(a, " * ", b, PRODUCT, out),
        Expr::Div(a, b) => binary(a, " / ", b, PRODUCT, out),
        Expr::Pow(a, b) => {
            write(a, ATOM, out);
            out.push_str(" ^ ");
            write(b, UNARY, out);
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write(a, 0, out);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

// left-associative: the right operand needs one level more
fn binary(a: &Expr, op: &str, b: &Expr, level: u8, out: &mut String) {
    write(a, level, out);
    out.push_str(op);
    write(b, level + 1, out);
}
