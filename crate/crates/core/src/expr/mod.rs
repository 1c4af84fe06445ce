//! Expressions for nonlinearities `F(x, u, v, w)`: AST, printing, and symbolic derivatives.
//!
//! Printing is precedence-aware and chosen so that `parse(print(e)) == e` structurally.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{Compiled, EvalPoint};
pub use parse::{parse_expr, parse_expr_with};

/// Independent variable of a nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    U,
    V,
    W,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    Atan,
    /// Derivative of `abs`; `sign(0) = 0`.
    Sign,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Abs,
        Func::Sqrt,
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Atan,
        Func::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Atan => "atan",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    /// Per-vertex coefficient table, written `name` or `name(x)`.
    Coef(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

// Simplifying constructors: constant folding and 0/1 identities only.

pub fn num(c: f64) -> Expr {
    Expr::Num(c)
}

pub fn var(v: Var) -> Expr {
    Expr::Var(v)
}

pub fn coef(name: &str) -> Expr {
    Expr::Coef(name.to_string())
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => Expr::Num(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (Expr::Num(0.0), b) => b,
        (a, Expr::Num(0.0)) => a,
        (a, b) => Expr::Bin(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        (a, Expr::Num(0.0)) => a,
        (Expr::Num(0.0), b) => neg(b),
        (a, b) => Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (Expr::Num(0.0), _) | (_, Expr::Num(0.0)) => Expr::Num(0.0),
        (Expr::Num(1.0), b) => b,
        (a, Expr::Num(1.0)) => a,
        (Expr::Num(-1.0), b) => neg(b),
        (a, b) => Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) if y != 0.0 => Expr::Num(x / y),
        (Expr::Num(0.0), _) => Expr::Num(0.0),
        (a, Expr::Num(1.0)) => a,
        (a, b) => Expr::Bin(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

pub fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (_, Expr::Num(0.0)) => Expr::Num(1.0),
        (a, Expr::Num(1.0)) => a,
        (a, b) => Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

pub fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl Expr {
    /// Whether `x` occurs anywhere in the expression.
    pub fn depends_on(&self, x: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Coef(_) => false,
            Expr::Var(v) => *v == x,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(x),
            Expr::Bin(_, a, b) => a.depends_on(x) || b.depends_on(x),
        }
    }

    /// Coefficient names referenced, sorted.
    pub fn coefficients(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_coefficients(&mut out);
        out
    }

    fn collect_coefficients(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Coef(name) => {
                out.insert(name.clone());
            }
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_coefficients(out),
            Expr::Bin(_, a, b) => {
                a.collect_coefficients(out);
                b.collect_coefficients(out);
            }
        }
    }

    pub fn uses_func(&self, f: Func) -> bool {
        match self {
            Expr::Call(g, a) => *g == f || a.uses_func(f),
            Expr::Neg(a) => a.uses_func(f),
            Expr::Bin(_, a, b) => a.uses_func(f) || b.uses_func(f),
            _ => false,
        }
    }

    /// Symbolic partial derivative.
    pub fn differentiate(&self, x: Var) -> Expr {
        match self {
            Expr::Num(_) | Expr::Coef(_) => num(0.0),
            Expr::Var(v) => num(if *v == x { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.differentiate(x)),
            Expr::Bin(op, a, b) => {
                let (da, db) = (a.differentiate(x), b.differentiate(x));
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b.clone()), mul(a, db)),
                    BinOp::Div => {
                        if !b.depends_on(x) {
                            div(da, b)
                        } else {
                            div(sub(mul(da, b.clone()), mul(a, db)), pow(b, num(2.0)))
                        }
                    }
                    BinOp::Pow => {
                        if !b.depends_on(x) {
                            // a^c -> c * a^(c-1) * a'
                            let lowered = pow(a, sub(b.clone(), num(1.0)));
                            mul(mul(b, lowered), da)
                        } else {
                            // a^b -> a^b * (b' log a + b a' / a)
                            let whole = pow(a.clone(), b.clone());
                            let log_part = mul(db, call(Func::Log, a.clone()));
                            let base_part = div(mul(b, da), a);
                            mul(whole, add(log_part, base_part))
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let da = a.differentiate(x);
                if da == num(0.0) {
                    return num(0.0);
                }
                let a = a.as_ref().clone();
                let outer = match f {
                    Func::Abs => call(Func::Sign, a),
                    Func::Sqrt => div(num(0.5), call(Func::Sqrt, a)),
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(num(1.0), a),
                    Func::Atan => div(num(1.0), add(num(1.0), pow(a, num(2.0)))),
                    Func::Sign => num(0.0),
                };
                mul(outer, da)
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 5,
            _ => 6,
        }
    }
}

fn fmt_num(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let body = |c: f64| {
        if c.fract() == 0.0 && c.abs() < 1e15 {
            format!("{}", c as i64)
        } else {
            format!("{c:?}")
        }
    };
    if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
        write!(f, "(-{})", body(-c))
    } else {
        write!(f, "{}", body(c))
    }
}

fn wrap(e: &Expr, paren: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => fmt_num(*c, f),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Coef(name) => write!(f, "{name}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Neg(a) => {
                write!(f, "-")?;
                // a bare literal after '-' would be folded into a negative literal
                wrap(a, a.level() < 3 || matches!(**a, Expr::Num(_)), f)
            }
            Expr::Bin(op, a, b) => {
                let lv = self.level();
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                if *op == BinOp::Pow {
                    wrap(a, a.level() <= 4, f)?;
                    write!(f, "^")?;
                    wrap(b, b.level() < 3, f)
                } else {
                    wrap(a, a.level() < lv, f)?;
                    write!(f, "{sym}")?;
                    wrap(b, b.level() <= lv || matches!(**b, Expr::Neg(_)), f)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_identities() {
        assert_eq!(add(num(0.0), var(Var::U)), var(Var::U));
        assert_eq!(mul(num(1.0), var(Var::V)), var(Var::V));
        assert_eq!(mul(var(Var::V), num(0.0)), num(0.0));
        assert_eq!(pow(var(Var::U), num(1.0)), var(Var::U));
        assert_eq!(add(num(2.0), num(3.0)), num(5.0));
        assert_eq!(neg(neg(var(Var::W))), var(Var::W));
    }

    #[test]
    fn derivative_of_unrelated_variable_is_zero() {
        let e = parse_expr("v^3").unwrap();
        assert_eq!(e.differentiate(Var::U), num(0.0));
    }

    #[test]
    fn derivative_of_square_is_linear() {
        let e = parse_expr("u^2").unwrap();
        assert_eq!(e.differentiate(Var::U), mul(num(2.0), var(Var::U)));
    }

    #[test]
    fn printing_parenthesizes_as_needed() {
        for src in ["a-(b-c)", "(u^2)^3", "u^2^3", "-(u+v)", "(-2)*u", "-(2)", "u/(v*w)", "(-u)^2"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
        assert_eq!(parse_expr("a-(b-c)").unwrap().to_string(), "a-(b-c)");
    }
}
