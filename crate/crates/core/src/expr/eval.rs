use super::{BinOp, Expr, Func, Var};
use crate::error::EvalError;
use crate::real::Real;

/// Values of the free variables at one vertex; `coefs[i]` is the i-th resolved coefficient.
#[derive(Debug, Clone, Copy)]
pub struct EvalPoint<'a, T> {
    pub u: T,
    pub v: T,
    pub w: T,
    pub coefs: &'a [T],
}

#[derive(Debug, Clone)]
enum Node<T> {
    Num(T),
    Var(Var),
    Coef(usize),
    Neg(Box<Node<T>>),
    Bin(BinOp, Box<Node<T>>, Box<Node<T>>),
    PowI(Box<Node<T>>, i32),
    Call(Func, Box<Node<T>>),
}

/// An expression with coefficient names resolved to slots, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled<T> {
    root: Node<T>,
}

impl<T: Real> Compiled<T> {
    /// Resolves every coefficient against `names`; the slot index is the position in `names`.
    pub fn new(e: &Expr, names: &[String]) -> Result<Self, String> {
        Ok(Self { root: lower(e, names)? })
    }

    pub fn eval(&self, at: &EvalPoint<'_, T>) -> Result<T, EvalError> {
        let r = eval_node(&self.root, at)?;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(err(format!(
                "non-finite result at u={}, v={}, w={}",
                at.u, at.v, at.w
            )))
        }
    }
}

fn lower<T: Real>(e: &Expr, names: &[String]) -> Result<Node<T>, String> {
    Ok(match e {
        Expr::Num(c) => Node::Num(T::of(*c)),
        Expr::Var(v) => Node::Var(*v),
        Expr::Coef(name) => Node::Coef(
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| name.clone())?,
        ),
        Expr::Neg(a) => Node::Neg(Box::new(lower(a, names)?)),
        Expr::Bin(BinOp::Pow, a, b) => match **b {
            Expr::Num(c) if c.fract() == 0.0 && c.abs() <= 64.0 => {
                Node::PowI(Box::new(lower(a, names)?), c as i32)
            }
            _ => Node::Bin(BinOp::Pow, Box::new(lower(a, names)?), Box::new(lower(b, names)?)),
        },
        Expr::Bin(op, a, b) => Node::Bin(*op, Box::new(lower(a, names)?), Box::new(lower(b, names)?)),
        Expr::Call(f, a) => Node::Call(*f, Box::new(lower(a, names)?)),
    })
}

fn err(message: String) -> EvalError {
    EvalError { message }
}

fn eval_node<T: Real>(n: &Node<T>, at: &EvalPoint<'_, T>) -> Result<T, EvalError> {
    Ok(match n {
        Node::Num(c) => *c,
        Node::Var(Var::U) => at.u,
        Node::Var(Var::V) => at.v,
        Node::Var(Var::W) => at.w,
        Node::Coef(i) => at.coefs[*i],
        Node::Neg(a) => -eval_node(a, at)?,
        Node::PowI(a, k) => {
            let x = eval_node(a, at)?;
            if x == T::zero() && *k < 0 {
                return Err(err("zero raised to a negative power".into()));
            }
            x.powi(*k)
        }
        Node::Bin(op, a, b) => {
            let (x, y) = (eval_node(a, at)?, eval_node(b, at)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == T::zero() {
                        return Err(err(format!("division by zero (numerator {x})")));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x < T::zero() {
                        return Err(err(format!("negative base {x} raised to non-integer power {y}")));
                    }
                    x.powf(y)
                }
            }
        }
        Node::Call(f, a) => {
            let x = eval_node(a, at)?;
            match f {
                Func::Abs => x.abs(),
                Func::Sqrt => {
                    if x < T::zero() {
                        return Err(err(format!("sqrt of negative value {x}")));
                    }
                    x.sqrt()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= T::zero() {
                        return Err(err(format!("log of non-positive value {x}")));
                    }
                    x.ln()
                }
                Func::Atan => x.atan(),
                Func::Sign => {
                    if x > T::zero() {
                        T::one()
                    } else if x < T::zero() {
                        -T::one()
                    } else {
                        T::zero()
                    }
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    fn eval_src(src: &str, u: f64, v: f64, w: f64, coefs: &[(&str, f64)]) -> Result<f64, EvalError> {
        let names: Vec<String> = coefs.iter().map(|(n, _)| n.to_string()).collect();
        let vals: Vec<f64> = coefs.iter().map(|&(_, c)| c).collect();
        let c = Compiled::new(&parse_expr(src).unwrap(), &names).unwrap();
        c.eval(&EvalPoint { u, v, w, coefs: &vals })
    }

    #[test]
    fn evaluates_quartic_example() {
        let r = eval_src("(u^2+v^2)^2*(1+w^2)*abs(gamma)", 1.0, 0.0, 0.0, &[("gamma", 1.0)]);
        assert_eq!(r.unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(eval_src("log(u)", 0.0, 0.0, 0.0, &[]).is_err());
        assert!(eval_src("sqrt(u)", -1.0, 0.0, 0.0, &[]).is_err());
        assert!(eval_src("1/u", 0.0, 0.0, 0.0, &[]).is_err());
        assert!(eval_src("u^0.5", -1.0, 0.0, 0.0, &[]).is_err());
        assert!(eval_src("exp(u)", 1e6, 0.0, 0.0, &[]).is_err());
        assert_eq!(eval_src("u^3", -2.0, 0.0, 0.0, &[]).unwrap(), -8.0);
    }

    #[test]
    fn unresolved_coefficient_is_reported() {
        let e = parse_expr("gamma*u").unwrap();
        assert_eq!(Compiled::<f64>::new(&e, &[]).unwrap_err(), "gamma");
    }

    #[test]
    fn sign_is_zero_at_zero() {
        assert_eq!(eval_src("sign(u)", 0.0, 0.0, 0.0, &[]).unwrap(), 0.0);
        assert_eq!(eval_src("sign(u)", -0.1, 0.0, 0.0, &[]).unwrap(), -1.0);
    }
}
