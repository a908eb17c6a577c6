//! Arithmetic and boolean expression trees.

use crate::rat::{format_rat, Rat};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArithExpr {
    Const(Rat),
    Var(String),
    /// Aggregated attribute over the installed concrete features of a
    /// subtree, e.g. `price(Machine)`.
    AttrSum {
        attr: String,
        feature: String,
    },
    Bin {
        op: ArithOp,
        left: Box<ArithExpr>,
        right: Box<ArithExpr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoolExpr {
    Cmp {
        left: ArithExpr,
        op: CmpOp,
        right: ArithExpr,
    },
    Has(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    /// Named predicate with a single argument, e.g. `allowed(RobBank)`.
    /// Accepted by the grammar for compatibility with security-domain
    /// listings; evaluation reports it as unsupported.
    Pred {
        name: String,
        arg: String,
    },
}

fn arith_prec(e: &ArithExpr) -> u8 {
    match e {
        ArithExpr::Bin {
            op: ArithOp::Add | ArithOp::Sub,
            ..
        } => 1,
        ArithExpr::Bin {
            op: ArithOp::Mul | ArithOp::Div,
            ..
        } => 2,
        _ => 3,
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithExpr::Const(r) => write!(f, "{}", format_rat(r)),
            ArithExpr::Var(v) => write!(f, "{v}"),
            ArithExpr::AttrSum { attr, feature } => write!(f, "{attr}({feature})"),
            ArithExpr::Bin { op, left, right } => {
                let my = arith_prec(self);
                let lp = arith_prec(left);
                let rp = arith_prec(right);
                if lp < my {
                    write!(f, "({left})")?;
                } else {
                    write!(f, "{left}")?;
                }
                write!(f, " {} ", op.symbol())?;
                // Right side needs parens at equal precedence too: -, / are
                // left-associative.
                if rp <= my {
                    write!(f, "({right})")
                } else {
                    write!(f, "{right}")
                }
            }
        }
    }
}

fn bool_prec(e: &BoolExpr) -> u8 {
    match e {
        BoolExpr::Or(..) => 1,
        BoolExpr::And(..) => 2,
        _ => 3,
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Cmp { left, op, right } => write!(f, "{left} {} {right}", op.symbol()),
            BoolExpr::Has(name) => write!(f, "has({name})"),
            BoolExpr::Not(inner) => {
                if bool_prec(inner) < 3 || matches!(**inner, BoolExpr::Cmp { .. }) {
                    write!(f, "!({inner})")
                } else {
                    write!(f, "!{inner}")
                }
            }
            BoolExpr::And(l, r) => {
                let parts: [&BoolExpr; 2] = [l, r];
                let mut first = true;
                for p in parts {
                    if !first {
                        write!(f, " and ")?;
                    }
                    first = false;
                    if bool_prec(p) < 2 {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            BoolExpr::Or(l, r) => write!(f, "{l} or {r}"),
            BoolExpr::Pred { name, arg } => write!(f, "{name}({arg})"),
        }
    }
}
