//! Utility functions u: R^d -> R as expression trees, their s-expression
//! syntax, and empirical falsification of convexity-class membership.

mod parse;
mod shape;

pub use parse::parse_utility;
pub use shape::{
    check_shape_violation, default_box, falsify_shape, jensen_gap_strict_quasiconvex, BoxDomain,
    Shape, ShapeCounterexample, DEFAULT_SHAPE_TOL, DEFAULT_SHAPE_TRIALS, STRICT_LAMBDA_DELTA,
};

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum UtilityError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("utility references objective p{var} but the input has {dim} objectives")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error("non-finite input to utility evaluation")]
    NonFiniteInput,
    #[error("weights must lie strictly in (0, 1) and sum to 1: {0}")]
    InvalidWeights(String),
    #[error("at least two points are required")]
    TooFewPoints,
    #[error("points must not all be equal")]
    PointsAllEqual,
    #[error("point has length {got}, expected {expected}")]
    PointLengthMismatch { got: usize, expected: usize },
}

/// An expression tree over the objective components of a payoff vector.
///
/// Objective variables are one-based in the surface syntax (`p1` is the
/// first objective) and stored zero-based here.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilityExpr {
    Const(f64),
    /// Zero-based objective index.
    Var(usize),
    Neg(Box<UtilityExpr>),
    Add(Vec<UtilityExpr>),
    Sub(Box<UtilityExpr>, Box<UtilityExpr>),
    Mul(Vec<UtilityExpr>),
    /// Integer power with non-negative exponent.
    Pow(Box<UtilityExpr>, u32),
    Max(Vec<UtilityExpr>),
    Min(Vec<UtilityExpr>),
}

impl UtilityExpr {
    /// Recursive evaluation at a payoff vector `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, UtilityError> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(UtilityError::NonFiniteInput);
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<f64, UtilityError> {
        match self {
            UtilityExpr::Const(c) => Ok(*c),
            UtilityExpr::Var(o) => x.get(*o).copied().ok_or(UtilityError::VariableOutOfRange {
                var: *o + 1,
                dim: x.len(),
            }),
            UtilityExpr::Neg(e) => Ok(-e.eval_unchecked(x)?),
            UtilityExpr::Add(es) => {
                let mut sum = 0.0;
                for e in es {
                    sum += e.eval_unchecked(x)?;
                }
                Ok(sum)
            }
            UtilityExpr::Sub(a, b) => Ok(a.eval_unchecked(x)? - b.eval_unchecked(x)?),
            UtilityExpr::Mul(es) => {
                let mut product = 1.0;
                for e in es {
                    product *= e.eval_unchecked(x)?;
                }
                Ok(product)
            }
            UtilityExpr::Pow(base, exp) => Ok(base.eval_unchecked(x)?.powi(*exp as i32)),
            UtilityExpr::Max(es) => {
                let mut best = f64::NEG_INFINITY;
                for e in es {
                    best = best.max(e.eval_unchecked(x)?);
                }
                Ok(best)
            }
            UtilityExpr::Min(es) => {
                let mut best = f64::INFINITY;
                for e in es {
                    best = best.min(e.eval_unchecked(x)?);
                }
                Ok(best)
            }
        }
    }

    /// Highest referenced objective index plus one, i.e. the minimum input
    /// dimension this expression accepts. Zero for constant expressions.
    pub fn min_dimension(&self) -> usize {
        match self {
            UtilityExpr::Const(_) => 0,
            UtilityExpr::Var(o) => o + 1,
            UtilityExpr::Neg(e) => e.min_dimension(),
            UtilityExpr::Pow(e, _) => e.min_dimension(),
            UtilityExpr::Sub(a, b) => a.min_dimension().max(b.min_dimension()),
            UtilityExpr::Add(es) | UtilityExpr::Mul(es) | UtilityExpr::Max(es)
            | UtilityExpr::Min(es) => es.iter().map(|e| e.min_dimension()).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for UtilityExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_list(
            f: &mut fmt::Formatter<'_>,
            op: &str,
            es: &[UtilityExpr],
        ) -> fmt::Result {
            write!(f, "({op}")?;
            for e in es {
                write!(f, " {e}")?;
            }
            write!(f, ")")
        }
        match self {
            UtilityExpr::Const(c) => write!(f, "{c}"),
            UtilityExpr::Var(o) => write!(f, "p{}", o + 1),
            UtilityExpr::Neg(e) => write!(f, "(neg {e})"),
            UtilityExpr::Add(es) => write_list(f, "+", es),
            UtilityExpr::Sub(a, b) => write!(f, "(- {a} {b})"),
            UtilityExpr::Mul(es) => write_list(f, "*", es),
            UtilityExpr::Pow(base, exp) => write!(f, "(pow {base} {exp})"),
            UtilityExpr::Max(es) => write_list(f, "max", es),
            UtilityExpr::Min(es) => write_list(f, "min", es),
        }
    }
}

/// The weighted-sum utility over objectives.
pub fn linear_utility(weights: &[f64]) -> UtilityExpr {
    UtilityExpr::Add(
        weights
            .iter()
            .enumerate()
            .map(|(o, &w)| {
                UtilityExpr::Mul(vec![UtilityExpr::Const(w), UtilityExpr::Var(o)])
            })
            .collect(),
    )
}
