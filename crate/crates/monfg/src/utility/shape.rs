//! Randomized falsification of convexity-class membership.
//!
//! Membership is never certified: the falsifier samples triples
//! (x1, x2, lambda) and reports the first one that violates the defining
//! inequality of the requested class by more than `tol`. Absence of a
//! counterexample after the trial budget says nothing definitive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{UtilityError, UtilityExpr};
use crate::game::Monfg;

/// Interior offset for lambda when testing strict variants.
pub const STRICT_LAMBDA_DELTA: f64 = 1e-3;
/// Default sampling budget.
pub const DEFAULT_SHAPE_TRIALS: usize = 100_000;
/// Default violation tolerance.
pub const DEFAULT_SHAPE_TOL: f64 = 1e-9;

/// The convexity classes that can be probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
    Quasiconvex,
    Quasiconcave,
    StrictlyConvex,
    StrictlyConcave,
    StrictlyQuasiconvex,
    StrictlyQuasiconcave,
}

impl Shape {
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            Shape::StrictlyConvex
                | Shape::StrictlyConcave
                | Shape::StrictlyQuasiconvex
                | Shape::StrictlyQuasiconcave
        )
    }

    /// True for the classes whose defining inequality bounds f at the convex
    /// combination from above (convex and quasiconvex families).
    fn bounds_from_above(self) -> bool {
        matches!(
            self,
            Shape::Convex | Shape::Quasiconvex | Shape::StrictlyConvex | Shape::StrictlyQuasiconvex
        )
    }

    fn is_quasi(self) -> bool {
        matches!(
            self,
            Shape::Quasiconvex
                | Shape::Quasiconcave
                | Shape::StrictlyQuasiconvex
                | Shape::StrictlyQuasiconcave
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Convex => "convex",
            Shape::Concave => "concave",
            Shape::Quasiconvex => "quasiconvex",
            Shape::Quasiconcave => "quasiconcave",
            Shape::StrictlyConvex => "strictly-convex",
            Shape::StrictlyConcave => "strictly-concave",
            Shape::StrictlyQuasiconvex => "strictly-quasiconvex",
            Shape::StrictlyQuasiconcave => "strictly-quasiconcave",
        }
    }

    pub fn from_name(name: &str) -> Option<Shape> {
        match name {
            "convex" => Some(Shape::Convex),
            "concave" => Some(Shape::Concave),
            "quasiconvex" => Some(Shape::Quasiconvex),
            "quasiconcave" => Some(Shape::Quasiconcave),
            "strictly-convex" => Some(Shape::StrictlyConvex),
            "strictly-concave" => Some(Shape::StrictlyConcave),
            "strictly-quasiconvex" => Some(Shape::StrictlyQuasiconvex),
            "strictly-quasiconcave" => Some(Shape::StrictlyQuasiconcave),
            _ => None,
        }
    }
}

/// Axis-aligned sampling region, one closed interval per objective.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    intervals: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(intervals: Vec<(f64, f64)>) -> Option<Self> {
        let valid = !intervals.is_empty()
            && intervals
                .iter()
                .all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi);
        valid.then_some(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
            .collect()
    }
}

/// A sampled triple violating the defining inequality of a [`Shape`].
///
/// `lhs` is the function value at the convex combination and `rhs` the bound
/// the class definition imposes on it. For non-strict shapes
/// `violation_margin` is the amount by which the inequality fails and always
/// exceeds the tolerance used during falsification; for strict shapes the
/// inequality already fails at equality, so the margin may be as small as
/// `-tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCounterexample {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violation_margin: f64,
}

/// Checks one triple against the defining inequality of `shape`.
///
/// Returns the counterexample if the triple violates the inequality by more
/// than `tol` (for strict shapes: if the strict inequality fails by more than
/// `-tol`), else `None`. This is the single source of truth for what counts
/// as a violation; the falsifier and the re-validation in tests both use it.
pub fn check_shape_violation(
    u: &UtilityExpr,
    shape: Shape,
    x1: &[f64],
    x2: &[f64],
    lambda: f64,
    tol: f64,
) -> Result<Option<ShapeCounterexample>, UtilityError> {
    let mid: Vec<f64> = x1
        .iter()
        .zip(x2)
        .map(|(&a, &b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    let f1 = u.eval(x1)?;
    let f2 = u.eval(x2)?;
    let lhs = u.eval(&mid)?;
    let rhs = if shape.is_quasi() {
        if shape.bounds_from_above() {
            f1.max(f2)
        } else {
            f1.min(f2)
        }
    } else {
        lambda * f1 + (1.0 - lambda) * f2
    };
    let margin = if shape.bounds_from_above() {
        lhs - rhs
    } else {
        rhs - lhs
    };
    let violated = if shape.is_strict() {
        margin > -tol
    } else {
        margin > tol
    };
    Ok(violated.then(|| ShapeCounterexample {
        x1: x1.to_vec(),
        x2: x2.to_vec(),
        lambda,
        lhs,
        rhs,
        violation_margin: margin,
    }))
}

/// Samples `(x1, x2, lambda)` uniformly from `domain x domain x [0,1]` and
/// returns the first triple violating the defining inequality of `shape` by
/// more than `tol`. Deterministic for a fixed seed.
///
/// Strict variants draw lambda from the interior `(delta, 1 - delta)` and
/// skip triples with `x1 == x2`; a degenerate (single-point) box therefore
/// reports absence for them.
pub fn falsify_shape(
    u: &UtilityExpr,
    shape: Shape,
    domain: &BoxDomain,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<ShapeCounterexample>, UtilityError> {
    if u.min_dimension() > domain.dim() {
        return Err(UtilityError::VariableOutOfRange {
            var: u.min_dimension(),
            dim: domain.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = STRICT_LAMBDA_DELTA;
    for _ in 0..trials {
        let x1 = domain.sample(&mut rng);
        let x2 = domain.sample(&mut rng);
        let lambda = if shape.is_strict() {
            rng.gen_range(delta..(1.0 - delta))
        } else {
            rng.gen_range(0.0..=1.0)
        };
        if shape.is_strict() && x1 == x2 {
            continue;
        }
        if let Some(counterexample) = check_shape_violation(u, shape, &x1, &x2, lambda, tol)? {
            return Ok(Some(counterexample));
        }
    }
    Ok(None)
}

/// The componentwise bounding box of every payoff vector in `game`, with
/// each side inflated by 10% of its width (at least 0.1). All expected
/// payoff vectors reachable in the game lie inside it.
pub fn default_box(game: &Monfg) -> BoxDomain {
    let d = game.num_objectives();
    let mut intervals = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for i in 0..game.num_players() {
        for vector in game.payoff_tensor(i) {
            for (o, &v) in vector.iter().enumerate() {
                intervals[o].0 = intervals[o].0.min(v);
                intervals[o].1 = intervals[o].1.max(v);
            }
        }
    }
    let intervals = intervals
        .into_iter()
        .map(|(lo, hi)| {
            let inflation = (0.1 * (hi - lo)).max(0.1);
            (lo - inflation, hi + inflation)
        })
        .collect();
    BoxDomain::new(intervals).expect("payoffs are finite")
}

/// Both sides of Jensen's inequality for strictly quasiconvex functions:
/// `(f(sum_k w_k x_k), max_k f(x_k))`. For a strictly quasiconvex `u` the
/// caller asserts that the first is strictly below the second.
pub fn jensen_gap_strict_quasiconvex(
    u: &UtilityExpr,
    points: &[Vec<f64>],
    weights: &[f64],
) -> Result<(f64, f64), UtilityError> {
    if points.len() < 2 {
        return Err(UtilityError::TooFewPoints);
    }
    if weights.len() != points.len() {
        return Err(UtilityError::InvalidWeights(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w < 1.0)) {
        return Err(UtilityError::InvalidWeights(format!(
            "weight {w} outside (0, 1)"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(UtilityError::InvalidWeights(format!("weights sum to {sum}")));
    }
    if points.windows(2).all(|w| w[0] == w[1]) {
        return Err(UtilityError::PointsAllEqual);
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(UtilityError::PointLengthMismatch {
            got: p.len(),
            expected: dim,
        });
    }
    let mut combination = vec![0.0; dim];
    let mut rhs = f64::NEG_INFINITY;
    for (point, &w) in points.iter().zip(weights) {
        for (acc, &v) in combination.iter_mut().zip(point) {
            *acc += w * v;
        }
        rhs = rhs.max(u.eval(point)?);
    }
    let lhs = u.eval(&combination)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{linear_utility, parse_utility};

    fn capped_product() -> UtilityExpr {
        parse_utility("(+ (* 0.1 p1) (* (max 0 p1) (max 0 p2)))").unwrap()
    }

    fn sum_of_squares() -> UtilityExpr {
        parse_utility("(+ (pow p1 2) (pow p2 2))").unwrap()
    }

    #[test]
    fn capped_product_is_not_quasiconvex() {
        let u = capped_product();
        let domain = BoxDomain::new(vec![(-10.0, 1.0), (-10.0, 1.0)]).unwrap();
        let found = falsify_shape(&u, Shape::Quasiconvex, &domain, DEFAULT_SHAPE_TRIALS, 0, 1e-9)
            .unwrap()
            .expect("a counterexample exists in this box");
        // Independent re-validation of the reported triple.
        let recheck = check_shape_violation(
            &u,
            Shape::Quasiconvex,
            &found.x1,
            &found.x2,
            found.lambda,
            1e-9,
        )
        .unwrap()
        .expect("reported counterexample must re-validate");
        assert!(recheck.violation_margin > 1e-9);

        // The canonical violating triple: f(0.5, 0.5) = 0.3 above
        // max{f(1,0), f(0,1)} = 0.1.
        let explicit = check_shape_violation(
            &u,
            Shape::Quasiconvex,
            &[1.0, 0.0],
            &[0.0, 1.0],
            0.5,
            1e-9,
        )
        .unwrap()
        .expect("explicit triple violates quasiconvexity");
        assert!((explicit.lhs - 0.3).abs() < 1e-12);
        assert!((explicit.rhs - 0.1).abs() < 1e-12);
    }

    #[test]
    fn linear_utilities_pass_all_non_strict_shapes() {
        let u = linear_utility(&[0.7, -1.3]);
        let domain = BoxDomain::new(vec![(-5.0, 5.0), (-5.0, 5.0)]).unwrap();
        for shape in [
            Shape::Convex,
            Shape::Concave,
            Shape::Quasiconvex,
            Shape::Quasiconcave,
        ] {
            assert_eq!(
                falsify_shape(&u, shape, &domain, 20_000, 7, 1e-9).unwrap(),
                None,
                "linear utility flagged as not {}",
                shape.name()
            );
        }
    }

    #[test]
    fn sum_of_squares_is_convex_not_concave() {
        let u = sum_of_squares();
        let domain = BoxDomain::new(vec![(-2.0, 2.0), (-2.0, 2.0)]).unwrap();
        assert_eq!(
            falsify_shape(&u, Shape::Convex, &domain, 50_000, 3, 1e-9).unwrap(),
            None
        );
        let found = falsify_shape(&u, Shape::Concave, &domain, 50_000, 3, 1e-9)
            .unwrap()
            .expect("quadratic is not concave");
        assert!(found.violation_margin > 1e-9);
        // Hand-checked triple: lhs f(1,0) = 1 below the chord value 2.
        let explicit =
            check_shape_violation(&u, Shape::Concave, &[0.0, 0.0], &[2.0, 0.0], 0.5, 1e-9)
                .unwrap()
                .expect("midpoint of the chord violates concavity");
        assert_eq!(explicit.lhs, 1.0);
        assert_eq!(explicit.rhs, 2.0);
    }

    #[test]
    fn degenerate_box_reports_absent_for_strict_shapes() {
        let u = sum_of_squares();
        let domain = BoxDomain::new(vec![(1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(
            falsify_shape(&u, Shape::StrictlyConvex, &domain, 1000, 0, 1e-9).unwrap(),
            None
        );
    }

    #[test]
    fn falsifier_is_deterministic() {
        let u = capped_product();
        let domain = BoxDomain::new(vec![(-10.0, 1.0), (-10.0, 1.0)]).unwrap();
        let a = falsify_shape(&u, Shape::Quasiconvex, &domain, 10_000, 42, 1e-9).unwrap();
        let b = falsify_shape(&u, Shape::Quasiconvex, &domain, 10_000, 42, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_box_inflates_payoff_hull() {
        let game = crate::games::gym();
        let domain = default_box(&game);
        // Objective 1 spans [1, 5] (width 4, inflation 0.4); objective 2
        // spans [1, 4] (width 3, inflation 0.3).
        assert_eq!(domain.intervals(), &[(0.6, 5.4), (0.7, 4.3)]);
    }

    #[test]
    fn jensen_gap_on_strictly_convex_quadratic() {
        let u = sum_of_squares();
        let (lhs, rhs) = jensen_gap_strict_quasiconvex(
            &u,
            &[vec![2.0, 0.0], vec![0.0, 2.0]],
            &[0.5, 0.5],
        )
        .unwrap();
        assert_eq!(lhs, 2.0);
        assert_eq!(rhs, 4.0);
        assert!(lhs < rhs);
    }

    #[test]
    fn jensen_gap_input_validation() {
        let u = sum_of_squares();
        assert_eq!(
            jensen_gap_strict_quasiconvex(&u, &[vec![1.0, 0.0]], &[1.0]),
            Err(UtilityError::TooFewPoints)
        );
        assert_eq!(
            jensen_gap_strict_quasiconvex(
                &u,
                &[vec![1.0, 0.0], vec![1.0, 0.0]],
                &[0.5, 0.5]
            ),
            Err(UtilityError::PointsAllEqual)
        );
        assert!(matches!(
            jensen_gap_strict_quasiconvex(
                &u,
                &[vec![1.0, 0.0], vec![0.0, 1.0]],
                &[1.0, 0.0]
            ),
            Err(UtilityError::InvalidWeights(_))
        ));
        assert!(matches!(
            jensen_gap_strict_quasiconvex(
                &u,
                &[vec![1.0, 0.0], vec![0.0, 1.0]],
                &[0.6, 0.6]
            ),
            Err(UtilityError::InvalidWeights(_))
        ));
    }
}
