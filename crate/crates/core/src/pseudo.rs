//! Finite pseudotrajectories under a uniform (`|f(p_k) − p_{k+1}| ≤ d`) or
//! weighted (`≤ d·(p_k)_x²`) error budget.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};
use crate::maps::{MapSpec, Neighborhood, Point, Point2};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    Exact,
    Uniform { d: f64 },
    Weighted { d: f64 },
}

impl ErrorModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ErrorModel::Exact => Ok(()),
            ErrorModel::Uniform { d } | ErrorModel::Weighted { d } => {
                if d >= 0.0 && d.is_finite() {
                    Ok(())
                } else {
                    Err(usage("error level d must be finite and nonnegative"))
                }
            }
        }
    }

    /// Admissible one-step error at `p`.
    pub fn bound(&self, p: &Point) -> Result<f64> {
        match (*self, *p) {
            (ErrorModel::Exact, _) => Ok(0.0),
            (ErrorModel::Uniform { d }, _) => Ok(d),
            (ErrorModel::Weighted { .. }, Point::One(_)) => {
                Err(usage("the weighted error model applies to planar points only"))
            }
            (ErrorModel::Weighted { d }, Point::Two(q)) => {
                if q.x == 0.0 {
                    Err(domain("weighted error model needs (p_k)_x != 0"))
                } else {
                    Ok(d * q.x * q.x)
                }
            }
        }
    }

    fn bound_lenient(&self, p: &Point) -> f64 {
        match (*self, *p) {
            (ErrorModel::Exact, _) => 0.0,
            (ErrorModel::Uniform { d }, _) => d,
            (ErrorModel::Weighted { d }, p) => d * p.x() * p.x(),
        }
    }

    pub fn level(&self) -> f64 {
        match *self {
            ErrorModel::Exact => 0.0,
            ErrorModel::Uniform { d } | ErrorModel::Weighted { d } => d,
        }
    }
}

/// Full-magnitude error directions for worst-case probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Push {
    PushYUp,
    PushYDown,
    /// Away from `x = 0` (positive at `x = 0`).
    PushXOut,
    /// Fixed direction; each component is scaled by the step bound.
    Constant {
        x: f64,
        y: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pseudotrajectory {
    pub points: Vec<Point>,
    pub model: ErrorModel,
    pub seed: Option<u64>,
    /// Generation stopped early because the next point would have left `K`.
    #[serde(default)]
    pub truncated: bool,
}

impl Pseudotrajectory {
    /// Wrap a handmade point list.
    pub fn from_points(points: Vec<Point>, model: ErrorModel) -> Result<Self> {
        let first = points.first().ok_or_else(|| usage("empty trajectory"))?;
        if points.iter().any(|p| p.dim() != first.dim() || !p.is_finite()) {
            return Err(usage("trajectory points must be finite and of one dimension"));
        }
        Ok(Self { points, model, seed: None, truncated: false })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Point::dim)
    }

    pub fn planar_points(&self) -> Result<Vec<Point2>> {
        self.points
            .iter()
            .map(|p| match *p {
                Point::Two(q) => Ok(q),
                Point::One(_) => Err(usage("expected a planar trajectory")),
            })
            .collect()
    }

    pub fn scalar_points(&self) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|p| match *p {
                Point::One(x) => Ok(x),
                Point::Two(_) => Err(usage("expected a one-dimensional trajectory")),
            })
            .collect()
    }
}

fn check_inputs(spec: &MapSpec, p0: &Point, m: usize, model: &ErrorModel, k: &Neighborhood) -> Result<()> {
    spec.validate()?;
    model.validate()?;
    k.validate()?;
    if m == 0 {
        return Err(usage("trajectory length m must be at least 1"));
    }
    if p0.dim() != spec.dim() || !p0.is_finite() {
        return Err(usage("starting point does not match the map dimension"));
    }
    if !k.contains(p0) {
        return Err(usage(format!("starting point {p0:?} is outside K")));
    }
    Ok(())
}

fn build(
    spec: &MapSpec,
    p0: Point,
    m: usize,
    model: ErrorModel,
    k: &Neighborhood,
    mut error: impl FnMut(&Point, f64) -> Point,
) -> Result<(Vec<Point>, bool)> {
    let mut points = Vec::with_capacity(m + 1);
    points.push(p0);
    let mut p = p0;
    for _ in 0..m {
        let bound = model.bound(&p)?;
        let e = error(&p, bound);
        let next = match (spec.apply(&p)?, e) {
            (Point::One(a), Point::One(b)) => Point::One(a + b),
            (Point::Two(a), Point::Two(b)) => Point::Two(Point2::new(a.x + b.x, a.y + b.y)),
            _ => unreachable!("error vector dimension is chosen from p"),
        };
        if !k.contains(&next) {
            return Ok((points, true));
        }
        points.push(next);
        p = next;
    }
    Ok((points, false))
}

/// Random `d`-pseudotrajectory: each error is drawn uniformly from the
/// max-norm box of radius `bound(p_k)`. Stops early, flagged, if the next
/// point would leave `K`.
pub fn generate(
    spec: &MapSpec,
    p0: Point,
    m: usize,
    model: ErrorModel,
    k: &Neighborhood,
    seed: u64,
) -> Result<Pseudotrajectory> {
    check_inputs(spec, &p0, m, &model, k)?;
    let mut rng = Stream::new(seed);
    let (points, truncated) = build(spec, p0, m, model, k, |p, b| match p {
        Point::One(_) => Point::One(b * rng.symmetric()),
        Point::Two(_) => {
            let ex = b * rng.symmetric();
            let ey = b * rng.symmetric();
            Point::Two(Point2::new(ex, ey))
        }
    })?;
    Ok(Pseudotrajectory { points, model, seed: Some(seed), truncated })
}

/// Pseudotrajectory whose every error is the full admissible push in a fixed direction.
pub fn generate_adversarial(
    spec: &MapSpec,
    p0: Point,
    m: usize,
    model: ErrorModel,
    k: &Neighborhood,
    push: Push,
) -> Result<Pseudotrajectory> {
    check_inputs(spec, &p0, m, &model, k)?;
    if spec.dim() == 1 && matches!(push, Push::PushYUp | Push::PushYDown) {
        return Err(usage("y-pushes need a planar map"));
    }
    let (points, truncated) = build(spec, p0, m, model, k, |p, b| {
        let out = if p.x() >= 0.0 { 1.0 } else { -1.0 };
        let (ux, uy) = match push {
            Push::PushYUp => (0.0, 1.0),
            Push::PushYDown => (0.0, -1.0),
            Push::PushXOut => (out, 0.0),
            Push::Constant { x, y } => (x, y),
        };
        match p {
            Point::One(_) => Point::One(b * ux),
            Point::Two(_) => Point::Two(Point2::new(b * ux, b * uy)),
        }
    })?;
    Ok(Pseudotrajectory { points, model, seed: None, truncated })
}

/// Largest one-step excess over the model's bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorCheck {
    /// `max_k (|f(p_k) − p_{k+1}| − bound(p_k))`; `≤ 0` means valid.
    pub max_violation: f64,
    /// `k` of the worst step `p_k → p_{k+1}`.
    pub worst_index: usize,
}

impl ErrorCheck {
    pub fn is_valid(&self) -> bool {
        self.max_violation <= 0.0
    }
}

pub fn validate_errors(spec: &MapSpec, traj: &Pseudotrajectory) -> Result<ErrorCheck> {
    let mut check = ErrorCheck { max_violation: f64::NEG_INFINITY, worst_index: 0 };
    for (k, pair) in traj.points.windows(2).enumerate() {
        let image = spec.apply(&pair[0])?;
        let violation = image.dist(&pair[1]) - traj.model.bound_lenient(&pair[0]);
        if violation > check.max_violation {
            check = ErrorCheck { max_violation: violation, worst_index: k };
        }
    }
    Ok(check)
}
