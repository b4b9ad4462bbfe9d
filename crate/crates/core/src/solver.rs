//! Finding and checking shadowing points.
//!
//! A point `r` ε-shadows a pseudotrajectory `{p_k}` when
//! `dist(f^k(r), p_k) ≤ ε` for every `k`. The one-dimensional solver pulls
//! the tube `[p_k − ε, p_k + ε]` back through `f⁻¹`; the planar solvers
//! either exploit coordinate structure or search a subdivided Lyapunov box.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_w_condition, CheckParams, ConditionReport};
use crate::error::{domain, usage, Result};
use crate::geometry::{closed_grid, LyapunovPair};
use crate::maps::{MapSpec, Planar, Point, Point2, ScalarMap, INVERSE_TOL, MIN_JACOBIAN_DET};
use crate::pseudo::Pseudotrajectory;

/// Pulled-back endpoints are moved inward by this much so that rounding in
/// the inverse never admits a point whose forward orbit leaves the tube.
pub const PULLBACK_SHRINK: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The starting point itself shadows.
    Start,
    /// All points of `[lo, hi]` shadow (one-dimensional pullback).
    Interval { lo: f64, hi: f64 },
    /// Coordinate intervals from which `r` was picked.
    Box { x: [f64; 2], y: [f64; 2] },
    /// A cell of the subdivided starting region.
    Cell { level: u32, row: u64, col: u64, center: Point2, half_widths: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowResult {
    pub found: bool,
    pub r: Option<Point>,
    /// `max_k dist(f^k(r), p_k)`; infinite when no candidate was produced.
    pub max_dist: f64,
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl ShadowResult {
    fn none(diagnostic: String) -> Self {
        Self { found: false, r: None, max_dist: f64::INFINITY, certificate: None, diagnostic: Some(diagnostic) }
    }

    fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }
}

/// Iterate `r` alongside the trajectory and report the largest deviation.
pub fn verify_shadowing(spec: &MapSpec, traj: &Pseudotrajectory, r: Point, eps: f64) -> Result<ShadowResult> {
    if !r.is_finite() {
        return Err(usage("candidate point must be finite"));
    }
    if r.dim() != spec.dim() || traj.dim() != spec.dim() {
        return Err(usage("point, trajectory and map dimensions differ"));
    }
    if !(eps > 0.0) {
        return Err(usage("ε must be positive"));
    }
    let mut z = r;
    let mut max_dist: f64 = 0.0;
    let mut diagnostic = None;
    for (k, p) in traj.points.iter().enumerate() {
        if !spec.is_regular(&z) {
            diagnostic = Some(format!("orbit left the regular region at step {k}"));
            max_dist = f64::INFINITY;
            break;
        }
        max_dist = max_dist.max(z.dist(p));
        if k + 1 < traj.len() {
            z = spec.apply(&z)?;
        }
    }
    Ok(ShadowResult {
        found: diagnostic.is_none() && max_dist <= eps,
        r: Some(r),
        max_dist,
        certificate: None,
        diagnostic,
    })
}

/// An increasing scalar map restricted to `[−radius, radius]`.
struct Monotone<'a> {
    f: &'a dyn Fn(f64) -> f64,
    newton: &'a dyn Fn(f64) -> Result<f64>,
    radius: f64,
}

impl Monotone<'_> {
    fn inverse(&self, q: f64) -> f64 {
        if let Ok(x) = (self.newton)(q) {
            if x.abs() <= self.radius {
                return x;
            }
        }
        // bisection on the monotone branch
        let (mut lo, mut hi) = (-self.radius, self.radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.f)(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Largest `R ≤ limit` with `df ≥ min_slope` on `[−R, R]`, sampled.
fn regular_radius(df: &dyn Fn(f64) -> f64, min_slope: f64, limit: f64) -> f64 {
    const STEPS: usize = 4096;
    let h = limit / STEPS as f64;
    for i in 0..=STEPS {
        let x = i as f64 * h;
        if !(df(x) >= min_slope && df(-x) >= min_slope) {
            return if i == 0 { 0.0 } else { (i - 1) as f64 * h };
        }
    }
    limit
}

/// Backward pullback `I_m = C_m`, `I_k = C_k ∩ f⁻¹(I_{k+1})`; `None` when empty.
fn pullback(points: &[f64], eps: f64, map: &Monotone) -> Option<(f64, f64)> {
    let r = map.radius;
    let last = *points.last()?;
    let (mut lo, mut hi) = ((last - eps).max(-r), (last + eps).min(r));
    for &p in points.iter().rev().skip(1) {
        if lo > hi {
            return None;
        }
        let a = map.inverse(lo) + PULLBACK_SHRINK;
        let b = map.inverse(hi) - PULLBACK_SHRINK;
        lo = a.max(p - eps).max(-r);
        hi = b.min(p + eps).min(r);
    }
    (lo <= hi).then_some((lo, hi))
}

fn tube_limit(points: &[f64], eps: f64) -> f64 {
    points.iter().fold(0.0f64, |m, p| m.max(p.abs())) + eps + 1.0
}

/// Constructive one-dimensional shadowing by interval pullback.
///
/// `found` requires a nonempty `I_0` and a successful verification of its midpoint.
pub fn shadow_1d_constructive(spec: &MapSpec, traj: &Pseudotrajectory, eps: f64) -> Result<ShadowResult> {
    spec.validate()?;
    if spec.dim() != 1 {
        return Err(usage("the constructive solver needs the one-dimensional family"));
    }
    if !(eps > 0.0) {
        return Err(usage("ε must be positive"));
    }
    let points = traj.scalar_points()?;
    let f = |x: f64| spec.apply1(x);
    let df = |x: f64| spec.derivative1(x);
    let newton = |q: f64| spec.inverse1(q, INVERSE_TOL);
    let radius = regular_radius(&df, MIN_JACOBIAN_DET, tube_limit(&points, eps));
    let map = Monotone { f: &f, newton: &newton, radius };
    match pullback(&points, eps, &map) {
        None => Ok(ShadowResult::none("empty pullback intersection".into())),
        Some((lo, hi)) => {
            let r = 0.5 * (lo + hi);
            Ok(verify_shadowing(spec, traj, Point::One(r), eps)?.with_certificate(Certificate::Interval { lo, hi }))
        }
    }
}

/// Per-coordinate pullback for saddles whose two coordinates evolve independently.
pub fn shadow_decoupled(spec: &MapSpec, traj: &Pseudotrajectory, eps: f64) -> Result<ShadowResult> {
    spec.validate()?;
    let (gx, gy) = spec
        .decoupled_components()
        .ok_or_else(|| usage("the decoupled solver needs a saddle with X = X(x) and Y = Y(y)"))?;
    if !(eps > 0.0) {
        return Err(usage("ε must be positive"));
    }
    let pts = traj.planar_points()?;
    let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    // each factor keeps slope ≥ √½ so the product stays regular
    let slope = libm::sqrt(MIN_JACOBIAN_DET);
    let solve = |g: &ScalarMap, coords: &[f64]| {
        let f = |x: f64| g.apply(x);
        let df = |x: f64| g.derivative(x);
        let newton = |q: f64| g.inverse(q, INVERSE_TOL);
        let radius = regular_radius(&df, slope, tube_limit(coords, eps));
        pullback(coords, eps, &Monotone { f: &f, newton: &newton, radius })
    };
    let Some(ix) = solve(&gx, &xs) else {
        return Ok(ShadowResult::none("empty pullback in x".into()));
    };
    let Some(iy) = solve(&gy, &ys) else {
        return Ok(ShadowResult::none("empty pullback in y".into()));
    };
    let r = Point2::new(0.5 * (ix.0 + ix.1), 0.5 * (iy.0 + iy.1));
    Ok(verify_shadowing(spec, traj, Point::Two(r), eps)?
        .with_certificate(Certificate::Box { x: [ix.0, ix.1], y: [iy.0, iy.1] }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    /// Subdivision levels below the starting box; 0 tries only `p₀`.
    pub depth: u32,
    pub cells_per_axis: u64,
    /// Surviving cells refined at the next level.
    pub keep: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { depth: 6, cells_per_axis: 32, keep: 8 }
    }
}

/// `max_k max(V, W)(f^k(c), p_k)/δ₀ − 1`, or `∞` once it exceeds `cutoff`.
fn tube_score(spec: &MapSpec, pts: &[Point2], pair: LyapunovPair, delta0: f64, c: Point2, cutoff: f64) -> f64 {
    let mut z = c;
    let mut s = f64::NEG_INFINITY;
    for (k, &p) in pts.iter().enumerate() {
        if !z.is_finite() {
            return f64::INFINITY;
        }
        let (v, w) = pair.vw_unchecked(z, p);
        s = s.max(v.max(w) / delta0 - 1.0);
        if !(s <= cutoff) {
            return f64::INFINITY;
        }
        if k + 1 < pts.len() {
            z = spec.apply2(z);
        }
    }
    s
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    score: f64,
    row: u64,
    col: u64,
}

/// Subdivision search over `P(δ₀, p₀)` with `δ₀ = Δ₀(ε)`.
///
/// Level `L` splits the box into `n^L × n^L` cells. A cell survives when its
/// center's orbit stays in every `P(δ₀, p_k)` up to one cell diagonal; the
/// best `keep` survivors (lowest score, then lowest `(row, col)`) are refined
/// and the best one at each level is verified at `ε`.
pub fn shadow_2d_search(
    spec: &MapSpec,
    traj: &Pseudotrajectory,
    eps: f64,
    pair: LyapunovPair,
    opts: &SearchOptions,
) -> Result<ShadowResult> {
    spec.validate()?;
    if spec.dim() != 2 {
        return Err(usage("the box search needs a planar map"));
    }
    if !(eps > 0.0) {
        return Err(usage("ε must be positive"));
    }
    if opts.cells_per_axis < 2 || opts.keep == 0 {
        return Err(usage("need at least 2 cells per axis and keep >= 1"));
    }
    let pts = traj.planar_points()?;
    let p0 = pts[0];
    let start = verify_shadowing(spec, traj, Point::Two(p0), eps)?;
    if start.found {
        return Ok(start.with_certificate(Certificate::Start));
    }
    if !pair.in_domain(p0) {
        return Ok(ShadowResult::none("p₀ is outside the pair's domain".into()));
    }
    let delta0 = pair.delta0_for_epsilon(eps);
    let (hx, hy) = (delta0 * pair.x_scale(p0.x), delta0);
    let n = opts.cells_per_axis;
    let mut best = start;
    let mut parents: Vec<(u64, u64)> = alloc::vec![(0, 0)];
    let mut per_axis: u64 = 1;
    for level in 1..=opts.depth {
        per_axis = match per_axis.checked_mul(n) {
            Some(v) if v < (1u64 << 52) => v,
            _ => break,
        };
        let cutoff = 2.0 * core::f64::consts::SQRT_2 / per_axis as f64;
        let center = |row: u64, col: u64| {
            let u = -1.0 + (2 * col + 1) as f64 / per_axis as f64;
            let v = -1.0 + (2 * row + 1) as f64 / per_axis as f64;
            Point2::new(p0.x + u * hx, p0.y + v * hy)
        };
        let mut survivors = Vec::new();
        for &(pr, pc) in &parents {
            for i in 0..n {
                for j in 0..n {
                    let (row, col) = (pr * n + i, pc * n + j);
                    let score = tube_score(spec, &pts, pair, delta0, center(row, col), cutoff);
                    if score.is_finite() {
                        survivors.push(Cell { score, row, col });
                    }
                }
            }
        }
        if survivors.is_empty() {
            best.diagnostic = Some(format!("no surviving cell at level {level}"));
            return Ok(best);
        }
        survivors.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.row.cmp(&b.row)).then(a.col.cmp(&b.col)));
        survivors.truncate(opts.keep);
        let top = survivors[0];
        let c = center(top.row, top.col);
        let attempt = verify_shadowing(spec, traj, Point::Two(c), eps)?.with_certificate(Certificate::Cell {
            level,
            row: top.row,
            col: top.col,
            center: c,
            half_widths: [hx / per_axis as f64, hy / per_axis as f64],
        });
        if attempt.found {
            return Ok(attempt);
        }
        if attempt.max_dist < best.max_dist {
            best = attempt;
        }
        parents = survivors.iter().map(|c| (c.row, c.col)).collect();
    }
    best.found = false;
    if best.diagnostic.is_none() {
        best.diagnostic = Some(format!("no verified cell within depth {}", opts.depth));
    }
    Ok(best)
}

/// Solver matched to the map: pullback for the one-dimensional family and
/// for decoupled saddles, the skew solver for the skew map, box search otherwise.
pub fn shadow_auto(
    spec: &MapSpec,
    traj: &Pseudotrajectory,
    eps: f64,
    pair: LyapunovPair,
    opts: &SearchOptions,
) -> Result<ShadowResult> {
    match spec {
        MapSpec::Expanding1D { .. } => shadow_1d_constructive(spec, traj, eps),
        MapSpec::NonisolatedSkew => shadow_weighted(spec, traj, eps, DEFAULT_N),
        s if s.decoupled_components().is_some() => shadow_decoupled(spec, traj, eps),
        _ => shadow_2d_search(spec, traj, eps, pair, opts),
    }
}

/// Ratio `N = Δ/δ` used by the skew solver.
pub const DEFAULT_N: f64 = 4.0;

fn require_skew_domain(spec: &MapSpec, pts: &[Point2]) -> Result<()> {
    if !matches!(spec, MapSpec::NonisolatedSkew) {
        return Err(usage("the weighted solver needs the skew map"));
    }
    if let Some((k, p)) = pts.iter().enumerate().find(|(_, p)| !(p.x != 0.0 && p.x.abs() < 1.0)) {
        return Err(domain(format!("trajectory point {k} has x = {}, outside 0 < |x| < 1", p.x)));
    }
    Ok(())
}

/// Shadowing for the skew map `(x/2, y(1+x²))`.
///
/// The `x`-coordinate of `r` is pinned by intersecting `2^k·[p_kx ± h_k]`;
/// for a chosen `x₀` the `y`-coordinate solves `y₀·Π_k ∈ [p_ky ± δ]` with
/// `Π_k = ∏_{j<k}(1 + x_j²)`. Tubes are first the weighted boxes
/// `P(δ, p_k)` with `δ = ε/(2N)`, then plain ε-boxes. Every candidate is
/// verified at `ε`.
pub fn shadow_weighted(spec: &MapSpec, traj: &Pseudotrajectory, eps: f64, n_ratio: f64) -> Result<ShadowResult> {
    if !(eps > 0.0) || !(n_ratio >= 1.0) {
        return Err(usage("need ε > 0 and N >= 1"));
    }
    let pts = traj.planar_points()?;
    require_skew_domain(spec, &pts)?;
    let start = verify_shadowing(spec, traj, Point::Two(pts[0]), eps)?;
    if start.found {
        return Ok(start.with_certificate(Certificate::Start));
    }
    let mut best = start;
    let delta = eps / (2.0 * n_ratio);
    let pair = LyapunovPair::WeightedPair;
    let tubes: [&dyn Fn(Point2) -> (f64, f64); 2] = [&|p| (delta * pair.x_scale(p.x), delta), &|_| (eps, eps)];
    for tube in tubes {
        let (mut xlo, mut xhi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (k, &p) in pts.iter().enumerate() {
            let s = libm::ldexp(1.0, k as i32);
            if !s.is_finite() {
                break;
            }
            let (hx, _) = tube(p);
            xlo = xlo.max(s * (p.x - hx));
            xhi = xhi.min(s * (p.x + hx));
        }
        if !(xlo <= xhi) {
            continue;
        }
        let mid = 0.5 * (xlo + xhi);
        for x0 in core::iter::once(mid).chain(closed_grid(xlo, xhi, 17)) {
            let (mut ylo, mut yhi) = (f64::NEG_INFINITY, f64::INFINITY);
            let (mut x, mut prod) = (x0, 1.0);
            for &p in &pts {
                let (_, hy) = tube(p);
                ylo = ylo.max((p.y - hy) / prod);
                yhi = yhi.min((p.y + hy) / prod);
                prod *= 1.0 + x * x;
                x *= 0.5;
            }
            if !(ylo <= yhi) {
                continue;
            }
            let r = Point2::new(x0, 0.5 * (ylo + yhi));
            let attempt = verify_shadowing(spec, traj, Point::Two(r), eps)?
                .with_certificate(Certificate::Box { x: [xlo, xhi], y: [ylo, yhi] });
            if attempt.found {
                return Ok(attempt);
            }
            if attempt.max_dist < best.max_dist {
                best = attempt;
            }
        }
    }
    best.found = false;
    best.diagnostic = Some("no candidate in the weighted or ε tubes verified".into());
    Ok(best)
}

/// Check `f(P(δ,p_k)) ⊂ Int⁰P(Nδ, p_{k+1})` and the inverse inclusion along
/// the trajectory, `δ = ε/(2N)`, weighted pair.
pub fn validate_weighted_n(
    spec: &MapSpec,
    traj: &Pseudotrajectory,
    eps: f64,
    n_ratio: f64,
    boundary_samples: usize,
) -> Result<ConditionReport> {
    let pts = traj.planar_points()?;
    require_skew_domain(spec, &pts)?;
    let delta = eps / (2.0 * n_ratio);
    let params = CheckParams { boundary_samples, ..CheckParams::with_levels(delta, n_ratio * delta) };
    let mut merged: Option<ConditionReport> = None;
    for w in pts.windows(2) {
        let r = check_w_condition(&Planar(spec), LyapunovPair::WeightedPair, w[0], w[1], &params)?;
        for name in ["c5_forward", "c5_inverse"] {
            let part = r.part(name).expect("battery has both inclusions").clone();
            merged = Some(match merged {
                None => part,
                Some(m) => m.merge(part),
            });
        }
    }
    let mut report = merged.ok_or_else(|| usage("trajectory needs at least two points"))?;
    report.condition = "weighted_n".into();
    report.params.insert("N".into(), n_ratio);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Neighborhood;
    use crate::pseudo::{generate, generate_adversarial, ErrorModel, Push};

    fn scalar_traj(xs: &[f64]) -> Pseudotrajectory {
        Pseudotrajectory::from_points(xs.iter().map(|&x| Point::One(x)).collect(), ErrorModel::Exact).unwrap()
    }

    #[test]
    fn exact_orbit_verifies_and_shifted_does_not() {
        let spec = MapSpec::saddle(1, 1);
        let k = Neighborhood::new(0.5);
        let t = generate(&spec, Point::Two(Point2::new(0.2, 0.1)), 30, ErrorModel::Exact, &k, 0).unwrap();
        let r = verify_shadowing(&spec, &t, t.points[0], 1e-9).unwrap();
        assert!(r.found && r.max_dist == 0.0);
        let eps = 0.01;
        let shifted = Pseudotrajectory {
            points: t
                .points
                .iter()
                .map(|p| match *p {
                    Point::Two(q) => Point::Two(Point2::new(q.x, q.y + 2.0 * eps)),
                    p => p,
                })
                .collect(),
            ..t.clone()
        };
        let r = verify_shadowing(&spec, &shifted, t.points[0], eps).unwrap();
        assert!(!r.found && (r.max_dist - 2.0 * eps).abs() < 1e-12);
    }

    #[test]
    fn example_fixture_verifies() {
        let spec = MapSpec::cubic();
        let t =
            generate(&spec, Point::One(0.1), 50, ErrorModel::Uniform { d: 2e-4 }, &Neighborhood::new(0.5), 1).unwrap();
        let res = shadow_1d_constructive(&spec, &t, 0.1).unwrap();
        assert!(res.found);
        assert!(verify_shadowing(&spec, &t, res.r.unwrap(), 0.1).unwrap().found);
    }

    #[test]
    fn handmade_three_points_match_a_scan() {
        let spec = MapSpec::cubic();
        let t = scalar_traj(&[0.0, 0.2, 0.1]);
        let res = shadow_1d_constructive(&spec, &t, 0.05).unwrap();
        let scan = (0..=1_000_000)
            .map(|i| -0.05 + 0.1 * i as f64 / 1e6)
            .any(|r| verify_shadowing(&spec, &t, Point::One(r), 0.05).unwrap().found);
        assert_eq!(res.found, scan);
        assert!(!res.found);
        let t = scalar_traj(&[0.0, 0.04, 0.08]);
        let res = shadow_1d_constructive(&spec, &t, 0.05).unwrap();
        assert!(res.found);
    }

    #[test]
    fn exact_orbit_gives_start_cell() {
        let spec = MapSpec::saddle(1, 1);
        let t = generate(&spec, Point::Two(Point2::new(0.05, 0.02)), 50, ErrorModel::Exact, &Neighborhood::new(0.1), 0)
            .unwrap();
        let r = shadow_2d_search(&spec, &t, 0.05, LyapunovPair::BoxPair, &SearchOptions::default()).unwrap();
        assert!(r.found);
        assert_eq!(r.r, Some(t.points[0]));
        assert_eq!(r.certificate, Some(Certificate::Start));
    }

    #[test]
    fn search_recovers_a_displaced_start() {
        // the pseudotrajectory is an exact orbit except for the first point
        let spec = MapSpec::saddle(1, 1);
        let k = Neighborhood::new(0.3);
        let t = generate(&spec, Point::Two(Point2::new(0.1, 0.1)), 40, ErrorModel::Exact, &k, 0).unwrap();
        let mut moved = t.clone();
        moved.points[0] = Point::Two(Point2::new(0.1 + 0.004, 0.1 - 0.004));
        let eps = 0.005;
        let direct = verify_shadowing(&spec, &moved, moved.points[0], eps).unwrap();
        assert!(!direct.found);
        let r = shadow_2d_search(&spec, &moved, eps, LyapunovPair::BoxPair, &SearchOptions::default()).unwrap();
        assert!(r.found, "{r:?}");
        assert!(matches!(r.certificate, Some(Certificate::Cell { .. })));
    }

    #[test]
    fn skew_push_is_not_found() {
        let spec = MapSpec::NonisolatedSkew;
        let t = generate_adversarial(
            &spec,
            Point::Two(Point2::new(0.1, 0.0)),
            50,
            ErrorModel::Uniform { d: 0.01 },
            &Neighborhood::excluding_axis(1.0),
            Push::PushYUp,
        )
        .unwrap();
        let opts = SearchOptions { depth: 3, ..SearchOptions::default() };
        let r = shadow_2d_search(&spec, &t, 0.1, LyapunovPair::BoxPair, &opts).unwrap();
        assert!(!r.found);
    }

    #[test]
    fn weighted_solver_examples() {
        let spec = MapSpec::NonisolatedSkew;
        let k = Neighborhood::excluding_axis(0.9);
        let p0 = Point::Two(Point2::new(0.1, 0.0));
        let exact = generate(&spec, p0, 100, ErrorModel::Exact, &k, 0).unwrap();
        let r = shadow_weighted(&spec, &exact, 0.1, 4.0).unwrap();
        assert!(r.found && r.r == Some(p0));

        let eps = 0.1;
        let t = generate(&spec, p0, 100, ErrorModel::Weighted { d: 0.05 * eps }, &k, 9).unwrap();
        let r = shadow_weighted(&spec, &t, eps, 4.0).unwrap();
        assert!(r.found && r.max_dist <= eps);
        let n = validate_weighted_n(&spec, &t, eps, 4.0, 32).unwrap();
        assert!(n.passed, "{n:?}");

        let pushed =
            generate_adversarial(&spec, p0, 100, ErrorModel::Uniform { d: 0.05 * eps }, &k, Push::PushYUp).unwrap();
        assert!(!shadow_weighted(&spec, &pushed, eps, 4.0).unwrap().found);
    }

    #[test]
    fn weighted_solver_rejects_axis_points() {
        let t = Pseudotrajectory::from_points(
            alloc::vec![Point::Two(Point2::new(0.0, 0.1)), Point::Two(Point2::new(0.0, 0.1))],
            ErrorModel::Exact,
        )
        .unwrap();
        assert!(matches!(shadow_weighted(&MapSpec::NonisolatedSkew, &t, 0.1, 4.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn decoupled_agrees_with_search_on_small_cases() {
        let spec = MapSpec::saddle(1, 1);
        let k = Neighborhood::new(0.2);
        for seed in 0..20 {
            let d = if seed % 2 == 0 { 1e-4 } else { 3e-3 };
            let t =
                generate(&spec, Point::Two(Point2::new(0.05, 0.01)), 30, ErrorModel::Uniform { d }, &k, seed).unwrap();
            let a = shadow_decoupled(&spec, &t, 0.02).unwrap();
            let b = shadow_2d_search(&spec, &t, 0.02, LyapunovPair::BoxPair, &SearchOptions::default()).unwrap();
            if b.found {
                assert!(a.found, "seed {seed}");
            }
            if a.found {
                assert!(verify_shadowing(&spec, &t, a.r.unwrap(), 0.02).unwrap().found);
            }
        }
    }
}
