//! Empirical `d(ε)` thresholds and exponent fits.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::geometry::LyapunovPair;
use crate::maps::{MapSpec, Neighborhood, Point, Point2};
use crate::pseudo::{generate, generate_adversarial, ErrorModel, Pseudotrajectory, Push};
use crate::rng::{mix64, Stream};
use crate::solver::{shadow_2d_search, shadow_auto, SearchOptions, ShadowResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Uniform,
    Weighted,
}

impl ModelKind {
    pub fn at(self, d: f64) -> ErrorModel {
        match self {
            ModelKind::Uniform => ErrorModel::Uniform { d },
            ModelKind::Weighted => ErrorModel::Weighted { d },
        }
    }
}

/// How trial pseudotrajectories are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialFamily {
    /// Uniform noise from a start drawn uniformly in `K`.
    UniformNoise,
    /// Start just below `−ε` in the expanding coordinate and push every step
    /// at full strength toward `+ε`; crossing the fixed point is what a true
    /// orbit cannot follow.
    CrossingPush,
    /// Even trials noise, odd trials crossing.
    #[default]
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub spec: MapSpec,
    #[serde(default = "default_pair")]
    pub pair: LyapunovPair,
    pub eps_list: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_d: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: Neighborhood,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub family: TrialFamily,
    #[serde(default = "default_steps")]
    pub bisection_steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Subdivision depth for the box search on coupled planar maps.
    #[serde(default = "default_depth")]
    pub depth: u32,
}

fn default_pair() -> LyapunovPair {
    LyapunovPair::BoxPair
}
fn default_trials() -> usize {
    50
}
fn default_m() -> usize {
    100
}
fn default_model() -> ModelKind {
    ModelKind::Uniform
}
fn default_steps() -> usize {
    20
}
fn default_depth() -> u32 {
    6
}

pub const DEFAULT_EPS_LIST: [f64; 4] = [0.025, 0.05, 0.1, 0.2];

impl ScalingConfig {
    pub fn new(spec: MapSpec, k: Neighborhood) -> Self {
        Self {
            spec,
            pair: default_pair(),
            eps_list: DEFAULT_EPS_LIST.to_vec(),
            trials_per_d: default_trials(),
            m: default_m(),
            k,
            model: default_model(),
            family: TrialFamily::default(),
            bisection_steps: default_steps(),
            seed: 0,
            depth: default_depth(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.k.validate()?;
        if self.eps_list.is_empty() {
            return Err(usage("eps_list is empty"));
        }
        if self.eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(usage("every ε must be positive"));
        }
        if self.eps_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("eps_list must be strictly ascending"));
        }
        if self.trials_per_d < 10 {
            return Err(usage("trials_per_d must be at least 10"));
        }
        if self.m == 0 || self.bisection_steps == 0 {
            return Err(usage("m and bisection_steps must be positive"));
        }
        if self.model == ModelKind::Weighted && self.spec.dim() != 2 {
            return Err(usage("the weighted model needs a planar map"));
        }
        Ok(())
    }

    fn trial_seed(&self, eps: f64, trial: usize) -> u64 {
        mix64(self.seed ^ mix64(eps.to_bits())).wrapping_add(trial as u64)
    }

    /// The `trial`-th pseudotrajectory at level `d`. The random draws depend
    /// on `(seed, ε, trial)` only, so changing `d` rescales the same errors.
    pub fn trial(&self, eps: f64, d: f64, trial: usize) -> Result<Pseudotrajectory> {
        let mut rng = Stream::for_index(self.trial_seed(eps, trial), 0);
        let noise_seed = mix64(self.trial_seed(eps, trial));
        let a = self.k.half_width;
        let model = self.model.at(d);
        let crossing = match self.family {
            TrialFamily::UniformNoise => false,
            TrialFamily::CrossingPush => true,
            TrialFamily::Mixed => trial % 2 == 1,
        };
        let nonzero = |v: f64| if v == 0.0 { a * 1e-3 } else { v };
        if !crossing {
            let p0 = match self.spec.dim() {
                1 => Point::One(a * rng.symmetric()),
                _ => Point::Two(Point2::new(nonzero(a * rng.symmetric()), a * rng.symmetric())),
            };
            return generate(&self.spec, p0, self.m, model, &self.k, noise_seed);
        }
        let start = -(eps * (1.02 + 0.08 * rng.unit())).min(a);
        let (p0, push) = match &self.spec {
            MapSpec::Expanding1D { .. } => (Point::One(start), Push::Constant { x: 1.0, y: 0.0 }),
            _ => {
                let x0 = nonzero(0.5 * a * rng.symmetric());
                (Point::Two(Point2::new(x0, start)), Push::Constant { x: 0.0, y: 1.0 })
            }
        };
        generate_adversarial(&self.spec, p0, self.m, model, &self.k, push)
    }

    pub fn solve(&self, traj: &Pseudotrajectory, eps: f64) -> Result<ShadowResult> {
        let opts = SearchOptions { depth: self.depth, ..SearchOptions::default() };
        shadow_auto(&self.spec, traj, eps, self.pair, &opts)
    }

    fn trial_succeeds(&self, eps: f64, d: f64, trial: usize) -> bool {
        self.trial(eps, d, trial).and_then(|t| self.solve(&t, eps)).map(|r| r.found).unwrap_or(false)
    }

    /// Every trial at level `d` is shadowed; stops at the first failure.
    pub fn feasible(&self, eps: f64, d: f64) -> bool {
        (0..self.trials_per_d).all(|i| self.trial_succeeds(eps, d, i))
    }

    pub fn success_rate(&self, eps: f64, d: f64) -> f64 {
        let ok = (0..self.trials_per_d).filter(|&i| self.trial_succeeds(eps, d, i)).count();
        ok as f64 / self.trials_per_d as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub eps: f64,
    pub d_max: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    pub fit_c: f64,
    pub fit_p: f64,
    pub residual: f64,
}

impl ScalingResult {
    pub fn from_rows(rows: Vec<ScalingRow>) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.d_max)).collect();
        let (fit_c, fit_p, residual) = fit_exponent(&pairs)?;
        Ok(Self { rows, fit_c, fit_p, residual })
    }
}

/// Geometric bisection of the largest feasible `d` on `[ε·10⁻⁶, ε]`.
/// Returns the final geometric midpoint and the success rate there.
pub fn estimate_max_d(config: &ScalingConfig, eps: f64) -> Result<ScalingRow> {
    config.validate()?;
    if !config.eps_list.contains(&eps) {
        return Err(usage(format!("ε = {eps} is not in eps_list")));
    }
    let (mut lo, mut hi) = (eps * 1e-6, eps);
    for _ in 0..config.bisection_steps {
        let mid = libm::sqrt(lo * hi);
        if config.feasible(eps, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d_max = libm::sqrt(lo * hi);
    Ok(ScalingRow { eps, d_max, success_rate: config.success_rate(eps, d_max) })
}

/// Least squares of `log d` on `log ε`: `d ≈ c·ε^p`, residual the RMS of the log residuals.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if rows.len() < 3 {
        return Err(usage("the exponent fit needs at least 3 rows"));
    }
    if rows.iter().any(|&(e, d)| !(e > 0.0 && d > 0.0)) {
        return Err(usage("the exponent fit needs positive ε and d"));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(e, d)| (libm::log(e), libm::log(d))).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(usage("the exponent fit needs distinct ε values"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let p = sxy / sxx;
    let b = my - p * mx;
    let ss: f64 = pts.iter().map(|q| (q.1 - b - p * q.0) * (q.1 - b - p * q.0)).sum();
    Ok((libm::exp(b), p, libm::sqrt(ss / n)))
}

/// All rows in order, sequentially.
pub fn run_scaling(config: &ScalingConfig) -> Result<ScalingResult> {
    config.validate()?;
    let rows = config.eps_list.iter().map(|&e| estimate_max_d(config, e)).collect::<Result<Vec<_>>>()?;
    ScalingResult::from_rows(rows)
}

/// Outcome of [`nonshadowing_demo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonshadowingReport {
    pub eps: f64,
    pub d: f64,
    pub m: usize,
    pub depth: u32,
    pub search: ShadowResult,
    /// `max_k p_ky − min_k p_ky` of the pushed pseudo-orbit.
    pub drift: f64,
    /// `exp(4x₀²/3)`, the largest growth factor of `|y|` along an exact orbit from `x₀`.
    pub variation_factor: f64,
    /// `2ε + (|y₀|+ε)(F − 1)` with `F` taken at `|x₀|+ε`: the most any
    /// ε-shadowed pseudo-orbit can drift.
    pub drift_bound: f64,
    /// `drift > drift_bound`: no point shadows, whatever the search depth.
    pub conclusive: bool,
}

pub const DEMO_START: Point2 = Point2::new(0.1, 0.0);

/// A full-strength upward push along the skew map's fixed axis at uniform
/// error level `d`, searched to depth 8, with the drift argument showing
/// that no shadowing point exists.
pub fn nonshadowing_demo(eps: f64, d: f64, m: usize) -> Result<NonshadowingReport> {
    if !(eps > 0.0 && d > 0.0) || m == 0 {
        return Err(usage("need ε > 0, d > 0 and m >= 1"));
    }
    if !(m as f64 * d > 2.2 * eps) {
        return Err(usage(format!("m·d = {} must exceed 2.2ε = {}", m as f64 * d, 2.2 * eps)));
    }
    let spec = MapSpec::NonisolatedSkew;
    let p0 = DEMO_START;
    let k = Neighborhood::excluding_axis((2.0 * m as f64 * d + 1.0).max(1.0));
    let traj = generate_adversarial(&spec, Point::Two(p0), m, ErrorModel::Uniform { d }, &k, Push::PushYUp)?;
    let depth = 8;
    let opts = SearchOptions { depth, ..SearchOptions::default() };
    let search = shadow_2d_search(&spec, &traj, eps, LyapunovPair::BoxPair, &opts)?;
    let ys = traj.planar_points()?.into_iter().map(|p| p.y);
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let drift = hi - lo;
    let factor = |x: f64| libm::exp(4.0 * x * x / 3.0);
    let drift_bound = 2.0 * eps + (p0.y.abs() + eps) * (factor(p0.x.abs() + eps) - 1.0);
    Ok(NonshadowingReport {
        eps,
        d,
        m,
        depth,
        variation_factor: factor(p0.x),
        conclusive: drift > drift_bound && !search.found,
        search,
        drift,
        drift_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let rows: Vec<(f64, f64)> = [0.05, 0.1, 0.2, 0.4].iter().map(|&e| (e, 0.2 * e * e * e)).collect();
        let (c, p, res) = fit_exponent(&rows).unwrap();
        assert!((c - 0.2).abs() < 1e-12 && (p - 3.0).abs() < 1e-12 && res < 1e-12);
        assert!(fit_exponent(&rows[..2]).is_err());
    }

    #[test]
    fn exact_orbits_are_always_feasible() {
        let mut cfg = ScalingConfig::new(MapSpec::cubic(), Neighborhood::new(0.5));
        cfg.trials_per_d = 10;
        assert!(cfg.feasible(0.1, 0.0));
    }

    #[test]
    fn trials_depend_on_seed_eps_and_index_only() {
        let mut cfg = ScalingConfig::new(MapSpec::saddle(1, 2), Neighborhood::new(0.4));
        cfg.m = 30;
        let a = cfg.trial(0.1, 1e-3, 4).unwrap();
        let b = cfg.trial(0.1, 2e-3, 4).unwrap();
        assert_eq!(a.points[0], b.points[0]);
        let a1 = a.points[1].x();
        let b1 = b.points[1].x();
        let f = cfg.spec.apply(&a.points[0]).unwrap().x();
        assert!(((b1 - f) - 2.0 * (a1 - f)).abs() < 1e-15);
        assert_ne!(cfg.trial(0.1, 1e-3, 6).unwrap().points[0], a.points[0]);
    }

    #[test]
    fn demo_precondition() {
        assert!(nonshadowing_demo(0.1, 0.001, 10).is_err());
    }

    #[test]
    fn demo_is_conclusive() {
        let r = nonshadowing_demo(0.1, 0.01, 50).unwrap();
        assert!(!r.search.found && r.conclusive);
        assert!(r.drift >= 0.5 && r.drift_bound < 0.22);
        assert!((r.variation_factor - 1.0134).abs() < 1e-4);
    }
}
