//! Sampled checks of the inequalities behind the shadowing theorems.
//!
//! Every check returns a [`ConditionReport`] whose `margin` is the smallest
//! slack seen over the samples; the check passes when that slack is
//! positive. These are diagnostics on grids, not certified enclosures.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::geometry::{closed_grid, LyapunovPair, Region, RegionPart};
use crate::maps::{ipow, MapSpec, Monomial, Neighborhood, PlanarMap, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub boundary_samples: usize,
    pub grid_per_axis: usize,
    pub nu_samples: usize,
    /// Require `margin > 10 · mesh · L` (empirical Lipschitz constant of the
    /// per-point slack) instead of `margin > 0`.
    pub aliasing_guard: bool,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            big_delta: 2e-3,
            boundary_samples: 256,
            grid_per_axis: 64,
            nu_samples: 33,
            aliasing_guard: false,
        }
    }
}

impl CheckParams {
    pub fn with_levels(delta: f64, big_delta: f64) -> Self {
        Self { delta, big_delta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < self.big_delta && self.big_delta.is_finite()) {
            return Err(usage(format!("need 0 < δ < Δ, got δ={} Δ={}", self.delta, self.big_delta)));
        }
        if self.boundary_samples < 16 {
            return Err(usage("boundary_samples must be at least 16"));
        }
        if self.grid_per_axis < 2 || self.nu_samples < 2 {
            return Err(usage("grid_per_axis and nu_samples must be at least 2"));
        }
        Ok(())
    }

    fn as_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("delta".into(), self.delta);
        m.insert("Delta".into(), self.big_delta);
        m.insert("boundary_samples".into(), self.boundary_samples as f64);
        m.insert("grid_per_axis".into(), self.grid_per_axis as f64);
        m.insert("nu_samples".into(), self.nu_samples as f64);
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    pub margin: f64,
    pub witness: Vec<f64>,
    pub samples_used: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<ConditionReport>,
}

impl ConditionReport {
    pub fn part(&self, name: &str) -> Option<&ConditionReport> {
        self.parts.iter().find(|p| p.condition == name)
    }

    /// Commutative min-merge: the smaller margin wins, ties go to the
    /// lexicographically smaller witness.
    pub fn merge(self, other: ConditionReport) -> ConditionReport {
        let samples = self.samples_used + other.samples_used;
        let keep_self = match self.margin.partial_cmp(&other.margin) {
            Some(Ordering::Less) => true,
            Some(Ordering::Greater) => false,
            _ => cmp_witness(&self.witness, &other.witness) != Ordering::Greater,
        };
        let mut best = if keep_self { self } else { other };
        best.samples_used = samples;
        best.passed = best.margin > 0.0;
        best
    }

    fn from_parts(condition: &str, parts: Vec<ConditionReport>, params: BTreeMap<String, f64>) -> Self {
        let mut worst = Tracker::new();
        for p in &parts {
            worst.offer(p.margin, || p.witness.clone());
        }
        let samples = parts.iter().map(|p| p.samples_used).sum();
        ConditionReport {
            condition: condition.to_string(),
            passed: parts.iter().all(|p| p.passed) && worst.margin > 0.0,
            margin: worst.margin,
            witness: worst.witness,
            samples_used: samples,
            params,
            parts,
        }
    }
}

fn cmp_witness(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Running minimum of a slack with its witness.
struct Tracker {
    margin: f64,
    witness: Vec<f64>,
    samples: usize,
}

impl Tracker {
    fn new() -> Self {
        Self { margin: f64::INFINITY, witness: Vec::new(), samples: 0 }
    }

    #[inline]
    fn offer(&mut self, slack: f64, witness: impl FnOnce() -> Vec<f64>) {
        self.samples += 1;
        let slack = if slack.is_nan() { f64::MIN } else { slack };
        if slack < self.margin {
            self.margin = slack;
            self.witness = witness();
        }
    }

    fn report(self, condition: &str, params: BTreeMap<String, f64>) -> ConditionReport {
        let margin = if self.samples == 0 { 0.0 } else { self.margin.max(f64::MIN) };
        ConditionReport {
            condition: condition.to_string(),
            passed: margin > 0.0,
            margin,
            witness: self.witness,
            samples_used: self.samples,
            params,
            parts: Vec::new(),
        }
    }
}

fn binomial(k: u32, j: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c = c * (k - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `(x+v)^k − x^k`, expanded so small `v` does not cancel.
pub fn pow_diff(x: f64, v: f64, k: u32) -> f64 {
    (1..=k).map(|j| binomial(k, j) * ipow(x, k - j) * ipow(v, j)).sum()
}

fn terms_diff(terms: &[Monomial], x: f64, v: f64) -> f64 {
    terms.iter().map(|t| if t.l == 0 { t.a * pow_diff(x, v, t.k) } else { t.eval(x + v, 0.0) - t.eval(x, 0.0) }).sum()
}

fn odd(n: usize) -> usize {
    n | 1
}

/// `n` log-spaced points in `(0, a)`, from `a·10⁻⁴` up to just below `a`.
fn log_grid(a: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| a * libm::pow(10.0, -4.0 * (1.0 - j as f64 / n as f64)))
}

fn expanding_parts(spec: &MapSpec) -> Result<(u32, &[Monomial])> {
    match spec {
        MapSpec::Expanding1D { n, x_terms } => Ok((*n, x_terms)),
        _ => Err(usage("this check needs the one-dimensional family")),
    }
}

fn saddle_parts(spec: &MapSpec) -> Result<(u32, u32, &[Monomial], &[Monomial])> {
    match spec {
        MapSpec::PlanarSaddle { n, m, x_terms, y_terms } => Ok((*n, *m, x_terms, y_terms)),
        _ => Err(usage("this check needs a planar saddle")),
    }
}

/// `f(x+v) − f(x) > v` and `f(x−v) − f(x) < −v` over `|x| ≤ A`, `0 < v < a`.
pub fn check_condition1(spec: &MapSpec, big_a: f64, a: f64, params: &CheckParams) -> Result<ConditionReport> {
    spec.validate()?;
    let (n, terms) = expanding_parts(spec)?;
    if !(big_a > 0.0 && a > 0.0) {
        return Err(usage("A and a must be positive"));
    }
    let p = 2 * n + 1;
    // f(x+v) − f(x) − v
    let excess = |x: f64, v: f64| pow_diff(x, v, p) + terms_diff(terms, x, v);
    let mut t = Tracker::new();
    for x in closed_grid(-big_a, big_a, odd(params.grid_per_axis)) {
        for v in log_grid(a, params.grid_per_axis) {
            let up = excess(x, v);
            let down = -excess(x, -v);
            t.offer(up.min(down), || vec![x, v]);
        }
    }
    let mut pm = params.as_map();
    pm.insert("A".into(), big_a);
    pm.insert("a".into(), a);
    Ok(t.report("condition1", pm))
}

/// `S(x, ε) = ((x+ε)^{2n+1} − x^{2n+1}) / ε`.
pub fn s_poly(n: u32, x: f64, eps: f64) -> f64 {
    let k = 2 * n + 1;
    (1..=k).map(|j| binomial(k, j) * ipow(x, k - j) * ipow(eps, j - 1)).sum()
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimizer and minimum of `x ↦ S(x, 1)`.
pub fn s_minimum(n: u32) -> (f64, f64) {
    golden_min(|x| s_poly(n, x, 1.0), -1.0, 1.0, 200)
}

/// A constant `α > 0` with `S(x,ε) − ε^{2n}/(1+2^{2n}) ≥ α(x^{2n}+ε^{2n})`.
///
/// Both sides are homogeneous of degree `2n`, so it suffices to minimize the
/// ratio over `x = tan θ` with `ε = 1`; the result carries a 0.99 safety factor.
pub fn compute_alpha(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(usage("n must be at least 1"));
    }
    let c = 1.0 / (1.0 + ipow(2.0, 2 * n));
    let ratio = |theta: f64| {
        let x = libm::tan(theta);
        (s_poly(n, x, 1.0) - c) / (ipow(x, 2 * n) + 1.0)
    };
    let half_pi = core::f64::consts::FRAC_PI_2;
    let steps = 20_000;
    let h = 2.0 * half_pi / steps as f64;
    let (mut best_i, mut best) = (1, f64::INFINITY);
    for i in 1..steps {
        let r = ratio(-half_pi + i as f64 * h);
        if r < best {
            best = r;
            best_i = i;
        }
    }
    let lo = -half_pi + (best_i as f64 - 1.0) * h;
    let (_, refined) = golden_min(ratio, lo, lo + 2.0 * h, 100);
    Ok(0.99 * refined.min(best))
}

/// `|X(x+ε) − X(x)| ≤ (αε/2)(x^{2n} + ε^{2n})` over `|x| ≤ A`, `0 < ε < a`.
pub fn check_smallness_x(
    spec: &MapSpec,
    big_a: f64,
    a: f64,
    alpha: f64,
    params: &CheckParams,
) -> Result<ConditionReport> {
    spec.validate()?;
    let (n, terms) = expanding_parts(spec)?;
    if !(big_a > 0.0 && a > 0.0 && alpha > 0.0) {
        return Err(usage("A, a and α must be positive"));
    }
    let mut t = Tracker::new();
    for x in closed_grid(-big_a, big_a, odd(params.grid_per_axis)) {
        for eps in log_grid(a, params.grid_per_axis) {
            let rhs = 0.5 * alpha * eps * (ipow(x, 2 * n) + ipow(eps, 2 * n));
            let lhs = terms_diff(terms, x, eps).abs();
            t.offer(rhs - lhs, || vec![x, eps]);
        }
    }
    let mut pm = params.as_map();
    pm.insert("A".into(), big_a);
    pm.insert("a".into(), a);
    pm.insert("alpha".into(), alpha);
    Ok(t.report("smallness_X", pm))
}

/// Halve `(A, a)` from the given start until the smallness check passes.
pub fn find_smallness_neighborhood(
    spec: &MapSpec,
    start: (f64, f64),
    alpha: f64,
    max_halvings: usize,
    params: &CheckParams,
) -> Result<Option<ConditionReport>> {
    let (mut big_a, mut a) = start;
    for _ in 0..=max_halvings {
        let report = check_smallness_x(spec, big_a, a, alpha, params)?;
        if report.passed {
            return Ok(Some(report));
        }
        big_a *= 0.5;
        a *= 0.5;
    }
    Ok(None)
}

fn k_grid(k: &Neighborhood, n: usize) -> Vec<Point2> {
    let a = k.half_width;
    let axis: Vec<f64> = closed_grid(-a, a, n).collect();
    let mut out = Vec::with_capacity(n * n);
    for &y in &axis {
        for &x in &axis {
            if !(k.x_exclusion && x == 0.0) {
                out.push(Point2::new(x, y));
            }
        }
    }
    out
}

/// Per-point slack grid, for the aliasing guard.
struct SlackGrid {
    n: usize,
    mesh: f64,
    slack: Vec<f64>,
}

impl SlackGrid {
    fn lipschitz(&self) -> f64 {
        let mut l: f64 = 0.0;
        for j in 0..self.n {
            for i in 0..self.n {
                let s = self.slack[j * self.n + i];
                if i + 1 < self.n {
                    l = l.max((s - self.slack[j * self.n + i + 1]).abs() / self.mesh);
                }
                if j + 1 < self.n {
                    l = l.max((s - self.slack[(j + 1) * self.n + i]).abs() / self.mesh);
                }
            }
        }
        l
    }
}

fn apply_guard(report: &mut ConditionReport, grid: &SlackGrid, params: &CheckParams) {
    if !params.aliasing_guard {
        return;
    }
    let threshold = 10.0 * grid.mesh * grid.lipschitz();
    report.params.insert("guard_threshold".into(), threshold);
    report.passed = report.margin > threshold;
}

/// Condition 2 for a saddle: the `g`-step bound on `H(δ)`, the flatness of
/// `h` along `x` up to `Δ`, and the expansion of `h` across `|w| = δ`.
pub fn check_condition2(spec: &MapSpec, k: &Neighborhood, params: &CheckParams) -> Result<ConditionReport> {
    spec.validate()?;
    saddle_parts(spec)?;
    params.validate()?;
    k.validate()?;
    let (d, dd) = (params.delta, params.big_delta);
    let nb = params.boundary_samples;
    let n = params.grid_per_axis;
    let grid = k_grid(&Neighborhood::new(k.half_width), n);
    let mut g_step = Tracker::new();
    let mut h_flat = Tracker::new();
    let mut h_expand = Tracker::new();
    let mut slack = Vec::with_capacity(grid.len());
    let vs: Vec<f64> = closed_grid(-d, d, nb).collect();
    let vs_wide: Vec<f64> = closed_grid(-dd, dd, nb).collect();
    for &p in &grid {
        let fp = spec.apply2(p);
        let at = |v: f64, w: f64| spec.apply2(Point2::new(p.x + v, p.y + w));
        let mut local = f64::INFINITY;
        // H(δ): the segment w = 0 and the two sides |v| = δ
        for &v in &vs {
            let s = d - (at(v, 0.0).x - fp.x).abs();
            local = local.min(s);
            g_step.offer(s, || vec![p.x, p.y, v, 0.0]);
            for side in [-d, d] {
                let s = d - (at(side, v).x - fp.x).abs();
                local = local.min(s);
                g_step.offer(s, || vec![p.x, p.y, side, v]);
            }
        }
        for &v in &vs_wide {
            let s = d - (at(v, 0.0).y - fp.y).abs();
            local = local.min(s);
            h_flat.offer(s, || vec![p.x, p.y, v, 0.0]);
        }
        for &v in &vs {
            for w in [-d, d] {
                let s = (at(v, w).y - fp.y).abs() - d;
                local = local.min(s);
                h_expand.offer(s, || vec![p.x, p.y, v, w]);
            }
        }
        slack.push(local);
    }
    let pm = params.as_map();
    let parts = vec![
        g_step.report("g_step", pm.clone()),
        h_flat.report("h_flat", pm.clone()),
        h_expand.report("h_expand", pm.clone()),
    ];
    let mut pm = pm;
    pm.insert("K".into(), k.half_width);
    let mut report = ConditionReport::from_parts("condition2", parts, pm);
    let sg = SlackGrid { n, mesh: 2.0 * k.half_width / (n - 1) as f64, slack };
    apply_guard(&mut report, &sg, params);
    Ok(report)
}

/// Slack of `z` in `Int⁰P(level, c)`: `level − max(V, W)`, or `−level` off the pair's domain.
fn interior_slack(pair: LyapunovPair, c: Point2, level: f64, z: Point2) -> f64 {
    if !pair.in_domain(z) {
        return -level;
    }
    let (v, w) = pair.vw_unchecked(z, c);
    level - v.max(w)
}

/// `(V, W)` with `W` measured by the raw weighted formula even off the domain.
fn vw_raw(pair: LyapunovPair, c: Point2, z: Point2) -> (f64, f64) {
    ((z.y - c.y).abs(), (z.x - c.x).abs() / pair.x_scale(c.x))
}

/// The battery `𝒲(δ, Δ, p, q)`, one part per inclusion.
///
/// `c5_forward` maps the boundary and center of `P(δ,p)` into `Int⁰P(Δ,q)`;
/// `c5_inverse` pulls the boundary of `P(δ,q)` back into `Int⁰P(Δ,p)`;
/// `c6` sends `T(δ,p)` into `Int⁰P(δ,q)`; `c7` keeps `f(T(Δ,p))` strictly
/// below the `V = δ` level; `c8` keeps the image of `∂⁰P(δ,p)` off the slab
/// `{W ≥ δ, V ≤ δ}` around `q`; `c9` sends `Q(δ,p)` outside `P(δ,q)`.
pub fn check_w_condition<M: PlanarMap + ?Sized>(
    map: &M,
    pair: LyapunovPair,
    p: Point2,
    q: Point2,
    params: &CheckParams,
) -> Result<ConditionReport> {
    params.validate()?;
    let (d, dd) = (params.delta, params.big_delta);
    let nb = params.boundary_samples;
    let src = Region::new(p, d, pair)?;
    let src_wide = Region::new(p, dd, pair)?;
    let dst = Region::new(q, d, pair)?;
    let q_face = src.sample_part(RegionPart::QFace, nb)?;
    let r_face = src.sample_part(RegionPart::RFace, nb)?;
    let f = |z: Point2| map.forward(z);

    let mut c5f = Tracker::new();
    for &z in q_face.iter().chain(&r_face).chain(core::iter::once(&p)) {
        c5f.offer(interior_slack(pair, q, dd, f(z)), || vec![z.x, z.y]);
    }
    let mut c5b = Tracker::new();
    let dst_boundary =
        dst.sample_part(RegionPart::QFace, nb)?.into_iter().chain(dst.sample_part(RegionPart::RFace, nb)?);
    for z in dst_boundary {
        let back = map.inverse(z)?;
        c5b.offer(interior_slack(pair, p, dd, back), || vec![z.x, z.y]);
    }
    let mut c6 = Tracker::new();
    for z in src.sample_part(RegionPart::TCore, nb)? {
        c6.offer(interior_slack(pair, q, d, f(z)), || vec![z.x, z.y]);
    }
    let mut c7 = Tracker::new();
    for z in src_wide.sample_part(RegionPart::TCore, nb)? {
        c7.offer(d - (f(z).y - q.y).abs(), || vec![z.x, z.y]);
    }
    let mut c8 = Tracker::new();
    for &z in q_face.iter().chain(&r_face) {
        let (v, w) = vw_raw(pair, q, f(z));
        c8.offer((d - w).max(v - d), || vec![z.x, z.y]);
    }
    let mut c9 = Tracker::new();
    for &z in &q_face {
        let (v, w) = vw_raw(pair, q, f(z));
        c9.offer((v - d).max(w - d), || vec![z.x, z.y]);
    }
    let pm = params.as_map();
    let parts = vec![
        c5f.report("c5_forward", pm.clone()),
        c5b.report("c5_inverse", pm.clone()),
        c6.report("c6", pm.clone()),
        c7.report("c7", pm.clone()),
        c8.report("c8", pm.clone()),
        c9.report("c9", pm.clone()),
    ];
    let mut pm = pm;
    pm.insert("p_x".into(), p.x);
    pm.insert("p_y".into(), p.y);
    pm.insert("q_x".into(), q.x);
    pm.insert("q_y".into(), q.y);
    Ok(ConditionReport::from_parts("W", parts, pm))
}

/// Result of [`estimate_condition_d`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEstimate {
    /// Largest tested `d` for which every probe passed; `0` if none did.
    pub d: f64,
    /// The battery at the first failing probe just above `d`, or the last
    /// passing sweep if `d = δ`.
    pub report: ConditionReport,
}

const D_BISECTION_STEPS: usize = 40;

/// Largest `d` (by geometric bisection on `[δ·10⁻¹², δ]`) such that the
/// battery holds for every grid point `p ∈ K` and every `q = f(p) + d·u`,
/// `u` one of the 8 max-norm unit directions.
pub fn estimate_condition_d(
    spec: &MapSpec,
    pair: LyapunovPair,
    k: &Neighborhood,
    params: &CheckParams,
) -> Result<DEstimate> {
    spec.validate()?;
    params.validate()?;
    k.validate()?;
    let map = spec.planar()?;
    let grid: Vec<Point2> = k_grid(k, odd(params.grid_per_axis))
        .into_iter()
        .filter(|&p| pair.in_domain(p) && pair.in_domain(spec.apply2(p)))
        .collect();
    if grid.is_empty() {
        return Err(usage("no grid point of K lies in the pair's domain"));
    }
    const DIRS: [(f64, f64); 8] =
        [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let sweep = |d: f64| -> Result<(bool, ConditionReport)> {
        let mut last = None;
        for &p in &grid {
            let fp = map.forward(p);
            for (ux, uy) in DIRS {
                let q = Point2::new(fp.x + d * ux, fp.y + d * uy);
                if !pair.in_domain(q) {
                    continue;
                }
                let r = check_w_condition(&map, pair, p, q, params)?;
                if !r.passed {
                    return Ok((false, r));
                }
                last = Some(r);
            }
        }
        Ok((true, last.expect("grid is nonempty")))
    };
    let delta = params.delta;
    let (ok_hi, r_hi) = sweep(delta)?;
    if ok_hi {
        return Ok(DEstimate { d: delta, report: r_hi });
    }
    let mut lo = delta * 1e-12;
    let (ok_lo, r_lo) = sweep(lo)?;
    if !ok_lo {
        return Ok(DEstimate { d: 0.0, report: r_lo });
    }
    let mut hi = delta;
    let mut fail = r_hi;
    for _ in 0..D_BISECTION_STEPS {
        let mid = libm::sqrt(lo * hi);
        let (ok, r) = sweep(mid)?;
        if ok {
            lo = mid;
        } else {
            hi = mid;
            fail = r;
        }
    }
    Ok(DEstimate { d: lo, report: fail })
}

/// Slacks of the two derivative inequalities at `p` for slope `ν`.
fn derivative_slacks(n: u32, m: u32, xt: &[Monomial], yt: &[Monomial], p: Point2, nu: f64) -> (f64, f64) {
    let (x, y) = (p.x, p.y);
    let sx: f64 = xt.iter().map(|t| t.dx(x, y) + nu * t.dy(x, y)).sum();
    let sy: f64 = yt.iter().map(|t| t.dy(x, y) + nu * t.dx(x, y)).sum();
    let gx = (2 * n + 1) as f64 * ipow(x, 2 * n) - sx;
    let gy = (2 * m + 1) as f64 * ipow(y, 2 * m) + sy;
    (gx, gy)
}

/// Probe the `y`-inequality at `x = ±kb/(2l)`, `y = ±b`, `ν = ±1`, for the
/// monomial `a·x^k·y^l`, with `b = A·2^{-j}` halving from the box size.
/// Returns `[x, y, ν, slack]` of the most negative slack found, if any is negative.
pub fn pattern_witness(spec: &MapSpec, mono: &Monomial, big_a: f64) -> Result<Option<[f64; 4]>> {
    let (n, m, xt, yt) = saddle_parts(spec)?;
    if mono.l == 0 {
        return Err(usage("pattern probes need l >= 1"));
    }
    let mut worst: Option<[f64; 4]> = None;
    for j in 0..40 {
        let b = big_a * ipow(0.5, j);
        let x0 = mono.k as f64 * b / (2.0 * mono.l as f64);
        if x0 > big_a {
            continue;
        }
        for (sx, sy, nu) in sign_combos() {
            let p = Point2::new(sx * x0, sy * b);
            let (_, gy) = derivative_slacks(n, m, xt, yt, p, nu);
            if gy < 0.0 && worst.is_none_or(|w| gy < w[3]) {
                worst = Some([p.x, p.y, nu, gy]);
            }
        }
        if worst.is_some() {
            break;
        }
    }
    Ok(worst)
}

fn sign_combos() -> impl Iterator<Item = (f64, f64, f64)> {
    (0..8).map(|i| {
        let s = |bit: u32| if i >> bit & 1 == 0 { 1.0 } else { -1.0 };
        (s(0), s(1), s(2))
    })
}

/// Both derivative inequalities on a grid over `K` (off the respective axes)
/// and a `ν`-grid on `[−1, 1]`. The margin is the raw minimum slack.
/// Monomials in `Y` are also probed along their critical pattern.
pub fn check_derivative_conditions(spec: &MapSpec, k: &Neighborhood, params: &CheckParams) -> Result<ConditionReport> {
    spec.validate()?;
    let (n, m, xt, yt) = saddle_parts(spec)?;
    k.validate()?;
    if k.half_width >= 1.0 {
        return Err(usage("K half-width must be below 1"));
    }
    if params.grid_per_axis < 2 || params.nu_samples < 2 {
        return Err(usage("grid_per_axis and nu_samples must be at least 2"));
    }
    let g = params.grid_per_axis;
    let grid = k_grid(&Neighborhood::new(k.half_width), g);
    let nus: Vec<f64> = closed_grid(-1.0, 1.0, params.nu_samples).collect();
    let mut tx = Tracker::new();
    let mut ty = Tracker::new();
    let mut slack = Vec::with_capacity(grid.len());
    for &p in &grid {
        let mut local = f64::INFINITY;
        for &nu in &nus {
            let (gx, gy) = derivative_slacks(n, m, xt, yt, p, nu);
            if p.x != 0.0 {
                tx.offer(gx, || vec![p.x, p.y, nu]);
                local = local.min(gx);
            }
            if p.y != 0.0 {
                ty.offer(gy, || vec![p.x, p.y, nu]);
                local = local.min(gy);
            }
        }
        slack.push(if local.is_finite() { local } else { 0.0 });
    }
    let pm = params.as_map();
    let mut parts = vec![tx.report("x_derivative", pm.clone()), ty.report("y_derivative", pm.clone())];
    // a failing pattern probe is reported as its own part
    let mut pattern = Tracker::new();
    for mono in yt.iter().filter(|t| t.l >= 1) {
        if let Some([x, y, nu, s]) = pattern_witness(spec, mono, k.half_width)? {
            pattern.offer(s, || vec![x, y, nu]);
        }
    }
    if pattern.samples > 0 {
        parts.push(pattern.report("pattern", pm.clone()));
    }
    let mut pm = pm;
    pm.insert("K".into(), k.half_width);
    let mut report = ConditionReport::from_parts("derivative", parts, pm);
    let sg = SlackGrid { n: g, mesh: 2.0 * k.half_width / (g - 1) as f64, slack };
    apply_guard(&mut report, &sg, params);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason")]
pub enum Admissibility {
    AdmissibleSmallNbhd,
    AdmissibleIfSmallCoeff,
    Inadmissible(String),
}

/// Whether `Y = a·x^k·y^l` keeps the `y`-derivative inequality near the origin
/// for the saddle with exponent `2m+1`.
pub fn check_monomial_admissibility(m: u32, mono: &Monomial) -> Result<Admissibility> {
    if m == 0 {
        return Err(usage("m must be at least 1"));
    }
    let Monomial { a, k, l } = *mono;
    if l == 0 {
        return Err(usage("admissibility is decided for l >= 1 only"));
    }
    let top = 2 * m + 1;
    if l > top || (l == top && k >= 1) {
        return Ok(Admissibility::AdmissibleSmallNbhd);
    }
    if l == top {
        return Ok(Admissibility::AdmissibleIfSmallCoeff);
    }
    let clauses: [(bool, &str); 4] =
        [(a > 0.0, "a > 0"), (k % 2 == 0, "k even"), (l % 2 == 1, "l odd"), (k + l >= top, "k+l ≥ 2m+1")];
    Ok(match clauses.iter().find(|(ok, _)| !ok) {
        Some((_, reason)) => Admissibility::Inadmissible(reason.to_string()),
        None => Admissibility::AdmissibleSmallNbhd,
    })
}
