//! Lyapunov pairs `(V, W)` and the boxes they generate.
//!
//! For a center `p` and level `δ`, `P(δ,p) = {q : V(q,p) ≤ δ, W(q,p) ≤ δ}`.
//! Both concrete pairs give coordinate rectangles: `Q` is the pair of
//! horizontal faces (`V = δ`), `R` the pair of vertical faces (`W = δ`) and
//! `T` the horizontal mid-segment (`V = 0`).
//!
//! The retract conditions on these sets hold for rectangles and are not
//! checked at runtime.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};
use crate::maps::Point2;

/// Relative tolerance for the face equalities in [`Region::classify`].
pub const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovPair {
    /// `V = |p_y − q_y|`, `W = |p_x − q_x|`, defined on the whole plane.
    BoxPair,
    /// `V = |p_y − q_y|`, `W = |p_x − q_x| / (|p_x|(1 − |p_x|))`, defined for
    /// `0 < |p_x|, |q_x| < 1`.
    WeightedPair,
}

fn in_strip(x: f64) -> bool {
    x != 0.0 && x.abs() < 1.0
}

impl LyapunovPair {
    pub fn in_domain(self, p: Point2) -> bool {
        p.is_finite()
            && match self {
                LyapunovPair::BoxPair => true,
                LyapunovPair::WeightedPair => in_strip(p.x),
            }
    }

    fn require(self, p: Point2) -> Result<()> {
        if self.in_domain(p) {
            Ok(())
        } else {
            Err(domain(format!("({}, {}) is outside the domain of {:?}", p.x, p.y, self)))
        }
    }

    /// `V(q, p)`.
    pub fn v_value(self, q: Point2, p: Point2) -> Result<f64> {
        self.require(p)?;
        self.require(q)?;
        Ok((p.y - q.y).abs())
    }

    /// `W(q, p)`.
    pub fn w_value(self, q: Point2, p: Point2) -> Result<f64> {
        self.require(p)?;
        self.require(q)?;
        Ok((p.x - q.x).abs() / self.x_scale(p.x))
    }

    /// Scale of the `x`-direction: `1` for the box pair, `|p_x|(1−|p_x|)` for the weighted pair.
    #[inline]
    pub fn x_scale(self, px: f64) -> f64 {
        match self {
            LyapunovPair::BoxPair => 1.0,
            LyapunovPair::WeightedPair => px.abs() * (1.0 - px.abs()),
        }
    }

    /// `(V, W)` of `q` relative to a center already known to be valid;
    /// `W = ∞` when `q` leaves the pair's domain.
    #[inline]
    pub(crate) fn vw_unchecked(self, q: Point2, p: Point2) -> (f64, f64) {
        let v = (p.y - q.y).abs();
        let w = if self.in_domain(q) { (p.x - q.x).abs() / self.x_scale(p.x) } else { f64::INFINITY };
        (v, w)
    }

    /// Level `Δ₀(ε)` with `P(Δ₀, p) ⊂ B(ε, p)`.
    pub fn delta0_for_epsilon(self, eps: f64) -> f64 {
        match self {
            // a max-norm box of level ε is the ε-ball
            LyapunovPair::BoxPair => eps,
            LyapunovPair::WeightedPair => eps / 2.0,
        }
    }
}

/// The parts of a Lyapunov box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionPart {
    /// `Int⁰P`: `V < δ` and `W < δ`.
    Interior,
    /// `Q`: `V = δ`, `W ≤ δ`.
    QFace,
    /// `R`: `W = δ`, `V ≤ δ`.
    RFace,
    /// `T`: `V = 0`, `W ≤ δ`.
    TCore,
    /// `Int⁰Q`: `V = δ`, `W < δ`.
    IntQFace,
    Outside,
}

/// The box `P(δ, p)` of a Lyapunov pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: Point2,
    pub delta: f64,
    pub pair: LyapunovPair,
}

impl Region {
    pub fn new(center: Point2, delta: f64, pair: LyapunovPair) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(usage("region level δ must be positive"));
        }
        pair.require(center)?;
        Ok(Self { center, delta, pair })
    }

    /// Half-widths of the rectangle in `x` and `y`.
    pub fn half_widths(&self) -> (f64, f64) {
        (self.delta * self.pair.x_scale(self.center.x), self.delta)
    }

    pub fn contains(&self, q: Point2) -> bool {
        let (v, w) = self.pair.vw_unchecked(q, self.center);
        v <= self.delta && w <= self.delta
    }

    fn tol(&self) -> f64 {
        FACE_TOL * (1.0 + self.delta) * self.delta
    }

    /// Membership in a given part, equalities tested to within the face tolerance.
    pub fn is_in(&self, part: RegionPart, q: Point2) -> bool {
        let (v, w) = self.pair.vw_unchecked(q, self.center);
        let (d, t) = (self.delta, self.tol());
        let eq = |a: f64| (a - d).abs() <= t;
        let le = |a: f64| a <= d + t;
        let lt = |a: f64| a < d - t;
        match part {
            RegionPart::Outside => !(le(v) && le(w)),
            RegionPart::Interior => lt(v) && lt(w),
            RegionPart::QFace => eq(v) && le(w),
            RegionPart::RFace => eq(w) && le(v),
            RegionPart::TCore => v <= t && le(w),
            RegionPart::IntQFace => eq(v) && lt(w),
        }
    }

    /// A single label per point. Precedence: `Outside`, `TCore`, `QFace`,
    /// `RFace`, `Interior`. `IntQFace` points are labelled `QFace`; use
    /// [`Region::is_in`] to test the finer part.
    pub fn classify(&self, q: Point2) -> RegionPart {
        [RegionPart::Outside, RegionPart::TCore, RegionPart::QFace, RegionPart::RFace]
            .into_iter()
            .find(|&part| self.is_in(part, q))
            .unwrap_or(RegionPart::Interior)
    }

    /// `count` deterministically spaced points of the requested part.
    ///
    /// Faces are split between their two components (upper/lower for `Q`,
    /// left/right for `R`), each sampled from one end to the other.
    pub fn sample_part(&self, part: RegionPart, count: usize) -> Result<Vec<Point2>> {
        if count < 2 {
            return Err(usage("sample_part needs count >= 2"));
        }
        let (hx, hy) = self.half_widths();
        let Point2 { x: cx, y: cy } = self.center;
        let first = count.div_ceil(2);
        let second = count - first;
        let mut out = Vec::with_capacity(count);
        match part {
            RegionPart::Outside => return Err(usage("cannot sample the outside of a region")),
            RegionPart::QFace => {
                for (y, n) in [(cy + hy, first), (cy - hy, second)] {
                    out.extend(closed_grid(cx - hx, cx + hx, n).map(|x| Point2::new(x, y)));
                }
            }
            RegionPart::IntQFace => {
                for (y, n) in [(cy + hy, first), (cy - hy, second)] {
                    out.extend(open_grid(cx - hx, cx + hx, n).map(|x| Point2::new(x, y)));
                }
            }
            RegionPart::RFace => {
                for (x, n) in [(cx - hx, first), (cx + hx, second)] {
                    out.extend(closed_grid(cy - hy, cy + hy, n).map(|y| Point2::new(x, y)));
                }
            }
            RegionPart::TCore => {
                out.extend(closed_grid(cx - hx, cx + hx, count).map(|x| Point2::new(x, cy)));
            }
            RegionPart::Interior => {
                let cols = (libm::ceil(libm::sqrt(count as f64)) as usize).max(1);
                let rows = count.div_ceil(cols);
                'fill: for j in 0..rows {
                    let y = open_point(cy - hy, cy + hy, j, rows);
                    for i in 0..cols {
                        if out.len() == count {
                            break 'fill;
                        }
                        out.push(Point2::new(open_point(cx - hx, cx + hx, i, cols), y));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `n` evenly spaced points covering `[a, b]`, endpoints included; a single
/// point is the midpoint.
pub(crate) fn closed_grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            0.5 * (a + b)
        } else if i == n - 1 {
            b
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    })
}

fn open_point(a: f64, b: f64, i: usize, n: usize) -> f64 {
    a + (b - a) * (i + 1) as f64 / (n + 1) as f64
}

fn open_grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| open_point(a, b, i, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const BOX: LyapunovPair = LyapunovPair::BoxPair;
    const WEIGHTED: LyapunovPair = LyapunovPair::WeightedPair;

    #[test]
    fn values() {
        let (q, p) = (Point2::new(0.3, 0.7), Point2::new(0.1, 0.5));
        assert!((BOX.v_value(q, p).unwrap() - 0.2).abs() < 1e-15);
        assert!((BOX.w_value(q, p).unwrap() - 0.2).abs() < 1e-15);
        let (q, p) = (Point2::new(0.25, 0.0), Point2::new(0.5, 0.0));
        assert_eq!(WEIGHTED.v_value(q, p).unwrap(), 0.0);
        assert_eq!(WEIGHTED.w_value(q, p).unwrap(), 1.0);
        assert_eq!(WEIGHTED.w_value(p, p).unwrap(), 0.0);
    }

    #[test]
    fn weighted_domain_errors() {
        let q = Point2::new(0.2, 0.0);
        assert!(WEIGHTED.v_value(q, Point2::new(0.0, 0.0)).is_err());
        assert!(WEIGHTED.w_value(q, Point2::new(1.0, 0.0)).is_err());
        assert!(WEIGHTED.w_value(q, Point2::new(-1.5, 0.0)).is_err());
    }

    #[test]
    fn classify_examples() {
        let r = Region::new(Point2::ORIGIN, 0.1, BOX).unwrap();
        assert_eq!(r.classify(Point2::new(0.05, 0.1)), RegionPart::QFace);
        assert!(r.is_in(RegionPart::IntQFace, Point2::new(0.05, 0.1)));
        assert_eq!(r.classify(Point2::new(0.05, 0.0)), RegionPart::TCore);
        assert_eq!(r.classify(Point2::new(0.2, 0.0)), RegionPart::Outside);
        assert_eq!(r.classify(Point2::new(0.1, 0.05)), RegionPart::RFace);
        assert_eq!(r.classify(Point2::new(0.01, 0.05)), RegionPart::Interior);
    }

    #[test]
    fn sampling_examples() {
        let r = Region::new(Point2::ORIGIN, 0.1, BOX).unwrap();
        assert_eq!(
            r.sample_part(RegionPart::QFace, 4).unwrap(),
            vec![Point2::new(-0.1, 0.1), Point2::new(0.1, 0.1), Point2::new(-0.1, -0.1), Point2::new(0.1, -0.1)]
        );
        assert_eq!(
            r.sample_part(RegionPart::TCore, 3).unwrap(),
            vec![Point2::new(-0.1, 0.0), Point2::new(0.0, 0.0), Point2::new(0.1, 0.0)]
        );
        let w = Region::new(Point2::new(0.5, 0.0), 0.2, WEIGHTED).unwrap();
        let pts = w.sample_part(RegionPart::RFace, 2).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].x - 0.45).abs() < 1e-15 && pts[0].y == 0.0);
        assert!((pts[1].x - 0.55).abs() < 1e-15 && pts[1].y == 0.0);
        assert!(r.sample_part(RegionPart::Outside, 4).is_err());
        assert!(r.sample_part(RegionPart::QFace, 1).is_err());
    }

    #[test]
    fn samples_classify_to_their_part() {
        for pair in [BOX, WEIGHTED] {
            let r = Region::new(Point2::new(0.3, -0.2), 0.05, pair).unwrap();
            for part in
                [RegionPart::Interior, RegionPart::QFace, RegionPart::RFace, RegionPart::TCore, RegionPart::IntQFace]
            {
                for count in [2, 3, 7, 16, 33] {
                    let pts = r.sample_part(part, count).unwrap();
                    assert_eq!(pts.len(), count);
                    assert!(pts.iter().all(|&q| r.is_in(part, q)), "{pair:?} {part:?} {count}");
                }
            }
        }
    }

    #[test]
    fn delta0() {
        assert_eq!(WEIGHTED.delta0_for_epsilon(0.1), 0.05);
        assert_eq!(BOX.delta0_for_epsilon(0.1), 0.1);
    }

    #[test]
    fn weighted_half_width_shrinks_toward_axis() {
        let mut prev = f64::INFINITY;
        for i in (1..=500).rev() {
            let px = 0.5 * i as f64 / 500.0;
            let (hx, _) = Region::new(Point2::new(px, 0.0), 0.3, WEIGHTED).unwrap().half_widths();
            assert!(hx < prev);
            prev = hx;
        }
        assert!(prev < 1e-3);
    }
}
