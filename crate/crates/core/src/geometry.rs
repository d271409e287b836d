//! Phase delays along a waveguide and the pinching-antenna placement solvers.
//!
//! A waveguide is a straight line starting at its feed point. A position on
//! it is described by its distance `t` from the feed along the unit axis, so
//! the in-guide path length is exactly `t`. The total phase seen by the UE
//! through an antenna at `t` is
//!
//! ```text
//! ψ(t) = (2π/λ)·‖p(t) − u‖ + (2π/λ_G)·t
//! ```
//!
//! Because λ_G < λ, ψ is strictly increasing in `t`: the free-space term can
//! change by at most 2π/λ per meter while the guided term always adds 2π/λ_G.
//! Every solver below relies on that monotonicity to bracket roots.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::PHASE_TOLERANCE;

const TWO_PI: f64 = 2.0 * PI;

/// Bisection stops once the phase residual is below this, in radians.
const ROOT_TOLERANCE: f64 = 1e-9;

/// Tolerance for a reference point lying on the waveguide axis, in meters.
const ON_AXIS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Point3::new(v[0], v[1], v[2])
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let w = phase - TWO_PI * (phase / TWO_PI).floor();
    // the subtraction can round up to exactly 2π for tiny negative inputs
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// Circular distance between two angles, in `[0, π]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TWO_PI - d)
}

/// Geometry of one waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    /// Feed (signal injection) point; the axis starts here.
    pub feed: Point3,
    /// Unit axis direction, pointing away from the feed.
    pub direction: Point3,
    /// Current reference (first) pinching-antenna position.
    pub reference: Point3,
    /// Usable length measured from the feed, m.
    pub length_limit: f64,
}

impl WaveguideSpec {
    /// Builds a waveguide, normalizing `direction` and checking that the
    /// reference sits on the axis within `[0, length_limit]` of the feed.
    pub fn new(feed: Point3, direction: Point3, reference: Point3, length_limit: f64) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidConfig("waveguide direction must be non-zero".into()));
        }
        let wg = Self { feed, direction: direction * (1.0 / n), reference, length_limit };
        wg.validate()?;
        Ok(wg)
    }

    /// Waveguide along +x starting at `feed`, reference `reference_offset`
    /// meters from the feed.
    pub fn along_x(feed: Point3, reference_offset: f64, length_limit: f64) -> Result<Self> {
        let dir = Point3::new(1.0, 0.0, 0.0);
        Self::new(feed, dir, feed + dir * reference_offset, length_limit)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.feed.is_finite() && self.reference.is_finite() && self.direction.is_finite()) {
            return Err(Error::InvalidConfig("waveguide coordinates must be finite".into()));
        }
        if (self.direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("waveguide direction must have unit norm".into()));
        }
        if !(self.length_limit.is_finite() && self.length_limit > 0.0) {
            return Err(Error::InvalidConfig("waveguide length must be positive".into()));
        }
        let t = self.offset_of(self.reference);
        let off_axis = self.reference.distance(self.point_at(t));
        if off_axis > ON_AXIS_TOLERANCE {
            return Err(Error::InvalidConfig(alloc::format!(
                "reference is {off_axis:.3e} m off the waveguide axis"
            )));
        }
        if t < -ON_AXIS_TOLERANCE || t > self.length_limit + ON_AXIS_TOLERANCE {
            return Err(Error::InvalidConfig(alloc::format!(
                "reference at {t} m is outside [0, {}] m",
                self.length_limit
            )));
        }
        Ok(())
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        self.feed + self.direction * t
    }

    /// Signed axial offset of `p` from the feed.
    pub fn offset_of(&self, p: Point3) -> f64 {
        (p - self.feed).dot(self.direction)
    }

    pub fn reference_offset(&self) -> f64 {
        self.offset_of(self.reference)
    }

    pub fn with_reference(&self, reference: Point3) -> Self {
        Self { reference, ..*self }
    }
}

/// Placement of the N_G antennas on one waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    /// Antenna positions; the first is the reference antenna.
    pub positions: Vec<Point3>,
    /// Unwrapped total phase ψ of every antenna, radians.
    pub phases: Vec<f64>,
    /// ψ of the reference antenna reduced to `[0, 2π)`.
    pub phase_anchor: f64,
    /// Number of extra 2π cycles of each antenna relative to the reference.
    pub integer_offsets: Vec<i64>,
}

impl PlacementResult {
    /// Largest circular distance between any antenna phase and the anchor.
    pub fn max_congruence_error(&self) -> f64 {
        self.phases
            .iter()
            .map(|&p| phase_distance(p, self.phase_anchor))
            .fold(0.0, f64::max)
    }

    /// Fails with [`Error::IncoherentPlacement`] on the first antenna whose
    /// phase is not congruent to the anchor within `tol`.
    pub fn check_congruence(&self, tol: f64) -> Result<()> {
        for (index, &p) in self.phases.iter().enumerate() {
            let error = phase_distance(p, self.phase_anchor);
            if !(error <= tol) {
                return Err(Error::IncoherentPlacement { index, error });
            }
        }
        Ok(())
    }

    pub fn reference(&self) -> Point3 {
        self.positions[0]
    }
}

/// Unwrapped phase delay (2π/λ)‖antenna − ue‖ + (2π/λ_G)‖antenna − feed‖.
pub fn phase_delay(antenna: Point3, feed: Point3, ue: Point3, cfg: &SystemConfig) -> f64 {
    let k0 = TWO_PI / cfg.lambda();
    let kg = TWO_PI / cfg.lambda_g();
    k0 * antenna.distance(ue) + kg * antenna.distance(feed)
}

/// Phase profile ψ(t) of one waveguide for a fixed UE.
struct Profile<'a> {
    wg: &'a WaveguideSpec,
    ue: Point3,
    k0: f64,
    kg: f64,
    step: f64,
}

impl<'a> Profile<'a> {
    fn new(wg: &'a WaveguideSpec, ue: Point3, cfg: &SystemConfig) -> Self {
        let lambda = cfg.lambda();
        let lambda_g = cfg.lambda_g();
        Self { wg, ue, k0: TWO_PI / lambda, kg: TWO_PI / lambda_g, step: lambda_g / 20.0 }
    }

    fn phase(&self, t: f64) -> f64 {
        self.k0 * self.wg.point_at(t).distance(self.ue) + self.kg * t.abs()
    }

    /// Finds `t` with ψ(t) = `target`, searching from `start` toward
    /// increasing (`forward`) or decreasing offsets within `[0, length]`.
    fn solve(&self, target: f64, start: f64, forward: bool) -> Option<f64> {
        let limit = if forward { self.wg.length_limit } else { 0.0 };
        let step = if forward { self.step } else { -self.step };
        let past = |t: f64| if forward { self.phase(t) >= target } else { self.phase(t) <= target };

        let mut prev = start;
        if past(prev) {
            return Some(prev);
        }
        loop {
            let mut next = prev + step;
            let at_end = if forward { next >= limit } else { next <= limit };
            if at_end {
                next = limit;
            }
            if past(next) {
                return Some(self.bisect(target, prev, next));
            }
            if at_end {
                return None;
            }
            prev = next;
        }
    }

    fn bisect(&self, target: f64, a: f64, b: f64) -> f64 {
        // ψ is increasing, so order the bracket by offset
        let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
        let mut best = if (self.phase(lo) - target).abs() <= (self.phase(hi) - target).abs() { lo } else { hi };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.phase(mid) - target;
            if r.abs() < (self.phase(best) - target).abs() {
                best = mid;
            }
            if r.abs() < ROOT_TOLERANCE {
                break;
            }
            if r < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best
    }
}

fn nearest_offset(profile: &Profile<'_>, target_phase: f64) -> Result<f64> {
    let wg = profile.wg;
    let t_ref = wg.reference_offset();
    let psi_ref = profile.phase(t_ref);
    let delta = wrap_phase(target_phase - psi_ref);
    if delta < ROOT_TOLERANCE || TWO_PI - delta < ROOT_TOLERANCE {
        return Ok(t_ref);
    }
    let right = profile.solve(psi_ref + delta, t_ref, true);
    let left = profile.solve(psi_ref + delta - TWO_PI, t_ref, false);
    match (left, right) {
        (Some(l), Some(r)) => {
            // right wins ties
            if (t_ref - l).abs() >= (r - t_ref).abs() {
                Ok(r)
            } else {
                Ok(l)
            }
        }
        (Some(l), None) => Ok(l),
        (None, Some(r)) => Ok(r),
        (None, None) => Err(Error::PlacementInfeasible {
            length_limit: wg.length_limit,
            reason: "no position on either side reaches the target phase",
        }),
    }
}

/// On-axis point nearest to the current reference whose phase is congruent
/// to `target_phase` modulo 2π. Left/right ties go to the right candidate.
pub fn nearest_phase_position(
    wg: &WaveguideSpec,
    ue: Point3,
    target_phase: f64,
    cfg: &SystemConfig,
) -> Result<Point3> {
    wg.validate()?;
    let profile = Profile::new(wg, ue, cfg);
    Ok(wg.point_at(nearest_offset(&profile, target_phase)?))
}

/// Places `cfg.n_g` antennas on `wg`: the first at the reference, each
/// following one at the next offset (away from the feed) whose phase is one
/// more full cycle than its predecessor.
pub fn place_intra_waveguide(wg: &WaveguideSpec, ue: Point3, cfg: &SystemConfig) -> Result<PlacementResult> {
    wg.validate()?;
    let profile = Profile::new(wg, ue, cfg);
    let t_ref = wg.reference_offset().clamp(0.0, wg.length_limit);
    let psi_ref = profile.phase(t_ref);

    let mut offsets = Vec::with_capacity(cfg.n_g);
    let mut phases = Vec::with_capacity(cfg.n_g);
    let mut integer_offsets = Vec::with_capacity(cfg.n_g);
    offsets.push(t_ref);
    phases.push(psi_ref);
    integer_offsets.push(0);

    let mut t = t_ref;
    for n in 1..cfg.n_g {
        let target = psi_ref + TWO_PI * n as f64;
        t = profile.solve(target, t, true).ok_or(Error::PlacementInfeasible {
            length_limit: wg.length_limit,
            reason: "waveguide too short for N_G antennas",
        })?;
        offsets.push(t);
        phases.push(profile.phase(t));
        integer_offsets.push(n as i64);
    }

    Ok(PlacementResult {
        positions: offsets.iter().map(|&t| wg.point_at(t)).collect(),
        phases,
        phase_anchor: wrap_phase(psi_ref),
        integer_offsets,
    })
}

/// Moves the reference of every waveguide after the first to the nearest
/// position in phase with waveguide 1, then places all antennas.
pub fn align_scd(waveguides: &[WaveguideSpec], ue: Point3, cfg: &SystemConfig) -> Result<Vec<PlacementResult>> {
    let Some(first) = waveguides.first() else {
        return Err(Error::InvalidConfig("at least one waveguide is required".into()));
    };
    first.validate()?;
    let anchor = wrap_phase(phase_delay(first.reference, first.feed, ue, cfg));
    waveguides
        .iter()
        .enumerate()
        .map(|(i, wg)| {
            if i == 0 {
                place_intra_waveguide(wg, ue, cfg)
            } else {
                let r = nearest_phase_position(wg, ue, anchor, cfg)?;
                place_intra_waveguide(&wg.with_reference(r), ue, cfg)
            }
        })
        .collect()
}

/// Moves every reference to the nearest position with phase ≡ 0 (mod 2π),
/// then places all antennas.
pub fn align_fcd(waveguides: &[WaveguideSpec], ue: Point3, cfg: &SystemConfig) -> Result<Vec<PlacementResult>> {
    if waveguides.is_empty() {
        return Err(Error::InvalidConfig("at least one waveguide is required".into()));
    }
    waveguides
        .iter()
        .map(|wg| {
            let r = nearest_phase_position(wg, ue, 0.0, cfg)?;
            place_intra_waveguide(&wg.with_reference(r), ue, cfg)
        })
        .collect()
}

/// Anchors of a set of placements are pairwise congruent within `tol`.
pub fn anchors_aligned(placements: &[PlacementResult], tol: f64) -> bool {
    placements.iter().all(|p| {
        placements
            .iter()
            .all(|q| phase_distance(p.phase_anchor, q.phase_anchor) <= tol)
    })
}

/// Default congruence check used by channel construction.
pub fn is_coherent(placement: &PlacementResult) -> bool {
    placement.max_congruence_error() <= PHASE_TOLERANCE
}
