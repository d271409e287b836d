//! Placement solvers against a brute-force scan of the phase profile.

use core::f64::consts::PI;

use pinchlink_core::geometry::{
    align_fcd, align_scd, anchors_aligned, nearest_phase_position, phase_delay, place_intra_waveguide,
    phase_distance,
};
use pinchlink_core::{Error, Point3, SystemConfig, WaveguideSpec, PHASE_TOLERANCE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * PI;

fn cfg(n_g: usize) -> SystemConfig {
    SystemConfig { n_g, ..SystemConfig::default() }
}

fn random_unit<R: Rng>(rng: &mut R) -> Point3 {
    loop {
        let p = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = p.norm();
        if n > 0.1 && n <= 1.0 {
            return p * (1.0 / n);
        }
    }
}

struct Scene {
    wg: WaveguideSpec,
    ue: Point3,
}

fn random_scene<R: Rng>(rng: &mut R) -> Scene {
    let feed = Point3::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), rng.random_range(5.0..15.0));
    let direction = if rng.random_bool(0.5) { Point3::new(1.0, 0.0, 0.0) } else { random_unit(rng) };
    let length = rng.random_range(5.0..60.0);
    let t_ref = rng.random_range(0.0..length);
    let ue = Point3::new(rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0), rng.random_range(0.0..2.0));
    let wg = WaveguideSpec::new(feed, direction, feed + direction * t_ref, length).unwrap();
    Scene { wg, ue }
}

/// Unwrapped ψ at offset `t` evaluated straight from the definition.
fn psi(s: &Scene, t: f64, c: &SystemConfig) -> f64 {
    phase_delay(s.wg.point_at(t), s.wg.feed, s.ue, c)
}

/// Offsets in `[lo, hi]` where ψ crosses `target + 2πm` for some integer m,
/// located to within `step`.
fn scan_roots(s: &Scene, target: f64, lo: f64, hi: f64, step: f64, c: &SystemConfig) -> Vec<f64> {
    let cell = |t: f64| ((psi(s, t, c) - target) / TWO_PI).floor();
    let mut roots = Vec::new();
    let mut t = lo;
    let mut prev = cell(t);
    while t < hi {
        let next = (t + step).min(hi);
        let m = cell(next);
        if m != prev {
            roots.push(0.5 * (t + next));
        }
        prev = m;
        t = next;
    }
    roots
}

#[test]
fn nearest_position_matches_dense_scan() {
    let c = cfg(1);
    let step = c.lambda_g() / 1000.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..100 {
        let s = random_scene(&mut rng);
        let target = rng.random_range(0.0..TWO_PI);
        let t_ref = s.wg.reference_offset();
        // consecutive solutions are less than 2λ apart, so ±4λ holds the nearest one
        let w = 4.0 * c.lambda();
        let roots = scan_roots(&s, target, (t_ref - w).max(0.0), (t_ref + w).min(s.wg.length_limit), step, &c);

        match nearest_phase_position(&s.wg, s.ue, target, &c) {
            Ok(p) => {
                let t = s.wg.offset_of(p);
                assert!(phase_distance(psi(&s, t, &c), target) < PHASE_TOLERANCE);
                let best = roots
                    .iter()
                    .map(|r| (r - t_ref).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!((t - t_ref).abs() <= best + step, "solver {} vs scan {best}", (t - t_ref).abs());
                checked += 1;
            }
            Err(Error::PlacementInfeasible { .. }) => assert!(roots.is_empty()),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(checked >= 95);
}

#[test]
fn intra_placement_takes_each_next_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let s = random_scene(&mut rng);
        let n_g = rng.random_range(1..=8);
        let c = cfg(n_g);
        let step = c.lambda_g() / 1000.0;
        let Ok(p) = place_intra_waveguide(&s.wg, s.ue, &c) else {
            // only legal when the tail of the waveguide is too short
            let room = s.wg.length_limit - s.wg.reference_offset();
            assert!(room < n_g as f64 * 2.0 * c.lambda());
            continue;
        };
        assert_eq!(p.positions.len(), n_g);
        assert_eq!(p.integer_offsets, (0..n_g as i64).collect::<Vec<_>>());
        p.check_congruence(PHASE_TOLERANCE).unwrap();
        let offsets: Vec<f64> = p.positions.iter().map(|&q| s.wg.offset_of(q)).collect();
        for pair in offsets.windows(2) {
            assert!(pair[1] > pair[0]);
            // ψ' lies in [(n−1), (n+1)]·2π/λ along the axis
            assert!(pair[1] - pair[0] < c.lambda() / (c.n_eff - 1.0) + step);
            assert!(pair[1] - pair[0] > c.lambda() / (c.n_eff + 1.0) - step);
            // no congruent point strictly between neighbours
            let inner = scan_roots(&s, p.phase_anchor, pair[0] + step, pair[1] - step, step, &c);
            assert!(inner.is_empty(), "skipped a solution between {} and {}", pair[0], pair[1]);
        }
        for (q, &phase) in p.positions.iter().zip(&p.phases) {
            assert!((phase_delay(*q, s.wg.feed, s.ue, &c) - phase).abs() < 1e-9);
        }
    }
}

#[test]
fn aligned_anchors_on_random_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let c = cfg(4);
    for _ in 0..20 {
        let ue = Point3::new(rng.random_range(10.0..50.0), rng.random_range(0.0..30.0), 0.0);
        let wgs: Vec<WaveguideSpec> = (0..4)
            .map(|k| {
                let feed = Point3::new(0.0, 10.0 * k as f64, 10.0);
                WaveguideSpec::along_x(feed, rng.random_range(5.0..40.0), 60.0).unwrap()
            })
            .collect();
        let scd = align_scd(&wgs, ue, &c).unwrap();
        assert!(anchors_aligned(&scd, PHASE_TOLERANCE));
        assert_eq!(scd[0].positions[0], wgs[0].reference);
        let fcd = align_fcd(&wgs, ue, &c).unwrap();
        for p in &fcd {
            assert!(phase_distance(p.phase_anchor, 0.0) < PHASE_TOLERANCE);
            p.check_congruence(PHASE_TOLERANCE).unwrap();
        }
        // moves stay well inside one cluster width
        for (p, wg) in fcd.iter().zip(&wgs) {
            assert!(p.positions[0].distance(wg.reference) < 2.0 * c.lambda());
        }
    }
}

#[test]
fn short_waveguide_is_infeasible() {
    let c = cfg(8);
    let wg = WaveguideSpec::along_x(Point3::new(0.0, 0.0, 10.0), 0.95, 1.0).unwrap();
    let err = place_intra_waveguide(&wg, Point3::new(30.0, 5.0, 0.0), &c).unwrap_err();
    assert!(matches!(err, Error::PlacementInfeasible { .. }));
}
