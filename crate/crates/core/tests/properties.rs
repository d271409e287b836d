use num_complex::Complex64;
use pinchlink_core::analytics::{analytic_snr, gain_ratios, joint_gains};
use pinchlink_core::beamforming::{
    coherent_gain, fcd_average_power_ratios, make_fcd_beamformer, make_scd_beamformer, make_sd_beamformer,
    scd_waveguide_weights, static_power_allocation, PhaseMode,
};
use pinchlink_core::channel::{channel_gain, waveguide_port};
use pinchlink_core::geometry::{phase_distance, wrap_phase};
use pinchlink_core::stats::{tree_reduce, Moments};
use pinchlink_core::{BsChannel, JointChannel, Scheme, SystemConfig};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = SystemConfig> {
    (1usize..=256, 1usize..=16, 1usize..=32, 2.0f64..4.0, 2.0f64..3.0, 10.0f64..500.0, 1.0f64..200.0).prop_map(
        |(n_b, k, n_g, alpha, beta, l_b, l_g)| SystemConfig {
            n_b,
            k,
            n_g,
            alpha,
            beta,
            l_b,
            l_g,
            ..SystemConfig::default()
        },
    )
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #[test]
    fn gains_times_baseline_are_the_scheme_snrs(cfg in config()) {
        let d = cfg.distances();
        let bo = analytic_snr(Scheme::BsOnly, &cfg, &d).snr_linear;
        let g = gain_ratios(&cfg);
        prop_assert!(rel(g.v_sd * bo, analytic_snr(Scheme::Sd, &cfg, &d).snr_linear) < 1e-12);
        prop_assert!(rel(g.v_scd * bo, analytic_snr(Scheme::Scd, &cfg, &d).snr_linear) < 1e-12);
        prop_assert!(rel(g.v_fcd * bo, analytic_snr(Scheme::Fcd, &cfg, &d).snr_linear) < 1e-12);
    }

    #[test]
    fn fcd_always_gains_and_orders_the_schemes(cfg in config()) {
        let g = gain_ratios(&cfg);
        prop_assert!(g.v_fcd > 1.0);
        prop_assert!(g.v_fcd >= g.v_scd && g.v_scd >= g.v_sd && g.v_sd > 0.0);
    }

    #[test]
    fn gains_increase_in_ng_and_ratio(n_b in 1.0f64..512.0, k in 1.0f64..32.0, n_g in 1.0f64..64.0, r in 1e-3f64..1e3) {
        let a = joint_gains(n_b, k, n_g, r);
        let more_ng = joint_gains(n_b, k, n_g + 1.0, r);
        let more_r = joint_gains(n_b, k, n_g, r * 1.01);
        for b in [more_ng, more_r] {
            prop_assert!(b.v_sd > a.v_sd && b.v_scd > a.v_scd && b.v_fcd > a.v_fcd);
        }
    }

    #[test]
    fn proportional_split_achieves_the_gain_sum(p in prop::collection::vec(1e-6f64..1e3, 1..16)) {
        let w = scd_waveguide_weights(&p).unwrap();
        let total: f64 = p.iter().sum();
        prop_assert!(rel(w.iter().sum::<f64>(), 1.0) < 1e-12);
        prop_assert!(rel(coherent_gain(&p, &w), total) < 1e-12);
    }

    #[test]
    fn static_and_average_allocations_sum_to_one(cfg in config()) {
        for s in [Scheme::BsOnly, Scheme::Sd, Scheme::Scd] {
            let a = static_power_allocation(s, &cfg).unwrap();
            prop_assert!((a.bs_fraction + a.waveguide_total() - 1.0).abs() <= 1e-12);
        }
        let f = fcd_average_power_ratios(&cfg).unwrap();
        prop_assert!((f.bs_fraction + f.waveguide_total() - 1.0).abs() <= 1e-12);
        prop_assert!(f.waveguide_fractions.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn beamformers_are_unit_norm_and_ordered(
        h in prop::collection::vec(complex(), 1..16),
        k in 1usize..8,
        phi in 0.0f64..core::f64::consts::TAU,
        theta in 0.0f64..core::f64::consts::TAU,
    ) {
        prop_assume!(h.iter().any(|c| c.norm() > 1e-3));
        let cfg = SystemConfig { n_b: h.len(), k, ..SystemConfig::default() };
        let bs = BsChannel::new(h, &cfg);
        let d = cfg.distances();
        let amps: Vec<f64> = d.iter().map(|&l| waveguide_port(l, 0.0, &cfg).norm()).collect();

        // every waveguide shares one anchor, as after SCD alignment
        let aligned: Vec<Complex64> = d.iter().map(|&l| waveguide_port(l, phi, &cfg)).collect();
        let h_scd = JointChannel::new(bs.clone(), &aligned);
        let zero: Vec<Complex64> = d.iter().map(|&l| waveguide_port(l, 0.0, &cfg)).collect();
        let h_fcd = JointChannel::new(bs.clone(), &zero);

        let sd = make_sd_beamformer(&bs, &cfg).unwrap();
        let scd = make_scd_beamformer(&bs, &amps, &vec![phi; k], PhaseMode::Placement).unwrap();
        let fcd = make_fcd_beamformer(&h_fcd).unwrap();
        for w in [&sd, &scd, &fcd] {
            prop_assert!((w.norm() - 1.0).abs() < 1e-9);
        }

        let g_sd = channel_gain(&h_scd, &sd).unwrap();
        let g_scd = channel_gain(&h_scd, &scd).unwrap();
        let g_fcd = channel_gain(&h_fcd, &fcd).unwrap();
        prop_assert!(g_fcd >= g_scd * (1.0 - 1e-12));
        prop_assert!(g_scd >= g_sd * (1.0 - 1e-12));
        prop_assert!(rel(g_fcd, h_fcd.norm_sqr()) < 1e-12);

        // a global phase on w does not change |h·w|
        let rot = Complex64::from_polar(1.0, theta);
        let spun: Vec<Complex64> = fcd.weights.iter().map(|w| w * rot).collect();
        prop_assert!(rel(h_fcd.apply(&spun).unwrap().norm_sqr(), g_fcd) < 1e-12);
    }

    #[test]
    fn wrapped_phases_land_in_range(x in -1e4f64..1e4) {
        let w = wrap_phase(x);
        prop_assert!((0.0..2.0 * std::f64::consts::PI).contains(&w));
        prop_assert!(phase_distance(w, x) < 1e-9);
    }

    #[test]
    fn tree_reduce_matches_a_single_pass(xs in prop::collection::vec(-1e3f64..1e3, 2..400), chunk in 1usize..64) {
        let whole: Moments = xs.iter().copied().collect();
        let parts: Vec<Moments> = xs.chunks(chunk).map(|c| c.iter().copied().collect()).collect();
        let t = tree_reduce(&parts);
        prop_assert_eq!(t.n, whole.n);
        prop_assert!((t.mean - whole.mean).abs() < 1e-9);
        prop_assert!((t.m2 - whole.m2).abs() <= 1e-9 * whole.m2.max(1.0));
    }
}
