//! Invariants checked on random inputs.

use damped_euler::burgers::{evolve_fan, lifespan_for_slope, InitialProfile, Lifespan, ProfileFamily};
use damped_euler::cli::output::num;
use damped_euler::cli::{ExperimentConfig, Mode};
use damped_euler::euler2d::{snapshot, FlowState2D, Grid2D};
use damped_euler::DampingLaw;
use proptest::prelude::*;

fn arb_law() -> impl Strategy<Value = DampingLaw> {
    (0.1f64..3.0, prop_oneof![Just(0.0), Just(1.0), 0.0f64..3.0]).prop_map(|(m, l)| DampingLaw::new(m, l).unwrap())
}

fn log1p_of(l: Lifespan) -> f64 {
    match l {
        Lifespan::Global => f64::INFINITY,
        Lifespan::Finite { log1p } => log1p,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn value_times_xi_is_constant_along_characteristics(law in arb_law(), eps in 0.01f64..0.2, frac in 0.0f64..0.9) {
        let p = InitialProfile::slope_normalized(ProfileFamily::Bump { amplitude: 1.0 }, 1.0, -1.0, 101).unwrap();
        let life = lifespan_for_slope(eps, p.min_slope(), &law).unwrap();
        let t = if life.is_global() { 50.0 * frac } else { frac * life.time().min(1e6) };
        let fan = evolve_fan(&p, eps, &law, t).unwrap();
        let xi = law.xi(t);
        for (r, s) in fan.records.iter().zip(&p.samples) {
            let want = eps * s.v0;
            prop_assert!((r.value * xi - want).abs() <= 1e-12 * want.abs().max(1e-300));
        }
    }

    #[test]
    fn lifespan_is_non_increasing_in_eps_and_slope(law in arb_law(), eps in 0.01f64..0.5, m in 0.2f64..3.0) {
        let base = log1p_of(lifespan_for_slope(eps, -m, &law).unwrap());
        for k in 1..=10 {
            let f = 1.0 + 0.1 * k as f64;
            let by_eps = log1p_of(lifespan_for_slope(eps * f, -m, &law).unwrap());
            let by_m = log1p_of(lifespan_for_slope(eps, -m * f, &law).unwrap());
            prop_assert!(by_eps <= base * (1.0 + 1e-9), "{} > {}", by_eps, base);
            prop_assert!(by_m <= base * (1.0 + 1e-9), "{} > {}", by_m, base);
        }
    }

    #[test]
    fn snapshots_round_trip_bit_exactly(n in 16usize..40, half in 1.0f64..10.0, t in 0.0f64..100.0, seed in any::<u64>()) {
        let g = Grid2D::new(half, n).unwrap();
        let mut s = FlowState2D::zeros(&g);
        s.t = t;
        let mut x = seed;
        for f in [&mut s.theta, &mut s.u1, &mut s.u2] {
            for v in f.iter_mut() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *v = f64::from_bits(x >> 2);
            }
        }
        let (back, g2) = snapshot::decode(&snapshot::encode(&s, &g), std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(g2, g);
        prop_assert_eq!(back.t.to_bits(), s.t.to_bits());
        for (a, b) in back.fields().iter().zip(s.fields()) {
            prop_assert!(a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn csv_numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn configs_round_trip_with_stable_hashes(mu in 1u32..400, lambda in 0u32..400, eps in 1e-4f64..1.0, seed in any::<u64>()) {
        let mut c = ExperimentConfig::default_for(Mode::Burgers);
        c.law.mu = format!("{}", mu as f64 / 100.0);
        c.law.lambda = format!("{}", lambda as f64 / 100.0);
        c.eps = eps;
        c.seed = seed;
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back.eps.to_bits(), eps.to_bits());
        prop_assert_eq!(back.hash(), c.hash());
        prop_assert_eq!(back, c);
    }
}
