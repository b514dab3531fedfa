use coopdiv::analysis::{dmg_curve, CurveFamily, Q};
use coopdiv::channel::{sample_fading, FadingDistribution, NoiseDraw};
use coopdiv::codes::{
    diagonal_restricted_code, full_cda_code, gamma_matrix, horizontally_restricted_code, integral_restriction_code,
    qam, slotted_diagonal_code, truncation_check, Codebook,
};
use coopdiv::decoding::{ml_decode, weighted_metric};
use coopdiv::linalg::{max_abs_diff, unitarity_defect, CMat};
use coopdiv::strategies::{RelayRule, Scheme, SchemeConfig, SchemeKind};
use coopdiv::C64;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c64() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn small_codes() -> Vec<Codebook> {
    let q = qam(4).unwrap();
    vec![
        horizontally_restricted_code(2, &q).unwrap(),
        diagonal_restricted_code(2, &q).unwrap(),
        diagonal_restricted_code(3, &q).unwrap(),
        slotted_diagonal_code(2, &q).unwrap(),
        integral_restriction_code(2, &q).unwrap(),
        full_cda_code(2, &q).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_is_linear(which in 0usize..6, f in prop::collection::vec(c64(), 4), g in prop::collection::vec(c64(), 4), a in c64()) {
        let cb = &small_codes()[which];
        let k = cb.info_symbols_per_matrix();
        let (f, g) = (&f[..k.min(4)], &g[..k.min(4)]);
        let mix: Vec<C64> = f.iter().zip(g).map(|(x, y)| a * x + y).collect();
        let lhs = cb.encode(&mix);
        let rhs = cb.encode(f) * a + cb.encode(g);
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn index_round_trips_through_symbols(which in 0usize..6, raw in any::<u64>()) {
        let cb = &small_codes()[which];
        let idx = raw as u128 % cb.len();
        prop_assert!(max_abs_diff(&cb.codeword(idx), &cb.encode(&cb.symbols(idx))) < 1e-12);
        let m = cb.constellation.size() as u128;
        let back = cb.symbols(idx).iter().rev().fold(0u128, |acc, z| {
            acc * m + cb.constellation.points.iter().position(|p| p == z).unwrap() as u128
        });
        prop_assert_eq!(back, idx);
    }

    #[test]
    fn metric_is_scale_invariant(y in prop::collection::vec(c64(), 6), s in prop::collection::vec(c64(), 6),
                                 v in prop::collection::vec(0.1..5.0f64, 6), c in c64()) {
        prop_assume!(c.norm() > 1e-3);
        let base = weighted_metric(&y, &s, &v);
        let cy: Vec<C64> = y.iter().map(|z| z * c).collect();
        let cs: Vec<C64> = s.iter().map(|z| z * c).collect();
        let cv: Vec<f64> = v.iter().map(|x| x * c.norm_sqr()).collect();
        prop_assert!((weighted_metric(&cy, &cs, &cv) - base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn noiseless_ml_recovers_the_index(which in 0usize..6, seed in any::<u64>(), raw in any::<u64>()) {
        let cb = &small_codes()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = CMat::from_fn(2, cb.n, |_, _| coopdiv::channel::cn01(&mut rng));
        let idx = raw as u128 % cb.len();
        let y = &h * cb.codeword(idx);
        let p = coopdiv::decoding::DecodeProblem::new(h, y, cb, 1.0, &vec![1.0; 2 * cb.t]).unwrap();
        prop_assert_eq!(ml_decode(&p).unwrap() as u128, idx);
    }

    #[test]
    fn gamma_is_unitary_on_the_circle(n in 1usize..9, phase in 0.0..std::f64::consts::TAU) {
        let g = gamma_matrix(n, C64::from_polar(1.0, phase)).unwrap();
        prop_assert!(unitarity_defect(&g.matrix) < 1e-12);
        let gn = g.pow(n);
        prop_assert!(max_abs_diff(&gn, &(CMat::identity(n, n) * g.gamma)) < 1e-12);
    }

    #[test]
    fn curves_are_non_increasing(n in 2i64..9, num in 0i64..200, k in 1i64..20) {
        for family in [
            CurveFamily::Optimal { n },
            CurveFamily::PepRandom { n, k: Q::from_integer(k) },
            CurveFamily::MultiAntenna { n, m: 1 + (k % n) },
            CurveFamily::RateDrop { base: Box::new(CurveFamily::TwoProduct { n }), m: Q::new(k, 3) },
        ] {
            let c = dmg_curve(&family).unwrap();
            let r = Q::new(num, 100);
            prop_assert!(c.eval(r) >= c.eval(r + Q::new(1, 100)));
            prop_assert!(c.eval(r) >= Q::from_integer(0));
        }
    }

    #[test]
    fn sum_and_max_dominate(n in 2i64..9, num in 0i64..120) {
        let a = dmg_curve(&CurveFamily::TwoProduct { n }).unwrap();
        let b = dmg_curve(&CurveFamily::PepUniversal { n }).unwrap();
        let r = Q::new(num, 100);
        let s = a.sum(&b, "s");
        let m = a.max(&b, "m");
        prop_assert_eq!(s.eval(r), a.eval(r) + b.eval(r));
        prop_assert_eq!(m.eval(r), a.eval(r).max(b.eval(r)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truncation_keeps_residual_distances(n in 2usize..4, mask in 1u32..7, seed in any::<u64>()) {
        let keep: Vec<usize> = (0..n).filter(|r| mask >> r & 1 == 1).collect();
        prop_assume!(!keep.is_empty() && keep.len() < n);
        let cb = diagonal_restricted_code(n, &qam(4).unwrap()).unwrap();
        let r = truncation_check(&cb, &keep, 50, seed).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn frames_decode_without_noise(kind in 0usize..4, seed in any::<u64>(), snr_db in 5.0..40.0f64) {
        let kind = [SchemeKind::NonCooperative, SchemeKind::NdSdaf, SchemeKind::NdRaf, SchemeKind::Draf][kind];
        let qam_size = if kind == SchemeKind::Draf { 4 } else { 16 };
        let s = Scheme::new(SchemeConfig {
            kind,
            qam: qam_size,
            relay_rule: RelayRule::DeltaThreshold { delta: 1e-300 },
            skip_cooperation_above_r_half: false,
            ..SchemeConfig::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snr = 10f64.powf(snr_db / 10.0);
        let fading = sample_fading(&FadingDistribution::Rayleigh, s.n(), &mut rng);
        let zero = NoiseDraw::zero(s.n(), s.max_schedule_length());
        let idx = (seed as usize) % s.index_count();
        let t = s.run_frame(&fading, &zero, snr, idx).unwrap();
        prop_assert_eq!(ml_decode(&t.decode_problem().unwrap()).unwrap(), t.transmitted_index);
        prop_assert_eq!(t.slots.len(), s.schedule_length(snr));
    }
}
