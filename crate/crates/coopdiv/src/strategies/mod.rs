//! Transmission schedules turning a fading draw, noise and an information
//! index into the destination's equivalent decoding problem.

mod config;
mod scheme;
mod transcript;

pub use config::{ndsdaf_relay_decision, CodeChoice, RelayRule, SchemeConfig, SchemeKind};
pub use scheme::{
    network_rate_accounting, run_draf_frame, run_ndraf_frame, run_ndsdaf_frame, run_noncoop_frame, EnergyModel,
    RateAccounting, Scheme,
};
pub use transcript::{FrameTranscript, SlotDump, SlotRecord, TranscriptDump};

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::channel::{sample_fading, sample_noise, FadingDistribution, FadingRealization, NoiseDraw};
    use crate::codes::truncate_rows;
    use crate::decoding::ml_decode;
    use crate::linalg::CMat;
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn config(kind: SchemeKind, users: usize, qam: usize, rate: f64) -> SchemeConfig {
        SchemeConfig {
            kind,
            users,
            qam,
            network_rate: rate,
            relay_rule: RelayRule::OutageExact,
            skip_cooperation_above_r_half: false,
            ..SchemeConfig::default()
        }
    }

    fn all_schemes() -> Vec<Scheme> {
        let mut out = Vec::new();
        for users in [3, 4] {
            out.push(Scheme::new(config(SchemeKind::NonCooperative, users, 4, 2.0)).unwrap());
            out.push(Scheme::new(config(SchemeKind::NdSdaf, users, 4, 1.0)).unwrap());
            out.push(Scheme::new(config(SchemeKind::NdRaf, users, 4, 1.0)).unwrap());
            out.push(Scheme::new(config(SchemeKind::NdAaf, users, 4, 1.0)).unwrap());
            out.push(Scheme::new(SchemeConfig {
                code: CodeChoice::IntegralRestriction,
                ..config(SchemeKind::NdRaf, users, 4, 1.0)
            }).unwrap());
        }
        out.push(Scheme::new(config(SchemeKind::Draf, 3, 4, 2.0)).unwrap());
        out
    }

    fn ones(n: usize) -> FadingRealization {
        FadingRealization {
            g: vec![c(1.0, 0.0); n],
            h: vec![c(1.0, 0.0); n],
        }
    }

    #[test]
    fn slot_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in all_schemes() {
            for snr_db in [5.0, 20.0] {
                let snr = 10f64.powf(snr_db / 10.0);
                for _ in 0..5 {
                    let f = sample_fading(&FadingDistribution::Rayleigh, s.n(), &mut rng);
                    let w = sample_noise(s.n(), s.max_schedule_length(), &mut rng);
                    let idx = rng.random_range(0..s.index_count());
                    let t = s.run_frame(&f, &w, snr, idx).unwrap();
                    assert_eq!(t.observation_count(), s.schedule_length(snr), "{:?}", s.kind());
                    assert_eq!(t.slots.len(), s.schedule_length(snr));
                    assert!(t.cooperating.iter().all(|&u| (2..=s.n()).contains(&u)));
                }
            }
        }
    }

    #[test]
    fn skipping_shortens_nd_schedules() {
        let cfg = SchemeConfig {
            skip_cooperation_above_r_half: true,
            ..config(SchemeKind::NdRaf, 3, 16, 8.0 / 3.0)
        };
        let s = Scheme::new(cfg).unwrap();
        assert_eq!(s.schedule_length(10.0), 2);
        assert_eq!(s.schedule_length(1e6), 3);
        // r = 1/2 exactly does not cooperate.
        assert_eq!(s.schedule_length(2f64.powf(16.0 / 3.0)), 2);
    }

    #[test]
    fn noiseless_frames_decode_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in all_schemes() {
            for _ in 0..10 {
                let f = sample_fading(&FadingDistribution::Rayleigh, s.n(), &mut rng);
                let w = NoiseDraw::zero(s.n(), s.max_schedule_length());
                let idx = rng.random_range(0..s.index_count());
                let t = s.run_frame(&f, &w, 100.0, idx).unwrap();
                assert_eq!(ml_decode(&t.decode_problem().unwrap()).unwrap(), idx, "{:?}", s.kind());
            }
        }
    }

    #[test]
    fn ndsdaf_without_relays_is_direct_path() {
        let s = Scheme::new(config(SchemeKind::NdSdaf, 3, 4, 1.0)).unwrap();
        let mut f = ones(2);
        f.g[1] = c(0.0, 0.0);
        let t = s.run_frame(&f, &NoiseDraw::zero(2, 3), 100.0, 5).unwrap();
        assert!(t.cooperating.is_empty());
        assert_eq!(t.equivalent_codebook.row_labels, vec![0]);
        assert_eq!(t.equivalent_codebook.n, 1);
        assert_eq!(t.slots.len(), 3);
    }

    #[test]
    fn ndsdaf_equivalent_model_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for users in [3, 4] {
            let s = Scheme::new(config(SchemeKind::NdSdaf, users, 4, 1.0)).unwrap();
            let n = s.n();
            for _ in 0..20 {
                let f = sample_fading(&FadingDistribution::Rayleigh, n, &mut rng);
                let w = NoiseDraw::zero(n, s.max_schedule_length());
                let idx = rng.random_range(0..s.index_count());
                let snr = 30.0;
                let t = s.run_frame(&f, &w, snr, idx).unwrap();
                let rows: Vec<usize> = std::iter::once(0).chain(t.cooperating.iter().map(|u| u - 1)).collect();
                let x = truncate_rows(s.code(), &rows).unwrap().codeword(idx as u128);
                let theta = s.theta(snr).unwrap();
                let expected = CMat::from_fn(1, x.ncols(), |_, col| {
                    rows.iter()
                        .enumerate()
                        .map(|(j, &r)| f.h[r] * (x[(j, col)] * theta))
                        .fold(c(0.0, 0.0), |a, b| if b == c(0.0, 0.0) { a } else { a + b })
                });
                assert_eq!(t.equivalent_codebook.row_labels, rows);
                assert_eq!(t.observations, expected);
                let h: Vec<C64> = rows.iter().map(|&r| f.h[r]).collect();
                assert_eq!(t.equivalent_channel, CMat::from_row_slice(1, h.len(), &h));
            }
        }
    }

    #[test]
    fn ndsdaf_relay_errors_propagate() {
        let s = Scheme::new(SchemeConfig {
            relay_rule: RelayRule::DeltaThreshold { delta: 1e-9 },
            ..config(SchemeKind::NdSdaf, 3, 16, 7.0 / 3.0)
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut errors = 0;
        for _ in 0..200 {
            let f = sample_fading(&FadingDistribution::Rayleigh, 2, &mut rng);
            let w = sample_noise(2, 3, &mut rng);
            let idx = rng.random_range(0..s.index_count());
            let t = s.run_frame(&f, &w, 10.0, idx).unwrap();
            errors += t.relay_error() as usize;
        }
        assert!(errors > 0);
    }

    #[test]
    fn ndraf_diagonal_matches_miso_model() {
        let s = Scheme::new(config(SchemeKind::NdRaf, 3, 4, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let f = sample_fading(&FadingDistribution::Rayleigh, 2, &mut rng);
            let w = sample_noise(2, 3, &mut rng);
            let idx = rng.random_range(0..s.index_count());
            let snr = 50.0;
            let t = s.run_frame(&f, &w, snr, idx).unwrap();
            let theta = s.theta(snr).unwrap();
            let x = s.code().codeword(idx as u128);
            let signal = &t.equivalent_channel * &x * c(theta, 0.0);
            let residual = &t.observations - &signal;
            let expect = [w.dest[0], w.dest[1], f.h[1] * w.relay[1][1] + w.dest[2]];
            for (col, e) in expect.iter().enumerate() {
                assert!((residual[(0, col)] - e).norm() < 1e-12);
            }
            assert!((t.noise_variance[2] - (1.0 + f.h[1].norm_sqr())).abs() < 1e-15);
        }
    }

    #[test]
    fn ndraf_forwarding_slot() {
        let s = Scheme::new(config(SchemeKind::NdRaf, 5, 4, 1.0)).unwrap();
        let t = s.run_frame(&ones(4), &NoiseDraw::zero(4, 7), 100.0, 0).unwrap();
        assert!(t.slots[4].transmitted.iter().any(|(u, _)| *u == 2));
        assert_eq!(t.slots[4].slot, 5);
    }

    #[test]
    fn ndraf_unit_channels_sum_columns() {
        for code in [CodeChoice::IntegralRestriction, CodeChoice::FullCda] {
            let s = Scheme::new(SchemeConfig {
                code,
                ..config(SchemeKind::NdRaf, 3, 4, 1.0)
            })
            .unwrap();
            let snr = 10.0;
            let theta = s.theta(snr).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let mut w = sample_noise(2, s.max_schedule_length(), &mut rng);
            for v in &mut w.relay {
                v.iter_mut().for_each(|x| *x = c(0.0, 0.0));
            }
            let idx = 37 % s.index_count();
            let t = s.run_frame(&ones(2), &w, snr, idx).unwrap();
            let x = s.code().codeword(idx as u128);
            let l = s.max_schedule_length() - x.ncols();
            for col in 0..x.ncols() {
                let sum: C64 = x.column(col).iter().sum::<C64>() * theta;
                let got = t.observations[(0, l + col)] - w.dest[l + col];
                assert!((got - sum).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn integral_dispersion_reproduces_codebook() {
        for users in [3, 4, 5] {
            let s = Scheme::new(SchemeConfig {
                code: CodeChoice::IntegralRestriction,
                ..config(SchemeKind::NdRaf, users, 4, 1.0)
            })
            .unwrap();
            let n = s.n();
            let snr = 10.0;
            let theta = s.theta(snr).unwrap();
            let w = NoiseDraw::zero(n, s.max_schedule_length());
            for idx in [0, 1, 77 % s.index_count(), s.index_count() - 1] {
                let t = s.run_frame(&ones(n), &w, snr, idx).unwrap();
                let x = s.code().codeword(idx as u128);
                let stage2 = &t.slots[n..];
                let assembled = CMat::from_fn(n, n, |u, col| {
                    stage2[col].transmitted.iter().find(|(user, _)| *user == u + 1).unwrap().1 / theta
                });
                assert!(crate::linalg::max_abs_diff(&assembled, &x) < 1e-12);
            }
        }
    }

    #[test]
    fn draf_frame_equations() {
        let s = Scheme::new(config(SchemeKind::Draf, 3, 4, 2.0)).unwrap();
        assert_eq!(s.max_schedule_length(), 4);
        let snr = 10.0;
        let theta = s.theta(snr).unwrap();
        let idx = 200;
        let x = s.code().codeword(idx as u128);
        let f = FadingRealization {
            g: vec![c(1.0, 0.0), c(0.3, -0.4)],
            h: vec![c(0.8, 0.1), c(-0.5, 0.9)],
        };
        let t = s.run_frame(&f, &NoiseDraw::zero(2, 4), snr, idx).unwrap();
        let rx: Vec<C64> = t.slots.iter().map(|s| s.destination).collect();
        assert!((rx[0] - f.h[0] * x[(0, 0)] * theta).norm() < 1e-12);
        let even = (f.h[1] * f.g[1] * x[(0, 0)] + f.h[0] * x[(1, 0)]) * theta;
        assert!((rx[1] - even).norm() < 1e-12);

        let mut silent = f.clone();
        silent.g[1] = c(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = sample_noise(2, 4, &mut rng);
        let t = s.run_frame(&silent, &w, snr, idx).unwrap();
        for (pos, slot) in t.slots.iter().enumerate() {
            let (p, k) = (pos % 2, pos / 2);
            let direct = f.h[0] * x[(p, k)] * theta + w.dest[pos];
            let relay = if p == 1 { f.h[1] * w.relay[1][pos - 1] } else { c(0.0, 0.0) };
            assert!((slot.destination - direct - relay).norm() < 1e-12);
        }
    }

    #[test]
    fn draf_whitened_reduction() {
        let s = Scheme::new(config(SchemeKind::Draf, 3, 4, 2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let f = sample_fading(&FadingDistribution::Rayleigh, 2, &mut rng);
            let idx = rng.random_range(0..s.index_count());
            let t = s.run_frame(&f, &NoiseDraw::zero(2, 4), 31.6, idx).unwrap();
            let x = s.code().codeword(idx as u128);
            let z = &t.equivalent_channel * &x * c(t.theta, 0.0);
            assert!(crate::linalg::max_abs_diff(&z, &t.observations) <= 1e-9);
            let s2 = 1.0 + f.h[1].norm_sqr();
            assert_eq!(t.noise_variance, vec![1.0, 1.0, 1.0 / s2, 1.0 / s2]);
        }
    }

    #[test]
    fn average_energy_per_slot_is_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let snr = 20.0;
        for s in all_schemes() {
            // ND-SDAF accounting assumes every relay transmits.
            let forced = Scheme::new(SchemeConfig {
                relay_rule: RelayRule::DeltaThreshold { delta: 1e-300 },
                ..s.config().clone()
            })
            .unwrap();
            let trials = 20_000;
            let mut energy = 0.0;
            for _ in 0..trials {
                let f = sample_fading(&FadingDistribution::Rayleigh, s.n(), &mut rng);
                let w = sample_noise(s.n(), s.max_schedule_length(), &mut rng);
                let idx = rng.random_range(0..s.index_count());
                let t = forced.run_frame(&f, &w, snr, idx).unwrap();
                energy += t.slots.iter().flat_map(|s| s.transmitted.iter()).map(|(_, z)| z.norm_sqr()).sum::<f64>();
            }
            let per_slot = energy / (trials * s.max_schedule_length()) as f64;
            assert!((per_slot - snr).abs() < 0.03 * snr, "{:?}: {per_slot}", s.kind());
        }
    }

    #[test]
    fn capped_relay_energy() {
        let s = Scheme::new(SchemeConfig {
            enforce_power_cap: true,
            ..config(SchemeKind::NdAaf, 3, 4, 1.0)
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let snr = 100.0;
        let trials = 10_000;
        let mut energy = 0.0;
        for _ in 0..trials {
            let f = sample_fading(&FadingDistribution::Rayleigh, 2, &mut rng);
            let w = sample_noise(2, 3, &mut rng);
            let t = s.run_frame(&f, &w, snr, rng.random_range(0..16)).unwrap();
            let b = t.amplification[0];
            assert!(b <= (snr / (f.g[1].norm_sqr() * snr + 1.0)).sqrt() + 1e-12);
            energy += t.slots[2].transmitted[0].1.norm_sqr();
        }
        assert!(energy / trials as f64 <= snr * (1.0 + 1.0 / snr));
    }

    #[test]
    fn rate_accounting_examples() {
        let raf = Scheme::new(config(SchemeKind::NdRaf, 3, 16, 8.0 / 3.0)).unwrap();
        let acc = raf.rate_accounting(true);
        assert_eq!((acc.info_symbols, acc.slots_per_frame), (2, 3));
        assert!((acc.bpncu_per_constellation_bit() * 4.0 - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(raf.rate_accounting(false).slots_per_frame, 2);

        let draf = Scheme::new(config(SchemeKind::Draf, 3, 4, 2.0)).unwrap();
        let acc = draf.rate_accounting(true);
        let enumerated: usize = (0..2).map(|_k| 2).sum();
        assert_eq!(acc.slots_per_frame, enumerated);
        assert_eq!(acc.info_symbols, 4);
        assert_eq!(acc.bpncu_per_constellation_bit() * 2.0, 2.0);

        let direct = Scheme::new(config(SchemeKind::NonCooperative, 3, 4, 2.0)).unwrap();
        assert_eq!(direct.rate_accounting(true).bpncu_per_constellation_bit(), 1.0);
    }

    #[test]
    fn rejects_mismatched_codes() {
        let bad = SchemeConfig {
            code: CodeChoice::Horizontal,
            ..config(SchemeKind::Draf, 3, 4, 2.0)
        };
        assert!(Scheme::new(bad).is_err());
        let s = Scheme::new(config(SchemeKind::Draf, 3, 4, 2.0)).unwrap();
        assert!(run_ndsdaf_frame(&s, &ones(2), &NoiseDraw::zero(2, 4), 10.0, 0).is_err());
        assert!(run_draf_frame(&s, &ones(2), &NoiseDraw::zero(2, 4), 10.0, 0).is_ok());
    }

    #[test]
    fn transcript_dump_serializes() {
        let s = Scheme::new(config(SchemeKind::NdSdaf, 3, 4, 1.0)).unwrap();
        let t = s.run_frame(&ones(2), &NoiseDraw::zero(2, 3), 10.0, 3).unwrap();
        let v = serde_json::to_value(t.dump()).unwrap();
        assert_eq!(v["slots"].as_array().unwrap().len(), 3);
        assert_eq!(v["cooperating"], serde_json::json!([2]));
    }
}
