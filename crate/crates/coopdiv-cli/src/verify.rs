use std::time::Instant;

use coopdiv::analysis::{
    dmg_curve, monte_carlo, optimal_via_draf, optimal_via_ndraf, optimal_via_ndsdaf, CurveFamily, Decoder,
    MonteCarloOptions, Q,
};
use coopdiv::channel::{hypercube_check, lambda_cdf_check, noise_covariance};
use coopdiv::codes::{
    code_metrics, default_gamma, diagonal_restricted_code, full_cda_code, gamma_matrix, integral_restriction_code,
    perfect_lattice_generator, qam, truncation_check, LatticeGenerator, NVD_TOL, UNITARY_TOL,
};
use coopdiv::linalg::{unitarity_defect, CMat};
use coopdiv::strategies::{RelayRule, Scheme, SchemeConfig, SchemeKind};
use coopdiv::C64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::Table;
use crate::simulate::siso_outage;

const SIGMAS: f64 = 3.0;

/// Generator of dimension `n`, with one entry nudged off the unit circle
/// when `corrupt` is set.
fn generator_matrix(n: usize, corrupt: bool) -> CMat {
    let mut m = perfect_lattice_generator(n).expect("supported dimension").matrix;
    if corrupt {
        m[(0, 0)] *= C64::new(1.001, 0.0);
    }
    m
}

fn unitarity(t: &mut Table, corrupt: bool) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=4 {
        worst = worst.max(unitarity_defect(&generator_matrix(n, corrupt)));
    }
    t.timed("generator unitarity n=1..4", worst <= UNITARY_TOL, format!("max defect {worst:.2e}"), start.elapsed());

    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=8 {
        worst = worst.max(unitarity_defect(&gamma_matrix(n, default_gamma(n)).expect("gamma").matrix));
    }
    t.timed("gamma unitarity n=2..8", worst <= UNITARY_TOL, format!("max defect {worst:.2e}"), start.elapsed());

    let start = Instant::now();
    let q = qam(4).expect("qam");
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for cb in [integral_restriction_code(n, &q), full_cda_code(n, &q)] {
            worst = worst.max(cb.expect("code").dispersion.expect("dispersion").max_unitarity_defect());
        }
    }
    t.timed("dispersion maps unitarity n=2..4", worst <= UNITARY_TOL, format!("max defect {worst:.2e}"), start.elapsed());

    // The gate itself must reject a generator that is not unitary.
    let rejected = LatticeGenerator::from_matrix(generator_matrix(2, true), "corrupted").is_err();
    t.row("negative control: corrupted generator rejected", rejected, "entry (0,0) scaled by 1.001");
}

fn nvd(t: &mut Table) {
    let q = qam(4).expect("qam");
    for n in [2, 3] {
        let start = Instant::now();
        let m = code_metrics(&diagonal_restricted_code(n, &q).expect("code"), u64::MAX, 0).expect("metrics");
        t.timed(
            format!("diagonal n={n} 4-QAM min product distance"),
            m.exhaustive && m.min_product_distance >= 1.0 - NVD_TOL,
            format!("{:.9} over {} pairs", m.min_product_distance, m.pairs_scanned),
            start.elapsed(),
        );
    }
    let start = Instant::now();
    let m = code_metrics(&full_cda_code(2, &q).expect("code"), u64::MAX, 0).expect("metrics");
    let det = m.min_det.unwrap_or(0.0);
    t.timed(
        "full CDA n=2 4-QAM min determinant",
        m.exhaustive && det > NVD_TOL,
        format!("{det:.6} over {} pairs", m.pairs_scanned),
        start.elapsed(),
    );
}

fn bounds(t: &mut Table, samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3] {
        let start = Instant::now();
        let mut ok = true;
        let mut worst = f64::NEG_INFINITY;
        for th in [0.05, 0.1, 0.3, 0.5] {
            let c = hypercube_check(n, th, samples, &mut rng);
            ok &= c.holds(SIGMAS);
            worst = worst.max((c.empirical - c.bound) / c.sigma.max(f64::MIN_POSITIVE));
        }
        t.timed(
            format!("hypercube bound n={n}"),
            ok,
            format!("{samples} samples, worst excess {worst:+.2} sigma"),
            start.elapsed(),
        );
    }
    let start = Instant::now();
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for z in [0.05, 0.1, 0.3] {
        let c = lambda_cdf_check(2, z, samples, &mut rng);
        ok &= c.holds(SIGMAS);
        worst = worst.max((c.empirical - c.bound) / c.sigma.max(f64::MIN_POSITIVE));
    }
    t.timed("lambda CDF bound n=2", ok, format!("{samples} samples, worst excess {worst:+.2} sigma"), start.elapsed());
}

/// Worst entry of `|C − (1 + Σ|h_i|²) I|` relative to the diagonal target.
pub fn whiteness_error(h: &[C64], maps: &[CMat], draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = noise_covariance(h, maps, draws, &mut rng);
    let target = 1.0 + h.iter().map(|x| x.norm_sqr()).sum::<f64>();
    let expect = CMat::identity(c.nrows(), c.ncols()) * C64::new(target, 0.0);
    (c - expect).iter().map(|z| z.norm()).fold(0.0, f64::max) / target
}

/// Relay channels used for the whiteness check.
pub fn whiteness_channels() -> [Vec<C64>; 3] {
    [
        vec![C64::new(0.8, -0.3), C64::new(-0.4, 1.1)],
        vec![C64::new(1.5, 0.2), C64::new(0.1, 0.1)],
        vec![C64::new(-0.2, -0.9), C64::new(0.6, 0.6)],
    ]
}

fn whiteness(t: &mut Table, draws: usize) {
    let start = Instant::now();
    let cb = integral_restriction_code(3, &qam(4).expect("qam")).expect("code");
    let maps = &cb.dispersion.as_ref().expect("dispersion").maps[1..];
    let worst = whiteness_channels()
        .iter()
        .enumerate()
        .map(|(i, h)| whiteness_error(h, maps, draws, 30 + i as u64))
        .fold(0.0, f64::max);
    t.timed(
        "relay noise whiteness n=3",
        worst < 0.02,
        format!("{draws} draws, worst relative error {worst:.4}"),
        start.elapsed(),
    );
}

fn curves(t: &mut Table) {
    let start = Instant::now();
    let mut ok = true;
    for n in 2..=8i64 {
        let opt = dmg_curve(&CurveFamily::Optimal { n }).expect("curve");
        let routes = [optimal_via_ndsdaf(n), optimal_via_ndraf(n), optimal_via_draf(n)];
        ok &= routes.iter().all(|c| c.as_ref().is_ok_and(|c| c.breakpoints() == opt.breakpoints()));
        for k in 0..=200 {
            let r = Q::new(k, 200);
            let two_r = (Q::from_integer(1) - r * 2).max(Q::from_integer(0));
            ok &= opt.eval(r) == Q::from_integer(n - 1) * two_r + (Q::from_integer(1) - r);
        }
        let pep = dmg_curve(&CurveFamily::PepUniversal { n }).expect("curve");
        ok &= pep.breakpoints().iter().chain(opt.breakpoints()).all(|&(r, _)| pep.eval(r) <= opt.eval(r));
        let alpha = dmg_curve(&CurveFamily::AlphaScaled { n, alpha: Q::from_integer(1) }).expect("curve");
        ok &= alpha.breakpoints() == opt.breakpoints();
        for m in 1..=n {
            let c = dmg_curve(&CurveFamily::MultiAntenna { n, m }).expect("curve");
            ok &= c.eval(Q::from_integer(0)) == Q::from_integer(n * m * m);
        }
    }
    t.timed(
        "curve identities n=2..8",
        ok,
        "closed form, three routes, PEP dominance, alpha=1, multi-antenna at r=0",
        start.elapsed(),
    );
}

fn truncation(t: &mut Table) {
    let start = Instant::now();
    let q = qam(4).expect("qam");
    let mut ok = true;
    let mut checked = 0;
    for n in [2usize, 3] {
        for cb in [diagonal_restricted_code(n, &q).expect("code"), full_cda_code(n, &q).expect("code")] {
            for mask in 1..(1u32 << n) - 1 {
                let keep: Vec<usize> = (0..n).filter(|r| mask >> r & 1 == 1).collect();
                ok &= truncation_check(&cb, &keep, 200, mask as u64).is_ok_and(|r| r.passed());
                checked += 1;
            }
        }
    }
    t.timed("truncation interlacing n=2,3", ok, format!("{checked} row subsets x 200 pairs"), start.elapsed());
}

fn siso(t: &mut Table, trials: u64) {
    let start = Instant::now();
    let rate = 2.0;
    let scheme = Scheme::new(SchemeConfig {
        kind: SchemeKind::NonCooperative,
        qam: 4,
        network_rate: rate,
        ..SchemeConfig::default()
    })
    .expect("scheme");
    let opts = MonteCarloOptions { decoder: Decoder::OutageOracle, ..MonteCarloOptions::fixed(trials) };
    let grid = [0.0, 5.0, 10.0, 15.0, 20.0];
    let b = monte_carlo(&scheme, &grid, &opts, 5).expect("monte carlo");
    let worst = b
        .iter()
        .map(|x| {
            let p = siso_outage(rate, x.snr_db);
            (x.pout() - p).abs() / (p * (1.0 - p) / x.trials as f64).sqrt()
        })
        .fold(0.0, f64::max);
    t.timed(
        "SISO outage closed form",
        worst <= SIGMAS,
        format!("{trials} trials/point, worst {worst:.2} sigma"),
        start.elapsed(),
    );
}

fn determinism(t: &mut Table) {
    let start = Instant::now();
    let scheme = Scheme::new(SchemeConfig {
        kind: SchemeKind::NdSdaf,
        relay_rule: RelayRule::DeltaThreshold { delta: 1.0 },
        ..SchemeConfig::default()
    })
    .expect("scheme");
    let opts = MonteCarloOptions::adaptive(4_000, 20, 16_000);
    let grid = [10.0, 20.0];
    let a = monte_carlo(&scheme, &grid, &opts, 3).expect("monte carlo");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().expect("pool");
    let b = pool.install(|| monte_carlo(&scheme, &grid, &opts, 3)).expect("monte carlo");
    t.timed("Monte Carlo determinism", a == b, "same seed, 2 thread counts", start.elapsed());
}

pub struct VerifyOptions {
    pub samples: usize,
    pub corrupt_generator: bool,
}

pub fn run(opts: &VerifyOptions) -> Table {
    let mut t = Table::default();
    unitarity(&mut t, opts.corrupt_generator);
    nvd(&mut t);
    bounds(&mut t, opts.samples);
    whiteness(&mut t, opts.samples / 2);
    curves(&mut t);
    truncation(&mut t);
    siso(&mut t, opts.samples as u64 / 2);
    determinism(&mut t);
    t
}
