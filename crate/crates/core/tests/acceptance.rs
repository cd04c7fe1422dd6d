//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
//!
//! Run with `cargo test -p gle-core --test acceptance`. Reference values come from the
//! brute-force oracles below or from closed forms, never from the code under test.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use gle_core::exact::{
    acceptance_probability, asymptotic_relative_error, calibrate_upper_bound, count_avoid_enum,
    count_avoid_lgv, fixed_time_pmf, upper_bound_holds_for_all,
};
use gle_core::experiments::{
    empirical_tv, gibbs_invariance, run_convergence, run_coupling_test, ConvergenceConfig,
    CouplingConfig, SamplerKind,
};
use gle_core::limit::brownian::{bb_max_tail, bridge_covariance, sample_brownian_bridge};
use gle_core::limit::{
    confluent_check, normalizing_constant_closed_form, normalizing_constant_quadrature,
    ConfluentSign, LimitDensity, QuadratureOptions,
};
use gle_core::sampling::rejection_sample;
use gle_core::stats::covariance_with_se;
use gle_core::{Barrier, EnsembleSpec, LimitSpec, RngHandle, UpRightPath};

const SEED: u64 = 20_240_601;

// Criterion thresholds.
const C1_INSTANCES: usize = 1000;
const C2_INSTANCES: usize = 200;
const C3_RUNS: usize = 100_000;
const C4_DRAWS: u64 = 100_000;
const C4_GLAUBER_STEPS: u64 = 1_000_000;
const C4_TV_EXACT: f64 = 0.02;
const C4_TV_GLAUBER: f64 = 0.05;
const C4_MAX_STATES: usize = 50;
const C7_SAMPLES: usize = 200_000;
const C7_K1_THRESHOLD: f64 = 0.03;
const C7_NOISE_BAND: f64 = 0.01;
const C8_ZC_REL: f64 = 1e-5;
const C8_MASS_ABS: f64 = 1e-4;
const C9_TOL_COARSE: f64 = 0.05;
const C9_TOL_FINE: f64 = 0.005;
const C10_BRIDGES: usize = 100_000;
const C10_GRID: usize = 10_000;
const C10_TAIL_ABS: f64 = 0.015;
const C10_SE: f64 = 3.0;
const C11_N: u64 = 10_000;
const C11_REL: f64 = 0.03;
const C11_N_CAL: u64 = 100;
const C11_N_MAX: u64 = 2000;

struct Outcome {
    pass: bool,
    detail: String,
    info: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, info: Vec::new() }
    }
}

// ---------------------------------------------------------------- brute-force oracle

/// Every up-right path from `x` to `y` in `t` steps, as value vectors.
fn bridges(x: i64, y: i64, t: i64) -> Vec<Vec<i64>> {
    let ups = y - x;
    if ups < 0 || ups > t {
        return Vec::new();
    }
    (0u32..1 << t)
        .filter(|m| m.count_ones() as i64 == ups)
        .map(|m| {
            let mut v = vec![x];
            for s in 0..t {
                v.push(v[s as usize] + i64::from(m >> s & 1 == 1));
            }
            v
        })
        .collect()
}

/// All admissible tuples of `spec`, found by trying every tuple of bridges.
fn brute_force(spec: &EnsembleSpec) -> Vec<Vec<Vec<i64>>> {
    let t = spec.duration();
    let k = spec.k();
    let sets: Vec<Vec<Vec<i64>>> =
        (0..k).map(|i| bridges(spec.x()[i], spec.y()[i], t)).collect();
    let bar = |b: &Barrier, s: usize| match b {
        Barrier::Path(p) => Some(p.values()[s]),
        _ => None,
    };
    let times: Vec<usize> = spec.avoid_set().iter().map(|&u| (u - spec.t0()) as usize).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    if sets.iter().any(|s| s.is_empty()) {
        return out;
    }
    loop {
        let ok = times.iter().all(|&s| {
            let col: Vec<i64> = (0..k).map(|i| sets[i][idx[i]][s]).collect();
            col.windows(2).all(|w| w[0] >= w[1])
                && bar(spec.top(), s).is_none_or(|f| f >= col[0])
                && bar(spec.bottom(), s).is_none_or(|g| col[k - 1] >= g)
        });
        if ok {
            out.push((0..k).map(|i| sets[i][idx[i]].clone()).collect());
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            idx[i] += 1;
            if idx[i] < sets[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn random_unconstrained<R: Rng>(rng: &mut R, t_max: i64, k_max: usize) -> EnsembleSpec {
    let t = rng.random_range(1..=t_max);
    let k = rng.random_range(1..=k_max);
    let mut x = vec![rng.random_range(0..=3)];
    for _ in 1..k {
        let last = *x.last().unwrap();
        x.push(last - rng.random_range(0..=2));
    }
    let mut y: Vec<i64> = x.iter().map(|&xi| xi + rng.random_range(0..=t)).collect();
    for i in 1..k {
        // keep y weakly decreasing and y_i - x_i in [0, T]
        y[i] = y[i].min(y[i - 1]).max(x[i]);
    }
    match EnsembleSpec::new(0, t, x, y) {
        Ok(s) => s,
        Err(_) => random_unconstrained(rng, t_max, k_max),
    }
}

// ---------------------------------------------------------------- criteria

fn c1_determinant() -> Outcome {
    let mut rng = RngHandle::from_seed(SEED).derive(1).rng();
    let mut mismatches = 0;
    let mut nonzero = 0;
    for _ in 0..C1_INSTANCES {
        let spec = random_unconstrained(&mut rng, 6, 3);
        let lgv = count_avoid_lgv(spec.x(), spec.y(), spec.duration());
        let oracle = BigUint::from(brute_force(&spec).len());
        let enumerated = count_avoid_enum(&spec, u64::MAX).expect("small instance");
        if *lgv.value() != oracle || *enumerated.value() != oracle {
            mismatches += 1;
        }
        if !oracle.is_zero() {
            nonzero += 1;
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{mismatches} mismatches over {C1_INSTANCES} instances ({nonzero} non-empty)"),
    )
}

fn c2_pmf() -> Outcome {
    let mut rng = RngHandle::from_seed(SEED).derive(2).rng();
    let one = BigRational::one();
    let mut bad_total = 0;
    let mut bad_table = 0;
    let mut done = 0;
    while done < C2_INSTANCES {
        let spec = random_unconstrained(&mut rng, 6, 3);
        let t = spec.duration();
        if t < 2 {
            continue;
        }
        let states = brute_force(&spec);
        if states.is_empty() {
            continue;
        }
        let m = rng.random_range(1..t);
        let table = fixed_time_pmf(spec.x(), spec.y(), t, m).expect("valid instance");
        let total = table.iter().fold(BigRational::zero(), |acc, (_, p)| acc + &p.0);
        if total != one {
            bad_total += 1;
        }
        let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for s in &states {
            *counts.entry(s.iter().map(|p| p[m as usize]).collect()).or_default() += 1;
        }
        let n = BigInt::from(states.len());
        let table_ok = counts.len() == table.iter().filter(|(_, p)| !p.0.is_zero()).count()
            && counts
                .iter()
                .all(|(l, &c)| table.get(l).0 == BigRational::new(BigInt::from(c), n.clone()));
        if !table_ok {
            bad_table += 1;
        }
        done += 1;
    }
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let fixed = fixed_time_pmf(&[0, 0], &[1, 1], 2, 1).expect("fixed instance");
    let fixed_ok = fixed.iter().filter(|(_, p)| !p.0.is_zero()).count() == 3
        && [[1, 0], [0, 0], [1, 1]].iter().all(|l| fixed.get(l).0 == third);
    Outcome::new(
        bad_total == 0 && bad_table == 0 && fixed_ok,
        format!(
            "{bad_total} sums != 1, {bad_table} tables differ from enumeration over {C2_INSTANCES}; \
             fixed table {}",
            if fixed_ok { "matches" } else { "differs" }
        ),
    )
}

fn c3_acceptance() -> Outcome {
    let spec = EnsembleSpec::new(0, 2, vec![0, 0], vec![1, 1]).unwrap();
    // Oracle: admissible tuples over all tuples.
    let free = bridges(0, 1, 2).len().pow(2);
    let want = BigRational::new(BigInt::from(brute_force(&spec).len()), BigInt::from(free));
    let z = acceptance_probability(&spec, u64::MAX).expect("small instance");
    let exact_ok = z.0 == want && want == BigRational::new(BigInt::from(3), BigInt::from(4));

    let root = RngHandle::from_seed(SEED).derive(3);
    let tries: Vec<f64> = (0..C3_RUNS / 1000)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = root.derive(b as u64).rng();
            let spec = spec.clone();
            (0..1000).map(move |_| rejection_sample(&mut rng, &spec, 1_000_000).unwrap().1 as f64)
        })
        .collect();
    let mean = tries.iter().sum::<f64>() / tries.len() as f64;
    let var = tries.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (tries.len() - 1) as f64;
    let se = (var / tries.len() as f64).sqrt();
    let target = 4.0 / 3.0;
    let mc_ok = (mean - target).abs() <= 3.0 * se;
    Outcome::new(
        exact_ok && mc_ok,
        format!(
            "Z = {z}; mean tries {mean:.5} vs 4/3, |diff| = {:.2} se over {C3_RUNS} runs",
            (mean - target).abs() / se
        ),
    )
}

fn agreement_suite() -> Vec<(&'static str, EnsembleSpec)> {
    let path = |v: Vec<i64>| Barrier::Path(UpRightPath::new(0, v).unwrap());
    vec![
        ("k2 T2", EnsembleSpec::new(0, 2, vec![0, 0], vec![1, 1]).unwrap()),
        ("k2 T4", EnsembleSpec::new(0, 4, vec![1, 0], vec![3, 2]).unwrap()),
        ("k3 T3", EnsembleSpec::new(0, 3, vec![2, 1, 0], vec![3, 2, 2]).unwrap()),
        ("k1 T5", EnsembleSpec::new(0, 5, vec![0], vec![2]).unwrap()),
        (
            "k2 T4 floor",
            EnsembleSpec::new(0, 4, vec![2, 1], vec![4, 3])
                .unwrap()
                .with_bottom(path(vec![0, 1, 1, 2, 2]))
                .unwrap(),
        ),
        (
            "k2 T4 ceiling",
            EnsembleSpec::new(0, 4, vec![1, 0], vec![3, 2])
                .unwrap()
                .with_top(path(vec![2, 2, 3, 3, 4]))
                .unwrap(),
        ),
        (
            "k2 T3 partial S",
            EnsembleSpec::new(0, 3, vec![1, 0], vec![2, 2])
                .unwrap()
                .with_avoid_set([0, 3].into_iter().collect())
                .unwrap(),
        ),
    ]
}

fn c4_agreement() -> Outcome {
    let root = RngHandle::from_seed(SEED).derive(4);
    let suite = agreement_suite();
    let rows: Vec<(String, bool)> = suite
        .par_iter()
        .enumerate()
        .map(|(i, (name, spec))| {
            let h = root.derive(i as u64);
            let states = brute_force(spec).len();
            let mut parts = vec![format!("{name} ({states} states)")];
            let mut ok = states > 0 && states <= C4_MAX_STATES;
            let mut kinds = vec![(SamplerKind::Rejection, C4_DRAWS, C4_TV_EXACT)];
            if spec.is_unconstrained() {
                kinds.push((SamplerKind::Sequential, C4_DRAWS, C4_TV_EXACT));
            }
            kinds.push((SamplerKind::Glauber, C4_GLAUBER_STEPS, C4_TV_GLAUBER));
            for (j, (kind, n, tol)) in kinds.into_iter().enumerate() {
                let tv = empirical_tv(spec, kind, n, h.derive(j as u64), u64::MAX).unwrap();
                ok &= tv <= tol;
                parts.push(format!("{kind:?} {tv:.4}"));
            }
            (parts.join(" "), ok)
        })
        .collect();
    let pass = rows.iter().all(|r| r.1);
    let mut out = Outcome::new(pass, format!("{} instances, TV per sampler below", rows.len()));
    out.info = rows.into_iter().map(|r| r.0).collect();
    out
}

fn c5_coupling() -> Outcome {
    let cfg = CouplingConfig::default();
    let out = run_coupling_test(&cfg, SEED).expect("coupling run");
    let s = &out.report.summary;
    let violations = s["total_violations"].as_u64().unwrap();
    let twin = s["identical_spec_mismatches"].as_u64().unwrap();
    Outcome::new(
        violations == 0 && twin == 0,
        format!(
            "{violations} violations over {} coupled steps on {} pairs (TV low {:.4}, high {:.4})",
            s["total_steps"], cfg.pairs, s["marginal_check"]["tv_low"], s["marginal_check"]["tv_high"]
        ),
    )
}

fn c6_gibbs() -> Outcome {
    let cases = [
        (EnsembleSpec::new(0, 4, vec![1, 0], vec![3, 2]).unwrap(), (1, 3)),
        (EnsembleSpec::new(0, 5, vec![1, 0], vec![4, 3]).unwrap(), (1, 4)),
        (EnsembleSpec::new(0, 5, vec![2, 0], vec![4, 2]).unwrap(), (0, 5)),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (spec, w) in cases {
        let out = gibbs_invariance(&spec, w, (1, 1), u64::MAX).unwrap();
        all &= out.equal && out.states > 1 && out.conditionings > 1;
        parts.push(format!("{} states/{} cond", out.states, out.conditionings));
    }
    Outcome::new(all, format!("exact equality of laws: {}", parts.join(", ")))
}

fn c7_convergence() -> Outcome {
    let k1 = ConvergenceConfig {
        t_values: vec![400],
        n_samples: C7_SAMPLES,
        write_samples: false,
        ..ConvergenceConfig::default()
    };
    let out1 = run_convergence(&k1, SEED).expect("k=1 run");
    let d1 = out1.report.statistics[0]["max_sup_cdf_distance"].as_f64().unwrap();

    let k2 = ConvergenceConfig {
        a: vec![1.0, -1.0],
        b: vec![1.0, -1.0],
        t_values: vec![50, 100, 200, 400],
        n_samples: C7_SAMPLES,
        write_samples: false,
        ..ConvergenceConfig::default()
    };
    let out2 = run_convergence(&k2, SEED + 1).expect("k=2 run");
    let d2: Vec<f64> = out2
        .report
        .statistics
        .iter()
        .map(|s| s["max_sup_cdf_distance"].as_f64().unwrap())
        .collect();
    let monotone = d2.windows(2).all(|w| w[1] <= w[0] + C7_NOISE_BAND);
    let mut out = Outcome::new(
        d1 <= C7_K1_THRESHOLD && monotone,
        format!("k=1 T=400 distance {d1:.4}; k=2 distances over T=50..400 {d2:.4?}"),
    );

    // Same draws against the limit of the integer boundary actually used, which separates
    // the rounding of a√T from the sampling and lattice error.
    let mut realised = Vec::new();
    for (i, s) in out2.report.statistics.iter().enumerate() {
        let tt = k2.t_values[i];
        let root = (tt as f64).sqrt();
        let x: Vec<i64> = serde_json::from_value(s["x"].clone()).unwrap();
        let y: Vec<i64> = serde_json::from_value(s["y"].clone()).unwrap();
        let cfg = ConvergenceConfig {
            a: x.iter().map(|v| *v as f64 / root).collect(),
            b: y.iter().map(|v| (*v as f64 - k2.p * tt as f64) / root).collect(),
            t_values: vec![tt],
            ..k2.clone()
        };
        let r = run_convergence(&cfg, SEED + 1).expect("realised-boundary run");
        realised.push(r.report.statistics[0]["max_sup_cdf_distance"].as_f64().unwrap());
    }
    out.info.push(format!(
        "k=2 distances to the limit of the realised integer boundary: {realised:.4?}"
    ));
    out
}

fn c8_zc() -> Outcome {
    let distinct = [
        (0.5, 0.5, vec![0.3], vec![-0.2]),
        (0.5, 0.5, vec![1.0, -1.0], vec![1.0, -1.0]),
        (0.3, 0.4, vec![0.5, 0.0], vec![1.0, -0.4]),
        (0.7, 0.2, vec![1.0, 0.2, -1.0], vec![0.5, 0.0, -0.7]),
        (0.4, 0.7, vec![0.6, 0.1, -0.3], vec![1.2, 0.4, 0.0]),
    ];
    let mut worst_rel: f64 = 0.0;
    for (p, t, a, b) in distinct {
        let spec = LimitSpec::new(p, t, a, b).unwrap();
        let closed = normalizing_constant_closed_form(&spec).unwrap();
        let quad = normalizing_constant_quadrature(&spec, &QuadratureOptions::default()).unwrap();
        worst_rel = worst_rel.max((quad / closed - 1.0).abs());
    }
    let blocks = [
        (0.5, 0.5, vec![0.0, 0.0], vec![0.0, 0.0]),
        (0.5, 0.5, vec![0.0, 0.0], vec![1.0, -1.0]),
        (0.3, 0.6, vec![0.5, 0.5, -0.5], vec![0.2, 0.2, 0.2]),
    ];
    let mut worst_mass: f64 = 0.0;
    for (p, t, a, b) in blocks {
        let d = LimitDensity::new(LimitSpec::new(p, t, a, b).unwrap()).unwrap();
        worst_mass = worst_mass.max((d.total_mass_symmetric(32, 16) - 1.0).abs());
    }
    Outcome::new(
        worst_rel <= C8_ZC_REL && worst_mass <= C8_MASS_ABS,
        format!("max rel err closed vs quadrature {worst_rel:.2e}; max |mass - 1| (blocks) {worst_mass:.2e}"),
    )
}

/// Points in the bulk of `ρ`: the mean line `(1-t)a + tb`, spread by one standard deviation.
fn bulk_point(spec: &LimitSpec) -> Vec<f64> {
    let k = spec.k();
    let sd = spec.single_variance().sqrt();
    let mut z: Vec<f64> = (0..k)
        .map(|i| {
            (1.0 - spec.t()) * spec.a()[i]
                + spec.t() * spec.b()[i]
                + sd * ((k as f64 - 1.0) / 2.0 - i as f64)
        })
        .collect();
    for i in 1..k {
        if z[i] >= z[i - 1] {
            z[i] = z[i - 1] - 0.5 * sd;
        }
    }
    z
}

fn c9_confluent() -> Outcome {
    let suite = [
        (0.5, 0.5, vec![0.0, 0.0], vec![0.0, 0.0]),
        (0.5, 0.5, vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]),
        (0.5, 0.5, vec![0.0, 0.0], vec![1.0, -1.0]),
        (0.7, 0.6, vec![1.0, 1.0, -1.0], vec![0.5, -0.5, -0.5]),
        (0.3, 0.4, vec![0.5, 0.5], vec![1.0, -1.0]),
        (0.4, 0.5, vec![0.2, 0.2], vec![0.3, 0.3]),
        (0.5, 0.3, vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]),
    ];
    let mut worst = (0.0f64, 0.0f64);
    let mut worst_centred = (0.0f64, 0.0f64);
    let mut min_decay = f64::INFINITY;
    let mut info = Vec::new();
    for (p, t, a, b) in suite {
        let spec = LimitSpec::new(p, t, a.clone(), b.clone()).unwrap();
        let centred = a.iter().sum::<f64>() == 0.0 && b.iter().sum::<f64>() == 0.0;
        let z = bulk_point(&spec);
        for sign in [ConfluentSign::Plus, ConfluentSign::Minus] {
            let e2 = (confluent_check(&spec, &z, 1e-2, sign).unwrap() - 1.0).abs();
            let e3 = (confluent_check(&spec, &z, 1e-3, sign).unwrap() - 1.0).abs();
            worst = (worst.0.max(e2), worst.1.max(e3));
            if centred {
                worst_centred = (worst_centred.0.max(e2), worst_centred.1.max(e3));
            }
            if e3 > 1e-12 {
                min_decay = min_decay.min(e2 / e3);
            }
            info.push(format!(
                "p={p} t={t} a={a:?} b={b:?} z={z:.3?} {sign:?}: {e2:.2e} (eps 1e-2), {e3:.2e} (eps 1e-3)"
            ));
        }
    }
    let spec = LimitSpec::new(0.5, 0.5, vec![0.0, 0.0], vec![1.0, -1.0]).unwrap();
    let e2 = (confluent_check(&spec, &[1.0, 0.0], 1e-2, ConfluentSign::Plus).unwrap() - 1.0).abs();
    let e3 = (confluent_check(&spec, &[1.0, 0.0], 1e-3, ConfluentSign::Plus).unwrap() - 1.0).abs();
    info.push(format!(
        "off-bulk point a=(0,0) b=(1,-1) z=(1,0): {e2:.3} (eps 1e-2), {e3:.4} (eps 1e-3), ratio {:.1}",
        e2 / e3
    ));
    info.push(format!(
        "entries symmetric about 0 only: {:.2e} / {:.2e}; smallest error ratio between eps 1e-2 and 1e-3: {min_decay:.1}",
        worst_centred.0, worst_centred.1
    ));
    let mut out = Outcome::new(
        worst.0 <= C9_TOL_COARSE && worst.1 <= C9_TOL_FINE,
        format!(
            "max |ratio - 1| {:.3} at eps 1e-2 (tol {C9_TOL_COARSE}), {:.4} at eps 1e-3 (tol {C9_TOL_FINE}); \
             off-centre blocks carry an O(eps) translation term",
            worst.0, worst.1
        ),
    );
    out.info = info;
    out
}

fn c10_brownian() -> Outcome {
    let sigma = 0.5; // p = 1/2
    let level = 0.5;
    let probe = [0.1, 0.25, 0.5, 0.75, 0.9];
    let pairs = [(0, 1), (1, 2), (2, 2), (1, 3), (3, 4)];
    let idx: Vec<usize> = probe.iter().map(|r| (r * (C10_GRID - 1) as f64).round() as usize).collect();
    let root = RngHandle::from_seed(SEED).derive(10);
    let batch = 1000;
    let results: Vec<(bool, Vec<f64>, Vec<f64>)> = (0..C10_BRIDGES / batch)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = root.derive(b as u64).rng();
            let idx = idx.clone();
            (0..batch).map(move |_| {
                let w = sample_brownian_bridge(&mut rng, C10_GRID, sigma);
                let hit = w.iter().copied().fold(f64::NEG_INFINITY, f64::max) >= level;
                let at = idx.iter().map(|&i| w[i]).collect();
                let w1 = sample_brownian_bridge(&mut rng, 1001, sigma);
                let w2 = sample_brownian_bridge(&mut rng, 1001, sigma);
                let diff = probe
                    .iter()
                    .map(|r| {
                        let i = (r * 1000.0_f64).round() as usize;
                        (w1[i] - w2[i]) / 2f64.sqrt()
                    })
                    .collect();
                (hit, at, diff)
            })
        })
        .collect();
    let hits = results.iter().filter(|r| r.0).count() as f64 / results.len() as f64;
    let tail = bb_max_tail(0.5, level);
    let tail_ok = (hits - tail).abs() <= C10_TAIL_ABS;
    let mut worst_z: f64 = 0.0;
    let mut worst_z_diff: f64 = 0.0;
    for &(i, j) in &pairs {
        let times = |k: usize| idx[k] as f64 / (C10_GRID - 1) as f64;
        let xs: Vec<f64> = results.iter().map(|r| r.1[i]).collect();
        let ys: Vec<f64> = results.iter().map(|r| r.1[j]).collect();
        let (c, se) = covariance_with_se(&xs, &ys);
        worst_z = worst_z.max((c - bridge_covariance(times(i), times(j), sigma)).abs() / se);
        let xs: Vec<f64> = results.iter().map(|r| r.2[i]).collect();
        let ys: Vec<f64> = results.iter().map(|r| r.2[j]).collect();
        let (c, se) = covariance_with_se(&xs, &ys);
        worst_z_diff = worst_z_diff.max((c - bridge_covariance(probe[i], probe[j], sigma)).abs() / se);
    }
    Outcome::new(
        tail_ok && worst_z <= C10_SE && worst_z_diff <= C10_SE,
        format!(
            "P(max >= 1/2) {hits:.4} vs e^-2 = {tail:.4}; covariance max {worst_z:.2} se; \
             scaled difference max {worst_z_diff:.2} se"
        ),
    )
}

fn c11_asymptotics() -> Outcome {
    let root_n = (C11_N as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.3, 0.5, 0.7] {
        let centre = p * C11_N as f64;
        let lo = (centre - 3.0 * root_n).ceil() as u64;
        let hi = (centre + 3.0 * root_n).floor() as u64;
        let worst = (lo..=hi)
            .map(|big_n| asymptotic_relative_error(C11_N, big_n, p).unwrap().abs())
            .fold(0.0, f64::max);
        let (big_c, c) = calibrate_upper_bound(p, C11_N_CAL).unwrap();
        let bound_fail = (1..=C11_N_MAX).find_map(|n| {
            upper_bound_holds_for_all(n, p, big_c, c).err().map(|bn| (n, bn))
        });
        pass &= worst <= C11_REL && bound_fail.is_none();
        parts.push(format!(
            "p={p}: max rel err {:.2}%, bound {}",
            100.0 * worst,
            match bound_fail {
                None => format!("holds to n={C11_N_MAX}"),
                Some((n, bn)) => format!("fails at n={n}, N={bn}"),
            }
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("determinant count vs enumeration", c1_determinant),
        ("exact fixed-time pmf", c2_pmf),
        ("acceptance probability", c3_acceptance),
        ("sampler agreement", c4_agreement),
        ("monotone coupling", c5_coupling),
        ("block resampling invariance", c6_gibbs),
        ("weak convergence of marginals", c7_convergence),
        ("normalizing constant", c8_zc),
        ("confluent limit", c9_confluent),
        ("Brownian bridge formulas", c10_brownian),
        ("binomial asymptotics and bound", c11_asymptotics),
    ];
    let filter: Option<Vec<usize>> = std::env::var("GLE_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let n = n + 1;
        if filter.as_ref().is_some_and(|f| !f.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        let outcome = result.unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} {n:>2} {name}: {} [{secs:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
        for line in outcome.info {
            println!("        {line}");
        }
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
