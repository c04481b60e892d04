//! End-to-end acceptance checks. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits non-zero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use csmimo::baselines::Method;
use csmimo::cs::{solve_dantzig_matrix, DantzigOptions};
use csmimo::linalg::{CMatrix, CVector};
use csmimo::metrics::{to_db, theoretical_sjr};
use csmimo::output::{write_spectra_csv, write_summary_csv, write_sweep_csv};
use csmimo::runner::{
    estimate_cs, run_scenario, run_sjr, run_trial, strongest_peak_deg, summarize, sweep, synthesize_trial, Axis,
    SweepRow,
};
use csmimo::cs::MeasurementKind;
use csmimo::scenario::{load_scenario, GridSpec, RefineSpec, Scenario};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load_scenario(path).expect("shipped config loads")
}

/// Noiseless recovery of K random on-grid targets.
fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for k in 1..=3usize {
        let mut ok = 0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000 * k as u64 + seed);
            // Distinct grid indices at least five bins (1°) apart.
            let idx: Vec<usize> = loop {
                let mut v: Vec<usize> = (0..k).map(|_| rng.random_range(0..51)).collect();
                v.sort_unstable();
                if v.windows(2).all(|w| w[1] - w[0] >= 5) {
                    break v;
                }
            };
            let targets: Vec<_> = idx
                .iter()
                .map(|&i| {
                    let mag: f64 = rng.random_range(0.5..1.5);
                    let phase: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    json!({
                        "azimuth_deg": -5.0 + 0.2 * i as f64,
                        "range_m": rng.random_range(3000.0..8000.0),
                        "beta": [mag * phase.cos(), mag * phase.sin()]
                    })
                })
                .collect();
            let s = Scenario::from_json(
                &json!({
                    "seed": seed,
                    "geometry": {"disk": {"radius_wavelengths": 50, "tx": 30}},
                    "snapshots": 512,
                    "measurements": 15,
                    "receive_antennas": 1,
                    "grid": {"start_deg": -5, "stop_deg": 5, "step_deg": 0.2},
                    "targets": targets,
                    "solver": {"mu": 1e-8}
                })
                .to_string(),
            )
            .unwrap();
            let data = synthesize_trial(&s, seed, 0).unwrap();
            let Ok(out) = estimate_cs(&s, &data, seed, 0) else {
                continue;
            };
            let lambda = s.wavelength();
            let mut truth = vec![Complex64::new(0.0, 0.0); 51];
            for (t, &i) in data.scene.targets.iter().zip(&idx) {
                truth[i] = t.grid_amplitude(lambda);
            }
            let err = out
                .solution
                .spectrum
                .iter()
                .zip(&truth)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let max = out.solution.spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let support: Vec<usize> = (0..51).filter(|&i| out.solution.spectrum[i].norm() > 1e-3 * max).collect();
            if support == idx && err < 1e-4 {
                ok += 1;
            }
        }
        pass &= ok >= 19;
        lines.push(format!("K={k}: {ok}/20"));
    }
    Outcome {
        pass,
        detail: lines.join(", "),
    }
}

fn per_method(rows: &[SweepRow], method: Method) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.method == method).collect()
}

/// Two targets and a jammer seen by one receive antenna.
fn criterion_2() -> Outcome {
    let s = config("single-rx.json");
    let rows = sweep(&s, Axis::ReceiveAntennas, &[1.0], 50, &Method::ALL, s.seed).unwrap();
    let cs = per_method(&rows, Method::Cs);
    let hits = cs.iter().filter(|r| r.peaks_on_targets).count();
    let peak_ok = hits as f64 >= 0.9 * 50.0;
    let mut detail = format!("CS top-2 peaks on targets {hits}/50 (need >= 45)");
    let mut order_ok = true;
    for m in [Method::Capon, Method::Apes, Method::Glrt] {
        let base = per_method(&rows, m);
        let wins = cs
            .iter()
            .zip(&base)
            .filter(|(c, b)| matches!((c.prr, b.prr), (Some(c), Some(b)) if c > b))
            .count();
        order_ok &= wins as f64 >= 0.8 * 50.0;
        detail += &format!("; CS PRR > {m} in {wins}/50");
    }
    Outcome {
        pass: peak_ok && order_ok,
        detail,
    }
}

/// The same scene with ten receive antennas fused.
fn criterion_3() -> Outcome {
    let s = config("ten-rx.json");
    let rows = sweep(&s, Axis::ReceiveAntennas, &[10.0], 50, &Method::ALL, s.seed).unwrap();
    let mut pass = true;
    let detail = Method::ALL
        .iter()
        .map(|&m| {
            let hits = per_method(&rows, m).iter().filter(|r| r.peaks_on_targets).count();
            pass &= hits as f64 >= 0.8 * 50.0;
            format!("{m} {hits}/50")
        })
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { pass, detail }
}

/// Closed-form SJR against 1000-trial Monte Carlo.
fn criterion_4() -> Outcome {
    let s = config("sjr.json");
    let plain = run_sjr(&s, MeasurementKind::Plain, 1000, s.seed).unwrap();
    let matched = run_sjr(&s, MeasurementKind::Matched, 1000, s.seed).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let ten = Complex64::new(10.0, 0.0);
    let th_plain = theoretical_sjr(30, 512, &[one, one], ten, MeasurementKind::Plain).unwrap();
    let th_matched = theoretical_sjr(30, 512, &[one, one], ten, MeasurementKind::Matched).unwrap();
    let e_plain = to_db(plain.sjr_empirical / th_plain);
    let e_matched = to_db(matched.sjr_empirical / th_matched);
    let ratio = matched.sjr_empirical / plain.sjr_empirical;
    let e_ratio = to_db(ratio / (512.0 / 30.0));
    Outcome {
        pass: e_plain.abs() <= 1.0 && e_matched.abs() <= 1.0 && e_ratio.abs() <= 1.0,
        detail: format!(
            "plain {:.3} vs {th_plain} ({e_plain:+.2} dB), matched {:.3} vs {th_matched} ({e_matched:+.2} dB), \
             ratio {ratio:.2} vs 17.07 ({e_ratio:+.2} dB)",
            plain.sjr_empirical, matched.sjr_empirical
        ),
    }
}

/// PRR against snapshot count.
fn criterion_5() -> Outcome {
    let s = config("snapshot-sweep.json");
    let rows = sweep(&s, Axis::Snapshots, &[128.0, 256.0, 512.0], 50, &Method::ALL, s.seed).unwrap();
    let summary = summarize(&rows);
    let curve = |m: Method| -> Vec<f64> {
        summary
            .iter()
            .filter(|r| r.method == m)
            .map(|r| r.mean_prr_db)
            .collect()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    let cs = curve(Method::Cs);
    let cs_inc = cs[2] - cs[0];
    for m in Method::ALL {
        let c = curve(m);
        let monotone = c.windows(2).all(|w| w[1] >= w[0]);
        let inc = c[2] - c[0];
        pass &= monotone;
        if m != Method::Cs {
            pass &= cs_inc > inc;
        }
        parts.push(format!(
            "{m} [{:.2}, {:.2}, {:.2}] dB (+{inc:.2}){}",
            c[0],
            c[1],
            c[2],
            if monotone { "" } else { " NOT monotone" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

/// Off-grid target resolved by a fine second pass.
fn criterion_6() -> Outcome {
    let mut s = config("single-rx.json");
    s.targets.truncate(1);
    s.targets[0].azimuth_deg = -2.5;
    // A 0.5° grid offset by a quarter step, so -2.5° falls midway between
    // -2.75° and -2.25°.
    s.grid = GridSpec {
        start_deg: -4.75,
        stop_deg: 4.75,
        step_deg: 0.5,
    };
    s.refine = Some(RefineSpec {
        window_deg: 0.5,
        step_deg: 0.1,
    });
    s.validate().unwrap();
    let mut hits = 0;
    let mut worst: f64 = 0.0;
    for t in 0..20u64 {
        let run = run_trial(&s, &[Method::Cs], s.seed, t).unwrap();
        if let Some(p) = strongest_peak_deg(&run.methods[0]) {
            let e = (p + 2.5).abs();
            worst = worst.max(e);
            if e <= 0.1 + 1e-9 {
                hits += 1;
            }
        }
    }
    Outcome {
        pass: hits >= 18,
        detail: format!("{hits}/20 within 0.1° (worst error {worst:.3}°)"),
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (CMatrix<f64>, CVector<f64>) {
    let m = rng.random_range(1..=12);
    let n = rng.random_range(2..=16);
    let mut g = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let theta = CMatrix::from_fn(m, n, |_, _| g());
    let r = CVector::from_fn(m, |_, _| g());
    (theta, r)
}

fn correlated_residual(theta: &CMatrix<f64>, r: &CVector<f64>, s: &[Complex64]) -> f64 {
    let s = CVector::from_column_slice(s);
    let res = theta.adjoint() * (r - theta * s);
    res.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn l1(s: &[Complex64]) -> f64 {
    s.iter().map(|z| z.norm()).sum()
}

/// Solver contract on random small instances plus reference optima.
fn criterion_7() -> Outcome {
    let opts = DantzigOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let cases = 60;
    for case in 0..cases {
        let (theta, r) = random_instance(&mut rng);
        let cmax = (theta.adjoint() * &r).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mu = cmax * rng.random_range(0.05..0.9);
        let tol = 1e-6 * (1.0 + cmax);
        let Ok(a) = solve_dantzig_matrix(&theta, &r, mu, &opts) else {
            failures.push(format!("#{case} solve"));
            continue;
        };
        if correlated_residual(&theta, &r, &a.spectrum) > mu + tol {
            failures.push(format!("#{case} infeasible"));
        }
        // Weak duality recomputed here: for any w with ‖ΘᴴΘw‖_∞ ≤ 1,
        // Re(wᴴΘᴴr) − μ‖w‖₁ bounds the optimum from below.
        let w = CVector::from_column_slice(&a.dual);
        let gw = theta.adjoint() * (&theta * &w);
        let shrink = gw.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let bound = (w.dotc(&(theta.adjoint() * &r)).re - mu * w.iter().map(|z| z.norm()).sum::<f64>()) / shrink;
        let obj = l1(&a.spectrum);
        if bound > obj + tol || obj - bound > 1e-3 * (1.0 + obj) {
            failures.push(format!("#{case} dual gap {obj} vs {bound}"));
        }
        let b = solve_dantzig_matrix(&theta, &r, 1.5 * mu, &opts).unwrap();
        if l1(&b.spectrum) > l1(&a.spectrum) * (1.0 + 1e-4) + 1e-9 {
            failures.push(format!("#{case} not monotone in mu"));
        }
        let c = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let scaled = solve_dantzig_matrix(&theta, &r.map(|z| z * c), mu * c.norm(), &opts).unwrap();
        if (l1(&scaled.spectrum) - c.norm() * l1(&a.spectrum)).abs() > 1e-4 * (1.0 + c.norm() * l1(&a.spectrum)) {
            failures.push(format!("#{case} scaling"));
        }
        let zero = solve_dantzig_matrix(&theta, &CVector::zeros(r.len()), mu, &opts).unwrap();
        if zero.spectrum.iter().any(|z| z.norm() != 0.0) {
            failures.push(format!("#{case} r=0"));
        }
    }

    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/dantzig_reference.json"))
        .unwrap();
    let fixture: serde_json::Value = serde_json::from_str(&text).unwrap();
    let refs = fixture["cases"].as_array().unwrap();
    for (i, case) in refs.iter().enumerate() {
        let (theta, r, mu, want) = reference_case(case);
        let got = solve_dantzig_matrix(&theta, &r, mu, &opts).unwrap();
        if (got.objective - want).abs() > 1e-5 * (1.0 + want) {
            failures.push(format!("ref #{i}: {} vs {want}", got.objective));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{cases} random instances x 4 contracts, {} reference optima; failures: {}",
            refs.len(),
            if failures.is_empty() {
                "none".to_string()
            } else {
                failures.join(", ")
            }
        ),
    }
}

pub fn reference_case(case: &serde_json::Value) -> (CMatrix<f64>, CVector<f64>, f64, f64) {
    let m = case["m"].as_u64().unwrap() as usize;
    let n = case["n"].as_u64().unwrap() as usize;
    let get = |k: &str| -> Vec<f64> {
        case[k]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|v| match v.as_array() {
                Some(row) => row.iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>(),
                None => vec![v.as_f64().unwrap()],
            })
            .collect()
    };
    let (tr, ti, rr, ri) = (get("theta_re"), get("theta_im"), get("r_re"), get("r_im"));
    let theta = CMatrix::from_fn(m, n, |i, j| Complex64::new(tr[i * n + j], ti[i * n + j]));
    let r = CVector::from_fn(m, |i, _| Complex64::new(rr[i], ri[i]));
    (theta, r, case["mu"].as_f64().unwrap(), case["objective"].as_f64().unwrap())
}

/// Byte-identical output across repeats and thread counts.
fn criterion_8() -> Outcome {
    let s = config("snapshot-sweep.json");
    let dir = tempfile::tempdir().unwrap();
    let write_sweep = |threads: usize, tag: &str| -> (Vec<u8>, Vec<u8>) {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rows = pool.install(|| sweep(&s, Axis::Snapshots, &[64.0, 128.0], 6, &Method::ALL, s.seed).unwrap());
        let a = dir.path().join(format!("sweep-{tag}.csv"));
        let b = dir.path().join(format!("summary-{tag}.csv"));
        write_sweep_csv(&a, &rows).unwrap();
        write_summary_csv(&b, &summarize(&rows)).unwrap();
        (std::fs::read(a).unwrap(), std::fs::read(b).unwrap())
    };
    let serial = write_sweep(1, "serial");
    let parallel = write_sweep(4, "parallel");
    let again = write_sweep(4, "again");
    let spectra = |tag: &str| {
        let run = run_scenario(&s, &Method::ALL, s.seed).unwrap();
        let p = dir.path().join(format!("spectra-{tag}.csv"));
        write_spectra_csv(&p, &run).unwrap();
        std::fs::read(p).unwrap()
    };
    let sa = spectra("a");
    let sb = spectra("b");
    let pass = serial == parallel && parallel == again && sa == sb;
    Outcome {
        pass,
        detail: format!(
            "sweep CSV 1 vs 4 threads {}, repeat {}, spectra CSV repeat {} ({} bytes)",
            if serial == parallel { "identical" } else { "DIFFER" },
            if parallel == again { "identical" } else { "DIFFER" },
            if sa == sb { "identical" } else { "DIFFER" },
            sa.len()
        ),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.strip_prefix("criterion_").and_then(|n| n.parse().ok()))
        .collect();
    let criteria: [Criterion; 8] = [
        (1, "noiseless oracle recovery", criterion_1),
        (2, "single-antenna scene", criterion_2),
        (3, "ten-antenna scene", criterion_3),
        (4, "SJR closed forms", criterion_4),
        (5, "PRR vs snapshots", criterion_5),
        (6, "grid refinement", criterion_6),
        (7, "solver contract", criterion_7),
        (8, "determinism", criterion_8),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {n} ({name}): {} in {:.1}s: {}",
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
