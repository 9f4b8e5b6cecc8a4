//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gtrs_core::canonical::find_definite_combination;
use gtrs_core::fixtures::{unbounded_3d, hyperbola};
use gtrs_core::generate::{generate, generate_complex, RandomSpec, Regime};
use gtrs_core::oracle::{grid_best_feasible, neighborhood_test, real_roots, univariate_reduce_2d, DEFAULT_SEED};
use gtrs_core::poly::Polynomial;
use gtrs_core::spectral::{inertia, psd_interval};
use gtrs_core::canonical::reduce_to_standard_form;
use gtrs_core::{solve, solve_complex, GlobalStatus, GtrsInstance, Sense, Tolerances};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Runs `gtrs <args> --json`, returning the parsed report and wall time.
fn run_json(args: &[&str]) -> (Value, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gtrs"))
        .args(args)
        .arg("--json")
        .output()
        .expect("gtrs runs");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "gtrs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (serde_json::from_slice(&out.stdout).expect("json report"), elapsed)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn criterion_1() -> Outcome {
    let path = tmp_file("acceptance_unbounded_3d.toml", &unbounded_3d().to_document());
    let (r, t) = run_json(&["local", path.to_str().unwrap()]);
    let nl = r["local_nonglobal"].as_array().unwrap();
    let status = r["global"]["status"].as_str().unwrap().to_string();
    let mut ok = nl.len() == 1 && status == "no_psd_certificate" && t < Duration::from_millis(100);
    let mut detail = format!("{} nonglobal, global {status}, {:.1} ms", nl.len(), t.as_secs_f64() * 1e3);
    if let Some(p) = nl.first() {
        let x = floats(&p["x"]);
        let l = p["lambda"].as_f64().unwrap();
        let err = x
            .iter()
            .zip([-1.0, 0.0, 0.0])
            .map(|(a, b)| (a - b).abs())
            .fold((l - 1.0).abs(), f64::max);
        ok &= err <= 1e-8;
        detail += &format!(", max deviation from x=(-1,0,0), lambda=1: {err:.1e}");
    }
    outcome(ok, detail)
}

/// The unit hyperbola through the quartic `y⁴ + 6y³ − 4y − 1` of the reduction
/// `F(y) = y² + 1/y² + 12y + 8/y`, independent of the solver.
fn quartic_minimizers() -> (Vec<f64>, f64) {
    let quartic = Polynomial::new(vec![-1.0, -4.0, 0.0, 6.0, 1.0]);
    let f = |y: f64| y * y + 1.0 / (y * y) + 12.0 * y + 8.0 / y;
    let f2 = |y: f64| 2.0 + 6.0 / y.powi(4) + 16.0 / y.powi(3);
    let roots = real_roots(&quartic);
    assert_eq!(roots.len(), 4);
    let minimizers: Vec<f64> = roots.into_iter().filter(|&y| f2(y) > 0.0).collect();
    let best = minimizers.iter().map(|&y| f(y)).fold(f64::INFINITY, f64::min);
    (minimizers, best)
}

fn check_unit_hyperbola(sense: Sense, tag: &str) -> (bool, String) {
    let inst = hyperbola(1.0, sense);
    let path = tmp_file(&format!("acceptance_unit_hyperbola_{tag}.toml"), &inst.to_document());
    let (r, t) = run_json(&["local", path.to_str().unwrap()]);
    let kkt = r["kkt_all"].as_array().unwrap().len();
    let nl = r["local_nonglobal"].as_array().unwrap();
    let bound = r["diagnostics"]["count_bound"].as_u64().unwrap() as usize;
    let f = |y: f64| y * y + 1.0 / (y * y) + 12.0 * y + 8.0 / y;
    let (mins, best) = quartic_minimizers();
    // quartic minimizers that are not the global one
    let expected: Vec<f64> = mins.into_iter().filter(|&y| f(y) > best + 1e-9).collect();
    let found: Vec<f64> = nl.iter().map(|p| floats(&p["x"])[0]).collect();
    let matched = found.len() == expected.len()
        && expected
            .iter()
            .all(|y| found.iter().any(|z| (y - z).abs() <= 1e-6));
    let ok = kkt == 4 && nl.len() == 2 && matched && bound == 2 && nl.len() == bound
        && t < Duration::from_millis(100);
    let mut detail = format!(
        "{tag}: {kkt} KKT, {} nonglobal at y = {found:.6?} (quartic nonglobal minimizers {expected:.6?}), bound {bound}, {:.1} ms",
        nl.len(),
        t.as_secs_f64() * 1e3
    );
    if nl.len() != 2 {
        // independent evidence for any equality minimizer missing here
        let eq = solve(&hyperbola(1.0, Sense::Equality), &Tolerances::default()).unwrap();
        for p in &eq.local_nonglobal {
            if !found.iter().any(|z| (p.x[0] - z).abs() <= 1e-6) {
                let rep = neighborhood_test(&inst, &p.x, 1e-3, 1000, DEFAULT_SEED).unwrap();
                detail += &format!(
                    "; equality minimizer y = {:.6} (lambda = {:.4}) sampled in this problem: worst decrease {:.3e}",
                    p.x[0], p.lambda, rep.worst_violation
                );
            }
        }
    }
    (ok, detail)
}

fn criterion_2() -> Outcome {
    let (ok_eq, d_eq) = check_unit_hyperbola(Sense::Equality, "eq");
    let (ok_le, d_le) = check_unit_hyperbola(Sense::Inequality, "le");
    outcome(ok_eq && ok_le, format!("{d_eq} | {d_le}"))
}

fn corpus(sense: Sense, count: u64, seed_base: u64) -> Vec<(RandomSpec, GtrsInstance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_base);
    (0..count)
        .map(|k| {
            let n = 1 + (k as usize % 6);
            let n1 = rng.random_range(1..=n);
            let spec = RandomSpec {
                n,
                n1,
                sense,
                seed: seed_base + k,
                regime: Regime::DefinitePencil,
            };
            (spec, generate(&spec).unwrap())
        })
        .collect()
}

struct CorpusStats {
    instances: usize,
    nonglobal: usize,
    complementarity_violations: usize,
    inertia_violations: usize,
    count_violations: usize,
    root_violations: usize,
    errors: Vec<String>,
}

fn scan(corpus: &[(RandomSpec, GtrsInstance)]) -> CorpusStats {
    let tol = Tolerances::default();
    let mut s = CorpusStats {
        instances: corpus.len(),
        nonglobal: 0,
        complementarity_violations: 0,
        inertia_violations: 0,
        count_violations: 0,
        root_violations: 0,
        errors: Vec::new(),
    };
    for (spec, inst) in corpus {
        let r = match solve(inst, &tol) {
            Ok(r) => r,
            Err(e) => {
                s.errors.push(format!("seed {}: {e}", spec.seed));
                continue;
            }
        };
        let n = inst.dim();
        let bound = (r.diagnostics.n1 + 1).min(n);
        s.nonglobal += r.local_nonglobal.len();
        if r.local_nonglobal.len() > bound {
            s.count_violations += 1;
        }
        if r.diagnostics.roots.len() > 2 * bound {
            s.root_violations += 1;
        }
        for p in &r.local_nonglobal {
            let g = inst.eval_constraint(&p.x).unwrap();
            if inst.sense() == Sense::Inequality && !(p.lambda > 1e-10 && g.abs() <= 1e-8) {
                s.complementarity_violations += 1;
            }
            let inr = inertia(&inst.pencil(p.lambda), tol.inertia_zero);
            if (inr.n_plus, inr.n_zero, inr.n_minus) != (n - 1, 0, 1) {
                s.inertia_violations += 1;
            }
        }
    }
    s
}

fn criteria_3_4_5() -> (Outcome, Outcome, Outcome) {
    let le = scan(&corpus(Sense::Inequality, 200, 1000));
    let eq = scan(&corpus(Sense::Equality, 200, 5000));
    let errors = le.errors.len() + eq.errors.len();
    let err_note = if errors == 0 {
        String::new()
    } else {
        format!(", solve errors: {:?}", [le.errors.clone(), eq.errors.clone()].concat())
    };
    let c3 = outcome(
        le.complementarity_violations == 0 && le.errors.is_empty(),
        format!(
            "{} inequality instances, {} nonglobal minimizers, {} violations{}",
            le.instances, le.nonglobal, le.complementarity_violations, err_note
        ),
    );
    let c4 = outcome(
        le.inertia_violations == 0 && le.errors.is_empty(),
        format!(
            "{} inequality instances, {} nonglobal minimizers, {} violations",
            le.instances, le.nonglobal, le.inertia_violations
        ),
    );
    let c5 = outcome(
        le.count_violations + eq.count_violations + le.root_violations + eq.root_violations == 0
            && errors == 0,
        format!(
            "{} instances ({} nonglobal minimizers), count violations {}, root-count violations {}{}",
            le.instances + eq.instances,
            le.nonglobal + eq.nonglobal,
            le.count_violations + eq.count_violations,
            le.root_violations + eq.root_violations,
            err_note
        ),
    );
    (c3, c4, c5)
}

/// Planar equality instances of the two forms the oracle reduces, with a
/// definite pencil.
fn reducible_planar(rng: &mut ChaCha8Rng, hyperbolic: bool) -> GtrsInstance {
    loop {
        let mut u = || rng.random_range(-3.0f64..3.0);
        let (a11, a12, a22) = (u(), u(), u());
        let a = DMatrix::from_row_slice(2, 2, &[a11, a12, a12, a22]);
        let av = DVector::from_row_slice(&[u(), u()]);
        let (b, bv, c) = if hyperbolic {
            let s = u();
            (
                DMatrix::from_row_slice(2, 2, &[0.0, s, s, 0.0]),
                DVector::zeros(2),
                u(),
            )
        } else {
            (
                DMatrix::from_row_slice(2, 2, &[u(), 0.0, 0.0, 0.0]),
                DVector::from_row_slice(&[u(), u()]),
                u(),
            )
        };
        if b.amax() < 0.1 || c.abs() < 0.1 || bv[1].abs() < 0.1 && !hyperbolic {
            continue;
        }
        if find_definite_combination(&a, &b, &Tolerances::default()).is_none() {
            continue;
        }
        return GtrsInstance::new(a, av, b, bv, c, Sense::Equality).unwrap();
    }
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let close = |x: &DVector<f64>, y: &DVector<f64>| (x - y).amax() <= 1e-6 * (1.0 + x.amax());
    let (mut mismatches, mut unsound, mut checked, mut points) = (0, 0, 0, 0);
    let mut notes = Vec::new();
    for k in 0..100 {
        let inst = reducible_planar(&mut rng, k % 2 == 0);
        let red = univariate_reduce_2d(&inst).expect("generated instances reduce");
        let r = match solve(&inst, &tol) {
            Ok(r) => r,
            Err(e) => {
                mismatches += 1;
                notes.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        let mut solver: Vec<DVector<f64>> = r.local_nonglobal.iter().map(|p| p.x.clone()).collect();
        if r.global.status != GlobalStatus::NoPsdCertificate {
            solver.extend(r.global.x.clone());
        }
        let oracle: Vec<DVector<f64>> = red.local_minimizers().iter().map(|c| c.x.clone()).collect();
        let missing = oracle.iter().filter(|o| !solver.iter().any(|s| close(o, s))).count();
        let extra = solver.iter().filter(|s| !oracle.iter().any(|o| close(o, s))).count();
        if missing + extra > 0 {
            mismatches += 1;
            notes.push(format!("instance {k}: {missing} missing, {extra} extra"));
        }
        for x in &solver {
            points += 1;
            let rep = neighborhood_test(&inst, x, 1e-3, 1000, DEFAULT_SEED).unwrap();
            if !rep.passed {
                unsound += 1;
                notes.push(format!("instance {k}: point fails sampling ({:.2e})", rep.worst_violation));
            }
        }
        checked += 1;
    }
    outcome(
        mismatches == 0 && unsound == 0,
        format!(
            "{checked} reducible instances, {points} certified minimizers, {mismatches} set mismatches, {unsound} sampling failures{}",
            if notes.is_empty() { String::new() } else { format!(": {notes:?}") }
        ),
    )
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut nonglobal, mut pairing_failures, mut errors) = (0, 0, Vec::new());
    for k in 0..50u64 {
        let n = 1 + (k as usize % 4);
        let spec = RandomSpec {
            n,
            n1: rng.random_range(1..=n),
            sense: if k % 2 == 0 { Sense::Equality } else { Sense::Inequality },
            seed: 700 + k,
            regime: Regime::Complex,
        };
        let cinst = generate_complex(&spec);
        let lambdas: Vec<f64> = (0..100).map(|_| rng.random_range(-10.0..10.0)).collect();
        if !cinst.check_eigenvalue_pairing(&lambdas).passed {
            pairing_failures += 1;
        }
        match solve_complex(&cinst, &tol) {
            Ok(out) => nonglobal += out.report.local_nonglobal.len(),
            Err(e) => errors.push(format!("seed {}: {e}", spec.seed)),
        }
    }
    let t = start.elapsed();
    outcome(
        nonglobal == 0 && pairing_failures == 0 && errors.is_empty() && t < Duration::from_secs(5),
        format!(
            "50 instances, {nonglobal} nonglobal minimizers, {pairing_failures} pairing failures, errors {errors:?}, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let (mut tested, mut certified, mut violations) = (0, 0, Vec::new());
    let mut seed = 8000;
    while tested < 100 {
        seed += 1;
        let n = 1 + (seed as usize % 3);
        let spec = RandomSpec {
            n,
            n1: 1 + (seed as usize / 3) % n,
            sense: if seed % 2 == 0 { Sense::Equality } else { Sense::Inequality },
            seed,
            regime: Regime::DefinitePencil,
        };
        let inst = generate(&spec).unwrap();
        let cf = reduce_to_standard_form(&inst, &tol).unwrap();
        if psd_interval(&cf, inst.sense(), &tol).is_none() {
            continue;
        }
        tested += 1;
        let g = match gtrs_core::solve_global(&inst, &tol) {
            Ok(g) => g,
            Err(e) => {
                violations.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let (Some(x), Some(l), Some(v)) = (&g.x, g.lambda, g.value) else {
            // nothing certified: the grid must not find a feasible point either
            if let Some(grid) = grid_best_feasible(&inst, &DVector::zeros(n), 100.0, 1_000_000) {
                violations.push(format!(
                    "seed {seed}: uncertified but grid finds feasible value {}",
                    grid.best_value
                ));
            }
            continue;
        };
        certified += 1;
        let res = inst.kkt_residual(x, l);
        let scale = inst.kkt_scale(x, l);
        let pencil = inst.pencil(l);
        let eigs = pencil.symmetric_eigenvalues();
        let min_eig = eigs.min();
        let norm = eigs.amax();
        if res > 1e-8 * scale || min_eig < -1e-8 * norm {
            violations.push(format!("seed {seed}: residual {res:.2e}, min eig {min_eig:.2e}"));
        }
        let half = 2.0 * x.amax().max(1.0);
        let grid = grid_best_feasible(&inst, &DVector::zeros(n), half, 1_000_000);
        if let Some(grid) = grid {
            if v > grid.best_value + 1e-6 {
                violations.push(format!(
                    "seed {seed}: value {v} above grid sample {}",
                    grid.best_value
                ));
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{tested} instances with nonempty PSD interval, {certified} certified, {} uncertified with no feasible grid point, violations {violations:?}",
            tested - certified - violations.len()
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn criterion_9() -> Outcome {
    let time_for = |n: usize| {
        let samples: Vec<f64> = (0..5u64)
            .map(|k| {
                let spec = RandomSpec {
                    n,
                    n1: n,
                    sense: Sense::Equality,
                    seed: 900 + k,
                    regime: Regime::DefinitePencil,
                };
                let path = tmp_file(
                    &format!("acceptance_scaling_{n}_{k}.toml"),
                    &generate(&spec).unwrap().to_document(),
                );
                let (_, t) = run_json(&["local", path.to_str().unwrap()]);
                t.as_secs_f64()
            })
            .collect();
        median(samples)
    };
    let (t10, t100) = (time_for(10), time_for(100));
    let ratio = t100 / t10;
    let exponent = ratio.log10();
    // quartic growth over one decade, with a factor-of-4 allowance
    let ok = ratio <= 4.0 * 1e4;
    outcome(
        ok,
        format!(
            "median wall time n=10: {:.1} ms, n=100: {:.1} ms, ratio {ratio:.1} (exponent {exponent:.2}, limit 4e4)",
            t10 * 1e3,
            t100 * 1e3
        ),
    )
}

fn main() {
    let (c3, c4, c5) = criteria_3_4_5();
    let results = [
        criterion_1(),
        criterion_2(),
        c3,
        c4,
        c5,
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} ({})", i + 1, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
