//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::time::{Duration, Instant};

use drstokes::algebra::{Coefficients, PsiMutation, Rewriter};
use drstokes::cli::algebra_suite::{bilateral_residuals, corpus_checks, inverse_residuals, mutated_residual};
use drstokes::cli::config::{RawConfig, Reader};
use drstokes::cli::kernel_suite::{commutation_refinement, finest_order, inversion_refinement, GridOptions};
use drstokes::cli::reconstruct_suite::{run as reconstruct, ReconstructConfig};
use drstokes::cli::report::CheckStatus;
use drstokes::exterior::{binomial, GridForm, GridSpec, LamePair, MatrixCoefficient};
use drstokes::stokes::{apply_stokes, FormTuple, StokesSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{}; {:.1} s (limit {} s)", out.detail, took.as_secs_f64(), limit.as_secs());
    out.ok &= took <= limit;
    out
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(10), || match corpus_checks(4, 100, 2024) {
        Ok(c) => outcome(
            c.dd_failures == 0 && c.codiff_failures == 0 && c.forms >= 100,
            format!("{} forms, d∘d violations {}, d*∘d* violations {}", c.forms, c.dd_failures, c.codiff_failures),
        ),
        Err(e) => outcome(false, e.to_string()),
    })
}

fn criterion_2() -> Outcome {
    match corpus_checks(4, 100, 2024) {
        Ok(c) => outcome(c.laplace_failures == 0, format!("{} forms, violations {}", c.forms, c.laplace_failures)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(60), || {
        let r = Rewriter::new(4);
        let cases = [
            (1, Coefficients::Abstract),
            (2, Coefficients::Abstract),
            (1, Coefficients::Identity),
            (2, Coefficients::Identity),
            (3, Coefficients::Identity),
        ];
        let mut bad = Vec::new();
        for (q, coeff) in cases {
            match inverse_residuals(&r, q, coeff) {
                Ok((right, left)) if right.is_zero() && left.is_zero() => {}
                Ok(_) => bad.push(format!("q={q} {coeff:?}: nonzero normal form")),
                Err(e) => bad.push(format!("q={q} {coeff:?}: {e}")),
            }
        }
        outcome(bad.is_empty(), if bad.is_empty() { "right and left residuals zero in 5 cases".into() } else { bad.join("; ") })
    })
}

fn criterion_4() -> Outcome {
    timed(Duration::from_secs(120), || {
        let r = Rewriter::new(4);
        let labels = ["A vs closed form", "S A", "S Ψ − I", "Ψ S − I"];
        let mut bad = Vec::new();
        for q in [1, 2] {
            for coeff in [Coefficients::Abstract, Coefficients::Identity] {
                match bilateral_residuals(&r, q, coeff) {
                    Ok(res) => {
                        for (m, label) in res.iter().zip(labels) {
                            if !m.is_zero() {
                                bad.push(format!("q={q} {coeff:?}: {label} nonzero"));
                            }
                        }
                    }
                    Err(e) => bad.push(format!("q={q} {coeff:?}: {e}")),
                }
            }
        }
        outcome(bad.is_empty(), if bad.is_empty() { "all bilateral blocks zero for q=1,2".into() } else { bad.join("; ") })
    })
}

fn schedules() -> [(usize, Vec<usize>); 2] {
    [(2, vec![32, 64, 128]), (3, vec![24, 48])]
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(300), || {
        let opts = GridOptions::default();
        let mut ok = true;
        let mut parts = Vec::new();
        for (n, counts) in schedules() {
            for q in 0..=n {
                match inversion_refinement(n, q, &counts, &opts) {
                    Ok(levels) => {
                        let order = finest_order(&levels).unwrap_or(0.0);
                        let last = levels.last().map_or(f64::INFINITY, |l| l.1);
                        ok &= order >= 1.5 && last <= 5e-3;
                        parts.push(format!("n={n} q={q}: order {order:.2}, final {last:.2e}"));
                    }
                    Err(e) => {
                        ok = false;
                        parts.push(format!("n={n} q={q}: {e}"));
                    }
                }
            }
        }
        outcome(ok, parts.join("; "))
    })
}

fn criterion_6() -> Outcome {
    let opts = GridOptions::default();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for (n, counts) in schedules() {
        for q in 0..=n {
            match commutation_refinement(n, q, &counts, &opts) {
                Ok(levels) => {
                    let d: Vec<(f64, f64)> = levels.iter().map(|l| (l.0, l.1)).collect();
                    let s: Vec<(f64, f64)> = levels.iter().map(|l| (l.0, l.2)).collect();
                    // d vanishes on top-degree forms and d* on functions
                    for (series, present) in [(d, q < n), (s, q > 0)] {
                        if !present {
                            continue;
                        }
                        let order = finest_order(&series).unwrap_or(0.0);
                        worst = worst.min(order);
                        if order < 1.5 {
                            ok = false;
                            bad.push(format!("n={n} q={q}: order {order:.2}"));
                        }
                    }
                }
                Err(e) => {
                    ok = false;
                    bad.push(format!("n={n} q={q}: {e}"));
                }
            }
        }
    }
    let detail = if bad.is_empty() { format!("smallest observed order {worst:.2}") } else { bad.join("; ") };
    outcome(ok, detail)
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> MatrixCoefficient {
    let k = binomial(n, degree);
    let g: Vec<f64> = (0..k * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut e = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            e[i * k + j] = (0..k).map(|l| g[i * k + l] * g[j * k + l]).sum::<f64>() + if i == j { 0.5 } else { 0.0 };
        }
    }
    MatrixCoefficient::new(n, degree, e).expect("symmetric positive definite")
}

fn random_spec(rng: &mut ChaCha8Rng, n: usize, q: usize, j0: usize) -> StokesSpec {
    let pairs = (j0..=q)
        .map(|j| LamePair {
            m: (j < n).then(|| random_spd(rng, n, j + 1)),
            m_tilde: (j >= 1).then(|| random_spd(rng, n, j - 1)),
        })
        .collect();
    StokesSpec::new(n, q, j0, pairs).expect("valid shape")
}

/// Random nodal values on every component, zero within `margin` nodes of the
/// grid boundary.
fn random_tuple(rng: &mut ChaCha8Rng, grid: &GridSpec, q: usize, margin: usize) -> FormTuple {
    let parts = (0..=q)
        .rev()
        .map(|k| {
            let zero = GridForm::zero(grid, k);
            let mut form = zero.into_form();
            for c in form.coeffs_mut() {
                for (idx, v) in c.iter_mut().enumerate() {
                    if grid.depth(idx) >= margin {
                        *v = rng.gen_range(-1.0..1.0);
                    }
                }
            }
            GridForm::new(grid.clone(), form).expect("grid sized")
        })
        .collect();
    FormTuple::new(parts).expect("degrees q..0")
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shapes = [(2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 1), (3, 2, 1), (3, 3, 2)];
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let (n, q, j0) = shapes[t % shapes.len()];
        let grid = GridSpec::new(
            vec![-1.0; n],
            (0..n).map(|_| rng.gen_range(0.05..0.2)).collect(),
            vec![if n == 2 { 20 } else { 9 }; n],
        )
        .expect("valid grid");
        let spec = random_spec(&mut rng, n, q, j0);
        let u = random_tuple(&mut rng, &grid, q, 3);
        let v = random_tuple(&mut rng, &grid, q, 3);
        let lhs = apply_stokes(&spec, &u).and_then(|su| su.pairing(&v));
        let rhs = apply_stokes(&spec, &v).and_then(|sv| u.pairing(&sv));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).abs() / (u.l2_norm() * v.l2_norm())),
            (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
        }
    }
    outcome(worst <= 1e-10, format!("50 tuples, max |(Su,v) − (u,Sv)|/(‖u‖‖v‖) = {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    timed(Duration::from_secs(300), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for n in [2, 3] {
            let raw = RawConfig::parse(&format!("n = {n}\n")).expect("config parses");
            let reader = Reader::new(&raw);
            let cfg = ReconstructConfig::from_reader(&reader).expect("default reconstruction config");
            reader.finish().expect("no unknown keys");
            assert_eq!((cfg.interior_points, cfg.exterior_points), (10, 10));
            let (records, _) = reconstruct(&cfg, true);
            for r in records {
                ok &= r.status == CheckStatus::Pass;
                let get = |k: &str| r.metrics.get(k).and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
                parts.push(format!(
                    "n={n} {}: {:?} interior {:.1e} exterior {:.1e} (coarse {:.1e}/{:.1e})",
                    r.name.trim_start_matches("homotopy reconstruction of "),
                    r.status,
                    get("interior_max_rel_err"),
                    get("exterior_max_abs"),
                    get("coarse_interior_max_rel_err"),
                    get("coarse_exterior_max_abs"),
                ));
            }
        }
        outcome(ok, parts.join("; "))
    })
}

fn criterion_9() -> Outcome {
    let r = Rewriter::new(4);
    let mut survivors = Vec::new();
    for m in PsiMutation::ALL {
        let caught = (1..=3).any(|q| mutated_residual(&r, q, m).map(|res| !res.is_zero()).unwrap_or(true));
        if !caught {
            survivors.push(m.name());
        }
    }
    let detail = if survivors.is_empty() {
        format!("all {} mutations detected", PsiMutation::ALL.len())
    } else {
        format!("undetected: {}", survivors.join(", "))
    };
    outcome(survivors.is_empty(), detail)
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact complex d∘d = 0, d*∘d* = 0", criterion_1),
        ("Hodge Laplacian equals minus componentwise Laplacian", criterion_2),
        ("symbolic right and left fundamental solutions", criterion_3),
        ("symbolic bilateral fundamental solution", criterion_4),
        ("kernel inversion under refinement", criterion_5),
        ("commutation of d, d* with Φ under refinement", criterion_6),
        ("discrete self-adjointness of S", criterion_7),
        ("homotopy reconstruction on the unit ball", criterion_8),
        ("sign mutations of Ψ are detected", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let out = check();
        println!("[{}] criterion {}: {title} ({})", if out.ok { "PASS" } else { "FAIL" }, i + 1, out.detail);
        if !out.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
