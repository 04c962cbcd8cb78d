//! Acceptance suite. One line per criterion; exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lossprobe::channel::LossChannel;
use lossprobe::cli::figures::{random_correlations, sample_statistics, input_correlations, open_grid};
use lossprobe::correlations::MutualInfoConvention;
use lossprobe::probe::{
    critical_transmissivity, delta_q, delta_q_gamma, positive_fraction, q1, q1_analytic, q2, q2_analytic,
    random_sweep, sample_point, threshold_energy, threshold_fit_near_critical, SweepRanges,
};
use lossprobe::verify::{run_standard, standard_cases, VerifyConfig, CHAIN_SLACK, MOMENT_TOL, QCB_TOL};

type Outcome = Result<String, String>;

const BIN: &str = env!("CARGO_BIN_EXE_lossprobe");

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let t = start.elapsed();
    let note = |d: String| format!("{d}; {:.2}s", t.as_secs_f64());
    match (out, limit) {
        (Ok(d), Some(l)) if t > l => Err(note(format!("{d}; over the {:.0}s budget", l.as_secs_f64()))),
        (Ok(d), _) => Ok(note(d)),
        (Err(d), _) => Err(note(d)),
    }
}

fn lossprobe(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn csv_rows(stdout: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> f64 {
    let i = rows[0].iter().position(|c| c == name).expect("column present");
    rows[1][i].parse().expect("number")
}

fn critical() -> Outcome {
    let out = lossprobe(&["critical"]);
    if !out.status.success() {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let rows = csv_rows(&out.stdout);
    let (eta_c, gamma_c) = (column(&rows, "eta_c"), column(&rows, "Gamma_c"));
    let x = critical_transmissivity().sqrt();
    let residual = ((x + 1.0) * x + 1.0) * x - 1.0;
    check(
        (0.294..=0.298).contains(&eta_c) && (1.21..=1.23).contains(&gamma_c) && residual.abs() <= 1e-12,
        format!("eta_c={eta_c} Gamma_c={gamma_c} cubic residual={residual:e}"),
    )
}

fn threshold_fit() -> Outcome {
    let fit = threshold_fit_near_critical().map_err(|e| e.to_string())?;
    check(
        (3.5..=4.5).contains(&fit.c1) && (4.5..=6.5).contains(&fit.c2),
        format!("c1={:.4} c2={:.4} rms={:.2e}", fit.c1, fit.c2, fit.rms),
    )
}

/// 50 energies in (0, 10] and 20 transmissivities in (0, 1).
fn grid() -> (Vec<f64>, Vec<f64>) {
    ((1..=50).map(|i| 0.2 * i as f64).collect(), (1..=20).map(|j| j as f64 / 21.0).collect())
}

fn closed_forms() -> Outcome {
    let (ns, etas) = grid();
    let mut worst = 0.0f64;
    for &eta in &etas {
        let ch = LossChannel::from_eta(eta).unwrap();
        for &n in &ns {
            let d1 = (q1(n, 1.0, &ch).unwrap() - q1_analytic(n, eta).unwrap()).abs();
            let d2 = (q2(n, 1.0, 1.0, &ch).unwrap() - q2_analytic(n, eta).unwrap()).abs();
            worst = worst.max(d1).max(d2);
        }
    }
    check(worst <= 1e-9, format!("max |pipeline - closed form| = {worst:.2e} over {}x{}", ns.len(), etas.len()))
}

fn beta_optimality() -> Outcome {
    let betas: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for damping in [0.1, 0.69, 2.3] {
        let ch = LossChannel::from_gamma(damping).unwrap();
        for n in [0.5, 1.0, 2.0, 5.0] {
            let curves: [(&str, Box<dyn Fn(f64) -> f64>); 4] = [
                ("1", Box::new(|b| q1(n, b, &ch).unwrap())),
                ("2 gamma=0", Box::new(|b| q2(n, b, 0.0, &ch).unwrap())),
                ("2 gamma=0.5", Box::new(|b| q2(n, b, 0.5, &ch).unwrap())),
                ("2 gamma=1", Box::new(|b| q2(n, b, 1.0, &ch).unwrap())),
            ];
            for (label, q) in curves {
                let at_one = q(1.0);
                let rest = betas[..100].iter().map(|&b| q(b)).fold(f64::INFINITY, f64::min);
                tightest = tightest.min(rest - at_one);
                if at_one > rest {
                    failures.push(format!("modes {label} Gamma={damping} N={n}"));
                }
            }
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("argmin at beta=1 in all 48 curves; smallest margin {tightest:.2e}")
        } else {
            format!("argmin off beta=1: {}", failures.join(", "))
        },
    )
}

fn gamma_optimality() -> Outcome {
    let ranges = SweepRanges::default();
    let gammas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let (mut advantage, mut gamma_ok) = (0, 0);
    let samples = 1000;
    for i in 0..samples {
        let (n, beta, damping) = sample_point(2024, i, &ranges);
        let ch = LossChannel::from_gamma(damping).unwrap();
        let best = q2(n, beta, 1.0, &ch).unwrap();
        if best < q1(n, beta, &ch).unwrap() {
            advantage += 1;
        }
        if gammas.iter().all(|&g| best <= q2(n, beta, g, &ch).unwrap()) {
            gamma_ok += 1;
        }
    }
    check(
        advantage == samples && gamma_ok == samples,
        format!("Q2(gamma=1) < Q1 in {advantage}/{samples}; gamma=1 optimal on the grid in {gamma_ok}/{samples}"),
    )
}

fn oracle() -> Outcome {
    let cases = standard_cases().len();
    let report = run_standard(&VerifyConfig::default()).map_err(|e| e.to_string())?;
    let worst = |prefix: &str| {
        report.rows.iter().filter(|r| r.check.starts_with(prefix)).map(|r| r.value).fold(0.0f64, |a, v| {
            if v.is_nan() {
                f64::INFINITY
            } else {
                a.max(v)
            }
        })
    };
    let chain = report.rows.iter().filter(|r| r.check == "bound chain").map(|r| r.value).fold(f64::INFINITY, f64::min);
    let (q, m) = (worst("qcb"), worst("moments"));
    let failed: Vec<String> = report.failures().map(|r| format!("{} / {}", r.case, r.check)).collect();
    check(
        cases >= 12 && q <= QCB_TOL && m <= MOMENT_TOL && chain >= CHAIN_SLACK && failed.is_empty(),
        format!(
            "{cases} cases; max |dQ|={q:.2e}, max moment error={m:.2e}, min chain slack={chain:.2e}{}",
            if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
        ),
    )
}

fn monotonicity() -> Outcome {
    let (ns, etas) = grid();
    let mut problems = Vec::new();
    for (label, q) in [
        ("Q1", &(|n: f64, ch: &LossChannel| q1(n, 1.0, ch).unwrap()) as &dyn Fn(f64, &LossChannel) -> f64),
        ("Q2", &|n: f64, ch: &LossChannel| q2(n, 1.0, 1.0, ch).unwrap()),
    ] {
        let table: Vec<Vec<f64>> = etas
            .iter()
            .map(|&e| {
                let ch = LossChannel::from_eta(e).unwrap();
                ns.iter().map(|&n| q(n, &ch)).collect()
            })
            .collect();
        let in_n = table.iter().all(|row| row.windows(2).all(|w| w[1] < w[0]));
        let in_eta = (0..ns.len()).all(|i| table.windows(2).all(|w| w[1][i] > w[0][i]));
        if !in_n {
            problems.push(format!("{label} not decreasing in N"));
        }
        if !in_eta {
            problems.push(format!("{label} not increasing in eta"));
        }
    }

    let eta_c = critical_transmissivity();
    let n_th: Vec<f64> = (1..=200).map(|i| threshold_energy(eta_c + (0.99 - eta_c) * i as f64 / 200.0).unwrap()).collect();
    if !n_th.windows(2).all(|w| w[1] >= w[0]) {
        problems.push("N_th decreases somewhere on (eta_c, 0.99]".into());
    }

    // reduction against damping on (0, 1]; beta = 0 gives identical probes
    // and beta = 1 changes sign at the threshold energy
    let dampings: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    for n in [0.5, 1.0, 2.0, 5.0] {
        for beta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let dq: Vec<f64> =
                dampings.iter().map(|&g| delta_q(n, beta, &LossChannel::from_gamma(g).unwrap()).unwrap()).collect();
            if !dq.windows(2).all(|w| w[1] > w[0]) {
                problems.push(format!("deltaQ not increasing in Gamma at N={n} beta={beta}"));
            }
        }
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            "Q in N and eta, N_th in eta, deltaQ in Gamma on (0, 1]: all monotone".to_string()
        } else {
            problems.join("; ")
        },
    )
}

fn correlations() -> Outcome {
    let gamma = 0.999;
    let mi = MutualInfoConvention::AsPrinted;
    let ns = open_grid(5.0, 101);
    let mut problems = Vec::new();
    for beta in [0.1, 0.9] {
        let corr: Vec<_> = ns.iter().map(|&n| input_correlations(n, beta, gamma, mi).unwrap()).collect();
        for (name, series) in [
            ("E", corr.iter().map(|c| c.e).collect::<Vec<_>>()),
            ("D", corr.iter().map(|c| c.d).collect()),
            ("I", corr.iter().map(|c| c.i).collect()),
        ] {
            if !series.windows(2).all(|w| w[1] > w[0]) {
                problems.push(format!("{name} not increasing at beta={beta}"));
            }
        }
        for damping in [0.1, 0.5, 0.9] {
            let ch = LossChannel::from_gamma(damping).unwrap();
            let dq: Vec<f64> = ns.iter().map(|&n| delta_q_gamma(n, beta, gamma, &ch).unwrap()).collect();
            if !dq.windows(2).all(|w| w[1] > w[0]) {
                problems.push(format!("deltaQ not increasing at beta={beta} Gamma={damping}"));
            }
        }
    }
    let sample = random_correlations(10_000, gamma, 6, mi).map_err(|e| e.to_string())?;
    let stats = sample_statistics(&sample).map_err(|e| e.to_string())?;
    if stats.spearman_e_i <= 0.99 {
        problems.push(format!("Spearman(E, I)={:.4} <= 0.99", stats.spearman_e_i));
    }
    if stats.spearman_d_i <= 0.99 {
        problems.push(format!("Spearman(D, I)={:.4} <= 0.99", stats.spearman_d_i));
    }
    if stats.discord_above_one_separable > 0 {
        problems.push(format!("{} states with D > 1 and E = 0", stats.discord_above_one_separable));
    }
    let summary = format!(
        "Spearman(E, I)={:.4}, Spearman(D, I)={:.4}, D>1 separable={}",
        stats.spearman_e_i, stats.spearman_d_i, stats.discord_above_one_separable
    );
    check(
        problems.is_empty(),
        if problems.is_empty() { format!("curves increasing; {summary}") } else { format!("{}; {summary}", problems.join("; ")) },
    )
}

fn fig5_statistic() -> Outcome {
    let mut fractions = Vec::new();
    for gamma in [0.99, 0.9, 0.8, 0.7] {
        let records = random_sweep(1000, &SweepRanges::default(), gamma, 7).map_err(|e| e.to_string())?;
        fractions.push((gamma, positive_fraction(&records)));
    }
    let report = fractions.iter().map(|(g, f)| format!("gamma={g}: {f:.3}")).collect::<Vec<_>>().join(", ");
    check(fractions[0].1 >= 0.99, format!("positive fractions {report}"))
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (PathBuf::from(p.file_name().unwrap()), bytes)
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["qcb", "--modes", "2", "--n", "1.5", "--beta", "0.4", "--gamma", "0.7", "--damping", "0.8"],
        vec!["sweep", "--samples", "300", "--seed", "11", "--gamma", "0.9"],
        vec!["threshold", "--points", "40"],
        vec!["critical"],
        vec!["correlations", "--n", "2", "--beta", "0.3"],
        vec!["verify", "--no-doubling"],
    ];
    let mut mismatched = Vec::new();
    for args in &commands {
        let (a, b) = (lossprobe(args), lossprobe(args));
        if !a.status.success() || a.stdout.is_empty() || a.stdout != b.stdout {
            mismatched.push(args[0].to_string());
        }
    }
    let figures: [&[&str]; 5] = [
        &["2", "--points", "21"],
        &["3"],
        &["4", "--points", "21"],
        &["5", "--samples", "300", "--seed", "7"],
        &["6", "--points", "21", "--samples", "500", "--seed", "3"],
    ];
    let mut written = 0;
    for fig in figures {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let mut args = vec!["figure"];
            args.extend_from_slice(fig);
            args.extend(["--out-dir", d.path().to_str().unwrap()]);
            let out = lossprobe(&args);
            if !out.status.success() {
                mismatched.push(format!("figure {} (exit {:?})", fig[0], out.status.code()));
            }
        }
        let (a, b) = (files(dirs[0].path()), files(dirs[1].path()));
        written += a.len();
        if a.is_empty() || a != b {
            mismatched.push(format!("figure {}", fig[0]));
        }
    }
    check(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} commands and {written} figure files byte-identical across two runs", commands.len())
        } else {
            format!("differs or failed: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let criteria: Vec<(&str, Option<u64>, fn() -> Outcome)> = vec![
        ("critical transmissivity", Some(1), critical),
        ("threshold fit", Some(5), threshold_fit),
        ("closed-form agreement", Some(10), closed_forms),
        ("beta optimality", None, beta_optimality),
        ("gamma optimality and two-mode advantage", Some(30), gamma_optimality),
        ("oracle equivalence", Some(120), oracle),
        ("monotonicity", None, monotonicity),
        ("correlation structure", None, correlations),
        ("random reduction positivity", None, fig5_statistic),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let outcome = timed(limit.map(Duration::from_secs), f);
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name}: {detail}", i + 1);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
