use rayon::prelude::*;

use super::output::{Cell, Plot, Table};
use crate::channel::LossChannel;
use crate::correlations::{correlation_report_with, spearman_rank_correlation, CorrelationReport, MutualInfoConvention};
use crate::error::Result;
use crate::probe::{delta_q_gamma, params_from_spec, positive_fraction, q1, q2, random_sweep, sample_point, ProbeSpec, SweepRanges};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub mi: MutualInfoConvention,
}

pub const FIG2_ETAS: [f64; 3] = [0.1, 0.5, 0.9];
pub const FIG2_BETAS: [f64; 3] = [0.1, 0.5, 1.0];
pub const FIG2_GAMMAS: [f64; 3] = [0.0, 0.5, 1.0];
pub const FIG3_DAMPINGS: [f64; 3] = [0.1, 0.3, 1.0];
pub const FIG4_DAMPINGS: [f64; 2] = [0.1, 0.9];
pub const FIG5_GAMMAS: [f64; 4] = [0.99, 0.9, 0.8, 0.7];
pub const FIG6_BETAS: [f64; 2] = [0.1, 0.9];
pub const FIG6_DAMPINGS: [f64; 3] = [0.1, 0.5, 0.9];
pub const FIG6_MAP_DAMPINGS: [f64; 2] = [0.2, 0.8];
pub const FIG6_GAMMA: f64 = 0.999;

/// `points` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// `points` values on `(0, hi]`, equally spaced.
pub fn open_grid(hi: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| hi * i as f64 / points as f64).collect()
}

fn label(x: f64) -> String {
    super::output::fmt_num(x)
}

pub fn figure(id: u8, opts: &FigureOptions) -> Result<Vec<Table>> {
    match id {
        2 => figure2(opts),
        3 => figure3(opts),
        4 => figure4(opts),
        5 => figure5(opts),
        6 => figure6(opts),
        _ => Err(crate::error::domain(format!("unknown figure {id}; expected 2-6"))),
    }
}

/// Q against N for several beta at fixed eta, one panel per eta (and gamma).
fn figure2(opts: &FigureOptions) -> Result<Vec<Table>> {
    let ns = linspace(0.0, 10.0, opts.points.unwrap_or(101));
    let mut tables = Vec::new();
    let mut panels: Vec<(u8, f64, f64)> = FIG2_ETAS.iter().map(|&e| (1, e, 1.0)).collect();
    for &g in &FIG2_GAMMAS {
        panels.extend(FIG2_ETAS.iter().map(|&e| (2, e, g)));
    }
    for (modes, eta, gamma) in panels {
        let ch = LossChannel::from_eta(eta)?;
        let grid: Vec<(f64, f64)> = FIG2_BETAS.iter().flat_map(|&b| ns.iter().map(move |&n| (b, n))).collect();
        let qs = grid
            .par_iter()
            .map(|&(b, n)| if modes == 1 { q1(n, b, &ch) } else { q2(n, b, gamma, &ch) })
            .collect::<Result<Vec<_>>>()?;
        let name = if modes == 1 {
            format!("fig2_single_eta{}", label(eta))
        } else {
            format!("fig2_two_eta{}_gamma{}", label(eta), label(gamma))
        };
        let mut t = Table::new(name, &["N", "beta", "gamma", "eta", "Q"]).with_plot(Plot::Lines {
            x: 0,
            ys: vec![4],
            group: Some((1, FIG2_BETAS.to_vec())),
        });
        for (&(b, n), q) in grid.iter().zip(qs) {
            t.push(vec![n.into(), b.into(), gamma.into(), eta.into(), q.into()]);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Squeezed-vacuum bounds Q1, Q2 against N for a few dampings.
fn figure3(opts: &FigureOptions) -> Result<Vec<Table>> {
    let ns = linspace(0.0, 10.0, opts.points.unwrap_or(201));
    let grid: Vec<(f64, f64)> = FIG3_DAMPINGS.iter().flat_map(|&g| ns.iter().map(move |&n| (g, n))).collect();
    let rows = grid
        .par_iter()
        .map(|&(g, n)| {
            let ch = LossChannel::from_gamma(g)?;
            Ok((q1(n, 1.0, &ch)?, q2(n, 1.0, 1.0, &ch)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("fig3", &["N", "Gamma", "Q1", "Q2"]).with_plot(Plot::Lines {
        x: 0,
        ys: vec![2, 3],
        group: Some((1, FIG3_DAMPINGS.to_vec())),
    });
    for (&(g, n), (a, b)) in grid.iter().zip(rows) {
        t.push(vec![n.into(), g.into(), a.into(), b.into()]);
    }
    Ok(vec![t])
}

/// Density of the reduction over (N, beta), one panel per damping.
fn figure4(opts: &FigureOptions) -> Result<Vec<Table>> {
    let points = opts.points.unwrap_or(51);
    let ns = linspace(0.0, 5.0, points);
    let betas = linspace(0.0, 1.0, points);
    let mut tables = Vec::new();
    for &g in &FIG4_DAMPINGS {
        let ch = LossChannel::from_gamma(g)?;
        let grid: Vec<(f64, f64)> = betas.iter().flat_map(|&b| ns.iter().map(move |&n| (n, b))).collect();
        let rows = grid
            .par_iter()
            .map(|&(n, b)| Ok((q1(n, b, &ch)?, q2(n, b, 1.0, &ch)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut t = Table::new(format!("fig4_Gamma{}", label(g)), &["N", "beta", "Gamma", "Q1", "Q2", "deltaQ"])
            .with_plot(Plot::Map { x: 0, y: 1, z: 5 });
        for (&(n, b), (a, c)) in grid.iter().zip(rows) {
            t.push(vec![n.into(), b.into(), g.into(), a.into(), c.into(), (a - c).into()]);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Reduction at reduced asymmetry over random (N, beta, Gamma).
fn figure5(opts: &FigureOptions) -> Result<Vec<Table>> {
    let gammas = opts.gamma.map_or(FIG5_GAMMAS.to_vec(), |g| vec![g]);
    let samples = opts.samples.unwrap_or(1000);
    let mut tables = Vec::new();
    for gamma in gammas {
        let records = random_sweep(samples, &SweepRanges::default(), gamma, opts.seed)?;
        let mut t = Table::new(format!("fig5_gamma{}", label(gamma)), &["N", "beta", "Gamma", "gamma", "deltaQ_gamma"])
            .with_plot(Plot::Points { x: 0, ys: vec![4] });
        t.note("samples", Cell::Int(samples as i64));
        t.note("positive_fraction", positive_fraction(&records));
        for r in &records {
            t.push(vec![r.n.into(), r.beta.into(), r.damping.into(), r.gamma.into(), r.delta_q_gamma.into()]);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Correlations of the input two-mode state at asymmetry `FIG6_GAMMA`.
pub fn input_correlations(n: f64, beta: f64, gamma: f64, mi: MutualInfoConvention) -> Result<CorrelationReport> {
    let cm = params_from_spec(ProbeSpec::two(n, beta, gamma)?)?.covariance()?;
    correlation_report_with(&cm, mi)
}

fn figure6(opts: &FigureOptions) -> Result<Vec<Table>> {
    let gamma = opts.gamma.unwrap_or(FIG6_GAMMA);
    let points = opts.points.unwrap_or(101);
    let betas = opts.beta.map_or(FIG6_BETAS.to_vec(), |b| vec![b]);
    let mut tables = Vec::new();

    // correlation curves along N
    let ns = open_grid(5.0, points);
    for &beta in &betas {
        for &g in &FIG6_DAMPINGS {
            let ch = LossChannel::from_gamma(g)?;
            let rows = ns
                .par_iter()
                .map(|&n| Ok((input_correlations(n, beta, gamma, opts.mi)?, delta_q_gamma(n, beta, gamma, &ch)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(format!("fig6_upper_beta{}_Gamma{}", label(beta), label(g)), &["N", "E", "D", "I", "deltaQ"])
                .with_plot(Plot::Lines { x: 0, ys: vec![1, 2, 3, 4], group: None });
            t.note("beta", beta);
            t.note("Gamma", g);
            t.note("gamma", gamma);
            for (&n, (c, dq)) in ns.iter().zip(rows) {
                t.push(vec![n.into(), c.e.into(), c.d.into(), c.i.into(), dq.into()]);
            }
            tables.push(t);
        }
    }

    // reduction over the (D, E) plane
    let map_points = opts.points.map_or(41, |p| p.min(41));
    let grid: Vec<(f64, f64)> = linspace(0.0, 1.0, map_points)
        .into_iter()
        .flat_map(|b| open_grid(5.0, map_points).into_iter().map(move |n| (n, b)))
        .collect();
    for &g in &FIG6_MAP_DAMPINGS {
        let ch = LossChannel::from_gamma(g)?;
        let rows = grid
            .par_iter()
            .map(|&(n, b)| Ok((input_correlations(n, b, gamma, opts.mi)?, delta_q_gamma(n, b, gamma, &ch)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut t = Table::new(format!("fig6_middle_Gamma{}", label(g)), &["N", "beta", "E", "D", "deltaQ"])
            .with_plot(Plot::Map { x: 3, y: 2, z: 4 });
        for (&(n, b), (c, dq)) in grid.iter().zip(rows) {
            t.push(vec![n.into(), b.into(), c.e.into(), c.d.into(), dq.into()]);
        }
        tables.push(t);
    }

    // random sample of input states
    let samples = opts.samples.unwrap_or(10_000);
    let sample = random_correlations(samples, gamma, opts.seed, opts.mi)?;
    let mut t = Table::new("fig6_lower", &["N", "beta", "E", "D", "I"]).with_plot(Plot::Points { x: 4, ys: vec![2, 3] });
    let stats = sample_statistics(&sample)?;
    t.note("samples", Cell::Int(samples as i64));
    t.note("spearman_E_I", stats.spearman_e_i);
    t.note("spearman_D_I", stats.spearman_d_i);
    t.note("discord_above_1_separable", Cell::Int(stats.discord_above_one_separable as i64));
    for (n, b, c) in &sample {
        t.push(vec![(*n).into(), (*b).into(), c.e.into(), c.d.into(), c.i.into()]);
    }
    tables.push(t);
    Ok(tables)
}

/// Input-state correlations for random `(N, beta)` with `N` in `(0, 5]`.
pub fn random_correlations(
    samples: usize,
    gamma: f64,
    seed: u64,
    mi: MutualInfoConvention,
) -> Result<Vec<(f64, f64, CorrelationReport)>> {
    let ranges = SweepRanges::default();
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (n, b, _) = sample_point(seed, i, &ranges);
            Ok((n, b, input_correlations(n, b, gamma, mi)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStatistics {
    pub spearman_e_i: f64,
    pub spearman_d_i: f64,
    /// States with discord above one nat that are not entangled.
    pub discord_above_one_separable: usize,
}

pub fn sample_statistics(sample: &[(f64, f64, CorrelationReport)]) -> Result<SampleStatistics> {
    let e: Vec<f64> = sample.iter().map(|s| s.2.e).collect();
    let d: Vec<f64> = sample.iter().map(|s| s.2.d).collect();
    let i: Vec<f64> = sample.iter().map(|s| s.2.i).collect();
    Ok(SampleStatistics {
        spearman_e_i: spearman_rank_correlation(&e, &i)?,
        spearman_d_i: spearman_rank_correlation(&d, &i)?,
        discord_above_one_separable: sample.iter().filter(|s| s.2.d > 1.0 && s.2.e <= 0.0).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(open_grid(5.0, 2), vec![2.5, 5.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn figure3_crossings() {
        let opts = FigureOptions { points: Some(41), samples: None, seed: 0, gamma: None, beta: None, mi: Default::default() };
        let t = &figure(3, &opts).unwrap()[0];
        for g in FIG3_DAMPINGS {
            let rows: Vec<_> = t.rows.iter().filter(|r| r[1] == Cell::Num(g)).collect();
            let gap = |r: &Vec<Cell>| match (&r[2], &r[3]) {
                (Cell::Num(a), Cell::Num(b)) => a - b,
                _ => unreachable!(),
            };
            let flips = rows.windows(2).filter(|w| gap(w[0]) < 0.0 && gap(w[1]) > 0.0).count();
            // the weakest damping crosses beyond the plotted range
            let n_th = crate::probe::threshold_energy((-g).exp()).unwrap();
            assert_eq!(flips, usize::from(n_th < 10.0), "Gamma {g}, N_th {n_th}");
        }
    }

    #[test]
    fn unknown_figure() {
        let opts = FigureOptions { points: None, samples: None, seed: 0, gamma: None, beta: None, mi: Default::default() };
        assert!(figure(7, &opts).is_err());
    }
}
