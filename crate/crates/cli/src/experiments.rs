//! One function per subcommand. Each computes its tables in memory and
//! returns them with a short human-readable summary; nothing touches disk.

use glitch_core::funcspace::{exp_function_on, tent_function_with};
use glitch_core::topology::three_step_check;
use glitch_core::{
    compact_open_distance, decision_time_curve, epsilon_components, glitch_search,
    min_cross_distance, sample_family, verify_convergence, window_distance, Decision, Extension,
    FamilyRadius, SampledSignal, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Table};

pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
}

fn zero_on(grid: &TimeGrid) -> glitch_core::Result<SampledSignal> {
    Ok(SampledSignal::zero(*grid, Extension::ZeroOutside))
}

fn sign_cell(d: Option<Decision>) -> String {
    d.map_or(0, |d| d.sign.as_i8()).to_string()
}

fn time_cell(d: Option<Decision>) -> String {
    d.map_or(String::new(), |d| num(d.time))
}

const EXP_WINDOWS: [u32; 3] = [1, 2, 3];
const AXIOM_WINDOWS: [u32; 3] = [1, 2, 5];

pub fn metrics(config: &RunConfig) -> Result<Outcome, CliError> {
    let horizon = config.truncation as f64;
    let mut table = Table::new("metrics.csv", &["case", "n", "r", "expected", "actual", "abs_error"]);
    let mut worst = 0.0_f64;
    let mut row = |case: &str, n: u32, r: u32, expected: f64, actual: f64| {
        let err = (actual - expected).abs();
        worst = worst.max(if case == "exp" { err / expected } else { err });
        table.push(vec![
            case.to_string(),
            n.to_string(),
            r.to_string(),
            num(expected),
            num(actual),
            num(err),
        ]);
    };
    for n in config.metrics_n_min..=config.metrics_n_max {
        let tent = tent_function_with(n, horizon, config.grid_step)?;
        let actual = window_distance(&tent, &zero_on(tent.grid())?, 1.0)?;
        row("tent", n, 1, 1.0, actual);
    }
    for n in config.metrics_n_min..=config.metrics_n_max {
        let f = exp_function_on(n, config.grid())?;
        let zero = zero_on(f.grid())?;
        for r in EXP_WINDOWS {
            let actual = window_distance(&f, &zero, r as f64)?;
            row("exp", n, r, (r as f64 - n as f64).exp(), actual);
        }
    }

    let axioms = axiom_table(config)?;
    let worst_excess = axioms
        .rows
        .iter()
        .map(|r| r[6].parse::<f64>().expect("own number"))
        .fold(0.0_f64, f64::max);
    let summary = vec![
        format!("{} regression rows, worst error {}", table.rows.len(), num(worst)),
        format!(
            "{} axiom rows from seed {}, worst triangle excess {}",
            axioms.rows.len(),
            config.seed,
            num(worst_excess)
        ),
    ];
    Ok(Outcome {
        tables: vec![table, axioms],
        summary,
    })
}

fn random_signal(rng: &mut ChaCha8Rng, grid: TimeGrid) -> SampledSignal {
    let scale = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
    let values = (0..grid.count()).map(|_| rng.gen_range(-scale..scale)).collect();
    SampledSignal::new(grid, values, Extension::ZeroOutside).expect("matching length")
}

/// Metric axioms on seeded random triples, for each window and the full
/// compact-open metric.
fn axiom_table(config: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "axioms.csv",
        &["triple", "metric", "d_fg", "d_gh", "d_fh", "symmetry_error", "triangle_excess"],
    );
    let grid = TimeGrid::covering(config.truncation as f64, 0.05)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for i in 0..config.axiom_triples {
        let f = random_signal(&mut rng, grid);
        let g = random_signal(&mut rng, grid);
        let h = random_signal(&mut rng, grid);
        let mut push = |metric: String, d: &dyn Fn(&SampledSignal, &SampledSignal) -> glitch_core::Result<f64>| {
            let (fg, gh, fh, gf) = (d(&f, &g)?, d(&g, &h)?, d(&f, &h)?, d(&g, &f)?);
            table.push(vec![
                i.to_string(),
                metric,
                num(fg),
                num(gh),
                num(fh),
                num((fg - gf).abs()),
                num((fh - fg - gh).max(0.0)),
            ]);
            Ok::<_, glitch_core::Error>(())
        };
        for r in AXIOM_WINDOWS {
            push(format!("d{r}"), &|a, b| window_distance(a, b, r as f64))?;
        }
        push("dstar".into(), &|a, b| compact_open_distance(a, b, config.truncation))?;
    }
    Ok(table)
}

pub fn convergence(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new("convergence.csv", &["case", "n", "distance", "tolerance", "within"]);
    let mut summary = Vec::new();
    let (lo, hi) = (config.convergence_n_min, config.convergence_n_max);
    if lo > hi {
        summary.push("empty index range".to_string());
        return Ok(Outcome {
            tables: vec![table],
            summary,
        });
    }
    let tol = config.convergence_tolerance;
    let horizon = config.truncation as f64;
    let grid = config.grid();
    let exp = verify_convergence(|n| exp_function_on(n, grid), zero_on, tol, lo, hi, config.truncation)?;
    let tent = verify_convergence(
        |n| tent_function_with(n, horizon, config.grid_step),
        zero_on,
        tol,
        lo,
        hi,
        config.truncation,
    )?;
    for (case, report) in [("exp", &exp), ("tent", &tent)] {
        for &(n, d) in &report.distances {
            table.push(vec![
                case.to_string(),
                n.to_string(),
                num(d),
                num(tol),
                (d <= tol).to_string(),
            ]);
        }
        summary.push(format!(
            "{case}: {} within {} for n in [{lo}, {hi}]",
            if report.passed { "converged" } else { "not converged" },
            num(tol)
        ));
    }
    Ok(Outcome {
        tables: vec![table],
        summary,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn sweep(config: &RunConfig) -> Result<Outcome, CliError> {
    let magnitudes = config.sweep_skews();
    let mut skews: Vec<f64> = magnitudes.iter().rev().map(|s| -s).collect();
    skews.push(0.0);
    skews.extend(&magnitudes);
    let rows = decision_time_curve(&skews, config.base_time, &config.shape(), &config.arbiter);

    let mut table = Table::new("sweep.csv", &["skew", "sign", "decision_time", "decided"]);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut decided = Vec::with_capacity(rows.len());
    for row in rows {
        let d = row.outcome?;
        table.push(vec![
            num(row.skew),
            sign_cell(d),
            time_cell(d),
            d.is_some().to_string(),
        ]);
        if let (Some(d), true) = (d, row.skew != 0.0) {
            xs.push((1.0 / row.skew.abs()).ln());
            ys.push(d.time);
        }
        decided.push(d);
    }

    // Times should not grow as |skew| grows, on either side of zero.
    let k = magnitudes.len();
    let neg: Vec<f64> = decided[..k].iter().rev().flatten().map(|d| d.time).collect();
    let pos: Vec<f64> = decided[k + 1..].iter().flatten().map(|d| d.time).collect();
    let monotone = [neg, pos]
        .iter()
        .all(|branch| branch.windows(2).all(|w| w[1] <= w[0]));

    let mut fit = Table::new(
        "sweep_fit.csv",
        &["points", "slope", "intercept", "tau", "relative_error", "monotone"],
    );
    let tau = config.arbiter.tau;
    let mut summary = vec![format!("{} skews, {} decided off zero", skews.len(), xs.len())];
    if xs.len() >= 2 && xs.iter().any(|&x| x != xs[0]) {
        let (slope, intercept) = least_squares(&xs, &ys);
        let rel = (slope - tau).abs() / tau;
        fit.push(vec![
            xs.len().to_string(),
            num(slope),
            num(intercept),
            num(tau),
            num(rel),
            monotone.to_string(),
        ]);
        summary.push(format!("slope {} vs tau {} (relative error {})", num(slope), num(tau), num(rel)));
    }
    if !monotone {
        summary.push("warning: decision time not monotone in |skew|".into());
    }
    Ok(Outcome {
        tables: vec![table, fit],
        summary,
    })
}

pub fn search(config: &RunConfig, target: f64) -> Result<Outcome, CliError> {
    let result = glitch_search(
        target,
        config.base_time,
        (config.search_lo, config.search_hi),
        &config.shape(),
        &config.arbiter,
        config.search_max_iterations,
    )?;
    let mut table = Table::new(
        "search.csv",
        &["iteration", "lo", "hi", "skew", "sign", "decision_time", "achieved_time"],
    );
    for step in &result.steps {
        table.push(vec![
            step.iteration.to_string(),
            num(step.lo),
            num(step.hi),
            num(step.skew),
            sign_cell(step.decision),
            time_cell(step.decision),
            num(step.best_time),
        ]);
    }
    let achieved = result.achieved_time.map_or("never".to_string(), num);
    let summary = vec![format!(
        "target {}: {} after {} iterations, skew {}, decision time {}",
        num(target),
        if result.succeeded { "reached" } else { "not reached" },
        result.iterations,
        num(result.skew),
        achieved
    )];
    Ok(Outcome {
        tables: vec![table],
        summary,
    })
}

pub fn connectivity(config: &RunConfig) -> Result<Outcome, CliError> {
    let shape = config.net_shape();
    let grid = config.grid();
    let r = config.truncation;
    let mut table = Table::new("connectivity.csv", &["experiment", "delta", "components", "min_cross_distance"]);
    let mut summary = Vec::new();

    let net = sample_family(FamilyRadius::Finite(config.net_radius), config.net_count, false, &shape, grid, r)?;
    let cross = min_cross_distance(&net.positive(), &net.negative(), r)?;
    let finite = epsilon_components(&net.signals, cross / 2.0, r)?;
    table.push(vec![
        "U_r".into(),
        num(finite.delta),
        finite.component_count.to_string(),
        num(cross),
    ]);
    summary.push(format!("U_r: {} signals, {} components", net.len(), finite.component_count));

    let inf_net = sample_family(FamilyRadius::Infinite, config.net_count, true, &shape, grid, r)?;
    let inf_cross = min_cross_distance(&inf_net.positive(), &inf_net.negative(), r)?;
    let infinite = epsilon_components(&inf_net.signals, 1.5 * inf_net.resolution, r)?;
    table.push(vec![
        "U_infty".into(),
        num(infinite.delta),
        infinite.component_count.to_string(),
        num(inf_cross),
    ]);
    summary.push(format!(
        "U_infty: {} signals, {} components",
        inf_net.len(),
        infinite.component_count
    ));

    let report = three_step_check(&config.three_step(), &config.shape(), &config.arbiter)?;
    table.push(vec![
        "image_chain".into(),
        num(report.chain_delta),
        report.chain.connectivity.component_count.to_string(),
        report.early_separation.map_or(String::new(), num),
    ]);
    summary.push(format!(
        "image chain: {} components, {} path points undecided by t={}",
        report.chain.connectivity.component_count,
        report.late_points.len(),
        num(config.early_time)
    ));
    Ok(Outcome {
        tables: vec![table],
        summary,
    })
}
