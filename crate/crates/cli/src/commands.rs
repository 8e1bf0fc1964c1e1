//! Execution of resolved subcommands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use warpmean::io::{self, LabeledBundle};
use warpmean::simulate::{derive_seed, test_function_f, test_function_g};
use warpmean::validation::Suite;
use warpmean::{
    band_inverse_se, band_warp, forward_se, inverse_se, make_bundle, monotonize_bundle,
    select_bandwidth, simulate_warps, smooth_bundle, structural_mean_nonmonotone, warp_estimate,
    warp_estimate_nonmonotone, CurveBundle, Error, Grid, MatchingCriterion, SmoothingConfig,
    WarpSimConfig,
};

use crate::args::*;
use crate::manifest::{manifest_path, sibling, RunManifest};
use crate::svg::{line_plot, Series};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs a parsed command: fills path defaults, executes, and writes the
/// manifest next to the primary output. `rerun` replays a stored command.
pub fn run(command: Command) -> CliResult<Vec<PathBuf>> {
    let command = match command {
        Command::Rerun(args) => load_manifest(&args.manifest)?.command,
        other => resolve(other),
    };
    if matches!(command, Command::Rerun(_)) {
        return Err(CliError::Usage("a manifest cannot record a rerun".into()));
    }
    let mut outputs = execute(&command)?;
    let (out, seed) = primary(&command);
    let manifest = manifest_path(out);
    write_text(
        &manifest,
        &RunManifest::new(command.clone(), seed, outputs.clone()).to_json(),
    )?;
    outputs.push(manifest);
    Ok(outputs)
}

fn load_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid manifest {}: {e}", path.display())))
}

/// Makes every defaulted output path explicit.
pub fn resolve(command: Command) -> Command {
    match command {
        Command::Register(mut a) => {
            a.inverse_out
                .get_or_insert_with(|| sibling(&a.out, "inverse.csv"));
            if a.band.is_some() {
                a.band_out
                    .get_or_insert_with(|| sibling(&a.out, "band.csv"));
            }
            Command::Register(a)
        }
        Command::Rescale(mut a) => {
            a.tests_out
                .get_or_insert_with(|| sibling(&a.out, "tests.csv"));
            Command::Rescale(a)
        }
        other => other,
    }
}

fn primary(command: &Command) -> (&Path, u64) {
    match command {
        Command::Simulate(a) => (&a.out, a.seed),
        Command::Register(a) => (&a.out, a.seed),
        Command::Warp(a) => (&a.out, a.seed),
        Command::Monotonize(a) => (&a.out, a.seed),
        Command::Smooth(a) => (&a.out, a.seed),
        Command::Rescale(a) => (&a.out, a.seed),
        Command::Montecarlo(a) => (&a.out, a.seed),
        Command::Rerun(a) => (&a.manifest, 0),
    }
}

fn execute(command: &Command) -> CliResult<Vec<PathBuf>> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Register(a) => register(a),
        Command::Warp(a) => warp(a),
        Command::Monotonize(a) => monotonize(a),
        Command::Smooth(a) => smooth(a),
        Command::Rescale(a) => rescale(a),
        Command::Montecarlo(a) => montecarlo(a),
        Command::Rerun(_) => unreachable!("rerun is resolved before execution"),
    }
}

fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())).into())
}

fn write_with<F>(path: &Path, f: F) -> CliResult<PathBuf>
where
    F: FnOnce(&mut Vec<u8>) -> warpmean::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(Error::Io)?;
    Ok(path.to_path_buf())
}

fn write_text(path: &Path, text: &str) -> CliResult<PathBuf> {
    write_with(path, |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })
}

fn write_svg(out: &Path, title: &str, series: &[Series]) -> CliResult<PathBuf> {
    write_text(&sibling(out, "svg"), &line_plot(title, series))
}

fn read_bundle(path: &Path) -> CliResult<LabeledBundle> {
    Ok(io::read_bundle(open(path)?)?)
}

fn common_grid(bundle: &CurveBundle) -> CliResult<Grid> {
    bundle.common_grid().cloned().ok_or_else(|| {
        Error::InvalidInput("all curves must be sampled on the same time grid".into()).into()
    })
}

fn bundle_series(bundle: &CurveBundle) -> Vec<Series<'static>> {
    bundle
        .curves()
        .iter()
        .map(|c| Series {
            label: "",
            points: c
                .times()
                .iter()
                .copied()
                .zip(c.values().iter().copied())
                .collect(),
            faint: true,
        })
        .collect()
}

fn simulate(a: &SimulateArgs) -> CliResult<Vec<PathBuf>> {
    let warps = simulate_warps(&WarpSimConfig {
        m: a.m,
        iterations: a.iterations,
        eps: a.eps,
        seed: a.seed,
        n: a.n,
    })?;
    let fun = match a.function {
        FunctionArg::F => test_function_f,
        FunctionArg::G => test_function_g,
    };
    let bundle = make_bundle(fun, &warps, a.n, a.noise_sigma, derive_seed(a.seed, 1))?;
    let mut outputs = vec![write_with(&a.out, |w| io::write_bundle(w, None, &bundle))?];
    if let Some(path) = &a.warps_out {
        let grid = common_grid(&bundle)?;
        outputs.push(write_with(path, |w| io::write_warps(w, &warps, &grid))?);
    }
    if a.svg {
        outputs.push(write_svg(
            &a.out,
            "simulated bundle",
            &bundle_series(&bundle),
        )?);
    }
    Ok(outputs)
}

/// Smooths with a fixed bandwidth or by selection; returns the smoothed
/// bundle and, for a search, the per-bandwidth criteria.
fn apply_smoothing(
    bundle: &CurveBundle,
    s: &SmoothingArgs,
) -> CliResult<(CurveBundle, f64, Vec<(f64, Result<f64, String>)>)> {
    if let Some(nu) = s.bandwidth {
        return Ok((smooth_bundle(bundle, nu)?, nu, Vec::new()));
    }
    let grid = common_grid(bundle)?;
    let config = match s.bandwidth_grid {
        Some(g) => SmoothingConfig::log_spaced(g.min, g.max, g.count)?,
        None => SmoothingConfig::default_for(&grid)?,
    }
    .with_criterion(match s.criterion {
        CriterionArg::Registered => MatchingCriterion::Registered,
        CriterionArg::Pointwise => MatchingCriterion::Pointwise,
    });
    let sel = select_bandwidth(bundle, &config)?;
    Ok((sel.smoothed, sel.bandwidth, sel.criteria))
}

fn register(a: &RegisterArgs) -> CliResult<Vec<PathBuf>> {
    let mut bundle = read_bundle(&a.input)?.bundle;
    if a.smooth {
        bundle = apply_smoothing(&bundle, &a.smoothing)?.0;
    } else if a.smoothing.bandwidth.is_some() || a.smoothing.bandwidth_grid.is_some() {
        return Err(CliError::Usage(
            "--bandwidth and --bandwidth-grid need --smooth".into(),
        ));
    }
    let grid = common_grid(&bundle)?;
    let (values, inverse) = if a.monotonize {
        let z = monotonize_bundle(&bundle);
        let inverse = inverse_se(&z, &warpmean::estimators::default_ordinates(&z))?;
        (
            structural_mean_nonmonotone(&bundle)?.values().to_vec(),
            inverse,
        )
    } else {
        let inverse = inverse_se(&bundle, &warpmean::estimators::default_ordinates(&bundle))?;
        let forward = forward_se(&inverse)?;
        let values = grid
            .points()
            .iter()
            .map(|&t| forward.eval(t))
            .collect::<warpmean::Result<Vec<_>>>()?;
        (values, inverse)
    };
    let inverse_out = a
        .inverse_out
        .clone()
        .unwrap_or_else(|| sibling(&a.out, "inverse.csv"));
    let mut outputs = vec![
        write_with(&a.out, |w| io::write_xy(w, grid.points(), &values))?,
        write_with(&inverse_out, |w| {
            io::write_xy(w, &inverse.eval_grid, &inverse.values)
        })?,
    ];
    if let Some(alpha) = a.band {
        let band = band_inverse_se(&inverse, alpha)?;
        let path = a
            .band_out
            .clone()
            .unwrap_or_else(|| sibling(&a.out, "band.csv"));
        outputs.push(write_with(&path, |w| io::write_band(w, &band))?);
    }
    if a.svg {
        let mut series = bundle_series(&bundle);
        series.push(Series {
            label: "structural expectation",
            points: grid
                .points()
                .iter()
                .copied()
                .zip(values.iter().copied())
                .collect(),
            faint: false,
        });
        outputs.push(write_svg(&a.out, "structural expectation", &series)?);
    }
    Ok(outputs)
}

fn warp(a: &WarpArgs) -> CliResult<Vec<PathBuf>> {
    let bundle = read_bundle(&a.input)?.bundle;
    let grid = common_grid(&bundle)?;
    let result = if a.monotonize {
        warp_estimate_nonmonotone(&bundle, a.i0, grid.points())?
    } else {
        warp_estimate(&bundle, a.i0, grid.points())?
    };
    let band = band_warp(&result, a.alpha)?;
    let mut outputs = vec![write_with(&a.out, |w| io::write_warp(w, &band))?];
    if a.svg {
        let pts = |v: &[f64]| {
            grid.points()
                .iter()
                .copied()
                .zip(v.iter().copied())
                .collect()
        };
        let series = [
            Series {
                label: "warp",
                points: pts(&band.center),
                faint: false,
            },
            Series {
                label: "lower",
                points: pts(&band.lower),
                faint: true,
            },
            Series {
                label: "upper",
                points: pts(&band.upper),
                faint: true,
            },
            Series {
                label: "identity",
                points: pts(grid.points()),
                faint: true,
            },
        ];
        outputs.push(write_svg(
            &a.out,
            &format!("warp of curve {}", a.i0),
            &series,
        )?);
    }
    Ok(outputs)
}

fn monotonize(a: &MonotonizeArgs) -> CliResult<Vec<PathBuf>> {
    let input = read_bundle(&a.input)?;
    let z = monotonize_bundle(&input.bundle);
    let mut outputs = vec![write_with(&a.out, |w| {
        io::write_bundle(w, Some(&input.ids), &z)
    })?];
    if a.svg {
        outputs.push(write_svg(&a.out, "monotonized curves", &bundle_series(&z))?);
    }
    Ok(outputs)
}

fn smooth(a: &SmoothArgs) -> CliResult<Vec<PathBuf>> {
    let input = read_bundle(&a.input)?;
    let (smoothed, nu, criteria) = apply_smoothing(&input.bundle, &a.smoothing)?;
    eprintln!("bandwidth: {nu}");
    let mut outputs = vec![write_with(&a.out, |w| {
        io::write_bundle(w, Some(&input.ids), &smoothed)
    })?];
    if let Some(path) = &a.criteria_out {
        outputs.push(write_with(path, |w| io::write_criteria(w, &criteria))?);
    }
    if a.svg {
        outputs.push(write_svg(
            &a.out,
            &format!("smoothed, bandwidth {nu:.4}"),
            &bundle_series(&smoothed),
        )?);
    }
    Ok(outputs)
}

fn rescale(a: &RescaleArgs) -> CliResult<Vec<PathBuf>> {
    let table = io::read_scores(open(&a.input)?)?;
    let tests = warpmean::equity::pairwise_tests(&table)?;
    let tests_out = a
        .tests_out
        .clone()
        .unwrap_or_else(|| sibling(&a.out, "tests.csv"));
    let mut outputs = vec![write_with(&tests_out, |w| io::write_pair_tests(w, &tests))?];
    let rescaled = warpmean::equity::rescale_scores(&table)?;
    outputs.insert(0, write_with(&a.out, |w| io::write_rescaled(w, &rescaled))?);
    if a.svg {
        let series: Vec<Series> = rescaled
            .iter()
            .map(|(id, scores)| {
                let mut pts: Vec<(f64, f64)> = scores
                    .iter()
                    .map(|s| (f64::from(s.raw), s.structural))
                    .collect();
                pts.sort_by(|x, y| x.0.total_cmp(&y.0));
                pts.dedup();
                Series {
                    label: id,
                    points: pts,
                    faint: false,
                }
            })
            .collect();
        outputs.push(write_svg(&a.out, "structural vs raw score", &series)?);
    }
    Ok(outputs)
}

fn montecarlo(a: &MontecarloArgs) -> CliResult<Vec<PathBuf>> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a
            .suite
            .parse()
            .map_err(|e: Error| CliError::Usage(e.to_string()))?]
    };
    let mut rows = Vec::new();
    for suite in suites {
        rows.extend(suite.run(a.replications, a.seed)?);
    }
    for r in &rows {
        eprintln!(
            "{} {}/{} = {} ({})",
            if r.pass { "pass" } else { "FAIL" },
            r.experiment,
            r.metric,
            r.value,
            r.threshold
        );
    }
    Ok(vec![write_with(&a.out, |w| io::write_summary(w, &rows))?])
}
