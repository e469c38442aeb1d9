use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};
use terrain_guard::atc::{extreme_viewer_envelopes, solve_bisect};
use terrain_guard::envelope::CurveDump;
use terrain_guard::oracles::{oracle_atc, oracle_batc, oracle_cover_check, oracle_min_guards};
use terrain_guard::scalar::{format_rational, format_scalar, parse_rational};
use terrain_guard::terrain::terrain_to_json;
use terrain_guard::{
    batc_altitude, batc_count, generate, parse_terrain, solve, ArithmeticMode, BatcSolution, Profile, Rational,
    SampleGrid, Scalar, Terrain,
};

use crate::error::CliError;
use crate::report::{CommandEcho, Instance, RunReport, Timer, Verification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AtcMode {
    /// Staged solver (exact where the curves stay linear).
    Exact,
    /// Bisection on the decision algorithm in floating point.
    Bisect,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Terrain<Rational>, CliError> {
    Ok(parse_terrain(&read(path)?)?)
}

pub fn parse_height(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Invalid(format!("bad height {text:?}")))
}

/// Runs `job` over `paths` on up to `jobs` threads; results keep the input order.
pub fn run_batch<T: Send>(
    paths: &[std::path::PathBuf],
    jobs: usize,
    job: impl Fn(&Path) -> Result<T, CliError> + Sync,
) -> Vec<Result<T, CliError>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<T, CliError>>>> = paths.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, paths.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = paths.get(i) else { break };
                *slots[i].lock().unwrap() = Some(job(path));
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

fn report(
    echo: &CommandEcho,
    path: &Path,
    t: &Terrain<Rational>,
    mode: ArithmeticMode,
    solution: Value,
    timer: Timer,
    verification: Option<Verification>,
) -> RunReport {
    RunReport {
        command: echo.clone(),
        instance: Instance::describe(&path.display().to_string(), t),
        mode,
        solution,
        timing: timer.finish(),
        verification,
    }
}

fn check_k(k: usize) -> Result<(), CliError> {
    if k == 0 {
        return Err(CliError::Invalid("--k must be at least 1".into()));
    }
    Ok(())
}

pub fn atc(
    echo: &CommandEcho,
    path: &Path,
    k: usize,
    mode: AtcMode,
    eps: f64,
    grid: SampleGrid,
) -> Result<RunReport, CliError> {
    check_k(k)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(CliError::Invalid("--eps must be positive".into()));
    }
    let mut timer = Timer::default();
    let t = timer.time("parse", || load(path))?;
    let tf: Terrain<f64> = t.convert();
    let s = match mode {
        AtcMode::Exact => timer.time("solve", || solve(&t, k))?,
        AtcMode::Bisect => timer.time("solve", || solve_bisect(&tf, k, &eps)),
    };
    let guards: Vec<f64> = s.guards.iter().map(|g| g.to_f64()).collect();
    let covered = timer.time("verify", || oracle_cover_check(&tf, &s.h_star_f64(), &guards, grid));
    let within_k = guards.len() <= k;
    let verification = Verification {
        method: "oracle_cover_check",
        passed: covered && within_k,
        detail: format!(
            "{} guard(s) at h_star, {} samples per edge: {}",
            guards.len(),
            grid.per_edge(),
            if !within_k {
                "more guards than k"
            } else if covered {
                "all samples seen"
            } else {
                "some sample unseen"
            }
        ),
    };
    let solution = json!({
        "k": k,
        "h_star": s.h_star_string(),
        "guards": s.guard_strings(),
        "method": s.method,
        "certificate": s.certificate,
        "diagnostics": s.diagnostics,
    });
    Ok(report(echo, path, &t, s.mode, solution, timer, Some(verification)))
}

fn pairs_json(s: &BatcSolution) -> Value {
    s.pairs
        .iter()
        .map(|p| json!({ "guard_x": format_rational(&p.guard_x), "from": p.from, "to": p.to }))
        .collect()
}

fn partition_check(t: &Terrain<Rational>, s: &BatcSolution, k: Option<usize>) -> Verification {
    let exact = s.certify(t);
    let within_k = k.is_none_or(|k| s.pairs.len() <= k);
    Verification {
        method: "partition_certificate",
        passed: exact && within_k,
        detail: format!(
            "{} subchain(s): {}",
            s.pairs.len(),
            if !within_k {
                "more subchains than k"
            } else if exact {
                "every guard sees its subchain"
            } else {
                "a guard misses its subchain"
            }
        ),
    }
}

pub fn batc_count_cmd(echo: &CommandEcho, path: &Path, height: &Rational) -> Result<RunReport, CliError> {
    let mut timer = Timer::default();
    let t = timer.time("parse", || load(path))?;
    let s = timer.time("solve", || batc_count(&t, height))?;
    let verification = timer.time("verify", || partition_check(&t, &s, None));
    let solution = json!({
        "h_star": format_rational(height),
        "count": s.pairs.len(),
        "pairs": pairs_json(&s),
    });
    Ok(report(
        echo,
        path,
        &t,
        ArithmeticMode::Exact,
        solution,
        timer,
        Some(verification),
    ))
}

pub fn batc_altitude_cmd(echo: &CommandEcho, path: &Path, k: usize) -> Result<RunReport, CliError> {
    check_k(k)?;
    let mut timer = Timer::default();
    let t = timer.time("parse", || load(path))?;
    let s = timer.time("solve", || batc_altitude(&t, k))?;
    let verification = timer.time("verify", || partition_check(&t, &s, Some(k)));
    let solution = json!({
        "k": k,
        "h_star": format_rational(&s.h_star),
        "pairs": pairs_json(&s),
    });
    Ok(report(
        echo,
        path,
        &t,
        ArithmeticMode::Exact,
        solution,
        timer,
        Some(verification),
    ))
}

pub enum OracleQuery {
    MinGuards { height: Rational },
    Atc { k: usize, eps: f64 },
    Batc { k: usize },
    Cover { height: Rational, guards: Vec<Rational> },
}

pub fn oracle(echo: &CommandEcho, path: &Path, query: &OracleQuery, grid: SampleGrid) -> Result<RunReport, CliError> {
    let mut timer = Timer::default();
    let t = timer.time("parse", || load(path))?;
    let tf: Terrain<f64> = t.convert();
    let above = |h: &Rational| {
        if h < t.y_max() {
            Err(CliError::Invalid(format!(
                "height {} is below the terrain top {}",
                format_rational(h),
                format_rational(t.y_max())
            )))
        } else {
            Ok(h.to_f64())
        }
    };
    let (mode, solution) = match query {
        OracleQuery::MinGuards { height } => {
            let h = above(height)?;
            let count = timer.time("solve", || oracle_min_guards(&tf, &h, grid));
            (
                ArithmeticMode::Float,
                json!({ "height": format_rational(height), "count": count }),
            )
        }
        OracleQuery::Atc { k, eps } => {
            check_k(*k)?;
            let h = timer.time("solve", || oracle_atc(&tf, *k, grid, *eps));
            (ArithmeticMode::Float, json!({ "k": k, "h_star": format_scalar(&h) }))
        }
        OracleQuery::Batc { k } => {
            check_k(*k)?;
            let h = timer.time("solve", || oracle_batc(&t, *k));
            (ArithmeticMode::Exact, json!({ "k": k, "h_star": format_rational(&h) }))
        }
        OracleQuery::Cover { height, guards } => {
            let h = above(height)?;
            let xs: Vec<f64> = guards.iter().map(|g| g.to_f64()).collect();
            let covered = timer.time("solve", || oracle_cover_check(&tf, &h, &xs, grid));
            let guards: Vec<String> = guards.iter().map(format_rational).collect();
            (
                ArithmeticMode::Float,
                json!({ "height": format_rational(height), "guards": guards, "covered": covered }),
            )
        }
    };
    Ok(report(echo, path, &t, mode, solution, timer, None))
}

pub fn gen(n: usize, seed: u64, profile: Profile, amplitude: i64) -> Result<String, CliError> {
    let t = generate(n, seed, profile, amplitude)?;
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&terrain_to_json(&t)).expect("plain JSON")
    ))
}

/// Extreme-viewer curves `f` and `g` as plot-ready JSON.
pub fn curves(path: &Path) -> Result<String, CliError> {
    let t = load(path)?;
    let (f, g) = extreme_viewer_envelopes(&t);
    let dumps = vec![CurveDump::from_curve("f", &f), CurveDump::from_curve("g", &g)];
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&dumps).expect("plain JSON")
    ))
}
