use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qg_halfspace::diagnostics::{record, DiagnosticsConfig};
use qg_halfspace::dynamics::{run, SimState};
use qg_halfspace::io::{
    diagnostics_config, export_diagnostics, initial_state, parse_config, read_snapshot, run_setup, spectrum_csv,
    verify_state, write_snapshot, RunConfig,
};
use qg_halfspace::Result;

#[derive(Parser)]
#[command(name = "qghs", about = "Quasi-geostrophic half-space solver and verification suite")]
struct Cli {
    /// Run configuration (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config entry.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the initial-data generator; overrides the config entry.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Single worker thread. Results do not depend on the thread count, this
    /// only pins the schedule.
    #[arg(long, global = true)]
    fixed_order: bool,
    /// Worker threads for the per-level parallel loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the configured run and write snapshots and diagnostics.
    Run,
    /// Check invariants and identities on a snapshot, the configured initial state,
    /// or a built-in smooth state.
    Verify {
        snapshot: Option<PathBuf>,
        /// Steps of the short conservation run; 0 skips it.
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Recompute diagnostics from the snapshots of a run directory.
    Diagnose {
        /// Directory holding `snap_*.qghs`; defaults to the output directory.
        dir: Option<PathBuf>,
    },
    /// Per-band energy and Besov contributions of one snapshot.
    Spectrum {
        snapshot: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
}

const DEFAULT_VERIFY_CONFIG: &str = "n = 64\nnz = 16\nt_end = 0\ninit_kmax = 4\n";

fn load_config(cli: &Cli) -> Result<Option<RunConfig>> {
    cli.config.as_ref().map(|p| parse_config(&fs::read_to_string(p)?)).transpose()
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    cli.out.clone().or_else(|| cfg.map(|c| c.out.clone())).unwrap_or_else(|| PathBuf::from("out"))
}

fn snapshot_name(k: usize) -> String {
    format!("snap_{k:05}.qghs")
}

fn snapshots_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("snap_") && n.ends_with(".qghs"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

fn cmd_run(cli: &Cli) -> Result<bool> {
    let Some(cfg) = load_config(cli)? else {
        eprintln!("run needs --config");
        return Ok(false);
    };
    let out = out_dir(cli, Some(&cfg));
    fs::create_dir_all(&out)?;
    let traj = run(&run_setup(&cfg, cli.seed)?)?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        write_snapshot(s, out.join(snapshot_name(k)))?;
    }
    export_diagnostics(&traj.records, out.join("diagnostics.csv"))?;
    println!(
        "{} steps of dt = {:e}, {} snapshots in {}",
        (traj.records.last().map_or(0.0, |r| r.t) / traj.params.dt).round(),
        traj.params.dt,
        traj.snapshots.len(),
        out.display()
    );
    if let Some(reason) = &traj.halted {
        eprintln!("halted: {reason}");
        return Ok(false);
    }
    Ok(true)
}

fn cmd_verify(cli: &Cli, snapshot: Option<&Path>, steps: usize) -> Result<bool> {
    let state: SimState = match (snapshot, load_config(cli)?) {
        (Some(p), _) => read_snapshot(p)?,
        (None, Some(cfg)) => initial_state(&cfg, cli.seed)?,
        (None, None) => initial_state(&parse_config(DEFAULT_VERIFY_CONFIG)?, cli.seed)?,
    };
    let checks = verify_state(&state, steps)?;
    for c in &checks {
        println!("{c}");
    }
    Ok(checks.iter().all(|c| c.passed()))
}

fn cmd_diagnose(cli: &Cli, dir: Option<&Path>) -> Result<bool> {
    let cfg = load_config(cli)?;
    let dcfg = cfg.as_ref().map(diagnostics_config).unwrap_or_else(DiagnosticsConfig::default);
    let out = out_dir(cli, cfg.as_ref());
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| out.clone());
    let paths = snapshots_in(&dir)?;
    let records = paths.iter().map(|p| read_snapshot(p).and_then(|s| record(&s, &dcfg))).collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&out)?;
    export_diagnostics(&records, out.join("diagnose.csv"))?;
    println!("{} records written to {}", records.len(), out.join("diagnose.csv").display());
    Ok(true)
}

fn cmd_spectrum(cli: &Cli, snapshot: &Path, alpha: f64) -> Result<bool> {
    let text = spectrum_csv(&read_snapshot(snapshot)?, alpha)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("spectrum.csv"), text)?;
        }
        None => print!("{text}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.fixed_order { Some(1) } else { cli.threads };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.cmd {
        Cmd::Run => cmd_run(&cli),
        Cmd::Verify { snapshot, steps } => cmd_verify(&cli, snapshot.as_deref(), *steps),
        Cmd::Diagnose { dir } => cmd_diagnose(&cli, dir.as_deref()),
        Cmd::Spectrum { snapshot, alpha } => cmd_spectrum(&cli, snapshot, *alpha),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
