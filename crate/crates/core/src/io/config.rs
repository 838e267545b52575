use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// How the initial state is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// Seeded random surface data with modes `|k|_inf <= kmax` and spectral decay
    /// `|k|^-decay`, scaled to `amp` in coefficient `L^2`; `interior_amp > 0` adds
    /// random interior layers damped by `exp(-(z - 1)^2)`.
    Random { kmax: i64, decay: f64, amp: f64, interior_amp: f64, seed: u64 },
    /// `theta = amp cos(k x1)`, no interior data.
    Mode { k: i64, amp: f64 },
    Snapshot(PathBuf),
}

/// Named forcing generators.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingKind {
    None,
    /// Steady surface forcing `f_nu = amp cos(k x2)`.
    SteadySurface { k: i64, amp: f64 },
    /// Steady interior forcing `f_L = amp cos(k x1) exp(-z)`.
    SteadyInterior { k: i64, amp: f64 },
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub l: f64,
    pub nz: usize,
    pub h: f64,
    pub initial: InitialSpec,
    pub forcing: ForcingKind,
    /// `None` selects the step from the initial CFL limit.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub eps_diss: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    pub diag_every: usize,
    pub p_list: Vec<f64>,
    pub q_list: Vec<f64>,
    pub besov_alphas: Vec<f64>,
    pub flux_eps: Option<f64>,
    pub blowup_factor: f64,
    pub out: PathBuf,
}

const KEYS: &[&str] = &[
    "n",
    "l",
    "nz",
    "h",
    "initial",
    "init_kmax",
    "init_decay",
    "init_amp",
    "init_interior_amp",
    "init_k",
    "seed",
    "snapshot",
    "forcing",
    "forcing_k",
    "forcing_amp",
    "dt",
    "cfl",
    "eps_diss",
    "t_end",
    "snapshot_every",
    "diag_every",
    "p_list",
    "q_list",
    "besov_alphas",
    "flux_eps",
    "blowup_factor",
    "out",
];

const REQUIRED: &[&str] = &["n", "t_end"];

/// Admissible surface exponents `p in (4/3, inf)`.
pub fn check_p(p: f64) -> Result<()> {
    if p > 4.0 / 3.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::ExponentRange { value: p, range: "(4/3, inf) for p" })
    }
}

/// Admissible interior exponents `q in (6/5, 3)`.
pub fn check_q(q: f64) -> Result<()> {
    if q > 1.2 && q < 3.0 {
        Ok(())
    } else {
        Err(Error::ExponentRange { value: q, range: "(6/5, 3) for q" })
    }
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => {
                v.parse().map_err(|_| Error::Config { line: *line, msg: format!("cannot parse {key} = {v:?}") })
            }
        }
    }

    fn list(&self, key: &str, default: &[f64], check: fn(f64) -> Result<()>) -> Result<Vec<f64>> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let line = *line;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let x: f64 =
                item.parse().map_err(|_| Error::Config { line, msg: format!("cannot parse {key} entry {item:?}") })?;
            check(x).map_err(|e| Error::Config { line, msg: e.to_string() })?;
            out.push(x);
        }
        Ok(out)
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |e| e.0)
    }
}

fn invalid(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

/// Parses `key = value` lines; `#` starts a comment. Errors carry the line
/// number of the offending entry (0 for a missing key).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| invalid(line, format!("expected key = value, got {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(invalid(line, format!("unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(invalid(line, format!("empty value for {key}")));
        }
        if map.insert(key.to_string(), (line, value.to_string())).is_some() {
            return Err(invalid(line, format!("duplicate key {key}")));
        }
    }
    let e = Entries { map };
    for key in REQUIRED {
        if e.raw(key).is_none() {
            return Err(invalid(0, format!("missing required key {key}")));
        }
    }

    let seed = e.get("seed", 0u64)?;
    let initial = match e.get("initial", "random".to_string())?.as_str() {
        "random" => InitialSpec::Random {
            kmax: e.get("init_kmax", 4)?,
            decay: e.get("init_decay", 1.0)?,
            amp: e.get("init_amp", 0.5)?,
            interior_amp: e.get("init_interior_amp", 0.0)?,
            seed,
        },
        "mode" => InitialSpec::Mode { k: e.get("init_k", 1)?, amp: e.get("init_amp", 0.5)? },
        "snapshot" => match e.raw("snapshot") {
            Some((_, p)) => InitialSpec::Snapshot(PathBuf::from(p)),
            None => return Err(invalid(e.line("initial"), "initial = snapshot needs a snapshot path")),
        },
        other => return Err(invalid(e.line("initial"), format!("unknown initial generator {other:?}"))),
    };
    let (fk, famp) = (e.get("forcing_k", 1)?, e.get("forcing_amp", 0.0)?);
    let forcing = match e.get("forcing", "none".to_string())?.as_str() {
        "none" => ForcingKind::None,
        "steady_surface" => ForcingKind::SteadySurface { k: fk, amp: famp },
        "steady_interior" => ForcingKind::SteadyInterior { k: fk, amp: famp },
        other => return Err(invalid(e.line("forcing"), format!("unknown forcing generator {other:?}"))),
    };
    let dt = match e.get("dt", "auto".to_string())?.as_str() {
        "auto" => None,
        v => Some(v.parse::<f64>().map_err(|_| invalid(e.line("dt"), format!("cannot parse dt = {v:?}")))?),
    };
    let flux_eps = match e.get("flux_eps", "none".to_string())?.as_str() {
        "none" => None,
        v => Some(v.parse::<f64>().map_err(|_| invalid(e.line("flux_eps"), format!("cannot parse flux_eps = {v:?}")))?),
    };

    let cfg = RunConfig {
        n: e.get("n", 0)?,
        l: e.get("l", 2.0 * PI)?,
        nz: e.get("nz", 32)?,
        h: e.get("h", PI)?,
        initial,
        forcing,
        dt,
        cfl: e.get("cfl", 0.4)?,
        eps_diss: e.get("eps_diss", 0.0)?,
        t_end: e.get("t_end", 0.0)?,
        snapshot_every: e.get("snapshot_every", 10)?,
        diag_every: e.get("diag_every", 1)?,
        p_list: e.list("p_list", &[2.0, 3.0, 4.0], check_p)?,
        q_list: e.list("q_list", &[2.0], check_q)?,
        besov_alphas: e.list("besov_alphas", &[0.5], |_| Ok(()))?,
        flux_eps,
        blowup_factor: e.get("blowup_factor", 1e3)?,
        out: PathBuf::from(e.get("out", "out".to_string())?),
    };

    let positive = |key: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(e.line(key), format!("{key} = {v} must be positive and finite")))
        }
    };
    positive("l", cfg.l)?;
    positive("h", cfg.h)?;
    positive("cfl", cfg.cfl)?;
    positive("blowup_factor", cfg.blowup_factor)?;
    if let Some(dt) = cfg.dt {
        positive("dt", dt)?;
    }
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(invalid(e.line("t_end"), "t_end must be non-negative"));
    }
    if !(cfg.eps_diss >= 0.0 && cfg.eps_diss.is_finite()) {
        return Err(invalid(e.line("eps_diss"), "eps_diss must be non-negative"));
    }
    if cfg.snapshot_every == 0 {
        return Err(invalid(e.line("snapshot_every"), "snapshot_every must be positive"));
    }
    if cfg.diag_every == 0 {
        return Err(invalid(e.line("diag_every"), "diag_every must be positive"));
    }
    Ok(cfg)
}
