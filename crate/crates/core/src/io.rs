//! Run configuration files, binary snapshots and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::grid::{Boundary, Configuration, Grid};
use crate::su2::Su2Vec;

/// Key/value run configuration. Every key is optional; absent keys fall back
/// to subcommand defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub h: Option<f64>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub n3: Option<usize>,
    pub boundary: Option<Boundary>,
    pub twist_n: Option<i64>,
    pub step0: Option<f64>,
    pub tol_residual: Option<f64>,
    pub max_iters: Option<usize>,
    pub backtrack: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub input: Option<String>,
    pub r_max: Option<f64>,
    pub n_radial: Option<usize>,
    pub y_samples: Option<usize>,
    pub trials: Option<usize>,
    pub amplitude: Option<f64>,
    pub eta_star: Option<f64>,
    /// Threshold of the hot-spot set `{w ≥ β}`, in `(0, 1/2)`.
    pub beta: Option<f64>,
    pub radius: Option<f64>,
    pub sphere_level: Option<u32>,
    pub y: Option<[f64; 3]>,
    pub center: Option<[f64; 3]>,
    pub radii: Option<Vec<f64>>,
}

/// Every key [`parse_config`] accepts, in emission order.
pub const CONFIG_KEYS: &[&str] = &[
    "epsilon", "lambda", "h", "n1", "n2", "n3", "boundary", "twist_n", "step0", "tol_residual", "max_iters",
    "backtrack", "seed", "threads", "out", "input", "r_max", "n_radial", "y_samples", "trials", "amplitude",
    "eta_star", "beta", "radius", "sphere_level", "y", "center", "radii",
];

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::Validation { key: key.to_string(), message: message.into() }
}

fn real(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| invalid(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn positive(key: &str, v: &str) -> Result<f64> {
    let x = real(key, v)?;
    if x <= 0.0 {
        return Err(invalid(key, format!("{x} must be > 0")));
    }
    Ok(x)
}

fn non_negative(key: &str, v: &str) -> Result<f64> {
    let x = real(key, v)?;
    if x < 0.0 {
        return Err(invalid(key, format!("{x} must be >= 0")));
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| invalid(key, format!("`{v}` is not a valid integer")))
}

fn reals(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(|s| real(key, s)).collect()
}

fn triple(key: &str, v: &str) -> Result<[f64; 3]> {
    let xs = reals(key, v)?;
    xs.try_into().map_err(|_| invalid(key, "expected three numbers"))
}

fn string(key: &str, v: &str) -> Result<String> {
    if v.is_empty() {
        return Err(invalid(key, "must not be empty"));
    }
    Ok(v.to_string())
}

impl RunConfig {
    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "epsilon" => self.epsilon = Some(positive(key, v)?),
            "lambda" => self.lambda = Some(non_negative(key, v)?),
            "h" => self.h = Some(positive(key, v)?),
            "n1" | "n2" | "n3" => {
                let n: usize = int(key, v)?;
                if n < 4 {
                    return Err(invalid(key, format!("{n} must be >= 4")));
                }
                match key {
                    "n1" => self.n1 = Some(n),
                    "n2" => self.n2 = Some(n),
                    _ => self.n3 = Some(n),
                }
            }
            "boundary" => {
                self.boundary = Some(match v {
                    "periodic" => Boundary::Periodic,
                    "dirichlet" => Boundary::Dirichlet,
                    _ => return Err(invalid(key, format!("`{v}` is not periodic or dirichlet"))),
                })
            }
            "twist_n" => self.twist_n = Some(int(key, v)?),
            "step0" => self.step0 = Some(positive(key, v)?),
            "tol_residual" => self.tol_residual = Some(positive(key, v)?),
            "max_iters" => self.max_iters = Some(int(key, v)?),
            "backtrack" => {
                let b = real(key, v)?;
                if !(b > 0.0 && b < 1.0) {
                    return Err(invalid(key, format!("{b} must lie in (0, 1)")));
                }
                self.backtrack = Some(b);
            }
            "seed" => self.seed = Some(int(key, v)?),
            "threads" => {
                let t: usize = int(key, v)?;
                if t == 0 {
                    return Err(invalid(key, "must be >= 1"));
                }
                self.threads = Some(t);
            }
            "out" => self.out = Some(string(key, v)?),
            "input" => self.input = Some(string(key, v)?),
            "r_max" => self.r_max = Some(positive(key, v)?),
            "n_radial" => self.n_radial = Some(int(key, v)?),
            "y_samples" => self.y_samples = Some(int(key, v)?),
            "trials" => self.trials = Some(int(key, v)?),
            "amplitude" => self.amplitude = Some(non_negative(key, v)?),
            "eta_star" => self.eta_star = Some(positive(key, v)?),
            "beta" => {
                let b = real(key, v)?;
                if !(b > 0.0 && b < 0.5) {
                    return Err(invalid(key, format!("{b} must lie in (0, 1/2)")));
                }
                self.beta = Some(b);
            }
            "radius" => self.radius = Some(positive(key, v)?),
            "sphere_level" => {
                let l: u32 = int(key, v)?;
                if l > 7 {
                    return Err(invalid(key, format!("{l} must be <= 7")));
                }
                self.sphere_level = Some(l);
            }
            "y" => {
                let y = triple(key, v)?;
                if y.iter().map(|c| c * c).sum::<f64>() > 1.0 + 1e-12 {
                    return Err(invalid(key, "|y| must be <= 1"));
                }
                self.y = Some(y);
            }
            "center" => self.center = Some(triple(key, v)?),
            "radii" => {
                let r = reals(key, v)?;
                if r.is_empty() || r.iter().any(|x| *x <= 0.0) {
                    return Err(invalid(key, "expected positive numbers"));
                }
                self.radii = Some(r);
            }
            _ => return Err(invalid(key, "unknown key")),
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> Option<String> {
        let r = |x: Option<f64>| x.map(|v| format!("{v:?}"));
        let list = |x: &[f64]| x.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ");
        match key {
            "epsilon" => r(self.epsilon),
            "lambda" => r(self.lambda),
            "h" => r(self.h),
            "n1" => self.n1.map(|v| v.to_string()),
            "n2" => self.n2.map(|v| v.to_string()),
            "n3" => self.n3.map(|v| v.to_string()),
            "boundary" => self.boundary.map(|b| match b {
                Boundary::Periodic => "periodic".to_string(),
                Boundary::Dirichlet => "dirichlet".to_string(),
            }),
            "twist_n" => self.twist_n.map(|v| v.to_string()),
            "step0" => r(self.step0),
            "tol_residual" => r(self.tol_residual),
            "max_iters" => self.max_iters.map(|v| v.to_string()),
            "backtrack" => r(self.backtrack),
            "seed" => self.seed.map(|v| v.to_string()),
            "threads" => self.threads.map(|v| v.to_string()),
            "out" => self.out.clone(),
            "input" => self.input.clone(),
            "r_max" => r(self.r_max),
            "n_radial" => self.n_radial.map(|v| v.to_string()),
            "y_samples" => self.y_samples.map(|v| v.to_string()),
            "trials" => self.trials.map(|v| v.to_string()),
            "amplitude" => r(self.amplitude),
            "eta_star" => r(self.eta_star),
            "beta" => r(self.beta),
            "radius" => r(self.radius),
            "sphere_level" => self.sphere_level.map(|v| v.to_string()),
            "y" => self.y.map(|v| list(&v)),
            "center" => self.center.map(|v| list(&v)),
            "radii" => self.radii.as_deref().map(list),
            _ => None,
        }
    }

    /// `EnergyParams` from `epsilon` and `lambda` with the given defaults.
    pub fn energy_params(&self, epsilon: f64, lambda: f64) -> Result<EnergyParams> {
        EnergyParams::new(self.epsilon.unwrap_or(epsilon), self.lambda.unwrap_or(lambda))
    }

    /// Grid from `n1..n3`, `h`, `boundary`, `twist_n` with the given defaults.
    pub fn grid(&self, n: usize, h: f64, boundary: Boundary) -> Result<Grid> {
        let dims = [self.n1.unwrap_or(n), self.n2.unwrap_or(n), self.n3.unwrap_or(n)];
        let h = self.h.unwrap_or(h);
        match self.boundary.unwrap_or(boundary) {
            Boundary::Periodic => Grid::periodic(dims, h)?.with_twist(self.twist_n.unwrap_or(0)),
            Boundary::Dirichlet => {
                if self.twist_n.is_some_and(|t| t != 0) {
                    return Err(invalid("twist_n", "twist requires a periodic grid"));
                }
                Grid::dirichlet(dims, h)
            }
        }
    }
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(Error::Parse { line: i + 1, message: format!("bad key `{k}`") });
        }
        if !seen.insert(k.to_string()) && CONFIG_KEYS.contains(&k) {
            return Err(Error::Parse { line: i + 1, message: format!("duplicate key `{k}`") });
        }
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

/// Canonical text form; `parse_config(&emit_config(c)) == c`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    for key in CONFIG_KEYS {
        if let Some(v) = cfg.value_of(key) {
            writeln!(s, "{key} = {v}").unwrap();
        }
    }
    s
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"YMH1";

/// Serialise a configuration and its parameters. The grid origin is not
/// stored; loading restores the default centred origin.
pub fn snapshot_bytes(cfg: &Configuration, p: EnergyParams) -> Vec<u8> {
    let g = &cfg.grid;
    let n = g.n_sites();
    let mut out = Vec::with_capacity(4 + 5 * 8 + 3 * 8 + n * 12 * 8);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    let dims = g.dims();
    let flag = match g.boundary() {
        Boundary::Periodic => 0i64,
        Boundary::Dirichlet => 1,
    };
    for v in [dims[0] as i64, dims[1] as i64, dims[2] as i64, g.twist(), flag] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [g.spacing(), p.epsilon, p.lambda] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for a in &cfg.a {
        for d in a {
            for c in d.0 {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    for phi in &cfg.phi {
        for c in phi.0 {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take8(&mut self) -> Result<[u8; 8]> {
        let s = self.bytes.get(self.pos..self.pos + 8).ok_or(Error::TruncatedFile)?;
        self.pos += 8;
        Ok(s.try_into().unwrap())
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take8()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take8()?))
    }
}

pub fn snapshot_from_bytes(bytes: &[u8]) -> Result<(Configuration, EnergyParams)> {
    if bytes.len() < 4 {
        return Err(Error::TruncatedFile);
    }
    if &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { bytes, pos: 4 };
    let raw_dims = [r.i64()?, r.i64()?, r.i64()?];
    let twist = r.i64()?;
    let flag = r.i64()?;
    let (h, eps, lambda) = (r.f64()?, r.f64()?, r.f64()?);
    if raw_dims.iter().any(|&d| d < 1 || d > 1 << 20) {
        return Err(Error::DimMismatch(format!("bad dimensions {raw_dims:?}")));
    }
    let dims = raw_dims.map(|d| d as usize);
    let grid = match flag {
        0 => Grid::periodic(dims, h)?.with_twist(twist)?,
        1 => Grid::dirichlet(dims, h)?,
        _ => return Err(Error::DimMismatch(format!("bad boundary flag {flag}"))),
    };
    let n = grid.n_sites();
    let expected = r.pos + n * 12 * 8;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile);
    }
    if bytes.len() > expected {
        return Err(Error::DimMismatch(format!("{} trailing bytes", bytes.len() - expected)));
    }
    let mut su2 = || -> Result<Su2Vec> { Ok(Su2Vec([r.f64()?, r.f64()?, r.f64()?])) };
    let mut a = Vec::with_capacity(n);
    for _ in 0..n {
        a.push([su2()?, su2()?, su2()?]);
    }
    let mut phi = Vec::with_capacity(n);
    for _ in 0..n {
        phi.push(su2()?);
    }
    Ok((Configuration::new(grid, a, phi)?, EnergyParams::new(eps, lambda)?))
}

pub fn save_snapshot(cfg: &Configuration, p: EnergyParams, path: &Path) -> Result<()> {
    fs::write(path, snapshot_bytes(cfg, p)).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<(Configuration, EnergyParams)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    snapshot_from_bytes(&bytes)
}

/// Write a CSV file from a header line and pre-formatted rows.
pub fn write_csv<I, S>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut buf = String::new();
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(row.as_ref());
        buf.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(buf.as_bytes()).map_err(|e| Error::io(path, e))
}
