//! Flags, the optional JSON config file, and the merged run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use chroma_core::{PhysParams, RegularizationExponents, State};

/// Options shared by every subcommand. Each one may also come from the file
/// named by `CHROMA_CONFIG`; flags win.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Left state as `v,y`.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    pub ul: Option<[f64; 2]>,
    /// Right state as `v,y`.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    pub ur: Option<[f64; 2]>,
    #[arg(long, global = true)]
    pub alpha1: Option<f64>,
    #[arg(long, global = true)]
    pub alpha2: Option<f64>,
    /// Resolution: grid cells, sample count, or orbit points depending on the command.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub cfl: Option<f64>,
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    pub beta1: Option<f64>,
    #[arg(long, global = true)]
    pub beta2: Option<f64>,
    #[arg(long, global = true)]
    pub beta3: Option<f64>,
    #[arg(long, global = true)]
    pub beta4: Option<f64>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance used by `validate` and by the inner-orbit integration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Flat config file; every key optional.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    ul: Option<[f64; 2]>,
    ur: Option<[f64; 2]>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    n: Option<usize>,
    cfl: Option<f64>,
    t_end: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    beta3: Option<f64>,
    beta4: Option<f64>,
    out: Option<PathBuf>,
    tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub ul: State,
    pub ur: State,
    pub params: PhysParams,
    pub exps: RegularizationExponents,
    pub n: Option<usize>,
    pub cfl: f64,
    pub t_end: f64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `v,y`, got `{s}`"));
    }
    let p = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok([p(parts[0])?, p(parts[1])?])
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl Config {
    pub const DEFAULT_UL: [f64; 2] = [1.0, -3.0];
    pub const DEFAULT_UR: [f64; 2] = [8.0, -5.66];

    /// Merges flags over the file named by `config_path` (if any) over the
    /// defaults, then checks every parameter.
    pub fn load(args: &CommonArgs, config_path: Option<&Path>) -> Result<Self> {
        let file = match config_path {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let ul = args.ul.or(file.ul).unwrap_or(Self::DEFAULT_UL);
        let ur = args.ur.or(file.ur).unwrap_or(Self::DEFAULT_UR);
        let d = PhysParams::default();
        let params = PhysParams::new(
            args.alpha1.or(file.alpha1).unwrap_or(d.alpha1),
            args.alpha2.or(file.alpha2).unwrap_or(d.alpha2),
        )?;
        let de = RegularizationExponents::default();
        let exps = RegularizationExponents::new(
            args.beta1.or(file.beta1).unwrap_or(de.beta1),
            args.beta2.or(file.beta2).unwrap_or(de.beta2),
            args.beta3.or(file.beta3).unwrap_or(de.beta3),
            args.beta4.or(file.beta4).unwrap_or(de.beta4),
        )?;
        let cfl = args.cfl.or(file.cfl).unwrap_or(0.45);
        if !(cfl > 0.0 && cfl <= 0.5) {
            bail!(chroma_core::Error::InvalidParameter(format!("cfl must lie in (0, 0.5], got {cfl}")));
        }
        let t_end = args.t_end.or(file.t_end).unwrap_or(1.0);
        if !(t_end > 0.0) {
            bail!(chroma_core::Error::InvalidParameter(format!("t-end must be positive, got {t_end}")));
        }
        let tol = args.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                bail!(chroma_core::Error::InvalidParameter(format!("tol must be positive, got {t}")));
            }
        }
        let n = args.n.or(file.n);
        Ok(Self {
            ul: State::new(ul[0], ul[1]),
            ur: State::new(ur[0], ur[1]),
            params,
            exps,
            n,
            cfl,
            t_end,
            tol,
            out: args.out.clone().or(file.out),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("1,-3").unwrap(), [1.0, -3.0]);
        assert_eq!(parse_pair(" 8 , -5.66").unwrap(), [8.0, -5.66]);
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"ul": [2.0, -4.0], "cfl": 0.3, "n": 50}"#).unwrap();
        let args = CommonArgs {
            cfl: Some(0.25),
            ..Default::default()
        };
        let c = Config::load(&args, Some(&path)).unwrap();
        assert_eq!((c.ul.v, c.ul.y), (2.0, -4.0));
        assert_eq!(c.cfl, 0.25);
        assert_eq!(c.n, Some(50));
        std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert!(Config::load(&CommonArgs::default(), Some(&path)).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let bad = [
            CommonArgs { cfl: Some(0.7), ..Default::default() },
            CommonArgs { beta2: Some(8.0), ..Default::default() },
            CommonArgs { alpha1: Some(3.0), ..Default::default() },
            CommonArgs { t_end: Some(0.0), ..Default::default() },
        ];
        for a in bad {
            assert!(Config::load(&a, None).is_err(), "{a:?}");
        }
    }
}
