//! Run configuration: `key=value` files merged with command-line flags.

use std::path::PathBuf;

use crate::gf::Field;
use crate::qstate::{DEFAULT_DM_CAP, DEFAULT_KET_CAP};
use crate::schemes::{SchemeKind, SchemeParams};
use crate::verify::Caps;

use super::CliError;

/// Every setting is optional until [`RunConfig::params`] assembles them.
/// Share indices (`advanced`) are 1-based, as typed by users.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub scheme: Option<SchemeKind>,
    pub field: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub alphas: Option<Vec<u32>>,
    pub betas: Option<Vec<u32>>,
    pub advanced: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub cap_kets: Option<u64>,
    pub cap_dm: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got '{line}'", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = |e: String| CliError::Config(format!("line {}: {key}: {e}", no + 1));
            match key {
                "scheme" => cfg.scheme = Some(value.parse().map_err(|e: crate::schemes::SchemeError| ctx(e.to_string()))?),
                "field" => cfg.field = Some(value.to_string()),
                "n" => cfg.n = Some(parse_num(value).map_err(ctx)?),
                "k" => cfg.k = Some(parse_num(value).map_err(ctx)?),
                "L" | "l" => cfg.l = Some(parse_num(value).map_err(ctx)?),
                "alphas" => cfg.alphas = Some(parse_csv(value).map_err(ctx)?),
                "betas" => cfg.betas = Some(parse_csv(value).map_err(ctx)?),
                "advanced" => cfg.advanced = Some(parse_csv(value).map_err(ctx)?),
                "seed" => cfg.seed = Some(parse_num(value).map_err(ctx)?),
                "cap-kets" | "cap_kets" => cfg.cap_kets = Some(parse_num(value).map_err(ctx)?),
                "cap-dm" | "cap_dm" => cfg.cap_dm = Some(parse_num(value).map_err(ctx)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(CliError::Config(format!("line {}: unknown key '{other}'", no + 1))),
            }
        }
        Ok(cfg)
    }

    /// Settings from `overrides` win over `self`.
    pub fn merge(self, overrides: RunConfig) -> RunConfig {
        RunConfig {
            scheme: overrides.scheme.or(self.scheme),
            field: overrides.field.or(self.field),
            n: overrides.n.or(self.n),
            k: overrides.k.or(self.k),
            l: overrides.l.or(self.l),
            alphas: overrides.alphas.or(self.alphas),
            betas: overrides.betas.or(self.betas),
            advanced: overrides.advanced.or(self.advanced),
            seed: overrides.seed.or(self.seed),
            cap_kets: overrides.cap_kets.or(self.cap_kets),
            cap_dm: overrides.cap_dm.or(self.cap_dm),
            out: overrides.out.or(self.out),
        }
    }

    /// Validated scheme. Without explicit points, Ogawa uses `α_i = γ^i` for
    /// the primitive element `γ`; ZM uses `α_i = i - 1` and `β_j = n + j - 1`
    /// (as canonical integers).
    pub fn params(&self) -> Result<SchemeParams, CliError> {
        let missing = |what: &str| CliError::Config(format!("missing {what} (flag --{what} or config key)"));
        let kind = self.scheme.ok_or_else(|| missing("scheme"))?;
        let field = Field::from_descriptor(self.field.as_deref().ok_or_else(|| missing("field"))?)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let k = self.k.ok_or_else(|| missing("k"))?;
        let l = self.l.ok_or_else(|| missing("L"))?;
        let n = match (self.n, &self.alphas) {
            (Some(n), Some(a)) if n != a.len() => {
                return Err(CliError::Config(format!("n={n} but {} alphas given", a.len())));
            }
            (Some(n), _) => n,
            (None, Some(a)) => a.len(),
            (None, None) => return Err(missing("n")),
        };
        let q = field.order();
        let alphas = match &self.alphas {
            Some(a) => a.clone(),
            None => match kind {
                SchemeKind::Ogawa => {
                    let g = field.primitive().value();
                    (1..=n as u64).map(|i| field.pow(g, i)).collect()
                }
                SchemeKind::Zm => (0..n as u32).filter(|&a| a < q).collect(),
            },
        };
        let betas = match (&self.betas, kind) {
            (Some(b), _) => b.clone(),
            (None, SchemeKind::Ogawa) => Vec::new(),
            (None, SchemeKind::Zm) => (n as u32..(n + l) as u32).filter(|&b| b < q).collect(),
        };
        SchemeParams::new(kind, &field, k, l, alphas, betas).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn caps(&self) -> Caps {
        Caps { kets: self.cap_kets.unwrap_or(DEFAULT_KET_CAP), dm: self.cap_dm.unwrap_or(DEFAULT_DM_CAP) }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Advanced shares as 0-based indices; defaults to the first `k - L`.
    pub fn advanced_shares(&self, params: &SchemeParams) -> Result<Vec<usize>, CliError> {
        match &self.advanced {
            None => Ok((0..params.free()).collect()),
            Some(list) => list.iter().map(|&i| to_zero_based(i, params.n())).collect(),
        }
    }
}

pub(crate) fn to_zero_based(i: usize, n: usize) -> Result<usize, CliError> {
    if i == 0 || i > n {
        Err(CliError::Usage(format!("share index {i} out of range 1..={n}")))
    } else {
        Ok(i - 1)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a valid number"))
}

pub(crate) fn parse_csv<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_num(x)).collect()
}
