use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::levels::Value;
use crate::workload::trace::WorkloadOp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("bad mix: {0}")]
    BadMix(String),
    #[error("unknown adversarial workload `{0}` (expected increasing, decreasing or sawtooth)")]
    UnknownAdversarial(String),
}

/// Fractions of each op kind in a generated workload. "insert" means a
/// positional insert: front or after a uniformly chosen position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mix {
    pub append: f64,
    pub insert: f64,
    pub delete: f64,
    pub query: f64,
    pub extract: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Mix {
            append: 0.4,
            insert: 0.3,
            delete: 0.2,
            query: 0.1,
            extract: 0.0,
        }
    }
}

impl Mix {
    pub fn append_only() -> Self {
        Mix {
            append: 1.0,
            insert: 0.0,
            delete: 0.0,
            query: 0.0,
            extract: 0.0,
        }
    }

    fn parts(&self) -> [(&'static str, f64); 5] {
        [
            ("append", self.append),
            ("insert", self.insert),
            ("delete", self.delete),
            ("query", self.query),
            ("extract", self.extract),
        ]
    }

    pub fn validate(&self) -> Result<(), GenError> {
        for (name, f) in self.parts() {
            if !f.is_finite() || f < 0.0 {
                return Err(GenError::BadMix(format!("{name} fraction {f} is not a nonnegative number")));
            }
        }
        let sum: f64 = self.parts().iter().map(|(_, f)| f).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GenError::BadMix(format!("fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// `default`, `append-only`, or comma-separated `kind=fraction` pairs with
/// kinds `append`, `insert`, `delete`, `query`, `extract` (omitted kinds are 0).
impl FromStr for Mix {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let mix = match s.trim() {
            "default" => Mix::default(),
            "append-only" => Mix::append_only(),
            pairs => {
                let mut mix = Mix {
                    append: 0.0,
                    insert: 0.0,
                    delete: 0.0,
                    query: 0.0,
                    extract: 0.0,
                };
                for part in pairs.split(',') {
                    let (name, raw) = part
                        .split_once('=')
                        .ok_or_else(|| GenError::BadMix(format!("expected kind=fraction, got `{part}`")))?;
                    let f: f64 = raw
                        .trim()
                        .parse()
                        .map_err(|_| GenError::BadMix(format!("bad fraction `{raw}`")))?;
                    let slot = match name.trim() {
                        "append" => &mut mix.append,
                        "insert" => &mut mix.insert,
                        "delete" => &mut mix.delete,
                        "query" => &mut mix.query,
                        "extract" => &mut mix.extract,
                        other => return Err(GenError::BadMix(format!("unknown kind `{other}`"))),
                    };
                    *slot = f;
                }
                mix
            }
        };
        mix.validate()?;
        Ok(mix)
    }
}

impl fmt::Display for Mix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts()
            .iter()
            .filter(|(_, v)| *v > 0.0)
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    pub mix: Mix,
    /// Inclusive value range.
    pub values: (Value, Value),
}

pub const DEFAULT_VALUES: (Value, Value) = (0, 1_000_000);

impl GenConfig {
    pub fn new(seed: u64, n: usize, mix: Mix) -> Self {
        GenConfig {
            seed,
            n,
            mix,
            values: DEFAULT_VALUES,
        }
    }
}

/// Random workload over the default value range.
pub fn gen_workload(seed: u64, n: usize, mix: &Mix) -> Result<Vec<WorkloadOp>, GenError> {
    generate(&GenConfig::new(seed, n, *mix))
}

/// Deterministic for a given config. A delete drawn while the list is empty
/// is emitted as an append instead.
pub fn generate(cfg: &GenConfig) -> Result<Vec<WorkloadOp>, GenError> {
    cfg.mix.validate()?;
    let (lo, hi) = cfg.values;
    if lo > hi {
        return Err(GenError::BadMix(format!("empty value range {lo}..={hi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let Mix {
        append,
        insert,
        delete,
        query,
        ..
    } = cfg.mix;
    let mut live = 0usize;
    let mut ops = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let r: f64 = rng.gen();
        let value = rng.gen_range(lo..=hi);
        let op = if r < append || (r < append + insert + delete && r >= append + insert && live == 0) {
            WorkloadOp::Append { value }
        } else if r < append + insert {
            match rng.gen_range(0..=live) {
                0 => WorkloadOp::InsertFront { value },
                p => WorkloadOp::InsertAfterPos { pos: p - 1, value },
            }
        } else if r < append + insert + delete {
            WorkloadOp::DeletePos {
                pos: rng.gen_range(0..live),
            }
        } else if r < append + insert + delete + query {
            WorkloadOp::QueryLength
        } else {
            WorkloadOp::Extract
        };
        if op.is_insert() {
            live += 1;
        } else if op.is_delete() {
            live -= 1;
        }
        ops.push(op);
    }
    Ok(ops)
}

/// Append-only workloads with a fixed LIS regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adversarial {
    /// Strictly increasing values: LIS = n.
    Increasing,
    /// Strictly decreasing values: LIS = 1.
    Decreasing,
    /// `floor(sqrt(n))` repeated increasing runs.
    Sawtooth,
}

impl FromStr for Adversarial {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "increasing" => Ok(Adversarial::Increasing),
            "decreasing" => Ok(Adversarial::Decreasing),
            "sawtooth" => Ok(Adversarial::Sawtooth),
            other => Err(GenError::UnknownAdversarial(other.to_string())),
        }
    }
}

pub fn adversarial(kind: Adversarial, n: usize) -> Vec<WorkloadOp> {
    let period = ((n as f64).sqrt() as usize).max(1);
    (0..n)
        .map(|i| {
            let value = match kind {
                Adversarial::Increasing => i as Value,
                Adversarial::Decreasing => (n - i) as Value,
                Adversarial::Sawtooth => (i % period) as Value,
            };
            WorkloadOp::Append { value }
        })
        .collect()
}
