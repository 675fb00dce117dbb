//! Persistent factorization cache: one JSON record per line,
//! `{"value", "factors": [[prime, exponent], ...], "residual", "residual_status"}`.
//!
//! Only complete factorizations are written. Loaded records are re-validated
//! (product, ordering, primality) and dropped with a warning when they fail.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::RwLock;

use lseq_core::arith::{
    primality, FactorCache, Factorization, Primality, PrimePower, ResidualStatus,
};
use lseq_core::Nat;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    value: String,
    factors: Vec<(String, u32)>,
    residual: String,
    residual_status: ResidualStatus,
}

impl Record {
    fn from_entry(value: &Nat, f: &Factorization) -> Self {
        Record {
            value: value.to_string(),
            factors: f
                .factors
                .iter()
                .map(|pp| (pp.prime.to_string(), pp.exponent))
                .collect(),
            residual: f.residual.to_string(),
            residual_status: f.residual_status,
        }
    }

    fn into_entry(self, mr_rounds: u32) -> Result<(Nat, Factorization), String> {
        let parse = |s: &str| {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("'{s}' is not a decimal integer"));
            }
            Nat::from_str(s).map_err(|e| e.to_string())
        };
        let value = parse(&self.value)?;
        let factors = self
            .factors
            .iter()
            .map(|(p, e)| {
                Ok(PrimePower {
                    prime: parse(p)?,
                    exponent: *e,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let probabilistic = factors
            .iter()
            .any(|pp| primality(&pp.prime, mr_rounds) == Primality::ProbablePrime);
        let f = Factorization {
            factors,
            residual: parse(&self.residual)?,
            residual_status: self.residual_status,
            probabilistic,
        };
        f.validate(&value, mr_rounds)?;
        if !f.is_complete() {
            return Err("incomplete factorization".to_string());
        }
        Ok((value, f))
    }
}

#[derive(Debug, Default)]
pub struct FileFactorCache {
    entries: RwLock<BTreeMap<Nat, Factorization>>,
    mr_rounds: u32,
}

impl FileFactorCache {
    pub fn new(mr_rounds: u32) -> Self {
        FileFactorCache {
            entries: RwLock::new(BTreeMap::new()),
            mr_rounds,
        }
    }

    /// Loads `path` if it exists. Returns the number of accepted and
    /// rejected lines.
    pub fn load(&self, path: &Path) -> std::io::Result<(usize, usize)> {
        if !path.exists() {
            return Ok((0, 0));
        }
        let text = fs::read_to_string(path)?;
        let mut accepted = 0;
        let mut rejected = 0;
        let mut map = self.entries.write().unwrap();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<Record>(line)
                .map_err(|e| e.to_string())
                .and_then(|r| r.into_entry(self.mr_rounds));
            match parsed {
                Ok((value, f)) => {
                    map.insert(value, f);
                    accepted += 1;
                }
                Err(reason) => {
                    log::warn!(
                        "{}:{}: skipping cache record: {reason}",
                        path.display(),
                        lineno + 1
                    );
                    rejected += 1;
                }
            }
        }
        Ok((accepted, rejected))
    }

    /// Writes every complete entry, sorted by value, through a temporary file.
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut out = BufWriter::new(fs::File::create(&tmp)?);
            for (value, f) in self.entries.read().unwrap().iter() {
                if f.is_complete() {
                    let line = serde_json::to_string(&Record::from_entry(value, f))?;
                    writeln!(out, "{line}")?;
                }
            }
            out.flush()?;
        }
        fs::rename(tmp, path)
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FactorCache for FileFactorCache {
    fn lookup(&self, value: &Nat) -> Option<Factorization> {
        self.entries.read().unwrap().get(value).cloned()
    }

    fn store(&self, value: &Nat, factorization: &Factorization) {
        if factorization.is_complete() {
            self.entries
                .write()
                .unwrap()
                .insert(value.clone(), factorization.clone());
        }
    }
}
