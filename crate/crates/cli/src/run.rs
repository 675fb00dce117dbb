//! Orchestration: terms, then the b-sequence, ranks, theorem checks and
//! conjecture scans, in that order.

use std::path::PathBuf;
use std::time::Instant;

use lseq_core::analysis::{
    check_coprime_block, check_delta, check_divisibility, check_gcd_identity, check_l_property,
    check_rank_agreement, check_rank_divisibility, check_rank_lte, check_valuation_structure,
    RankTable,
};
use lseq_core::arith::{primes_up_to, EffortBudget, FactorCache, Factorizer};
use lseq_core::bseq::{build_bsequence, check_recursion_identities, verify_structure};
use lseq_core::conjectures::{scan_conj1, scan_conj2, scan_conj3, scan_conj4};
use lseq_core::exec::Executor;
use lseq_core::report::CheckReport;
use lseq_core::seq::{terms_up_to, SequenceSpec};
use lseq_core::Nat;

use crate::report::{BRow, ConfigEcho, Outcome, RunReport};
use crate::spec::SpecError;

pub const THEOREM_CHECKS: [&str; 13] = [
    "divisibility",
    "gcd_identity",
    "product_formula",
    "pairwise_coprimality",
    "b_divides_a",
    "recursion_identities",
    "l_property",
    "rank_divisibility",
    "valuation_structure",
    "rank_lte",
    "delta",
    "coprime_block",
    "rank_agreement",
];
pub const BSEQ_CHECKS: [&str; 4] = [
    "product_formula",
    "pairwise_coprimality",
    "b_divides_a",
    "recursion_identities",
];
pub const CONJECTURES: [&str; 4] = ["conj1", "conj2", "conj3", "conj4"];
const STRUCTURE: [&str; 3] = ["product_formula", "pairwise_coprimality", "b_divides_a"];
const RANKED: [&str; 6] = [
    "rank_divisibility",
    "valuation_structure",
    "rank_lte",
    "delta",
    "coprime_block",
    "rank_agreement",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lseq_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Bseq,
    Rank,
    Conjectures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Bseq => "bseq",
            Command::Rank => "rank",
            Command::Conjectures => "conjectures",
        }
    }

    pub fn available_checks(self) -> &'static [&'static str] {
        match self {
            Command::Analyze => &THEOREM_CHECKS,
            Command::Bseq => &BSEQ_CHECKS,
            Command::Rank => &[],
            Command::Conjectures => &CONJECTURES,
        }
    }
}

/// Expands `all` and the `structure` alias, rejects names the command does
/// not run, and returns the selection in canonical order.
pub fn resolve_checks(command: Command, csv: &str) -> Result<Vec<String>, CliError> {
    let available = command.available_checks();
    let mut wanted: Vec<&str> = Vec::new();
    for raw in csv.split(',') {
        let name = raw.trim();
        match name {
            "all" => wanted.extend(available),
            "structure" => wanted.extend(STRUCTURE),
            "" => return Err(CliError::Usage("empty check name in --checks".into())),
            other => wanted.push(other),
        }
    }
    if let Some(bad) = wanted.iter().find(|w| !available.contains(w)) {
        return Err(CliError::Usage(format!(
            "check '{bad}' is not available for {}; expected one of: all, {}",
            command.name(),
            available.join(", ")
        )));
    }
    Ok(available
        .iter()
        .filter(|a| wanted.contains(a))
        .map(|a| a.to_string())
        .collect())
}

/// Parses a preset name or `trial=..,rho=..,rounds=..,seed=..`. Keys left out
/// keep their default values.
pub fn parse_effort(text: &str) -> Result<EffortBudget, CliError> {
    match text {
        "quick" => return Ok(EffortBudget::quick()),
        "default" => return Ok(EffortBudget::default()),
        "thorough" => return Ok(EffortBudget::thorough()),
        _ => {}
    }
    let body = text.strip_prefix("custom:").unwrap_or(text);
    let mut effort = EffortBudget::default();
    for pair in body.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad effort component '{pair}'")))?;
        let bad = |_| CliError::Usage(format!("bad value for effort key '{key}': '{value}'"));
        match key.trim() {
            "trial" => effort.trial_bound = value.trim().parse().map_err(bad)?,
            "rho" => effort.rho_iterations = value.trim().parse().map_err(bad)?,
            "rounds" => effort.mr_rounds = value.trim().parse().map_err(bad)?,
            "seed" => effort.seed = value.trim().parse().map_err(bad)?,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown effort key '{other}' (expected trial, rho, rounds, seed)"
                )))
            }
        }
    }
    if effort.mr_rounds == 0 {
        return Err(CliError::Usage("effort rounds must be at least 1".into()));
    }
    Ok(effort)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub spec: SequenceSpec,
    pub max_n: u64,
    pub max_p: u64,
    pub effort: EffortBudget,
    pub checks: Vec<String>,
    pub odd_primes_only: bool,
    pub report: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_n < 1 {
            return Err(CliError::Usage("--max-n must be at least 1".into()));
        }
        if self.max_p < 3 {
            return Err(CliError::Usage("--max-p must be at least 3".into()));
        }
        if self.checks.is_empty() && self.command != Command::Rank {
            return Err(CliError::Usage("no checks selected".into()));
        }
        Ok(())
    }

    fn wants(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c == name)
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            seq: self.spec.to_string(),
            max_n: self.max_n,
            max_p: self.max_p,
            effort: self.effort,
            checks: self.checks.clone(),
            odd_primes_only: self.odd_primes_only,
        }
    }
}

/// Runs one command. The report does not depend on the executor or on what
/// the factorization cache already holds.
pub fn run<E: Executor, C: FactorCache + ?Sized>(
    config: &RunConfig,
    exec: &E,
    fcache: &C,
) -> Result<RunReport, CliError> {
    config.validate()?;
    let n = config.max_n;
    let start = Instant::now();
    let cache = terms_up_to(&config.spec, n)?;
    let b = build_bsequence(&cache, n)?;
    log::info!("terms and b-sequence up to {n}: {:?}", start.elapsed());
    let primes: Vec<Nat> = primes_up_to(config.max_p)
        .into_iter()
        .map(Nat::from)
        .collect();
    let factorizer = Factorizer::new(config.effort);

    let mut report = RunReport {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: config.command.name().to_string(),
        config: config.echo(),
        checks: Vec::new(),
        informational: Vec::new(),
        deltas: Vec::new(),
        conjectures: Vec::new(),
        bseq_table: None,
        ranks: None,
        outcome: Outcome::from_results(&[], &[]),
    };

    let timed = |name: &str, since: Instant| log::info!("{name}: {:?}", since.elapsed());

    match config.command {
        Command::Rank => {
            let t = Instant::now();
            report.ranks = Some(RankTable::compute(&cache, &primes, n, exec)?);
            timed("ranks", t);
        }
        Command::Bseq => {
            report.bseq_table = Some(
                (1..=n)
                    .map(|i| BRow {
                        n: i,
                        a_n: cache.a(i).clone(),
                        b_n: b.b(i).clone(),
                    })
                    .collect(),
            );
            structure_checks(config, &cache, &b, exec, &mut report.checks)?;
        }
        Command::Analyze => {
            let t = Instant::now();
            if config.wants("divisibility") {
                report.checks.push(check_divisibility(&cache, n, exec)?);
            }
            if config.wants("gcd_identity") {
                report.checks.push(check_gcd_identity(&cache, n, exec)?);
            }
            structure_checks(config, &cache, &b, exec, &mut report.checks)?;
            timed("sequence checks", t);

            let two = [Nat::from(2u32)];
            if config.wants("l_property") {
                let t = Instant::now();
                report
                    .checks
                    .push(check_l_property(&cache, n, &primes, true, exec)?);
                report
                    .informational
                    .push(check_l_property(&cache, n, &two, false, exec)?);
                timed("l_property", t);
            }
            if RANKED.iter().any(|c| config.wants(c)) {
                let t = Instant::now();
                let ranks = RankTable::compute(&cache, &primes, n, exec)?;
                timed("ranks", t);
                let t = Instant::now();
                if config.wants("rank_divisibility") {
                    report
                        .checks
                        .push(check_rank_divisibility(&cache, &ranks, n, exec)?);
                }
                if config.wants("valuation_structure") {
                    report.checks.push(check_valuation_structure(
                        &cache, &ranks, n, &primes, true, exec,
                    )?);
                    report.informational.push(check_valuation_structure(
                        &cache, &ranks, n, &two, false, exec,
                    )?);
                }
                if config.wants("rank_lte") {
                    report
                        .checks
                        .push(check_rank_lte(&cache, &ranks, n, &primes, true, exec)?);
                    report
                        .informational
                        .push(check_rank_lte(&cache, &ranks, n, &two, false, exec)?);
                }
                if config.wants("delta") {
                    let (check, deltas) = check_delta(&cache, &b, &ranks, &primes, exec);
                    report.checks.push(check);
                    report.deltas = deltas;
                }
                if config.wants("coprime_block") {
                    report.checks.push(check_coprime_block(
                        &cache, &b, &ranks, n, &primes, true, exec,
                    )?);
                    report.informational.push(check_coprime_block(
                        &cache, &b, &ranks, n, &two, false, exec,
                    )?);
                }
                if config.wants("rank_agreement") {
                    report
                        .checks
                        .push(check_rank_agreement(&cache, &b, &ranks, n, &primes, exec)?);
                }
                report.ranks = Some(ranks);
                timed("rank checks", t);
            }
        }
        Command::Conjectures => {
            if config.wants("conj1") {
                let t = Instant::now();
                let ranks = RankTable::compute(&cache, &primes, n, exec)?;
                report.conjectures.push(scan_conj1(&ranks, config.max_p));
                timed("conj1", t);
            }
            if config.wants("conj2") {
                let t = Instant::now();
                report.conjectures.push(scan_conj2(&b, n, exec)?);
                timed("conj2", t);
            }
            if config.wants("conj3") {
                let t = Instant::now();
                report.conjectures.push(scan_conj3(
                    &b,
                    n,
                    &factorizer,
                    fcache,
                    config.odd_primes_only,
                    exec,
                )?);
                timed("conj3", t);
            }
            if config.wants("conj4") {
                let t = Instant::now();
                report.conjectures.push(scan_conj4(&cache, n)?);
                timed("conj4", t);
            }
        }
    }

    report.outcome = Outcome::from_results(&report.checks, &report.conjectures);
    report.cap_witnesses();
    log::info!("total: {:?}", start.elapsed());
    Ok(report)
}

fn structure_checks<E: Executor>(
    config: &RunConfig,
    cache: &lseq_core::seq::SequenceCache,
    b: &lseq_core::bseq::BSequence,
    exec: &E,
    out: &mut Vec<CheckReport>,
) -> Result<(), CliError> {
    let n = config.max_n;
    if STRUCTURE.iter().any(|c| config.wants(c)) {
        let checks = verify_structure(cache, b, n, exec)?.into_checks();
        out.extend(checks.into_iter().filter(|c| config.wants(&c.name)));
    }
    if config.wants("recursion_identities") {
        out.push(check_recursion_identities(cache, b, n, exec)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_resolve_in_canonical_order() {
        let got = resolve_checks(Command::Analyze, "delta,structure,divisibility").unwrap();
        assert_eq!(
            got,
            [
                "divisibility",
                "product_formula",
                "pairwise_coprimality",
                "b_divides_a",
                "delta"
            ]
        );
        assert_eq!(resolve_checks(Command::Analyze, "all").unwrap().len(), 13);
        assert!(resolve_checks(Command::Analyze, "conj1").is_err());
        assert!(resolve_checks(Command::Conjectures, "l_property").is_err());
        assert!(resolve_checks(Command::Analyze, "divisibility,,delta").is_err());
    }

    #[test]
    fn effort_presets_and_custom() {
        assert_eq!(parse_effort("quick").unwrap(), EffortBudget::quick());
        let e = parse_effort("trial=500,rho=1000,rounds=8,seed=7").unwrap();
        assert_eq!(
            (e.trial_bound, e.rho_iterations, e.mr_rounds, e.seed),
            (500, 1000, 8, 7)
        );
        let partial = parse_effort("custom:rho=5").unwrap();
        assert_eq!(partial.trial_bound, EffortBudget::default().trial_bound);
        assert_eq!(partial.rho_iterations, 5);
        assert!(parse_effort("trial=x").is_err());
        assert!(parse_effort("speed=3").is_err());
        assert!(parse_effort("rounds=0").is_err());
        // The echoed form parses back to the same budget.
        assert_eq!(parse_effort(&e.to_string()).unwrap(), e);
    }
}
