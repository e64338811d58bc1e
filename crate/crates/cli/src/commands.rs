use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use neurovariety::bounds::{certify_nonfilling, split_bound, DimensionFact, FactsRegistry};
use neurovariety::certify::{certify_mfa, defect_report, reproduce_table, ReproduceOptions, TableId};
use neurovariety::pnn::Architecture;
use neurovariety::rank::{generic_rank, RankConfig};
use neurovariety::search::{
    csv_rows, exhaustive_search_with, facts_from_rows, frontier_search, warm_start_from_rows, BudgetMode, CsvRow, ExhaustiveOptions,
    ProposalPolicy, SearchConfig,
};
use serde::Serialize;

use crate::args::{BudgetModeArg, Cli, Command, Format, Mode, PolicyArg};
use crate::facts;

/// Exit status when a reproduced table differs from the stored values.
const MISMATCH: u8 = 3;
/// Exit status for unusable arguments.
const USAGE: u8 = 2;

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let c = &cli.common;
    eprintln!(
        "config: command={} r={} prime={} trials={} seed={} format={:?}",
        command_name(&cli.command),
        c.r,
        c.prime,
        c.trials,
        c.seed,
        c.format
    );
    let rank = RankConfig {
        prime: c.prime,
        trials: c.trials,
        seed: c.seed,
        ..RankConfig::default()
    };
    let mut registry = match &c.facts {
        Some(path) => facts::load(path)?,
        None => FactsRegistry::new(),
    };
    let arch = |widths: &[usize]| Architecture::new(widths.to_vec(), c.r);

    let mut code = ExitCode::SUCCESS;
    let report = match &cli.command {
        Command::Ambient(a) => {
            let a = arch(&a.arch.0)?;
            let ambient = a.ambient_dim()?;
            match c.format {
                Format::Text => format!("{ambient}\n"),
                Format::Json => json(&serde_json::json!({ "arch": a.label(), "r": c.r, "ambient_dim": ambient }))?,
                Format::Csv => return unsupported("ambient", c.format),
            }
        }
        Command::Dim(a) => {
            let a = arch(&a.arch.0)?;
            let est = generic_rank(&a, &rank)?;
            let fact = registry.merge_fact(DimensionFact::from_rank(&a, &est)?)?.clone();
            match c.format {
                Format::Text => format!("rank_lower={} status={}\n", est.rank_lower, fact.status),
                Format::Json => json(&est)?,
                Format::Csv => csv(&[est])?,
            }
        }
        Command::Bound(b) => {
            let a = arch(&b.arch.arch.0)?;
            let (value, derivation) = match &b.splits {
                Some(cuts) => split_bound(&a, cuts, &registry)?,
                None => {
                    let fact = certify_nonfilling(&a, &registry)?;
                    let derivation = fact
                        .provenance
                        .iter()
                        .rev()
                        .find_map(|p| match p {
                            neurovariety::bounds::Provenance::Bound { derivation } => Some(derivation.clone()),
                            _ => None,
                        })
                        .unwrap_or_default();
                    (fact.upper_bound, derivation)
                }
            };
            let fact = registry
                .merge_fact(DimensionFact::from_bound(&a, value, derivation.clone())?)?
                .clone();
            match c.format {
                Format::Text => format!(
                    "bound={value} ambient={} status={}\n{derivation}\n",
                    fact.ambient, fact.status
                ),
                Format::Json => json(&serde_json::json!({
                    "arch": a.label(), "r": c.r, "bound": value, "derivation": derivation, "fact": fact,
                }))?,
                Format::Csv => return unsupported("bound", c.format),
            }
        }
        Command::Certify(a) => {
            let a = arch(&a.arch.0)?;
            let cert = certify_mfa(&a, &rank, &mut registry)?;
            match c.format {
                Format::Text => cert.to_text(),
                Format::Json => json(&cert)?,
                Format::Csv => return unsupported("certify", c.format),
            }
        }
        Command::Defect(a) => {
            let report = defect_report(&arch(&a.arch.0)?, &rank)?;
            if report.anomaly {
                log::warn!("negative defect for {}: the rank estimate exceeds the expected dimension", report.arch);
            }
            match c.format {
                Format::Text => format!(
                    "expected_dim={} dim={} status={} defect={} codim={}\n",
                    report.expected_dim, report.dim, report.status, report.defect, report.codim
                ),
                Format::Json => json(&report)?,
                Format::Csv => csv(&[report])?,
            }
        }
        Command::Search(s) => {
            let mut config = SearchConfig::new(s.depth, s.d0, s.dl, s.min_width, s.max_width, c.r);
            config.budget = s.budget;
            config.seed = c.seed;
            config.rank = rank;
            config.budget_mode = match s.budget_mode {
                BudgetModeArg::Proposals => BudgetMode::Proposals,
                BudgetModeArg::RankComputations => BudgetMode::RankComputations,
            };
            config.policy = match s.policy {
                PolicyArg::Uniform => ProposalPolicy::Uniform,
                PolicyArg::FrontierBiased => ProposalPolicy::FrontierBiased,
            };
            eprintln!(
                "search: depth={} d0={} dl={} widths=[{},{}] budget={} mode={:?} budget_mode={:?} policy={:?}",
                s.depth, s.d0, s.dl, s.min_width, s.max_width, s.budget, s.mode, s.budget_mode, s.policy
            );
            let outcome = match s.mode {
                Mode::Frontier => {
                    let warm = match &s.warm_start {
                        Some(path) => {
                            let rows = read_rows(path)?;
                            registry.merge_all(facts_from_rows(&rows)?)?;
                            Some(warm_start_from_rows(&config, &rows)?)
                        }
                        None => None,
                    };
                    frontier_search(&config, &mut registry, warm)?
                }
                Mode::Exhaustive => exhaustive_search_with(
                    &config,
                    &mut registry,
                    ExhaustiveOptions {
                        pruning: !s.no_pruning,
                        climb: !s.no_pruning,
                    },
                )?,
            };
            eprintln!(
                "search: proposals={} rank_computations={} exhausted={} minimal_filling={} maximal_nonfilling={}",
                outcome.proposals,
                outcome.rank_computations,
                outcome.exhausted,
                outcome.state.minimal_filling.len(),
                outcome.state.maximal_nonfilling.len()
            );
            let rows = csv_rows(&config, &outcome, &registry)?;
            match c.format {
                Format::Csv => csv(&rows)?,
                Format::Json => json(&outcome)?,
                Format::Text => {
                    let mut out = String::new();
                    for row in rows.iter().filter(|r| r.class == "minimal_filling") {
                        out.push_str(&format!(
                            "{}  unimodal={} rank={}\n",
                            row.architecture, row.unimodal, row.rank_lower
                        ));
                    }
                    out
                }
            }
        }
        Command::Reproduce(r) => {
            let tables: Vec<TableId> = if r.table == "all" {
                TableId::ALL.to_vec()
            } else {
                match r.table.parse() {
                    Ok(t) => vec![t],
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Ok(ExitCode::from(USAGE));
                    }
                }
            };
            let options = ReproduceOptions {
                rank,
                max_depth: r.max_depth,
            };
            let mut reports = Vec::new();
            for t in tables {
                let report = reproduce_table(t, &options)?;
                if !report.passed() {
                    code = ExitCode::from(MISMATCH);
                }
                reports.push(report);
            }
            match c.format {
                Format::Text => reports.iter().map(|r| r.to_text()).collect(),
                Format::Json => json(&reports)?,
                Format::Csv => {
                    let cells: Vec<_> = reports
                        .iter()
                        .flat_map(|r| {
                            r.cells.iter().map(move |cell| CellRow {
                                table: r.table.as_str(),
                                label: &cell.label,
                                expected: &cell.expected,
                                actual: &cell.actual,
                                pass: cell.pass,
                            })
                        })
                        .collect();
                    csv(&cells)?
                }
            }
        }
    };

    match &c.out {
        Some(path) => fs::write(path, &report).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(report.as_bytes())?,
    }
    if let Some(path) = &c.facts {
        facts::save(path, &registry)?;
    }
    Ok(code)
}

#[derive(Serialize)]
struct CellRow<'a> {
    table: &'a str,
    label: &'a str,
    expected: &'a str,
    actual: &'a str,
    pass: bool,
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Ambient(_) => "ambient",
        Command::Dim(_) => "dim",
        Command::Bound(_) => "bound",
        Command::Certify(_) => "certify",
        Command::Defect(_) => "defect",
        Command::Search(_) => "search",
        Command::Reproduce(_) => "reproduce",
    }
}

fn unsupported(command: &str, format: Format) -> Result<ExitCode> {
    eprintln!("error: {command} does not support --format {format:?}");
    Ok(ExitCode::from(USAGE))
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = ::csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn read_rows(path: &std::path::Path) -> Result<Vec<CsvRow>> {
    let mut reader = ::csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = reader.deserialize().collect::<Result<Vec<CsvRow>, _>>()?;
    if rows.is_empty() {
        bail!("{} holds no search rows", path.display());
    }
    Ok(rows)
}
