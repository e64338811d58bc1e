//! Minimal-filling certificates, defect reports, and table reproduction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{certify_nonfilling, split_bound, DimensionFact, FactsRegistry, Status};
use crate::error::{Error, Result};
use crate::pnn::Architecture;
use crate::rank::{generic_rank, RankConfig, RankEstimate};
use crate::search::{exhaustive_search, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    /// Filling, and every decrement is provably non-filling.
    MfaCertified,
    /// Filling, every decrement non-filling, some only by a reported rank.
    MfaReported,
    NotFilling,
    /// Some decrement is itself filling.
    NotMinimal,
}

impl Overall {
    pub fn as_str(self) -> &'static str {
        match self {
            Overall::MfaCertified => "mfa_certified",
            Overall::MfaReported => "mfa_reported",
            Overall::NotFilling => "not_filling",
            Overall::NotMinimal => "not_minimal",
        }
    }

    pub fn is_mfa(self) -> bool {
        matches!(self, Overall::MfaCertified | Overall::MfaReported)
    }
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The architecture with hidden layer `index` narrowed by one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecrementResult {
    /// Position of the narrowed layer, `1..L`.
    pub index: usize,
    pub subarch: String,
    pub status: Status,
    pub rank_lower: u64,
    pub upper_bound: u64,
    pub ambient: u64,
    /// Upper bound with its derivation.
    pub bound_derivation: String,
}

impl DecrementResult {
    pub fn is_filling(&self) -> bool {
        self.status == Status::CertifiedFilling
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfaCertificate {
    pub arch: String,
    pub r: u32,
    pub filling_evidence: RankEstimate,
    pub decrement_results: Vec<DecrementResult>,
    pub overall: Overall,
    pub unimodal: bool,
}

impl MfaCertificate {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let e = &self.filling_evidence;
        let mut out = format!(
            "architecture {}  r={}\nrank {} of ambient {}  {}\n",
            self.arch,
            self.r,
            e.rank_lower,
            e.ambient_dim,
            if e.certified_filling { "certified_filling" } else { "not filling" }
        );
        if !self.decrement_results.is_empty() {
            out.push_str(&format!(
                "{:<3} {:<24} {:>6} {:>6} {:>7}  {}\n",
                "i", "decrement", "rank", "bound", "ambient", "status"
            ));
            for d in &self.decrement_results {
                out.push_str(&format!(
                    "{:<3} {:<24} {:>6} {:>6} {:>7}  {}\n",
                    d.index, d.subarch, d.rank_lower, d.upper_bound, d.ambient, d.status
                ));
            }
        }
        out.push_str(&format!("unimodal={}\noverall={}\n", self.unimodal, self.overall));
        out
    }
}

/// Everything known about `arch` after a rank estimate and a bound
/// computation; the result is also merged into `registry`.
fn resolve(arch: &Architecture, config: &RankConfig, registry: &mut FactsRegistry) -> Result<(DimensionFact, RankEstimate, String)> {
    let bounded = certify_nonfilling(arch, registry)?;
    let derivation = bounded
        .provenance
        .iter()
        .rev()
        .find_map(|p| match p {
            crate::bounds::Provenance::Bound { derivation } => Some(derivation.clone()),
            _ => None,
        })
        .unwrap_or_default();
    let est = generic_rank(arch, config)?;
    let fact = bounded.merge(&DimensionFact::from_rank(arch, &est)?)?;
    let fact = registry.merge_fact(fact)?.clone();
    Ok((fact, est, derivation))
}

/// Checks that `arch` fills and that narrowing any hidden layer by one
/// breaks filling.
///
/// Single-step decrements suffice because dimension is monotone in the
/// widths. Each decrement gets both a bound and a rank, so the certificate
/// shows which non-filling claims are proved and which are only reported.
pub fn certify_mfa(arch: &Architecture, config: &RankConfig, registry: &mut FactsRegistry) -> Result<MfaCertificate> {
    if arch.depth() < 2 {
        return Err(Error::InvalidArchitecture(format!(
            "{} has no hidden layer to decrement",
            arch.label()
        )));
    }
    let (_, evidence, _) = resolve(arch, config, registry)?;
    let mut decrements = Vec::new();
    if evidence.certified_filling {
        for i in 1..arch.depth() {
            let w = arch.widths()[i];
            if w == 1 {
                continue;
            }
            let sub = arch.with_width(i, w - 1)?;
            let (fact, _, derivation) = resolve(&sub, config, registry)?;
            decrements.push(DecrementResult {
                index: i,
                subarch: sub.label(),
                status: fact.status,
                rank_lower: fact.rank_lower,
                upper_bound: fact.upper_bound,
                ambient: fact.ambient,
                bound_derivation: derivation,
            });
        }
    }
    let overall = if !evidence.certified_filling {
        Overall::NotFilling
    } else if decrements.iter().any(DecrementResult::is_filling) {
        Overall::NotMinimal
    } else if decrements.iter().all(|d| d.upper_bound < d.ambient) {
        Overall::MfaCertified
    } else {
        Overall::MfaReported
    };
    Ok(MfaCertificate {
        arch: arch.label(),
        r: arch.r(),
        filling_evidence: evidence,
        decrement_results: decrements,
        overall,
        unimodal: arch.is_unimodal(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub arch: String,
    pub r: u32,
    pub ambient: u64,
    pub expected_dim: u64,
    /// Rank lower bound.
    pub dim: u64,
    pub status: Status,
    /// `expected_dim - dim`; negative only if the estimate is wrong.
    pub defect: i64,
    pub codim: u64,
    pub anomaly: bool,
}

/// Expected dimension versus the rank-based dimension of `arch`.
pub fn defect_report(arch: &Architecture, config: &RankConfig) -> Result<DefectReport> {
    let (fact, _, _) = resolve(arch, config, &mut FactsRegistry::new())?;
    let expected = arch.expected_dim()?;
    let defect = expected as i64 - fact.rank_lower as i64;
    Ok(DefectReport {
        arch: arch.label(),
        r: arch.r(),
        ambient: fact.ambient,
        expected_dim: expected,
        dim: fact.rank_lower,
        status: fact.status,
        defect,
        codim: fact.ambient - fact.rank_lower,
        anomaly: defect < 0,
    })
}

/// Tables with embedded expected values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    BoundsTable,
    #[serde(rename = "mfa_table_L2_to_L7")]
    MfaTable,
    Depth9Example,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::BoundsTable, TableId::MfaTable, TableId::Depth9Example];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::BoundsTable => "bounds_table",
            TableId::MfaTable => "mfa_table_L2_to_L7",
            TableId::Depth9Example => "depth9_example",
        }
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTable(s.to_string()))
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Cell {
    fn new(label: impl Into<String>, expected: impl fmt::Display, actual: impl fmt::Display) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        Cell {
            label: label.into(),
            pass: expected == actual,
            expected,
            actual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: TableId,
    pub cells: Vec<Cell>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let width = self.cells.iter().map(|c| c.label.len()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.table);
        for c in &self.cells {
            out.push_str(&format!(
                "  {:<width$}  expected {:<28} actual {:<28} {}\n",
                c.label,
                c.expected,
                c.actual,
                if c.pass { "ok" } else { "MISMATCH" }
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproduceOptions {
    pub rank: RankConfig,
    /// Deepest census row for the MFA table.
    pub max_depth: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            rank: RankConfig::default(),
            max_depth: 7,
        }
    }
}

/// The non-unimodal counterexample of depth 7.
pub const COUNTEREXAMPLE: &str = "2-3-4-5-4-6-4-1";

/// Filling architectures whose dimensions feed the hand-derived bounds.
pub const SUPPORTING_FILLING: [(&str, u64); 7] = [
    ("2-4-5-4", 20),
    ("2-3-3", 9),
    ("2-3-4-4", 20),
    ("2-3-4-5-3", 27),
    ("3-6-4-1", 15),
    ("2-3-4-5-4", 36),
    ("4-6-3", 30),
];

// decrements of the counterexample: reported rank, hand-derived bound, and
// the cut positions of that derivation
const BOUNDS_ROWS: [(u64, u64, &[usize]); 6] = [
    (35, 53, &[1, 4]),
    (60, 61, &[2, 4]),
    (62, 63, &[3, 4]),
    (39, 39, &[4]),
    (61, 62, &[4, 5]),
    (59, 62, &[4, 6]),
];

pub const DEPTH9: &str = "2-3-4-4-10-17-11-12-4-2";
const DEPTH9_AMBIENT: u64 = 514;
const DEPTH9_CODIMS: [u64; 8] = [254, 17, 176, 5, 17, 34, 11, 124];

/// Known minimal filling architectures with `d0 = 2`, `d_L = 1`, `r = 2`.
pub const MFA_TABLE: [(usize, &[&str]); 6] = [
    (2, &["2-2-1"]),
    (3, &["2-2-2-1"]),
    (4, &["2-3-3-2-1"]),
    (5, &["2-3-3-3-2-1"]),
    (6, &["2-3-3-4-4-2-1"]),
    (
        7,
        &[
            "2-3-4-5-4-6-4-1",
            "2-3-4-5-6-4-2-1",
            "2-3-3-4-5-6-3-1",
            "2-3-4-5-5-5-2-1",
            "2-3-3-5-6-4-4-1",
            "2-3-3-5-7-4-2-1",
            "2-3-3-4-6-5-2-1",
            "2-3-4-5-5-4-4-1",
            "2-3-4-4-5-5-4-1",
            "2-3-3-6-6-4-3-1",
            "2-3-3-5-5-5-4-1",
            "2-3-4-6-5-4-3-1",
            "2-3-5-5-5-4-3-1",
        ],
    ),
];

/// Width box used for a census row of the given depth.
pub fn census_box(depth: usize) -> (usize, usize) {
    if depth <= 5 {
        (1, 5)
    } else {
        (1, 7)
    }
}

/// Minimal filling architectures of one depth inside the census box, sorted
/// by label.
pub fn census(depth: usize, rank: &RankConfig, registry: &mut FactsRegistry) -> Result<Vec<Architecture>> {
    let (lo, hi) = census_box(depth);
    let mut config = SearchConfig::new(depth, 2, 1, lo, hi, 2);
    config.rank = *rank;
    let outcome = exhaustive_search(&config, registry)?;
    let mut found = outcome
        .minimal_filling()
        .iter()
        .map(|t| t.architecture(2, 1, 2))
        .collect::<Result<Vec<_>>>()?;
    found.sort_by_key(|a| a.label());
    Ok(found)
}

/// Recomputes a table and compares every cell with the stored values.
pub fn reproduce_table(table: TableId, options: &ReproduceOptions) -> Result<TableReport> {
    let cells = match table {
        TableId::BoundsTable => bounds_cells(&options.rank)?,
        TableId::MfaTable => mfa_cells(options)?,
        TableId::Depth9Example => depth9_cells(&options.rank)?,
    };
    Ok(TableReport { table, cells })
}

fn bounds_cells(rank: &RankConfig) -> Result<Vec<Cell>> {
    let arch = Architecture::parse(COUNTEREXAMPLE, 2)?;
    let mut registry = FactsRegistry::new();
    let mut cells = Vec::new();
    for (label, dim) in SUPPORTING_FILLING {
        let a = Architecture::parse(label, 2)?;
        let est = generic_rank(&a, rank)?;
        cells.push(Cell::new(format!("rank {label}"), dim, est.rank_lower));
        registry.merge_fact(DimensionFact::from_rank(&a, &est)?)?;
    }
    for (i, (reported, bound, cuts)) in BOUNDS_ROWS.into_iter().enumerate() {
        let k = i + 1;
        let sub = arch.with_width(k, arch.widths()[k] - 1)?;
        let est = generic_rank(&sub, rank)?;
        cells.push(Cell::new(format!("d{k} {} rank", sub.label()), reported, est.rank_lower));
        let (value, _) = split_bound(&sub, cuts, &registry)?;
        cells.push(Cell::new(format!("d{k} {} bound", sub.label()), bound, value));
        let certified = certify_nonfilling(&sub, &registry)?;
        cells.push(Cell::new(
            format!("d{k} {} certified non-filling", sub.label()),
            true,
            certified.is_certified_nonfilling(),
        ));
    }
    Ok(cells)
}

fn mfa_cells(options: &ReproduceOptions) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let mut registry = FactsRegistry::new();
    for (depth, expected) in MFA_TABLE {
        if depth > options.max_depth {
            continue;
        }
        let found = census(depth, &options.rank, &mut registry)?;
        let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        want.sort();
        let got: Vec<String> = found.iter().map(Architecture::label).collect();
        cells.push(Cell::new(format!("L={depth} MFAs"), want.join(" "), got.join(" ")));
        let expected_nonunimodal = expected
            .iter()
            .filter(|s| !crate::pnn::is_unimodal(&parse_widths(s)))
            .count();
        let nonunimodal = found.iter().filter(|a| !a.is_unimodal()).count();
        cells.push(Cell::new(format!("L={depth} non-unimodal"), expected_nonunimodal, nonunimodal));
    }
    Ok(cells)
}

fn parse_widths(label: &str) -> Vec<usize> {
    label.split('-').map(|w| w.parse().expect("table labels are well formed")).collect()
}

fn depth9_cells(rank: &RankConfig) -> Result<Vec<Cell>> {
    let arch = Architecture::parse(DEPTH9, 2)?;
    let mut cells = vec![Cell::new("ambient", DEPTH9_AMBIENT, arch.ambient_dim()?)];
    for (i, codim) in DEPTH9_CODIMS.into_iter().enumerate() {
        let k = i + 1;
        let sub = arch.with_width(k, arch.widths()[k] - 1)?;
        let report = defect_report(&sub, rank)?;
        cells.push(Cell::new(format!("s{k} {} codim", sub.label()), codim, report.codim));
        cells.push(Cell::new(format!("s{k} expected_dim"), report.ambient, report.expected_dim));
        cells.push(Cell::new(format!("s{k} defect"), codim, report.defect));
    }
    Ok(cells)
}
