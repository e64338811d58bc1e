//! Frontier search for minimal filling architectures.
//!
//! Hidden widths `a = (d1, ..., d_{L-1})` are ordered componentwise, and
//! filling is monotone in that order: widening any hidden layer can only
//! enlarge the neurovariety. The search therefore keeps two antichains, the
//! minimal filling tuples found so far and the maximal non-filling ones, and
//! skips every candidate that one of them already decides.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{recursive_bound_with, BoundMemo, DimensionFact, FactsRegistry};
use crate::error::{Error, Result};
use crate::pnn::{format_widths, Architecture};
use crate::rank::{generic_rank, RankConfig};
use crate::rng::{stream, Purpose};

/// Hidden widths of a fixed-depth architecture.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HiddenTuple(pub Vec<usize>);

impl HiddenTuple {
    /// Componentwise `self <= other`.
    pub fn le(&self, other: &HiddenTuple) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self < other`: `<=` and not equal.
    pub fn lt(&self, other: &HiddenTuple) -> bool {
        self.le(other) && self != other
    }

    pub fn comparable(&self, other: &HiddenTuple) -> bool {
        self.le(other) || other.le(self)
    }

    pub fn architecture(&self, d0: usize, dl: usize, r: u32) -> Result<Architecture> {
        let mut widths = Vec::with_capacity(self.0.len() + 2);
        widths.push(d0);
        widths.extend_from_slice(&self.0);
        widths.push(dl);
        Architecture::new(widths, r)
    }

    pub fn from_architecture(arch: &Architecture) -> Self {
        HiddenTuple(arch.hidden().to_vec())
    }
}

impl fmt::Display for HiddenTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", format_widths(&self.0))
    }
}

/// Pairwise incomparable tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Antichain {
    members: Vec<HiddenTuple>,
}

impl Antichain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[HiddenTuple] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &HiddenTuple) -> bool {
        self.members.contains(a)
    }

    /// Some member is `<= a`.
    pub fn has_member_below(&self, a: &HiddenTuple) -> bool {
        self.members.iter().any(|f| f.le(a))
    }

    /// Some member is `>= a`.
    pub fn has_member_above(&self, a: &HiddenTuple) -> bool {
        self.members.iter().any(|q| a.le(q))
    }

    /// Adds `a` as a minimal element, dropping members strictly above it.
    /// Returns `false` (and leaves the set alone) if a member is `<= a`.
    pub fn insert_minimal(&mut self, a: HiddenTuple) -> bool {
        if self.has_member_below(&a) {
            return false;
        }
        self.members.retain(|f| !a.lt(f));
        self.members.push(a);
        true
    }

    /// Adds `a` as a maximal element, dropping members strictly below it.
    /// Returns `false` if a member is `>= a`.
    pub fn insert_maximal(&mut self, a: HiddenTuple) -> bool {
        if self.has_member_above(&a) {
            return false;
        }
        self.members.retain(|q| !q.lt(&a));
        self.members.push(a);
        true
    }

    pub fn is_antichain(&self) -> bool {
        self.members.iter().enumerate().all(|(i, a)| {
            self.members[i + 1..].iter().all(|b| !a.comparable(b))
        })
    }

    /// Members in lexicographic order.
    pub fn sorted(&self) -> Vec<HiddenTuple> {
        let mut v = self.members.clone();
        v.sort();
        v
    }
}

/// `∃ f ∈ minimal_filling: a >= f`.
pub fn dominated_by_filling(a: &HiddenTuple, minimal_filling: &Antichain) -> bool {
    minimal_filling.has_member_below(a)
}

/// `∃ q ∈ maximal_nonfilling: a <= q`.
pub fn dominates_nonfilling(a: &HiddenTuple, maximal_nonfilling: &Antichain) -> bool {
    maximal_nonfilling.has_member_above(a)
}

pub fn antichain_insert_minimal(mut set: Antichain, a: HiddenTuple) -> Antichain {
    set.insert_minimal(a);
    set
}

pub fn antichain_insert_maximal(mut set: Antichain, a: HiddenTuple) -> Antichain {
    set.insert_maximal(a);
    set
}

/// What consumes the search budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// Every proposal counts, including ones already decided.
    #[default]
    Proposals,
    /// Only proposals that reach a rank computation count.
    RankComputations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalPolicy {
    /// Uniform over the width box.
    #[default]
    Uniform,
    /// Half of the proposals are one-step moves from an antichain member.
    FrontierBiased,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub depth: usize,
    pub d0: usize,
    pub dl: usize,
    pub min_width: usize,
    pub max_width: usize,
    pub r: u32,
    pub budget: u64,
    pub seed: u64,
    pub rank: RankConfig,
    pub budget_mode: BudgetMode,
    pub policy: ProposalPolicy,
    /// Largest box the exhaustive mode (and the exhaustion check) will walk.
    pub enumeration_cap: u64,
}

impl SearchConfig {
    pub fn new(depth: usize, d0: usize, dl: usize, min_width: usize, max_width: usize, r: u32) -> Self {
        SearchConfig {
            depth,
            d0,
            dl,
            min_width,
            max_width,
            r,
            budget: 1000,
            seed: 0,
            rank: RankConfig::default(),
            budget_mode: BudgetMode::default(),
            policy: ProposalPolicy::default(),
            enumeration_cap: 2_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 {
            return Err(Error::InvalidConfig("depth must be at least 2".into()));
        }
        if self.d0 == 0 || self.dl == 0 || self.min_width == 0 {
            return Err(Error::InvalidConfig("widths must be positive".into()));
        }
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        if self.r == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(())
    }

    fn box_is_empty(&self) -> bool {
        self.min_width > self.max_width
    }

    /// Number of tuples in `[m, n]^(L-1)`, saturating.
    pub fn box_size(&self) -> u64 {
        if self.box_is_empty() {
            return 0;
        }
        let side = (self.max_width - self.min_width + 1) as u64;
        side.saturating_pow((self.depth - 1) as u32)
    }

    fn arch(&self, a: &HiddenTuple) -> Result<Architecture> {
        a.architecture(self.d0, self.dl, self.r)
    }

    /// Every tuple in the box, by increasing width sum, then lexicographically.
    fn enumerate_box(&self) -> Result<Vec<HiddenTuple>> {
        let size = self.box_size();
        if size > self.enumeration_cap {
            return Err(Error::EnumerationTooLarge {
                size,
                cap: self.enumeration_cap,
            });
        }
        let k = self.depth - 1;
        let side = self.max_width - self.min_width + 1;
        let mut all: Vec<HiddenTuple> = (0..size as usize)
            .map(|mut code| {
                let mut t = vec![0; k];
                for slot in t.iter_mut().rev() {
                    *slot = self.min_width + code % side;
                    code /= side;
                }
                HiddenTuple(t)
            })
            .collect();
        all.sort_by_key(|t| (t.0.iter().sum::<usize>(), t.0.clone()));
        Ok(all)
    }
}

/// How a tuple got its classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ImpliedFilling,
    ImpliedNonfilling,
    /// Non-filling by a dimension bound, without a rank computation.
    PrunedNonfilling,
    Filling,
    Nonfilling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: u64,
    pub tuple: HiddenTuple,
    pub outcome: Outcome,
}

/// A tuple that was explicitly decided, with the evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classified {
    pub tuple: HiddenTuple,
    pub filling: bool,
    pub fact: DimensionFact,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchState {
    pub minimal_filling: Antichain,
    pub maximal_nonfilling: Antichain,
}

impl SearchState {
    pub fn decided(&self, a: &HiddenTuple) -> Option<bool> {
        if self.minimal_filling.has_member_below(a) {
            Some(true)
        } else if self.maximal_nonfilling.has_member_above(a) {
            Some(false)
        } else {
            None
        }
    }

    /// Both sets are antichains and no filling tuple lies below a
    /// non-filling one.
    pub fn is_consistent(&self) -> bool {
        self.minimal_filling.is_antichain()
            && self.maximal_nonfilling.is_antichain()
            && self
                .minimal_filling
                .members()
                .iter()
                .all(|f| !self.maximal_nonfilling.has_member_above(f))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub state: SearchState,
    pub classified: Vec<Classified>,
    pub trace: Vec<TraceEvent>,
    pub proposals: u64,
    pub rank_computations: u64,
    /// Every tuple in the box is decided.
    pub exhausted: bool,
}

impl SearchOutcome {
    pub fn minimal_filling(&self) -> Vec<HiddenTuple> {
        self.state.minimal_filling.sorted()
    }

    pub fn maximal_nonfilling(&self) -> Vec<HiddenTuple> {
        self.state.maximal_nonfilling.sorted()
    }
}

/// Decides one tuple: by bounds if they rule out filling, else by rank.
struct Classifier<'a> {
    config: &'a SearchConfig,
    registry: &'a mut FactsRegistry,
    memo: BoundMemo,
    rank_computations: u64,
}

impl<'a> Classifier<'a> {
    fn new(config: &'a SearchConfig, registry: &'a mut FactsRegistry) -> Self {
        Classifier {
            config,
            registry,
            memo: BoundMemo::new(),
            rank_computations: 0,
        }
    }

    fn classify(&mut self, a: &HiddenTuple) -> Result<(Outcome, DimensionFact)> {
        let arch = self.config.arch(a)?;
        let ambient = arch.ambient_dim()?;
        if let Some(known) = self.registry.get(&arch) {
            if known.is_certified_filling() {
                return Ok((Outcome::Filling, known.clone()));
            }
            if known.is_certified_nonfilling() {
                return Ok((Outcome::PrunedNonfilling, known.clone()));
            }
        }
        if arch.param_bound() < ambient {
            let fact = DimensionFact::from_bound(&arch, arch.param_bound(), "param_bound".into())?;
            return Ok((Outcome::PrunedNonfilling, self.record(fact)?));
        }
        let bound = recursive_bound_with(&arch, self.registry, &mut self.memo);
        if bound < ambient {
            let fact = DimensionFact::from_bound(&arch, bound, "recursive split bound".into())?;
            return Ok((Outcome::PrunedNonfilling, self.record(fact)?));
        }
        let est = generic_rank(&arch, &self.config.rank)?;
        self.rank_computations += 1;
        let fact = self.record(DimensionFact::from_rank(&arch, &est)?)?;
        let outcome = if est.certified_filling {
            Outcome::Filling
        } else {
            Outcome::Nonfilling
        };
        Ok((outcome, fact))
    }

    fn record(&mut self, fact: DimensionFact) -> Result<DimensionFact> {
        // same-depth facts never appear as proper slices of each other, so
        // only this tuple's own memo entry could be stale
        self.memo.clear_key(&fact);
        Ok(self.registry.merge_fact(fact)?.clone())
    }
}

struct Run<'a> {
    classifier: Classifier<'a>,
    state: SearchState,
    classified: Vec<Classified>,
    trace: Vec<TraceEvent>,
    step: u64,
}

impl<'a> Run<'a> {
    fn event(&mut self, tuple: &HiddenTuple, outcome: Outcome) {
        self.trace.push(TraceEvent {
            step: self.step,
            tuple: tuple.clone(),
            outcome,
        });
    }

    /// Classifies `a` and updates the antichains; `a` must be undecided.
    fn decide(&mut self, a: &HiddenTuple) -> Result<bool> {
        let (outcome, fact) = self.classifier.classify(a)?;
        let filling = matches!(outcome, Outcome::Filling);
        if filling {
            debug_assert!(!self.state.maximal_nonfilling.has_member_above(a));
            self.state.minimal_filling.insert_minimal(a.clone());
        } else {
            debug_assert!(!self.state.minimal_filling.has_member_below(a));
            self.state.maximal_nonfilling.insert_maximal(a.clone());
        }
        self.event(a, outcome);
        self.classified.push(Classified {
            tuple: a.clone(),
            filling,
            fact,
        });
        Ok(filling)
    }

    /// Raises coordinates of the non-filling tuple `a` one at a time while it
    /// stays non-filling, ending at a maximal non-filling tuple.
    fn climb(&mut self, a: &HiddenTuple, max_width: usize) -> Result<()> {
        let mut current = a.clone();
        for i in 0..current.0.len() {
            while current.0[i] < max_width {
                let mut next = current.clone();
                next.0[i] += 1;
                match self.state.decided(&next) {
                    Some(true) => break,
                    Some(false) => current = next,
                    None => {
                        if self.decide(&next)? {
                            break;
                        }
                        current = next;
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self, proposals: u64, exhausted: bool) -> SearchOutcome {
        SearchOutcome {
            rank_computations: self.classifier.rank_computations,
            state: self.state,
            classified: self.classified,
            trace: self.trace,
            proposals,
            exhausted,
        }
    }
}

fn undecided_remaining(config: &SearchConfig, state: &SearchState) -> Result<bool> {
    Ok(config
        .enumerate_box()?
        .iter()
        .any(|a| state.decided(a).is_none()))
}

/// Consecutive already-decided proposals before the box is checked for
/// exhaustion.
const IDLE_CHECK: u64 = 64;
/// Give up proposing after this many consecutive decided proposals when the
/// box is too large to check.
const IDLE_LIMIT: u64 = 1 << 22;

/// Randomized frontier search over the hidden widths.
///
/// Each step proposes a tuple from the seeded stream; tuples already decided
/// by the antichains are skipped, the rest are classified and inserted. The
/// result depends only on the configuration, the warm-start state, and the
/// registry contents.
pub fn frontier_search(
    config: &SearchConfig,
    registry: &mut FactsRegistry,
    warm_start: Option<SearchState>,
) -> Result<SearchOutcome> {
    config.validate()?;
    let mut run = Run {
        classifier: Classifier::new(config, registry),
        state: warm_start.unwrap_or_default(),
        classified: Vec::new(),
        trace: Vec::new(),
        step: 0,
    };
    if config.box_is_empty() {
        return Ok(run.finish(0, true));
    }
    let mut rng = stream(config.seed, Purpose::SearchProposal, 0);
    let mut proposals = 0;
    let mut idle = 0;
    let mut dirty = true;
    let mut exhausted = false;
    loop {
        let spent = match config.budget_mode {
            BudgetMode::Proposals => proposals,
            BudgetMode::RankComputations => run.classifier.rank_computations,
        };
        if spent >= config.budget {
            break;
        }
        let a = propose(config, &run.state, &mut rng);
        proposals += 1;
        run.step = proposals;
        match run.state.decided(&a) {
            Some(filling) => {
                run.event(
                    &a,
                    if filling {
                        Outcome::ImpliedFilling
                    } else {
                        Outcome::ImpliedNonfilling
                    },
                );
                idle += 1;
                if idle % IDLE_CHECK == 0 && dirty && config.box_size() <= config.enumeration_cap {
                    dirty = false;
                    if !undecided_remaining(config, &run.state)? {
                        exhausted = true;
                        break;
                    }
                }
                if idle >= IDLE_LIMIT {
                    log::warn!("no undecided proposal in {IDLE_LIMIT} draws; stopping");
                    break;
                }
            }
            None => {
                idle = 0;
                dirty = true;
                run.decide(&a)?;
            }
        }
    }
    if !exhausted && config.box_size() <= config.enumeration_cap {
        exhausted = !undecided_remaining(config, &run.state)?;
    }
    Ok(run.finish(proposals, exhausted))
}

fn propose<R: Rng>(config: &SearchConfig, state: &SearchState, rng: &mut R) -> HiddenTuple {
    let k = config.depth - 1;
    let (lo, hi) = (config.min_width, config.max_width);
    if config.policy == ProposalPolicy::FrontierBiased && rng.gen_bool(0.5) {
        let f = state.minimal_filling.members();
        let n = state.maximal_nonfilling.members();
        if !f.is_empty() || !n.is_empty() {
            let pick = rng.gen_range(0..f.len() + n.len());
            let mut t = if pick < f.len() { f[pick].clone() } else { n[pick - f.len()].clone() };
            let i = rng.gen_range(0..k);
            // filling members step down, non-filling members step up
            t.0[i] = if pick < f.len() {
                t.0[i].saturating_sub(1).max(lo)
            } else {
                (t.0[i] + 1).min(hi)
            };
            return t;
        }
    }
    HiddenTuple((0..k).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// Options for [`exhaustive_search_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    /// Skip tuples decided by the antichains.
    pub pruning: bool,
    /// Grow each new non-filling tuple to a maximal one.
    pub climb: bool,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            pruning: true,
            climb: true,
        }
    }
}

/// Decides every tuple of the box; the minimal filling antichain is exact
/// within the box.
pub fn exhaustive_search(config: &SearchConfig, registry: &mut FactsRegistry) -> Result<SearchOutcome> {
    exhaustive_search_with(config, registry, ExhaustiveOptions::default())
}

pub fn exhaustive_search_with(
    config: &SearchConfig,
    registry: &mut FactsRegistry,
    options: ExhaustiveOptions,
) -> Result<SearchOutcome> {
    config.validate()?;
    let tuples = if config.box_is_empty() {
        Vec::new()
    } else {
        config.enumerate_box()?
    };
    let mut run = Run {
        classifier: Classifier::new(config, registry),
        state: SearchState::default(),
        classified: Vec::new(),
        trace: Vec::new(),
        step: 0,
    };
    for (step, a) in tuples.iter().enumerate() {
        run.step = step as u64 + 1;
        if options.pruning {
            if let Some(filling) = run.state.decided(a) {
                let outcome = if filling {
                    Outcome::ImpliedFilling
                } else {
                    Outcome::ImpliedNonfilling
                };
                run.event(a, outcome);
                continue;
            }
            if !run.decide(a)? && options.climb {
                run.climb(a, config.max_width)?;
            }
        } else {
            let (outcome, fact) = run.classifier.classify(a)?;
            let filling = outcome == Outcome::Filling;
            run.event(a, outcome);
            run.classified.push(Classified {
                tuple: a.clone(),
                filling,
                fact,
            });
        }
    }
    if !options.pruning {
        // build the antichains from the full classification
        let mut by_sum: Vec<&Classified> = run.classified.iter().collect();
        by_sum.sort_by_key(|c| c.tuple.0.iter().sum::<usize>());
        for c in &by_sum {
            if c.filling {
                run.state.minimal_filling.insert_minimal(c.tuple.clone());
            }
        }
        for c in by_sum.iter().rev() {
            if !c.filling {
                run.state.maximal_nonfilling.insert_maximal(c.tuple.clone());
            }
        }
    }
    let n = tuples.len() as u64;
    Ok(run.finish(n, true))
}

impl BoundMemo {
    fn clear_key(&mut self, fact: &DimensionFact) {
        if let Ok(arch) = fact.architecture() {
            self.forget(&arch);
        }
    }
}

/// One row of the search CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub r: u32,
    pub depth: usize,
    pub architecture: String,
    pub class: String,
    pub unimodal: bool,
    pub ambient_dim: u64,
    pub rank_lower: u64,
    pub upper_bound: u64,
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
}

/// Rows for every classified tuple followed by the final antichains.
pub fn csv_rows(config: &SearchConfig, outcome: &SearchOutcome, registry: &FactsRegistry) -> Result<Vec<CsvRow>> {
    let row = |a: &HiddenTuple, class: &str| -> Result<CsvRow> {
        let arch = config.arch(a)?;
        let fact = match registry.get(&arch) {
            Some(f) => f.clone(),
            None => DimensionFact::trivial(&arch)?,
        };
        Ok(CsvRow {
            r: config.r,
            depth: config.depth,
            architecture: arch.label(),
            class: class.to_string(),
            unimodal: arch.is_unimodal(),
            ambient_dim: fact.ambient,
            rank_lower: fact.rank_lower,
            upper_bound: fact.upper_bound,
            prime: u64::from(config.rank.prime),
            trials: config.rank.trials,
            seed: config.rank.seed,
        })
    };
    let mut rows = Vec::new();
    for c in &outcome.classified {
        rows.push(row(&c.tuple, if c.filling { "filling" } else { "nonfilling" })?);
    }
    for a in outcome.minimal_filling() {
        rows.push(row(&a, "minimal_filling")?);
    }
    for a in outcome.maximal_nonfilling() {
        rows.push(row(&a, "maximal_nonfilling")?);
    }
    Ok(rows)
}

/// Recovers antichains from earlier CSV rows with matching depth, endpoints
/// and exponent.
pub fn warm_start_from_rows(config: &SearchConfig, rows: &[CsvRow]) -> Result<SearchState> {
    let mut state = SearchState::default();
    for row in rows.iter().filter(|r| r.r == config.r && r.depth == config.depth) {
        let arch = Architecture::parse(&row.architecture, row.r)?;
        if arch.input_width() != config.d0 || arch.output_width() != config.dl {
            continue;
        }
        let t = HiddenTuple::from_architecture(&arch);
        match row.class.as_str() {
            "minimal_filling" | "filling" => {
                state.minimal_filling.insert_minimal(t);
            }
            "maximal_nonfilling" | "nonfilling" => {
                state.maximal_nonfilling.insert_maximal(t);
            }
            other => {
                return Err(Error::InvalidConfig(format!("unknown class `{other}` in search rows")));
            }
        }
    }
    if !state.is_consistent() {
        return Err(Error::InvalidConfig("warm-start rows contradict each other".into()));
    }
    Ok(state)
}

/// Dimension facts recorded in earlier CSV rows.
pub fn facts_from_rows(rows: &[CsvRow]) -> Result<Vec<DimensionFact>> {
    rows.iter()
        .map(|row| {
            let arch = Architecture::parse(&row.architecture, row.r)?;
            let provenance = if row.rank_lower > 0 {
                vec![crate::bounds::Provenance::Rank {
                    prime: row.prime,
                    trials: row.trials,
                    seed: row.seed,
                }]
            } else {
                Vec::new()
            };
            DimensionFact::from_parts(&arch, row.rank_lower, row.upper_bound, provenance)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(v: &[usize]) -> HiddenTuple {
        HiddenTuple(v.to_vec())
    }

    fn chain(v: &[&[usize]]) -> Antichain {
        let mut a = Antichain::new();
        for x in v {
            a.insert_minimal(t(x));
        }
        a
    }

    #[test]
    fn dominance_examples() {
        let f = chain(&[&[2, 3]]);
        assert!(dominated_by_filling(&t(&[3, 3]), &f));
        assert!(!dominated_by_filling(&t(&[2, 2]), &f));
        let mut n = Antichain::new();
        n.insert_maximal(t(&[2, 4]));
        assert!(!dominates_nonfilling(&t(&[1, 5]), &n));
        assert!(dominates_nonfilling(&t(&[1, 4]), &n));
    }

    #[test]
    fn insertion_examples() {
        let f = antichain_insert_minimal(chain(&[&[3, 3]]), t(&[2, 3]));
        assert_eq!(f.sorted(), vec![t(&[2, 3])]);
        let mut n = Antichain::new();
        n.insert_maximal(t(&[2, 2]));
        let n = antichain_insert_maximal(n, t(&[2, 4]));
        assert_eq!(n.sorted(), vec![t(&[2, 4])]);
        let f = antichain_insert_minimal(chain(&[&[1, 3]]), t(&[3, 1]));
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn empty_box() {
        let mut cfg = SearchConfig::new(3, 2, 1, 5, 4, 2);
        cfg.budget = 10;
        let mut reg = FactsRegistry::new();
        let out = exhaustive_search(&cfg, &mut reg).unwrap();
        assert!(out.state.minimal_filling.is_empty() && out.state.maximal_nonfilling.is_empty());
        let out = frontier_search(&cfg, &mut reg, None).unwrap();
        assert!(out.state.minimal_filling.is_empty() && out.exhausted);
    }

    #[test]
    fn enumeration_cap() {
        let mut cfg = SearchConfig::new(8, 2, 1, 1, 9, 2);
        cfg.enumeration_cap = 1000;
        let err = exhaustive_search(&cfg, &mut FactsRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }

    #[test]
    fn shallow_frontier_searches() {
        let mut cfg = SearchConfig::new(2, 2, 1, 1, 4, 2);
        cfg.budget = 200;
        let out = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
        assert_eq!(out.minimal_filling(), vec![t(&[2])]);
        assert!(out.exhausted);

        let mut cfg = SearchConfig::new(3, 2, 1, 1, 4, 2);
        cfg.budget = 2000;
        let out = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
        assert_eq!(out.minimal_filling(), vec![t(&[2, 2])]);
        assert!(out.exhausted);
        assert!(out.state.is_consistent());
    }

    #[test]
    fn rank_budget_mode_stops_on_exhaustion() {
        let mut cfg = SearchConfig::new(3, 2, 1, 1, 3, 2);
        cfg.budget = 1_000_000;
        cfg.budget_mode = BudgetMode::RankComputations;
        let out = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.minimal_filling(), vec![t(&[2, 2])]);
    }

    #[test]
    fn frontier_is_reproducible() {
        for policy in [ProposalPolicy::Uniform, ProposalPolicy::FrontierBiased] {
            let mut cfg = SearchConfig::new(4, 2, 1, 1, 4, 2);
            cfg.budget = 60;
            cfg.seed = 17;
            cfg.policy = policy;
            let a = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
            let b = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn warm_start_round_trip() {
        let mut cfg = SearchConfig::new(3, 2, 1, 1, 4, 2);
        cfg.budget = 2000;
        let mut reg = FactsRegistry::new();
        let first = frontier_search(&cfg, &mut reg, None).unwrap();
        let rows = csv_rows(&cfg, &first, &reg).unwrap();
        let state = warm_start_from_rows(&cfg, &rows).unwrap();
        let mut fresh = FactsRegistry::new();
        fresh.merge_all(facts_from_rows(&rows).unwrap()).unwrap();
        // CSV rows keep the numbers but not the bound derivations
        let numbers = |r: &FactsRegistry| -> Vec<_> {
            r.to_json().into_iter().map(|f| (f.arch, f.rank_lower, f.upper_bound, f.status)).collect()
        };
        assert_eq!(numbers(&fresh), numbers(&reg));
        assert_eq!(state.minimal_filling.sorted(), first.minimal_filling());
        let second = frontier_search(&cfg, &mut reg, Some(state)).unwrap();
        assert_eq!(second.rank_computations, 0);
        assert_eq!(second.minimal_filling(), first.minimal_filling());
    }

    #[test]
    fn classifications_are_covered_by_final_antichains() {
        let mut cfg = SearchConfig::new(4, 2, 1, 1, 4, 2);
        cfg.budget = 400;
        cfg.seed = 5;
        let out = frontier_search(&cfg, &mut FactsRegistry::new(), None).unwrap();
        assert!(out.state.is_consistent());
        for c in &out.classified {
            if c.filling {
                assert!(out.state.minimal_filling.has_member_below(&c.tuple));
            } else {
                assert!(out.state.maximal_nonfilling.has_member_above(&c.tuple));
            }
        }
    }

    #[test]
    fn pruning_does_not_change_exhaustive_result() {
        for (lo, hi) in [(1, 4), (2, 4), (1, 3)] {
            let cfg = SearchConfig::new(3, 2, 1, lo, hi, 2);
            let on = exhaustive_search(&cfg, &mut FactsRegistry::new()).unwrap();
            let off = exhaustive_search_with(
                &cfg,
                &mut FactsRegistry::new(),
                ExhaustiveOptions {
                    pruning: false,
                    climb: false,
                },
            )
            .unwrap();
            assert_eq!(on.minimal_filling(), off.minimal_filling());
            assert_eq!(on.maximal_nonfilling(), off.maximal_nonfilling());
        }
    }

    fn tuple(k: usize) -> impl Strategy<Value = HiddenTuple> {
        proptest::collection::vec(1usize..=4, k).prop_map(HiddenTuple)
    }

    proptest! {
        #[test]
        fn antichain_invariants(seq in proptest::collection::vec(tuple(3), 1..40)) {
            let mut min = Antichain::new();
            let mut max = Antichain::new();
            for a in &seq {
                min.insert_minimal(a.clone());
                max.insert_maximal(a.clone());
                prop_assert!(min.is_antichain());
                prop_assert!(max.is_antichain());
            }
            for a in &seq {
                prop_assert!(min.has_member_below(a));
                prop_assert!(max.has_member_above(a));
            }
            // minimal elements of the inserted set, computed directly
            for m in min.members() {
                prop_assert!(seq.iter().all(|b| !b.lt(m)));
            }
            for m in max.members() {
                prop_assert!(seq.iter().all(|b| !m.lt(b)));
            }
        }
    }
}
