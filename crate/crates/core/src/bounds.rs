//! Certified upper bounds on neurovariety dimension.
//!
//! Three bounds hold for every architecture: the ambient dimension, the
//! parameter count minus the hidden widths, and the split bound
//!
//! ```text
//! dim V(d0..dL) <= dim V(d0..dk) + dim V(dk..dL) - dk      (0 < k < L)
//! ```
//!
//! applied recursively. Known facts (for instance architectures certified
//! filling by a Jacobian rank) refine the leaves. When an upper bound drops
//! below the ambient dimension the architecture is certified non-filling.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pnn::Architecture;
use crate::rank::RankEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// A Jacobian rank reached the ambient dimension.
    CertifiedFilling,
    /// Rank lower bound and certified upper bound coincide.
    CertifiedExact,
    /// The certified upper bound is below the ambient dimension.
    CertifiedNonfilling,
    /// A rank below ambient is known but no bound rules out filling.
    Reported,
    Unknown,
}

impl Status {
    fn derive(rank_lower: u64, upper_bound: u64, ambient: u64) -> Status {
        if rank_lower == ambient {
            Status::CertifiedFilling
        } else if rank_lower > 0 && rank_lower == upper_bound {
            Status::CertifiedExact
        } else if upper_bound < ambient {
            Status::CertifiedNonfilling
        } else if rank_lower > 0 {
            Status::Reported
        } else {
            Status::Unknown
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::CertifiedFilling => "certified_filling",
            Status::CertifiedExact => "certified_exact",
            Status::CertifiedNonfilling => "certified_nonfilling",
            Status::Reported => "reported",
            Status::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a fact's numbers came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Rank { prime: u64, trials: u32, seed: u64 },
    Bound { derivation: String },
    External { note: String },
}

/// Everything known about the dimension of one neurovariety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionFact {
    pub arch: String,
    pub r: u32,
    pub ambient: u64,
    pub param_bound: u64,
    /// 0 when no rank is known.
    pub rank_lower: u64,
    pub upper_bound: u64,
    pub status: Status,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

impl DimensionFact {
    /// A fact carrying only the width-derived bounds.
    pub fn trivial(arch: &Architecture) -> Result<Self> {
        let ambient = arch.ambient_dim()?;
        let param_bound = arch.param_bound();
        let mut fact = DimensionFact {
            arch: arch.label(),
            r: arch.r(),
            ambient,
            param_bound,
            rank_lower: 0,
            upper_bound: ambient.min(param_bound),
            status: Status::Unknown,
            provenance: Vec::new(),
        };
        fact.refresh_status();
        Ok(fact)
    }

    pub fn from_rank(arch: &Architecture, est: &RankEstimate) -> Result<Self> {
        let mut fact = DimensionFact::trivial(arch)?;
        fact.rank_lower = est.rank_lower;
        fact.provenance.push(Provenance::Rank {
            prime: u64::from(est.prime),
            trials: est.trials,
            seed: est.seed,
        });
        fact.refresh_status();
        fact.check()?;
        Ok(fact)
    }

    pub fn from_bound(arch: &Architecture, bound: u64, derivation: String) -> Result<Self> {
        let mut fact = DimensionFact::trivial(arch)?;
        fact.upper_bound = fact.upper_bound.min(bound);
        fact.provenance.push(Provenance::Bound { derivation });
        fact.refresh_status();
        Ok(fact)
    }

    /// An externally known exact dimension, e.g. a published value.
    pub fn exact(arch: &Architecture, dim: u64, note: &str) -> Result<Self> {
        let mut fact = DimensionFact::trivial(arch)?;
        fact.rank_lower = dim;
        fact.upper_bound = fact.upper_bound.min(dim);
        fact.provenance.push(Provenance::External { note: note.into() });
        fact.refresh_status();
        fact.check()?;
        Ok(fact)
    }

    /// A fact with the given bounds, checked against the widths.
    pub fn from_parts(arch: &Architecture, rank_lower: u64, upper_bound: u64, provenance: Vec<Provenance>) -> Result<Self> {
        let mut fact = DimensionFact::trivial(arch)?;
        fact.rank_lower = rank_lower;
        fact.upper_bound = fact.upper_bound.min(upper_bound);
        fact.provenance = provenance;
        fact.refresh_status();
        fact.check()?;
        Ok(fact)
    }

    pub fn architecture(&self) -> Result<Architecture> {
        Architecture::parse(&self.arch, self.r)
    }

    fn refresh_status(&mut self) {
        self.status = Status::derive(self.rank_lower, self.upper_bound, self.ambient);
    }

    /// Checks `rank_lower <= upper_bound <= min(ambient, param_bound)` and
    /// that the stored status matches the numbers.
    pub fn check(&self) -> Result<()> {
        if self.rank_lower > self.upper_bound {
            return Err(Error::InconsistentFacts {
                arch: self.arch.clone(),
                lower: self.rank_lower,
                upper: self.upper_bound,
            });
        }
        if self.upper_bound > self.ambient.min(self.param_bound) {
            return Err(Error::InconsistentFacts {
                arch: self.arch.clone(),
                lower: self.upper_bound,
                upper: self.ambient.min(self.param_bound),
            });
        }
        if self.status != Status::derive(self.rank_lower, self.upper_bound, self.ambient) {
            return Err(Error::InconsistentFacts {
                arch: format!("{} (status {} does not match its bounds)", self.arch, self.status),
                lower: self.rank_lower,
                upper: self.upper_bound,
            });
        }
        Ok(())
    }

    /// The dimension is known to be below the ambient dimension.
    pub fn is_certified_nonfilling(&self) -> bool {
        self.upper_bound < self.ambient
    }

    pub fn is_certified_filling(&self) -> bool {
        self.status == Status::CertifiedFilling
    }

    /// The dimension if it is pinned down by certified bounds.
    pub fn exact_dim(&self) -> Option<u64> {
        (self.rank_lower > 0 && self.rank_lower == self.upper_bound).then_some(self.rank_lower)
    }

    /// Meet of two facts about the same architecture.
    pub fn merge(&self, other: &DimensionFact) -> Result<DimensionFact> {
        if (self.arch.as_str(), self.r) != (other.arch.as_str(), other.r) {
            return Err(Error::InconsistentFacts {
                arch: format!("{} vs {}", self.arch, other.arch),
                lower: 0,
                upper: 0,
            });
        }
        let mut merged = self.clone();
        merged.rank_lower = self.rank_lower.max(other.rank_lower);
        merged.upper_bound = self.upper_bound.min(other.upper_bound);
        // keep evidence only when it tightens something
        let improves = other.rank_lower > self.rank_lower || other.upper_bound < self.upper_bound;
        if improves || self.provenance.is_empty() {
            for p in &other.provenance {
                if !merged.provenance.contains(p) {
                    merged.provenance.push(p.clone());
                }
            }
        }
        merged.refresh_status();
        merged.check()?;
        Ok(merged)
    }
}

/// Facts keyed by `(widths, r)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactsRegistry {
    facts: HashMap<(String, u32), DimensionFact>,
}

impl FactsRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, arch: &Architecture) -> Option<&DimensionFact> {
        self.facts.get(&(arch.label(), arch.r()))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Facts sorted by `(r, depth, label)` for stable output.
    pub fn facts(&self) -> Vec<&DimensionFact> {
        let mut all: Vec<_> = self.facts.values().collect();
        all.sort_by(|a, b| {
            (a.r, a.arch.split('-').count(), &a.arch).cmp(&(b.r, b.arch.split('-').count(), &b.arch))
        });
        all
    }

    /// Upserts `fact`, keeping the larger lower and the smaller upper bound.
    pub fn merge_fact(&mut self, fact: DimensionFact) -> Result<&DimensionFact> {
        fact.check()?;
        let key = (fact.arch.clone(), fact.r);
        let merged = match self.facts.get(&key) {
            Some(existing) => existing.merge(&fact)?,
            None => fact,
        };
        self.facts.insert(key.clone(), merged);
        Ok(&self.facts[&key])
    }

    pub fn merge_all(&mut self, facts: impl IntoIterator<Item = DimensionFact>) -> Result<()> {
        for f in facts {
            self.merge_fact(f)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Vec<DimensionFact> {
        self.facts().into_iter().cloned().collect()
    }
}

/// Free-function form of [`FactsRegistry::merge_fact`].
pub fn merge_fact(mut registry: FactsRegistry, fact: DimensionFact) -> Result<FactsRegistry> {
    registry.merge_fact(fact)?;
    Ok(registry)
}

/// How a bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Linear,
    Ambient,
    ParamBound,
    Fact,
    Split(usize),
}

/// Cache of recursive bounds shared across calls with one registry.
#[derive(Debug, Default, Clone)]
pub struct BoundMemo {
    entries: HashMap<(Vec<usize>, u32), (u64, Source)>,
}

impl BoundMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Must be called after the registry the memo was built against changes.
    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Drops the cached bound of `arch` only.
    pub fn forget(&mut self, arch: &Architecture) {
        self.entries.remove(&(arch.widths().to_vec(), arch.r()));
    }
}

fn base_bound(arch: &Architecture, registry: &FactsRegistry) -> (u64, Source) {
    let w = arch.widths();
    if arch.depth() == 1 {
        return ((w[0] * w[1]) as u64, Source::Linear);
    }
    let mut best = (arch.param_bound(), Source::ParamBound);
    if let Ok(ambient) = arch.ambient_dim() {
        if ambient <= best.0 {
            best = (ambient, Source::Ambient);
        }
    }
    if let Some(fact) = registry.get(arch) {
        if fact.upper_bound < best.0 {
            best = (fact.upper_bound, Source::Fact);
        }
    }
    best
}

fn bound_memo(arch: &Architecture, registry: &FactsRegistry, memo: &mut BoundMemo) -> (u64, Source) {
    let key = (arch.widths().to_vec(), arch.r());
    if let Some(&hit) = memo.entries.get(&key) {
        return hit;
    }
    let mut best = base_bound(arch, registry);
    for k in 1..arch.depth() {
        let prefix = arch.slice(0, k).expect("0 < k");
        let suffix = arch.slice(k, arch.depth()).expect("k < L");
        let (a, _) = bound_memo(&prefix, registry, memo);
        let (b, _) = bound_memo(&suffix, registry, memo);
        let split = (a + b).saturating_sub(arch.widths()[k] as u64);
        if split < best.0 {
            best = (split, Source::Split(k));
        }
    }
    memo.entries.insert(key, best);
    best
}

/// Best certified upper bound from the ambient dimension, the parameter
/// bound, registry facts, and every recursive split.
///
/// Only the registry's `upper_bound` fields are consulted; these are
/// certified by construction, so reported-but-uncertified ranks never leak
/// into a certificate.
pub fn recursive_bound(arch: &Architecture, registry: &FactsRegistry) -> u64 {
    recursive_bound_with(arch, registry, &mut BoundMemo::new())
}

pub fn recursive_bound_with(arch: &Architecture, registry: &FactsRegistry, memo: &mut BoundMemo) -> u64 {
    bound_memo(arch, registry, memo).0
}

/// The bound with its derivation spelled out, e.g.
/// `D(2-2)=4 [linear] + D(2-4-5-4-6-4-1)=33 [ambient] - 2 = 35`.
pub fn explain_bound(arch: &Architecture, registry: &FactsRegistry) -> (u64, String) {
    let mut memo = BoundMemo::new();
    let (value, _) = bound_memo(arch, registry, &mut memo);
    let mut terms = Vec::new();
    let mut subtract = Vec::new();
    expand(arch, &memo, &mut terms, &mut subtract);
    (value, render(&terms, &subtract, value))
}

fn expand(arch: &Architecture, memo: &BoundMemo, terms: &mut Vec<String>, subtract: &mut Vec<usize>) {
    let (value, source) = memo.entries[&(arch.widths().to_vec(), arch.r())];
    match source {
        Source::Split(k) => {
            expand(&arch.slice(0, k).expect("valid split"), memo, terms, subtract);
            expand(&arch.slice(k, arch.depth()).expect("valid split"), memo, terms, subtract);
            subtract.push(arch.widths()[k]);
        }
        leaf => terms.push(format!("D({})={value} [{}]", arch.label(), leaf_name(leaf))),
    }
}

fn leaf_name(source: Source) -> &'static str {
    match source {
        Source::Linear => "linear",
        Source::Ambient => "ambient",
        Source::ParamBound => "param_bound",
        Source::Fact => "fact",
        Source::Split(_) => "split",
    }
}

fn render(terms: &[String], subtract: &[usize], value: u64) -> String {
    let mut s = terms.join(" + ");
    for d in subtract {
        s.push_str(&format!(" - {d}"));
    }
    format!("{s} = {value}")
}

/// The split bound along an explicit chain of cut positions.
///
/// `cuts` are strictly increasing interior indices `0 < k1 < ... < L`; the
/// architecture is cut into consecutive pieces whose dimensions are bounded
/// by [`recursive_bound`], and every cut width is subtracted once. This
/// reproduces a specific hand derivation; [`recursive_bound`] is never
/// larger.
pub fn split_bound(arch: &Architecture, cuts: &[usize], registry: &FactsRegistry) -> Result<(u64, String)> {
    if cuts.windows(2).any(|c| c[0] >= c[1]) || cuts.iter().any(|&k| k == 0 || k >= arch.depth()) {
        return Err(Error::InvalidArchitecture(format!(
            "cuts {cuts:?} are not increasing interior positions of {}",
            arch.label()
        )));
    }
    let mut memo = BoundMemo::new();
    let mut points = vec![0];
    points.extend_from_slice(cuts);
    points.push(arch.depth());
    let mut total: u64 = 0;
    let mut terms = Vec::new();
    for pair in points.windows(2) {
        let piece = arch.slice(pair[0], pair[1])?;
        let b = recursive_bound_with(&piece, registry, &mut memo);
        terms.push(format!("D({})={b}", piece.label()));
        total += b;
    }
    let subtract: Vec<usize> = cuts.iter().map(|&k| arch.widths()[k]).collect();
    let value = total.saturating_sub(subtract.iter().map(|&d| d as u64).sum());
    let value = value.min(arch.ambient_dim()?).min(arch.param_bound());
    Ok((value, render(&terms, &subtract, value)))
}

/// Classifies `arch` using the recursive bound and whatever rank evidence
/// the registry holds.
pub fn certify_nonfilling(arch: &Architecture, registry: &FactsRegistry) -> Result<DimensionFact> {
    let (bound, derivation) = explain_bound(arch, registry);
    let fact = DimensionFact::from_bound(arch, bound, derivation)?;
    match registry.get(arch) {
        Some(known) => known.merge(&fact),
        None => Ok(fact),
    }
}

/// A bound that also trusts reported (uncertified) ranks as exact values.
///
/// Useful for guiding a search; never used for certificates.
pub fn heuristic_bound(arch: &Architecture, registry: &FactsRegistry) -> u64 {
    let mut optimistic = registry.clone();
    let reported: Vec<DimensionFact> = registry
        .facts
        .values()
        .filter(|f| f.status == Status::Reported)
        .cloned()
        .collect();
    for mut f in reported {
        f.upper_bound = f.rank_lower;
        f.refresh_status();
        optimistic.facts.insert((f.arch.clone(), f.r), f);
    }
    recursive_bound(arch, &optimistic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arch(s: &str) -> Architecture {
        Architecture::parse(s, 2).unwrap()
    }

    fn filling(s: &str) -> DimensionFact {
        let a = arch(s);
        DimensionFact::exact(&a, a.ambient_dim().unwrap(), "test").unwrap()
    }

    #[test]
    fn linear_base_case() {
        let reg = FactsRegistry::new();
        assert_eq!(recursive_bound(&Architecture::parse("4-5", 3).unwrap(), &reg), 20);
        for m in 1..=6 {
            for n in 1..=6 {
                let a = Architecture::new(vec![m, n], 2).unwrap();
                assert_eq!(recursive_bound(&a, &reg), (m * n) as u64);
            }
        }
    }

    #[test]
    fn hand_derivations() {
        let mut reg = FactsRegistry::new();
        reg.merge_fact(filling("2-4-5-4")).unwrap();
        let (b, text) = split_bound(&arch("2-2-4-5-4-6-4-1"), &[1, 4], &reg).unwrap();
        assert_eq!(b, 53, "{text}");

        reg.merge_fact(filling("2-3-4-5-3")).unwrap();
        reg.merge_fact(filling("3-6-4-1")).unwrap();
        let d4 = arch("2-3-4-5-3-6-4-1");
        assert_eq!(split_bound(&d4, &[4], &reg).unwrap().0, 39);
        assert_eq!(recursive_bound(&d4, &reg), 39);
    }

    #[test]
    fn optimal_split_beats_hand_derivation() {
        let reg = FactsRegistry::new();
        let (b, text) = explain_bound(&arch("2-2-4-5-4-6-4-1"), &reg);
        assert_eq!(b, 35);
        assert_eq!(text, "D(2-2)=4 [linear] + D(2-4-5-4-6-4-1)=33 [ambient] - 2 = 35");
    }

    #[test]
    fn bad_cuts_are_rejected() {
        let reg = FactsRegistry::new();
        let a = arch("2-3-4-1");
        assert!(split_bound(&a, &[0], &reg).is_err());
        assert!(split_bound(&a, &[2, 1], &reg).is_err());
        assert!(split_bound(&a, &[3], &reg).is_err());
    }

    #[test]
    fn nonfilling_certificates() {
        let reg = FactsRegistry::new();
        let f = certify_nonfilling(&arch("2-3-4-5-3-6-4-1"), &reg).unwrap();
        assert_eq!((f.status, f.upper_bound), (Status::CertifiedNonfilling, 39));
        let f = certify_nonfilling(&arch("2-3-4-5-4-6-4-1"), &reg).unwrap();
        assert_eq!(f.upper_bound, 65);
        assert!(!f.is_certified_nonfilling());
        // (m, n) always fills its ambient space
        let f = certify_nonfilling(&arch("3-4"), &reg).unwrap();
        assert!(!f.is_certified_nonfilling());
    }

    #[test]
    fn merge_semantics() {
        let a = arch("2-4-5-4");
        let mut reg = FactsRegistry::new();
        let mut lower = DimensionFact::trivial(&a).unwrap();
        lower.rank_lower = 20;
        lower.refresh_status();
        reg.merge_fact(lower.clone()).unwrap();
        assert!(reg.get(&a).is_some());
        // upper 20 meets lower 20; ambient is 20 as well, so it is filling
        let upper = DimensionFact::from_bound(&a, 20, "x".into()).unwrap();
        assert_eq!(reg.merge_fact(upper).unwrap().status, Status::CertifiedFilling);

        let b = arch("2-3-4-5-4-6-4-1");
        let mut low = DimensionFact::trivial(&b).unwrap();
        low.rank_lower = 20;
        low.refresh_status();
        let high = DimensionFact::from_bound(&b, 20, "y".into()).unwrap();
        let m = low.merge(&high).unwrap();
        assert_eq!((m.rank_lower, m.upper_bound, m.status), (20, 20, Status::CertifiedExact));

        let mut l21 = DimensionFact::trivial(&b).unwrap();
        l21.rank_lower = 21;
        l21.refresh_status();
        assert!(matches!(l21.merge(&high), Err(Error::InconsistentFacts { .. })));

        // merging with itself changes nothing
        assert_eq!(m.merge(&m).unwrap(), m);
    }

    #[test]
    fn reported_ranks_do_not_certify() {
        let a = arch("2-3-3-5-4-6-4-1");
        let mut reg = FactsRegistry::new();
        let mut f = DimensionFact::trivial(&a).unwrap();
        f.rank_lower = 60;
        f.refresh_status();
        reg.merge_fact(f).unwrap();
        assert_eq!(reg.get(&a).unwrap().status, Status::Reported);
        let parent = arch("2-3-3-5-4-6-5-1");
        assert!(heuristic_bound(&parent, &reg) <= recursive_bound(&parent, &reg));
    }

    #[test]
    fn json_shape() {
        let f = filling("2-3-3");
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["arch"], "2-3-3");
        assert_eq!(v["status"], "certified_filling");
        assert_eq!(v["provenance"][0]["kind"], "external");
        let back: DimensionFact = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }

    fn naive(arch: &Architecture, reg: &FactsRegistry) -> u64 {
        let mut best = base_bound(arch, reg).0;
        for k in 1..arch.depth() {
            let a = naive(&arch.slice(0, k).unwrap(), reg);
            let b = naive(&arch.slice(k, arch.depth()).unwrap(), reg);
            best = best.min((a + b).saturating_sub(arch.widths()[k] as u64));
        }
        best
    }

    proptest! {
        #[test]
        fn memoized_matches_naive(widths in proptest::collection::vec(1usize..=5, 2..=7), r in 1u32..=3) {
            let a = Architecture::new(widths, r).unwrap();
            let reg = FactsRegistry::new();
            prop_assert_eq!(recursive_bound(&a, &reg), naive(&a, &reg));
        }

        #[test]
        fn facts_only_tighten(widths in proptest::collection::vec(1usize..=4, 3..=6), drop in 0u64..5) {
            let a = Architecture::new(widths, 2).unwrap();
            let mut reg = FactsRegistry::new();
            let before = recursive_bound(&a, &reg);
            let inner = a.slice(0, a.depth() - 1).unwrap();
            let cap = recursive_bound(&inner, &reg);
            reg.merge_fact(DimensionFact::from_bound(&inner, cap.saturating_sub(drop), "t".into()).unwrap()).unwrap();
            prop_assert!(recursive_bound(&a, &reg) <= before);
        }
    }
}
