//! Possibilistic compatibility: can some functional model realize exactly a
//! given set of possible events?
//!
//! With W events every latent gets cardinality W and the diagonal world
//! (i, i, …, i) is pinned to the i-th event in sorted order. A depth-first
//! search then completes the response tables so that every other world also
//! lands inside the support. Because any model realizing the support can be
//! relabeled so that its diagonal worlds are exactly these, one seeding is
//! enough and the search is complete.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::parallel::Parallelism;
use crate::prob::{Outcome, ProbError, Support};
use crate::structure::{CausalStructure, StructureError};
use crate::worlds::{FunctionTable, Layout, PossibleWorldsDiagram, WorldsError, UNSET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PossibilisticError {
    #[error("support is empty")]
    EmptySupport,
    #[error("support does not match the visible variables: {0}")]
    CardinalityMismatch(String),
    #[error("CNF export needs binary visibles; `{0}` has cardinality {1}")]
    NonBooleanVisible(String, u32),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub parallelism: Parallelism,
    /// Number of branching levels expanded up front and handed out as
    /// independent subproblems when running in parallel.
    pub split_depth: usize,
    /// Exploratory override of the latent cardinality. Below the support
    /// size a `Compatible` answer is still sound but `Incompatible` is not
    /// conclusive.
    pub latent_cardinality: Option<u32>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            parallelism: Parallelism::Sequential,
            split_depth: 4,
            latent_cardinality: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes += rhs.nodes;
        self.backtracks += rhs.backtracks;
    }
}

/// A completed diagram witnessing compatibility. `diagonal[i]` is the event
/// observed by world (i, …, i); witnesses produced by enumeration leave it
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub diagram: PossibleWorldsDiagram,
    pub diagonal: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Compatible {
        certificate: Box<Certificate>,
        stats: SearchStats,
    },
    Incompatible {
        stats: SearchStats,
    },
}

impl Verdict {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Self::Compatible { .. })
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            Self::Compatible { stats, .. } | Self::Incompatible { stats } => *stats,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Self::Compatible { certificate, .. } => Some(certificate),
            Self::Incompatible { .. } => None,
        }
    }
}

/// Checks that `support` ranges over exactly the visibles of `structure`
/// with matching cardinalities and returns it in declaration order.
pub fn align_support(structure: &CausalStructure, support: &Support) -> Result<Support, PossibilisticError> {
    if support.is_empty() {
        return Err(PossibilisticError::EmptySupport);
    }
    let names = structure.visible_names();
    let vars = support.variables();
    let given: BTreeSet<&str> = vars.names().iter().map(String::as_str).collect();
    let wanted: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    if given != wanted || vars.len() != names.len() {
        return Err(PossibilisticError::CardinalityMismatch(format!(
            "expected variables {names:?}, got {:?}",
            vars.names()
        )));
    }
    let aligned = support.reorder(&names)?;
    let cards = structure.visible_cardinalities();
    if aligned.variables().cardinalities() != cards.as_slice() {
        return Err(PossibilisticError::CardinalityMismatch(format!(
            "expected cardinalities {cards:?}, got {:?}",
            aligned.variables().cardinalities()
        )));
    }
    Ok(aligned)
}

/// Decides whether `structure` can produce exactly the events of `support`.
/// The structure is normalized first.
pub fn decide_support(
    structure: &CausalStructure,
    support: &Support,
    options: &DecideOptions,
) -> Result<Verdict, PossibilisticError> {
    let normal = structure.normalize()?.structure;
    let support = align_support(&normal, support)?;
    let events: Vec<Outcome> = support.events().iter().cloned().collect();
    let w = u32::try_from(events.len()).map_err(|_| WorldsError::TooLarge)?;
    let k = options.latent_cardinality.unwrap_or(w).max(1);
    let cards = vec![k; normal.latent().len()];
    let layout = Layout::new(&normal, &cards)?;
    let problem = Problem::new(&layout, events);

    let root = layout.empty_table();
    let (found, stats) = if options.parallelism.is_parallel() && options.split_depth > 0 {
        problem.search_split(root, options)
    } else {
        let mut stats = SearchStats::default();
        let found = problem
            .search(root, &mut stats, &|| false)
            .expect("sequential search is never cancelled");
        (found, stats)
    };
    Ok(match found {
        Some(table) => {
            let diagonal = problem.pinned_events();
            let diagram = PossibleWorldsDiagram::from_parts(normal, layout.clone(), table).trimmed();
            Verdict::Compatible {
                certificate: Box::new(Certificate { diagram, diagonal }),
                stats,
            }
        }
        None => Verdict::Incompatible { stats },
    })
}

/// Replays a certificate: the diagram must sit on the normalized form of
/// `structure`, its uniform simulation must have support exactly `support`
/// and each diagonal world must observe its recorded event.
pub fn verify_certificate(
    structure: &CausalStructure,
    certificate: &Certificate,
    support: &Support,
) -> Result<bool, PossibilisticError> {
    let normal = structure.normalize()?.structure;
    if &normal != certificate.diagram.structure() {
        return Ok(false);
    }
    let support = align_support(&normal, support)?;
    let observations = certificate.diagram.observations()?;
    let realized: BTreeSet<&Outcome> = observations.iter().collect();
    if !realized.iter().copied().eq(support.events().iter()) {
        return Ok(false);
    }
    let layout = certificate.diagram.layout();
    let k_min = layout.latent_cards().iter().copied().min().unwrap_or(1) as usize;
    for (i, event) in certificate.diagonal.iter().enumerate() {
        if i >= k_min {
            return Ok(false);
        }
        let lambda = vec![i as u32; layout.latent_cards().len()];
        if observations[layout.world_index(&lambda)] != *event {
            return Ok(false);
        }
    }
    Ok(true)
}

enum Step {
    Conflict,
    Complete,
    Branch { slot: usize, key: usize, candidates: Vec<u32> },
}

#[derive(Debug)]
struct Cancelled;

enum Replay {
    Node,
    Backtrack,
    Exhausted(SearchStats),
    Found(FunctionTable, SearchStats),
    Skipped,
}

enum Item {
    Node,
    Backtrack,
    Found(FunctionTable),
    Sub(FunctionTable),
}

struct Problem<'a> {
    layout: &'a Layout,
    events: Vec<Outcome>,
    event_index: Vec<usize>,
    lambdas: Vec<Vec<u32>>,
    pinned: Vec<Option<usize>>,
    all_pinned: bool,
}

impl<'a> Problem<'a> {
    fn new(layout: &'a Layout, events: Vec<Outcome>) -> Self {
        let lambdas: Vec<Vec<u32>> = (0..layout.world_count()).map(|w| layout.world_lambda(w)).collect();
        let mut pinned = vec![None; layout.world_count()];
        let k = layout.latent_cards().iter().copied().min();
        // Pinning is only without loss of generality when every event can
        // own a diagonal world; below that the leaves check surjectivity.
        let diag = match k {
            Some(k) if k as usize >= events.len() => events.len(),
            Some(_) => 0,
            // Without latents the single world must produce the single event.
            None => usize::from(events.len() == 1),
        };
        for (i, slot) in (0..diag).map(|i| (i, layout.world_index(&vec![i as u32; layout.latent_cards().len()]))) {
            pinned[slot] = Some(i);
        }
        let mut event_index: Vec<usize> = events.iter().map(|e| layout.outcome_index(e)).collect();
        event_index.sort_unstable();
        Self {
            layout,
            all_pinned: diag == events.len(),
            events,
            event_index,
            lambdas,
            pinned,
        }
    }

    fn pinned_events(&self) -> Vec<Outcome> {
        let mut out: Vec<(usize, Outcome)> = self
            .pinned
            .iter()
            .filter_map(|p| p.map(|i| (i, self.events[i].clone())))
            .collect();
        out.sort();
        out.into_iter().map(|(_, e)| e).collect()
    }

    /// Forces every entry with a single admissible value until nothing
    /// changes, then reports a conflict, a completed table, or the blocked
    /// entry with the fewest admissible values.
    fn propagate(&self, table: &mut FunctionTable) -> Step {
        let layout = self.layout;
        let mut values = vec![UNSET; layout.visible_count()];
        let mut blocked = Vec::new();
        loop {
            let mut changed = false;
            let mut best: Option<(usize, usize, Vec<u32>)> = None;
            for (w, lambda) in self.lambdas.iter().enumerate() {
                'world: loop {
                    layout.evaluate_partial(table, lambda, &mut values, &mut blocked);
                    if blocked.is_empty() {
                        let ok = match self.pinned[w] {
                            Some(i) => values == self.events[i],
                            None => self.event_index.binary_search(&layout.outcome_index(&values)).is_ok(),
                        };
                        if !ok {
                            return Step::Conflict;
                        }
                        break;
                    }
                    for &(slot, key) in &blocked {
                        let candidates = self.candidates(w, slot, table, &values);
                        match candidates.len() {
                            0 => return Step::Conflict,
                            1 => {
                                table.set(slot, key, candidates[0]);
                                changed = true;
                                continue 'world;
                            }
                            n => {
                                if best.as_ref().is_none_or(|b| n < b.2.len()) {
                                    best = Some((slot, key, candidates));
                                }
                            }
                        }
                    }
                    break;
                }
            }
            if !changed {
                return match best {
                    Some((slot, key, candidates)) => Step::Branch { slot, key, candidates },
                    None => Step::Complete,
                };
            }
        }
    }

    /// Values of `slot` carried by events that agree with everything world
    /// `w` has determined so far, kept only if the world still agrees with
    /// some admissible event after evaluating downstream of that value.
    fn candidates(&self, w: usize, slot: usize, table: &FunctionTable, values: &[u32]) -> Vec<u32> {
        let agrees = |vals: &[u32], e: &Outcome| vals.iter().zip(e).all(|(&x, &y)| x == UNSET || x == y);
        let admissible = |vals: &[u32]| match self.pinned[w] {
            Some(i) => agrees(vals, &self.events[i]),
            None => self.events.iter().any(|e| agrees(vals, e)),
        };
        let mut out: Vec<u32> = match self.pinned[w] {
            Some(i) => {
                let e = &self.events[i];
                if agrees(values, e) {
                    vec![e[slot]]
                } else {
                    Vec::new()
                }
            }
            None => self.events.iter().filter(|e| agrees(values, e)).map(|e| e[slot]).collect(),
        };
        out.sort_unstable();
        out.dedup();
        let mut probe = values.to_vec();
        out.retain(|&x| {
            probe.copy_from_slice(values);
            probe[slot] = x;
            self.layout.extend_partial(table, &self.lambdas[w], &mut probe);
            admissible(&probe)
        });
        out
    }

    fn surjective(&self, table: &FunctionTable) -> bool {
        if self.all_pinned {
            return true;
        }
        let mut values = vec![UNSET; self.layout.visible_count()];
        let seen: BTreeSet<usize> = self
            .lambdas
            .iter()
            .map(|lambda| {
                self.layout.evaluate_into(table, lambda, &mut values);
                self.layout.outcome_index(&values)
            })
            .collect();
        seen.len() == self.event_index.len()
    }

    fn search(
        &self,
        mut table: FunctionTable,
        stats: &mut SearchStats,
        cancel: &dyn Fn() -> bool,
    ) -> Result<Option<FunctionTable>, Cancelled> {
        if cancel() {
            return Err(Cancelled);
        }
        stats.nodes += 1;
        match self.propagate(&mut table) {
            Step::Conflict => {
                stats.backtracks += 1;
                Ok(None)
            }
            Step::Complete => {
                if self.surjective(&table) {
                    Ok(Some(table))
                } else {
                    stats.backtracks += 1;
                    Ok(None)
                }
            }
            Step::Branch { slot, key, candidates } => {
                for c in candidates {
                    let mut child = table.clone();
                    child.set(slot, key, c);
                    if let Some(found) = self.search(child, stats, cancel)? {
                        return Ok(Some(found));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Mirrors [`Problem::search`] down to `depth`, recording the visit in
    /// preorder. Returns true once a solution has been recorded.
    fn expand(&self, mut table: FunctionTable, depth: usize, out: &mut Vec<Item>) -> bool {
        if depth == 0 {
            out.push(Item::Sub(table));
            return false;
        }
        out.push(Item::Node);
        match self.propagate(&mut table) {
            Step::Conflict => {
                out.push(Item::Backtrack);
                false
            }
            Step::Complete => {
                if self.surjective(&table) {
                    out.push(Item::Found(table));
                    true
                } else {
                    out.push(Item::Backtrack);
                    false
                }
            }
            Step::Branch { slot, key, candidates } => {
                for c in candidates {
                    let mut child = table.clone();
                    child.set(slot, key, c);
                    if self.expand(child, depth - 1, out) {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Parallel search whose answer and statistics equal the sequential
    /// run: subtrees are solved independently and then replayed in
    /// preorder up to the first solution.
    fn search_split(&self, root: FunctionTable, options: &DecideOptions) -> (Option<FunctionTable>, SearchStats) {
        let mut items = Vec::new();
        self.expand(root, options.split_depth, &mut items);
        let first_found = items.iter().position(|i| matches!(i, Item::Found(_)));
        let winner = AtomicUsize::new(first_found.unwrap_or(usize::MAX));

        let results = options.parallelism.map_ordered(
            items.into_iter().enumerate().collect(),
            |(pos, item)| match item {
                Item::Node => Replay::Node,
                Item::Backtrack => Replay::Backtrack,
                Item::Found(table) => Replay::Found(table, SearchStats::default()),
                Item::Sub(table) => {
                    let cancel = || winner.load(Ordering::Relaxed) < pos;
                    let mut stats = SearchStats::default();
                    match self.search(table, &mut stats, &cancel) {
                        Ok(Some(found)) => {
                            winner.fetch_min(pos, Ordering::Relaxed);
                            Replay::Found(found, stats)
                        }
                        Ok(None) => Replay::Exhausted(stats),
                        Err(Cancelled) => Replay::Skipped,
                    }
                }
            },
        );

        let mut total = SearchStats::default();
        for r in results {
            match r {
                Replay::Node => total.nodes += 1,
                Replay::Backtrack => total.backtracks += 1,
                Replay::Exhausted(s) => total += s,
                Replay::Found(table, s) => {
                    total += s;
                    return (Some(table), total);
                }
                Replay::Skipped => unreachable!("only subtrees after a solution are cancelled"),
            }
        }
        (None, total)
    }
}
