//! Uniformly induced distributions and the order-K compatibility test.
//!
//! With every latent uniform over `k_ℓ` values, a model's observed
//! distribution is a histogram of its world observations over the common
//! denominator ∏ k_ℓ. [`enumerate_uniform`] lists every such histogram by a
//! depth-first walk over the worlds in order, assigning a table entry only
//! when some world first needs it, so superfluous entries are never branched
//! on.
//!
//! Relabeling the values of one latent permutes worlds without changing the
//! histogram. The walk keeps only diagrams whose observation sequence is
//! lexicographically no larger than its image under any swap of two adjacent
//! values of one latent. The least member of every relabeling orbit passes
//! that test, so no histogram is lost.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::parallel::Parallelism;
use crate::possibilistic::Certificate;
use crate::prob::{epsilon_bound, Distribution, EpsilonBound, ProbError, Variables};
use crate::structure::{CausalStructure, StructureError};
use crate::worlds::{FunctionTable, Layout, PossibleWorldsDiagram, WorldsError, UNSET};

/// Default node cap for enumeration.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("enumeration exceeded the budget of {0} nodes; the result would be truncated")]
    EnumerationBudgetExceeded(u64),
    #[error("enumeration exceeded the time limit of {0:?}; the result would be truncated")]
    EnumerationTimeout(Duration),
    #[error("order K must be >= 1")]
    InvalidOrder,
    #[error("distribution does not match the visible variables: {0}")]
    VariableMismatch(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub parallelism: Parallelism,
    /// Skip diagrams that are not lex-leaders under adjacent latent swaps.
    pub symmetry_pruning: bool,
    /// Keep the first diagram (in walk order) producing each distribution.
    pub witnesses: bool,
    pub node_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Branching levels expanded up front when running in parallel.
    pub split_depth: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            parallelism: Parallelism::Sequential,
            symmetry_pruning: true,
            witnesses: false,
            node_budget: Some(DEFAULT_NODE_BUDGET),
            time_limit: None,
            split_depth: 6,
        }
    }
}

/// The distributions induced by uniform latents at fixed cardinalities,
/// stored as world-count vectors over the dense visible outcome space and
/// ordered lexicographically by those vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformSet {
    structure: CausalStructure,
    layout: Layout,
    variables: Variables,
    members: BTreeMap<Vec<u32>, Option<FunctionTable>>,
    nodes: u64,
}

impl UniformSet {
    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn structure(&self) -> &CausalStructure {
        &self.structure
    }

    pub fn latent_cards(&self) -> &[u32] {
        self.layout.latent_cards()
    }

    /// ∏ k_ℓ, the common denominator of every member.
    pub fn denominator(&self) -> u64 {
        self.layout.world_count() as u64
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Search nodes visited while enumerating.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn counts(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.members.keys()
    }

    pub fn distribution(&self, counts: &[u32]) -> Distribution {
        let wide: Vec<u64> = counts.iter().map(|&c| u64::from(c)).collect();
        Distribution::from_counts(self.variables.clone(), &wide, self.denominator())
            .expect("counts sum to the denominator")
    }

    pub fn distributions(&self) -> impl Iterator<Item = Distribution> + '_ {
        self.members.keys().map(|c| self.distribution(c))
    }

    pub fn witness(&self, counts: &[u32]) -> Option<PossibleWorldsDiagram> {
        self.members.get(counts).and_then(|t| {
            t.as_ref().map(|table| {
                PossibleWorldsDiagram::from_parts(self.structure.clone(), self.layout.clone(), table.clone())
            })
        })
    }

    pub fn contains(&self, p: &Distribution) -> bool {
        self.counts_of(p).is_some_and(|c| self.members.contains_key(&c))
    }

    fn counts_of(&self, p: &Distribution) -> Option<Vec<u32>> {
        if p.variables() != &self.variables {
            return None;
        }
        let n = BigInt::from(self.denominator());
        let mut counts = vec![0u32; self.variables.size()?];
        for (o, q) in p.entries() {
            let scaled = q * &n;
            if !scaled.is_integer() {
                return None;
            }
            counts[self.variables.index_of(o)] = u32::try_from(scaled.to_integer()).ok()?;
        }
        Some(counts)
    }
}

/// Enumerates the distributions of `structure` (normalized first) under
/// uniform latents with cardinalities `latent_cards`, indexed like the
/// latents of the normalized structure.
pub fn enumerate_uniform(
    structure: &CausalStructure,
    latent_cards: &[u32],
    options: &EnumerationOptions,
) -> Result<UniformSet, HierarchyError> {
    let normal = structure.normalize()?.structure;
    let layout = Layout::new(&normal, latent_cards)?;
    let variables = Variables::new(&normal.visible_names(), &normal.visible_cardinalities())?;
    let size = variables.size().ok_or(WorldsError::TooLarge)?;
    let walker = Walker::new(&layout, size, options);

    let mut root = State {
        world: 0,
        table: layout.empty_table(),
        obs: vec![0; layout.world_count()],
        sym: vec![Cmp::Equal; walker.pair_count],
    };
    let mut members = BTreeMap::new();
    if options.parallelism.is_parallel() && options.split_depth > 0 {
        let mut items = Vec::new();
        walker.walk(&mut root, &mut Sink::Split(&mut items, options.split_depth))?;
        let results = options.parallelism.map_ordered(items, |item| match item {
            Item::Leaf(counts, table) => Ok::<_, HierarchyError>(BTreeMap::from([(counts, table)])),
            Item::Task(mut state) => {
                let mut found = BTreeMap::new();
                walker.walk(&mut state, &mut Sink::Collect(&mut found))?;
                Ok(found)
            }
        });
        for part in results {
            for (counts, table) in part? {
                members.entry(counts).or_insert(table);
            }
        }
    } else {
        walker.walk(&mut root, &mut Sink::Collect(&mut members))?;
    }
    let nodes = walker.nodes.load(Ordering::Relaxed);
    drop(walker);
    Ok(UniformSet {
        structure: normal,
        layout,
        variables,
        members,
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Equal,
    Less,
}

#[derive(Clone)]
struct State {
    world: usize,
    table: FunctionTable,
    obs: Vec<usize>,
    sym: Vec<Cmp>,
}

enum Item {
    Leaf(Vec<u32>, Option<FunctionTable>),
    Task(State),
}

enum Sink<'a> {
    Collect(&'a mut BTreeMap<Vec<u32>, Option<FunctionTable>>),
    Split(&'a mut Vec<Item>, usize),
}

struct Walker<'a> {
    layout: &'a Layout,
    outcomes: usize,
    lambdas: Vec<Vec<u32>>,
    /// World-index stride of each latent axis.
    strides: Vec<usize>,
    /// First symmetry-pair index of each latent axis.
    pair_offset: Vec<usize>,
    pair_count: usize,
    pruning: bool,
    witnesses: bool,
    budget: Option<u64>,
    deadline: Option<(Instant, Duration)>,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl<'a> Walker<'a> {
    fn new(layout: &'a Layout, outcomes: usize, options: &EnumerationOptions) -> Self {
        let cards = layout.latent_cards();
        let mut strides = vec![1; cards.len()];
        for a in (0..cards.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * cards[a + 1] as usize;
        }
        let mut pair_offset = Vec::with_capacity(cards.len());
        let mut pair_count = 0;
        for &k in cards {
            pair_offset.push(pair_count);
            pair_count += k as usize - 1;
        }
        Self {
            layout,
            outcomes,
            lambdas: (0..layout.world_count()).map(|w| layout.world_lambda(w)).collect(),
            strides,
            pair_offset,
            pair_count,
            pruning: options.symmetry_pruning,
            witnesses: options.witnesses,
            budget: options.node_budget,
            deadline: options.time_limit.map(|d| (Instant::now() + d, d)),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    fn count_node(&self) -> Result<(), HierarchyError> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(b) = self.budget {
            if n > b {
                self.stop.store(true, Ordering::Relaxed);
                return Err(HierarchyError::EnumerationBudgetExceeded(b));
            }
        }
        if n.is_multiple_of(4096) {
            if let Some((at, limit)) = self.deadline {
                if Instant::now() > at {
                    self.stop.store(true, Ordering::Relaxed);
                    return Err(HierarchyError::EnumerationTimeout(limit));
                }
            }
        }
        if self.stop.load(Ordering::Relaxed) {
            // Another worker already failed; its error is the one reported.
            return Err(HierarchyError::EnumerationBudgetExceeded(self.budget.unwrap_or(0)));
        }
        Ok(())
    }

    fn walk(&self, state: &mut State, sink: &mut Sink) -> Result<(), HierarchyError> {
        let mut values = vec![UNSET; self.layout.visible_count()];
        loop {
            if state.world == self.layout.world_count() {
                let mut counts = vec![0u32; self.outcomes];
                for &o in &state.obs {
                    counts[o] += 1;
                }
                let table = self.witnesses.then(|| state.table.clone());
                match sink {
                    Sink::Collect(found) => {
                        if let Entry::Vacant(slot) = found.entry(counts) {
                            slot.insert(table);
                        }
                    }
                    Sink::Split(items, _) => items.push(Item::Leaf(counts, table)),
                }
                return Ok(());
            }
            let w = state.world;
            if let Some((slot, key)) = self.layout.evaluate_into(&state.table, &self.lambdas[w], &mut values) {
                if let Sink::Split(items, 0) = sink {
                    items.push(Item::Task(state.clone()));
                    return Ok(());
                }
                for x in 0..self.layout.cards[slot] {
                    self.count_node()?;
                    state.table.set(slot, key, x);
                    let mut child = state.clone();
                    match sink {
                        Sink::Collect(found) => self.walk(&mut child, &mut Sink::Collect(found))?,
                        Sink::Split(items, depth) => self.walk(&mut child, &mut Sink::Split(items, *depth - 1))?,
                    }
                }
                state.table.clear(slot, key);
                return Ok(());
            }
            let o = self.layout.outcome_index(&values);
            state.obs[w] = o;
            if self.pruning && !self.lex_leader_step(state, w, o) {
                return Ok(());
            }
            state.world += 1;
        }
    }

    /// Compares world `w` with its lower neighbour along every latent axis.
    /// Returns false when some adjacent swap would give a smaller sequence.
    fn lex_leader_step(&self, state: &mut State, w: usize, o: usize) -> bool {
        let lambda = &self.lambdas[w];
        for (a, &x) in lambda.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let pair = self.pair_offset[a] + x as usize - 1;
            if state.sym[pair] == Cmp::Less {
                continue;
            }
            let partner = state.obs[w - self.strides[a]];
            if partner < o {
                state.sym[pair] = Cmp::Less;
            } else if partner > o {
                return false;
            }
        }
        true
    }
}

/// Exact L1 distance from `p` to the closest member of `set`, the member
/// itself (first in the set's order among ties) and its witness if kept.
pub fn min_distance_to_uniform(
    p: &Distribution,
    set: &UniformSet,
) -> Result<(BigRational, Distribution, Option<PossibleWorldsDiagram>), HierarchyError> {
    if p.variables() != set.variables() {
        return Err(HierarchyError::VariableMismatch(format!(
            "expected {:?}, got {:?}",
            set.variables().names(),
            p.variables().names()
        )));
    }
    let n = BigInt::from(set.denominator());
    let d = p
        .entries()
        .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
    let size = set.variables().size().ok_or(WorldsError::TooLarge)?;
    // Target scaled to denominator d·n.
    let mut target = vec![BigInt::zero(); size];
    for (o, q) in p.entries() {
        target[set.variables().index_of(o)] = q.numer() * (&d / q.denom()) * &n;
    }
    let mut best: Option<(BigInt, &Vec<u32>)> = None;
    for counts in set.counts() {
        let total: BigInt = target
            .iter()
            .zip(counts)
            .map(|(t, &c)| (t - BigInt::from(c) * &d).abs())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, counts));
        }
    }
    let (total, counts) = best.expect("a uniform set is never empty");
    Ok((
        BigRational::new(total, d * n),
        set.distribution(counts),
        set.witness(counts),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyResult {
    pub order: u32,
    /// ε(K) with the latent count L and bound C that produced it.
    pub epsilon: EpsilonBound,
    /// Whether C came from the caller rather than the structure's bounds.
    pub c_overridden: bool,
    pub verdict: TestVerdict,
    pub min_distance: BigRational,
    pub nearest: Distribution,
    pub certificate: Certificate,
    pub set_size: usize,
    pub nodes: u64,
}

/// Order-K test: Pass iff some distribution induced by uniform latents of
/// cardinality K lies within ε(K) of `p`.
pub fn order_k_test(
    structure: &CausalStructure,
    p: &Distribution,
    k: u32,
    c_override: Option<u64>,
    options: &EnumerationOptions,
) -> Result<HierarchyResult, HierarchyError> {
    if k == 0 {
        return Err(HierarchyError::InvalidOrder);
    }
    let normal = structure.normalize()?.structure;
    let names = normal.visible_names();
    if p.variables().len() != names.len() {
        return Err(HierarchyError::VariableMismatch(format!(
            "expected {names:?}, got {:?}",
            p.variables().names()
        )));
    }
    let p = p
        .reorder(&names)
        .map_err(|e| HierarchyError::VariableMismatch(e.to_string()))?;
    let latents = normal.latent();
    let c = match c_override {
        Some(c) => c,
        None => latents
            .iter()
            .map(|&l| normal.cardinality_bound(l).map(|b| b.bound))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or(1),
    };
    let epsilon = epsilon_bound(latents.len() as u32, c.max(1), u64::from(k));
    let set = enumerate_uniform(
        &normal,
        &vec![k; latents.len()],
        &EnumerationOptions {
            witnesses: true,
            ..*options
        },
    )?;
    let (min_distance, nearest, witness) = min_distance_to_uniform(&p, &set)?;
    let verdict = if min_distance <= epsilon.epsilon {
        TestVerdict::Pass
    } else {
        TestVerdict::Fail
    };
    Ok(HierarchyResult {
        order: k,
        epsilon,
        c_overridden: c_override.is_some(),
        verdict,
        min_distance,
        nearest,
        certificate: Certificate {
            diagram: witness.expect("witnesses were requested").trimmed(),
            diagonal: Vec::new(),
        },
        set_size: set.len(),
        nodes: set.nodes(),
    })
}
