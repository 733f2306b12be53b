//! Possible-worlds diagrams.
//!
//! A diagram is a structure with exogenous latents, a cardinality for every
//! latent and a (possibly partial) deterministic response table for every
//! visible variable. Each latent valuation λ is a world; evaluating the tables
//! in topological order under λ yields the world's observation. Worlds are
//! never stored, only derived from the shared tables.
//!
//! Table keys list the visible parents first and then the latent parents,
//! each group in topological order (ties by declaration index). Worlds are
//! indexed lexicographically with the first latent most significant.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::VertexId;
use crate::prob::{Distribution, Outcome, ProbError, Variables};
use crate::structure::CausalStructure;

/// Marker for a table entry that has not been assigned.
pub const UNSET: u32 = u32::MAX;

/// Upper limit on the number of worlds and on any single table length.
pub const MAX_DENSE: usize = 1 << 26;

/// Default cap on ∏ k_ℓ! for [`PossibleWorldsDiagram::canonical_form`].
pub const DEFAULT_ORBIT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldsError {
    #[error("latent `{0}` has parents; normalize the structure first")]
    LatentNotExogenous(String),
    #[error("structure has no visible variables")]
    NoVisible,
    #[error("expected {expected} latent cardinalities, got {got}")]
    LatentCountMismatch { expected: usize, got: usize },
    #[error("latent cardinalities must be >= 1")]
    InvalidLatentCardinality,
    #[error("too many worlds or table entries for dense storage")]
    TooLarge,
    #[error("`{0}` is not a visible variable")]
    UnknownVisible(String),
    #[error("key {key:?} does not fit the parents of `{vertex}`")]
    InvalidKey { vertex: String, key: Vec<u32> },
    #[error("value {value} out of range for `{vertex}`")]
    InvalidValue { vertex: String, value: u32 },
    #[error("table is missing entries: {}", format_blocked(.0))]
    IncompleteTable(Vec<(String, Vec<u32>)>),
    #[error("latent permutation is not a bijection")]
    NotABijection,
    #[error("latent symmetry orbit has more than {0} elements")]
    OrbitTooLarge(u64),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

fn format_blocked(keys: &[(String, Vec<u32>)]) -> String {
    keys.iter()
        .map(|(v, k)| format!("{v}{k:?}"))
        .join(", ")
}

/// Dense indexing of worlds and table keys for one structure and one choice
/// of latent cardinalities. Visible variables are addressed by *slot*, their
/// position in declaration order among the visibles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub(crate) visible: Vec<VertexId>,
    pub(crate) cards: Vec<u32>,
    pub(crate) order: Vec<usize>,
    pub(crate) latents: Vec<VertexId>,
    pub(crate) latent_cards: Vec<u32>,
    pub(crate) vpa: Vec<Vec<usize>>,
    pub(crate) lpa: Vec<Vec<usize>>,
    pub(crate) key_radix: Vec<Vec<u32>>,
    pub(crate) table_len: Vec<usize>,
    pub(crate) world_count: usize,
}

impl Layout {
    pub fn new(structure: &CausalStructure, latent_cards: &[u32]) -> Result<Self, WorldsError> {
        let visible = structure.visible();
        if visible.is_empty() {
            return Err(WorldsError::NoVisible);
        }
        let latents = structure.latent();
        for &l in &latents {
            if !structure.graph().parents(l).is_empty() {
                return Err(WorldsError::LatentNotExogenous(structure.name(l).to_string()));
            }
        }
        if latent_cards.len() != latents.len() {
            return Err(WorldsError::LatentCountMismatch {
                expected: latents.len(),
                got: latent_cards.len(),
            });
        }
        if latent_cards.contains(&0) {
            return Err(WorldsError::InvalidLatentCardinality);
        }
        let dense = |factors: &[u32]| {
            factors
                .iter()
                .try_fold(1usize, |acc, &k| acc.checked_mul(k as usize))
                .filter(|&n| n <= MAX_DENSE)
                .ok_or(WorldsError::TooLarge)
        };
        let world_count = dense(latent_cards)?;

        let mut slot_of = vec![usize::MAX; structure.graph().vertex_count()];
        for (s, &v) in visible.iter().enumerate() {
            slot_of[v.0] = s;
        }
        let mut latent_of = vec![usize::MAX; structure.graph().vertex_count()];
        for (i, &l) in latents.iter().enumerate() {
            latent_of[l.0] = i;
        }
        let topo = structure.topological_order();
        let mut rank = vec![0; structure.graph().vertex_count()];
        for (r, v) in topo.iter().enumerate() {
            rank[v.0] = r;
        }
        let order: Vec<usize> = topo
            .iter()
            .filter(|&&v| structure.is_visible(v))
            .map(|v| slot_of[v.0])
            .collect();
        let cards = structure.visible_cardinalities();

        let mut vpa = Vec::new();
        let mut lpa = Vec::new();
        let mut key_radix = Vec::new();
        let mut table_len = Vec::new();
        for &v in &visible {
            let mut vp = structure.vpa(v);
            vp.sort_by_key(|p| rank[p.0]);
            let mut lp = structure.lpa(v);
            lp.sort_by_key(|p| rank[p.0]);
            let vp: Vec<usize> = vp.iter().map(|p| slot_of[p.0]).collect();
            let lp: Vec<usize> = lp.iter().map(|p| latent_of[p.0]).collect();
            let radix: Vec<u32> = vp
                .iter()
                .map(|&s| cards[s])
                .chain(lp.iter().map(|&l| latent_cards[l]))
                .collect();
            table_len.push(dense(&radix)?);
            key_radix.push(radix);
            vpa.push(vp);
            lpa.push(lp);
        }
        Ok(Self {
            visible,
            cards,
            order,
            latents,
            latent_cards: latent_cards.to_vec(),
            vpa,
            lpa,
            key_radix,
            table_len,
            world_count,
        })
    }

    pub fn visible_count(&self) -> usize {
        self.visible.len()
    }

    pub fn latent_cards(&self) -> &[u32] {
        &self.latent_cards
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    /// Visible slots in evaluation (topological) order.
    pub fn evaluation_order(&self) -> &[usize] {
        &self.order
    }

    pub fn table_len(&self, slot: usize) -> usize {
        self.table_len[slot]
    }

    pub fn world_lambda(&self, mut world: usize) -> Vec<u32> {
        let mut lambda = vec![0; self.latent_cards.len()];
        for (slot, &k) in lambda.iter_mut().zip(&self.latent_cards).rev() {
            *slot = (world % k as usize) as u32;
            world /= k as usize;
        }
        lambda
    }

    pub fn world_index(&self, lambda: &[u32]) -> usize {
        lambda
            .iter()
            .zip(&self.latent_cards)
            .fold(0, |acc, (&x, &k)| acc * k as usize + x as usize)
    }

    /// Key of `slot` given the values of its visible parents (read from
    /// `values`, indexed by slot) and the world's latent valuation.
    #[inline]
    pub fn key_index(&self, slot: usize, values: &[u32], lambda: &[u32]) -> usize {
        let mut key = 0usize;
        for &p in &self.vpa[slot] {
            key = key * self.cards[p] as usize + values[p] as usize;
        }
        for &l in &self.lpa[slot] {
            key = key * self.latent_cards[l] as usize + lambda[l] as usize;
        }
        key
    }

    pub fn key_tuple(&self, slot: usize, mut key: usize) -> Vec<u32> {
        let radix = &self.key_radix[slot];
        let mut out = vec![0; radix.len()];
        for (x, &k) in out.iter_mut().zip(radix).rev() {
            *x = (key % k as usize) as u32;
            key /= k as usize;
        }
        out
    }

    pub fn key_from_tuple(&self, slot: usize, tuple: &[u32]) -> Option<usize> {
        let radix = &self.key_radix[slot];
        if tuple.len() != radix.len() || tuple.iter().zip(radix).any(|(x, k)| x >= k) {
            return None;
        }
        Some(
            tuple
                .iter()
                .zip(radix)
                .fold(0, |acc, (&x, &k)| acc * k as usize + x as usize),
        )
    }

    /// Evaluates one world into `values` (indexed by slot). Returns the
    /// blocking `(slot, key)` when a needed entry is unset; slots after the
    /// block in evaluation order are left as [`UNSET`].
    #[inline]
    pub fn evaluate_into(
        &self,
        table: &FunctionTable,
        lambda: &[u32],
        values: &mut [u32],
    ) -> Option<(usize, usize)> {
        values.fill(UNSET);
        for &s in &self.order {
            let key = self.key_index(s, values, lambda);
            let x = table.values[s][key];
            if x == UNSET {
                return Some((s, key));
            }
            values[s] = x;
        }
        None
    }

    /// Evaluates everything one world can determine: a slot is left
    /// [`UNSET`] when its entry is unset or a visible parent is unknown.
    /// Unset entries whose key is fully known are appended to `blocked`.
    #[inline]
    pub fn evaluate_partial(
        &self,
        table: &FunctionTable,
        lambda: &[u32],
        values: &mut [u32],
        blocked: &mut Vec<(usize, usize)>,
    ) {
        values.fill(UNSET);
        blocked.clear();
        for &s in &self.order {
            if self.vpa[s].iter().any(|&p| values[p] == UNSET) {
                continue;
            }
            let key = self.key_index(s, values, lambda);
            let x = table.values[s][key];
            if x == UNSET {
                blocked.push((s, key));
            } else {
                values[s] = x;
            }
        }
    }

    /// Fills in every [`UNSET`] slot of a partial evaluation that has become
    /// determinable, e.g. after a hypothetical value was written to `values`.
    #[inline]
    pub fn extend_partial(&self, table: &FunctionTable, lambda: &[u32], values: &mut [u32]) {
        for &s in &self.order {
            if values[s] != UNSET || self.vpa[s].iter().any(|&p| values[p] == UNSET) {
                continue;
            }
            let x = table.values[s][self.key_index(s, values, lambda)];
            if x != UNSET {
                values[s] = x;
            }
        }
    }

    pub(crate) fn empty_table(&self) -> FunctionTable {
        FunctionTable {
            values: self.table_len.iter().map(|&n| vec![UNSET; n]).collect(),
        }
    }

    /// Dense index over the visible outcome space (declaration order, first
    /// visible most significant).
    #[inline]
    pub fn outcome_index(&self, values: &[u32]) -> usize {
        values
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&x, &k)| acc * k as usize + x as usize)
    }
}

/// Partial response tables, one dense array per visible slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTable {
    pub(crate) values: Vec<Vec<u32>>,
}

impl FunctionTable {
    pub fn get(&self, slot: usize, key: usize) -> Option<u32> {
        let x = self.values[slot][key];
        (x != UNSET).then_some(x)
    }

    pub fn set(&mut self, slot: usize, key: usize, value: u32) {
        self.values[slot][key] = value;
    }

    pub fn clear(&mut self, slot: usize, key: usize) {
        self.values[slot][key] = UNSET;
    }

    /// Assigned `(key, value)` pairs of one slot in key order.
    pub fn assigned(&self, slot: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.values[slot]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != UNSET)
            .map(|(k, &x)| (k, x))
    }

    pub fn assigned_count(&self) -> usize {
        self.values
            .iter()
            .map(|t| t.iter().filter(|&&x| x != UNSET).count())
            .sum()
    }
}

/// Latent cardinalities with optional explicit distributions; absent
/// distributions mean uniform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentSpec {
    pub cards: Vec<u32>,
    pub distributions: Option<Vec<Vec<BigRational>>>,
}

impl LatentSpec {
    pub fn uniform(cards: &[u32]) -> Self {
        Self {
            cards: cards.to_vec(),
            distributions: None,
        }
    }

    pub fn with_distributions(dists: Vec<Vec<BigRational>>) -> Result<Self, WorldsError> {
        for d in &dists {
            if d.is_empty() {
                return Err(WorldsError::InvalidLatentCardinality);
            }
            if d.iter().any(|p| p < &BigRational::zero()) {
                return Err(ProbError::NegativeProbability.into());
            }
            let total: BigRational = d.iter().sum();
            if !total.is_one() {
                return Err(ProbError::NotNormalized(crate::prob::format_rational(&total)).into());
            }
        }
        Ok(Self {
            cards: dists.iter().map(|d| d.len() as u32).collect(),
            distributions: Some(dists),
        })
    }

    pub fn is_uniform(&self) -> bool {
        match &self.distributions {
            None => true,
            Some(ds) => ds.iter().all(|d| {
                let u = BigRational::new(BigInt::one(), BigInt::from(d.len()));
                d.iter().all(|p| *p == u)
            }),
        }
    }
}

/// Result of evaluating one world, with values in visible declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldEvaluation {
    pub values: Vec<Option<u32>>,
    pub blocked: Option<(VertexId, Vec<u32>)>,
}

impl WorldEvaluation {
    pub fn is_complete(&self) -> bool {
        self.blocked.is_none()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.values.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibleWorldsDiagram {
    structure: CausalStructure,
    layout: Layout,
    table: FunctionTable,
}

impl PossibleWorldsDiagram {
    /// Diagram with an empty table.
    pub fn new(structure: CausalStructure, latent_cards: &[u32]) -> Result<Self, WorldsError> {
        let layout = Layout::new(&structure, latent_cards)?;
        let table = layout.empty_table();
        Ok(Self {
            structure,
            layout,
            table,
        })
    }

    pub(crate) fn from_parts(structure: CausalStructure, layout: Layout, table: FunctionTable) -> Self {
        Self {
            structure,
            layout,
            table,
        }
    }

    pub fn structure(&self) -> &CausalStructure {
        &self.structure
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn table(&self) -> &FunctionTable {
        &self.table
    }

    pub fn latent_cards(&self) -> &[u32] {
        &self.layout.latent_cards
    }

    pub fn variables(&self) -> Variables {
        Variables::new(&self.structure.visible_names(), &self.layout.cards)
            .expect("structure names are unique")
    }

    fn slot(&self, visible: &str) -> Result<usize, WorldsError> {
        self.layout
            .visible
            .iter()
            .position(|&v| self.structure.name(v) == visible)
            .ok_or_else(|| WorldsError::UnknownVisible(visible.to_string()))
    }

    /// Names of the key components of `visible`, in key order.
    pub fn key_names(&self, visible: &str) -> Result<Vec<String>, WorldsError> {
        let s = self.slot(visible)?;
        Ok(self.layout.vpa[s]
            .iter()
            .map(|&p| self.structure.name(self.layout.visible[p]).to_string())
            .chain(
                self.layout.lpa[s]
                    .iter()
                    .map(|&l| self.structure.name(self.layout.latents[l]).to_string()),
            )
            .collect())
    }

    pub fn set(&mut self, visible: &str, key: &[u32], value: u32) -> Result<(), WorldsError> {
        let s = self.slot(visible)?;
        let k = self.layout.key_from_tuple(s, key).ok_or_else(|| WorldsError::InvalidKey {
            vertex: visible.to_string(),
            key: key.to_vec(),
        })?;
        if value >= self.layout.cards[s] {
            return Err(WorldsError::InvalidValue {
                vertex: visible.to_string(),
                value,
            });
        }
        self.table.set(s, k, value);
        Ok(())
    }

    pub fn get(&self, visible: &str, key: &[u32]) -> Result<Option<u32>, WorldsError> {
        let s = self.slot(visible)?;
        let k = self.layout.key_from_tuple(s, key).ok_or_else(|| WorldsError::InvalidKey {
            vertex: visible.to_string(),
            key: key.to_vec(),
        })?;
        Ok(self.table.get(s, k))
    }

    /// Assigned entries of `visible` as `(key tuple, value)` in key order.
    pub fn entries(&self, visible: &str) -> Result<Vec<(Vec<u32>, u32)>, WorldsError> {
        let s = self.slot(visible)?;
        Ok(self
            .table
            .assigned(s)
            .map(|(k, x)| (self.layout.key_tuple(s, k), x))
            .collect())
    }

    pub fn evaluate_world(&self, lambda: &[u32]) -> WorldEvaluation {
        assert_eq!(lambda.len(), self.layout.latent_cards.len());
        assert!(lambda.iter().zip(&self.layout.latent_cards).all(|(x, k)| x < k));
        let mut values = vec![UNSET; self.layout.visible.len()];
        let blocked = self.layout.evaluate_into(&self.table, lambda, &mut values);
        WorldEvaluation {
            values: values.iter().map(|&x| (x != UNSET).then_some(x)).collect(),
            blocked: blocked.map(|(s, k)| (self.layout.visible[s], self.layout.key_tuple(s, k))),
        }
    }

    fn reachable_dense(&self) -> Vec<Vec<bool>> {
        let mut seen: Vec<Vec<bool>> = self.layout.table_len.iter().map(|&n| vec![false; n]).collect();
        let mut values = vec![UNSET; self.layout.visible.len()];
        for w in 0..self.layout.world_count {
            let lambda = self.layout.world_lambda(w);
            values.fill(UNSET);
            for &s in &self.layout.order {
                let key = self.layout.key_index(s, &values, &lambda);
                seen[s][key] = true;
                match self.table.get(s, key) {
                    Some(x) => values[s] = x,
                    None => break,
                }
            }
        }
        seen
    }

    /// Keys queried when evaluating every world, including the key at which a
    /// partial evaluation blocks. Everything else is superfluous.
    pub fn reachable_keys(&self) -> BTreeSet<(VertexId, Vec<u32>)> {
        let mut out = BTreeSet::new();
        for (s, keys) in self.reachable_dense().into_iter().enumerate() {
            for (k, _) in keys.into_iter().enumerate().filter(|(_, r)| *r) {
                out.insert((self.layout.visible[s], self.layout.key_tuple(s, k)));
            }
        }
        out
    }

    /// Copy with every superfluous entry cleared.
    pub fn trimmed(&self) -> Self {
        let mut table = self.table.clone();
        for (s, keys) in self.reachable_dense().into_iter().enumerate() {
            for (k, r) in keys.into_iter().enumerate() {
                if !r {
                    table.clear(s, k);
                }
            }
        }
        Self {
            structure: self.structure.clone(),
            layout: self.layout.clone(),
            table,
        }
    }

    /// Observation of every world, in world order.
    pub fn observations(&self) -> Result<Vec<Outcome>, WorldsError> {
        let mut values = vec![UNSET; self.layout.visible.len()];
        let mut out = Vec::with_capacity(self.layout.world_count);
        let mut missing = BTreeSet::new();
        for w in 0..self.layout.world_count {
            let lambda = self.layout.world_lambda(w);
            match self.layout.evaluate_into(&self.table, &lambda, &mut values) {
                None => out.push(values.clone()),
                Some(block) => {
                    missing.insert(block);
                }
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(WorldsError::IncompleteTable(
                missing
                    .into_iter()
                    .map(|(s, k)| {
                        (
                            self.structure.name(self.layout.visible[s]).to_string(),
                            self.layout.key_tuple(s, k),
                        )
                    })
                    .collect(),
            ))
        }
    }

    /// World counts per visible outcome (dense index), denominator ∏ k_ℓ.
    pub fn uniform_counts(&self) -> Result<Vec<u64>, WorldsError> {
        let size = self.variables().size().ok_or(WorldsError::TooLarge)?;
        let mut counts = vec![0u64; size];
        for obs in self.observations()? {
            counts[self.layout.outcome_index(&obs)] += 1;
        }
        Ok(counts)
    }

    pub fn simulate_uniform(&self) -> Result<Distribution, WorldsError> {
        let counts = self.uniform_counts()?;
        Ok(Distribution::from_counts(
            self.variables(),
            &counts,
            self.layout.world_count as u64,
        )?)
    }

    /// Mixture over worlds of point masses at their observations, each world
    /// weighted by the product of its latent probabilities.
    pub fn simulate(&self, latents: &LatentSpec) -> Result<Distribution, WorldsError> {
        if latents.cards != self.layout.latent_cards {
            return Err(WorldsError::LatentCountMismatch {
                expected: self.layout.latent_cards.len(),
                got: latents.cards.len(),
            });
        }
        let Some(dists) = &latents.distributions else {
            return self.simulate_uniform();
        };
        let observations = self.observations()?;
        let mut probs = std::collections::BTreeMap::<Outcome, BigRational>::new();
        for (w, obs) in observations.into_iter().enumerate() {
            let lambda = self.layout.world_lambda(w);
            let weight: BigRational = lambda
                .iter()
                .zip(dists)
                .map(|(&x, d)| d[x as usize].clone())
                .product();
            *probs.entry(obs).or_insert_with(BigRational::zero) += weight;
        }
        Ok(Distribution::new(self.variables(), probs)?)
    }

    /// Relabels latent values: the entry stored under latent components λ is
    /// moved to π(λ), so world π(λ) of the result observes what world λ did.
    pub fn apply_latent_permutation(&self, perm: &[Vec<u32>]) -> Result<Self, WorldsError> {
        let cards = &self.layout.latent_cards;
        if perm.len() != cards.len() {
            return Err(WorldsError::NotABijection);
        }
        for (p, &k) in perm.iter().zip(cards) {
            let distinct: BTreeSet<u32> = p.iter().copied().collect();
            if p.len() != k as usize || distinct.len() != p.len() || p.iter().any(|&x| x >= k) {
                return Err(WorldsError::NotABijection);
            }
        }
        let mut table = self.layout.empty_table();
        for s in 0..self.layout.visible.len() {
            let nv = self.layout.vpa[s].len();
            for (k, x) in self.table.assigned(s) {
                let mut tuple = self.layout.key_tuple(s, k);
                for (i, &l) in self.layout.lpa[s].iter().enumerate() {
                    tuple[nv + i] = perm[l][tuple[nv + i] as usize];
                }
                let moved = self.layout.key_from_tuple(s, &tuple).expect("permuted key in range");
                table.set(s, moved, x);
            }
        }
        Ok(Self {
            structure: self.structure.clone(),
            layout: self.layout.clone(),
            table,
        })
    }

    /// Orbit representative under latent relabeling: the member whose world
    /// observations, read in world order, are lexicographically least, with
    /// superfluous entries cleared. Exhaustive over all ∏ k_ℓ! relabelings.
    pub fn canonical_form(&self, orbit_cap: u64) -> Result<Self, WorldsError> {
        let orbit = self
            .layout
            .latent_cards
            .iter()
            .try_fold(1u64, |acc, &k| (1..=u64::from(k)).try_fold(acc, |a, i| a.checked_mul(i)));
        match orbit {
            Some(n) if n <= orbit_cap => {}
            _ => return Err(WorldsError::OrbitTooLarge(orbit_cap)),
        }
        let obs = self.observations()?;
        let encoded: Vec<usize> = obs.iter().map(|o| self.layout.outcome_index(o)).collect();
        let per_latent: Vec<Vec<Vec<u32>>> = self
            .layout
            .latent_cards
            .iter()
            .map(|&k| (0..k).permutations(k as usize).collect())
            .collect();
        let mut best: Option<(Vec<usize>, Vec<Vec<u32>>)> = None;
        let mut image = vec![0usize; encoded.len()];
        for perm in per_latent.iter().map(|p| p.iter()).multi_cartesian_product() {
            for (w, &e) in encoded.iter().enumerate() {
                let lambda = self.layout.world_lambda(w);
                let moved: Vec<u32> = lambda.iter().zip(&perm).map(|(&x, p)| p[x as usize]).collect();
                image[self.layout.world_index(&moved)] = e;
            }
            if best.as_ref().is_none_or(|(b, _)| image < *b) {
                best = Some((image.clone(), perm.into_iter().cloned().collect()));
            }
        }
        // A structure without latents has a single trivial relabeling.
        let perm = best.map(|(_, p)| p).unwrap_or_default();
        Ok(self.apply_latent_permutation(&perm)?.trimmed())
    }
}
