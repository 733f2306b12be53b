//! Causal structures: a DAG whose vertices are split into visible and latent
//! variables, together with finite cardinalities.
//!
//! Besides the basic queries this module carries the rewrites that bring any
//! structure into exo-simplicial form (every latent exogenous, latent children
//! sets forming the facets of a simplicial complex over the visibles) and the
//! district-based latent cardinality bounds.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("`{0}` is not a latent vertex")]
    NotLatent(String),
    #[error("`{0}` is not a visible vertex")]
    NotVisible(String),
    #[error("invalid cardinality for `{0}`: must be an integer >= 1")]
    InvalidCardinality(String),
    #[error("latent `{0}` has parents; exogenize first")]
    LatentNotExogenous(String),
    #[error("structure is not exo-simplicial")]
    NotExoSimplicial,
    #[error("cardinality bound for `{0}` overflows 64 bits")]
    BoundOverflow(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Visible,
    Latent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalStructure {
    graph: DirectedGraph,
    kinds: Vec<VertexKind>,
    cards: Vec<Option<u32>>,
    topo: Vec<VertexId>,
}

/// Incremental construction of a [`CausalStructure`] by vertex name.
#[derive(Debug, Clone, Default)]
pub struct StructureBuilder {
    vertices: Vec<(String, VertexKind, Option<u32>)>,
    edges: Vec<(String, String)>,
}

impl StructureBuilder {
    pub fn visible(mut self, name: &str, cardinality: u32) -> Self {
        self.vertices
            .push((name.to_string(), VertexKind::Visible, Some(cardinality)));
        self
    }

    pub fn latent(mut self, name: &str) -> Self {
        self.vertices
            .push((name.to_string(), VertexKind::Latent, None));
        self
    }

    pub fn latent_with_cardinality(mut self, name: &str, cardinality: u32) -> Self {
        self.vertices
            .push((name.to_string(), VertexKind::Latent, Some(cardinality)));
        self
    }

    pub fn edge(mut self, from: &str, to: &str) -> Self {
        self.edges.push((from.to_string(), to.to_string()));
        self
    }

    pub fn edges(mut self, edges: &[(&str, &str)]) -> Self {
        self.edges
            .extend(edges.iter().map(|(a, b)| (a.to_string(), b.to_string())));
        self
    }

    pub fn build(self) -> Result<CausalStructure, StructureError> {
        let names: Vec<&str> = self.vertices.iter().map(|v| v.0.as_str()).collect();
        let graph = DirectedGraph::build(&names, &self.edges)?;
        let kinds = self.vertices.iter().map(|v| v.1).collect();
        let cards = self.vertices.iter().map(|v| v.2).collect();
        CausalStructure::new(graph, kinds, cards)
    }
}

/// One latent's children set, i.e. one facet of the simplicial complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub latent: VertexId,
    pub children: BTreeSet<VertexId>,
}

/// Facets of an exo-simplicial structure, sorted by children set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialFacets {
    pub facets: Vec<Facet>,
}

/// Per-latent cardinality bound together with the sets it was derived from.
///
/// `district` is D, `conditioning` is the visible parents of D outside D,
/// `descendant_part` is D intersected with the latent's descendants and
/// `remainder` the rest of D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityBound {
    pub latent: VertexId,
    pub district: BTreeSet<VertexId>,
    pub conditioning: BTreeSet<VertexId>,
    pub descendant_part: BTreeSet<VertexId>,
    pub remainder: BTreeSet<VertexId>,
    pub bound: u64,
}

/// What [`CausalStructure::normalize`] changed, by vertex name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationLog {
    pub edges_added: Vec<(String, String)>,
    pub edges_removed: Vec<(String, String)>,
    pub latents_removed: Vec<String>,
    pub latents_added: Vec<String>,
}

impl NormalizationLog {
    pub fn is_empty(&self) -> bool {
        self.edges_added.is_empty()
            && self.edges_removed.is_empty()
            && self.latents_removed.is_empty()
            && self.latents_added.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub structure: CausalStructure,
    pub log: NormalizationLog,
}

// Mutable working copy used by the rewrites.
struct Draft {
    names: Vec<String>,
    kinds: Vec<VertexKind>,
    cards: Vec<Option<u32>>,
    edges: BTreeSet<(usize, usize)>,
}

impl Draft {
    fn from(s: &CausalStructure) -> Self {
        Self {
            names: s.graph.names().to_vec(),
            kinds: s.kinds.clone(),
            cards: s.cards.clone(),
            edges: s.graph.edges().map(|(a, b)| (a.0, b.0)).collect(),
        }
    }

    fn finish(self) -> Result<CausalStructure, StructureError> {
        let edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&(a, b)| (self.names[a].as_str(), self.names[b].as_str()))
            .collect();
        let graph = DirectedGraph::build(&self.names, &edges)?;
        CausalStructure::new(graph, self.kinds, self.cards)
    }
}

impl CausalStructure {
    pub fn builder() -> StructureBuilder {
        StructureBuilder::default()
    }

    /// `kinds` and `cards` are indexed like the vertices of `graph`. Visible
    /// cardinalities are mandatory; latent ones are optional hints.
    pub fn new(
        graph: DirectedGraph,
        kinds: Vec<VertexKind>,
        cards: Vec<Option<u32>>,
    ) -> Result<Self, StructureError> {
        assert_eq!(kinds.len(), graph.vertex_count());
        assert_eq!(cards.len(), graph.vertex_count());
        for v in graph.vertices() {
            let ok = match (kinds[v.0], cards[v.0]) {
                (VertexKind::Visible, Some(k)) | (VertexKind::Latent, Some(k)) => k >= 1,
                (VertexKind::Visible, None) => false,
                (VertexKind::Latent, None) => true,
            };
            if !ok {
                return Err(StructureError::InvalidCardinality(
                    graph.name(v).to_string(),
                ));
            }
        }
        let topo = graph.topological_order()?;
        Ok(Self {
            graph,
            kinds,
            cards,
            topo,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn name(&self, v: VertexId) -> &str {
        self.graph.name(v)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, StructureError> {
        Ok(self.graph.vertex(name)?)
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.kinds[v.0]
    }

    pub fn is_latent(&self, v: VertexId) -> bool {
        self.kinds[v.0] == VertexKind::Latent
    }

    pub fn is_visible(&self, v: VertexId) -> bool {
        self.kinds[v.0] == VertexKind::Visible
    }

    /// Declared cardinality (always present for visibles).
    pub fn cardinality(&self, v: VertexId) -> Option<u32> {
        self.cards[v.0]
    }

    pub fn visible(&self) -> Vec<VertexId> {
        self.graph.vertices().filter(|&v| self.is_visible(v)).collect()
    }

    pub fn latent(&self) -> Vec<VertexId> {
        self.graph.vertices().filter(|&v| self.is_latent(v)).collect()
    }

    pub fn visible_names(&self) -> Vec<String> {
        self.visible()
            .into_iter()
            .map(|v| self.name(v).to_string())
            .collect()
    }

    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    pub fn visible_cardinalities(&self) -> Vec<u32> {
        self.visible()
            .into_iter()
            .map(|v| self.cards[v.0].expect("visible cardinality"))
            .collect()
    }

    /// Visible parents of `v`, by index.
    pub fn vpa(&self, v: VertexId) -> Vec<VertexId> {
        self.graph
            .parents(v)
            .iter()
            .copied()
            .filter(|&p| self.is_visible(p))
            .collect()
    }

    /// Latent parents of `v`, by index.
    pub fn lpa(&self, v: VertexId) -> Vec<VertexId> {
        self.graph
            .parents(v)
            .iter()
            .copied()
            .filter(|&p| self.is_latent(p))
            .collect()
    }

    fn require_latent(&self, v: VertexId) -> Result<(), StructureError> {
        if self.is_latent(v) {
            Ok(())
        } else {
            Err(StructureError::NotLatent(self.name(v).to_string()))
        }
    }

    /// Rewires every parent of `latent` directly into each of its children and
    /// drops the edges into `latent`. Identity when `latent` is exogenous.
    pub fn exogenize(&self, latent: VertexId) -> Result<CausalStructure, StructureError> {
        self.require_latent(latent)?;
        if self.graph.parents(latent).is_empty() {
            return Ok(self.clone());
        }
        let mut draft = Draft::from(self);
        exogenize_in(&mut draft, latent.0);
        draft.finish()
    }

    /// Deletes childless latents and every latent whose children are contained
    /// in another latent's children; of two latents with identical children
    /// the one with the larger index goes.
    pub fn simplicial_reduce(&self) -> Result<CausalStructure, StructureError> {
        let latents = self.latent();
        for &l in &latents {
            if !self.graph.parents(l).is_empty() {
                return Err(StructureError::LatentNotExogenous(self.name(l).to_string()));
            }
        }
        let children: Vec<BTreeSet<VertexId>> = latents
            .iter()
            .map(|&l| self.graph.children(l).iter().copied().collect())
            .collect();
        let mut keep: BTreeSet<VertexId> = self.visible().into_iter().collect();
        for (i, &l) in latents.iter().enumerate() {
            let mine = &children[i];
            if mine.is_empty() {
                continue;
            }
            let dominated = children.iter().enumerate().any(|(j, other)| {
                j != i
                    && mine.is_subset(other)
                    && (mine.len() < other.len() || j < i)
            });
            if !dominated {
                keep.insert(l);
            }
        }
        if keep.len() == self.graph.vertex_count() {
            return Ok(self.clone());
        }
        let graph = self.graph.induced_subgraph(&keep);
        let kinds = keep.iter().map(|v| self.kinds[v.0]).collect();
        let cards = keep.iter().map(|v| self.cards[v.0]).collect();
        CausalStructure::new(graph, kinds, cards)
    }

    /// Exogenizes every latent (in topological order), applies the simplicial
    /// reduction and gives each visible vertex left without a latent parent a
    /// fresh private latent.
    pub fn normalize(&self) -> Result<Normalized, StructureError> {
        let mut draft = Draft::from(self);
        for &v in &self.topo {
            if self.is_latent(v) {
                exogenize_in(&mut draft, v.0);
            }
        }
        let reduced = draft.finish()?.simplicial_reduce()?;

        let mut draft = Draft::from(&reduced);
        let mut taken: HashSet<String> = draft.names.iter().cloned().collect();
        let mut latents_added = Vec::new();
        for v in reduced.visible() {
            if !reduced.lpa(v).is_empty() {
                continue;
            }
            let mut name = format!("e_{}", reduced.name(v));
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            draft.names.push(name.clone());
            draft.kinds.push(VertexKind::Latent);
            draft.cards.push(None);
            draft.edges.insert((draft.names.len() - 1, v.0));
            latents_added.push(name);
        }
        let structure = if latents_added.is_empty() {
            reduced
        } else {
            draft.finish()?
        };

        let named_edges = |s: &CausalStructure| -> BTreeSet<(String, String)> {
            s.graph
                .edges()
                .map(|(a, b)| (s.name(a).to_string(), s.name(b).to_string()))
                .collect()
        };
        let before = named_edges(self);
        let after = named_edges(&structure);
        let survivors: HashSet<&str> = structure.graph.names().iter().map(String::as_str).collect();
        let log = NormalizationLog {
            edges_added: after.difference(&before).cloned().collect(),
            edges_removed: before.difference(&after).cloned().collect(),
            latents_removed: self
                .latent()
                .into_iter()
                .map(|l| self.name(l))
                .filter(|n| !survivors.contains(n))
                .map(str::to_string)
                .collect(),
            latents_added,
        };
        Ok(Normalized { structure, log })
    }

    pub fn is_exo_simplicial(&self) -> bool {
        self.facets().is_ok()
    }

    pub fn facets(&self) -> Result<SimplicialFacets, StructureError> {
        let mut facets = Vec::new();
        for l in self.latent() {
            if !self.graph.parents(l).is_empty() || self.graph.children(l).is_empty() {
                return Err(StructureError::NotExoSimplicial);
            }
            facets.push(Facet {
                latent: l,
                children: self.graph.children(l).iter().copied().collect(),
            });
        }
        for (i, a) in facets.iter().enumerate() {
            for b in &facets[i + 1..] {
                if a.children.is_subset(&b.children) || b.children.is_subset(&a.children) {
                    return Err(StructureError::NotExoSimplicial);
                }
            }
        }
        let covered: BTreeSet<VertexId> = facets
            .iter()
            .flat_map(|f| f.children.iter().copied())
            .collect();
        if self.visible().iter().any(|v| !covered.contains(v)) {
            return Err(StructureError::NotExoSimplicial);
        }
        facets.sort_by(|a, b| a.children.cmp(&b.children).then(a.latent.cmp(&b.latent)));
        Ok(SimplicialFacets { facets })
    }

    /// Visible vertices joined to `latent` by a path alternating between
    /// latents and their visible children.
    pub fn district(&self, latent: VertexId) -> Result<BTreeSet<VertexId>, StructureError> {
        self.require_latent(latent)?;
        self.facets()?;
        let mut district = BTreeSet::new();
        let mut seen_latents = BTreeSet::from([latent]);
        let mut frontier = vec![latent];
        while let Some(l) = frontier.pop() {
            for &v in self.graph.children(l) {
                if !district.insert(v) {
                    continue;
                }
                for p in self.lpa(v) {
                    if seen_latents.insert(p) {
                        frontier.push(p);
                    }
                }
            }
        }
        Ok(district)
    }

    /// Bound = |Ω_cond| · (|Ω_D| − |Ω_B|), clamped to at least 1, where the
    /// affine dimension of a table of conditionals over D given `cond` is
    /// counted as |Ω_cond| · (|Ω_D| − 1).
    pub fn cardinality_bound(&self, latent: VertexId) -> Result<CardinalityBound, StructureError> {
        let district = self.district(latent)?;
        let conditioning: BTreeSet<VertexId> = district
            .iter()
            .flat_map(|&v| self.vpa(v))
            .filter(|v| !district.contains(v))
            .collect();
        let descendants = self.graph.descendants(&BTreeSet::from([latent]));
        let descendant_part: BTreeSet<VertexId> =
            district.intersection(&descendants).copied().collect();
        let remainder: BTreeSet<VertexId> =
            district.difference(&descendant_part).copied().collect();

        let overflow = || StructureError::BoundOverflow(self.name(latent).to_string());
        let space = |set: &BTreeSet<VertexId>| -> Result<u64, StructureError> {
            set.iter().try_fold(1u64, |acc, &v| {
                acc.checked_mul(u64::from(self.cards[v.0].expect("visible cardinality")))
                    .ok_or_else(overflow)
            })
        };
        let spread = space(&district)? - space(&remainder)?;
        let bound = space(&conditioning)?
            .checked_mul(spread)
            .ok_or_else(overflow)?
            .max(1);
        Ok(CardinalityBound {
            latent,
            district,
            conditioning,
            descendant_part,
            remainder,
            bound,
        })
    }

    /// Default latent cardinalities: user hints where given, bounds otherwise.
    pub fn default_latent_cardinalities(&self) -> Result<BTreeMap<VertexId, u64>, StructureError> {
        self.latent()
            .into_iter()
            .map(|l| {
                let k = match self.cards[l.0] {
                    Some(k) => u64::from(k),
                    None => self.cardinality_bound(l)?.bound,
                };
                Ok((l, k))
            })
            .collect()
    }
}

fn exogenize_in(draft: &mut Draft, latent: usize) {
    let parents: Vec<usize> = draft
        .edges
        .iter()
        .filter(|e| e.1 == latent)
        .map(|e| e.0)
        .collect();
    if parents.is_empty() {
        return;
    }
    let children: Vec<usize> = draft
        .edges
        .iter()
        .filter(|e| e.0 == latent)
        .map(|e| e.1)
        .collect();
    for &p in &parents {
        draft.edges.remove(&(p, latent));
        for &c in &children {
            draft.edges.insert((p, c));
        }
    }
}
