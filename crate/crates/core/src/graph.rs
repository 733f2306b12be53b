//! Directed graphs with dense vertex indexing.
//!
//! Vertices are identified by name at the boundary and by a dense
//! [`VertexId`] everywhere else. Indices follow declaration order, and every
//! query that has to break a tie does so by that index, which keeps all
//! downstream output reproducible.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge endpoint `{0}` is not a declared vertex")]
    UnknownEndpoint(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph contains a directed cycle")]
    CyclicGraph,
}

/// Dense index of a vertex inside one [`DirectedGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    names: Vec<String>,
    lookup: HashMap<String, VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
    parents: Vec<Vec<VertexId>>,
    children: Vec<Vec<VertexId>>,
}

impl DirectedGraph {
    /// Builds a graph from vertex names and `(from, to)` name pairs.
    ///
    /// Self-loops are accepted here; [`DirectedGraph::is_acyclic`] rejects them.
    pub fn build<S, T>(vertices: &[S], edges: &[(T, T)]) -> Result<Self, GraphError>
    where
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut lookup = HashMap::with_capacity(vertices.len());
        let mut names = Vec::with_capacity(vertices.len());
        for (i, name) in vertices.iter().enumerate() {
            let name = name.as_ref();
            if lookup.insert(name.to_string(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateVertex(name.to_string()));
            }
            names.push(name.to_string());
        }
        let mut ids = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            let resolve = |n: &str| {
                lookup
                    .get(n)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownEndpoint(n.to_string()))
            };
            ids.push((resolve(from.as_ref())?, resolve(to.as_ref())?));
        }
        Self::from_ids(names, lookup, ids)
    }

    fn from_ids(
        names: Vec<String>,
        lookup: HashMap<String, VertexId>,
        edge_list: Vec<(VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let n = names.len();
        let mut edges = BTreeSet::new();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (from, to) in edge_list {
            if !edges.insert((from, to)) {
                return Err(GraphError::DuplicateEdge(
                    names[from.0].clone(),
                    names[to.0].clone(),
                ));
            }
            parents[to.0].push(from);
            children[from.0].push(to);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            names,
            lookup,
            edges,
            parents,
            children,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    /// Edges in `(from, to)` index order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        &self.parents[v.0]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.0]
    }

    /// Union of the parents of every member of `set`.
    pub fn parents_of_set(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        set.iter()
            .flat_map(|&v| self.parents(v).iter().copied())
            .collect()
    }

    pub fn children_of_set(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        set.iter()
            .flat_map(|&v| self.children(v).iter().copied())
            .collect()
    }

    /// Vertices with a nontrivial directed path into some member of `set`.
    pub fn ancestors(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        self.reach(set, |v| self.parents(v))
    }

    /// Vertices with a nontrivial directed path from some member of `set`.
    pub fn descendants(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        self.reach(set, |v| self.children(v))
    }

    fn reach<'a, F>(&'a self, set: &BTreeSet<VertexId>, step: F) -> BTreeSet<VertexId>
    where
        F: Fn(VertexId) -> &'a [VertexId],
    {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VertexId> = set.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for &next in step(v) {
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen
    }

    /// Subgraph on `keep` with every edge of `self` joining two kept vertices.
    /// Kept vertices retain their relative declaration order.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> DirectedGraph {
        let mut remap = vec![None; self.names.len()];
        let mut names = Vec::with_capacity(keep.len());
        let mut lookup = HashMap::with_capacity(keep.len());
        for &v in keep {
            remap[v.0] = Some(VertexId(names.len()));
            lookup.insert(self.names[v.0].clone(), VertexId(names.len()));
            names.push(self.names[v.0].clone());
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(a, b)| Some((remap[a.0]?, remap[b.0]?)))
            .collect();
        Self::from_ids(names, lookup, edges).expect("subgraph of a valid graph is valid")
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// Kahn's algorithm, always emitting the ready vertex of lowest index.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, GraphError> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<VertexId>> = self
            .vertices()
            .filter(|v| indegree[v.0] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.names.len());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &c in self.children(v) {
                indegree[c.0] -= 1;
                if indegree[c.0] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        if order.len() == self.names.len() {
            Ok(order)
        } else {
            Err(GraphError::CyclicGraph)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> DirectedGraph {
        DirectedGraph::build(&["mu", "a", "b"], &[("mu", "a"), ("a", "b")]).unwrap()
    }

    fn set(ids: &[usize]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn single_vertex_graph() {
        let g = DirectedGraph::build::<_, &str>(&["a"], &[]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn builder_errors() {
        assert_eq!(
            DirectedGraph::build::<_, &str>(&["a", "a"], &[]),
            Err(GraphError::DuplicateVertex("a".into()))
        );
        assert_eq!(
            DirectedGraph::build(&["a"], &[("a", "z")]),
            Err(GraphError::UnknownEndpoint("z".into()))
        );
        assert_eq!(
            DirectedGraph::build(&["a", "b"], &[("a", "b"), ("a", "b")]),
            Err(GraphError::DuplicateEdge("a".into(), "b".into()))
        );
        assert!(chain().vertex("nope").is_err());
    }

    #[test]
    fn self_loop_is_accepted_then_rejected_as_cycle() {
        let g = DirectedGraph::build(&["a"], &[("a", "a")]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(!g.is_acyclic());
        assert_eq!(g.topological_order(), Err(GraphError::CyclicGraph));
    }

    #[test]
    fn chain_queries() {
        let g = chain();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let b = g.vertex("b").unwrap();
        assert_eq!(g.ancestors(&[b].into()), set(&[0, 1]));
        assert!(g.ancestors(&BTreeSet::new()).is_empty());
        assert!(g.parents(VertexId(0)).is_empty());
        assert_eq!(g.descendants(&set(&[0])), set(&[1, 2]));
    }

    #[test]
    fn induced_subgraph_drops_cut_edges() {
        let g = chain();
        let sub = g.induced_subgraph(&set(&[0, 2]));
        assert_eq!(sub.vertex_count(), 2);
        assert_eq!(sub.edge_count(), 0);
        assert_eq!(sub.names(), &["mu".to_string(), "b".to_string()]);
        let all: BTreeSet<_> = g.vertices().collect();
        assert_eq!(g.induced_subgraph(&all), g);
    }

    #[test]
    fn cyclic_and_acyclic_graphs() {
        let cyclic =
            DirectedGraph::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        assert!(!cyclic.is_acyclic());
        let dag =
            DirectedGraph::build(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]).unwrap();
        assert!(dag.is_acyclic());
    }

    #[test]
    fn topological_ties_follow_declaration_order() {
        let g = DirectedGraph::build(&["z", "y", "x"], &[("x", "y")]).unwrap();
        let order: Vec<_> = g
            .topological_order()
            .unwrap()
            .into_iter()
            .map(|v| g.name(v).to_string())
            .collect();
        assert_eq!(order, ["z", "x", "y"]);
    }
}
