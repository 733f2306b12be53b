//! Naive reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use pworlds::prob::{Distribution, Support, Variables};
use pworlds::{CausalStructure, VertexKind};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn variables(g: &CausalStructure) -> Variables {
    Variables::new(&g.visible_names(), &g.visible_cardinalities()).unwrap()
}

pub fn support(g: &CausalStructure, events: &[Vec<u32>]) -> Support {
    Support::new(variables(g), events.iter().cloned()).unwrap()
}

pub fn distribution(g: &CausalStructure, entries: &[(Vec<u32>, BigRational)]) -> Distribution {
    Distribution::new(variables(g), entries.iter().cloned()).unwrap()
}

/// PR box over `(x, a, b, y)`: `a xor b = x and y`, everything else uniform.
pub fn pr_box_events() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                out.push(vec![x, a, a ^ (x & y), y]);
            }
        }
    }
    out
}

pub fn pr_box(g: &CausalStructure) -> Distribution {
    let entries: Vec<_> = pr_box_events().into_iter().map(|e| (e, q(1, 8))).collect();
    distribution(g, &entries)
}

/// A structure read straight off the graph: visibles in declaration order,
/// parents split by kind.
pub struct Model {
    pub cards: Vec<u32>,
    pub order: Vec<usize>,
    pub vis_parents: Vec<Vec<usize>>,
    pub lat_parents: Vec<Vec<usize>>,
    pub latents: usize,
}

impl Model {
    pub fn new(g: &CausalStructure) -> Self {
        let graph = g.graph();
        let mut vis_index = BTreeMap::new();
        let mut lat_index = BTreeMap::new();
        for v in graph.vertices() {
            match g.kind(v) {
                VertexKind::Visible => {
                    let i = vis_index.len();
                    vis_index.insert(v, i);
                }
                VertexKind::Latent => {
                    let i = lat_index.len();
                    lat_index.insert(v, i);
                }
            }
        }
        let mut cards = Vec::new();
        let mut vis_parents = Vec::new();
        let mut lat_parents = Vec::new();
        for &v in vis_index.keys() {
            cards.push(g.cardinality(v).unwrap());
            let ps = graph.parents(v);
            let mut vp: Vec<usize> = ps.iter().filter_map(|p| vis_index.get(p).copied()).collect();
            let mut lp: Vec<usize> = ps.iter().filter_map(|p| lat_index.get(p).copied()).collect();
            vp.sort_unstable();
            lp.sort_unstable();
            vis_parents.push(vp);
            lat_parents.push(lp);
        }
        let n = cards.len();
        let mut order = Vec::new();
        let mut placed = vec![false; n];
        while order.len() < n {
            let v = (0..n)
                .find(|&v| !placed[v] && vis_parents[v].iter().all(|&p| placed[p]))
                .expect("acyclic");
            placed[v] = true;
            order.push(v);
        }
        Self {
            cards,
            order,
            vis_parents,
            lat_parents,
            latents: lat_index.len(),
        }
    }

    fn key(&self, v: usize, vals: &[u32], lambda: &[u32]) -> Vec<u32> {
        self.vis_parents[v]
            .iter()
            .map(|&p| vals[p])
            .chain(self.lat_parents[v].iter().map(|&l| lambda[l]))
            .collect()
    }

    pub fn worlds(&self, k: &[u32]) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &c in k {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..c).map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    pub fn outcome_index(&self, vals: &[u32]) -> usize {
        vals.iter().zip(&self.cards).fold(0, |acc, (&x, &c)| acc * c as usize + x as usize)
    }

    pub fn outcome_space(&self) -> usize {
        self.cards.iter().map(|&c| c as usize).product()
    }
}

/// Walks every assignment of the table entries that some world actually
/// reads, world by world. `accept(vals, fixed, world)` prunes partial worlds;
/// `leaf(observations)` sees each full assignment and returns true to stop.
struct Walk<'a, A, L> {
    m: &'a Model,
    worlds: Vec<Vec<u32>>,
    tables: Vec<HashMap<Vec<u32>, u32>>,
    obs: Vec<Vec<u32>>,
    accept: A,
    leaf: L,
}

impl<A, L> Walk<'_, A, L>
where
    A: FnMut(&[u32], &[usize], usize) -> bool,
    L: FnMut(&[Vec<u32>]) -> bool,
{
    fn world(&mut self, w: usize) -> bool {
        if w == self.worlds.len() {
            return (self.leaf)(&self.obs);
        }
        let mut vals = vec![u32::MAX; self.m.cards.len()];
        self.visit(w, 0, &mut vals)
    }

    fn visit(&mut self, w: usize, pos: usize, vals: &mut Vec<u32>) -> bool {
        let m = self.m;
        if !(self.accept)(vals, &m.order[..pos], w) {
            return false;
        }
        if pos == m.order.len() {
            self.obs.push(vals.clone());
            let stop = self.world(w + 1);
            self.obs.pop();
            return stop;
        }
        let v = m.order[pos];
        let key = m.key(v, vals, &self.worlds[w]);
        if let Some(&x) = self.tables[v].get(&key) {
            vals[v] = x;
            let stop = self.visit(w, pos + 1, vals);
            vals[v] = u32::MAX;
            return stop;
        }
        for x in 0..m.cards[v] {
            self.tables[v].insert(key.clone(), x);
            vals[v] = x;
            if self.visit(w, pos + 1, vals) {
                return true;
            }
        }
        vals[v] = u32::MAX;
        self.tables[v].remove(&key);
        false
    }
}

/// Brute-force possibilistic check: is there a set of function tables at
/// uniform latent cardinality `k` whose worlds observe exactly `events`?
/// Exponential; only usable for a handful of worlds.
pub fn oracle_compatible(m: &Model, events: &BTreeSet<Vec<u32>>, k: u32) -> bool {
    let events: Vec<&Vec<u32>> = events.iter().collect();
    let worlds = m.worlds(&vec![k; m.latents]);
    let mut walk = Walk {
        m,
        worlds,
        tables: vec![HashMap::new(); m.cards.len()],
        obs: Vec::new(),
        accept: |vals: &[u32], fixed: &[usize], _: usize| {
            events.iter().any(|e| fixed.iter().all(|&v| e[v] == vals[v]))
        },
        leaf: |obs: &[Vec<u32>]| {
            let seen: BTreeSet<&Vec<u32>> = obs.iter().collect();
            seen.len() == events.len()
        },
    };
    walk.world(0)
}

/// The same question at `k = |events|`, with world `(i, .., i)` required to
/// observe the `i`-th event. Any model can be rebuilt into this shape by
/// giving every latent one value per witnessing world, so the answer is the
/// same; the diagonal worlds are walked first.
pub fn oracle_compatible_seeded(m: &Model, events: &BTreeSet<Vec<u32>>) -> bool {
    let events: Vec<&Vec<u32>> = events.iter().collect();
    let k = events.len() as u32;
    let mut worlds: Vec<Vec<u32>> = (0..k).map(|i| vec![i; m.latents]).collect();
    worlds.extend(
        m.worlds(&vec![k; m.latents])
            .into_iter()
            .filter(|w| w.windows(2).any(|p| p[0] != p[1])),
    );
    let diagonal = k as usize;
    let mut walk = Walk {
        m,
        worlds,
        tables: vec![HashMap::new(); m.cards.len()],
        obs: Vec::new(),
        accept: |vals: &[u32], fixed: &[usize], w: usize| {
            if w < diagonal {
                fixed.iter().all(|&v| events[w][v] == vals[v])
            } else {
                events.iter().any(|e| fixed.iter().all(|&v| e[v] == vals[v]))
            }
        },
        leaf: |_: &[Vec<u32>]| true,
    };
    walk.world(0)
}

/// Every world-count vector reachable at latent cardinalities `k`, indexed
/// by the dense outcome index.
pub fn oracle_uniform_counts(m: &Model, k: &[u32]) -> BTreeSet<Vec<u32>> {
    let mut found = BTreeSet::new();
    let size = m.outcome_space();
    let mut walk = Walk {
        m,
        worlds: m.worlds(k),
        tables: vec![HashMap::new(); m.cards.len()],
        obs: Vec::new(),
        accept: |_: &[u32], _: &[usize], _: usize| true,
        leaf: |obs: &[Vec<u32>]| {
            let mut counts = vec![0u32; size];
            for o in obs {
                counts[m.outcome_index(o)] += 1;
            }
            found.insert(counts);
            false
        },
    };
    walk.world(0);
    found
}

/// All labeled DAGs on `n` vertices, as edge lists.
pub fn labeled_dags(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(n, &edges) {
            out.push(edges);
        }
    }
    out
}

fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut removed = vec![false; n];
    for _ in 0..n {
        match (0..n).find(|&v| !removed[v] && !edges.iter().any(|&(a, b)| b == v && !removed[a])) {
            Some(v) => removed[v] = true,
            None => return false,
        }
    }
    true
}

/// Covers of `0..n` by at most `max` pairwise non-nested nonempty sets.
pub fn facet_covers(n: usize, max: usize) -> Vec<Vec<Vec<usize>>> {
    let subsets: Vec<u32> = (1..(1u32 << n)).collect();
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    let mut choose = |picked: &[u32]| {
        let nested = picked
            .iter()
            .enumerate()
            .any(|(i, &a)| picked.iter().enumerate().any(|(j, &b)| i != j && a & b == a));
        let union = picked.iter().fold(0, |acc, &s| acc | s);
        if !nested && union == full {
            out.push(
                picked
                    .iter()
                    .map(|&s| (0..n).filter(|&v| s >> v & 1 == 1).collect())
                    .collect(),
            );
        }
    };
    for (i, &a) in subsets.iter().enumerate() {
        choose(&[a]);
        if max >= 2 {
            for &b in &subsets[i + 1..] {
                choose(&[a, b]);
            }
        }
    }
    out
}

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

pub fn small_structure(n: usize, edges: &[(usize, usize)], facets: &[Vec<usize>], card: u32) -> CausalStructure {
    let mut b = CausalStructure::builder();
    for name in &NAMES[..n] {
        b = b.visible(name, card);
    }
    let latent_names: Vec<String> = (0..facets.len()).map(|i| format!("l{i}")).collect();
    for name in &latent_names {
        b = b.latent(name);
    }
    for &(i, j) in edges {
        b = b.edge(NAMES[i], NAMES[j]);
    }
    for (name, f) in latent_names.iter().zip(facets) {
        for &v in f {
            b = b.edge(name, NAMES[v]);
        }
    }
    b.build().unwrap()
}

/// Every exo-simplicial structure with at most three binary visibles and at
/// most two latents, over labeled DAGs.
pub fn small_structures() -> Vec<CausalStructure> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for edges in labeled_dags(n) {
            for facets in facet_covers(n, 2) {
                out.push(small_structure(n, &edges, &facets, 2));
            }
        }
    }
    out
}

/// Nonempty subsets of the outcome space of `g`, by bitmask.
pub fn all_supports(g: &CausalStructure) -> Vec<BTreeSet<Vec<u32>>> {
    let vars = variables(g);
    let outcomes: Vec<Vec<u32>> = vars.outcomes().collect();
    (1u64..(1 << outcomes.len()))
        .map(|mask| {
            outcomes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, o)| o.clone())
                .collect()
        })
        .collect()
}

/// L1 distance computed entry by entry over the full outcome space.
pub fn l1_oracle(p: &Distribution, r: &Distribution) -> BigRational {
    p.variables()
        .outcomes()
        .map(|o| {
            let d = p.probability(&o) - r.probability(&o);
            if d < BigRational::from_integer(0.into()) {
                -d
            } else {
                d
            }
        })
        .sum()
}

/// A random structure on up to `max_visible` visibles of cardinality `card`
/// and up to `max_latent` latents. Latents may have visible parents, so the
/// result is not necessarily normalized.
pub fn random_structure(
    rng: &mut impl rand::Rng,
    max_visible: usize,
    max_latent: usize,
    card: u32,
) -> CausalStructure {
    let n = rng.random_range(1..=max_visible);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut b = CausalStructure::builder();
    for name in &NAMES[..n] {
        b = b.visible(name, card);
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.4) {
                b = b.edge(NAMES[order[i]], NAMES[order[j]]);
            }
        }
    }
    for l in 0..rng.random_range(0..=max_latent) {
        let name = format!("l{l}");
        b = b.latent(&name);
        for (v, vname) in NAMES[..n].iter().enumerate() {
            if rng.random_bool(0.5) {
                b = b.edge(&name, vname);
            } else if rng.random_bool(0.1) && order[0] == v {
                b = b.edge(vname, &name);
            }
        }
    }
    b.build().unwrap()
}

/// A random nonempty support over the visibles of `g` with at most `max`
/// events.
pub fn random_support(rng: &mut impl rand::Rng, g: &CausalStructure, max: usize) -> BTreeSet<Vec<u32>> {
    let outcomes: Vec<Vec<u32>> = variables(g).outcomes().collect();
    let size = rng.random_range(1..=max.min(outcomes.len()));
    let mut out = BTreeSet::new();
    while out.len() < size {
        out.insert(outcomes[rng.random_range(0..outcomes.len())].clone());
    }
    out
}
