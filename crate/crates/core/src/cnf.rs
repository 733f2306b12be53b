//! Boolean encoding of the support-decision problem, DIMACS I/O and a small
//! complete DPLL solver used to cross-check the dedicated search.
//!
//! Variables come in two blocks. `O[v@λ]` is true iff visible `v` takes
//! value 1 in world λ (worlds lexicographic, visibles in topological order
//! within a world). `F[v:key]` is the response-table entry of `v` at `key`
//! (visibles topological, keys ascending). Every visible must be binary.

use std::fmt::Write as _;

use itertools::Itertools;
use thiserror::Error;

use crate::possibilistic::{align_support, PossibilisticError};
use crate::prob::Support;
use crate::structure::CausalStructure;
use crate::worlds::Layout;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfDocument {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
    /// Meaning of variable `i + 1`.
    pub legend: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Value of each variable, index 0 for variable 1.
    Sat(Vec<bool>),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, Self::Sat(_))
    }
}

pub fn export_cnf(structure: &CausalStructure, support: &Support) -> Result<CnfDocument, PossibilisticError> {
    let normal = structure.normalize()?.structure;
    for v in normal.visible() {
        let k = normal.cardinality(v).expect("visible cardinality");
        if k != 2 {
            return Err(PossibilisticError::NonBooleanVisible(normal.name(v).to_string(), k));
        }
    }
    let support = align_support(&normal, support)?;
    let events: Vec<Vec<u32>> = support.events().iter().cloned().collect();
    let w = events.len() as u32;
    let latents = normal.latent().len();
    let layout = Layout::new(&normal, &vec![w; latents])?;
    let nv = layout.visible_count();
    let order = layout.evaluation_order().to_vec();
    let mut tpos = vec![0; nv];
    for (i, &s) in order.iter().enumerate() {
        tpos[s] = i;
    }
    let names: Vec<&str> = layout.visible.iter().map(|&v| normal.name(v)).collect();

    let o_var = |world: usize, slot: usize| (world * nv + tpos[slot] + 1) as i64;
    let f_base = layout.world_count() * nv;
    let mut f_offset = vec![0; nv];
    let mut next = f_base;
    for &s in &order {
        f_offset[s] = next;
        next += layout.table_len(s);
    }
    let f_var = |slot: usize, key: usize| (f_offset[slot] + key + 1) as i64;
    let num_vars = next;

    let mut legend = Vec::with_capacity(num_vars);
    for world in 0..layout.world_count() {
        let lambda = layout.world_lambda(world).iter().join(",");
        for &s in &order {
            legend.push(format!("O[{}@{}]", names[s], lambda));
        }
    }
    for &s in &order {
        for key in 0..layout.table_len(s) {
            legend.push(format!("F[{}:{}]", names[s], layout.key_tuple(s, key).iter().join(",")));
        }
    }

    // Literal that holds iff the boolean variable differs from `value`.
    let differs = |var: i64, value: u32| if value == 1 { -var } else { var };

    let mut clauses = Vec::new();
    let mut values = vec![0u32; nv];
    for world in 0..layout.world_count() {
        let lambda = layout.world_lambda(world);
        for &s in &order {
            let parents = &layout.vpa[s];
            for assignment in 0..1usize << parents.len() {
                for (i, &p) in parents.iter().enumerate() {
                    values[p] = (assignment >> (parents.len() - 1 - i) & 1) as u32;
                }
                let guard: Vec<i64> = parents.iter().map(|&p| differs(o_var(world, p), values[p])).collect();
                let f = f_var(s, layout.key_index(s, &values, &lambda));
                let o = o_var(world, s);
                clauses.push(guard.iter().copied().chain([-o, f]).collect());
                clauses.push(guard.iter().copied().chain([o, -f]).collect());
            }
        }
    }
    for (i, e) in events.iter().enumerate() {
        let world = layout.world_index(&vec![i as u32; latents]);
        for &s in &order {
            clauses.push(vec![-differs(o_var(world, s), e[s])]);
        }
    }
    let outside: Vec<Vec<u32>> = (0..1usize << nv)
        .map(|x| (0..nv).map(|s| (x >> (nv - 1 - s) & 1) as u32).collect())
        .filter(|x: &Vec<u32>| !support.contains(x))
        .collect();
    for world in 0..layout.world_count() {
        for x in &outside {
            clauses.push(order.iter().map(|&s| differs(o_var(world, s), x[s])).collect());
        }
    }
    Ok(CnfDocument {
        num_vars,
        clauses,
        legend,
    })
}

impl CnfDocument {
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (i, meaning) in self.legend.iter().enumerate() {
            let _ = writeln!(out, "c {} {}", i + 1, meaning);
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads DIMACS. Comment lines of the form `c <var> <meaning>` are taken
    /// as legend entries; other comments are ignored.
    pub fn parse_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut header: Option<(usize, usize)> = None;
        let mut legend = Vec::new();
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let err = |msg: &str| CnfError::Parse(n + 1, msg.to_string());
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                if let Some((num, meaning)) = rest.trim().split_once(' ') {
                    if num.parse::<usize>() == Ok(legend.len() + 1) {
                        legend.push(meaning.to_string());
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, c] => {
                        let v = v.parse().map_err(|_| err("bad variable count"))?;
                        let c = c.parse().map_err(|_| err("bad clause count"))?;
                        header = Some((v, c));
                    }
                    _ => return Err(err("malformed header")),
                }
                continue;
            }
            let Some((nvars, _)) = header else {
                return Err(err("clause before header"));
            };
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| err("bad literal"))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > nvars {
                    return Err(err("literal out of range"));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((num_vars, nclauses)) = header else {
            return Err(CnfError::Parse(0, "missing header".into()));
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != nclauses {
            return Err(CnfError::Parse(0, format!("expected {nclauses} clauses, found {}", clauses.len())));
        }
        Ok(Self {
            num_vars,
            clauses,
            legend,
        })
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// Complete DPLL with two watched literals and chronological backtracking.
/// Decisions take the unassigned variable with the most occurrences, trying
/// `true` first.
pub fn solve_cnf(doc: &CnfDocument) -> SatResult {
    Dpll::new(doc).map_or(SatResult::Unsat, |mut s| s.run())
}

const UNASSIGNED: i8 = 0;

struct Dpll {
    clauses: Vec<Vec<usize>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<usize>,
    qhead: usize,
    order: Vec<usize>,
}

fn encode(lit: i64) -> usize {
    let v = lit.unsigned_abs() as usize - 1;
    2 * v + usize::from(lit < 0)
}

impl Dpll {
    /// `None` when the formula is refuted before any decision.
    fn new(doc: &CnfDocument) -> Option<Self> {
        let n = doc.num_vars;
        let mut s = Self {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            trail: Vec::new(),
            qhead: 0,
            order: Vec::new(),
        };
        let mut occurrences = vec![0usize; n];
        let mut units = Vec::new();
        for clause in &doc.clauses {
            let mut lits: Vec<usize> = clause.iter().map(|&l| encode(l)).collect();
            lits.sort_unstable();
            lits.dedup();
            if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
                continue;
            }
            for &l in &lits {
                occurrences[l / 2] += 1;
            }
            match lits.len() {
                0 => return None,
                1 => units.push(lits[0]),
                _ => {
                    let id = s.clauses.len();
                    s.watches[lits[0]].push(id);
                    s.watches[lits[1]].push(id);
                    s.clauses.push(lits);
                }
            }
        }
        s.order = (0..n).collect();
        s.order.sort_by_key(|&v| std::cmp::Reverse(occurrences[v]));
        for u in units {
            match s.lit_value(u) {
                1 => {}
                -1 => return None,
                _ => s.assign(u),
            }
        }
        Some(s)
    }

    fn lit_value(&self, lit: usize) -> i8 {
        let v = self.value[lit / 2];
        if lit & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, lit: usize) {
        self.value[lit / 2] = if lit & 1 == 1 { -1 } else { 1 };
        self.trail.push(lit);
    }

    fn undo_to(&mut self, len: usize) {
        for lit in self.trail.drain(len..) {
            self.value[lit / 2] = UNASSIGNED;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let mut watching = std::mem::take(&mut self.watches[falsified]);
            let mut i = 0;
            let mut ok = true;
            while i < watching.len() {
                let id = watching[i];
                let clause = &mut self.clauses[id];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_value = {
                    let v = self.value[other / 2];
                    if other & 1 == 1 { -v } else { v }
                };
                if other_value == 1 {
                    i += 1;
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    let v = self.value[l / 2];
                    (if l & 1 == 1 { -v } else { v }) != -1
                });
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let new_watch = clause[1];
                    self.watches[new_watch].push(id);
                    watching.swap_remove(i);
                    continue;
                }
                if other_value == -1 {
                    ok = false;
                    break;
                }
                self.assign(other);
                i += 1;
            }
            self.watches[falsified].extend(watching);
            if !ok {
                return false;
            }
        }
        true
    }

    fn run(&mut self) -> SatResult {
        // (trail length before the decision, decision literal, already flipped)
        let mut decisions: Vec<(usize, usize, bool)> = Vec::new();
        let mut cursor = 0;
        loop {
            if !self.propagate() {
                loop {
                    let Some((len, lit, flipped)) = decisions.pop() else {
                        return SatResult::Unsat;
                    };
                    self.undo_to(len);
                    if !flipped {
                        decisions.push((len, lit ^ 1, true));
                        self.assign(lit ^ 1);
                        break;
                    }
                }
                cursor = 0;
                continue;
            }
            while cursor < self.order.len() && self.value[self.order[cursor]] != UNASSIGNED {
                cursor += 1;
            }
            if cursor == self.order.len() {
                return SatResult::Sat(self.value.iter().map(|&v| v == 1).collect());
            }
            let lit = 2 * self.order[cursor];
            decisions.push((self.trail.len(), lit, false));
            self.assign(lit);
        }
    }
}
