//! JSON file formats for structures, distributions, supports and
//! certificates.
//!
//! Probabilities are always strings (`"n/d"` or an exact decimal) so that no
//! value passes through floating point. Writers emit a fixed layout so equal
//! values always serialize to equal bytes.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use pworlds::possibilistic::Certificate;
use pworlds::prob::{format_rational, parse_rational, Distribution, ProbError, Support, Variables};
use pworlds::structure::{CausalStructure, StructureError};
use pworlds::worlds::{LatentSpec, PossibleWorldsDiagram, WorldsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error("certificate does not fit the structure: {0}")]
    Certificate(String),
    #[error("event {0} has no probability")]
    MissingProbability(usize),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        Self::Json(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibleEntry {
    pub name: String,
    pub cardinality: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatentEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub visible: Vec<VisibleEntry>,
    #[serde(default)]
    pub latent: Vec<LatentEntry>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl StructureFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_structure(s: &CausalStructure) -> Self {
        let visible = s
            .visible()
            .into_iter()
            .map(|v| VisibleEntry {
                name: s.name(v).to_string(),
                cardinality: s.cardinality(v).expect("visible cardinality"),
            })
            .collect();
        let latent = s
            .latent()
            .into_iter()
            .map(|l| LatentEntry {
                name: s.name(l).to_string(),
                cardinality: s.cardinality(l),
            })
            .collect();
        let edges = s
            .graph()
            .edges()
            .map(|(a, b)| (s.name(a).to_string(), s.name(b).to_string()))
            .collect();
        Self { visible, latent, edges }
    }

    /// Visibles are declared before latents, each in file order.
    pub fn to_structure(&self) -> Result<CausalStructure, FormatError> {
        let mut b = CausalStructure::builder();
        for v in &self.visible {
            b = b.visible(&v.name, v.cardinality);
        }
        for l in &self.latent {
            b = match l.cardinality {
                Some(k) => b.latent_with_cardinality(&l.name, k),
                None => b.latent(&l.name),
            };
        }
        for (from, to) in &self.edges {
            b = b.edge(from, to);
        }
        Ok(b.build()?)
    }

    pub fn to_json(&self) -> String {
        let visible = self
            .visible
            .iter()
            .map(|v| format!("{{\"name\": {}, \"cardinality\": {}}}", quote(&v.name), v.cardinality))
            .collect();
        let latent = self
            .latent
            .iter()
            .map(|l| match l.cardinality {
                Some(k) => format!("{{\"name\": {}, \"cardinality\": {k}}}", quote(&l.name)),
                None => format!("{{\"name\": {}}}", quote(&l.name)),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| format!("[{}, {}]", quote(a), quote(b)))
            .collect();
        let mut out = String::from("{\n");
        field_list(&mut out, "visible", visible, false);
        field_list(&mut out, "latent", latent, false);
        field_list(&mut out, "edges", edges, true);
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub outcome: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

/// Shared layout of distribution and support files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub variables: Vec<String>,
    pub cardinalities: Vec<u32>,
    pub events: Vec<EventEntry>,
}

impl DistributionFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn has_probabilities(&self) -> bool {
        self.events.iter().any(|e| e.p.is_some())
    }

    fn variables(&self) -> Result<Variables, FormatError> {
        if self.variables.len() != self.cardinalities.len() {
            return Err(FormatError::Json("`variables` and `cardinalities` differ in length".into()));
        }
        Ok(Variables::new(&self.variables, &self.cardinalities)?)
    }

    pub fn to_distribution(&self) -> Result<Distribution, FormatError> {
        let vars = self.variables()?;
        let entries = self
            .events
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let p = e.p.as_deref().ok_or(FormatError::MissingProbability(i))?;
                Ok((e.outcome.clone(), parse_rational(p)?))
            })
            .collect::<Result<Vec<(Vec<u32>, BigRational)>, FormatError>>()?;
        Ok(Distribution::new(vars, entries)?)
    }

    /// A support file, or the support of a distribution file.
    pub fn to_support(&self) -> Result<Support, FormatError> {
        if self.has_probabilities() {
            return Ok(self.to_distribution()?.support());
        }
        Ok(Support::new(self.variables()?, self.events.iter().map(|e| e.outcome.clone()))?)
    }

    pub fn from_distribution(d: &Distribution) -> Self {
        Self {
            variables: d.variables().names().to_vec(),
            cardinalities: d.variables().cardinalities().to_vec(),
            events: d
                .entries()
                .map(|(o, p)| EventEntry {
                    outcome: o.clone(),
                    p: Some(format_rational(p)),
                })
                .collect(),
        }
    }

    pub fn from_support(s: &Support) -> Self {
        Self {
            variables: s.variables().names().to_vec(),
            cardinalities: s.variables().cardinalities().to_vec(),
            events: s
                .events()
                .iter()
                .map(|o| EventEntry {
                    outcome: o.clone(),
                    p: None,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let events = self
            .events
            .iter()
            .map(|e| match &e.p {
                Some(p) => format!("{{\"outcome\": {}, \"p\": {}}}", int_list(&e.outcome), quote(p)),
                None => format!("{{\"outcome\": {}}}", int_list(&e.outcome)),
            })
            .collect();
        let mut out = String::from("{\n");
        let names: Vec<String> = self.variables.iter().map(|n| quote(n)).collect();
        let _ = writeln!(out, "  \"variables\": [{}],", names.join(", "));
        let _ = writeln!(out, "  \"cardinalities\": {},", int_list(&self.cardinalities));
        field_list(&mut out, "events", events, true);
        out.push_str("}\n");
        out
    }

    /// Single-line form used for streams.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateLatent {
    pub name: String,
    pub cardinality: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub key: Vec<u32>,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateTable {
    pub variable: String,
    /// Key components: visible parents, then latent parents.
    pub parents: Vec<String>,
    pub entries: Vec<TableEntry>,
}

/// A functional model over the normalized form of some structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub latent: Vec<CertificateLatent>,
    pub tables: Vec<CertificateTable>,
    #[serde(default)]
    pub diagonal: Vec<Vec<u32>>,
}

impl CertificateFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_certificate(c: &Certificate) -> Self {
        Self::from_diagram(&c.diagram, &c.diagonal, None)
    }

    pub fn from_diagram(d: &PossibleWorldsDiagram, diagonal: &[Vec<u32>], latents: Option<&LatentSpec>) -> Self {
        let s = d.structure();
        let latent = s
            .latent()
            .into_iter()
            .zip(d.latent_cards())
            .enumerate()
            .map(|(i, (l, &k))| CertificateLatent {
                name: s.name(l).to_string(),
                cardinality: k,
                distribution: latents
                    .and_then(|spec| spec.distributions.as_ref())
                    .map(|ds| ds[i].iter().map(format_rational).collect()),
            })
            .collect();
        let tables = s
            .visible()
            .into_iter()
            .map(|v| {
                let name = s.name(v);
                CertificateTable {
                    variable: name.to_string(),
                    parents: d.key_names(name).expect("visible"),
                    entries: d
                        .entries(name)
                        .expect("visible")
                        .into_iter()
                        .map(|(key, value)| TableEntry { key, value })
                        .collect(),
                }
            })
            .collect();
        Self {
            latent,
            tables,
            diagonal: diagonal.to_vec(),
        }
    }

    /// Rebuilds the certificate on the normalized form of `structure`, plus
    /// the latent distributions (uniform when none are listed).
    pub fn to_certificate(&self, structure: &CausalStructure) -> Result<(Certificate, LatentSpec), FormatError> {
        let normal = structure.normalize()?.structure;
        let bad = |msg: String| FormatError::Certificate(msg);
        let latent_names: Vec<&str> = normal.latent().into_iter().map(|l| normal.name(l)).collect();
        let listed: Vec<&str> = self.latent.iter().map(|l| l.name.as_str()).collect();
        if latent_names != listed {
            return Err(bad(format!("expected latents {latent_names:?}, got {listed:?}")));
        }
        let cards: Vec<u32> = self.latent.iter().map(|l| l.cardinality).collect();
        let mut diagram = PossibleWorldsDiagram::new(normal.clone(), &cards)?;
        let spec = if self.latent.iter().any(|l| l.distribution.is_some()) {
            let mut dists = Vec::new();
            for l in &self.latent {
                let d = match &l.distribution {
                    Some(ps) => ps.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>, _>>()?,
                    None => vec![BigRational::new(1.into(), l.cardinality.into()); l.cardinality as usize],
                };
                if d.len() != l.cardinality as usize {
                    return Err(bad(format!("distribution of `{}` has the wrong length", l.name)));
                }
                dists.push(d);
            }
            LatentSpec::with_distributions(dists)?
        } else {
            LatentSpec::uniform(&cards)
        };
        let visible = normal.visible_names();
        for t in &self.tables {
            if !visible.contains(&t.variable) {
                return Err(bad(format!("`{}` is not a visible variable", t.variable)));
            }
            let expected = diagram.key_names(&t.variable)?;
            if expected != t.parents {
                return Err(bad(format!(
                    "parents of `{}` should be {expected:?}, got {:?}",
                    t.variable, t.parents
                )));
            }
            for e in &t.entries {
                if diagram.get(&t.variable, &e.key)?.is_some() {
                    return Err(bad(format!("duplicate key {:?} for `{}`", e.key, t.variable)));
                }
                diagram.set(&t.variable, &e.key, e.value)?;
            }
        }
        Ok((
            Certificate {
                diagram,
                diagonal: self.diagonal.clone(),
            },
            spec,
        ))
    }

    pub fn to_json(&self) -> String {
        let latent = self
            .latent
            .iter()
            .map(|l| {
                let mut s = format!("{{\"name\": {}, \"cardinality\": {}", quote(&l.name), l.cardinality);
                if let Some(d) = &l.distribution {
                    let ps: Vec<String> = d.iter().map(|p| quote(p)).collect();
                    let _ = write!(s, ", \"distribution\": [{}]", ps.join(", "));
                }
                s.push('}');
                s
            })
            .collect();
        let mut out = String::from("{\n");
        field_list(&mut out, "latent", latent, false);
        out.push_str("  \"tables\": [");
        for (i, t) in self.tables.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            let parents: Vec<String> = t.parents.iter().map(|p| quote(p)).collect();
            let _ = writeln!(out, "    {{\"variable\": {}, \"parents\": [{}], \"entries\": [", quote(&t.variable), parents.join(", "));
            for (j, e) in t.entries.iter().enumerate() {
                let sep = if j + 1 < t.entries.len() { "," } else { "" };
                let _ = writeln!(out, "      {{\"key\": {}, \"value\": {}}}{sep}", int_list(&e.key), e.value);
            }
            out.push_str("    ]}");
        }
        out.push_str(if self.tables.is_empty() { "],\n" } else { "\n  ],\n" });
        let diagonal = self.diagonal.iter().map(|e| int_list(e)).collect();
        field_list(&mut out, "diagonal", diagonal, true);
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn int_list(xs: &[u32]) -> String {
    let parts: Vec<String> = xs.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn field_list(out: &mut String, name: &str, items: Vec<String>, last: bool) {
    let comma = if last { "" } else { "," };
    if items.is_empty() {
        let _ = writeln!(out, "  \"{name}\": []{comma}");
        return;
    }
    let _ = writeln!(out, "  \"{name}\": [");
    let n = items.len();
    for (i, item) in items.into_iter().enumerate() {
        let sep = if i + 1 < n { "," } else { "" };
        let _ = writeln!(out, "    {item}{sep}");
    }
    let _ = writeln!(out, "  ]{comma}");
}
