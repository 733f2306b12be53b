//! Command-line front end for `pworlds`.
//!
//! Exit codes: 0 for a compatible or passing result (and for commands that
//! just produce output), 2 for an incompatible or failing one, 1 for any
//! usage or input error.

pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use pworlds::cnf::export_cnf;
use pworlds::hierarchy::{enumerate_uniform, order_k_test, EnumerationOptions, TestVerdict, DEFAULT_NODE_BUDGET};
use pworlds::possibilistic::{decide_support, DecideOptions, Verdict};
use pworlds::prob::format_rational;
use pworlds::structure::{CausalStructure, NormalizationLog};
use pworlds::Parallelism;

use crate::format::{CertificateFile, DistributionFile, StructureFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pworlds", version, about = "Decide causal compatibility with latent variables")]
struct Cli {
    /// Worker threads; defaults to PW_THREADS, else 1.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accepted for interface stability; nothing here is randomized.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rewrite a structure into exo-simplicial form.
    Normalize {
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the latent cardinality bound of every latent.
    Bounds { structure: PathBuf },
    /// Decide whether a support (or a distribution's support) is possible.
    Check {
        structure: PathBuf,
        /// Support or distribution file.
        data: PathBuf,
        /// Where to write the certificate of a compatible verdict.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Also write the DIMACS encoding (binary visibles only).
        #[arg(long)]
        cnf: Option<PathBuf>,
        /// Latent cardinality for an exploratory run; defaults to the
        /// support size, which makes the verdict exact.
        #[arg(long, value_name = "K")]
        latent_cardinality: Option<u32>,
    },
    /// Compute the distribution of a certificate.
    Simulate {
        structure: PathBuf,
        certificate: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stream every distribution reachable with uniform latents.
    Enumerate {
        structure: PathBuf,
        /// `name=k,...`; a bare `k` applies to every latent not named.
        #[arg(long)]
        latent_cards: String,
        /// Attach a generating model to each distribution.
        #[arg(long)]
        witnesses: bool,
        /// Visit every diagram instead of one per latent relabeling.
        #[arg(long)]
        no_symmetry: bool,
        /// Maximum number of search nodes.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the order-K test on a distribution.
    TestOrder {
        structure: PathBuf,
        distribution: PathBuf,
        #[arg(short = 'K', value_name = "K")]
        k: u32,
        /// Override the latent cardinality bound used in the error term.
        #[arg(long = "C", value_name = "C")]
        c: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Where to write the model of the nearest distribution.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Print the L1 distance between two distributions.
    Distance { first: PathBuf, second: PathBuf },
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let parallelism = cli.threads.map_or_else(Parallelism::from_env, Parallelism::with_threads);
    match cli.command {
        Command::Normalize { structure, output } => {
            let g = load_structure(&structure)?;
            let n = g.normalize()?;
            write_log(err, &n.log)?;
            emit(out, output.as_deref(), &StructureFile::from_structure(&n.structure).to_json())?;
            Ok(EXIT_OK)
        }
        Command::Bounds { structure } => {
            let g = load_structure(&structure)?;
            let n = g.normalize()?;
            write_log(err, &n.log)?;
            bounds_table(out, &n.structure)?;
            Ok(EXIT_OK)
        }
        Command::Check {
            structure,
            data,
            certificate,
            cnf,
            latent_cardinality,
        } => {
            let g = load_structure(&structure)?;
            let file = DistributionFile::parse(&read(&data)?).with_context(|| format!("reading {}", data.display()))?;
            let support = file.to_support()?;
            let n = g.normalize()?;
            write_log(out, &n.log)?;
            if file.has_probabilities() {
                writeln!(out, "distribution reduced to its support of {} events", support.len())?;
            }
            if let Some(path) = &cnf {
                let doc = export_cnf(&g, &support)?;
                write_file(path, &doc.to_dimacs())?;
                writeln!(out, "cnf: {} variables, {} clauses", doc.num_vars, doc.clauses.len())?;
            }
            let options = DecideOptions {
                parallelism,
                latent_cardinality,
                ..DecideOptions::default()
            };
            let verdict = decide_support(&g, &support, &options)?;
            let k = latent_cardinality.unwrap_or(support.len() as u32);
            let stats = verdict.stats();
            match &verdict {
                Verdict::Compatible { certificate: cert, .. } => {
                    writeln!(out, "COMPATIBLE")?;
                    writeln!(out, "latent cardinality: {k}")?;
                    writeln!(out, "search: {} nodes, {} backtracks", stats.nodes, stats.backtracks)?;
                    if let Some(path) = &certificate {
                        write_file(path, &CertificateFile::from_certificate(cert).to_json())?;
                    }
                    Ok(EXIT_OK)
                }
                Verdict::Incompatible { .. } => {
                    writeln!(out, "INCOMPATIBLE")?;
                    writeln!(out, "latent cardinality: {k}")?;
                    writeln!(out, "search: {} nodes, {} backtracks", stats.nodes, stats.backtracks)?;
                    if (k as usize) < support.len() {
                        writeln!(out, "note: latent cardinality is below the support size; not conclusive")?;
                    }
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Simulate {
            structure,
            certificate,
            output,
        } => {
            let g = load_structure(&structure)?;
            let file =
                CertificateFile::parse(&read(&certificate)?).with_context(|| format!("reading {}", certificate.display()))?;
            let (cert, spec) = file.to_certificate(&g)?;
            let d = cert.diagram.simulate(&spec)?;
            emit(out, output.as_deref(), &DistributionFile::from_distribution(&d).to_json())?;
            Ok(EXIT_OK)
        }
        Command::Enumerate {
            structure,
            latent_cards,
            witnesses,
            no_symmetry,
            budget,
            output,
        } => {
            let g = load_structure(&structure)?.normalize()?.structure;
            let cards = parse_latent_cards(&latent_cards, &g)?;
            let options = EnumerationOptions {
                parallelism,
                symmetry_pruning: !no_symmetry,
                witnesses,
                node_budget: Some(budget),
                ..EnumerationOptions::default()
            };
            let set = enumerate_uniform(&g, &cards, &options)?;
            let mut text = String::new();
            for counts in set.counts() {
                let dist = DistributionFile::from_distribution(&set.distribution(counts));
                let witness = set
                    .witness(counts)
                    .map(|d| CertificateFile::from_diagram(&d, &[], None));
                let record = Record {
                    dist: &dist,
                    witness: witness.as_ref(),
                };
                text.push_str(&serde_json::to_string(&record)?);
                text.push('\n');
            }
            emit(out, output.as_deref(), &text)?;
            writeln!(err, "{} distributions, {} nodes", set.len(), set.nodes())?;
            Ok(EXIT_OK)
        }
        Command::TestOrder {
            structure,
            distribution,
            k,
            c,
            budget,
            certificate,
        } => {
            if k == 0 {
                bail!("-K must be at least 1");
            }
            let g = load_structure(&structure)?;
            let p = load_distribution(&distribution)?;
            let options = EnumerationOptions {
                parallelism,
                node_budget: Some(budget),
                ..EnumerationOptions::default()
            };
            let r = order_k_test(&g, &p, k, c, &options)?;
            writeln!(out, "order K: {}", r.order)?;
            writeln!(out, "latents L: {}", r.epsilon.l)?;
            let source = if r.c_overridden { "override" } else { "cardinality bounds" };
            writeln!(out, "bound C: {} ({source})", r.epsilon.c)?;
            writeln!(out, "epsilon: {}", format_rational(&r.epsilon.epsilon))?;
            writeln!(out, "uniformly induced distributions: {} ({} nodes)", r.set_size, r.nodes)?;
            writeln!(out, "min distance: {}", format_rational(&r.min_distance))?;
            writeln!(out, "nearest:")?;
            for (o, q) in r.nearest.entries() {
                writeln!(out, "  {o:?} {}", format_rational(q))?;
            }
            if let Some(path) = &certificate {
                write_file(path, &CertificateFile::from_certificate(&r.certificate).to_json())?;
            }
            Ok(match r.verdict {
                TestVerdict::Pass => {
                    writeln!(out, "verdict: PASS")?;
                    EXIT_OK
                }
                TestVerdict::Fail => {
                    writeln!(out, "verdict: FAIL")?;
                    EXIT_NEGATIVE
                }
            })
        }
        Command::Distance { first, second } => {
            let p = load_distribution(&first)?;
            let q = load_distribution(&second)?;
            let q = q.reorder(p.variables().names()).context("distributions are over different variables")?;
            writeln!(out, "{}", format_rational(&p.distance(&q)?))?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct Record<'a> {
    #[serde(flatten)]
    dist: &'a DistributionFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a CertificateFile>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn load_structure(path: &Path) -> Result<CausalStructure> {
    let file = StructureFile::parse(&read(path)?).with_context(|| format!("reading {}", path.display()))?;
    file.to_structure().with_context(|| format!("invalid structure in {}", path.display()))
}

fn load_distribution(path: &Path) -> Result<pworlds::prob::Distribution> {
    let file = DistributionFile::parse(&read(path)?).with_context(|| format!("reading {}", path.display()))?;
    file.to_distribution().with_context(|| format!("invalid distribution in {}", path.display()))
}

fn write_log(w: &mut dyn Write, log: &NormalizationLog) -> Result<()> {
    for (a, b) in &log.edges_added {
        writeln!(w, "normalize: added edge {a} -> {b}")?;
    }
    for (a, b) in &log.edges_removed {
        writeln!(w, "normalize: removed edge {a} -> {b}")?;
    }
    for l in &log.latents_removed {
        writeln!(w, "normalize: removed latent {l}")?;
    }
    for l in &log.latents_added {
        writeln!(w, "normalize: added latent {l}")?;
    }
    Ok(())
}

fn bounds_table(out: &mut dyn Write, g: &CausalStructure) -> Result<()> {
    let set = |vs: &std::collections::BTreeSet<pworlds::VertexId>| {
        let names: Vec<&str> = vs.iter().map(|&v| g.name(v)).collect();
        format!("{{{}}}", names.join(", "))
    };
    let mut rows = vec![["latent", "bound", "district", "conditioning", "descendants", "remainder"].map(String::from)];
    for l in g.latent() {
        let b = g.cardinality_bound(l)?;
        rows.push([
            g.name(l).to_string(),
            b.bound.to_string(),
            set(&b.district),
            set(&b.conditioning),
            set(&b.descendant_part),
            set(&b.remainder),
        ]);
    }
    let widths: Vec<usize> = (0..6).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    for row in &rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end())?;
    }
    Ok(())
}

/// Parses `name=k,...` against the latents of `g`; a bare `k` sets the
/// default for latents not named.
pub fn parse_latent_cards(spec: &str, g: &CausalStructure) -> Result<Vec<u32>> {
    let latents: Vec<&str> = g.latent().into_iter().map(|l| g.name(l)).collect();
    let mut named = vec![None; latents.len()];
    let mut default = None;
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = match part.split_once('=') {
            Some((n, v)) => (Some(n.trim()), v.trim()),
            None => (None, part),
        };
        let k: u32 = value.parse().with_context(|| format!("bad cardinality `{value}`"))?;
        if k == 0 {
            bail!("latent cardinalities must be at least 1");
        }
        match name {
            Some(n) => {
                let i = latents
                    .iter()
                    .position(|l| *l == n)
                    .with_context(|| format!("`{n}` is not a latent of the normalized structure {latents:?}"))?;
                named[i] = Some(k);
            }
            None => default = Some(k),
        }
    }
    named
        .into_iter()
        .zip(&latents)
        .map(|(k, name)| {
            k.or(default)
                .with_context(|| format!("no cardinality given for latent `{name}`"))
        })
        .collect()
}
