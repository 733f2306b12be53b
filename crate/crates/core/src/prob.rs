//! Exact finite probability over named discrete variables.
//!
//! All probabilities are arbitrary-precision rationals; nothing in this module
//! goes through floating point, including parsing of decimal input.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// One value index per variable, in the variable order of the owning space.
pub type Outcome = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` must have cardinality >= 1")]
    InvalidCardinality(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("outcome {0:?} does not fit the variable list")]
    InvalidOutcome(Vec<u32>),
    #[error("outcome {0:?} listed twice")]
    DuplicateOutcome(Vec<u32>),
    #[error("negative probability")]
    NegativeProbability,
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("mixture weights sum to {0}, not 1")]
    WeightSumNotOne(String),
    #[error("distributions are over different variables")]
    VariableMismatch,
    #[error("evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("support must contain at least one outcome")]
    EmptySupport,
    #[error("cannot parse `{0}` as an exact number")]
    InvalidNumber(String),
}

/// Ordered variable names with their cardinalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variables {
    names: Vec<String>,
    cards: Vec<u32>,
}

impl Variables {
    pub fn new<S: AsRef<str>>(names: &[S], cards: &[u32]) -> Result<Self, ProbError> {
        assert_eq!(names.len(), cards.len(), "one cardinality per variable");
        let mut seen = BTreeSet::new();
        for (name, &k) in names.iter().zip(cards) {
            let name = name.as_ref();
            if !seen.insert(name) {
                return Err(ProbError::DuplicateVariable(name.to_string()));
            }
            if k == 0 {
                return Err(ProbError::InvalidCardinality(name.to_string()));
            }
        }
        Ok(Self {
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            cards: cards.to_vec(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn position(&self, name: &str) -> Result<usize, ProbError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ProbError::UnknownVariable(name.to_string()))
    }

    pub fn check(&self, outcome: &[u32]) -> Result<(), ProbError> {
        if outcome.len() == self.cards.len() && outcome.iter().zip(&self.cards).all(|(x, k)| x < k) {
            Ok(())
        } else {
            Err(ProbError::InvalidOutcome(outcome.to_vec()))
        }
    }

    /// Number of joint outcomes, or `None` when it does not fit in `usize`.
    pub fn size(&self) -> Option<usize> {
        self.cards
            .iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k as usize))
    }

    /// Mixed-radix index with the first variable most significant.
    pub fn index_of(&self, outcome: &[u32]) -> usize {
        outcome
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&x, &k)| acc * k as usize + x as usize)
    }

    pub fn outcome_at(&self, mut index: usize) -> Outcome {
        let mut out = vec![0; self.cards.len()];
        for (slot, &k) in out.iter_mut().zip(&self.cards).rev() {
            *slot = (index % k as usize) as u32;
            index /= k as usize;
        }
        out
    }

    /// Every joint outcome in lexicographic order.
    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> + '_ {
        (0..self.size().expect("outcome space too large to list")).map(|i| self.outcome_at(i))
    }

    /// Positions of `names` within `self`, for reordering or projecting.
    fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, ProbError> {
        names.iter().map(|n| self.position(n.as_ref())).collect()
    }

    fn select(&self, positions: &[usize]) -> Variables {
        Variables {
            names: positions.iter().map(|&i| self.names[i].clone()).collect(),
            cards: positions.iter().map(|&i| self.cards[i]).collect(),
        }
    }
}

/// Set of possible outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    vars: Variables,
    events: BTreeSet<Outcome>,
}

impl Support {
    pub fn new<I>(vars: Variables, events: I) -> Result<Self, ProbError>
    where
        I: IntoIterator<Item = Outcome>,
    {
        let mut set = BTreeSet::new();
        for e in events {
            vars.check(&e)?;
            if !set.insert(e.clone()) {
                return Err(ProbError::DuplicateOutcome(e));
            }
        }
        if set.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        Ok(Self { vars, events: set })
    }

    pub fn variables(&self) -> &Variables {
        &self.vars
    }

    /// Outcomes in lexicographic order.
    pub fn events(&self) -> &BTreeSet<Outcome> {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, outcome: &[u32]) -> bool {
        self.events.contains(outcome)
    }

    /// The same events over the variables listed in `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Support, ProbError> {
        if order.len() != self.vars.len() {
            return Err(ProbError::VariableMismatch);
        }
        let pos = self.vars.positions(order)?;
        let vars = self.vars.select(&pos);
        let events = self
            .events
            .iter()
            .map(|e| pos.iter().map(|&i| e[i]).collect())
            .collect();
        Ok(Support { vars, events })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    vars: Variables,
    probs: BTreeMap<Outcome, BigRational>,
}

impl Distribution {
    /// Zero entries are dropped; the rest must be nonnegative and sum to 1.
    pub fn new<I>(vars: Variables, entries: I) -> Result<Self, ProbError>
    where
        I: IntoIterator<Item = (Outcome, BigRational)>,
    {
        let mut probs = BTreeMap::new();
        let mut total = BigRational::zero();
        for (outcome, p) in entries {
            vars.check(&outcome)?;
            if p.is_negative() {
                return Err(ProbError::NegativeProbability);
            }
            if probs.contains_key(&outcome) {
                return Err(ProbError::DuplicateOutcome(outcome));
            }
            total += &p;
            if !p.is_zero() {
                probs.insert(outcome, p);
            }
        }
        if !total.is_one() {
            return Err(ProbError::NotNormalized(format_rational(&total)));
        }
        Ok(Self { vars, probs })
    }

    pub fn point_mass(vars: Variables, outcome: Outcome) -> Result<Self, ProbError> {
        Self::new(vars, [(outcome, BigRational::one())])
    }

    /// Uniform over the whole outcome space.
    pub fn uniform(vars: Variables) -> Self {
        let n = vars.size().expect("outcome space too large to list");
        let p = BigRational::new(BigInt::one(), BigInt::from(n));
        let probs = vars.outcomes().map(|o| (o, p.clone())).collect();
        Self { vars, probs }
    }

    /// `counts[i] / denominator` at the outcome with dense index `i`.
    pub fn from_counts(vars: Variables, counts: &[u64], denominator: u64) -> Result<Self, ProbError> {
        assert_eq!(Some(counts.len()), vars.size(), "one count per outcome");
        let denom = BigInt::from(denominator);
        let entries: Vec<_> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (vars.outcome_at(i), BigRational::new(BigInt::from(c), denom.clone())))
            .collect();
        Self::new(vars, entries)
    }

    /// Exact convex combination.
    pub fn mixture(parts: &[(BigRational, &Distribution)]) -> Result<Self, ProbError> {
        let Some((_, first)) = parts.first() else {
            return Err(ProbError::WeightSumNotOne("0".into()));
        };
        let mut total = BigRational::zero();
        let mut probs: BTreeMap<Outcome, BigRational> = BTreeMap::new();
        for (w, d) in parts {
            if d.vars != first.vars {
                return Err(ProbError::VariableMismatch);
            }
            if w.is_negative() {
                return Err(ProbError::NegativeProbability);
            }
            total += w;
            for (o, p) in &d.probs {
                *probs.entry(o.clone()).or_insert_with(BigRational::zero) += w * p;
            }
        }
        if !total.is_one() {
            return Err(ProbError::WeightSumNotOne(format_rational(&total)));
        }
        probs.retain(|_, p| !p.is_zero());
        Ok(Self {
            vars: first.vars.clone(),
            probs,
        })
    }

    pub fn variables(&self) -> &Variables {
        &self.vars
    }

    /// Positive entries in lexicographic outcome order.
    pub fn entries(&self) -> impl Iterator<Item = (&Outcome, &BigRational)> {
        self.probs.iter()
    }

    pub fn probability(&self, outcome: &[u32]) -> BigRational {
        self.probs.get(outcome).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> Support {
        Support {
            vars: self.vars.clone(),
            events: self.probs.keys().cloned().collect(),
        }
    }

    /// L1 distance: sum over outcomes of |P(x) − Q(x)|.
    pub fn distance(&self, other: &Distribution) -> Result<BigRational, ProbError> {
        if self.vars != other.vars {
            return Err(ProbError::VariableMismatch);
        }
        let keys: BTreeSet<&Outcome> = self.probs.keys().chain(other.probs.keys()).collect();
        Ok(keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum())
    }

    /// Marginal on `keep`, listed in this distribution's variable order.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<Distribution, ProbError> {
        let mut pos = self.vars.positions(keep)?;
        pos.sort_unstable();
        pos.dedup();
        let vars = self.vars.select(&pos);
        let mut probs: BTreeMap<Outcome, BigRational> = BTreeMap::new();
        for (o, p) in &self.probs {
            let key = pos.iter().map(|&i| o[i]).collect();
            *probs.entry(key).or_insert_with(BigRational::zero) += p;
        }
        Ok(Distribution { vars, probs })
    }

    /// Conditional on the evidence variables taking the given values. The
    /// evidence variables are dropped from the result.
    pub fn condition<S: AsRef<str>>(&self, evidence: &[(S, u32)]) -> Result<Distribution, ProbError> {
        let mut fixed = HashMap::new();
        for (name, value) in evidence {
            let i = self.vars.position(name.as_ref())?;
            if *value >= self.vars.cards[i] {
                return Err(ProbError::InvalidOutcome(vec![*value]));
            }
            fixed.insert(i, *value);
        }
        let rest: Vec<usize> = (0..self.vars.len()).filter(|i| !fixed.contains_key(i)).collect();
        let matching: Vec<_> = self
            .probs
            .iter()
            .filter(|(o, _)| fixed.iter().all(|(&i, &v)| o[i] == v))
            .collect();
        let mass: BigRational = matching.iter().map(|(_, p)| (*p).clone()).sum();
        if mass.is_zero() {
            return Err(ProbError::ZeroProbabilityEvidence);
        }
        let mut probs: BTreeMap<Outcome, BigRational> = BTreeMap::new();
        for (o, p) in matching {
            let key = rest.iter().map(|&i| o[i]).collect();
            *probs.entry(key).or_insert_with(BigRational::zero) += p / &mass;
        }
        Ok(Distribution {
            vars: self.vars.select(&rest),
            probs,
        })
    }

    /// The same distribution over the variables listed in `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Distribution, ProbError> {
        if order.len() != self.vars.len() {
            return Err(ProbError::VariableMismatch);
        }
        let pos = self.vars.positions(order)?;
        let probs = self
            .probs
            .iter()
            .map(|(o, p)| (pos.iter().map(|&i| o[i]).collect(), p.clone()))
            .collect();
        Ok(Distribution {
            vars: self.vars.select(&pos),
            probs,
        })
    }
}

fn check_weights(p: &[BigRational]) -> Result<(), ProbError> {
    if p.iter().any(Signed::is_negative) {
        return Err(ProbError::NegativeProbability);
    }
    let total: BigRational = p.iter().sum();
    if !total.is_one() {
        return Err(ProbError::NotNormalized(format_rational(&total)));
    }
    Ok(())
}

/// Maps each of `m` equally likely samples `ω ∈ {0..m-1}` to the least value
/// `λ` whose cumulative probability satisfies `cum(λ)·m ≥ ω + 1`.
///
/// This rule can miss the `(|p| − 1) / m` bound: for `p = (2/5, 3/5)` and
/// `m = 2` both samples land on the second value and the distance is `4/5`.
/// [`rational_approximation`] uses [`midpoint_sample_map`] instead.
pub fn inverse_sample_map(p: &[BigRational], m: u64) -> Result<Vec<usize>, ProbError> {
    threshold_map(p, m, |omega| BigRational::from_integer(BigInt::from(omega + 1)))
}

/// Like [`inverse_sample_map`] but tests `cum(λ)·m ≥ ω + 1/2`, which rounds
/// every cumulative count to the nearest integer.
pub fn midpoint_sample_map(p: &[BigRational], m: u64) -> Result<Vec<usize>, ProbError> {
    threshold_map(p, m, |omega| BigRational::new(BigInt::from(2 * omega + 1), BigInt::from(2)))
}

fn threshold_map(
    p: &[BigRational],
    m: u64,
    threshold: impl Fn(u64) -> BigRational,
) -> Result<Vec<usize>, ProbError> {
    assert!(m >= 1, "need at least one sample");
    check_weights(p)?;
    let m_big = BigRational::from_integer(BigInt::from(m));
    let mut map = Vec::with_capacity(m as usize);
    let mut lambda = 0;
    let mut cum = p[0].clone();
    for omega in 0..m {
        let need = threshold(omega);
        while &cum * &m_big < need {
            lambda += 1;
            cum += &p[lambda];
        }
        map.push(lambda);
    }
    Ok(map)
}

/// The distribution induced by pushing the uniform distribution on `m`
/// samples through [`midpoint_sample_map`]. Its distance to `p` never exceeds
/// `(|p| − 1) / m`.
pub fn rational_approximation(p: &[BigRational], m: u64) -> Result<Vec<BigRational>, ProbError> {
    let map = midpoint_sample_map(p, m)?;
    let mut counts = vec![0u64; p.len()];
    for lambda in map {
        counts[lambda] += 1;
    }
    let approx: Vec<BigRational> = counts
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), BigInt::from(m)))
        .collect();
    let delta: BigRational = p.iter().zip(&approx).map(|(a, b)| (a - b).abs()).sum();
    let bound = BigRational::new(BigInt::from(p.len() as u64 - 1), BigInt::from(m));
    assert!(delta <= bound, "approximation error exceeds (n-1)/m");
    Ok(approx)
}

/// Worst-case distance between the best uniformly induced distribution at
/// latent cardinality `k` and the target, for `l` latents whose cardinality
/// bounds are at most `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonBound {
    pub l: u32,
    pub c: u64,
    pub k: u64,
    pub epsilon: BigRational,
}

/// ε = Σ_{n=1}^{L} (1/n!) · (L(C−1)/K)^n
pub fn epsilon_bound(l: u32, c: u64, k: u64) -> EpsilonBound {
    assert!(l >= 1 && c >= 1 && k >= 1, "L, C and K must be positive");
    let x = BigRational::new(
        BigInt::from(l) * BigInt::from(c - 1),
        BigInt::from(k),
    );
    let mut epsilon = BigRational::zero();
    let mut term = BigRational::one();
    for n in 1..=l {
        term = term * &x / BigInt::from(n);
        epsilon += &term;
    }
    EpsilonBound { l, c, k, epsilon }
}

/// Parses `n/d`, an integer, or a decimal such as `0.125` or `1.5e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, ProbError> {
    let bad = || ProbError::InvalidNumber(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let n: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// `n/d` in lowest terms, or just `n` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (o, p) in &self.probs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}[", format_rational(p))?;
            for (i, x) in o.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}={}", self.vars.names[i], x)?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}
