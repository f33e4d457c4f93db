//! Pass/fail checks of the generation and transitivity statements on a
//! computed monodromy representation.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fiber::{FiberModel, HomologyClass};
use crate::genericity::Verdict;
use crate::lattice::{primitive, rank_q, IntMatrix};
use crate::monodromy::{MonodromyRep, Target};

/// Limits for the orbit searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub states: usize,
    pub word_length: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { states: 100_000, word_length: 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Generation,
    Closure,
    OrbitSingle,
    Transitivity,
    IntersectionGraph,
    Khaste,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Generation,
        CheckKind::Closure,
        CheckKind::OrbitSingle,
        CheckKind::Transitivity,
        CheckKind::IntersectionGraph,
        CheckKind::Khaste,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Generation => "generation",
            CheckKind::Closure => "closure",
            CheckKind::OrbitSingle => "orbit-single",
            CheckKind::Transitivity => "transitivity",
            CheckKind::IntersectionGraph => "intersection-graph",
            CheckKind::Khaste => "khaste",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// A word in the loop generators, applied left to right. Letter `k` is the
/// `k`-th path of the system (from 1), `-k` its inverse.
pub type GeneratorWord = Vec<i32>;

/// Word carrying the first vanishing cycle to `sign` times cycle `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub target: usize,
    pub sign: i64,
    pub word: GeneratorWord,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub states: usize,
    pub longest_word: usize,
    pub budget: Option<Budget>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub verdict: Verdict,
    pub rank_found: Option<usize>,
    pub rank_expected: Option<usize>,
    /// Rank after each saturation round.
    pub rank_trace: Vec<usize>,
    pub stats: Option<SearchStats>,
    pub witnesses: Vec<Witness>,
    pub note: String,
    /// Content hashes of the inputs the check read.
    pub inputs: Vec<String>,
}

impl CheckOutcome {
    fn new(check: CheckKind, verdict: Verdict, note: impl Into<String>) -> Self {
        Self {
            check,
            verdict,
            rank_found: None,
            rank_expected: None,
            rank_trace: Vec::new(),
            stats: None,
            witnesses: Vec::new(),
            note: note.into(),
            inputs: Vec::new(),
        }
    }

    fn ranks(mut self, found: usize, expected: usize) -> Self {
        self.rank_found = Some(found);
        self.rank_expected = Some(expected);
        self
    }

    fn inputs(mut self, hashes: &[&str]) -> Self {
        self.inputs = hashes.iter().map(|h| h.to_string()).collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rep_hash: String,
    pub model_hash: String,
    pub budget: Budget,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    /// Fail if any check failed, else inconclusive if any was, else pass.
    pub fn verdict(&self) -> Verdict {
        let vs: Vec<Verdict> = self.checks.iter().map(|c| c.verdict).collect();
        if vs.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if vs.contains(&Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn get(&self, check: CheckKind) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check == check)
    }
}

/// SHA-256 of the JSON serialization.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Vanishing cycles ordered by critical index.
pub fn vanishing_cycles(rep: &MonodromyRep) -> Result<Vec<HomologyClass>> {
    let mut crit = rep.critical();
    crit.sort_by_key(|c| c.0);
    crit.into_iter()
        .map(|(i, _, d)| d.cloned().ok_or_else(|| Error::Consistency(format!("no vanishing cycle for critical value {i}"))))
        .collect()
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Images of every vector under `m^k` for `0 <= k < order`.
fn closure(vectors: &[Vec<i64>], m: &IntMatrix, order: u32) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::with_capacity(vectors.len() * order as usize);
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..order {
            out.push(w.clone());
            w = m.mul_vec(&w)?;
        }
    }
    Ok(out)
}

/// The vanishing cycles span the homology of the fiber, once closed under
/// the local monodromies at the exceptional values.
pub fn verify_generation(rep: &MonodromyRep, model: &FiberModel, p: u32, q: u32) -> Result<CheckOutcome> {
    let mut vectors: Vec<Vec<i64>> = vanishing_cycles(rep)?.into_iter().map(|d| d.0).collect();
    if let (Some(m0), true) = (rep.at_zero(), p > 1) {
        vectors = closure(&vectors, m0, p)?;
    }
    if let (Some(minf), true) = (&rep.infinity, q > 1) {
        vectors = closure(&vectors, minf, q)?;
    }
    let found = rank_q(&vectors);
    let expected = model.rank();
    Ok(CheckOutcome::new(CheckKind::Generation, verdict(found == expected), format!("{} vectors", vectors.len()))
        .ranks(found, expected))
}

/// `{M_0^k delta_i : 0 <= k < p}` spans the homology of the fiber.
pub fn verify_21agu(rep: &MonodromyRep, model: &FiberModel, p: u32) -> Result<CheckOutcome> {
    let deltas: Vec<Vec<i64>> = vanishing_cycles(rep)?.into_iter().map(|d| d.0).collect();
    let vectors = match (p, rep.at_zero()) {
        (1, _) => deltas,
        (_, Some(m0)) => closure(&deltas, m0, p)?,
        (_, None) => {
            return Ok(CheckOutcome::new(CheckKind::Closure, Verdict::Fail, "no monodromy around zero"));
        }
    };
    let found = rank_q(&vectors);
    let expected = model.rank();
    Ok(CheckOutcome::new(CheckKind::Closure, verdict(found == expected), format!("p = {p}")).ranks(found, expected))
}

/// Generators of the monodromy group: `(letter, matrix)` for every path and
/// every inverse.
fn generators(rep: &MonodromyRep) -> Result<Vec<(i32, IntMatrix)>> {
    let mut out = Vec::with_capacity(2 * rep.matrices.len());
    for (k, m) in rep.matrices.iter().enumerate() {
        let letter = (k + 1) as i32;
        out.push((letter, m.clone()));
        out.push((-letter, m.inverse_unimodular()?));
    }
    Ok(out)
}

/// The span of the orbit of `delta` under the monodromy group is the whole
/// homology. Saturates a spanning set under all generators.
pub fn verify_orbit_single(
    rep: &MonodromyRep,
    delta: &HomologyClass,
    model: &FiberModel,
    budget: Budget,
) -> Result<CheckOutcome> {
    let gens = generators(rep)?;
    let expected = model.rank();
    let mut span: Vec<Vec<i64>> = if delta.0.iter().any(|v| *v != 0) { vec![delta.0.clone()] } else { vec![] };
    let mut trace = vec![span.len()];
    let mut states = 0;
    loop {
        let before = span.len();
        let current = span.clone();
        for v in &current {
            for (_, m) in &gens {
                states += 1;
                if states > budget.states {
                    let mut out = CheckOutcome::new(CheckKind::OrbitSingle, Verdict::Inconclusive, "budget exhausted")
                        .ranks(span.len(), expected);
                    out.rank_trace = trace;
                    out.stats = Some(SearchStats { states, longest_word: 0, budget: Some(budget) });
                    return Ok(out);
                }
                let w = m.mul_vec(v)?;
                let mut candidate = span.clone();
                candidate.push(w.clone());
                if rank_q(&candidate) > span.len() {
                    span.push(w);
                }
            }
        }
        trace.push(span.len());
        if span.len() == before {
            break;
        }
    }
    let found = span.len();
    let mut out = CheckOutcome::new(CheckKind::OrbitSingle, verdict(found == expected), "saturated").ranks(found, expected);
    out.rank_trace = trace;
    out.stats = Some(SearchStats { states, longest_word: 0, budget: Some(budget) });
    Ok(out)
}

/// Apply a generator word to a vector.
pub fn replay(rep: &MonodromyRep, word: &[i32], v: &[i64]) -> Result<Vec<i64>> {
    let mut w = v.to_vec();
    for &letter in word {
        let k = letter.unsigned_abs() as usize - 1;
        let m = rep.matrices.get(k).ok_or_else(|| Error::Consistency(format!("no generator {letter}")))?;
        w = if letter > 0 { m.mul_vec(&w)? } else { m.inverse_unimodular()?.mul_vec(&w)? };
    }
    Ok(w)
}

/// Words along chains of vanishing cycles meeting once: for
/// `<delta_i, delta_j> = ±1`, `T_i T_j` carries `delta_i` to `±delta_j`.
fn chain_words(rep: &MonodromyRep, deltas: &[Vec<i64>]) -> Result<Vec<Option<GeneratorWord>>> {
    let r = deltas.len();
    let letter: HashMap<usize, i32> = rep
        .system
        .paths
        .iter()
        .enumerate()
        .filter_map(|(k, p)| match p.target {
            Target::Critical(i) => Some((i, (k + 1) as i32)),
            Target::Zero => None,
        })
        .collect();
    let j = &rep.intersection;
    let mut words: Vec<Option<GeneratorWord>> = vec![None; r];
    words[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for t in 0..r {
            if words[t].is_some() || j.pair(&deltas[i], &deltas[t])?.abs() != 1 {
                continue;
            }
            // applied left to right: T_t first, then T_i
            let mut w = words[i].clone().unwrap();
            w.push(letter[&t]);
            w.push(letter[&i]);
            words[t] = Some(w);
            queue.push_back(t);
        }
    }
    Ok(words)
}

/// Every `±delta_j` lies in the orbit of `delta_1`. Chains of cycles meeting
/// once give words first; a breadth-first search covers the rest.
pub fn verify_transitivity(rep: &MonodromyRep, deltas: &[HomologyClass], budget: Budget) -> Result<CheckOutcome> {
    let r = deltas.len();
    let targets: Vec<Vec<i64>> = deltas.iter().map(|d| primitive(&d.0)).collect();
    let mut found: Vec<Option<Witness>> = vec![None; r];
    let mut stats = SearchStats { states: 0, longest_word: 0, budget: Some(budget) };
    if r == 0 {
        return Ok(CheckOutcome::new(CheckKind::Transitivity, Verdict::Pass, "no vanishing cycles"));
    }
    let raw: Vec<Vec<i64>> = deltas.iter().map(|d| d.0.clone()).collect();
    for (t, word) in chain_words(rep, &raw)?.into_iter().enumerate() {
        let Some(word) = word else { continue };
        if word.len() > budget.word_length {
            continue;
        }
        let image = replay(rep, &word, &raw[0])?;
        if let Some(sign) = signed_match(&image, &raw[t]) {
            stats.longest_word = stats.longest_word.max(word.len());
            found[t] = Some(Witness { target: t, sign, word });
        }
    }

    if found.iter().any(Option::is_none) {
        let gens = generators(rep)?;
        let mut seen: HashMap<Vec<i64>, (Vec<i64>, i32)> = HashMap::new();
        let start = primitive(&raw[0]);
        seen.insert(start.clone(), (Vec::new(), 0));
        let mut frontier = vec![start];
        let mut depth = 0;
        'search: while !frontier.is_empty() && depth < budget.word_length && found.iter().any(Option::is_none) {
            depth += 1;
            let mut next = Vec::new();
            for v in &frontier {
                for (letter, m) in &gens {
                    let Ok(w) = m.mul_vec(v) else { continue };
                    let key = primitive(&w);
                    if seen.contains_key(&key) {
                        continue;
                    }
                    seen.insert(key.clone(), (v.clone(), *letter));
                    stats.states += 1;
                    if let Some(t) = targets.iter().position(|d| *d == key) {
                        if found[t].is_none() {
                            let word = unwind(&seen, &key);
                            let image = replay(rep, &word, &raw[0])?;
                            if let Some(sign) = signed_match(&image, &raw[t]) {
                                stats.longest_word = stats.longest_word.max(word.len());
                                found[t] = Some(Witness { target: t, sign, word });
                            }
                        }
                    }
                    if stats.states >= budget.states {
                        break 'search;
                    }
                    next.push(key);
                }
            }
            frontier = next;
        }
    }

    let reached = found.iter().filter(|w| w.is_some()).count();
    let all = reached == r;
    let exhausted = !all;
    let mut out = CheckOutcome::new(
        CheckKind::Transitivity,
        if all { Verdict::Pass } else { Verdict::Inconclusive },
        format!("{reached} of {r} classes reached{}", if exhausted { " before the budget ran out" } else { "" }),
    );
    out.witnesses = found.into_iter().flatten().collect();
    out.stats = Some(stats);
    Ok(out)
}

fn signed_match(image: &[i64], target: &[i64]) -> Option<i64> {
    if image == target {
        Some(1)
    } else if image.iter().zip(target).all(|(a, b)| *a == -*b) {
        Some(-1)
    } else {
        None
    }
}

fn unwind(seen: &HashMap<Vec<i64>, (Vec<i64>, i32)>, end: &[i64]) -> GeneratorWord {
    let mut word = Vec::new();
    let mut cur = end.to_vec();
    while let Some((parent, letter)) = seen.get(&cur) {
        if *letter == 0 {
            break;
        }
        word.push(*letter);
        cur = parent.clone();
    }
    word.reverse();
    word
}

/// The graph on vanishing cycles with an edge wherever two of them meet is
/// connected.
pub fn intersection_graph_connected(deltas: &[HomologyClass], j: &IntMatrix) -> Result<CheckOutcome> {
    let r = deltas.len();
    let mut seen = vec![false; r];
    let mut stack = Vec::new();
    if r > 0 {
        seen[0] = true;
        stack.push(0);
    }
    while let Some(i) = stack.pop() {
        for t in 0..r {
            if !seen[t] && j.pair(&deltas[i].0, &deltas[t].0)? != 0 {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let reached = seen.iter().filter(|s| **s).count();
    Ok(CheckOutcome::new(CheckKind::IntersectionGraph, verdict(reached == r), format!("{reached} of {r} nodes reached")))
}

/// `M_0^p` is the identity.
pub fn verify_khaste(m0: Option<&IntMatrix>, p: u32) -> Result<CheckOutcome> {
    if p == 1 {
        return Ok(CheckOutcome::new(CheckKind::Khaste, Verdict::Pass, "p = 1"));
    }
    let Some(m0) = m0 else {
        return Ok(CheckOutcome::new(CheckKind::Khaste, Verdict::Fail, "no monodromy around zero"));
    };
    let ok = m0.pow(p)?.is_identity();
    Ok(CheckOutcome::new(CheckKind::Khaste, verdict(ok), format!("M_0^{p}")).inputs(&[&content_hash(m0)]))
}

/// Run the selected checks. The orbit of the first vanishing cycle is used
/// for the single-orbit check.
pub fn verify(
    rep: &MonodromyRep,
    model: &FiberModel,
    p: u32,
    q: u32,
    checks: &[CheckKind],
    budget: Budget,
) -> Result<VerificationReport> {
    let rep_hash = content_hash(rep);
    let model_hash = content_hash(model);
    let deltas = vanishing_cycles(rep)?;
    let outcomes: Vec<CheckOutcome> = checks
        .par_iter()
        .map(|&kind| {
            let out = match kind {
                CheckKind::Generation => verify_generation(rep, model, p, q)?,
                CheckKind::Closure => verify_21agu(rep, model, p)?,
                CheckKind::OrbitSingle => match deltas.first() {
                    Some(d) => verify_orbit_single(rep, d, model, budget)?,
                    None => CheckOutcome::new(kind, Verdict::Fail, "no vanishing cycles"),
                },
                CheckKind::Transitivity => verify_transitivity(rep, &deltas, budget)?,
                CheckKind::IntersectionGraph => intersection_graph_connected(&deltas, &rep.intersection)?,
                CheckKind::Khaste => verify_khaste(rep.at_zero(), p)?,
            };
            let mut out = out;
            if out.inputs.is_empty() {
                out.inputs = vec![rep_hash.clone(), model_hash.clone()];
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let report = VerificationReport { rep_hash, model_hash, budget, checks: outcomes };
    if let (Some(orbit), Some(generation)) = (report.get(CheckKind::OrbitSingle), report.get(CheckKind::Generation)) {
        if orbit.verdict == Verdict::Pass && generation.verdict != Verdict::Pass && p == 1 && q == 1 {
            return Err(Error::Consistency("orbit spans the homology but the vanishing cycles do not".into()));
        }
    }
    Ok(report)
}
