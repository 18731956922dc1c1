//! Bounded search for admissible matrix pairs, up to simultaneous index
//! permutation and the `s <-> t` swap.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cells::{cell_module, Side};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::nimrep::{evaluate, FilterConfig, FilterId, MatrixPair, NimrepContext};
use crate::perron::perron_analysis;
use crate::reps::decompose;

pub const MAX_CANONICAL_RANK: usize = 6;
pub const DEFAULT_ENTRY_BOUND: i64 = 4;
pub const DEFAULT_MAX_STATES: u64 = 50_000_000;
pub const UNKNOWN_CITATION: &str = "unknown — not classified by the paper";

const BUILTIN_KNOWLEDGE: &str = include_str!("../data/knowledge.json");

fn serialize(a: &IntMatrix, b: &IntMatrix) -> Vec<u8> {
    a.entries().iter().chain(b.entries()).flat_map(|x| x.to_be_bytes()).collect()
}

/// Lexicographically smallest serialisation of `(A_s, A_t)` over all
/// simultaneous permutations and the swap, prefixed by the rank.
pub fn canonicalize(pair: &MatrixPair) -> Result<Vec<u8>> {
    orbit_extreme(pair, false).map(|(key, _)| key)
}

/// Smallest (or largest) member of the orbit, with its serialisation.
fn orbit_extreme(pair: &MatrixPair, largest: bool) -> Result<(Vec<u8>, MatrixPair)> {
    let r = pair.rank();
    if r > MAX_CANONICAL_RANK {
        return Err(Error::RankTooLarge(r));
    }
    let mut best: Option<(Vec<u8>, MatrixPair)> = None;
    for candidate in [pair.clone(), pair.swapped()] {
        for perm in (0..r).permutations(r) {
            let p = candidate.permuted(&perm);
            let mut bytes = vec![r as u8];
            bytes.extend(serialize(p.theta_s(), p.theta_t()));
            let better = match &best {
                None => true,
                Some((b, _)) => (bytes < *b) != largest && bytes != *b,
            };
            if better {
                best = Some((bytes, p));
            }
        }
    }
    Ok(best.expect("at least one permutation"))
}

pub fn key_hex(key: &[u8]) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KnowledgeStatus {
    MatrixAdmissibleUnrealized,
}

/// `n ≡ residue mod modulus`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NPattern {
    pub residue: u32,
    pub modulus: u32,
}

impl NPattern {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Knowledge(format!("bad n pattern {text:?}, expected \"n ≡ a mod m\""));
        let rest = text.trim().strip_prefix('n').ok_or_else(bad)?.trim_start();
        let rest = rest.strip_prefix('≡').or_else(|| rest.strip_prefix("==")).ok_or_else(bad)?;
        let (a, m) = rest.split_once("mod").ok_or_else(bad)?;
        let residue: u32 = a.trim().parse().map_err(|_| bad())?;
        let modulus: u32 = m.trim().parse().map_err(|_| bad())?;
        if modulus == 0 {
            return Err(bad());
        }
        Ok(NPattern { residue: residue % modulus, modulus })
    }

    pub fn matches(&self, n: u32) -> bool {
        n % self.modulus == self.residue
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawEntry {
    id: String,
    n: String,
    theta_s: IntMatrix,
    theta_t: IntMatrix,
    status: KnowledgeStatus,
    citation: String,
}

#[derive(Debug, Clone, Deserialize)]
struct RawTable {
    version: u32,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Clone)]
pub struct KnowledgeEntry {
    pub id: String,
    pub pattern: NPattern,
    pub key: Vec<u8>,
    pub status: KnowledgeStatus,
    pub citation: String,
}

#[derive(Debug, Clone)]
pub struct KnowledgeTable {
    pub version: u32,
    pub entries: Vec<KnowledgeEntry>,
}

impl KnowledgeTable {
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_KNOWLEDGE).expect("bundled knowledge table is valid")
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Knowledge(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(text)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|e| {
                // n is irrelevant to the key; any valid order will do
                let pair = MatrixPair::new(3, e.theta_s, e.theta_t)
                    .map_err(|err| Error::Knowledge(format!("entry {}: {err}", e.id)))?;
                Ok(KnowledgeEntry {
                    id: e.id,
                    pattern: NPattern::parse(&e.n)?,
                    key: canonicalize(&pair)?,
                    status: e.status,
                    citation: e.citation,
                })
            })
            .collect::<Result<_>>()?;
        Ok(KnowledgeTable { version: raw.version, entries })
    }

    pub fn lookup(&self, n: u32, key: &[u8]) -> Option<&KnowledgeEntry> {
        self.entries.iter().find(|e| e.pattern.matches(n) && e.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    RealizedCell { cell: String, #[serde(skip_serializing_if = "Vec::is_empty")] also: Vec<String> },
    MatrixAdmissibleUnrealized { citation: String },
    Rejected { filter: FilterId },
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tag::RealizedCell { cell, also } if also.is_empty() => write!(f, "REALIZED_CELL({cell})"),
            Tag::RealizedCell { cell, also } => write!(f, "REALIZED_CELL({cell}; also {})", also.join(", ")),
            Tag::MatrixAdmissibleUnrealized { citation } => write!(f, "MATRIX_ADMISSIBLE_UNREALIZED({citation})"),
            Tag::Rejected { filter } => write!(f, "REJECTED({filter})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronSummary {
    pub spectral_radius: f64,
    pub top_eigenvalue_simple: bool,
    pub positive_eigenvector: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub pair: MatrixPair,
    pub key: Vec<u8>,
    pub tag: Tag,
    pub apex: Option<String>,
    pub decomposition: Option<crate::reps::Decomposition>,
    pub perron: PerronSummary,
    pub det_q: String,
    pub char_poly_q: String,
}

impl Candidate {
    pub fn to_json(&self) -> Value {
        json!({
            "key": key_hex(&self.key),
            "theta_s": self.pair.theta_s().rows(),
            "theta_t": self.pair.theta_t().rows(),
            "tag": self.tag,
            "apex": self.apex,
            "decomposition": self.decomposition,
            "perron": self.perron,
            "det_q": self.det_q,
            "char_poly_q": self.char_poly_q,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSection {
    pub rank: usize,
    pub explored: u64,
    /// States rejected, by first failing filter.
    pub rejected: BTreeMap<FilterId, u64>,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    pub n: u32,
    pub ranks: Vec<usize>,
    pub entry_bound: i64,
    pub filters: FilterConfig,
    pub jobs: usize,
    pub max_states: u64,
}

impl ClassifyConfig {
    pub fn new(n: u32, ranks: Vec<usize>) -> Self {
        ClassifyConfig {
            n,
            ranks,
            entry_bound: DEFAULT_ENTRY_BOUND,
            filters: FilterConfig::default(),
            jobs: 1,
            max_states: DEFAULT_MAX_STATES,
        }
    }

    fn validate(&self) -> Result<()> {
        crate::dihedral::DihedralGroup::new(self.n)?;
        if self.entry_bound < 1 {
            return Err(Error::InvalidParameters("entry bound must be at least 1".into()));
        }
        if self.jobs < 1 {
            return Err(Error::InvalidParameters("need at least one worker".into()));
        }
        for &r in &self.ranks {
            if r == 0 {
                return Err(Error::InvalidParameters("rank must be at least 1".into()));
            }
            if r > MAX_CANONICAL_RANK {
                return Err(Error::RankTooLarge(r));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub n: u32,
    pub entry_bound: i64,
    pub filters: FilterConfig,
    pub max_states: u64,
    pub guard_tripped: bool,
    pub sections: Vec<RankSection>,
    /// Wall time; deliberately left out of both renderings.
    pub elapsed: Duration,
}

impl ClassificationReport {
    pub fn section(&self, rank: usize) -> Option<&RankSection> {
        self.sections.iter().find(|s| s.rank == rank)
    }

    pub fn to_json(&self) -> Value {
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| {
                let rejected: serde_json::Map<String, Value> =
                    s.rejected.iter().map(|(f, c)| (f.to_string(), json!(c))).collect();
                json!({
                    "rank": s.rank,
                    "explored": s.explored,
                    "rejected": rejected,
                    "candidates": s.candidates.iter().map(Candidate::to_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "n": self.n,
            "entry_bound": self.entry_bound,
            "completeness": format!("relative to entry bound {}", self.entry_bound),
            "filters": self.filters.label(),
            "resource_guard": { "max_states": self.max_states, "tripped": self.guard_tripped },
            "sections": sections,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}  entry bound = {}  filters = {}", self.n, self.entry_bound, self.filters.label());
        if self.guard_tripped {
            let _ = writeln!(out, "RESOURCE GUARD TRIPPED after {} states: report is partial", self.max_states);
        }
        for s in &self.sections {
            let _ = writeln!(out);
            let _ = writeln!(out, "rank {}: {} states explored, {} candidate(s)", s.rank, s.explored, s.candidates.len());
            if s.candidates.is_empty() {
                continue;
            }
            let header = ["A_s", "A_t", "apex", "rho(Q)", "decomposition", "tag"];
            let rows: Vec<[String; 6]> = s
                .candidates
                .iter()
                .map(|c| {
                    [
                        format!("{:?}", c.pair.theta_s()),
                        format!("{:?}", c.pair.theta_t()),
                        c.apex.clone().unwrap_or_default(),
                        format!("{:.6}", c.perron.spectral_radius),
                        c.decomposition.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into()),
                        c.tag.to_string(),
                    ]
                })
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|i| rows.iter().map(|r| r[i].chars().count()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                format!("  {}", padded.join("  ").trim_end())
            };
            let _ = writeln!(out, "{}", line(&header.map(String::from)));
            for r in &rows {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        out
    }
}

/// Work unit: a fixed choice of `A_s` (F7 off) or of split `k` and first row
/// of `B` (F7 on); it enumerates the remaining entries itself.
#[derive(Debug, Clone)]
enum Unit {
    Pairs(Vec<MatrixPair>),
    Block { k: usize, first_row: Vec<i64> },
    FreeS { theta_s: IntMatrix },
}

fn tuples(len: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    (0..len).map(|_| 0..=bound).multi_cartesian_product()
}

/// All `r x r` matrices with entries in `[0, E]` and `A^2 = 2A`.
fn quasi_idempotents(r: usize, bound: i64) -> Vec<IntMatrix> {
    tuples(r * r, bound)
        .map(|e| IntMatrix::from_fn(r, |i, j| e[i * r + j]))
        .filter(|a| a.checked_mul(a).ok() == a.checked_scale(2).ok())
        .collect()
}

fn units(n: u32, r: usize, bound: i64, f7: bool) -> Vec<Unit> {
    if r == 1 && f7 {
        let pairs = [(0, 0), (2, 2), (2, 0), (0, 2)]
            .into_iter()
            .map(|(a, b)| MatrixPair::from_rows(n, vec![vec![a]], vec![vec![b]]).expect("valid"))
            .collect();
        return vec![Unit::Pairs(pairs)];
    }
    if f7 {
        (1..r)
            .flat_map(|k| tuples(r - k, bound).map(move |first_row| Unit::Block { k, first_row }))
            .collect()
    } else {
        quasi_idempotents(r, bound).into_iter().map(|theta_s| Unit::FreeS { theta_s }).collect()
    }
}

fn block_pair(n: u32, r: usize, k: usize, b: &[i64], b2: &[i64]) -> MatrixPair {
    let l = r - k;
    let a_s = IntMatrix::from_fn(r, |i, j| match (i < k, j < k) {
        (true, true) => 2 * (i == j) as i64,
        (true, false) => b[i * l + (j - k)],
        _ => 0,
    });
    let a_t = IntMatrix::from_fn(r, |i, j| match (i < k, j < k) {
        (false, false) => 2 * (i == j) as i64,
        (false, true) => b2[(i - k) * k + j],
        _ => 0,
    });
    MatrixPair::new(n, a_s, a_t).expect("nonnegative block pair")
}

struct Search<'a> {
    ctx: &'a NimrepContext,
    filters: &'a FilterConfig,
    counter: &'a AtomicU64,
    tripped: &'a AtomicBool,
    max_states: u64,
}

#[derive(Default)]
struct UnitResult {
    explored: u64,
    rejected: BTreeMap<FilterId, u64>,
    admissible: BTreeMap<Vec<u8>, MatrixPair>,
}

impl Search<'_> {
    /// Returns `false` once the guard trips.
    fn visit(&self, pair: MatrixPair, acc: &mut UnitResult) -> bool {
        if self.counter.fetch_add(1, Ordering::Relaxed) >= self.max_states {
            self.tripped.store(true, Ordering::Relaxed);
            return false;
        }
        acc.explored += 1;
        let eval = evaluate(self.ctx, &pair, self.filters);
        match eval.first_failure() {
            Some(fail) => *acc.rejected.entry(fail.filter).or_default() += 1,
            None => {
                let key = canonicalize(&pair).expect("rank checked");
                acc.admissible.entry(key).or_insert(pair);
            }
        }
        true
    }

    fn run(&self, unit: &Unit, r: usize, bound: i64) -> UnitResult {
        let mut acc = UnitResult::default();
        let n = self.ctx.n();
        match unit {
            Unit::Pairs(pairs) => {
                for p in pairs {
                    if !self.visit(p.clone(), &mut acc) {
                        break;
                    }
                }
            }
            Unit::Block { k, first_row } => {
                let (k, l) = (*k, r - *k);
                'outer: for rest in tuples((k - 1) * l, bound) {
                    let b: Vec<i64> = first_row.iter().chain(&rest).copied().collect();
                    for b2 in tuples(l * k, bound) {
                        if !self.visit(block_pair(n, r, k, &b, &b2), &mut acc) {
                            break 'outer;
                        }
                    }
                }
            }
            Unit::FreeS { theta_s } => {
                for theta_t in quasi_idempotents(r, bound) {
                    let pair = MatrixPair::new(n, theta_s.clone(), theta_t).expect("nonnegative");
                    if !self.visit(pair, &mut acc) {
                        break;
                    }
                }
            }
        }
        acc
    }
}

/// Canonical keys of the left cell modules of rank `r`, with cell names in
/// cell order, plus the module pair used as display representative.
fn cell_keys(ctx: &NimrepContext, r: usize) -> Result<BTreeMap<Vec<u8>, (Vec<String>, MatrixPair)>> {
    let mut out: BTreeMap<Vec<u8>, (Vec<String>, MatrixPair)> = BTreeMap::new();
    for l in 0..ctx.cells.left_cells().len() {
        let module = cell_module(&ctx.table, &ctx.cells, l)?;
        if module.rank() != r {
            continue;
        }
        let (a, b) = module.generator_pair(ctx.group());
        let pair = MatrixPair::new(ctx.n(), a, b)?;
        let entry = out.entry(canonicalize(&pair)?).or_insert_with(|| (vec![], pair));
        entry.0.push(module.name.clone());
    }
    Ok(out)
}

/// Tags admissible pairs and attaches diagnostics. Pairs are assumed to
/// pass the filters.
pub fn match_cell_reps(
    ctx: &NimrepContext,
    knowledge: &KnowledgeTable,
    pairs: impl IntoIterator<Item = MatrixPair>,
) -> Result<Vec<Candidate>> {
    let mut by_rank: BTreeMap<usize, BTreeMap<Vec<u8>, (Vec<String>, MatrixPair)>> = BTreeMap::new();
    let mut out = Vec::new();
    for pair in pairs {
        let r = pair.rank();
        if let std::collections::btree_map::Entry::Vacant(e) = by_rank.entry(r) {
            e.insert(cell_keys(ctx, r)?);
        }
        let key = canonicalize(&pair)?;
        let (tag, shown) = match by_rank[&r].get(&key) {
            Some((names, module_pair)) => (
                Tag::RealizedCell { cell: names[0].clone(), also: names[1..].to_vec() },
                module_pair.clone(),
            ),
            None => {
                let citation = knowledge
                    .lookup(ctx.n(), &key)
                    .map_or_else(|| UNKNOWN_CITATION.to_string(), |e| e.citation.clone());
                (Tag::MatrixAdmissibleUnrealized { citation }, orbit_extreme(&pair, true)?.1)
            }
        };
        let eval = evaluate(ctx, &shown, &FilterConfig::default().without(FilterId::F7));
        let apex = eval.apex.map(|j| ctx.cells.cell_name(Side::TwoSided, j));
        let q = shown.q();
        let perron = perron_analysis(&q);
        out.push(Candidate {
            decomposition: decompose(ctx.n(), shown.theta_s(), shown.theta_t()).ok(),
            perron: PerronSummary {
                spectral_radius: (perron.spectral_radius * 1e9).round() / 1e9,
                top_eigenvalue_simple: perron.top_eigenvalue_simple,
                positive_eigenvector: perron.positive_eigenvector,
            },
            det_q: q.determinant().to_string(),
            char_poly_q: q.char_poly().to_string(),
            pair: shown,
            key,
            tag,
            apex,
        });
    }
    out.sort_by(|a, b| (a.pair.rank(), &a.key).cmp(&(b.pair.rank(), &b.key)));
    Ok(out)
}

pub fn classify(config: &ClassifyConfig, knowledge: &KnowledgeTable) -> Result<ClassificationReport> {
    let ctx = NimrepContext::new(config.n)?;
    classify_with(&ctx, config, knowledge)
}

pub fn classify_with(ctx: &NimrepContext, config: &ClassifyConfig, knowledge: &KnowledgeTable) -> Result<ClassificationReport> {
    config.validate()?;
    if ctx.n() != config.n {
        return Err(Error::MismatchedOrder(ctx.n(), config.n));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("worker pool: {e}")))?;
    let counter = AtomicU64::new(0);
    let tripped = AtomicBool::new(false);
    let search = Search { ctx, filters: &config.filters, counter: &counter, tripped: &tripped, max_states: config.max_states };
    let f7 = config.filters.is_enabled(FilterId::F7);

    let mut ranks = config.ranks.clone();
    ranks.sort_unstable();
    ranks.dedup();
    let mut sections = Vec::new();
    for r in ranks {
        let work = units(config.n, r, config.entry_bound, f7);
        let results: Vec<UnitResult> = pool.install(|| work.par_iter().map(|u| search.run(u, r, config.entry_bound)).collect());
        let mut explored = 0;
        let mut rejected = BTreeMap::new();
        let mut admissible: BTreeMap<Vec<u8>, MatrixPair> = BTreeMap::new();
        for res in results {
            explored += res.explored;
            for (f, c) in res.rejected {
                *rejected.entry(f).or_default() += c;
            }
            for (k, p) in res.admissible {
                admissible.entry(k).or_insert(p);
            }
        }
        let candidates = match_cell_reps(ctx, knowledge, admissible.into_values())?;
        sections.push(RankSection { rank: r, explored, rejected, candidates });
    }
    Ok(ClassificationReport {
        n: config.n,
        entry_bound: config.entry_bound,
        filters: config.filters.clone(),
        max_states: config.max_states,
        guard_tripped: tripped.load(Ordering::Relaxed),
        sections,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(n: u32, s: Vec<Vec<i64>>, t: Vec<Vec<i64>>) -> MatrixPair {
        MatrixPair::from_rows(n, s, t).unwrap()
    }

    fn cor12() -> MatrixPair {
        pair(4, vec![vec![2, 0, 1], vec![0, 2, 1], vec![0, 0, 0]], vec![vec![0, 0, 0], vec![0, 0, 0], vec![1, 1, 2]])
    }

    fn possx2() -> MatrixPair {
        pair(4, vec![vec![2, 2], vec![0, 0]], vec![vec![0, 0], vec![1, 2]])
    }

    fn run(n: u32, ranks: Vec<usize>, bound: i64, filters: FilterConfig) -> ClassificationReport {
        let mut config = ClassifyConfig::new(n, ranks);
        config.entry_bound = bound;
        config.filters = filters;
        classify(&config, &KnowledgeTable::builtin()).unwrap()
    }

    fn shapes(s: &RankSection) -> Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
        s.candidates.iter().map(|c| (c.pair.theta_s().rows(), c.pair.theta_t().rows())).collect()
    }

    #[test]
    fn canonical_keys() {
        let p = cor12();
        assert_eq!(canonicalize(&p).unwrap(), canonicalize(&p.permuted(&[1, 0, 2])).unwrap());
        assert_eq!(canonicalize(&possx2()).unwrap(), canonicalize(&possx2().swapped()).unwrap());
        let z = pair(4, vec![vec![0]], vec![vec![0]]);
        assert_eq!(canonicalize(&z).unwrap(), canonicalize(&z.swapped()).unwrap());
        assert_ne!(canonicalize(&z).unwrap(), canonicalize(&pair(4, vec![vec![2]], vec![vec![2]])).unwrap());
        let big = MatrixPair::new(4, IntMatrix::zeros(7), IntMatrix::zeros(7)).unwrap();
        assert!(matches!(canonicalize(&big), Err(Error::RankTooLarge(7))));
        assert_eq!(orbit_extreme(&possx2().swapped(), true).unwrap().1, possx2());
    }

    #[test]
    fn knowledge_table() {
        let k = KnowledgeTable::builtin();
        assert_eq!(k.version, 1);
        let key = canonicalize(&possx2()).unwrap();
        assert_eq!(k.lookup(4, &key).unwrap().citation, "Thm. noSimple");
        assert_eq!(k.lookup(8, &key).unwrap().id, "possx2");
        assert!(k.lookup(6, &key).is_none());
        assert!(NPattern::parse("n ≡ 2 mod 4").unwrap().matches(6));
        assert!(NPattern::parse("x = 1").is_err());
        assert!(KnowledgeTable::from_json_str(r#"{"version":1,"entries":[{"id":"x","n":"n ≡ 0 mod 0","theta_s":[[0]],"theta_t":[[0]],"status":"MATRIX_ADMISSIBLE_UNREALIZED","citation":"c"}]}"#).is_err());
    }

    #[test]
    fn rank_one_n4() {
        let rep = run(4, vec![1], 4, FilterConfig::default());
        let s = rep.section(1).unwrap();
        assert_eq!(shapes(s), vec![(vec![vec![0]], vec![vec![0]]), (vec![vec![2]], vec![vec![2]])]);
        assert_eq!(s.rejected.get(&FilterId::F4), Some(&2));
        assert!(s.candidates.iter().all(|c| matches!(c.tag, Tag::RealizedCell { .. })));
    }

    #[test]
    fn ranks_two_and_three_n4() {
        let rep = run(4, vec![2, 3], 4, FilterConfig::default());
        let two = rep.section(2).unwrap();
        assert_eq!(shapes(two), vec![(possx2().theta_s().rows(), possx2().theta_t().rows())]);
        assert_eq!(two.candidates[0].tag, Tag::MatrixAdmissibleUnrealized { citation: "Thm. noSimple".into() });
        let three = rep.section(3).unwrap();
        assert_eq!(three.candidates.len(), 1);
        let c = &three.candidates[0];
        assert_eq!(c.pair, cor12());
        assert_eq!(c.tag, Tag::RealizedCell { cell: "Ls".into(), also: vec!["Lt".into()] });
        assert_eq!(c.det_q, "4");
        assert_eq!(c.decomposition.as_ref().unwrap().to_string(), "V(1,-1) ⊕ V(4,1)");
        assert!(!rep.guard_tripped);
    }

    #[test]
    fn other_n_rank_two() {
        assert!(run(5, vec![2], 4, FilterConfig::default()).sections[0].candidates.is_empty());
        let six = run(6, vec![2], 4, FilterConfig::default());
        assert_eq!(shapes(&six.sections[0]), vec![(vec![vec![2, 3], vec![0, 0]], vec![vec![0, 0], vec![1, 2]])]);
        assert_eq!(six.sections[0].candidates[0].tag, Tag::MatrixAdmissibleUnrealized { citation: "Thm. noSimple".into() });
        let three = run(3, vec![2], 4, FilterConfig::default());
        assert_eq!(three.sections[0].candidates.len(), 1);
        assert!(matches!(three.sections[0].candidates[0].tag, Tag::RealizedCell { ref cell, .. } if cell == "Ls"));
    }

    #[test]
    fn f7_off_admits_all_ones() {
        let rep = run(4, vec![2], 4, FilterConfig::default().without(FilterId::F7));
        let ones = vec![vec![1, 1], vec![1, 1]];
        let found = rep.sections[0].candidates.iter().find(|c| c.pair.theta_s().rows() == ones && c.pair.theta_t().rows() == ones);
        let c = found.expect("all-ones pair present without F7");
        assert_eq!(c.tag, Tag::MatrixAdmissibleUnrealized { citation: "Lemma L3".into() });
    }

    #[test]
    fn outputs_are_closed_under_swap_and_sound() {
        for n in 3..=6 {
            let rep = run(n, vec![1, 2, 3], 4, FilterConfig::default());
            let ctx = NimrepContext::new(n).unwrap();
            for s in &rep.sections {
                for c in &s.candidates {
                    assert_eq!(canonicalize(&c.pair.swapped()).unwrap(), c.key);
                    if let Tag::RealizedCell { cell, .. } = &c.tag {
                        let l = ctx.cells.find_cell(Side::Left, cell).unwrap();
                        let (a, b) = cell_module(&ctx.table, &ctx.cells, l).unwrap().generator_pair(ctx.group());
                        assert_eq!((&a, &b), (c.pair.theta_s(), c.pair.theta_t()));
                    }
                }
            }
        }
    }

    #[test]
    fn guard_and_determinism() {
        let mut config = ClassifyConfig::new(4, vec![3]);
        config.max_states = 10;
        let rep = classify(&config, &KnowledgeTable::builtin()).unwrap();
        assert!(rep.guard_tripped);
        assert!(rep.to_text().contains("RESOURCE GUARD"));

        let mut one = ClassifyConfig::new(4, vec![1, 2, 3]);
        let k = KnowledgeTable::builtin();
        let a = classify(&one, &k).unwrap();
        one.jobs = 4;
        let b = classify(&one, &k).unwrap();
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn rejects_bad_config() {
        let k = KnowledgeTable::builtin();
        let mut c = ClassifyConfig::new(4, vec![7]);
        assert!(matches!(classify(&c, &k), Err(Error::RankTooLarge(7))));
        c.ranks = vec![0];
        assert!(classify(&c, &k).is_err());
        c.ranks = vec![1];
        c.entry_bound = 0;
        assert!(classify(&c, &k).is_err());
    }
}

#[cfg(test)]
mod tuple_tests {
    #[test]
    fn empty_tuple_once() {
        assert_eq!(super::tuples(0, 3).count(), 1);
        assert_eq!(super::tuples(2, 3).count(), 16);
    }
}
