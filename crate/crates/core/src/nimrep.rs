//! Matrix pairs `(A_s, A_t)` of nonnegative integers: extension to the whole
//! KL family and the admissibility filters.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{structure_constants, StructureConstantTable};
use crate::cells::{compute_cells, CellPartition, Side};
use crate::dihedral::{DihedralGroup, Generator, GroupElement};
use crate::error::{Error, Result};
use crate::matrix::{BigMatrix, IntMatrix};
use crate::poly::IntPoly;
use crate::reps::left_regular_kl_matrices;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixPair {
    n: u32,
    theta_s: IntMatrix,
    theta_t: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    n: u32,
    rank: usize,
    theta_s: IntMatrix,
    theta_t: IntMatrix,
}

impl MatrixPair {
    pub fn new(n: u32, theta_s: IntMatrix, theta_t: IntMatrix) -> Result<Self> {
        DihedralGroup::new(n)?;
        if theta_s.size() != theta_t.size() {
            return Err(Error::Shape(format!(
                "theta_s is {0}x{0} but theta_t is {1}x{1}",
                theta_s.size(),
                theta_t.size()
            )));
        }
        if theta_s.size() == 0 {
            return Err(Error::Shape("rank must be at least 1".into()));
        }
        for (name, m) in [("theta_s", &theta_s), ("theta_t", &theta_t)] {
            if let Some((i, j, v)) = m.first_negative() {
                return Err(Error::InvalidParameters(format!(
                    "{name} has negative entry {v} at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(MatrixPair { n, theta_s, theta_t })
    }

    pub fn from_rows(n: u32, theta_s: Vec<Vec<i64>>, theta_t: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(n, IntMatrix::from_rows(theta_s)?, IntMatrix::from_rows(theta_t)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.theta_s.size()
    }

    pub fn theta_s(&self) -> &IntMatrix {
        &self.theta_s
    }

    pub fn theta_t(&self) -> &IntMatrix {
        &self.theta_t
    }

    pub fn theta(&self, g: Generator) -> &IntMatrix {
        match g {
            Generator::S => &self.theta_s,
            Generator::T => &self.theta_t,
        }
    }

    /// `Q = A_s + A_t`.
    pub fn q(&self) -> IntMatrix {
        self.theta_s.checked_add(&self.theta_t).expect("entries of a valid pair are small")
    }

    /// The same pair with the roles of `s` and `t` exchanged.
    pub fn swapped(&self) -> Self {
        MatrixPair { n: self.n, theta_s: self.theta_t.clone(), theta_t: self.theta_s.clone() }
    }

    /// Simultaneous conjugation by the permutation `i -> perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        MatrixPair { n: self.n, theta_s: self.theta_s.permuted(perm), theta_t: self.theta_t.permuted(perm) }
    }

    /// Matrices of the generators in the abelianisation: the transposes.
    pub fn abelianized(&self) -> (IntMatrix, IntMatrix) {
        (self.theta_s.transpose(), self.theta_t.transpose())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(PairJson {
            n: self.n,
            rank: self.rank(),
            theta_s: self.theta_s.clone(),
            theta_t: self.theta_t.clone(),
        })
        .expect("pair serialises")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let raw: PairJson = serde_json::from_value(value.clone())?;
        let pair = Self::new(raw.n, raw.theta_s, raw.theta_t)?;
        if pair.rank() != raw.rank {
            return Err(Error::Shape(format!("rank field says {} but matrices are {}x{}", raw.rank, pair.rank(), pair.rank())));
        }
        Ok(pair)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            position: e.column(),
            message: format!("line {}: {e}", e.line()),
        })?;
        Self::from_json(&value)
    }
}

impl fmt::Display for MatrixPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_s = {:?}, A_t = {:?}", self.theta_s, self.theta_t)
    }
}

/// Matrices `A_w` for every `w`, obtained from the pair by the left
/// multiplication rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedRep {
    pub base: MatrixPair,
    pub family: BTreeMap<GroupElement, IntMatrix>,
}

impl ExtendedRep {
    pub fn matrix(&self, w: &GroupElement) -> &IntMatrix {
        &self.family[w]
    }

    /// Elements acting by a nonzero matrix.
    pub fn support(&self) -> BTreeSet<GroupElement> {
        self.family.iter().filter(|(_, m)| !m.is_zero()).map(|(w, _)| *w).collect()
    }

    pub fn to_json(&self, group: &DihedralGroup) -> Value {
        let mut family = serde_json::Map::new();
        for (w, m) in &self.family {
            family.insert(group.render(w), json!(m.rows()));
        }
        json!({ "pair": self.base.to_json(), "family": Value::Object(family) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FilterId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    #[serde(rename = "ANN")]
    Ann,
}

impl FilterId {
    pub const ALL: [FilterId; 8] = [
        FilterId::F1,
        FilterId::F2,
        FilterId::F3,
        FilterId::F4,
        FilterId::F5,
        FilterId::F6,
        FilterId::F7,
        FilterId::Ann,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterId::F1 => "F1",
            FilterId::F2 => "F2",
            FilterId::F3 => "F3",
            FilterId::F4 => "F4",
            FilterId::F5 => "F5",
            FilterId::F6 => "F6",
            FilterId::F7 => "F7",
            FilterId::Ann => "ANN",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FilterId::F1 => "A_s^2 = 2A_s and A_t^2 = 2A_t",
            FilterId::F2 => "every A_w is nonnegative",
            FilterId::F3 => "action graph of Q is strongly connected",
            FilterId::F4 => "support is a down-closed union of two-sided cells",
            FilterId::F5 => "both recursions for w0 agree",
            FilterId::F6 => "((A_s - I)(A_t - I))^n = I",
            FilterId::F7 => "block form 2I over 0 for A_s, mirrored for A_t",
            FilterId::Ann => "global annihilator of the apex kills Q",
        }
    }

    /// F2 and F5 come with the extension and cannot be switched off.
    pub fn is_mandatory(self) -> bool {
        matches!(self, FilterId::F2 | FilterId::F5)
    }
}

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FilterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse { position: 0, message: format!("unknown filter {s:?}; expected F1..F7 or ANN") })
    }
}

/// Failure evidence. Matrix indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Entry { matrix: String, row: usize, col: usize, value: String },
    Element { element: String },
    NoPath { from: usize, to: usize },
    Relation { relation: String },
    Overflow { element: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Entry { matrix, row, col, value } => write!(f, "{matrix}[{row},{col}] = {value}"),
            Witness::Element { element } => write!(f, "element {element}"),
            Witness::NoPath { from, to } => write!(f, "no path {from}->{to}"),
            Witness::Relation { relation } => write!(f, "{relation} fails"),
            Witness::Overflow { element } => write!(f, "i64 overflow at {element}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub filter: FilterId,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl FilterReport {
    pub fn pass(filter: FilterId) -> Self {
        FilterReport { filter, passed: true, witness: None }
    }

    pub fn fail(filter: FilterId, witness: Witness) -> Self {
        FilterReport { filter, passed: false, witness: Some(witness) }
    }
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None if self.passed => write!(f, "{} PASS", self.filter),
            None => write!(f, "{} FAIL", self.filter),
            Some(w) => write!(f, "{} {} ({w})", self.filter, if self.passed { "PASS" } else { "FAIL" }),
        }
    }
}

fn entry_witness(matrix: impl Into<String>, i: usize, j: usize, value: impl ToString) -> Witness {
    Witness::Entry { matrix: matrix.into(), row: i + 1, col: j + 1, value: value.to_string() }
}

fn first_difference(a: &IntMatrix, b: &IntMatrix) -> Option<(usize, usize)> {
    (0..a.size()).flat_map(|i| (0..a.size()).map(move |j| (i, j))).find(|&(i, j)| a.get(i, j) != b.get(i, j))
}

/// Builds `A_w` by increasing length: for `w = x w'` with `x w' > w'`,
/// `A_w = A_x A_{w'} - A_{y w'}` where `y` is the other generator.
/// `w0` is computed along both letters and the results compared.
pub fn extend(pair: &MatrixPair) -> std::result::Result<ExtendedRep, FilterReport> {
    extend_checked(pair, None)
}

/// Zero `A_w` with some nonzero `A_u`, `w <=_J u`, among the computed ones.
fn support_violation(cells: &CellPartition, family: &BTreeMap<GroupElement, IntMatrix>) -> Option<GroupElement> {
    family.iter().filter(|(_, m)| m.is_zero()).map(|(w, _)| *w).find(|w| {
        family.iter().any(|(u, m)| !m.is_zero() && cells.leq(Side::TwoSided, w, u))
    })
}

/// As [`extend`], but with `cells` given the support condition (F4) is
/// checked after every length, so that it can fire before a later F2.
pub fn extend_checked(
    pair: &MatrixPair,
    cells: Option<&CellPartition>,
) -> std::result::Result<ExtendedRep, FilterReport> {
    let group = DihedralGroup::new(pair.n()).expect("pair has valid n");
    let r = pair.rank();
    let mut family = BTreeMap::new();
    family.insert(group.identity(), IntMatrix::identity(r));
    family.insert(group.generator(Generator::S), pair.theta_s.clone());
    family.insert(group.generator(Generator::T), pair.theta_t.clone());

    let step = |family: &BTreeMap<GroupElement, IntMatrix>, x: Generator, len: u32| -> Result<IntMatrix> {
        let prev = group.element(len - 1, Some(x.other()))?;
        let prod = pair.theta(x).checked_mul(&family[&prev])?;
        if len == 2 {
            return Ok(prod);
        }
        let lower = group.element(len - 2, Some(x))?;
        prod.checked_sub(&family[&lower])
    };
    let overflow = |w: &GroupElement| FilterReport::fail(FilterId::F2, Witness::Overflow { element: group.render(w) });
    let negative = |w: &GroupElement, m: &IntMatrix| {
        m.first_negative()
            .map(|(i, j, v)| FilterReport::fail(FilterId::F2, entry_witness(format!("A_{}", group.render(w)), i, j, v)))
    };

    let group_ref = &group;
    let check_support = |family: &BTreeMap<GroupElement, IntMatrix>| -> std::result::Result<(), FilterReport> {
        match cells.and_then(|c| support_violation(c, family)) {
            Some(w) => Err(FilterReport::fail(FilterId::F4, Witness::Element { element: group_ref.render(&w) })),
            None => Ok(()),
        }
    };
    check_support(&family)?;
    let n = pair.n();
    for len in 2..n {
        for x in [Generator::S, Generator::T] {
            let w = group.element(len, Some(x)).expect("length below n");
            let m = step(&family, x, len).map_err(|_| overflow(&w))?;
            if let Some(fail) = negative(&w, &m) {
                return Err(fail);
            }
            family.insert(w, m);
        }
        check_support(&family)?;
    }
    let w0 = group.longest_element();
    let via_s = step(&family, Generator::S, n).map_err(|_| overflow(&w0))?;
    let via_t = step(&family, Generator::T, n).map_err(|_| overflow(&w0))?;
    if let Some((i, j)) = first_difference(&via_s, &via_t) {
        return Err(FilterReport::fail(
            FilterId::F5,
            Witness::Entry {
                matrix: "A_w0".into(),
                row: i + 1,
                col: j + 1,
                value: format!("{} via s, {} via t", via_s.get(i, j), via_t.get(i, j)),
            },
        ));
    }
    if let Some(fail) = negative(&w0, &via_s) {
        return Err(fail);
    }
    family.insert(w0, via_s);
    check_support(&family)?;
    Ok(ExtendedRep { base: pair.clone(), family })
}

/// F1
pub fn check_idempotent(pair: &MatrixPair) -> FilterReport {
    for g in [Generator::S, Generator::T] {
        let a = pair.theta(g);
        let (Ok(sq), Ok(twice)) = (a.checked_mul(a), a.checked_scale(2)) else {
            return FilterReport::fail(FilterId::F1, Witness::Overflow { element: g.letter().to_string() });
        };
        if let Some((i, j)) = first_difference(&sq, &twice) {
            return FilterReport::fail(FilterId::F1, entry_witness(format!("A_{0}^2 - 2A_{0}", g.letter()), i, j, sq.get(i, j) - twice.get(i, j)));
        }
    }
    FilterReport::pass(FilterId::F1)
}

/// Nodes reachable from `start` when `i -> j` is an edge iff `m[j][i] != 0`.
fn reachable(m: &IntMatrix, start: usize) -> Vec<bool> {
    let r = m.size();
    let mut seen = vec![false; r];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for j in 0..r {
            if !seen[j] && m.get(j, i) != 0 {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

pub fn is_irreducible(m: &IntMatrix) -> Option<(usize, usize)> {
    (0..m.size()).find_map(|i| reachable(m, i).iter().position(|&x| !x).map(|j| (i, j)))
}

/// F3
pub fn check_transitive(pair: &MatrixPair) -> FilterReport {
    match is_irreducible(&pair.q()) {
        None => FilterReport::pass(FilterId::F3),
        Some((i, j)) => FilterReport::fail(FilterId::F3, Witness::NoPath { from: i + 1, to: j + 1 }),
    }
}

/// Index of the largest two-sided cell acting nonzero.
pub fn apex(cells: &CellPartition, ext: &ExtendedRep) -> usize {
    let chain = cells.two_sided_chain();
    *chain
        .iter()
        .rev()
        .find(|&&j| cells.two_sided_cells()[j].iter().any(|w| !ext.matrix(w).is_zero()))
        .expect("A_e = I is nonzero")
}

/// F4
pub fn check_apex_support(cells: &CellPartition, ext: &ExtendedRep) -> FilterReport {
    let group = cells.group();
    let support = ext.support();
    for w in group.all_elements() {
        if support.contains(&w) {
            continue;
        }
        // w acts by zero, so nothing at or above w in the two-sided order may act nonzero
        if support.iter().any(|u| cells.leq(Side::TwoSided, &w, u)) {
            return FilterReport::fail(FilterId::F4, Witness::Element { element: group.render(&w) });
        }
    }
    FilterReport::pass(FilterId::F4)
}

/// Index sets of the block form, 0-based, if the pair has it.
pub fn l3_split(pair: &MatrixPair) -> std::result::Result<(Vec<usize>, Vec<usize>), Witness> {
    let (a_s, a_t) = (pair.theta_s(), pair.theta_t());
    let r = pair.rank();
    if r == 1 {
        let ok = [a_s.get(0, 0), a_t.get(0, 0)].iter().all(|&v| v == 0 || v == 2);
        return if ok {
            let s = if a_s.get(0, 0) == 2 { vec![0] } else { vec![] };
            let t = if a_t.get(0, 0) == 2 { vec![0] } else { vec![] };
            Ok((s, t))
        } else {
            let (name, v) = if a_s.get(0, 0) == 0 || a_s.get(0, 0) == 2 { ("A_t", a_t.get(0, 0)) } else { ("A_s", a_s.get(0, 0)) };
            Err(entry_witness(name, 0, 0, v))
        };
    }
    for (name, m) in [("A_s", a_s), ("A_t", a_t)] {
        if let Some(i) = (0..r).find(|&i| m.get(i, i) != 0 && m.get(i, i) != 2) {
            return Err(entry_witness(name, i, i, m.get(i, i)));
        }
    }
    let s: Vec<usize> = (0..r).filter(|&i| a_s.get(i, i) == 2).collect();
    let t: Vec<usize> = (0..r).filter(|&i| a_s.get(i, i) != 2).collect();
    if s.is_empty() || t.is_empty() {
        return Err(Witness::Relation { relation: "1 <= k < r".into() });
    }
    for (name, m, home, away) in [("A_s", a_s, &s, &t), ("A_t", a_t, &t, &s)] {
        for &i in home {
            for &j in home {
                let want = if i == j { 2 } else { 0 };
                if m.get(i, j) != want {
                    return Err(entry_witness(name, i, j, m.get(i, j)));
                }
            }
        }
        for &i in away {
            for j in 0..r {
                if m.get(i, j) != 0 {
                    return Err(entry_witness(name, i, j, m.get(i, j)));
                }
            }
        }
    }
    Ok((s, t))
}

/// F7
pub fn check_l3_form(pair: &MatrixPair) -> FilterReport {
    match l3_split(pair) {
        Ok(_) => FilterReport::pass(FilterId::F7),
        Err(w) => FilterReport::fail(FilterId::F7, w),
    }
}

/// F6
pub fn check_group_relations(pair: &MatrixPair) -> FilterReport {
    let id = IntMatrix::identity(pair.rank());
    let relation = format!("(st)^{} = e", pair.n());
    let power = pair
        .theta_s
        .checked_sub(&id)
        .and_then(|s| s.checked_mul(&pair.theta_t.checked_sub(&id)?))
        .and_then(|st| st.checked_pow(pair.n()));
    match power {
        Ok(p) if p == id => FilterReport::pass(FilterId::F6),
        Ok(_) => FilterReport::fail(FilterId::F6, Witness::Relation { relation }),
        Err(_) => FilterReport::fail(FilterId::F6, Witness::Overflow { element: "(st)^n".into() }),
    }
}

/// Squarefree characteristic polynomial of `s + t` (KL generators) acting on
/// the quotient of the left regular module by all cells above `apex`.
pub fn global_annihilator(table: &StructureConstantTable, cells: &CellPartition, apex: usize) -> Result<IntPoly> {
    let group = table.group();
    let (a_s, a_t) = left_regular_kl_matrices(table)?;
    let q = a_s.checked_add(&a_t)?;
    let keep: Vec<usize> = group
        .all_elements()
        .iter()
        .filter(|w| cells.cell_leq(Side::TwoSided, cells.cell_index(Side::TwoSided, w), apex))
        .map(|w| group.index_of(w))
        .collect();
    let sub = IntMatrix::from_fn(keep.len(), |i, j| q.get(keep[i], keep[j]));
    Ok(sub.char_poly().squarefree_part())
}

pub fn annihilator_check(p: &IntPoly, q: &IntMatrix) -> FilterReport {
    let value = p.eval_matrix(&q.to_big());
    let r = q.size();
    match (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).find(|&(i, j)| !value.get(i, j).is_zero()) {
        None => FilterReport::pass(FilterId::Ann),
        Some((i, j)) => FilterReport::fail(FilterId::Ann, entry_witness("p(Q)", i, j, value.get(i, j))),
    }
}

/// Exact determinant of the block matrix with `2I_k`, `2I_l` on the diagonal,
/// `(lambda_i v_j)` top right and `(mu_i w_j)` bottom left, next to the closed
/// form `2^N - 2^(N-2) (sum lambda_j w_j)(sum mu_i v_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetIdentity {
    pub matrix: BigMatrix,
    pub determinant: BigInt,
    pub formula: BigInt,
}

pub fn det_identity(lambda: &[i64], mu: &[i64], v: &[i64], w: &[i64]) -> Result<DetIdentity> {
    let (k, l) = (lambda.len(), mu.len());
    if k == 0 || l == 0 || v.len() != l || w.len() != k {
        return Err(Error::InvalidParameters(format!(
            "need |lambda| = |w| = k >= 1 and |mu| = |v| = l >= 1, got {k}, {}, {l}, {}",
            w.len(),
            v.len()
        )));
    }
    if lambda[0] != 1 || mu[0] != 1 {
        return Err(Error::InvalidParameters("lambda_1 and mu_1 must be 1".into()));
    }
    if lambda.iter().chain(mu).chain(v).chain(w).any(|&x| x <= 0) {
        return Err(Error::InvalidParameters("all parameters must be positive".into()));
    }
    let size = k + l;
    let matrix = BigMatrix::from_fn(size, |i, j| {
        let value = match (i < k, j < k) {
            (true, true) | (false, false) => {
                if i == j {
                    2
                } else {
                    0
                }
            }
            (true, false) => lambda[i] * v[j - k],
            (false, true) => mu[i - k] * w[j],
        };
        BigInt::from(value)
    });
    let determinant = matrix.determinant();
    let lw: BigInt = lambda.iter().zip(w).map(|(a, b)| BigInt::from(*a) * b).sum();
    let mv: BigInt = mu.iter().zip(v).map(|(a, b)| BigInt::from(*a) * b).sum();
    let two = BigInt::from(2);
    let formula = num_traits::pow(two.clone(), size) - num_traits::pow(two, size - 2) * lw * mv;
    Ok(DetIdentity { matrix, determinant, formula })
}

/// Which optional filters are switched on. F2 and F5 always are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FilterConfig {
    enabled: BTreeSet<FilterId>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { enabled: FilterId::ALL.into_iter().collect() }
    }
}

impl FilterConfig {
    pub fn without(mut self, filter: FilterId) -> Self {
        if !filter.is_mandatory() {
            self.enabled.remove(&filter);
        }
        self
    }

    pub fn is_enabled(&self, filter: FilterId) -> bool {
        filter.is_mandatory() || self.enabled.contains(&filter)
    }

    pub fn disabled(&self) -> Vec<FilterId> {
        FilterId::ALL.into_iter().filter(|f| !self.is_enabled(*f)).collect()
    }

    pub fn label(&self) -> String {
        let on: Vec<&str> = FilterId::ALL.iter().filter(|f| self.is_enabled(**f)).map(|f| f.as_str()).collect();
        on.join(",")
    }
}

/// Read-only data for one `n`, shared between workers.
#[derive(Debug, Clone)]
pub struct NimrepContext {
    pub table: StructureConstantTable,
    pub cells: CellPartition,
    annihilators: BTreeMap<usize, IntPoly>,
}

impl NimrepContext {
    pub fn new(n: u32) -> Result<Self> {
        let table = structure_constants(n)?;
        let cells = compute_cells(&table);
        let mut annihilators = BTreeMap::new();
        for j in 0..cells.two_sided_cells().len() {
            annihilators.insert(j, global_annihilator(&table, &cells, j)?);
        }
        Ok(NimrepContext { table, cells, annihilators })
    }

    pub fn n(&self) -> u32 {
        self.table.n()
    }

    pub fn group(&self) -> &DihedralGroup {
        self.table.group()
    }

    pub fn annihilator(&self, apex: usize) -> &IntPoly {
        &self.annihilators[&apex]
    }

    pub fn with_annihilator(mut self, apex: usize, p: IntPoly) -> Self {
        self.annihilators.insert(apex, p);
        self
    }
}

/// Outcome of running the filter chain on a pair.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// Reports for the filters actually run, in evaluation order.
    pub reports: Vec<FilterReport>,
    pub extension: Option<ExtendedRep>,
    pub apex: Option<usize>,
}

impl Evaluation {
    pub fn first_failure(&self) -> Option<&FilterReport> {
        self.reports.iter().find(|r| !r.passed)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Runs F1, F7, F3, F6, the extension (F2, F5, with F4 checked along the
/// way) and ANN in that order, stopping at the first failure.
pub fn evaluate(ctx: &NimrepContext, pair: &MatrixPair, config: &FilterConfig) -> Evaluation {
    let mut out = Evaluation { reports: Vec::new(), extension: None, apex: None };
    let cheap: [(FilterId, fn(&MatrixPair) -> FilterReport); 4] = [
        (FilterId::F1, check_idempotent),
        (FilterId::F7, check_l3_form),
        (FilterId::F3, check_transitive),
        (FilterId::F6, check_group_relations),
    ];
    for (id, check) in cheap {
        if config.is_enabled(id) {
            let report = check(pair);
            let failed = !report.passed;
            out.reports.push(report);
            if failed {
                return out;
            }
        }
    }
    let support_cells = config.is_enabled(FilterId::F4).then_some(&ctx.cells);
    let ext = match extend_checked(pair, support_cells) {
        Ok(ext) => ext,
        Err(fail) => {
            out.reports.push(fail);
            return out;
        }
    };
    out.reports.push(FilterReport::pass(FilterId::F2));
    out.reports.push(FilterReport::pass(FilterId::F5));
    if support_cells.is_some() {
        out.reports.push(FilterReport::pass(FilterId::F4));
    }
    let top = apex(&ctx.cells, &ext);
    out.apex = Some(top);
    if config.is_enabled(FilterId::Ann) {
        out.reports.push(annihilator_check(ctx.annihilator(top), &pair.q()));
    }
    out.extension = Some(ext);
    out
}
