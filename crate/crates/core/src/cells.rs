//! Left, right and two-sided cells of the KL basis and the decategorified
//! cell modules.
//!
//! `u <=_L w` when `w` occurs with nonzero coefficient in `h * u` for some
//! `h` (closed transitively); the right and two-sided versions use `u * h`
//! and both sides. Cells are the strongly connected components.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde_json::{json, Map, Value};

use crate::algebra::StructureConstantTable;
use crate::dihedral::{DihedralGroup, Generator, GroupElement};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

#[derive(Debug, Clone)]
struct Preorder {
    /// Cells, each sorted, listed by their smallest member.
    cells: Vec<Vec<GroupElement>>,
    /// Cell index of every element, by `DihedralGroup::index_of`.
    cell_of: Vec<usize>,
    /// `leq[a][b]` iff cell `a` <= cell `b`.
    leq: Vec<Vec<bool>>,
}

impl Preorder {
    fn from_edges(group: &DihedralGroup, edges: &[(usize, usize)]) -> Self {
        let size = group.order();
        let all = group.all_elements();
        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..size).map(|_| graph.add_node(())).collect();
        for &(a, b) in edges {
            graph.update_edge(nodes[a], nodes[b], ());
        }
        let mut cells: Vec<Vec<GroupElement>> = tarjan_scc(&graph)
            .into_iter()
            .map(|comp| {
                let mut members: Vec<_> = comp.into_iter().map(|v| all[v.index()]).collect();
                members.sort();
                members
            })
            .collect();
        cells.sort();
        let mut cell_of = vec![0; size];
        for (c, members) in cells.iter().enumerate() {
            for w in members {
                cell_of[group.index_of(w)] = c;
            }
        }
        // reachability on elements, then lifted to cells
        let mut reach = vec![vec![false; size]; size];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            reach[a][b] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if reach[i][k] {
                    for j in 0..size {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut leq = vec![vec![false; cells.len()]; cells.len()];
        for i in 0..size {
            for j in 0..size {
                if reach[i][j] {
                    leq[cell_of[i]][cell_of[j]] = true;
                }
            }
        }
        Preorder { cells, cell_of, leq }
    }
}

/// Left, right and two-sided cells with their induced orders.
#[derive(Debug, Clone)]
pub struct CellPartition {
    group: DihedralGroup,
    left: Preorder,
    right: Preorder,
    two_sided: Preorder,
}

fn preorder_edges(table: &StructureConstantTable, side: Side) -> Vec<(usize, usize)> {
    let group = table.group();
    let all = group.all_elements();
    let mut edges = Vec::new();
    for u in &all {
        for h in &all {
            let mut products = Vec::with_capacity(2);
            if side != Side::Right {
                products.push(table.product(h, u));
            }
            if side != Side::Left {
                products.push(table.product(u, h));
            }
            for prod in products {
                for v in prod.support() {
                    edges.push((group.index_of(u), group.index_of(v)));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

pub fn compute_cells(table: &StructureConstantTable) -> CellPartition {
    let group = *table.group();
    CellPartition {
        group,
        left: Preorder::from_edges(&group, &preorder_edges(table, Side::Left)),
        right: Preorder::from_edges(&group, &preorder_edges(table, Side::Right)),
        two_sided: Preorder::from_edges(&group, &preorder_edges(table, Side::TwoSided)),
    }
}

/// Left cells described by the last letter of the reduced word:
/// `{e}`, the non-extremal elements ending in `s`, those ending in `t`, `{w0}`.
pub fn closed_form_left_cells(group: &DihedralGroup) -> Vec<Vec<GroupElement>> {
    let inner = |g: Generator| -> Vec<GroupElement> {
        group
            .all_elements()
            .into_iter()
            .filter(|w| !w.is_identity() && !group.is_longest(w) && w.trailing() == Some(g))
            .collect()
    };
    vec![vec![group.identity()], inner(Generator::S), inner(Generator::T), vec![group.longest_element()]]
}

/// Why a two-sided cell fails to be strongly regular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityWitness {
    LeftComparable { lower: String, upper: String },
    RightComparable { lower: String, upper: String },
    Intersection { left: String, right: String, members: Vec<GroupElement> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongRegularity {
    pub regular: bool,
    pub witness: Option<RegularityWitness>,
}

impl CellPartition {
    pub fn group(&self) -> &DihedralGroup {
        &self.group
    }

    fn preorder(&self, side: Side) -> &Preorder {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::TwoSided => &self.two_sided,
        }
    }

    pub fn cells(&self, side: Side) -> &[Vec<GroupElement>] {
        &self.preorder(side).cells
    }

    pub fn left_cells(&self) -> &[Vec<GroupElement>] {
        self.cells(Side::Left)
    }

    pub fn right_cells(&self) -> &[Vec<GroupElement>] {
        self.cells(Side::Right)
    }

    pub fn two_sided_cells(&self) -> &[Vec<GroupElement>] {
        self.cells(Side::TwoSided)
    }

    pub fn cell_index(&self, side: Side, w: &GroupElement) -> usize {
        self.preorder(side).cell_of[self.group.index_of(w)]
    }

    /// Cell order: `cell_leq(side, a, b)` iff cell `a` lies below cell `b`.
    pub fn cell_leq(&self, side: Side, a: usize, b: usize) -> bool {
        self.preorder(side).leq[a][b]
    }

    /// Element order `u <= w` for the chosen side.
    pub fn leq(&self, side: Side, u: &GroupElement, w: &GroupElement) -> bool {
        self.cell_leq(side, self.cell_index(side, u), self.cell_index(side, w))
    }

    /// `Le`, `Ls`, `Lt`, `Lw0` (and `R...`) after the distinguished member;
    /// two-sided cells are `J1 < J2 < J3`.
    pub fn cell_name(&self, side: Side, index: usize) -> String {
        let members = &self.preorder(side).cells[index];
        let prefix = match side {
            Side::Left => "L",
            Side::Right => "R",
            Side::TwoSided => return format!("J{}", self.two_sided_rank(index) + 1),
        };
        let g = &self.group;
        let tag = if members.contains(&g.identity()) {
            "e".to_string()
        } else if members.contains(&g.longest_element()) {
            "w0".to_string()
        } else {
            members[0].to_string()
        };
        format!("{prefix}{tag}")
    }

    /// Number of two-sided cells strictly below the given one.
    fn two_sided_rank(&self, index: usize) -> usize {
        let p = &self.two_sided;
        (0..p.cells.len()).filter(|&j| j != index && p.leq[j][index]).count()
    }

    pub fn find_cell(&self, side: Side, name: &str) -> Option<usize> {
        (0..self.cells(side).len()).find(|&i| self.cell_name(side, i) == name)
    }

    /// Two-sided cells listed from the bottom of `<=_J` upwards.
    pub fn two_sided_chain(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.two_sided.cells.len()).collect();
        idx.sort_by_key(|&i| self.two_sided_rank(i));
        idx
    }

    pub fn is_linear_two_sided_order(&self) -> bool {
        let k = self.two_sided.cells.len();
        (0..k).all(|a| (0..k).all(|b| self.two_sided.leq[a][b] || self.two_sided.leq[b][a]))
    }

    /// Cells of `side` contained in the two-sided cell `j`.
    pub fn cells_in(&self, side: Side, j: usize) -> Vec<usize> {
        (0..self.cells(side).len())
            .filter(|&c| self.cell_index(Side::TwoSided, &self.cells(side)[c][0]) == j)
            .collect()
    }

    pub fn is_strongly_regular(&self, j: usize) -> StrongRegularity {
        let lefts = self.cells_in(Side::Left, j);
        let rights = self.cells_in(Side::Right, j);
        for (side, list) in [(Side::Left, &lefts), (Side::Right, &rights)] {
            for &a in list {
                for &b in list {
                    if a != b && self.cell_leq(side, a, b) {
                        let (lower, upper) = (self.cell_name(side, a), self.cell_name(side, b));
                        let witness = match side {
                            Side::Left => RegularityWitness::LeftComparable { lower, upper },
                            _ => RegularityWitness::RightComparable { lower, upper },
                        };
                        return StrongRegularity { regular: false, witness: Some(witness) };
                    }
                }
            }
        }
        for &l in &lefts {
            for &r in &rights {
                let members: Vec<GroupElement> = self.left.cells[l]
                    .iter()
                    .filter(|w| self.right.cells[r].contains(w))
                    .copied()
                    .collect();
                if members.len() != 1 {
                    return StrongRegularity {
                        regular: false,
                        witness: Some(RegularityWitness::Intersection {
                            left: self.cell_name(Side::Left, l),
                            right: self.cell_name(Side::Right, r),
                            members,
                        }),
                    };
                }
            }
        }
        StrongRegularity { regular: true, witness: None }
    }

    /// DOT rendering of the two-sided chain with the left/right grid of
    /// each non-singleton two-sided cell.
    pub fn to_dot(&self) -> String {
        let g = &self.group;
        let names = |ws: &[GroupElement]| ws.iter().map(|w| g.render(w)).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let _ = writeln!(out, "digraph cells_D{} {{", g.n());
        let _ = writeln!(out, "  rankdir=TB;");
        let _ = writeln!(out, "  node [shape=box];");
        let chain = self.two_sided_chain();
        for &j in &chain {
            let name = self.cell_name(Side::TwoSided, j);
            let _ = writeln!(out, "  {name} [label=\"{name}: {}\"];", names(&self.two_sided.cells[j]));
            let lefts = self.cells_in(Side::Left, j);
            let rights = self.cells_in(Side::Right, j);
            if lefts.len() * rights.len() <= 1 {
                continue;
            }
            let _ = writeln!(out, "  subgraph cluster_{name} {{");
            let _ = writeln!(out, "    label=\"{name} left/right grid\";");
            for &r in &rights {
                for &l in &lefts {
                    let ln = self.cell_name(Side::Left, l);
                    let rn = self.cell_name(Side::Right, r);
                    let members: Vec<GroupElement> = self.left.cells[l]
                        .iter()
                        .filter(|w| self.right.cells[r].contains(w))
                        .copied()
                        .collect();
                    let _ = writeln!(out, "    {ln}_{rn} [label=\"{ln} ∩ {rn}: {}\"];", names(&members));
                }
            }
            let _ = writeln!(out, "  }}");
            for &r in &rights {
                for &l in &lefts {
                    let ln = self.cell_name(Side::Left, l);
                    let rn = self.cell_name(Side::Right, r);
                    let _ = writeln!(out, "  {name} -> {ln}_{rn} [style=dashed, arrowhead=none];");
                }
            }
        }
        for pair in chain.windows(2) {
            let a = self.cell_name(Side::TwoSided, pair[0]);
            let b = self.cell_name(Side::TwoSided, pair[1]);
            let _ = writeln!(out, "  {a} -> {b};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        let mut obj = Map::new();
        obj.insert("n".into(), json!(g.n()));
        for (key, side) in [("left_cells", Side::Left), ("right_cells", Side::Right), ("two_sided_cells", Side::TwoSided)] {
            let mut cells = Map::new();
            let order: Vec<usize> = match side {
                Side::TwoSided => self.two_sided_chain(),
                _ => (0..self.cells(side).len()).collect(),
            };
            for i in order {
                let members: Vec<String> = self.cells(side)[i].iter().map(|w| g.render(w)).collect();
                cells.insert(self.cell_name(side, i), json!(members));
            }
            obj.insert(key.into(), Value::Object(cells));
        }
        let chain: Vec<String> = self.two_sided_chain().iter().map(|&j| self.cell_name(Side::TwoSided, j)).collect();
        obj.insert("j_order".into(), json!(chain));
        Value::Object(obj)
    }
}

/// Action of every KL basis vector on the span of one left (or right) cell,
/// with the terms outside the cell projected away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellModule {
    pub n: u32,
    pub name: String,
    pub basis: Vec<GroupElement>,
    /// `matrices[w]` has column `j` equal to the image of `basis[j]`.
    pub matrices: BTreeMap<GroupElement, IntMatrix>,
}

impl CellModule {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self, w: &GroupElement) -> &IntMatrix {
        &self.matrices[w]
    }

    pub fn generator_pair(&self, group: &DihedralGroup) -> (IntMatrix, IntMatrix) {
        (
            self.matrix(&group.generator(Generator::S)).clone(),
            self.matrix(&group.generator(Generator::T)).clone(),
        )
    }

    /// `{"n":4,"cell":["s","sts","ts"],"matrices":{"s":[[2,0,1],...], ...}}`
    pub fn to_json(&self, group: &DihedralGroup, all: bool) -> Value {
        let mut mats = Map::new();
        for (w, m) in &self.matrices {
            if all || w.length() == 1 {
                mats.insert(group.render(w), json!(m.rows()));
            }
        }
        json!({
            "n": self.n,
            "name": self.name,
            "cell": self.basis.iter().map(|w| group.render(w)).collect::<Vec<_>>(),
            "matrices": Value::Object(mats),
        })
    }
}

/// Basis order inside a cell: elements whose reduced word starts with the
/// letter the cell is named after come first, each group by length.
fn cell_basis_order(members: &[GroupElement], anchor: Option<Generator>) -> Vec<GroupElement> {
    let mut basis = members.to_vec();
    basis.sort_by_key(|w| (w.leading() != anchor, w.length(), w.leading()));
    basis
}

fn anchor_letter(group: &DihedralGroup, members: &[GroupElement]) -> Option<Generator> {
    members
        .iter()
        .find(|w| w.length() == 1)
        .and_then(|w| w.leading())
        .or_else(|| members.first().filter(|w| !group.is_longest(w)).and_then(|w| w.leading()))
}

pub fn cell_module(
    table: &StructureConstantTable,
    cells: &CellPartition,
    left_cell: usize,
) -> Result<CellModule> {
    build_cell_module(table, cells, Side::Left, left_cell)
}

/// Right cell module: the cell acted on from the right, i.e. the left cell
/// module of the inverse cell transported along `w -> w^{-1}`.
pub fn right_cell_module(
    table: &StructureConstantTable,
    cells: &CellPartition,
    right_cell: usize,
) -> Result<CellModule> {
    build_cell_module(table, cells, Side::Right, right_cell)
}

fn build_cell_module(
    table: &StructureConstantTable,
    cells: &CellPartition,
    side: Side,
    index: usize,
) -> Result<CellModule> {
    let group = table.group();
    let members = cells
        .cells(side)
        .get(index)
        .ok_or_else(|| Error::UnknownCell(format!("{side:?} cell #{index}")))?;
    let anchor = anchor_letter(group, members);
    let basis = cell_basis_order(members, anchor);
    let pos: BTreeMap<GroupElement, usize> = basis.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let home = cells.cell_index(side, &basis[0]);
    let mut matrices = BTreeMap::new();
    for u in group.all_elements() {
        let mut m = IntMatrix::zeros(basis.len());
        for (j, b) in basis.iter().enumerate() {
            let prod = match side {
                Side::Right => table.product(b, &u),
                _ => table.product(&u, b),
            };
            for (v, c) in prod.terms() {
                match pos.get(v) {
                    Some(&i) => {
                        let c = c.to_i64().ok_or_else(|| Error::Overflow("cell module entry".into()))?;
                        m.set(i, j, c);
                    }
                    None => {
                        let other = cells.cell_index(side, v);
                        assert!(
                            cells.cell_leq(side, home, other) && !cells.cell_leq(side, other, home),
                            "projected term {v} of {u} * {b} does not lie strictly above the cell"
                        );
                        debug_assert!(!c.is_zero());
                    }
                }
            }
        }
        matrices.insert(u, m);
    }
    Ok(CellModule { n: group.n(), name: cells.cell_name(side, index), basis, matrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_constants;

    fn setup(n: u32) -> (StructureConstantTable, CellPartition) {
        let table = structure_constants(n).unwrap();
        let cells = compute_cells(&table);
        (table, cells)
    }

    fn names(g: &DihedralGroup, ws: &[GroupElement]) -> Vec<String> {
        ws.iter().map(|w| g.render(w)).collect()
    }

    #[test]
    fn left_cells_d4() {
        let (table, cells) = setup(4);
        let g = table.group();
        let ls = cells.find_cell(Side::Left, "Ls").unwrap();
        let mut members = names(g, &cells.left_cells()[ls]);
        members.sort();
        assert_eq!(members, ["s", "sts", "ts"]);
        let chain = cells.two_sided_chain();
        assert_eq!(names(g, &cells.two_sided_cells()[chain[1]]), ["s", "t", "st", "ts", "sts", "tst"]);
        assert_eq!(names(g, &cells.two_sided_cells()[chain[0]]), ["e"]);
        assert_eq!(names(g, &cells.two_sided_cells()[chain[2]]), ["w0"]);
    }

    #[test]
    fn left_cells_d3() {
        let (table, cells) = setup(3);
        let g = table.group();
        let got: Vec<Vec<String>> = cells.left_cells().iter().map(|c| names(g, c)).collect();
        assert_eq!(got, vec![vec!["e"], vec!["s", "ts"], vec!["t", "st"], vec!["w0"]]);
    }

    #[test]
    fn cells_match_closed_form() {
        for n in 3..=12 {
            let (table, cells) = setup(n);
            let mut expected = closed_form_left_cells(table.group());
            expected.sort();
            assert_eq!(cells.left_cells(), expected.as_slice(), "n = {n}");
            assert_eq!(cells.two_sided_cells().len(), 3);
            assert!(cells.is_linear_two_sided_order());
            let g = table.group();
            // right cells are the inverses of left cells
            for l in cells.left_cells() {
                let mut inv: Vec<_> = l.iter().map(|w| g.inverse(w)).collect();
                inv.sort();
                assert!(cells.right_cells().contains(&inv));
            }
            // refinement
            for side in [Side::Left, Side::Right] {
                for c in cells.cells(side) {
                    let j = cells.cell_index(Side::TwoSided, &c[0]);
                    assert!(c.iter().all(|w| cells.cell_index(Side::TwoSided, w) == j));
                }
            }
        }
    }

    #[test]
    fn structure_constants_respect_preorders() {
        for n in 3..=8 {
            let (table, cells) = setup(n);
            let g = table.group();
            for u in g.all_elements() {
                for w in g.all_elements() {
                    for v in table.product(&u, &w).support() {
                        assert!(cells.leq(Side::Left, &w, v));
                        assert!(cells.leq(Side::Right, &u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn strong_regularity_d4() {
        let (_, cells) = setup(4);
        let chain = cells.two_sided_chain();
        assert!(cells.is_strongly_regular(chain[0]).regular);
        assert!(cells.is_strongly_regular(chain[2]).regular);
        let j2 = cells.is_strongly_regular(chain[1]);
        assert!(!j2.regular);
        match j2.witness {
            Some(RegularityWitness::Intersection { left, right, members }) => {
                assert_eq!((left.as_str(), right.as_str()), ("Ls", "Rs"));
                assert_eq!(members.len(), 2);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn cell_module_ls_d4() {
        let (table, cells) = setup(4);
        let g = *table.group();
        let m = cell_module(&table, &cells, cells.find_cell(Side::Left, "Ls").unwrap()).unwrap();
        assert_eq!(names(&g, &m.basis), ["s", "sts", "ts"]);
        let (a_s, a_t) = m.generator_pair(&g);
        assert_eq!(a_s.rows(), vec![vec![2, 0, 1], vec![0, 2, 1], vec![0, 0, 0]]);
        assert_eq!(a_t.rows(), vec![vec![0, 0, 0], vec![0, 0, 0], vec![1, 1, 2]]);
        assert_eq!(*m.matrix(&g.identity()), IntMatrix::identity(3));
        assert!(m.matrices.values().all(IntMatrix::is_nonnegative));
    }

    #[test]
    fn one_element_cells() {
        for n in 3..=8 {
            let (table, cells) = setup(n);
            let g = *table.group();
            let le = cell_module(&table, &cells, cells.find_cell(Side::Left, "Le").unwrap()).unwrap();
            let (a_s, a_t) = le.generator_pair(&g);
            assert!(a_s.is_zero() && a_t.is_zero());
            assert_eq!(*le.matrix(&g.identity()), IntMatrix::identity(1));
            let lw0 = cell_module(&table, &cells, cells.find_cell(Side::Left, "Lw0").unwrap()).unwrap();
            for w in g.all_elements() {
                let expected = if w.is_identity() { 1 } else { 2 * w.length() as i64 };
                assert_eq!(*lw0.matrix(&w), IntMatrix::scalar(1, expected));
            }
        }
    }

    #[test]
    fn cell_modules_are_representations() {
        for n in 3..=7 {
            let (table, cells) = setup(n);
            let g = *table.group();
            for side in [Side::Left, Side::Right] {
                for c in 0..cells.cells(side).len() {
                    let m = build_cell_module(&table, &cells, side, c).unwrap();
                    for u in g.all_elements() {
                        for w in g.all_elements() {
                            let mut expected = IntMatrix::zeros(m.rank());
                            for (v, k) in table.product(&u, &w).terms() {
                                let term = m.matrix(v).checked_scale(k.to_i64().unwrap()).unwrap();
                                expected = expected.checked_add(&term).unwrap();
                            }
                            let got = match side {
                                Side::Right => m.matrix(&w).checked_mul(m.matrix(&u)).unwrap(),
                                _ => m.matrix(&u).checked_mul(m.matrix(&w)).unwrap(),
                            };
                            assert_eq!(got, expected, "n={n} {side:?} cell {c} u={u} w={w}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dot_output() {
        for (n, grid) in [(3, 4), (4, 4), (5, 4)] {
            let (_, cells) = setup(n);
            let dot = cells.to_dot();
            assert!(dot.starts_with("digraph"));
            assert!(dot.trim_end().ends_with('}'));
            assert!(dot.contains("J1 -> J2;") && dot.contains("J2 -> J3;"));
            assert_eq!(dot.matches(" ∩ ").count(), grid);
        }
    }
}
