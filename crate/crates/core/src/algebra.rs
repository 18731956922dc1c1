//! The integral group ring `Z[D_n]` in the group basis and in the
//! Kazhdan-Lusztig basis.
//!
//! For dihedral groups at `q = 1` the KL basis element of `w` is `w` plus the
//! sum of every strictly shorter element, so the change of basis is
//! unitriangular with respect to length.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::dihedral::{DihedralGroup, Generator, GroupElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Group,
    Kl,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Group => "GROUP",
            Basis::Kl => "KL",
        }
    }
}

/// Sparse integer combination of basis vectors indexed by group elements.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    n: u32,
    basis: Basis,
    coeffs: BTreeMap<GroupElement, BigInt>,
}

impl GroupAlgebraElement {
    pub fn zero(n: u32, basis: Basis) -> Self {
        GroupAlgebraElement { n, basis, coeffs: BTreeMap::new() }
    }

    pub fn basis_vector(n: u32, basis: Basis, w: GroupElement) -> Self {
        let mut out = Self::zero(n, basis);
        out.coeffs.insert(w, BigInt::one());
        out
    }

    pub fn from_terms<I>(n: u32, basis: Basis, terms: I) -> Self
    where
        I: IntoIterator<Item = (GroupElement, BigInt)>,
    {
        let mut out = Self::zero(n, basis);
        for (w, c) in terms {
            out.add_term(w, &c);
        }
        out
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, w: &GroupElement) -> BigInt {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    pub fn add_term(&mut self, w: GroupElement, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(w).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedOrder(self.n, other.n));
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { expected: self.basis.name(), found: other.basis.name() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(*w, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(*w, &-c);
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.n, self.basis);
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(w, x)| (*w, x * c)).collect();
        }
        out
    }

    pub fn map_elements(&self, f: impl Fn(&GroupElement) -> GroupElement) -> Self {
        Self::from_terms(self.n, self.basis, self.coeffs.iter().map(|(w, c)| (f(w), c.clone())))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Human-readable form, longest elements first: `tst + t`, `2·w0`.
    pub fn render(&self, group: &DihedralGroup) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.coeffs.iter().rev().enumerate() {
            let name = group.render(w);
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if mag.is_one() {
                out.push_str(&name);
            } else {
                out.push_str(&format!("{mag}·{name}"));
            }
        }
        out
    }

    /// `{"n":4,"basis":"KL","coeffs":{"st":1,"e":1}}`
    pub fn to_json(&self, group: &DihedralGroup) -> Value {
        let mut coeffs = Map::new();
        for (w, c) in self.coeffs.iter().rev() {
            let v = match c.to_i64() {
                Some(x) => json!(x),
                None => json!(c.to_string()),
            };
            coeffs.insert(group.render(w), v);
        }
        json!({ "n": self.n, "basis": self.basis.name(), "coeffs": Value::Object(coeffs) })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse { position: 0, message: m.to_string() };
        let n = value["n"].as_u64().ok_or_else(|| bad("missing n"))? as u32;
        let group = DihedralGroup::new(n)?;
        let basis = match value["basis"].as_str() {
            Some("KL") => Basis::Kl,
            Some("GROUP") => Basis::Group,
            _ => return Err(bad("basis must be KL or GROUP")),
        };
        let coeffs = value["coeffs"].as_object().ok_or_else(|| bad("missing coeffs"))?;
        let mut out = Self::zero(n, basis);
        for (name, c) in coeffs {
            let w = group.parse(name)?;
            let c: BigInt = match c {
                Value::Number(x) => x.as_i64().map(BigInt::from).ok_or_else(|| bad("coefficient"))?,
                Value::String(s) => s.parse().map_err(|_| bad("coefficient"))?,
                _ => return Err(bad("coefficient")),
            };
            out.add_term(w, &c);
        }
        Ok(out)
    }
}

/// Expands KL basis vectors into the group basis.
pub fn kl_to_group(group: &DihedralGroup, x: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    if x.basis != Basis::Kl {
        return Err(Error::BasisMismatch { expected: "KL", found: x.basis.name() });
    }
    let all = group.all_elements();
    let mut out = GroupAlgebraElement::zero(x.n, Basis::Group);
    for (w, c) in &x.coeffs {
        for v in all.iter().filter(|v| v.length() < w.length()) {
            out.add_term(*v, c);
        }
        out.add_term(*w, c);
    }
    Ok(out)
}

/// Inverse change of basis, peeling off the longest remaining term each step.
pub fn group_to_kl(group: &DihedralGroup, x: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    if x.basis != Basis::Group {
        return Err(Error::BasisMismatch { expected: "GROUP", found: x.basis.name() });
    }
    let all = group.all_elements();
    let mut rest: Vec<BigInt> = all.iter().map(|w| x.coeff(w)).collect();
    let mut out = GroupAlgebraElement::zero(x.n, Basis::Kl);
    for i in (0..all.len()).rev() {
        let c = std::mem::take(&mut rest[i]);
        if c.is_zero() {
            continue;
        }
        let len = all[i].length();
        for (j, v) in all.iter().enumerate() {
            if v.length() < len {
                rest[j] -= &c;
            }
        }
        out.add_term(all[i], &c);
    }
    Ok(out)
}

/// Product in the group basis.
pub fn convolve(
    group: &DihedralGroup,
    a: &GroupAlgebraElement,
    b: &GroupAlgebraElement,
) -> Result<GroupAlgebraElement> {
    for x in [a, b] {
        if x.basis != Basis::Group {
            return Err(Error::BasisMismatch { expected: "GROUP", found: x.basis.name() });
        }
    }
    if a.n != b.n {
        return Err(Error::MismatchedOrder(a.n, b.n));
    }
    let mut out = GroupAlgebraElement::zero(a.n, Basis::Group);
    for (u, c) in &a.coeffs {
        for (w, d) in &b.coeffs {
            out.add_term(group.multiply(u, w), &(c * d));
        }
    }
    Ok(out)
}

/// Left multiplication of a KL basis vector by the KL generator `x`.
pub fn kl_left_multiply_generator(
    group: &DihedralGroup,
    x: Generator,
    w: &GroupElement,
) -> GroupAlgebraElement {
    let n = group.n();
    let y = x.other();
    let gx = group.generator(x);
    let gy = group.generator(y);
    let kl = |v: GroupElement, c: i64| (v, BigInt::from(c));
    let terms = if w.is_identity() {
        vec![kl(gx, 1)]
    } else if *w == gy {
        vec![kl(group.multiply(&gx, &gy), 1)]
    } else if group.multiply(&gx, w).length() > w.length() {
        vec![kl(group.multiply(&gx, w), 1), kl(group.multiply(&gy, w), 1)]
    } else {
        vec![kl(*w, 2)]
    };
    GroupAlgebraElement::from_terms(n, Basis::Kl, terms)
}

/// Right multiplication of a KL basis vector by the KL generator `x`,
/// obtained from the left rule through the anti-involution `v -> v^{-1}`.
pub fn kl_right_multiply_generator(
    group: &DihedralGroup,
    w: &GroupElement,
    x: Generator,
) -> GroupAlgebraElement {
    kl_left_multiply_generator(group, x, &group.inverse(w)).map_elements(|v| group.inverse(v))
}

fn apply_generator(group: &DihedralGroup, x: Generator, combo: &GroupAlgebraElement) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::zero(combo.n, Basis::Kl);
    for (v, c) in &combo.coeffs {
        for (u, d) in &kl_left_multiply_generator(group, x, v).coeffs {
            out.add_term(*u, &(c * d));
        }
    }
    out
}

/// `u * w` for every `u`, via the generator recursion
/// `x u' = u + y u'` rearranged as `u = x * u' - (y u')`.
/// The result is indexed like [`DihedralGroup::all_elements`].
pub fn left_products_by_recursion(group: &DihedralGroup, w: &GroupElement) -> Vec<GroupAlgebraElement> {
    let n = group.n();
    let all = group.all_elements();
    let mut rows: Vec<Option<GroupAlgebraElement>> = vec![None; all.len()];
    for u in &all {
        let row = match u.length() {
            0 => GroupAlgebraElement::basis_vector(n, Basis::Kl, *w),
            len => {
                let x = u.leading().expect("non-identity");
                let gx = group.generator(x);
                let rest = group.multiply(&gx, u);
                let prev = rows[group.index_of(&rest)].as_ref().expect("shorter row computed");
                let mut row = apply_generator(group, x, prev);
                if len >= 3 {
                    let drop = group.multiply(&group.generator(x.other()), &rest);
                    let sub = rows[group.index_of(&drop)].as_ref().expect("shorter row computed");
                    row = row.sub(sub).expect("same algebra");
                }
                row
            }
        };
        rows[group.index_of(u)] = Some(row);
    }
    rows.into_iter().map(|r| r.expect("all rows computed")).collect()
}

/// `u * w` via the group-basis convolution.
pub fn kl_multiply_by_convolution(
    group: &DihedralGroup,
    u: &GroupElement,
    w: &GroupElement,
) -> GroupAlgebraElement {
    let n = group.n();
    let a = kl_to_group(group, &GroupAlgebraElement::basis_vector(n, Basis::Kl, *u)).expect("KL input");
    let b = kl_to_group(group, &GroupAlgebraElement::basis_vector(n, Basis::Kl, *w)).expect("KL input");
    let prod = convolve(group, &a, &b).expect("group basis");
    group_to_kl(group, &prod).expect("group basis")
}

/// `u * w` via the generator recursion.
pub fn kl_multiply_by_recursion(
    group: &DihedralGroup,
    u: &GroupElement,
    w: &GroupElement,
) -> GroupAlgebraElement {
    left_products_by_recursion(group, w).swap_remove(group.index_of(u))
}

/// Product of two KL basis vectors; both routes are computed and must agree.
pub fn kl_multiply(group: &DihedralGroup, u: &GroupElement, w: &GroupElement) -> Result<GroupAlgebraElement> {
    group.check(u)?;
    group.check(w)?;
    let by_convolution = kl_multiply_by_convolution(group, u, w);
    let by_recursion = kl_multiply_by_recursion(group, u, w);
    assert_eq!(
        by_convolution, by_recursion,
        "KL product {u} * {w} differs between convolution and generator recursion"
    );
    Ok(by_recursion)
}

/// Structure constants `u * w = sum_v c(u, w, v) v` in the KL basis.
#[derive(Debug, Clone)]
pub struct StructureConstantTable {
    group: DihedralGroup,
    /// `entries[index(u)][index(w)]`
    entries: Vec<Vec<GroupAlgebraElement>>,
}

impl StructureConstantTable {
    /// Tabulates every product with the generator recursion, cross-checks
    /// each against convolution, and rejects negative constants.
    pub fn build(group: &DihedralGroup) -> Result<Self> {
        let all = group.all_elements();
        let size = all.len();
        let mut entries = vec![Vec::with_capacity(size); size];
        for w in &all {
            let column = left_products_by_recursion(group, w);
            for (i, prod) in column.into_iter().enumerate() {
                entries[i].push(prod);
            }
        }
        for (i, u) in all.iter().enumerate() {
            for (j, w) in all.iter().enumerate() {
                let prod = &entries[i][j];
                assert_eq!(
                    *prod,
                    kl_multiply_by_convolution(group, u, w),
                    "KL product {u} * {w} differs between convolution and generator recursion"
                );
                if let Some((v, c)) = prod.terms().find(|(_, c)| c.is_negative()) {
                    return Err(Error::NegativeStructureConstant {
                        u: group.render(u),
                        w: group.render(w),
                        v: group.render(v),
                        coefficient: c.to_string(),
                    });
                }
            }
        }
        Ok(StructureConstantTable { group: *group, entries })
    }

    pub fn group(&self) -> &DihedralGroup {
        &self.group
    }

    pub fn n(&self) -> u32 {
        self.group.n()
    }

    pub fn product(&self, u: &GroupElement, w: &GroupElement) -> &GroupAlgebraElement {
        &self.entries[self.group.index_of(u)][self.group.index_of(w)]
    }

    pub fn constant(&self, u: &GroupElement, w: &GroupElement, v: &GroupElement) -> BigInt {
        self.product(u, w).coeff(v)
    }
}

pub fn structure_constants(n: u32) -> Result<StructureConstantTable> {
    StructureConstantTable::build(&DihedralGroup::new(n)?)
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
