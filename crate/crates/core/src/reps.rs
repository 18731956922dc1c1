//! Complex representations of `D_n`: the simple modules, the action of the
//! KL generators on them, and character-based decomposition of integer
//! representations given by a pair `(A_s, A_t)` of KL generator matrices.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::algebra::StructureConstantTable;
use crate::dihedral::{DihedralGroup, Generator};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;

/// Tolerance for rounding character inner products to integers.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimpleModule {
    /// `s` acts by `eps`, `t` by `delta`.
    OneDim { eps: i8, delta: i8 },
    /// Two-dimensional module `V(n,k)`: `st` rotates by `2k pi / n`.
    TwoDim { k: u32 },
}

impl SimpleModule {
    pub const TRIVIAL: SimpleModule = SimpleModule::OneDim { eps: 1, delta: 1 };
    pub const SIGN: SimpleModule = SimpleModule::OneDim { eps: -1, delta: -1 };

    pub fn dim(&self) -> usize {
        match self {
            SimpleModule::OneDim { .. } => 1,
            SimpleModule::TwoDim { .. } => 2,
        }
    }

    fn sort_key(&self) -> (u8, i32) {
        match *self {
            SimpleModule::OneDim { eps, delta } => {
                let rank = match (eps, delta) {
                    (1, 1) => 0,
                    (1, _) => 1,
                    (_, 1) => 2,
                    _ => 3,
                };
                (0, rank)
            }
            SimpleModule::TwoDim { k } => (1, k as i32),
        }
    }

    pub fn name(&self, n: u32) -> String {
        match self {
            SimpleModule::OneDim { eps, delta } => format!("V({eps},{delta})"),
            SimpleModule::TwoDim { k } => format!("V({n},{k})"),
        }
    }

    pub fn parse(n: u32, text: &str) -> Result<Self> {
        let bad = || Error::Parse { position: 0, message: format!("bad simple module name {text:?}") };
        let inner = text.trim().strip_prefix("V(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        let v = if a.abs() == 1 && b.abs() == 1 && !(a == n as i64 && n == 1) {
            SimpleModule::OneDim { eps: a as i8, delta: b as i8 }
        } else if a == n as i64 && b >= 1 {
            SimpleModule::TwoDim { k: b as u32 }
        } else {
            return Err(bad());
        };
        validate(n, &v)?;
        Ok(v)
    }
}

impl PartialOrd for SimpleModule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimpleModule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

fn max_two_dim_k(n: u32) -> u32 {
    if n.is_multiple_of(2) {
        (n - 2) / 2
    } else {
        (n - 1) / 2
    }
}

pub fn validate(n: u32, v: &SimpleModule) -> Result<()> {
    let ok = match *v {
        SimpleModule::OneDim { eps, delta } => {
            eps.abs() == 1 && delta.abs() == 1 && (eps == delta || n.is_multiple_of(2))
        }
        SimpleModule::TwoDim { k } => k >= 1 && k <= max_two_dim_k(n),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSimple(v.name(n)))
    }
}

/// Complete irredundant list of simple modules, in report order.
pub fn simples(n: u32) -> Vec<SimpleModule> {
    let mut out = vec![SimpleModule::TRIVIAL];
    if n.is_multiple_of(2) {
        out.push(SimpleModule::OneDim { eps: 1, delta: -1 });
        out.push(SimpleModule::OneDim { eps: -1, delta: 1 });
    }
    out.push(SimpleModule::SIGN);
    out.extend((1..=max_two_dim_k(n)).map(|k| SimpleModule::TwoDim { k }));
    out
}

/// Matrices of the KL generators `s + e` and `t + e` on a simple module.
pub fn kl_generator_matrices(n: u32, v: &SimpleModule) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    validate(n, v)?;
    Ok(match *v {
        SimpleModule::OneDim { eps, delta } => (
            DMatrix::from_element(1, 1, 1.0 + eps as f64),
            DMatrix::from_element(1, 1, 1.0 + delta as f64),
        ),
        SimpleModule::TwoDim { k } => {
            let angle = 2.0 * PI * k as f64 / n as f64;
            let (sin, cos) = angle.sin_cos();
            (
                DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[1.0 + cos, sin, sin, 1.0 - cos]),
            )
        }
    })
}

/// Characteristic polynomial `x^2 - 4x + 2 - 2cos(2k pi/n)` of `s + t` (KL
/// generators) on `V(n,k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDimCharPoly {
    /// Lowest degree first.
    pub coeffs: [f64; 3],
    /// Present exactly when `2cos(2k pi/n)` is an integer.
    pub integral: Option<IntPoly>,
}

pub fn char_poly_two_dim(n: u32, k: u32) -> Result<TwoDimCharPoly> {
    validate(n, &SimpleModule::TwoDim { k })?;
    let two_cos = 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
    // 2cos(2k pi/n) is -1, 0, 1 exactly for k/n = 1/3, 1/4, 1/6
    let exact = if 3 * k == n {
        Some(-1)
    } else if 4 * k == n {
        Some(0)
    } else if 6 * k == n {
        Some(1)
    } else {
        None
    };
    Ok(TwoDimCharPoly {
        coeffs: [2.0 - two_cos, -4.0, 1.0],
        integral: exact.map(|c| IntPoly::from_i64(&[2 - c, -4, 1])),
    })
}

/// Character of a simple module at every group element, in
/// [`DihedralGroup::all_elements`] order.
pub fn character(group: &DihedralGroup, v: &SimpleModule) -> Result<Vec<f64>> {
    let (ks, kt) = kl_generator_matrices(group.n(), v)?;
    let dim = v.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let s = &ks - &id;
    let t = &kt - &id;
    Ok(group
        .all_elements()
        .iter()
        .map(|w| {
            w.word()
                .iter()
                .fold(id.clone(), |acc, g| match g {
                    Generator::S => acc * &s,
                    Generator::T => acc * &t,
                })
                .trace()
        })
        .collect())
}

/// Multiplicities of simple modules, in report order, zeros omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n: u32,
    pub multiplicities: Vec<(SimpleModule, u32)>,
}

impl Decomposition {
    pub fn multiplicity(&self, v: &SimpleModule) -> u32 {
        self.multiplicities.iter().find(|(w, _)| w == v).map_or(0, |(_, m)| *m)
    }

    pub fn dimension(&self) -> usize {
        self.multiplicities.iter().map(|(v, m)| v.dim() * *m as usize).sum()
    }

    pub fn from_multiplicities(n: u32, items: impl IntoIterator<Item = (SimpleModule, u32)>) -> Self {
        let mut all: Vec<(SimpleModule, u32)> = Vec::new();
        for (v, m) in items {
            match all.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += m,
                None => all.push((v, m)),
            }
        }
        all.retain(|(_, m)| *m > 0);
        all.sort();
        Decomposition { n, multiplicities: all }
    }

    pub fn sum(&self, other: &Decomposition) -> Decomposition {
        Decomposition::from_multiplicities(
            self.n,
            self.multiplicities.iter().chain(&other.multiplicities).copied(),
        )
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicities.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .multiplicities
            .iter()
            .map(|(v, m)| if *m == 1 { v.name(self.n) } else { format!("{m}·{}", v.name(self.n)) })
            .collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.multiplicities.len()))?;
        for (v, m) in &self.multiplicities {
            map.serialize_entry(&v.name(self.n), m)?;
        }
        map.end()
    }
}

/// Checks `(A_s - I)^2 = I`, `(A_t - I)^2 = I` and
/// `((A_s - I)(A_t - I))^n = I`, naming the first failing relation.
pub fn check_module_relations(n: u32, a_s: &IntMatrix, a_t: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if a_s.size() != a_t.size() {
        return Err(Error::Shape(format!("A_s is {0}x{0} but A_t is {1}x{1}", a_s.size(), a_t.size())));
    }
    let id = IntMatrix::identity(a_s.size());
    let s = a_s.checked_sub(&id)?;
    let t = a_t.checked_sub(&id)?;
    if s.checked_mul(&s)? != id {
        return Err(Error::NotAModule { relation: "s^2 = e".into() });
    }
    if t.checked_mul(&t)? != id {
        return Err(Error::NotAModule { relation: "t^2 = e".into() });
    }
    if s.checked_mul(&t)?.checked_pow(n)? != id {
        return Err(Error::NotAModule { relation: format!("(st)^{n} = e") });
    }
    Ok((s, t))
}

/// Decomposes the representation in which the KL generators act by
/// `A_s`, `A_t` (so `s` acts by `A_s - I`) into simple modules.
pub fn decompose(n: u32, a_s: &IntMatrix, a_t: &IntMatrix) -> Result<Decomposition> {
    let group = DihedralGroup::new(n)?;
    let (s, t) = check_module_relations(n, a_s, a_t)?;
    let dim = a_s.size();
    let traces = group
        .all_elements()
        .iter()
        .map(|w| {
            w.word()
                .iter()
                .try_fold(IntMatrix::identity(dim), |acc, g| match g {
                    Generator::S => acc.checked_mul(&s),
                    Generator::T => acc.checked_mul(&t),
                })
                .map(|m| m.trace())
        })
        .collect::<Result<Vec<i64>>>()?;
    let order = group.order() as f64;
    let mut items = Vec::new();
    for v in simples(n) {
        let chi = character(&group, &v)?;
        let raw: f64 = chi.iter().zip(&traces).map(|(a, &b)| a * b as f64).sum::<f64>() / order;
        let rounded = raw.round();
        if (raw - rounded).abs() > MULTIPLICITY_TOLERANCE || rounded < 0.0 {
            return Err(Error::NonIntegralMultiplicity { simple: v.name(n), value: raw });
        }
        items.push((v, rounded as u32));
    }
    let out = Decomposition::from_multiplicities(n, items);
    assert_eq!(out.dimension(), dim, "decomposition dimension bookkeeping");
    Ok(out)
}

/// Matrices of left multiplication by the KL generators on `Z[D_n]` in the
/// KL basis.
pub fn left_regular_kl_matrices(table: &StructureConstantTable) -> Result<(IntMatrix, IntMatrix)> {
    let group = table.group();
    let all = group.all_elements();
    let build = |x: Generator| -> Result<IntMatrix> {
        let gx = group.generator(x);
        let mut m = IntMatrix::zeros(all.len());
        for (j, w) in all.iter().enumerate() {
            for (v, c) in table.product(&gx, w).terms() {
                let c = num_traits::ToPrimitive::to_i64(c).ok_or_else(|| Error::Overflow("regular matrix".into()))?;
                m.set(group.index_of(v), j, c);
            }
        }
        Ok(m)
    };
    Ok((build(Generator::S)?, build(Generator::T)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_constants;
    use crate::cells::{cell_module, compute_cells, Side};

    fn mat(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn simple_lists() {
        let names = |n| simples(n).iter().map(|v| v.name(n)).collect::<Vec<_>>();
        assert_eq!(names(4), ["V(1,1)", "V(1,-1)", "V(-1,1)", "V(-1,-1)", "V(4,1)"]);
        assert_eq!(names(3), ["V(1,1)", "V(-1,-1)", "V(3,1)"]);
        assert_eq!(names(6), ["V(1,1)", "V(1,-1)", "V(-1,1)", "V(-1,-1)", "V(6,1)", "V(6,2)"]);
        for n in 3..=20 {
            let total: usize = simples(n).iter().map(|v| v.dim() * v.dim()).sum();
            assert_eq!(total, 2 * n as usize);
        }
        assert!(validate(5, &SimpleModule::OneDim { eps: 1, delta: -1 }).is_err());
        assert!(validate(4, &SimpleModule::TwoDim { k: 2 }).is_err());
        assert_eq!(SimpleModule::parse(4, "V(4,1)").unwrap(), SimpleModule::TwoDim { k: 1 });
        assert_eq!(SimpleModule::parse(4, "V(1,-1)").unwrap(), SimpleModule::OneDim { eps: 1, delta: -1 });
    }

    #[test]
    fn generator_matrices() {
        let (s, t) = kl_generator_matrices(4, &SimpleModule::TwoDim { k: 1 }).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]));
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!((t - expected).abs().max() < 1e-15);
        let (s, t) = kl_generator_matrices(7, &SimpleModule::SIGN).unwrap();
        assert_eq!((s[(0, 0)], t[(0, 0)]), (0.0, 0.0));
        assert!(kl_generator_matrices(5, &SimpleModule::TwoDim { k: 3 }).is_err());
    }

    #[test]
    fn generator_matrices_are_quasi_idempotent() {
        for n in 3..=16 {
            for v in simples(n) {
                let (s, t) = kl_generator_matrices(n, &v).unwrap();
                for m in [&s, &t] {
                    assert!((m * m - m * 2.0).abs().max() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_dim_char_polys() {
        assert_eq!(char_poly_two_dim(4, 1).unwrap().integral, Some(IntPoly::from_i64(&[2, -4, 1])));
        assert_eq!(char_poly_two_dim(3, 1).unwrap().integral, Some(IntPoly::from_i64(&[3, -4, 1])));
        assert_eq!(char_poly_two_dim(6, 1).unwrap().integral, Some(IntPoly::from_i64(&[1, -4, 1])));
        assert_eq!(char_poly_two_dim(5, 1).unwrap().integral, None);
        assert_eq!(char_poly_two_dim(6, 2).unwrap().integral, Some(IntPoly::from_i64(&[3, -4, 1])));
        assert!(char_poly_two_dim(4, 2).is_err());
        // floating coefficients against the trace/determinant of s + t
        for n in 3..=14 {
            for k in 1..=max_two_dim_k(n) {
                let p = char_poly_two_dim(n, k).unwrap();
                let (s, t) = kl_generator_matrices(n, &SimpleModule::TwoDim { k }).unwrap();
                let q = s + t;
                assert!((p.coeffs[1] + q.trace()).abs() < 1e-12);
                assert!((p.coeffs[0] - q.determinant()).abs() < 1e-12);
                let integral = (2.0 * (2.0 * PI * k as f64 / n as f64).cos()).fract().abs() < 1e-12
                    || (2.0 * (2.0 * PI * k as f64 / n as f64).cos()).fract().abs() > 1.0 - 1e-12;
                assert_eq!(p.integral.is_some(), integral, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let a_s = mat(vec![vec![2, 0, 1], vec![0, 2, 1], vec![0, 0, 0]]);
        let a_t = mat(vec![vec![0, 0, 0], vec![0, 0, 0], vec![1, 1, 2]]);
        let d = decompose(4, &a_s, &a_t).unwrap();
        assert_eq!(d.to_string(), "V(1,-1) ⊕ V(4,1)");
        let d_t = decompose(4, &a_t, &a_s).unwrap();
        assert_eq!(d_t.to_string(), "V(-1,1) ⊕ V(4,1)");
        assert_ne!(d, d_t);
        let z = IntMatrix::zeros(1);
        assert_eq!(decompose(4, &z, &z).unwrap().to_string(), "V(-1,-1)");
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"V(1,-1)":1,"V(4,1)":1}"#);
    }

    #[test]
    fn decompose_rejects_non_modules() {
        let a = mat(vec![vec![1, 1], vec![1, 1]]);
        let b = IntMatrix::identity(2);
        match decompose(4, &a, &b) {
            Err(Error::NotAModule { relation }) => assert_eq!(relation, "t^2 = e"),
            other => panic!("unexpected {other:?}"),
        }
        let possx2_s = mat(vec![vec![2, 2], vec![0, 0]]);
        let possx2_t = mat(vec![vec![0, 0], vec![1, 2]]);
        assert!(decompose(4, &possx2_s, &possx2_t).is_ok());
        assert!(matches!(decompose(5, &possx2_s, &possx2_t), Err(Error::NotAModule { .. })));
    }

    #[test]
    fn regular_representation_and_cell_sum() {
        for n in 3..=10 {
            let table = structure_constants(n).unwrap();
            let (rs, rt) = left_regular_kl_matrices(&table).unwrap();
            let regular = decompose(n, &rs, &rt).unwrap();
            for v in simples(n) {
                assert_eq!(regular.multiplicity(&v) as usize, v.dim(), "n={n} {v:?}");
            }
            let cells = compute_cells(&table);
            let g = *table.group();
            let mut total = Decomposition::from_multiplicities(n, []);
            for l in 0..cells.cells(Side::Left).len() {
                let m = cell_module(&table, &cells, l).unwrap();
                let (a, b) = m.generator_pair(&g);
                total = total.sum(&decompose(n, &a, &b).unwrap());
            }
            assert_eq!(total, regular);
        }
    }

    #[test]
    fn decompose_is_additive_on_block_sums() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 3..=8 {
            let table = structure_constants(n).unwrap();
            let cells = compute_cells(&table);
            let g = *table.group();
            let parts: Vec<(IntMatrix, IntMatrix, Decomposition)> = (0..cells.left_cells().len())
                .map(|l| {
                    let (a, b) = cell_module(&table, &cells, l).unwrap().generator_pair(&g);
                    let d = decompose(n, &a, &b).unwrap();
                    (a, b, d)
                })
                .collect();
            for _ in 0..200 {
                let picks: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..parts.len())).collect();
                let a = IntMatrix::block_diag(&picks.iter().map(|&i| parts[i].0.clone()).collect::<Vec<_>>());
                let b = IntMatrix::block_diag(&picks.iter().map(|&i| parts[i].1.clone()).collect::<Vec<_>>());
                let expected = picks
                    .iter()
                    .fold(Decomposition::from_multiplicities(n, []), |acc, &i| acc.sum(&parts[i].2));
                assert_eq!(decompose(n, &a, &b).unwrap(), expected);
            }
        }
    }
}
