//! The dihedral group `D_n = <s, t | s^2 = t^2 = (st)^n = e>`.
//!
//! Elements are stored in canonical reduced form: a length together with the
//! first letter of the (unique up to `w0`) alternating reduced word. The
//! longest element always carries leading generator `S`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two Coxeter generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    S,
    T,
}

impl Generator {
    pub fn other(self) -> Generator {
        match self {
            Generator::S => Generator::T,
            Generator::T => Generator::S,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Generator::S => 's',
            Generator::T => 't',
        }
    }
}

/// Element of `D_n` in canonical reduced form.
///
/// The derived ordering sorts by `(length, leading)` with `NONE < S < T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    length: u32,
    leading: Option<Generator>,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { length: 0, leading: None };

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn leading(&self) -> Option<Generator> {
        self.leading
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// Last letter of the reduced word. For `w0` of even `n` this is `T`
    /// (the canonical word starts with `S`).
    pub fn trailing(&self) -> Option<Generator> {
        let lead = self.leading?;
        Some(if self.length % 2 == 1 { lead } else { lead.other() })
    }

    /// The alternating reduced word of this element.
    pub fn word(&self) -> Vec<Generator> {
        let mut out = Vec::with_capacity(self.length as usize);
        if let Some(mut g) = self.leading {
            for _ in 0..self.length {
                out.push(g);
                g = g.other();
            }
        }
        out
    }

    fn word_string(&self) -> String {
        if self.length == 0 {
            "e".to_string()
        } else {
            self.word().into_iter().map(Generator::letter).collect()
        }
    }
}

/// Internal coordinates: `rotation^a` or `rotation^a * s`, where
/// `rotation = st`. Only used to multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Coords {
    power: u32,
    reflection: bool,
}

/// The group `D_n` for a fixed `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DihedralGroup {
    n: u32,
}

impl DihedralGroup {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(DihedralGroup { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        2 * self.n as usize
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }

    pub fn generator(&self, g: Generator) -> GroupElement {
        GroupElement { length: 1, leading: Some(g) }
    }

    pub fn longest_element(&self) -> GroupElement {
        GroupElement { length: self.n, leading: Some(Generator::S) }
    }

    pub fn is_longest(&self, w: &GroupElement) -> bool {
        w.length == self.n
    }

    /// Builds the element with the given length and leading generator,
    /// normalising the leading letter of `w0`.
    pub fn element(&self, length: u32, leading: Option<Generator>) -> Result<GroupElement> {
        match (length, leading) {
            (0, None) => Ok(GroupElement::IDENTITY),
            (0, Some(_)) | (_, None) => Err(Error::InvalidElement(format!(
                "length {length} with leading {leading:?}"
            ))),
            (l, Some(_)) if l > self.n => Err(Error::InvalidElement(format!(
                "length {l} exceeds n = {}",
                self.n
            ))),
            (l, Some(g)) => {
                let leading = if l == self.n { Generator::S } else { g };
                Ok(GroupElement { length: l, leading: Some(leading) })
            }
        }
    }

    /// All `2n` elements sorted by `(length, leading)`.
    pub fn all_elements(&self) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(self.order());
        out.push(GroupElement::IDENTITY);
        for l in 1..self.n {
            out.push(GroupElement { length: l, leading: Some(Generator::S) });
            out.push(GroupElement { length: l, leading: Some(Generator::T) });
        }
        out.push(self.longest_element());
        out
    }

    /// Position of `w` in [`DihedralGroup::all_elements`].
    pub fn index_of(&self, w: &GroupElement) -> usize {
        match (w.length, w.leading) {
            (0, _) => 0,
            (l, _) if l == self.n => self.order() - 1,
            (l, Some(Generator::S)) => 2 * l as usize - 1,
            (l, _) => 2 * l as usize,
        }
    }

    pub fn element_from_word(&self, word: &[Generator]) -> GroupElement {
        word.iter()
            .fold(GroupElement::IDENTITY, |acc, &g| self.multiply(&acc, &self.generator(g)))
    }

    fn to_coords(&self, w: &GroupElement) -> Coords {
        let n = self.n;
        let l = w.length;
        match w.leading {
            None => Coords { power: 0, reflection: false },
            Some(Generator::S) if l.is_multiple_of(2) => Coords { power: (l / 2) % n, reflection: false },
            Some(Generator::S) => Coords { power: (l - 1) / 2, reflection: true },
            // (ts)^m = (st)^{-m}
            Some(Generator::T) if l.is_multiple_of(2) => Coords { power: (n - l / 2) % n, reflection: false },
            // (ts)^m t = (st)^{-(m+1)} s
            Some(Generator::T) => Coords { power: (n - l.div_ceil(2)) % n, reflection: true },
        }
    }

    fn from_coords(&self, c: Coords) -> GroupElement {
        let n = self.n;
        let a = c.power % n;
        let (len_s, len_t) = if c.reflection {
            (2 * a + 1, 2 * (n - a) - 1)
        } else if a == 0 {
            return GroupElement::IDENTITY;
        } else {
            (2 * a, 2 * (n - a))
        };
        let (length, leading) = if len_s <= len_t {
            (len_s, Generator::S)
        } else {
            (len_t, Generator::T)
        };
        let leading = if length == n { Generator::S } else { leading };
        GroupElement { length, leading: Some(leading) }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let n = self.n;
        let x = self.to_coords(a);
        let y = self.to_coords(b);
        // s r^b = r^{-b} s
        let power = if x.reflection {
            (x.power + n - y.power) % n
        } else {
            (x.power + y.power) % n
        };
        self.from_coords(Coords { power, reflection: x.reflection != y.reflection })
    }

    /// Multiplies, rejecting elements that do not belong to this group.
    pub fn try_multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.multiply(a, b))
    }

    pub fn check(&self, w: &GroupElement) -> Result<()> {
        if w.length > self.n || (w.length == self.n && w.leading != Some(Generator::S)) {
            return Err(Error::InvalidElement(format!(
                "{w:?} is not an element of D_{}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        let mut word = a.word();
        word.reverse();
        self.element_from_word(&word)
    }

    /// Dihedral Bruhat order: comparison by length.
    pub fn bruhat_lt(&self, a: &GroupElement, b: &GroupElement) -> bool {
        a.length < b.length
    }

    /// Image under the diagram automorphism exchanging `s` and `t`.
    pub fn swap_generators(&self, w: &GroupElement) -> GroupElement {
        if w.length == self.n || w.length == 0 {
            *w
        } else {
            GroupElement { length: w.length, leading: w.leading.map(Generator::other) }
        }
    }

    pub fn render(&self, w: &GroupElement) -> String {
        if w.length == self.n {
            "w0".to_string()
        } else {
            w.word_string()
        }
    }

    /// Parses `e`, `w0`, or any word in `s`/`t` (reduced on the fly).
    pub fn parse(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(GroupElement::IDENTITY);
        }
        if text == "w0" {
            return Ok(self.longest_element());
        }
        let mut word = Vec::with_capacity(text.len());
        for (pos, ch) in text.char_indices() {
            match ch {
                's' => word.push(Generator::S),
                't' => word.push(Generator::T),
                _ => {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("unexpected character {ch:?} in group element {text:?}"),
                    })
                }
            }
        }
        Ok(self.element_from_word(&word))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(Generator::S),
            "t" => Ok(Generator::T),
            _ => Err(Error::Parse { position: 0, message: format!("unknown generator {s:?}") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::{S, T};

    fn d(n: u32) -> DihedralGroup {
        DihedralGroup::new(n).unwrap()
    }

    #[test]
    fn rejects_small_n() {
        assert!(DihedralGroup::new(2).is_err());
        assert!(DihedralGroup::new(3).is_ok());
    }

    #[test]
    fn word_examples() {
        let g = d(4);
        assert_eq!(g.element_from_word(&[S, S]), g.identity());
        let st = g.element_from_word(&[S, T]);
        assert_eq!((st.length(), st.leading()), (2, Some(S)));
        let w = g.element_from_word(&[T, S, T, S]);
        assert_eq!(w, g.longest_element());
        assert_eq!(w.leading(), Some(S));
        assert_eq!(g.element_from_word(&[]), g.identity());
    }

    #[test]
    fn multiply_examples() {
        let g = d(4);
        let p = |x: &str| g.parse(x).unwrap();
        assert_eq!(g.multiply(&p("s"), &p("s")), p("e"));
        assert_eq!(g.multiply(&p("s"), &p("t")), p("st"));
        let r = g.multiply(&p("sts"), &p("tst"));
        assert_eq!(r, p("ts"));
        assert_eq!(r.word(), vec![T, S]);
    }

    #[test]
    fn inverse_examples() {
        let g = d(4);
        let p = |x: &str| g.parse(x).unwrap();
        assert_eq!(g.inverse(&p("st")), p("ts"));
        assert_eq!(g.inverse(&p("sts")), p("sts"));
        let g5 = d(5);
        let w0 = g5.longest_element();
        assert_eq!(g5.inverse(&w0), w0);
        assert_eq!(g5.inverse(&w0).length(), 5);
    }

    #[test]
    fn listing_and_lengths() {
        let g = d(4);
        let names: Vec<String> = g.all_elements().iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["e", "s", "t", "st", "ts", "sts", "tst", "stst"]);
        assert_eq!(g.parse("tst").unwrap().length(), 3);
        assert!(g.bruhat_lt(&g.parse("ts").unwrap(), &g.parse("sts").unwrap()));
        assert_eq!(g.longest_element().length(), 4);
        for (i, w) in g.all_elements().iter().enumerate() {
            assert_eq!(g.index_of(w), i);
        }
    }

    #[test]
    fn rendering_and_parsing() {
        let g = d(4);
        assert_eq!(g.render(&g.longest_element()), "w0");
        assert_eq!(g.parse("w0").unwrap(), g.parse("stst").unwrap());
        assert_eq!(g.parse("tsts").unwrap(), g.longest_element());
        assert_eq!(g.render(&g.parse("tst").unwrap()), "tst");
        match g.parse("sx") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for n in 3..=12 {
            let g = d(n);
            let all = g.all_elements();
            assert_eq!(all.len(), 2 * n as usize);
            for a in &all {
                assert_eq!(g.multiply(a, &g.identity()), *a);
                assert_eq!(g.multiply(&g.identity(), a), *a);
                let inv = g.inverse(a);
                assert_eq!(g.multiply(a, &inv), g.identity());
                assert_eq!(g.multiply(&inv, a), g.identity());
                assert_eq!(inv.length(), a.length());
                assert_eq!(g.element_from_word(&a.word()), *a);
                for b in &all {
                    let ab = g.multiply(a, b);
                    let (la, lb) = (a.length() as i64, b.length() as i64);
                    let lab = ab.length() as i64;
                    assert!((la - lb).abs() <= lab);
                    assert!(lab <= la + lb && lab <= 2 * n as i64 - la - lb);
                }
            }
            for l in 1..n {
                assert_eq!(all.iter().filter(|w| w.length() == l).count(), 2);
            }
        }
    }

    /// Action on the vertices of an n-gon: s(i) = -i, t(i) = 1 - i.
    fn permutation(n: u32, word: &[Generator]) -> Vec<u32> {
        let n = n as i64;
        (0..n)
            .map(|mut i| {
                for g in word.iter().rev() {
                    i = match g {
                        S => -i,
                        T => 1 - i,
                    };
                }
                i.rem_euclid(n) as u32
            })
            .collect()
    }

    #[test]
    fn multiplication_matches_polygon_action() {
        for n in 3..=9 {
            let g = d(n);
            for a in g.all_elements() {
                for b in g.all_elements() {
                    let mut word = a.word();
                    word.extend(b.word());
                    let ab = g.multiply(&a, &b);
                    assert_eq!(permutation(n, &ab.word()), permutation(n, &word));
                }
            }
        }
    }

    #[test]
    fn swap_generators_is_an_automorphism() {
        let g = d(6);
        for a in g.all_elements() {
            for b in g.all_elements() {
                assert_eq!(
                    g.swap_generators(&g.multiply(&a, &b)),
                    g.multiply(&g.swap_generators(&a), &g.swap_generators(&b))
                );
            }
        }
    }
}
