//! The group algebra of the free group `F_2 = <a, b>` on reduced words, and
//! the probability-space model with `B` the group algebra of the cyclic
//! subgroup generated by the commutator `h = a b a^-1 b^-1`.
//!
//! Everything is exact: coefficients are rationals, words are fully reduced,
//! and `tr(E(v)) = tr(v)` holds bit-exactly.

use super::PSpaceModel;
use crate::scalar::{EqMode, Rat, Scalar};
use crate::{capacity_err, Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Default cap on reduced word length.
pub const DEFAULT_WORD_CAP: usize = 12;

/// A reduced word in `F_2`. Letters: `1 = a`, `-1 = a^-1`, `2 = b`,
/// `-2 = b^-1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(Vec<i8>);

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupWord({self})")
    }
}

impl fmt::Display for GroupWord {
    /// Letter form over `a, A, b, B`, capitals denoting inverses; the
    /// identity prints as `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.0 {
            let c = match l {
                1 => 'a',
                -1 => 'A',
                2 => 'b',
                -2 => 'B',
                _ => unreachable!("letters are +-1, +-2"),
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "e" {
            return Ok(GroupWord::identity());
        }
        let mut letters = Vec::new();
        for c in t.chars() {
            letters.push(match c {
                'a' => 1,
                'A' => -1,
                'b' => 2,
                'B' => -2,
                _ => return Err(Error::Parse(format!("bad group letter {c:?} in {text:?}"))),
            });
        }
        Ok(GroupWord::from_letters(&letters))
    }
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn gen_a() -> Self {
        GroupWord(vec![1])
    }

    pub fn gen_b() -> Self {
        GroupWord(vec![2])
    }

    /// The commutator `h = a b a^-1 b^-1`.
    pub fn h() -> Self {
        GroupWord(vec![1, 2, -1, -2])
    }

    /// Build from letters with free reduction.
    pub fn from_letters(letters: &[i8]) -> Self {
        let mut stack: Vec<i8> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(matches!(l, 1 | -1 | 2 | -2), "letters are +-1, +-2");
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        GroupWord(stack)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[i8] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, rhs: &GroupWord) -> GroupWord {
        let mut stack = self.0.clone();
        for &l in &rhs.0 {
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        GroupWord(stack)
    }

    /// `h^k`; reduced length is `4|k|`.
    pub fn h_pow(k: i64) -> Self {
        let base = if k >= 0 {
            GroupWord::h()
        } else {
            GroupWord::h().inverse()
        };
        let mut out = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Which power of `h` this word is, if any.
    pub fn as_h_power(&self) -> Option<i64> {
        if self.is_empty() {
            return Some(0);
        }
        if self.0.len() % 4 != 0 {
            return None;
        }
        let k = (self.0.len() / 4) as i64;
        if *self == Self::h_pow(k) {
            Some(k)
        } else if *self == Self::h_pow(-k) {
            Some(-k)
        } else {
            None
        }
    }
}

/// Finitely supported rational combination of reduced words: an element of
/// the group algebra of `F_2`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct GroupAlgElem {
    terms: BTreeMap<GroupWord, Rat>,
}

impl GroupAlgElem {
    pub fn zero() -> Self {
        GroupAlgElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(w: GroupWord) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, Scalar::one());
        GroupAlgElem { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (GroupWord, Rat)>) -> Self {
        let mut out = GroupAlgElem::zero();
        for (w, c) in pairs {
            out.add_term(w, c);
        }
        out
    }

    fn add_term(&mut self, w: GroupWord, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(<Rat as Scalar>::zero);
        *entry = Scalar::add(entry, &c);
        if Scalar::is_zero(entry) {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| Scalar::is_zero(*v))
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<GroupWord, Rat> {
        &self.terms
    }

    pub fn coeff(&self, w: &GroupWord) -> Rat {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupAlgElem {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), Scalar::neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GroupAlgElem {
            terms: self
                .terms
                .iter()
                .map(|(w, v)| (w.clone(), Scalar::mul(v, c)))
                .collect(),
        }
    }

    /// Bilinear product with free reduction of every word pair.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = GroupAlgElem::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2), Scalar::mul(c1, c2));
            }
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }
}

/// Laurent polynomial in `h`: an element of `B = C[F_1]`, keyed by the power
/// of `h`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct LaurentH {
    coef: BTreeMap<i64, Rat>,
}

impl LaurentH {
    pub fn zero() -> Self {
        LaurentH {
            coef: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, Scalar::one())
    }

    pub fn monomial(power: i64, c: Rat) -> Self {
        let mut coef = BTreeMap::new();
        if !c.is_zero() {
            coef.insert(power, c);
        }
        LaurentH { coef }
    }

    pub fn coef(&self) -> &BTreeMap<i64, Rat> {
        &self.coef
    }

    pub fn coeff_at(&self, power: i64) -> Rat {
        self.coef.get(&power).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut coef = self.coef.clone();
        for (k, c) in &rhs.coef {
            let e = coef.entry(*k).or_insert_with(<Rat as Scalar>::zero);
            *e = Scalar::add(e, c);
        }
        coef.retain(|_, c| !Scalar::is_zero(c));
        LaurentH { coef }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut coef: BTreeMap<i64, Rat> = BTreeMap::new();
        for (k1, c1) in &self.coef {
            for (k2, c2) in &rhs.coef {
                let e = coef.entry(k1 + k2).or_insert_with(<Rat as Scalar>::zero);
                *e = Scalar::add(e, &Scalar::mul(c1, c2));
            }
        }
        coef.retain(|_, c| !Scalar::is_zero(c));
        LaurentH { coef }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentH {
            coef: self
                .coef
                .iter()
                .map(|(k, v)| (*k, Scalar::mul(v, c)))
                .collect(),
        }
    }
}

/// `(C[F_2], tr)` together with the conditional expectation onto
/// `C[<h>]`, the coefficient projection onto powers of `h`.
#[derive(Clone, Debug)]
pub struct FreeGroupModel {
    generators: Vec<GroupWord>,
    word_cap: usize,
}

impl FreeGroupModel {
    /// Default generator family `a, b`.
    pub fn new() -> Self {
        FreeGroupModel {
            generators: vec![GroupWord::gen_a(), GroupWord::gen_b()],
            word_cap: DEFAULT_WORD_CAP,
        }
    }

    /// Custom generator words, e.g. `["a", "b", "A", "B"]`.
    pub fn with_generators(words: &[&str]) -> Result<Self> {
        let generators = words
            .iter()
            .map(|w| w.parse())
            .collect::<Result<Vec<GroupWord>>>()?;
        Ok(FreeGroupModel {
            generators,
            word_cap: DEFAULT_WORD_CAP,
        })
    }

    pub fn with_word_cap(mut self, cap: usize) -> Self {
        self.word_cap = cap;
        self
    }

    pub fn word_cap(&self) -> usize {
        self.word_cap
    }

    fn check_capacity(&self, x: &GroupAlgElem) -> Result<()> {
        if x.max_word_len() > self.word_cap {
            return capacity_err(format!(
                "group-algebra element has support of reduced length {} beyond the cap {}",
                x.max_word_len(),
                self.word_cap
            ));
        }
        Ok(())
    }
}

impl Default for FreeGroupModel {
    fn default() -> Self {
        Self::new()
    }
}

impl PSpaceModel for FreeGroupModel {
    type S = Rat;
    type A = GroupAlgElem;
    type B = LaurentH;

    fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn generator(&self, idx: usize) -> Result<GroupAlgElem> {
        self.generators
            .get(idx)
            .map(|w| GroupAlgElem::from_word(w.clone()))
            .ok_or_else(|| Error::Domain(format!("no generator {idx}")))
    }

    fn one_a(&self) -> GroupAlgElem {
        GroupAlgElem::from_word(GroupWord::identity())
    }

    fn add_a(&self, x: &GroupAlgElem, y: &GroupAlgElem) -> GroupAlgElem {
        x.add(y)
    }

    fn neg_a(&self, x: &GroupAlgElem) -> GroupAlgElem {
        x.neg()
    }

    fn mul_a(&self, x: &GroupAlgElem, y: &GroupAlgElem) -> Result<GroupAlgElem> {
        let out = x.mul(y);
        self.check_capacity(&out)?;
        Ok(out)
    }

    fn scale_a(&self, c: &Rat, x: &GroupAlgElem) -> GroupAlgElem {
        x.scale(c)
    }

    /// `E(sum alpha_g g) = sum over g in <h> of alpha_g g`.
    fn apply_e(&self, x: &GroupAlgElem) -> Result<LaurentH> {
        self.check_capacity(x)?;
        let mut out = LaurentH::zero();
        for (w, c) in x.terms() {
            if let Some(k) = w.as_h_power() {
                out = out.add(&LaurentH::monomial(k, c.clone()));
            }
        }
        Ok(out)
    }

    /// `tr`: the coefficient of the identity word.
    fn apply_phi(&self, x: &GroupAlgElem) -> Result<Rat> {
        self.check_capacity(x)?;
        Ok(x.coeff(&GroupWord::identity()))
    }

    fn embed_b(&self, b: &LaurentH) -> GroupAlgElem {
        GroupAlgElem::from_terms(
            b.coef()
                .iter()
                .map(|(k, c)| (GroupWord::h_pow(*k), c.clone())),
        )
    }

    fn one_b(&self) -> LaurentH {
        LaurentH::one()
    }

    fn zero_b(&self) -> LaurentH {
        LaurentH::zero()
    }

    fn add_b(&self, x: &LaurentH, y: &LaurentH) -> LaurentH {
        x.add(y)
    }

    fn mul_b(&self, x: &LaurentH, y: &LaurentH) -> LaurentH {
        x.mul(y)
    }

    fn scale_b(&self, c: &Rat, x: &LaurentH) -> LaurentH {
        x.scale(c)
    }

    fn b_basis_sample(&self) -> Vec<LaurentH> {
        vec![
            LaurentH::one(),
            LaurentH::monomial(1, Scalar::one()),
            LaurentH::monomial(-1, Scalar::one()),
            LaurentH::monomial(2, Scalar::one()),
        ]
    }

    fn eq_mode(&self) -> EqMode {
        EqMode::Exact
    }

    fn eq_a(&self, x: &GroupAlgElem, y: &GroupAlgElem) -> bool {
        x == y
    }

    fn eq_b(&self, x: &LaurentH, y: &LaurentH) -> bool {
        x == y
    }

    fn as_scalar_multiple(&self, b: &LaurentH) -> Option<Rat> {
        if b.coef().is_empty() {
            return Some(Scalar::zero());
        }
        if b.coef().len() == 1 {
            if let Some(c) = b.coef().get(&0) {
                return Some(c.clone());
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use rand::{Rng, SeedableRng};

    #[test]
    fn reduction() {
        let ab: GroupWord = "ab".parse().unwrap();
        let ba_inv: GroupWord = "BA".parse().unwrap();
        assert_eq!(ab.concat(&ba_inv), GroupWord::identity());
        assert_eq!("aA".parse::<GroupWord>().unwrap(), GroupWord::identity());
        assert_eq!("abBA".parse::<GroupWord>().unwrap(), GroupWord::identity());
        assert_eq!(GroupWord::h().to_string(), "abAB");
    }

    #[test]
    fn reduction_fuzz() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let letters: Vec<i8> = (0..rng.gen_range(0..10))
                .map(|_| *[1i8, -1, 2, -2].get(rng.gen_range(0..4)).unwrap())
                .collect();
            let w = GroupWord::from_letters(&letters);
            assert_eq!(w.concat(&w.inverse()), GroupWord::identity());
            // reduced: no adjacent cancelling pair
            assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        }
    }

    #[test]
    fn h_powers() {
        assert_eq!(GroupWord::h_pow(2).len(), 8);
        assert_eq!(GroupWord::h_pow(-3).len(), 12);
        assert_eq!(GroupWord::h_pow(2).as_h_power(), Some(2));
        assert_eq!(GroupWord::h_pow(-1).as_h_power(), Some(-1));
        assert_eq!("ab".parse::<GroupWord>().unwrap().as_h_power(), None);
        assert_eq!("abAb".parse::<GroupWord>().unwrap().as_h_power(), None);
        assert_eq!(GroupWord::identity().as_h_power(), Some(0));
    }

    #[test]
    fn projection_example() {
        // E(alpha_e e + alpha_h h + alpha_a a) = alpha_e e + alpha_h h
        let model = FreeGroupModel::new();
        let x = GroupAlgElem::from_terms([
            (GroupWord::identity(), rat(1, 2)),
            (GroupWord::h(), rat(2, 3)),
            (GroupWord::gen_a(), rat_int(5)),
        ]);
        let e = model.apply_e(&x).unwrap();
        assert_eq!(e.coeff_at(0), rat(1, 2));
        assert_eq!(e.coeff_at(1), rat(2, 3));
        assert_eq!(e.coef().len(), 2);
        assert_eq!(model.apply_phi(&x).unwrap(), rat(1, 2));
        // tr(E(x)) = tr(x)
        assert_eq!(
            model.apply_phi(&model.embed_b(&e)).unwrap(),
            model.apply_phi(&x).unwrap()
        );
    }

    #[test]
    fn capacity_cap() {
        let model = FreeGroupModel::new().with_word_cap(4);
        let long = GroupAlgElem::from_word("ababab".parse().unwrap());
        assert!(matches!(
            model.apply_e(&long),
            Err(crate::Error::Capacity(_))
        ));
        let a = GroupAlgElem::from_word("aba".parse().unwrap());
        let b = GroupAlgElem::from_word("ba".parse().unwrap());
        assert!(model.mul_a(&a, &b).is_err());
    }
}
