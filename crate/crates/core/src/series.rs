//! Truncated formal series in `s` noncommuting indeterminants.
//!
//! Series have no constant term: coefficients are indexed by nonempty words
//! over `{1, ..., s}` of length up to the truncation order, with absent words
//! denoting zero. Words are maintained in (length, lexicographic) order so
//! serialized output is deterministic.

use crate::scalar::Scalar;
use crate::{domain_err, Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Default truncation order for scalar coefficients.
pub const DEFAULT_SCALAR_ORDER: usize = 8;
/// Default truncation order for operator-valued coefficients.
pub const DEFAULT_B_ORDER: usize = 6;

/// A nonempty word of one-based letters in `{1, ..., s}`; the index object of
/// every series and table coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>, s: usize) -> Result<Self> {
        if letters.is_empty() {
            return domain_err("words are nonempty");
        }
        if letters.iter().any(|&l| l == 0 || l as usize > s) {
            return domain_err(format!("word letters must lie in 1..={s}"));
        }
        Ok(Word(letters))
    }

    /// All words of length 1..=order over `{1..s}` in canonical order.
    pub fn all_up_to(s: usize, order: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut current: Vec<Vec<u8>> = vec![vec![]];
        for _ in 1..=order {
            let mut next = Vec::new();
            for w in &current {
                for l in 1..=s as u8 {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned().map(Word));
            current = next;
        }
        out
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Subword along one-based positions.
    pub fn select(&self, positions: &[usize]) -> Word {
        Word(positions.iter().map(|&p| self.0[p - 1]).collect())
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&rhs.0);
        Word(v)
    }

    /// Shift every letter up by `offset` (for embedding into a larger
    /// alphabet).
    pub fn shift(&self, offset: u8) -> Word {
        Word(self.0.iter().map(|&l| l + offset).collect())
    }

    pub fn from_letter(l: u8) -> Word {
        Word(vec![l])
    }
}

impl Ord for Word {
    /// Graded order: by length, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A truncated formal series: sparse map from words to coefficients. The
/// coefficient type is a scalar for ordinary series and a `B`-element for
/// operator-valued series and tables.
#[derive(Clone, PartialEq, Debug)]
pub struct FormalSeries<C> {
    s: usize,
    order: usize,
    coef: BTreeMap<Word, C>,
}

impl<C: Clone + PartialEq> FormalSeries<C> {
    pub fn zero(s: usize, order: usize) -> Self {
        FormalSeries {
            s,
            order,
            coef: BTreeMap::new(),
        }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.coef.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.coef.len()
    }

    /// Coefficient at a word, if present (absent means zero).
    pub fn get(&self, w: &Word) -> Option<&C> {
        self.coef.get(w)
    }

    /// Coefficient at a word within the truncation order; errors beyond it.
    pub fn coef_checked(&self, w: &Word) -> Result<Option<&C>> {
        if w.len() > self.order {
            return Err(Error::OutOfRange(format!(
                "word {w} exceeds truncation order {}",
                self.order
            )));
        }
        Ok(self.coef.get(w))
    }

    pub fn set(&mut self, w: Word, value: C) -> Result<()> {
        if w.len() > self.order {
            return Err(Error::OutOfRange(format!(
                "word {w} exceeds truncation order {}",
                self.order
            )));
        }
        if w.letters().iter().any(|&l| l as usize > self.s) {
            return domain_err(format!("word {w} outside alphabet 1..={}", self.s));
        }
        self.coef.insert(w, value);
        Ok(())
    }

    pub fn remove(&mut self, w: &Word) {
        self.coef.remove(w);
    }

    pub fn map<D: Clone + PartialEq>(&self, f: impl Fn(&C) -> D) -> FormalSeries<D> {
        FormalSeries {
            s: self.s,
            order: self.order,
            coef: self.coef.iter().map(|(w, c)| (w.clone(), f(c))).collect(),
        }
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut coef = BTreeMap::new();
        for (w, c) in &self.coef {
            if w.len() <= order {
                coef.insert(w.clone(), c.clone());
            }
        }
        FormalSeries {
            s: self.s,
            order,
            coef,
        }
    }

    /// Coefficient-wise sum; the result order is the min of the two orders.
    pub fn add_with(
        &self,
        rhs: &Self,
        add: impl Fn(&C, &C) -> C,
        is_zero: impl Fn(&C) -> bool,
    ) -> Result<Self> {
        if self.s != rhs.s {
            return domain_err(format!(
                "series addition needs equal alphabets ({} vs {})",
                self.s, rhs.s
            ));
        }
        let order = self.order.min(rhs.order);
        let mut coef: BTreeMap<Word, C> = BTreeMap::new();
        for (w, c) in self.coef.iter().chain(rhs.coef.iter()) {
            if w.len() > order {
                continue;
            }
            match coef.remove(w) {
                None => {
                    coef.insert(w.clone(), c.clone());
                }
                Some(prev) => {
                    let sum = add(&prev, c);
                    if !is_zero(&sum) {
                        coef.insert(w.clone(), sum);
                    }
                }
            }
        }
        Ok(FormalSeries {
            s: self.s,
            order,
            coef,
        })
    }
}

impl<C: Scalar> FormalSeries<C> {
    /// Scalar-coefficient sum.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.add_with(rhs, |a, b| a.add(b), |c| c.is_zero())
    }

    /// Scalar multiple of every coefficient.
    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.s, self.order);
        }
        let coef = self
            .coef
            .iter()
            .map(|(w, v)| (w.clone(), v.mul(c)))
            .collect();
        FormalSeries {
            s: self.s,
            order: self.order,
            coef,
        }
    }

    /// Coefficient at a word; zero when absent, error beyond order.
    pub fn coef(&self, w: &Word) -> Result<C> {
        Ok(self.coef_checked(w)?.cloned().unwrap_or_else(C::zero))
    }

    fn insert_add(&mut self, w: Word, c: C) {
        if w.len() > self.order {
            return;
        }
        let entry = self.coef.entry(w).or_insert_with(C::zero);
        *entry = entry.add(&c);
    }

    fn normalize(&mut self) {
        self.coef.retain(|_, c| !c.is_zero());
    }

    /// Noncommutative product: words multiply by concatenation, truncated.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.s != rhs.s {
            return domain_err("series product needs equal alphabets");
        }
        let order = self.order.min(rhs.order);
        let mut out = Self::zero(self.s, order);
        for (w1, c1) in &self.coef {
            if w1.len() >= order {
                continue;
            }
            for (w2, c2) in &rhs.coef {
                if w1.len() + w2.len() > order {
                    continue;
                }
                out.insert_add(w1.concat(w2), c1.mul(c2));
            }
        }
        out.normalize();
        Ok(out)
    }

    /// `z_i * self`: prepend the given letter to every word.
    pub fn left_mul_letter(&self, letter: u8) -> Self {
        let zi = Word::from_letter(letter);
        let mut out = Self::zero(self.s, self.order);
        for (w, c) in &self.coef {
            if w.len() + 1 <= self.order {
                out.insert_add(zi.concat(w), c.clone());
            }
        }
        out
    }

    /// Identity substitution arguments `z_i`.
    pub fn identity_args(s: usize, order: usize) -> Vec<(C, FormalSeries<C>)> {
        (0..s)
            .map(|_| (C::one(), FormalSeries::zero(s, order)))
            .collect()
    }

    /// Formal composition `f(h_1, ..., h_s)` where slot `i` receives
    /// `h_i(z) = c_i * z_i + g_i(z)`.
    ///
    /// The constant offsets make arguments like `z * (1 + m(z))` expressible
    /// as `1 * z + (z * m)` even though series carry no constant term; every
    /// `h_i` has no constant part, so composition into a series without
    /// constant term is well defined at finite truncation.
    pub fn substitute(&self, args: &[(C, FormalSeries<C>)]) -> Result<Self> {
        if args.len() != self.s {
            return domain_err(format!(
                "substitute needs one argument per indeterminant ({} != {})",
                args.len(),
                self.s
            ));
        }
        let arg_s = args.iter().map(|(_, g)| g.s()).max().unwrap_or(self.s);
        if args.iter().any(|(_, g)| g.s() != arg_s) {
            return domain_err("substitution arguments must share one alphabet");
        }
        let order = self.order;
        // h_i = c_i * z_i + g_i
        let mut h: Vec<FormalSeries<C>> = Vec::with_capacity(self.s);
        for (i, (c, g)) in args.iter().enumerate() {
            let mut hi = g.truncated(order);
            hi.s = arg_s;
            if !c.is_zero() {
                hi.insert_add(Word::from_letter(i as u8 + 1), c.clone());
            }
            hi.normalize();
            h.push(hi);
        }
        let mut out = FormalSeries::zero(arg_s, order);
        for (w, c) in &self.coef {
            let mut prod: Option<FormalSeries<C>> = None;
            for &l in w.letters() {
                let factor = &h[l as usize - 1];
                prod = Some(match prod {
                    None => factor.clone(),
                    Some(p) => p.mul(factor)?,
                });
            }
            let prod = prod.expect("words are nonempty");
            for (w2, v) in &prod.coef {
                out.insert_add(w2.clone(), c.mul(v));
            }
        }
        out.normalize();
        Ok(out)
    }
}

/// Solve the one-variable functional equation `m(z) = r(z * (1 + m(z)))`
/// degree by degree; degree `k` of `m` only depends on lower degrees, so
/// `order` sweeps pin every coefficient up to the requested order.
///
/// The corrected argument `z * (1 + m(z))` reproduces the Catalan moments of
/// the semicircular law. The variant with argument `z * m(z)` does not (it
/// forces the second moment to vanish) and is kept only as a regression
/// reference, see [`solve_moment_from_r_uncorrected`]. Ground truth is always
/// Möbius summation over the lattice.
pub fn solve_moment_from_r<C: Scalar>(
    r: &FormalSeries<C>,
    order: usize,
) -> Result<FormalSeries<C>> {
    if r.s() != 1 {
        return domain_err("the functional-equation solver is one-variable");
    }
    let r_trunc = r.truncated(order);
    let mut m = FormalSeries::<C>::zero(1, order);
    for _ in 1..=order {
        m = r_trunc.substitute(&[(C::one(), m.left_mul_letter(1))])?;
    }
    Ok(m)
}

/// Fixed point of `m(z) = r(z * m(z))`, the relation as printed; see
/// [`solve_moment_from_r`] for why this form is not used for anything but the
/// regression test that documents its failure.
pub fn solve_moment_from_r_uncorrected<C: Scalar>(
    r: &FormalSeries<C>,
    order: usize,
) -> Result<FormalSeries<C>> {
    if r.s() != 1 {
        return domain_err("the functional-equation solver is one-variable");
    }
    let r_trunc = r.truncated(order);
    let mut m = FormalSeries::<C>::zero(1, order);
    for _ in 1..=order {
        m = r_trunc.substitute(&[(C::zero(), m.left_mul_letter(1))])?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Rat};

    fn one_var(pairs: &[(usize, i64)], order: usize) -> FormalSeries<Rat> {
        let mut f = FormalSeries::zero(1, order);
        for &(deg, c) in pairs {
            f.set(Word::new(vec![1; deg], 1).unwrap(), rat_int(c))
                .unwrap();
        }
        f
    }

    #[test]
    fn word_order_is_graded() {
        let words = Word::all_up_to(2, 3);
        assert_eq!(words.len(), 2 + 4 + 8);
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert!(Word::new(vec![2], 2).unwrap() < Word::new(vec![1, 1], 2).unwrap());
        assert!(Word::new(vec![], 2).is_err());
        assert!(Word::new(vec![3], 2).is_err());
    }

    #[test]
    fn add_scale_axioms() {
        let f = one_var(&[(1, 2), (3, -1)], 5);
        let zero = FormalSeries::<Rat>::zero(1, 5);
        assert_eq!(f.add(&zero).unwrap(), f);
        let doubled = f.scale(&rat_int(2));
        assert_eq!(
            doubled.coef(&Word::new(vec![1], 1).unwrap()).unwrap(),
            rat_int(4)
        );
        assert_eq!(f.add(&f.map(|c| Scalar::neg(c))).unwrap(), zero);
        let g = one_var(&[(2, 5)], 3);
        let two_var = FormalSeries::<Rat>::zero(2, 3);
        assert!(f.add(&two_var).is_err());
        assert_eq!(f.add(&g).unwrap().order(), 3);
    }

    #[test]
    fn coef_out_of_range() {
        let f = one_var(&[(1, 1)], 4);
        assert!(f.coef(&Word::new(vec![1; 5], 1).unwrap()).is_err());
        assert_eq!(
            f.coef(&Word::new(vec![1, 1], 1).unwrap()).unwrap(),
            rat_int(0)
        );
    }

    #[test]
    fn substitute_identity_and_examples() {
        let f = one_var(&[(1, 3), (2, -2)], 6);
        let id = FormalSeries::<Rat>::identity_args(1, 6);
        assert_eq!(f.substitute(&id).unwrap(), f);

        // f(z) = z^2, z <- z(1 + m) = z + z*m with m = z^2:  z^2 + 2 z^4 + z^6
        let f = one_var(&[(2, 1)], 6);
        let m = one_var(&[(2, 1)], 6);
        let out = f.substitute(&[(rat_int(1), m.left_mul_letter(1))]).unwrap();
        assert_eq!(out, one_var(&[(2, 1), (4, 2), (6, 1)], 6));

        // f(z) = z, z <- z + z^2
        let f = one_var(&[(1, 1)], 4);
        let g = one_var(&[(2, 1)], 4);
        let out = f.substitute(&[(rat_int(1), g)]).unwrap();
        assert_eq!(out, one_var(&[(1, 1), (2, 1)], 4));
    }

    #[test]
    fn substitute_noncommutative_words() {
        let mut f = FormalSeries::<Rat>::zero(2, 3);
        f.set(Word::new(vec![1, 2], 2).unwrap(), rat_int(1)).unwrap();
        let mut g1 = FormalSeries::<Rat>::zero(2, 3);
        g1.set(Word::new(vec![1, 2], 2).unwrap(), rat_int(1)).unwrap();
        let args = vec![(rat_int(1), g1), (rat_int(1), FormalSeries::zero(2, 3))];
        let out = f.substitute(&args).unwrap();
        // (z1 + z1 z2) z2 = z1 z2 + z1 z2 z2
        assert_eq!(
            out.coef(&Word::new(vec![1, 2], 2).unwrap()).unwrap(),
            rat_int(1)
        );
        assert_eq!(
            out.coef(&Word::new(vec![1, 2, 2], 2).unwrap()).unwrap(),
            rat_int(1)
        );
        assert_eq!(out.num_entries(), 2);
    }

    #[test]
    fn substitute_associativity_sampled() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let order = 5;
            let rand_series = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut f = FormalSeries::<Rat>::zero(1, order);
                for deg in 1..=order {
                    let c = rng.gen_range(-2i64..=2);
                    if c != 0 {
                        f.set(Word::new(vec![1; deg], 1).unwrap(), rat_int(c))
                            .unwrap();
                    }
                }
                f
            };
            let f = rand_series(&mut rng);
            let g = rand_series(&mut rng);
            let h = rand_series(&mut rng);
            let gh = g.substitute(&[(rat_int(0), h.clone())]).unwrap();
            let lhs = f.substitute(&[(rat_int(0), gh)]).unwrap();
            let fg = f.substitute(&[(rat_int(0), g.clone())]).unwrap();
            let rhs = fg.substitute(&[(rat_int(0), h.clone())]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn solve_geometric() {
        // r(z) = z  =>  m = z(1+m)  =>  all moments 1
        let r = one_var(&[(1, 1)], 6);
        let m = solve_moment_from_r(&r, 6).unwrap();
        for deg in 1..=6 {
            assert_eq!(
                m.coef(&Word::new(vec![1; deg], 1).unwrap()).unwrap(),
                rat_int(1),
                "degree {deg}"
            );
        }
    }

    #[test]
    fn solve_semicircular_catalan() {
        let r = one_var(&[(2, 1)], 8);
        let m = solve_moment_from_r(&r, 8).unwrap();
        for (deg, expect) in [
            (1, 0),
            (2, 1),
            (3, 0),
            (4, 2),
            (5, 0),
            (6, 5),
            (7, 0),
            (8, 14),
        ] {
            assert_eq!(
                m.coef(&Word::new(vec![1; deg], 1).unwrap()).unwrap(),
                rat_int(expect),
                "degree {deg}"
            );
        }
        let zero = FormalSeries::<Rat>::zero(1, 8);
        assert_eq!(solve_moment_from_r(&zero, 8).unwrap(), zero);
    }

    #[test]
    fn uncorrected_form_kills_second_moment() {
        let r = one_var(&[(2, 1)], 6);
        let m = solve_moment_from_r_uncorrected(&r, 6).unwrap();
        assert_eq!(
            m.coef(&Word::new(vec![1, 1], 1).unwrap()).unwrap(),
            rat_int(0)
        );
    }
}
