//! Multilinear moment/cumulant functionals over a coefficient algebra `B`.
//!
//! A [`LinFunctional`] evaluates at a generator word with `B`-elements
//! inserted in the gaps: `F(x_{w1} (x) b_2 x_{w2} (x) ... (x) b_n x_{wn})`.
//! This is the data operator-valued Möbius inversion actually needs: the
//! nested evaluation of a partition inserts the value of every inner block as
//! a left multiplier on the parent factor that follows it, innermost first,
//! which keeps producing fresh gap insertions.
//!
//! Functionals are pure and internally memoized, so they can be layered:
//! cumulants derived from moments, moments rebuilt from cumulants, free
//! joint functionals assembled from family functionals, product-word
//! functionals on top of a joint one.

use crate::coeffalg::PSpaceModel;
use crate::ncpart::{enumerate_nc, mobius_to_top_table, nesting_structure, NoncrossingPartition};
use crate::scalar::{Rat, Scalar};
use crate::series::{FormalSeries, Word};
use crate::{domain_err, Result};
use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

/// Ring operations on `B`-elements, detached from any functional. The
/// multilinear layer is exact, so rational scaling is part of the contract.
pub trait BRing<B>: Send + Sync {
    fn one(&self) -> B;
    fn zero(&self) -> B;
    fn add(&self, x: &B, y: &B) -> B;
    fn mul(&self, x: &B, y: &B) -> B;
    fn scale_int(&self, k: i64, x: &B) -> B;
    fn scale_rat(&self, c: &Rat, x: &B) -> B;
    fn is_zero(&self, x: &B) -> bool;
}

/// `BRing` view of an exact model's coefficient algebra.
pub struct ModelBRing<M: PSpaceModel>(pub Arc<M>);

impl<M> BRing<M::B> for ModelBRing<M>
where
    M: PSpaceModel<S = Rat> + Send + Sync,
{
    fn one(&self) -> M::B {
        self.0.one_b()
    }
    fn zero(&self) -> M::B {
        self.0.zero_b()
    }
    fn add(&self, x: &M::B, y: &M::B) -> M::B {
        self.0.add_b(x, y)
    }
    fn mul(&self, x: &M::B, y: &M::B) -> M::B {
        self.0.mul_b(x, y)
    }
    fn scale_int(&self, k: i64, x: &M::B) -> M::B {
        self.0.scale_b(&Rat::from_int(k), x)
    }
    fn scale_rat(&self, c: &Rat, x: &M::B) -> M::B {
        self.0.scale_b(c, x)
    }
    fn is_zero(&self, x: &M::B) -> bool {
        self.0.eq_b(x, &self.0.zero_b())
    }
}

/// Plain exact matrix algebra as a `BRing`, for table-backed functionals
/// that have no model behind them.
pub struct MatrixBRing {
    pub dim: usize,
}

impl BRing<crate::coeffalg::Matrix<Rat>> for MatrixBRing {
    fn one(&self) -> crate::coeffalg::Matrix<Rat> {
        crate::coeffalg::Matrix::identity(self.dim)
    }
    fn zero(&self) -> crate::coeffalg::Matrix<Rat> {
        crate::coeffalg::Matrix::zero(self.dim)
    }
    fn add(&self, x: &crate::coeffalg::Matrix<Rat>, y: &crate::coeffalg::Matrix<Rat>) -> crate::coeffalg::Matrix<Rat> {
        x.add(y)
    }
    fn mul(&self, x: &crate::coeffalg::Matrix<Rat>, y: &crate::coeffalg::Matrix<Rat>) -> crate::coeffalg::Matrix<Rat> {
        x.mul(y)
    }
    fn scale_int(&self, k: i64, x: &crate::coeffalg::Matrix<Rat>) -> crate::coeffalg::Matrix<Rat> {
        x.scale(&Rat::from_int(k))
    }
    fn scale_rat(&self, c: &Rat, x: &crate::coeffalg::Matrix<Rat>) -> crate::coeffalg::Matrix<Rat> {
        x.scale(c)
    }
    fn is_zero(&self, x: &crate::coeffalg::Matrix<Rat>) -> bool {
        x == &crate::coeffalg::Matrix::zero(self.dim)
    }
}

/// A `B`-multilinear functional of generator words with gap insertions.
/// `ins` has one element per gap (`letters.len() - 1`).
pub trait LinFunctional<B>: Send + Sync {
    fn s(&self) -> usize;
    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B>;
}

fn check_args<B>(letters: &[u8], ins: &[B]) -> Result<()> {
    if letters.is_empty() {
        return domain_err("functional evaluated at an empty word");
    }
    if ins.len() != letters.len() - 1 {
        return domain_err(format!(
            "expected {} insertions for a word of length {}, got {}",
            letters.len() - 1,
            letters.len(),
            ins.len()
        ));
    }
    Ok(())
}

/// Nested (operator-valued) evaluation of a partition.
///
/// `letters` and `ins` describe the decorated word on `1..=n`; `eval_block`
/// evaluates one block at its subword with the accumulated gap multipliers.
/// Inner blocks are contracted innermost first; the value of a block in the
/// gap before a parent leg joins that leg's multiplier chain, and the values
/// of outer blocks multiply left to right in `B`.
pub fn nested_eval<B: Clone>(
    ring: &dyn BRing<B>,
    pi: &NoncrossingPartition,
    letters: &[u8],
    ins: &[B],
    eval_block: &mut dyn FnMut(&[usize], &[B]) -> Result<B>,
) -> Result<B> {
    check_args(letters, ins)?;
    if pi.n() != letters.len() {
        return domain_err(format!(
            "partition on {} points evaluated at a word of length {}",
            pi.n(),
            letters.len()
        ));
    }
    let forest = nesting_structure(pi);
    // multiplier sitting before position p (p >= 2)
    let ins_before = |p: usize| -> &B { &ins[p - 2] };

    fn block_value<B: Clone>(
        b: usize,
        pi: &NoncrossingPartition,
        forest: &crate::ncpart::NestingForest,
        ring: &dyn BRing<B>,
        ins_before: &dyn Fn(usize) -> B,
        eval_block: &mut dyn FnMut(&[usize], &[B]) -> Result<B>,
    ) -> Result<B> {
        let legs = &pi.blocks()[b];
        let children = &forest.children[b];
        let mut child_iter = children.iter().peekable();
        let mut gap_ins: Vec<B> = Vec::with_capacity(legs.len().saturating_sub(1));
        for i in 1..legs.len() {
            let lo = legs[i - 1];
            let hi = legs[i];
            let mut mult: Option<B> = None;
            while let Some(&&c) = child_iter.peek() {
                let start = pi.blocks()[c][0];
                if start < lo {
                    return domain_err("nesting forest violates block order");
                }
                if start > hi {
                    break;
                }
                child_iter.next();
                let val = block_value(c, pi, forest, ring, ins_before, eval_block)?;
                let piece = ring.mul(&ins_before(start), &val);
                mult = Some(match mult {
                    None => piece,
                    Some(m) => ring.mul(&m, &piece),
                });
            }
            let closing = ins_before(hi);
            gap_ins.push(match mult {
                None => closing,
                Some(m) => ring.mul(&m, &closing),
            });
        }
        eval_block(legs, &gap_ins)
    }

    let ins_owned = |p: usize| -> B { ins_before(p).clone() };
    let mut out: Option<B> = None;
    for &r in &forest.roots {
        let val = block_value(r, pi, &forest, ring, &ins_owned, eval_block)?;
        out = Some(match out {
            None => val,
            Some(acc) => {
                let start = pi.blocks()[r][0];
                ring.mul(&ring.mul(&acc, ins_before(start)), &val)
            }
        });
    }
    Ok(out.expect("partitions have at least one block"))
}

type Memo<B> = Mutex<HashMap<(Vec<u8>, Vec<B>), B>>;

/// The moment functional of a model's generators:
/// `E(x_{w1} b_2 x_{w2} ... b_n x_{wn})` evaluated directly in the model.
pub struct ModelMomentFn<M: PSpaceModel>
where
    M::B: Eq + Hash,
{
    model: Arc<M>,
    memo: Memo<M::B>,
}

impl<M: PSpaceModel> ModelMomentFn<M>
where
    M::B: Eq + Hash,
{
    pub fn new(model: Arc<M>) -> Self {
        ModelMomentFn {
            model,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl<M> LinFunctional<M::B> for ModelMomentFn<M>
where
    M: PSpaceModel + Send + Sync,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    fn s(&self) -> usize {
        self.model.generator_count()
    }

    fn eval(&self, letters: &[u8], ins: &[M::B]) -> Result<M::B> {
        check_args(letters, ins)?;
        let key = (letters.to_vec(), ins.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let product = self.model.eval_word_inserted(letters, ins)?;
        let value = self.model.apply_e(&product)?;
        self.memo.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }
}

/// Cumulant functional derived from a moment functional by Möbius inversion:
/// `C(w; b) = sum over pi of (nested moment evaluation) * mu(pi, 1_n)`.
pub struct CumulantFn<B> {
    base: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
    memo: Memo<B>,
}

impl<B: Clone + Eq + Hash + Send + Sync> CumulantFn<B> {
    pub fn new(base: Arc<dyn LinFunctional<B>>, ring: Arc<dyn BRing<B>>) -> Self {
        CumulantFn {
            base,
            ring,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl<B: Clone + Eq + Hash + Send + Sync> LinFunctional<B> for CumulantFn<B> {
    fn s(&self) -> usize {
        self.base.s()
    }

    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B> {
        check_args(letters, ins)?;
        let key = (letters.to_vec(), ins.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let n = letters.len();
        let mu = mobius_to_top_table(n)?;
        let mut acc = self.ring.zero();
        for pi in enumerate_nc(n)?.iter() {
            let weight = mu[&pi.rgs()];
            if weight == 0 {
                continue;
            }
            let base = &self.base;
            let term = nested_eval(self.ring.as_ref(), pi, letters, ins, &mut |legs, gap| {
                let sub: Vec<u8> = legs.iter().map(|&p| letters[p - 1]).collect();
                base.eval(&sub, gap)
            })?;
            acc = self.ring.add(&acc, &self.ring.scale_int(weight, &term));
        }
        self.memo.lock().unwrap().insert(key, acc.clone());
        Ok(acc)
    }
}

/// Moment functional rebuilt from a cumulant functional by the zeta sum:
/// `M(w; b) = sum over pi of (nested cumulant evaluation)`.
pub struct MomentFromCumulantFn<B> {
    base: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
    memo: Memo<B>,
}

impl<B: Clone + Eq + Hash + Send + Sync> MomentFromCumulantFn<B> {
    pub fn new(base: Arc<dyn LinFunctional<B>>, ring: Arc<dyn BRing<B>>) -> Self {
        MomentFromCumulantFn {
            base,
            ring,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl<B: Clone + Eq + Hash + Send + Sync> LinFunctional<B> for MomentFromCumulantFn<B> {
    fn s(&self) -> usize {
        self.base.s()
    }

    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B> {
        check_args(letters, ins)?;
        let key = (letters.to_vec(), ins.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let n = letters.len();
        let mut acc = self.ring.zero();
        for pi in enumerate_nc(n)?.iter() {
            let base = &self.base;
            let term = nested_eval(self.ring.as_ref(), pi, letters, ins, &mut |legs, gap| {
                let sub: Vec<u8> = legs.iter().map(|&p| letters[p - 1]).collect();
                base.eval(&sub, gap)
            })?;
            acc = self.ring.add(&acc, &term);
        }
        self.memo.lock().unwrap().insert(key, acc.clone());
        Ok(acc)
    }
}

/// Joint cumulant functional of free families: single-family words delegate
/// to the family functional (with letters translated), mixed words vanish.
pub struct FreeJointCumulantFn<B> {
    families: Vec<(usize, usize, Arc<dyn LinFunctional<B>>)>,
    ring: Arc<dyn BRing<B>>,
    s: usize,
}

impl<B: Clone> FreeJointCumulantFn<B> {
    /// Families occupy consecutive letter ranges in the given order.
    pub fn new(family_fns: Vec<Arc<dyn LinFunctional<B>>>, ring: Arc<dyn BRing<B>>) -> Self {
        let mut families = Vec::new();
        let mut offset = 0usize;
        for f in family_fns {
            let s = f.s();
            families.push((offset, s, f));
            offset += s;
        }
        FreeJointCumulantFn {
            families,
            ring,
            s: offset,
        }
    }
}

impl<B: Clone + Send + Sync> LinFunctional<B> for FreeJointCumulantFn<B> {
    fn s(&self) -> usize {
        self.s
    }

    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B> {
        check_args(letters, ins)?;
        let family = self.families.iter().find(|(off, s, _)| {
            letters
                .iter()
                .all(|&l| (l as usize) > *off && (l as usize) <= off + s)
        });
        match family {
            Some((off, _, f)) => {
                let translated: Vec<u8> = letters.iter().map(|&l| l - *off as u8).collect();
                f.eval(&translated, ins)
            }
            None => Ok(self.ring.zero()),
        }
    }
}

/// Moment functional of the products `z_j = x_j y_j` on top of a joint
/// moment functional of the `x` and `y` families (letters `1..=s` and
/// `s+1..=2s`).
pub struct ProductMomentFn<B> {
    joint_moments: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
    s: usize,
}

impl<B: Clone> ProductMomentFn<B> {
    pub fn new(joint_moments: Arc<dyn LinFunctional<B>>, ring: Arc<dyn BRing<B>>, s: usize) -> Self {
        ProductMomentFn {
            joint_moments,
            ring,
            s,
        }
    }
}

impl<B: Clone + Send + Sync> LinFunctional<B> for ProductMomentFn<B> {
    fn s(&self) -> usize {
        self.s
    }

    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B> {
        check_args(letters, ins)?;
        let mut expanded = Vec::with_capacity(2 * letters.len());
        let mut expanded_ins = Vec::with_capacity(2 * letters.len() - 1);
        for (j, &l) in letters.iter().enumerate() {
            if j > 0 {
                expanded_ins.push(ins[j - 1].clone());
            }
            expanded.push(l);
            expanded_ins.push(self.ring.one());
            expanded.push(l + self.s as u8);
        }
        self.joint_moments.eval(&expanded, &expanded_ins)
    }
}

/// Bare-table functional with central-family semantics: insertions commute
/// out to the left, `F(w; b_2..b_n) = b_2 * ... * b_n * T(w)`.
///
/// This is exactly the behaviour of a family whose elements commute with
/// `B`; inversion through it is an exact inverse pair whenever the stored
/// values commute among themselves (scalar multiples of the identity in
/// particular).
pub struct CentralTableFn<B> {
    table: FormalSeries<B>,
    ring: Arc<dyn BRing<B>>,
}

impl<B: Clone + PartialEq> CentralTableFn<B> {
    pub fn new(table: FormalSeries<B>, ring: Arc<dyn BRing<B>>) -> Self {
        CentralTableFn { table, ring }
    }
}

impl<B: Clone + PartialEq + Send + Sync> LinFunctional<B> for CentralTableFn<B> {
    fn s(&self) -> usize {
        self.table.s()
    }

    fn eval(&self, letters: &[u8], ins: &[B]) -> Result<B> {
        check_args(letters, ins)?;
        let w = Word::new(letters.to_vec(), self.table.s())?;
        let value = self
            .table
            .coef_checked(&w)?
            .cloned()
            .unwrap_or_else(|| self.ring.zero());
        let mut out = value;
        for b in ins.iter().rev() {
            out = self.ring.mul(b, &out);
        }
        Ok(out)
    }
}

/// Trivial slice of a functional: the `Word -> B` table with all insertions
/// equal to `1_B`, up to the given order.
pub fn trivial_table<B: Clone + PartialEq>(
    f: &dyn LinFunctional<B>,
    ring: &dyn BRing<B>,
    order: usize,
) -> Result<FormalSeries<B>> {
    let s = f.s();
    let mut out = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let ins = vec![ring.one(); w.len() - 1];
        let value = f.eval(w.letters(), &ins)?;
        if !ring.is_zero(&value) {
            out.set(w, value)?;
        }
    }
    Ok(out)
}

/// Symmetric slice: all insertions equal to a fixed `b0`.
pub fn symmetric_table<B: Clone + PartialEq>(
    f: &dyn LinFunctional<B>,
    ring: &dyn BRing<B>,
    order: usize,
    b0: &B,
) -> Result<FormalSeries<B>> {
    let s = f.s();
    let mut out = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let ins = vec![b0.clone(); w.len() - 1];
        let value = f.eval(w.letters(), &ins)?;
        if !ring.is_zero(&value) {
            out.set(w, value)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffalg::{Matrix, MatrixTensorModel};
    use crate::scalar::rat_int;
    use rand::SeedableRng;

    fn shift_model() -> Arc<MatrixTensorModel<Rat>> {
        Arc::new(MatrixTensorModel::shift_example(3, 2).unwrap())
    }

    #[test]
    fn nested_eval_single_and_nested_blocks() {
        let model = shift_model();
        let moments = ModelMomentFn::new(Arc::clone(&model));
        let ring = ModelBRing(Arc::clone(&model));
        let ones = vec![model.one_b(); 3];

        // 1_4 evaluates to E(x x x x) directly
        let pi = NoncrossingPartition::maximum(4);
        let direct = nested_eval(&ring, &pi, &[1, 1, 1, 1], &ones, &mut |legs, gap| {
            let sub: Vec<u8> = legs.iter().map(|&p| [1u8, 1, 1, 1][p - 1]).collect();
            moments.eval(&sub, gap)
        })
        .unwrap();
        let x = model.generator(0).unwrap();
        let x4 = x.mul(&x).mul(&x).mul(&x);
        assert_eq!(direct, model.apply_e(&x4).unwrap());

        // {(1,4),(2,3)} evaluates to E(x * E(x x) * x)
        let pi: NoncrossingPartition = "{(1,4),(2,3)}".parse().unwrap();
        let nested = nested_eval(&ring, &pi, &[1, 1, 1, 1], &ones, &mut |legs, gap| {
            let sub: Vec<u8> = legs.iter().map(|&p| [1u8, 1, 1, 1][p - 1]).collect();
            moments.eval(&sub, gap)
        })
        .unwrap();
        let exx = model.apply_e(&x.mul(&x)).unwrap();
        let expect = model
            .apply_e(&x.mul(&model.embed_b(&exx)).mul(&x))
            .unwrap();
        assert_eq!(nested, expect);
    }

    #[test]
    fn first_cumulants_match_expectations() {
        let model = shift_model();
        let moments: Arc<dyn LinFunctional<Matrix<Rat>>> =
            Arc::new(ModelMomentFn::new(Arc::clone(&model)));
        let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(ModelBRing(Arc::clone(&model)));
        let cumulants = CumulantFn::new(moments, ring);

        // K_1(x) = E(x), K_2^t(x,y) = E(xy) - E(x)E(y)
        let x = model.generator(0).unwrap();
        let y = model.generator(1).unwrap();
        let k1 = cumulants.eval(&[1], &[]).unwrap();
        assert_eq!(k1, model.apply_e(&x).unwrap());
        let k2 = cumulants.eval(&[1, 2], &[model.one_b()]).unwrap();
        let exy = model.apply_e(&x.mul(&y)).unwrap();
        let ex_ey = model
            .apply_e(&x)
            .unwrap()
            .mul(&model.apply_e(&y).unwrap());
        assert_eq!(k2, exy.sub(&ex_ey));
    }

    #[test]
    fn moment_cumulant_functionals_are_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let model = Arc::new(MatrixTensorModel::random_exact(2, 2, 2, &mut rng).unwrap());
        let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(ModelBRing(Arc::clone(&model)));
        let moments: Arc<dyn LinFunctional<Matrix<Rat>>> =
            Arc::new(ModelMomentFn::new(Arc::clone(&model)));
        let cumulants: Arc<dyn LinFunctional<Matrix<Rat>>> = Arc::new(CumulantFn::new(
            Arc::clone(&moments),
            Arc::clone(&ring),
        ));
        let rebuilt = MomentFromCumulantFn::new(cumulants, Arc::clone(&ring));
        for w in Word::all_up_to(2, 4) {
            let ins = vec![model.one_b(); w.len() - 1];
            assert_eq!(
                rebuilt.eval(w.letters(), &ins).unwrap(),
                moments.eval(w.letters(), &ins).unwrap(),
                "word {w}"
            );
        }
    }

    #[test]
    fn central_table_semantics() {
        let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(MatrixBRing { dim: 2 });
        let mut series = FormalSeries::zero(1, 3);
        let t = Matrix::identity(2).scale(&rat_int(3));
        series.set(Word::new(vec![1, 1], 1).unwrap(), t.clone()).unwrap();
        let f = CentralTableFn::new(series, Arc::clone(&ring));
        let b = Matrix::elementary(2, 0, 1);
        let got = f.eval(&[1, 1], &[b.clone()]).unwrap();
        assert_eq!(got, b.mul(&t));
        // absent word is zero
        assert!(ring.is_zero(&f.eval(&[1], &[]).unwrap()));
    }
}
