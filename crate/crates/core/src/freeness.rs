//! Freeness as vanishing mixed cumulants: free joint distributions,
//! R-transform addition and concatenation, and boxed convolution.
//!
//! Boxed convolution pairs every partition with its Kreweras complement on
//! the alternating 2n-point union: `x`-letters occupy odd positions,
//! `y`-letters even positions, and the nested-insertion evaluation of
//! [`crate::cumulant`] runs on the union. In scalar mode the evaluation
//! factorizes into the product of the two block products, which is the fast
//! path.

use crate::cumulant::multilinear::{
    nested_eval, trivial_table, BRing, CentralTableFn, CumulantFn, FreeJointCumulantFn,
    LinFunctional, MomentFromCumulantFn, ProductMomentFn,
};
use crate::cumulant::{
    cumulants_from_moments, eval_partitioned_scalar, moments_from_cumulants, CumulantTable,
    MomentTable,
};
use crate::ncpart::{enumerate_nc, NoncrossingPartition};
use crate::scalar::{Rat, Scalar};
use crate::series::{FormalSeries, Word};
use crate::{domain_err, Result};
use std::hash::Hash;
use std::sync::Arc;

/// Assignment of each generator index `1..=s` to a family label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyPartition {
    labels: Vec<usize>,
}

impl FamilyPartition {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return domain_err("family partition needs at least one generator");
        }
        Ok(FamilyPartition { labels })
    }

    /// Families sized `sizes[0], sizes[1], ...` over consecutive indices.
    pub fn consecutive(sizes: &[usize]) -> Result<Self> {
        let mut labels = Vec::new();
        for (fam, &sz) in sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(fam).take(sz));
        }
        Self::new(labels)
    }

    pub fn s(&self) -> usize {
        self.labels.len()
    }

    /// True iff the word's letters span at least two families.
    pub fn is_mixed(&self, w: &Word) -> bool {
        let first = self.labels[w.letters()[0] as usize - 1];
        w.letters()
            .iter()
            .any(|&l| self.labels[l as usize - 1] != first)
    }
}

/// Scan a cumulant table for nonvanishing mixed entries; returns the verdict
/// together with the witnesses.
pub fn mixed_cumulants_vanish<C: Clone + PartialEq>(
    c: &CumulantTable<C>,
    fam: &FamilyPartition,
    is_zero: impl Fn(&C) -> bool,
) -> Result<(bool, Vec<Word>)> {
    if fam.s() != c.series().s() {
        return domain_err("family partition does not match the table alphabet");
    }
    let mut witnesses = Vec::new();
    for (w, value) in c.series().entries() {
        if fam.is_mixed(w) && !is_zero(value) {
            witnesses.push(w.clone());
        }
    }
    Ok((witnesses.is_empty(), witnesses))
}

/// Joint cumulant table of free families: within-family entries are copied
/// onto consecutive letter ranges, every mixed entry vanishes.
pub fn free_joint_cumulants<C: Clone + PartialEq>(
    families: &[CumulantTable<C>],
    order: usize,
) -> Result<CumulantTable<C>> {
    if families.is_empty() {
        return domain_err("free product of zero families");
    }
    let s_total: usize = families.iter().map(|f| f.series().s()).sum();
    let mut joint = FormalSeries::zero(s_total, order);
    let mut offset = 0u8;
    for fam in families {
        for (w, c) in fam.series().entries() {
            if w.len() <= order {
                joint.set(w.shift(offset), c.clone())?;
            }
        }
        offset += fam.series().s() as u8;
    }
    Ok(CumulantTable(joint))
}

/// The amalgamated free product functional, realized combinatorially: build
/// the joint cumulant table (mixed entries zero) and sum it back to moments.
pub fn free_joint_distribution<S: Scalar>(
    families: &[CumulantTable<S>],
    order: usize,
) -> Result<MomentTable<S>> {
    moments_from_cumulants(&free_joint_cumulants(families, order)?)
}

/// `R_{x,y} = R_x (+) R_y` on disjoint alphabets: pure-`x` words keep their
/// coefficients, pure-`y` words shift up, mixed words vanish.
pub fn r_concatenate<C: Clone + PartialEq>(
    f: &FormalSeries<C>,
    g: &FormalSeries<C>,
) -> Result<FormalSeries<C>> {
    let order = f.order().min(g.order());
    let mut out = FormalSeries::zero(f.s() + g.s(), order);
    for (w, c) in f.entries() {
        if w.len() <= order {
            out.set(w.clone(), c.clone())?;
        }
    }
    for (w, c) in g.entries() {
        if w.len() <= order {
            out.set(w.shift(f.s() as u8), c.clone())?;
        }
    }
    Ok(out)
}

/// `R_{x_1+y_1, ..., x_s+y_s} = R_x + R_y` for free families: coefficient-wise
/// sum. The freeness hypothesis is the caller's contract; the arithmetic is
/// plain series addition.
pub fn r_add<S: Scalar>(f: &FormalSeries<S>, g: &FormalSeries<S>) -> Result<FormalSeries<S>> {
    f.add(g)
}

/// The Zeta table: every cumulant entry 1. `f (*) Zeta` is the moment table
/// of `f`.
pub fn zeta_table(s: usize, order: usize) -> CumulantTable<Rat> {
    let mut t = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        t.set(w, Rat::one()).unwrap();
    }
    CumulantTable(t)
}

/// The delta table: first-order entries 1, everything else 0 — the cumulant
/// table of the unit element, and the identity for boxed convolution.
pub fn delta_table(s: usize, order: usize) -> CumulantTable<Rat> {
    let mut t = FormalSeries::zero(s, order);
    for l in 1..=s as u8 {
        t.set(Word::from_letter(l), Rat::one()).unwrap();
    }
    CumulantTable(t)
}

/// Scalar boxed convolution:
/// `(f (*) g)(w) = sum over pi of f_pi(w) * g_{Kr(pi)}(w)`.
pub fn boxed_convolution_scalar<S: Scalar>(
    f: &CumulantTable<S>,
    g: &CumulantTable<S>,
) -> Result<CumulantTable<S>> {
    if f.series().s() != g.series().s() {
        return domain_err("boxed convolution needs equal alphabets");
    }
    let order = f.series().order().min(g.series().order());
    let s = f.series().s();
    let mut out = FormalSeries::zero(s, order);
    let words = Word::all_up_to(s, order);
    for n in 1..=order {
        let pairs: Vec<(NoncrossingPartition, NoncrossingPartition)> = enumerate_nc(n)?
            .iter()
            .map(|pi| (pi.clone(), pi.kreweras()))
            .collect();
        for w in words.iter().filter(|w| w.len() == n) {
            let mut acc = S::zero();
            for (pi, kr) in &pairs {
                let left = eval_partitioned_scalar(f.series(), pi, w)?;
                if left.is_zero() {
                    continue;
                }
                let right = eval_partitioned_scalar(g.series(), kr, w)?;
                acc = acc.add(&left.mul(&right));
            }
            if !acc.is_zero() {
                out.set(w.clone(), acc)?;
            }
        }
    }
    Ok(CumulantTable(out))
}

/// Amalgamated boxed convolution of two cumulant functionals: every word sums
/// the nested evaluation of `pi ∪ Kr(pi)` over the interleaved 2n-point word,
/// `x`-blocks dispatching to `fx` and `y`-blocks to `fy`.
///
/// The outer insertions are trivial, matching the restriction that the right
/// factor enter through its trivial R-transform.
pub fn boxed_convolution_functional<B: Clone + Send + Sync>(
    fx: &dyn LinFunctional<B>,
    fy: &dyn LinFunctional<B>,
    ring: &dyn BRing<B>,
    order: usize,
) -> Result<FormalSeries<B>>
where
    B: PartialEq,
{
    if fx.s() != fy.s() {
        return domain_err("boxed convolution needs equal alphabets");
    }
    let s = fx.s();
    let mut out = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let n = w.len();
        let letters = w.letters();
        let letter_at = |p: usize| -> u8 {
            if p % 2 == 1 {
                letters[(p + 1) / 2 - 1]
            } else {
                letters[p / 2 - 1]
            }
        };
        let doubled: Vec<u8> = (1..=2 * n).map(letter_at).collect();
        let ones = vec![ring.one(); 2 * n - 1];
        let mut acc = ring.zero();
        for pi in enumerate_nc(n)?.iter() {
            let union = pi.alternating_union(&pi.kreweras())?;
            let term = nested_eval(ring, &union, &doubled, &ones, &mut |legs, gap| {
                let sub: Vec<u8> = legs.iter().map(|&p| letter_at(p)).collect();
                if legs[0] % 2 == 1 {
                    fx.eval(&sub, gap)
                } else {
                    fy.eval(&sub, gap)
                }
            })?;
            acc = ring.add(&acc, &term);
        }
        if !ring.is_zero(&acc) {
            out.set(w, acc)?;
        }
    }
    Ok(out)
}

/// Amalgamated boxed convolution on bare operator-valued tables, under the
/// central-family lift; the right table must be trivial (`b0 = 1_B`).
pub fn boxed_convolution_central<B>(
    f: &CumulantTable<B>,
    g: &CumulantTable<B>,
    ring: Arc<dyn BRing<B>>,
) -> Result<CumulantTable<B>>
where
    B: Clone + PartialEq + Send + Sync + 'static,
{
    if f.series().s() != g.series().s() {
        return domain_err("boxed convolution needs equal alphabets");
    }
    let order = f.series().order().min(g.series().order());
    let fx = CentralTableFn::new(f.series().clone(), Arc::clone(&ring));
    let fy = CentralTableFn::new(g.series().clone(), Arc::clone(&ring));
    let series = boxed_convolution_functional(&fx, &fy, ring.as_ref(), order)?;
    Ok(CumulantTable(series))
}

/// Trivial cumulant table of the products `z_j = x_j y_j` of two families
/// that are free over `B`, computed from first principles: assemble the
/// joint cumulant functional (mixed entries zero), rebuild joint moments,
/// restrict to product words, Möbius-invert. The independent oracle for the
/// boxed-convolution theorem.
pub fn product_word_cumulants<B: Clone + Eq + Hash + Send + Sync + 'static>(
    fx: Arc<dyn LinFunctional<B>>,
    fy: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
    order: usize,
) -> Result<FormalSeries<B>> {
    if fx.s() != fy.s() {
        return domain_err("product of families needs equal alphabets");
    }
    let s = fx.s();
    let joint_c: Arc<dyn LinFunctional<B>> =
        Arc::new(FreeJointCumulantFn::new(vec![fx, fy], Arc::clone(&ring)));
    let joint_m: Arc<dyn LinFunctional<B>> =
        Arc::new(MomentFromCumulantFn::new(joint_c, Arc::clone(&ring)));
    let z_m: Arc<dyn LinFunctional<B>> =
        Arc::new(ProductMomentFn::new(joint_m, Arc::clone(&ring), s));
    let z_c = CumulantFn::new(z_m, Arc::clone(&ring));
    trivial_table(&z_c, ring.as_ref(), order)
}

/// Scalar product-word cumulants through the free joint distribution, the
/// brute-force oracle for scalar boxed convolution.
pub fn product_word_cumulants_scalar(
    fx: &CumulantTable<Rat>,
    fy: &CumulantTable<Rat>,
    order: usize,
) -> Result<CumulantTable<Rat>> {
    if fx.series().s() != fy.series().s() {
        return domain_err("product of families needs equal alphabets");
    }
    let s = fx.series().s();
    let joint = free_joint_cumulants(&[fx.clone(), fy.clone()], 2 * order)?;
    let mut z_m = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let mut doubled = Vec::with_capacity(2 * w.len());
        for &l in w.letters() {
            doubled.push(l);
            doubled.push(l + s as u8);
        }
        let value = crate::cumulant::moment_at(&joint, &Word::new(doubled, 2 * s)?)?;
        if !value.is_zero() {
            z_m.set(w, value)?;
        }
    }
    cumulants_from_moments(&MomentTable(z_m))
}

/// Operator-valued cumulants of a family that is free from `B` in the scalar
/// space: `K_n = weight(n) * k_n * 1_B`, where `weight(n)` is the product
/// `phi(b_2) ... phi(b_n)` of the interleaved insertions, a function of word
/// length for a uniform `b0` (all 1 in the trivial case).
pub fn cumulants_free_from_b<B: Clone + PartialEq + Send + Sync>(
    scalar_c: &CumulantTable<Rat>,
    weight: impl Fn(usize) -> Rat,
    ring: &dyn BRing<B>,
) -> Result<CumulantTable<B>> {
    if weight(1) != Rat::one() {
        return domain_err("length-1 words carry no insertions; weight(1) must be 1");
    }
    let mut out = FormalSeries::zero(scalar_c.series().s(), scalar_c.series().order());
    for (w, k) in scalar_c.series().entries() {
        let coeff = weight(w.len()).mul(k);
        if coeff.is_zero() {
            continue;
        }
        out.set(w.clone(), ring.scale_rat(&coeff, &ring.one()))?;
    }
    Ok(CumulantTable(out))
}
