//! Moment/cumulant tables and Möbius inversion over the noncrossing lattice.
//!
//! Scalar tables invert by plain block products. Operator-valued data
//! inverts through the multilinear layer ([`multilinear`]), which implements
//! the nested evaluation with gap insertions; bare `B`-valued tables get the
//! central-family semantics (insertions commute out to the left), which
//! collapses to block products when `B` degenerates to scalars.

pub mod multilinear;

use crate::coeffalg::PSpaceModel;
use crate::ncpart::{enumerate_nc, mobius_to_top_table, NoncrossingPartition};
use crate::scalar::{Rat, Scalar};
use crate::series::{FormalSeries, Word};
use crate::{domain_err, Result};
use multilinear::{
    nested_eval, BRing, CentralTableFn, CumulantFn, LinFunctional, ModelBRing, ModelMomentFn,
    MomentFromCumulantFn,
};
use std::hash::Hash;
use std::sync::Arc;

/// Table of joint moments: `word -> phi(x_w)` (scalar flavor) or
/// `word -> E(x_{w1} b0 x_{w2} ... b0 x_{wn})` (operator-valued flavor).
#[derive(Clone, PartialEq, Debug)]
pub struct MomentTable<C>(pub FormalSeries<C>);

/// Table of joint cumulants, same shapes as [`MomentTable`].
#[derive(Clone, PartialEq, Debug)]
pub struct CumulantTable<C>(pub FormalSeries<C>);

impl<C> MomentTable<C> {
    pub fn series(&self) -> &FormalSeries<C> {
        &self.0
    }
}

impl<C> CumulantTable<C> {
    pub fn series(&self) -> &FormalSeries<C> {
        &self.0
    }
}

/// Scalar partition evaluation: the product of table values over the blocks.
pub fn eval_partitioned_scalar<S: Scalar>(
    table: &FormalSeries<S>,
    pi: &NoncrossingPartition,
    w: &Word,
) -> Result<S> {
    if pi.n() != w.len() {
        return domain_err(format!(
            "partition on {} points does not fit word {w}",
            pi.n()
        ));
    }
    let mut acc = S::one();
    for block in pi.blocks() {
        let sub = w.select(block);
        let factor = table.coef(&sub)?;
        if factor.is_zero() {
            return Ok(S::zero());
        }
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// Operator-valued partition evaluation of a bare table under central-family
/// semantics: inner-block values commute out to the left of their parent's
/// value, outer blocks multiply left to right. With scalar `B` this is
/// exactly the block product.
pub fn eval_partitioned_central<B: Clone + PartialEq + Send + Sync + 'static>(
    table: &FormalSeries<B>,
    ring: Arc<dyn BRing<B>>,
    pi: &NoncrossingPartition,
    w: &Word,
) -> Result<B> {
    if pi.n() != w.len() {
        return domain_err(format!(
            "partition on {} points does not fit word {w}",
            pi.n()
        ));
    }
    let f = CentralTableFn::new(table.clone(), Arc::clone(&ring));
    let ones = vec![ring.one(); w.len() - 1];
    nested_eval(ring.as_ref(), pi, w.letters(), &ones, &mut |legs, gap| {
        let sub: Vec<u8> = legs.iter().map(|&p| w.letters()[p - 1]).collect();
        f.eval(&sub, gap)
    })
}

/// Partition evaluation of a model's operator-valued moment functional:
/// the genuinely nested form, e.g. `{(1,4),(2,3)}` at `(1,1,1,1)` gives
/// `E(x * E(x x) * x)`.
pub fn eval_partitioned_moments<M>(
    model: &Arc<M>,
    pi: &NoncrossingPartition,
    w: &Word,
) -> Result<M::B>
where
    M: PSpaceModel<S = Rat> + Send + Sync + 'static,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    if pi.n() != w.len() {
        return domain_err(format!(
            "partition on {} points does not fit word {w}",
            pi.n()
        ));
    }
    let moments = ModelMomentFn::new(Arc::clone(model));
    let ring = ModelBRing(Arc::clone(model));
    let ones = vec![model.one_b(); w.len() - 1];
    nested_eval(&ring, pi, w.letters(), &ones, &mut |legs, gap| {
        let sub: Vec<u8> = legs.iter().map(|&p| w.letters()[p - 1]).collect();
        moments.eval(&sub, gap)
    })
}

/// Möbius inversion of a scalar moment table:
/// `k(w) = sum over pi of m_pi(w) mu(pi, 1_n)`.
pub fn cumulants_from_moments<S: Scalar>(m: &MomentTable<S>) -> Result<CumulantTable<S>> {
    let series = invert_scalar(&m.0, true)?;
    Ok(CumulantTable(series))
}

/// Zeta summation of a scalar cumulant table:
/// `m(w) = sum over pi of c_pi(w)`.
pub fn moments_from_cumulants<S: Scalar>(c: &CumulantTable<S>) -> Result<MomentTable<S>> {
    let series = invert_scalar(&c.0, false)?;
    Ok(MomentTable(series))
}

/// Single-word zeta summation: the moment at `w` of a scalar cumulant table,
/// without materializing the whole moment table.
pub fn moment_at<S: Scalar>(c: &CumulantTable<S>, w: &Word) -> Result<S> {
    let mut acc = S::zero();
    for pi in enumerate_nc(w.len())?.iter() {
        acc = acc.add(&eval_partitioned_scalar(&c.0, pi, w)?);
    }
    Ok(acc)
}

fn invert_scalar<S: Scalar>(table: &FormalSeries<S>, with_mu: bool) -> Result<FormalSeries<S>> {
    let mut out = FormalSeries::zero(table.s(), table.order());
    for w in Word::all_up_to(table.s(), table.order()) {
        let n = w.len();
        let mu = if with_mu {
            Some(mobius_to_top_table(n)?)
        } else {
            None
        };
        let mut acc = S::zero();
        for pi in enumerate_nc(n)?.iter() {
            let weight = match &mu {
                Some(table) => table[&pi.rgs()],
                None => 1,
            };
            if weight == 0 {
                continue;
            }
            let term = eval_partitioned_scalar(table, pi, &w)?;
            let weighted = term.mul(&S::from_int(weight));
            acc = acc.add(&weighted);
        }
        if !acc.is_zero() {
            out.set(w, acc)?;
        }
    }
    Ok(out)
}

/// Möbius inversion of a bare operator-valued moment table under
/// central-family semantics. Exact inverse of
/// [`moments_from_cumulants_central`] whenever the stored values commute.
pub fn cumulants_from_moments_central<B: Clone + PartialEq + Send + Sync + 'static>(
    m: &MomentTable<B>,
    ring: Arc<dyn BRing<B>>,
) -> Result<CumulantTable<B>> {
    Ok(CumulantTable(invert_central(&m.0, ring, true)?))
}

/// Zeta summation of a bare operator-valued cumulant table under
/// central-family semantics.
pub fn moments_from_cumulants_central<B: Clone + PartialEq + Send + Sync + 'static>(
    c: &CumulantTable<B>,
    ring: Arc<dyn BRing<B>>,
) -> Result<MomentTable<B>> {
    Ok(MomentTable(invert_central(&c.0, ring, false)?))
}

fn invert_central<B: Clone + PartialEq + Send + Sync + 'static>(
    table: &FormalSeries<B>,
    ring: Arc<dyn BRing<B>>,
    with_mu: bool,
) -> Result<FormalSeries<B>> {
    let mut out = FormalSeries::zero(table.s(), table.order());
    for w in Word::all_up_to(table.s(), table.order()) {
        let n = w.len();
        let mu = if with_mu {
            Some(mobius_to_top_table(n)?)
        } else {
            None
        };
        let mut acc = ring.zero();
        for pi in enumerate_nc(n)?.iter() {
            let weight = match &mu {
                Some(table) => table[&pi.rgs()],
                None => 1,
            };
            if weight == 0 {
                continue;
            }
            let term = eval_partitioned_central(table, Arc::clone(&ring), pi, &w)?;
            acc = ring.add(&acc, &ring.scale_int(weight, &term));
        }
        if !ring.is_zero(&acc) {
            out.set(w, acc)?;
        }
    }
    Ok(out)
}

/// Scalar moment table of a model's generators: `word -> phi(x_w)`.
pub fn phi_moment_table<M: PSpaceModel>(model: &M, order: usize) -> Result<MomentTable<M::S>> {
    let s = model.generator_count();
    let mut out = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let value = model.apply_phi(&model.eval_word(w.letters())?)?;
        if !value.is_zero() {
            out.set(w, value)?;
        }
    }
    Ok(MomentTable(out))
}

/// Scalar cumulant table of a model's generators, by Möbius inversion of the
/// direct moment table. This is the ground-truth path for `k_n`.
pub fn phi_cumulant_table<M: PSpaceModel>(model: &M, order: usize) -> Result<CumulantTable<M::S>> {
    cumulants_from_moments(&phi_moment_table(model, order)?)
}

/// The scalar-cumulant formula through the conditional expectation:
/// `k_n(x_{w1}, ..., x_{wn}) = sum over pi of
/// (product over blocks of phi(E(x_{v1} ... x_{vk}))) mu(pi, 1_n)`,
/// valid when `phi = phi o E`.
pub fn scalar_cumulant_via_e<M: PSpaceModel>(model: &M, w: &Word) -> Result<M::S> {
    let n = w.len();
    let mu = mobius_to_top_table(n)?;
    let mut acc = M::S::zero();
    for pi in enumerate_nc(n)?.iter() {
        let weight = mu[&pi.rgs()];
        if weight == 0 {
            continue;
        }
        let mut term = M::S::from_int(weight);
        for block in pi.blocks() {
            let sub = w.select(block);
            let product = model.eval_word(sub.letters())?;
            let e = model.apply_e(&product)?;
            term = term.mul(&model.phi_b(&e)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// The companion moment formula: the double lattice sum
/// `phi(x_{w1} ... x_{wn}) = sum over pi of product over blocks of
/// (inner Möbius sum of phi(E(...)) over the block)`.
pub fn scalar_moment_via_e<M: PSpaceModel>(model: &M, w: &Word) -> Result<M::S> {
    let n = w.len();
    let mut acc = M::S::zero();
    for pi in enumerate_nc(n)?.iter() {
        let mut term = M::S::one();
        for block in pi.blocks() {
            let sub = w.select(block);
            term = term.mul(&scalar_cumulant_via_e(model, &sub)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Operator-valued moment table `word -> E(x_{w1} b0 x_{w2} ... b0 x_{wn})`
/// evaluated directly in the model.
pub fn b_moment_table<M: PSpaceModel>(
    model: &M,
    order: usize,
    b0: &M::B,
) -> Result<MomentTable<M::B>> {
    let s = model.generator_count();
    let mut out = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let ins = vec![b0.clone(); w.len() - 1];
        let product = model.eval_word_inserted(w.letters(), &ins)?;
        let value = model.apply_e(&product)?;
        if !model.eq_b(&value, &model.zero_b()) {
            out.set(w, value)?;
        }
    }
    Ok(MomentTable(out))
}

/// Operator-valued symmetric cumulant table `K_n^{symm(b0)}` of a model's
/// generators (`K_n^t` when `b0 = 1_B`), computed through the multilinear
/// Möbius inversion with genuinely nested evaluation.
pub fn b_valued_cumulants<M>(
    model: &Arc<M>,
    order: usize,
    b0: Option<M::B>,
) -> Result<CumulantTable<M::B>>
where
    M: PSpaceModel<S = Rat> + Send + Sync + 'static,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    let b0 = b0.unwrap_or_else(|| model.one_b());
    let moments: Arc<dyn LinFunctional<M::B>> = Arc::new(ModelMomentFn::new(Arc::clone(model)));
    let ring: Arc<dyn BRing<M::B>> = Arc::new(ModelBRing(Arc::clone(model)));
    let cumulants = CumulantFn::new(moments, Arc::clone(&ring));
    let series = multilinear::symmetric_table(&cumulants, ring.as_ref(), order, &b0)?;
    Ok(CumulantTable(series))
}

/// The cumulant functional of a model's generators as a shareable object,
/// for callers that need decorated evaluations rather than one table.
pub fn model_cumulant_functional<M>(model: &Arc<M>) -> Arc<dyn LinFunctional<M::B>>
where
    M: PSpaceModel<S = Rat> + Send + Sync + 'static,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    let moments: Arc<dyn LinFunctional<M::B>> = Arc::new(ModelMomentFn::new(Arc::clone(model)));
    let ring: Arc<dyn BRing<M::B>> = Arc::new(ModelBRing(Arc::clone(model)));
    Arc::new(CumulantFn::new(moments, ring))
}

/// Moment functional rebuilt from any cumulant functional.
pub fn moments_of_functional<B: Clone + Eq + Hash + Send + Sync + 'static>(
    cumulants: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
) -> Arc<dyn LinFunctional<B>> {
    Arc::new(MomentFromCumulantFn::new(cumulants, ring))
}

/// Cumulant functional derived from any moment functional.
pub fn cumulants_of_functional<B: Clone + Eq + Hash + Send + Sync + 'static>(
    moments: Arc<dyn LinFunctional<B>>,
    ring: Arc<dyn BRing<B>>,
) -> Arc<dyn LinFunctional<B>> {
    Arc::new(CumulantFn::new(moments, ring))
}

/// Outcome of the property (*) check `k_n(w) = phi(K_n^t(w))`.
#[derive(Clone, Debug)]
pub struct StarReport<S> {
    pub holds: bool,
    /// Words where the identity fails, with the gap `k_n - phi(K_n^t)`.
    pub failures: Vec<(Word, S)>,
}

/// Check the property (*) identity for every generator word up to `order`.
pub fn property_star_check<M>(model: &Arc<M>, order: usize) -> Result<StarReport<M::S>>
where
    M: PSpaceModel<S = Rat> + Send + Sync + 'static,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    let scalar = phi_cumulant_table(model.as_ref(), order)?;
    let trivial = b_valued_cumulants(model, order, None)?;
    let eq = model.eq_mode();
    let mut failures = Vec::new();
    for w in Word::all_up_to(model.generator_count(), order) {
        let k = scalar.0.coef(&w)?;
        let kt = trivial
            .0
            .get(&w)
            .cloned()
            .unwrap_or_else(|| model.zero_b());
        let phi_kt = model.phi_b(&kt)?;
        let gap = k.sub(&phi_kt);
        if !eq.is_zero(&gap) {
            failures.push((w, gap));
        }
    }
    Ok(StarReport {
        holds: failures.is_empty(),
        failures,
    })
}
