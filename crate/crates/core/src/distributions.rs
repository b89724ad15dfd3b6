//! Semicircular and even elements, scalar and amalgamated.
//!
//! The semicircular moment law, the `NC^(even)` moment formulas and the
//! evenness transfer between the scalar and operator-valued sides all reduce
//! to restricted lattice sums; every formula here is evaluated literally and
//! cross-checked against plain Möbius inversion by the tests.

use crate::coeffalg::PSpaceModel;
use crate::cumulant::multilinear::{BRing, CumulantFn, LinFunctional};
use crate::cumulant::{CumulantTable, MomentTable};
use crate::ncpart::{enumerate_nc, enumerate_nc_even, enumerate_nc_pair, mobius_to_top_table};
use crate::scalar::{Rat, Scalar};
use crate::series::{FormalSeries, Word};
use crate::{domain_err, Error, Result};
use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

/// Specification of a one-variable distribution by its cumulants.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec {
    /// Only the second scalar cumulant is nonzero.
    Semicircular { t: Rat },
    /// Only the second operator-valued cumulant is nonzero, `K_2^t = t * 1_B`.
    BSemicircular { t: Rat, b_central: bool },
    /// Prescribed even scalar cumulants `k_2, k_4, ...` (odd entries zero).
    Even { even_cumulants: Vec<Rat> },
}

/// One-variable semicircular cumulant table: `k_2 = t`, all others zero.
pub fn semicircular_cumulants(t: &Rat, order: usize) -> Result<CumulantTable<Rat>> {
    if order < 2 {
        return domain_err("semicircular tables need order >= 2");
    }
    let mut c = FormalSeries::zero(1, order);
    if !t.is_zero() {
        c.set(Word::new(vec![1, 1], 1)?, t.clone())?;
    }
    Ok(CumulantTable(c))
}

/// Trivial operator-valued moments of a B-central B-semicircular element with
/// `K_2^t = t * 1_B`: the literal noncrossing pair-partition sum, which
/// collapses to `E(x^{2n}) = C_n t^n * 1_B` and zero odd moments.
///
/// The non-central case needs genuinely nested data and is not tabulated;
/// individual instances are reachable through the multilinear evaluators.
pub fn b_semicircular_moments<B>(
    t: &Rat,
    order: usize,
    b_central: bool,
    ring: &dyn BRing<B>,
) -> Result<Vec<B>> {
    if !b_central {
        return Err(Error::Domain(
            "non-central B-semicircular moments are not tabulated; \
             use the nested evaluators on concrete data"
                .into(),
        ));
    }
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        if n % 2 == 1 {
            out.push(ring.zero());
            continue;
        }
        let mut total = Rat::zero();
        for pi in enumerate_nc_pair(n)? {
            let mut term = Rat::one();
            for _ in pi.blocks() {
                term = term.mul(t);
            }
            total = total.add(&term);
        }
        out.push(ring.scale_rat(&total, &ring.one()));
    }
    Ok(out)
}

/// The literal double lattice sum for the scalar cumulants of a B-central
/// B-semicircular element under compatibility:
/// `k_{2n} = sum over even pi of (product over blocks of size 2k of
/// (sum over pair partitions of 2k points of t^k)) * mu(pi, 1_{2n})`,
/// with odd cumulants zero. The sum collapses to `k_2 = t` and zero beyond.
pub fn scalar_cumulants_of_b_semicircular(t: &Rat, order: usize) -> Result<Vec<Rat>> {
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        if n % 2 == 1 {
            out.push(Rat::zero());
            continue;
        }
        let mu = mobius_to_top_table(n)?;
        // inner sum per even block size: sum over NC_2(2k) of t^k
        let mut inner: HashMap<usize, Rat> = HashMap::new();
        let mut acc = Rat::zero();
        for pi in enumerate_nc_even(n)? {
            let weight = mu[&pi.rgs()];
            if weight == 0 {
                continue;
            }
            let mut term = Rat::from_int(weight);
            for block in pi.blocks() {
                let size = block.len();
                let value = match inner.get(&size) {
                    Some(v) => v.clone(),
                    None => {
                        let mut v = Rat::zero();
                        for theta in enumerate_nc_pair(size)? {
                            let mut p = Rat::one();
                            for _ in theta.blocks() {
                                p = p.mul(t);
                            }
                            v = v.add(&p);
                        }
                        inner.insert(size, v.clone());
                        v
                    }
                };
                term = term.mul(&value);
            }
            acc = acc.add(&term);
        }
        out.push(acc);
    }
    Ok(out)
}

/// A scalar semicircular family free from `B` is B-semicircular: lift the
/// scalar table to `K_n = weight(n) * k_n * 1_B`.
pub fn make_b_semicircular_from_scalar<B: Clone + PartialEq + Send + Sync>(
    scalar: &CumulantTable<Rat>,
    weight: impl Fn(usize) -> Rat,
    ring: &dyn BRing<B>,
) -> Result<CumulantTable<B>> {
    if scalar.series().s() != 1 {
        return domain_err("semicircular lift expects a one-variable table");
    }
    let two = Word::new(vec![1, 1], 1)?;
    for (w, _) in scalar.series().entries() {
        if w != &two {
            return domain_err("input table is not semicircular (entries beyond k_2)");
        }
    }
    crate::freeness::cumulants_free_from_b(scalar, weight, ring)
}

/// Joint cumulant table of a semicircular family: diagonal `k_2` entries
/// `t_j` at the words `(j, j)`, everything else zero (the off-diagonal
/// vanishing is the freeness of the family members).
pub fn semicircular_family(ts: &[Rat], order: usize) -> Result<CumulantTable<Rat>> {
    if ts.is_empty() {
        return domain_err("empty semicircular family");
    }
    if order < 2 {
        return domain_err("semicircular tables need order >= 2");
    }
    let s = ts.len();
    let mut c = FormalSeries::zero(s, order);
    for (j, t) in ts.iter().enumerate() {
        if !t.is_zero() {
            let l = (j + 1) as u8;
            c.set(Word::new(vec![l, l], s)?, t.clone())?;
        }
    }
    Ok(CumulantTable(c))
}

/// True iff every odd-length entry of the one-variable table vanishes.
pub fn is_even(c: &CumulantTable<Rat>) -> Result<bool> {
    if c.series().s() != 1 {
        return domain_err("evenness is a one-variable notion");
    }
    Ok(c.series()
        .entries()
        .all(|(w, v)| w.len() % 2 == 0 || v.is_zero()))
}

/// Operator-valued evenness of a one-variable table.
pub fn is_b_even<B: Clone + PartialEq>(
    c: &CumulantTable<B>,
    is_zero: impl Fn(&B) -> bool,
) -> Result<bool> {
    if c.series().s() != 1 {
        return domain_err("evenness is a one-variable notion");
    }
    Ok(c.series()
        .entries()
        .all(|(w, v)| w.len() % 2 == 0 || is_zero(v)))
}

/// Both sides of the restricted Möbius sum for an even moment table:
/// the `NC^(even)` sum and the unrestricted `NC` sum for `K_{2n}`. They agree
/// because every partition with an odd block hits a vanishing moment.
pub struct EvenSumPair<B> {
    pub restricted: B,
    pub unrestricted: B,
}

pub fn even_moment_cumulant_sum<B: Clone + PartialEq + Send + Sync + 'static>(
    m: &MomentTable<B>,
    two_n: usize,
    ring: Arc<dyn BRing<B>>,
) -> Result<EvenSumPair<B>> {
    if m.series().s() != 1 {
        return domain_err("even sums are one-variable");
    }
    if two_n % 2 == 1 || two_n == 0 {
        return domain_err("even sums need a positive even order");
    }
    let w = Word::new(vec![1; two_n], 1)?;
    let mu = mobius_to_top_table(two_n)?;
    let mut restricted = ring.zero();
    let mut unrestricted = ring.zero();
    for pi in enumerate_nc(two_n)?.iter() {
        let weight = mu[&pi.rgs()];
        if weight == 0 {
            continue;
        }
        let term = crate::cumulant::eval_partitioned_central(
            m.series(),
            Arc::clone(&ring),
            pi,
            &w,
        )?;
        let weighted = ring.scale_int(weight, &term);
        unrestricted = ring.add(&unrestricted, &weighted);
        if pi.is_even() {
            restricted = ring.add(&restricted, &weighted);
        }
    }
    Ok(EvenSumPair {
        restricted,
        unrestricted,
    })
}

/// Moment functional of a single ambient element, for evenness transfer
/// checks: `E(a b_2 a b_3 ... a)` with one letter.
pub struct ElementMomentFn<M: PSpaceModel>
where
    M::B: Eq + Hash,
{
    model: Arc<M>,
    elem: M::A,
    memo: Mutex<HashMap<Vec<M::B>, M::B>>,
}

impl<M: PSpaceModel> ElementMomentFn<M>
where
    M::B: Eq + Hash,
{
    pub fn new(model: Arc<M>, elem: M::A) -> Self {
        ElementMomentFn {
            model,
            elem,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl<M> LinFunctional<M::B> for ElementMomentFn<M>
where
    M: PSpaceModel + Send + Sync,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    fn s(&self) -> usize {
        1
    }

    fn eval(&self, letters: &[u8], ins: &[M::B]) -> Result<M::B> {
        if letters.iter().any(|&l| l != 1) {
            return domain_err("single-element functional has one letter");
        }
        if ins.len() != letters.len() - 1 {
            return domain_err("insertion count must be word length - 1");
        }
        if let Some(v) = self.memo.lock().unwrap().get(ins) {
            return Ok(v.clone());
        }
        let mut acc = self.elem.clone();
        for b in ins {
            acc = self.model.mul_a(&acc, &self.model.embed_b(b))?;
            acc = self.model.mul_a(&acc, &self.elem)?;
        }
        let value = self.model.apply_e(&acc)?;
        self.memo.lock().unwrap().insert(ins.to_vec(), value.clone());
        Ok(value)
    }
}

/// Report of the evenness transfer between the scalar and operator-valued
/// sides of one element.
#[derive(Clone, Debug)]
pub struct EvennessReport {
    /// Odd scalar cumulants vanish up to the order checked.
    pub scalar_even: bool,
    /// Odd operator-valued (trivial) cumulants vanish.
    pub b_even: bool,
    /// The unconditional direction: B-even implies scalar even.
    pub forward_ok: bool,
    /// Whether the nondegeneracy proxy held (all odd trivial moments lie in
    /// the scalar line), enabling the converse direction.
    pub nondegenerate: bool,
    /// The converse verdict, asserted only under the nondegeneracy proxy.
    pub converse_ok: Option<bool>,
}

/// Compute scalar and operator-valued odd cumulants of `a` up to `order` in
/// a compatible model and report both evenness verdicts.
///
/// The converse (scalar even implies B-even) needs nondegeneracy of `phi`;
/// the proxy checked here is that every odd `E(a^n)` lies in the scalar line
/// `C * 1_B`, where `phi` separates points.
pub fn evenness_transfer_check<M>(model: &Arc<M>, a: &M::A, order: usize) -> Result<EvennessReport>
where
    M: PSpaceModel<S = Rat> + Send + Sync + 'static,
    M::A: Send + Sync,
    M::B: Eq + Hash + Send + Sync,
{
    // scalar side: phi-moments of powers, Möbius inverted
    let mut moments = FormalSeries::zero(1, order);
    let mut power = a.clone();
    for n in 1..=order {
        let value = model.apply_phi(&power)?;
        if !value.is_zero() {
            moments.set(Word::new(vec![1; n], 1)?, value)?;
        }
        if n < order {
            power = model.mul_a(&power, a)?;
        }
    }
    let scalar_c = crate::cumulant::cumulants_from_moments(&MomentTable(moments))?;
    let scalar_even = is_even(&scalar_c)?;

    // operator-valued side: trivial cumulants of the single element
    let moments_fn: Arc<dyn LinFunctional<M::B>> =
        Arc::new(ElementMomentFn::new(Arc::clone(model), a.clone()));
    let ring: Arc<dyn BRing<M::B>> = Arc::new(
        crate::cumulant::multilinear::ModelBRing(Arc::clone(model)),
    );
    let cumulants_fn = CumulantFn::new(moments_fn, Arc::clone(&ring));
    let mut b_even = true;
    for n in (1..=order).step_by(2) {
        let ins = vec![model.one_b(); n - 1];
        let k = cumulants_fn.eval(&vec![1u8; n], &ins)?;
        if !ring.is_zero(&k) {
            b_even = false;
            break;
        }
    }

    // nondegeneracy proxy for the converse
    let mut nondegenerate = true;
    let mut power = a.clone();
    for n in 1..=order {
        if n % 2 == 1 {
            let e = model.apply_e(&power)?;
            if model.as_scalar_multiple(&e).is_none() {
                nondegenerate = false;
            }
        }
        if n < order {
            power = model.mul_a(&power, a)?;
        }
    }

    Ok(EvennessReport {
        scalar_even,
        b_even,
        forward_ok: !b_even || scalar_even,
        nondegenerate,
        converse_ok: nondegenerate.then_some(!scalar_even || b_even),
    })
}
