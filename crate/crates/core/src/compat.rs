//! Compatibility of the scalar functional with the conditional expectation:
//! `phi(a) = phi(E(a))`.
//!
//! "For all a in A" is operationalized as a finite corpus with a documented
//! length bound, so every verdict here is corpus-relative.

use crate::coeffalg::{ComposedPhiModel, PSpaceModel};
use crate::scalar::Scalar;
use crate::series::Word;
use crate::{domain_err, Result};
use rand::Rng;

/// A finite list of ambient-algebra elements standing in for "all of A",
/// with printable descriptions for witness reports.
pub struct WordCorpus<A> {
    pub elements: Vec<A>,
    pub descriptions: Vec<String>,
}

impl<A> WordCorpus<A> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Every product of generators of length `1..=max_len`.
pub fn generator_word_corpus<M: PSpaceModel>(
    model: &M,
    max_len: usize,
) -> Result<WordCorpus<M::A>> {
    let s = model.generator_count();
    if s == 0 {
        return domain_err("model has no generators to build a corpus from");
    }
    let mut elements = Vec::new();
    let mut descriptions = Vec::new();
    for w in Word::all_up_to(s, max_len) {
        elements.push(model.eval_word(w.letters())?);
        descriptions.push(w.to_string());
    }
    Ok(WordCorpus {
        elements,
        descriptions,
    })
}

/// Random corpus of products of generators with `B`-elements (small rational
/// combinations of the basis sample) sandwiched between some factors.
pub fn sampled_corpus<M: PSpaceModel>(
    model: &M,
    count: usize,
    max_len: usize,
    rng: &mut impl Rng,
) -> Result<WordCorpus<M::A>> {
    let s = model.generator_count();
    if s == 0 {
        return domain_err("model has no generators to build a corpus from");
    }
    let basis = model.b_basis_sample();
    let mut elements = Vec::new();
    let mut descriptions = Vec::new();
    for _ in 0..count {
        let len = rng.gen_range(1..=max_len.max(1));
        let mut acc: Option<M::A> = None;
        let mut desc = String::new();
        for j in 0..len {
            if j > 0 && !basis.is_empty() && rng.gen_bool(0.4) {
                let b = &basis[rng.gen_range(0..basis.len())];
                let c = M::S::from_int(rng.gen_range(-2i64..=2));
                let scaled = model.scale_b(&c, b);
                let embedded = model.embed_b(&scaled);
                acc = Some(match acc {
                    None => embedded,
                    Some(a) => model.mul_a(&a, &embedded)?,
                });
                desc.push_str("b.");
            }
            let idx = rng.gen_range(0..s);
            let g = model.generator(idx)?;
            acc = Some(match acc {
                None => g,
                Some(a) => model.mul_a(&a, &g)?,
            });
            desc.push_str(&format!("x{}.", idx + 1));
        }
        elements.push(acc.expect("len >= 1"));
        descriptions.push(desc);
    }
    Ok(WordCorpus {
        elements,
        descriptions,
    })
}

/// Outcome of a corpus-relative compatibility check.
#[derive(Clone, Debug)]
pub struct CompatReport {
    pub ok: bool,
    pub checked: usize,
    /// Largest `|phi(a) - phi(E(a))|` seen, as f64 for reporting.
    pub max_deviation: f64,
    /// Index and description of the worst corpus element, when deviating.
    pub witness: Option<(usize, String)>,
}

/// Check `phi(a) = phi(E(a))` on every corpus element.
pub fn is_compatible<M: PSpaceModel>(
    model: &M,
    corpus: &WordCorpus<M::A>,
) -> Result<CompatReport> {
    let eq = model.eq_mode();
    let mut max_deviation = 0.0f64;
    let mut witness = None;
    let mut ok = true;
    for (i, a) in corpus.elements.iter().enumerate() {
        let direct = model.apply_phi(a)?;
        let through_e = model.phi_b(&model.apply_e(a)?)?;
        let gap = direct.sub(&through_e);
        let dev = gap.abs_f64();
        if dev > max_deviation {
            max_deviation = dev;
            witness = Some((i, corpus.descriptions.get(i).cloned().unwrap_or_default()));
        }
        if !eq.is_zero(&gap) {
            ok = false;
        }
    }
    if ok {
        witness = None;
    }
    Ok(CompatReport {
        ok,
        checked: corpus.len(),
        max_deviation,
        witness,
    })
}

/// The induced compatible functional `phi' = phi o E`; compatible with
/// deviation exactly zero by idempotence of `E`.
pub fn induced_compatible_functional<M: PSpaceModel>(model: M) -> ComposedPhiModel<M> {
    ComposedPhiModel(model)
}

/// A model with `phi = psi o E` for a user-supplied functional on `B`;
/// compatible by construction.
pub struct PsiModel<M: PSpaceModel, F> {
    pub inner: M,
    psi: F,
}

/// Build the `psi o E` model.
pub fn make_compatible_functional<M, F>(model: M, psi: F) -> PsiModel<M, F>
where
    M: PSpaceModel,
    F: Fn(&M::B) -> M::S + Send + Sync,
{
    PsiModel { inner: model, psi }
}

impl<M, F> PSpaceModel for PsiModel<M, F>
where
    M: PSpaceModel,
    F: Fn(&M::B) -> M::S + Send + Sync,
{
    type S = M::S;
    type A = M::A;
    type B = M::B;

    fn generator_count(&self) -> usize {
        self.inner.generator_count()
    }
    fn generator(&self, idx: usize) -> Result<Self::A> {
        self.inner.generator(idx)
    }
    fn one_a(&self) -> Self::A {
        self.inner.one_a()
    }
    fn add_a(&self, x: &Self::A, y: &Self::A) -> Self::A {
        self.inner.add_a(x, y)
    }
    fn neg_a(&self, x: &Self::A) -> Self::A {
        self.inner.neg_a(x)
    }
    fn mul_a(&self, x: &Self::A, y: &Self::A) -> Result<Self::A> {
        self.inner.mul_a(x, y)
    }
    fn scale_a(&self, c: &Self::S, x: &Self::A) -> Self::A {
        self.inner.scale_a(c, x)
    }
    fn apply_e(&self, x: &Self::A) -> Result<Self::B> {
        self.inner.apply_e(x)
    }
    fn apply_phi(&self, x: &Self::A) -> Result<Self::S> {
        Ok((self.psi)(&self.inner.apply_e(x)?))
    }
    fn embed_b(&self, b: &Self::B) -> Self::A {
        self.inner.embed_b(b)
    }
    fn one_b(&self) -> Self::B {
        self.inner.one_b()
    }
    fn zero_b(&self) -> Self::B {
        self.inner.zero_b()
    }
    fn add_b(&self, x: &Self::B, y: &Self::B) -> Self::B {
        self.inner.add_b(x, y)
    }
    fn mul_b(&self, x: &Self::B, y: &Self::B) -> Self::B {
        self.inner.mul_b(x, y)
    }
    fn scale_b(&self, c: &Self::S, x: &Self::B) -> Self::B {
        self.inner.scale_b(c, x)
    }
    fn b_basis_sample(&self) -> Vec<Self::B> {
        self.inner.b_basis_sample()
    }
    fn eq_mode(&self) -> crate::scalar::EqMode {
        self.inner.eq_mode()
    }
    fn eq_a(&self, x: &Self::A, y: &Self::A) -> bool {
        self.inner.eq_a(x, y)
    }
    fn eq_b(&self, x: &Self::B, y: &Self::B) -> bool {
        self.inner.eq_b(x, y)
    }
    fn as_scalar_multiple(&self, b: &Self::B) -> Option<Self::S> {
        self.inner.as_scalar_multiple(b)
    }
}

/// Check the compatible-subalgebra identity on all products of the given
/// elements up to length `max_len`.
pub fn is_compatible_subalgebra<M: PSpaceModel>(
    model: &M,
    generating_set: &[M::A],
    max_len: usize,
) -> Result<CompatReport> {
    if generating_set.is_empty() {
        return domain_err("empty generating set");
    }
    let s = generating_set.len();
    let mut elements = Vec::new();
    let mut descriptions = Vec::new();
    for w in Word::all_up_to(s, max_len) {
        let mut acc: Option<M::A> = None;
        for &l in w.letters() {
            let g = &generating_set[l as usize - 1];
            acc = Some(match acc {
                None => g.clone(),
                Some(a) => model.mul_a(&a, g)?,
            });
        }
        elements.push(acc.expect("nonempty word"));
        descriptions.push(w.to_string());
    }
    is_compatible(
        model,
        &WordCorpus {
            elements,
            descriptions,
        },
    )
}

/// Outcome of the scalar-valued-property scan `E(x^n) = alpha_n * 1_B`.
#[derive(Clone, Debug)]
pub struct ScalarValuedReport<S> {
    /// The sequence `alpha_1..alpha_N` when every power passes.
    pub alphas: Option<Vec<S>>,
    /// First power whose `E(x^n)` is not a scalar multiple of the identity.
    pub first_failure: Option<usize>,
}

/// Scan `E(x^n)` for `n = 1..=order`.
pub fn has_scalar_valued_property<M: PSpaceModel>(
    model: &M,
    x: &M::A,
    order: usize,
) -> Result<ScalarValuedReport<M::S>> {
    let mut alphas = Vec::with_capacity(order);
    let mut power = x.clone();
    for n in 1..=order {
        let e = model.apply_e(&power)?;
        match model.as_scalar_multiple(&e) {
            Some(alpha) => alphas.push(alpha),
            None => {
                return Ok(ScalarValuedReport {
                    alphas: None,
                    first_failure: Some(n),
                })
            }
        }
        if n < order {
            power = model.mul_a(&power, x)?;
        }
    }
    Ok(ScalarValuedReport {
        alphas: Some(alphas),
        first_failure: None,
    })
}

/// `x b = b x` for every sampled `b`.
pub fn is_b_central<M: PSpaceModel>(model: &M, x: &M::A, basis: &[M::B]) -> Result<bool> {
    for b in basis {
        let eb = model.embed_b(b);
        let lhs = model.mul_a(x, &eb)?;
        let rhs = model.mul_a(&eb, x)?;
        if !model.eq_a(&lhs, &rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Report of the compatible-subalgebra construction theorem: hypotheses are
/// checked, never assumed, and the mixed-word conclusion
/// `phi(b_1 x^{k_1} ... b_m x^{k_m}) = phi(E(b_1 x^{k_1} ... b_m x^{k_m}))`
/// is tested on a corpus of compositions with total power up to `order`.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub b_central: bool,
    pub scalar_valued: bool,
    pub powers_compatible: bool,
    pub corpus_checked: usize,
    pub max_deviation: f64,
    /// `Some(verdict)` only when all three hypotheses hold.
    pub conclusion_holds: Option<bool>,
}

impl TheoremReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.b_central && self.scalar_valued && self.powers_compatible
    }
}

/// All compositions `(k_1, ..., k_m)` with `k_i >= 1` and total `<= max`.
fn compositions(max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        for k in 1..=remaining {
            current.push(k);
            rec(remaining - k, current, out);
            current.pop();
        }
    }
    rec(max, &mut Vec::new(), &mut out);
    out
}

/// Check the hypotheses and the conclusion of the B-central construction.
pub fn verify_compatible_subalgebra_theorem<M: PSpaceModel>(
    model: &M,
    x0: &M::A,
    order: usize,
) -> Result<TheoremReport> {
    let basis = model.b_basis_sample();
    let b_central = is_b_central(model, x0, &basis)?;
    let scalar_valued = has_scalar_valued_property(model, x0, order)?
        .alphas
        .is_some();

    let eq = model.eq_mode();
    let mut powers_compatible = true;
    let mut power = x0.clone();
    for _ in 1..=order {
        let direct = model.apply_phi(&power)?;
        let through_e = model.phi_b(&model.apply_e(&power)?)?;
        if !eq.is_zero(&direct.sub(&through_e)) {
            powers_compatible = false;
            break;
        }
        power = model.mul_a(&power, x0)?;
    }

    // corpus: b_1 x0^{k_1} b_2 x0^{k_2} ... with b's cycling through the basis
    let mut checked = 0usize;
    let mut max_deviation = 0.0f64;
    let mut all_ok = true;
    for comp in compositions(order) {
        let mut acc: Option<M::A> = None;
        for (j, &k) in comp.iter().enumerate() {
            let b = &basis[(j + comp.len()) % basis.len().max(1)];
            let mut factor = model.embed_b(b);
            for _ in 0..k {
                factor = model.mul_a(&factor, x0)?;
            }
            acc = Some(match acc {
                None => factor,
                Some(a) => model.mul_a(&a, &factor)?,
            });
        }
        let w = acc.expect("nonempty composition");
        let direct = model.apply_phi(&w)?;
        let through_e = model.phi_b(&model.apply_e(&w)?)?;
        let gap = direct.sub(&through_e);
        max_deviation = max_deviation.max(gap.abs_f64());
        if !eq.is_zero(&gap) {
            all_ok = false;
        }
        checked += 1;
    }

    let report = TheoremReport {
        b_central,
        scalar_valued,
        powers_compatible,
        corpus_checked: checked,
        max_deviation,
        conclusion_holds: None,
    };
    Ok(TheoremReport {
        conclusion_holds: report.hypotheses_hold().then_some(all_ok),
        ..report
    })
}
