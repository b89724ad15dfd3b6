//! Coefficient-algebra abstraction: a unital algebra `B` inside an ambient
//! algebra `A`, with a conditional expectation `E: A -> B` and a scalar
//! functional `phi: A -> scalars`, plus two concrete models.
//!
//! * [`MatrixTensorModel`]: `A = M_{N*K}` as N-blocks of K-blocks, `B = M_N`
//!   embedded as `b (x) 1_K`, `E` the partial normalized trace over the K
//!   factor, `phi` the normalized trace.
//! * [`FreeGroupModel`]: `A = C[F_2]` on reduced words, `B = C[<h>]` for the
//!   commutator `h = a b a^-1 b^-1`, `E` the coefficient projection onto
//!   powers of `h`, `phi = tr` the coefficient of the identity.

pub mod groupalg;
pub mod matrix;

pub use groupalg::{FreeGroupModel, GroupAlgElem, GroupWord, LaurentH, DEFAULT_WORD_CAP};
pub use matrix::{random_matrix, Matrix, MatrixTensorModel, PhiSpec};

use crate::scalar::{EqMode, Scalar};
use crate::{domain_err, Result};

/// A concrete realization of `(A, B, E, phi)` with named generators.
///
/// Models are immutable after construction and every evaluation is pure, so
/// values may be shared freely across threads.
pub trait PSpaceModel {
    type S: Scalar;
    type A: Clone + PartialEq + std::fmt::Debug;
    type B: Clone + PartialEq + std::fmt::Debug;

    fn generator_count(&self) -> usize;
    /// Generator by zero-based index.
    fn generator(&self, idx: usize) -> Result<Self::A>;

    fn one_a(&self) -> Self::A;
    fn add_a(&self, x: &Self::A, y: &Self::A) -> Self::A;
    fn neg_a(&self, x: &Self::A) -> Self::A;
    fn mul_a(&self, x: &Self::A, y: &Self::A) -> Result<Self::A>;
    fn scale_a(&self, c: &Self::S, x: &Self::A) -> Self::A;

    /// The conditional expectation; the result lives in `B`.
    fn apply_e(&self, x: &Self::A) -> Result<Self::B>;
    /// The scalar functional.
    fn apply_phi(&self, x: &Self::A) -> Result<Self::S>;
    /// Embedding of `B` into `A`.
    fn embed_b(&self, b: &Self::B) -> Self::A;

    fn one_b(&self) -> Self::B;
    fn zero_b(&self) -> Self::B;
    fn add_b(&self, x: &Self::B, y: &Self::B) -> Self::B;
    fn mul_b(&self, x: &Self::B, y: &Self::B) -> Self::B;
    fn scale_b(&self, c: &Self::S, x: &Self::B) -> Self::B;

    /// A finite sample of `B` used by centrality and subalgebra checks.
    fn b_basis_sample(&self) -> Vec<Self::B>;

    fn eq_mode(&self) -> EqMode;
    fn eq_a(&self, x: &Self::A, y: &Self::A) -> bool;
    fn eq_b(&self, x: &Self::B, y: &Self::B) -> bool;

    /// `Some(alpha)` iff `b = alpha * 1_B` within the model's equality mode.
    fn as_scalar_multiple(&self, b: &Self::B) -> Option<Self::S>;

    /// `phi` applied to the embedded image of a `B`-element.
    fn phi_b(&self, b: &Self::B) -> Result<Self::S> {
        self.apply_phi(&self.embed_b(b))
    }

    /// Product of generators along a word of one-based letters, optionally
    /// with `B`-elements inserted before each factor after the first.
    fn eval_word(&self, letters: &[u8]) -> Result<Self::A> {
        self.eval_word_inserted(letters, &[])
    }

    /// `x_{w1} * ins_1 * x_{w2} * ... * ins_{n-1} * x_{wn}`; `ins` is either
    /// empty or one `B`-element per gap.
    fn eval_word_inserted(&self, letters: &[u8], ins: &[Self::B]) -> Result<Self::A> {
        if letters.is_empty() {
            return domain_err("empty generator word");
        }
        if !ins.is_empty() && ins.len() != letters.len() - 1 {
            return domain_err("insertion count must be word length - 1");
        }
        let mut acc = self.generator(letters[0] as usize - 1)?;
        for (i, &l) in letters.iter().enumerate().skip(1) {
            if !ins.is_empty() {
                acc = self.mul_a(&acc, &self.embed_b(&ins[i - 1]))?;
            }
            acc = self.mul_a(&acc, &self.generator(l as usize - 1)?)?;
        }
        Ok(acc)
    }
}

/// The model with `phi' = phi o E` in place of `phi`; compatible with `E` by
/// idempotence, whatever the original functional was.
#[derive(Clone, Debug)]
pub struct ComposedPhiModel<M: PSpaceModel>(pub M);

impl<M: PSpaceModel> PSpaceModel for ComposedPhiModel<M> {
    type S = M::S;
    type A = M::A;
    type B = M::B;

    fn generator_count(&self) -> usize {
        self.0.generator_count()
    }
    fn generator(&self, idx: usize) -> Result<Self::A> {
        self.0.generator(idx)
    }
    fn one_a(&self) -> Self::A {
        self.0.one_a()
    }
    fn add_a(&self, x: &Self::A, y: &Self::A) -> Self::A {
        self.0.add_a(x, y)
    }
    fn neg_a(&self, x: &Self::A) -> Self::A {
        self.0.neg_a(x)
    }
    fn mul_a(&self, x: &Self::A, y: &Self::A) -> Result<Self::A> {
        self.0.mul_a(x, y)
    }
    fn scale_a(&self, c: &Self::S, x: &Self::A) -> Self::A {
        self.0.scale_a(c, x)
    }
    fn apply_e(&self, x: &Self::A) -> Result<Self::B> {
        self.0.apply_e(x)
    }
    fn apply_phi(&self, x: &Self::A) -> Result<Self::S> {
        let e = self.0.apply_e(x)?;
        self.0.apply_phi(&self.0.embed_b(&e))
    }
    fn embed_b(&self, b: &Self::B) -> Self::A {
        self.0.embed_b(b)
    }
    fn one_b(&self) -> Self::B {
        self.0.one_b()
    }
    fn zero_b(&self) -> Self::B {
        self.0.zero_b()
    }
    fn add_b(&self, x: &Self::B, y: &Self::B) -> Self::B {
        self.0.add_b(x, y)
    }
    fn mul_b(&self, x: &Self::B, y: &Self::B) -> Self::B {
        self.0.mul_b(x, y)
    }
    fn scale_b(&self, c: &Self::S, x: &Self::B) -> Self::B {
        self.0.scale_b(c, x)
    }
    fn b_basis_sample(&self) -> Vec<Self::B> {
        self.0.b_basis_sample()
    }
    fn eq_mode(&self) -> EqMode {
        self.0.eq_mode()
    }
    fn eq_a(&self, x: &Self::A, y: &Self::A) -> bool {
        self.0.eq_a(x, y)
    }
    fn eq_b(&self, x: &Self::B, y: &Self::B) -> bool {
        self.0.eq_b(x, y)
    }
    fn as_scalar_multiple(&self, b: &Self::B) -> Option<Self::S> {
        self.0.as_scalar_multiple(b)
    }
}

/// The matrix counterexample pair: elements `x`, `y` of
/// `MatrixTensorModel(N, K)` whose conditional expectations are exactly the
/// lower and upper shift of `M_N`.
pub fn shift_example_elements<S: Scalar>(
    n_dim: usize,
    k_dim: usize,
) -> Result<(Matrix<S>, Matrix<S>)> {
    if n_dim < 2 {
        return domain_err("shift example needs N >= 2");
    }
    let ik = Matrix::identity(k_dim);
    Ok((
        Matrix::lower_shift(n_dim).kron(&ik),
        Matrix::upper_shift(n_dim).kron(&ik),
    ))
}
