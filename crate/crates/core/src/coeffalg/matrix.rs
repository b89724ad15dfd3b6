//! Dense square matrices over an arbitrary scalar, and the tensor-factor
//! probability-space model `M_N (x) M_K` with its partial-trace conditional
//! expectation.

use super::PSpaceModel;
use crate::scalar::{EqMode, Rat, Scalar, FLOAT_TOL};
use crate::{capacity_err, domain_err, Result};
use rand::Rng;
use std::fmt;

/// Square matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix{}x{} [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, S::one());
        }
        m
    }

    /// Elementary matrix with a single 1 at `(r, c)`.
    pub fn elementary(dim: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zero(dim);
        m.set(r, c, S::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return domain_err("matrix rows must form a square");
        }
        Ok(Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Shift with ones on the subdiagonal.
    pub fn lower_shift(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 1..dim {
            m.set(i, i - 1, S::one());
        }
        m
    }

    /// Shift with ones on the superdiagonal.
    pub fn upper_shift(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 1..dim {
            m.set(i - 1, i, S::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zero(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let v = out.get(r, c).add(&a.mul(rhs.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.dim {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Kronecker product; result dimension is `self.dim * rhs.dim`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let d1 = self.dim;
        let d2 = rhs.dim;
        let mut out = Self::zero(d1 * d2);
        for i in 0..d1 {
            for j in 0..d1 {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for s in 0..d2 {
                    for t in 0..d2 {
                        out.set(i * d2 + s, j * d2 + t, a.mul(rhs.get(s, t)));
                    }
                }
            }
        }
        out
    }

    pub fn eq_with(&self, rhs: &Self, mode: EqMode) -> bool {
        self.dim == rhs.dim
            && self
                .data
                .iter()
                .zip(&rhs.data)
                .all(|(a, b)| mode.eq(a, b))
    }

    /// Largest entry magnitude of `self - rhs`, for deviation reports.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.sub(b).abs_f64())
            .fold(0.0, f64::max)
    }
}

/// How the scalar functional of a [`MatrixTensorModel`] evaluates.
#[derive(Clone, Debug)]
pub enum PhiSpec<S> {
    /// Normalized trace `tr / (N*K)`; compatible with the partial trace by
    /// construction.
    NormalizedTrace,
    /// `sum_i w_i * x_ii` with caller-supplied diagonal weights. Non-uniform
    /// weights give a deliberately incompatible functional.
    WeightedDiagonal(Vec<S>),
    /// `phi'(x) = phi(E(x))`, the induced compatible functional.
    ComposeWithE(Box<PhiSpec<S>>),
}

/// `A = M_{N*K}` viewed as N-blocks of K-blocks, `B = M_N` embedded as
/// `b (x) 1_K`, `E` the partial normalized trace over the K factor, `phi` a
/// trace-like functional on `A`.
#[derive(Clone, Debug)]
pub struct MatrixTensorModel<S: Scalar> {
    n_dim: usize,
    k_dim: usize,
    generators: Vec<Matrix<S>>,
    phi: PhiSpec<S>,
    eq: EqMode,
}

impl<S: Scalar> MatrixTensorModel<S> {
    pub fn new(n_dim: usize, k_dim: usize, generators: Vec<Matrix<S>>) -> Result<Self> {
        if n_dim < 1 || k_dim < 1 {
            return domain_err("tensor model needs N >= 1 and K >= 1");
        }
        let dim = n_dim * k_dim;
        if generators.iter().any(|g| g.dim() != dim) {
            return domain_err(format!("generators must be {dim}x{dim}"));
        }
        Ok(MatrixTensorModel {
            n_dim,
            k_dim,
            generators,
            phi: PhiSpec::NormalizedTrace,
            eq: if S::EXACT {
                EqMode::Exact
            } else {
                EqMode::Abs(FLOAT_TOL)
            },
        })
    }

    /// The matrix counterexample: generators `x = L (x) 1_K` and
    /// `y = U (x) 1_K` with `L`, `U` the lower/upper shifts of `M_N`, so that
    /// `E(x)` and `E(y)` reproduce the shifts exactly.
    pub fn shift_example(n_dim: usize, k_dim: usize) -> Result<Self> {
        if n_dim < 2 {
            return domain_err("shift example needs N >= 2");
        }
        let ik = Matrix::identity(k_dim);
        let x = Matrix::lower_shift(n_dim).kron(&ik);
        let y = Matrix::upper_shift(n_dim).kron(&ik);
        Self::new(n_dim, k_dim, vec![x, y])
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.n_dim * self.k_dim
    }

    pub fn with_phi(mut self, phi: PhiSpec<S>) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_generators(mut self, generators: Vec<Matrix<S>>) -> Result<Self> {
        let dim = self.ambient_dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return domain_err(format!("generators must be {dim}x{dim}"));
        }
        self.generators = generators;
        Ok(self)
    }

    /// A generator `1_N (x) m` built from a K-factor matrix; such elements
    /// are B-central and have the scalar-valued property.
    pub fn central_element(&self, m: &Matrix<S>) -> Result<Matrix<S>> {
        if m.dim() != self.k_dim {
            return domain_err(format!("central element factor must be {0}x{0}", self.k_dim));
        }
        Ok(Matrix::identity(self.n_dim).kron(m))
    }

    fn eval_phi(&self, spec: &PhiSpec<S>, x: &Matrix<S>) -> S {
        match spec {
            PhiSpec::NormalizedTrace => {
                let nk = (self.n_dim * self.k_dim) as i64;
                x.trace().mul(&S::from_ratio(1, nk))
            }
            PhiSpec::WeightedDiagonal(w) => {
                let mut acc = S::zero();
                for (i, wi) in w.iter().enumerate() {
                    acc = acc.add(&wi.mul(x.get(i, i)));
                }
                acc
            }
            PhiSpec::ComposeWithE(inner) => {
                let projected = self.embed(&self.partial_trace(x));
                self.eval_phi(inner, &projected)
            }
        }
    }

    fn partial_trace(&self, x: &Matrix<S>) -> Matrix<S> {
        let mut b = Matrix::zero(self.n_dim);
        let inv_k = S::from_ratio(1, self.k_dim as i64);
        for i in 0..self.n_dim {
            for j in 0..self.n_dim {
                let mut acc = S::zero();
                for t in 0..self.k_dim {
                    acc = acc.add(x.get(i * self.k_dim + t, j * self.k_dim + t));
                }
                b.set(i, j, acc.mul(&inv_k));
            }
        }
        b
    }

    fn embed(&self, b: &Matrix<S>) -> Matrix<S> {
        b.kron(&Matrix::identity(self.k_dim))
    }
}

impl MatrixTensorModel<Rat> {
    /// Random exact model: generators with small random rational entries.
    pub fn random_exact(
        n_dim: usize,
        k_dim: usize,
        num_generators: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let dim = n_dim * k_dim;
        let generators = (0..num_generators)
            .map(|_| random_matrix(dim, rng))
            .collect();
        Self::new(n_dim, k_dim, generators)
    }
}

/// Random matrix with entries `p/q`, `p` in `-3..=3`, `q` in `1..=2`.
pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> Matrix<Rat> {
    let mut m = Matrix::zero(dim);
    for r in 0..dim {
        for c in 0..dim {
            let p = rng.gen_range(-3i64..=3);
            let q = rng.gen_range(1i64..=2);
            m.set(r, c, Rat::from_ratio(p, q));
        }
    }
    m
}

impl<S: Scalar> PSpaceModel for MatrixTensorModel<S> {
    type S = S;
    type A = Matrix<S>;
    type B = Matrix<S>;

    fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn generator(&self, idx: usize) -> Result<Matrix<S>> {
        self.generators
            .get(idx)
            .cloned()
            .ok_or_else(|| crate::Error::Domain(format!("no generator {idx}")))
    }

    fn one_a(&self) -> Matrix<S> {
        Matrix::identity(self.ambient_dim())
    }

    fn add_a(&self, x: &Matrix<S>, y: &Matrix<S>) -> Matrix<S> {
        x.add(y)
    }

    fn neg_a(&self, x: &Matrix<S>) -> Matrix<S> {
        x.neg()
    }

    fn mul_a(&self, x: &Matrix<S>, y: &Matrix<S>) -> Result<Matrix<S>> {
        Ok(x.mul(y))
    }

    fn scale_a(&self, c: &S, x: &Matrix<S>) -> Matrix<S> {
        x.scale(c)
    }

    fn apply_e(&self, x: &Matrix<S>) -> Result<Matrix<S>> {
        if x.dim() != self.ambient_dim() {
            return capacity_err("element dimension does not match the model");
        }
        Ok(self.partial_trace(x))
    }

    fn apply_phi(&self, x: &Matrix<S>) -> Result<S> {
        if x.dim() != self.ambient_dim() {
            return capacity_err("element dimension does not match the model");
        }
        Ok(self.eval_phi(&self.phi.clone(), x))
    }

    fn embed_b(&self, b: &Matrix<S>) -> Matrix<S> {
        self.embed(b)
    }

    fn one_b(&self) -> Matrix<S> {
        Matrix::identity(self.n_dim)
    }

    fn zero_b(&self) -> Matrix<S> {
        Matrix::zero(self.n_dim)
    }

    fn add_b(&self, x: &Matrix<S>, y: &Matrix<S>) -> Matrix<S> {
        x.add(y)
    }

    fn mul_b(&self, x: &Matrix<S>, y: &Matrix<S>) -> Matrix<S> {
        x.mul(y)
    }

    fn scale_b(&self, c: &S, x: &Matrix<S>) -> Matrix<S> {
        x.scale(c)
    }

    fn b_basis_sample(&self) -> Vec<Matrix<S>> {
        let mut basis = Vec::new();
        for r in 0..self.n_dim {
            for c in 0..self.n_dim {
                basis.push(Matrix::elementary(self.n_dim, r, c));
            }
        }
        basis
    }

    fn eq_mode(&self) -> EqMode {
        self.eq
    }

    fn eq_a(&self, x: &Matrix<S>, y: &Matrix<S>) -> bool {
        x.eq_with(y, self.eq)
    }

    fn eq_b(&self, x: &Matrix<S>, y: &Matrix<S>) -> bool {
        x.eq_with(y, self.eq)
    }

    fn as_scalar_multiple(&self, b: &Matrix<S>) -> Option<S> {
        let alpha = b.get(0, 0).clone();
        for r in 0..b.dim() {
            for c in 0..b.dim() {
                let expect = if r == c { alpha.clone() } else { S::zero() };
                if !self.eq.eq(b.get(r, c), &expect) {
                    return None;
                }
            }
        }
        Some(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn shift_products() {
        let l = Matrix::<Rat>::lower_shift(3);
        let u = Matrix::<Rat>::upper_shift(3);
        let lu = l.mul(&u);
        // L*U = diag(0, 1, 1)
        assert_eq!(lu.get(0, 0), &rat(0, 1));
        assert_eq!(lu.get(1, 1), &rat(1, 1));
        assert_eq!(lu.get(2, 2), &rat(1, 1));
        assert_eq!(lu.trace(), rat(2, 1));
    }

    #[test]
    fn partial_trace_example() {
        // Single 1 in the (1,1) N-block's (1,1) K-slot maps to E_11 / 2.
        let model = MatrixTensorModel::<Rat>::new(2, 2, vec![]).unwrap();
        let x = Matrix::elementary(4, 0, 0);
        let e = model.apply_e(&x).unwrap();
        assert_eq!(e, Matrix::elementary(2, 0, 0).scale(&rat(1, 2)));
        // phi of diag(1,0,0,0) is 1/(N*K) = 1/4.
        assert_eq!(model.apply_phi(&x).unwrap(), rat(1, 4));
        assert_eq!(model.apply_phi(&model.one_a()).unwrap(), rat(1, 1));
    }

    #[test]
    fn e_is_bimodule_and_idempotent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let model = MatrixTensorModel::random_exact(2, 3, 1, &mut rng).unwrap();
        for _ in 0..50 {
            let x = random_matrix(6, &mut rng);
            let b = random_matrix(2, &mut rng);
            let b2 = random_matrix(2, &mut rng);
            let lhs = model
                .apply_e(&model.embed_b(&b).mul(&x).mul(&model.embed_b(&b2)))
                .unwrap();
            let rhs = b.mul(&model.apply_e(&x).unwrap()).mul(&b2);
            assert_eq!(lhs, rhs);
            let e = model.apply_e(&x).unwrap();
            assert_eq!(model.apply_e(&model.embed_b(&e)).unwrap(), e);
        }
    }

    #[test]
    fn compatibility_of_canonical_trace() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let model = MatrixTensorModel::<Rat>::new(3, 2, vec![]).unwrap();
        for _ in 0..40 {
            let x = random_matrix(6, &mut rng);
            let e = model.apply_e(&x).unwrap();
            assert_eq!(
                model.apply_phi(&x).unwrap(),
                model.apply_phi(&model.embed_b(&e)).unwrap()
            );
        }
    }

    #[test]
    fn scalar_multiple_detection() {
        let model = MatrixTensorModel::<Rat>::new(2, 2, vec![]).unwrap();
        assert_eq!(
            model.as_scalar_multiple(&Matrix::identity(2).scale(&rat(3, 2))),
            Some(rat(3, 2))
        );
        assert_eq!(model.as_scalar_multiple(&Matrix::lower_shift(2)), None);
        assert_eq!(model.as_scalar_multiple(&Matrix::zero(2)), Some(rat(0, 1)));
    }
}
