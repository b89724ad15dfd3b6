//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Every tolerance is pinned in the assertions; exact means bit-exact
//! rational equality.

use freeprob::coeffalg::{
    FreeGroupModel, GroupAlgElem, GroupWord, Matrix, MatrixTensorModel, PSpaceModel, PhiSpec,
};
use freeprob::compat::{
    generator_word_corpus, induced_compatible_functional, is_compatible, sampled_corpus,
    verify_compatible_subalgebra_theorem,
};
use freeprob::cumulant::multilinear::{
    trivial_table, BRing, LinFunctional, MatrixBRing, ModelBRing, ModelMomentFn,
};
use freeprob::cumulant::{
    cumulants_from_moments, cumulants_of_functional, moments_from_cumulants,
    moments_of_functional, phi_cumulant_table, phi_moment_table, scalar_cumulant_via_e,
    scalar_moment_via_e, CumulantTable, MomentTable,
};
use freeprob::distributions::{
    b_semicircular_moments, even_moment_cumulant_sum, evenness_transfer_check, is_even,
    scalar_cumulants_of_b_semicircular, semicircular_cumulants,
};
use freeprob::freeness::{
    boxed_convolution_functional, boxed_convolution_scalar, delta_table, free_joint_cumulants,
    product_word_cumulants, r_add, zeta_table,
};
use freeprob::ncpart::{catalan, delta, enumerate_nc, mobius, NoncrossingPartition};
use freeprob::scalar::{rat, rat_int, Rat, Scalar};
use freeprob::series::{
    solve_moment_from_r, solve_moment_from_r_uncorrected, FormalSeries, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

fn wn(letters: &[u8], s: usize) -> Word {
    Word::new(letters.to_vec(), s).unwrap()
}

fn random_scalar_table(s: usize, order: usize, rng: &mut impl Rng) -> FormalSeries<Rat> {
    let mut f = FormalSeries::zero(s, order);
    for w in Word::all_up_to(s, order) {
        let p = rng.gen_range(-5i64..=5);
        if p != 0 {
            f.set(w, rat(p, rng.gen_range(1i64..=3))).unwrap();
        }
    }
    f
}

#[test]
fn criterion_01_lattice_counts() {
    let start = Instant::now();
    let expect: [u64; 8] = [1, 2, 5, 14, 42, 132, 429, 1430];
    for n in 1..=8usize {
        let all = enumerate_nc(n).unwrap();
        assert_eq!(all.len() as u64, expect[n - 1], "|NC({n})|");
        assert_eq!(catalan(n), expect[n - 1]);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 01: PASS (lattice counts 1..8 in {elapsed:?})");
}

#[test]
fn criterion_02_mobius_values_and_recursion() {
    let expect: [i64; 6] = [1, -1, 2, -5, 14, -42];
    for n in 1..=6usize {
        let zero = NoncrossingPartition::minimum(n);
        let one = NoncrossingPartition::maximum(n);
        assert_eq!(mobius(&zero, &one).unwrap(), expect[n - 1], "mu(0_{n},1_{n})");
    }
    // defining recursion, exhaustively for n <= 5
    for n in 1..=5usize {
        let all = enumerate_nc(n).unwrap();
        for theta in all.iter() {
            for pi in all.iter() {
                if !theta.leq(pi).unwrap() {
                    continue;
                }
                let mut total = 0i64;
                for sigma in all.iter() {
                    if theta.leq(sigma).unwrap() && sigma.leq(pi).unwrap() {
                        total += mobius(sigma, pi).unwrap();
                    }
                }
                assert_eq!(total, delta(theta, pi).unwrap());
            }
        }
    }
    println!("criterion 02: PASS (Möbius values and defining recursion)");
}

#[test]
fn criterion_03_kreweras() {
    for n in 1..=6usize {
        for pi in enumerate_nc(n).unwrap().iter() {
            let kr = pi.kreweras();
            assert_eq!(pi.num_blocks() + kr.num_blocks(), n + 1, "pi={pi}");
            let union = pi.alternating_union(&kr).unwrap();
            assert_eq!(union.n(), 2 * n);
        }
    }
    println!("criterion 03: PASS (Kreweras block counts and alternating unions)");
}

#[test]
fn criterion_04_mobius_roundtrip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);

    // 80 scalar tables, one- and two-variable, order 6: exact roundtrip both
    // ways through plain block products.
    for i in 0..80 {
        let s = if i % 2 == 0 { 1 } else { 2 };
        let c0 = CumulantTable(random_scalar_table(s, 6, &mut rng));
        let m = moments_from_cumulants(&c0).unwrap();
        let c1 = cumulants_from_moments(&m).unwrap();
        assert_eq!(c0.series(), c1.series(), "scalar table {i}");
        let m1 = moments_from_cumulants(&c1).unwrap();
        assert_eq!(m.series(), m1.series());
    }

    // 20 operator-valued tables over B = M_2 with exact rational entries,
    // order 5: random model data, cumulants -> moments -> cumulants through
    // the nested multilinear evaluation.
    for i in 0..20 {
        let s = if i % 2 == 0 { 1 } else { 2 };
        let order = 5;
        let model = Arc::new(MatrixTensorModel::random_exact(2, 2, s, &mut rng).unwrap());
        let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(ModelBRing(Arc::clone(&model)));
        let moments: Arc<dyn LinFunctional<Matrix<Rat>>> =
            Arc::new(ModelMomentFn::new(Arc::clone(&model)));
        let k = cumulants_of_functional(Arc::clone(&moments), Arc::clone(&ring));
        let m2 = moments_of_functional(Arc::clone(&k), Arc::clone(&ring));
        let k2 = cumulants_of_functional(Arc::clone(&m2), Arc::clone(&ring));
        let k_table = trivial_table(k.as_ref(), ring.as_ref(), order).unwrap();
        let k2_table = trivial_table(k2.as_ref(), ring.as_ref(), order).unwrap();
        assert_eq!(k_table, k2_table, "B-valued cumulant roundtrip {i}");
        let m_table = trivial_table(moments.as_ref(), ring.as_ref(), order).unwrap();
        let m2_table = trivial_table(m2.as_ref(), ring.as_ref(), order).unwrap();
        assert_eq!(m_table, m2_table, "B-valued moment roundtrip {i}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 04: PASS (100 random tables round-trip exactly in {elapsed:?})");
}

#[test]
fn criterion_05_lemma_equivalence() {
    // Free group model: exact agreement on all words of length <= 5
    let model = FreeGroupModel::with_generators(&["a", "b", "A", "B"]).unwrap();
    let truth_c = phi_cumulant_table(&model, 5).unwrap();
    let truth_m = phi_moment_table(&model, 5).unwrap();
    for w in Word::all_up_to(4, 5) {
        let via_e = scalar_cumulant_via_e(&model, &w).unwrap();
        assert_eq!(via_e, truth_c.series().coef(&w).unwrap(), "cumulant at {w}");
        let via_e = scalar_moment_via_e(&model, &w).unwrap();
        assert_eq!(via_e, truth_m.series().coef(&w).unwrap(), "moment at {w}");
    }

    // Float-mode matrix model with non-rational entries: within 1e-10
    let n_dim = 2usize;
    let k_dim = 2usize;
    let ik = Matrix::<f64>::identity(k_dim);
    let x = Matrix::lower_shift(n_dim)
        .kron(&ik)
        .scale(&(2.0f64.sqrt() / 2.0));
    let mut irr = Matrix::<f64>::zero(n_dim * k_dim);
    for r in 0..n_dim * k_dim {
        for c in 0..n_dim * k_dim {
            irr.set(r, c, ((r * 7 + c * 3 + 1) as f64).sqrt() / 5.0);
        }
    }
    let y = Matrix::upper_shift(n_dim).kron(&ik).add(&irr);
    let model = MatrixTensorModel::<f64>::new(n_dim, k_dim, vec![x, y]).unwrap();
    let truth_c = phi_cumulant_table(&model, 5).unwrap();
    let truth_m = phi_moment_table(&model, 5).unwrap();
    for w in Word::all_up_to(2, 5) {
        let via_e = scalar_cumulant_via_e(&model, &w).unwrap();
        let diff = (via_e - truth_c.series().coef(&w).unwrap()).abs();
        assert!(diff <= 1e-10, "cumulant at {w}: |diff| = {diff}");
        let via_e = scalar_moment_via_e(&model, &w).unwrap();
        let diff = (via_e - truth_m.series().coef(&w).unwrap()).abs();
        assert!(diff <= 1e-10, "moment at {w}: |diff| = {diff}");
    }
    println!("criterion 05: PASS (lemma formulas match direct inversion on both models)");
}

#[test]
fn criterion_06_shift_counterexample() {
    let model = MatrixTensorModel::<Rat>::shift_example(3, 2).unwrap();
    let x = model.generator(0).unwrap();
    let y = model.generator(1).unwrap();
    let ex = model.apply_e(&x).unwrap();
    let ey = model.apply_e(&y).unwrap();
    assert_eq!(
        model.phi_b(&model.mul_b(&ex, &ey)).unwrap(),
        rat(2, 3),
        "phi(E(x)E(y))"
    );
    let lhs = model.phi_b(&ex).unwrap();
    let rhs = model.phi_b(&ey).unwrap();
    assert_eq!(lhs.mul(&rhs), rat_int(0), "phi(E(x))phi(E(y))");
    // phi(K_2^t(x,y)) - k_2(x,y) = -2/3
    let exy = model.apply_e(&model.mul_a(&x, &y).unwrap()).unwrap();
    let k2t = exy.sub(&model.mul_b(&ex, &ey));
    let phi_k2t = model.phi_b(&k2t).unwrap();
    let k2 = {
        let phi_xy = model.apply_phi(&model.mul_a(&x, &y).unwrap()).unwrap();
        phi_xy.sub(&model.apply_phi(&x).unwrap().mul(&model.apply_phi(&y).unwrap()))
    };
    assert_eq!(phi_k2t.sub(&k2), rat(-2, 3));
    println!("criterion 06: PASS (N=3 shift counterexample values exact)");
}

#[test]
fn criterion_07_group_algebra_compatibility() {
    let model = FreeGroupModel::new();
    // every reduced word of length <= 6
    let mut words: Vec<GroupWord> = vec![GroupWord::identity()];
    let mut frontier = vec![GroupWord::identity()];
    for _ in 0..6 {
        let mut next = Vec::new();
        for w in &frontier {
            for l in [1i8, -1, 2, -2] {
                let mut letters = w.letters().to_vec();
                letters.push(l);
                let cand = GroupWord::from_letters(&letters);
                if cand.len() == w.len() + 1 {
                    next.push(cand);
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(words.len(), 1 + 4 + 12 + 36 + 108 + 324 + 972);
    for w in &words {
        let elem = GroupAlgElem::from_word(w.clone());
        let tr = model.apply_phi(&elem).unwrap();
        let e = model.apply_e(&elem).unwrap();
        let tr_e = model.phi_b(&e).unwrap();
        assert_eq!(tr, tr_e, "word {w}");
    }
    // spot projections: h^2 and e survive, ah does not
    let h2 = GroupAlgElem::from_word(GroupWord::h_pow(2));
    let e_h2 = model.apply_e(&h2).unwrap();
    assert_eq!(e_h2.coeff_at(2), rat_int(1));
    assert_eq!(e_h2.coef().len(), 1);
    let ah = GroupAlgElem::from_word(GroupWord::gen_a().concat(&GroupWord::h()));
    assert!(model.apply_e(&ah).unwrap().coef().is_empty());
    let id = GroupAlgElem::from_word(GroupWord::identity());
    assert_eq!(model.apply_e(&id).unwrap().coeff_at(0), rat_int(1));
    println!("criterion 07: PASS (tr∘E = tr on all 1457 reduced words up to length 6)");
}

#[test]
fn criterion_08_semicircular_law() {
    for t in [rat_int(1), rat(1, 2)] {
        let c = semicircular_cumulants(&t, 10).unwrap();
        let m = moments_from_cumulants(&c).unwrap();
        for n in 1..=5usize {
            let mut expect = rat_int(catalan(n) as i64);
            for _ in 0..n {
                expect = expect.mul(&t);
            }
            assert_eq!(m.series().coef(&wn(&vec![1; 2 * n], 1)).unwrap(), expect);
            assert_eq!(
                m.series().coef(&wn(&vec![1; 2 * n - 1], 1)).unwrap(),
                rat_int(0)
            );
        }
    }
    // B-central operator-valued moments: E(a^{2n}) = C_n t^n 1_B
    let ring = MatrixBRing { dim: 2 };
    let t = rat(2, 3);
    let moments = b_semicircular_moments(&t, 10, true, &ring).unwrap();
    for n in 1..=5usize {
        let mut tn = rat_int(catalan(n) as i64);
        for _ in 0..n {
            tn = tn.mul(&t);
        }
        assert_eq!(moments[2 * n - 1], Matrix::identity(2).scale(&tn));
        assert_eq!(moments[2 * n - 2], Matrix::zero(2));
    }
    println!("criterion 08: PASS (semicircular moment law, scalar and B-central)");
}

#[test]
fn criterion_09_prop_collapse() {
    let t = rat(3, 7);
    let ks = scalar_cumulants_of_b_semicircular(&t, 6).unwrap();
    assert_eq!(ks[0], rat_int(0), "k_1");
    assert_eq!(ks[1], t, "k_2 = t");
    assert_eq!(ks[2], rat_int(0), "k_3");
    assert_eq!(ks[3], rat_int(0), "k_4");
    assert_eq!(ks[4], rat_int(0), "k_5");
    assert_eq!(ks[5], rat_int(0), "k_6");
    println!("criterion 09: PASS (literal double sum collapses to k_2 = t)");
}

#[test]
fn criterion_10_boxed_convolution() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(110);

    // f (*) Zeta = moment summation, random scalar tables order <= 6
    for i in 0..10 {
        let s = if i % 2 == 0 { 1 } else { 2 };
        let order = if s == 1 { 6 } else { 5 };
        let f = CumulantTable(random_scalar_table(s, order, &mut rng));
        let zeta = zeta_table(s, order);
        let boxed = boxed_convolution_scalar(&f, &zeta).unwrap();
        let moments = moments_from_cumulants(&f).unwrap();
        assert_eq!(boxed.series(), moments.series(), "zeta table {i}");
        // f (*) delta = f
        let delta = delta_table(s, order);
        let boxed = boxed_convolution_scalar(&f, &delta).unwrap();
        assert_eq!(boxed.series(), f.series(), "delta table {i}");
    }

    // operator-valued: R_x (*) R_y^t equals product-word cumulants from the
    // free joint distribution at order 4, on matrix-valued data
    let mx = Arc::new(MatrixTensorModel::random_exact(2, 2, 2, &mut rng).unwrap());
    let my = Arc::new(MatrixTensorModel::random_exact(2, 2, 2, &mut rng).unwrap());
    let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(ModelBRing(Arc::clone(&mx)));
    let cx = freeprob::cumulant::model_cumulant_functional(&mx);
    let cy = freeprob::cumulant::model_cumulant_functional(&my);
    let boxed = boxed_convolution_functional(cx.as_ref(), cy.as_ref(), ring.as_ref(), 4).unwrap();
    let oracle = product_word_cumulants(cx, cy, Arc::clone(&ring), 4).unwrap();
    assert_eq!(boxed, oracle, "amalgamated boxed convolution vs products");

    let elapsed = start.elapsed();
    println!("criterion 10: PASS (boxed convolution identities in {elapsed:?})");
}

#[test]
fn criterion_11_additivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    // random one-variable families, order 6
    for _ in 0..5 {
        let fx = CumulantTable(random_scalar_table(1, 6, &mut rng));
        let fy = CumulantTable(random_scalar_table(1, 6, &mut rng));
        let sum = CumulantTable(r_add(fx.series(), fy.series()).unwrap());
        let via_radd = moments_from_cumulants(&sum).unwrap();
        // direct expansion through the joint table
        let joint = free_joint_cumulants(&[fx, fy], 6).unwrap();
        for n in 1..=6usize {
            let mut total = <Rat as Scalar>::zero();
            for w in Word::all_up_to(2, 6).into_iter().filter(|w| w.len() == n) {
                total = total.add(&freeprob::cumulant::moment_at(&joint, &w).unwrap());
            }
            assert_eq!(
                via_radd.series().coef(&wn(&vec![1; n], 1)).unwrap(),
                total,
                "order {n}"
            );
        }
    }
    // two free standard semicirculars sum to semicircular(2): m_4 = 8
    let s1 = semicircular_cumulants(&rat_int(1), 6).unwrap();
    let sum = CumulantTable(r_add(s1.series(), s1.series()).unwrap());
    assert_eq!(sum.series(), semicircular_cumulants(&rat_int(2), 6).unwrap().series());
    let m = moments_from_cumulants(&sum).unwrap();
    assert_eq!(m.series().coef(&wn(&[1, 1], 1)).unwrap(), rat_int(2));
    assert_eq!(m.series().coef(&wn(&[1, 1, 1, 1], 1)).unwrap(), rat_int(8));
    println!("criterion 11: PASS (R-transform additivity matches joint expansion)");
}

#[test]
fn criterion_12_functional_equation_correction() {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    for i in 0..20 {
        let r = random_scalar_table(1, 8, &mut rng);
        let m_solver = solve_moment_from_r(&r, 8).unwrap();
        let m_mobius = moments_from_cumulants(&CumulantTable(r)).unwrap();
        assert_eq!(&m_solver, m_mobius.series(), "table {i}");
    }
    // regression: the printed relation m(z) = r(z m(z)) forces m_2 = 0 for
    // the standard semicircular, contradicting m_2 = k_2 = 1
    let r = semicircular_cumulants(&rat_int(1), 6).unwrap();
    let wrong = solve_moment_from_r_uncorrected(r.series(), 6).unwrap();
    assert_eq!(wrong.coef(&wn(&[1, 1], 1)).unwrap(), rat_int(0));
    let right = solve_moment_from_r(r.series(), 6).unwrap();
    assert_eq!(right.coef(&wn(&[1, 1], 1)).unwrap(), rat_int(1));
    println!("criterion 12: PASS (corrected functional equation, regression locked)");
}

#[test]
fn criterion_13_compat_constructions() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);

    // matrix model
    let base = MatrixTensorModel::<Rat>::shift_example(3, 2).unwrap();
    let repaired = induced_compatible_functional(base);
    let corpus = sampled_corpus(&repaired, 200, 4, &mut rng).unwrap();
    let report = is_compatible(&repaired, &corpus).unwrap();
    assert!(report.ok);
    assert_eq!(report.max_deviation, 0.0);
    assert_eq!(report.checked, 200);

    // free group model; B-insertions are powers of h with reduced length up
    // to 8, so widen the word cap for the sandwiched corpus
    let base = FreeGroupModel::with_generators(&["a", "b", "A", "B"])
        .unwrap()
        .with_word_cap(40);
    let repaired = induced_compatible_functional(base);
    let corpus = sampled_corpus(&repaired, 200, 3, &mut rng).unwrap();
    let report = is_compatible(&repaired, &corpus).unwrap();
    assert!(report.ok);
    assert_eq!(report.max_deviation, 0.0);

    // corrupted-phi model: detected, then repaired exactly
    let base = MatrixTensorModel::<Rat>::shift_example(3, 2).unwrap();
    let dim = base.ambient_dim();
    let mut weights = vec![rat(1, 12); dim];
    weights[0] = rat(7, 12);
    let x = base.generator(0).unwrap();
    let y = base.generator(1).unwrap();
    let witness = Matrix::elementary(dim, 0, 0);
    let corrupted = base
        .with_generators(vec![x, y, witness])
        .unwrap()
        .with_phi(PhiSpec::WeightedDiagonal(weights));
    let corpus = sampled_corpus(&corrupted, 200, 4, &mut rng).unwrap();
    let report = is_compatible(&corrupted, &corpus).unwrap();
    assert!(!report.ok, "corrupted functional must be detected");
    assert!(report.max_deviation > 0.0);
    let repaired = induced_compatible_functional(corrupted);
    let corpus = sampled_corpus(&repaired, 200, 4, &mut rng).unwrap();
    let report = is_compatible(&repaired, &corpus).unwrap();
    assert!(report.ok);
    assert_eq!(report.max_deviation, 0.0);
    println!("criterion 13: PASS (induced functionals compatible with deviation 0)");
}

#[test]
fn criterion_14_subalgebra_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(114);
    let model = MatrixTensorModel::<Rat>::new(2, 2, vec![]).unwrap();
    for i in 0..10 {
        let m = freeprob::coeffalg::random_matrix(2, &mut rng);
        let x0 = model.central_element(&m).unwrap();
        let report = verify_compatible_subalgebra_theorem(&model, &x0, 6).unwrap();
        assert!(report.hypotheses_hold(), "element {i}");
        assert_eq!(report.conclusion_holds, Some(true), "element {i}");
        assert_eq!(report.max_deviation, 0.0, "element {i}");
    }
    println!("criterion 14: PASS (10 random B-central elements, deviation 0 to power 6)");
}

#[test]
fn criterion_15_evenness() {
    let mut rng = ChaCha8Rng::seed_from_u64(115);

    // odd-cumulant <-> odd-moment equivalence on random even tables, order 6
    for _ in 0..10 {
        let mut c = FormalSeries::zero(1, 6);
        for n in [2usize, 4, 6] {
            let v = rng.gen_range(-4i64..=4);
            if v != 0 {
                c.set(wn(&vec![1; n], 1), rat(v, rng.gen_range(1i64..=2))).unwrap();
            }
        }
        let c = CumulantTable(c);
        assert!(is_even(&c).unwrap());
        let m = moments_from_cumulants(&c).unwrap();
        assert!(
            m.series().entries().all(|(w, _)| w.len() % 2 == 0),
            "odd moments vanish"
        );
        let back = cumulants_from_moments(&m).unwrap();
        assert!(is_even(&back).unwrap());
        assert_eq!(back.series(), c.series());
    }

    // restricted NC^(even) Möbius sum equals the unrestricted sum
    let ring: Arc<dyn BRing<Matrix<Rat>>> = Arc::new(MatrixBRing { dim: 2 });
    for _ in 0..5 {
        let mut m = FormalSeries::zero(1, 6);
        for n in [2usize, 4, 6] {
            let mut b = Matrix::zero(2);
            for r in 0..2 {
                for c in 0..2 {
                    b.set(r, c, rat_int(rng.gen_range(-3i64..=3)));
                }
            }
            m.set(wn(&vec![1; n], 1), b).unwrap();
        }
        let m = MomentTable(m);
        for two_n in [2usize, 4, 6] {
            let pair = even_moment_cumulant_sum(&m, two_n, Arc::clone(&ring)).unwrap();
            assert_eq!(pair.restricted, pair.unrestricted, "order {two_n}");
        }
    }

    // B-even implies scalar even on the constructed tensor instance
    let base = MatrixTensorModel::<Rat>::new(2, 2, vec![]).unwrap();
    let anti = Matrix::from_rows(vec![
        vec![rat_int(0), rat_int(1)],
        vec![rat_int(1), rat_int(0)],
    ])
    .unwrap();
    let a = base.central_element(&anti).unwrap();
    let model = Arc::new(base);
    let report = evenness_transfer_check(&model, &a, 6).unwrap();
    assert!(report.b_even);
    assert!(report.scalar_even);
    assert!(report.forward_ok);
    assert_eq!(report.converse_ok, Some(true));
    println!("criterion 15: PASS (evenness equivalences and transfer)");
}
