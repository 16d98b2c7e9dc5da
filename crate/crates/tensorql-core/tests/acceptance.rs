//! Acceptance suite: one test per criterion, each printing a pass line once
//! its assertions hold (run with `-- --nocapture` to see them). Tolerances
//! are pinned in the assertions themselves.

mod common;

use std::time::Instant;

use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_instance, random_graph, random_query, Case};
use tensorql_core::cardinality::{
    bool_product_bounds, exact_kr_nnz, expected_density_rank1, expected_density_uniform,
    kr_upper_cosine, KmvSketch, MarginalVector, Rank1Form,
};
use tensorql_core::cp::{
    greedy_cp, naive_decomposition, rank_upper_bound, reconstruct, reduce_to_irreducible,
    unfold_identity_check, verify_sparsity, GreedyOptions,
};
use tensorql_core::query::GraphSet;
use tensorql_core::store::{Graph, Term};
use tensorql_core::tensor::{outer3, BoolMatrix, BoolTensor3, BoolVector};

fn pass(criterion: u32, name: &str) {
    println!("[acceptance] criterion {criterion} ({name}): PASS");
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BoolMatrix {
    let mut coords = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.random_bool(density) {
                coords.push((r, c));
            }
        }
    }
    BoolMatrix::from_coords(rows, cols, coords).unwrap()
}

fn random_tensor(rng: &mut ChaCha8Rng, dims: (usize, usize, usize), density: f64) -> BoolTensor3 {
    let mut coords = Vec::new();
    for i in 0..dims.0 {
        for j in 0..dims.1 {
            for k in 0..dims.2 {
                if rng.random_bool(density) {
                    coords.push((i, j, k));
                }
            }
        }
    }
    BoolTensor3::from_coords(dims, coords).unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, density: f64) -> BoolVector {
    BoolVector::from_indices(dim, (0..dim).filter(|_| rng.random_bool(density))).unwrap()
}

#[test]
fn acceptance_01_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut instances = 0;
    for round in 0..28 {
        let density = 0.10 + 0.05 * (round % 5) as f64;
        let g = random_graph(&mut rng, (8, 5, 8), density);
        let u = random_graph(&mut rng, (6, 4, 6), density + 0.05);
        let mut graphs = GraphSet::new();
        graphs.add("g", &g).unwrap();
        graphs.add("u", &u).unwrap();
        for case in Case::ALL {
            let text = random_query(&mut rng, case, &["g", "u"]);
            check_instance(&text, &graphs, case);
            instances += 1;
        }
    }
    assert!(
        instances >= 500,
        "need at least 500 instances, ran {instances}"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "oracle equivalence took {elapsed:?}, budget is 60s"
    );
    pass(1, "oracle equivalence");
}

#[test]
fn acceptance_02_kr_count_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    for trial in 0..200 {
        let cols = rng.random_range(1..=6);
        let (ra, rb) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let (da, db) = (rng.random_range(0.1..0.8), rng.random_range(0.1..0.8));
        let a = random_matrix(&mut rng, ra, cols, da);
        let b = random_matrix(&mut rng, rb, cols, db);
        let sa = MarginalVector::from_dense(&a.column_counts());
        let sb = MarginalVector::from_dense(&b.column_counts());
        let predicted = exact_kr_nnz(&sa, &sb).unwrap().value;
        let materialized = a.khatri_rao(&b).unwrap().nnz() as f64;
        assert_eq!(predicted, materialized, "trial {trial}");
    }
    pass(2, "khatri-rao count exactness");
}

#[test]
fn acceptance_03_cosine_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    for trial in 0..200 {
        let cols = rng.random_range(1..=6);
        let (ra, rb) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let (da, db) = (rng.random_range(0.1..0.8), rng.random_range(0.1..0.8));
        let a = random_matrix(&mut rng, ra, cols, da);
        let b = random_matrix(&mut rng, rb, cols, db);
        let sa = MarginalVector::from_dense(&a.column_counts());
        let sb = MarginalVector::from_dense(&b.column_counts());
        let exact = exact_kr_nnz(&sa, &sb).unwrap().value;
        let bound = kr_upper_cosine(&sa, &sb).unwrap().value;
        assert!(
            bound >= exact,
            "trial {trial}: bound {bound} < exact {exact}"
        );
    }
    // parallel marginals: equality
    for scale in 1..=5u64 {
        let sa = MarginalVector::from_dense(&[2, 0, 3, 1]);
        let sb = MarginalVector::from_dense(&[2 * scale, 0, 3 * scale, scale]);
        let exact = exact_kr_nnz(&sa, &sb).unwrap().value;
        let bound = kr_upper_cosine(&sa, &sb).unwrap().value;
        assert_eq!(exact, bound, "parallel marginals scale {scale}");
    }
    pass(3, "cosine upper bound");
}

#[test]
fn acceptance_04_union_bounds_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    for trial in 0..200 {
        let cols = rng.random_range(1..=6);
        let (ra, rb) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let (da, db) = (rng.random_range(0.1..0.8), rng.random_range(0.1..0.8));
        let a = random_matrix(&mut rng, ra, cols, da);
        let b = random_matrix(&mut rng, rb, cols, db);
        let sa = MarginalVector::from_dense(&a.column_counts());
        let sb = MarginalVector::from_dense(&b.column_counts());
        let (lower, upper) = bool_product_bounds(&sa, &sb).unwrap();
        let distinct = a.matmul(&b.transpose()).unwrap().nnz() as f64;
        assert!(
            lower.value <= distinct && distinct <= upper.value,
            "trial {trial}: {} <= {distinct} <= {} violated",
            lower.value,
            upper.value
        );
    }
    pass(4, "boolean product sandwich bounds");
}

#[test]
fn acceptance_05_expectation_formulas() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0005);
    let trials = 10_000;

    // twelve uniform-density settings
    let uniform_settings = [
        (6, 3, 6, 0.2, 0.3),
        (6, 3, 6, 0.5, 0.5),
        (8, 4, 6, 0.3, 0.6),
        (8, 4, 8, 0.5, 0.4),
        (8, 8, 8, 0.5, 0.5),
        (8, 8, 8, 0.2, 0.2),
        (6, 5, 8, 0.7, 0.3),
        (6, 2, 6, 0.6, 0.6),
        (8, 6, 6, 0.4, 0.4),
        (6, 8, 6, 0.3, 0.3),
        (8, 2, 8, 0.7, 0.7),
        (6, 4, 8, 0.25, 0.55),
    ];
    for (idx, &(m, k, n, pa, pb)) in uniform_settings.iter().enumerate() {
        let analytic = (m * n) as f64 * expected_density_uniform(pa, pb, k).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let a = random_matrix(&mut rng, m, k, pa);
            let b = random_matrix(&mut rng, k, n, pb);
            let nnz = a.matmul(&b).unwrap().nnz() as f64;
            sum += nnz;
            sum_sq += nnz * nnz;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (analytic - mean).abs() <= 3.0 * stderr.max(1e-12),
            "uniform setting {idx}: analytic {analytic} vs mc {mean} (3se {})",
            3.0 * stderr
        );
    }

    // eight per-component settings
    let rank1_settings: [&[(f64, f64)]; 8] = [
        &[(0.3, 0.5), (0.6, 0.2), (0.4, 0.4)],
        &[(0.2, 0.2), (0.2, 0.8), (0.8, 0.2), (0.5, 0.5)],
        &[(0.7, 0.7)],
        &[(0.5, 0.5), (0.5, 0.5)],
        &[(0.1, 0.9), (0.9, 0.1), (0.5, 0.3)],
        &[(0.4, 0.6), (0.6, 0.4), (0.2, 0.2), (0.3, 0.7), (0.5, 0.1)],
        &[(0.25, 0.25), (0.75, 0.75)],
        &[(0.6, 0.3), (0.3, 0.6), (0.45, 0.45), (0.15, 0.85)],
    ];
    let (m, n) = (7, 7);
    for (idx, setting) in rank1_settings.iter().enumerate() {
        let pa: Vec<f64> = setting.iter().map(|&(a, _)| a).collect();
        let pb: Vec<f64> = setting.iter().map(|&(_, b)| b).collect();
        let fill = expected_density_rank1(&pa, &pb, Rank1Form::Complement).unwrap();
        let analytic = (m * n) as f64 * fill;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let mut a_coords = Vec::new();
            let mut b_coords = Vec::new();
            for (comp, &(da, db)) in setting.iter().enumerate() {
                for r in 0..m {
                    if rng.random_bool(da) {
                        a_coords.push((r, comp));
                    }
                }
                for c in 0..n {
                    if rng.random_bool(db) {
                        b_coords.push((comp, c));
                    }
                }
            }
            let a = BoolMatrix::from_coords(m, setting.len(), a_coords).unwrap();
            let b = BoolMatrix::from_coords(setting.len(), n, b_coords).unwrap();
            let nnz = a.matmul(&b).unwrap().nnz() as f64;
            sum += nnz;
            sum_sq += nnz * nnz;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (analytic - mean).abs() <= 3.0 * stderr.max(1e-12),
            "rank1 setting {idx}: analytic {analytic} vs mc {mean} (3se {})",
            3.0 * stderr
        );
    }

    // constant-density agreement to 1e-12 relative
    for &(pa, pb, k) in &[(0.3, 0.4, 5usize), (0.55, 0.15, 9), (0.9, 0.8, 2)] {
        let uniform = expected_density_uniform(pa, pb, k).unwrap();
        let rank1 =
            expected_density_rank1(&vec![pa; k], &vec![pb; k], Rank1Form::Complement).unwrap();
        assert!(
            (uniform - rank1).abs() <= 1e-12 * uniform.abs().max(1.0),
            "constant-density agreement: {uniform} vs {rank1}"
        );
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "expectation checks took {elapsed:?}, budget is 5 minutes"
    );
    pass(5, "expectation formulas vs monte carlo");
}

#[test]
fn acceptance_06_or_chain_equals_boolean_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    for trial in 0..100 {
        let (da, db) = (rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
        let a = random_matrix(&mut rng, 5, 4, da);
        let b = random_matrix(&mut rng, 5, 4, db);
        let or_vec = a.khatri_rao(&b).unwrap().row_support();
        let prod = a.matmul(&b.transpose()).unwrap();
        for ra in 0..5 {
            for rb in 0..5 {
                assert_eq!(
                    or_vec.contains(ra * 5 + rb),
                    prod.contains(ra, rb),
                    "trial {trial} entry ({ra},{rb})"
                );
            }
        }
    }
    pass(
        6,
        "or over khatri-rao columns vectorizes the boolean product",
    );
}

/// Tensors for criteria 7-9: random dims up to 5x5x5, dense enough that the
/// nonzero count reaches the naive rank (the absolute bound of criterion 8
/// needs `min{nm, nl, ml} <= |T|`, since the construction always spends one
/// nonzero per column in each of the two identity-side factors).
fn naive_suite_tensor(rng: &mut ChaCha8Rng) -> BoolTensor3 {
    loop {
        let dims = (
            rng.random_range(2..=5),
            rng.random_range(2..=5),
            rng.random_range(2..=5),
        );
        let density = rng.random_range(0.45..0.85);
        let t = random_tensor(rng, dims, density);
        if t.nnz() >= rank_upper_bound(dims) {
            return t;
        }
    }
}

#[test]
fn acceptance_07_naive_cp_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    for trial in 0..100 {
        let t = naive_suite_tensor(&mut rng);
        let f = naive_decomposition(&t).unwrap();
        assert_eq!(f.rank(), rank_upper_bound(t.dims()), "trial {trial} rank");
        assert_eq!(reconstruct(&f), t, "trial {trial} exactness");
        assert_eq!(
            unfold_identity_check(&f, &t).unwrap(),
            [true, true, true],
            "trial {trial} unfolding identities"
        );
    }
    pass(7, "naive cp reconstruct/rank/unfolding");
}

#[test]
fn acceptance_08_absolute_factor_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007); // same tensors as criterion 7
    for trial in 0..100 {
        let t = naive_suite_tensor(&mut rng);
        let f = naive_decomposition(&t).unwrap();
        assert!(
            f.nnz() <= 3 * t.nnz(),
            "trial {trial}: {} > 3 * {}",
            f.nnz(),
            t.nnz()
        );
    }
    pass(8, "absolute factor nonzero bound on naive outputs");
}

#[test]
fn acceptance_09_relative_sparsity_and_rank1_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0009);

    // irreducible reductions of naive outputs
    for trial in 0..40 {
        let t = naive_suite_tensor(&mut rng);
        let f = naive_decomposition(&t).unwrap();
        let reduced = reduce_to_irreducible(&f, &t).unwrap();
        let report = verify_sparsity(&reduced, &t);
        assert!(report.exact, "trial {trial} reduction stays exact");
        assert!(report.irreducible, "trial {trial} reduction is irreducible");
        assert!(
            report.sparsity_a + report.sparsity_b + report.sparsity_c + 1e-12 >= report.sparsity_t,
            "trial {trial} relative sparsity bound"
        );
    }

    // irreducible reductions of exact greedy covers
    let mut covered = 0;
    for seed in 0..40 {
        let t = planted_tensor(seed, 3, (6, 6, 6), 0.3);
        let (f, report) = greedy_cp(&t, &GreedyOptions::new(3, seed));
        if !report.exact {
            continue;
        }
        covered += 1;
        let reduced = reduce_to_irreducible(&f, &t).unwrap();
        let report = verify_sparsity(&reduced, &t);
        assert!(
            report.sparsity_a + report.sparsity_b + report.sparsity_c + 1e-12 >= report.sparsity_t,
            "greedy seed {seed} relative sparsity bound"
        );
    }
    assert!(covered >= 10, "too few exact greedy covers to test");

    // rank-1 multiplicative identity to 1e-12
    for trial in 0..30 {
        let a = random_vector(&mut rng, 5, 0.5);
        let b = random_vector(&mut rng, 4, 0.5);
        let c = random_vector(&mut rng, 6, 0.5);
        if a.is_empty() || b.is_empty() || c.is_empty() {
            continue;
        }
        let t = outer3(&a, &b, &c);
        let f = tensorql_core::cp::CpFactors::new(
            BoolMatrix::from_coords(5, 1, a.iter().map(|i| (i, 0))).unwrap(),
            BoolMatrix::from_coords(4, 1, b.iter().map(|i| (i, 0))).unwrap(),
            BoolMatrix::from_coords(6, 1, c.iter().map(|i| (i, 0))).unwrap(),
        )
        .unwrap();
        let report = verify_sparsity(&f, &t);
        assert!(report.exact);
        let lhs = 1.0 - report.sparsity_t;
        let rhs = (1.0 - report.sparsity_a) * (1.0 - report.sparsity_b) * (1.0 - report.sparsity_c);
        assert!(
            (lhs - rhs).abs() <= 1e-12,
            "trial {trial} rank-1 identity: {lhs} vs {rhs}"
        );
        assert!(
            report.sparsity_a + report.sparsity_b + report.sparsity_c + 1e-12 >= report.sparsity_t
        );
    }
    pass(9, "relative sparsity bound and rank-1 identity");
}

/// OR of `rank` random rank-1 tensors with the given per-factor density.
fn planted_tensor(
    seed: u64,
    rank: usize,
    dims: (usize, usize, usize),
    density: f64,
) -> BoolTensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b9).wrapping_add(17));
    let mut t = BoolTensor3::zeros(dims);
    for _ in 0..rank {
        let a = random_vector(&mut rng, dims.0, density);
        let b = random_vector(&mut rng, dims.1, density);
        let c = random_vector(&mut rng, dims.2, density);
        t = t.or(&outer3(&a, &b, &c)).unwrap();
    }
    t
}

#[test]
fn acceptance_10_planted_factor_recovery() {
    let rank = 4;
    let mut successes = 0;
    for seed in 0..100 {
        let t = planted_tensor(seed, rank, (8, 8, 8), 0.25);
        let (_, report) = greedy_cp(&t, &GreedyOptions::new(rank, seed));
        if report.exact {
            successes += 1;
        }
    }
    assert!(
        successes >= 90,
        "greedy covered only {successes}/100 planted tensors"
    );
    pass(10, "planted-factor recovery");
}

#[test]
fn acceptance_11_kmv_accuracy() {
    let k = 256;
    let n = 100_000u64;
    let tolerance = 3.0 / ((k as f64) - 2.0).sqrt();
    let mut within = 0;
    for seed in 0..100 {
        let mut sketch = KmvSketch::new(k, seed).unwrap();
        for i in 0..n {
            // distinct keys, one insert each
            sketch.insert_u64(i.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(seed));
        }
        let estimate = sketch.estimate();
        let rel = (estimate - n as f64).abs() / n as f64;
        if rel <= tolerance {
            within += 1;
        }
    }
    assert!(within >= 99, "only {within}/100 seeds within {tolerance}");
    pass(11, "kmv sketch accuracy");
}

#[test]
fn acceptance_12_marginal_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0012);
    for round in 0..20 {
        let mut g = Graph::new();
        let subjects: Vec<Term> = (0..6).map(|i| Term::iri(format!("s{i}"))).collect();
        let predicates: Vec<Term> = (0..4).map(|i| Term::iri(format!("p{i}"))).collect();
        let objects: Vec<Term> = (0..7).map(|i| Term::iri(format!("o{i}"))).collect();
        for _ in 0..500 {
            let s = subjects.choose(&mut rng).unwrap().clone();
            let p = predicates.choose(&mut rng).unwrap().clone();
            let o = objects.choose(&mut rng).unwrap().clone();
            if rng.random_bool(0.35) {
                g.remove_triple(&s, &p, &o);
            } else {
                g.add_triple(s, p, o);
            }
        }
        let nnz = g.nnz() as u64;
        assert_eq!(g.stats().totals(), (nnz, nnz, nnz), "round {round} totals");
        assert!(
            g.stats().support() <= 3 * g.nnz(),
            "round {round}: marginal support {} exceeds 3 * {}",
            g.stats().support(),
            g.nnz()
        );
        // and the support claim survives a rebuild
        let mut rebuilt = g.clone();
        rebuilt.rebuild_stats();
        assert_eq!(rebuilt.stats().totals(), g.stats().totals());
    }
    pass(12, "marginal matrices stay feasible under updates");
}
