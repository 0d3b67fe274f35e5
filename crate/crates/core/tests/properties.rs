//! Randomized properties across modules.

use nalgebra::SymmetricEigen;
use nnct::battery::TestId;
use nnct::dist::{normal_cdf, Alternative};
use nnct::indices::{dixon_index, dixon_index_corrected, pielou_s, PielouFramework};
use nnct::moments::rl_moments;
use nnct::nntest::{dixon_cell_test, overall_test, OverallVariant};
use nnct::patterns::random_labeling;
use nnct::randomization::{randomization_pvalues, RandomizationPlan};
use nnct::spatial::brute_force_knn;
use nnct::{build_nn_structure, build_nnct, Point, PointSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn points_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), min..=max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

fn labeled(points: Vec<Point>, m: usize, seed: u64) -> PointSet {
    let n = points.len();
    let labels: Vec<usize> = (0..n).map(|i| i % m).collect();
    let base = PointSet::new(points, labels, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shuffled = random_labeling(base.points(), base.class_sizes()[0], &mut rng).unwrap();
    if m == 2 {
        shuffled
    } else {
        base
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digraph_counts(points in points_strategy(4, 200)) {
        let s = build_nn_structure(&points, 3).unwrap();
        let n = points.len();
        let q = s.q_counts();
        prop_assert_eq!(q.iter().sum::<usize>(), n);
        prop_assert_eq!(q.iter().enumerate().map(|(k, c)| k * c).sum::<usize>(), n);
        let nn = s.nn_index();
        let mutual = (0..n).filter(|&i| nn[nn[i]] == i && nn[i] > i).count();
        prop_assert_eq!(s.r_stat(), 2 * mutual);
        for i in 0..n {
            prop_assert_eq!(s.knn_of(i, 3).unwrap(), &brute_force_knn(&points, i, 3)[..]);
        }
    }

    #[test]
    fn order_independence(points in points_strategy(3, 120), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let s = build_nn_structure(&points, 1).unwrap();
        let mut perm: Vec<usize> = (0..points.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<Point> = perm.iter().map(|&i| points[i]).collect();
        let t = build_nn_structure(&permuted, 1).unwrap();
        prop_assert_eq!(s.r_stat(), t.r_stat());
        prop_assert_eq!(s.q_stat(), t.q_stat());
        prop_assert_eq!(s.q_counts(), t.q_counts());
    }

    #[test]
    fn moment_structure(points in points_strategy(6, 150), m in 2usize..=4) {
        prop_assume!(points.len() >= 2 * m);
        let ps = labeled(points, m, 1);
        let s = build_nn_structure(ps.points(), 1).unwrap();
        let mo = rl_moments(&s, ps.class_sizes()).unwrap();
        let n = ps.len() as f64;
        prop_assert!((mo.expected_vec().iter().sum::<f64>() - n).abs() <= 1e-9 * n);
        let cov = mo.covariance();
        let scale = cov.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        prop_assert!((cov - cov.transpose()).amax() == 0.0);
        let eig = SymmetricEigen::new(cov.clone()).eigenvalues;
        prop_assert!(eig.min() >= -1e-9 * scale, "min eigenvalue {}", eig.min());
        for i in 0..m {
            for b in 0..m * m {
                let row: f64 = (0..m).map(|j| cov[(i * m + j, b)]).sum();
                prop_assert!(row.abs() <= 1e-9 * scale, "row {i} against cell {b}: {row}");
            }
        }
    }

    #[test]
    fn two_class_index_identities(points in points_strategy(8, 150), seed in any::<u64>()) {
        let ps = labeled(points, 2, seed);
        prop_assume!(ps.class_sizes().iter().all(|&c| c >= 2));
        let s = build_nn_structure(ps.points(), 1).unwrap();
        let t = build_nnct(&ps, &s).unwrap();
        let mo = rl_moments(&s, ps.class_sizes()).unwrap();
        let d = |i, j| dixon_index(&t, Some(&mo), i, j).map(|v| v.value);
        if let (Ok(a), Ok(b)) = (d(0, 0), d(0, 1)) {
            if a.is_finite() && b.is_finite() {
                prop_assert!((a + b).abs() <= 1e-12);
            }
        }
        if let (Ok(a), Ok(b)) = (d(1, 1), d(1, 0)) {
            if a.is_finite() && b.is_finite() {
                prop_assert!((a + b).abs() <= 1e-12);
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(dixon_index_corrected(&t, Some(&mo), i, j).unwrap().value.is_finite());
            }
        }
        for (i, j) in [(0, 1), (1, 0)] {
            let z = |a, b| dixon_cell_test(&t, &mo, a, b, Alternative::Right).unwrap().z_value.unwrap();
            prop_assert!((z(i, i) + z(i, j)).abs() <= 1e-12);
        }
    }

    #[test]
    fn quadratic_forms(points in points_strategy(8, 120), m in 2usize..=4, seed in any::<u64>()) {
        prop_assume!(points.len() >= 2 * m);
        let ps = labeled(points, m, seed);
        let s = build_nn_structure(ps.points(), 1).unwrap();
        let t = build_nnct(&ps, &s).unwrap();
        let mo = rl_moments(&s, ps.class_sizes()).unwrap();
        for v in [OverallVariant::Dixon, OverallVariant::Type3] {
            let c = overall_test(&t, &mo, v).unwrap().chisq_value.unwrap();
            prop_assert!(c >= 0.0, "{v:?}: {c}");
        }
    }
}

#[test]
fn corrected_index_is_monotone_in_the_diagonal() {
    use nnct::Nnct;
    // rows are (N_11, N_12 | N_21, N_22) with n_1 = 10, n_2 = 15
    let mut last = f64::NEG_INFINITY;
    for n11 in 0..=10 {
        let t = Nnct::from_counts(2, vec![n11, 10 - n11, 7, 8]).unwrap();
        let v = dixon_index_corrected(&t, None, 0, 0).unwrap().value;
        assert!(v.is_finite() && v > last, "N_11 = {n11}: {v} after {last}");
        last = v;
    }
}

/// Kolmogorov-Smirnov distance between a sample and the standard normal.
fn ks_distance(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn pielou_z_is_close_to_normal_on_csr() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let points: Vec<Point> = (0..1000)
        .map(|_| Point::new(rand::Rng::random(&mut rng), rand::Rng::random(&mut rng)))
        .collect();
    let s = build_nn_structure(&points, 1).unwrap();
    let mo = rl_moments(&s, &[500, 500]).unwrap();
    let mut z: Vec<f64> = (0..2000)
        .map(|_| {
            let ps = random_labeling(&points, 500, &mut rng).unwrap();
            let t = build_nnct(&ps, &s).unwrap();
            pielou_s(&t, PielouFramework::RandomLabeling(&mo))
                .unwrap()
                .z_score
                .unwrap()
        })
        .collect();
    // the statistic is discrete (mixed-pair counts); the lattice step of
    // z adds up to half a step to the distance
    let d = ks_distance(&mut z);
    let critical = 1.628 / (z.len() as f64).sqrt();
    assert!(d < critical + 0.02, "KS distance {d} vs {critical}");
}

#[test]
fn sampled_randomization_tracks_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let points: Vec<Point> = (0..12)
        .map(|_| Point::new(rand::Rng::random(&mut rng), rand::Rng::random(&mut rng)))
        .collect();
    let ps = random_labeling(&points, 6, &mut rng).unwrap();
    let s = build_nn_structure(&points, 2).unwrap();
    let tests = vec![
        TestId::Pielou,
        TestId::DixonCell(0, 0),
        TestId::Type3Cell(1, 1),
        TestId::OverallDixon,
        TestId::CuzickEdwards(2),
    ];
    let exact = randomization_pvalues(&ps, &s, &tests, Alternative::Right, &RandomizationPlan::exhaustive()).unwrap();
    let n_perm = 20_000;
    let plan = RandomizationPlan::sampled(n_perm, 99);
    let sampled = randomization_pvalues(&ps, &s, &tests, Alternative::Right, &plan).unwrap();
    let again = randomization_pvalues(&ps, &s, &tests, Alternative::Right, &plan).unwrap();
    assert_eq!(sampled, again);
    for ((id, p), (_, q)) in exact.iter().zip(&sampled) {
        let (p, q) = (p.unwrap(), q.unwrap());
        let se = (p * (1.0 - p) / n_perm as f64).sqrt().max(1.0 / n_perm as f64);
        assert!((p - q).abs() <= 3.0 * se, "{id}: exhaustive {p} vs sampled {q}");
    }
}
