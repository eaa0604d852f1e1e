use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use grpsel::cluster::{adjusted_rand_index, cut_tree, hierarchical_cluster, pcamix, rand_index};
use grpsel::data::{standardize, Column, Dataset, Partition, ResponseKind};
use grpsel::screen::{as_column, distance_correlation, screen, ScreenMethod};
use grpsel::sim::{draw_predictors, generate, SimDesign};

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    sab / (saa * sbb).sqrt()
}

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
}

#[test]
fn pcamix_eigenvalues_match_gram_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60;
    let f: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let cols = vec![
        Column::Quantitative((0..n).map(|i| f[i] + rng.sample::<f64, _>(StandardNormal)).collect()),
        Column::Quantitative((0..n).map(|_| rng.sample(StandardNormal)).collect()),
        Column::Qualitative {
            codes: (0..n).map(|i| usize::from(f[i] > 0.0) + usize::from(f[i] > 1.0)).collect(),
            levels: vec!["lo".into(), "mid".into(), "hi".into()],
        },
        Column::Quantitative((0..n).map(|i| -f[i] + 0.3 * rng.sample::<f64, _>(StandardNormal)).collect()),
    ];
    let names = (1..=4).map(|j| format!("v{j}")).collect();
    let d = Dataset::new(cols, names, vec![0.0; n], ResponseKind::Continuous).unwrap();
    let z = standardize(&d).unwrap();
    let w = DMatrix::from_fn(n, z.width(), |i, j| z.col(j)[i] / (n as f64).sqrt());
    let mut oracle: Vec<f64> = SymmetricEigen::new(w.transpose() * &w).eigenvalues.iter().copied().collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    let got = pcamix(&d).unwrap().eigenvalues;
    for (g, o) in got.iter().zip(&oracle) {
        assert!((g - o).abs() < 1e-10, "{g} vs {o}");
    }
    // total inertia: quantitative variables count 1, qualitative ones levels - 1
    let total: f64 = got.iter().sum();
    assert!((total - 5.0).abs() < 1e-10);
}

#[test]
fn shared_factor_and_autoregressive_moments() {
    let design = SimDesign::standard(2, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draw = draw_predictors(&design, 5000, &mut rng);
    let x = &draw.columns;
    // block 3 holds continuous shared-factor columns 21..30
    for (a, b) in [(21, 22), (23, 29), (25, 26)] {
        let r = pearson(&x[a], &x[b]);
        assert!((r - 0.5).abs() < 0.05, "within-block r = {r}");
    }
    // block 0 is autoregressive
    let r1 = pearson(&x[0], &x[1]);
    let r2 = pearson(&x[0], &x[2]);
    assert!((r1 - 0.6).abs() < 0.05 && (r2 - 0.36).abs() < 0.05, "{r1} {r2}");
    for (a, b) in [(0, 21), (3, 25), (22, 40)] {
        assert!(pearson(&x[a], &x[b]).abs() < 0.1);
    }
}

#[test]
fn noise_calibrated_to_signal_ratio() {
    for id in [1u8, 2] {
        let design = SimDesign::standard(id, 0.5).unwrap();
        let width = design.p();
        let design = design.resized(10_000, width).unwrap();
        let inst = generate::<f64>(&design, 4).unwrap();
        let sd = inst.noise_sd.unwrap();
        let ratio = (variance(inst.dataset.y()) - sd * sd) / (sd * sd);
        assert!((ratio / 1.8 - 1.0).abs() < 0.05, "design {id}: {ratio}");
    }
}

fn labels(max_len: usize, max_k: usize) -> impl Strategy<Value = Vec<usize>> {
    (2..=max_len).prop_flat_map(move |n| prop::collection::vec(0..max_k, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ari_is_symmetric_and_bounded(a in labels(30, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<usize> = a.iter().map(|_| rng.random_range(0..4)).collect();
        let pa = Partition::from_labels(&a);
        let pb = Partition::from_labels(&b);
        let ab = adjusted_rand_index(&pa, &pb).unwrap();
        let ba = adjusted_rand_index(&pb, &pa).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= 1.0 + 1e-12);
        let ri = rand_index(&pa, &pb).unwrap();
        prop_assert!((0.0..=1.0).contains(&ri));
    }

    #[test]
    fn ari_ignores_label_names(a in labels(25, 4), shift in 1usize..10) {
        let relabeled: Vec<usize> = a.iter().map(|l| (l + shift) * 7).collect();
        let pa = Partition::from_labels(&a);
        let pr = Partition::from_labels(&relabeled);
        prop_assert_eq!(adjusted_rand_index(&pa, &pr).unwrap(), 1.0);
    }

    #[test]
    fn dcor_bounded_and_symmetric(seed in any::<u64>(), n in 4usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let v: Vec<f64> = u.iter().map(|x| x * x + rng.sample::<f64, _>(StandardNormal)).collect();
        let uv = distance_correlation(as_column(&u), as_column(&v)).unwrap();
        let vu = distance_correlation(as_column(&v), as_column(&u)).unwrap();
        prop_assert!((0.0..=1.0).contains(&uv));
        prop_assert!((uv - vu).abs() < 1e-12);
    }

    #[test]
    fn cut_tree_yields_requested_count(seed in any::<u64>(), p in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..30).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let d = Dataset::from_quantitative(cols, vec![0.0; 30], ResponseKind::Continuous).unwrap();
        let dend = hierarchical_cluster(&d).unwrap();
        for m in 1..=p {
            prop_assert_eq!(cut_tree(&dend, m).unwrap().k(), m);
        }
        let heights: Vec<f64> = dend.merges.iter().map(|m| m.height).collect();
        prop_assert!(heights.iter().all(|&h| h >= 0.0));
    }

    #[test]
    fn screening_commutes_with_column_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, p) = (40, 12);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|i| cols[2][i] - cols[7][i].powi(2) + rng.sample::<f64, _>(StandardNormal)).collect();
        let perm: Vec<usize> = (0..p).rev().collect();
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&j| cols[j].clone()).collect();
        let a = Dataset::from_quantitative(cols, y.clone(), ResponseKind::Continuous).unwrap();
        let b = Dataset::from_quantitative(shuffled, y.clone(), ResponseKind::Continuous).unwrap();
        let ra = screen(&standardize(&a).unwrap(), &y, ScreenMethod::Dcsis, 1.0).unwrap();
        let rb = screen(&standardize(&b).unwrap(), &y, ScreenMethod::Dcsis, 1.0).unwrap();
        for j in 0..p {
            prop_assert!((ra.scores[perm[j]] - rb.scores[j]).abs() < 1e-12);
        }
        let mut ka: Vec<usize> = ra.kept.clone();
        let mut kb: Vec<usize> = rb.kept.iter().map(|&j| perm[j]).collect();
        ka.sort_unstable();
        kb.sort_unstable();
        prop_assert_eq!(ka, kb);
    }
}
