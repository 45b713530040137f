mod common;

use proptest::prelude::*;
use samble::attention::{
    carve_global, carve_sam, global_map, init_weights, insert_sam, load_weights, local_rows,
    save_weights, token_block, token_energies, WeightSet,
};
use samble::geometry::{knn, PointCloud};
use samble::matrix::Matrix;

use common::random_cloud;

fn project(x: &[f64; 3], w: &Matrix) -> Vec<f64> {
    (0..w.cols())
        .map(|c| (0..3).map(|t| x[t] * w.get(t, c)).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = logits.iter().map(|l| l.exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

#[test]
fn global_map_matches_direct_formula() {
    let cloud = random_cloud(8, 1);
    let ws = init_weights(3, 8, 2, 9).unwrap();
    let map = global_map(&cloud, &ws).unwrap();
    let pts = cloud.points();
    for i in 0..8 {
        let q = project(&pts[i], ws.w_q());
        let logits: Vec<f64> = pts
            .iter()
            .map(|p| dot(&q, &project(p, ws.w_k())) / 8f64.sqrt())
            .collect();
        let row = softmax(&logits);
        for (j, expect) in row.iter().enumerate() {
            assert!((map.get(i, j) - expect).abs() < 1e-12);
        }
        assert!((map.values().row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn local_rows_use_relative_keys() {
    let cloud = random_cloud(8, 2);
    let ws = init_weights(3, 8, 1, 3).unwrap();
    let table = knn(&cloud, 4).unwrap();
    let local = local_rows(&cloud, &table, &ws).unwrap();
    let pts = cloud.points();
    for o in 0..8 {
        let q = project(&pts[o], ws.w_q());
        let logits: Vec<f64> = table
            .row(o)
            .iter()
            .map(|&j| {
                let off = [
                    pts[j][0] - pts[o][0],
                    pts[j][1] - pts[o][1],
                    pts[j][2] - pts[o][2],
                ];
                dot(&q, &project(&off, ws.w_k())) / 8f64.sqrt()
            })
            .collect();
        for (a, b) in local.row(o).iter().zip(softmax(&logits)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((local.row(o).iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn chain_column_counts() {
    let cloud = PointCloud::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
    let ws = init_weights(3, 4, 1, 0).unwrap();
    let table = knn(&cloud, 2).unwrap();
    let carve = carve_global(&cloud, &table, &ws).unwrap();
    assert_eq!(carve.column_counts(), &[2, 3, 1]);
    assert_eq!(carve.column_counts().iter().sum::<usize>(), 6);
}

#[test]
fn carve_and_insert_share_positions() {
    let cloud = random_cloud(64, 5);
    let ws = init_weights(3, 8, 1, 1).unwrap();
    let table = knn(&cloud, 9).unwrap();
    let carve = carve_sam(&global_map(&cloud, &ws).unwrap(), &table).unwrap();
    let insert = insert_sam(&local_rows(&cloud, &table, &ws).unwrap(), &table).unwrap();
    for o in 0..64 {
        assert_eq!(carve.row_cols(o), insert.row_cols(o));
        assert!(carve.row_sum(o) <= 1.0 + 1e-12);
        assert!((insert.row_sum(o) - 1.0).abs() < 1e-9);
    }
    assert_eq!(carve.column_counts(), insert.column_counts());
}

#[test]
fn fused_carve_is_bit_identical() {
    let cloud = random_cloud(100, 6);
    let ws = init_weights(3, 16, 1, 6).unwrap();
    let table = knn(&cloud, 12).unwrap();
    assert_eq!(
        carve_global(&cloud, &table, &ws).unwrap(),
        carve_sam(&global_map(&cloud, &ws).unwrap(), &table).unwrap()
    );
}

#[test]
fn uniform_energies_split_mass_evenly() {
    let (n, n_b) = (10, 4);
    let ws = WeightSet::new(
        Matrix::zeros(3, 5),
        Matrix::zeros(3, 5),
        Matrix::zeros(n_b, 3),
    )
    .unwrap();
    let e = token_energies(&random_cloud(n, 7), &ws).unwrap();
    let expected = n as f64 / (n + n_b) as f64;
    for i in 0..n {
        let point_sum: f64 = e.post_softmax_point_block.row(i).iter().sum();
        let token_sum: f64 = e.post_softmax_token_block.row(i).iter().sum();
        assert!((point_sum - expected).abs() < 1e-12);
        assert!((point_sum + token_sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn tokens_append_keys_only() {
    let cloud = random_cloud(12, 8);
    let ws = init_weights(3, 8, 3, 2).unwrap();
    let e = token_energies(&cloud, &ws).unwrap();
    let tk: Vec<Vec<f64>> = (0..3)
        .map(|b| {
            let t = ws.bin_tokens().row(b);
            project(&[t[0], t[1], t[2]], ws.w_k())
        })
        .collect();
    for i in 0..12 {
        let q = project(&cloud.points()[i], ws.w_q());
        let (pr, tr) = (
            e.post_softmax_point_block.row(i),
            e.post_softmax_token_block.row(i),
        );
        let row_max = pr.iter().chain(tr).copied().fold(0.0, f64::max);
        let point_sum: f64 = pr.iter().sum();
        assert!(point_sum < 1.0 && point_sum >= 1.0 - 3.0 * row_max);
        for (b, key) in tk.iter().enumerate() {
            assert!((e.token_block.get(i, b) - dot(&q, key) / 8f64.sqrt()).abs() < 1e-12);
        }
    }
    assert_eq!(token_block(&cloud, &ws).unwrap(), e.token_block);
}

#[test]
fn weights_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.bin");
    let ws = init_weights(3, 8, 6, 11).unwrap();
    save_weights(&ws, &path).unwrap();
    let back = load_weights(&path).unwrap();
    assert_eq!(back.w_q(), ws.w_q());
    assert_eq!(back.w_k(), ws.w_k());
    assert_eq!(back.bin_tokens(), ws.bin_tokens());
}

#[test]
fn dimension_mismatch_rejected() {
    let ws = init_weights(4, 8, 1, 0).unwrap();
    assert!(global_map(&random_cloud(8, 0), &ws).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_stay_stochastic_under_scaling(seed in 0u64..1000, n in 4usize..80, scale in 1e-3f64..1e3) {
        let base = random_cloud(n, seed);
        let scaled = PointCloud::new(base.points().iter().map(|p| [p[0] * scale, p[1] * scale, p[2] * scale]).collect()).unwrap();
        let ws = init_weights(3, 8, 1, seed).unwrap();
        let k = (n / 3).max(1);
        let table = knn(&scaled, k).unwrap();
        let dense = global_map(&scaled, &ws).unwrap();
        let insert = insert_sam(&local_rows(&scaled, &table, &ws).unwrap(), &table).unwrap();
        for o in 0..n {
            prop_assert!((dense.values().row(o).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((insert.row_sum(o) - 1.0).abs() < 1e-9);
            prop_assert!(dense.values().row(o).iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
}
