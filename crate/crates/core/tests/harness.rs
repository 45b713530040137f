mod common;

use samble::geometry::{normalize_unit_sphere, sample_fps, sample_random, FpsStart};
use samble::harness::{
    config_to_text, gen_shape, gen_shape_named, metric_chamfer, metric_edge_recall,
    metric_uniformity, parse_config, run_bench, SamplerSpec, ShapeKind, ShapeParams,
};
use samble::{Error, SampleResult};

#[test]
fn fps_more_uniform_than_random_on_circle() {
    let shape = gen_shape(ShapeKind::Circle, ShapeParams::sized(64), 0).unwrap();
    let wins = (0..100u64)
        .filter(|&s| {
            let fps = sample_fps(&shape.cloud, 8, FpsStart::Seeded(s)).unwrap();
            let rs = sample_random(&shape.cloud, 8, s).unwrap();
            metric_uniformity(&fps, &shape.cloud).unwrap()
                <= metric_uniformity(&rs, &shape.cloud).unwrap()
        })
        .count();
    assert!(wins >= 95, "{wins}");
}

#[test]
fn fps_chamfer_beats_random_on_convex_shapes() {
    for (kind, size) in [
        (ShapeKind::Circle, 64),
        (ShapeKind::CubeShell, 8),
        (ShapeKind::Grid2d, 12),
    ] {
        let shape = gen_shape(kind, ShapeParams::sized(size), 0).unwrap();
        let n = shape.cloud.len();
        let m = n / 8;
        let wins = (0..100u64)
            .filter(|&s| {
                let fps = sample_fps(&shape.cloud, m, FpsStart::Seeded(s)).unwrap();
                let rs = sample_random(&shape.cloud, m, s).unwrap();
                metric_chamfer(&fps, &shape.cloud).unwrap()
                    <= metric_chamfer(&rs, &shape.cloud).unwrap()
            })
            .count();
        assert!(wins >= 90, "{kind}: {wins}");
    }
}

#[test]
fn generator_counts_and_masks() {
    let grid = gen_shape(ShapeKind::Grid2d, ShapeParams::sized(10), 0).unwrap();
    assert_eq!((grid.cloud.len(), grid.edge_count()), (100, 36));
    let circle = gen_shape(ShapeKind::Circle, ShapeParams::sized(64), 0).unwrap();
    assert!(circle.edge_mask.iter().all(|&e| e));

    let cube = gen_shape(ShapeKind::CubeShell, ShapeParams::sized(8), 0).unwrap();
    assert_eq!(cube.cloud.len(), 6 * 64 - 12 * 8 + 8);
    for (p, &e) in cube.cloud.points().iter().zip(&cube.edge_mask) {
        let on_face = p.iter().filter(|v| (v.abs() - 1.0).abs() < 1e-12).count();
        assert_eq!(e, on_face >= 2, "{p:?}");
    }
    assert_eq!(cube.edge_count(), 12 * 6 + 8);

    let l = gen_shape(ShapeKind::LBracket, ShapeParams::sized(12), 0).unwrap();
    assert!(l.edge_count() > 0 && l.edge_count() < l.cloud.len());
    assert!(matches!(
        gen_shape_named("teapot", ShapeParams::sized(4), 0),
        Err(Error::UnknownGenerator(_))
    ));
}

#[test]
fn jitter_is_seeded() {
    let p = ShapeParams {
        size: 10,
        jitter: 0.05,
    };
    let a = gen_shape(ShapeKind::Grid2d, p, 3).unwrap();
    let b = gen_shape(ShapeKind::Grid2d, p, 3).unwrap();
    let c = gen_shape(ShapeKind::Grid2d, p, 4).unwrap();
    assert_eq!(a.cloud.points(), b.cloud.points());
    assert_ne!(a.cloud.points(), c.cloud.points());
    assert_eq!(
        a.edge_mask,
        gen_shape(ShapeKind::Grid2d, ShapeParams::sized(10), 0)
            .unwrap()
            .edge_mask
    );
}

#[test]
fn metric_fixtures() {
    let line =
        samble::geometry::PointCloud::new((0..4).map(|i| [i as f64, 0.0, 0.0]).collect()).unwrap();
    let s = SampleResult::new(
        4,
        vec![0, 3],
        vec![0.0; 2],
        vec![0; 2],
        0,
        samble::Policy::Random,
    );
    assert!((metric_chamfer(&s, &line).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(
        metric_edge_recall(&s, &[true, false, false, true]).unwrap(),
        1.0
    );
    assert_eq!(
        metric_edge_recall(&s, &[false, true, true, false]).unwrap(),
        0.0
    );
    assert!(metric_edge_recall(&s, &[false; 4]).is_err());

    let clustered =
        samble::geometry::PointCloud::new(vec![[0.0; 3], [0.1, 0.0, 0.0], [5.0, 0.0, 0.0]])
            .unwrap();
    let all = SampleResult::new(
        3,
        vec![0, 1, 2],
        vec![0.0; 3],
        vec![0; 3],
        0,
        samble::Policy::Random,
    );
    assert!(metric_uniformity(&all, &clustered).unwrap() > 1e-3);
}

#[test]
fn uniformity_is_scale_free() {
    let cloud = common::random_cloud(80, 21);
    let doubled = samble::geometry::PointCloud::new(
        cloud.points().iter().map(|p| p.map(|v| v * 2.0)).collect(),
    )
    .unwrap();
    let s = sample_random(&cloud, 20, 5).unwrap();
    assert!(
        (metric_uniformity(&s, &cloud).unwrap() - metric_uniformity(&s, &doubled).unwrap()).abs()
            < 1e-12
    );
}

#[test]
fn bench_shape_and_determinism() {
    let shapes: Vec<_> = [ShapeKind::Grid2d, ShapeKind::Circle]
        .iter()
        .map(|&k| gen_shape(k, ShapeParams::sized(k.default_size()), 0).unwrap())
        .collect();
    let samplers = SamplerSpec::standard_set();
    let a = run_bench(&shapes, &samplers, &[8, 16], 9).unwrap();
    assert_eq!(a.records.len(), 2 * samplers.len() * 2);
    let b = run_bench(&shapes, &samplers, &[8, 16], 9).unwrap();
    assert_eq!(a.to_table(false), b.to_table(false));
    for r in &a.records {
        assert!(r.uniformity >= 0.0 && r.chamfer >= 0.0);
        assert!((0.0..=1.0).contains(&r.edge_recall));
        assert!(r.delivered <= r.m);
    }
}

#[test]
fn bench_normalizes_each_shape() {
    let shape = gen_shape(ShapeKind::Grid2d, ShapeParams::sized(10), 0).unwrap();
    let cloud = normalize_unit_sphere(&shape.cloud);
    let rs = run_bench(
        std::slice::from_ref(&shape),
        &[SamplerSpec::policy(samble::Policy::Fps)],
        &[10],
        0,
    )
    .unwrap();
    let direct = sample_fps(&cloud, 10, FpsStart::Index(0)).unwrap();
    assert_eq!(
        rs.records[0].chamfer,
        metric_chamfer(&direct, &cloud).unwrap()
    );
}

#[test]
fn config_round_trip() {
    let text = "# defaults with tweaks\nmode = v\nk: 12\nn_b = 3\ntau = 0.5\nvariant = insert\npolicy = prior\nseed = 42\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.k, 12);
    assert_eq!(cfg.n_b, 3);
    assert_eq!(cfg.seed, 42);
    assert_eq!(parse_config(&config_to_text(&cfg)).unwrap(), cfg);
    assert!(parse_config("bogus = 1\n").is_err());
    assert!(parse_config("k = many\n").is_err());
}
