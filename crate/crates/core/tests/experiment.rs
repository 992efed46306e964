use std::collections::BTreeMap;

use coverage_lab::deploy::Seed;
use coverage_lab::error::Error;
use coverage_lab::experiment::{
    collect_sweep, emit_csv, plot_svg, read_csv, run_sweep_to, snapshot_svg, ExperimentConfig, Strategies, Strategy,
    GA_TABLE,
};
use coverage_lab::ga::{optimize_field, GaParams};

fn hundred_rows() -> ExperimentConfig {
    let mut c = ExperimentConfig::single(Strategy::Uniform, 50, 1);
    c.strategy = Strategies::Many(vec![Strategy::Uniform, Strategy::Gaussian]);
    c.node_counts = vec![25, 50, 100, 150, 200];
    c.seeds = (1..=10).collect();
    c
}

#[test]
fn sweep_csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let c = hundred_rows();
    let mut files = Vec::new();
    for (k, threads) in [1, 1, 8].into_iter().enumerate() {
        let p = dir.path().join(format!("run{k}.csv"));
        let result = run_sweep_to(&c, &p, threads).unwrap();
        assert_eq!(result.rows.len(), 100);
        files.push(std::fs::read(&p).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));

    // What was streamed equals what a one-shot emit of the same result writes.
    let again = dir.path().join("emit.csv");
    emit_csv(&collect_sweep(&c).unwrap(), &again).unwrap();
    assert_eq!(std::fs::read(&again).unwrap(), files[0]);
}

#[test]
fn plotted_means_equal_csv_means() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    run_sweep_to(&hundred_rows(), &p, 2).unwrap();
    let result = read_csv(&p).unwrap();

    let mut from_csv: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in &result.rows {
        from_csv.entry((r.strategy.to_string(), r.n)).or_default().push(r.coverage);
    }

    let svg = plot_svg(&result, &[GA_TABLE]).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let mut plotted = 0;
    for g in doc.descendants().filter(|n| n.attribute("class") == Some("series")) {
        let strategy = g.attribute("data-strategy").unwrap();
        for m in g.children().filter(|n| n.attribute("class") == Some("marker")) {
            let n: usize = m.attribute("data-n").unwrap().parse().unwrap();
            let mean: f64 = m.attribute("data-mean").unwrap().parse().unwrap();
            let values = &from_csv[&(strategy.to_string(), n)];
            let expected = values.iter().sum::<f64>() / values.len() as f64;
            assert!((mean - expected).abs() < 1e-9);
            plotted += 1;
        }
    }
    assert_eq!(plotted, from_csv.len());
}

#[test]
fn unwritable_output_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = hundred_rows();
    // Would take minutes if it ever started.
    c.strategy = Strategies::One(Strategy::Ga);
    c.node_counts = vec![2000];
    let start = std::time::Instant::now();
    let err = run_sweep_to(&c, dir.path(), 1).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
    assert!(start.elapsed().as_secs() < 5);
}

#[test]
fn finished_rows_are_on_disk_when_a_later_job_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("partial.csv");
    let mut c = ExperimentConfig::single(Strategy::Bidding, 10, 1);
    // Bidding rows come first; the Gaussian ones then fail because almost
    // every draw from such a wide spread lands outside the field.
    c.strategy = Strategies::Many(vec![Strategy::Gaussian, Strategy::Bidding]);
    c.seeds = vec![1, 2];
    c.gaussian = Some(coverage_lab::experiment::config::GaussianConfig {
        sigma_x: 1e5,
        sigma_y: 1e5,
    });
    let err = run_sweep_to(&c, &p, 1).unwrap_err();
    assert!(matches!(err, Error::DegenerateGaussian { .. }), "{err}");
    let text = std::fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("bidding,10,1,") && lines[2].starts_with("bidding,10,2,"));
}

#[test]
fn ga_snapshot_has_one_circle_per_sensor() {
    let field = ExperimentConfig::single(Strategy::Ga, 50, 1).field().unwrap();
    let params = GaParams {
        population_size: 20,
        max_generations: 5,
        ..GaParams::default()
    };
    let opt = optimize_field(&field, 50, 5.0, &params, Seed(3)).unwrap();
    let svg = snapshot_svg(&opt.deployment, Some(&opt.partition));
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let circles: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("circle")).collect();
    assert_eq!(circles.len(), 50);
    let scale = 600.0 / 113.0;
    for c in circles {
        let cx: f64 = c.attribute("cx").unwrap().parse().unwrap();
        let cy: f64 = c.attribute("cy").unwrap().parse().unwrap();
        let r: f64 = c.attribute("r").unwrap().parse().unwrap();
        assert!((10.0..=610.0 + 1e-3).contains(&cx) && (10.0..=610.0 + 1e-3).contains(&cy));
        assert!((r - 5.0 * scale).abs() < 1e-3);
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let table2 = ExperimentConfig::load(&dir.join("table2.json")).unwrap();
    assert_eq!(table2.node_counts, GA_TABLE.node_counts());
    assert_eq!(table2.seeds.len(), 10);
    let table3 = ExperimentConfig::load(&dir.join("table3.json")).unwrap();
    assert_eq!(table3.strategies(), vec![Strategy::Ga, Strategy::Gaussian]);
}
