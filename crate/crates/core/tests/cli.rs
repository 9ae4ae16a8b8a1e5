use std::path::Path;
use std::process::{Command, Output};

use sparse_hysteresis::io::{read_csv, read_model, CsvSchema};
use sparse_hysteresis::prelude::*;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-hysteresis"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Value printed after `key = ` on stdout.
fn printed(o: &Output, key: &str) -> f64 {
    let out = stdout(o);
    let tail = &out[out.find(key).unwrap_or_else(|| panic!("no {key} in {out}")) + key.len()..];
    tail.split(|c: char| c == '%' || c.is_whitespace()).next().unwrap().parse().unwrap()
}

#[test]
fn gen_fit_predict_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["gen", "duhem", "--alpha", "0.4", "--beta", "0.5", "--gamma", "0.25", "--points", "10000"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let ts = read_csv(d.join("duhem.csv"), &CsvSchema::default(), None).unwrap();
    assert_eq!(ts.len(), 10_000);

    let o = run(d, &["fit", "duhem.csv"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).starts_with("dw/dt = 0.25"), "{}", stdout(&o));
    let model = read_model(d.join("model.txt")).unwrap().model;
    let mut names: Vec<String> = model.support_terms().iter().map(|t| t.name()).collect();
    names.sort();
    assert_eq!(names, ["u'", "|u'|*u", "|u'|*w"]);

    let o = run(d, &["predict", "duhem.csv", "--model", "model.txt"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(printed(&o, "R = ") < 1e-3);
    let text = std::fs::read_to_string(d.join("prediction.csv")).unwrap();
    assert!(text.starts_with("t,u,w,w_pred,abs_err\n"));
    assert_eq!(text.lines().count(), 10_001);
}

#[test]
fn true_model_predicts_its_own_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "duhem", "--points", "200000"])), 0);
    std::fs::write(
        d.join("true.txt"),
        "target = dw/dt\n0.4\t|u'|*u\n-0.5\t|u'|*w\n0.25\tu'\n",
    )
    .unwrap();
    let o = run(d, &["predict", "duhem.csv", "--model", "true.txt"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let r = printed(&o, "R = ");
    assert!(r <= 1e-6, "R = {r}%");
}

#[test]
fn zero_model_prediction_follows_formula() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "duhem", "--points", "500", "--w0", "0.2"])), 0);
    std::fs::write(d.join("zero.txt"), "target = dw/dt\n").unwrap();
    let o = run(d, &["predict", "duhem.csv", "--model", "zero.txt"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let ts = read_csv(d.join("duhem.csv"), &CsvSchema::default(), None).unwrap();
    let w0 = ts.w()[0];
    let num: f64 = ts.w().iter().map(|w| (w - w0).powi(2)).sum::<f64>().sqrt();
    let den: f64 = ts.w().iter().map(|w| w * w).sum::<f64>().sqrt();
    assert!((printed(&o, "R = ") - 100.0 * num / den).abs() < 1e-9);
}

#[test]
fn noisy_generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.csv", "b.csv"] {
        assert_eq!(code(&run(d, &["gen", "bouc-wen", "--noise", "5", "--seed", "7", "--output", name])), 0);
    }
    assert_eq!(code(&run(d, &["gen", "bouc-wen", "--noise", "5", "--seed", "8", "--output", "c.csv"])), 0);
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["gen", "duhem", "--points", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too short"));

    assert_eq!(code(&run(d, &["gen", "duhem", "--points", "100"])), 0);
    assert_eq!(code(&run(d, &["fit", "duhem.csv", "--library", "nope"])), 2);
    assert_eq!(code(&run(d, &["bench", "--methods", ""])), 2);
    assert_eq!(code(&run(d, &["bench", "--methods", "lasso"])), 2);
    assert_eq!(code(&run(d, &["no-such-command"])), 2);
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["predict", "data.csv", "--model", "missing.txt"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.txt"));
    std::fs::write(d.join("bad.csv"), "t,u,w\n0,0,0\n1,x,0\n2,0,0\n3,0,0\n").unwrap();
    let o = run(d, &["fit", "bad.csv"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 3"));
}

#[test]
fn bench_writes_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["bench", "--study", "size", "--sizes", "1000", "--seeds", "2", "--methods", "stlsq,ols"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let text = std::fs::read_to_string(d.join("bench_size.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,size,noise,threshold,R_percent,fit_seconds"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("stlsq,1000,0,0.1,"));
    assert!(rows[1].starts_with("ols,1000,0,0,"));
}

#[test]
fn butterfly_two_stage_from_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "butterfly"])), 0);
    assert!(d.join("butterfly_aux.csv").exists());

    let o = run(d, &["butterfly", "butterfly.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("auxiliary"));

    let o = run(d, &["butterfly", "butterfly.csv", "--aux-csv", "butterfly_aux.csv"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let outer = read_model(d.join("butterfly_outer.txt")).unwrap().model;
    let inner = read_model(d.join("butterfly_inner.txt")).unwrap().model;
    assert_eq!(inner.target, ModelTarget::Aux);
    assert!((outer.coefficient_of(&"|u'|*u*y".parse().unwrap()) - 6.4).abs() < 0.1);

    assert_eq!(code(&run(d, &["predict", "butterfly.csv", "--model", "butterfly_outer.txt"])), 2);
    let o = run(
        d,
        &["predict", "butterfly.csv", "--model", "butterfly_outer.txt", "--aux-model", "butterfly_inner.txt", "--aux-csv", "butterfly_aux.csv"],
    );
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(printed(&o, "R = ") < 0.1);
}

#[test]
fn defaults_from_selects_experiment_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "--defaults-from", "size", "--points", "1000", "--output", "size.csv"])), 0);
    let ts = read_csv(d.join("size.csv"), &CsvSchema::default(), None).unwrap();
    let setup = sparse_hysteresis::experiments::Study::DataSize.record_setup();
    let expected = simulate_bouc_wen(&BoucWenParams::DATA_SIZE_STUDY, &setup.excitation, 1000, setup.dt(1000), 0.0).unwrap();
    for (a, b) in ts.w().iter().zip(expected.w()) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    assert_eq!(code(&run(d, &["gen", "duhem", "--defaults-from", "noise"])), 2);
}
