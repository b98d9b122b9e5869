use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ymh(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ymh"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("YMH_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let i = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn bps_default_reports_eight_pi() {
    let d = tempfile::tempdir().unwrap();
    let o = ymh(&["bps"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e = column(&fs::read_to_string(d.path().join("bps.csv")).unwrap(), "normalized")[0];
    assert!((e - 25.13).abs() < 0.01, "{e}");
    let manifest = fs::read_to_string(d.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("r_max = 20.0") && manifest.contains("# wall_time_s"));
}

#[test]
fn relax_with_zero_iterations_echoes_input_energy() {
    let d = tempfile::tempdir().unwrap();
    let cfg = config(d.path(), "max_iters = 0\nn1 = 8\nn2 = 8\nn3 = 8\n");
    let o = ymh(&["relax", "--config", &cfg], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e = column(&fs::read_to_string(d.path().join("energy.csv")).unwrap(), "total");
    assert_eq!(e[0], e[1]);
    let trace = column(&fs::read_to_string(d.path().join("trace.csv")).unwrap(), "energy");
    assert_eq!(trace, vec![e[0]]);
}

#[test]
fn relax_from_snapshot_continues() {
    let d = tempfile::tempdir().unwrap();
    let first = d.path().join("a");
    let cfg = config(d.path(), "max_iters = 5\nn1 = 8\nn2 = 8\nn3 = 8\n");
    assert_eq!(code(&ymh(&["relax", "--config", &cfg], &first)), 0);
    let snap = first.join("final.ymh").display().to_string();
    let cfg2 = config(d.path(), &format!("max_iters = 0\ninput = {snap}\n"));
    let second = d.path().join("b");
    assert_eq!(code(&ymh(&["relax", "--config", &cfg2], &second)), 0);
    let e1 = column(&fs::read_to_string(first.join("energy.csv")).unwrap(), "total")[1];
    let e2 = column(&fs::read_to_string(second.join("energy.csv")).unwrap(), "total")[0];
    assert_eq!(e1, e2);
}

#[test]
fn validation_errors_exit_one_with_one_line() {
    let d = tempfile::tempdir().unwrap();
    for text in ["epsilon = -1\n", "bogus = 3\n", "epsilon 0.1\n"] {
        let cfg = config(d.path(), text);
        let o = ymh(&["relax", "--config", &cfg], d.path());
        assert_eq!(code(&o), 1, "{text}");
        assert_eq!(stderr(&o).trim().lines().count(), 1, "{}", stderr(&o));
    }
    let o = ymh(&["relax", "--config", &config(d.path(), "epsilon = -1\n")], d.path());
    assert!(stderr(&o).contains("epsilon"));
    let o = ymh(&["bps", "--config", &config(d.path(), "lambda = 1\n")], d.path());
    assert_eq!(code(&o), 1);
    let o = ymh(&["bogus"], d.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn bad_thread_variable_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ymh"))
        .args(["bps", "--out"])
        .arg(d.path())
        .env("YMH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("YMH_THREADS"));
}

#[test]
fn io_errors_exit_three() {
    let d = tempfile::tempdir().unwrap();
    let o = ymh(&["relax", "--config", "/nonexistent/run.cfg"], d.path());
    assert_eq!(code(&o), 3);
    let bad = d.path().join("bad.ymh");
    fs::write(&bad, b"NOPE0000000000000000000000000000000000000000").unwrap();
    let cfg = config(d.path(), &format!("input = {}\n", bad.display()));
    let o = ymh(&["relax", "--config", &cfg], d.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn stalled_radial_relaxation_exits_two() {
    let d = tempfile::tempdir().unwrap();
    // The residual floor at this ε sits above the tolerance.
    let cfg = config(d.path(), "epsilon = 0.25\nr_max = 5\ntol_residual = 1e-14\n");
    let o = ymh(&["radial", "--config", &cfg], d.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(d.path().join("trace.csv").exists());
}

#[test]
fn identical_runs_give_identical_csv() {
    let d = tempfile::tempdir().unwrap();
    let cfg = config(d.path(), "n1 = 8\nn2 = 8\nn3 = 8\ntrials = 2\nmax_iters = 400\n");
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&ymh(&["gap-probe", "--config", &cfg, "--threads", "1", "--seed", "7"], out)), 0);
    }
    assert_eq!(fs::read(a.join("gap.csv")).unwrap(), fs::read(b.join("gap.csv")).unwrap());
}

#[test]
fn manifest_reruns_to_the_same_outputs() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a");
    let cfg = config(d.path(), "n1 = 8\nn2 = 8\nn3 = 8\nmax_iters = 50\nseed = 3\namplitude = 0.05\n");
    assert_eq!(code(&ymh(&["relax", "--config", &cfg, "--threads", "1"], &a)), 0);
    let b = d.path().join("b");
    let manifest = a.join("manifest.txt").display().to_string();
    assert_eq!(code(&ymh(&["relax", "--config", &manifest], &b)), 0);
    for f in ["trace.csv", "energy.csv", "final.ymh"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn charge_and_bubbling_tables() {
    let d = tempfile::tempdir().unwrap();
    let o = ymh(&["charge"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("charge.csv")).unwrap();
    assert!(csv.starts_with("radius,mass,charge"));
    let q = column(&csv, "charge");
    assert!((q.last().unwrap() - 1.0).abs() < 0.05, "{q:?}");
    let deg = column(&csv, "degree");
    assert!(deg.iter().all(|x| (x - 1.0).abs() < 0.01));

    let o = ymh(&["bubbling"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("concentration.txt")).unwrap();
    assert!(text.contains("points=1") && text.contains("z_beta_uncovered sites=0"), "{text}");
    assert!(d.path().join("bubble.ymh").exists());
}

#[test]
fn sweepout_single_point() {
    let d = tempfile::tempdir().unwrap();
    let cfg = config(d.path(), "y = 1, 0, 0\nn1 = 17\n");
    let o = ymh(&["sweepout", "--config", &cfg], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // |y| = 1 is the constant pair.
    let e = column(&fs::read_to_string(d.path().join("sweepout.csv")).unwrap(), "total");
    assert!(e[0].abs() < 1e-20, "{e:?}");
}
