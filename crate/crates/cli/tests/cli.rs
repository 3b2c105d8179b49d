use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn somogsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somogsa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_trace_with_expected_header() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = somogsa(&[
        "run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "2.6,-1.3",
        "--sphere-center", "-3.5,-2.5", "--trace-out", path(&trace),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iter,phase,x1,x2,f1,f2,grad1_norm");
    assert!(lines.next().unwrap().starts_with("0,START,2.6,-1.3,"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("reason=F2_OPT_REACHED"));
}

#[test]
fn nelder_mead_run_fills_helper_column() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("nm.csv");
    let out = somogsa(&[
        "run", "--problem", "sphere", "--algo", "nelder-mead", "--start", "1,1",
        "--sphere-center", "-3.5,-2.5", "--trace-out", path(&trace),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&trace).unwrap();
    for line in text.lines().skip(1) {
        assert!(!line.split(',').nth(5).unwrap().is_empty());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let t = path(&trace);
    for args in [
        vec!["run", "--problem", "ackley", "--algo", "somogsa", "--start", "1,1", "--sphere-center", "0,0", "--trace-out", t],
        vec!["run", "--problem", "rastrigin", "--algo", "cma", "--start", "1,1", "--sphere-center", "0,0", "--trace-out", t],
        vec!["run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "9,1", "--sphere-center", "0,0", "--trace-out", t],
        vec!["run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "1,1", "--sphere-center", "0,0,0", "--trace-out", t],
        vec!["run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "1,1", "--sphere-center", "0,0", "--t-angle", "200", "--trace-out", t],
        vec!["plot", "--problem", "rastrigin", "--sphere-center", "0,0", "--resolution", "1x100", "--out", t],
        vec!["plot", "--problem", "rastrigin", "--sphere-center", "0,0", "--resolution", "ten", "--out", t],
        vec!["bench", "--config", "/nonexistent/config.toml", "--out-dir", t],
        vec!["frobnicate"],
    ] {
        let out = somogsa(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unwritable_output_is_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = somogsa(&[
        "run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "1.5,1.5",
        "--sphere-center", "-3.5,-2.5", "--trace-out", path(&blocker.join("t.csv")),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn plot_renders_image_field_and_overlays() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let img = dir.path().join("plot.ppm");
    let field = dir.path().join("field.csv");
    assert_eq!(
        code(&somogsa(&[
            "run", "--problem", "rastrigin", "--algo", "somogsa", "--start", "2.6,-1.3",
            "--sphere-center", "-3.5,-2.5", "--trace-out", path(&trace),
        ])),
        0
    );
    let out = somogsa(&[
        "plot", "--problem", "rastrigin", "--sphere-center", "-3.5,-2.5", "--resolution", "40x50",
        "--trace", path(&trace), "--out", path(&img), "--field-out", path(&field),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P6\n200 160 255\n"), "{:?}", &bytes[..16]);
    let csv = fs::read_to_string(&field).unwrap();
    assert!(csv.starts_with("ix,iy,x1,x2,f1,f2,mograd_norm,efficient,height,domcount\n"));
    assert_eq!(csv.lines().count(), 1 + 40 * 50);
}

#[test]
fn plot_rejects_bad_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("bogus.csv");
    fs::write(&bogus, "a,b\n1,2\n").unwrap();
    let out = somogsa(&[
        "plot", "--problem", "rastrigin", "--sphere-center", "-3.5,-2.5", "--resolution", "10x10",
        "--trace", path(&bogus), "--out", path(&dir.path().join("p.png")),
    ]);
    assert_eq!(code(&out), 2);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn bench_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(
        &cfg,
        "problem = \"rastrigin\"\nsphere_center = [-3.5, -2.5]\nstart_seed = 1\nresolution = [40, 40]\nobjective_space_starts = [1]\n",
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&somogsa(&["bench", "--config", path(&cfg), "--out-dir", path(&a), "--threads", "1"])), 0);
    let out = somogsa(&["bench", "--config", path(&cfg), "--out-dir", path(&b), "--threads", "3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mean_gap[somogsa]="));
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    assert_eq!(sa.len(), 12 + 2 + 4 + 2);
    assert_eq!(sa, sb);
}
