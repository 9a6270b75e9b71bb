use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_svddcap"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn disk(&self, n: usize) {
        ok(
            self.path(),
            &[
                "generate",
                "disk",
                "-n",
                &n.to_string(),
                "--seed",
                "1",
                "-o",
                "disk.csv",
            ],
        );
        self.file("spec.csv", "x,-4,4\ny,-4,4\n");
    }
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
        .parse()
        .unwrap()
}

#[test]
fn train_summary_echoes_simplex_constraint() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b\n0,0\n1,0\n0,1\n1,1\n0.5,0.5\n");
    let out = ok(
        ws.path(),
        &["train", "pts.csv", "-s", "1", "-f", "1e-6", "-o", "m.toml"],
    );
    let sum: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("sum alpha = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((sum - 1.0).abs() < 1e-9);
    assert!(out.contains("converged = yes"));
    assert!(ws.path().join("m.toml").exists());
    assert!(!out.contains("heuristic"));
}

#[test]
fn missing_bandwidth_uses_labeled_heuristic() {
    let ws = Workspace::new();
    // pairwise distances 1, 1, 2: median 1
    ws.file("line.csv", "x\n0\n1\n2\n");
    let out = ok(ws.path(), &["train", "line.csv", "-o", "m.toml"]);
    assert!(out.contains("bandwidth s = 1 (heuristic)"), "{out}");
}

#[test]
fn invalid_outlier_fraction_exits_2() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b\n0,0\n1,0\n");
    let out = run(
        ws.path(),
        &["train", "pts.csv", "-s", "1", "-f", "2", "-o", "m.toml"],
    );
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.starts_with("error[input]: "), "{err}");
    assert!(err.contains("0 < f <= 1"));
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn unreadable_and_malformed_inputs_exit_2() {
    let ws = Workspace::new();
    assert_eq!(
        code(&run(
            ws.path(),
            &["train", "nope.csv", "-s", "1", "-o", "m.toml"]
        )),
        2
    );
    ws.file("bad.csv", "a,b\n1,2\n3,oops\n");
    let out = run(ws.path(), &["train", "bad.csv", "-s", "1", "-o", "m.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error[parse]: "));
    assert_eq!(code(&run(ws.path(), &["train", "--bogus"])), 2);
}

#[test]
fn degenerate_model_exits_4() {
    let ws = Workspace::new();
    // C = 1/3 pins every multiplier to the bound
    ws.file("pts.csv", "x\n0\n1\n5\n");
    let out = run(
        ws.path(),
        &["train", "pts.csv", "-s", "1", "-f", "1", "-o", "m.toml"],
    );
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[degenerate-model]: "));
}

#[test]
fn single_point_model_trains() {
    let ws = Workspace::new();
    ws.file("one.csv", "x,y\n1,2\n");
    let out = ok(
        ws.path(),
        &["train", "one.csv", "-s", "1", "-f", "1", "-o", "m.toml"],
    );
    assert!(out.contains("R2 = 0\n"), "{out}");
}

#[test]
fn score_appends_dist2_and_outlier_columns() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b\n0,0\n1,0\n0,1\n1,1\n");
    ok(ws.path(), &["train", "pts.csv", "-s", "1", "-o", "m.toml"]);
    ws.file("new.csv", "a,b\n0.5,0.5\n9,9\n");
    let csv = ok(ws.path(), &["score", "new.csv", "--model", "m.toml"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "a,b,dist2,outlier");
    assert!(lines[1].starts_with("0.5,0.5,") && lines[1].ends_with(",0"));
    assert!(lines[2].starts_with("9,9,") && lines[2].ends_with(",1"));
}

#[test]
fn score_rejects_wrong_dimension() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b\n0,0\n1,0\n");
    ok(ws.path(), &["train", "pts.csv", "-s", "1", "-o", "m.toml"]);
    ws.file("three.csv", "p,q,r\n1,2,3\n");
    let out = run(ws.path(), &["score", "three.csv", "--model", "m.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error[dimension]: "));
}

#[test]
fn disk_capability_matches_area_ratio() {
    let ws = Workspace::new();
    ws.disk(2000);
    let report = ok(
        ws.path(),
        &[
            "capability",
            "disk.csv",
            "--spec",
            "spec.csv",
            "--seed",
            "7",
        ],
    );
    let cp = report_value(&report, "cp");
    let analytic = 64.0 / (4.0 * std::f64::consts::PI);
    assert!((cp - analytic).abs() / analytic <= 0.15, "cp = {cp}");
    assert_eq!(report_value(&report, "p"), 0.0);
    assert!(report_value(&report, "dist") < 0.2);
}

#[test]
fn capability_reports_are_byte_identical() {
    let ws = Workspace::new();
    ws.disk(300);
    ok(
        ws.path(),
        &["train", "disk.csv", "-s", "1.5", "-o", "m.toml"],
    );
    let reports: Vec<String> = ["1", "4", "16", "4"]
        .iter()
        .map(|p| {
            ok(
                ws.path(),
                &[
                    "capability",
                    "disk.csv",
                    "--model",
                    "m.toml",
                    "--spec",
                    "spec.csv",
                    "--seed",
                    "7",
                    "--n-es",
                    "50000",
                    "--partitions",
                    p,
                ],
            )
        })
        .collect();
    assert!(reports.iter().all(|r| r == &reports[0]));
    let trained = |threads: &str| {
        let out = bin()
            .current_dir(ws.path())
            .env("SVDDCAP_THREADS", threads)
            .args([
                "capability",
                "disk.csv",
                "-s",
                "1.5",
                "--spec",
                "spec.csv",
                "--seed",
                "7",
                "--n-es",
                "50000",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = trained("1");
    assert_eq!(one, trained("3"));
    assert_eq!(String::from_utf8(one).unwrap(), reports[0]);
}

#[test]
fn reversed_limits_exit_2() {
    let ws = Workspace::new();
    ws.disk(50);
    ws.file("bad.csv", "x,4,-4\ny,-4,4\n");
    let out = run(
        ws.path(),
        &["capability", "disk.csv", "--spec", "bad.csv", "-s", "1"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("lsl < usl"));
}

#[test]
fn spec_dimension_mismatch_exits_2() {
    let ws = Workspace::new();
    ws.disk(50);
    ws.file("spec3.csv", "x,-4,4\ny,-4,4\nz,0,1\n");
    let out = run(
        ws.path(),
        &["capability", "disk.csv", "--spec", "spec3.csv", "-s", "1"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn disjoint_description_exits_5() {
    let ws = Workspace::new();
    ws.disk(200);
    ws.file("far.csv", "x,100,101\ny,100,101\n");
    let out = run(
        ws.path(),
        &[
            "capability",
            "disk.csv",
            "--spec",
            "far.csv",
            "-s",
            "1",
            "--n-es",
            "1000",
        ],
    );
    assert_eq!(code(&out), 5, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[empty-intersection]: "));
}

#[test]
fn bad_thread_setting_exits_2() {
    let ws = Workspace::new();
    let out = bin()
        .current_dir(ws.path())
        .env("SVDDCAP_THREADS", "zero")
        .args(["generate", "disk"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn generate_is_deterministic() {
    let ws = Workspace::new();
    ok(
        ws.path(),
        &[
            "generate", "disk", "-n", "100", "--seed", "1", "-o", "a.csv",
        ],
    );
    ok(
        ws.path(),
        &[
            "generate", "disk", "-n", "100", "--seed", "1", "-o", "b.csv",
        ],
    );
    let a = fs::read(ws.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(ws.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 101);
}

#[test]
fn two_donut_defaults_fit_reference_box() {
    let ws = Workspace::new();
    let csv = ok(ws.path(), &["generate", "two_donut"]);
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!(
            (-10.0..=20.0).contains(&v[0]) && (-10.0..=30.0).contains(&v[1]),
            "{line}"
        );
        rows += 1;
    }
    assert_eq!(rows, 500);
}

#[test]
fn unknown_shape_lists_valid_shapes() {
    let ws = Workspace::new();
    let out = run(ws.path(), &["generate", "hexagon"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    for name in ["disk", "annulus", "boomerang", "two_donut", "box"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn generate_flags_override_config() {
    let ws = Workspace::new();
    ws.file(
        "shape.toml",
        "radius = 50.0\nn = 20\ncenter = [100.0, 100.0]\n",
    );
    let csv = ok(
        ws.path(),
        &[
            "generate",
            "disk",
            "--config",
            "shape.toml",
            "--radius",
            "0.5",
        ],
    );
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 20);
    for r in rows {
        assert!(((r[0] - 100.0).powi(2) + (r[1] - 100.0).powi(2)).sqrt() <= 0.5);
    }
}

#[test]
fn disk_plot_black_fraction_matches_area() {
    let ws = Workspace::new();
    ws.disk(2000);
    ok(ws.path(), &["train", "disk.csv", "-o", "m.toml"]);
    let out = ok(
        ws.path(),
        &[
            "plot",
            "--model",
            "m.toml",
            "--spec",
            "spec.csv",
            "--grid-resolution",
            "200",
            "-o",
            "p.svg",
        ],
    );
    let svg = fs::read_to_string(ws.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"stroke="red""#));

    // count black cell area straight from the rendered rectangles
    let cell = {
        let first = svg
            .lines()
            .find(|l| l.contains(r#"fill="black""#) || l.contains("#b0b0b0"))
            .unwrap();
        attr(first, "height")
    };
    let black: f64 = svg
        .lines()
        .filter(|l| l.contains(r#"fill="black""#))
        .map(|l| attr(l, "width") / cell)
        .sum();
    let fraction = black / 40_000.0;
    let expected = std::f64::consts::PI * 4.0 / 64.0;
    assert!(
        (fraction - expected).abs() / expected <= 0.05,
        "{fraction} vs {expected}"
    );
    assert!(out.contains("components = 1"));
}

fn attr(line: &str, name: &str) -> f64 {
    let key = format!(" {name}=\"");
    let start = line.find(&key).unwrap() + key.len();
    let end = start + line[start..].find('"').unwrap();
    line[start..end].parse().unwrap()
}

#[test]
fn single_cell_plot_is_valid_svg() {
    let ws = Workspace::new();
    ws.disk(50);
    ok(ws.path(), &["train", "disk.csv", "-s", "1", "-o", "m.toml"]);
    let svg = ok(
        ws.path(),
        &[
            "plot",
            "--model",
            "m.toml",
            "--spec",
            "spec.csv",
            "--grid-resolution",
            "1",
        ],
    );
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn two_donut_plot_has_two_components() {
    let ws = Workspace::new();
    ok(
        ws.path(),
        &[
            "generate",
            "two_donut",
            "-n",
            "600",
            "--seed",
            "4",
            "-o",
            "d.csv",
        ],
    );
    ws.file("spec.csv", "x,-10,20\ny,-10,30\n");
    ok(
        ws.path(),
        &["train", "d.csv", "-s", "2.8127912992", "-o", "m.toml"],
    );
    let out = ok(
        ws.path(),
        &[
            "plot",
            "--model",
            "m.toml",
            "--spec",
            "spec.csv",
            "--grid-resolution",
            "101",
            "--data",
            "d.csv",
            "-o",
            "p.svg",
        ],
    );
    assert!(out.contains("components = 2"), "{out}");
}

#[test]
fn plot_needs_two_variables() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b,c\n0,0,0\n1,0,1\n0,1,1\n");
    ok(ws.path(), &["train", "pts.csv", "-s", "1", "-o", "m.toml"]);
    ws.file("spec.csv", "a,-1,2\nb,-1,2\nc,-1,2\n");
    let out = run(
        ws.path(),
        &["plot", "--model", "m.toml", "--spec", "spec.csv"],
    );
    assert_eq!(code(&out), 6);
    assert!(stderr(&out).starts_with("error[plot-dimension]: "));
}

#[test]
fn standardized_model_scores_in_raw_units() {
    let ws = Workspace::new();
    ws.file("pts.csv", "a,b\n0,0\n100,0\n0,1\n100,1\n50,0.5\n");
    let out = ok(
        ws.path(),
        &[
            "train",
            "pts.csv",
            "-s",
            "1",
            "--standardize",
            "-o",
            "m.toml",
        ],
    );
    assert!(out.contains("standardized = yes"));
    ws.file("new.csv", "a,b\n50,0.5\n5000,50\n");
    let csv = ok(ws.path(), &["score", "new.csv", "--model", "m.toml"]);
    let flags: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(flags, ["0", "1"]);
}
