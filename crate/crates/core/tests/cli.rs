//! End-to-end runs of the `krein-frames` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use krein_frames::analysis::AnalysisReport;
use krein_frames::io::FrameFile;
use krein_frames::spectral::EnclosureRegion;

const RE1: &str = r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0], [0, 0]], [[1, 0], [2, 0]]]}"#;
const NOT_NEGATIVE: &str = r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0], [0, 0]], [[1, 0], [1, 0]]]}"#;
const RE1_OPERATOR: &str = r#"{"space": {"p": 1, "q": 1}, "matrix": [[[0, 0], [2, 0]], [[-2, 0], [4, 0]]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krein-frames"))
        .args(args)
        .env_remove("KREIN_FRAMES_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Scratch(tempfile::TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(path: &Path) -> AnalysisReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn real(m: &[Vec<[f64; 2]>], i: usize, j: usize) -> f64 {
    assert!(m[i][j][1].abs() < 1e-12);
    m[i][j][0]
}

#[test]
fn analyze_re1() {
    let dir = Scratch::new();
    let input = dir.file("re1.json", RE1);
    let out_report = dir.path("report.json");
    let out_svg = dir.path("re1.svg");
    let out = run(&["analyze", s(&input), "--report", s(&out_report), "--svg", s(&out_svg)]);
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    let r = report(&out_report);
    let cork = r.cork.unwrap();
    assert!((real(&cork.k, 0, 0) + 0.5).abs() < 1e-12);
    assert!((r.bounds.unwrap().alpha_minus - 3.0).abs() < 1e-12);
    assert!(r.checks.iter().all(|c| c.pass && c.tolerance.is_finite()));
    assert!(std::fs::read_to_string(out_svg).unwrap().starts_with("<svg"));
}

#[test]
fn analyze_rejects_non_jframe() {
    let dir = Scratch::new();
    let input = dir.file("bad.json", NOT_NEGATIVE);
    let out_report = dir.path("report.json");
    let out = run(&["analyze", s(&input), "--report", s(&out_report)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("R(T₋) not maximal uniformly negative"), "{}", stdout(&out));
    assert!(!report(&out_report).is_jframe);
}

#[test]
fn malformed_input_is_usage_error() {
    let dir = Scratch::new();
    let truncated = dir.file("t.json", &RE1[..40]);
    let out = run(&["analyze", s(&truncated)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("JSON"));

    let short = dir.file("short.json", r#"{"space": {"p": 1, "q": 1}, "vectors": [[[1, 0], [0, 0]], [[1, 0]]]}"#);
    let out = run(&["analyze", s(&short)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("vectors[1]"), "{}", stderr(&out));

    let re1 = dir.file("re1.json", RE1);
    assert_eq!(code(&run(&["analyze", s(&re1), "--tol", "bogus=1"])), 64);
    assert_eq!(code(&run(&["analyze", s(&re1), "--tol", "angle=1e-7"])), 0);
    assert_eq!(code(&run(&["analyze"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn generate_is_deterministic_and_reanalyzable() {
    let dir = Scratch::new();
    let (a, b) = (dir.path("a.json"), dir.path("b.json"));
    let args = |out: &Path| {
        run(&[
            "generate", "--p", "2", "--q", "1", "--nplus", "4", "--nminus", "2", "--seed", "7", "--out", s(out),
        ])
    };
    let first = args(&a);
    assert_eq!(code(&first), 0);
    assert!(stdout(&first).contains("seed 7"));
    assert_eq!(code(&args(&b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let frame = FrameFile::read(&a).unwrap();
    assert_eq!((frame.space.p, frame.space.q, frame.vectors.len()), (2, 1, 6));
    assert_eq!(code(&run(&["analyze", s(&a)])), 0);
}

#[test]
fn generate_with_zero_cap_decouples() {
    let dir = Scratch::new();
    let out_frame = dir.path("z.json");
    let out_report = dir.path("z-report.json");
    let gen = run(&[
        "generate", "--p", "2", "--q", "2", "--nplus", "3", "--nminus", "2", "--cap", "0", "--seed", "1", "--out",
        s(&out_frame),
    ]);
    assert_eq!(code(&gen), 0);
    assert_eq!(code(&run(&["analyze", s(&out_frame), "--report", s(&out_report)])), 0);
    let r = report(&out_report);
    assert!(r.cork.unwrap().k_norm < 1e-12 && r.edinburgh.unwrap().l_norm < 1e-12);
}

#[test]
fn generate_seed_from_environment_and_bad_flags() {
    let dir = Scratch::new();
    let out_frame = dir.path("env.json");
    let out = Command::new(env!("CARGO_BIN_EXE_krein-frames"))
        .args(["generate", "--p", "1", "--q", "1", "--nplus", "2", "--nminus", "1", "--out", s(&out_frame)])
        .env("KREIN_FRAMES_SEED", "4242")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("seed 4242"));

    let bad = run(&["generate", "--p", "1", "--q", "1", "--nplus", "1", "--nminus", "1", "--cap", "0.99", "--out", s(&out_frame)]);
    assert_eq!(code(&bad), 64);
    let small = run(&["generate", "--p", "2", "--q", "1", "--nplus", "1", "--nminus", "1", "--out", s(&out_frame)]);
    assert_eq!(code(&small), 64);
}

#[test]
fn enclosure_svg_and_json() {
    let dir = Scratch::new();
    let input = dir.file("re1.json", RE1);
    let svg_path = dir.path("fig.svg");
    assert_eq!(code(&run(&["enclosure", s(&input), "--svg", s(&svg_path)])), 0);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    let attr = |name: &str| -> f64 {
        let bar = svg.lines().find(|l| l.contains("real-bar")).unwrap();
        let start = bar.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        bar[start..].split('"').next().unwrap().parse().unwrap()
    };
    assert!((attr("data-lo") - 4.0 / 3.0).abs() < 1e-12 && (attr("data-hi") - 3.0).abs() < 1e-12);
    // σ(S) = {2, 2} is a Jordan block, so the computed pair is only √ε-accurate.
    let markers: Vec<f64> = svg
        .split(r#"class="eigenvalue real" data-re=""#)
        .skip(1)
        .map(|rest| rest.split('"').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(markers.len(), 2);
    assert!(markers.iter().all(|re| (re - 2.0).abs() < 1e-6), "{markers:?}");
    assert!(!svg.contains("nonreal") && svg.contains("γ⁻¹") && svg.contains("α/2"));

    let out = run(&["enclosure", s(&input)]);
    assert_eq!(code(&out), 0);
    let regions: Vec<EnclosureRegion> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(regions.len(), 4);

    let bad = dir.file("bad.json", NOT_NEGATIVE);
    assert_eq!(code(&run(&["enclosure", s(&bad)])), 2);
}

#[test]
fn synthesize_round_trip() {
    let dir = Scratch::new();
    let op = dir.file("s.json", RE1_OPERATOR);
    let out_frame = dir.path("syn.json");
    let out_report = dir.path("syn-report.json");
    let seed = (0..50)
        .map(|seed| seed.to_string())
        .find(|seed| {
            let out = run(&["synthesize", "--operator", s(&op), "--nplus", "1", "--nminus", "1", "--seed", seed, "--out", s(&out_frame)]);
            code(&out) == 0
        })
        .expect("some seed realizes the partition");
    assert!(seed.parse::<u64>().is_ok());
    assert_eq!(code(&run(&["analyze", s(&out_frame), "--report", s(&out_report)])), 0);
    let r = report(&out_report).operators.unwrap();
    let expected = [[0.0, 2.0], [-2.0, 4.0]];
    for (i, row) in expected.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((r.s[i][j][0] - v).abs() <= 4e-9 && r.s[i][j][1].abs() <= 4e-9);
        }
    }
}

#[test]
fn synthesize_identity_and_gates() {
    let dir = Scratch::new();
    let id = dir.file("id.json", r#"{"space": {"p": 2, "q": 1}, "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#);
    let out_frame = dir.path("id-frame.json");
    let out = run(&["synthesize", "--operator", s(&id), "--nplus", "2", "--nminus", "1", "--out", s(&out_frame)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let residual: f64 = stdout(&out).rsplit(' ').next().unwrap().trim().parse().unwrap();
    assert!(residual <= 1e-12);

    let neg = dir.file("neg.json", r#"{"space": {"p": 1, "q": 1}, "matrix": [[[-1,0],[0,0]],[[0,0],[1,0]]]}"#);
    assert_eq!(code(&run(&["synthesize", "--operator", s(&neg), "--nplus", "1", "--nminus", "1", "--out", s(&out_frame)])), 5);

    let not_herm = dir.file("nh.json", r#"{"space": {"p": 1, "q": 1}, "matrix": [[[1,0],[1,0]],[[1,0],[1,0]]]}"#);
    let out = run(&["synthesize", "--operator", s(&not_herm), "--nplus", "1", "--nminus", "1", "--out", s(&out_frame)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("matrix"));

    // Identity unitaries give RE1's square root, whose first column is neutral.
    let op = dir.file("s.json", RE1_OPERATOR);
    let out = run(&["synthesize", "--operator", s(&op), "--nplus", "1", "--nminus", "1", "--out", s(&out_frame)]);
    assert_eq!(code(&out), 4);
    let file = FrameFile::read(&out_frame).unwrap();
    let diag = file.diagnostics.unwrap();
    assert!(!diag.is_jframe && diag.operator_residual <= 1e-12);
}

#[test]
fn verify_smoke_and_self_test() {
    let out = run(&["verify", "--seeds", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS"));

    let out = run(&["verify", "--seeds", "2", "--sizes", "2+1", "--corrupt-tol", "0"]);
    assert_ne!(code(&out), 0);
    assert!(stderr(&out).contains("sqrt (triangular): ‖P² − S‖/‖S‖"), "{}", stderr(&out));

    assert_eq!(code(&run(&["verify", "--sizes", "2x1"])), 64);
}
