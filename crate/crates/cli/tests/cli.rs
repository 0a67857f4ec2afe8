use std::path::Path;
use std::process::{Command, Output};

use biaffine_core::io::{decode_ppm, encode_ppm};
use biaffine_core::Image;

const CENTERED: &str = r#"{"shorthand":{"O":[0.5,0.5],"Q":[0.5,0],"R":[1,0.5],"S":[0.5,1],"T":[0,0.5]}}"#;
const PERTURBED: &str = r#"{"shorthand":{"O":[0.55,0.5],"Q":[0.5,0],"R":[1,0.5],"S":[0.5,1],"T":[0,0.5]}}"#;
const FOUR_WITH_IDENTITY: &str = r#"{"maps":[{"p0":[0,0],"p1":[1,0],"p2":[1,1],"p3":[0,1]},{"p0":[0.5,0],"p1":[1,0],"p2":[1,0.5],"p3":[0.5,0.5]},{"p0":[0.5,0.5],"p1":[1,0.5],"p2":[1,1],"p3":[0.5,1]},{"p0":[0,0.5],"p1":[0.5,0.5],"p2":[0.5,1],"p3":[0,1]}]}"#;
const WITH_IDENTITY: &str = r#"{"maps":[{"p0":[0,0],"p1":[1,0],"p2":[1,1],"p3":[0,1]},{"p0":[0,0],"p1":[0.5,0],"p2":[0.5,0.5],"p3":[0,0.5]}]}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biaffine"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), CENTERED).unwrap();
    std::fs::write(dir.path().join("p.json"), PERTURBED).unwrap();
    std::fs::write(dir.path().join("id.json"), WITH_IDENTITY).unwrap();
    std::fs::write(dir.path().join("id4.json"), FOUR_WITH_IDENTITY).unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"maps\": [").unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_exit_codes() {
    let d = fixtures();
    let ok = run(d.path(), &["check", "c.json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).matches("0.500000000 0.500000000").count(), 4);
    assert_eq!(run(d.path(), &["check", "id.json"]).status.code(), Some(1));
    assert_eq!(run(d.path(), &["check", "bad.json"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["check", "missing.json"]).status.code(), Some(2));
}

#[test]
fn itinerary_output() {
    let d = fixtures();
    let o = run(
        d.path(),
        &["itinerary", "c.json", "--point", "0.25,0.25", "--depth", "6"],
    );
    assert_eq!(stdout(&o).trim(), "0.250000000 0.250000000 : 1 1 3 3 3 3");
    let o = run(
        d.path(),
        &["itinerary", "c.json", "--point", "0,0", "--depth", "5"],
    );
    assert!(stdout(&o).trim().ends_with(": 1 1 1 1 1"));
    assert_eq!(
        run(d.path(), &["itinerary", "c.json", "--point", "1.5,0.2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fold_report() {
    let d = fixtures();
    let o = run(d.path(), &["fold", "--coeffs", "0,-1,-1,0,0,-1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // x + y = 1, up to sign.
    assert!(
        text.contains("folding_line -1.000000000 -1.000000000 -1.000000000"),
        "{text}"
    );
    assert!(text.contains("focus (-0.500000000, -1.500000000)"), "{text}");
    assert_eq!(
        run(d.path(), &["fold", "c.json", "--map", "2"]).status.code(),
        Some(3)
    );
}

#[test]
fn attractor_of_quadrants_fills_the_square() {
    let d = fixtures();
    let o = run(
        d.path(),
        &[
            "attractor",
            "c.json",
            "--method",
            "iterate",
            "--k",
            "9",
            "--size",
            "64x32",
            "--out",
            "a.ppm",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let img = decode_ppm(&std::fs::read(d.path().join("a.ppm")).unwrap()).unwrap();
    assert_eq!((img.width(), img.height()), (64, 32));
    assert!(img.pixels().iter().all(|&p| p == [0, 0, 0]));
    let o = run(
        d.path(),
        &[
            "attractor",
            "p.json",
            "--n",
            "5000",
            "--out",
            "b.pgm",
            "--csv",
            "b.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let pgm = std::fs::read(d.path().join("b.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n256 256\n255\n"));
    let csv = std::fs::read_to_string(d.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4900);
}

#[test]
fn transform_identity_and_png() {
    let d = fixtures();
    let img = Image::from_fn(48, 40, |p| [(p.x * 255.0) as u8, (p.y * 255.0) as u8, 99]).unwrap();
    std::fs::write(d.path().join("in.ppm"), encode_ppm(&img)).unwrap();
    let o = run(
        d.path(),
        &[
            "transform",
            "--from",
            "p.json",
            "--to",
            "p.json",
            "--in",
            "in.ppm",
            "--out",
            "out.ppm",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("err_bound"));
    let out = decode_ppm(&std::fs::read(d.path().join("out.ppm")).unwrap()).unwrap();
    assert!(out.max_channel_diff(&img).unwrap() <= 1);
    let o = run(
        d.path(),
        &[
            "transform",
            "--from",
            "c.json",
            "--to",
            "p.json",
            "--in",
            "in.ppm",
            "--out",
            "w.png",
            "--sampling",
            "bilinear",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(
        d.path(),
        &[
            "transform",
            "--from",
            "p.json",
            "--to",
            "c.json",
            "--in",
            "w.png",
            "--out",
            "back.ppm",
            "--inverse",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(
        d.path(),
        &[
            "transform",
            "--from",
            "id4.json",
            "--to",
            "c.json",
            "--in",
            "in.ppm",
            "--out",
            "x.ppm",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let o = run(
        d.path(),
        &[
            "transform",
            "--from",
            "id.json",
            "--to",
            "c.json",
            "--in",
            "in.ppm",
            "--out",
            "x.ppm",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let d = fixtures();
    let o = run(d.path(), &["verify", "--suite", "geometry", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.contains(" PASS ")));
    let o = run(
        d.path(),
        &[
            "verify",
            "--suite",
            "section",
            "--spec",
            "c.json",
            "--samples",
            "300",
            "--depth",
            "20",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(
        d.path(),
        &[
            "verify",
            "--suite",
            "homeo",
            "--spec",
            "p.json",
            "--samples",
            "100",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(
        d.path(),
        &[
            "verify",
            "--suite",
            "contraction",
            "--spec",
            "id.json",
            "--samples",
            "5",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        run(d.path(), &["verify", "--suite", "section"]).status.code(),
        Some(2)
    );
}
