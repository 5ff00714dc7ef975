use std::path::Path;
use std::process::Command;

use pqr::cli::{run, EXIT_CAPACITY, EXIT_DECODE_FAILED, EXIT_INVALID, EXIT_NOT_FOUND, EXIT_NO_UNIQUE_CODE, EXIT_OK};
use pqr::netpbm::{Format, Raster};
use pqr::{matrix_text, render_artifact};
use pqr_core::peacock::peacock;
use pqr_core::qr::{symbol_spec, EcLevel};
use pqr_core::scanner::{scan, Policy};
use pqr_core::scene::{render_symbol, Rotation, Scene};
use serde_json::Value;

struct Run {
    code: i32,
    out: Vec<u8>,
    err: String,
}

fn pqr(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("pqr").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out,
        err: String::from_utf8(err).unwrap(),
    }
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn generate_matrix_file_has_capacity_sized_side() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(&dir, "out.txt");
    assert_eq!(
        pqr(&["generate", "--text", "EAT", "--ec", "L", "--matrix", &m]).code,
        EXIT_OK
    );
    let text = std::fs::read_to_string(&m).unwrap();
    // Three bytes fit the smallest symbol at every level.
    assert!(3 <= symbol_spec(1, EcLevel::L).unwrap().byte_capacity());
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().all(|l| l.len() == 21));
    assert!(text.ends_with('\n'));
    assert_eq!(matrix_text::parse(&text).unwrap().side(), 21);
}

#[test]
fn generate_without_outputs_prints_the_matrix() {
    let r = pqr(&["generate", "--text", "EAT"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(String::from_utf8(r.out).unwrap().lines().count(), 21);
}

#[test]
fn generate_over_capacity() {
    let long = "x".repeat(272);
    assert_eq!(pqr(&["generate", "--text", &long, "--ec", "L"]).code, EXIT_CAPACITY);
    assert_eq!(
        pqr(&["generate", "--text", &"y".repeat(8), "--ec", "H", "--version", "1"]).code,
        EXIT_CAPACITY
    );
    assert_eq!(
        pqr(&["generate", "--text", &"y".repeat(7), "--ec", "H", "--version", "1"]).code,
        EXIT_OK
    );
}

#[test]
fn generate_raster_dimensions_include_quiet_zone() {
    let dir = tempfile::tempdir().unwrap();
    for (v, scale) in [(1u8, 4usize), (3, 2), (10, 1)] {
        let p = path(&dir, &format!("v{v}.pgm"));
        let r = pqr(&[
            "generate",
            "--text",
            "dims",
            "--version",
            &v.to_string(),
            "--scale",
            &scale.to_string(),
            "--out",
            &p,
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        let bytes = std::fs::read(&p).unwrap();
        let side = (17 + 4 * v as usize + 8) * scale;
        let header = format!("P5\n{side} {side}\n255\n");
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + side * side);
    }
}

#[test]
fn generate_then_scan_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for rot in ["0", "45", "90", "-45"] {
        let p = path(&dir, "g.pgm");
        assert_eq!(
            pqr(&["generate", "--text", "hello world", "--rotate", rot, "--out", &p]).code,
            EXIT_OK
        );
        let r = pqr(&["scan", &p]);
        assert_eq!(r.code, EXIT_OK, "rot {rot}: {}", r.err);
        assert_eq!(r.out, b"hello world\n");
    }
    let b = path(&dir, "g.pbm");
    assert_eq!(pqr(&["generate", "--text", "bits", "--out", &b]).code, EXIT_OK);
    assert_eq!(Raster::read(Path::new(&b)).unwrap().format, Format::P4);
    assert_eq!(pqr(&["scan", &b]).out, b"bits\n");
}

#[test]
fn invalid_arguments_exit_4() {
    for args in [
        &["generate", "--text", "x", "--rotate", "30"][..],
        &["generate", "--text", "x", "--ec", "Z"],
        &["generate", "--text", "x", "--version", "11"],
        &["generate", "--text", "x", "--scale", "0"],
        &["generate"],
        &["scan"],
        &["scan", "f.pgm", "--policy", "random"],
        &["simulate", "--codes", "2", "--mode", "fancy"],
        &["frobnicate"],
        &[],
    ] {
        let r = pqr(args);
        assert_eq!(r.code, EXIT_INVALID, "{args:?}");
        assert!(!r.err.is_empty());
    }
    assert_eq!(pqr(&["--help"]).code, EXIT_OK);
}

#[test]
fn scan_rejects_non_netpbm_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(&dir, "note.pgm");
    std::fs::write(&p, "not an image\n").unwrap();
    assert_eq!(pqr(&["scan", &p]).code, EXIT_INVALID);
    assert_eq!(pqr(&["inspect", &p]).code, EXIT_INVALID);
    assert_eq!(pqr(&["scan", &path(&dir, "absent.pgm")]).code, EXIT_INVALID);
}

#[test]
fn scan_blank_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(&dir, "blank.pgm");
    Raster::new(Format::P5, 64, 48, 255, vec![255; 64 * 48])
        .unwrap()
        .write(Path::new(&p))
        .unwrap();
    let r = pqr(&["scan", &p, "--json"]);
    assert_eq!(r.code, EXIT_NOT_FOUND);
    let j = json(&r.out);
    assert_eq!(j["outcome"], "not_found");
    assert_eq!(j["policy"], "arbitrary");
    assert_eq!(j["seed"], 0);
    let i = pqr(&["inspect", &p]);
    assert!(String::from_utf8(i.out)
        .unwrap()
        .starts_with("finders: 0, triples: 0\n"));
}

#[test]
fn scan_of_two_codes_under_strict_is_not_unique() {
    use pqr_core::qr::generate;
    use pqr_core::scene::{grid_scene, render};
    let dir = tempfile::tempdir().unwrap();
    let p = path(&dir, "two.pgm");
    let ms = vec![
        generate(b"one", EcLevel::M, 1).unwrap(),
        generate(b"two", EcLevel::M, 1).unwrap(),
    ];
    let b = render(&grid_scene(ms, 3, Rotation::UPRIGHT)).unwrap();
    Raster::from_bitmap(&b, Format::P5).write(Path::new(&p)).unwrap();
    assert_eq!(pqr(&["scan", &p, "--policy", "strict"]).code, EXIT_NO_UNIQUE_CODE);
    let first = pqr(&["scan", &p, "--policy", "first"]);
    assert_eq!(first.code, EXIT_OK);
    // Arbitrary picks either code; the choice is fixed by the seed.
    let picks: Vec<Vec<u8>> = (0..16)
        .map(|s| pqr(&["scan", &p, "--seed", &s.to_string()]).out)
        .collect();
    assert!(picks.iter().all(|o| o == b"one\n" || o == b"two\n"));
    assert!(picks.contains(&b"one\n".to_vec()) && picks.contains(&b"two\n".to_vec()));
    assert_eq!(picks[5], pqr(&["scan", &p, "--seed", "5"]).out);
}

#[test]
fn peacock_report_carries_budget() {
    let dir = tempfile::tempdir().unwrap();
    let (out, rep) = (path(&dir, "p.pgm"), path(&dir, "r.json"));
    let r = pqr(&["peacock", "--text", "EAT", "--ec", "H", "--out", &out, "--report", &rep]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let j = json(&std::fs::read(&rep).unwrap());
    assert_eq!(j["feasible"], true);
    assert_eq!(j["certification"]["passed"], true);
    assert_eq!(j["ec"], "H");
    let v = j["version"].as_u64().unwrap() as u8;
    let spec = symbol_spec(v, EcLevel::H).unwrap();
    let blocks = j["per_block"].as_array().unwrap();
    assert_eq!(blocks.len(), spec.num_blocks());
    for (b, shape) in blocks.iter().zip(spec.blocks()) {
        let (cw, t, margin) = (
            b["codewords"].as_i64().unwrap(),
            b["capacity_t"].as_i64().unwrap(),
            b["margin"].as_i64().unwrap(),
        );
        assert_eq!(t, shape.capacity_t as i64);
        assert_eq!(margin, t - cw);
        assert!(margin >= 0);
    }
}

#[test]
fn peacock_clamps_min_version() {
    let dir = tempfile::tempdir().unwrap();
    let (out, rep) = (path(&dir, "p.pgm"), path(&dir, "r.json"));
    let r = pqr(&[
        "peacock",
        "--text",
        "EAT",
        "--min-version",
        "1",
        "--out",
        &out,
        "--report",
        &rep,
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.err.contains("warning") && r.err.contains("raised to 2"), "{}", r.err);
    assert!(json(&std::fs::read(&rep).unwrap())["version"].as_u64().unwrap() >= 2);
    let quiet = pqr(&[
        "peacock",
        "--text",
        "EAT",
        "--ec",
        "H",
        "--min-version",
        "2",
        "--out",
        &out,
    ]);
    assert!(!quiet.err.contains("raised"));
}

#[test]
fn peacock_over_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let r = pqr(&["peacock", "--text", &"z".repeat(300), "--out", &path(&dir, "p.pgm")]);
    assert_eq!(r.code, EXIT_CAPACITY);
}

#[test]
fn uncovered_peacock_output_does_not_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "p.pgm");
    assert_eq!(
        pqr(&["peacock", "--text", "https://example.org/x", "--out", &out]).code,
        EXIT_OK
    );
    let r = pqr(&["scan", &out, "--policy", "strict"]);
    assert!([EXIT_NO_UNIQUE_CODE, EXIT_DECODE_FAILED].contains(&r.code));
    for seed in 0..5 {
        assert_ne!(pqr(&["scan", &out, "--seed", &seed.to_string()]).code, EXIT_OK);
    }
    let i = String::from_utf8(pqr(&["inspect", &out]).out).unwrap();
    assert!(i.starts_with("finders: 4, triples: 4\n"), "{i}");
}

#[test]
fn peacock_diamond_raster_is_the_rotated_render() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "d.pgm");
    assert_eq!(
        pqr(&["peacock", "--text", "EAT", "--ec", "H", "--diamond", "--out", &out]).code,
        EXIT_OK
    );
    let a = peacock(b"EAT", EcLevel::H, 2).unwrap();
    let got = Raster::read(Path::new(&out)).unwrap().to_bitmap();
    assert_eq!(got, render_symbol(&a.matrix, 4, Rotation::DIAMOND, None));
    assert_eq!(got, render_artifact(&a, 4, true));
    // The envelope corner module maps to the lowest point of the render.
    let s = a.spec.side as f64;
    let place = &Scene::single(a.matrix.clone(), 4, Rotation::DIAMOND).placements[0];
    let y = |x: f64, y: f64| place.module_to_pixel(x, y).1;
    let corner = y(s, s);
    assert!([(0.0, 0.0), (s, 0.0), (0.0, s)]
        .iter()
        .all(|&(cx, cy)| y(cx, cy) < corner - 1.0));
    let dark_rows: Vec<usize> = (0..got.height())
        .filter(|&r| (0..got.width()).any(|c| got.get(c, r) == 0))
        .collect();
    let others = y(s, 0.0).max(y(0.0, s));
    assert!(*dark_rows.last().unwrap() as f64 > others + 4.0 * 7.0);
    let covered = render_symbol(&a.matrix, 4, Rotation::DIAMOND, Some((&a.distracter.envelope, 80)));
    assert_eq!(
        scan(&covered, Policy::StrictSingle, 0).outcome.payload(),
        Some(&b"EAT"[..])
    );
}

#[test]
fn inspect_plain_render() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "g.pgm");
    assert_eq!(pqr(&["generate", "--text", "census", "--out", &out]).code, EXIT_OK);
    let i = String::from_utf8(pqr(&["inspect", &out]).out).unwrap();
    assert!(i.starts_with("finders: 3, triples: 1\ndecoded: 1,"), "{i}");
}

#[test]
fn simulate_outputs() {
    let r = pqr(&["simulate", "--codes", "2", "--mode", "pqr", "--trials", "100", "--json"]);
    assert_eq!(r.code, EXIT_OK);
    let j = json(&r.out);
    assert_eq!(
        (j["trials"].as_u64(), j["target_hit"].as_u64(), j["other_hit"].as_u64()),
        (Some(100), Some(100), Some(0))
    );

    let zero = pqr(&["simulate", "--codes", "2", "--mode", "plain", "--trials", "0", "--json"]);
    assert_eq!(zero.code, EXIT_OK);
    let z = json(&zero.out);
    for k in ["trials", "target_hit", "other_hit", "none"] {
        assert_eq!(z[k], 0);
    }
    assert_eq!(z["histogram"], serde_json::json!([0, 0]));

    let args = [
        "simulate", "--codes", "3", "--mode", "plain", "--trials", "64", "--seed", "9", "--json",
    ];
    assert_eq!(pqr(&args).out, pqr(&args).out);

    let text = String::from_utf8(pqr(&["simulate", "--codes", "2", "--mode", "plain", "--trials", "10"]).out).unwrap();
    assert!(text.starts_with("trials: 10, target_hit: "));

    assert_eq!(pqr(&["simulate", "--codes", "1", "--mode", "plain"]).code, EXIT_INVALID);
    assert_eq!(
        pqr(&["simulate", "--codes", "2", "--mode", "plain", "--target", "2"]).code,
        EXIT_INVALID
    );
}

#[test]
fn binary_exit_codes_match_in_process_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "g.pgm");
    let bin = env!("CARGO_BIN_EXE_pqr");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    assert_eq!(
        status(&["generate", "--text", "bin", "--out", &out]).status.code(),
        Some(EXIT_OK)
    );
    let s = status(&["scan", &out]);
    assert_eq!((s.status.code(), s.stdout), (Some(EXIT_OK), b"bin\n".to_vec()));
    assert_eq!(
        status(&["generate", "--text", "x", "--rotate", "1"]).status.code(),
        Some(EXIT_INVALID)
    );
    assert_eq!(
        status(&["generate", "--text", &"x".repeat(400)]).status.code(),
        Some(EXIT_CAPACITY)
    );
}
