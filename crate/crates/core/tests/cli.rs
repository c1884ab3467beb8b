use std::path::Path;

use dsm_lab::cli::{run_subcommand, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use dsm_lab::scan::{encode, ppm_bytes, render_ppm, scan_tongues, ScanConfig};
use serde_json::Value;

const RECORD_KEYS: [&str; 12] = [
    "a", "b", "period", "type_k", "lambda", "nu", "xi_re", "xi_im", "t_lower", "t_star", "t_upper", "status",
];

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dsm").chain(args.iter().copied());
    let code = run_subcommand(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

/// Same shape, numbers equal within `tol`.
fn assert_json_close(got: &Value, want: &Value, tol: f64, at: &str) {
    match (got, want) {
        (Value::Number(g), Value::Number(w)) => {
            let (g, w) = (g.as_f64().unwrap(), w.as_f64().unwrap());
            assert!((g - w).abs() <= tol, "{at}: {g} vs {w}");
        }
        (Value::Array(g), Value::Array(w)) => {
            assert_eq!(g.len(), w.len(), "{at}: length");
            for (i, (g, w)) in g.iter().zip(w).enumerate() {
                assert_json_close(g, w, tol, &format!("{at}[{i}]"));
            }
        }
        (Value::Object(g), Value::Object(w)) => {
            let gk: Vec<_> = g.keys().collect();
            let wk: Vec<_> = w.keys().collect();
            assert_eq!(gk, wk, "{at}: keys");
            for (k, w) in w {
                assert_json_close(&g[k], w, tol, &format!("{at}.{k}"));
            }
        }
        _ => assert_eq!(got, want, "{at}"),
    }
}

fn check_golden(args: &[&str], file: &str, code: i32) {
    let (c, out, _) = run(args);
    assert_eq!(c, code, "{args:?}");
    let got: Value = serde_json::from_str(out.trim()).unwrap();
    let want: Value = serde_json::from_str(golden(file).trim()).unwrap();
    assert_json_close(&got, &want, 1e-9, file);
}

#[test]
fn golden_single_result_commands() {
    check_golden(&["classify", "--a", "0.5", "--b", "0.75"], "classify.json", EXIT_OK);
    check_golden(&["uniformize", "--a", "0.5", "--b", "0.75"], "uniformize.json", EXIT_OK);
    check_golden(&["invert", "--xi-re", "-0.2", "--xi-im", "0"], "invert.json", EXIT_OK);
    check_golden(&["superattracting", "--q", "2"], "superattracting_q2.json", EXIT_OK);
    check_golden(&["classify", "--a", "0.5", "--b", "1.5"], "invalid.json", EXIT_DOMAIN);
}

#[test]
fn golden_dimension() {
    check_golden(&["dimension", "--a", "0.5", "--b", "0.75"], "dimension.json", EXIT_OK);
}

#[test]
fn record_keys_are_stable() {
    for cmd in ["classify", "uniformize"] {
        let (_, out, _) = run(&[cmd, "--a", "0.43", "--b", "0.9"]);
        // Key order is checked on the raw text; `Value` maps are sorted.
        let at: Vec<usize> = RECORD_KEYS
            .iter()
            .map(|k| {
                out.find(&format!("\"{k}\":"))
                    .unwrap_or_else(|| panic!("{cmd}: missing {k}"))
            })
            .collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]), "{cmd}: {out}");
    }
}

#[test]
fn classify_closed_form_point() {
    let (code, out, _) = run(&["classify", "--a", "0.5", "--b", "0.75"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["period"], 1);
    assert!((v["lambda"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["nu"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    assert_eq!(v["status"], "ok");
}

#[test]
fn superattracting_q1_literal() {
    let (code, out, _) = run(&["superattracting", "--q", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r#"[{"a":-0.5,"type_k":0}]"#);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--a", "0.1", "--b", "0.9", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["classify", "--a", "0.1"]).0, EXIT_USAGE);
    assert_eq!(run(&["superattracting", "--q", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);

    let (code, out, err) = run(&["uniformize", "--a", "0.1", "--b", "-0.2"]);
    assert_eq!(code, EXIT_DOMAIN);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "invalid_parameter");
    assert!(!err.is_empty());

    // Below b = 1/2 nothing attracts, so there is no Xi to report.
    let (code, out, _) = run(&["uniformize", "--a", "0.1", "--b", "0.3"]);
    assert_eq!(code, EXIT_DOMAIN);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "no_attracting_cycle");
}

#[test]
fn invert_undoes_uniformize() {
    for (a, b) in [(0.43, 0.9), (0.1028, 0.95), (-0.43, 0.9)] {
        let (code, out, _) = run(&["uniformize", "--a", &a.to_string(), "--b", &b.to_string()]);
        assert_eq!(code, EXIT_OK, "({a}, {b})");
        let u: Value = serde_json::from_str(out.trim()).unwrap();
        let xr = u["xi_re"].as_f64().unwrap().to_string();
        let xi = u["xi_im"].as_f64().unwrap().to_string();
        let (code, out, err) = run(&[
            "invert",
            "--seed-a",
            &a.to_string(),
            "--seed-b",
            &b.to_string(),
            "--xi-re",
            &xr,
            "--xi-im",
            &xi,
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        let da = (v["a"].as_f64().unwrap() - u["a"].as_f64().unwrap()).abs();
        let db = (v["b"].as_f64().unwrap() - b).abs();
        assert!(da < 1e-6 && db < 1e-6, "({a}, {b}): {da:e} {db:e}");
    }
}

#[test]
fn ray_on_symmetry_line() {
    let (code, out, _) = run(&["ray", "--nu", "1.5707963267948966", "--lambdas", "0.6,0.4,0.2"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 3);
    for (p, lam) in pts.iter().zip([0.6, 0.4, 0.2]) {
        assert!((p["a"].as_f64().unwrap() + 0.5).abs() < 1e-6);
        assert!((p["b"].as_f64().unwrap() - (1.0 - lam / 2.0)).abs() < 1e-6);
    }
}

#[test]
fn ppm_format_contract() {
    let bytes = ppm_bytes(2, 1, &[0, encode(1, 0)]);
    let header = b"P6\n2 1\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 6);
    assert_eq!(&bytes[header.len()..header.len() + 3], &[0, 0, 0]);
    assert_ne!(&bytes[header.len() + 3..], &[0, 0, 0]);
}

fn small_config(workers: usize) -> ScanConfig {
    ScanConfig {
        a_min: -0.5,
        a_max: 0.5,
        b_min: 0.0,
        b_max: 1.0,
        width: 60,
        height: 40,
        q_max: 6,
        workers,
    }
}

#[test]
fn scan_is_deterministic_across_workers() {
    let one = scan_tongues(&small_config(1)).unwrap();
    let three = scan_tongues(&small_config(3)).unwrap();
    let again = scan_tongues(&small_config(0)).unwrap();
    assert_eq!(one.codes, three.codes);
    assert_eq!(one.hash, three.hash);
    assert_eq!(one.hash, again.hash);

    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let (f1, f2) = (dir.join("one.ppm"), dir.join("three.ppm"));
    render_ppm(&one, &f1).unwrap();
    render_ppm(&three, &f2).unwrap();
    assert_eq!(std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
}

#[test]
fn scan_subcommand_writes_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = dir.join("fig.ppm");
    let (code, stdout, _) = run(&[
        "scan",
        "--width",
        "30",
        "--height",
        "20",
        "--qmax",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["status"], "ok");
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"P6\n30 20\n255\n"));
    assert_eq!(bytes.len(), b"P6\n30 20\n255\n".len() + 30 * 20 * 3);
}

#[test]
fn dimension_field_round_trips_through_smoothness() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let csv = dir.join("field.csv");
    let (code, stdout, err) = run(&[
        "dimension-field",
        "--amin",
        "0.5",
        "--amax",
        "0.5",
        "--bmin",
        "0.7",
        "--bmax",
        "0.8",
        "--nb",
        "8",
        "--tol",
        "1e-3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["rows"], 8);
    assert_eq!(v["ok_rows"], 8);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), dsm_lab::thermo::DIMENSION_CSV_HEADER);
    assert_eq!(text.lines().count(), 9);

    let (code, stdout, err) = run(&["smoothness", "--input", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["samples"], 8);

    let (code, _, _) = run(&["smoothness", "--input", "/nonexistent/field.csv"]);
    assert_eq!(code, EXIT_DOMAIN);
}
