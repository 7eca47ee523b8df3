use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use clap::Parser;
use toda_cli::commands::{run, Cli, Outcome};
use toda_cli::format::{parse, serialize, to_file, System};
use toda_core::chain::{nullhomotopy_to_cone_map, ChainComplex, Cx};
use toda_core::toda_cubical::CubicalTodaSystem;
use toda_core::{GradedMap, Matrix};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/s0_d1_d1_s1.json");

fn toda(args: &[&str]) -> Outcome {
    let mut v = vec!["toda"];
    v.extend_from_slice(args);
    run(&Cli::try_parse_from(v).expect("arguments"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// S^0 -> D^1 -> D^1 -> S^1 over F_5 with the middle map 2·id.
fn classical() -> CubicalTodaSystem {
    let (p, c) = (5, 2);
    let x: Cx = Arc::new(ChainComplex::sphere(p, 0));
    let y: Cx = Arc::new(ChainComplex::disk(p, 1));
    let w: Cx = Arc::new(ChainComplex::sphere(p, 1));
    let f = GradedMap::chain_map(&x, &y, |n| if n == 0 { Matrix::identity(p, 1) } else { Matrix::zeros(p, 0, 0) })
        .unwrap();
    let g = GradedMap::identity(&y).scale(c);
    let h = GradedMap::chain_map(&y, &w, |n| {
        if n == 1 {
            Matrix::identity(p, 1)
        } else {
            Matrix::zeros(p, w.dim(n), y.dim(n))
        }
    })
    .unwrap();
    let hf = GradedMap::from_fn(&x, &y, 1, |_| Matrix::from_rows(p, &[vec![c]]).unwrap()).unwrap();
    let hg = GradedMap::from_fn(&y, &w, 1, |n| {
        if n == 0 {
            Matrix::from_rows(p, &[vec![c]]).unwrap()
        } else {
            Matrix::zeros(p, w.dim(n + 1), y.dim(n))
        }
    })
    .unwrap();
    let nulls = BTreeMap::from([
        ((1, 1), nullhomotopy_to_cone_map(&g.after(&f), &hf).unwrap()),
        ((1, 2), nullhomotopy_to_cone_map(&h.after(&g), &hg).unwrap()),
    ]);
    CubicalTodaSystem::new(1, vec![x, y.clone(), y, w], vec![f, g, h], nulls).unwrap()
}

#[test]
fn golden_file_is_current() {
    let text = serialize(&to_file(&System::Cubical(classical())));
    if std::env::var_os("TODA_BLESS").is_some() {
        std::fs::write(GOLDEN, &text).unwrap();
    }
    assert_eq!(std::fs::read_to_string(GOLDEN).unwrap(), text);
}

#[test]
fn golden_file_parses_and_validates() {
    let text = std::fs::read_to_string(GOLDEN).unwrap();
    let parsed = parse(&text).unwrap();
    match parsed.system().unwrap() {
        System::Cubical(c) => assert_eq!(c, classical()),
        System::Recursive(_) => panic!("expected a cubical system"),
    }
    assert_eq!(serialize(&parsed.file), text);
    let out = toda(&["validate", GOLDEN]);
    assert_eq!(out.code, 0, "{}", out.text);
    let out = toda(&["bracket", "--style", "both", GOLDEN]);
    assert_eq!(out.code, 0, "{}", out.text);
}

#[test]
fn golden_bracket_is_the_gluing_map() {
    let out = toda(&["--json", "bracket", "--style", "cubical", GOLDEN]);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    let t = &v["values"]["cubical"];
    assert_eq!(t["zero_on_homology"], true);
    assert_eq!(t["zero"], false);
}

#[test]
fn parse_serialize_is_identity_on_generated_files() {
    for (seed, kind) in [(1, "cubical"), (2, "recursive"), (3, "cubical")] {
        let text = toda(&["gen", "--order", "2", "--kind", kind, "--p", "5", "--seed", &seed.to_string()]).text;
        let parsed = parse(&text).unwrap();
        assert_eq!(serialize(&parsed.file), text);
        let again = serialize(&to_file(&parsed.system().unwrap()));
        assert_eq!(again, text);
    }
}

#[test]
fn empty_system_is_an_input_error() {
    let path = scratch("empty.json", "{\"schema\": 1, \"p\": 2}\n");
    let out = toda(&["validate", s(&path)]);
    assert_eq!(out.code, 2);
    assert!(out.text.contains("no system block"), "{}", out.text);
}

#[test]
fn parse_errors_are_reported_with_positions() {
    let path = scratch("syntax.json", "{\"schema\": 1,\n \"p\": 2,,}\n");
    let out = toda(&["--json", "validate", s(&path)]);
    assert_eq!(out.code, 2);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["error"]["kind"], "syntax");
    assert!(out.text.contains("line 2"), "{}", out.text);

    let golden = std::fs::read_to_string(GOLDEN).unwrap();
    let bad = golden.replacen("\"source\": \"X1\"", "\"source\": \"Y9\"", 1);
    let path = scratch("unresolved.json", &bad);
    let out = toda(&["--json", "validate", s(&path)]);
    assert_eq!(out.code, 2, "{}", out.text);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["error"]["kind"], "unresolved-reference");
}

#[test]
fn broken_nullhomotopy_reports_difference() {
    let mut c = classical();
    let bad = c.get(1, 1).unwrap().scale(2);
    // bypass `set` so the file carries the wrong homotopy
    let mut nulls = c.nullhomotopies().clone();
    nulls.insert((1, 1), bad);
    c = CubicalTodaSystem::new(1, c.objects(), c.maps().to_vec(), nulls).unwrap();
    let path = scratch("badnull.json", &serialize(&to_file(&System::Cubical(c))));
    let out = toda(&["--json", "validate", s(&path)]);
    assert_eq!(out.code, 2, "{}", out.text);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["error"]["kind"], "nullhomotopy-condition");
    assert!(!v["error"]["differences"].as_array().unwrap().is_empty());
}

#[test]
fn zero_system_brackets_agree_at_zero() {
    let p = 2;
    let x: Cx = Arc::new(ChainComplex::sphere(p, 0));
    let maps = (0..3).map(|_| GradedMap::zero(&x, &x, 0)).collect();
    let mut z = CubicalTodaSystem::new(1, vec![x.clone(), x.clone(), x.clone(), x], maps, BTreeMap::new()).unwrap();
    z.complete().unwrap().unwrap();
    let path = scratch("zero.json", &serialize(&to_file(&System::Cubical(z))));
    let out = toda(&["--json", "bracket", "--style", "both", s(&path)]);
    assert_eq!(out.code, 0, "{}", out.text);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["agreement"], true);
    assert_eq!(v["values"]["cubical"]["zero"], true);
    assert_eq!(v["values"]["recursive"]["zero"], true);
}

#[test]
fn generated_order_two_system_compares() {
    let text = toda(&["gen", "--order", "2", "--p", "2", "--seed", "7"]).text;
    let path = scratch("gen7.json", &text);
    let out = toda(&["compare", s(&path)]);
    assert_eq!(out.code, 0, "{}", out.text);
}

/// The first generated recursive system whose bracket is essential.
fn obstructed() -> PathBuf {
    for seed in 0..100u64 {
        let text = toda(&["gen", "--order", "1", "--kind", "recursive", "--p", "2", "--seed", &seed.to_string()]).text;
        let path = scratch("obstructed.json", &text);
        if toda(&["rectify", s(&path)]).code == 1 {
            return path;
        }
    }
    panic!("no obstructed system among 100 seeds");
}

#[test]
fn rectify_reports_obstruction_degree() {
    let path = obstructed();
    let out = toda(&["--json", "rectify", s(&path)]);
    assert_eq!(out.code, 1);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    let classes = v["obstruction"]["classes"].as_array().unwrap();
    assert!(!classes.is_empty());
    assert!(classes.iter().all(|c| c["degree"].is_i64() && c["rank"].as_u64().unwrap() > 0));
    let text = toda(&["rectify", s(&path)]).text;
    assert!(text.contains("in degree"), "{text}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_toda");
    let ok = Command::new(bin).args(["validate", GOLDEN]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let missing = Command::new(bin).args(["validate", "/nonexistent/file.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let path = obstructed();
    let bad = Command::new(bin).args(["rectify", s(&path)]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn cube_cap_is_an_input_error() {
    let out = toda(&["--max-cube", "1", "gen", "--order", "2"]);
    assert_eq!(out.code, 2);
    let path = scratch("gen_cap.json", &toda(&["gen", "--order", "2", "--seed", "1"]).text);
    assert_eq!(toda(&["--max-cube", "1", "compare", s(&path)]).code, 2);
}

#[test]
fn mismatched_p_is_rejected() {
    assert_eq!(toda(&["--p", "3", "validate", GOLDEN]).code, 2);
}
