use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exodromy::exit::ExitPresentationJson;
use exodromy::ExitPresentation;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn exodromy<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exodromy")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = exodromy(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = exodromy(args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn c(name: &str) -> String {
    corpus(name).to_str().unwrap().to_owned()
}

#[test]
fn build_reports_marks() {
    let dir = tempfile::tempdir().unwrap();
    for (file, counts) in [
        ("circle_refined.json", "4 elements, 4 Hasse edges, 0 marked"),
        ("circle_coarse.json", "4 elements, 4 Hasse edges, 1 marked"),
        ("simplex1.json", "3 elements, 2 Hasse edges, 0 marked"),
    ] {
        let out = dir.path().join(file);
        let text = ok(&["build", &c(file), "--out", out.to_str().unwrap()]);
        assert!(text.ends_with(&format!("{counts}\n")), "{text}");
    }
}

#[test]
fn build_output_is_a_fixed_point() {
    for file in ["circle_coarse.json", "rp2.json", "bondal_ruan_stub.json"] {
        let text = ok(&["build", &c(file)]);
        let json: ExitPresentationJson = serde_json::from_str(&text).unwrap();
        let pres = ExitPresentation::from_json(&json).unwrap();
        let again = serde_json::to_string_pretty(&pres.to_json()).unwrap() + "\n";
        assert_eq!(again, text);
        // and feeding it back through a no-op restriction reproduces it
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, &text).unwrap();
        let all = pres.base().names().join(",");
        assert_eq!(ok(&["restrict", path.to_str().unwrap(), "--to", &all]), text);
    }
}

#[test]
fn malformed_inputs_exit_2_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"vertices\": [\"a\", \"b\"],\n  \"faces\": [[\"a\"], [\"a\", \"b\"]]\n}\n").unwrap();
    let (status, err) = code(&["build", bad.to_str().unwrap()]);
    assert_eq!(status, 2);
    assert!(err.contains("bad.json:2: face set is not closed under subsets: `b` is missing"), "{err}");

    std::fs::write(&bad, "{\n  \"vertices\": [\"a\",\n").unwrap();
    let (status, err) = code(&["build", bad.to_str().unwrap()]);
    assert_eq!(status, 2);
    assert!(err.contains("bad.json:3:"), "{err}");

    let (status, _) = code(&["build", &c("circle_coarse.json"), "--bogus"]);
    assert_eq!(status, 2);
    let (status, _) = code(&["hocat", &c("circle_coarse.json"), "--depth", "1"]);
    assert_eq!(status, 2);
    let (status, _) = code(&["count", &c("point.json"), "--q", "2", "--dims", "1", "--budget", "0"]);
    assert_eq!(status, 2);
}

#[test]
fn hocat_of_the_circle() {
    let text = ok(&["hocat", &c("circle_coarse.json"), "--depth", "6"]);
    assert_eq!(text.lines().next().unwrap(), "3 skeletal objects; hom(k→r)=2; certified");
    assert!(text.contains("isomorphic: b ≅ y\n"));
    let text = ok(&["hocat", &c("circle_refined.json")]);
    assert!(text.starts_with("4 skeletal objects; all hom-sets of size ≤ 1; certified\n"));
    for line in text.lines().skip_while(|l| *l != "hom-sets:").skip(1) {
        assert!(line.ends_with(": 1"), "{line}");
    }
}

#[test]
fn uncertified_hocat_exits_3_only_when_required() {
    let out = exodromy(&["hocat", &c("circle_point.json")]);
    assert!(out.status.success());
    let out = exodromy(&["hocat", &c("circle_point.json"), "--require-certified"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("uncertified at depth 8"), "{text}");
}

#[test]
fn dot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let shape = dir.path().join("shape.dot");
    let out = dir.path().join("p.json");
    ok(&["build", &c("circle_coarse.json"), "--out", out.to_str().unwrap(), "--dot", shape.to_str().unwrap()]);
    let dot = std::fs::read_to_string(&shape).unwrap();
    assert!(dot.contains("\"y\" -> \"b\" [style=dashed];"), "{dot}");
    assert!(dot.contains("\"k\" -> \"b\";"));
    let hocat = dir.path().join("hocat.dot");
    ok(&["hocat", &c("circle_coarse.json"), "--dot", hocat.to_str().unwrap()]);
    assert!(std::fs::read_to_string(&hocat).unwrap().starts_with("digraph hocat {"));
}

#[test]
fn invariants_reports() {
    let text = ok(&["invariants", &c("circle_coarse.json")]);
    assert!(text.contains("env homology (Z): H0=Z, H1=Z\n"), "{text}");
    assert_eq!(text.matches("; acyclic").count(), 3);
    assert!(text.ends_with("conservative: yes\n"));
    let text = ok(&["invariants", &c("torus_product.json")]);
    assert!(text.contains("H0=Z, H1=Z^2, H2=Z\n"), "{text}");
    let text = ok(&["invariants", &c("point.json")]);
    assert!(text.contains("env homology (Z): H0=Z\n"));
    let text = ok(&["invariants", &c("rp2.json"), "--field", "2"]);
    assert!(text.contains("env homology (F2): H0=1, H1=1, H2=1\n"));
    let text = ok(&["invariants", &c("rp2.json")]);
    assert!(text.contains("env homology (Z): H0=Z, H1=Z/2\n"));
    let text = ok(&["invariants", &c("circle_point.json")]);
    assert!(text.ends_with("conservative: unknown (localization uncertified at depth 8)\n"));
}

#[test]
fn check_rep_verdicts() {
    let text = ok(&["check-rep", &c("constant_circle.json")]);
    assert!(text.contains("constructible: yes\n"));
    let text = ok(&["check-rep", &c("jstar_circle.json"), "--recollement", "p2"]);
    assert!(text.contains("constructible: no; marked edges not inverted: y→b\n"), "{text}");
    assert!(text.ends_with("reassembly: exact\n"));
    let (status, err) = code(&["check-rep", &c("noncommuting_square.json")]);
    assert_eq!(status, 2);
    assert!(err.contains("give different maps"), "{err}");
    // read against the refined stratification, the j_* fixture has no marks to fail
    let text = ok(&["check-rep", &c("circle_refined.json"), &c("jstar_circle.json")]);
    assert!(text.contains("constructible: yes\n"));
    let (status, _) = code(&["check-rep", &c("jstar_circle.json"), "--recollement", "p0"]);
    assert_eq!(status, 2);
}

#[test]
fn count_tables() {
    let csv = ok(&["count", &c("triangle.json"), "--q", "2", "--dims", "1,1,1"]);
    assert_eq!(csv, "dims,q,functors,classes,cardinality,group_order\nk=1 b=1 r=1,2,8,8,8,1\n");
    let json = ok(&["count", &c("point.json"), "--q", "3", "--dims", "v=1", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(rows[0]["cardinality"], "1/2");
    let (status, err) = code(&["count", &c("triangle.json"), "--q", "2", "--dims", "5,5,5"]);
    assert_eq!(status, 4, "{err}");
    let (status, _) = code(&["count", &c("triangle.json"), "--q", "4", "--dims", "1,1,1"]);
    assert_eq!(status, 2);
    let (status, _) = code(&["count", &c("triangle.json"), "--q", "2", "--dims", "1,1"]);
    assert_eq!(status, 2);
}

#[test]
fn restrict_coarsen_product() {
    let text = ok(&["restrict", &c("circle_coarse.json"), "--to", "p1"]);
    let pres = ExitPresentation::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(pres.shape().names(), ["b", "y"]);
    assert_eq!(pres.mark_names(), vec![("y".to_string(), "b".to_string())]);
    let (status, err) = code(&["restrict", &c("circle_coarse.json"), "--to", "p0,p2"]);
    assert_eq!(status, 2);
    assert!(err.contains("not locally closed"), "{err}");

    let text = ok(&["coarsen", &c("circle_refined.json"), "--map", "b=pt,k=pt,r=pt,y=pt"]);
    let pres = ExitPresentation::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(pres.marks().len(), 4);
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.json");
    std::fs::write(&map, r#"{"assignment": {"p0": "lo", "p1": "lo", "p2": "hi"}}"#).unwrap();
    let text = ok(&["coarsen", &c("circle_coarse.json"), "--map", map.to_str().unwrap()]);
    let pres = ExitPresentation::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(pres.marks().len(), 2);

    let text = ok(&["product", &c("circle_coarse.json"), &c("circle_coarse.json")]);
    assert_eq!(text, std::fs::read_to_string(corpus("torus_product.json")).unwrap());
}

#[test]
fn commands_are_deterministic() {
    let runs: Vec<Vec<String>> = vec![
        vec!["build".into(), c("bondal_ruan_stub.json")],
        vec!["hocat".into(), c("torus_product.json"), "--json".into()],
        vec!["invariants".into(), c("bondal_ruan_stub.json")],
        vec!["count".into(), c("circle_coarse.json"), "--q".into(), "3".into(), "--dims".into(), "1,1,1,1".into(), "--format".into(), "json".into()],
        vec!["check-rep".into(), c("jstar_circle.json"), "--recollement".into(), "p1,p2".into()],
    ];
    for args in runs {
        let a = exodromy(&args);
        let b = exodromy(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
