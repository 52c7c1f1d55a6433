use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pgx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgx"))
        .args(args)
        .env_remove("PGX_CATALOG_DIR")
        .output()
        .expect("run pgx")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let o = pgx(args);
    let v: Value = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)));
    assert_eq!(v["schema"], 1);
    (v, o.status.code().unwrap())
}

#[test]
fn info_on_catalog_groups() {
    let (v, code) = json(&["info", "Phi8(32)", "--p", "5", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["multiplier"], "1");
    assert_eq!(v["exterior_square"], "Z(p^2)");
    assert_eq!(v["tensor_square"], "Z(p^2)^2 x Z(p)^2");
    assert_eq!(v["capable"], false);
    assert!(v["meta"]["version"].is_string());

    let (v, _) = json(&["info", "Phi2(1^5)", "--p", "5", "--format", "json", "--no-meta"]);
    assert_eq!(v["multiplier"], "Z(p)^7");
    assert_eq!(v["capable"], true);
    assert!(v.get("meta").is_none());
}

#[test]
fn info_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let triv = dir.path().join("trivial.pc");
    std::fs::write(&triv, "generators:\n").unwrap();
    let (v, code) = json(&["info", triv.to_str().unwrap(), "--p", "5", "--json"]);
    assert_eq!(code, 0);
    for k in ["abelianization", "gamma", "multiplier", "exterior_square", "tensor_square"] {
        assert_eq!(v[k], "1", "{k}");
    }
    assert_eq!(v["capable"], true);

    let heis = dir.path().join("h.pc");
    std::fs::write(&heis, "generators: a, b, c\n[b,a] = c\na^p = 1\nb^p = 1\nc^p = 1\n").unwrap();
    let (v, _) = json(&["info", heis.to_str().unwrap(), "--p", "7", "--json"]);
    assert_eq!(v["multiplier"], "Z(p)^2");
    let o = pgx(&["info", heis.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "the file needs p for its exponents");

    let bad = dir.path().join("bad.pc");
    std::fs::write(&bad, "generators: a, b\na^5 = b\nb^5 = 1\n[b,a] = a\n").unwrap();
    assert_eq!(pgx(&["info", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tables() {
    let o = pgx(&["table", "--order", "p3", "--p", "7", "--no-meta"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 4, "{s}");
    assert!(s.starts_with("| G | G^ab | Γ(G^ab) | M(G) | G∧G | G⊗G |"));

    let o = pgx(&["table", "--order", "32", "--format", "csv", "--no-meta"]);
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "Group ID,M(G),G∧G,G⊗G,capability,epicenter");
    assert_eq!(s.lines().count(), 45);
    assert!(s.contains("\n2,Z(2)^3,"));

    let (v, _) = json(&["table", "--order", "p4", "--p", "5", "--capability", "--json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn output_is_reproducible() {
    let a = pgx(&["table", "--order", "p4", "--p", "7", "--no-meta", "--json", "--jobs", "1"]);
    let b = pgx(&["table", "--order", "p4", "--p", "7", "--no-meta", "--json", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = pgx(&["verify", "--scope", "theorem-p3p4", "--p", "5", "--no-meta"]);
    let b = pgx(&["verify", "--scope", "theorem-p3p4", "--p", "5", "--no-meta"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_passes_and_reports() {
    let (v, code) = json(&["verify", "--scope", "theorem-p3p4,table3", "--p", "5,7", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["total"], 24 + 44);
    assert_eq!(v["summary"]["fail"], 0);
    let (v, code) = json(&["verify", "--scope", "theorem-p3p4", "--p", "5", "--be-cross", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["be_cross"]["disagreements"], 0);
    assert_eq!(v["be_cross"]["rows"].as_array().unwrap().len(), 15);
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap().flatten() {
        let target = to.join(e.file_name());
        if e.path().is_dir() {
            copy_dir(&e.path(), &target);
        } else {
            std::fs::copy(e.path(), target).unwrap();
        }
    }
}

#[test]
fn mismatch_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    copy_dir(&data, dir.path());
    let f = dir.path().join("expected/theorem_p3p4.txt");
    let text = std::fs::read_to_string(&f).unwrap();
    std::fs::write(&f, text.replacen("Phi2(21) | Z(p)^2 | Z(p)^3 | 1 |", "Phi2(21) | Z(p)^2 | Z(p)^3 | Z(p) |", 1)).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pgx"))
        .args(["verify", "--scope", "theorem-p3p4", "--p", "5", "--no-meta"])
        .env("PGX_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("multiplier: expected Z(p), computed 1"), "{s}");
    assert!(s.contains("12 rows: 11 pass, 1 fail, 0 error"), "{s}");
}

#[test]
fn usage_and_resource_errors_exit_with_two() {
    assert_eq!(pgx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pgx(&["table", "--order", "p6"]).status.code(), Some(2));
    assert_eq!(pgx(&["table", "--order", "p5", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(pgx(&["info", "Phi99", "--p", "5"]).status.code(), Some(2));
    assert_eq!(pgx(&["info", "Phi2(21)", "--p", "3"]).status.code(), Some(2));
    assert_eq!(pgx(&["verify", "--scope", "table9"]).status.code(), Some(2));
    let o = pgx(&["verify", "--scope", "table3", "--timeout", "0.000001", "--no-meta"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_pgx"))
        .args(["catalog"])
        .env("PGX_CATALOG_DIR", "/nonexistent/pgx")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_listing() {
    let (v, code) = json(&["catalog", "--order", "p5", "--p", "7", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 76);
    let o = pgx(&["catalog", "--order", "243", "--no-meta", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 61);
    let (v, _) = json(&["catalog", "Phi6(221)b_1", "--p", "5", "--json"]);
    assert!(v["presentation"].as_str().unwrap().contains("a1^5 = b1^2"));
}

#[test]
fn be_check_agrees() {
    let (v, code) = json(&["be-check", "--p", "5", "--json", "--no-meta"]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    let find = |n: &str| rows.iter().find(|r| r["group"] == n).unwrap();
    let triple = |n: &str| {
        let r = find(n);
        (r["dim_x1"].as_u64().unwrap(), r["dim_x2"].as_u64().unwrap(), r["dim_x"].as_u64().unwrap())
    };
    assert_eq!(triple("Phi4(221)a"), (1, 5, 6));
    assert_eq!(triple("Phi4(221)b"), (1, 5, 5));
    assert_eq!(triple("Phi4(2111)a"), (1, 3, 4));
    assert_eq!(find("Phi5(1^5)")["standard_dimensions"], false);
    let o = pgx(&["be-check", "Phi2(41)", "--p", "5", "--no-meta"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("G/G' is not elementary abelian"));
}
