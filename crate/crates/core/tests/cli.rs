use orbinv_core::corpus::CorpusElement;
use orbinv_core::linalg::Mat;
use orbinv_core::FiniteField;
use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn orbinv(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_orbinv")).args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(&text).expect("stdout is JSON") };
    (v, code)
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn invariants_of_uniformizer() {
    let (v, code) = orbinv(&["invariants", "--q", "3", "--poly", "x^2 - T"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    let r = &v["result"];
    assert_eq!((r["e"].as_i64(), r["f"].as_i64(), r["c_F"].as_i64()), (Some(2), Some(1), Some(0)));
    assert_eq!(r["eta_G"], "1");
    assert_eq!(r["mu"], "1");
    assert_eq!(r["classification"]["quasi_regular_elliptic"], true);
}

#[test]
fn eta_and_mu_commands_agree_with_invariants() {
    let args = ["--q", "2", "--poly", "x^2 + T^3"];
    let (inv, _) = orbinv(&[&["invariants"], &args[..]].concat());
    let (eta, c1) = orbinv(&[&["eta"], &args[..]].concat());
    let (mu, c2) = orbinv(&[&["mu"], &args[..]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(eta["result"]["eta_G_exp"], inv["result"]["eta_G_exp"]);
    assert_eq!(mu["result"]["mu_exp"], inv["result"]["mu_exp"]);
    assert_eq!(eta["result"]["eta_G_exp"], mu["result"]["mu_exp"]);
}

#[test]
fn quasi_regular_block_invariants() {
    let (v, code) = orbinv(&["invariants", "--q", "3", "--poly", "(x^2 - T)*(x - 1)"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["kind"], "quasi_regular");
    assert_eq!(v["result"]["blocks"].as_array().unwrap().len(), 2);
    let (_, code) = orbinv(&["mu", "--q", "3", "--poly", "(x^2 - T)*(x - 1)"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_eta_mu_is_deterministic() {
    let args = ["verify-eta-mu", "--q", "2", "--N", "2", "--count", "50", "--seed", "7"];
    let (a, code) = orbinv(&args);
    assert_eq!(code, 0);
    assert_eq!(a["result"]["violations"], 0);
    assert_eq!(a["config"]["seed"], 7);
    let (b, _) = orbinv(&args);
    assert_eq!(a, b);
}

#[test]
fn mass_formula_tame_sums() {
    let (v, code) = orbinv(&["mass-formula", "--q", "3", "--n", "2", "--precision", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["sum_totally_ramified"], "2");
    assert_eq!(v["result"]["weighted_sum"], "1");
    assert_eq!(v["result"]["tame_exact"], true);
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let (v, code) = orbinv(&["classify", "--q", "3", "--poly", "x^2 +"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (2, Some("Parse")));
    let (_, code) = orbinv(&["invariants", "--q", "3", "--matrix", r#"[["1","0"],["0","1"]]"#]);
    assert_eq!(code, 2);
    let (_, code) = orbinv(&["classify", "--poly", "x - 1"]);
    assert_eq!(code, 2);
    let (_, code) = orbinv(&["no-such-command"]);
    assert_eq!(code, 2);
    let (v, code) = orbinv(&["invariants", "--q", "3", "--poly", "x^2 + O(T)", "--work", "4", "--max-work", "4"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (3, Some("InsufficientPrecision")));
    let (v, code) = orbinv(&["mass-formula", "--q", "2", "--n", "4", "--precision", "12", "--budget", "10"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (3, Some("BudgetExceeded")));
}

#[test]
fn corpus_round_trips() {
    let (v, code) = orbinv(&["corpus", "gen", "--q", "3", "--N", "3", "--count", "8", "--seed", "5"]);
    assert_eq!(code, 0);
    let els: Vec<CorpusElement> = serde_json::from_value(v["result"]["elements"].clone()).unwrap();
    assert_eq!(els.len(), 8);
    let f = FiniteField::from_order(3).unwrap();
    for el in &els {
        let m = el.matrix(&f).unwrap();
        assert_eq!(m.to_texts(), el.gamma);
        assert_eq!(m.char_poly().to_text(), el.chi);
        let back: CorpusElement = serde_json::from_str(&serde_json::to_string(el).unwrap()).unwrap();
        assert_eq!(&back, el);
    }
    // the printed matrix parses back through the CLI
    let text = serde_json::to_string(&els[0].gamma).unwrap();
    let (c, code) = orbinv(&["classify", "--q", "3", "--matrix", &text]);
    assert_eq!(code, 0);
    assert_eq!(c["result"]["char_poly"], els[0].chi.as_str());
    let m = Mat::parse(&f, &els[0].gamma).unwrap();
    assert!(m.is_exact());
}

#[test]
fn csv_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_orbinv"))
        .args(["corpus", "gen", "--q", "2", "--N", "2", "--count", "4", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "chi"));
    assert_eq!(rdr.records().count(), 4);
}

#[test]
fn stratum_verify_files() {
    let (v, code) = orbinv(&["stratum", "verify", "--input", &data("stratum_uniformizer.json")]);
    assert_eq!(code, 0, "{v}");
    let fl = &v["result"]["flags"];
    assert_eq!((fl["pure"].as_bool(), fl["simple"].as_bool(), fl["k0"].as_i64()), (Some(true), Some(true), Some(1)));
    let (v, code) = orbinv(&["stratum", "verify", "--input", &data("stratum_standard.json")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["flags"]["simple"], true);
    assert_eq!(v["result"]["char_poly_mod_p"], serde_json::json!([1, 0, 1]));
}

#[test]
fn approx_run_file() {
    let (v, code) = orbinv(&["approx", "run", "--input", &data("approx_q3.json")]);
    assert_eq!(code, 0, "{v}");
    let r = &v["result"];
    assert_eq!(r["verification"]["valid"], true);
    assert!(r["approximation"]["residual_level"].as_i64().unwrap() >= 24);
    assert_eq!(r["n"], 1);
    assert_eq!(r["k0"], -1);
}

#[test]
fn coefficient_list_input() {
    let (a, _) = orbinv(&["invariants", "--q", "3", "--poly", "x^2 - T"]);
    let (b, code) = orbinv(&["invariants", "--q", "3", "--poly", r#"["-T", "0", "1"]"#]);
    assert_eq!(code, 0);
    assert_eq!(a["result"], b["result"]);
}
