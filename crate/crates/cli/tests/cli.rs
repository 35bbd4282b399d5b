use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coherence_cli::io::{read_json, to_json, ChannelFile, StateFile};
use coherence_core::channels::is_partial_incoherent_channel;
use coherence_core::LuedersMeasurement;
use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coherence")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn measure_value(report: &Value, name: &str) -> f64 {
    report["measures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["measure"] == name)
        .unwrap_or_else(|| panic!("no {name} row"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn measure_bell_plus_and_diag() {
    let out = run(&["measure", "--state", &fixture("bell.json"), "--basis", "computational"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((measure_value(&r, "partial_skew") - 0.5).abs() < 1e-9);
    assert!((measure_value(&r, "partial_qfi") - 0.5).abs() < 1e-9);

    let r = json(&run(&["measure", "--state", &fixture("plus.json")]));
    assert!((measure_value(&r, "l1") - 1.0).abs() < 1e-9);
    assert!((measure_value(&r, "rel_entropy") - 1.0).abs() < 1e-9);
    assert!((measure_value(&r, "skew") - 0.5).abs() < 1e-9);
    assert_eq!(r["measures"].as_array().unwrap().len(), 4, "partial measures need a bipartite state");

    let r = json(&run(&["measure", "--state", &fixture("diag.json")]));
    let rows = r["measures"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert!(row["value"].as_f64().unwrap().abs() < 1e-12, "{row}");
    }
}

#[test]
fn measure_bases_and_csv() {
    let hadamard = fixture("hadamard_basis.json");
    let by_file = json(&run(&["measure", "--state", &fixture("plus.json"), "--basis", &hadamard]));
    let by_angles = json(&run(&[
        "measure",
        "--state",
        &fixture("plus.json"),
        "--basis",
        "angles:1.5707963267948966,0",
    ]));
    for name in ["l1", "rel_entropy", "skew", "qfi"] {
        assert!(measure_value(&by_file, name).abs() < 1e-9, "{name} of |+> in its own basis");
        assert!(measure_value(&by_angles, name).abs() < 1e-9, "{name} via angles");
    }

    let out = run(&["measure", "--state", &fixture("bell.json"), "--measures", "l1,partial_skew", "--format", "csv", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "measure,value,basis_tag,dims,seed");
    assert_eq!(lines.len(), 3);
    let l1: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(l1[0], "l1");
    assert!((l1[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(&l1[3..], ["2x2", "4"]);
    assert!(lines[2].starts_with("partial_skew,"));
}

#[test]
fn measure_bad_input_exits_1() {
    assert_eq!(run(&["measure", "--state", "/nonexistent/state.json"]).status.code(), Some(1));
    assert_eq!(run(&["measure", "--state", &fixture("identity_channel.json")]).status.code(), Some(1));
    assert_eq!(run(&["measure", "--state", &fixture("plus.json"), "--measures", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["measure", "--state", &fixture("bell.json"), "--basis", "angles:1"]).status.code(), Some(1));
    assert_eq!(run(&["measure"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let not_psd = dir.path().join("bad.json");
    std::fs::write(&not_psd, r#"{"dims":[2],"matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#).unwrap();
    let out = run(&["measure", "--state", not_psd.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive"));
}

#[test]
fn discord_bell_product_and_determinism() {
    let out = run(&["discord", "--state", &fixture("bell.json"), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let value = r["value"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 1e-6);
    assert!((r["oracle_value"].as_f64().unwrap() - value).abs() < 1e-6);
    assert_eq!(r["argmin_basis"].as_array().unwrap().len(), 2);
    assert!(r["starts_converged"].as_u64().unwrap() >= 1);

    let r = json(&run(&["discord", "--state", &fixture("product.json")]));
    assert!(r["value"].as_f64().unwrap() <= 1e-6);

    let a = run(&["discord", "--state", &fixture("partial_incoherent.json"), "--seed", "11", "--starts", "6"]);
    let b = run(&["discord", "--state", &fixture("partial_incoherent.json"), "--seed", "11", "--starts", "6"]);
    assert_eq!(a.stdout, b.stdout);

    assert_eq!(run(&["discord", "--state", &fixture("bell.json"), "--starts", "0"]).status.code(), Some(1));
    assert_eq!(run(&["discord", "--state", &fixture("bell.json"), "--tol", "-1"]).status.code(), Some(1));
}

#[test]
fn convert_saturation_noncreation_identity() {
    let out = run(&["convert", "--state", &fixture("plus_tensor_zero.json"), "--channel", "cnot"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let c_in = r["input"]["partial_skew"].as_f64().unwrap();
    let q_out = r["output"]["discord"].as_f64().unwrap();
    assert!((c_in - 0.5).abs() < 1e-6 && (q_out - 0.5).abs() < 1e-6, "{r}");
    assert_eq!(r["theorem1_satisfied"], true);

    let r = json(&run(&["convert", "--state", &fixture("partial_incoherent.json"), "--channel", "cnot"]));
    assert!(r["output"]["discord"].as_f64().unwrap() <= 1e-6);
    assert!(r["input"]["partial_skew"].as_f64().unwrap().abs() < 1e-12);

    let r = json(&run(&["convert", "--state", &fixture("bell.json"), "--channel", &fixture("identity_channel.json")]));
    assert_eq!(r["input"], r["output"]);
}

#[test]
fn convert_rejects_coherent_channel() {
    let out = run(&["convert", "--state", &fixture("bell.json"), "--channel", &fixture("hadamard_a_channel.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual"));
    assert_eq!(run(&["convert", "--state", &fixture("bell.json"), "--channel", &fixture("plus.json")]).status.code(), Some(1));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--suite", "theorem1", "--trials", "40", "--dims", "2,2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["suite"], "theorem1");
    assert_eq!(r["violations"], 0);
    assert_eq!(r["trials"], 40);

    let out = run(&["verify", "--suite", "cf_monotonicity_search", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "theorem1", "--dims", "2"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "theorem1", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "theorem1", "--tol", "nan"]).status.code(), Some(1));
}

#[test]
fn verify_proved_suite_violation_exits_2() {
    // The flagged-mixture equality fails on these instances; see the README.
    let out = run(&["verify", "--suite", "eq5_flag", "--trials", "20", "--seed", "1"]);
    let r = json(&out);
    assert!(r["violations"].as_u64().unwrap() > 0);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_is_deterministic() {
    let args = ["verify", "--suite", "all", "--trials", "3", "--seed", "1"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let reports = json(&a);
    assert_eq!(reports.as_array().unwrap().len(), 12);
}

#[test]
fn random_files_validate_and_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).display().to_string();

    assert_eq!(run(&["random", "--kind", "pure", "--dims", "4", "--seed", "5", "--out", &path("p.json")]).status.code(), Some(0));
    let pure = read_json::<StateFile>(Path::new(&path("p.json"))).unwrap().to_state().unwrap();
    assert!((pure.state().purity() - 1.0).abs() < 1e-10);
    let rank = pure.state().eigenvalues().iter().filter(|&&l| l > 1e-10).count();
    assert_eq!(rank, 1);

    let args = ["random", "--kind", "partial-incoherent-channel", "--dims", "2,2", "--seed", "9"];
    assert_eq!(run(&[&args[..], &["--out", &path("c1.json")]].concat()).status.code(), Some(0));
    assert_eq!(run(&[&args[..], &["--out", &path("c2.json")]].concat()).status.code(), Some(0));
    assert_eq!(std::fs::read(path("c1.json")).unwrap(), std::fs::read(path("c2.json")).unwrap());
    let ch = read_json::<ChannelFile>(Path::new(&path("c1.json"))).unwrap().to_channel().unwrap();
    assert!(is_partial_incoherent_channel(&ch, &LuedersMeasurement::computational(2, 2), 1e-9));

    for (kind, dims) in [("mixed", "2,3"), ("incoherent-channel", "3")] {
        assert_eq!(run(&["random", "--kind", kind, "--dims", dims, "--out", &path("x.json")]).status.code(), Some(0));
    }
    assert_eq!(run(&["random", "--kind", "incoherent-channel", "--dims", "2,2", "--out", &path("x.json")]).status.code(), Some(1));
    assert_eq!(run(&["random", "--kind", "pure", "--dims", "2", "--out", "/nonexistent/dir/x.json"]).status.code(), Some(1));
}

fn assert_round_trip(path: &PathBuf, state: bool) {
    let first = std::fs::read_to_string(path).unwrap();
    let again = if state {
        let s = read_json::<StateFile>(path).unwrap();
        to_json(&StateFile::from_state(&s.to_state().unwrap())).unwrap()
    } else {
        let c = read_json::<ChannelFile>(path).unwrap();
        to_json(&ChannelFile::from_channel(&c.to_channel().unwrap())).unwrap()
    };
    assert_eq!(first, again, "{}", path.display());
}

#[test]
fn emitted_files_round_trip_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (i, (kind, dims)) in [("pure", "2,2"), ("mixed", "3"), ("mixed", "2,3"), ("incoherent-channel", "3"), ("partial-incoherent-channel", "2,3")]
        .into_iter()
        .enumerate()
    {
        let p = dir.path().join(format!("{i}.json"));
        assert_eq!(run(&["random", "--kind", kind, "--dims", dims, "--seed", "2", "--out", p.to_str().unwrap()]).status.code(), Some(0));
        assert_round_trip(&p, !kind.ends_with("channel"));
    }

    // Reports written with --out are the same bytes as on stdout.
    let p = dir.path().join("discord.json");
    let printed = run(&["discord", "--state", &fixture("bell.json"), "--starts", "4"]).stdout;
    run(&["discord", "--state", &fixture("bell.json"), "--starts", "4", "--out", p.to_str().unwrap()]);
    let written = std::fs::read(&p).unwrap();
    assert_eq!(printed, written);
    let reparsed: Value = serde_json::from_slice(&written).unwrap();
    assert_eq!(to_json(&reparsed).unwrap().into_bytes(), written);
}

#[test]
fn help_documents_index_convention() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("a-major") && text.contains("i*d_b + j"));
}
