use std::path::Path;
use std::process::{Command, Output};

use cic_core::apps::{AppInput, AppSpec};
use cic_core::field::PrimeField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_input(dir: &Path, spec: AppSpec, seed: u64) -> String {
    let field = PrimeField::default();
    let inputs = spec.random_inputs(field, &mut ChaCha8Rng::seed_from_u64(seed));
    let text = AppInput::new(spec, None, &inputs).unwrap().to_toml();
    let path = dir.join(format!("{}.toml", spec.name()));
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn prove_into(dir: &Path, input: &str) -> [String; 3] {
    let out = dir.join("proof");
    let o = cic(&[
        "prove",
        input,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    ["vk.bin", "io.toml", "proof.bin"].map(|f| out.join(f).to_str().unwrap().to_string())
}

#[test]
fn prove_then_verify_every_desk_app() {
    for spec in AppSpec::desk_suite() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_input(dir.path(), spec, 1);
        let [vk, io, proof] = prove_into(dir.path(), &input);
        let o = cic(&["verify", &vk, &io, &proof]);
        assert_eq!(o.status.code(), Some(0), "{}", spec.name());
        assert_eq!(stdout(&o), "OK\n");
    }
}

#[test]
fn tampered_io_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), AppSpec::matmul(3), 2);
    let [vk, io, proof] = prove_into(dir.path(), &input);
    let text = std::fs::read_to_string(&io).unwrap();
    let (head, last) = text
        .trim_end()
        .trim_end_matches(']')
        .rsplit_once(", ")
        .unwrap();
    let bumped: u64 = last.parse::<u64>().unwrap() + 1;
    std::fs::write(&io, format!("{head}, {bumped}]\n")).unwrap();
    let o = cic(&["verify", &vk, &io, &proof]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "REJECTED\n");

    std::fs::write(&io, "io = [1, 2]\n").unwrap();
    let o = cic(&["verify", &vk, &io, &proof]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "REJECTED\n");
}

#[test]
fn malformed_files_are_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), AppSpec::matmul(2), 3);
    let [vk, io, proof] = prove_into(dir.path(), &input);
    let junk = dir.path().join("junk");
    std::fs::write(&junk, b"not a key").unwrap();
    let junk = junk.to_str().unwrap();
    for args in [
        vec!["verify", junk, &io, &proof],
        vec!["verify", &vk, &io, junk],
        vec!["verify", &vk, junk, &proof],
        vec!["verify", &vk, &io, &proof, "--modulus", "101"],
        vec!["verify", "/nonexistent/vk", &io, &proof],
        vec!["prove", junk],
        vec!["prove", &input, "--modulus", "100"],
        vec!["scenario", "run", junk],
    ] {
        let o = cic(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["verify", "only-one"],
        vec!["gas", "matmul"],
        vec!["gas", "sorting", "--n", "3"],
        vec!["bench", "matmul:n=x"],
        vec!["bench", "matmul:n=2,color=3"],
        vec!["--seed", "minus-one", "gas", "matmul", "--n", "2"],
    ] {
        let o = cic(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn gas_reports_ratio_to_block_limit() {
    let o = cic(&["gas", "image_match", "--image", "85", "--kernel", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let estimate: u64 = text
        .lines()
        .find_map(|l| l.strip_prefix("estimate: "))
        .and_then(|l| l.strip_suffix(" gas"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((70_000_000..=280_000_000).contains(&estimate));
    assert!(text.contains("block limit: 12000000"));
    let ratio: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("ratio: "))
        .and_then(|l| l.strip_suffix('x'))
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio >= 10.0);

    let o = cic(&["gas", "matmul", "--n", "0"]);
    assert!(stdout(&o).contains("estimate: 21000 gas"));
    let o = cic(&["gas", "matmul", "--n", "4", "--block-limit", "1000"]);
    assert!(stdout(&o).contains("block limit: 1000"));
}

#[test]
fn scenario_run_is_deterministic() {
    let script = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/scenarios/happy_path.txt"
    );
    let a = cic(&["scenario", "run", script, "--seed", "9"]);
    let b = cic(&["scenario", "run", script, "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# job 1 PAID"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.txt");
    let c = cic(&[
        "scenario",
        "run",
        script,
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(c.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = cic(&[
        "bench",
        "matmul:n=2",
        "multipoly:degree=1,vars=2",
        "--reps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ProofGen (s)"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("app,size,rep,keygen_s,proofgen_s,verify_ms,proof_bytes")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    let bytes: Vec<&str> = rows.iter().map(|r| r.rsplit(',').next().unwrap()).collect();
    assert!(bytes.iter().all(|b| *b == bytes[0]));
}
