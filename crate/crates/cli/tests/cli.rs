use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const STAGES: [&str; 8] = [
    "ingest", "freq", "burst", "select", "coword", "pfnet", "layout", "render",
];

fn fixture_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/fixture.toml")
}

fn topicburst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicburst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        command,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    topicburst(&args)
}

#[test]
fn run_matches_chained_stages() {
    let tmp = tempfile::tempdir().unwrap();
    let whole = tmp.path().join("whole");
    let staged = tmp.path().join("staged");
    let config = fixture_config();
    assert!(run_in("run", &config, &whole, &[]).status.success());
    for stage in STAGES {
        let out = run_in(stage, &config, &staged, &[]);
        assert!(
            out.status.success(),
            "{stage}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let manifest = std::fs::read_to_string(whole.join("manifest.csv")).unwrap();
    assert_eq!(
        manifest,
        std::fs::read_to_string(staged.join("manifest.csv")).unwrap()
    );
    assert_eq!(manifest.lines().count(), 13);
}

#[test]
fn seed_flag_changes_only_the_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config();
    let a = run_in("run", &config, &tmp.path().join("a"), &[]);
    let b = run_in("run", &config, &tmp.path().join("b"), &["--seed", "99"]);
    let lines = |o: &Output| String::from_utf8(o.stdout.clone()).unwrap();
    let (a, b) = (lines(&a), lines(&b));
    let changed: Vec<&str> = a
        .lines()
        .zip(b.lines())
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(changed, ["positions.csv", "map.svg"]);
}

#[test]
fn unreadable_input_is_reported_and_nothing_is_written() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.toml");
    std::fs::write(&config, "input = \"nowhere.jsonl\"\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = run_in("run", &config, &out_dir, &[]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("ingest") && stderr.contains("nowhere.jsonl"),
        "{stderr}"
    );
    assert!(!out_dir.exists());
}

#[test]
fn stage_without_its_inputs_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in("burst", &fixture_config(), tmp.path(), &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("series.csv"));
}

#[test]
fn render_with_zero_edges_draws_isolated_nodes() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config();
    assert!(run_in("run", &config, tmp.path(), &[]).status.success());
    std::fs::write(
        tmp.path().join("pfnet_edges.csv"),
        "# schema: pfnet/1\nterm_a,term_b,count,distance\n",
    )
    .unwrap();
    assert!(run_in("layout", &config, tmp.path(), &[]).status.success());
    assert!(run_in("render", &config, tmp.path(), &[]).status.success());
    let svg = std::fs::read_to_string(tmp.path().join("map.svg")).unwrap();
    assert!(svg.contains("<circle"));
    assert!(!svg.contains("<line"));
}

#[test]
fn bad_config_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.toml");
    std::fs::write(&config, "input = \"x.jsonl\"\nfraction = 2.0\n").unwrap();
    let out = run_in("run", &config, tmp.path(), &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fraction"));
}
