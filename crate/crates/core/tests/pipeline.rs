mod common;

use std::path::Path;

use common::{burst_oracle, fixture_dir, GOLDEN};
use topicburst_core::burst::{detect_bursts, optimal_state_sequence, parse_burst_list};
use topicburst_core::corpus::{load_corpus, Stoplist, TermIndex};
use topicburst_core::error::Error;
use topicburst_core::pipeline::artifacts::{parse_series, read_tagged, BURSTS_SCHEMA};
use topicburst_core::pipeline::{
    read_manifest, run_pipeline, run_stage, ArtifactStatus, PipelineConfig, Stage, StoplistSource,
};

fn fixture_config(out: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::from_file(&fixture_dir().join("fixture.toml")).unwrap();
    config.output = out.to_path_buf();
    config
}

fn digests(dir: &Path) -> Vec<(String, String)> {
    read_manifest(dir)
        .unwrap()
        .entries
        .into_iter()
        .map(|e| (e.artifact, e.sha256))
        .collect()
}

#[test]
fn fixture_matches_golden_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = run_pipeline(&fixture_config(tmp.path())).unwrap();
    let got: Vec<(&str, &str)> = manifest
        .entries
        .iter()
        .map(|e| (e.artifact.as_str(), e.sha256.as_str()))
        .collect();
    assert_eq!(got, GOLDEN);
    assert!(manifest
        .entries
        .iter()
        .all(|e| e.status == ArtifactStatus::Complete));
    assert_eq!(read_manifest(tmp.path()).unwrap(), manifest);
}

#[test]
fn repeated_runs_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_pipeline(&fixture_config(a.path())).unwrap();
    run_pipeline(&fixture_config(b.path())).unwrap();
    run_pipeline(&fixture_config(b.path())).unwrap();
    assert_eq!(digests(a.path()), digests(b.path()));
    assert_eq!(
        std::fs::read(a.path().join("manifest.csv")).unwrap(),
        std::fs::read(b.path().join("manifest.csv")).unwrap()
    );
}

#[test]
fn stage_chain_equals_whole_run() {
    let whole = tempfile::tempdir().unwrap();
    let staged = tempfile::tempdir().unwrap();
    run_pipeline(&fixture_config(whole.path())).unwrap();
    for stage in Stage::ALL {
        run_stage(stage, &fixture_config(staged.path())).unwrap();
    }
    for name in GOLDEN.iter().map(|g| g.0).chain(["manifest.csv"]) {
        assert_eq!(
            std::fs::read(whole.path().join(name)).unwrap(),
            std::fs::read(staged.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn burst_stage_agrees_with_the_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config(tmp.path());
    for stage in [Stage::Ingest, Stage::Freq, Stage::Burst] {
        run_stage(stage, &config).unwrap();
    }
    let table = parse_series(&tmp.path().join("series.csv")).unwrap();
    let listed =
        parse_burst_list(&read_tagged(&tmp.path().join("bursts.csv"), BURSTS_SCHEMA).unwrap())
            .unwrap();
    let mut expected = Vec::new();
    for series in table.series.values() {
        expected.extend(detect_bursts(series, &config.burst).unwrap());
    }
    assert_eq!(listed.len(), expected.len());
    for (a, b) in listed.iter().zip(&expected) {
        assert_eq!(
            (&a.term, a.level, a.start_year, a.end_year),
            (&b.term, b.level, b.start_year, b.end_year)
        );
    }
    // exhaustive search over 2^20 sequences, for a handful of terms
    for name in ["pcr", "hiv", "genome", "protein"] {
        let series = &table.series[&common::term(name)];
        let path = optimal_state_sequence(series, &config.burst)
            .unwrap()
            .unwrap();
        let b = &config.burst;
        let oracle = burst_oracle(&series.r, &series.d, b.s, b.gamma, b.states, b.epsilon).unwrap();
        assert_eq!(path.cost, oracle.min_cost, "{name}");
        assert!(oracle.argmins.contains(&path.states), "{name}");
    }
}

#[test]
fn unreadable_input_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut config = fixture_config(&out);
    config.input = tmp.path().join("missing.jsonl");
    let err = run_pipeline(&config).unwrap_err();
    let Error::Stage { stage, source } = &err else {
        panic!("{err}")
    };
    assert_eq!(*stage, "ingest");
    assert!(source.to_string().contains("missing.jsonl"), "{source}");
    assert!(!out.exists());
}

#[test]
fn schema_mismatch_names_both_versions() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config(tmp.path());
    run_stage(Stage::Ingest, &config).unwrap();
    run_stage(Stage::Freq, &config).unwrap();
    let path = tmp.path().join("series.csv");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replacen("series/1", "series/0", 1);
    std::fs::write(&path, text).unwrap();
    let err = run_stage(Stage::Burst, &config).unwrap_err();
    let Error::Stage { source, .. } = &err else {
        panic!("{err}")
    };
    let Error::SchemaMismatch {
        expected, found, ..
    } = source.as_ref()
    else {
        panic!("{source}")
    };
    assert_eq!(
        (expected.as_str(), found.as_str()),
        ("series/1", "series/0")
    );
    let manifest = read_manifest(tmp.path()).unwrap();
    assert!(manifest.failure.unwrap().starts_with("burst:"));
}

#[test]
fn failing_stage_flags_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config(tmp.path());
    for stage in [Stage::Ingest, Stage::Freq, Stage::Burst, Stage::Select] {
        run_stage(stage, &config).unwrap();
    }
    // a directory in the chart's place makes the last write of the stage fail
    std::fs::remove_file(tmp.path().join("frequency_chart.svg")).unwrap();
    std::fs::create_dir(tmp.path().join("frequency_chart.svg")).unwrap();
    let err = run_stage(Stage::Freq, &config).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage: "freq", .. }), "{err}");
    let manifest = read_manifest(tmp.path()).unwrap();
    let status = |name: &str| manifest.get(name).map(|e| e.status);
    assert_eq!(status("series.csv"), Some(ArtifactStatus::Partial));
    assert_eq!(status("frequency_table.csv"), Some(ArtifactStatus::Partial));
    assert_eq!(status("corpus.jsonl"), Some(ArtifactStatus::Complete));
    assert_eq!(status("bursts.csv"), None);
}

#[test]
fn full_fraction_without_stoplist_keeps_every_term() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = fixture_config(tmp.path());
    config.fraction = 1.0;
    config.stoplist = StoplistSource::None;
    run_stage(Stage::Ingest, &config).unwrap();
    run_stage(Stage::Freq, &config).unwrap();
    let table = parse_series(&tmp.path().join("series.csv")).unwrap();
    let raw = load_corpus(
        std::fs::read(fixture_dir().join("corpus.jsonl"))
            .unwrap()
            .as_slice(),
    )
    .unwrap();
    let titled = raw.retain(|d| d.has_title());
    let vocabulary = TermIndex::build(&titled, &Stoplist::empty()).vocabulary();
    assert_eq!(
        table
            .series
            .keys()
            .cloned()
            .collect::<std::collections::BTreeSet<_>>(),
        vocabulary
    );
    assert!(vocabulary.contains(&common::term("cells")));
}

#[test]
fn render_handles_a_network_without_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config(tmp.path());
    run_pipeline(&config).unwrap();
    std::fs::write(
        tmp.path().join("pfnet_edges.csv"),
        "# schema: pfnet/1\nterm_a,term_b,count,distance\n",
    )
    .unwrap();
    run_stage(Stage::Layout, &config).unwrap();
    run_stage(Stage::Render, &config).unwrap();
    let svg = std::fs::read_to_string(tmp.path().join("map.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), config.vocabulary_target);
    assert_eq!(svg.matches("<line").count(), 0);
    let pajek = std::fs::read_to_string(tmp.path().join("network.net")).unwrap();
    assert!(pajek.ends_with("*Edges\n"));
}

#[test]
fn rerunning_a_stage_clears_later_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixture_config(tmp.path());
    run_pipeline(&config).unwrap();
    let manifest = run_stage(Stage::Burst, &config).unwrap();
    let names: Vec<&str> = manifest
        .entries
        .iter()
        .map(|e| e.artifact.as_str())
        .collect();
    assert_eq!(
        names,
        [
            "corpus.jsonl",
            "series.csv",
            "frequency_table.csv",
            "frequency_chart.svg",
            "bursts.csv"
        ]
    );
    assert!(!tmp.path().join("map.svg").exists());
}
