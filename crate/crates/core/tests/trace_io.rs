mod support;

use std::fs;

use mouldkit::commands::{mould_table, run_dulac, run_linearize, run_trim, run_verify};
use mouldkit::io::{load_trace, write_spec};
use mouldkit::prenormal::trim_iterate;
use support::*;

fn spec_file(dir: &std::path::Path, f: &mouldkit::PreparedDiffeo) -> std::path::PathBuf {
    let path = dir.join("in.json");
    fs::write(&path, write_spec(f)).unwrap();
    path
}

#[test]
fn trim_trace_reloads_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let f = saddle_corpus(61, 1, 5).remove(0);
    let spec = spec_file(tmp.path(), &f);
    let out = tmp.path().join("trim");
    assert!(run_trim(&spec, None, &out).unwrap().passed());
    for name in [
        "trace.txt",
        "spec.json",
        "Trem.tsv",
        "trem.tsv",
        "final.tsv",
        "report.txt",
        "stage-0/Dem.tsv",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let loaded = load_trace(&out).unwrap();
    let fresh = trim_iterate(&f).unwrap();
    assert_eq!(loaded.final_operator, fresh.final_operator);
    assert_eq!(loaded.universal_b, fresh.universal_b);
    assert_eq!(loaded.stages.len(), fresh.stages.len());
    let report = run_verify(&out).unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn tampered_operator_fails_conjugacy() {
    let tmp = tempfile::tempdir().unwrap();
    let f = saddle_corpus(62, 1, 5).remove(0);
    let spec = spec_file(tmp.path(), &f);
    let out = tmp.path().join("dulac");
    assert!(run_dulac(&spec, None, &out).unwrap().passed());
    let path = out.join("final_operator.tsv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.len() - 1;
    let mut cells: Vec<String> = lines[last].split('\t').map(String::from).collect();
    cells[2] = if cells[2] == "5" {
        "6".into()
    } else {
        "5".into()
    };
    lines[last] = cells.join("\t");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let report = run_verify(&out).unwrap();
    assert!(!report.passed());
    assert!(
        report.failures().any(|c| c.name.contains("conjugacy")),
        "{report}"
    );
}

#[test]
fn tampered_stage_mould_is_detected() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = spec_file(tmp.path(), &quadratic(5));
    let out = tmp.path().join("trim");
    run_trim(&spec, None, &out).unwrap();
    let path = out.join("stage-0/Dem.tsv");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replacen("(1)\t2", "(1)\t3", 1);
    fs::write(&path, text).unwrap();
    assert!(!run_verify(&out).unwrap().passed());
}

#[test]
fn rerun_replaces_stale_stages() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let busy = spec_file(tmp.path(), &saddle_corpus(63, 1, 5).remove(0));
    run_dulac(&busy, None, &out).unwrap();
    assert!(out.join("stage-1").is_dir());
    let linear = spec_file(
        tmp.path(),
        &mouldkit::PreparedDiffeo::linear(mu_q(&[(2, 1), (1, 2)]), 5).unwrap(),
    );
    run_dulac(&linear, None, &out).unwrap();
    assert!(!out.join("stage-0").exists());
    assert!(run_verify(&out).unwrap().passed());
}

#[test]
fn linearize_command_writes_koenigs_jet() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = spec_file(tmp.path(), &quadratic(8));
    let out = tmp.path().join("lin");
    assert!(run_linearize(&spec, None, &out).unwrap().passed());
    let jet = fs::read_to_string(out.join("normalizer.tsv")).unwrap();
    assert!(
        jet.starts_with("component\texponent\tcoefficient\n1\t(1)\t1\n1\t(2)\t-1/2\n1\t(3)\t1/3\n")
    );
    assert_eq!(
        fs::read_to_string(out.join("final.tsv")).unwrap(),
        "component\texponent\tcoefficient\n1\t(1)\t2\n"
    );
    assert!(fs::read_to_string(out.join("LinearizationTheta.tsv"))
        .unwrap()
        .contains("(1)\t-2\n"));
}

#[test]
fn mould_tables_for_each_name() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = spec_file(tmp.path(), &quadratic(6));
    for name in [
        "Dem",
        "dem",
        "Sem",
        "sem",
        "Den",
        "Poin",
        "poin",
        "Trem",
        "trem",
        "Dulac",
        "dulac",
        "LinearizationTheta",
    ] {
        let table = mould_table(&spec, name, 3, None).unwrap();
        assert!(
            table.starts_with(&format!(
                "# mould {name} nu=1 mu=(2) maxWeight=3\nword\tvalue\n()\t"
            )),
            "{table}"
        );
    }
    assert!(mould_table(&spec, "Nope", 3, None).is_err());
    let trem = mould_table(&spec, "trem", 3, None).unwrap();
    assert!(trem.lines().skip(3).all(|l| l.ends_with("\t0")), "{trem}");
}
