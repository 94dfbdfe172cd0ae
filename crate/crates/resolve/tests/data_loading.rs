use std::fs;
use std::path::{Path, PathBuf};

use resolve::data::{data_dir, parse_chart, DataError, Dataset, CHART_FILES, SCHEMA_VERSION};
use resolve_core::chart::validate;

/// A writable copy of the shipped data directory.
fn copy_data() -> tempfile::TempDir {
    let tmp = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(data_dir()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, tmp.path().join(p.file_name().unwrap())).unwrap();
    }
    tmp
}

fn edit(dir: &Path, file: &str, f: impl FnOnce(String) -> String) {
    let p: PathBuf = dir.join(file);
    let text = fs::read_to_string(&p).unwrap();
    fs::write(&p, f(text)).unwrap();
}

#[test]
fn shipped_data_loads() {
    let ds = Dataset::load_default().unwrap();
    let names: Vec<&str> = ds.tower.charts().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, CHART_FILES);
    assert_eq!(ds.steps.len(), 6);
    assert_eq!(ds.elements.len(), 5);
    assert_eq!(ds.pluecker.steps.len(), 3);
}

#[test]
fn schema_is_pinned_to_v1() {
    assert_eq!(SCHEMA_VERSION, 1);
    for entry in fs::read_dir(data_dir()).unwrap() {
        let p = entry.unwrap().path();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1, "{}", p.display());
    }
}

#[test]
fn ambient_dimensions() {
    let ds = Dataset::load_default().unwrap();
    let dims: Vec<usize> = ds.tower.charts()[1..].iter().map(|c| validate(c).ambient).collect();
    assert_eq!(dims, [8, 9, 11, 15, 16, 18]);
}

#[test]
fn malformed_json_reports_position() {
    let tmp = copy_data();
    edit(tmp.path(), "T2.json", |t| t.replacen("\"torus_rank\"", "\"torus_rank\" 3,", 1));
    match Dataset::load(tmp.path()) {
        Err(DataError::Json { file, line, column, .. }) => {
            assert_eq!(file, "T2.json");
            assert!(line > 1 && column > 0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_schema_version_rejected() {
    let tmp = copy_data();
    edit(tmp.path(), "centers.json", |t| t.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1));
    let e = Dataset::load(tmp.path()).unwrap_err();
    assert!(matches!(&e, DataError::Schema { found: 2, .. }), "{e:?}");
    assert_eq!(e.to_string(), "centers.json: schema version 2, expected 1");
}

#[test]
fn bad_polynomial_names_its_field() {
    let tmp = copy_data();
    edit(tmp.path(), "T3.json", |t| t.replacen("n3*d13_3", "n3*d13_3 + bogus", 1));
    let e = Dataset::load(tmp.path()).unwrap_err();
    let text = e.to_string();
    assert!(text.starts_with("T3.json: equations[1]"), "{text}");
    assert!(text.contains("bogus"), "{text}");
}

#[test]
fn unknown_chart_reference_rejected() {
    let tmp = copy_data();
    edit(tmp.path(), "elements.json", |t| t.replacen("\"chart\": \"T1\"", "\"chart\": \"T9\"", 1));
    let e = Dataset::load(tmp.path()).unwrap_err();
    assert!(e.to_string().contains("covering.chart"), "{e}");
}

#[test]
fn substitution_keys_checked_against_parent() {
    let ds = Dataset::load_default().unwrap();
    let t0 = ds.chart("T0").unwrap();
    let text = fs::read_to_string(data_dir().join("T1.json")).unwrap().replacen("\"a33_0\"", "\"a34_0\"", 1);
    let e = parse_chart("T1.json", &text, Some(t0)).unwrap_err();
    assert!(e.to_string().contains("a34_0"), "{e}");
}
