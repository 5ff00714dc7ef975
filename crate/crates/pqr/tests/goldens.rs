mod common;

use common::{golden_dir, golden_files, golden_mismatches, run_goldens};

/// Set `PQR_BLESS=1` to rewrite the committed files after an intended
/// output change.
#[test]
fn cli_outputs_match_committed_goldens() {
    let dir = tempfile::tempdir().unwrap();
    run_goldens(dir.path()).unwrap();
    if std::env::var_os("PQR_BLESS").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        for name in golden_files() {
            std::fs::copy(dir.path().join(name), golden_dir().join(name)).unwrap();
        }
    }
    assert_eq!(golden_mismatches(dir.path()), Vec::<String>::new());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_goldens(a.path()).unwrap();
    run_goldens(b.path()).unwrap();
    for name in golden_files() {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}
