use std::io::Cursor;
use std::process::Command;

use serde_json::Value;
use unigate::snapshot::{self, SnapshotError, MAGIC};
use unigate_core::experiment::seeded_gate_set;
use unigate_core::{haar_random, IndexMode, IndexParams, NnIndex, ProductTable, VariantMode};

const BUDGET: u64 = 1 << 30;

fn snapshot_bytes(seed: u64, depth: usize) -> Vec<u8> {
    let gs = seeded_gate_set(seed, VariantMode::Four).unwrap();
    let table = ProductTable::build(&gs, depth, BUDGET).unwrap();
    let index = NnIndex::build(&table, IndexMode::Approximate, IndexParams::default(), BUDGET).unwrap();
    let mut bytes = Vec::new();
    snapshot::write(&mut bytes, &gs, depth, &index).unwrap();
    bytes
}

#[test]
fn round_trip_preserves_queries() {
    let gs = seeded_gate_set(3, VariantMode::Four).unwrap();
    let table = ProductTable::build(&gs, 4, BUDGET).unwrap();
    let index = NnIndex::build(&table, IndexMode::Approximate, IndexParams::default(), BUDGET).unwrap();
    let mut bytes = Vec::new();
    snapshot::write(&mut bytes, &gs, 4, &index).unwrap();
    let header = snapshot::read_header(Cursor::new(&bytes)).unwrap();
    assert_eq!(header.points, 256);
    assert_eq!(header.params, IndexParams::default());
    let loaded = snapshot::read(Cursor::new(&bytes), &gs, &table).unwrap();
    assert_eq!(loaded.coarse_vectors(), index.coarse_vectors());
    for s in 0..20 {
        let q = haar_random(4, 900 + s).unwrap();
        assert_eq!(
            loaded.query_nearest(&q, 3).unwrap(),
            index.query_nearest(&q, 3).unwrap()
        );
    }
}

#[test]
fn rejects_bad_magic_version_and_truncation() {
    let gs = seeded_gate_set(3, VariantMode::Four).unwrap();
    let table = ProductTable::build(&gs, 3, BUDGET).unwrap();
    let good = snapshot_bytes(3, 3);
    assert_eq!(good[..4], MAGIC);

    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(
        snapshot::read(Cursor::new(&bad), &gs, &table),
        Err(SnapshotError::BadMagic)
    ));

    let mut future = good.clone();
    future[4..8].copy_from_slice(&99u32.to_le_bytes());
    let err = snapshot::read(Cursor::new(&future), &gs, &table).unwrap_err();
    assert!(matches!(err, SnapshotError::Version { found: 99 }));
    assert!(err.is_mismatch());

    let truncated = &good[..good.len() - 5];
    assert!(snapshot::read(Cursor::new(truncated), &gs, &table).is_err());
    let mut trailing = good.clone();
    trailing.push(0);
    assert!(matches!(
        snapshot::read(Cursor::new(&trailing), &gs, &table),
        Err(SnapshotError::Corrupt(_))
    ));
}

#[test]
fn rejects_other_gate_set_or_depth() {
    let bytes = snapshot_bytes(3, 3);
    let other = seeded_gate_set(4, VariantMode::Four).unwrap();
    let other_table = ProductTable::build(&other, 3, BUDGET).unwrap();
    assert!(snapshot::read(Cursor::new(&bytes), &other, &other_table)
        .unwrap_err()
        .is_mismatch());
    let gs = seeded_gate_set(3, VariantMode::Four).unwrap();
    let deeper = ProductTable::build(&gs, 4, BUDGET).unwrap();
    assert!(snapshot::read(Cursor::new(&bytes), &gs, &deeper)
        .unwrap_err()
        .is_mismatch());
}

#[test]
fn cli_index_build_then_compile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h4.ugix");
    let p = path.to_str().unwrap();
    let bin = env!("CARGO_BIN_EXE_unigate");
    let build = Command::new(bin)
        .args(["index-build", "--half-depth", "4", "--seed", "6", "--output", p])
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = |extra: &[&str]| {
        let mut args = vec!["compile", "--half-depth", "4", "--seed", "6"];
        args.extend_from_slice(extra);
        Command::new(bin).args(&args).output().unwrap()
    };
    let from_snapshot = run(&["--snapshot", p]);
    assert!(
        from_snapshot.status.success(),
        "{}",
        String::from_utf8_lossy(&from_snapshot.stderr)
    );
    let fresh = run(&["--index", "approx"]);
    let a: Value = serde_json::from_slice(&from_snapshot.stdout).unwrap();
    let b: Value = serde_json::from_slice(&fresh.stdout).unwrap();
    assert_eq!(a["word"], b["word"]);
    assert_eq!(a["infidelity"], b["infidelity"]);

    let wrong_seed = Command::new(bin)
        .args(["compile", "--half-depth", "4", "--seed", "7", "--snapshot", p])
        .output()
        .unwrap();
    assert_eq!(wrong_seed.status.code(), Some(2));
}
