use std::fmt::Write as _;

use fourflip::formats::{parse_columnwise, parse_native_bip, parse_rowwise_scp, write_native_bip, ProblemKind};
use fourflip::gen::{generate, CostRange, GenConfig, GenKind};
use fourflip_core::Instance;
use proptest::prelude::*;

fn rowwise(inst: &Instance) -> String {
    let mut out = format!("{} {}\n", inst.num_rows(), inst.num_cols());
    for j in 0..inst.num_cols() {
        let _ = write!(out, "{} ", inst.cost(j));
    }
    out.push('\n');
    for i in 0..inst.num_rows() {
        let _ = write!(out, "{}", inst.row(i).len());
        for &j in inst.row(i) {
            let _ = write!(out, " {}", j + 1);
        }
        out.push('\n');
    }
    out
}

fn columnwise(inst: &Instance) -> String {
    let mut out = format!("{} {}\n", inst.num_rows(), inst.num_cols());
    for j in 0..inst.num_cols() {
        let _ = write!(out, "{} {}", inst.cost(j), inst.col(j).len());
        for &i in inst.col(j) {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn encodings_agree(seed in any::<u64>(), rows in 1usize..30, cols in 1usize..60, density in 0.02f64..1.0) {
        let cfg = GenConfig { rows, cols, density, costs: CostRange { lo: 1, hi: 1000 }, kind: GenKind::Cover, seed };
        let inst = generate(&cfg).unwrap();
        prop_assert_eq!(&parse_rowwise_scp(rowwise(&inst).as_bytes()).unwrap(), &inst);
        prop_assert_eq!(&parse_columnwise(columnwise(&inst).as_bytes(), ProblemKind::Cover).unwrap(), &inst);
        prop_assert_eq!(&parse_native_bip(write_native_bip(&inst).as_bytes()).unwrap(), &inst);
    }

    #[test]
    fn mixed_roundtrip(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..40) {
        let cfg = GenConfig { rows, cols, density: 0.2, costs: CostRange { lo: -50, hi: 50 }, kind: GenKind::Mixed, seed };
        let inst = generate(&cfg).unwrap();
        let text = write_native_bip(&inst);
        let back = parse_native_bip(text.as_bytes()).unwrap();
        prop_assert_eq!(write_native_bip(&back), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn parsers_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_rowwise_scp(&bytes);
        let _ = parse_columnwise(&bytes, ProblemKind::Partition);
        let _ = parse_native_bip(&bytes);
    }
}

#[test]
fn partition_kind_forces_equalities() {
    let cfg = GenConfig {
        rows: 10,
        cols: 25,
        density: 0.3,
        costs: CostRange { lo: 1, hi: 9 },
        kind: GenKind::Cover,
        seed: 5,
    };
    let inst = generate(&cfg).unwrap();
    let part = parse_columnwise(columnwise(&inst).as_bytes(), ProblemKind::Partition).unwrap();
    assert!(part.senses().iter().all(|&s| s == fourflip_core::Sense::Eq));
    assert_eq!(part.nnz(), inst.nnz());
}
