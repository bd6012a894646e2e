use std::path::Path;
use std::sync::Arc;

use grand_amalgam::{MeasureSpace, SampledFunction};
use grandam_cli::io::{
    load_function, parse_function, save_function, write_function, FunctionFormat,
};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

fn positive() -> impl Strategy<Value = f64> {
    (prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL).prop_map(f64::abs)
}

fn function() -> impl Strategy<Value = SampledFunction> {
    prop::collection::btree_set(-1000i64..1000, 1..24).prop_flat_map(|ids| {
        let n = ids.len();
        (
            Just(ids.into_iter().collect::<Vec<_>>()),
            prop::collection::vec(positive(), n),
            prop::collection::vec(finite(), n),
        )
            .prop_map(|(ids, w, v)| {
                let space = Arc::new(MeasureSpace::new(ids, w, "f").unwrap());
                SampledFunction::new(space, v).unwrap()
            })
    })
}

fn same_bits(a: &SampledFunction, b: &SampledFunction) -> bool {
    let bits = |x: &[f64]| x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    a.space().points() == b.space().points()
        && bits(a.space().weights()) == bits(b.space().weights())
        && bits(a.values()) == bits(b.values())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip(f in function()) {
        let text = write_function(&f, FunctionFormat::Csv);
        let back = parse_function(Path::new("f.csv"), &text, FunctionFormat::Csv).unwrap();
        prop_assert!(same_bits(&f, &back), "{}", text);
    }

    #[test]
    fn jsonl_round_trip(f in function()) {
        let text = write_function(&f, FunctionFormat::Jsonl);
        let back = parse_function(Path::new("f.jsonl"), &text, FunctionFormat::Jsonl).unwrap();
        prop_assert!(same_bits(&f, &back), "{}", text);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let space = Arc::new(MeasureSpace::new(vec![-3, 0, 7], vec![0.1, 1e-300, 2.5], "f").unwrap());
    let f = SampledFunction::new(space, vec![-0.0, 1.0 / 3.0, -1e308]).unwrap();
    for (name, format) in [
        ("f.csv", FunctionFormat::Csv),
        ("f.jsonl", FunctionFormat::Jsonl),
    ] {
        let path = dir.path().join(name);
        save_function(&path, &f, format).unwrap();
        assert_eq!(FunctionFormat::from_path(&path), format);
        let back = load_function(&path, format).unwrap();
        assert!(same_bits(&f, &back));
    }
}
