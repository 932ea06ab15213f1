#![cfg_attr(fuzzing, no_main)]

use sketchls::dataset::{parse_csv, prepare, DatasetSpec};

#[cfg(not(fuzzing))]
mod shim;

fn do_fuzz(data: &[u8]) {
    let Some((&selector, text)) = data.split_first() else {
        return;
    };
    let spec = if selector % 2 == 0 {
        DatasetSpec {
            pad_to: Some(64),
            expected_rows: None,
            ..DatasetSpec::redwine()
        }
    } else {
        DatasetSpec {
            sample_to: Some(1 + (selector as usize) % 16),
            ..DatasetSpec::calihousing()
        }
    };
    let Ok(table) = parse_csv(text, None, Some(&spec.columns())) else {
        return;
    };
    if table.len() > 4096 {
        return;
    }
    let Ok(p) = prepare(&spec, &table, selector as u64) else {
        return;
    };
    assert_eq!(p.a().rows(), p.b().len());
    assert_eq!(p.d(), spec.feature_columns.len() + 1);
    assert!(p.a().as_slice().iter().all(|v| v.is_finite()));
}

#[cfg(fuzzing)]
libfuzzer_sys::fuzz_target!(|data: &[u8]| do_fuzz(data));

#[cfg(not(fuzzing))]
fn main() {
    shim::replay(do_fuzz);
}
