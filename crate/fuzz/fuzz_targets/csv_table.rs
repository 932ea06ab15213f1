#![cfg_attr(fuzzing, no_main)]

use sketchls::dataset::parse_csv;

#[cfg(not(fuzzing))]
mod shim;

fn do_fuzz(data: &[u8]) {
    let Ok(table) = parse_csv(data, None, None) else {
        return;
    };
    for row in &table.rows {
        assert_eq!(row.len(), table.header.len());
        assert!(row.iter().flatten().all(|v| v.is_finite()));
    }
    let again = parse_csv(data, Some(table.delimiter), None).expect("detected delimiter parses");
    assert_eq!(again, table);
}

#[cfg(fuzzing)]
libfuzzer_sys::fuzz_target!(|data: &[u8]| do_fuzz(data));

#[cfg(not(fuzzing))]
fn main() {
    shim::replay(do_fuzz);
}
