#![cfg_attr(fuzzing, no_main)]

use sketchls::experiment::{parse_json_report, to_csv_string, to_json_string};

#[cfg(not(fuzzing))]
mod shim;

fn do_fuzz(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(report) = parse_json_report(text) else {
        return;
    };
    let emitted = to_json_string(&report).expect("parsed reports serialize");
    assert_eq!(parse_json_report(&emitted).expect("emitted JSON parses"), report);
    let csv = to_csv_string(&report).expect("parsed reports render as CSV");
    assert_eq!(csv.lines().count(), report.cells.len() + 1);
}

#[cfg(fuzzing)]
libfuzzer_sys::fuzz_target!(|data: &[u8]| do_fuzz(data));

#[cfg(not(fuzzing))]
fn main() {
    shim::replay(do_fuzz);
}
