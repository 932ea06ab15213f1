#![cfg_attr(fuzzing, no_main)]

use sketchls::dataset::parse_matrix_csv;
use sketchls::linalg::solve_least_squares;

#[cfg(not(fuzzing))]
mod shim;

fn do_fuzz(data: &[u8]) {
    let Ok(m) = parse_matrix_csv(data, None) else {
        return;
    };
    let (rows, cols) = m.shape();
    assert!(rows > 0 && cols > 0);
    if cols < 2 || rows < cols || rows * cols > 100_000 {
        return;
    }
    let a = m.columns(0..cols - 1);
    let b = m.column(cols - 1);
    if let Ok(x) = solve_least_squares(&a, &b) {
        assert!(x.as_slice().iter().all(|v| !v.is_nan()));
    }
}

#[cfg(fuzzing)]
libfuzzer_sys::fuzz_target!(|data: &[u8]| do_fuzz(data));

#[cfg(not(fuzzing))]
fn main() {
    shim::replay(do_fuzz);
}
