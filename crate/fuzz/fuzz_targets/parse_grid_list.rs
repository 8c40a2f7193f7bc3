#![no_main]

//! The grid-list parser and validator must never panic on user input.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(sizes) = trisolve::parse_grid_list(text) {
        let _ = trisolve::validate_grid_list(&sizes);
    }
});
