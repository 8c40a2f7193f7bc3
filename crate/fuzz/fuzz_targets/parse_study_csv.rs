#![no_main]

//! The study-table parser must reject arbitrary bytes gracefully, and any
//! table it accepts must survive an emit/parse round trip.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = trisolve::parse_study_csv(data) {
        let mut buf = Vec::new();
        trisolve::write_study_csv(&rows, 17, &mut buf).expect("accepted rows must re-emit");
        let again = trisolve::parse_study_csv(&buf).expect("emitted table must parse");
        assert_eq!(again.len(), rows.len());
        for (a, b) in again.iter().zip(rows.iter()) {
            assert_eq!(a.n, b.n);
            assert_eq!(a.k, b.k);
            assert_eq!(a.error.to_bits(), b.error.to_bits());
            assert_eq!(a.order.map(f64::to_bits), b.order.map(f64::to_bits));
        }
    }
});
