#![no_main]

use libfuzzer_sys::fuzz_target;
use zdl_core::zeros::{parse_zeros, write_zeros, FormatKind};

fuzz_target!(|data: &[u8]| {
    let Ok(zeros) = parse_zeros(data, FormatKind::PlainList) else {
        return;
    };
    assert!(zeros.offsets().windows(2).all(|w| w[1] > w[0]));
    let mut out = Vec::new();
    write_zeros(&mut out, &zeros, FormatKind::PlainList).unwrap();
    let again = parse_zeros(out.as_slice(), FormatKind::PlainList).unwrap();
    assert_eq!(again, zeros);
});
