#![no_main]

use libfuzzer_sys::fuzz_target;
use zdl_core::zeros::{parse_zeros, write_zeros, FormatKind};

fuzz_target!(|data: &[u8]| {
    let Ok(zeros) = parse_zeros(data, FormatKind::BaseOffset) else {
        return;
    };
    assert!(zeros.offsets().windows(2).all(|w| w[1] > w[0]));
    let mut out = Vec::new();
    write_zeros(&mut out, &zeros, FormatKind::BaseOffset).unwrap();
    let again = parse_zeros(out.as_slice(), FormatKind::BaseOffset).unwrap();
    assert_eq!(again, zeros);
});
