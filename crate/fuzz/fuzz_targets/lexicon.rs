#![no_main]
use alcq::nl::Lexicalization;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = Lexicalization::parse(text);
    }
});
