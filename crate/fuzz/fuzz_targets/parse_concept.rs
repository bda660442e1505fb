#![no_main]
use alcq::syntax::{concept_to_line, parse_concept};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_concept(text) {
        assert_eq!(parse_concept(&concept_to_line(&c)).unwrap(), c);
        let n = c.nnf();
        assert_eq!(n.nnf(), n);
    }
});
