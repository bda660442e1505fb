#![no_main]
use alcq::syntax::{axiom_to_line, parse_axiom};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ax) = parse_axiom(text) {
        // printing then reading must give the same axiom back
        let line = axiom_to_line(&ax);
        assert_eq!(parse_axiom(&line).expect("printed axiom reparses"), ax, "{line}");
    }
});
