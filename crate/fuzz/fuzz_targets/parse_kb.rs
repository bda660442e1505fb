#![no_main]
use alcq::syntax::{parse_kb, serialize_kb};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kb) = parse_kb(text) {
        let back = parse_kb(&serialize_kb(&kb)).expect("serialized KB reparses");
        assert_eq!(back.len(), kb.len());
    }
});
