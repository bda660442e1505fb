#![no_main]
use alcq::pipeline::parse_record;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_record(line) {
        let again = serde_json::to_string(&r).unwrap();
        assert_eq!(parse_record(&again).unwrap(), r);
    }
});
