#![no_main]
use alcq::pcfg::Grammar;
use alcq::syntax::Level;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&l, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let _ = Grammar::parse(text, Level::new(l % 4).unwrap());
});
