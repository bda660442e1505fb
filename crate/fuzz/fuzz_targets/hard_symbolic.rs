#![no_main]
use alcq::nl::{hard_symbolic, read_hard_symbolic, RenamingMap};
use alcq::pcfg::{pool, PoolName};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let map = RenamingMap::for_pool(&pool(PoolName::B));
    if let Ok(ax) = read_hard_symbolic(text, &map) {
        let line = hard_symbolic(&ax, &map).expect("read axiom uses mapped names");
        assert_eq!(read_hard_symbolic(&line, &map).unwrap().canonical(), ax.canonical());
    }
});
