use alcq::nl::{
    axiom_to_text, axiom_to_text_as, example_to_text, fixup_grammar, hard_symbolic, read_hard_symbolic, soft_symbolic,
    soft_symbolic_inverse, Lexicalization, Phrasing, RenamingMap,
};
use alcq::pcfg::{pool, Grammar, PoolName, Sampler, Vocabulary};
use alcq::syntax::{parse_axiom, parse_kb, Axiom, Level};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Statements sampled from every level over both pools.
fn statements(per_level: usize) -> Vec<(PoolName, Axiom)> {
    let mut out = Vec::new();
    for name in PoolName::all() {
        let p = pool(name);
        for l in 0..=3 {
            let g = Grammar::builtin(Level::new(l).unwrap());
            let sampler = Sampler::new(&g, Vocabulary::full(&p));
            let mut rng = ChaCha8Rng::seed_from_u64(l as u64 * 17 + name as u64);
            for _ in 0..per_level {
                out.push((name, sampler.statement(&mut rng).unwrap()));
            }
        }
    }
    out
}

fn lex(name: PoolName) -> Lexicalization {
    Lexicalization::builtin().with_kind(pool(name).kind)
}

#[test]
fn fixup_is_idempotent_on_rendered_sentences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let all = statements(1250);
    assert_eq!(all.len(), 10_000);
    for (name, ax) in &all {
        let once = fixup_grammar(&axiom_to_text(ax, &lex(*name), &mut rng));
        assert_eq!(fixup_grammar(&once), once);
        assert!(once.ends_with('.'));
        assert!(once.chars().next().unwrap().is_uppercase(), "{once}");
    }
}

#[test]
fn rendering_depends_only_on_the_seed() {
    let kb = parse_kb(
        "Red(Anne)\nRed subclassof some likes . Kind\nsome likes . Kind subclassof Quiet or not Green\nlikes(Anne, Bob)\n",
    )
    .unwrap();
    let render = |seed| example_to_text(&kb, &[], &Lexicalization::builtin(), &mut ChaCha8Rng::seed_from_u64(seed));
    assert_eq!(render(3), render(3));
    let variants: std::collections::BTreeSet<_> = (0..20).map(|s| render(s).context).collect();
    assert!(variants.len() > 1, "phrasing never varies");
}

#[test]
fn soft_form_inverts_up_to_verb_inflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, ax) in statements(100) {
        let lex = lex(name);
        let map = RenamingMap::for_pool(&pool(name));
        let sentence = fixup_grammar(&axiom_to_text(&ax, &lex, &mut rng));
        let soft = soft_symbolic(&sentence, &map, &lex).unwrap();
        let back = soft_symbolic_inverse(&soft, &map).unwrap();
        assert_eq!(soft_symbolic(&back, &map, &lex).unwrap(), soft, "{sentence}");
        assert_eq!(back.split_whitespace().count(), sentence.split_whitespace().count());
    }
}

#[test]
fn hard_form_reparses_to_the_same_axiom() {
    for (name, ax) in statements(100) {
        let map = RenamingMap::for_pool(&pool(name));
        let line = hard_symbolic(&ax, &map).unwrap();
        assert_eq!(read_hard_symbolic(&line, &map).unwrap().canonical(), ax.canonical(), "{line}");
    }
}

#[test]
fn rules_mentioning_top_use_everyone_or_can() {
    let l = Lexicalization::builtin();
    let ax = parse_axiom("top subclassof some likes . Kind").unwrap();
    assert_eq!(axiom_to_text_as(&ax, &l, Phrasing::PeopleThat), "Everyone likes someone kind");
    let things = Lexicalization::builtin().with_kind(alcq::pcfg::PoolKind::Things);
    let ax = parse_axiom("top subclassof only chases . Round").unwrap();
    assert_eq!(axiom_to_text_as(&ax, &things, Phrasing::IfThen), "Something can chase only things that are round");
}
