//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the lines are visible in
//! `cargo test` output. Pass criterion numbers as arguments to run a subset.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use alcq::nl::{axiom_to_text_as, example_to_text, hard_symbolic, Lexicalization, Phrasing, RenamingMap};
use alcq::pcfg::{pool, Grammar, PoolName, Sampler, Vocabulary};
use alcq::pipeline::{
    check_shape, complexity_histogram, read_jsonl, run_generation, stats_report, verify_records, Dataset,
    PipelineConfig,
};
use alcq::reasoner::{Answer, ModelSet, OracleVerdict, Reasoner, ReasonerError, DEFAULT_ORACLE_BITS};
use alcq::syntax::{parse_axiom, parse_kb, Axiom, Concept, KnowledgeBase, Level};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, each with the reason logged next to it.
/// The run fails if one of these starts passing, so the list stays honest.
const KNOWN_RED: &[(u32, &str)] = &[(
    2,
    "row \"Anne likes less than two people / likes Bob / likes John => likes Alice: F\" \
     has an inconsistent context under unique names, so no answer is derivable",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alcq"))
}

fn run(cmd: &mut Command) -> Result<String, String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if out.status.success() {
        Ok(stdout)
    } else {
        Err(format!("{stdout}{}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn read_split(dir: &Path) -> Dataset {
    ["train", "validation", "test"]
        .iter()
        .flat_map(|s| read_jsonl(&dir.join(format!("{s}.jsonl"))).unwrap())
        .collect()
}

fn contradiction() -> Axiom {
    Axiom::subsumption(Concept::Top, Concept::Bottom)
}

/// `Some(agrees)` when the bounded models decide anything about `q`.
fn oracle_agrees(kb: &KnowledgeBase, q: &Axiom, got: Answer) -> Option<bool> {
    let models = ModelSet::new(kb, std::slice::from_ref(q), 3, DEFAULT_ORACLE_BITS).ok()?;
    let with_q = ModelSet::new(&kb.with(q.clone()), &[], 3, DEFAULT_ORACLE_BITS).ok()?;
    let mut decided = false;
    let mut ok = true;
    match models.check(q).ok()? {
        OracleVerdict::Entailed => {
            decided = true;
            ok &= got == Answer::True;
        }
        OracleVerdict::Countermodel(_) => {
            decided = true;
            ok &= got != Answer::True;
        }
        OracleVerdict::Inconclusive(_) => {}
    }
    match with_q.check(&contradiction()).ok()? {
        OracleVerdict::Countermodel(_) => {
            decided = true;
            ok &= got != Answer::False;
        }
        OracleVerdict::Entailed => {
            decided = true;
            ok &= got == Answer::False;
        }
        OracleVerdict::Inconclusive(_) => {}
    }
    decided.then_some(ok)
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let p = pool(PoolName::A);
    let vocab = Vocabulary {
        concepts: p.concepts[..3].to_vec(),
        roles: p.roles[..1].to_vec(),
        individuals: p.individuals[..2].to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut kbs, mut conclusive, mut wrong, mut skipped) = (0, 0, Vec::new(), 0);
    while kbs < 500 {
        let g = Grammar::builtin(Level::new(rng.gen_range(0..=3)).unwrap());
        let sampler = Sampler::new(&g, vocab.clone());
        let mut kb = KnowledgeBase::new(format!("micro{kbs}"));
        for _ in 0..rng.gen_range(1..=4) {
            if let Ok(ax) = sampler.statement(&mut rng) {
                let _ = kb.insert(ax);
            }
        }
        if kb.is_empty() {
            continue;
        }
        kbs += 1;
        for _ in 0..3 {
            let Ok(q) = sampler.statement(&mut rng) else {
                skipped += 1;
                continue;
            };
            match Reasoner::default().answer(&kb, &q) {
                Ok(got) => match oracle_agrees(&kb, &q, got) {
                    Some(true) => conclusive += 1,
                    Some(false) => wrong.push(format!("{got} on {q:?}")),
                    None => skipped += 1,
                },
                Err(ReasonerError::InconsistentKB) => {
                    match ModelSet::new(&kb, &[], 3, DEFAULT_ORACLE_BITS) {
                        Ok(m) if m.model_count() > 0 => wrong.push("oracle model of an inconsistent KB".into()),
                        Ok(_) => conclusive += 1,
                        Err(_) => skipped += 1,
                    }
                }
                Err(_) => skipped += 1,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        wrong.is_empty() && secs < 300.0,
        format!(
            "{kbs} micro-KBs, {conclusive} conclusive agreements, {} disagreements, {skipped} inconclusive, {secs:.1}s{}",
            wrong.len(),
            wrong.first().map(|w| format!("; first: {w}")).unwrap_or_default()
        ),
    )
}

/// Context lines, question, correct answer. `~q` asks for the negated role
/// assertion, answered by flipping the answer for `q`.
const QUALITY: &[(&[&str], &str, Answer)] = {
    use Answer::*;
    &[
        (&["(Red and Green)(Anne)"], "Red(Anne)", True),
        (&["(Red and Green)(Anne)"], "Green(Anne)", True),
        (&["Red(Anne)", "Green(Anne)"], "(Red and Green)(Anne)", True),
        (&["Blue subclassof Red and Green"], "Blue subclassof Red", True),
        (&["Blue subclassof Red and Green"], "Blue subclassof Green", True),
        (&["Blue subclassof Red", "Blue subclassof Green"], "Blue subclassof Red and Green", True),
        (&["Blue subclassof Red and Green"], "Blue subclassof Red or Green", True),
        (&["Red(Anne)", "Green(Anne)"], "(Red or Green)(Anne)", True),
        (&["(Red and Green)(Anne)"], "(Red or Green)(Anne)", True),
        (&["(Red and Green)(Anne)"], "(Green or Red)(Anne)", True),
        (&["(Red or Green)(Anne)"], "(Green or Red)(Anne)", True),
        (&["Blue or Red subclassof Green"], "Blue subclassof Green", True),
        (&["Blue or Red subclassof Green"], "Red subclassof Green", True),
        (&["Blue subclassof Green", "Red subclassof Green"], "Blue or Red subclassof Green", True),
        (&["Blue subclassof Green", "Red subclassof Green"], "Blue and Red subclassof Green", True),
        (
            &["some eats . (Red or Green) subclassof Blue"],
            "(some eats . Red) or (some eats . Green) subclassof Blue",
            True,
        ),
        (
            &["some eats . (Red or Green) subclassof Blue"],
            "some eats . (Red or Green) subclassof (some eats . Red) or (some eats . Green)",
            True,
        ),
        (
            &["some eats . (Red or Green) subclassof Blue"],
            "(some eats . Red) or (some eats . Green) subclassof some eats . (Red or Green)",
            True,
        ),
        (
            &["Blue subclassof some eats . (Red or Green)"],
            "Blue subclassof (some eats . Red) or (some eats . Green)",
            True,
        ),
        (
            &["only eats . (Red or Green) subclassof Blue"],
            "(only eats . Red) or (only eats . Green) subclassof Blue",
            True,
        ),
        (&["some eats . top subclassof Blue", "eats(Anne, Bob)", "Green(Bob)"], "Blue(Anne)", True),
        (&["some eats . top subclassof Blue", "eats(Anne, Bob)", "Green(Bob)"], "Green(Anne)", Unknown),
        (
            &["some eats . top subclassof Blue", "eats(Anne, Bob)", "Green(Bob)", "Blue subclassof not Green"],
            "Blue(Anne)",
            True,
        ),
        (
            &["some eats . top subclassof Blue", "eats(Anne, Bob)", "Green(Bob)", "Blue subclassof not Green"],
            "Green(Anne)",
            False,
        ),
        (&["top subclassof only likes . Nice", "(not Nice)(Bob)"], "likes(Anne, Bob)", False),
        (&["top subclassof only likes . Nice", "Nice(Bob)"], "likes(Anne, Bob)", Unknown),
        (
            &["(lessthan 2 likes . top)(Anne)", "likes(Anne, Bob)", "likes(Anne, John)"],
            "likes(Anne, Alice)",
            False,
        ),
        (&["likes(Anne, Bob)"], "(only likes . bottom)(Anne)", False),
        (
            &["likes(Anne, Bob)", "likes(Anne, John)", "likes(Anne, Alice)"],
            "(morethan 2 likes . top)(Anne)",
            True,
        ),
        (
            &["likes(Anne, Bob)", "likes(Anne, John)", "likes(Anne, Alice)"],
            "(morethan 4 likes . top)(Anne)",
            Unknown,
        ),
        (
            &["likes(Anne, Bob)", "likes(Anne, John)", "likes(Anne, Alice)"],
            "(not (lessthan 2 likes . top))(Anne)",
            True,
        ),
        (&["likes(Anne, Bob)"], "~likes(Anne, Bob)", False),
    ]
};

fn flip(a: Answer) -> Answer {
    match a {
        Answer::True => Answer::False,
        Answer::False => Answer::True,
        Answer::Unknown => Answer::Unknown,
    }
}

fn quality_corpus() -> Outcome {
    let mut misses = Vec::new();
    for (i, (context, question, expected)) in QUALITY.iter().enumerate() {
        let kb = parse_kb(&context.join("\n")).unwrap();
        let (text, negated) = match question.strip_prefix('~') {
            Some(rest) => (rest, true),
            None => (*question, false),
        };
        let q = parse_axiom(text).unwrap();
        let got = match Reasoner::default().answer(&kb, &q) {
            Ok(a) if negated => flip(a).to_string(),
            Ok(a) => a.to_string(),
            Err(e) => e.to_string(),
        };
        if got != expected.to_string() {
            misses.push(format!("row {} expected {expected}, got {got}", i + 1));
        }
    }
    let n = QUALITY.len();
    outcome(
        misses.is_empty(),
        format!("{}/{n} rows answered as tabulated; {}", n - misses.len(), misses.join("; ")),
    )
}

fn worked_example() -> Outcome {
    let kb = parse_kb("(only admires . bottom)(Anne)\nonly admires . bottom subclassof only likes . Quiet\n").unwrap();
    let q = parse_axiom("(some likes . not Quiet)(Anne)").unwrap();
    let e = Reasoner::default().explain(&kb, &q).unwrap();
    let j = e.justification.as_ref().map(|j| j.axioms.clone()).unwrap_or_default();
    let lex = Lexicalization::builtin();
    let glosses = [
        axiom_to_text_as(&kb.axioms()[0], &lex, Phrasing::IfThen),
        axiom_to_text_as(&kb.axioms()[1], &lex, Phrasing::AllPeopleThat),
    ];
    let expected = ["Anne admires none", "All people that admire none like only quiet people"];
    // the sampled context carries one of the phrasings plus a final period
    let sampled = (0..50u64)
        .map(|s| example_to_text(&kb, &[], &lex, &mut ChaCha8Rng::seed_from_u64(s)).context)
        .any(|c| c == expected.map(|g| format!("{g}.")));
    outcome(
        e.answer == Answer::False && j.len() == 2 && glosses == expected && sampled,
        format!("answer {}, justification {j:?}, glosses {glosses:?}, sampled context match {sampled}", e.answer),
    )
}

fn dataset_shape(dir: &Path) -> Outcome {
    let start = Instant::now();
    let generated = run(bin().args(["generate", "--count", "20", "--depth", "5", "--level", "3", "--pool", "both", "--out"]).arg(dir));
    if let Err(e) = generated {
        return outcome(false, format!("generate failed: {e}"));
    }
    let gen_time = start.elapsed();
    let files: Vec<_> = ["train", "validation", "test"].iter().map(|s| dir.join(format!("{s}.jsonl"))).collect();
    let verified = run(bin().arg("verify").args(&files).args(["--depth", "5"]));
    let records = read_split(dir);
    let shape = check_shape(&records, 5);
    let total = start.elapsed();
    let kbs: BTreeSet<_> = records.iter().map(|r| &r.kb_id).collect();
    let verify_line = match &verified {
        Ok(s) => s.lines().last().unwrap_or("").to_string(),
        Err(e) => e.lines().last().unwrap_or("").to_string(),
    };
    outcome(
        records.len() == 720 && kbs.len() == 40 && shape.is_empty() && verified.is_ok() && total < Duration::from_secs(1800),
        format!(
            "{} records from {} KBs, {} shape problems, verify: {verify_line}; generate {:.0}s, total {:.0}s",
            records.len(),
            kbs.len(),
            shape.len(),
            gen_time.as_secs_f64(),
            total.as_secs_f64()
        ),
    )
}

/// Whether some subset of `size` context axioms derives the record's answer.
fn smaller_exists(session: &mut alcq::reasoner::Session, q: &Axiom, n: usize, size: usize, answer: Answer) -> bool {
    // derivation is monotone in the axiom set, so size |J|-1 covers all smaller ones
    (0..n).combinations(size).any(|s| session.derives(q, &s, answer).unwrap_or(false))
}

fn justification_minimum(dir: &Path) -> Outcome {
    let records = read_split(dir);
    if records.is_empty() {
        return outcome(false, "no dataset from the shape run");
    }
    let mut decided: Vec<_> = records.iter().filter(|r| r.answer != Answer::Unknown).collect();
    decided.sort_by(|a, b| (&a.kb_id, a.slot, a.answer.letter()).cmp(&(&b.kb_id, b.slot, b.answer.letter())));
    decided.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    decided.truncate(100);
    let (mut ok, mut bad) = (0, Vec::new());
    let mut by_depth: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &decided {
        let kb = parse_kb(&r.formal.context.join("\n")).unwrap();
        let q = parse_axiom(&r.formal.question).unwrap();
        let mut session = Reasoner::default().session(&kb).unwrap();
        let j = &r.justification;
        *by_depth.entry(j.len()).or_default() += 1;
        let derives = session.derives(&q, j, r.answer).unwrap_or(false);
        let minimal = (0..j.len()).all(|skip| {
            let rest: Vec<usize> = j.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
            !session.derives(&q, &rest, r.answer).unwrap_or(true)
        });
        let minimum = !smaller_exists(&mut session, &q, kb.len(), j.len() - 1, r.answer);
        if derives && minimal && minimum {
            ok += 1;
        } else {
            bad.push(format!("{} slot {} {}", r.kb_id, r.slot, r.answer));
        }
    }
    outcome(
        ok == decided.len() && ok == 100,
        format!("{ok}/{} sampled T/F queries minimal and minimum; sizes {by_depth:?} {}", decided.len(), bad.join(", ")),
    )
}

fn not_rates(records: &Dataset) -> Outcome {
    let s = stats_report(records);
    let rates: Vec<(String, f64)> = s.per_answer.iter().map(|(k, a)| (k.clone(), 100.0 * a.not_rate)).collect();
    let hi = rates.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let lo = rates.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let shown = rates.iter().map(|(k, r)| format!("{k} {r:.2}%")).join(", ");
    outcome(
        s.total >= 1000 && rates.len() == 3 && hi - lo <= 10.0,
        format!("{} records; not-rates {shown}; spread {:.2} points", s.total, hi - lo),
    )
}

fn template_exactness() -> Outcome {
    let lex = Lexicalization::builtin();
    let people = |src: &str, p| axiom_to_text_as(&parse_axiom(src).unwrap(), &lex, p);
    let fixed = |src: &str, p| alcq::nl::fixup_grammar(&people(src, p));
    let b = RenamingMap::for_pool(&pool(PoolName::B));
    let hard = |src: &str| hard_symbolic(&parse_axiom(src).unwrap(), &b).unwrap();
    let soft = |s: &str| alcq::nl::soft_symbolic(s, &b, &lex).unwrap();
    let cases: Vec<(String, &str)> = vec![
        (people("(only admires . bottom)(Anne)", Phrasing::IfThen), "Anne admires none"),
        (
            people("only admires . bottom subclassof only likes . Quiet", Phrasing::AllPeopleThat),
            "All people that admire none like only quiet people",
        ),
        (people("(Red and Green)(Anne)", Phrasing::IfThen), "Anne is red and green"),
        (people("Blue subclassof Red and Green", Phrasing::IfThen), "If someone is blue, then they are red and green"),
        (people("top subclassof only likes . Nice", Phrasing::IfThen), "Someone can like only people that are nice"),
        (people("(morethan 2 likes . top)(Anne)", Phrasing::IfThen), "Anne likes more than two people"),
        (people("(morethan 4 likes . top)(Anne)", Phrasing::IfThen), "Anne likes more than four people"),
        (people("(not (lessthan 2 likes . top))(Anne)", Phrasing::IfThen), "Anne does not like less than two people"),
        (people("(lessthan 2 likes . top)(Anne)", Phrasing::IfThen), "Anne likes less than two people"),
        (people("likes(Anne, Bob)", Phrasing::IfThen), "Anne likes Bob"),
        (people("(only likes . bottom)(Anne)", Phrasing::IfThen), "Anne likes none"),
        (
            people("Enthusiastic subclassof some supports . Enthusiastic", Phrasing::PeopleThat),
            "Enthusiastic people support someone enthusiastic",
        ),
        (
            fixed("(lessthan 1 supports . (Confident or not Persevering))(Maria)", Phrasing::IfThen),
            "Maria supports less than one people that are confident or not persevering.",
        ),
        (
            fixed(
                "not Confident subclassof some mentors . (Ambitious and lessthan 1 supervises . Creative)",
                Phrasing::IfThen,
            ),
            "If someone is not confident, then they mentor someone that is ambitious and that supervises less than one creative people.",
        ),
        (
            fixed(
                "some mentors . (Ambitious and lessthan 1 supervises . Creative) subclassof only guides . (not Persevering or atmost 2 consults . Confident)",
                Phrasing::IfThen,
            ),
            "If someone mentors someone that is ambitious and that supervises less than one creative people, then they guide only people that are not persevering or that consult at most two confident people.",
        ),
        (
            soft("Maria supports less than one people that are confident or not persevering."),
            "a4 R8 less than one people that are C2 or not C8.",
        ),
        (
            soft("If someone mentors someone that is ambitious and that supervises less than one creative people, then they guide only people that are not persevering or that consult at most two confident people."),
            "If someone R6 someone that is C1 and that R7 less than one C3 people, then they R3 only people that are not C8 or that R2 at most two C2 people.",
        ),
        (
            hard("(lessthan 1 supports . (Confident or not Persevering))(Maria)"),
            "( < 1 R8 . ( ( + C2 ) or ( not C8 ) ) ) ( a4 )",
        ),
        (
            hard("not Confident subclassof some mentors . (Ambitious and lessthan 1 supervises . Creative)"),
            "not C2 is subsumed by exists R6 . ( ( + C1 ) and ( < 1 R7 . ( + C3 ) ) )",
        ),
        (
            hard("some mentors . (Ambitious and lessthan 1 supervises . Creative) subclassof only guides . (not Persevering or atmost 2 consults . Confident)"),
            "exists R6 . ( ( + C1 ) and ( < 1 R7 . ( + C3 ) ) ) is subsumed by only R3 . ( ( not C8 ) or ( ≤ 2 R2 . ( + C2 ) ) )",
        ),
        (hard("Ambitious(Ioanna)"), "( + C1 ) ( a1 )"),
    ];
    let wrong: Vec<_> = cases.iter().filter(|(got, want)| got != want).map(|(got, want)| format!("{got:?} != {want:?}")).collect();
    outcome(wrong.is_empty(), format!("{}/{} sentences exact {}", cases.len() - wrong.len(), cases.len(), wrong.join("; ")))
}

fn complexity(records: &Dataset) -> Outcome {
    let kbs: BTreeSet<_> = records.iter().map(|r| &r.kb_id).collect();
    let h = complexity_histogram(records, Some(Level::new(3).unwrap()));
    outcome(
        kbs.len() >= 200 && h.both_at_least_two >= 25.0,
        format!(
            "{} L3 KBs, {} justification axioms, {:.1}% with >=2 connectives and >=2 quantifiers ({:.1}% with either)",
            kbs.len(),
            h.axioms,
            h.both_at_least_two,
            h.either_at_least_two
        ),
    )
}

fn determinism(root: &Path) -> Outcome {
    let config = root.join("small.toml");
    std::fs::write(&config, "pools = [\"A\", \"B\"]\ndepth = 2\nlevel = 2\ncount = 3\nseed = 17\nsymbolic = \"soft\"\n")
        .unwrap();
    let generate = |name: &str, seed: Option<&str>| {
        let out = root.join(name);
        let mut cmd = bin();
        cmd.env_remove("DELTA_SEED").args(["generate", "--config"]).arg(&config).arg("--out").arg(&out);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        run(&mut cmd).map(|_| out)
    };
    let (Ok(a), Ok(b), Ok(c)) = (generate("a", None), generate("b", None), generate("c", Some("18"))) else {
        return outcome(false, "generate failed");
    };
    let files = ["train.jsonl", "validation.jsonl", "test.jsonl"];
    let bytes = |d: &Path| files.iter().map(|f| std::fs::read(d.join(f)).unwrap()).collect::<Vec<_>>();
    let identical = bytes(&a) == bytes(&b);
    let changed = bytes(&a) != bytes(&c);
    let other = read_split(&c);
    let shape = check_shape(&other, 2);
    let verified = verify_records(&other).failures.is_empty();
    outcome(
        identical && changed && shape.is_empty() && verified && other.len() == 6 * 9,
        format!(
            "same seed identical {identical}; new seed changed {changed}, {} records, {} shape problems, labels verified {verified}",
            other.len(),
            shape.len()
        ),
    )
}

fn balance_run() -> Dataset {
    let mut cfg = PipelineConfig::new(PoolName::all().to_vec(), 2, Level::new(3).unwrap(), 100, 31);
    cfg.max_retries = 1000;
    run_generation(&cfg).map(|g| g.dataset).unwrap_or_default()
}

fn main() {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |n: u32| wanted.is_empty() || wanted.contains(&n);
    let root = tempfile::tempdir().unwrap();
    let shape_dir = root.path().join("shape");
    let mut balance: Option<Dataset> = None;
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("{} {n} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };
    if want(1) {
        report(1, "oracle agreement", oracle_agreement());
    }
    if want(2) {
        report(2, "quality corpus", quality_corpus());
    }
    if want(3) {
        report(3, "worked example", worked_example());
    }
    if want(4) || want(5) {
        let o = dataset_shape(&shape_dir);
        if want(4) {
            report(4, "dataset shape", o);
        }
    }
    if want(5) {
        report(5, "justification minimality", justification_minimum(&shape_dir));
    }
    if want(6) || want(8) {
        balance = Some(balance_run());
    }
    if want(6) {
        report(6, "not-rate balance", not_rates(balance.as_ref().unwrap()));
    }
    if want(7) {
        report(7, "template exactness", template_exactness());
    }
    if want(8) {
        report(8, "complexity distribution", complexity(balance.as_ref().unwrap()));
    }
    if want(9) {
        report(9, "determinism", determinism(root.path()));
    }

    let mut broken = Vec::new();
    for (n, name, o) in &results {
        match KNOWN_RED.iter().find(|(k, _)| k == n) {
            Some((_, why)) if !o.pass => println!("known red {n} {name}: {why}"),
            Some(_) => broken.push(format!("criterion {n} is listed as known red but passed")),
            None if !o.pass => broken.push(format!("criterion {n} {name} failed")),
            None => {}
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if !broken.is_empty() {
        for b in &broken {
            eprintln!("{b}");
        }
        std::process::exit(1);
    }
}
