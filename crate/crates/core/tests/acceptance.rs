//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{corpus, corpus_path, langlogic, oracle, run_in_process, tamper, VARIANTS};
use langlogic::assertion::{atoms_of, conjoin, entails, Assertion, Atom, SignedAtom};
use langlogic::grammar::CategoryIndex;
use langlogic::prover::{check_derivation, check_derivation_detailed, prove, ProofNode, ProofResult, ProverConfig};
use langlogic::syntax::{render_language, validate_language};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn path(variant: &str) -> String {
    corpus_path(variant).to_string_lossy().into_owned()
}

/// Runs `prove` as a subprocess; returns the exit code and parsed JSON.
fn prove_json(variant: &str, goal: &str) -> Result<(i32, Value), String> {
    let p = path(variant);
    let out = langlogic(&["prove", &p, "--goal", goal, "--format", "json"]);
    let json = serde_json::from_str(&out.stdout).map_err(|e| format!("{variant}: bad JSON ({e}): {}", out.stderr))?;
    Ok((out.code, json))
}

fn expect_proof(variant: &str, goal: &str) -> Check {
    let (code, json) = prove_json(variant, goal)?;
    ensure(code == 0, || format!("{goal} on {variant}: exit {code}, expected 0"))?;
    let tree: ProofNode = serde_json::from_value(json).map_err(|e| e.to_string())?;
    check_derivation_detailed(&corpus(variant), &tree).map_err(|e| format!("{goal} on {variant}: {e}"))
}

fn expect_miss(variant: &str, goal: &str, at: &str, cites: &str) -> Check {
    let (code, json) = prove_json(variant, goal)?;
    ensure(code == 3, || format!("{goal} on {variant}: exit {code}, expected 3"))?;
    let misses = json["nearest_misses"].as_array().cloned().unwrap_or_default();
    ensure(
        misses.iter().any(|m| {
            m["at"].as_str().is_some_and(|s| s.starts_with(at))
                && m["reason"].as_str().is_some_and(|r| r.contains(cites))
        }),
        || format!("{goal} on {variant}: no nearest miss at {at} citing \"{cites}\" in {misses:?}"),
    )
}

fn criterion_1() -> Check {
    expect_miss(VARIANTS[0], "no-dupli-ef([CBN-BETA])", "[CBN-BETA]", "C[t″[e2/x]]")?;
    expect_proof(VARIANTS[1], "no-dupli-ef([BETA])")
}

fn criterion_2() -> Check {
    expect_miss(VARIANTS[1], "ctx-compliant([BETA])", "[BETA]", "2 ∉ {1}")?;
    expect_proof(VARIANTS[2], "ctx-compliant([BETA])")
}

/// Path of rule names from the root to the first node satisfying `pred`.
fn rule_path(n: &ProofNode, pred: &dyn Fn(&ProofNode) -> bool) -> Option<Vec<String>> {
    if pred(n) {
        return Some(vec![n.rule.to_string()]);
    }
    n.children.iter().find_map(|c| {
        rule_path(c, pred).map(|mut p| {
            p.insert(0, n.rule.to_string());
            p
        })
    })
}

fn adds(n: &ProofNode, atom: &Atom) -> bool {
    let (Ok(pre), Ok(post)) = (atoms_of(&n.pre), atoms_of(&n.post)) else {
        return false;
    };
    let a = SignedAtom::positive(atom.clone());
    !pre.contains(&a) && post.contains(&a)
}

fn criterion_3() -> Check {
    expect_miss(VARIANTS[2], "error-handler(try, 1)", "[ERR]", "1 ∈ {1}")?;
    expect_proof(VARIANTS[3], "error-handler(try, 1)")?;
    let (_, json) = prove_json(VARIANTS[3], "error-handler(try, 1)")?;
    let tree: ProofNode = serde_json::from_value(json).map_err(|e| e.to_string())?;
    let compliant = Atom::CtxCompliant { rule: "ERR".into() };
    let handler = Atom::ErrorHandler {
        constructor: "try".into(),
        position: 1,
    };
    let is_target = |n: &ProofNode| {
        n.rule.to_string() == "iterate"
            && n.children.len() == 2
            && n.children[0].rule.to_string() == "ctx-compliant"
            && adds(&n.children[0], &compliant)
            && adds(n, &handler)
    };
    let names = rule_path(&tree, &is_target).ok_or("no (iterate) node starting with ctx-compliant([ERR])")?;
    let head = ["consequence", "lang", "perm-r"];
    ensure(names[..3] == head, || format!("unexpected path {names:?}"))?;
    let rest = &names[3..];
    let inf_at = rest.iter().position(|r| r == "inf").ok_or("no (inf) on the path")?;
    ensure(
        rest[..inf_at].iter().all(|r| r == "iterate") && rest[inf_at + 1..] == ["iterate"],
        || format!("unexpected path {names:?}"),
    )
}

fn criterion_4() -> Check {
    expect_miss(
        VARIANTS[3],
        "contra-resp([T-APP-BAD], arrow)",
        "[T-APP-BAD]",
        "T1 <: T3",
    )?;
    expect_proof(VARIANTS[4], "contra-resp([T-APP], arrow)")
}

fn derived_lines(variant_path: &str) -> Result<BTreeSet<String>, String> {
    let out = langlogic(&["derive", variant_path]);
    ensure(out.code == 0, || format!("derive {variant_path}: exit {}", out.code))?;
    Ok(out.stdout.lines().map(str::to_string).collect())
}

fn criterion_5() -> Check {
    for (i, v) in VARIANTS.iter().enumerate() {
        let lines = derived_lines(&path(v))?;
        let mut want = vec!["ctx(T, arrow, {1,2})", "contravariant(arrow, {1})", "effectful(1)"];
        if i >= 2 {
            want.push("ctx(E, app, {1,2})");
        }
        if i >= 3 {
            want.push("ctx(F, try, {})");
        }
        for w in want {
            ensure(lines.contains(w), || format!("{v}: {w} not derived"))?;
        }
        // [PRINT] is the rule that changes the state
        let lang = corpus(v);
        let print = lang.rule("PRINT").ok_or("no [PRINT]")?;
        ensure(
            langlogic::rules::try_effectful(print).atom() == Some(&Atom::Effectful { state_position: 1 }),
            || format!("{v}: [PRINT] is not effectful(1)"),
        )?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    let p = path("stlc");
    let out = langlogic(&["check", &p]);
    ensure(out.code == 0, || {
        format!("check stlc: exit {}: {}", out.code, out.stdout)
    })?;
    ensure(validate_language(&corpus("stlc")).is_empty(), || {
        "stlc has findings".into()
    })?;
    let lines = derived_lines(&p)?;
    for w in ["ctx(C, app, {1,2})", "ctx-compliant([BETA])"] {
        ensure(lines.contains(w), || format!("stlc: {w} not derived"))?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    let lang = corpus(VARIANTS[4]);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let baseline = run_in_process(&["derive", &path(VARIANTS[4])]);
    ensure(baseline.code == 0, || "baseline derive failed".into())?;
    let mut rng = StdRng::seed_from_u64(7);
    for i in 0..50 {
        let mut shuffled = lang.clone();
        shuffled.grammar.shuffle(&mut rng);
        shuffled.rules.shuffle(&mut rng);
        let file = dir.path().join(format!("shuffle{i}.lan"));
        std::fs::write(&file, render_language(&shuffled)).map_err(|e| e.to_string())?;
        let out = run_in_process(&["derive", file.to_str().unwrap()]);
        ensure(out.code == 0 && out.stdout == baseline.stdout, || {
            format!("shuffle {i}: derive output differs")
        })?;
    }
    Ok(())
}

fn random_flat(rng: &mut impl Rng, pool: &[Atom]) -> Assertion {
    let mut acc: Option<Assertion> = None;
    for _ in 0..rng.gen_range(0..6) {
        let mut a = Assertion::atom(pool.choose(rng).unwrap().clone());
        if rng.gen_bool(0.2) {
            a = Assertion::not(a);
        }
        acc = Some(match acc {
            None => a,
            Some(p) if rng.gen_bool(0.5) => Assertion::and(p, a),
            Some(p) => Assertion::and(a, p),
        });
    }
    match acc {
        Some(a) if rng.gen_bool(0.2) => Assertion::and(a, Assertion::True),
        Some(a) => a,
        None => Assertion::True,
    }
}

fn atom_pool() -> Vec<Atom> {
    vec![
        Atom::ctx("E", "app", [1, 2]),
        Atom::ctx("E", "app", [1]),
        Atom::ctx("F", "try", []),
        Atom::CtxCompliant { rule: "BETA".into() },
        Atom::ErrorHandler {
            constructor: "try".into(),
            position: 1,
        },
        Atom::Effectful { state_position: 1 },
        Atom::NoDupliEf { rule: "BETA".into() },
        Atom::contravariant("arrow", [1]),
        Atom::ContraResp {
            rule: "T-APP".into(),
            constructor: "arrow".into(),
        },
    ]
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let pool = atom_pool();
    let e = |p: &Assertion, q: &Assertion| entails(p, q).unwrap();
    for i in 0..500 {
        let p = random_flat(&mut rng, &pool);
        let q = random_flat(&mut rng, &pool);
        let r = random_flat(&mut rng, &pool);
        ensure(e(&p, &p), || format!("case {i}: reflexivity fails for {p}"))?;
        ensure(!(e(&p, &q) && e(&q, &r)) || e(&p, &r), || {
            format!("case {i}: transitivity fails")
        })?;
        let pq = Assertion::and(p.clone(), q.clone());
        ensure(e(&pq, &p) && e(&pq, &q), || {
            format!("case {i}: conjunct-subset fails for {pq}")
        })?;
        ensure(e(&pq, &q), || format!("case {i}: forgetting fails"))?;
        ensure(e(&p, &Assertion::True), || format!("case {i}: true is not entailed"))?;
        let a = pool.choose(&mut rng).unwrap().clone();
        ensure(e(&conjoin(&p, a), &p), || format!("case {i}: conjoin dropped atoms"))?;
        let mutual = e(&p, &q) && e(&q, &p);
        ensure(mutual == (atoms_of(&p).unwrap() == atoms_of(&q).unwrap()), || {
            format!("case {i}: mutual entailment is not set equality")
        })?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let mut positives = 0;
    for g in 0..200 {
        let grammar = oracle::random_grammar(&mut rng);
        let idx = CategoryIndex::new(&grammar);
        for (mv, t) in oracle::random_queries(&mut rng, &grammar, 20) {
            let expected = oracle::oracle_derives(&grammar, &mv, &t);
            positives += usize::from(expected);
            ensure(idx.derives(&mv, &t) == expected, || {
                format!("grammar {g}: {mv} ⇒* {t}: oracle says {expected}; grammar {grammar:?}")
            })?;
        }
    }
    ensure(positives > 400, || {
        format!("only {positives} derivable queries; sample is too one-sided")
    })
}

fn corpus_goals() -> Vec<(&'static str, String)> {
    let mut goals: Vec<(&str, String)> = vec![
        (VARIANTS[1], "no-dupli-ef([BETA])".into()),
        (VARIANTS[2], "ctx-compliant([BETA])".into()),
        (VARIANTS[3], "error-handler(try, 1)".into()),
        (VARIANTS[4], "contra-resp([T-APP], arrow)".into()),
        ("stlc", "ctx(C, app, {1,2}) /\\ ctx-compliant([BETA])".into()),
    ];
    for v in VARIANTS.iter().copied().chain(["stlc"]) {
        goals.push((v, "true".into()));
        let sat = langlogic::prover::saturate(&corpus(v), &Assertion::True, &ProverConfig::default()).unwrap();
        goals.push((v, sat.assertion().to_string()));
    }
    goals
}

fn criterion_10() -> Check {
    for (v, goal) in corpus_goals() {
        let lang = corpus(v);
        let goal = langlogic::assertion::parse_assertion(&goal).map_err(|e| e.to_string())?;
        match prove(&lang, &Assertion::True, &goal, &ProverConfig::default()).map_err(|e| e.to_string())? {
            ProofResult::Proved(tree) => {
                // check the tree as a consumer of the JSON output sees it
                let json = serde_json::to_string(&tree).map_err(|e| e.to_string())?;
                let back: ProofNode = serde_json::from_str(&json).map_err(|e| e.to_string())?;
                ensure(back == tree, || format!("{v}: JSON round trip changed the tree"))?;
                check_derivation_detailed(&lang, &back).map_err(|e| format!("{v}: emitted tree rejected: {e}"))?;
            }
            ProofResult::NoProof(r) => return Err(format!("{v}: no proof of {goal}: {r}")),
        }
    }
    let lang = corpus(VARIANTS[3]);
    let goal = langlogic::assertion::parse_assertion("error-handler(try, 1)").unwrap();
    let ProofResult::Proved(tree) = prove(&lang, &Assertion::True, &goal, &ProverConfig::default()).unwrap() else {
        return Err("fixed3 has no proof of error-handler(try, 1)".into());
    };
    let cases = tamper::tampered(&tree);
    ensure(cases.len() == 20, || {
        format!("{} tampered trees, expected 20", cases.len())
    })?;
    for (name, t) in cases {
        ensure(t != tree, || format!("tampering \"{name}\" changed nothing"))?;
        ensure(!check_derivation(&lang, &t), || {
            format!("tampered tree accepted: {name}")
        })?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("issue 1a: no-dupli-ef fails on faulty, holds on fixed1", criterion_1),
        (
            "issue 1b: ctx-compliant([BETA]) fails on fixed1, holds on fixed2",
            criterion_2,
        ),
        (
            "issue 2: error-handler(try, 1) fails on fixed2, holds on fixed3",
            criterion_3,
        ),
        ("issue 3: contra-resp fails on fixed3, holds on fixed4", criterion_4),
        ("golden atoms on every variant", criterion_5),
        ("stlc parses, validates and derives", criterion_6),
        ("permutation invariance over 50 shuffles", criterion_7),
        ("entailment laws on 500 random assertions", criterion_8),
        ("derives agrees with the BFS oracle on 200 grammars", criterion_9),
        ("emitted trees check, 20 tampered trees do not", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = f();
        let elapsed = start.elapsed();
        if result.is_ok() && elapsed >= Duration::from_secs(1) {
            result = Err(format!("took {elapsed:?}"));
        }
        match result {
            Ok(()) => println!("criterion {}: PASS ({name}) [{} ms]", i + 1, elapsed.as_millis()),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
