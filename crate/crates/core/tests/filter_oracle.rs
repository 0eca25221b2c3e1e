mod common;

use exmeth::filter::classify;
use exmeth::{parse_method, ExtractSuggestion, FilterConfig, ReasonCode};
use proptest::prelude::*;

use common::generate;

#[test]
fn classification_matches_brute_force() {
    let run = common::filter_oracle(7, 400, 5);
    assert!(run.instances >= 1000);
    for r in [
        ReasonCode::ScopeUnbalanced,
        ReasonCode::VariableInaccessible,
        ReasonCode::MultipleReturns,
        ReasonCode::ControlFlowEscape,
        ReasonCode::WholeMethod,
        ReasonCode::OneLiner,
        ReasonCode::Ok,
    ] {
        assert!(
            run.seen.get(&r).copied().unwrap_or(0) > 10,
            "{r:?} rarely produced: {:?}",
            run.seen
        );
    }
    assert!(
        run.mismatches.is_empty(),
        "{} of {} differ; first:\n{}",
        run.mismatches.len(),
        run.instances,
        run.mismatches[0]
    );
}

#[test]
fn live_sets_match_brute_force() {
    for seed in 0..200u64 {
        let g = generate(1000 + seed, 20);
        let m = parse_method("G.java", &g.source, g.host).unwrap();
        for i in 0..g.lines.len() {
            for j in i..g.lines.len() {
                if !g.balanced(i, j) || g.lines[i..=j].iter().any(|l| l.kind == common::Kind::Stray)
                {
                    continue;
                }
                let range = m
                    .statements_in(exmeth::LineSpan::new(g.line_of(i), g.line_of(j)))
                    .unwrap();
                let names =
                    |vs: Vec<usize>| vs.into_iter().map(|v| m.variable(v).name.clone()).collect();
                let out: std::collections::BTreeSet<String> = names(m.live_out_vars(range));
                let inn: std::collections::BTreeSet<String> = names(m.live_in_vars(range));
                assert_eq!(
                    out,
                    g.live_out(i, j),
                    "seed {seed} live-out {i}-{j}\n{}",
                    g.source
                );
                assert_eq!(
                    inn,
                    g.live_in(i, j),
                    "seed {seed} live-in {i}-{j}\n{}",
                    g.source
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn widening_never_shrinks_and_is_balanced(seed in any::<u64>(), x in 0usize..60, y in 0usize..60) {
        let g = generate(seed, 25);
        let m = parse_method("G.java", &g.source, g.host).unwrap();
        let n = g.lines.len();
        let (a, b) = (g.line_of(x.min(y) % n), g.line_of(x.max(y) % n));
        let (a, b) = (a.min(b), a.max(b));
        let v = classify(&m, &ExtractSuggestion::new("f", a, b), &FilterConfig::default());
        let (s, e) = v.suggestion.key();
        prop_assert!(s <= a && b <= e);
        let range = m.statements_in(exmeth::LineSpan::new(s, e)).unwrap();
        prop_assert!(m.is_balanced(range));
        let again = classify(&m, &v.suggestion, &FilterConfig::default());
        prop_assert_eq!(again.suggestion.key(), (s, e));
        prop_assert_eq!(again.reason, v.reason);
    }
}
