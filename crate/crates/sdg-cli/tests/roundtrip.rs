//! Round-trip properties of the file formats and JSON reports.

use proptest::prelude::*;

use sdg::treedecomp::{from_elimination_order, heuristic_order};
use sdg::{Mode, Outcome, ScoringVector, SocialNetwork, Tail};
use sdg_cli::bench::{bench_row, dump_smallest_failure, BenchRow};
use sdg_cli::exit;
use sdg_cli::formats::{parse_graph, parse_nae, parse_outcome, parse_td, write_graph, write_nae, write_outcome, write_td};
use sdg_cli::generators::random_nae;
use sdg_cli::report::{Report, Status};
use sdg_cli::run::{check_report, solve_report, Algorithm};

fn graph() -> impl Strategy<Value = SocialNetwork> {
    (1usize..9).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m)
            .prop_map(move |keep| {
                let e: Vec<_> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p).collect();
                SocialNetwork::from_edges(n, &e)
            })
    })
}

fn graph_and_outcome() -> impl Strategy<Value = (SocialNetwork, Outcome)> {
    graph().prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(0usize..n, n).prop_map(move |labels| (g.clone(), Outcome::from_labels(&labels)))
    })
}

fn scoring() -> impl Strategy<Value = ScoringVector> {
    (proptest::collection::vec(-3i64..4, 1..4), any::<bool>()).prop_map(|(mut v, open)| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        ScoringVector::new(v, if open { Tail::Open } else { Tail::Closed }).unwrap()
    })
}

proptest! {
    #[test]
    fn graphs_round_trip(g in graph()) {
        prop_assert_eq!(parse_graph(&write_graph(&g, &["comment".to_string()])).unwrap(), g);
    }

    #[test]
    fn outcomes_round_trip((g, p) in graph_and_outcome()) {
        prop_assert_eq!(parse_outcome(&write_outcome(&p), g.n()).unwrap(), p);
    }

    #[test]
    fn decompositions_round_trip(g in graph()) {
        let t = from_elimination_order(&g, &heuristic_order(&g));
        let back = parse_td(&write_td(&t, g.n()), g.n()).unwrap();
        prop_assert_eq!(&back.bags, &t.bags);
        prop_assert_eq!(&back.edges, &t.edges);
        prop_assert!(sdg::treedecomp::validate(&g, &back).is_ok());
    }

    #[test]
    fn formulas_round_trip(vars in 1usize..6, clauses in 0usize..5, seed in any::<u64>()) {
        let f = random_nae(vars, clauses, seed).unwrap();
        prop_assert_eq!(parse_nae(&write_nae(&f)).unwrap(), f);
    }

    #[test]
    fn check_reports_round_trip((g, p) in graph_and_outcome(), s in scoring(), mode in 0usize..3) {
        let r = check_report(Some("x.gr".into()), &s, &g, &p, Mode::ALL[mode]);
        prop_assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn solve_reports_round_trip(g in graph(), s in scoring(), mode in 0usize..3) {
        let r = solve_report(None, &s, &g, Mode::ALL[mode], Algorithm::Auto, None, None).unwrap();
        prop_assert_eq!(r.status, Status::Solved);
        prop_assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}

#[test]
fn infeasible_reports_exit_two() {
    let g = SocialNetwork::from_edges(2, &[(0, 1)]);
    let mut r = solve_report(None, &ScoringVector::closed(&[1]), &g, Mode::Ns, Algorithm::Brute, None, None).unwrap();
    assert_eq!(r.exit_code(), exit::OK);
    r.status = Status::Infeasible;
    r.welfare = None;
    r.coalitions.clear();
    r.certificate = None;
    assert_eq!(r.exit_code(), exit::NO_STABLE_OUTCOME);
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn disagreement_dumps_smallest_instance() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("fail.gr");
    let big = SocialNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
    let small = SocialNetwork::from_edges(3, &[(0, 1), (1, 2)]);
    let s = ScoringVector::closed(&[1, -3]);
    let mut rows: Vec<BenchRow> = vec![
        bench_row("big", &big, &s, Mode::Welfare, &[Algorithm::Brute, Algorithm::Vc]),
        bench_row("small", &small, &s, Mode::Welfare, &[Algorithm::Brute, Algorithm::Vc]),
    ];
    assert!(rows.iter().all(|r| r.agree));
    let instances = vec![("big".to_string(), big), ("small".to_string(), small.clone())];
    assert_eq!(dump_smallest_failure(&rows, &instances, &dump).unwrap(), None);
    assert!(!dump.exists());
    for r in &mut rows {
        r.agree = false;
    }
    let f = dump_smallest_failure(&rows, &instances, &dump).unwrap().unwrap();
    assert_eq!(f.row.instance, "small");
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(parse_graph(&text).unwrap(), small);
    assert!(text.contains("c disagreement on small"));
}
