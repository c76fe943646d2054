//! Invariants of the game model, the stability checks and the solvers,
//! checked on random small instances, plus a handful of worked examples.

mod common;

use common::*;
use proptest::prelude::*;
use sdg::bounds::certify_outcome;
use sdg::eval::{coalition_welfare, utilities};
use sdg::fptdp::solve_fpt;
use sdg::oracle::{brute_force_solve, brute_force_solve_with, decide_welfare_at_least, enumerate_partitions, OracleConfig};
use sdg::stability::{find_deviation, is_individually_rational, is_nash_stable, satisfies, DeviationKind};
use sdg::treedecomp::{compute_decomposition, make_nice, validate};
use sdg::twdp::solve_tw;
use sdg::ExtendedValue::{Finite, NegInf};
use sdg::{coalition_diameter, coalition_distance, score_at, social_welfare, ExtendedValue, Mode, Outcome, ScoringVector, SocialNetwork, Tail};

fn graph(max_n: usize) -> impl Strategy<Value = SocialNetwork> {
    (1usize..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            let e: Vec<_> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p).collect();
            SocialNetwork::from_edges(n, &e)
        })
    })
}

fn graph_and_outcome(max_n: usize) -> impl Strategy<Value = (SocialNetwork, Outcome)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(0usize..n, n).prop_map(move |labels| (g.clone(), Outcome::from_labels(&labels)))
    })
}

fn scoring(tail: Option<Tail>) -> impl Strategy<Value = ScoringVector> {
    (proptest::collection::vec(-3i64..4, 1..4), any::<bool>()).prop_map(move |(mut v, open)| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        let t = tail.unwrap_or(if open { Tail::Open } else { Tail::Closed });
        ScoringVector::new(v, t).unwrap()
    })
}

fn mode() -> impl Strategy<Value = Mode> {
    (0usize..3).prop_map(|i| Mode::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scores_are_non_increasing(s in scoring(None), d in 1usize..8) {
        prop_assert!(s.score(d) >= s.score(d + 1));
        prop_assert_eq!(score_at(&s, Finite(d as i64)).unwrap(), s.score(d));
    }

    #[test]
    fn distances_are_symmetric((g, p) in graph_and_outcome(7)) {
        for c in p.coalitions() {
            for &i in c {
                prop_assert_eq!(coalition_distance(&g, c, i, i).unwrap(), Finite(0));
                for &j in c {
                    prop_assert_eq!(coalition_distance(&g, c, i, j).unwrap(), coalition_distance(&g, c, j, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn welfare_is_the_sum_of_utilities((g, p) in graph_and_outcome(7), s in scoring(None)) {
        let sum = utilities(&s, &g, &p).into_iter().fold(Finite(0), |a, u| a + u);
        prop_assert_eq!(social_welfare(&s, &g, &p), sum);
        let per_coalition = p.coalitions().iter().fold(Finite(0), |a, c| a + coalition_welfare(&s, &g, c));
        prop_assert_eq!(social_welfare(&s, &g, &p), per_coalition);
    }

    #[test]
    fn utility_is_finite_iff_coalition_is_reachable((g, p) in graph_and_outcome(7), s in scoring(None)) {
        let u = utilities(&s, &g, &p);
        for c in p.coalitions() {
            let diam = coalition_diameter(&g, c);
            let reachable = match diam {
                NegInf => false,
                Finite(d) => s.tail() == Tail::Open || d as usize <= s.delta(),
            };
            if reachable {
                prop_assert!(c.iter().all(|&i| !u[i].is_neg_inf()));
            } else {
                prop_assert!(c.iter().any(|&i| u[i].is_neg_inf()));
            }
        }
    }

    #[test]
    fn outcomes_are_canonical((g, p) in graph_and_outcome(7)) {
        let again = Outcome::new(g.n(), p.coalitions().iter().rev().cloned().collect()).unwrap();
        prop_assert_eq!(&again, &p);
        let firsts: Vec<usize> = p.coalitions().iter().map(|c| c[0]).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.coalitions().iter().all(|c| c.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn singletons_have_zero_welfare_and_are_ir(g in graph(7), s in scoring(None)) {
        let p = Outcome::singletons(g.n());
        prop_assert_eq!(social_welfare(&s, &g, &p), Finite(0));
        prop_assert!(is_individually_rational(&s, &g, &p));
    }

    #[test]
    fn nash_stability_implies_individual_rationality((g, p) in graph_and_outcome(7), s in scoring(None)) {
        if is_nash_stable(&s, &g, &p) {
            prop_assert!(is_individually_rational(&s, &g, &p));
        }
    }

    #[test]
    fn deviations_witness_the_predicates((g, p) in graph_and_outcome(7), s in scoring(None), m in mode()) {
        let dev = find_deviation(&s, &g, &p, m);
        prop_assert_eq!(dev.is_none(), satisfies(&s, &g, &p, m));
        if let Some(d) = dev {
            prop_assert!(d.after > d.before);
            let target = match d.kind {
                DeviationKind::ToSingleton => None,
                DeviationKind::ToCoalition => d.target,
            };
            prop_assert_eq!(d.kind == DeviationKind::ToSingleton, d.target.is_none());
            let moved = p.with_move(d.agent, target);
            prop_assert_eq!(utilities(&s, &g, &moved)[d.agent], d.after);
            if m == Mode::Ir {
                prop_assert_eq!(d.kind, DeviationKind::ToSingleton);
            }
        }
    }

    #[test]
    fn oracle_dominates_every_admissible_partition(g in graph(6), s in scoring(None), m in mode()) {
        let best = brute_force_solve(&s, &g, m).unwrap();
        let mut seen: Option<ExtendedValue> = None;
        for rgs in enumerate_partitions(g.n()).unwrap() {
            let p = Outcome::from_labels(&rgs);
            if satisfies(&s, &g, &p, m) {
                let w = social_welfare(&s, &g, &p);
                seen = Some(seen.map_or(w, |b| b.max(w)));
            }
        }
        prop_assert_eq!(best.as_ref().map(|r| r.welfare), seen);
        if let Some(r) = best {
            prop_assert!(r.optimal);
            prop_assert!(satisfies(&s, &g, &r.outcome, m));
            prop_assert_eq!(social_welfare(&s, &g, &r.outcome), r.welfare);
        }
    }

    #[test]
    fn diameter_pruning_is_sound(g in graph(7), s in scoring(None), m in mode()) {
        let on = OracleConfig { diameter_pruning: true, ..OracleConfig::default() };
        let off = OracleConfig { diameter_pruning: false, ..OracleConfig::default() };
        let a = brute_force_solve_with(&s, &g, m, on).unwrap().map(|r| r.welfare);
        let b = brute_force_solve_with(&s, &g, m, off).unwrap().map(|r| r.welfare);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn welfare_orders_the_modes(g in graph(6), s in scoring(None)) {
        let w = |m| brute_force_solve(&s, &g, m).unwrap().map(|r| r.welfare);
        let (wf, ir, ns) = (w(Mode::Welfare), w(Mode::Ir), w(Mode::Ns));
        prop_assert!(ir.is_some());
        prop_assert!(wf >= ir);
        if ns.is_some() {
            prop_assert!(ir >= ns);
        }
    }

    #[test]
    fn decompositions_are_valid_and_nice(g in graph(9)) {
        let t = compute_decomposition(&g, 100_000).unwrap();
        let w = validate(&g, &t).unwrap();
        let d = make_nice(&t).unwrap();
        prop_assert!(d.check_nice().is_ok());
        prop_assert_eq!(d.width(), w);
        prop_assert!(validate(&g, &d.to_tree_decomposition()).is_ok());
    }

    #[test]
    fn fpt_size_limit_is_monotone(g in graph(6), s in scoring(Some(Tail::Closed)), m in mode()) {
        let d = nice(&g);
        let (full, _) = solve_tw(&s, &g, &d, m).unwrap();
        let mut prev: Option<ExtendedValue> = None;
        for sz in 1..=g.n() {
            let r = solve_fpt(&s, &g, &d, sz, m).unwrap();
            if let Some(r) = &r {
                prop_assert!(r.outcome.coalitions().iter().all(|c| c.len() <= sz));
                prop_assert!(satisfies(&s, &g, &r.outcome, m));
            }
            let w = r.map(|r| r.welfare);
            if m != Mode::Ns {
                prop_assert!(w >= prev);
            }
            prev = w;
        }
        prop_assert_eq!(prev, full.map(|r| r.welfare));
    }

    #[test]
    fn oracle_solutions_certify_cleanly(g in graph(6), s in scoring(None), m in mode()) {
        if let Some(r) = brute_force_solve(&s, &g, m).unwrap() {
            let c = certify_outcome(&s, &g, &r.outcome, m);
            prop_assert!(c.is_clean(), "{:?}", c.violations);
            prop_assert_eq!(c.welfare, r.welfare);
        }
    }
}

#[test]
fn seven_agent_distances_and_diameters() {
    let g = seven_agents();
    let (x, x1, y, y1) = (0, 1, 2, 3);
    let all: Vec<usize> = (0..7).collect();
    assert_eq!(coalition_distance(&g, &all, x, y).unwrap(), Finite(2));
    assert_eq!(coalition_distance(&g, &all, x1, y1).unwrap(), Finite(4));
    assert_eq!(coalition_distance(&g, &[x1, y1], x1, y1).unwrap(), NegInf);
    assert!(coalition_distance(&g, &[x, y], x, x1).is_err());
    assert_eq!(coalition_diameter(&g, &all), Finite(4));
    assert_eq!(coalition_diameter(&g, &[x, 4, 5, 6, y]), Finite(2));
    assert_eq!(coalition_diameter(&g, &[x1, y1]), NegInf);
}

#[test]
fn seven_agent_bold_partition() {
    let g = seven_agents();
    let p = Outcome::new(7, vec![vec![0, 2, 4, 5, 6], vec![1], vec![3]]).unwrap();
    assert_eq!(social_welfare(&ScoringVector::closed(&[1, 0, -1]), &g, &p), Finite(18));
    assert_eq!(social_welfare(&ScoringVector::closed(&[1, -3]), &g, &p), Finite(12));
}

#[test]
fn bell_numbers() {
    assert_eq!(enumerate_partitions(3).unwrap().count(), 5);
    assert_eq!(enumerate_partitions(8).unwrap().count(), 4140);
    assert_eq!(enumerate_partitions(12).unwrap().count(), 4_213_597);
}

#[test]
fn welfare_decision_on_clique_example() {
    let g = path_with_clique(5);
    let s = ScoringVector::closed(&[1, 0, -1]);
    let best = brute_force_solve(&s, &g, Mode::Welfare).unwrap().unwrap().welfare.finite().unwrap();
    assert!(decide_welfare_at_least(&s, &g, best, Mode::Welfare).unwrap());
    assert!(!decide_welfare_at_least(&s, &g, best + 1, Mode::Welfare).unwrap());
}

#[test]
fn long_path_grand_coalition_is_not_ir_under_open_vector() {
    let g = SocialNetwork::from_edges(9, &(0..8).map(|i| (i, i + 1)).collect::<Vec<_>>());
    let s = ScoringVector::open(&[1, 0, -1]);
    assert!(!is_individually_rational(&s, &g, &Outcome::grand(9)));
}

#[test]
fn triangle_grand_coalition_is_stable() {
    let g = SocialNetwork::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
    let s = ScoringVector::closed(&[1]);
    let r = brute_force_solve(&s, &g, Mode::Ns).unwrap().unwrap();
    assert_eq!(r.welfare, Finite(6));
    assert_eq!(r.outcome, Outcome::grand(3));
    assert!(is_nash_stable(&s, &g, &Outcome::grand(3)));
}

#[test]
fn single_edge_singletons_deviate_by_joining() {
    let g = SocialNetwork::from_edges(2, &[(0, 1)]);
    let s = ScoringVector::closed(&[1]);
    let d = find_deviation(&s, &g, &Outcome::singletons(2), Mode::Ns).unwrap();
    assert_eq!((d.agent, d.kind, d.target), (0, DeviationKind::ToCoalition, Some(1)));
    assert_eq!(d.gain(), Some(1));
    assert!(find_deviation(&s, &g, &Outcome::singletons(2), Mode::Ir).is_none());
}

#[test]
fn treewidth_examples() {
    let path = SocialNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
    let k5: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let k5 = SocialNetwork::from_edges(5, &k5);
    assert_eq!(validate(&path, &compute_decomposition(&path, 100_000).unwrap()).unwrap(), 1);
    assert_eq!(validate(&k5, &compute_decomposition(&k5, 100_000).unwrap()).unwrap(), 4);
    let g = seven_agents();
    assert_eq!(validate(&g, &compute_decomposition(&g, 100_000).unwrap()).unwrap(), 3);
}
