use proptest::prelude::*;

use reversal_bias::graph::{dominant_set_of, profile_threshold_of};
use reversal_bias::search::WitnessBundle;
use reversal_bias::{
    acyclicity_threshold, audit_rule, bias_flags, borda, condorcet_loser, condorcet_winner, copeland,
    greenberg_threshold,
    majority_graph, minimal_threshold, minimax_direct, minimax_threshold, AltSet, BiasType,
    Profile, Ranking, Rule,
};

fn ranking(n: usize) -> impl Strategy<Value = Ranking> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|order| Ranking::new(order).unwrap())
}

fn profile_with(h: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Profile> {
    (h, n).prop_flat_map(|(h, n)| {
        prop::collection::vec(ranking(n), h).prop_map(|cols| Profile::new(cols).unwrap())
    })
}

fn profile() -> impl Strategy<Value = Profile> {
    profile_with(2..=9, 2..=6)
}

fn permutation(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn ranking_positions_are_inverse(q in (2usize..10).prop_flat_map(ranking)) {
        for j in 1..=q.n() {
            prop_assert_eq!(q.rank_of(q.at(j)).unwrap(), j);
        }
        prop_assert_eq!(q.reversed().reversed(), q.clone());
        prop_assert_eq!(q.reversed().at(1), q.at(q.n()));
    }

    #[test]
    fn tally_is_complementary(p in profile()) {
        let t = p.tally();
        let tr = p.reversed().tally();
        for x in 1..=p.n() {
            prop_assert_eq!(t.get(x, x), 0);
            for y in 1..=p.n() {
                if x != y {
                    prop_assert_eq!(t.get(x, y) + t.get(y, x), p.h());
                    prop_assert_eq!(tr.get(x, y), t.get(y, x));
                }
            }
        }
        prop_assert_eq!(tr, t.transposed());
    }

    #[test]
    fn text_round_trip(p in profile()) {
        let text = p.to_text();
        prop_assert_eq!(Profile::parse(&text).unwrap(), p.clone());
        prop_assert_eq!(p.reversed().reversed(), p);
    }

    #[test]
    fn thresholds_are_ordered(h in 2usize..60, n in 2usize..20) {
        let (m0, ma, mg) = (minimal_threshold(h), acyclicity_threshold(h, n), greenberg_threshold(h, n));
        prop_assert!(2 * m0 > h && m0 <= ma && ma <= mg && mg <= h);
        if n <= 3 {
            prop_assert_eq!(ma, m0);
        }
    }

    #[test]
    fn dominant_sets_grow_with_the_threshold(p in profile()) {
        let t = p.tally();
        let mu_p = profile_threshold_of(&t);
        prop_assert!(mu_p <= greenberg_threshold(p.h(), p.n()));
        let mut prev = AltSet::EMPTY;
        for mu in minimal_threshold(p.h())..=p.h() {
            let d = dominant_set_of(&t, mu).unwrap();
            prop_assert!(prev.is_subset(d));
            prop_assert_eq!(d.is_empty(), mu < mu_p);
            prev = d;
        }
    }

    #[test]
    fn minimax_routes_agree(p in profile()) {
        prop_assert_eq!(minimax_direct(&p), minimax_threshold(&p));
    }

    #[test]
    fn rules_are_anonymous(
        (p, perm) in profile().prop_flat_map(|p| { let h = p.h(); (Just(p), permutation(h)) })
    ) {
        let voters: Vec<usize> = perm.iter().map(|&i| i + 1).collect();
        let q = p.permute_voters(&voters);
        for rule in Rule::ALL {
            prop_assert_eq!(audit_rule(&p, rule).flags(), audit_rule(&q, rule).flags());
            prop_assert_eq!(rule.apply(&p), rule.apply(&q));
        }
    }

    #[test]
    fn rules_are_neutral(
        (p, perm) in profile().prop_flat_map(|p| { let n = p.n(); (Just(p), permutation(n)) })
    ) {
        // relabel[x - 1] is the new name of alternative x
        let relabel: Vec<usize> = perm.iter().map(|&v| v + 1).collect();
        let q = p.relabel(&relabel);
        for rule in Rule::ALL {
            let renamed: AltSet = rule.apply(&p).iter().map(|x| relabel[x - 1]).collect();
            prop_assert_eq!(rule.apply(&q), renamed);
            prop_assert_eq!(audit_rule(&p, rule).flags(), audit_rule(&q, rule).flags());
        }
    }

    #[test]
    fn majority_graphs_have_no_two_cycles(p in profile()) {
        for mu in minimal_threshold(p.h())..=p.h() {
            let g = majority_graph(&p, mu).unwrap();
            for (x, y) in g.arcs() {
                prop_assert!(!g.has_arc(y, x));
            }
            prop_assert_eq!(g.analysis().maximal, dominant_set_of(&p.tally(), mu).unwrap());
        }
        prop_assert!(majority_graph(&p, p.h()).unwrap().analysis().acyclic);
    }

    #[test]
    fn condorcet_winners(p in profile()) {
        prop_assert_eq!(condorcet_winner(&p), condorcet_loser(&p.reversed()));
        if let Some(x) = condorcet_winner(&p) {
            prop_assert_eq!(minimax_direct(&p), AltSet::singleton(x));
            prop_assert_eq!(copeland(&p), AltSet::singleton(x));
        }
    }

    #[test]
    fn borda_and_copeland_never_show_type3(p in profile()) {
        prop_assert!(!audit_rule(&p, Rule::Borda).type3);
        prop_assert!(!audit_rule(&p, Rule::Copeland).type3);
        prop_assert!(!borda(&p).is_empty() && !copeland(&p).is_empty());
    }

    #[test]
    fn flags_are_nested(a in 1u64..255, b in 1u64..255, n in 2usize..=8) {
        let mask = (1u64 << n) - 1;
        let (a, b) = (AltSet::from_bits(a & mask), AltSet::from_bits(b & mask));
        prop_assume!(!a.is_empty() && !b.is_empty());
        let f = bias_flags(a, b, n);
        prop_assert!(!f.type1 || f.type2);
        prop_assert!(!f.type2 || f.type3);
    }

    #[test]
    fn no_bias_inside_small_immunity_cells(p in profile_with(2..=3, 2..=6)) {
        let r = audit_rule(&p, Rule::Minimax);
        prop_assert!(!r.type1);
        if p.h() == 2 || p.n() <= 3 {
            prop_assert!(!r.type2);
        }
        if p.n() == 2 || (p.h(), p.n()) == (3, 3) {
            prop_assert!(!r.type3);
        }
    }

    #[test]
    fn witnesses_certify_and_round_trip(h in 2usize..=12, n in 2usize..=8, j in 1u8..=3) {
        let j = BiasType::from_index(j).unwrap();
        let w = reversal_bias::search::constructive_witness(h, n, j).unwrap();
        prop_assert_eq!(w.is_some(), !j.minimax_immune(h, n));
        if let Some(w) = w {
            prop_assert!(w.certify());
            let json = serde_json::to_string(&w.bundle(None)).unwrap();
            let back: WitnessBundle = serde_json::from_str(&json).unwrap();
            prop_assert!(back.to_witness().unwrap().certify());
        }
    }
}
