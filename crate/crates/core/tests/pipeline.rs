use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dpcolor::cover::{random_full_matching, ListAssignment};
use dpcolor::discharging::discharge;
use dpcolor::format::{parse_bundle, write_bundle, Bundle};
use dpcolor::generate::generate_class_member;
use dpcolor::graph::check_class_membership;
use dpcolor::reducer::color_class_graph;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_members_survive_a_bundle_round_trip_and_color(seed: u64, n in 3usize..30) {
        let embedding = generate_class_member(seed, n).unwrap();
        prop_assert!(check_class_membership(embedding.graph()).is_none());
        let lists = ListAssignment::uniform(n, 4);
        let matching = random_full_matching(embedding.graph(), &lists, &mut ChaCha8Rng::seed_from_u64(seed));
        let bundle = Bundle { embedding, lists, matching, notes: vec!["pipeline".into()] };
        let back = parse_bundle(&write_bundle(&bundle)).unwrap();
        prop_assert_eq!(&back.embedding, &bundle.embedding);
        prop_assert_eq!(&back.matching, &bundle.matching);

        let t = color_class_graph(&back.embedding, &back.lists, &back.matching).unwrap();
        let g = back.embedding.graph();
        for (u, v) in g.edges() {
            prop_assert!(!back.matching.get(u, v).contains(&(t.colors[u], t.colors[v])));
        }
        let ledger = discharge(&back.embedding);
        prop_assert_eq!(ledger.total_initial(), ledger.total_final());
    }
}
