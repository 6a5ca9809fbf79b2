//! QBF solvers, QDIMACS export and word-model encoding on random inputs.

use proptest::prelude::*;
use somc::corpus::Corpus;
use somc::qbf::{
    decode_symbols, decode_word_model, encode_word_model, export_qdimacs, qbf_symbols, sat_via_alternating_valuations,
    solve_qbf_tree, solve_recursive, GroundedQbf, QdimacsDoc,
};
use somc::structures::{parse_structure, serialize_structure, WordModel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn recursive_and_valuation_semantics_agree(seed in any::<u64>()) {
        let q = Corpus::new(seed).qbf(3, 6);
        prop_assert_eq!(solve_recursive(&q).unwrap(), sat_via_alternating_valuations(&q).unwrap(), "{}", q);
    }

    #[test]
    fn word_models_round_trip(seed in any::<u64>()) {
        let q = Corpus::new(seed).qbf(4, 8);
        let w = encode_word_model(&q).unwrap();
        prop_assert_eq!(decode_word_model(&w).unwrap(), q.clone());
        let reparsed = WordModel::from_structure(&parse_structure(&serialize_structure(w.structure())).unwrap()).unwrap();
        prop_assert_eq!(decode_word_model(&reparsed).unwrap(), q.clone());
        prop_assert_eq!(decode_symbols(&qbf_symbols(&q).unwrap()).unwrap(), q);
    }

    #[test]
    fn exported_documents_keep_the_truth_value(seed in any::<u64>()) {
        let g = Corpus::new(seed).grounded(12);
        let doc = export_qdimacs(&g);
        let parsed = QdimacsDoc::parse(&doc.to_string()).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let checked = parsed.evaluate_by_expansion(1 << 24);
        prop_assume!(checked.is_ok(), "truth-table checker ran out of nodes");
        prop_assert_eq!(checked.unwrap(), solve_qbf_tree(&g));
    }

    #[test]
    fn grounded_formulas_match_the_ast_solver(seed in any::<u64>()) {
        let q = Corpus::new(seed).qbf(3, 8);
        prop_assert_eq!(solve_qbf_tree(&GroundedQbf::from_ast(&q)), solve_recursive(&q).unwrap());
    }
}
