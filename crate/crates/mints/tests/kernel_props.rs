mod common;

use common::props::*;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 1000, max_global_rejects: 1_000_000, max_local_rejects: 1_000_000, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn substitution_preserves_typing(case in proved_case()) {
        substitution_lemma(&case)?;
    }

    #[test]
    fn normalize_preserves_type(case in proved_case()) {
        subject_reduction(&case)?;
    }

    #[test]
    fn atomic_lnf_has_full_spine(p in proved_judgment()) {
        lnf_heads(&p)?;
    }

    #[test]
    fn sigma1_proofs_never_abstract_objects(p in proved_judgment()) {
        no_object_abstraction(&p)?;
    }

    #[test]
    fn sigma1_proofs_stay_in_pool(p in proved_judgment()) {
        free_vars_in_pool(&p)?;
    }
}
