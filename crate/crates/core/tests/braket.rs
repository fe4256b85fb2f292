use std::sync::Arc;

use proptest::prelude::*;

use segal_dyn::braket::{StateBasis, StateMap};

fn table(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..n, n)
}

proptest! {
    #[test]
    fn powers_agree_with_repeated_composition((n, t) in (1usize..=8).prop_flat_map(|n| (Just(n), table(n))), k in 0usize..=10) {
        let basis = Arc::new(StateBasis::numbered(n).unwrap());
        let psi = StateMap::new("psi", basis.clone(), t).unwrap();
        let mut step = StateMap::identity(basis);
        for _ in 0..k {
            step = step.then(&psi).unwrap();
        }
        let power = psi.power(k);
        prop_assert_eq!(power.table(), step.table());
    }
}
