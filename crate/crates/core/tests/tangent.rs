use num_bigint::BigUint;
use proptest::prelude::*;

use segal_dyn::tangent::full_count;

proptest! {
    #[test]
    fn full_count_is_the_product(sizes in proptest::collection::vec(0usize..=12, 0..=6)) {
        let want: u128 = sizes.iter().map(|&s| (1u128 << s) - 1).product();
        prop_assert_eq!(full_count(sizes), BigUint::from(want));
    }
}

#[test]
fn full_count_is_exact_past_machine_words() {
    let n = full_count([100, 100]);
    let one = BigUint::from(1u8);
    let m = (BigUint::from(1u8) << 100) - &one;
    assert_eq!(n, &m * &m);
}
