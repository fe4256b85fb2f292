use std::sync::Arc;

use proptest::prelude::*;

use segal_dyn::{EndCategory, FinCategory, FinFunctor, Obj};

/// Edges `i -> j` with `i < j` and up to two parallel copies.
fn dag() -> impl Strategy<Value = (usize, Vec<(usize, usize, usize)>)> {
    (1usize..=4).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        (Just(n), Just(pairs), proptest::collection::vec(0usize..=2, len)).prop_map(|(n, pairs, mult)| {
            let edges = pairs
                .iter()
                .zip(mult)
                .flat_map(|(&(i, j), k)| (0..k).map(move |c| (i, j, c)))
                .collect();
            (n, edges)
        })
    })
}

fn free((n, edges): &(usize, Vec<(usize, usize, usize)>)) -> Option<FinCategory> {
    let names: Vec<String> = (0..*n).map(|i| format!("o{i}")).collect();
    let edges: Vec<(String, String, String)> = edges
        .iter()
        .map(|&(i, j, c)| (format!("e{i}{j}{c}"), names[i].clone(), names[j].clone()))
        .collect();
    FinCategory::free_on_dag(&names, &edges, 200)
}

proptest! {
    #[test]
    fn path_categories_are_lawful(decl in dag()) {
        if let Some(cat) = free(&decl) {
            prop_assert!(cat.validate().is_empty());
            for f in cat.morphisms() {
                prop_assert_eq!(cat.compose(cat.identity(cat.dom(f)), f).unwrap(), f);
                prop_assert_eq!(cat.compose(f, cat.identity(cat.cod(f))).unwrap(), f);
            }
        }
    }

    #[test]
    fn corrupting_a_composite_is_caught(decl in dag(), pick in any::<prop::sample::Index>()) {
        let Some(cat) = free(&decl) else { return Ok(()) };
        let name = |m: segal_dyn::Mor| cat.morphism_name(m).to_string();
        let mut table: Vec<(String, String, String)> =
            cat.table_entries().into_iter().map(|(f, g, h)| (name(f), name(g), name(h))).collect();
        let i = pick.index(table.len());
        table.remove(i);
        let morphisms: Vec<(String, String, String)> = cat
            .morphisms()
            .map(|m| (name(m), cat.object_name(cat.dom(m)).to_string(), cat.object_name(cat.cod(m)).to_string()))
            .collect();
        let identities: Vec<(String, String)> =
            cat.objects().map(|x| (cat.object_name(x).to_string(), name(cat.identity(x)))).collect();
        let broken = FinCategory::from_parts(cat.object_names(), &morphisms, &identities, &table).unwrap();
        prop_assert!(!broken.validate().is_empty());
    }

    #[test]
    fn functor_composition_matches_pointwise(decl in dag()) {
        let Some(cat) = free(&decl) else { return Ok(()) };
        let cat = Arc::new(cat);
        let all = segal_dyn::fincat::enumerate_functors(&cat, &cat, 500);
        let Ok(all) = all else { return Ok(()) };
        for f in all.iter().take(6) {
            for g in all.iter().take(6) {
                let fg = f.then(g, "fg").unwrap();
                prop_assert!(fg.check().is_empty());
                for x in cat.objects() {
                    prop_assert_eq!(fg.apply_object(x).unwrap(), g.apply_object(f.apply_object(x).unwrap()).unwrap());
                }
            }
        }
    }
}

#[test]
fn end_of_discrete_has_every_self_map() {
    for n in 1..=3usize {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let end = EndCategory::build(Arc::new(FinCategory::discrete(&names)), None, 100).unwrap();
        assert_eq!(end.category().object_count(), n.pow(n as u32));
        assert_eq!(end.category().morphism_count(), n.pow(n as u32));
        assert!(end.category().validate().is_empty());
    }
}

#[test]
fn closure_of_a_cycle_is_cyclic() {
    let x = Arc::new(FinCategory::discrete(&["a", "b", "c"]));
    let rot = FinFunctor::from_named(
        "r",
        x.clone(),
        x.clone(),
        &[("a", "b"), ("b", "c"), ("c", "a")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        &Default::default(),
    )
    .unwrap();
    let end = EndCategory::build(x, Some(&[rot]), 100).unwrap();
    assert_eq!(end.category().object_count(), 3);
    let r = end.category().object_id("r").unwrap();
    let rr = end.compose_objects(r, r).unwrap();
    assert_eq!(end.compose_objects(r, rr), Some(end.identity_object()));
    assert_eq!(end.category().object_name(rr), "r*r");
    assert_eq!(end.functor(Obj(0)).name(), "id");
}
