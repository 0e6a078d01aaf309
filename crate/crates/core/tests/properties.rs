use dynlis::cover::{cover_approx, cover_exact, depth};
use dynlis::dynamic::DynamicLis;
use dynlis::om::OrderMaintenance;
use dynlis::oracle::{differential_run, lis_dp, validate_cover, DiffConfig, ReferenceModel};
use dynlis::partition::es_partition;
use dynlis::script::{Command, UpdateScript};
use dynlis::{lis_static, normalize, PointSet};
use proptest::prelude::*;

fn permutation(max: usize) -> impl Strategy<Value = Vec<u32>> {
    (0..=max).prop_flat_map(|n| Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn static_lis_matches_dp(values in prop::collection::vec(-20i64..20, 0..120)) {
        let (len, chain) = lis_static(normalize(&values).points());
        prop_assert_eq!(len, lis_dp(&values));
        prop_assert_eq!(chain.len(), len);
        prop_assert!(chain.windows(2).all(|w| values[w[0].x as usize] < values[w[1].x as usize]));
    }

    #[test]
    fn greedy_covers_validate(ys in permutation(40), k in 1usize..6, gap in 1usize..4) {
        let ps = PointSet::from_ranks(&ys).unwrap();
        let exact = cover_exact(ps.points(), k);
        prop_assert!(validate_cover(ps.points(), &exact, k, k as f64).is_valid());
        prop_assert!(depth(&exact) <= k);
        let approx = cover_approx(ps.points(), k, k + gap).unwrap();
        prop_assert!(validate_cover(ps.points(), &approx, k, (k + gap) as f64).is_valid());
        prop_assert!(depth(&approx) <= k.div_ceil(gap));
    }

    #[test]
    fn partitions_are_valid(ys in permutation(150)) {
        let ps = PointSet::from_ranks(&ys).unwrap();
        let p = es_partition(&ps).unwrap();
        prop_assert!(p.is_valid_for(&ps));
        prop_assert!(p.len() as f64 <= 3.0 * (ys.len() as f64).sqrt().max(1.0));
    }

    #[test]
    fn order_maintenance_agrees_with_a_list(ops in prop::collection::vec((any::<bool>(), any::<prop::sample::Index>()), 1..300)) {
        let mut om = OrderMaintenance::new();
        let mut list: Vec<u32> = Vec::new();
        for (insert, at) in ops {
            if insert || list.is_empty() {
                let i = at.index(list.len() + 1);
                let pred = if i == 0 { OrderMaintenance::MIN } else { list[i - 1] };
                list.insert(i, om.insert_after(pred).unwrap());
            } else {
                om.delete(list.remove(at.index(list.len()))).unwrap();
            }
        }
        for w in list.windows(2) {
            prop_assert!(om.order(w[0], w[1]).unwrap());
            prop_assert!(om.key(w[0]) < om.key(w[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dynamic_scripts_stay_in_the_sandwich(seed in any::<u64>(), preload in 0usize..60, eps in prop::sample::select(vec![1.0, 0.5])) {
        let script = UpdateScript::random(seed, preload, 150, 100, 40);
        let mut cfg = DiffConfig::new(eps);
        cfg.depth_audit = true;
        let report = differential_run(&script, &cfg);
        prop_assert!(report.is_ok(), "{:?}", report.err());
    }
}

#[test]
fn dynamic_matches_a_list_after_many_updates() {
    let script = UpdateScript::random(77, 20, 3000, 200, 1000);
    let mut d = DynamicLis::from_values(&script.preload, 1.0).unwrap();
    let mut model = ReferenceModel::new(&script.preload);
    for c in &script.commands {
        match *c {
            Command::Insert { pos, value } => {
                d.insert(pos, value).unwrap();
                model.insert(pos, value);
            }
            Command::Delete { pos } => {
                d.delete(pos).unwrap();
                model.delete(pos);
            }
            _ => {}
        }
    }
    assert_eq!(d.values(), model.values());
    assert!(d.is_balanced());
}
