use std::collections::BTreeSet;

use exodromy::complex::StratifiedComplexJson;
use exodromy::poset::pair_name;
use exodromy::random::{random_complex, random_poset, random_stratification};
use exodromy::{Coefficients, Field, Poset, StratifiedComplex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn poset_json_round_trips(seed in any::<u64>(), n in 0usize..=8) {
        let mut r = rng(seed);
        let p = random_poset(&mut r, n, 0.4);
        let text = serde_json::to_string(&p).unwrap();
        let back: Poset = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &p);
        // the stored relation is the transitive closure of the Hasse edges
        for a in 0..n {
            for b in 0..n {
                let mut seen = BTreeSet::from([a]);
                let mut stack = vec![a];
                while let Some(x) = stack.pop() {
                    for &(s, t) in p.hasse() {
                        if s == x && seen.insert(t) {
                            stack.push(t);
                        }
                    }
                }
                prop_assert_eq!(p.leq(a, b), seen.contains(&b));
            }
        }
    }

    #[test]
    fn products_are_associative_and_unital(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ps: Vec<Poset> = (0..3).map(|i| random_poset(&mut r, 1 + (seed as usize >> i) % 3, 0.5)).collect();
        let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
        let left = a.product(b).product(c);
        let right = a.product(&b.product(c));
        let triples: Vec<(&str, &str, &str)> = a
            .names()
            .iter()
            .flat_map(|x| b.names().iter().flat_map(move |y| c.names().iter().map(move |z| (x.as_str(), y.as_str(), z.as_str()))))
            .collect();
        let idx = |p: &Poset, name: String| p.index_of(&name).unwrap();
        for &(x1, y1, z1) in &triples {
            for &(x2, y2, z2) in &triples {
                let l = left.leq(idx(&left, pair_name(&pair_name(x1, y1), z1)), idx(&left, pair_name(&pair_name(x2, y2), z2)));
                let rr = right.leq(idx(&right, pair_name(x1, &pair_name(y1, z1))), idx(&right, pair_name(x2, &pair_name(y2, z2))));
                prop_assert_eq!(l, rr);
            }
        }
        let unit = a.product(&Poset::singleton("*"));
        prop_assert_eq!(unit.strict_relations().len(), a.strict_relations().len());
        prop_assert_eq!(unit.hasse().len(), a.hasse().len());
    }

    #[test]
    fn subdivision_preserves_homology(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 6, 3, 4);
        let sd = k.barycentric_subdivision();
        for coeff in [Coefficients::Integers, Coefficients::Field(Field::Prime(2))] {
            prop_assert_eq!(sd.homology(coeff), k.homology(coeff));
            prop_assert_eq!(k.face_poset().order_complex().homology(coeff), k.homology(coeff));
        }
    }

    #[test]
    fn stratified_complex_json_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_complex(&mut r, 6, 2, 4);
        let s = random_stratification(&mut r, &k);
        let text = serde_json::to_string(&s.to_json()).unwrap();
        let json: StratifiedComplexJson = serde_json::from_str(&text).unwrap();
        let back = StratifiedComplex::from_json(&json).unwrap();
        prop_assert_eq!(back.face_poset(), s.face_poset());
        prop_assert_eq!(back.strat_poset(), s.strat_poset());
        prop_assert_eq!(back.phi(), s.phi());
    }
}
