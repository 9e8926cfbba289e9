use num_traits::One;
use proptest::prelude::*;
use residua::cli::InputDocument;
use residua::exactscalars::{factor_into_m, NormalizingElement, BQ};
use residua::rootdata::lattice::imat_mul;
use residua::rootdata::{build_from_expr, LatticeChoice, ParameterFunction, WeylGroup};
use residua::stm::recipes;
use residua::stm::Algebra;
use std::collections::BTreeMap;

fn normalizing() -> impl Strategy<Value = NormalizingElement> {
    (
        1i64..20,
        1i64..20,
        -3i64..4,
        prop::collection::btree_map(2u32..9, -2i64..3, 0..4),
    )
        .prop_map(|(p, q, vexp, qints)| {
            NormalizingElement::new(BQ::new(p.into(), q.into()), vexp, qints).unwrap()
        })
}

fn weyl_word(rank: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..rank, 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalizing_render_parses_back(d in normalizing()) {
        prop_assert_eq!(NormalizingElement::parse(&d.render()).unwrap(), d);
    }

    #[test]
    fn expansion_is_certified(d in normalizing()) {
        let f = d.expand();
        let (back, sign) = factor_into_m(&f).unwrap();
        prop_assert_eq!(sign, 1);
        prop_assert_eq!(back.expand(), f);
        prop_assert_eq!(back.vanishing_order(), d.vanishing_order());
    }

    #[test]
    fn product_then_inverse_is_one(a in normalizing(), b in normalizing()) {
        let p = a.mul(&b).mul(&b.inv());
        prop_assert_eq!(p.expand(), a.expand());
        prop_assert_eq!(a.mul(&a.inv()), NormalizingElement::one());
    }

    #[test]
    fn weyl_words_compose(ty in prop::sample::select(vec!["B2", "G2", "A3", "C3"]),
                          w1 in weyl_word(3), w2 in weyl_word(3)) {
        let d = build_from_expr(ty, &LatticeChoice::Root).unwrap();
        let g = WeylGroup::new(&d).unwrap();
        let clip = |w: &[usize]| w.iter().map(|&i| i % d.rank).collect::<Vec<_>>();
        let (w1, w2) = (clip(&w1), clip(&w2));
        let joined: Vec<usize> = w1.iter().chain(&w2).copied().collect();
        let (a, b) = (g.from_word(&w1), g.from_word(&w2));
        let ab = g.mul(a, b);
        prop_assert_eq!(g.from_word(&joined), ab);
        prop_assert_eq!(&g.get(ab).matrix, &imat_mul(&g.get(a).matrix, &g.get(b).matrix));
        prop_assert!(g.get(ab).length() <= joined.len());
        prop_assert_eq!(g.mul(ab, g.inverse(ab)), g.from_word(&[]));
    }

    #[test]
    fn weyl_self_maps_have_unit_constant(w in 0usize..8, s1 in 1i64..3, s2 in 1i64..3) {
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let labels: BTreeMap<String, i64> =
            [("s1", s1), ("s2", s2), ("s0", s1)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let m = ParameterFunction::from_labels(&d, &labels).unwrap();
        let alg = Algebra::new("B2", d, m, NormalizingElement::one()).unwrap();
        let rec = recipes::weyl(&alg, w).verify().unwrap();
        prop_assert!(rec.valid(), "{}", rec.summary());
        prop_assert_eq!(rec.a, Some(BQ::one()));
    }

    #[test]
    fn documents_round_trip(s1 in 0i64..4, s2 in 0i64..4, d in normalizing(),
                            word in prop::collection::vec(1usize..3, 0..4)) {
        let word = word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ");
        let text = format!(
            "[datum]\ntype = B2\nlattice = standard\n\n[parameters]\ns0 = {s1}\ns1 = {s1}\ns2 = {s2}\n\n\
             [normalization]\nconstant = {}\nvexp = {}\nqints = {}\n\n[stm]\nrecipe = weyl\nword = [{word}]\n",
            d.constant,
            d.vexp,
            d.qints.iter().map(|(n, k)| format!("{n}:{k}")).collect::<Vec<_>>().join(", "),
        );
        let doc = InputDocument::parse(&text).unwrap();
        let rendered = doc.render();
        let again = InputDocument::parse(&rendered).unwrap();
        prop_assert_eq!(again.render(), rendered);
        prop_assert_eq!(again.normalization, doc.normalization);
    }
}
