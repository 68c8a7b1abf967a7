use blowuplab::blowup::{
    mask_measure, prune_spec, random_mask, rng, sample_model, tind_blowup, BlowupSpec, DensityValue, Mode,
    PrunedSpec,
};
use blowuplab::embed::automorphism_count;
use blowuplab::enumerate::graphs_of_order;
use blowuplab::substitution::{is_prime, substitute_conservative};
use blowuplab::{are_isomorphic, count_embeddings, densities, Graph, Structure};
use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;

fn graph_strategy(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        g.add_edge(i, j);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn exact(h: &Structure, src: &PrunedSpec) -> BigRational {
    match tind_blowup(h, src, &Mode::Exact).unwrap() {
        DensityValue::Exact(v) => v,
        DensityValue::Interval(_) => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn induced_probabilities_sum_to_one(g in graph_strategy(3, 8), k in 1usize..=3) {
        let host = g.to_structure();
        let mut total = BigRational::zero();
        for h in graphs_of_order(k).unwrap().iter() {
            total += densities(&h.to_structure(), &host).unwrap().p;
        }
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn self_embeddings_are_automorphisms(g in graph_strategy(1, 7)) {
        let s = g.to_structure();
        prop_assert_eq!(count_embeddings(&s, &s).unwrap(), automorphism_count(&s));
        let d = densities(&s, &s).unwrap();
        prop_assert_eq!(d.aut, automorphism_count(&s));
    }

    #[test]
    fn complement_preserves_densities(h in graph_strategy(1, 4), g in graph_strategy(4, 8)) {
        let a = densities(&h.to_structure(), &g.to_structure()).unwrap();
        let b = densities(&h.complement().to_structure(), &g.complement().to_structure()).unwrap();
        prop_assert_eq!(a.tind, b.tind);
        prop_assert_eq!(a.embeddings, b.embeddings);
    }

    #[test]
    fn substitution_contains_both_parts(f1 in graph_strategy(2, 5), f2 in graph_strategy(2, 4), v in 0usize..5) {
        let v = v % f1.order();
        let s = substitute_conservative(&f1.to_structure(), v, &f2.to_structure()).unwrap();
        prop_assert!(!is_prime(&s).unwrap());
        let block: Vec<usize> = (v..v + f2.order()).collect();
        prop_assert!(are_isomorphic(&s.restrict(&block), &f2.to_structure()).unwrap());
        let outside: Vec<usize> = (0..s.size()).filter(|&u| u <= v || u >= v + f2.order()).collect();
        prop_assert!(are_isomorphic(&s.restrict(&outside), &f1.to_structure()).unwrap());
    }

    #[test]
    fn interval_brackets_exact_under_random_masks(base in graph_strategy(2, 4), seed in any::<u64>(), h in graph_strategy(2, 3)) {
        let spec = BlowupSpec::constant(base.to_structure()).unwrap();
        let mut r = rng(seed);
        let mask = random_mask(&spec, 2, &mut r).unwrap();
        let src = prune_spec(&spec, mask).unwrap();
        prop_assert!(mask_measure(&src) > BigRational::zero());
        let ex = exact(&h.to_structure(), &src);
        let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
        let iv = tind_blowup(&h.to_structure(), &src, &Mode::Interval(eps.clone())).unwrap();
        prop_assert!(iv.lower() <= &ex && &ex <= iv.upper());
        prop_assert!(iv.upper() - iv.lower() <= eps);
    }

    #[test]
    fn samples_are_deterministic(seed in any::<u64>(), n in 0usize..12) {
        let spec = BlowupSpec::periodic(vec![
            Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).to_structure(),
            Graph::new(3).to_structure(),
        ]).unwrap();
        let a = sample_model(&spec, n, seed).unwrap();
        let b = sample_model(&spec, n, seed).unwrap();
        prop_assert_eq!(a.size(), n);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn exact_densities_of_a_motif_order_sum_to_one_under_masks() {
    let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).to_structure();
    let spec = BlowupSpec::constant(c4).unwrap();
    let mut r = rng(11);
    for depth in 1..=3 {
        let src = prune_spec(&spec, random_mask(&spec, depth, &mut r).unwrap()).unwrap();
        for k in 2..=4 {
            let mut total = BigRational::zero();
            for h in graphs_of_order(k).unwrap().iter() {
                let s = h.to_structure();
                let d = densities(&s, &s).unwrap();
                total += exact(&s, &src) * (&d.p / &d.tind);
            }
            assert_eq!(total, BigRational::one(), "depth {depth}, order {k}");
        }
    }
}

#[test]
fn profiles_are_sound_and_complete_for_small_limits() {
    use blowuplab::blowup::positive_profile;
    let bases = [
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
        Graph::from_edges(3, &[(0, 1)]),
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]),
    ];
    let mut r = rng(3);
    for base in bases {
        let spec = BlowupSpec::constant(base.to_structure()).unwrap();
        let sources = [
            PrunedSpec::full(spec.clone()),
            prune_spec(&spec, random_mask(&spec, 2, &mut r).unwrap()).unwrap(),
        ];
        for src in &sources {
            let prof = positive_profile(src, 4, 12).unwrap();
            for k in 2..=4 {
                for h in graphs_of_order(k).unwrap().iter() {
                    let s = h.to_structure();
                    let positive = exact(&s, src) > BigRational::zero();
                    assert_eq!(prof.family.contains(&s).unwrap(), positive, "{base:?} {h:?}");
                }
            }
        }
    }
}
