use std::collections::BTreeSet;

use polycat_core::finset::{self, enumerate_maps, product_coproduct, Tag};
use polycat_core::nat::{compose_dm, count_nat, enumerate_nat, eval_dm, yoneda_extract};
use polycat_core::poly::{self, compose_direct, compose_structural, eval_extension, eval_map, iso_check, plus, tensor};
use polycat_core::sim::{compose_sim, enumerate_sims, equivalence_check, eval_sim, extract_sim, identity_sim};
use polycat_core::smcc::{adjunction_count_check, bang_extension_check, multiset_power};
use polycat_core::{fam, FinMap, FinSet, Family, PolyDiagram};
use proptest::prelude::*;

fn map(max_dom: usize, max_cod: usize) -> impl Strategy<Value = FinMap> {
    (1..=max_cod).prop_flat_map(move |c| {
        prop::collection::vec(0..c, 0..=max_dom).prop_map(move |t| FinMap::from_table(c, t).unwrap())
    })
}

fn map_into(max_dom: usize, cod: usize) -> impl Strategy<Value = FinMap> {
    prop::collection::vec(0..cod.max(1), if cod == 0 { 0..=0 } else { 0..=max_dom })
        .prop_map(move |t| FinMap::from_table(cod, t).unwrap())
}

fn family(base: usize, max_fiber: usize) -> impl Strategy<Value = Family> {
    prop::collection::vec(0..=max_fiber, base).prop_map(|s| Family::from_fiber_sizes(&s))
}

fn diagram(i: usize, j: usize, max_shapes: usize, max_fiber: usize) -> impl Strategy<Value = PolyDiagram> {
    prop::collection::vec((0..j, prop::collection::vec(0..i, 0..=max_fiber)), 0..=max_shapes)
        .prop_map(move |shapes| PolyDiagram::from_shapes(i, j, &shapes).unwrap())
}

fn single(max_shapes: usize, max_fiber: usize) -> impl Strategy<Value = PolyDiagram> {
    diagram(1, 1, max_shapes, max_fiber)
}

fn sizes_product(sizes: impl Iterator<Item = usize>) -> usize {
    sizes.product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairing_and_tagging_invert(a in 0usize..5, b in 0usize..5) {
        let (prod, coprod) = product_coproduct(&FinSet::new(a), &FinSet::new(b));
        for x in 0..a {
            for y in 0..b {
                prop_assert_eq!(prod.unpair(prod.pair(x, y)), (x, y));
            }
            prop_assert_eq!(coprod.untag(coprod.inl(x)), Tag::Left(x));
        }
        for y in 0..b {
            prop_assert_eq!(coprod.untag(coprod.inr(y)), Tag::Right(y));
        }
        for p in 0..a * b {
            let (x, y) = prod.unpair(p);
            prop_assert_eq!(prod.pair(x, y), p);
        }
    }

    #[test]
    fn enumerate_maps_is_exact(a in 0usize..5, b in 0usize..5) {
        let maps = enumerate_maps(&FinSet::new(a), &FinSet::new(b)).unwrap();
        prop_assert_eq!(maps.len(), b.pow(a as u32));
        let distinct: BTreeSet<Vec<usize>> = maps.iter().map(|m| m.table().to_vec()).collect();
        prop_assert_eq!(distinct.len(), maps.len());
    }

    #[test]
    fn pullback_mediates_uniquely(
        (f, g) in (1usize..4).prop_flat_map(|c| (map_into(3, c), map_into(3, c))),
        t in 0usize..3,
    ) {
        let pb = finset::pullback(&f, &g).unwrap();
        let ts = FinSet::new(t);
        let into_pb = enumerate_maps(&ts, &pb.apex).unwrap();
        for p in enumerate_maps(&ts, f.dom()).unwrap() {
            for q in enumerate_maps(&ts, g.dom()).unwrap() {
                if finset::compose(&f, &p).unwrap() != finset::compose(&g, &q).unwrap() {
                    continue;
                }
                let hits = into_pb
                    .iter()
                    .filter(|m| {
                        finset::compose(&pb.left, m).unwrap() == p && finset::compose(&pb.right, m).unwrap() == q
                    })
                    .count();
                prop_assert_eq!(hits, 1);
                let med = pb.mediate(&p, &q).unwrap();
                prop_assert_eq!(finset::compose(&pb.left, &med).unwrap(), p.clone());
            }
        }
    }

    #[test]
    fn adjunctions_are_bijective(
        (f, x, y) in map(3, 3).prop_flat_map(|f| {
            let (a, b) = (f.dom().size(), f.cod().size());
            (Just(f), family(a, 2), family(b, 2))
        })
    ) {
        let w = fam::adjunction_witness(&f, &x, &y).unwrap();
        let sx = fam::sigma(&f, &x).unwrap();
        prop_assert_eq!(w.sigma_delta.len(), fam::hom_choices(&sx, &y).unwrap().len());
        let dy = fam::delta(&f, &y).unwrap();
        prop_assert_eq!(w.delta_pi.len(), fam::hom_choices(dy.family(), &x).unwrap().len());
    }

    #[test]
    fn sigma_delta_transpose_is_natural(
        (f, x, y, y2) in map(3, 2).prop_flat_map(|f| {
            let (a, b) = (f.dom().size(), f.cod().size());
            (Just(f), family(a, 2), family(b, 2), family(b, 2))
        })
    ) {
        let sx = fam::sigma(&f, &x).unwrap();
        let gs = fam::hom_enumerate(&y, &y2).unwrap();
        for phi in fam::hom_enumerate(&sx, &y).unwrap() {
            let t = fam::transpose_sigma_delta(&f, &x, &y, phi.map().table()).unwrap();
            for g in &gs {
                let moved = phi.then(g).unwrap();
                let lhs = fam::transpose_sigma_delta(&f, &x, &y2, moved.map().table()).unwrap();
                let dg = fam::delta_map(&f, g).unwrap();
                let rhs: Vec<usize> = t.iter().map(|&e| dg.apply(e)).collect();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn pi_fiber_sizes_multiply(
        (f, x) in map(4, 3).prop_flat_map(|f| { let a = f.dom().size(); (Just(f), family(a, 3)) })
    ) {
        let p = fam::pi(&f, &x).unwrap();
        let sizes = p.family().fiber_sizes();
        for b in f.cod().elements() {
            prop_assert_eq!(sizes[b], sizes_product(f.fiber(b).iter().map(|&a| x.fiber(a).len())));
        }
    }

    #[test]
    fn identity_pi_and_sigma(x in (0usize..4).prop_flat_map(|n| family(n, 3))) {
        let id = FinMap::identity(x.base());
        prop_assert_eq!(fam::pi(&id, &x).unwrap().family().fiber_sizes(), x.fiber_sizes());
        prop_assert_eq!(fam::sigma(&id, &x).unwrap().fiber_sizes(), x.fiber_sizes());
    }

    #[test]
    fn beck_chevalley_holds(
        (bottom, right, z) in (1usize..4).prop_flat_map(|c| (map_into(3, c), map_into(3, c)))
            .prop_flat_map(|(b, r)| { let a = b.dom().size(); (Just(b), Just(r), family(a, 3)) })
    ) {
        let sq = fam::Square::pullback_of(&bottom, &right).unwrap();
        let w = fam::beck_chevalley_check(&sq, &z).unwrap();
        prop_assert!(w.pi_iso.is_iso() && w.sigma_iso.is_iso());
    }

    #[test]
    fn distributivity_holds(
        (a, b, x) in map(3, 3)
            .prop_flat_map(|a| { let n = a.dom().size(); (Just(a), map_into(3, n)) })
            .prop_flat_map(|(a, b)| { let n = b.dom().size(); (Just(a), Just(b), family(n, 2)) })
    ) {
        prop_assert!(fam::distributivity_check(&a, &b, &x).unwrap().is_iso());
    }

    #[test]
    fn composition_commutes_with_extension(
        p in diagram(2, 2, 2, 2),
        q in diagram(2, 2, 2, 2),
        x in family(2, 2),
        x2 in family(2, 2),
    ) {
        let c = compose_direct(&q, &p).unwrap();
        let cx = c.comparison(&q, &p, &x).unwrap();
        let lhs = eval_extension(&c.diagram, &x).unwrap();
        let rhs = eval_extension(&q, eval_extension(&p, &x).unwrap().family()).unwrap();
        prop_assert_eq!(lhs.family().fiber_sizes(), rhs.family().fiber_sizes());
        let cx2 = c.comparison(&q, &p, &x2).unwrap();
        for g in fam::hom_enumerate(&x, &x2).unwrap() {
            let left = cx.then(&eval_map(&q, &eval_map(&p, &g).unwrap()).unwrap()).unwrap();
            let right = eval_map(&c.diagram, &g).unwrap().then(&cx2).unwrap();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn structural_composition_matches_direct(p in diagram(2, 3, 3, 2), q in diagram(3, 2, 3, 2)) {
        let direct = compose_direct(&q, &p).unwrap().diagram;
        let structural = compose_structural(&q, &p).unwrap();
        let iso = iso_check(&structural, &direct).unwrap();
        prop_assert!(iso.is_some_and(|w| w.verify(&structural, &direct)));
    }

    #[test]
    fn tensor_unit_and_associativity(p in diagram(2, 2, 3, 2), q in diagram(2, 1, 2, 2), r in diagram(1, 2, 2, 2)) {
        let unit = PolyDiagram::bottom();
        prop_assert!(iso_check(&tensor(&p, &unit), &p).unwrap().is_some());
        prop_assert!(iso_check(&tensor(&unit, &p), &p).unwrap().is_some());
        let left = tensor(&tensor(&p, &q), &r);
        let right = tensor(&p, &tensor(&q, &r));
        prop_assert!(iso_check(&left, &right).unwrap().is_some());
    }

    #[test]
    fn tensor_is_symmetric(p in single(3, 3), q in single(3, 3)) {
        prop_assert!(iso_check(&tensor(&p, &q), &tensor(&q, &p)).unwrap().is_some());
    }

    #[test]
    fn plus_evaluates_blockwise(
        p1 in diagram(2, 2, 3, 2),
        p2 in diagram(1, 3, 3, 2),
        x in family(2, 3),
        y in family(1, 3),
    ) {
        let sum = eval_extension(&plus(&p1, &p2), &Family::sum(&x, &y)).unwrap();
        let mut expected = eval_extension(&p1, &x).unwrap().family().fiber_sizes();
        expected.extend(eval_extension(&p2, &y).unwrap().family().fiber_sizes());
        prop_assert_eq!(sum.family().fiber_sizes(), expected);
    }

    #[test]
    fn tensor_matches_day_formula(p1 in single(3, 3), p2 in single(3, 3), m in 0usize..4) {
        let x = Family::from_fiber_sizes(&[m]);
        let ext = eval_extension(&tensor(&p1, &p2), &x).unwrap();
        let mut expected = 0;
        for v1 in p1.shapes().elements() {
            for v2 in p2.shapes().elements() {
                expected += m.pow((p1.directions_of(v1).len() * p2.directions_of(v2).len()) as u32);
            }
        }
        prop_assert_eq!(ext.len(), expected);
    }

    #[test]
    fn vertical_composition_commutes_with_evaluation(
        p in single(2, 2), q in single(2, 2), r in single(2, 2),
        i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(),
        x in family(1, 3),
    ) {
        let pq = enumerate_nat(&p, &q).unwrap();
        let qr = enumerate_nat(&q, &r).unwrap();
        if pq.is_empty() || qr.is_empty() {
            return Ok(());
        }
        let (m1, m2) = (&pq[i.index(pq.len())], &qr[j.index(qr.len())]);
        let composed = eval_dm(&compose_dm(m2, m1).unwrap(), &x).unwrap();
        prop_assert_eq!(composed, eval_dm(m1, &x).unwrap().then(&eval_dm(m2, &x).unwrap()).unwrap());
    }

    #[test]
    fn extraction_inverts_evaluation(p in diagram(2, 1, 2, 2), q in diagram(2, 1, 2, 2)) {
        let all = enumerate_nat(&p, &q).unwrap();
        prop_assert_eq!(all.len() as u128, count_nat(&p, &q).unwrap());
        for m in all {
            let back = yoneda_extract(|x| eval_dm(&m, x), &p, &q, 2).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn simulation_category_laws(
        p in diagram(2, 2, 2, 1), q in diagram(2, 2, 2, 1),
        i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(),
    ) {
        let cells = enumerate_sims(&p, &q, 2).unwrap();
        let back = enumerate_sims(&q, &p, 1).unwrap();
        prop_assume!(!cells.is_empty() && !back.is_empty());
        let c = &cells[i.index(cells.len())];
        let d = &back[j.index(back.len())];
        let left = compose_sim(&identity_sim(&q).unwrap(), c).unwrap();
        let right = compose_sim(c, &identity_sim(&p).unwrap()).unwrap();
        prop_assert!(equivalence_check(&left, c).unwrap().is_some());
        prop_assert!(equivalence_check(&right, c).unwrap().is_some());
        let a = compose_sim(&compose_sim(c, d).unwrap(), c).unwrap();
        let b = compose_sim(c, &compose_sim(d, c).unwrap()).unwrap();
        prop_assert!(equivalence_check(&a, &b).unwrap().is_some());
    }

    #[test]
    fn simulation_round_trip(
        p in diagram(2, 2, 2, 2), q in diagram(2, 2, 2, 2),
        i in any::<prop::sample::Index>(),
    ) {
        let cells = enumerate_sims(&p, &q, 2).unwrap();
        prop_assume!(!cells.is_empty());
        let c = &cells[i.index(cells.len())];
        let back = extract_sim(|x| eval_sim(c, x), c.span(), &p, &q, 2).unwrap();
        prop_assert!(equivalence_check(&back, c).unwrap().is_some());
    }

    #[test]
    fn currying_is_bijective(p1 in single(2, 2), p2 in single(2, 2), p3 in single(2, 2)) {
        let report = adjunction_count_check(&p1, &p2, &p3, 5_000).unwrap();
        prop_assert!(report.agrees());
        if let Some(n) = report.round_trips {
            prop_assert_eq!(n as u128, report.tensor_side * 2);
        }
    }

    #[test]
    fn bang_matches_listwise_extension(p in diagram(2, 2, 2, 2), x in family(2, 2), k in 0usize..3) {
        let z = multiset_power(&x, k).unwrap();
        let report = bang_extension_check(&p, &z, k).unwrap();
        prop_assert_eq!(report.fiber_sizes.len(), poly::multisets(2, k).len());
        prop_assert_eq!(report.elements, report.fiber_sizes.iter().sum::<u128>());
    }
}
