//! Acceptance criteria. Each prints one PASS/FAIL line with its timing; the
//! test fails if any criterion fails or runs over its time limit.
//!
//! Run with `cargo test -p polycat --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use polycat::gen::{Bounds, Gen};
use polycat_core::fam::{self, all_families, BoxProduct, Square};
use polycat_core::nat::{count_nat, eval_dm};
use polycat_core::poly::{
    compose_direct, compose_structural, dualize, eval_extension, hom_single_sorted, iso_check, multisets, plus,
    tensor,
};
use polycat_core::sim::{
    compose_sim, copair_sim, enumerate_sims, equivalence_check, eval_sim, extract_sim, pair_sim, plus_structure,
};
use polycat_core::smcc::{
    adjunction_count_check, bang_extension_check, double_dual_report, epsilon, multiset_power,
    tensor_universal_check, DayOracle,
};
use polycat_core::{guard, DiagMorphism, FinMap, PolyDiagram, SimCell};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Every single-sorted diagram with at most `shapes` shapes and fibers of
/// size at most `fiber`, one per isomorphism class.
fn single_sorted(shapes: usize, fiber: usize) -> Vec<PolyDiagram> {
    multisets(fiber + 1, shapes)
        .into_iter()
        .map(|exps| {
            let listing: Vec<(usize, Vec<usize>)> = exps.iter().map(|&e| (0, vec![0; e])).collect();
            PolyDiagram::from_shapes(1, 1, &listing).expect("single-sorted listing")
        })
        .collect()
}

/// A random container morphism `src ⇒ dst`, if one exists.
fn random_nat(g: &mut Gen, src: &PolyDiagram, dst: &PolyDiagram) -> Option<DiagMorphism> {
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for v in src.shapes().elements() {
        let out = src.output_of().apply(v);
        let targets: Vec<usize> = dst.shapes().elements().filter(|&w| dst.output_of().apply(w) == out).collect();
        let w = *g.pick(&targets)?;
        let mut b = Vec::new();
        for &u2 in dst.directions_of(w) {
            let i = dst.input_of().apply(u2);
            let sources: Vec<usize> =
                src.directions_of(v).iter().copied().filter(|&u1| src.input_of().apply(u1) == i).collect();
            b.push(*g.pick(&sources)?);
        }
        alpha.push(w);
        beta.push(b);
    }
    Some(DiagMorphism::new(src.clone(), dst.clone(), alpha, beta).expect("generated morphism is valid"))
}

fn composition_commutes() -> Outcome {
    let b = Bounds { inputs: 3, outputs: 3, shapes: 3, fiber: 3 };
    let mut g = Gen::new(1);
    let mut elements = 0;
    for case in 0..200 {
        let p = g.diagram(b);
        let j = g.size(1, 3);
        let q = g.diagram_on(p.outputs().size(), j, b);
        let x = g.family(p.inputs().size(), 3);
        let c = ok(compose_direct(&q, &p), "compose_direct")?;
        let direct = ok(eval_extension(&c.diagram, &x), "eval")?;
        let inner = ok(eval_extension(&p, &x), "eval")?;
        let outer = ok(eval_extension(&q, inner.family()), "eval")?;
        let cmp = ok(c.comparison(&q, &p, &x), "comparison")?;
        require(direct.family().fiber_sizes() == outer.family().fiber_sizes(), || {
            format!("case {case}: fibers {:?} vs {:?}", direct.family().fiber_sizes(), outer.family().fiber_sizes())
        })?;
        require(cmp.src() == direct.family() && cmp.dst() == outer.family(), || format!("case {case}: comparison endpoints"))?;
        require(cmp.is_iso(), || format!("case {case}: comparison is not a bijection"))?;
        elements += direct.len();
    }
    Ok(format!("200 pairs, {elements} elements matched"))
}

fn composites_agree() -> Outcome {
    let b = Bounds { inputs: 3, outputs: 3, shapes: 3, fiber: 3 };
    let mut g = Gen::new(2);
    for case in 0..100 {
        let p = g.diagram(b);
        let j = g.size(1, 3);
        let q = g.diagram_on(p.outputs().size(), j, b);
        let s = ok(compose_structural(&q, &p), "compose_structural")?;
        let d = ok(compose_direct(&q, &p), "compose_direct")?.diagram;
        let w = ok(iso_check(&s, &d), "iso_check")?;
        require(w.is_some_and(|w| w.verify(&s, &d)), || format!("case {case}: no verified witness"))?;
    }
    Ok("100 instances, witnesses verified".into())
}

fn closed_structure() -> Outcome {
    let mut g = Gen::new(3);
    let mut trips = 0;
    for case in 0..100 {
        let (p1, p2, p3) = (g.single(2, 2), g.single(2, 2), g.single(2, 2));
        let r = ok(adjunction_count_check(&p1, &p2, &p3, 20_000), "adjunction")?;
        require(r.agrees(), || format!("case {case}: {r}"))?;
        trips += r.round_trips.unwrap_or(0);
    }
    let x = PolyDiagram::monomials(&[(1, 1)]);
    let x2 = PolyDiagram::monomials(&[(1, 2)]);
    let two_x = PolyDiagram::monomials(&[(2, 1)]);
    let hom = ok(hom_single_sorted(&x2, &two_x), "hom")?;
    require(ok(iso_check(&hom.diagram, &PolyDiagram::monomials(&[(4, 1)])), "iso")?.is_some(), || {
        format!("X² ⊸ 2X is {}", hom.diagram)
    })?;
    let lhs = ok(count_nat(&tensor(&x, &x2), &two_x), "count")?;
    let rhs = ok(count_nat(&x, &hom.diagram), "count")?;
    require(lhs == 4 && rhs == 4, || format!("Nat(X ⊗ X², 2X) = {lhs}, Nat(X, 4X) = {rhs}"))?;
    let r = ok(adjunction_count_check(&x, &x2, &two_x, 100), "adjunction")?;
    require(r.agrees() && r.round_trips == Some(8), || format!("X, X², 2X: {r}"))?;
    Ok(format!("100 triples, {trips} round trips, Nat(X², 2X) = Nat(X, 4X) = 4"))
}

fn universal_tensor() -> Outcome {
    let all = single_sorted(2, 2);
    let mut g = Gen::new(4);
    let mut rhos = 0;
    let mut day = 0;
    let mut oracles: Vec<DayOracle> = (2..=4).map(DayOracle::new).collect();
    let xs = ok(all_families(1, 2), "families")?;
    for p1 in &all {
        for p2 in &all {
            let t = tensor(p1, p2);
            // ρ = ε itself, then ρ = ε followed by a random morphism into a random target.
            let mut targets = vec![(t.clone(), DiagMorphism::identity(&t))];
            for _ in 0..3 {
                let f = all[g.size(0, all.len() - 1)].clone();
                if let Some(m) = random_nat(&mut g, &t, &f) {
                    targets.push((f, m));
                }
            }
            for (f, m) in &targets {
                let rho = |x: &polycat_core::Family, y: &polycat_core::Family| {
                    epsilon(p1, p2, x, y)?.then(&eval_dm(m, &BoxProduct::new(x, y).family)?)
                };
                let r = ok(tensor_universal_check(rho, p1, p2, f, 2, 500), "tensor_universal_check")
                    .map_err(|e| format!("{p1} ⊗ {p2} → {f}: {e}"))?;
                require(r.factorizations.is_none_or(|n| n == 1), || format!("{p1} ⊗ {p2} → {f}: {r}"))?;
                rhos += 1;
            }
            for x in &xs {
                for oracle in &mut oracles {
                    let r = ok(oracle.check(p1, p2, x), "day oracle")?;
                    require(r.agrees, || format!("{p1}, {p2}, |x| = {}: {r}", x.len()))?;
                    day += 1;
                }
            }
        }
    }
    Ok(format!("{rhos} transformations, {day} coend comparisons over skeletons 2..4"))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for at in 0..n {
            let mut perm = rest.clone();
            perm.insert(at, n - 1);
            out.push(perm);
        }
    }
    out
}

/// Whether `c` is the least of its relabellings. Relabelled cells are the
/// same morphism, and `enumerate_sims` lists every one of them.
fn is_representative(c: &SimCell, perms: &[Vec<usize>]) -> Result<bool, String> {
    let key = |c: &SimCell| {
        let (a, b, g) = c.tables();
        (c.span().left.table().to_vec(), c.span().right.table().to_vec(), a.to_vec(), b.to_vec(), g.to_vec())
    };
    let own = key(c);
    for perm in perms {
        let perm = ok(FinMap::from_table(perm.len(), perm.clone()), "permutation")?;
        if key(&ok(c.relabel(&perm), "relabel")?) < own {
            return Ok(false);
        }
    }
    Ok(true)
}

fn simulations_are_representable() -> Outcome {
    let mut diagrams = single_sorted(2, 2);
    let mut g = Gen::new(5);
    let b = Bounds { inputs: 2, outputs: 2, shapes: 2, fiber: 2 };
    for _ in 0..10 {
        diagrams.push(g.diagram_on(2, 2, b));
    }
    let perms: Vec<Vec<Vec<usize>>> = (0..=2).map(permutations).collect();
    let mut cells = 0;
    for p in &diagrams {
        for q in &diagrams {
            if p.inputs() != q.inputs() {
                continue;
            }
            for c in ok(enumerate_sims(p, q, 2), "enumerate_sims")? {
                if !is_representative(&c, &perms[c.span().apex.size()])? {
                    continue;
                }
                // Extraction also checks the extracted cell against the oracle on
                // every family with fibers of size at most 2.
                let back = ok(extract_sim(|x| eval_sim(&c, x), c.span(), p, q, 2), "extract_sim")
                    .map_err(|e| format!("{p} → {q}: {e}"))?;
                require(ok(equivalence_check(&back, &c), "equivalence")?.is_some(), || {
                    format!("{p} → {q}: extract ∘ eval is not the identity")
                })?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells up to relabelling, all single-sorted pairs plus 10 two-sorted diagrams"))
}

fn equiv(a: &SimCell, b: &SimCell) -> Result<bool, String> {
    Ok(ok(equivalence_check(a, b), "equivalence")?.is_some())
}

fn additive_structure() -> Outcome {
    let mut g = Gen::new(6);
    let b = Bounds { inputs: 2, outputs: 2, shapes: 2, fiber: 2 };
    let tiny = Bounds { inputs: 1, outputs: 1, shapes: 1, fiber: 1 };
    let mut sampled = 0;
    for case in 0..100 {
        let (p1, p2) = (g.endo(b), g.endo(b));
        let (x, y) = (g.family(p1.inputs().size(), 3), g.family(p2.inputs().size(), 3));
        let sum = ok(eval_extension(&plus(&p1, &p2), &polycat_core::Family::sum(&x, &y)), "eval")?;
        let mut expected = ok(eval_extension(&p1, &x), "eval")?.family().fiber_sizes();
        expected.extend(ok(eval_extension(&p2, &y), "eval")?.family().fiber_sizes());
        require(sum.family().fiber_sizes() == expected, || format!("case {case}: ⟦p1 ⊕ p2⟧ is not blockwise"))?;

        // Product and coproduct equations on cells built from random legs.
        let s = ok(plus_structure(&p1, &p2), "plus_structure")?;
        let q = g.endo(b);
        let into1 = ok(g.sim(&q, &p1, 2), "enumerate")?;
        let into2 = ok(g.sim(&q, &p2, 2), "enumerate")?;
        if let (Some(c1), Some(c2)) = (into1, into2) {
            let pr = ok(pair_sim(&c1, &c2), "pair")?;
            require(equiv(&ok(compose_sim(&s.fst, &pr), "compose")?, &c1)?, || format!("case {case}: π1 ∘ ⟨c1, c2⟩ ≢ c1"))?;
            require(equiv(&ok(compose_sim(&s.snd, &pr), "compose")?, &c2)?, || format!("case {case}: π2 ∘ ⟨c1, c2⟩ ≢ c2"))?;
        }
        let from1 = ok(g.sim(&p1, &q, 2), "enumerate")?;
        let from2 = ok(g.sim(&p2, &q, 2), "enumerate")?;
        if let (Some(c1), Some(c2)) = (from1, from2) {
            let cp = ok(copair_sim(&c1, &c2), "copair")?;
            require(equiv(&ok(compose_sim(&cp, &s.inl), "compose")?, &c1)?, || format!("case {case}: [c1, c2] ∘ ι1 ≢ c1"))?;
            require(equiv(&ok(compose_sim(&cp, &s.inr), "compose")?, &c2)?, || format!("case {case}: [c1, c2] ∘ ι2 ≢ c2"))?;
        }

        // Uniqueness: sampled cells with up to three states are determined by their restrictions.
        if case % 4 == 0 {
            let (t1, t2, r) = (g.endo(tiny), g.endo(tiny), g.endo(tiny));
            let st = ok(plus_structure(&t1, &t2), "plus_structure")?;
            let out = ok(enumerate_sims(&st.sum, &r, 3), "enumerate_sims")?;
            let inn = ok(enumerate_sims(&r, &st.sum, 3), "enumerate_sims")?;
            for _ in 0..8 {
                if let Some(d) = g.pick(&out) {
                    let d1 = ok(compose_sim(d, &st.inl), "compose")?;
                    let d2 = ok(compose_sim(d, &st.inr), "compose")?;
                    require(equiv(&ok(copair_sim(&d1, &d2), "copair")?, d)?, || format!("case {case}: d ≢ [d ι1, d ι2]"))?;
                    sampled += 1;
                }
                if let Some(d) = g.pick(&inn) {
                    let d1 = ok(compose_sim(&st.fst, d), "compose")?;
                    let d2 = ok(compose_sim(&st.snd, d), "compose")?;
                    require(equiv(&ok(pair_sim(&d1, &d2), "pair")?, d)?, || format!("case {case}: d ≢ ⟨π1 d, π2 d⟩"))?;
                    sampled += 1;
                }
            }
        }
    }
    Ok(format!("100 instances, {sampled} sampled uniqueness checks"))
}

fn bang_extension() -> Outcome {
    let mut g = Gen::new(7);
    let mut elements: u128 = 0;
    let mut runs = 0;
    let mut check = |p: &PolyDiagram, z: &polycat_core::Family, k: usize| -> Result<(), String> {
        let r = ok(bang_extension_check(p, z, k), "bang_extension_check").map_err(|e| format!("{p}, k = {k}: {e}"))?;
        elements += r.elements;
        runs += 1;
        Ok(())
    };
    for p in single_sorted(2, 2) {
        for k in 0..=3 {
            for n in 0..=2 {
                let z = ok(multiset_power(&polycat_core::Family::from_fiber_sizes(&[n]), k), "multiset power")?;
                check(&p, &z, k)?;
            }
            let w = g.family(k + 1, 2);
            check(&p, &w, k)?;
        }
    }
    let b = Bounds { inputs: 2, outputs: 2, shapes: 2, fiber: 2 };
    for _ in 0..20 {
        let p = g.diagram_on(2, 2, b);
        let k = g.size(0, 3);
        let x = g.family(2, 2);
        check(&p, &ok(multiset_power(&x, k), "multiset power")?, k)?;
        let w = g.family(multisets(2, k).len(), 2);
        check(&p, &w, k)?;
    }
    Ok(format!("{runs} comparisons, {elements} elements"))
}

fn double_dual() -> Outcome {
    let p = PolyDiagram::monomials(&[(2, 2)]);
    let d = ok(dualize(&p), "dual")?;
    let dd = ok(dualize(&d), "dual")?;
    require(ok(iso_check(&d, &PolyDiagram::monomials(&[(4, 2)])), "iso")?.is_some(), || format!("P⊥ = {d}"))?;
    require(ok(iso_check(&dd, &PolyDiagram::monomials(&[(16, 4)])), "iso")?.is_some(), || format!("P⊥⊥ = {dd}"))?;
    require(dd.shapes().size() == 16 && dd.directions_of(0).len() == 4, || format!("P⊥⊥ = {dd}"))?;
    let r = ok(double_dual_report(2, 2), "double dual")?;
    require(!r.iso && r.to_string() == "2X^2 vs 16X^4 : NOT ISO", || r.to_string())?;
    for (a, b) in [(1, 1), (2, 1)] {
        let r = ok(double_dual_report(a, b), "double dual")?;
        require(r.iso, || r.to_string())?;
    }
    Ok("2X^2 vs 16X^4 : NOT ISO; X and 2X are iso to their double duals".into())
}

fn base_change() -> Outcome {
    let mut g = Gen::new(9);
    for case in 0..100 {
        let c = g.size(1, 3);
        let (a, b2) = (g.size(0, 3), g.size(0, 3));
        let (bottom, right) = (g.map(a, c), g.map(b2, c));
        let z = g.family(a, 3);
        let sq = ok(Square::pullback_of(&bottom, &right), "pullback")?;
        let w = ok(fam::beck_chevalley_check(&sq, &z), "Beck-Chevalley")?;
        require(w.pi_iso.is_iso() && w.sigma_iso.is_iso(), || format!("Beck-Chevalley case {case}"))?;
    }
    for case in 0..100 {
        let (n, m) = (g.size(0, 3), g.size(1, 3));
        let a = g.map(n, m);
        let len = g.size(0, 3);
        let b = if n == 0 { FinMap::empty(a.dom()) } else { g.map(len, n) };
        let x = g.family(b.dom().size(), 3);
        let iso = ok(fam::distributivity_check(&a, &b, &x), "distributivity")?;
        require(iso.is_iso(), || format!("distributivity case {case}"))?;
    }
    Ok("100 Beck-Chevalley squares, 100 distributivity squares".into())
}

fn main() -> ExitCode {
    // The coend blocks and the bang comparisons at k = 3 walk about 1.3·10^8 elements.
    guard::set_limit(300_000_000);
    let criteria: [Criterion; 9] = [
        ("composition commutes with extension", 60, composition_commutes),
        ("structural and direct composites agree", 60, composites_agree),
        ("tensor-hom adjunction", 60, closed_structure),
        ("tensor universal property and coend", 120, universal_tensor),
        ("simulations are representable", 120, simulations_are_representable),
        ("additive structure", 60, additive_structure),
        ("bang extension", 60, bang_extension),
        ("double dual", 5, double_dual),
        ("Beck-Chevalley and distributivity", 60, base_change),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let timely = took <= Duration::from_secs(*limit);
        let line = match &outcome {
            Ok(detail) if timely => format!("PASS {}: {name} ({detail}) in {took:.2?}", i + 1),
            Ok(detail) => format!("FAIL {}: {name} ({detail}) took {took:.2?}, limit {limit}s", i + 1),
            Err(e) => format!("FAIL {}: {name}: {e} after {took:.2?}", i + 1),
        };
        println!("{line}");
        if !(outcome.is_ok() && timely) {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
