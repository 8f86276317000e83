//! Named law suites over seeded random instances.
//!
//! Every case builds its instance from the generator, checks one or more laws
//! and counts them. The first violation stops the suite and reports the case
//! index together with the instance as a document.

use std::fmt;

use polycat_core::fam::{self, BoxProduct, Square};
use polycat_core::nat::{compose_dm, enumerate_nat, eval_dm, yoneda_extract};
use polycat_core::poly::{
    compose_direct, compose_structural, eval_extension, iso_check, multisets, plus, tensor,
};
use polycat_core::sim::{
    au_du_adjunction_check, compose_sim, copair_sim, enumerate_sims, equivalence_check, eval_sim, extract_sim,
    identity_sim, pair_sim, plus_structure,
};
use polycat_core::smcc::{
    adjunction_count_check, bang_extension_check, epsilon, multiset_power, tensor_universal_check, DayOracle,
};
use polycat_core::{Error as CoreError, Family, FinMap, PolyDiagram, SimCell};

use crate::doc::{Model, Simulation};
use crate::error::Failure;
use crate::gen::{Bounds, Gen};

pub const SUITES: &[&str] = &[
    "tensor-unit",
    "tensor-assoc",
    "tensor-symmetry",
    "composition",
    "additive",
    "adjunction",
    "tensor-universal",
    "day",
    "nat",
    "sim-category",
    "sim-roundtrip",
    "lifts",
    "beck-chevalley",
    "distributivity",
    "bang",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} cases, {} checks, ok", self.name, self.cases, self.checks)
    }
}

/// One case of a suite: collects the instance for the report and counts checks.
struct Case<'a> {
    suite: &'a str,
    index: usize,
    instance: Model,
    checks: usize,
}

impl Case<'_> {
    fn diagram(&mut self, name: &str, p: &PolyDiagram) {
        self.instance.diagrams.insert(name.to_string(), p.clone());
    }

    fn family(&mut self, name: &str, x: &Family) {
        self.instance.families.insert(name.to_string(), x.clone());
    }

    fn cell(&mut self, name: &str, src: &str, dst: &str, c: &SimCell) {
        self.instance
            .simulations
            .insert(name.to_string(), Simulation { src: src.to_string(), dst: dst.to_string(), cell: c.clone() });
    }

    fn violation(&self, what: &str) -> Failure {
        Failure::Law(format!(
            "suite {}, case {}: {what}\ninstance:\n{}",
            self.suite,
            self.index,
            self.instance.to_document().to_json()
        ))
    }

    fn check(&mut self, ok: bool, what: &str) -> Result<(), Failure> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(self.violation(what))
        }
    }

    /// A core error inside a law is a violation, except when it is the guard.
    fn lift<T>(&self, r: polycat_core::Result<T>, what: &str) -> Result<T, Failure> {
        r.map_err(|e| match e {
            CoreError::SearchTooLarge { .. } => Failure::Guard(format!("suite {}, case {}: {e}", self.suite, self.index)),
            e => self.violation(&format!("{what}: {e}")),
        })
    }
}

/// Runs one suite (or `all`) for `cases` cases from `seed`.
pub fn run(name: &str, seed: u64, cases: usize) -> Result<Vec<SuiteReport>, Failure> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, seed, cases)).collect();
    }
    run_one(name, seed, cases).map(|r| vec![r])
}

fn run_one(name: &str, seed: u64, cases: usize) -> Result<SuiteReport, Failure> {
    let law: fn(&mut Gen, &mut Case) -> Result<(), Failure> = match name {
        "tensor-unit" => tensor_unit,
        "tensor-assoc" => tensor_assoc,
        "tensor-symmetry" => tensor_symmetry,
        "composition" => composition,
        "additive" => additive,
        "adjunction" => adjunction,
        "tensor-universal" => tensor_universal,
        "day" => day,
        "nat" => nat,
        "sim-category" => sim_category,
        "sim-roundtrip" => sim_roundtrip,
        "lifts" => lifts,
        "beck-chevalley" => beck_chevalley,
        "distributivity" => distributivity,
        "bang" => bang,
        other => {
            return Err(Failure::Parse(format!("unknown suite `{other}`; known: all, {}", SUITES.join(", "))));
        }
    };
    let mut gen = Gen::new(seed);
    let mut checks = 0;
    for index in 0..cases {
        let mut case = Case { suite: name, index, instance: Model::default(), checks: 0 };
        law(&mut gen, &mut case)?;
        checks += case.checks;
    }
    Ok(SuiteReport { name: name.to_string(), cases, checks })
}

/// Unit laws for a single diagram; also used on the diagrams of a document.
pub fn check_diagram(name: &str, p: &PolyDiagram) -> Result<usize, Failure> {
    let mut case = Case { suite: "document", index: 0, instance: Model::default(), checks: 0 };
    case.diagram(name, p);
    unit_laws(&mut case, p)?;
    if p.is_endo() {
        let id = case.lift(identity_sim(p), "identity cell")?;
        case.check(id.validate().is_none(), "identity cell does not validate")?;
    }
    Ok(case.checks)
}

fn unit_laws(case: &mut Case, p: &PolyDiagram) -> Result<(), Failure> {
    let unit = PolyDiagram::bottom();
    let right = case.lift(iso_check(&tensor(p, &unit), p), "iso_check")?;
    case.check(right.is_some(), "p ⊗ Y is not isomorphic to p")?;
    let left = case.lift(iso_check(&tensor(&unit, p), p), "iso_check")?;
    case.check(left.is_some(), "Y ⊗ p is not isomorphic to p")
}

const SMALL: Bounds = Bounds { inputs: 2, outputs: 2, shapes: 2, fiber: 2 };
const MEDIUM: Bounds = Bounds { inputs: 3, outputs: 3, shapes: 3, fiber: 3 };

fn tensor_unit(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let p = g.diagram(MEDIUM);
    case.diagram("p", &p);
    unit_laws(case, &p)
}

fn tensor_assoc(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p, q, r) = (g.diagram(SMALL), g.diagram(SMALL), g.diagram(SMALL));
    case.diagram("p", &p);
    case.diagram("q", &q);
    case.diagram("r", &r);
    let iso = case.lift(iso_check(&tensor(&tensor(&p, &q), &r), &tensor(&p, &tensor(&q, &r))), "iso_check")?;
    case.check(iso.is_some(), "(p ⊗ q) ⊗ r is not isomorphic to p ⊗ (q ⊗ r)")
}

fn tensor_symmetry(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p, q) = (g.single(3, 3), g.single(3, 3));
    case.diagram("p", &p);
    case.diagram("q", &q);
    let iso = case.lift(iso_check(&tensor(&p, &q), &tensor(&q, &p)), "iso_check")?;
    case.check(iso.is_some(), "p ⊗ q is not isomorphic to q ⊗ p")
}

fn composition(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let p = g.diagram(MEDIUM);
    let k = g.size(1, 3);
    let q = g.diagram_on(p.outputs().size(), k, MEDIUM);
    let x = g.family(p.inputs().size(), 3);
    case.diagram("p", &p);
    case.diagram("q", &q);
    case.family("x", &x);
    let c = case.lift(compose_direct(&q, &p), "compose_direct")?;
    let cmp = case.lift(c.comparison(&q, &p, &x), "composition comparison")?;
    let inner = case.lift(eval_extension(&p, &x), "eval")?;
    let outer = case.lift(eval_extension(&q, inner.family()), "eval")?;
    case.check(cmp.dst().fiber_sizes() == outer.family().fiber_sizes(), "fiber sizes of ⟦q∘p⟧x and ⟦q⟧⟦p⟧x differ")?;
    case.check(cmp.is_iso(), "comparison is not a bijection")?;
    let s = case.lift(compose_structural(&q, &p), "compose_structural")?;
    let iso = case.lift(iso_check(&s, &c.diagram), "iso_check")?;
    case.check(iso.is_some_and(|w| w.verify(&s, &c.diagram)), "structural and direct composites differ")
}

fn additive(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let b = Bounds { inputs: 1, outputs: 1, shapes: 2, fiber: 2 };
    let (p1, p2) = (g.endo(b), g.endo(b));
    let (x, y) = (g.family(p1.inputs().size(), 3), g.family(p2.inputs().size(), 3));
    case.diagram("p1", &p1);
    case.diagram("p2", &p2);
    case.family("x", &x);
    case.family("y", &y);
    let sum = case.lift(eval_extension(&plus(&p1, &p2), &Family::sum(&x, &y)), "eval")?;
    let mut expected = case.lift(eval_extension(&p1, &x), "eval")?.family().fiber_sizes();
    expected.extend(case.lift(eval_extension(&p2, &y), "eval")?.family().fiber_sizes());
    case.check(sum.family().fiber_sizes() == expected, "⟦p1⊕p2⟧(x+y) ≠ ⟦p1⟧x + ⟦p2⟧y")?;

    let s = case.lift(plus_structure(&p1, &p2), "plus_structure")?;
    let q = g.endo(b);
    case.diagram("q", &q);
    let equiv = |a: &SimCell, b: &SimCell| equivalence_check(a, b).map(|w| w.is_some());

    // Coproduct: every cell out of the sum is the copairing of its restrictions.
    for d in case.lift(enumerate_sims(&s.sum, &q, 1), "enumerate_sims")? {
        let d1 = case.lift(compose_sim(&d, &s.inl), "compose")?;
        let d2 = case.lift(compose_sim(&d, &s.inr), "compose")?;
        let cp = case.lift(copair_sim(&d1, &d2), "copair")?;
        let back = case.lift(compose_sim(&cp, &s.inl), "compose")?;
        let ok = case.lift(equiv(&back, &d1), "equivalence")? && case.lift(equiv(&cp, &d), "equivalence")?;
        if !ok {
            case.cell("d", "sum", "q", &d);
        }
        case.check(ok, "a cell out of p1 ⊕ p2 is not the copairing of its restrictions")?;
    }
    // Product: every cell into the sum is the pairing of its projections.
    for d in case.lift(enumerate_sims(&q, &s.sum, 1), "enumerate_sims")? {
        let d1 = case.lift(compose_sim(&s.fst, &d), "compose")?;
        let d2 = case.lift(compose_sim(&s.snd, &d), "compose")?;
        let pr = case.lift(pair_sim(&d1, &d2), "pair")?;
        let back = case.lift(compose_sim(&s.fst, &pr), "compose")?;
        let ok = case.lift(equiv(&back, &d1), "equivalence")? && case.lift(equiv(&pr, &d), "equivalence")?;
        if !ok {
            case.cell("d", "q", "sum", &d);
        }
        case.check(ok, "a cell into p1 ⊕ p2 is not the pairing of its projections")?;
    }
    Ok(())
}

fn adjunction(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p1, p2, p3) = (g.single(2, 2), g.single(2, 2), g.single(2, 2));
    case.diagram("p1", &p1);
    case.diagram("p2", &p2);
    case.diagram("p3", &p3);
    let r = case.lift(adjunction_count_check(&p1, &p2, &p3, 2_000), "adjunction_count_check")?;
    case.check(r.agrees(), &format!("Nat(p1⊗p2, p3) = {} but Nat(p1, p2⊸p3) = {}", r.tensor_side, r.hom_side))
}

fn tensor_universal(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p1, p2) = (g.single(2, 2), g.single(2, 1));
    let f = g.single(2, 2);
    case.diagram("p1", &p1);
    case.diagram("p2", &p2);
    case.diagram("f", &f);
    let t = tensor(&p1, &p2);
    let all = case.lift(enumerate_nat(&t, &f), "enumerate_nat")?;
    let Some(m) = g.pick(&all).cloned() else {
        return Ok(());
    };
    let rho = |x: &Family, y: &Family| epsilon(&p1, &p2, x, y)?.then(&eval_dm(&m, &BoxProduct::new(x, y).family)?);
    let r = case.lift(tensor_universal_check(rho, &p1, &p2, &f, 2, 500), "tensor_universal_check")?;
    case.check(r.factorizations.is_none_or(|n| n == 1), "ρ does not factor uniquely through ε")
}

fn day(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p1, p2) = (g.single(2, 2), g.single(2, 2));
    let x = g.family(1, 2);
    case.diagram("p1", &p1);
    case.diagram("p2", &p2);
    case.family("x", &x);
    let widest = [&p1, &p2].iter().flat_map(|p| p.shapes().elements().map(|v| p.directions_of(v).len())).max();
    let r = case.lift(DayOracle::new(widest.unwrap_or(0).max(2)).check(&p1, &p2, &x), "day oracle")?;
    case.check(r.agrees, &format!("coend has {} classes, ⟦p1⊗p2⟧x has {} elements", r.classes, r.extension))
}

fn nat(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let b = Bounds { inputs: 2, outputs: 1, shapes: 2, fiber: 2 };
    let p = g.diagram(b);
    let q = g.diagram_on(p.inputs().size(), p.outputs().size(), b);
    let r = g.diagram_on(p.inputs().size(), p.outputs().size(), b);
    case.diagram("p", &p);
    case.diagram("q", &q);
    case.diagram("r", &r);
    let pq = case.lift(enumerate_nat(&p, &q), "enumerate_nat")?;
    let qr = case.lift(enumerate_nat(&q, &r), "enumerate_nat")?;
    if let Some(m) = g.pick(&pq).cloned() {
        let back = case.lift(yoneda_extract(|x| eval_dm(&m, x), &p, &q, 2), "extraction")?;
        case.check(back == m, "extraction does not invert evaluation")?;
        if let Some(m2) = g.pick(&qr) {
            let x = g.family(p.inputs().size(), 3);
            case.family("x", &x);
            let lhs = case.lift(compose_dm(m2, &m).and_then(|c| eval_dm(&c, &x)), "compose_dm")?;
            let rhs = case.lift(eval_dm(&m, &x).and_then(|a| a.then(&eval_dm(m2, &x)?)), "eval_dm")?;
            case.check(lhs == rhs, "vertical composition does not commute with evaluation")?;
        }
    }
    Ok(())
}

fn sim_category(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let b = Bounds { inputs: 2, outputs: 2, shapes: 2, fiber: 1 };
    let (p, q) = (g.endo(b), g.endo(b));
    case.diagram("p", &p);
    case.diagram("q", &q);
    let (Some(c), Some(d)) = (case.lift(g.sim(&p, &q, 2), "enumerate")?, case.lift(g.sim(&q, &p, 2), "enumerate")?) else {
        return Ok(());
    };
    case.cell("c", "p", "q", &c);
    case.cell("d", "q", "p", &d);
    let eq = |case: &Case, a: polycat_core::Result<SimCell>, b: &SimCell| -> Result<bool, Failure> {
        let a = case.lift(a, "compose_sim")?;
        Ok(case.lift(equivalence_check(&a, b), "equivalence_check")?.is_some())
    };
    let id_q = case.lift(identity_sim(&q), "identity")?;
    let id_p = case.lift(identity_sim(&p), "identity")?;
    let ok = eq(case, compose_sim(&id_q, &c), &c)?;
    case.check(ok, "id ∘ c ≢ c")?;
    let ok = eq(case, compose_sim(&c, &id_p), &c)?;
    case.check(ok, "c ∘ id ≢ c")?;
    let left = case.lift(compose_sim(&c, &d).and_then(|cd| compose_sim(&cd, &c)), "compose_sim")?;
    let ok = eq(case, compose_sim(&d, &c).and_then(|dc| compose_sim(&c, &dc)), &left)?;
    case.check(ok, "(c ∘ d) ∘ c ≢ c ∘ (d ∘ c)")
}

fn sim_roundtrip(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (p, q) = (g.endo(SMALL), g.endo(SMALL));
    let q = if q.inputs().size() == p.inputs().size() { q } else { g.diagram_on(p.inputs().size(), p.inputs().size(), SMALL) };
    case.diagram("p", &p);
    case.diagram("q", &q);
    let Some(c) = case.lift(g.sim(&p, &q, 2), "enumerate")? else {
        return Ok(());
    };
    case.cell("c", "p", "q", &c);
    let back = case.lift(extract_sim(|x| eval_sim(&c, x), c.span(), &p, &q, 2), "extract_sim")?;
    let w = case.lift(equivalence_check(&back, &c), "equivalence_check")?;
    case.check(w.is_some(), "extract_sim ∘ eval_sim is not the identity")
}

fn lifts(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (i2, i3) = (g.size(1, 2), g.size(1, 2));
    let r = g.span(i2, i3, 3);
    let (y, z) = (g.family(i2, 2), g.family(i3, 2));
    case.family("y", &y);
    case.family("z", &z);
    case.instance.spans.insert("r".to_string(), r.clone());
    let rep = case.lift(au_du_adjunction_check(&r, &y, &z), "au_du_adjunction_check")?;
    case.check(rep.count_sum_side == rep.count_product_side, "internal counts differ")?;
    case.check(rep.au_du.len() as u128 == rep.count_sum_side, "hom count disagrees with the formula")
}

fn beck_chevalley(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let c = g.size(1, 3);
    let (a, b2) = (g.size(0, 3), g.size(0, 3));
    let (bottom, right) = (g.map(a, c), g.map(b2, c));
    let z = g.family(a, 3);
    case.instance.maps.insert("bottom".to_string(), bottom.clone());
    case.instance.maps.insert("right".to_string(), right.clone());
    case.family("z", &z);
    let sq = case.lift(Square::pullback_of(&bottom, &right), "pullback")?;
    let w = case.lift(fam::beck_chevalley_check(&sq, &z), "Beck-Chevalley")?;
    case.check(w.pi_iso.is_iso() && w.sigma_iso.is_iso(), "Beck-Chevalley comparison is not bijective")
}

fn distributivity(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let (n, m) = (g.size(0, 3), g.size(1, 3));
    let a = g.map(n, m);
    let len = g.size(0, 3);
    let b = g.map(len, n.max(1));
    let b = if n == 0 { FinMap::empty(a.dom()) } else { b };
    let x = g.family(b.dom().size(), 2);
    case.instance.maps.insert("a".to_string(), a.clone());
    case.instance.maps.insert("b".to_string(), b.clone());
    case.family("x", &x);
    let iso = case.lift(fam::distributivity_check(&a, &b, &x), "distributivity")?;
    case.check(iso.is_iso(), "distributivity comparison is not bijective")
}

fn bang(g: &mut Gen, case: &mut Case) -> Result<(), Failure> {
    let p = g.endo(SMALL);
    let k = g.size(0, 2);
    let x = g.family(p.inputs().size(), 2);
    case.diagram("p", &p);
    case.family("x", &x);
    let z = case.lift(multiset_power(&x, k), "multiset power")?;
    let r = case.lift(bang_extension_check(&p, &z, k), "bang_extension_check")?;
    case.check(r.elements == r.fiber_sizes.iter().sum::<u128>(), "⟦!p⟧ z is not Σ_c ⟦p⟧* Δ_c z")?;
    let w = g.family(multisets(p.inputs().size(), k).len(), 2);
    case.family("w", &w);
    let r = case.lift(bang_extension_check(&p, &w, k), "bang_extension_check")?;
    case.check(r.elements == r.fiber_sizes.iter().sum::<u128>(), "⟦!p⟧ w is not Σ_c ⟦p⟧* Δ_c w")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_few_cases() {
        for name in SUITES {
            let r = run(name, 1, 3).unwrap();
            assert_eq!(r[0].cases, 3, "{name}");
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run("nope", 0, 1), Err(Failure::Parse(_))));
    }

    #[test]
    fn deterministic() {
        assert_eq!(run("composition", 9, 5).unwrap(), run("composition", 9, 5).unwrap());
    }
}
