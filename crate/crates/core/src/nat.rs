//! Container morphisms: a forward map on shapes and, per shape, a backward
//! map on directions. Each one is a strong natural transformation between
//! extensions, and every such transformation arises from exactly one.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{ensure_eq, Error, Result};
use crate::fam::{self, FamMorphism, Family};
use crate::finset::{Choices, FinMap};
use crate::guard;
use crate::poly::{eval_extension, eval_map, PolyDiagram, PolyElement};

/// `α : A1 → A2` over `J` and, for each shape `v`, `β_v : d2⁻¹(α v) → d1⁻¹(v)`
/// over `I`. `beta[v][k]` is the source direction picked for the `k`-th
/// direction of `α(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagMorphism {
    src: PolyDiagram,
    dst: PolyDiagram,
    alpha: FinMap,
    beta: Vec<Vec<usize>>,
}

impl DiagMorphism {
    pub fn new(src: PolyDiagram, dst: PolyDiagram, alpha: Vec<usize>, beta: Vec<Vec<usize>>) -> Result<Self> {
        ensure_eq("morphism inputs", src.inputs().size(), dst.inputs().size())?;
        ensure_eq("morphism outputs", src.outputs().size(), dst.outputs().size())?;
        let alpha = FinMap::new(src.shapes().clone(), dst.shapes().clone(), alpha)?;
        ensure_eq("β tables", beta.len(), src.shapes().size())?;
        for v in src.shapes().elements() {
            let w = alpha.apply(v);
            if dst.output_of().apply(w) != src.output_of().apply(v) {
                return Err(Error::Invalid(format!("a2∘α ≠ a1 at shape {v}")));
            }
            let targets = dst.directions_of(w);
            if beta[v].len() != targets.len() {
                return Err(Error::Invalid(format!("β table of shape {v} has the wrong length")));
            }
            for (&u2, &u1) in targets.iter().zip(&beta[v]) {
                if u1 >= src.directions().size() || src.shape_of().apply(u1) != v {
                    return Err(Error::Invalid(format!("β_{v} sends {u2} outside d1⁻¹({v})")));
                }
                if src.input_of().apply(u1) != dst.input_of().apply(u2) {
                    return Err(Error::Invalid(format!("n1∘β_{v} ≠ n2 at direction {u2}")));
                }
            }
        }
        Ok(DiagMorphism { src, dst, alpha, beta })
    }

    pub fn identity(p: &PolyDiagram) -> Self {
        let beta = p.shapes().elements().map(|v| p.directions_of(v).to_vec()).collect();
        DiagMorphism { src: p.clone(), dst: p.clone(), alpha: FinMap::identity(p.shapes()), beta }
    }

    pub fn src(&self) -> &PolyDiagram {
        &self.src
    }

    pub fn dst(&self) -> &PolyDiagram {
        &self.dst
    }

    pub fn alpha(&self) -> &FinMap {
        &self.alpha
    }

    pub fn beta(&self, v: usize) -> &[usize] {
        &self.beta[v]
    }

    pub fn betas(&self) -> &[Vec<usize>] {
        &self.beta
    }

    /// The image of one element: `(v, h) ↦ (α v, h ∘ β_v)`.
    pub fn apply(&self, el: &PolyElement) -> PolyElement {
        let payload = self.beta[el.shape].iter().map(|&u| el.payload[self.src.dir_position(u)]).collect();
        PolyElement { shape: self.alpha.apply(el.shape), payload }
    }
}

/// The component at `x` of the transformation represented by `m`.
pub fn eval_dm(m: &DiagMorphism, x: &Family) -> Result<FamMorphism> {
    let src = eval_extension(&m.src, x)?;
    let dst = eval_extension(&m.dst, x)?;
    let table = (0..src.len())
        .map(|e| dst.index_of(&m.apply(&src.element(e))).expect("image lies in the target extension"))
        .collect();
    let map = FinMap::new(src.family().total().clone(), dst.family().total().clone(), table)?;
    FamMorphism::new(src.family().clone(), dst.family().clone(), map)
}

/// `m2 ∘ m1`.
pub fn compose_dm(m2: &DiagMorphism, m1: &DiagMorphism) -> Result<DiagMorphism> {
    if m1.dst != m2.src {
        return Err(Error::Mismatch {
            what: "morphism composition",
            left: m1.dst.shapes().size(),
            right: m2.src.shapes().size(),
        });
    }
    let mid = &m1.dst;
    let alpha = m1.src.shapes().elements().map(|v| m2.alpha.apply(m1.alpha.apply(v))).collect();
    let beta = m1
        .src
        .shapes()
        .elements()
        .map(|v| m2.beta[m1.alpha.apply(v)].iter().map(|&u2| m1.beta[v][mid.dir_position(u2)]).collect())
        .collect();
    DiagMorphism::new(m1.src.clone(), m2.dst.clone(), alpha, beta)
}

/// For a source shape `v` and target shape `w` over the same output, the
/// admissible source directions for each direction of `w`.
fn beta_options(p: &PolyDiagram, q: &PolyDiagram, v: usize, w: usize) -> Vec<Vec<usize>> {
    q.directions_of(w)
        .iter()
        .map(|&u2| {
            let i = q.input_of().apply(u2);
            p.directions_of(v).iter().copied().filter(|&u1| p.input_of().apply(u1) == i).collect()
        })
        .collect()
}

/// `|Nat(⟦p⟧, ⟦q⟧)| = Π_v Σ_{w : a2 w = a1 v} Π_{u ∈ d2⁻¹(w)} |{u' ∈ d1⁻¹(v) : n1 u' = n2 u}|`.
pub fn count_nat(p: &PolyDiagram, q: &PolyDiagram) -> Result<u128> {
    ensure_eq("morphism inputs", p.inputs().size(), q.inputs().size())?;
    ensure_eq("morphism outputs", p.outputs().size(), q.outputs().size())?;
    let targets = q.output_of().fibers();
    Ok(p.shapes().elements().fold(1u128, |acc, v| {
        let per_shape = targets[p.output_of().apply(v)]
            .iter()
            .map(|&w| guard::product(beta_options(p, q, v, w).iter().map(Vec::len)))
            .fold(0u128, u128::saturating_add);
        acc.saturating_mul(per_shape)
    }))
}

/// All container morphisms `p ⇒ q`, ordered by `α` then by the `β` tables.
pub fn enumerate_nat(p: &PolyDiagram, q: &PolyDiagram) -> Result<Vec<DiagMorphism>> {
    guard::check(count_nat(p, q)?)?;
    let targets = q.output_of().fibers();
    // Local choices per shape: (w, β_v).
    let local: Vec<Vec<(usize, Vec<usize>)>> = p
        .shapes()
        .elements()
        .map(|v| {
            let mut out = Vec::new();
            for &w in &targets[p.output_of().apply(v)] {
                let choices = Choices::new(beta_options(p, q, v, w))?;
                out.extend(choices.iter().map(|b| (w, b)));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let picks = Choices::new(local.iter().map(|l| (0..l.len()).collect()).collect())?;
    picks
        .iter()
        .map(|pick| {
            let (alpha, beta) = pick.iter().enumerate().map(|(v, &k)| local[v][k].clone()).unzip();
            DiagMorphism::new(p.clone(), q.clone(), alpha, beta)
        })
        .collect()
}

/// The generic family of shape `v`: the fiber over `i` is the set of
/// directions `u` of `v` with `n(u) = i`, numbered by their position in `d⁻¹(v)`.
pub fn generic_family(p: &PolyDiagram, v: usize) -> Family {
    let table = p.directions_of(v).iter().map(|&u| p.input_of().apply(u)).collect();
    Family::new(FinMap::from_table(p.inputs().size(), table).expect("directions read inputs"))
}

/// The generic element `(v, id)` of `⟦p⟧(G_v)`.
pub fn generic_element(p: &PolyDiagram, v: usize) -> PolyElement {
    PolyElement { shape: v, payload: (0..p.directions_of(v).len()).collect() }
}

fn check_component(
    got: &FamMorphism,
    src: &Family,
    dst: &Family,
    what: &str,
) -> Result<()> {
    if got.src() != src || got.dst() != dst {
        return Err(Error::NotNatural(format!("{what}: component has the wrong source or target")));
    }
    Ok(())
}

/// Reads a container morphism off a transformation given componentwise, by
/// applying it to each generic element. The result is then compared with the
/// oracle on every family with fibers of size at most `bound`.
pub fn yoneda_extract<F>(oracle: F, p: &PolyDiagram, q: &PolyDiagram, bound: usize) -> Result<DiagMorphism>
where
    F: Fn(&Family) -> Result<FamMorphism>,
{
    ensure_eq("morphism inputs", p.inputs().size(), q.inputs().size())?;
    let mut alpha = Vec::with_capacity(p.shapes().size());
    let mut beta = Vec::with_capacity(p.shapes().size());
    for v in p.shapes().elements() {
        let g = generic_family(p, v);
        let src = eval_extension(p, &g)?;
        let dst = eval_extension(q, &g)?;
        let component = oracle(&g)?;
        check_component(&component, src.family(), dst.family(), "generic family")?;
        let e = src.index_of(&generic_element(p, v)).expect("generic element");
        let image = dst.element(component.apply(e));
        let dirs = p.directions_of(v);
        alpha.push(image.shape);
        beta.push(image.payload.iter().map(|&k| dirs[k]).collect());
    }
    let m = DiagMorphism::new(p.clone(), q.clone(), alpha, beta)
        .map_err(|e| Error::NotNatural(format!("extracted data is not a morphism: {e}")))?;
    for x in fam::all_families(p.inputs().size(), bound)? {
        let expected = eval_dm(&m, &x)?;
        let got = oracle(&x)?;
        if got != expected {
            return Err(Error::NotNatural(format!("disagrees at family {:?}", x.fiber_sizes())));
        }
    }
    Ok(m)
}

/// A square `⟦q⟧f ∘ θ_x ≠ θ_y ∘ ⟦p⟧f` that fails to commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub f: Vec<usize>,
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityReport {
    pub squares: usize,
    pub failure: Option<NaturalityFailure>,
}

impl NaturalityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks every naturality square along every morphism between families with
/// fibers of size at most `bound`.
pub fn naturality_check<F>(oracle: F, p: &PolyDiagram, q: &PolyDiagram, bound: usize) -> Result<NaturalityReport>
where
    F: Fn(&Family) -> Result<FamMorphism>,
{
    let families = fam::all_families(p.inputs().size(), bound)?;
    let components = families.iter().map(&oracle).collect::<Result<Vec<_>>>()?;
    for (x, c) in families.iter().zip(&components) {
        check_component(c, eval_extension(p, x)?.family(), eval_extension(q, x)?.family(), "component")?;
    }
    let mut squares = 0;
    for (x, cx) in families.iter().zip(&components) {
        for (y, cy) in families.iter().zip(&components) {
            for f in fam::hom_enumerate(x, y)? {
                squares += 1;
                let left = eval_map(p, &f)?.then(cy)?;
                let right = cx.then(&eval_map(q, &f)?)?;
                if let Some(element) = (0..left.src().len()).find(|&e| left.apply(e) != right.apply(e)) {
                    let failure = NaturalityFailure {
                        x: x.fiber_sizes(),
                        y: y.fiber_sizes(),
                        f: f.map().table().to_vec(),
                        element,
                    };
                    return Ok(NaturalityReport { squares, failure: Some(failure) });
                }
            }
        }
    }
    Ok(NaturalityReport { squares, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square_to_two_x() -> (PolyDiagram, PolyDiagram) {
        (PolyDiagram::monomials(&[(1, 2)]), PolyDiagram::monomials(&[(2, 1)]))
    }

    #[test]
    fn identity_evaluates_to_identity() {
        let p = PolyDiagram::monomials(&[(1, 0), (1, 2)]);
        let x = Family::from_fiber_sizes(&[2]);
        let id = eval_dm(&DiagMorphism::identity(&p), &x).unwrap();
        assert_eq!(id, FamMorphism::identity(id.src()));
    }

    #[test]
    fn projection_example() {
        let (sq, two_x) = square_to_two_x();
        let m = DiagMorphism::new(sq.clone(), two_x, vec![0], vec![vec![0]]).unwrap();
        let c = eval_dm(&m, &Family::from_fiber_sizes(&[3])).unwrap();
        assert_eq!(c.src().len(), 9);
        assert_eq!(c.dst().len(), 6);
        let mut image: Vec<usize> = c.map().table().to_vec();
        image.sort_unstable();
        image.dedup();
        assert_eq!(image, vec![0, 1, 2]);
        // h = (1, 2) goes to (0, 1).
        assert_eq!(c.apply(5), 1);
        let with_id = compose_dm(&DiagMorphism::identity(m.dst()), &m).unwrap();
        assert_eq!(with_id, m);
    }

    #[test]
    fn composition_example() {
        let (sq, two_x) = square_to_two_x();
        let m = DiagMorphism::new(sq, two_x.clone(), vec![0], vec![vec![0]]).unwrap();
        let swap = DiagMorphism::new(two_x.clone(), two_x, vec![1, 0], vec![vec![0], vec![1]]).unwrap();
        let c = compose_dm(&swap, &m).unwrap();
        assert_eq!(c.alpha().table(), &[1]);
        let x = Family::from_fiber_sizes(&[2]);
        assert_eq!(eval_dm(&c, &x).unwrap(), eval_dm(&m, &x).unwrap().then(&eval_dm(&swap, &x).unwrap()).unwrap());
    }

    #[test]
    fn counting_examples() {
        let (sq, two_x) = square_to_two_x();
        assert_eq!(count_nat(&sq, &two_x).unwrap(), 4);
        assert_eq!(enumerate_nat(&sq, &two_x).unwrap().len(), 4);
        let x = PolyDiagram::monomials(&[(1, 1)]);
        assert_eq!(count_nat(&x, &sq).unwrap(), 1);
        let p = PolyDiagram::from_shapes(2, 1, &[(0, vec![0, 1]), (0, vec![1])]).unwrap();
        assert!(count_nat(&p, &p).unwrap() >= 1);
        assert_eq!(enumerate_nat(&p, &p).unwrap().len() as u128, count_nat(&p, &p).unwrap());
    }

    #[test]
    fn extraction_round_trips() {
        let (sq, two_x) = square_to_two_x();
        let all = enumerate_nat(&sq, &two_x).unwrap();
        let mut seen = Vec::new();
        for m in &all {
            let got = yoneda_extract(|x| eval_dm(m, x), &sq, &two_x, 3).unwrap();
            assert_eq!(&got, m);
            seen.push(got);
        }
        seen.dedup();
        assert_eq!(seen.len(), 4);
        let p = PolyDiagram::from_shapes(2, 2, &[(1, vec![0, 1]), (0, vec![])]).unwrap();
        let id = yoneda_extract(|x| Ok(FamMorphism::identity(eval_extension(&p, x)?.family())), &p, &p, 2).unwrap();
        assert_eq!(id, DiagMorphism::identity(&p));
    }

    #[test]
    fn unnatural_oracle_is_rejected() {
        let (sq, two_x) = square_to_two_x();
        let m0 = DiagMorphism::new(sq.clone(), two_x.clone(), vec![0], vec![vec![0]]).unwrap();
        let m1 = DiagMorphism::new(sq.clone(), two_x.clone(), vec![0], vec![vec![1]]).unwrap();
        let oracle = |x: &Family| if x.len() == 3 { eval_dm(&m1, x) } else { eval_dm(&m0, x) };
        assert!(matches!(yoneda_extract(oracle, &sq, &two_x, 3), Err(Error::NotNatural(_))));
        let report = naturality_check(oracle, &sq, &two_x, 3).unwrap();
        assert!(!report.passed());
        let fail = report.failure.unwrap();
        assert!(fail.x.contains(&3) || fail.y.contains(&3));
    }

    #[test]
    fn naturality_of_represented_transformations() {
        let (sq, two_x) = square_to_two_x();
        for m in enumerate_nat(&sq, &two_x).unwrap() {
            let report = naturality_check(|x| eval_dm(&m, x), &sq, &two_x, 2).unwrap();
            assert!(report.passed());
            assert!(report.squares > 0);
        }
        let vacuous = naturality_check(|x| eval_dm(&DiagMorphism::identity(&sq), x), &sq, &sq, 0).unwrap();
        assert!(vacuous.passed());
        assert_eq!(vacuous.squares, 1);
    }

    #[test]
    fn rejects_bad_tables() {
        let p = PolyDiagram::from_shapes(2, 1, &[(0, vec![0]), (0, vec![1])]).unwrap();
        assert!(DiagMorphism::new(p.clone(), p.clone(), vec![1, 0], vec![vec![1], vec![0]]).is_err());
        assert!(DiagMorphism::new(p.clone(), p, vec![0, 1], vec![vec![0], vec![0]]).is_err());
    }
}
