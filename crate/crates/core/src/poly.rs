//! Polynomial diagrams `I ←n− D −d→ A −a→ J` and the constructions on them.
//!
//! `A` indexes shapes (monomials), `D` directions (variable occurrences), `n`
//! says which input sort each direction reads and `a` which output sort each
//! shape lands in. The extension sends a family `x` over `I` to the family over
//! `J` whose fiber over `j` is `Σ_{v ∈ a⁻¹(j)} Π_{u ∈ d⁻¹(v)} X_{n(u)}`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure_eq, Error, Result};
use crate::fam::{self, Dependent, DistributivitySquare, FamMorphism, Family};
use crate::finset::{self, compose, enumerate_maps, Choices, FinMap, FinSet};
use crate::guard;
use crate::sim::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiagram {
    input_of: FinMap,
    shape_of: FinMap,
    output_of: FinMap,
    dir_fibers: Vec<Vec<usize>>,
    dir_position: Vec<usize>,
}

impl PolyDiagram {
    /// Builds `I ←input_of− D −shape_of→ A −output_of→ J`.
    pub fn new(input_of: FinMap, shape_of: FinMap, output_of: FinMap) -> Result<Self> {
        ensure_eq("diagram directions", input_of.dom().size(), shape_of.dom().size())?;
        ensure_eq("diagram shapes", shape_of.cod().size(), output_of.dom().size())?;
        let dir_fibers = shape_of.fibers();
        let mut dir_position = vec![0; shape_of.dom().size()];
        for fiber in &dir_fibers {
            for (k, &u) in fiber.iter().enumerate() {
                dir_position[u] = k;
            }
        }
        Ok(PolyDiagram { input_of, shape_of, output_of, dir_fibers, dir_position })
    }

    /// Diagram from a list of shapes, each given as `(output sort, input sort of
    /// each direction)`. Directions are numbered shape by shape.
    pub fn from_shapes(inputs: usize, outputs: usize, shapes: &[(usize, Vec<usize>)]) -> Result<Self> {
        let mut n = Vec::new();
        let mut d = Vec::new();
        for (v, (_, dirs)) in shapes.iter().enumerate() {
            n.extend_from_slice(dirs);
            d.extend(core::iter::repeat_n(v, dirs.len()));
        }
        let a: Vec<usize> = shapes.iter().map(|(j, _)| *j).collect();
        PolyDiagram::new(
            FinMap::from_table(inputs, n)?,
            FinMap::from_table(shapes.len(), d)?,
            FinMap::from_table(outputs, a)?,
        )
    }

    /// Single-sorted `Σ coef·X^exp`, shapes listed term by term.
    pub fn monomials(terms: &[(usize, usize)]) -> Self {
        let shapes: Vec<(usize, Vec<usize>)> = terms
            .iter()
            .flat_map(|&(coef, exp)| core::iter::repeat_n((0, vec![0; exp]), coef))
            .collect();
        PolyDiagram::from_shapes(1, 1, &shapes).expect("single-sorted indices")
    }

    /// `I ← I → I → I` with identities.
    pub fn identity(i: &FinSet) -> Self {
        let id = FinMap::identity(i);
        PolyDiagram::new(id.clone(), id.clone(), id).expect("identities line up")
    }

    /// All four carriers empty: the zero object.
    pub fn zero() -> Self {
        PolyDiagram::identity(&FinSet::new(0))
    }

    /// `1 ← 1 → 1 → 1`, the dualizing object (and the tensor unit).
    pub fn bottom() -> Self {
        PolyDiagram::identity(&FinSet::new(1))
    }

    pub fn inputs(&self) -> &FinSet {
        self.input_of.cod()
    }

    pub fn directions(&self) -> &FinSet {
        self.input_of.dom()
    }

    pub fn shapes(&self) -> &FinSet {
        self.output_of.dom()
    }

    pub fn outputs(&self) -> &FinSet {
        self.output_of.cod()
    }

    /// `n : D → I`.
    pub fn input_of(&self) -> &FinMap {
        &self.input_of
    }

    /// `d : D → A`.
    pub fn shape_of(&self) -> &FinMap {
        &self.shape_of
    }

    /// `a : A → J`.
    pub fn output_of(&self) -> &FinMap {
        &self.output_of
    }

    /// `d⁻¹(v)`, ascending.
    pub fn directions_of(&self, v: usize) -> &[usize] {
        &self.dir_fibers[v]
    }

    /// Position of direction `u` inside `d⁻¹(d(u))`.
    pub fn dir_position(&self, u: usize) -> usize {
        self.dir_position[u]
    }

    pub fn is_endo(&self) -> bool {
        self.inputs().size() == self.outputs().size()
    }

    pub fn is_single_sorted(&self) -> bool {
        self.inputs().size() == 1 && self.outputs().size() == 1
    }

    /// `(output, sorted inputs of the directions)`; two shapes related by a
    /// fiberwise bijection have equal signatures.
    pub fn signature(&self, v: usize) -> (usize, Vec<usize>) {
        let mut ins: Vec<usize> = self.directions_of(v).iter().map(|&u| self.input_of.apply(u)).collect();
        ins.sort_unstable();
        (self.output_of.apply(v), ins)
    }

    /// Shape counts per exponent for single-sorted diagrams: `terms[k]` is the
    /// number of shapes with `k` directions.
    pub fn coefficients(&self) -> Vec<usize> {
        let mut terms = Vec::new();
        for v in self.shapes().elements() {
            let k = self.directions_of(v).len();
            if terms.len() <= k {
                terms.resize(k + 1, 0);
            }
            terms[k] += 1;
        }
        terms
    }

    /// Writes the diagram as `I ← D → A → J` tables.
    pub fn describe(&self) -> String {
        alloc::format!(
            "I={} D={} A={} J={} n={:?} d={:?} a={:?}",
            self.inputs().size(),
            self.directions().size(),
            self.shapes().size(),
            self.outputs().size(),
            self.input_of.table(),
            self.shape_of.table(),
            self.output_of.table()
        )
    }
}

/// Single-sorted diagrams print as polynomials (`16X^4`, `2X^2 + X`); others
/// as their tables.
impl fmt::Display for PolyDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_single_sorted() {
            return f.write_str(&self.describe());
        }
        let coefs = self.coefficients();
        let mut first = true;
        for (k, &c) in coefs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (c, k) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => f.write_str("X")?,
                (c, 1) => write!(f, "{c}X")?,
                (1, k) => write!(f, "X^{k}")?,
                (c, k) => write!(f, "{c}X^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// An element of an extension: a shape and, for each of its directions in
/// order, an element of the input family over that direction's sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyElement {
    pub shape: usize,
    pub payload: Vec<usize>,
}

/// `⟦p⟧(x)` with its elements decoded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    elements: Dependent,
    family: Family,
}

impl Extension {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn element(&self, e: usize) -> PolyElement {
        let (shape, payload) = self.elements.decode(e);
        PolyElement { shape, payload }
    }

    pub fn index_of(&self, el: &PolyElement) -> Option<usize> {
        self.elements.encode(el.shape, &el.payload)
    }

    /// Elements grouped by shape: `shape_range(v)` is the block of shape `v`.
    pub fn shape_of(&self, e: usize) -> usize {
        self.elements.family().index(e)
    }
}

pub fn eval_extension(p: &PolyDiagram, x: &Family) -> Result<Extension> {
    ensure_eq("extension input", x.base().size(), p.inputs().size())?;
    let choices = p
        .shapes()
        .elements()
        .map(|v| {
            Choices::new(
                p.directions_of(v).iter().map(|&u| x.fiber(p.input_of.apply(u)).to_vec()).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let elements = Dependent::new(p.shapes(), choices)?;
    let family = fam::sigma(&p.output_of, elements.family())?;
    Ok(Extension { elements, family })
}

/// The action of `⟦p⟧` on a morphism of families: `(v, h) ↦ (v, m ∘ h)`.
pub fn eval_map(p: &PolyDiagram, m: &FamMorphism) -> Result<FamMorphism> {
    let src = eval_extension(p, m.src())?;
    let dst = eval_extension(p, m.dst())?;
    let table = (0..src.len())
        .map(|e| {
            let mut el = src.element(e);
            for t in el.payload.iter_mut() {
                *t = m.apply(*t);
            }
            dst.index_of(&el).expect("morphism preserves fibers")
        })
        .collect();
    FamMorphism::from_table(src.family(), dst.family(), table)
}

/// Compares [`eval_extension`] with `Σ_a Π_d Δ_n x` computed in [`fam`]; the
/// result is the verified iso from the former to the latter.
pub fn extension_comparison(p: &PolyDiagram, x: &Family) -> Result<FamMorphism> {
    let ext = eval_extension(p, x)?;
    let dx = fam::delta(&p.input_of, x)?;
    let px = fam::pi(&p.shape_of, dx.family())?;
    let sx = fam::sigma(&p.output_of, px.family())?;
    let table = (0..ext.len())
        .map(|e| {
            let el = ext.element(e);
            let values: Vec<usize> = p
                .directions_of(el.shape)
                .iter()
                .zip(&el.payload)
                .map(|(&u, &t)| dx.index_of(u, t).expect("t over n(u)"))
                .collect();
            px.index_of(el.shape, &values).expect("section over d⁻¹(v)")
        })
        .collect();
    FamMorphism::from_table(ext.family(), &sx, table)?.expect_iso("extension comparison")
}

/// `q ∘ p` by the container formula, with the decoding of its shapes and directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composite {
    pub diagram: PolyDiagram,
    /// For each composite shape: the outer shape `w` and the inner shape chosen
    /// for each direction of `w`, in order.
    pub shape_parts: Vec<(usize, Vec<usize>)>,
    /// For each composite direction: the outer direction `e` and the inner direction `u`.
    pub dir_parts: Vec<(usize, usize)>,
}

impl Composite {
    /// The natural iso `⟦q∘p⟧(x) → ⟦q⟧(⟦p⟧(x))`.
    pub fn comparison(&self, q: &PolyDiagram, p: &PolyDiagram, x: &Family) -> Result<FamMorphism> {
        let lhs = eval_extension(&self.diagram, x)?;
        let inner = eval_extension(p, x)?;
        let rhs = eval_extension(q, inner.family())?;
        let table = (0..lhs.len())
            .map(|e| {
                let el = lhs.element(e);
                let (w, ref sigma) = self.shape_parts[el.shape];
                let dirs = self.diagram.directions_of(el.shape);
                let mut cursor = 0;
                let payload = sigma
                    .iter()
                    .map(|&v| {
                        let k = p.directions_of(v).len();
                        let chunk = el.payload[cursor..cursor + k].to_vec();
                        debug_assert!(dirs[cursor..cursor + k]
                            .iter()
                            .all(|&c| p.shape_of.apply(self.dir_parts[c].1) == v));
                        cursor += k;
                        inner.index_of(&PolyElement { shape: v, payload: chunk }).expect("inner element")
                    })
                    .collect();
                rhs.index_of(&PolyElement { shape: w, payload }).expect("outer element")
            })
            .collect();
        FamMorphism::from_table(lhs.family(), rhs.family(), table)?.expect_iso("composition comparison")
    }
}

/// Shapes are pairs `(w, σ)` of an outer shape and a choice of inner shape
/// `σ(e)` over `n_q(e)` for each direction `e` of `w`; directions are pairs
/// `(e, u)` with `u` a direction of `σ(e)`.
pub fn compose_direct(q: &PolyDiagram, p: &PolyDiagram) -> Result<Composite> {
    ensure_eq("composition interface", p.outputs().size(), q.inputs().size())?;
    let p_shapes_over = p.output_of.fibers();
    let mut shape_parts = Vec::new();
    let mut shapes = Vec::new();
    let mut dir_parts = Vec::new();
    for w in q.shapes().elements() {
        let choices = Choices::new(
            q.directions_of(w).iter().map(|&e| p_shapes_over[q.input_of.apply(e)].clone()).collect(),
        )?;
        guard::check((shape_parts.len() + choices.len()) as u128)?;
        for sigma in choices.iter() {
            let mut inputs = Vec::new();
            for (&e, &v) in q.directions_of(w).iter().zip(&sigma) {
                for &u in p.directions_of(v) {
                    inputs.push(p.input_of.apply(u));
                    dir_parts.push((e, u));
                }
            }
            guard::check(dir_parts.len() as u128)?;
            shapes.push((q.output_of.apply(w), inputs));
            shape_parts.push((w, sigma));
        }
    }
    let diagram = PolyDiagram::from_shapes(p.inputs().size(), q.outputs().size(), &shapes)?;
    Ok(Composite { diagram, shape_parts, dir_parts })
}

/// `q ∘ p` assembled from four pullbacks, one of them inside a distributivity
/// square:
///
/// ```text
///           T ---------> W ------> U
///          /            ε|         |
///        D' ------> C <--+         |
///       /  \       / \   |         |
///      D    \     A    E -d_q----> B
///     /      \   /  \ /             \
///    I        \ /    J               K
/// ```
///
/// `C = A ×_J E`, `D' = D ×_A C`, `U = Π_{d_q}(C → E)` with `W` and `ε` from
/// [`DistributivitySquare`], and `T = D' ×_C W`.
pub fn compose_structural(q: &PolyDiagram, p: &PolyDiagram) -> Result<PolyDiagram> {
    ensure_eq("composition interface", p.outputs().size(), q.inputs().size())?;
    let c = finset::pullback(&p.output_of, &q.input_of)?;
    let dprime = finset::pullback(&p.shape_of, &c.left)?;
    let sq = DistributivitySquare::new(&q.shape_of, &c.right)?;
    let top = finset::pullback(&dprime.right, &sq.epsilon)?;

    let n = compose(&p.input_of, &compose(&dprime.left, &top.left)?)?;
    let d = compose(sq.a_prime(), &top.right)?;
    let a = compose(&q.output_of, sq.u.family().proj())?;
    PolyDiagram::new(n, d, a)
}

/// Pointwise product `I1×I2 ← D1×D2 → A1×A2 → J1×J2`.
pub fn tensor(p1: &PolyDiagram, p2: &PolyDiagram) -> PolyDiagram {
    PolyDiagram::new(
        FinMap::product(&p1.input_of, &p2.input_of),
        FinMap::product(&p1.shape_of, &p2.shape_of),
        FinMap::product(&p1.output_of, &p2.output_of),
    )
    .expect("products of composable maps")
}

/// Componentwise coproduct `I1+I2 ← D1+D2 → A1+A2 → J1+J2`.
pub fn plus(p1: &PolyDiagram, p2: &PolyDiagram) -> PolyDiagram {
    PolyDiagram::new(
        FinMap::sum(&p1.input_of, &p2.input_of),
        FinMap::sum(&p1.shape_of, &p2.shape_of),
        FinMap::sum(&p1.output_of, &p2.output_of),
    )
    .expect("sums of composable maps")
}

/// A shape of `p2 ⊸ p3`: a map `f` on shapes and, for each shape `a` of `p2`
/// and each direction of `f(a)`, a direction of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomShape {
    pub f: Vec<usize>,
    /// `(a, e)` for every shape `a` of `p2` and direction `e` of `f(a)`; these
    /// are also the directions of this shape, in order.
    pub positions: Vec<(usize, usize)>,
    /// `phi[k]` is the direction of `positions[k].0` picked for `positions[k].1`.
    pub phi: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hom {
    pub diagram: PolyDiagram,
    pub shapes: Vec<HomShape>,
    index: BTreeMap<(Vec<usize>, Vec<usize>), usize>,
}

impl Hom {
    pub fn shape_index(&self, f: &[usize], phi: &[usize]) -> Option<usize> {
        self.index.get(&(f.to_vec(), phi.to_vec())).copied()
    }
}

/// `p2 ⊸ p3 = Σ_{c ∈ C} X^{E(c)}` with
/// `C = Σ_{f: A2→A3} Π_{a} D2(a)^{D3(f(a))}` and `E(f, φ) = Σ_a D3(f(a))`.
pub fn hom_single_sorted(p2: &PolyDiagram, p3: &PolyDiagram) -> Result<Hom> {
    if !p2.is_single_sorted() || !p3.is_single_sorted() {
        return Err(Error::NotSingleSorted);
    }
    let mut shapes = Vec::new();
    for f in enumerate_maps(p2.shapes(), p3.shapes())? {
        let positions: Vec<(usize, usize)> = p2
            .shapes()
            .elements()
            .flat_map(|a| p3.directions_of(f.apply(a)).iter().map(move |&e| (a, e)))
            .collect();
        let phis = Choices::new(positions.iter().map(|&(a, _)| p2.directions_of(a).to_vec()).collect())?;
        guard::check((shapes.len() + phis.len()) as u128)?;
        for phi in phis.iter() {
            shapes.push(HomShape { f: f.table().to_vec(), positions: positions.clone(), phi });
        }
    }
    let listing: Vec<(usize, Vec<usize>)> = shapes.iter().map(|s| (0, vec![0; s.positions.len()])).collect();
    let diagram = PolyDiagram::from_shapes(1, 1, &listing)?;
    let index = shapes.iter().enumerate().map(|(k, s)| ((s.f.clone(), s.phi.clone()), k)).collect();
    Ok(Hom { diagram, shapes, index })
}

/// `p ⊸ ⊥` with `⊥ = 1 ← 1 → 1 → 1`.
pub fn dualize(p: &PolyDiagram) -> Result<PolyDiagram> {
    Ok(hom_single_sorted(p, &PolyDiagram::bottom())?.diagram)
}

/// Finite multisets of `0..n` of size at most `k`, as sorted sequences ordered
/// by size and then lexicographically.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for i in start..n {
                let mut m2 = m.clone();
                m2.push(i);
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Lists over `0..n` of length at most `k`, ordered by length then lexicographically.
fn lists(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    let count: u128 = (0..=k).map(|len| guard::pow(n, len)).fold(0u128, |a, b| a.saturating_add(b));
    guard::check(count)?;
    let mut out = Vec::with_capacity(count as usize);
    for len in 0..=k {
        let choices = Choices::new(vec![(0..n).collect(); len])?;
        out.extend(choices.iter());
    }
    Ok(out)
}

/// `!p` truncated to lists of length `≤ depth`: `Mf(I) ← D* → A* → Mf(I)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bang {
    pub diagram: PolyDiagram,
    pub multisets: Vec<Vec<usize>>,
    pub shape_lists: Vec<Vec<usize>>,
    pub dir_lists: Vec<Vec<usize>>,
}

impl Bang {
    pub fn multiset_index(&self, m: &[usize]) -> Option<usize> {
        self.multisets.iter().position(|x| x == m)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn bang_truncated(p: &PolyDiagram, depth: usize) -> Result<Bang> {
    if !p.is_endo() {
        return Err(Error::NotEndo);
    }
    let multisets = multisets(p.inputs().size(), depth);
    let index: BTreeMap<Vec<usize>, usize> =
        multisets.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let shape_lists = lists(p.shapes().size(), depth)?;
    let dir_lists = lists(p.directions().size(), depth)?;
    let shape_index: BTreeMap<&[usize], usize> =
        shape_lists.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();

    let classify = |m: &FinMap, list: &[usize]| index[&sorted(list.iter().map(|&x| m.apply(x)).collect())];
    let n = dir_lists.iter().map(|l| classify(&p.input_of, l)).collect();
    let d = dir_lists
        .iter()
        .map(|l| {
            let shapes: Vec<usize> = l.iter().map(|&u| p.shape_of.apply(u)).collect();
            shape_index[shapes.as_slice()]
        })
        .collect();
    let a = shape_lists.iter().map(|l| classify(&p.output_of, l)).collect();
    let diagram = PolyDiagram::new(
        FinMap::from_table(multisets.len(), n)?,
        FinMap::from_table(shape_lists.len(), d)?,
        FinMap::from_table(multisets.len(), a)?,
    )?;
    Ok(Bang { diagram, multisets, shape_lists, dir_lists })
}

/// `AU(R) = I ←r1− R −1→ R −r2→ J`.
pub fn au_lift(r: &Span) -> PolyDiagram {
    PolyDiagram::new(r.left.clone(), FinMap::identity(&r.apex), r.right.clone())
        .expect("span legs share the apex")
}

/// `DU(R) = I ←r1− R −r2→ J −1→ J`.
pub fn du_lift(r: &Span) -> PolyDiagram {
    PolyDiagram::new(r.left.clone(), r.right.clone(), FinMap::identity(r.right.cod()))
        .expect("span legs share the apex")
}

/// An isomorphism of diagrams with the same `I` and `J`: `θ : A1 → A2` over `J`
/// and, for each shape `v` of the first diagram, `ψ_v : d2⁻¹(θ v) → d1⁻¹(v)`
/// over `I`, given as the table of first-diagram directions along `d2⁻¹(θ v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramIso {
    pub shapes: FinMap,
    pub directions: Vec<Vec<usize>>,
}

impl DiagramIso {
    /// Checks every condition of the witness against the two diagrams.
    pub fn verify(&self, p1: &PolyDiagram, p2: &PolyDiagram) -> bool {
        if !self.shapes.is_bijective()
            || self.shapes.dom().size() != p1.shapes().size()
            || self.shapes.cod().size() != p2.shapes().size()
            || self.directions.len() != p1.shapes().size()
        {
            return false;
        }
        p1.shapes().elements().all(|v| {
            let w = self.shapes.apply(v);
            let psi = &self.directions[v];
            let d2 = p2.directions_of(w);
            let mut used = vec![false; p1.directions().size()];
            p2.output_of.apply(w) == p1.output_of.apply(v)
                && psi.len() == d2.len()
                && d2.len() == p1.directions_of(v).len()
                && d2.iter().zip(psi).all(|(&u2, &u1)| {
                    u1 < used.len()
                        && p1.shape_of.apply(u1) == v
                        && p1.input_of.apply(u1) == p2.input_of.apply(u2)
                        && !core::mem::replace(&mut used[u1], true)
                })
        })
    }
}

fn labels_match(a: &FinSet, x: usize, b: &FinSet, y: usize) -> bool {
    matches!((a.label(x), b.label(y)), (Some(l), Some(m)) if l == m)
}

/// Looks for a [`DiagramIso`]. Shapes are matched within classes of equal
/// [`PolyDiagram::signature`]; equal labels are preferred when both sides
/// carry them.
pub fn iso_check(p1: &PolyDiagram, p2: &PolyDiagram) -> Result<Option<DiagramIso>> {
    ensure_eq("iso inputs", p1.inputs().size(), p2.inputs().size())?;
    ensure_eq("iso outputs", p1.outputs().size(), p2.outputs().size())?;
    if p1.shapes().size() != p2.shapes().size() || p1.directions().size() != p2.directions().size() {
        return Ok(None);
    }
    let mut classes: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for w in p2.shapes().elements() {
        classes.entry(p2.signature(w)).or_default().push(w);
    }
    let mut theta = Vec::with_capacity(p1.shapes().size());
    for v in p1.shapes().elements() {
        let Some(pool) = classes.get_mut(&p1.signature(v)) else {
            return Ok(None);
        };
        if pool.is_empty() {
            return Ok(None);
        }
        let k = pool.iter().position(|&w| labels_match(p1.shapes(), v, p2.shapes(), w)).unwrap_or(0);
        theta.push(pool.remove(k));
    }
    let directions = p1
        .shapes()
        .elements()
        .map(|v| {
            let mut pool: Vec<usize> = p1.directions_of(v).to_vec();
            p2.directions_of(theta[v])
                .iter()
                .map(|&u2| {
                    let want = p2.input_of.apply(u2);
                    let same_input = |u1: &usize| p1.input_of.apply(*u1) == want;
                    let k = pool
                        .iter()
                        .position(|u1| same_input(u1) && labels_match(p1.directions(), *u1, p2.directions(), u2))
                        .or_else(|| pool.iter().position(same_input))
                        .expect("signatures agree");
                    pool.remove(k)
                })
                .collect()
        })
        .collect();
    let shapes = FinMap::new(p1.shapes().clone(), p2.shapes().clone(), theta)?;
    Ok(Some(DiagramIso { shapes, directions }))
}
