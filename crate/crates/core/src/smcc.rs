//! The monoidal closed, exponential and duality structure, checked by
//! computation: the tensor as a Kan extension (`ε` and `Θ`), currying for
//! `⊗ ⊣ ⊸`, a coend oracle for Day convolution, the extension of `!P`, and the
//! double-dual comparison.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure_eq, Error, Result};
use crate::fam::{self, BoxProduct, FamMorphism, Family};
use crate::finset::FinMap;
use crate::guard;
use crate::nat::{count_nat, enumerate_nat, eval_dm, generic_element, generic_family, DiagMorphism};
use crate::poly::{
    bang_truncated, dualize, eval_extension, eval_map, hom_single_sorted, iso_check, multisets, tensor, Hom,
    PolyDiagram, PolyElement,
};

/// `ε_{x,y} : ⟦p1⟧x □ ⟦p2⟧y → ⟦p1⊗p2⟧(x □ y)`,
/// `((v1, h1), (v2, h2)) ↦ ((v1, v2), (d1, d2) ↦ (h1 d1, h2 d2))`.
pub fn epsilon(p1: &PolyDiagram, p2: &PolyDiagram, x: &Family, y: &Family) -> Result<FamMorphism> {
    let e1 = eval_extension(p1, x)?;
    let e2 = eval_extension(p2, y)?;
    let src = BoxProduct::new(e1.family(), e2.family());
    let xy = BoxProduct::new(x, y);
    let totals = &xy.totals;
    let t = tensor(p1, p2);
    let dst = eval_extension(&t, &xy.family)?;
    let table = src
        .family
        .total()
        .elements()
        .map(|e| {
            let (a, b) = src.totals.unpair(e);
            let (el1, el2) = (e1.element(a), e2.element(b));
            let payload = el1
                .payload
                .iter()
                .flat_map(|&t1| el2.payload.iter().map(move |&t2| totals.pair(t1, t2)))
                .collect();
            let shape = el1.shape * p2.shapes().size() + el2.shape;
            dst.index_of(&PolyElement { shape, payload }).expect("tensor element")
        })
        .collect();
    FamMorphism::new(src.family, dst.family().clone(), FinMap::from_table(dst.len(), table)?)
}

/// `Θ_r : ⟦p1⊗p2⟧r → ⟦f⟧r` built from a transformation
/// `ρ_{x,y} : ⟦p1⟧x □ ⟦p2⟧y → ⟦f⟧(x □ y)`: for a shape `(v1, v2)` and
/// `h : D1(v1) × D2(v2) → r`, apply `ρ` to the generic elements at the generic
/// families `E1`, `E2`, then push the result along `h̄ : E1 □ E2 → r`.
pub fn theta<R>(rho: R, p1: &PolyDiagram, p2: &PolyDiagram, f: &PolyDiagram, r: &Family) -> Result<FamMorphism>
where
    R: Fn(&Family, &Family) -> Result<FamMorphism>,
{
    let t = tensor(p1, p2);
    ensure_eq("Θ input", r.base().size(), t.inputs().size())?;
    ensure_eq("Θ target inputs", f.inputs().size(), t.inputs().size())?;
    let src = eval_extension(&t, r)?;
    let dst = eval_extension(f, r)?;
    // For each shape pair: ρ at the generic element, as an element of ⟦f⟧(E1 □ E2).
    let mut generic: BTreeMap<usize, PolyElement> = BTreeMap::new();
    let mut table = Vec::with_capacity(src.len());
    for e in 0..src.len() {
        let el = src.element(e);
        if let Entry::Vacant(slot) = generic.entry(el.shape) {
            let (v1, v2) = (el.shape / p2.shapes().size(), el.shape % p2.shapes().size());
            let (g1, g2) = (generic_family(p1, v1), generic_family(p2, v2));
            let (x1, x2) = (eval_extension(p1, &g1)?, eval_extension(p2, &g2)?);
            let boxed = BoxProduct::new(x1.family(), x2.family());
            let gg = BoxProduct::new(&g1, &g2);
            let target = eval_extension(f, &gg.family)?;
            let component = rho(&g1, &g2)?;
            if component.src() != &boxed.family || component.dst() != target.family() {
                return Err(Error::NotNatural(format!("ρ at the generic families of shape {}", el.shape)));
            }
            let i1 = x1.index_of(&generic_element(p1, v1)).expect("generic");
            let i2 = x2.index_of(&generic_element(p2, v2)).expect("generic");
            let image = target.element(component.apply(boxed.totals.pair(i1, i2)));
            slot.insert(image);
        }
        let image = &generic[&el.shape];
        // h̄ : E1 □ E2 → r. Both E1 □ E2 and the directions of (v1, v2) are
        // numbered lexicographically in (j1, j2), so h̄ reads h at the same index.
        let payload = image.payload.iter().map(|&p| el.payload[p]).collect();
        table.push(dst.index_of(&PolyElement { shape: image.shape, payload }).expect("pushforward along h̄"));
    }
    FamMorphism::new(src.family().clone(), dst.family().clone(), FinMap::from_table(dst.len(), table)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorReport {
    /// Pairs `(x, y)` on which `Θ ∘ ε = ρ` was checked.
    pub pairs: usize,
    /// Naturality squares of `ρ` checked.
    pub squares: usize,
    /// How many container morphisms `p1⊗p2 ⇒ f` satisfy `eval ∘ ε = ρ`, when
    /// there were few enough candidates to try them all.
    pub factorizations: Option<usize>,
}

impl fmt::Display for TensorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} pairs, {} squares", self.pairs, self.squares)?;
        match self.factorizations {
            Some(n) => write!(f, ", {n} factorizations"),
            None => f.write_str(", factorizations not enumerated"),
        }
    }
}

/// Checks `Θ ∘ ε = ρ` on all pairs of families with fibers of size at most
/// `bound`, the naturality of `ρ` on the same range, and, when
/// `count_nat(p1⊗p2, f) ≤ max_candidates`, that exactly one container
/// morphism factors `ρ` through `ε`.
pub fn tensor_universal_check<R>(
    rho: R,
    p1: &PolyDiagram,
    p2: &PolyDiagram,
    f: &PolyDiagram,
    bound: usize,
    max_candidates: u128,
) -> Result<TensorReport>
where
    R: Fn(&Family, &Family) -> Result<FamMorphism>,
{
    let xs = fam::all_families(p1.inputs().size(), bound)?;
    let ys = fam::all_families(p2.inputs().size(), bound)?;
    let mut rhos = BTreeMap::new();
    let mut eps = BTreeMap::new();
    let mut pairs = 0;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let r = rho(x, y)?;
            let e = epsilon(p1, p2, x, y)?;
            let th = theta(&rho, p1, p2, f, &BoxProduct::new(x, y).family)?;
            if e.then(&th)? != r {
                return Err(Error::NotNatural(format!(
                    "Θε ≠ ρ at x={:?} y={:?}",
                    x.fiber_sizes(),
                    y.fiber_sizes()
                )));
            }
            rhos.insert((i, j), r);
            eps.insert((i, j), e);
            pairs += 1;
        }
    }

    let mut squares = 0;
    let xmaps: Vec<(usize, usize, FamMorphism)> = hom_pairs(&xs)?;
    let ymaps: Vec<(usize, usize, FamMorphism)> = hom_pairs(&ys)?;
    for (xi, xj, g1) in &xmaps {
        let m1 = eval_map(p1, g1)?;
        for (yi, yj, g2) in &ymaps {
            let m2 = eval_map(p2, g2)?;
            let lhs = fam::box_map(&m1, &m2)?.then(&rhos[&(*xj, *yj)])?;
            let rhs = rhos[&(*xi, *yi)].then(&eval_map(f, &fam::box_map(g1, g2)?)?)?;
            if lhs != rhs {
                return Err(Error::NotNatural(format!(
                    "ρ square fails from ({:?}, {:?})",
                    xs[*xi].fiber_sizes(),
                    ys[*yi].fiber_sizes()
                )));
            }
            squares += 1;
        }
    }

    let t = tensor(p1, p2);
    let factorizations = if count_nat(&t, f)? <= max_candidates {
        let mut hits = 0;
        for m in enumerate_nat(&t, f)? {
            let mut all = true;
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    let via = eps[&(i, j)].then(&eval_dm(&m, &BoxProduct::new(x, y).family)?)?;
                    if via != rhos[&(i, j)] {
                        all = false;
                    }
                }
            }
            hits += all as usize;
        }
        Some(hits)
    } else {
        None
    };
    Ok(TensorReport { pairs, squares, factorizations })
}

fn hom_pairs(families: &[Family]) -> Result<Vec<(usize, usize, FamMorphism)>> {
    let mut out = Vec::new();
    for (i, x) in families.iter().enumerate() {
        for (j, y) in families.iter().enumerate() {
            out.extend(fam::hom_enumerate(x, y)?.into_iter().map(|m| (i, j, m)));
        }
    }
    Ok(out)
}

/// Transpose of `m : p1⊗p2 ⇒ p3` to `p1 ⇒ (p2 ⊸ p3)`.
pub fn curry(m: &DiagMorphism, p1: &PolyDiagram, p2: &PolyDiagram, hom: &Hom) -> Result<DiagMorphism> {
    let (n2, dirs2) = (p2.shapes().size(), p2.directions().size());
    let p3 = m.dst();
    let mut alpha = Vec::with_capacity(p1.shapes().size());
    let mut beta = Vec::with_capacity(p1.shapes().size());
    for a1 in p1.shapes().elements() {
        let f: Vec<usize> = (0..n2).map(|a2| m.alpha().apply(a1 * n2 + a2)).collect();
        let mut phi = Vec::new();
        let mut back = Vec::new();
        for a2 in 0..n2 {
            let b = m.beta(a1 * n2 + a2);
            for (k, _) in p3.directions_of(f[a2]).iter().enumerate() {
                phi.push(b[k] % dirs2);
                back.push(b[k] / dirs2);
            }
        }
        let s = hom.shape_index(&f, &phi).ok_or_else(|| Error::Invalid(format!("no hom shape for {f:?}")))?;
        alpha.push(s);
        beta.push(back);
    }
    DiagMorphism::new(p1.clone(), hom.diagram.clone(), alpha, beta)
}

/// Inverse of [`curry`].
pub fn uncurry(m: &DiagMorphism, p2: &PolyDiagram, p3: &PolyDiagram, hom: &Hom) -> Result<DiagMorphism> {
    let p1 = m.src();
    let (n2, dirs2) = (p2.shapes().size(), p2.directions().size());
    let t = tensor(p1, p2);
    let mut alpha = Vec::with_capacity(t.shapes().size());
    let mut beta = Vec::with_capacity(t.shapes().size());
    for a1 in p1.shapes().elements() {
        let shape = &hom.shapes[m.alpha().apply(a1)];
        let back = m.beta(a1);
        for a2 in 0..n2 {
            alpha.push(shape.f[a2]);
            let row = shape
                .positions
                .iter()
                .enumerate()
                .filter(|(_, &(b, _))| b == a2)
                .map(|(k, _)| back[k] * dirs2 + shape.phi[k])
                .collect();
            beta.push(row);
        }
    }
    DiagMorphism::new(t, p3.clone(), alpha, beta)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    /// `|Nat(p1⊗p2, p3)|`.
    pub tensor_side: u128,
    /// `|Nat(p1, p2⊸p3)|`.
    pub hom_side: u128,
    /// Morphisms on each side taken through curry and back, when both sides were
    /// small enough to enumerate.
    pub round_trips: Option<usize>,
}

impl fmt::Display for AdjunctionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nat(p1⊗p2, p3) = {}, Nat(p1, p2⊸p3) = {}", self.tensor_side, self.hom_side)?;
        if let Some(n) = self.round_trips {
            write!(f, ", {n} round trips")?;
        }
        f.write_str(if self.agrees() { " : AGREE" } else { " : DIFFER" })
    }
}

impl AdjunctionReport {
    pub fn agrees(&self) -> bool {
        self.tensor_side == self.hom_side
    }
}

/// Counts both sides of `Nat(p1⊗p2, p3) ≅ Nat(p1, p2⊸p3)` and, when each side
/// has at most `max_enumerate` elements, checks currying in both directions.
pub fn adjunction_count_check(
    p1: &PolyDiagram,
    p2: &PolyDiagram,
    p3: &PolyDiagram,
    max_enumerate: u128,
) -> Result<AdjunctionReport> {
    if !p1.is_single_sorted() {
        return Err(Error::NotSingleSorted);
    }
    let hom = hom_single_sorted(p2, p3)?;
    let t = tensor(p1, p2);
    let tensor_side = count_nat(&t, p3)?;
    let hom_side = count_nat(p1, &hom.diagram)?;
    let round_trips = if tensor_side.max(hom_side) <= max_enumerate {
        let mut n = 0;
        for m in enumerate_nat(&t, p3)? {
            if uncurry(&curry(&m, p1, p2, &hom)?, p2, p3, &hom)? != m {
                return Err(Error::NotIso("uncurry ∘ curry"));
            }
            n += 1;
        }
        for m in enumerate_nat(p1, &hom.diagram)? {
            if curry(&uncurry(&m, p2, p3, &hom)?, p1, p2, &hom)? != m {
                return Err(Error::NotIso("curry ∘ uncurry"));
            }
            n += 1;
        }
        Some(n)
    } else {
        None
    };
    Ok(AdjunctionReport { tensor_side, hom_side, round_trips })
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// The elements `(a, b, g : a×b → x, h1 : k1 → a, h2 : k2 → b)` of one shape
/// block of the coend, for `a, b ≤ skeleton`.
struct Block {
    m: usize,
    k1: usize,
    k2: usize,
    skeleton: usize,
    offset: Vec<Vec<usize>>,
    len: usize,
}

fn upow(base: usize, exp: usize) -> usize {
    guard::pow(base, exp) as usize
}

/// Base-`base` digits of `n`, most significant first. Tables `a × b → m`
/// put `(i, j)` at position `i*b + j`.
fn digits(n: usize, len: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    let mut rest = n;
    for slot in out.iter_mut().rev() {
        *slot = rest % base.max(1);
        rest /= base.max(1);
    }
    out
}

fn number(digits: impl Iterator<Item = usize>, base: usize) -> usize {
    digits.fold(0, |acc, d| acc * base + d)
}

impl Block {
    fn new(m: usize, k1: usize, k2: usize, skeleton: usize) -> Result<Self> {
        let mut offset = vec![vec![0; skeleton + 1]; skeleton + 1];
        let mut len: u128 = 0;
        for (a, row) in offset.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = len as usize;
                len = len.saturating_add(
                    guard::pow(m, a * b).saturating_mul(guard::pow(a, k1)).saturating_mul(guard::pow(b, k2)),
                );
                guard::check(len)?;
            }
        }
        Ok(Block { m, k1, k2, skeleton, offset, len: len as usize })
    }

    fn index(&self, a: usize, b: usize, g: usize, h1: usize, h2: usize) -> u32 {
        let (n1, n2) = (upow(a, self.k1), upow(b, self.k2));
        (self.offset[a][b] + (g * n1 + h1) * n2 + h2) as u32
    }

    /// Generating maps of the skeleton: insertions `n → n+1`, merges
    /// `n+1 → n`, and the swap and cycle on each `n ≥ 2`.
    fn generators(&self) -> Vec<(usize, Vec<usize>)> {
        let s = self.skeleton;
        let mut out = Vec::new();
        for n in 0..s {
            out.push((n + 1, (0..n).collect()));
        }
        for n in 1..s {
            out.push((n, (0..=n).map(|i| i.min(n - 1)).collect()));
        }
        for n in 2..=s {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            out.push((n, swap));
            out.push((n, (0..n).map(|i| (i + 1) % n).collect()));
        }
        out
    }

    /// Union-find over the coend relations along every generator, on both sides.
    fn quotient(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.len);
        let m = self.m;
        for (cod, f) in self.generators() {
            let dom = f.len();
            // h ↦ f ∘ h on k-tuples, as indices.
            let push = |k: usize| -> Vec<usize> {
                (0..upow(dom, k))
                    .map(|h| number(digits(h, k, dom.max(1)).into_iter().map(|d| f[d]), cod))
                    .collect()
            };
            let (push1, push2) = (push(self.k1), push(self.k2));
            for other in 0..=self.skeleton {
                // a-side: f : dom → cod, b = other.
                let (b, n1, n2) = (other, upow(dom, self.k1), upow(other, self.k2));
                for g2 in 0..upow(m, cod * b) {
                    let d = digits(g2, cod * b, m.max(1));
                    let g = number((0..dom).flat_map(|i| (0..b).map(move |j| (i, j))).map(|(i, j)| d[f[i] * b + j]), m);
                    for h1 in 0..n1 {
                        for h2 in 0..n2 {
                            uf.union(self.index(dom, b, g, h1, h2), self.index(cod, b, g2, push1[h1], h2));
                        }
                    }
                }
                // b-side: f : dom → cod, a = other.
                let (a, n1, n2) = (other, upow(other, self.k1), upow(dom, self.k2));
                for g2 in 0..upow(m, a * cod) {
                    let d = digits(g2, a * cod, m.max(1));
                    let g = number((0..a).flat_map(|i| (0..dom).map(move |j| (i, j))).map(|(i, j)| d[i * cod + f[j]]), m);
                    for h1 in 0..n1 {
                        for h2 in 0..n2 {
                            uf.union(self.index(a, dom, g, h1, h2), self.index(a, cod, g2, h1, push2[h2]));
                        }
                    }
                }
            }
        }
        uf
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayReport {
    /// Elements of the disjoint union before quotienting.
    pub elements: u128,
    /// Equivalence classes of the coend.
    pub classes: usize,
    /// `|⟦p1⊗p2⟧(x)|`.
    pub extension: usize,
    /// Each class holds exactly one representative `(D1(v1), D2(v2), g, id, id)`,
    /// and sending a class to `((v1, v2), g)` is a bijection onto the extension.
    pub agrees: bool,
}

impl fmt::Display for DayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} elements, {} classes, extension {} : {}",
            self.elements,
            self.classes,
            self.extension,
            if self.agrees { "AGREE" } else { "DIFFER" }
        )
    }
}

/// Quotient summary of one block: classes, elements, and whether every class
/// holds exactly one identity representative.
#[derive(Clone, Copy, Debug)]
struct BlockSummary {
    roots: usize,
    len: u128,
    one_each: bool,
}

/// The coend `∫^{a,b} Hom(a×b, x) × P1(a) × P2(b)` over the skeleton
/// `{0, …, skeleton}`, computed as a quotient of the disjoint union.
///
/// Blocks only depend on `(|x|, k1, k2)`, so an oracle keeps them across calls.
#[derive(Clone, Debug)]
pub struct DayOracle {
    skeleton: usize,
    cache: BTreeMap<(usize, usize, usize), BlockSummary>,
}

impl DayOracle {
    pub fn new(skeleton: usize) -> Self {
        DayOracle { skeleton, cache: BTreeMap::new() }
    }

    pub fn skeleton(&self) -> usize {
        self.skeleton
    }

    fn block(&mut self, m: usize, k1: usize, k2: usize) -> Result<BlockSummary> {
        if let Some(b) = self.cache.get(&(m, k1, k2)) {
            return Ok(*b);
        }
        let block = Block::new(m, k1, k2, self.skeleton)?;
        let mut uf = block.quotient();
        let roots = (0..block.len as u32).filter(|&e| uf.find(e) == e).count();
        let id1 = number(0..k1, k1.max(1));
        let id2 = number(0..k2, k2.max(1));
        let reps = upow(m, k1 * k2);
        let mut rep_roots: Vec<u32> = (0..reps).map(|g| block.index(k1, k2, g, id1, id2)).map(|e| uf.find(e)).collect();
        rep_roots.sort_unstable();
        rep_roots.dedup();
        let summary = BlockSummary { roots, len: block.len as u128, one_each: rep_roots.len() == reps && reps == roots };
        self.cache.insert((m, k1, k2), summary);
        Ok(summary)
    }

    /// Compares the coend with `⟦p1⊗p2⟧(x)`. Both diagrams are single-sorted.
    pub fn check(&mut self, p1: &PolyDiagram, p2: &PolyDiagram, x: &Family) -> Result<DayReport> {
        if !p1.is_single_sorted() || !p2.is_single_sorted() {
            return Err(Error::NotSingleSorted);
        }
        ensure_eq("coend input", x.base().size(), 1)?;
        let skeleton = self.skeleton;
        let widest = p1
            .shapes()
            .elements()
            .map(|v| p1.directions_of(v).len())
            .chain(p2.shapes().elements().map(|v| p2.directions_of(v).len()))
            .max()
            .unwrap_or(0);
        if widest > skeleton {
            return Err(Error::Invalid(format!("skeleton {skeleton} is smaller than a direction fiber of size {widest}")));
        }
        let m = x.len();
        let t = tensor(p1, p2);
        let ext = eval_extension(&t, x)?;

        // Classes never mix shapes, so the quotient splits into one block per shape pair.
        let mut classes = 0;
        let mut elements = 0u128;
        let mut agrees = true;
        let mut image = vec![false; ext.len()];
        for v1 in p1.shapes().elements() {
            for v2 in p2.shapes().elements() {
                let (k1, k2) = (p1.directions_of(v1).len(), p2.directions_of(v2).len());
                let b = self.block(m, k1, k2)?;
                classes += b.roots;
                elements += b.len;
                agrees &= b.one_each;
                // Representative g ↦ ((v1, v2), g) with g read lexicographically on D1(v1) × D2(v2).
                for g in 0..upow(m, k1 * k2) {
                    let payload = digits(g, k1 * k2, m);
                    let shape = v1 * p2.shapes().size() + v2;
                    match ext.index_of(&PolyElement { shape, payload }) {
                        Some(e) if !image[e] => image[e] = true,
                        _ => agrees = false,
                    }
                }
            }
        }
        agrees &= image.iter().all(|&b| b) && classes == ext.len();
        Ok(DayReport { elements, classes, extension: ext.len(), agrees })
    }
}

/// One-shot [`DayOracle::check`].
pub fn day_coend_oracle(p1: &PolyDiagram, p2: &PolyDiagram, x: &Family, skeleton: usize) -> Result<DayReport> {
    DayOracle::new(skeleton).check(p1, p2, x)
}

/// `z_m = Π_{i ∈ m} X_i` over the multisets of size at most `k`, in the order
/// of [`multisets`].
pub fn multiset_power(x: &Family, k: usize) -> Result<Family> {
    let sizes: Vec<usize> = multisets(x.base().size(), k)
        .iter()
        .map(|m| guard::product(m.iter().map(|&i| x.fiber(i).len())))
        .map(|s| guard::check(s).map(|_| s as usize))
        .collect::<Result<_>>()?;
    Ok(Family::from_fiber_sizes(&sizes))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BangReport {
    /// `|⟦!P⟧z|` over each multiset, in the order of [`multisets`].
    pub fiber_sizes: Vec<u128>,
    /// Elements on each side. Every element of `⟦!P⟧z` was sent to a distinct
    /// element of the same fiber on the right, and every right element was hit.
    pub elements: u128,
}

impl fmt::Display for BangReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fibers {:?}, {} elements : BIJECTIVE", self.fiber_sizes, self.elements)
    }
}

/// Where the elements of one shape of `!P` go on the right.
struct BangBlock {
    output: usize,
    /// Left digit ranges, one per direction of the shape in ascending order.
    radices: Vec<usize>,
    /// Per direction: the right digit for each left digit.
    digit_maps: Vec<Vec<usize>>,
    /// Per direction: the weight of its right digit.
    weights: Vec<u128>,
    right_offset: u128,
}

/// Both sides of the comparison, described shape by shape. The right side is
/// laid out from the tensor powers alone; the left side is then matched into it.
fn bang_plan(p: &PolyDiagram, z: &Family, k: usize) -> Result<(Vec<BangBlock>, u128, usize)> {
    let bang = bang_truncated(p, k)?;
    ensure_eq("bang input", z.base().size(), bang.multisets.len())?;
    let (ni, na, nd) = (p.inputs().size(), p.shapes().size(), p.directions().size());

    struct Power {
        diagram: PolyDiagram,
        dz: fam::Delta,
        c: FinMap,
        offsets: Vec<u128>,
    }
    let mut powers: Vec<Power> = Vec::with_capacity(k + 1);
    let mut right_len: u128 = 0;
    let mut diagram = PolyDiagram::identity(&crate::finset::FinSet::new(1));
    for n in 0..=k {
        if n > 0 {
            diagram = tensor(&diagram, p);
        }
        let lists = crate::finset::Choices::new(vec![(0..ni).collect(); n])?;
        let c = lists
            .iter()
            .map(|mut l| {
                l.sort_unstable();
                bang.multiset_index(&l).expect("multiset of size ≤ k")
            })
            .collect();
        let c = FinMap::from_table(bang.multisets.len(), c)?;
        let dz = fam::delta(&c, z)?;
        let mut offsets = Vec::with_capacity(diagram.shapes().size());
        for s in diagram.shapes().elements() {
            offsets.push(right_len);
            let size = guard::product(
                diagram.directions_of(s).iter().map(|&u| dz.family().fiber(diagram.input_of().apply(u)).len()),
            );
            right_len = right_len.saturating_add(size);
        }
        guard::check(right_len)?;
        powers.push(Power { diagram, dz, c, offsets });
        diagram = powers[n].diagram.clone();
    }

    let mut blocks = Vec::with_capacity(bang.shape_lists.len());
    for s in bang.diagram.shapes().elements() {
        let shapes = &bang.shape_lists[s];
        let n = shapes.len();
        let power = &powers[n];
        let t = shapes.iter().fold(0, |acc, &v| acc * na + v);
        let output = bang.diagram.output_of().apply(s);
        if power.c.apply(power.diagram.output_of().apply(t)) != output {
            return Err(Error::NotIso("bang extension comparison"));
        }
        let right_dirs = power.diagram.directions_of(t);
        let right_radices: Vec<usize> =
            right_dirs.iter().map(|&u| power.dz.family().fiber(power.diagram.input_of().apply(u)).len()).collect();
        let mut right_weights = vec![1u128; right_radices.len()];
        for q in (0..right_radices.len().saturating_sub(1)).rev() {
            right_weights[q] = right_weights[q + 1] * right_radices[q + 1] as u128;
        }
        let left_dirs = bang.diagram.directions_of(s);
        if left_dirs.len() != right_dirs.len() {
            return Err(Error::NotIso("bang extension comparison"));
        }
        let mut radices = Vec::with_capacity(left_dirs.len());
        let mut digit_maps = Vec::with_capacity(left_dirs.len());
        let mut weights = Vec::with_capacity(left_dirs.len());
        for &u in left_dirs {
            let dirs = &bang.dir_lists[u];
            let list = dirs.iter().fold(0, |acc, &d| acc * ni + p.input_of().apply(d));
            let tensor_dir = dirs.iter().fold(0, |acc, &d| acc * nd + d);
            if power.diagram.shape_of().apply(tensor_dir) != t {
                return Err(Error::NotIso("bang extension comparison"));
            }
            let q = power.diagram.dir_position(tensor_dir);
            let fiber = z.fiber(bang.diagram.input_of().apply(u));
            let map = fiber
                .iter()
                .map(|&e| {
                    let i = power.dz.index_of(list, e).ok_or(Error::NotIso("bang extension comparison"))?;
                    Ok(power.dz.family().position(i))
                })
                .collect::<Result<Vec<_>>>()?;
            if map.len() != right_radices[q] {
                return Err(Error::NotIso("bang extension comparison"));
            }
            radices.push(fiber.len());
            digit_maps.push(map);
            weights.push(right_weights[q]);
        }
        blocks.push(BangBlock { output, radices, digit_maps, weights, right_offset: power.offsets[t] });
    }
    Ok((blocks, right_len, bang.multisets.len()))
}

/// Visits every element of one block in left order, passing its right index.
fn bang_walk(b: &BangBlock, mut visit: impl FnMut(u128) -> Result<()>) -> Result<()> {
    if b.radices.contains(&0) {
        return Ok(());
    }
    let m = b.radices.len();
    let mut digits = vec![0usize; m];
    let mut index = b.right_offset + (0..m).map(|j| b.digit_maps[j][0] as u128 * b.weights[j]).sum::<u128>();
    loop {
        visit(index)?;
        let mut j = m;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            let (map, w) = (&b.digit_maps[j], b.weights[j]);
            index -= map[digits[j]] as u128 * w;
            digits[j] += 1;
            if digits[j] < b.radices[j] {
                index += map[digits[j]] as u128 * w;
                break;
            }
            digits[j] = 0;
            index += map[0] as u128 * w;
        }
    }
}

/// Compares `⟦!P⟧(z)` (with `!P` truncated at `k`) with
/// `Σ_c ∘ ⟦P⟧* ∘ Δ_c (z)`, where on lists of length `n` the functor `⟦P⟧*` is
/// the `n`-fold tensor power of `P` and `c` sends a list to its multiset.
/// `z` lives over the multisets of size at most `k`.
///
/// Neither side is materialized: every left element is visited once and its
/// image is marked in a bitset over the right side, so the check is exact
/// while memory stays at one bit per element.
pub fn bang_extension_check(p: &PolyDiagram, z: &Family, k: usize) -> Result<BangReport> {
    let (blocks, right_len, outputs) = bang_plan(p, z, k)?;
    let mut fiber_sizes = vec![0u128; outputs];
    let mut left_len: u128 = 0;
    for b in &blocks {
        let size = guard::product(b.radices.iter().copied());
        fiber_sizes[b.output] += size;
        left_len = left_len.saturating_add(size);
    }
    guard::check(left_len)?;
    if left_len != right_len {
        return Err(Error::NotIso("bang extension comparison"));
    }
    let mut hit = vec![0u64; (right_len as usize).div_ceil(64)];
    for b in &blocks {
        bang_walk(b, |r| {
            let (word, bit) = ((r / 64) as usize, r % 64);
            if hit[word] >> bit & 1 == 1 {
                return Err(Error::NotIso("bang extension comparison"));
            }
            hit[word] |= 1 << bit;
            Ok(())
        })?;
    }
    // Injective on equal finite counts is bijective; the block outputs were
    // matched against the right-hand bases while planning.
    Ok(BangReport { fiber_sizes, elements: left_len })
}

/// The comparison `⟦!P⟧(z) → Σ_c ⟦P⟧* Δ_c (z)` as a materialized, verified iso.
/// Compares `⟦!P⟧(z)` (with `!P` truncated at `k`) with
/// `Σ_c ∘ ⟦P⟧* ∘ Δ_c (z)`, where on lists of length `n` the functor `⟦P⟧*` is
/// the `n`-fold tensor power of `P` and `c` sends a list to its multiset.
/// `z` lives over the multisets of size at most `k`.
pub fn bang_comparison(p: &PolyDiagram, z: &Family, k: usize) -> Result<FamMorphism> {
    let bang = bang_truncated(p, k)?;
    ensure_eq("bang input", z.base().size(), bang.multisets.len())?;
    let left = eval_extension(&bang.diagram, z)?;
    let ni = p.inputs().size();
    let na = p.shapes().size();

    let mut power = PolyDiagram::identity(&crate::finset::FinSet::new(1));
    let mut proj = Vec::new();
    let mut blocks = Vec::new();
    for n in 0..=k {
        if n > 0 {
            power = tensor(&power, p);
        }
        // c : I^n → multisets, lists numbered lexicographically.
        let lists = crate::finset::Choices::new(vec![(0..ni).collect(); n])?;
        let c = lists
            .iter()
            .map(|l| {
                let mut l = l;
                l.sort_unstable();
                bang.multiset_index(&l).expect("multiset of size ≤ k")
            })
            .collect();
        let c = FinMap::from_table(bang.multisets.len(), c)?;
        let dz = fam::delta(&c, z)?;
        let ext = eval_extension(&power, dz.family())?;
        let offset = proj.len();
        proj.extend((0..ext.len()).map(|e| c.apply(ext.family().index(e))));
        blocks.push((offset, dz, ext));
    }
    let right = Family::new(FinMap::from_table(bang.multisets.len(), proj)?);

    let table = (0..left.len())
        .map(|e| {
            let el = left.element(e);
            let shapes = &bang.shape_lists[el.shape];
            let n = shapes.len();
            let (offset, dz, ext) = &blocks[n];
            let shape = shapes.iter().fold(0, |acc, &v| acc * na + v);
            let payload = bang
                .diagram
                .directions_of(el.shape)
                .iter()
                .zip(&el.payload)
                .map(|(&u, &t)| {
                    let dirs = &bang.dir_lists[u];
                    let list = dirs.iter().fold(0, |acc, &d| acc * ni + p.input_of().apply(d));
                    dz.index_of(list, t).expect("t over c(n*(dirs))")
                })
                .collect();
            offset + ext.index_of(&PolyElement { shape, payload }).expect("tensor power element")
        })
        .collect();
    FamMorphism::new(left.family().clone(), right, FinMap::from_table(left.len(), table)?)?
        .expect_iso("bang extension comparison")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleDualReport {
    pub p: PolyDiagram,
    pub dual: PolyDiagram,
    pub double_dual: PolyDiagram,
    /// `iso_check(P, P⊥⊥)` found a witness.
    pub iso: bool,
    /// The map `A → A^{B^A}` sending `a` to the constant function is bijective.
    pub canonical_bijective: bool,
}

impl fmt::Display for DoubleDualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {} : {}", self.p, self.double_dual, if self.iso { "ISO" } else { "NOT ISO" })
    }
}

/// `P = A·X^B`, its dual and double dual.
pub fn double_dual_report(a: usize, b: usize) -> Result<DoubleDualReport> {
    let p = PolyDiagram::monomials(&[(a, b)]);
    let dual = dualize(&p)?;
    let double_dual = dualize(&dual)?;
    let iso = iso_check(&p, &double_dual)?.is_some();
    // a ↦ (φ ↦ a). With B^A empty the target is a point; otherwise constants
    // are distinct and the map is bijective exactly when |A| = |A|^{|B^A|}.
    let exponent = guard::pow(b, a);
    let canonical_bijective = if exponent == 0 {
        a == 1
    } else {
        let target = if exponent > 128 { u128::MAX } else { guard::pow(a, exponent as usize) };
        a as u128 == target
    };
    Ok(DoubleDualReport { p, dual, double_dual, iso, canonical_bijective })
}
