//! Families of finite sets indexed by a finite base, i.e. objects of the slice
//! over the base, and the three functors `Σ_f ⊣ Δ_f ⊣ Π_f` between slices.
//!
//! A family is a map `proj : total → base`; the fiber over `i` is `proj⁻¹(i)` in
//! ascending order. Constructions renumber their totals canonically:
//!
//! - `Σ_f x` keeps the total of `x`;
//! - `Δ_f y` is the pullback of `f` and `y.proj`, pairs `(a, t)` in lexicographic order;
//! - `Π_f x` lists, for each `b` in order, the sections of `x` over `f⁻¹(b)` as
//!   lexicographically ordered tables (see [`Dependent`]).
//!
//! Comparisons that are isomorphisms in theory are returned as explicit
//! [`FamMorphism`]s and checked to be invertible before they are handed out.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_eq, Error, Result};
use crate::finset::{self, compose, Choices, FinMap, FinSet, Product, Pullback};
use crate::guard;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    proj: FinMap,
    fibers: Vec<Vec<usize>>,
    position: Vec<usize>,
}

impl Family {
    pub fn new(proj: FinMap) -> Self {
        let fibers = proj.fibers();
        let mut position = vec![0; proj.dom().size()];
        for fiber in &fibers {
            for (k, &t) in fiber.iter().enumerate() {
                position[t] = k;
            }
        }
        Family { proj, fibers, position }
    }

    /// The family over `0..sizes.len()` whose total lists fiber 0 first, then fiber 1, ...
    pub fn from_fiber_sizes(sizes: &[usize]) -> Self {
        let table: Vec<usize> =
            sizes.iter().enumerate().flat_map(|(i, &n)| core::iter::repeat_n(i, n)).collect();
        let proj = FinMap::from_table(sizes.len(), table).expect("indices below base size");
        Family::new(proj)
    }

    pub fn empty(base: &FinSet) -> Self {
        Family::new(FinMap::empty(base))
    }

    pub fn total(&self) -> &FinSet {
        self.proj.dom()
    }

    pub fn base(&self) -> &FinSet {
        self.proj.cod()
    }

    pub fn proj(&self) -> &FinMap {
        &self.proj
    }

    #[inline]
    pub fn index(&self, t: usize) -> usize {
        self.proj.apply(t)
    }

    pub fn fiber(&self, i: usize) -> &[usize] {
        &self.fibers[i]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    /// Position of `t` inside its own fiber.
    #[inline]
    pub fn position(&self, t: usize) -> usize {
        self.position[t]
    }

    pub fn len(&self) -> usize {
        self.total().size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x □ y` over `I1 × I2`: fiber over `(i1, i2)` is `X_{i1} × Y_{i2}`.
    /// Totals are paired lexicographically.
    pub fn boxed(x: &Family, y: &Family) -> BoxProduct {
        BoxProduct::new(x, y)
    }

    /// `x + y` over `I1 + I2`.
    pub fn sum(x: &Family, y: &Family) -> Family {
        Family::new(FinMap::sum(x.proj(), y.proj()))
    }
}

/// A morphism of families over the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamMorphism {
    src: Family,
    dst: Family,
    map: FinMap,
}

impl FamMorphism {
    pub fn new(src: Family, dst: Family, map: FinMap) -> Result<Self> {
        ensure_eq("morphism base", src.base().size(), dst.base().size())?;
        ensure_eq("morphism domain", map.dom().size(), src.len())?;
        ensure_eq("morphism codomain", map.cod().size(), dst.len())?;
        for t in src.total().elements() {
            if dst.index(map.apply(t)) != src.index(t) {
                return Err(Error::Invalid(alloc::format!(
                    "element {t} over {} is sent over {}",
                    src.index(t),
                    dst.index(map.apply(t))
                )));
            }
        }
        Ok(FamMorphism { src, dst, map })
    }

    pub(crate) fn from_table(src: &Family, dst: &Family, table: Vec<usize>) -> Result<Self> {
        let map = FinMap::new(src.total().clone(), dst.total().clone(), table)?;
        FamMorphism::new(src.clone(), dst.clone(), map)
    }

    pub fn identity(x: &Family) -> Self {
        FamMorphism { src: x.clone(), dst: x.clone(), map: FinMap::identity(x.total()) }
    }

    pub fn src(&self) -> &Family {
        &self.src
    }

    pub fn dst(&self) -> &Family {
        &self.dst
    }

    pub fn map(&self) -> &FinMap {
        &self.map
    }

    #[inline]
    pub fn apply(&self, t: usize) -> usize {
        self.map.apply(t)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FamMorphism) -> Result<FamMorphism> {
        if self.dst != next.src {
            return Err(Error::Mismatch {
                what: "morphism composition",
                left: self.dst.len(),
                right: next.src.len(),
            });
        }
        Ok(FamMorphism {
            src: self.src.clone(),
            dst: next.dst.clone(),
            map: compose(&next.map, &self.map)?,
        })
    }

    pub fn is_iso(&self) -> bool {
        self.map.is_bijective()
    }

    pub fn inverse(&self) -> Option<FamMorphism> {
        Some(FamMorphism { src: self.dst.clone(), dst: self.src.clone(), map: self.map.inverse()? })
    }

    /// Fails with [`Error::NotIso`] unless the morphism is invertible.
    pub fn expect_iso(self, what: &'static str) -> Result<Self> {
        if self.is_iso() {
            Ok(self)
        } else {
            Err(Error::NotIso(what))
        }
    }
}

/// A family over `base` whose fiber over `b` is the set of choice tables
/// `choices[b]`, ordered by `b` and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependent {
    family: Family,
    choices: Vec<Choices>,
    offsets: Vec<usize>,
}

impl Dependent {
    pub fn new(base: &FinSet, choices: Vec<Choices>) -> Result<Self> {
        ensure_eq("dependent base", choices.len(), base.size())?;
        let total: u128 = choices.iter().map(|c| c.len() as u128).sum();
        guard::check(total)?;
        let mut offsets = Vec::with_capacity(choices.len() + 1);
        let mut table = Vec::with_capacity(total as usize);
        let mut acc = 0;
        for (b, c) in choices.iter().enumerate() {
            offsets.push(acc);
            acc += c.len();
            table.extend(core::iter::repeat_n(b, c.len()));
        }
        offsets.push(acc);
        let proj = FinMap::new(FinSet::new(acc), base.clone(), table)?;
        Ok(Dependent { family: Family::new(proj), choices, offsets })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn into_family(self) -> Family {
        self.family
    }

    pub fn choices(&self, b: usize) -> &Choices {
        &self.choices[b]
    }

    pub fn decode(&self, e: usize) -> (usize, Vec<usize>) {
        let b = self.family.index(e);
        (b, self.choices[b].decode(e - self.offsets[b]))
    }

    pub fn encode(&self, b: usize, table: &[usize]) -> Option<usize> {
        Some(self.offsets[b] + self.choices.get(b)?.encode(table)?)
    }
}

pub fn sigma(f: &FinMap, x: &Family) -> Result<Family> {
    ensure_eq("Σ base", x.base().size(), f.dom().size())?;
    Ok(Family::new(compose(f, x.proj())?))
}

pub fn sigma_map(f: &FinMap, m: &FamMorphism) -> Result<FamMorphism> {
    FamMorphism::new(sigma(f, m.src())?, sigma(f, m.dst())?, m.map().clone())
}

/// `Δ_f y`: pairs `(a, t)` with `f(a) = y.proj(t)`, over `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta {
    family: Family,
    pullback: Pullback,
}

impl Delta {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn into_family(self) -> Family {
        self.family
    }

    pub fn components(&self, e: usize) -> (usize, usize) {
        self.pullback.components(e)
    }

    pub fn index_of(&self, a: usize, t: usize) -> Option<usize> {
        self.pullback.index_of(a, t)
    }

    /// The projection `Δ_f y → y` on totals.
    pub fn to_total(&self) -> &FinMap {
        &self.pullback.right
    }
}

pub fn delta(f: &FinMap, y: &Family) -> Result<Delta> {
    ensure_eq("Δ base", y.base().size(), f.cod().size())?;
    let pullback = finset::pullback(f, y.proj())?;
    Ok(Delta { family: Family::new(pullback.left.clone()), pullback })
}

pub fn delta_map(f: &FinMap, m: &FamMorphism) -> Result<FamMorphism> {
    let src = delta(f, m.src())?;
    let dst = delta(f, m.dst())?;
    let table = src
        .family()
        .total()
        .elements()
        .map(|e| {
            let (a, t) = src.components(e);
            dst.index_of(a, m.apply(t)).expect("morphism preserves fibers")
        })
        .collect();
    FamMorphism::from_table(src.family(), dst.family(), table)
}

/// `Π_f x`: over `b`, the sections of `x` over `f⁻¹(b)`; a section is the table
/// of its values (elements of `x.total`) along the ascending fiber `f⁻¹(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi {
    sections: Dependent,
    domain_fibers: Vec<Vec<usize>>,
}

impl Pi {
    pub fn family(&self) -> &Family {
        self.sections.family()
    }

    pub fn into_family(self) -> Family {
        self.sections.into_family()
    }

    /// `(b, values)` where `values[k]` is the value at the `k`-th element of `f⁻¹(b)`.
    pub fn section(&self, e: usize) -> (usize, Vec<usize>) {
        self.sections.decode(e)
    }

    pub fn index_of(&self, b: usize, values: &[usize]) -> Option<usize> {
        self.sections.encode(b, values)
    }

    /// `f⁻¹(b)` in the order sections are tabulated.
    pub fn domain_fiber(&self, b: usize) -> &[usize] {
        &self.domain_fibers[b]
    }
}

pub fn pi(f: &FinMap, x: &Family) -> Result<Pi> {
    ensure_eq("Π base", x.base().size(), f.dom().size())?;
    let domain_fibers = f.fibers();
    let choices = domain_fibers
        .iter()
        .map(|fib| Choices::new(fib.iter().map(|&a| x.fiber(a).to_vec()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Pi { sections: Dependent::new(f.cod(), choices)?, domain_fibers })
}

pub fn pi_map(f: &FinMap, m: &FamMorphism) -> Result<FamMorphism> {
    let src = pi(f, m.src())?;
    let dst = pi(f, m.dst())?;
    let table = src
        .family()
        .total()
        .elements()
        .map(|e| {
            let (b, values) = src.section(e);
            let image: Vec<usize> = values.iter().map(|&t| m.apply(t)).collect();
            dst.index_of(b, &image).expect("morphism preserves fibers")
        })
        .collect();
    FamMorphism::from_table(src.family(), dst.family(), table)
}

/// All morphisms `x → y` over the common base, tables in lexicographic order.
pub fn hom_choices(x: &Family, y: &Family) -> Result<Choices> {
    ensure_eq("hom base", x.base().size(), y.base().size())?;
    Choices::new(x.total().elements().map(|t| y.fiber(x.index(t)).to_vec()).collect())
}

pub fn hom_enumerate(x: &Family, y: &Family) -> Result<Vec<FamMorphism>> {
    let choices = hom_choices(x, y)?;
    let dom = x.total().clone();
    let cod = y.total().clone();
    Ok(choices
        .iter()
        .map(|table| FamMorphism {
            src: x.clone(),
            dst: y.clone(),
            map: FinMap::new(dom.clone(), cod.clone(), table).expect("tables stay in fibers"),
        })
        .collect())
}

/// A verified bijection between two hom-sets, both in [`hom_choices`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomBijection {
    /// `forward[i]` is the index of the transpose of the `i`-th left morphism.
    pub forward: Vec<usize>,
    pub right_count: usize,
}

impl HomBijection {
    /// Builds the bijection from both transposition maps and checks that they
    /// are mutually inverse on every element.
    pub fn verify(
        left: &Choices,
        right: &Choices,
        to_right: impl Fn(&[usize]) -> Vec<usize>,
        to_left: impl Fn(&[usize]) -> Vec<usize>,
        what: &'static str,
    ) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::NotIso(what));
        }
        let mut forward = Vec::with_capacity(left.len());
        let mut hit = vec![false; right.len()];
        for (i, table) in left.iter().enumerate() {
            let image = to_right(&table);
            let j = right.encode(&image).ok_or(Error::NotIso(what))?;
            if core::mem::replace(&mut hit[j], true) || left.encode(&to_left(&image)) != Some(i) {
                return Err(Error::NotIso(what));
            }
            forward.push(j);
        }
        for table in right.iter() {
            if right.encode(&to_right(&to_left(&table))) != right.encode(&table) {
                return Err(Error::NotIso(what));
            }
        }
        Ok(HomBijection { forward, right_count: right.len() })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionWitness {
    /// `Hom(Σ_f x, y) ≅ Hom(x, Δ_f y)`.
    pub sigma_delta: HomBijection,
    /// `Hom(Δ_f y, x) ≅ Hom(y, Π_f x)`.
    pub delta_pi: HomBijection,
}

/// Transposes along `Σ_f ⊣ Δ_f`: a map `Σ_f x → y` becomes `x → Δ_f y`.
pub fn transpose_sigma_delta(f: &FinMap, x: &Family, y: &Family, phi: &[usize]) -> Result<Vec<usize>> {
    let dy = delta(f, y)?;
    x.total()
        .elements()
        .map(|t| dy.index_of(x.index(t), phi[t]).ok_or(Error::NotIso("Σ ⊣ Δ transpose")))
        .collect()
}

/// Transposes along `Δ_f ⊣ Π_f`: a map `Δ_f y → x` becomes `y → Π_f x`.
pub fn transpose_delta_pi(f: &FinMap, y: &Family, x: &Family, phi: &[usize]) -> Result<Vec<usize>> {
    let dy = delta(f, y)?;
    let px = pi(f, x)?;
    y.total()
        .elements()
        .map(|t| {
            let b = y.index(t);
            let values: Vec<usize> = px
                .domain_fiber(b)
                .iter()
                .map(|&a| phi[dy.index_of(a, t).expect("(a, t) lies in the pullback")])
                .collect();
            px.index_of(b, &values).ok_or(Error::NotIso("Δ ⊣ Π transpose"))
        })
        .collect()
}

/// Exhibits both adjunction bijections on the given objects. `x` lives over
/// `f.dom()`, `y` over `f.cod()`.
pub fn adjunction_witness(f: &FinMap, x: &Family, y: &Family) -> Result<AdjunctionWitness> {
    ensure_eq("adjunction source", x.base().size(), f.dom().size())?;
    ensure_eq("adjunction target", y.base().size(), f.cod().size())?;
    let sx = sigma(f, x)?;
    let dy = delta(f, y)?;
    let px = pi(f, x)?;

    let sigma_delta = HomBijection::verify(
        &hom_choices(&sx, y)?,
        &hom_choices(x, dy.family())?,
        |phi| transpose_sigma_delta(f, x, y, phi).expect("valid transpose"),
        |psi| psi.iter().map(|&e| dy.components(e).1).collect(),
        "Σ ⊣ Δ bijection",
    )?;

    let delta_pi = HomBijection::verify(
        &hom_choices(dy.family(), x)?,
        &hom_choices(y, px.family())?,
        |phi| transpose_delta_pi(f, y, x, phi).expect("valid transpose"),
        |psi| {
            dy.family()
                .total()
                .elements()
                .map(|e| {
                    let (a, t) = dy.components(e);
                    let (b, values) = px.section(psi[t]);
                    let k = px.domain_fiber(b).iter().position(|&a2| a2 == a).expect("a over b");
                    values[k]
                })
                .collect()
        },
        "Δ ⊣ Π bijection",
    )?;
    Ok(AdjunctionWitness { sigma_delta, delta_pi })
}

/// A commuting square
///
/// ```text
///   P --top--> B'
///   |          |
///  left      right
///   v          v
///   A --bottom--> B
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub top: FinMap,
    pub left: FinMap,
    pub bottom: FinMap,
    pub right: FinMap,
}

impl Square {
    /// The canonical pullback square of `bottom` and `right`.
    pub fn pullback_of(bottom: &FinMap, right: &FinMap) -> Result<Self> {
        let pb = finset::pullback(bottom, right)?;
        Ok(Square { top: pb.right, left: pb.left, bottom: bottom.clone(), right: right.clone() })
    }

    /// The iso from the apex to the canonical pullback, or `NotPullback`.
    pub fn pullback_iso(&self) -> Result<FinMap> {
        let pb = finset::pullback(&self.bottom, &self.right)?;
        let med = pb.mediate(&self.left, &self.top).map_err(|_| Error::NotPullback)?;
        if med.is_bijective() {
            Ok(med)
        } else {
            Err(Error::NotPullback)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeckChevalleyWitness {
    /// `Π_top Δ_left z → Δ_right Π_bottom z`.
    pub pi_iso: FamMorphism,
    /// `Σ_top Δ_left z → Δ_right Σ_bottom z`.
    pub sigma_iso: FamMorphism,
}

pub fn beck_chevalley_check(square: &Square, z: &Family) -> Result<BeckChevalleyWitness> {
    let iso = square.pullback_iso()?;
    let apex_of = iso.inverse().expect("bijective");
    let canonical = finset::pullback(&square.bottom, &square.right)?;
    ensure_eq("Beck-Chevalley family base", z.base().size(), square.bottom.dom().size())?;

    let dz = delta(&square.left, z)?;

    // Π side.
    let lhs = pi(&square.top, dz.family())?;
    let pz = pi(&square.bottom, z)?;
    let rhs = delta(&square.right, pz.family())?;
    let table = lhs
        .family()
        .total()
        .elements()
        .map(|e| {
            let (b2, values) = lhs.section(e);
            let b = square.right.apply(b2);
            let image: Vec<usize> = pz
                .domain_fiber(b)
                .iter()
                .map(|&a| {
                    let p = apex_of.apply(canonical.index_of(a, b2).expect("a over k(b')"));
                    let k = lhs.domain_fiber(b2).iter().position(|&q| q == p).expect("p over b'");
                    dz.components(values[k]).1
                })
                .collect();
            let s = pz.index_of(b, &image).expect("section of z");
            rhs.index_of(b2, s).expect("pullback element")
        })
        .collect();
    let pi_iso = FamMorphism::from_table(lhs.family(), rhs.family(), table)?
        .expect_iso("Beck-Chevalley comparison for Π")?;

    // Σ side.
    let lhs = sigma(&square.top, dz.family())?;
    let sz = sigma(&square.bottom, z)?;
    let rhs = delta(&square.right, &sz)?;
    let table = dz
        .family()
        .total()
        .elements()
        .map(|e| {
            let (p, t) = dz.components(e);
            rhs.index_of(square.top.apply(p), t).expect("pullback element")
        })
        .collect();
    let sigma_iso = FamMorphism::from_table(&lhs, rhs.family(), table)?
        .expect_iso("Beck-Chevalley comparison for Σ")?;

    Ok(BeckChevalleyWitness { pi_iso, sigma_iso })
}

/// The distributivity square built from `b : C → B` and `a : B → A`:
///
/// ```text
///         a'
///    W ------> U
///  ε/ |        |
///  C  | u'     | u = Π_a(b)
///  b\ v        v
///     B -----> A
///         a
/// ```
///
/// `W` is the pullback of `a` and `u`; the counit `ε` evaluates a section at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributivitySquare {
    pub u: Pi,
    pub pullback: Pullback,
    pub epsilon: FinMap,
}

impl DistributivitySquare {
    pub fn new(a: &FinMap, b: &FinMap) -> Result<Self> {
        ensure_eq("distributivity", b.cod().size(), a.dom().size())?;
        let u = pi(a, &Family::new(b.clone()))?;
        let pullback = finset::pullback(a, u.family().proj())?;
        let table = pullback
            .apex
            .elements()
            .map(|w| {
                let (beta, e) = pullback.components(w);
                let (alpha, values) = u.section(e);
                let k = u.domain_fiber(alpha).iter().position(|&x| x == beta).expect("β over α");
                values[k]
            })
            .collect();
        let epsilon = FinMap::new(pullback.apex.clone(), b.dom().clone(), table)?;
        Ok(DistributivitySquare { u, pullback, epsilon })
    }

    /// `u' : W → B`.
    pub fn u_prime(&self) -> &FinMap {
        &self.pullback.left
    }

    /// `a' : W → U`.
    pub fn a_prime(&self) -> &FinMap {
        &self.pullback.right
    }
}

/// `Π_a Σ_b x ≅ Σ_u Π_{a'} Δ_ε x`, returned as the verified comparison
/// morphism from left to right.
pub fn distributivity_check(a: &FinMap, b: &FinMap, x: &Family) -> Result<FamMorphism> {
    ensure_eq("distributivity family base", x.base().size(), b.dom().size())?;
    let sq = DistributivitySquare::new(a, b)?;

    let lhs = pi(a, &sigma(b, x)?)?;
    let dx = delta(&sq.epsilon, x)?;
    let inner = pi(sq.a_prime(), dx.family())?;
    let rhs = sigma(sq.u.family().proj(), inner.family())?;

    let table = lhs
        .family()
        .total()
        .elements()
        .map(|e| {
            let (alpha, sigma_values) = lhs.section(e);
            let choice: Vec<usize> = sigma_values.iter().map(|&t| x.index(t)).collect();
            let ue = sq.u.index_of(alpha, &choice).expect("choice is a section of b");
            let tau: Vec<usize> = inner
                .domain_fiber(ue)
                .iter()
                .map(|&w| {
                    let (beta, _) = sq.pullback.components(w);
                    let k = lhs.domain_fiber(alpha).iter().position(|&x| x == beta).expect("β over α");
                    dx.index_of(w, sigma_values[k]).expect("ε(w) = proj(σ(β))")
                })
                .collect();
            inner.index_of(ue, &tau).expect("section of Δ_ε x")
        })
        .collect();
    FamMorphism::from_table(lhs.family(), &rhs, table)?.expect_iso("distributivity comparison")
}

/// `y ⊸̃ z` over `I2 × I3`: the fiber over `(i2, i3)` is the set of maps `Y_{i2} → Z_{i3}`,
/// each a table over the ascending fiber `Y_{i2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrFamily {
    maps: Dependent,
    product: Product,
}

impl TrFamily {
    pub fn family(&self) -> &Family {
        self.maps.family()
    }

    pub fn product(&self) -> &Product {
        &self.product
    }

    /// `(i2, i3, table)`.
    pub fn decode(&self, e: usize) -> (usize, usize, Vec<usize>) {
        let (p, table) = self.maps.decode(e);
        let (i2, i3) = self.product.unpair(p);
        (i2, i3, table)
    }

    pub fn index_of(&self, i2: usize, i3: usize, table: &[usize]) -> Option<usize> {
        self.maps.encode(self.product.pair(i2, i3), table)
    }
}

pub fn tr_family(y: &Family, z: &Family) -> Result<TrFamily> {
    let (product, _) = finset::product_coproduct(y.base(), z.base());
    let choices = product
        .set()
        .elements()
        .map(|p| {
            let (i2, i3) = product.unpair(p);
            Choices::new(vec![z.fiber(i3).to_vec(); y.fiber(i2).len()])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrFamily { maps: Dependent::new(product.set(), choices)?, product })
}

/// `a ⊙ x`: fiber over `i` is `a × X_i`; total is `x.total × a` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Copower {
    pub family: Family,
    pub product: Product,
}

pub fn copower(a: &FinSet, x: &Family) -> Copower {
    let (product, _) = finset::product_coproduct(x.total(), a);
    let table = product.set().elements().map(|p| x.index(product.unpair(p).0)).collect();
    let proj = FinMap::new(product.set().clone(), x.base().clone(), table).expect("indices in base");
    Copower { family: Family::new(proj), product }
}

/// `x □ y` with its pairing of totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxProduct {
    pub family: Family,
    pub totals: Product,
    pub bases: Product,
}

impl BoxProduct {
    pub fn new(x: &Family, y: &Family) -> Self {
        let (totals, _) = finset::product_coproduct(x.total(), y.total());
        let (bases, _) = finset::product_coproduct(x.base(), y.base());
        let proj = FinMap::product(x.proj(), y.proj());
        BoxProduct { family: Family::new(proj), totals, bases }
    }
}

/// `f □ g` between box products.
pub fn box_map(f: &FamMorphism, g: &FamMorphism) -> Result<FamMorphism> {
    let src = BoxProduct::new(f.src(), g.src());
    let dst = BoxProduct::new(f.dst(), g.dst());
    FamMorphism::new(src.family, dst.family, FinMap::product(f.map(), g.map()))
}

/// Every family over `0..base` with all fibers of size at most `bound`, in
/// lexicographic order of fiber sizes.
pub fn all_families(base: usize, bound: usize) -> Result<Vec<Family>> {
    let sizes = Choices::new(vec![(0..=bound).collect(); base])?;
    Ok(sizes.iter().map(|s| Family::from_fiber_sizes(&s)).collect())
}
