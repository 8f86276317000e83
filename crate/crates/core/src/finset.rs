//! Finite sets `0..n` and total maps between them.
//!
//! Constructed carriers (products, pullbacks, function spaces) are always
//! renumbered to `0..n` in lexicographic order of their components, and the
//! structure that produced them exposes the bijection with those components.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::error::{ensure_eq, Error, Result};
use crate::guard;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl FinSet {
    pub fn new(size: usize) -> Self {
        FinSet { size, labels: None }
    }

    /// A set whose elements carry display names. Names must be pairwise distinct.
    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Invalid(alloc::format!("duplicate label {l:?}")));
            }
        }
        Ok(FinSet { size: labels.len(), labels: Some(labels) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(x)).map(String::as_str)
    }

    pub fn elements(&self) -> Range<usize> {
        0..self.size
    }

    /// Same set without labels.
    pub fn unlabeled(&self) -> Self {
        FinSet::new(self.size)
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.size)
    }
}

/// A total map between finite sets, stored as its table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMap {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl FinMap {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        ensure_eq("map table length", table.len(), dom.size())?;
        if let Some((x, &y)) = table.iter().enumerate().find(|(_, &y)| y >= cod.size()) {
            return Err(Error::Invalid(alloc::format!(
                "map sends {x} to {y}, outside codomain of size {}",
                cod.size()
            )));
        }
        Ok(FinMap { dom, cod, table })
    }

    /// Map with domain `0..table.len()` into `0..cod`.
    pub fn from_table(cod: usize, table: Vec<usize>) -> Result<Self> {
        FinMap::new(FinSet::new(table.len()), FinSet::new(cod), table)
    }

    pub fn identity(set: &FinSet) -> Self {
        FinMap { dom: set.clone(), cod: set.clone(), table: set.elements().collect() }
    }

    /// The unique map out of the empty set.
    pub fn empty(cod: &FinSet) -> Self {
        FinMap { dom: FinSet::new(0), cod: cod.clone(), table: Vec::new() }
    }

    /// The unique map into the one-element set.
    pub fn terminal(dom: &FinSet) -> Self {
        FinMap { dom: dom.clone(), cod: FinSet::new(1), table: vec![0; dom.size()] }
    }

    pub fn constant(dom: &FinSet, cod: &FinSet, value: usize) -> Result<Self> {
        FinMap::new(dom.clone(), cod.clone(), vec![value; dom.size()])
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &FinMap) -> Result<FinMap> {
        compose(self, f)
    }

    /// Elements of the domain sent to `y`, ascending.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        self.dom.elements().filter(|&x| self.table[x] == y).collect()
    }

    /// All fibers, indexed by codomain element.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cod.size()];
        for (x, &y) in self.table.iter().enumerate() {
            out[y].push(x);
        }
        out
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        self.table.iter().all(|&y| !core::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        for &y in &self.table {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.size() == self.cod.size() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![0; self.cod.size()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Some(FinMap { dom: self.cod.clone(), cod: self.dom.clone(), table })
    }

    /// `f × g : A × B → A' × B'` on lexicographic carriers.
    pub fn product(f: &FinMap, g: &FinMap) -> FinMap {
        let (src, _) = product_coproduct(f.dom(), g.dom());
        let (dst, _) = product_coproduct(f.cod(), g.cod());
        let table = src
            .set()
            .elements()
            .map(|p| {
                let (x, y) = src.unpair(p);
                dst.pair(f.apply(x), g.apply(y))
            })
            .collect();
        FinMap { dom: src.set().clone(), cod: dst.set().clone(), table }
    }

    /// `f + g : A + B → A' + B'`.
    pub fn sum(f: &FinMap, g: &FinMap) -> FinMap {
        let (_, src) = product_coproduct(f.dom(), g.dom());
        let (_, dst) = product_coproduct(f.cod(), g.cod());
        let table = src
            .set()
            .elements()
            .map(|s| match src.untag(s) {
                Tag::Left(x) => dst.inl(f.apply(x)),
                Tag::Right(y) => dst.inr(g.apply(y)),
            })
            .collect();
        FinMap { dom: src.set().clone(), cod: dst.set().clone(), table }
    }

    /// `[f, g] : A + B → C`.
    pub fn copair(f: &FinMap, g: &FinMap) -> Result<FinMap> {
        ensure_eq("copair codomain", f.cod().size(), g.cod().size())?;
        let (_, src) = product_coproduct(f.dom(), g.dom());
        let mut table = f.table.clone();
        table.extend_from_slice(&g.table);
        Ok(FinMap { dom: src.set().clone(), cod: f.cod.clone(), table })
    }

    /// `⟨f, g⟩ : C → A × B`.
    pub fn pair(f: &FinMap, g: &FinMap) -> Result<FinMap> {
        ensure_eq("pair domain", f.dom().size(), g.dom().size())?;
        let (dst, _) = product_coproduct(f.cod(), g.cod());
        let table = f.dom().elements().map(|x| dst.pair(f.apply(x), g.apply(x))).collect();
        Ok(FinMap { dom: f.dom.clone(), cod: dst.set().clone(), table })
    }
}

/// `g ∘ f`.
pub fn compose(g: &FinMap, f: &FinMap) -> Result<FinMap> {
    ensure_eq("composition", f.cod().size(), g.dom().size())?;
    let table = f.table.iter().map(|&y| g.table[y]).collect();
    Ok(FinMap { dom: f.dom.clone(), cod: g.cod.clone(), table })
}

/// Pullback of a cospan `A -f-> C <-g- B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub apex: FinSet,
    /// Projection to the domain of `f`.
    pub left: FinMap,
    /// Projection to the domain of `g`.
    pub right: FinMap,
}

impl Pullback {
    /// Position of the pair `(x, y)` in the apex, if `f(x) = g(y)`.
    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        // Pairs are in lexicographic order, so the apex is sorted.
        let key = (x, y);
        let (mut lo, mut hi) = (0, self.apex.size());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let here = (self.left.apply(mid), self.right.apply(mid));
            match here.cmp(&key) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn components(&self, p: usize) -> (usize, usize) {
        (self.left.apply(p), self.right.apply(p))
    }

    /// The mediating map of a cone `(p, q)`, if the cone commutes.
    pub fn mediate(&self, p: &FinMap, q: &FinMap) -> Result<FinMap> {
        ensure_eq("cone legs", p.dom().size(), q.dom().size())?;
        let table = p
            .dom()
            .elements()
            .map(|t| {
                self.index_of(p.apply(t), q.apply(t))
                    .ok_or_else(|| Error::Invalid(alloc::format!("cone does not commute at {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FinMap::new(p.dom().clone(), self.apex.clone(), table)
    }
}

pub fn pullback(f: &FinMap, g: &FinMap) -> Result<Pullback> {
    ensure_eq("pullback codomain", f.cod().size(), g.cod().size())?;
    let g_fibers = g.fibers();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for x in f.dom().elements() {
        for &y in &g_fibers[f.apply(x)] {
            left.push(x);
            right.push(y);
        }
    }
    let apex = FinSet::new(left.len());
    Ok(Pullback {
        left: FinMap { dom: apex.clone(), cod: f.dom().clone(), table: left },
        right: FinMap { dom: apex.clone(), cod: g.dom().clone(), table: right },
        apex,
    })
}

/// Equalizer of a parallel pair: the subset where they agree, with its inclusion.
pub fn equalizer(f: &FinMap, g: &FinMap) -> Result<(FinSet, FinMap)> {
    ensure_eq("equalizer domain", f.dom().size(), g.dom().size())?;
    ensure_eq("equalizer codomain", f.cod().size(), g.cod().size())?;
    let table: Vec<usize> = f.dom().elements().filter(|&x| f.apply(x) == g.apply(x)).collect();
    let set = FinSet::new(table.len());
    Ok((set.clone(), FinMap { dom: set, cod: f.dom().clone(), table }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product {
    left: usize,
    right: usize,
    set: FinSet,
}

impl Product {
    pub fn set(&self) -> &FinSet {
        &self.set
    }

    #[inline]
    pub fn pair(&self, x: usize, y: usize) -> usize {
        x * self.right + y
    }

    #[inline]
    pub fn unpair(&self, p: usize) -> (usize, usize) {
        (p / self.right, p % self.right)
    }

    pub fn fst(&self) -> FinMap {
        let table = self.set.elements().map(|p| self.unpair(p).0).collect();
        FinMap { dom: self.set.clone(), cod: FinSet::new(self.left), table }
    }

    pub fn snd(&self) -> FinMap {
        let table = self.set.elements().map(|p| self.unpair(p).1).collect();
        FinMap { dom: self.set.clone(), cod: FinSet::new(self.right), table }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Left(usize),
    Right(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct {
    left: usize,
    right: usize,
    set: FinSet,
}

impl Coproduct {
    pub fn set(&self) -> &FinSet {
        &self.set
    }

    #[inline]
    pub fn inl(&self, x: usize) -> usize {
        x
    }

    #[inline]
    pub fn inr(&self, y: usize) -> usize {
        self.left + y
    }

    pub fn untag(&self, s: usize) -> Tag {
        if s < self.left {
            Tag::Left(s)
        } else {
            Tag::Right(s - self.left)
        }
    }

    pub fn inl_map(&self) -> FinMap {
        let table = (0..self.left).collect();
        FinMap { dom: FinSet::new(self.left), cod: self.set.clone(), table }
    }

    pub fn inr_map(&self) -> FinMap {
        let table = (0..self.right).map(|y| self.inr(y)).collect();
        FinMap { dom: FinSet::new(self.right), cod: self.set.clone(), table }
    }
}

/// `a × b` with lexicographic pairing and `a + b` with left-then-right tagging.
pub fn product_coproduct(a: &FinSet, b: &FinSet) -> (Product, Coproduct) {
    let (l, r) = (a.size(), b.size());
    (
        Product { left: l, right: r, set: FinSet::new(l * r) },
        Coproduct { left: l, right: r, set: FinSet::new(l + r) },
    )
}

/// Lexicographically ordered choice tables: position `k` takes a value from
/// `options[k]`. This is the dependent product every `Π`, function space and
/// extension in the crate is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choices {
    options: Vec<Vec<usize>>,
    len: usize,
}

impl Choices {
    pub fn new(options: Vec<Vec<usize>>) -> Result<Self> {
        let count = guard::product(options.iter().map(Vec::len));
        guard::check(count)?;
        Ok(Choices { options, len: count as usize })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn positions(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self, k: usize) -> &[usize] {
        &self.options[k]
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.options.len()];
        for k in (0..self.options.len()).rev() {
            let radix = self.options[k].len();
            out[k] = self.options[k][index % radix];
            index /= radix;
        }
        out
    }

    pub fn encode(&self, table: &[usize]) -> Option<usize> {
        if table.len() != self.options.len() {
            return None;
        }
        let mut index = 0;
        for (opts, v) in self.options.iter().zip(table) {
            let pos = opts.iter().position(|o| o == v)?;
            index = index * opts.len() + pos;
        }
        Some(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(move |i| self.decode(i))
    }
}

/// All `|b|^|a|` maps `a → b`, tables in lexicographic order.
pub fn enumerate_maps(a: &FinSet, b: &FinSet) -> Result<Vec<FinMap>> {
    let choices = Choices::new(vec![b.elements().collect(); a.size()])?;
    Ok(choices
        .iter()
        .map(|table| FinMap { dom: a.clone(), cod: b.clone(), table })
        .collect())
}

/// The function space `b^a`, numbered consistently with [`enumerate_maps`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponential {
    dom: FinSet,
    cod: FinSet,
    set: FinSet,
}

impl Exponential {
    pub fn set(&self) -> &FinSet {
        &self.set
    }

    pub fn encode(&self, f: &FinMap) -> Result<usize> {
        ensure_eq("exponential domain", f.dom().size(), self.dom.size())?;
        ensure_eq("exponential codomain", f.cod().size(), self.cod.size())?;
        let radix = self.cod.size();
        Ok(f.table().iter().fold(0, |acc, &y| acc * radix + y))
    }

    pub fn decode(&self, index: usize) -> FinMap {
        let radix = self.cod.size();
        let mut table = vec![0; self.dom.size()];
        let mut rest = index;
        for slot in table.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        FinMap { dom: self.dom.clone(), cod: self.cod.clone(), table }
    }

    /// `ev(f, x) = f(x)`.
    pub fn eval(&self, f: usize, x: usize) -> usize {
        let radix = self.cod.size();
        let shift = self.dom.size() - 1 - x;
        (f / radix.pow(shift as u32)) % radix
    }

    /// Transpose of `g : X × a → b` (with `X × a` the lexicographic product).
    pub fn curry(&self, x: &FinSet, g: &FinMap) -> Result<FinMap> {
        let (prod, _) = product_coproduct(x, &self.dom);
        ensure_eq("curry domain", g.dom().size(), prod.set().size())?;
        ensure_eq("curry codomain", g.cod().size(), self.cod.size())?;
        let table = x
            .elements()
            .map(|t| {
                let h: Vec<usize> = self.dom.elements().map(|s| g.apply(prod.pair(t, s))).collect();
                self.encode(&FinMap { dom: self.dom.clone(), cod: self.cod.clone(), table: h })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinMap { dom: x.clone(), cod: self.set.clone(), table })
    }

    /// Inverse of [`Exponential::curry`].
    pub fn uncurry(&self, h: &FinMap) -> Result<FinMap> {
        ensure_eq("uncurry codomain", h.cod().size(), self.set.size())?;
        let (prod, _) = product_coproduct(h.dom(), &self.dom);
        let table = prod
            .set()
            .elements()
            .map(|p| {
                let (t, s) = prod.unpair(p);
                self.eval(h.apply(t), s)
            })
            .collect();
        Ok(FinMap { dom: prod.set().clone(), cod: self.cod.clone(), table })
    }
}

pub fn exponential(a: &FinSet, b: &FinSet) -> Result<Exponential> {
    let size = guard::pow(b.size(), a.size());
    guard::check(size)?;
    Ok(Exponential { dom: a.clone(), cod: b.clone(), set: FinSet::new(size as usize) })
}
