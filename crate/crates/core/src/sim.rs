//! Simulation cells between endo-diagrams.
//!
//! A cell from `P1` (on `I1`) to `P2` (on `I2`) is a span `I1 ←r1− R −r2→ I2`
//! of states together with, for every state `ρ` and shape `v` of `P1` with
//! `a1(v) = r1(ρ)`:
//!
//! - `α(ρ, v)`, a shape of `P2` with `a2(α) = r2(ρ)`;
//! - for each direction `u` of `α(ρ, v)`, a direction `β(ρ, v, u)` of `v` and
//!   a state `γ(ρ, v, u)` with `n1(β) = r1(γ)` and `r2(γ) = n2(u)`.
//!
//! Read as a game: translate a move forward, translate the answer back, and
//! pick the next related state.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure_eq, Error, Result};
use crate::fam::{self, FamMorphism, Family, HomBijection};
use crate::finset::{self, compose, product_coproduct, Choices, FinMap, FinSet};
use crate::guard;
use crate::nat::generic_family;
use crate::poly::{au_lift, du_lift, eval_extension, eval_map, plus, Extension, PolyDiagram, PolyElement};

/// `I1 ←left− R −right→ I2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub apex: FinSet,
    pub left: FinMap,
    pub right: FinMap,
}

impl Span {
    pub fn new(left: FinMap, right: FinMap) -> Result<Self> {
        ensure_eq("span apex", left.dom().size(), right.dom().size())?;
        Ok(Span { apex: left.dom().clone(), left, right })
    }

    pub fn identity(i: &FinSet) -> Self {
        let id = FinMap::identity(i);
        Span { apex: i.clone(), left: id.clone(), right: id }
    }

    /// `I ←id− I −h→ J`.
    pub fn graph(h: &FinMap) -> Self {
        Span { apex: h.dom().clone(), left: FinMap::identity(h.dom()), right: h.clone() }
    }

    /// The same apex with the legs swapped.
    pub fn reversed(&self) -> Self {
        Span { apex: self.apex.clone(), left: self.right.clone(), right: self.left.clone() }
    }

    /// `S ∘ R` by pullback; apex elements are pairs `(ρ, σ)` with `r2 ρ = s1 σ`.
    pub fn then(&self, next: &Span) -> Result<(Span, finset::Pullback)> {
        let pb = finset::pullback(&self.right, &next.left)?;
        let left = compose(&self.left, &pb.left)?;
        let right = compose(&next.right, &pb.right)?;
        Ok((Span { apex: pb.apex.clone(), left, right }, pb))
    }

    /// The apex as a family over `I1 × I2`.
    pub fn as_family(&self) -> Family {
        let (prod, _) = product_coproduct(self.left.cod(), self.right.cod());
        let table = self.apex.elements().map(|r| prod.pair(self.left.apply(r), self.right.apply(r))).collect();
        Family::new(FinMap::new(self.apex.clone(), prod.set().clone(), table).expect("pairs in range"))
    }
}

/// Where a cell breaks one of its equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub equation: &'static str,
    pub rho: usize,
    pub shape: usize,
    pub direction: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ρ={} v={}", self.equation, self.rho, self.shape)?;
        if let Some(u) = self.direction {
            write!(f, " u={u}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimCell {
    span: Span,
    src: PolyDiagram,
    dst: PolyDiagram,
    /// `(ρ, v)` with `a1(v) = r1(ρ)`, lexicographic.
    pairs: Vec<(usize, usize)>,
    alpha: Vec<usize>,
    beta: Vec<Vec<usize>>,
    gamma: Vec<Vec<usize>>,
}

fn state_pairs(span: &Span, src: &PolyDiagram) -> Vec<(usize, usize)> {
    let over = src.output_of().fibers();
    span.apex
        .elements()
        .flat_map(|r| over[span.left.apply(r)].iter().map(move |&v| (r, v)))
        .collect()
}

impl SimCell {
    /// Builds a cell from its tables without checking the four equations; see
    /// [`SimCell::validate`]. Table shapes must match the index sets.
    pub fn from_parts(
        span: Span,
        src: PolyDiagram,
        dst: PolyDiagram,
        alpha: Vec<usize>,
        beta: Vec<Vec<usize>>,
        gamma: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if !src.is_endo() || !dst.is_endo() {
            return Err(Error::NotEndo);
        }
        ensure_eq("span source", span.left.cod().size(), src.inputs().size())?;
        ensure_eq("span target", span.right.cod().size(), dst.inputs().size())?;
        let pairs = state_pairs(&span, &src);
        ensure_eq("α table", alpha.len(), pairs.len())?;
        ensure_eq("β table", beta.len(), pairs.len())?;
        ensure_eq("γ table", gamma.len(), pairs.len())?;
        for (k, &w) in alpha.iter().enumerate() {
            if w >= dst.shapes().size() {
                return Err(Error::Invalid(format!("α entry {k} out of range")));
            }
            let len = dst.directions_of(w).len();
            if beta[k].len() != len || gamma[k].len() != len {
                return Err(Error::Invalid(format!("β/γ row {k} has the wrong length")));
            }
        }
        Ok(SimCell { span, src, dst, pairs, alpha, beta, gamma })
    }

    /// [`SimCell::from_parts`] followed by [`SimCell::validate`].
    pub fn new(
        span: Span,
        src: PolyDiagram,
        dst: PolyDiagram,
        alpha: Vec<usize>,
        beta: Vec<Vec<usize>>,
        gamma: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let cell = SimCell::from_parts(span, src, dst, alpha, beta, gamma)?;
        match cell.validate() {
            None => Ok(cell),
            Some(v) => Err(Error::Invalid(format!("{v}"))),
        }
    }

    pub fn span(&self) -> &Span {
        &self.span
    }

    pub fn src(&self) -> &PolyDiagram {
        &self.src
    }

    pub fn dst(&self) -> &PolyDiagram {
        &self.dst
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Row of `(ρ, v)` in the tables.
    pub fn pair_index(&self, rho: usize, v: usize) -> Option<usize> {
        self.pairs.binary_search(&(rho, v)).ok()
    }

    pub fn alpha(&self, k: usize) -> usize {
        self.alpha[k]
    }

    pub fn beta(&self, k: usize) -> &[usize] {
        &self.beta[k]
    }

    pub fn gamma(&self, k: usize) -> &[usize] {
        &self.gamma[k]
    }

    pub fn tables(&self) -> (&[usize], &[Vec<usize>], &[Vec<usize>]) {
        (&self.alpha, &self.beta, &self.gamma)
    }

    /// The first equation that fails, if any.
    pub fn validate(&self) -> Option<Violation> {
        let (p1, p2, r) = (&self.src, &self.dst, &self.span);
        for (k, &(rho, v)) in self.pairs.iter().enumerate() {
            let at = |equation, direction| Some(Violation { equation, rho, shape: v, direction });
            let w = self.alpha[k];
            if p2.output_of().apply(w) != r.right.apply(rho) {
                return at("a2∘α ≠ r2", None);
            }
            for (j, &u) in p2.directions_of(w).iter().enumerate() {
                let (b, g) = (self.beta[k][j], self.gamma[k][j]);
                if b >= p1.directions().size() || p1.shape_of().apply(b) != v {
                    return at("d1∘β ≠ v", Some(u));
                }
                if g >= r.apex.size() {
                    return at("γ out of range", Some(u));
                }
                if p1.input_of().apply(b) != r.left.apply(g) {
                    return at("n1∘β ≠ r1∘γ", Some(u));
                }
                if r.right.apply(g) != p2.input_of().apply(u) {
                    return at("r2∘γ ≠ n2", Some(u));
                }
            }
        }
        None
    }

    /// The same cell with its states renumbered along the bijection `perm : R → R'`.
    pub fn relabel(&self, perm: &FinMap) -> Result<SimCell> {
        let inv = perm.inverse().ok_or(Error::NotIso("state relabelling"))?;
        let left = compose(&self.span.left, &inv)?;
        let right = compose(&self.span.right, &inv)?;
        let span = Span::new(left, right)?;
        let pairs = state_pairs(&span, &self.src);
        let mut alpha = Vec::with_capacity(pairs.len());
        let mut beta = Vec::with_capacity(pairs.len());
        let mut gamma = Vec::with_capacity(pairs.len());
        for &(rho, v) in &pairs {
            let k = self.pair_index(inv.apply(rho), v).expect("same pairs up to renumbering");
            alpha.push(self.alpha[k]);
            beta.push(self.beta[k].clone());
            gamma.push(self.gamma[k].iter().map(|&g| perm.apply(g)).collect());
        }
        SimCell::from_parts(span, self.src.clone(), self.dst.clone(), alpha, beta, gamma)
    }
}

/// Diagonal span with every table the identity.
pub fn identity_sim(p: &PolyDiagram) -> Result<SimCell> {
    if !p.is_endo() {
        return Err(Error::NotEndo);
    }
    let span = Span::identity(p.inputs());
    let pairs = state_pairs(&span, p);
    let alpha = pairs.iter().map(|&(_, v)| v).collect();
    let beta = pairs.iter().map(|&(_, v)| p.directions_of(v).to_vec()).collect();
    let gamma = pairs
        .iter()
        .map(|&(_, v)| p.directions_of(v).iter().map(|&u| p.input_of().apply(u)).collect())
        .collect();
    SimCell::new(span, p.clone(), p.clone(), alpha, beta, gamma)
}

/// `c2 ∘ c1` over the pullback of the spans.
pub fn compose_sim(c2: &SimCell, c1: &SimCell) -> Result<SimCell> {
    if c1.dst != c2.src {
        return Err(Error::Mismatch { what: "cell composition", left: c1.dst.shapes().size(), right: c2.src.shapes().size() });
    }
    let (span, pb) = c1.span.then(&c2.span)?;
    let mid = &c1.dst;
    let pairs = state_pairs(&span, &c1.src);
    let mut alpha = Vec::with_capacity(pairs.len());
    let mut beta = Vec::with_capacity(pairs.len());
    let mut gamma = Vec::with_capacity(pairs.len());
    for &(t, v) in &pairs {
        let (rho, sigma) = pb.components(t);
        let k1 = c1.pair_index(rho, v).expect("r1 matches");
        let w = c1.alpha[k1];
        let k2 = c2.pair_index(sigma, w).expect("a2∘α = r2 = s1");
        alpha.push(c2.alpha[k2]);
        let mut b = Vec::with_capacity(c2.beta[k2].len());
        let mut g = Vec::with_capacity(c2.beta[k2].len());
        for (&u2, &sigma2) in c2.beta[k2].iter().zip(&c2.gamma[k2]) {
            let j = mid.dir_position(u2);
            b.push(c1.beta[k1][j]);
            let rho2 = c1.gamma[k1][j];
            g.push(pb.index_of(rho2, sigma2).ok_or_else(|| Error::Invalid(String::from("composite state off the pullback")))?);
        }
        beta.push(b);
        gamma.push(g);
    }
    SimCell::new(span, c1.src.clone(), c2.dst.clone(), alpha, beta, gamma)
}

/// The component at `x` of the 2-cell `⟦AU R⟧⟦P1⟧ ⇒ ⟦P2⟧⟦AU R⟧`:
/// `(ρ, (v, h)) ↦ (α(ρ, v), u ↦ (γ(ρ, v, u), h(β(ρ, v, u))))`.
pub fn eval_sim(c: &SimCell, x: &Family) -> Result<FamMorphism> {
    ensure_eq("simulation input", x.base().size(), c.src.inputs().size())?;
    let au = au_lift(&c.span);
    let inner = eval_extension(&c.src, x)?;
    let src = eval_extension(&au, inner.family())?;
    let ax = eval_extension(&au, x)?;
    let dst = eval_extension(&c.dst, ax.family())?;
    let table = (0..src.len())
        .map(|e| {
            let outer = src.element(e);
            let rho = outer.shape;
            let el = inner.element(outer.payload[0]);
            let k = c.pair_index(rho, el.shape).expect("a1(v) = r1(ρ)");
            let payload = c.beta[k]
                .iter()
                .zip(&c.gamma[k])
                .map(|(&b, &g)| {
                    let t = el.payload[c.src.dir_position(b)];
                    ax.index_of(&PolyElement { shape: g, payload: vec![t] }).expect("t over r1(γ)")
                })
                .collect();
            dst.index_of(&PolyElement { shape: c.alpha[k], payload }).expect("image in ⟦P2⟧⟦AU R⟧x")
        })
        .collect();
    FamMorphism::new(src.family().clone(), dst.family().clone(), FinMap::from_table(dst.len(), table)?)
}

/// The iso `⟦AU (S∘R)⟧x → ⟦AU S⟧⟦AU R⟧x`, `((ρ, σ), t) ↦ (σ, (ρ, t))`.
pub fn au_compose_iso(r: &Span, s: &Span, x: &Family) -> Result<FamMorphism> {
    let (t, pb) = r.then(s)?;
    let ar = eval_extension(&au_lift(r), x)?;
    let asr = eval_extension(&au_lift(s), ar.family())?;
    let at = eval_extension(&au_lift(&t), x)?;
    let table = (0..at.len())
        .map(|e| {
            let el = at.element(e);
            let (rho, sigma) = pb.components(el.shape);
            let inner = ar.index_of(&PolyElement { shape: rho, payload: el.payload.clone() }).expect("inner");
            asr.index_of(&PolyElement { shape: sigma, payload: vec![inner] }).expect("outer")
        })
        .collect();
    FamMorphism::from_table(at.family(), asr.family(), table)?.expect_iso("AU composition")
}

/// The pasting of the 2-cells of `c1` and `c2`, transported along
/// `AU S ∘ AU R ≅ AU (S∘R)` so that it can be compared with
/// `eval_sim(compose_sim(c2, c1), x)`.
pub fn paste(c2: &SimCell, c1: &SimCell, x: &Family) -> Result<FamMorphism> {
    let inner = eval_extension(&c1.src, x)?;
    let into = au_compose_iso(&c1.span, &c2.span, inner.family())?;
    let first = eval_map(&au_lift(&c2.span), &eval_sim(c1, x)?)?;
    let ax = eval_extension(&au_lift(&c1.span), x)?;
    let second = eval_sim(c2, ax.family())?;
    let back = au_compose_iso(&c1.span, &c2.span, x)?.inverse().expect("iso");
    let out = eval_map(&c2.dst, &back)?;
    into.then(&first)?.then(&second)?.then(&out)
}

/// Reads a cell off a transformation `⟦AU R⟧⟦P1⟧ ⇒ ⟦P2⟧⟦AU R⟧` given
/// componentwise, using the generic family of each shape, and checks the
/// result against the oracle on all families with fibers of size at most `bound`.
pub fn extract_sim<F>(oracle: F, span: &Span, p1: &PolyDiagram, p2: &PolyDiagram, bound: usize) -> Result<SimCell>
where
    F: Fn(&Family) -> Result<FamMorphism>,
{
    let au = au_lift(span);
    let pairs = state_pairs(span, p1);
    let mut alpha = Vec::with_capacity(pairs.len());
    let mut beta = Vec::with_capacity(pairs.len());
    let mut gamma = Vec::with_capacity(pairs.len());
    // Everything but the state depends only on the shape, so it is built once per shape.
    struct Generic {
        component: FamMorphism,
        src: Extension,
        ag: Extension,
        dst: Extension,
        element: usize,
    }
    let mut cache: Vec<Option<Generic>> = (0..p1.shapes().size()).map(|_| None).collect();
    for &(rho, v) in &pairs {
        if cache[v].is_none() {
            let g = generic_family(p1, v);
            let component = oracle(&g)?;
            let inner = eval_extension(p1, &g)?;
            let src = eval_extension(&au, inner.family())?;
            let ag = eval_extension(&au, &g)?;
            let dst = eval_extension(p2, ag.family())?;
            if component.src() != src.family() || component.dst() != dst.family() {
                return Err(Error::NotNatural(String::from("component has the wrong source or target")));
            }
            let element = inner
                .index_of(&PolyElement { shape: v, payload: (0..p1.directions_of(v).len()).collect() })
                .expect("generic element");
            cache[v] = Some(Generic { component, src, ag, dst, element });
        }
        let Generic { component, src, ag, dst, element } = cache[v].as_ref().expect("filled above");
        let e = src.index_of(&PolyElement { shape: rho, payload: vec![*element] }).expect("a1(v) = r1(ρ)");
        let image = dst.element(component.apply(e));
        let dirs = p1.directions_of(v);
        let (b, g): (Vec<usize>, Vec<usize>) = image
            .payload
            .iter()
            .map(|&t| {
                let el = ag.element(t);
                (dirs[el.payload[0]], el.shape)
            })
            .unzip();
        alpha.push(image.shape);
        beta.push(b);
        gamma.push(g);
    }
    let cell = SimCell::new(span.clone(), p1.clone(), p2.clone(), alpha, beta, gamma)
        .map_err(|e| Error::NotNatural(format!("extracted tables are not a cell: {e}")))?;
    for x in fam::all_families(p1.inputs().size(), bound)? {
        if oracle(&x)? != eval_sim(&cell, &x)? {
            return Err(Error::NotNatural(format!("disagrees at family {:?}", x.fiber_sizes())));
        }
    }
    Ok(cell)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, u128::saturating_mul)
}

/// Searches for a bijection `ε : R → R'` commuting with both legs such that
/// the tables of `c` carried along `ε` are those of `c'`.
pub fn equivalence_check(c: &SimCell, c2: &SimCell) -> Result<Option<FinMap>> {
    if c.src != c2.src || c.dst != c2.dst {
        return Err(Error::Mismatch { what: "cell endpoints", left: c.src.shapes().size(), right: c2.src.shapes().size() });
    }
    let n = c.span.apex.size();
    if n != c2.span.apex.size() {
        return Ok(None);
    }
    guard::check(factorial(n))?;
    let shapes = c.src.output_of().fibers();
    // States of c2 a state of c may go to: same legs and same α, β rows.
    let local = |r: usize, r2: usize| {
        c.span.left.apply(r) == c2.span.left.apply(r2)
            && c.span.right.apply(r) == c2.span.right.apply(r2)
            && shapes[c.span.left.apply(r)].iter().all(|&v| {
                let (k, k2) = (c.pair_index(r, v).expect("pair"), c2.pair_index(r2, v).expect("pair"));
                c.alpha[k] == c2.alpha[k2] && c.beta[k] == c2.beta[k2]
            })
    };
    let candidates: Vec<Vec<usize>> = (0..n).map(|r| (0..n).filter(|&r2| local(r, r2)).collect()).collect();
    let mut eps = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let consistent = |eps: &[usize]| {
        c.pairs.iter().enumerate().all(|(k, &(r, v))| {
            let k2 = c2.pair_index(eps[r], v).expect("pair");
            c.gamma[k].iter().zip(&c2.gamma[k2]).all(|(&g, &g2)| eps[g] == g2)
        })
    };
    fn search(
        r: usize,
        candidates: &[Vec<usize>],
        eps: &mut Vec<usize>,
        used: &mut Vec<bool>,
        done: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if r == candidates.len() {
            return done(eps);
        }
        for &r2 in &candidates[r] {
            if used[r2] {
                continue;
            }
            used[r2] = true;
            eps[r] = r2;
            if search(r + 1, candidates, eps, used, done) {
                return true;
            }
            used[r2] = false;
        }
        false
    }
    if search(0, &candidates, &mut eps, &mut used, &consistent) {
        Ok(Some(FinMap::new(c.span.apex.clone(), c2.span.apex.clone(), eps)?))
    } else {
        Ok(None)
    }
}

/// Both adjunctions attached to a span, checked on given families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuDuReport {
    /// `Hom(⟦AU R⟧y, z) ≅ Hom(y, ⟦DU R~⟧z)`.
    pub au_du: HomBijection,
    /// `Hom(⟦AU R⟧y, z) ≅ Hom(R, y ⊸̃ z)` over `I2 × I3`.
    pub tr: HomBijection,
    /// `Π_{i3} |Z_{i3}|^{Σ_{i2} |R_{i2,i3}|·|Y_{i2}|}`.
    pub count_sum_side: u128,
    /// `Π_{i2,i3} (|Z_{i3}|^{|Y_{i2}|})^{|R_{i2,i3}|}`.
    pub count_product_side: u128,
}

/// `r : I2 ← R → I3`, `y` over `I2`, `z` over `I3`.
pub fn au_du_adjunction_check(r: &Span, y: &Family, z: &Family) -> Result<AuDuReport> {
    ensure_eq("left family", y.base().size(), r.left.cod().size())?;
    ensure_eq("right family", z.base().size(), r.right.cod().size())?;
    let ay = eval_extension(&au_lift(r), y)?;
    let du = du_lift(&r.reversed());
    let dz = eval_extension(&du, z)?;
    let left = fam::hom_choices(ay.family(), z)?;

    // φ(ρ, t) ↔ t ↦ (ρ ↦ φ(ρ, t)), with ρ over r1⁻¹(i2) in ascending order.
    let au_du = HomBijection::verify(
        &left,
        &fam::hom_choices(y, dz.family())?,
        |phi| {
            y.total()
                .elements()
                .map(|t| {
                    let i2 = y.index(t);
                    let values: Vec<usize> = du
                        .directions_of(i2)
                        .iter()
                        .map(|&rho| phi[ay.index_of(&PolyElement { shape: rho, payload: vec![t] }).expect("t over r1 ρ")])
                        .collect();
                    dz.index_of(&PolyElement { shape: i2, payload: values }).expect("section")
                })
                .collect()
        },
        |psi| {
            (0..ay.len())
                .map(|e| {
                    let el = ay.element(e);
                    let sec = dz.element(psi[el.payload[0]]);
                    sec.payload[du.dir_position(el.shape)]
                })
                .collect()
        },
        "AU ⊣ DU transpose",
    )?;

    let rf = r.as_family();
    let tr = fam::tr_family(y, z)?;
    let tr_bij = HomBijection::verify(
        &left,
        &fam::hom_choices(&rf, tr.family())?,
        |phi| {
            r.apex
                .elements()
                .map(|rho| {
                    let (i2, i3) = (r.left.apply(rho), r.right.apply(rho));
                    let table: Vec<usize> = y
                        .fiber(i2)
                        .iter()
                        .map(|&t| phi[ay.index_of(&PolyElement { shape: rho, payload: vec![t] }).expect("t over r1 ρ")])
                        .collect();
                    tr.index_of(i2, i3, &table).expect("map into Z")
                })
                .collect()
        },
        |psi| {
            (0..ay.len())
                .map(|e| {
                    let el = ay.element(e);
                    let (_, _, table) = tr.decode(psi[el.shape]);
                    table[y.position(el.payload[0])]
                })
                .collect()
        },
        "AU ⊣ tr transpose",
    )?;

    let fiber_count = |i2: usize, i3: usize| {
        r.apex.elements().filter(|&rho| r.left.apply(rho) == i2 && r.right.apply(rho) == i3).count()
    };
    let mut sum_side = 1u128;
    let mut product_side = 1u128;
    for i3 in z.base().elements() {
        let zi = z.fiber(i3).len();
        let exp: usize = y.base().elements().map(|i2| fiber_count(i2, i3) * y.fiber(i2).len()).sum();
        sum_side = sum_side.saturating_mul(guard::pow(zi, exp));
        for i2 in y.base().elements() {
            let maps = guard::pow(zi, y.fiber(i2).len());
            let mut acc = 1u128;
            for _ in 0..fiber_count(i2, i3) {
                acc = acc.saturating_mul(maps);
            }
            product_side = product_side.saturating_mul(acc);
        }
    }
    Ok(AuDuReport { au_du, tr: tr_bij, count_sum_side: sum_side, count_product_side: product_side })
}

/// Injections, projections, pairing and copairing for `p1 ⊕ p2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusStructure {
    pub sum: PolyDiagram,
    pub inl: SimCell,
    pub inr: SimCell,
    pub fst: SimCell,
    pub snd: SimCell,
}

/// The cell `p → p ⊕ q` or `p ⊕ q → p` that embeds `p` at the given offsets.
/// `into` selects the direction; `offsets` are `(inputs, shapes, directions)` of
/// the summand inside the sum.
fn summand_cell(p: &PolyDiagram, sum: &PolyDiagram, offsets: (usize, usize, usize), into: bool) -> Result<SimCell> {
    let (oi, oa, od) = offsets;
    let i = p.inputs();
    let emb = FinMap::new(i.clone(), sum.inputs().clone(), i.elements().map(|x| x + oi).collect())?;
    let span = if into { Span::new(FinMap::identity(i), emb)? } else { Span::new(emb, FinMap::identity(i))? };
    let (src, dst) = if into { (p, sum) } else { (sum, p) };
    let pairs = state_pairs(&span, src);
    let mut alpha = Vec::with_capacity(pairs.len());
    let mut beta = Vec::with_capacity(pairs.len());
    let mut gamma = Vec::with_capacity(pairs.len());
    for &(_, v) in &pairs {
        let v_small = if into { v } else { v - oa };
        let dirs = p.directions_of(v_small);
        if into {
            alpha.push(v + oa);
            beta.push(dirs.to_vec());
        } else {
            alpha.push(v_small);
            beta.push(dirs.iter().map(|&u| u + od).collect());
        }
        gamma.push(dirs.iter().map(|&u| p.input_of().apply(u)).collect());
    }
    SimCell::new(span, src.clone(), dst.clone(), alpha, beta, gamma)
}

pub fn plus_structure(p1: &PolyDiagram, p2: &PolyDiagram) -> Result<PlusStructure> {
    if !p1.is_endo() || !p2.is_endo() {
        return Err(Error::NotEndo);
    }
    let sum = plus(p1, p2);
    let left = (0, 0, 0);
    let right = (p1.inputs().size(), p1.shapes().size(), p1.directions().size());
    Ok(PlusStructure {
        inl: summand_cell(p1, &sum, left, true)?,
        inr: summand_cell(p2, &sum, right, true)?,
        fst: summand_cell(p1, &sum, left, false)?,
        snd: summand_cell(p2, &sum, right, false)?,
        sum,
    })
}

/// `⟨c1, c2⟩ : q → p1 ⊕ p2` over `K ← R1 + R2 → I1 + I2`.
pub fn pair_sim(c1: &SimCell, c2: &SimCell) -> Result<SimCell> {
    if c1.src != c2.src {
        return Err(Error::Mismatch { what: "pairing source", left: c1.src.shapes().size(), right: c2.src.shapes().size() });
    }
    let (p1, p2) = (&c1.dst, &c2.dst);
    let sum = plus(p1, p2);
    let span = Span::new(FinMap::copair(&c1.span.left, &c2.span.left)?, FinMap::sum(&c1.span.right, &c2.span.right))?;
    let n1 = c1.span.apex.size();
    let pairs = state_pairs(&span, &c1.src);
    let mut alpha = Vec::with_capacity(pairs.len());
    let mut beta = Vec::with_capacity(pairs.len());
    let mut gamma = Vec::with_capacity(pairs.len());
    for &(rho, v) in &pairs {
        if rho < n1 {
            let k = c1.pair_index(rho, v).expect("pair");
            alpha.push(c1.alpha[k]);
            beta.push(c1.beta[k].clone());
            gamma.push(c1.gamma[k].clone());
        } else {
            let k = c2.pair_index(rho - n1, v).expect("pair");
            alpha.push(c2.alpha[k] + p1.shapes().size());
            beta.push(c2.beta[k].clone());
            gamma.push(c2.gamma[k].iter().map(|&g| g + n1).collect());
        }
    }
    SimCell::new(span, c1.src.clone(), sum, alpha, beta, gamma)
}

/// `[c1, c2] : p1 ⊕ p2 → q` over `I1 + I2 ← R1 + R2 → K`.
pub fn copair_sim(c1: &SimCell, c2: &SimCell) -> Result<SimCell> {
    if c1.dst != c2.dst {
        return Err(Error::Mismatch { what: "copairing target", left: c1.dst.shapes().size(), right: c2.dst.shapes().size() });
    }
    let (p1, p2) = (&c1.src, &c2.src);
    let sum = plus(p1, p2);
    let span = Span::new(FinMap::sum(&c1.span.left, &c2.span.left), FinMap::copair(&c1.span.right, &c2.span.right)?)?;
    let n1 = c1.span.apex.size();
    let (a1, d1) = (p1.shapes().size(), p1.directions().size());
    let pairs = state_pairs(&span, &sum);
    let mut alpha = Vec::with_capacity(pairs.len());
    let mut beta = Vec::with_capacity(pairs.len());
    let mut gamma = Vec::with_capacity(pairs.len());
    for &(rho, v) in &pairs {
        if rho < n1 {
            let k = c1.pair_index(rho, v).expect("pair");
            alpha.push(c1.alpha[k]);
            beta.push(c1.beta[k].clone());
            gamma.push(c1.gamma[k].clone());
        } else {
            let k = c2.pair_index(rho - n1, v - a1).expect("pair");
            alpha.push(c2.alpha[k]);
            beta.push(c2.beta[k].iter().map(|&u| u + d1).collect());
            gamma.push(c2.gamma[k].iter().map(|&g| g + n1).collect());
        }
    }
    SimCell::new(span, sum, c1.dst.clone(), alpha, beta, gamma)
}

/// The unique cell between `p` and the zero diagram in either direction: the empty span.
pub fn zero_sim(p: &PolyDiagram, from_zero: bool) -> Result<SimCell> {
    let zero = PolyDiagram::zero();
    let (src, dst) = if from_zero { (&zero, p) } else { (p, &zero) };
    let span = Span::new(FinMap::empty(src.inputs()), FinMap::empty(dst.inputs()))?;
    SimCell::new(span, src.clone(), dst.clone(), Vec::new(), Vec::new(), Vec::new())
}

/// Every valid cell `p1 → p2` whose span has at most `max_states` states.
/// Spans are enumerated with all leg tables, so isomorphic cells repeat.
pub fn enumerate_sims(p1: &PolyDiagram, p2: &PolyDiagram, max_states: usize) -> Result<Vec<SimCell>> {
    let (i1, i2) = (p1.inputs().size(), p2.inputs().size());
    let mut out = Vec::new();
    for n in 0..=max_states {
        let legs = Choices::new(vec![(0..i1 * i2).collect(); n])?;
        for leg in legs.iter() {
            let left = FinMap::from_table(i1, leg.iter().map(|&l| l / i2.max(1)).collect())?;
            let right = FinMap::from_table(i2, leg.iter().map(|&l| l % i2.max(1)).collect())?;
            let span = Span::new(left, right)?;
            let pairs = state_pairs(&span, p1);
            // Per pair: all (w, [(β, γ)]) rows.
            let rows = pairs
                .iter()
                .map(|&(rho, v)| {
                    let mut opts = Vec::new();
                    for w in p2.shapes().elements().filter(|&w| p2.output_of().apply(w) == span.right.apply(rho)) {
                        let per_dir: Vec<Vec<usize>> = p2
                            .directions_of(w)
                            .iter()
                            .map(|&u| {
                                let mut o = Vec::new();
                                for &b in p1.directions_of(v) {
                                    for g in span.apex.elements() {
                                        if p1.input_of().apply(b) == span.left.apply(g)
                                            && span.right.apply(g) == p2.input_of().apply(u)
                                        {
                                            o.push(b * n + g);
                                        }
                                    }
                                }
                                o
                            })
                            .collect();
                        for choice in Choices::new(per_dir)?.iter() {
                            opts.push((w, choice));
                        }
                    }
                    Ok(opts)
                })
                .collect::<Result<Vec<_>>>()?;
            let picks = Choices::new(rows.iter().map(|r| (0..r.len()).collect()).collect())?;
            guard::check((out.len() + picks.len()) as u128)?;
            for pick in picks.iter() {
                let mut alpha = Vec::with_capacity(rows.len());
                let mut beta = Vec::with_capacity(rows.len());
                let mut gamma = Vec::with_capacity(rows.len());
                for (row, &k) in rows.iter().zip(&pick) {
                    let (w, ref bg) = row[k];
                    alpha.push(w);
                    beta.push(bg.iter().map(|&x| x / n).collect());
                    gamma.push(bg.iter().map(|&x| x % n).collect());
                }
                out.push(SimCell::new(span.clone(), p1.clone(), p2.clone(), alpha, beta, gamma)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn two_x() -> PolyDiagram {
        PolyDiagram::monomials(&[(2, 1)])
    }

    fn list2() -> PolyDiagram {
        PolyDiagram::monomials(&[(1, 0), (1, 1), (1, 2)])
    }

    /// 2X → 2X on one state, swapping the two shapes.
    fn swap_cell() -> SimCell {
        let p = two_x();
        let span = Span::identity(&FinSet::new(1));
        SimCell::new(span, p.clone(), p, vec![1, 0], vec![vec![0], vec![1]], vec![vec![0], vec![0]]).unwrap()
    }

    /// A cell whose span has two states that both behave like the identity.
    fn doubled(p: &PolyDiagram) -> SimCell {
        let span = Span::new(FinMap::from_table(1, vec![0, 0]).unwrap(), FinMap::from_table(1, vec![0, 0]).unwrap()).unwrap();
        let pairs = state_pairs(&span, p);
        let alpha = pairs.iter().map(|&(_, v)| v).collect();
        let beta = pairs.iter().map(|&(_, v)| p.directions_of(v).to_vec()).collect();
        let gamma = pairs.iter().map(|&(r, v)| vec![1 - r; p.directions_of(v).len()]).collect();
        SimCell::new(span, p.clone(), p.clone(), alpha, beta, gamma).unwrap()
    }

    #[test]
    fn validate_examples() {
        let p = list2();
        let id = identity_sim(&p).unwrap();
        assert_eq!(id.validate(), None);

        let multi = PolyDiagram::from_shapes(2, 2, &[(0, vec![1]), (1, vec![0, 1])]).unwrap();
        let id = identity_sim(&multi).unwrap();
        let (alpha, beta, mut gamma) = (id.alpha.clone(), id.beta.clone(), id.gamma.clone());
        gamma[0][0] = 0;
        let bad = SimCell::from_parts(id.span.clone(), multi.clone(), multi, alpha, beta, gamma).unwrap();
        let v = bad.validate().unwrap();
        assert_eq!(v.equation, "n1∘β ≠ r1∘γ");

        let z = zero_sim(&p, true).unwrap();
        assert_eq!(z.validate(), None);
    }

    #[test]
    fn gamma_corruption_is_located() {
        // Two sorts, a span whose right leg distinguishes them.
        let p = PolyDiagram::from_shapes(2, 2, &[(0, vec![0]), (1, vec![1])]).unwrap();
        let span = Span::new(FinMap::from_table(2, vec![0, 1, 1]).unwrap(), FinMap::from_table(2, vec![0, 1, 0]).unwrap()).unwrap();
        let cell = SimCell::from_parts(
            span,
            p.clone(),
            p,
            vec![0, 1, 0],
            vec![vec![0], vec![1], vec![1]],
            vec![vec![0], vec![1], vec![1]],
        )
        .unwrap();
        let v = cell.validate().unwrap();
        assert_eq!(v.equation, "r2∘γ ≠ n2");
        assert_eq!((v.rho, v.shape, v.direction), (2, 1, Some(0)));
    }

    #[test]
    fn identity_laws() {
        let c = swap_cell();
        let id = identity_sim(c.src()).unwrap();
        assert!(equivalence_check(&compose_sim(&c, &id).unwrap(), &c).unwrap().is_some());
        assert!(equivalence_check(&compose_sim(&id, &c).unwrap(), &c).unwrap().is_some());
        let x = Family::from_fiber_sizes(&[2]);
        let e = eval_sim(&id, &x).unwrap();
        assert_eq!(e.src().len(), e.dst().len());
        assert!(e.map().table().iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn relabelling_composes() {
        let c = swap_cell();
        let cc = compose_sim(&c, &c).unwrap();
        assert_eq!(cc.alpha, vec![0, 1]);
        let x = Family::from_fiber_sizes(&[3]);
        assert_eq!(eval_sim(&cc, &x).unwrap(), paste(&c, &c, &x).unwrap());
    }

    #[test]
    fn eval_examples() {
        let z = zero_sim(&list2(), false).unwrap();
        let e = eval_sim(&z, &Family::from_fiber_sizes(&[2])).unwrap();
        assert!(e.src().is_empty());

        // Truncating List2 to List1: keep shapes 0 and 1, send shape 2 to its prefix of length 1.
        let (l2, l1) = (list2(), PolyDiagram::monomials(&[(1, 0), (1, 1)]));
        let span = Span::identity(&FinSet::new(1));
        let prefix = SimCell::new(
            span.clone(),
            l2.clone(),
            l1.clone(),
            vec![0, 1, 1],
            vec![vec![], vec![0], vec![1]],
            vec![vec![], vec![0], vec![0]],
        )
        .unwrap();
        let au_l2 = crate::poly::compose_direct(&au_lift(&span), &l2).unwrap().diagram;
        let l1_au = crate::poly::compose_direct(&l1, &au_lift(&span)).unwrap().diagram;
        assert_eq!(au_l2.to_string(), "X^2 + X + 1");
        assert_eq!(l1_au.to_string(), "X + 1");
        // The components are natural in x.
        let mut squares = 0;
        for x in fam::all_families(1, 2).unwrap() {
            for y in fam::all_families(1, 2).unwrap() {
                for f in fam::hom_enumerate(&x, &y).unwrap() {
                    let lhs = eval_map(&au_lift(&span), &eval_map(&l2, &f).unwrap()).unwrap().then(&eval_sim(&prefix, &y).unwrap()).unwrap();
                    let rhs = eval_sim(&prefix, &x).unwrap().then(&eval_map(&l1, &eval_map(&au_lift(&span), &f).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    squares += 1;
                }
            }
        }
        assert!(squares > 0);
    }

    #[test]
    fn extraction_round_trips() {
        let c = doubled(&list2());
        let got = extract_sim(|x| eval_sim(&c, x), c.span(), c.src(), c.dst(), 2).unwrap();
        assert_eq!(got, c);
        let p = two_x();
        let id = identity_sim(&p).unwrap();
        let got = extract_sim(|x| eval_sim(&id, x), id.span(), &p, &p, 3).unwrap();
        assert_eq!(got, id);
    }

    #[test]
    fn extraction_is_injective_on_small_cells() {
        let p = PolyDiagram::monomials(&[(1, 1)]);
        let q = PolyDiagram::monomials(&[(1, 0), (1, 1)]);
        let cells = enumerate_sims(&p, &q, 2).unwrap();
        assert!(!cells.is_empty());
        for c in &cells {
            let got = extract_sim(|x| eval_sim(c, x), c.span(), &p, &q, 2).unwrap();
            assert_eq!(&got, c);
        }
    }

    #[test]
    fn equivalence_examples() {
        let c = doubled(&two_x());
        assert_eq!(equivalence_check(&c, &c).unwrap(), Some(FinMap::identity(&c.span.apex)));
        let swap = FinMap::from_table(2, vec![1, 0]).unwrap();
        let moved = c.relabel(&swap).unwrap();
        // Both states are interchangeable here, so either permutation is a witness.
        assert!(equivalence_check(&c, &moved).unwrap().is_some());
        assert!(equivalence_check(&c, &identity_sim(&two_x()).unwrap()).unwrap().is_none());

        // An asymmetric cell: states differ in α, so only the swap works.
        let p = two_x();
        let span = Span::new(FinMap::from_table(1, vec![0, 0]).unwrap(), FinMap::from_table(1, vec![0, 0]).unwrap()).unwrap();
        let lop = SimCell::new(
            span,
            p.clone(),
            p,
            vec![0, 0, 1, 1],
            vec![vec![0], vec![1], vec![0], vec![1]],
            vec![vec![1], vec![0], vec![0], vec![1]],
        )
        .unwrap();
        let moved = lop.relabel(&swap).unwrap();
        assert_eq!(equivalence_check(&lop, &moved).unwrap(), Some(swap));
    }

    #[test]
    fn adjunction_examples() {
        let id = Span::identity(&FinSet::new(1));
        let y = Family::from_fiber_sizes(&[2]);
        let z = Family::from_fiber_sizes(&[3]);
        let rep = au_du_adjunction_check(&id, &y, &z).unwrap();
        assert_eq!(rep.au_du.len(), 9);
        assert_eq!(rep.au_du.forward, (0..9).collect::<Vec<_>>());

        let r = Span::new(FinMap::from_table(1, vec![0, 0]).unwrap(), FinMap::from_table(1, vec![0, 0]).unwrap()).unwrap();
        for (ys, zs) in [(1, 3), (2, 2), (3, 2), (0, 1)] {
            let (y, z) = (Family::from_fiber_sizes(&[ys]), Family::from_fiber_sizes(&[zs]));
            let rep = au_du_adjunction_check(&r, &y, &z).unwrap();
            assert_eq!(rep.au_du.len(), rep.tr.len());
            assert_eq!(rep.count_sum_side, rep.count_product_side);
            assert_eq!(rep.count_sum_side, rep.au_du.len() as u128);
        }
    }

    #[test]
    fn plus_structure_laws() {
        let (p1, p2) = (two_x(), list2());
        let s = plus_structure(&p1, &p2).unwrap();
        for cell in [&s.inl, &s.inr, &s.fst, &s.snd] {
            assert_eq!(cell.validate(), None);
        }
        let c1 = swap_cell();
        let c2 = identity_sim(&p2).unwrap();
        let cp = copair_sim(&compose_sim(&s.inl, &c1).unwrap(), &compose_sim(&s.inr, &c2).unwrap()).unwrap();
        assert_eq!(compose_sim(&cp, &s.inl).unwrap().src(), &p1);
        assert!(equivalence_check(&compose_sim(&cp, &s.inl).unwrap(), &compose_sim(&s.inl, &c1).unwrap()).unwrap().is_some());

        let q = p1.clone();
        let d1 = identity_sim(&q).unwrap();
        let d2 = enumerate_sims(&q, &p2, 1).unwrap().pop().unwrap();
        let pr = pair_sim(&d1, &d2).unwrap();
        assert!(equivalence_check(&compose_sim(&s.fst, &pr).unwrap(), &d1).unwrap().is_some());
        assert!(equivalence_check(&compose_sim(&s.snd, &pr).unwrap(), &d2).unwrap().is_some());

        let to_zero = zero_sim(&p1, false).unwrap();
        assert_eq!(enumerate_sims(&p1, &PolyDiagram::zero(), 3).unwrap().len(), 1);
        assert_eq!(enumerate_sims(&PolyDiagram::zero(), &p1, 3).unwrap().len(), 1);
        assert_eq!(to_zero.span().apex.size(), 0);
    }
}
