//! The JSON document format. See `docs/format.md` for the schema.
//!
//! A [`Document`] is the raw tree as read from disk; [`Model`] is the same
//! content resolved into validated core values. Loading always goes through
//! the core constructors, so every diagram and cell condition is rechecked.

use std::collections::BTreeMap;

use polycat_core::{DiagMorphism, Error as CoreError, Family, FinMap, FinSet, PolyDiagram, SimCell, Span};
use serde::{Deserialize, Serialize};

use crate::error::DocError;

/// A finite set: a size, a list of labels, or the name of an entry of `sets`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetDef {
    Size(usize),
    Labels(Vec<String>),
    Name(String),
}

impl From<&FinSet> for SetDef {
    fn from(s: &FinSet) -> Self {
        match s.labels() {
            Some(labels) => SetDef::Labels(labels.to_vec()),
            None => SetDef::Size(s.size()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDef {
    pub dom: SetDef,
    pub cod: SetDef,
    pub table: Vec<usize>,
}

impl From<&FinMap> for MapDef {
    fn from(m: &FinMap) -> Self {
        MapDef { dom: m.dom().into(), cod: m.cod().into(), table: m.table().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapRef {
    Name(String),
    Inline(MapDef),
}

/// Either `fibers` (sizes, elements numbered fiber by fiber) or `proj` over `base`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDef {
    pub output: usize,
    pub inputs: Vec<usize>,
}

/// One of three forms: the three tables, a `listing` of shapes, or
/// single-sorted `monomials` as `[coefficient, exponent]` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shapes: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_of: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_of: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_of: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub listing: Option<Vec<ShapeDef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<(usize, usize)>>,
}

impl From<&PolyDiagram> for DiagramDef {
    fn from(p: &PolyDiagram) -> Self {
        DiagramDef {
            inputs: Some(p.inputs().into()),
            outputs: Some(p.outputs().into()),
            shapes: Some(p.shapes().into()),
            directions: p.directions().labels().map(|_| p.directions().into()),
            input_of: Some(p.input_of().table().to_vec()),
            shape_of: Some(p.shape_of().table().to_vec()),
            output_of: Some(p.output_of().table().to_vec()),
            listing: None,
            monomials: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDef {
    pub src: String,
    pub dst: String,
    pub alpha: Vec<usize>,
    pub beta: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanDef {
    pub left: MapRef,
    pub right: MapRef,
}

impl From<&Span> for SpanDef {
    fn from(s: &Span) -> Self {
        SpanDef { left: MapRef::Inline((&s.left).into()), right: MapRef::Inline((&s.right).into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpanRef {
    Name(String),
    Inline(SpanDef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimDef {
    pub span: SpanRef,
    pub src: String,
    pub dst: String,
    pub alpha: Vec<usize>,
    pub beta: Vec<Vec<usize>>,
    pub gamma: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Document {
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sets: BTreeMap<String, SetDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub families: BTreeMap<String, FamilyDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagrams: BTreeMap<String, DiagramDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub spans: BTreeMap<String, SpanDef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub simulations: BTreeMap<String, SimDef>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn resolve(&self) -> Result<Model, DocError> {
        Resolver { doc: self, model: Model::default() }.run()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub src: String,
    pub dst: String,
    pub morphism: DiagMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    pub src: String,
    pub dst: String,
    pub cell: SimCell,
}

/// A resolved document: every entry is a validated core value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub sets: BTreeMap<String, FinSet>,
    pub maps: BTreeMap<String, FinMap>,
    pub families: BTreeMap<String, Family>,
    pub diagrams: BTreeMap<String, PolyDiagram>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub spans: BTreeMap<String, Span>,
    pub simulations: BTreeMap<String, Simulation>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, DocError> {
    map.get(name).ok_or_else(|| DocError::Missing { kind, name: name.to_string() })
}

impl Model {
    pub fn diagram(&self, name: &str) -> Result<&PolyDiagram, DocError> {
        lookup(&self.diagrams, "diagram", name)
    }

    pub fn family(&self, name: &str) -> Result<&Family, DocError> {
        lookup(&self.families, "family", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism, DocError> {
        lookup(&self.morphisms, "morphism", name)
    }

    pub fn span(&self, name: &str) -> Result<&Span, DocError> {
        lookup(&self.spans, "span", name)
    }

    pub fn simulation(&self, name: &str) -> Result<&Simulation, DocError> {
        lookup(&self.simulations, "simulation", name)
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::default();
        for (name, s) in &self.sets {
            doc.sets.insert(name.clone(), s.into());
        }
        for (name, m) in &self.maps {
            doc.maps.insert(name.clone(), m.into());
        }
        for (name, f) in &self.families {
            doc.families.insert(name.clone(), family_def(f));
        }
        for (name, p) in &self.diagrams {
            doc.diagrams.insert(name.clone(), p.into());
        }
        for (name, m) in &self.morphisms {
            let def = MorphismDef {
                src: m.src.clone(),
                dst: m.dst.clone(),
                alpha: m.morphism.alpha().table().to_vec(),
                beta: m.morphism.betas().to_vec(),
            };
            doc.morphisms.insert(name.clone(), def);
        }
        for (name, s) in &self.spans {
            doc.spans.insert(name.clone(), s.into());
        }
        for (name, s) in &self.simulations {
            let (alpha, beta, gamma) = s.cell.tables();
            let def = SimDef {
                span: SpanRef::Inline(s.cell.span().into()),
                src: s.src.clone(),
                dst: s.dst.clone(),
                alpha: alpha.to_vec(),
                beta: beta.to_vec(),
                gamma: gamma.to_vec(),
            };
            doc.simulations.insert(name.clone(), def);
        }
        doc
    }
}

fn family_def(f: &Family) -> FamilyDef {
    let fibers = f.fiber_sizes();
    if f.base().labels().is_none() && f.total().labels().is_none() && *f == Family::from_fiber_sizes(&fibers) {
        FamilyDef { fibers: Some(fibers), ..FamilyDef::default() }
    } else {
        FamilyDef {
            base: Some(f.base().into()),
            total: f.total().labels().map(|_| f.total().into()),
            proj: Some(f.proj().table().to_vec()),
            fibers: None,
        }
    }
}

struct Resolver<'a> {
    doc: &'a Document,
    model: Model,
}

impl Resolver<'_> {
    fn run(mut self) -> Result<Model, DocError> {
        let doc = self.doc;
        for (name, def) in &doc.sets {
            let set = match def {
                SetDef::Name(target) => {
                    return Err(DocError::Malformed {
                        kind: "set",
                        name: name.clone(),
                        message: format!("entries of `sets` must be a size or labels, not the name `{target}`"),
                    })
                }
                other => self.set("set", name, other)?,
            };
            self.model.sets.insert(name.clone(), set);
        }
        for (name, def) in &doc.maps {
            let m = self.map("map", name, def)?;
            self.model.maps.insert(name.clone(), m);
        }
        for (name, def) in &doc.families {
            let f = self.family(name, def)?;
            self.model.families.insert(name.clone(), f);
        }
        for (name, def) in &doc.diagrams {
            let p = self.diagram(name, def)?;
            self.model.diagrams.insert(name.clone(), p);
        }
        for (name, def) in &doc.morphisms {
            let kind = "morphism";
            let src = self.diagram_ref(kind, name, &def.src)?;
            let dst = self.diagram_ref(kind, name, &def.dst)?;
            let m = DiagMorphism::new(src, dst, def.alpha.clone(), def.beta.clone()).map_err(invalid(kind, name))?;
            self.model
                .morphisms
                .insert(name.clone(), Morphism { src: def.src.clone(), dst: def.dst.clone(), morphism: m });
        }
        for (name, def) in &doc.spans {
            let s = self.span("span", name, def)?;
            self.model.spans.insert(name.clone(), s);
        }
        for (name, def) in &doc.simulations {
            let kind = "simulation";
            let span = match &def.span {
                SpanRef::Name(target) => self
                    .model
                    .spans
                    .get(target)
                    .cloned()
                    .ok_or_else(|| reference(kind, name, target))?,
                SpanRef::Inline(s) => self.span(kind, name, s)?,
            };
            let src = self.diagram_ref(kind, name, &def.src)?;
            let dst = self.diagram_ref(kind, name, &def.dst)?;
            let cell = SimCell::new(span, src, dst, def.alpha.clone(), def.beta.clone(), def.gamma.clone())
                .map_err(invalid(kind, name))?;
            self.model
                .simulations
                .insert(name.clone(), Simulation { src: def.src.clone(), dst: def.dst.clone(), cell });
        }
        Ok(self.model)
    }

    fn set(&self, kind: &'static str, name: &str, def: &SetDef) -> Result<FinSet, DocError> {
        match def {
            SetDef::Size(n) => Ok(FinSet::new(*n)),
            SetDef::Labels(labels) => FinSet::with_labels(labels.clone()).map_err(invalid(kind, name)),
            SetDef::Name(target) => self.model.sets.get(target).cloned().ok_or_else(|| reference(kind, name, target)),
        }
    }

    fn map(&self, kind: &'static str, name: &str, def: &MapDef) -> Result<FinMap, DocError> {
        let dom = self.set(kind, name, &def.dom)?;
        let cod = self.set(kind, name, &def.cod)?;
        FinMap::new(dom, cod, def.table.clone()).map_err(invalid(kind, name))
    }

    fn map_ref(&self, kind: &'static str, name: &str, r: &MapRef) -> Result<FinMap, DocError> {
        match r {
            MapRef::Name(target) => self.model.maps.get(target).cloned().ok_or_else(|| reference(kind, name, target)),
            MapRef::Inline(def) => self.map(kind, name, def),
        }
    }

    fn span(&self, kind: &'static str, name: &str, def: &SpanDef) -> Result<Span, DocError> {
        let left = self.map_ref(kind, name, &def.left)?;
        let right = self.map_ref(kind, name, &def.right)?;
        Span::new(left, right).map_err(invalid(kind, name))
    }

    fn diagram_ref(&self, kind: &'static str, name: &str, target: &str) -> Result<PolyDiagram, DocError> {
        self.model.diagrams.get(target).cloned().ok_or_else(|| reference(kind, name, target))
    }

    fn family(&self, name: &str, def: &FamilyDef) -> Result<Family, DocError> {
        let kind = "family";
        match (&def.fibers, &def.proj) {
            (Some(fibers), None) => {
                if def.total.is_some() {
                    return Err(malformed(kind, name, "`total` goes with `proj`, not `fibers`"));
                }
                let f = Family::from_fiber_sizes(fibers);
                match &def.base {
                    None => Ok(f),
                    Some(b) => {
                        let base = self.set(kind, name, b)?;
                        if base.size() != fibers.len() {
                            return Err(malformed(kind, name, "`fibers` must have one entry per element of `base`"));
                        }
                        let proj = FinMap::new(f.total().clone(), base, f.proj().table().to_vec())
                            .map_err(invalid(kind, name))?;
                        Ok(Family::new(proj))
                    }
                }
            }
            (None, Some(proj)) => {
                let base = def.base.as_ref().ok_or_else(|| malformed(kind, name, "`proj` needs a `base`"))?;
                let base = self.set(kind, name, base)?;
                let total = match &def.total {
                    Some(t) => self.set(kind, name, t)?,
                    None => FinSet::new(proj.len()),
                };
                let proj = FinMap::new(total, base, proj.clone()).map_err(invalid(kind, name))?;
                Ok(Family::new(proj))
            }
            _ => Err(malformed(kind, name, "give exactly one of `fibers` or `proj`")),
        }
    }

    fn diagram(&self, name: &str, def: &DiagramDef) -> Result<PolyDiagram, DocError> {
        let kind = "diagram";
        let tables = def.input_of.is_some() || def.shape_of.is_some() || def.output_of.is_some();
        match (tables, &def.listing, &def.monomials) {
            (true, None, None) => {
                let (Some(n), Some(d), Some(a)) = (&def.input_of, &def.shape_of, &def.output_of) else {
                    return Err(malformed(kind, name, "the table form needs `input_of`, `shape_of` and `output_of`"));
                };
                let i = self.set(kind, name, def.inputs.as_ref().ok_or_else(|| malformed(kind, name, "missing `inputs`"))?)?;
                let j = self.set(kind, name, def.outputs.as_ref().ok_or_else(|| malformed(kind, name, "missing `outputs`"))?)?;
                let shapes = match &def.shapes {
                    Some(s) => self.set(kind, name, s)?,
                    None => FinSet::new(a.len()),
                };
                let dirs = match &def.directions {
                    Some(s) => self.set(kind, name, s)?,
                    None => FinSet::new(n.len()),
                };
                let input_of = FinMap::new(dirs.clone(), i, n.clone()).map_err(invalid(kind, name))?;
                let shape_of = FinMap::new(dirs, shapes.clone(), d.clone()).map_err(invalid(kind, name))?;
                let output_of = FinMap::new(shapes, j, a.clone()).map_err(invalid(kind, name))?;
                PolyDiagram::new(input_of, shape_of, output_of).map_err(invalid(kind, name))
            }
            (false, Some(listing), None) => {
                if def.shapes.is_some() || def.directions.is_some() {
                    return Err(malformed(kind, name, "`shapes` and `directions` belong to the table form"));
                }
                let i = self.set(kind, name, def.inputs.as_ref().unwrap_or(&SetDef::Size(1)))?;
                let j = self.set(kind, name, def.outputs.as_ref().unwrap_or(&SetDef::Size(1)))?;
                let shapes: Vec<(usize, Vec<usize>)> = listing.iter().map(|s| (s.output, s.inputs.clone())).collect();
                let p = PolyDiagram::from_shapes(i.size(), j.size(), &shapes).map_err(invalid(kind, name))?;
                if i.labels().is_none() && j.labels().is_none() {
                    return Ok(p);
                }
                let input_of = FinMap::new(p.directions().clone(), i, p.input_of().table().to_vec()).map_err(invalid(kind, name))?;
                let output_of = FinMap::new(p.shapes().clone(), j, p.output_of().table().to_vec()).map_err(invalid(kind, name))?;
                PolyDiagram::new(input_of, p.shape_of().clone(), output_of).map_err(invalid(kind, name))
            }
            (false, None, Some(terms)) => {
                if def.inputs.is_some() || def.outputs.is_some() || def.shapes.is_some() || def.directions.is_some() {
                    return Err(malformed(kind, name, "`monomials` describe a single-sorted diagram; drop the carriers"));
                }
                let count: u128 = terms.iter().map(|&(c, e)| c as u128 * (1 + e as u128)).sum();
                polycat_core::guard::check(count).map_err(invalid(kind, name))?;
                Ok(PolyDiagram::monomials(terms))
            }
            _ => Err(malformed(kind, name, "give exactly one of the table form, `listing` or `monomials`")),
        }
    }
}

fn invalid<'a>(kind: &'static str, name: &'a str) -> impl FnOnce(CoreError) -> DocError + 'a {
    move |source| DocError::Invalid { kind, name: name.to_string(), source }
}

fn reference(kind: &'static str, name: &str, target: &str) -> DocError {
    DocError::Reference { kind, name: name.to_string(), target: target.to_string() }
}

fn malformed(kind: &'static str, name: &str, message: &str) -> DocError {
    DocError::Malformed { kind, name: name.to_string(), message: message.to_string() }
}
