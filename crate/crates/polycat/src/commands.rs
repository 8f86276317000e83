//! Subcommands of the `polycat` binary. Each returns its report as text.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use polycat_core::nat::{count_nat, DiagMorphism};
use polycat_core::poly::{
    bang_truncated, compose_direct, compose_structural, dualize, eval_extension, hom_single_sorted, iso_check, plus,
    tensor,
};
use polycat_core::sim::{compose_sim, eval_sim};
use polycat_core::smcc::{curry, double_dual_report, uncurry, DayOracle};
use polycat_core::{guard, PolyDiagram};

use crate::doc::{Document, Model, Morphism, Simulation};
use crate::error::Failure;
use crate::suites;

#[derive(Debug, Parser)]
#[command(name = "polycat", version, about = "Polynomial functors over finite sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Emit {
    /// Print the result as a document instead of a summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fiber sizes of ⟦p⟧(x).
    Eval {
        doc: PathBuf,
        /// Defaults to the only diagram of the document.
        diagram: Option<String>,
        /// Defaults to the only family of the document.
        family: Option<String>,
    },
    /// q ∘ p.
    Compose {
        doc: PathBuf,
        outer: String,
        inner: String,
        #[arg(long, conflicts_with_all = ["direct", "both"])]
        structural: bool,
        #[arg(long, conflicts_with = "both")]
        direct: bool,
        /// Build both and check that they are isomorphic.
        #[arg(long)]
        both: bool,
        #[command(flatten)]
        emit: Emit,
    },
    /// p ⊗ q.
    Tensor {
        doc: PathBuf,
        p: String,
        q: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// p ⊕ q.
    Plus {
        doc: PathBuf,
        p: String,
        q: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// p ⊸ q for single-sorted diagrams.
    Hom {
        doc: PathBuf,
        p: String,
        q: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// !p truncated at lists of length `depth`.
    Bang {
        doc: PathBuf,
        p: String,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        emit: Emit,
    },
    /// p ⊸ ⊥.
    Dual {
        doc: PathBuf,
        p: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// Number of container morphisms p ⇒ q.
    CountNat { doc: PathBuf, p: String, q: String },
    /// Looks for an isomorphism p ≅ q.
    IsoCheck { doc: PathBuf, p: String, q: String },
    /// Validates simulation cells (all of them by default).
    SimValidate { doc: PathBuf, names: Vec<String> },
    /// second ∘ first.
    SimCompose {
        doc: PathBuf,
        second: String,
        first: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// The component of a simulation at a family.
    SimEval { doc: PathBuf, sim: String, family: String },
    /// Transposes m : p1 ⊗ p2 ⇒ p3 to p1 ⇒ (p2 ⊸ p3).
    Curry {
        doc: PathBuf,
        morphism: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[command(flatten)]
        emit: Emit,
    },
    /// Runs a law suite on seeded random instances.
    CheckLaws {
        /// Extra diagrams to check unit laws on.
        doc: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Compares the coend over {0..skeleton} with ⟦p1 ⊗ p2⟧(x).
    DayOracle {
        doc: PathBuf,
        p1: String,
        p2: String,
        family: String,
        #[arg(long)]
        skeleton: usize,
    },
    /// P = a·X^b against its double dual.
    DoubleDual {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

/// Applies `POLYCAT_GUARD` if set.
pub fn configure_guard(value: Option<&str>) -> Result<(), Failure> {
    if let Some(v) = value {
        let limit = v.trim().parse::<u64>().map_err(|_| Failure::Parse(format!("POLYCAT_GUARD must be a number, got `{v}`")))?;
        guard::set_limit(limit);
    }
    Ok(())
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?
    };
    Ok(Document::parse(&text)?.resolve()?)
}

fn only<'a, T>(entries: &'a BTreeMap<String, T>, kind: &str, name: Option<&str>) -> Result<(&'a str, &'a T), Failure> {
    match name {
        Some(n) => entries
            .get_key_value(n)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Failure::Parse(format!("no {kind} named `{n}`"))),
        None if entries.len() == 1 => {
            let (k, v) = entries.iter().next().expect("one entry");
            Ok((k.as_str(), v))
        }
        None => Err(Failure::Parse(format!("name a {kind}: the document has {}", entries.len()))),
    }
}

fn summary(name: &str, p: &PolyDiagram) -> String {
    format!(
        "{name} = {p}\n|I| = {}, |D| = {}, |A| = {}, |J| = {}\n",
        p.inputs().size(),
        p.directions().size(),
        p.shapes().size(),
        p.outputs().size()
    )
}

fn emit_diagram(p: &PolyDiagram, emit: &Emit) -> String {
    if emit.json {
        let mut model = Model::default();
        model.diagrams.insert("result".to_string(), p.clone());
        model.to_document().to_json() + "\n"
    } else {
        summary("result", p)
    }
}

pub fn run(command: Command) -> Result<String, Failure> {
    let mut out = String::new();
    match command {
        Command::Eval { doc, diagram, family } => {
            let m = load(&doc)?;
            let (pn, p) = only(&m.diagrams, "diagram", diagram.as_deref())?;
            let (xn, x) = only(&m.families, "family", family.as_deref())?;
            let ext = eval_extension(p, x)?;
            let sizes = ext.family().fiber_sizes();
            writeln!(out, "⟦{pn}⟧({xn})").unwrap();
            for (j, s) in sizes.iter().enumerate() {
                writeln!(out, "fiber {j}: {s}").unwrap();
            }
            writeln!(out, "total: {}", ext.len()).unwrap();
        }
        Command::Compose { doc, outer, inner, structural, direct: _, both, emit } => {
            let m = load(&doc)?;
            let (q, p) = (m.diagram(&outer)?, m.diagram(&inner)?);
            if both {
                let d = compose_direct(q, p)?.diagram;
                let s = compose_structural(q, p)?;
                let iso = iso_check(&s, &d)?;
                if emit.json {
                    out.push_str(&emit_diagram(&d, &emit));
                } else {
                    out.push_str(&summary("direct", &d));
                    out.push_str(&summary("structural", &s));
                }
                match iso {
                    Some(w) if w.verify(&s, &d) => writeln!(out, "structural ≅ direct : ISO").unwrap(),
                    _ => return Err(Failure::Law(format!("structural and direct composites of {outer} ∘ {inner} are not isomorphic"))),
                }
            } else if structural {
                out.push_str(&emit_diagram(&compose_structural(q, p)?, &emit));
            } else {
                out.push_str(&emit_diagram(&compose_direct(q, p)?.diagram, &emit));
            }
        }
        Command::Tensor { doc, p, q, emit } => {
            let m = load(&doc)?;
            out.push_str(&emit_diagram(&tensor(m.diagram(&p)?, m.diagram(&q)?), &emit));
        }
        Command::Plus { doc, p, q, emit } => {
            let m = load(&doc)?;
            out.push_str(&emit_diagram(&plus(m.diagram(&p)?, m.diagram(&q)?), &emit));
        }
        Command::Hom { doc, p, q, emit } => {
            let m = load(&doc)?;
            out.push_str(&emit_diagram(&hom_single_sorted(m.diagram(&p)?, m.diagram(&q)?)?.diagram, &emit));
        }
        Command::Bang { doc, p, depth, emit } => {
            let m = load(&doc)?;
            let bang = bang_truncated(m.diagram(&p)?, depth)?;
            out.push_str(&emit_diagram(&bang.diagram, &emit));
            if !emit.json {
                for (k, ms) in bang.multisets.iter().enumerate() {
                    writeln!(out, "output {k}: multiset {ms:?}").unwrap();
                }
            }
        }
        Command::Dual { doc, p, emit } => {
            let m = load(&doc)?;
            out.push_str(&emit_diagram(&dualize(m.diagram(&p)?)?, &emit));
        }
        Command::CountNat { doc, p, q } => {
            let m = load(&doc)?;
            writeln!(out, "{}", count_nat(m.diagram(&p)?, m.diagram(&q)?)?).unwrap();
        }
        Command::IsoCheck { doc, p, q } => {
            let m = load(&doc)?;
            match iso_check(m.diagram(&p)?, m.diagram(&q)?)? {
                Some(w) => {
                    writeln!(out, "ISO").unwrap();
                    writeln!(out, "shapes: {:?}", w.shapes.table()).unwrap();
                    writeln!(out, "directions: {:?}", w.directions).unwrap();
                }
                None => writeln!(out, "NOT ISO").unwrap(),
            }
        }
        Command::SimValidate { doc, names } => {
            // Loading already rejects invalid cells; this reports what was checked.
            let m = load(&doc)?;
            let names: Vec<String> = if names.is_empty() { m.simulations.keys().cloned().collect() } else { names };
            for n in names {
                let s = m.simulation(&n)?;
                if let Some(v) = s.cell.validate() {
                    return Err(Failure::Validation(format!("simulation `{n}`: {v}")));
                }
                writeln!(out, "{n}: {} → {}, {} states, {} pairs : VALID", s.src, s.dst, s.cell.span().apex.size(), s.cell.pairs().len())
                    .unwrap();
            }
        }
        Command::SimCompose { doc, second, first, emit } => {
            let m = load(&doc)?;
            let (c2, c1) = (m.simulation(&second)?, m.simulation(&first)?);
            let c = compose_sim(&c2.cell, &c1.cell)?;
            if emit.json {
                let mut model = Model::default();
                model.diagrams.insert(c1.src.clone(), c.src().clone());
                model.diagrams.insert(c2.dst.clone(), c.dst().clone());
                model.simulations.insert(
                    "result".to_string(),
                    Simulation { src: c1.src.clone(), dst: c2.dst.clone(), cell: c.clone() },
                );
                out.push_str(&(model.to_document().to_json() + "\n"));
            } else {
                let (alpha, beta, gamma) = c.tables();
                writeln!(out, "{second} ∘ {first} : {} → {}, {} states", c1.src, c2.dst, c.span().apex.size()).unwrap();
                writeln!(out, "alpha: {alpha:?}\nbeta: {beta:?}\ngamma: {gamma:?}").unwrap();
            }
        }
        Command::SimEval { doc, sim, family } => {
            let m = load(&doc)?;
            let (s, x) = (m.simulation(&sim)?, m.family(&family)?);
            let c = eval_sim(&s.cell, x)?;
            writeln!(out, "source fibers: {:?}", c.src().fiber_sizes()).unwrap();
            writeln!(out, "target fibers: {:?}", c.dst().fiber_sizes()).unwrap();
            writeln!(out, "map: {:?}", c.map().table()).unwrap();
        }
        Command::Curry { doc, morphism, left, right, emit } => {
            let m = load(&doc)?;
            let mo = m.morphism(&morphism)?;
            let (p1, p2) = (m.diagram(&left)?, m.diagram(&right)?);
            if mo.morphism.src() != &tensor(p1, p2) {
                return Err(Failure::Validation(format!("`{morphism}` does not start at {left} ⊗ {right}")));
            }
            let hom = hom_single_sorted(p2, mo.morphism.dst())?;
            let c = curry(&mo.morphism, p1, p2, &hom)?;
            if uncurry(&c, p2, mo.morphism.dst(), &hom)? != mo.morphism {
                return Err(Failure::Law(format!("uncurry ∘ curry is not the identity on `{morphism}`")));
            }
            out.push_str(&emit_morphism(&c, &left, &format!("{right}⊸{}", mo.dst), &emit));
        }
        Command::CheckLaws { doc, suite, seed, cases } => {
            if let Some(path) = doc {
                let m = load(&path)?;
                for (name, p) in &m.diagrams {
                    let checks = suites::check_diagram(name, p)?;
                    writeln!(out, "document {name}: {checks} checks, ok").unwrap();
                }
            }
            for r in suites::run(&suite, seed, cases)? {
                writeln!(out, "{r}").unwrap();
            }
        }
        Command::DayOracle { doc, p1, p2, family, skeleton } => {
            let m = load(&doc)?;
            let r = DayOracle::new(skeleton).check(m.diagram(&p1)?, m.diagram(&p2)?, m.family(&family)?)?;
            writeln!(out, "{r}").unwrap();
            if !r.agrees {
                return Err(Failure::Law(format!("coend of {p1}, {p2} at {family} disagrees with the tensor: {r}")));
            }
        }
        Command::DoubleDual { a, b } => {
            writeln!(out, "{}", double_dual_report(a, b)?).unwrap();
        }
    }
    Ok(out)
}

fn emit_morphism(m: &DiagMorphism, src: &str, dst: &str, emit: &Emit) -> String {
    if emit.json {
        let mut model = Model::default();
        model.diagrams.insert(src.to_string(), m.src().clone());
        model.diagrams.insert(dst.to_string(), m.dst().clone());
        model.morphisms.insert(
            "result".to_string(),
            Morphism { src: src.to_string(), dst: dst.to_string(), morphism: m.clone() },
        );
        model.to_document().to_json() + "\n"
    } else {
        format!("result : {src} ⇒ {dst}\nalpha: {:?}\nbeta: {:?}\n", m.alpha().table(), m.betas())
    }
}
