//! Seeded random instances. The same seed always gives the same stream.

use polycat_core::sim::{enumerate_sims, Span};
use polycat_core::{Family, FinMap, PolyDiagram, Result, SimCell};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size limits for generated diagrams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub inputs: usize,
    pub outputs: usize,
    pub shapes: usize,
    pub fiber: usize,
}

impl Bounds {
    pub const fn single(shapes: usize, fiber: usize) -> Self {
        Bounds { inputs: 1, outputs: 1, shapes, fiber }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `lo..=hi`.
    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.rng.random_range(0..items.len())])
        }
    }

    /// A map `dom → cod`; `cod` must be positive unless `dom` is zero.
    pub fn map(&mut self, dom: usize, cod: usize) -> FinMap {
        let table = (0..dom).map(|_| self.rng.random_range(0..cod)).collect();
        FinMap::from_table(cod, table).expect("entries below cod")
    }

    pub fn family(&mut self, base: usize, max_fiber: usize) -> Family {
        let sizes: Vec<usize> = (0..base).map(|_| self.size(0, max_fiber)).collect();
        Family::from_fiber_sizes(&sizes)
    }

    /// A diagram with exactly the given input and output counts and at least one shape.
    pub fn diagram_on(&mut self, inputs: usize, outputs: usize, b: Bounds) -> PolyDiagram {
        let n = if outputs == 0 { 0 } else { self.size(1, b.shapes.max(1)) };
        let shapes: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|_| {
                let out = self.rng.random_range(0..outputs);
                let k = if inputs == 0 { 0 } else { self.size(0, b.fiber) };
                (out, (0..k).map(|_| self.rng.random_range(0..inputs)).collect())
            })
            .collect();
        PolyDiagram::from_shapes(inputs, outputs, &shapes).expect("generated indices in range")
    }

    /// A diagram with `1..=b.inputs` inputs and `1..=b.outputs` outputs.
    pub fn diagram(&mut self, b: Bounds) -> PolyDiagram {
        let i = self.size(1, b.inputs.max(1));
        let j = self.size(1, b.outputs.max(1));
        self.diagram_on(i, j, b)
    }

    pub fn endo(&mut self, b: Bounds) -> PolyDiagram {
        let i = self.size(1, b.inputs.max(1));
        self.diagram_on(i, i, b)
    }

    pub fn single(&mut self, shapes: usize, fiber: usize) -> PolyDiagram {
        self.diagram_on(1, 1, Bounds::single(shapes, fiber))
    }

    pub fn span(&mut self, i1: usize, i2: usize, max_states: usize) -> Span {
        let n = if i1 == 0 || i2 == 0 { 0 } else { self.size(0, max_states) };
        Span::new(self.map(n, i1), self.map(n, i2)).expect("same apex")
    }

    /// A uniformly chosen valid cell `p1 → p2` with at most `max_states` states.
    pub fn sim(&mut self, p1: &PolyDiagram, p2: &PolyDiagram, max_states: usize) -> Result<Option<SimCell>> {
        let cells = enumerate_sims(p1, p2, max_states)?;
        Ok(self.pick(&cells).cloned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let b = Bounds { inputs: 3, outputs: 3, shapes: 3, fiber: 3 };
        let mut g1 = Gen::new(7);
        let mut g2 = Gen::new(7);
        for _ in 0..20 {
            assert_eq!(g1.diagram(b), g2.diagram(b));
            assert_eq!(g1.family(2, 3), g2.family(2, 3));
        }
    }

    #[test]
    fn respects_bounds() {
        let b = Bounds { inputs: 2, outputs: 3, shapes: 2, fiber: 2 };
        let mut g = Gen::new(1);
        for _ in 0..100 {
            let p = g.diagram(b);
            assert!(p.inputs().size() <= 2 && p.outputs().size() <= 3);
            assert!((1..=2).contains(&p.shapes().size()));
            assert!(p.shapes().elements().all(|v| p.directions_of(v).len() <= 2));
        }
    }
}
