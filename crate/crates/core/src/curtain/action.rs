//! Partial graph automorphisms. Windows are not invariant under the group,
//! so an action may be undefined at some vertices.

/// Marker for an undefined image in [`VertexMap`].
const UNDEFINED: u32 = u32::MAX;

pub trait GraphAction {
    fn image(&self, v: u32) -> Option<u32>;
    fn preimage(&self, v: u32) -> Option<u32>;
}

/// Actions that can be raised to powers and composed without leaving their
/// own representation (a group element stays a group element, a table stays
/// a table).
pub trait ActionAlgebra: GraphAction + Sized {
    /// `self` applied `m` times.
    fn power(&self, m: u32) -> Self;
    /// Apply `self` first, then `next`.
    fn then(&self, next: &Self) -> Self;
}

/// A partial injective map stored as forward and backward tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    forward: Vec<u32>,
    backward: Vec<u32>,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        let t: Vec<u32> = (0..n as u32).collect();
        VertexMap {
            forward: t.clone(),
            backward: t,
        }
    }

    /// Builds from `f`, which returns `None` where the map is undefined.
    ///
    /// Panics if `f` is not injective or maps out of range.
    pub fn from_fn(n: usize, f: impl Fn(u32) -> Option<u32>) -> Self {
        let mut forward = vec![UNDEFINED; n];
        let mut backward = vec![UNDEFINED; n];
        for v in 0..n as u32 {
            if let Some(w) = f(v) {
                assert!((w as usize) < n, "image {w} out of range");
                assert_eq!(
                    backward[w as usize], UNDEFINED,
                    "map is not injective at {w}"
                );
                forward[v as usize] = w;
                backward[w as usize] = v;
            }
        }
        VertexMap { forward, backward }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn inverse(&self) -> Self {
        VertexMap {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }
}

fn lookup(t: &[u32], v: u32) -> Option<u32> {
    t.get(v as usize).copied().filter(|&w| w != UNDEFINED)
}

impl GraphAction for VertexMap {
    fn image(&self, v: u32) -> Option<u32> {
        lookup(&self.forward, v)
    }

    fn preimage(&self, v: u32) -> Option<u32> {
        lookup(&self.backward, v)
    }
}

impl ActionAlgebra for VertexMap {
    fn power(&self, m: u32) -> Self {
        let n = self.len();
        VertexMap::from_fn(n, |v| (0..m).try_fold(v, |x, _| self.image(x)))
    }

    fn then(&self, next: &Self) -> Self {
        VertexMap::from_fn(self.len(), |v| self.image(v).and_then(|w| next.image(w)))
    }
}
