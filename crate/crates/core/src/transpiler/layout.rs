use std::fmt;

/// Bijection between logical and physical qubit indices.
///
/// Both sides have the device size; logical indices past the circuit's
/// width are unused placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout {
    l2p: Vec<usize>,
    p2l: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAPermutation;

impl fmt::Display for NotAPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("layout is not a permutation")
    }
}

impl std::error::Error for NotAPermutation {}

impl Layout {
    pub fn identity(n: usize) -> Self {
        Layout {
            l2p: (0..n).collect(),
            p2l: (0..n).collect(),
        }
    }

    /// `l2p[l]` is the physical home of logical qubit `l`.
    pub fn from_logical_to_physical(l2p: Vec<usize>) -> Result<Self, NotAPermutation> {
        let mut p2l = vec![usize::MAX; l2p.len()];
        for (l, &p) in l2p.iter().enumerate() {
            if p >= l2p.len() || p2l[p] != usize::MAX {
                return Err(NotAPermutation);
            }
            p2l[p] = l;
        }
        Ok(Layout { l2p, p2l })
    }

    pub fn len(&self) -> usize {
        self.l2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l2p.is_empty()
    }

    #[inline]
    pub fn physical(&self, logical: usize) -> usize {
        self.l2p[logical]
    }

    #[inline]
    pub fn logical(&self, physical: usize) -> usize {
        self.p2l[physical]
    }

    pub fn logical_to_physical(&self) -> &[usize] {
        &self.l2p
    }

    pub fn physical_to_logical(&self) -> &[usize] {
        &self.p2l
    }

    /// Exchanges the logical qubits sitting on physical `a` and `b`.
    #[inline]
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.p2l.swap(a, b);
        self.l2p[la] = b;
        self.l2p[lb] = a;
    }
}
