use core::fmt;

/// A subset of the index set `{0, .., 63}` as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordSet(pub u64);

impl CoordSet {
    pub const EMPTY: CoordSet = CoordSet(0);

    pub fn full(width: usize) -> CoordSet {
        debug_assert!(width <= 64);
        if width == 64 {
            CoordSet(u64::MAX)
        } else {
            CoordSet((1u64 << width) - 1)
        }
    }

    pub fn from_fn(width: usize, mut f: impl FnMut(usize) -> bool) -> CoordSet {
        let mut s = CoordSet::EMPTY;
        for i in 0..width {
            if f(i) {
                s.insert(i);
            }
        }
        s
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn union(self, other: CoordSet) -> CoordSet {
        CoordSet(self.0 | other.0)
    }

    pub fn intersect(self, other: CoordSet) -> CoordSet {
        CoordSet(self.0 & other.0)
    }

    /// Complement relative to `all`.
    pub fn complement(self, all: CoordSet) -> CoordSet {
        CoordSet(all.0 & !self.0)
    }

    pub fn is_subset(self, other: CoordSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Every subset of a `width`-element index set, in bitmask order.
    pub fn all_subsets(width: usize) -> impl Iterator<Item = CoordSet> {
        assert!(width < 64, "index set too large to enumerate");
        (0..1u64 << width).map(CoordSet)
    }
}

impl FromIterator<usize> for CoordSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = CoordSet::EMPTY;
        iter.into_iter().for_each(|i| s.insert(i));
        s
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}
