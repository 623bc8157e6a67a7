//! Dense bitset and boolean-matrix primitives.
//!
//! Belief states are bitvectors over a fixed state universe, and accessibility
//! relations are n×n boolean adjacency matrices; belief update is a boolean
//! vector–matrix product. Everything here is plain word-level bit twiddling.

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Mask selecting the valid bits of the last word of an `n`-bit vector.
fn tail_mask(n: usize) -> u64 {
    match n % WORD {
        0 => !0,
        k => (1u64 << k) - 1,
    }
}

/// A set of state ids drawn from a fixed universe `0..universe`, stored as a
/// dense bitvector. Unused tail bits are kept zero so that derived equality
/// and hashing are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    /// The empty set over `0..universe`.
    pub fn new(universe: usize) -> Self {
        StateSet {
            universe,
            words: vec![0; words_for(universe)],
        }
    }

    /// The full set `{0, …, universe-1}`.
    pub fn full(universe: usize) -> Self {
        let mut words = vec![!0u64; words_for(universe)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(universe);
        }
        StateSet { universe, words }
    }

    /// A one-element set.
    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = Self::new(universe);
        s.insert(i);
        s
    }

    /// Collects the given ids into a set.
    pub fn from_iter(universe: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(universe);
        for i in ids {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.universe);
        self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    /// The smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterates members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + b)
                }
            })
        })
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Set complement within the universe.
    pub fn complement(&self) -> StateSet {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.universe);
        }
        StateSet {
            universe: self.universe,
            words,
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Image of the set under a relation: the boolean vector–matrix product
    /// `{t | ∃s ∈ self. (s,t) ∈ rel}`.
    pub fn image(&self, rel: &Relation) -> StateSet {
        debug_assert_eq!(self.universe, rel.n);
        let mut out = StateSet::new(self.universe);
        for s in self.iter() {
            out.or_row(rel, s);
        }
        out
    }

    /// ORs row `s` of `rel` into this set.
    fn or_row(&mut self, rel: &Relation, s: usize) {
        let row = rel.row(s);
        for (a, b) in self.words.iter_mut().zip(row) {
            *a |= b;
        }
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An n×n boolean adjacency matrix, row-major with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    row_words: usize,
    words: Vec<u64>,
}

impl Relation {
    /// The empty relation on `n` states.
    pub fn new(n: usize) -> Self {
        let row_words = words_for(n);
        Relation {
            n,
            row_words,
            words: vec![0; n * row_words],
        }
    }

    /// The identity relation.
    pub fn identity(n: usize) -> Self {
        let mut r = Self::new(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    /// The subidentity `{(s,s) | s ∈ on}`.
    pub fn diagonal(on: &StateSet) -> Self {
        let mut r = Self::new(on.universe());
        for i in on.iter() {
            r.insert(i, i);
        }
        r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.row_words..(i + 1) * self.row_words]
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.n && j < self.n);
        self.words[i * self.row_words + j / WORD] |= 1 << (j % WORD);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        self.words[i * self.row_words + j / WORD] & (1 << (j % WORD)) != 0
    }

    /// The successor set of state `i` (row `i` as a set).
    pub fn successors(&self, i: usize) -> StateSet {
        StateSet {
            universe: self.n,
            words: self.row(i).to_vec(),
        }
    }

    pub fn has_successor(&self, i: usize) -> bool {
        self.row(i).iter().any(|&w| w != 0)
    }

    /// The set of states with at least one successor.
    pub fn source_set(&self) -> StateSet {
        StateSet::from_iter(self.n, (0..self.n).filter(|&i| self.has_successor(i)))
    }

    pub fn union_with(&mut self, other: &Relation) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Boolean matrix product: `(self ∘ other)(i,k) ⇔ ∃j. self(i,j) ∧ other(j,k)`,
    /// i.e. first take a `self`-step, then an `other`-step.
    pub fn compose(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.n, other.n);
        let mut out = Relation::new(self.n);
        for i in 0..self.n {
            let mut word = self.row(i).to_vec();
            for (k, w) in word.iter_mut().enumerate() {
                let mut bits = *w;
                while bits != 0 {
                    let j = k * WORD + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let dst = &mut out.words[i * out.row_words..(i + 1) * out.row_words];
                    for (d, s) in dst.iter_mut().zip(other.row(j)) {
                        *d |= s;
                    }
                }
                *w = 0;
            }
        }
        out
    }

    /// Reflexive–transitive closure by iterative squaring: starting from
    /// `I ∪ R`, square until a fixpoint (O(log n) products).
    pub fn reflexive_transitive_closure(&self) -> Relation {
        let mut c = self.clone();
        c.union_with(&Relation::identity(self.n));
        loop {
            let next = c.compose(&c);
            if next == c {
                return c;
            }
            c = next;
        }
    }
}

impl std::fmt::Debug for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pairs: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| {
                self.successors(i)
                    .iter()
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect();
        f.debug_set().entries(pairs).finish()
    }
}
