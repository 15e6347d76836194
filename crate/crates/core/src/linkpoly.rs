//! Link polynomials: multilinear descriptors of how N rings are linked.
//!
//! A polynomial is a set of monomials, each monomial a subset of the ring
//! variables stored as an N-bit mask. Setting a variable to zero (cutting
//! the ring) removes every monomial containing it. The construction rules:
//!
//! 1. no repeated terms (set semantics, no variable powers),
//! 2. every ring variable appears in at least one monomial,
//! 3. no first-order terms,
//! 4. relabeling of variables is irrelevant,
//! 5. a monomial is redundant if its variables are already connected by
//!    strictly smaller monomials over the same variables.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum ring count for which relabeling canonicalization is supported.
pub const MAX_RINGS: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkError {
    #[error("ring index {0} out of range for {1} rings")]
    RingOutOfRange(usize, usize),
    #[error("resistance m={m} out of range for n={n} rings (need 0 <= m <= n-2)")]
    ResistanceOutOfRange { n: usize, m: usize },
    #[error("ring count {0} unsupported (need 1..={MAX_RINGS})")]
    RingCountUnsupported(usize),
    #[error("unknown ring name {0:?} (expected a..z)")]
    BadRingName(String),
}

/// Connectivity of the surviving rings viewed as a hypergraph whose
/// hyperedges are the monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectivityStatus {
    FullyConnected,
    /// The partition of surviving rings into connected components
    /// (as bitmasks; isolated rings are singleton components).
    PartiallyConnected(Vec<u32>),
    FullyDisconnected,
}

/// A set of variable-subsets (monomials) over `rings` ring variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkPolynomial {
    rings: usize,
    monomials: BTreeSet<u32>,
    canonical: bool,
}

impl LinkPolynomial {
    /// Builds a polynomial from raw monomial masks. Duplicates and
    /// singletons are allowed here; `canonicalize` cleans them up.
    pub fn new(rings: usize, monomials: impl IntoIterator<Item = u32>) -> Result<Self, LinkError> {
        if rings == 0 || rings > MAX_RINGS {
            return Err(LinkError::RingCountUnsupported(rings));
        }
        let full = mask_full(rings);
        let monomials: BTreeSet<u32> = monomials.into_iter().collect();
        for &m in &monomials {
            if m & !full != 0 {
                return Err(LinkError::RingOutOfRange(
                    (31 - (m & !full).leading_zeros()) as usize,
                    rings,
                ));
            }
        }
        let mut p = Self {
            rings,
            monomials,
            canonical: false,
        };
        p.canonical = p.is_rule_clean();
        Ok(p)
    }

    /// Builds from index lists, e.g. `[[0,1],[1,2]]` for ab+bc.
    pub fn from_terms(rings: usize, terms: &[Vec<usize>]) -> Result<Self, LinkError> {
        let mut masks = Vec::with_capacity(terms.len());
        for t in terms {
            let mut m = 0u32;
            for &i in t {
                if i >= rings {
                    return Err(LinkError::RingOutOfRange(i, rings));
                }
                m |= 1 << i;
            }
            masks.push(m);
        }
        Self::new(rings, masks)
    }

    pub fn ring_count(&self) -> usize {
        self.rings
    }

    pub fn monomials(&self) -> impl Iterator<Item = u32> + '_ {
        self.monomials.iter().copied()
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// True when rules 1, 3, 5 hold with nothing to remove and every ring
    /// is covered (rule 2).
    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    fn is_rule_clean(&self) -> bool {
        let covered = self.monomials.iter().fold(0u32, |a, &m| a | m);
        if covered != mask_full(self.rings) {
            return false;
        }
        if self.monomials.iter().any(|m| m.count_ones() < 2) {
            return false;
        }
        !self
            .monomials
            .iter()
            .any(|&m| removable_by_rule5(m, &self.monomials))
    }

    /// Applies rules 1, 3 and the rule-5 fixpoint. Removal order does not
    /// affect the result (confluence is covered by tests).
    pub fn canonicalize(&self) -> LinkPolynomial {
        let mut set: BTreeSet<u32> = self
            .monomials
            .iter()
            .copied()
            .filter(|m| m.count_ones() >= 2)
            .collect();
        loop {
            // remove larger monomials first for a deterministic pass order
            let next = set
                .iter()
                .copied()
                .sorted_by_key(|m| std::cmp::Reverse(m.count_ones()))
                .find(|&m| removable_by_rule5(m, &set));
            match next {
                Some(m) => {
                    set.remove(&m);
                }
                None => break,
            }
        }
        let mut p = LinkPolynomial {
            rings: self.rings,
            monomials: set,
            canonical: false,
        };
        p.canonical = p.is_rule_clean();
        p
    }

    /// Cuts the given rings: removes every monomial containing any of them
    /// and re-canonicalizes. Ring count is unchanged; cut rings become
    /// isolated.
    pub fn cut(&self, rings: &[usize]) -> Result<LinkPolynomial, LinkError> {
        let mut cut_mask = 0u32;
        for &r in rings {
            if r >= self.rings {
                return Err(LinkError::RingOutOfRange(r, self.rings));
            }
            cut_mask |= 1 << r;
        }
        Ok(self.cut_mask(cut_mask))
    }

    pub fn cut_mask(&self, cut_mask: u32) -> LinkPolynomial {
        let remaining = self
            .monomials
            .iter()
            .copied()
            .filter(|m| m & cut_mask == 0);
        LinkPolynomial::new(self.rings, remaining)
            .expect("masks already validated")
            .canonicalize()
    }

    /// Component structure of the hypergraph restricted to `surviving`
    /// (a ring-index bitmask). Monomials touching non-surviving rings are
    /// ignored.
    pub fn connectivity(&self, surviving: u32) -> ConnectivityStatus {
        let edges: Vec<u32> = self
            .monomials
            .iter()
            .copied()
            .filter(|m| m & !surviving == 0)
            .collect();
        if edges.is_empty() {
            return ConnectivityStatus::FullyDisconnected;
        }
        let mut comps: Vec<u32> = Vec::new();
        let mut seen = 0u32;
        let mut v = surviving;
        while v != 0 {
            let bit = v & v.wrapping_neg();
            v &= v - 1;
            if seen & bit != 0 {
                continue;
            }
            let comp = grow_component(bit, &edges);
            seen |= comp;
            comps.push(comp);
        }
        if comps.len() == 1 && comps[0] == surviving {
            ConnectivityStatus::FullyConnected
        } else {
            ConnectivityStatus::PartiallyConnected(comps)
        }
    }

    /// The polynomial whose monomials are exactly all (n-m)-subsets:
    /// survives any m cuts fully connected, falls apart after m+1.
    pub fn generate_m_resistant(n: usize, m: usize) -> Result<LinkPolynomial, LinkError> {
        if n < 2 || n > MAX_RINGS {
            return Err(LinkError::RingCountUnsupported(n));
        }
        if m > n - 2 {
            return Err(LinkError::ResistanceOutOfRange { n, m });
        }
        let size = (n - m) as u32;
        let monomials = (0u32..1 << n).filter(|s| s.count_ones() == size);
        LinkPolynomial::new(n, monomials)
    }

    /// Returns `Some(m)` iff every cut of m rings leaves the survivors
    /// fully connected and every cut of m+1 rings fully disconnects them.
    pub fn is_m_resistant_link(&self) -> Option<usize> {
        let n = self.rings;
        let full = mask_full(n);
        if n < 2 {
            return None;
        }
        'cand: for m in 0..=n - 2 {
            for cut in subsets_of_size(n, m) {
                let p = self.cut_mask(cut);
                if p.connectivity(full & !cut) != ConnectivityStatus::FullyConnected {
                    continue 'cand;
                }
            }
            for cut in subsets_of_size(n, m + 1) {
                if !self.cut_mask(cut).is_empty() {
                    continue 'cand;
                }
            }
            return Some(m);
        }
        None
    }

    /// Lexicographically minimal sorted monomial-mask sequence over all
    /// ring relabelings.
    pub fn canonical_relabeling(&self) -> Vec<u32> {
        let n = self.rings;
        let mut best: Option<Vec<u32>> = None;
        for perm in (0..n).permutations(n) {
            let mut masks: Vec<u32> = self
                .monomials
                .iter()
                .map(|&m| permute_mask(m, &perm))
                .collect();
            masks.sort_unstable();
            if best.as_ref().is_none_or(|b| masks < *b) {
                best = Some(masks);
            }
        }
        best.unwrap_or_default()
    }
}

fn grow_component(start: u32, edges: &[u32]) -> u32 {
    let mut comp = start;
    loop {
        let mut changed = false;
        for &e in edges {
            if e & comp != 0 && e & !comp != 0 {
                comp |= e;
                changed = true;
            }
        }
        if !changed {
            return comp;
        }
    }
}

/// Rule 5: `m` is redundant when the strictly smaller monomials whose
/// variables lie inside `m` connect all of `m`'s variables.
fn removable_by_rule5(m: u32, set: &BTreeSet<u32>) -> bool {
    if m.count_ones() < 3 {
        return false;
    }
    let edges: Vec<u32> = set
        .iter()
        .copied()
        .filter(|&e| e != m && e & !m == 0)
        .collect();
    if edges.is_empty() {
        return false;
    }
    grow_component(m & m.wrapping_neg(), &edges) == m
}

fn mask_full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn permute_mask(m: u32, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    let mut v = m;
    while v != 0 {
        let i = v.trailing_zeros() as usize;
        v &= v - 1;
        out |= 1 << perm[i];
    }
    out
}

/// All bitmasks over n rings with exactly k bits set.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|s| s.count_ones() == k as u32).collect()
}

/// Census of link classes on `ring_count` rings, up to ring relabeling.
#[derive(Debug, Clone)]
pub struct LinkClassCensus {
    pub ring_count: usize,
    pub class_count: usize,
    pub representatives: Vec<LinkPolynomial>,
}

/// Enumerates all link classes on n rings: brute force over families of
/// size>=2 monomials, keeping canonical families (rules 2, 3, 5 hold with
/// no removals) whose hypergraph is one connected component, and
/// deduplicating under ring relabeling.
pub fn enumerate_classes(n: usize) -> LinkClassCensus {
    assert!((2..=5).contains(&n) || n <= MAX_RINGS, "ring count out of range");
    let full = mask_full(n);
    // candidates sorted by descending size so rule-5 rejection hits early
    let mut candidates: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() >= 2).collect();
    candidates.sort_unstable_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    let mc = candidates.len();
    assert!(mc <= 26, "family bitmask exceeds u64 budget for n > 5");

    // family bitmask (over candidate indices) of strict sub-monomials
    let sub: Vec<u64> = candidates
        .iter()
        .map(|&m| {
            candidates
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e != m && e & !m == 0)
                .fold(0u64, |a, (j, _)| a | (1 << j))
        })
        .collect();

    // candidate-index permutation tables for all ring relabelings
    let perms: Vec<Vec<usize>> = (0..n)
        .permutations(n)
        .map(|perm| {
            candidates
                .iter()
                .map(|&m| {
                    let pm = permute_mask(m, &perm);
                    candidates.iter().position(|&c| c == pm).unwrap()
                })
                .collect()
        })
        .collect();

    let total: u64 = 1 << mc;
    let chunk: u64 = 1 << 20;
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let classes: BTreeSet<u64> = starts
        .into_par_iter()
        .map(|start| {
            let mut local = BTreeSet::new();
            'fam: for family in start.max(1)..(start + chunk).min(total) {
                // rule 2: every ring covered
                let mut covered = 0u32;
                let mut v = family;
                while v != 0 {
                    covered |= candidates[v.trailing_zeros() as usize];
                    v &= v - 1;
                }
                if covered != full {
                    continue;
                }
                // a single component: two independently linked groups do
                // not count as one link
                if !family_connects(family, full, &candidates) {
                    continue;
                }
                // rule 5: nothing removable
                let mut v = family;
                while v != 0 {
                    let i = v.trailing_zeros() as usize;
                    v &= v - 1;
                    let s = family & sub[i];
                    if s != 0 && family_connects(s, candidates[i], &candidates) {
                        continue 'fam;
                    }
                }
                // minimal family mask over relabelings
                let mut best = family;
                for table in &perms {
                    let mut f = 0u64;
                    let mut v = family;
                    while v != 0 {
                        let i = v.trailing_zeros() as usize;
                        v &= v - 1;
                        f |= 1 << table[i];
                    }
                    best = best.min(f);
                }
                if best == family {
                    local.insert(family);
                }
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });

    let mut representatives: Vec<LinkPolynomial> = classes
        .iter()
        .map(|&family| {
            let masks: Vec<u32> = (0..mc)
                .filter(|i| family & (1 << i) != 0)
                .map(|i| candidates[i])
                .collect();
            let p = LinkPolynomial::new(n, masks).unwrap();
            LinkPolynomial::new(n, p.canonical_relabeling()).unwrap()
        })
        .collect();
    representatives.sort_by_key(|p| {
        (p.monomial_count(), p.monomials().collect::<Vec<_>>())
    });
    LinkClassCensus {
        ring_count: n,
        class_count: representatives.len(),
        representatives,
    }
}

fn family_connects(family: u64, target: u32, candidates: &[u32]) -> bool {
    let mut comp = target & target.wrapping_neg();
    loop {
        let mut changed = false;
        let mut v = family;
        while v != 0 {
            let e = candidates[v.trailing_zeros() as usize];
            v &= v - 1;
            if e & comp != 0 && e & !comp != 0 {
                comp |= e;
                changed = true;
            }
        }
        if comp == target {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"rings": 4, "terms": [["a","b","c"], ...]}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    rings: usize,
    terms: Vec<Vec<String>>,
}

impl LinkPolynomial {
    pub fn to_json(&self) -> serde_json::Value {
        let mut terms: Vec<Vec<String>> = self
            .monomials
            .iter()
            .map(|&m| {
                (0..self.rings)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| ring_name(i))
                    .collect()
            })
            .collect();
        terms.sort();
        serde_json::to_value(PolynomialJson {
            rings: self.rings,
            terms,
        })
        .unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LinkError> {
        let pj: PolynomialJson =
            serde_json::from_value(v.clone()).map_err(|e| LinkError::BadRingName(e.to_string()))?;
        // ring names map to indices in order of first appearance
        let mut order: Vec<char> = Vec::new();
        for term in &pj.terms {
            for name in term {
                let c = parse_ring_name(name)?;
                if !order.contains(&c) {
                    order.push(c);
                }
            }
        }
        if order.len() > pj.rings {
            return Err(LinkError::RingCountUnsupported(order.len()));
        }
        let terms: Vec<Vec<usize>> = pj
            .terms
            .iter()
            .map(|term| {
                term.iter()
                    .map(|name| {
                        let c = parse_ring_name(name).unwrap();
                        order.iter().position(|&o| o == c).unwrap()
                    })
                    .collect()
            })
            .collect();
        Self::from_terms(pj.rings, &terms)
    }

    /// Compact display like "ab+ac+bc".
    pub fn display_terms(&self) -> String {
        if self.monomials.is_empty() {
            return "0".to_string();
        }
        self.monomials
            .iter()
            .map(|&m| {
                (0..self.rings)
                    .filter(|i| m & (1 << i) != 0)
                    .map(ring_name)
                    .collect::<String>()
            })
            .join("+")
    }
}

fn ring_name(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

fn parse_ring_name(s: &str) -> Result<char, LinkError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok(c),
        _ => Err(LinkError::BadRingName(s.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(rings: usize, terms: &[&[usize]]) -> LinkPolynomial {
        let v: Vec<Vec<usize>> = terms.iter().map(|t| t.to_vec()).collect();
        LinkPolynomial::from_terms(rings, &v).unwrap()
    }

    #[test]
    fn canonicalize_drops_singletons_and_duplicates() {
        // {aab} == {ab} under set semantics with no powers
        let p = poly(2, &[&[0, 0, 1]]).canonicalize();
        assert_eq!(p.monomials().collect::<Vec<_>>(), vec![0b11]);
        let q = poly(2, &[&[0, 1], &[1, 0]]).canonicalize();
        assert_eq!(q.monomial_count(), 1);
    }

    #[test]
    fn rule5_removes_spanned_monomial() {
        // abc + ac + ab -> ac + ab
        let p = poly(3, &[&[0, 1, 2], &[0, 2], &[0, 1]]).canonicalize();
        assert_eq!(p.monomials().collect::<Vec<_>>(), vec![0b011, 0b101]);
    }

    #[test]
    fn rule5_keeps_unspanned_monomial() {
        // abc + ab: ab alone does not connect c
        let p = poly(3, &[&[0, 1, 2], &[0, 1]]).canonicalize();
        assert_eq!(p.monomial_count(), 2);
        assert!(p.is_canonical());
    }

    #[test]
    fn cut_examples() {
        let p = poly(3, &[&[0, 1], &[1, 2]]);
        let cut_a = p.cut(&[0]).unwrap();
        assert_eq!(cut_a.monomials().collect::<Vec<_>>(), vec![0b110]);
        let cut_b = p.cut(&[1]).unwrap();
        assert!(cut_b.is_empty());
        let idn = poly(3, &[&[0, 1, 2]]).cut(&[]).unwrap();
        assert_eq!(idn.monomial_count(), 1);
        assert_eq!(p.cut(&[7]), Err(LinkError::RingOutOfRange(7, 3)));
    }

    #[test]
    fn connectivity_examples() {
        let p = poly(3, &[&[0, 1], &[1, 2]]);
        assert_eq!(p.connectivity(0b111), ConnectivityStatus::FullyConnected);
        let q = poly(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(
            q.connectivity(0b1111),
            ConnectivityStatus::PartiallyConnected(vec![0b0011, 0b1100])
        );
        let e = LinkPolynomial::new(3, []).unwrap();
        assert_eq!(e.connectivity(0b111), ConnectivityStatus::FullyDisconnected);
    }

    #[test]
    fn generate_m_resistant_examples() {
        let p = LinkPolynomial::generate_m_resistant(3, 0).unwrap();
        assert_eq!(p.monomials().collect::<Vec<_>>(), vec![0b111]);
        let q = LinkPolynomial::generate_m_resistant(3, 1).unwrap();
        assert_eq!(q.monomial_count(), 3);
        let r = LinkPolynomial::generate_m_resistant(4, 2).unwrap();
        assert_eq!(r.monomial_count(), 6);
        assert!(LinkPolynomial::generate_m_resistant(3, 2).is_err());
    }

    #[test]
    fn resistance_of_generated_families() {
        for n in 2..=7 {
            for m in 0..=n - 2 {
                let p = LinkPolynomial::generate_m_resistant(n, m).unwrap();
                assert_eq!(p.is_m_resistant_link(), Some(m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn chain_is_not_resistant() {
        // ab+bc: cutting b fully disconnects, cutting a does not
        let p = poly(3, &[&[0, 1], &[1, 2]]);
        assert_eq!(p.is_m_resistant_link(), None);
    }

    #[test]
    fn cut_composition() {
        let p = poly(4, &[&[0, 1, 2], &[1, 2, 3], &[0, 3]]);
        let lhs = p.cut(&[0]).unwrap().cut(&[2]).unwrap();
        let rhs = p.cut(&[0, 2]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn census_small_counts() {
        assert_eq!(enumerate_classes(2).class_count, 1);
        let c3 = enumerate_classes(3);
        assert_eq!(c3.class_count, 4);
        // abc; ab+bc; ab+ac+bc; abc+ab (up to relabeling)
        let displays: Vec<String> = c3
            .representatives
            .iter()
            .map(|p| p.display_terms())
            .collect();
        assert!(displays.contains(&"abc".to_string()));
        assert!(displays.contains(&"ab+ac+bc".to_string()));
        assert_eq!(enumerate_classes(4).class_count, 40);
    }

    #[test]
    fn census_representatives_idempotent() {
        for p in enumerate_classes(4).representatives {
            assert!(p.is_canonical());
            let relabeled = p.canonical_relabeling();
            assert_eq!(relabeled, p.monomials().collect::<Vec<_>>());
        }
    }

    #[test]
    fn json_round_trip() {
        let p = poly(4, &[&[0, 1, 2], &[0, 1, 3]]);
        let v = p.to_json();
        let q = LinkPolynomial::from_json(&v).unwrap();
        assert_eq!(p, q);
    }
}
