//! Monomial equivalence of `Z_k`-codes.
//!
//! Two codes are equivalent when one is the image of the other under a
//! signed permutation of coordinates. Equivalence is decided through a
//! canonical form: among all images `C·P`, the one minimizing the sequence
//! `(H_1, ..., H_n)`, where `H_j` is the Howell form of the projection onto
//! the first `j` coordinates. `H_j` only depends on the images of the first
//! `j` coordinates, so the minimum is found by depth-first search with
//! prefix pruning. Coordinates are first partitioned by a monomial-invariant
//! column profile and only profile-respecting maps are searched.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::code::{sym_value, CodeType, SymWeightEnumerator, ZkCode};
use crate::error::{Result, ZkError};
use crate::linalg::{howell_form, ZkMatrix};

/// Longest code length the canonical form supports.
pub const MAX_CANONICAL_LENGTH: usize = 9;

/// Codes up to this size get codeword-level invariants.
pub const INVARIANT_BUDGET: u128 = 1_000_000;

/// A signed permutation acting on row vectors by
/// `(x·P)_{perm[i]} = signs[perm[i]] * x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialMap {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl MonomialMap {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<MonomialMap> {
        let n = perm.len();
        if signs.len() != n {
            return Err(ZkError::Dimension("perm and signs differ in length".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(ZkError::Dimension(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(ZkError::Dimension("signs must be ±1".into()));
        }
        Ok(MonomialMap { perm, signs })
    }

    pub fn identity(n: usize) -> MonomialMap {
        MonomialMap {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn apply_vector(&self, x: &[u32], k: u32) -> Vec<u32> {
        let mut y = vec![0; x.len()];
        for (i, &v) in x.iter().enumerate() {
            let j = self.perm[i];
            y[j] = if self.signs[j] < 0 && v != 0 { k - v } else { v };
        }
        y
    }

    /// The map `x ↦ (x·self)·other`.
    pub fn then(&self, other: &MonomialMap) -> MonomialMap {
        let n = self.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            let mid = self.perm[i];
            let end = other.perm[mid];
            perm[i] = end;
            signs[end] = other.signs[end] * self.signs[mid];
        }
        MonomialMap { perm, signs }
    }

    pub fn inverse(&self) -> MonomialMap {
        let n = self.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[i] = self.signs[self.perm[i]];
        }
        MonomialMap { perm, signs }
    }

    /// `(source column, negate)` for each output position.
    fn picks(&self) -> Vec<(usize, bool)> {
        let inv = self.inverse();
        (0..self.len())
            .map(|j| (inv.perm[j], self.signs[j] < 0))
            .collect()
    }
}

/// `C·P`.
pub fn apply(c: &ZkCode, p: &MonomialMap) -> Result<ZkCode> {
    if p.len() != c.length() {
        return Err(ZkError::Dimension(format!(
            "map of length {} on code of length {}",
            p.len(),
            c.length()
        )));
    }
    Ok(ZkCode::from_matrix(&c.generator().select_columns(&p.picks())))
}

/// Monomial-invariant description of one coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnProfile {
    /// Counts of `(symmetrized value here, Hamming weight, squared symmetrized weight)` over all codewords.
    Words(Vec<((u32, u32, u64), u64)>),
    /// Generator of the ideal the coordinate ranges over, for codes too large to enumerate.
    Ideal(u32),
}

pub fn column_profiles(c: &ZkCode) -> Vec<ColumnProfile> {
    let k = c.modulus();
    let n = c.length();
    let gen = c.generator();
    if c.size() > INVARIANT_BUDGET {
        return (0..n)
            .map(|j| {
                let g = gen
                    .rows()
                    .fold(k as u64, |g, r| crate::linalg::gcd(g, r[j] as u64));
                ColumnProfile::Ideal(g as u32)
            })
            .collect();
    }
    let mut maps: Vec<HashMap<(u32, u32, u64), u64>> = vec![HashMap::new(); n];
    for w in c.codewords() {
        let sym: Vec<u32> = w.iter().map(|&x| sym_value(x, k)).collect();
        let hw = sym.iter().filter(|&&s| s != 0).count() as u32;
        let ew: u64 = sym.iter().map(|&s| s as u64 * s as u64).sum();
        for (j, &s) in sym.iter().enumerate() {
            *maps[j].entry((s, hw, ew)).or_insert(0) += 1;
        }
    }
    maps.into_iter()
        .map(|m| {
            let mut v: Vec<_> = m.into_iter().collect();
            v.sort_unstable();
            ColumnProfile::Words(v)
        })
        .collect()
}

/// Invariants compared before any canonicalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeInvariants {
    pub size: u128,
    pub code_type: CodeType,
    pub columns: Vec<ColumnProfile>,
    pub swe: Option<SymWeightEnumerator>,
}

pub fn invariants(c: &ZkCode) -> CodeInvariants {
    let mut columns = column_profiles(c);
    columns.sort();
    CodeInvariants {
        size: c.size(),
        code_type: c.code_type(),
        columns,
        swe: c.symmetrized_weight_enumerator(INVARIANT_BUDGET).ok(),
    }
}

/// The canonical representative of the monomial class of `c`.
pub fn canonical_form(c: &ZkCode) -> Result<ZkCode> {
    canonical_form_with_map(c).map(|(code, _)| code)
}

/// The canonical representative and a map `P` with `c·P` equal to it.
pub fn canonical_form_with_map(c: &ZkCode) -> Result<(ZkCode, MonomialMap)> {
    let n = c.length();
    if n > MAX_CANONICAL_LENGTH {
        return Err(ZkError::LengthUnsupported(n, MAX_CANONICAL_LENGTH));
    }
    if n == 0 {
        return Ok((c.clone(), MonomialMap::identity(0)));
    }
    let k = c.modulus();
    let gen = c.generator();
    let profiles = column_profiles(c);
    let mut order: Vec<&ColumnProfile> = profiles.iter().collect();
    order.sort();
    let slots: Vec<Vec<usize>> = order
        .iter()
        .map(|p| (0..n).filter(|&j| &profiles[j] == *p).collect())
        .collect();
    let negatable: Vec<bool> = (0..n)
        .map(|j| gen.rows().any(|r| (2 * r[j]) % k != 0))
        .collect();
    let mut gens = Vec::new();
    if negatable.iter().any(|&x| x) {
        gens.push((0..n).map(|c| (c, true)).collect());
    }
    let mut search = Canon {
        gen,
        n,
        slots,
        negatable,
        best: vec![None; n],
        best_picks: Vec::new(),
        automorphisms: gens,
    };
    let mut picks = Vec::with_capacity(n);
    search.dfs(&mut picks, 0, false);
    let picks = search.best_picks;
    let h = search.best[n - 1].take().expect("search reaches a leaf");
    let mut perm = vec![0; n];
    let mut signs = vec![1i8; n];
    for (j, &(col, neg)) in picks.iter().enumerate() {
        perm[col] = j;
        signs[j] = if neg { -1 } else { 1 };
    }
    let map = MonomialMap { perm, signs };
    Ok((ZkCode::from_matrix(&h), map))
}

/// An automorphism of the code as `(target column, negate)` per source column.
type Automorphism = Vec<(usize, bool)>;

struct Canon<'a> {
    gen: &'a ZkMatrix,
    n: usize,
    slots: Vec<Vec<usize>>,
    /// Columns on which negation acts nontrivially.
    negatable: Vec<bool>,
    best: Vec<Option<ZkMatrix>>,
    best_picks: Vec<(usize, bool)>,
    automorphisms: Vec<Automorphism>,
}

impl Canon<'_> {
    fn normalize(&self, (c, neg): (usize, bool)) -> (usize, bool) {
        (c, neg && self.negatable[c])
    }

    fn image(&self, g: &Automorphism, (c, neg): (usize, bool)) -> (usize, bool) {
        let (t, flip) = g[c];
        self.normalize((t, neg ^ flip))
    }

    /// Branches equivalent under an automorphism fixing the prefix lead to
    /// identical subtrees; only the first of each orbit is explored.
    fn redundant(&self, picks: &[(usize, bool)], explored: &[(usize, bool)], opt: (usize, bool)) -> bool {
        if explored.is_empty() {
            return false;
        }
        let fixing: Vec<&Automorphism> = self
            .automorphisms
            .iter()
            .filter(|g| picks.iter().all(|&p| self.image(g, p) == p))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        let idx = |(c, neg): (usize, bool)| 2 * c + neg as usize;
        let mut parent: Vec<usize> = (0..2 * self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &fixing {
            for c in 0..self.n {
                for neg in [false, true] {
                    let a = idx(self.normalize((c, neg)));
                    let b = idx(self.image(g, (c, neg)));
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let root = find(&mut parent, idx(opt));
        explored.iter().any(|&e| find(&mut parent, idx(e)) == root)
    }

    /// `improved`: the current path already beats the best key on some prefix.
    /// Returns the depth to unwind to when a leaf equivalent to the best one
    /// shows that the enclosing subtree is an image of one already explored.
    fn dfs(&mut self, picks: &mut Vec<(usize, bool)>, used: u32, improved: bool) -> Option<usize> {
        let depth = picks.len();
        if depth == self.n {
            if improved || self.best_picks.is_empty() {
                self.best_picks = picks.clone();
                return None;
            }
            return self.record_automorphism(picks);
        }
        let mut explored: Vec<(usize, bool)> = Vec::new();
        for si in 0..self.slots[depth].len() {
            let c = self.slots[depth][si];
            if used >> c & 1 == 1 {
                continue;
            }
            let signs: &[bool] = if self.negatable[c] { &[false, true] } else { &[false] };
            for &neg in signs {
                let opt = (c, neg);
                if self.redundant(picks, &explored, opt) {
                    continue;
                }
                explored.push(opt);
                picks.push(opt);
                let h = howell_form(&self.gen.select_columns(picks));
                let step = match &self.best[depth] {
                    None => Some(true),
                    Some(b) => match h.cmp(b) {
                        Ordering::Less => Some(true),
                        Ordering::Equal => Some(improved),
                        Ordering::Greater => None,
                    },
                };
                let mut jump = None;
                if let Some(better) = step {
                    if self.best[depth].as_ref() != Some(&h) {
                        for slot in self.best[depth + 1..].iter_mut() {
                            *slot = None;
                        }
                        self.best[depth] = Some(h);
                    }
                    jump = self.dfs(picks, used | 1 << c, better);
                }
                picks.pop();
                if let Some(d) = jump {
                    if d < depth {
                        return jump;
                    }
                }
            }
        }
        None
    }

    /// Two leaves with equal keys `C·P1 = C·P2` give the automorphism `P2 P1^{-1}`.
    fn record_automorphism(&mut self, picks: &[(usize, bool)]) -> Option<usize> {
        let mut g = vec![(0, false); self.n];
        for (&(c2, s2), &(c1, s1)) in picks.iter().zip(&self.best_picks) {
            g[c2] = (c1, s1 ^ s2);
        }
        let diverge = picks.iter().zip(&self.best_picks).position(|(a, b)| a != b);
        if g.iter().enumerate().all(|(c, &(t, neg))| t == c && !(neg && self.negatable[c])) {
            return diverge;
        }
        debug_assert_eq!(
            howell_form(&self.gen.select_columns(&{
                let mut inv = vec![(0, false); self.n];
                for (c, &(t, neg)) in g.iter().enumerate() {
                    inv[t] = (c, neg);
                }
                inv
            })),
            *self.gen
        );
        self.automorphisms.push(g);
        diverge
    }
}

/// Whether `a` and `b` are monomially equivalent.
pub fn are_equivalent(a: &ZkCode, b: &ZkCode) -> Result<bool> {
    check_same_params(a, b)?;
    if a == b {
        return Ok(true);
    }
    if a.size() != b.size() || a.code_type() != b.code_type() {
        return Ok(false);
    }
    if invariants(a) != invariants(b) {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

fn check_same_params(a: &ZkCode, b: &ZkCode) -> Result<()> {
    if a.modulus() != b.modulus() {
        return Err(ZkError::ModulusMismatch(a.modulus(), b.modulus()));
    }
    if a.length() != b.length() {
        return Err(ZkError::Dimension(format!(
            "lengths {} and {} differ",
            a.length(),
            b.length()
        )));
    }
    Ok(())
}

/// One canonical representative per equivalence class, sorted.
pub fn dedupe(codes: &[ZkCode]) -> Result<Vec<ZkCode>> {
    if let Some(first) = codes.first() {
        for c in codes {
            check_same_params(first, c)?;
        }
    }
    let distinct: Vec<&ZkCode> = {
        let mut seen = HashSet::new();
        codes.iter().filter(|c| seen.insert(*c)).collect()
    };
    let canon: Vec<ZkCode> = distinct
        .par_iter()
        .map(|c| canonical_form(c))
        .collect::<Result<_>>()?;
    Ok(canon.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(k: u32, n: usize, rows: &[&[i64]]) -> ZkCode {
        ZkCode::from_generators(k, n, rows).unwrap()
    }

    #[test]
    fn identity_and_sign_flip() {
        let c = code(4, 1, &[&[2]]);
        assert_eq!(apply(&c, &MonomialMap::identity(1)).unwrap(), c);
        let flip = MonomialMap::new(vec![0], vec![-1]).unwrap();
        assert_eq!(apply(&c, &flip).unwrap(), c);
    }

    #[test]
    fn group_laws() {
        let p = MonomialMap::new(vec![2, 0, 1], vec![1, -1, -1]).unwrap();
        let q = MonomialMap::new(vec![1, 2, 0], vec![-1, 1, -1]).unwrap();
        assert_eq!(p.then(&p.inverse()), MonomialMap::identity(3));
        assert_eq!(p.inverse().then(&p), MonomialMap::identity(3));
        let x = [1, 2, 3];
        let lhs = p.then(&q).apply_vector(&x, 7);
        let rhs = q.apply_vector(&p.apply_vector(&x, 7), 7);
        assert_eq!(lhs, rhs);
        let c = code(7, 3, &[&[1, 2, 3]]);
        let pc = apply(&c, &p).unwrap();
        assert!(pc.contains(&p.apply_vector(&[1, 2, 3], 7)));
        assert_eq!(apply(&pc, &p.inverse()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(MonomialMap::new(vec![0, 0], vec![1, 1]).is_err());
        assert!(MonomialMap::new(vec![0, 1], vec![1, 2]).is_err());
        let c = code(4, 1, &[&[2]]);
        assert!(apply(&c, &MonomialMap::identity(2)).is_err());
    }

    #[test]
    fn canonical_map_realizes_form() {
        let c = code(5, 4, &[&[1, 2, 0, 0], &[0, 0, 1, 2]]);
        let (canon, p) = canonical_form_with_map(&c).unwrap();
        assert_eq!(apply(&c, &p).unwrap(), canon);
    }

    #[test]
    fn distinct_classes_stay_distinct() {
        let a = code(4, 2, &[&[2, 0], &[0, 2]]);
        let b = code(4, 2, &[&[1, 1], &[0, 2]]);
        assert!(!are_equivalent(&a, &b).unwrap());
        assert!(are_equivalent(&a, &a).unwrap());
    }

    #[test]
    fn dedupe_edge_cases() {
        assert!(dedupe(&[]).unwrap().is_empty());
        let a = code(4, 1, &[&[2]]);
        let b = code(5, 1, &[&[0]]);
        assert!(dedupe(&[a, b]).is_err());
    }

    #[test]
    fn length_budget() {
        let c = ZkCode::zero(2, 10).unwrap();
        assert!(matches!(canonical_form(&c), Err(ZkError::LengthUnsupported(10, 9))));
    }
}
