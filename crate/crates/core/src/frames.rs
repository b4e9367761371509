//! k-frames of unimodular lattices and their projection to self-dual codes.
//!
//! A k-frame of an n-dimensional lattice `L` is a set of `n` pairwise
//! orthogonal vectors of norm `k`. Projecting `L` through
//! `x ↦ ((x, f_i) mod k)_i` yields a self-dual `Z_k`-code whose
//! Construction A lattice is isometric to `L`, and every such code arises
//! this way. Frames in one orbit of `Aut(L)` give equivalent codes.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::code::ZkCode;
use crate::error::{Result, ZkError};
use crate::lattice::ScaledLattice;
use crate::linalg::ZkMatrix;

/// A k-frame, stored as an antipodal-set representative: every vector has a
/// positive first nonzero coordinate and the vectors are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    k: u32,
    vectors: Vec<Vec<i64>>,
}

impl Frame {
    pub fn new(k: u32, vectors: Vec<Vec<i64>>) -> Frame {
        let mut vectors: Vec<Vec<i64>> = vectors.into_iter().map(sign_normalized).collect();
        vectors.sort();
        Frame { k, vectors }
    }

    pub fn norm(&self) -> u32 {
        self.k
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Checks `(f_i, f_j) = k δ_ij` and membership in `l`.
    pub fn validate(&self, l: &ScaledLattice) -> Result<()> {
        let n = l.dim();
        if self.vectors.len() != n {
            return Err(ZkError::InvalidFrame(format!(
                "{} vectors in dimension {n}",
                self.vectors.len()
            )));
        }
        for (i, u) in self.vectors.iter().enumerate() {
            if u.len() != n {
                return Err(ZkError::InvalidFrame("vector of wrong length".into()));
            }
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let want = if i == j { self.k as i64 } else { 0 };
                if l.inner(u, v) != Some(want) {
                    return Err(ZkError::InvalidFrame(format!(
                        "(f_{i}, f_{j}) is not {want}"
                    )));
                }
            }
            // L is unimodular, hence self-dual: u is in L iff (u, b) is integral
            if l.basis().iter().any(|b| l.inner(u, b).is_none()) {
                return Err(ZkError::InvalidFrame(format!("f_{i} is not a lattice vector")));
            }
        }
        Ok(())
    }
}

fn sign_normalized(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// `π_F(L)`: the code spanned by `((b, f_i) mod k)_i` over a basis `b` of `l`.
pub fn project_frame(l: &ScaledLattice, f: &Frame) -> Result<ZkCode> {
    f.validate(l)?;
    let k = f.k;
    let rows: Vec<Vec<i64>> = l
        .basis()
        .iter()
        .map(|b| {
            f.vectors
                .iter()
                .map(|v| l.inner(b, v).expect("validated frame"))
                .collect()
        })
        .collect();
    Ok(ZkCode::from_matrix(&ZkMatrix::from_rows(k, l.dim(), &rows)?))
}

/// Antipodal classes of norm-k vectors.
fn norm_classes(l: &ScaledLattice, k: u32) -> Result<Vec<Vec<i64>>> {
    let mut classes: Vec<Vec<i64>> = l
        .short_vectors(k as i64)?
        .into_iter()
        .map(sign_normalized)
        .collect();
    classes.sort();
    classes.dedup();
    Ok(classes)
}

/// Every k-frame of `l` up to the signs of its vectors (not up to `Aut(L)`),
/// as the n-cliques of the orthogonality graph on antipodal classes of
/// norm-k vectors. Sorted.
pub fn enumerate_frames(l: &ScaledLattice, k: u32) -> Result<Vec<Frame>> {
    let classes = norm_classes(l, k)?;
    let n = l.dim();
    let m = classes.len();
    if m < n {
        return Ok(Vec::new());
    }
    let adj = Bitsets::orthogonality(&classes, |i, j| i < j);
    let mut frames: Vec<Frame> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let cand = adj.row(first).to_vec();
            let mut chosen = vec![first];
            adj.cliques(&cand, n - 1, &mut chosen, &|| true, &mut |c| {
                found.push(Frame::new(k, c.iter().map(|&i| classes[i].clone()).collect()));
            });
            found
        })
        .collect();
    frames.sort();
    Ok(frames)
}

/// Dense adjacency over a fixed vertex list, one bitset per vertex.
struct Bitsets {
    words: usize,
    bits: Vec<u64>,
}

impl Bitsets {
    fn orthogonality(vectors: &[Vec<i64>], keep: impl Fn(usize, usize) -> bool) -> Bitsets {
        let m = vectors.len();
        let words = m.div_ceil(64);
        let mut bits = vec![0u64; words * m];
        for i in 0..m {
            for j in i + 1..m {
                if ScaledLattice::ambient_dot(&vectors[i], &vectors[j]) == 0 {
                    if keep(i, j) {
                        bits[i * words + j / 64] |= 1 << (j % 64);
                    }
                    if keep(j, i) {
                        bits[j * words + i / 64] |= 1 << (i % 64);
                    }
                }
            }
        }
        Bitsets { words, bits }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Extends `chosen` by `need` more mutually adjacent vertices drawn from
    /// `cand`, each larger than the last, reporting every completed clique.
    /// Stops early once `live` returns false.
    fn cliques(
        &self,
        cand: &[u64],
        need: usize,
        chosen: &mut Vec<usize>,
        live: &impl Fn() -> bool,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if !live() {
            return;
        }
        if need == 0 {
            emit(chosen);
            return;
        }
        let count: u32 = cand.iter().map(|w| w.count_ones()).sum();
        if (count as usize) < need {
            return;
        }
        for (w, &word) in cand.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                let v = w * 64 + b;
                let next: Vec<u64> = cand
                    .iter()
                    .zip(self.row(v))
                    .enumerate()
                    .map(|(i, (&a, &r))| {
                        // only vertices after v
                        let mask = match i.cmp(&w) {
                            std::cmp::Ordering::Less => 0,
                            std::cmp::Ordering::Equal => {
                                if b == 63 {
                                    0
                                } else {
                                    !0u64 << (b + 1)
                                }
                            }
                            std::cmp::Ordering::Greater => !0,
                        };
                        a & r & mask
                    })
                    .collect();
                chosen.push(v);
                self.cliques(&next, need - 1, chosen, live, emit);
                chosen.pop();
            }
        }
    }
}

/// Frames of `l` covering every `Aut(L)`-orbit of k-frames at least once.
///
/// The automorphisms used are the reflections in vectors of norm 1 and 2,
/// which generate the full automorphism group of `Z^n`, `E8` and `E8 ⊕ Z`.
/// The search picks one orbit representative at each depth under the
/// pointwise stabilizer of the vectors chosen so far; that stabilizer is
/// generated by the reflections in roots orthogonal to them. Once no such
/// root remains the frame is completed by plain clique search.
pub fn frame_cover(l: &ScaledLattice, k: u32, deadline: Option<Instant>) -> Result<Vec<Frame>> {
    let classes = norm_classes(l, k)?;
    let n = l.dim();
    if classes.len() < n {
        return Ok(Vec::new());
    }
    let mut roots: Vec<Vec<i64>> = l.short_vectors(1)?;
    roots.extend(l.short_vectors(2)?);
    let mut roots: Vec<Vec<i64>> = roots.into_iter().map(sign_normalized).collect();
    roots.sort();
    roots.dedup();
    let search = CoverSearch {
        index: classes
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect(),
        root_norms: roots.iter().map(|r| ScaledLattice::ambient_dot(r, r)).collect(),
        roots,
        classes,
        n,
        k,
        deadline,
    };
    let all_cands: Vec<usize> = (0..search.classes.len()).collect();
    let all_roots: Vec<usize> = (0..search.roots.len()).collect();
    let reps = search.orbit_representatives(&all_cands, &all_roots)?;
    let parts: Vec<Result<Vec<Frame>>> = reps
        .par_iter()
        .map(|&rep| {
            let mut out = Vec::new();
            search.descend(&[], &all_cands, &all_roots, rep, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut frames = Vec::new();
    for p in parts {
        frames.extend(p?);
    }
    frames.sort();
    frames.dedup();
    Ok(frames)
}

struct CoverSearch {
    classes: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    roots: Vec<Vec<i64>>,
    root_norms: Vec<i64>,
    n: usize,
    k: u32,
    deadline: Option<Instant>,
}

impl CoverSearch {
    fn dot(&self, a: &[i64], b: &[i64]) -> i64 {
        ScaledLattice::ambient_dot(a, b)
    }

    fn reflect(&self, x: usize, r: usize) -> Option<usize> {
        let v = &self.classes[x];
        let root = &self.roots[r];
        let d = self.dot(v, root);
        if d == 0 {
            return None;
        }
        let c = 2 * d / self.root_norms[r];
        let y: Vec<i64> = v.iter().zip(root).map(|(a, b)| a - c * b).collect();
        Some(
            *self
                .index
                .get(&sign_normalized(y))
                .expect("reflection preserves norm-k vectors"),
        )
    }

    /// Least class index of each orbit of the group generated by `roots` on `cands`.
    fn orbit_representatives(&self, cands: &[usize], roots: &[usize]) -> Result<Vec<usize>> {
        if roots.is_empty() {
            return Ok(cands.to_vec());
        }
        let local: HashMap<usize, usize> = cands.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut parent: Vec<usize> = (0..cands.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, &c) in cands.iter().enumerate() {
            if i % 256 == 0 && self.expired() {
                return Err(ZkError::TimeExhausted(0.0));
            }
            for &r in roots {
                if let Some(img) = self.reflect(c, r) {
                    let j = local[&img];
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut reps: Vec<usize> = (0..cands.len())
            .filter(|&i| find(&mut parent, i) == i)
            .map(|i| cands[i])
            .collect();
        reps.sort_unstable();
        Ok(reps)
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }

    fn descend(
        &self,
        chosen: &[usize],
        cands: &[usize],
        roots: &[usize],
        pick: usize,
        out: &mut Vec<Frame>,
    ) -> Result<()> {
        if self.expired() {
            return Err(ZkError::TimeExhausted(0.0));
        }
        let v = &self.classes[pick];
        let mut chosen = chosen.to_vec();
        chosen.push(pick);
        let need = self.n - chosen.len();
        if need == 0 {
            out.push(self.frame(&chosen));
            return Ok(());
        }
        let cands: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|&c| c != pick && self.dot(&self.classes[c], v) == 0)
            .collect();
        if cands.len() < need {
            return Ok(());
        }
        let roots: Vec<usize> = roots
            .iter()
            .copied()
            .filter(|&r| self.dot(&self.roots[r], v) == 0)
            .collect();
        if roots.is_empty() {
            let local: Vec<Vec<i64>> = cands.iter().map(|&c| self.classes[c].clone()).collect();
            let adj = Bitsets::orthogonality(&local, |i, j| i < j);
            let mut all = vec![0u64; local.len().div_ceil(64)];
            for i in 0..local.len() {
                all[i / 64] |= 1 << (i % 64);
            }
            let mut picked = Vec::new();
            adj.cliques(&all, need, &mut picked, &|| !self.expired(), &mut |c| {
                let mut full = chosen.clone();
                full.extend(c.iter().map(|&i| cands[i]));
                out.push(self.frame(&full));
            });
            if self.expired() {
                return Err(ZkError::TimeExhausted(0.0));
            }
            return Ok(());
        }
        for rep in self.orbit_representatives(&cands, &roots)? {
            self.descend(&chosen, &cands, &roots, rep, out)?;
        }
        Ok(())
    }

    fn frame(&self, idx: &[usize]) -> Frame {
        Frame::new(self.k, idx.iter().map(|&i| self.classes[i].clone()).collect())
    }
}

/// The two 4x4 integer matrices on four variables used to build frames of `Z^4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdKind {
    /// The orthogonal design `OD(4; 1,1,1,1)`.
    M,
    /// Orthogonal only when `x1 x3 + x1 x4 - x2 x3 + x2 x4 = 0`.
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OdMatrix {
    pub kind: OdKind,
    pub x: [i64; 4],
}

impl OdMatrix {
    pub fn new(kind: OdKind, x: [i64; 4]) -> Self {
        OdMatrix { kind, x }
    }

    pub fn rows(&self) -> [[i64; 4]; 4] {
        let [a, b, c, d] = self.x;
        match self.kind {
            OdKind::M => [
                [a, b, c, d],
                [-b, a, -d, c],
                [-c, d, a, -b],
                [-d, -c, b, a],
            ],
            OdKind::N => [
                [a, b, c, d],
                [-b, a, -d, c],
                [d, -c, a, b],
                [c, d, -b, a],
            ],
        }
    }

    pub fn sum_of_squares(&self) -> i64 {
        self.x.iter().map(|v| v * v).sum()
    }

    /// `x1 x3 + x1 x4 - x2 x3 + x2 x4`.
    pub fn n_condition(&self) -> i64 {
        let [a, b, c, d] = self.x;
        a * c + a * d - b * c + b * d
    }

    /// `A A^T`.
    pub fn gram(&self) -> [[i64; 4]; 4] {
        let r = self.rows();
        let mut g = [[0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = (0..4).map(|t| r[i][t] * r[j][t]).sum();
            }
        }
        g
    }

    fn frame(&self, k: u32) -> Result<Frame> {
        if self.sum_of_squares() != k as i64 {
            return Err(ZkError::InvalidFrame(format!(
                "sum of squares of {:?} is {}, not {k}",
                self.x,
                self.sum_of_squares()
            )));
        }
        if self.kind == OdKind::N && self.n_condition() != 0 {
            return Err(ZkError::InvalidFrame(format!(
                "N{:?} is not orthogonal: condition value {}",
                self.x,
                self.n_condition()
            )));
        }
        Ok(Frame::new(k, self.rows().iter().map(|r| r.to_vec()).collect()))
    }
}

/// The frame of `Z^4` given by the rows of `M(x)`.
pub fn od_frame_m(x: [i64; 4], k: u32) -> Result<Frame> {
    OdMatrix::new(OdKind::M, x).frame(k)
}

/// The frame of `Z^4` given by the rows of `N(x)`, when that matrix is orthogonal.
pub fn od_frame_n(x: [i64; 4], k: u32) -> Result<Frame> {
    OdMatrix::new(OdKind::N, x).frame(k)
}

/// A 9-frame of `Z^4` lifted from a 9-frame of `Z^3`.
pub fn frame_f9() -> Frame {
    Frame::new(
        9,
        vec![
            vec![1, 2, 2, 0],
            vec![-2, -1, 2, 0],
            vec![-2, 2, -1, 0],
            vec![0, 0, 0, 3],
        ],
    )
}

/// A 21-frame of `Z^4` not arising from `M`.
pub fn frame_f21() -> Frame {
    Frame::new(
        21,
        vec![
            vec![4, 1, 0, 2],
            vec![0, -4, 1, 2],
            vec![1, 0, 4, -2],
            vec![-2, 2, 2, 3],
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{standard_lattice, LatticeClass};

    fn z(n: usize) -> ScaledLattice {
        standard_lattice(LatticeClass::Zn(n))
    }

    #[test]
    fn z2_norm2_has_one_frame() {
        let frames = enumerate_frames(&z(2), 2).unwrap();
        assert_eq!(frames, vec![Frame::new(2, vec![vec![1, 1], vec![1, -1]])]);
    }

    #[test]
    fn no_frames_without_vectors() {
        assert!(enumerate_frames(&z(1), 3).unwrap().is_empty());
        assert!(frame_cover(&z(1), 3, None).unwrap().is_empty());
    }

    #[test]
    fn f21_is_enumerated() {
        let frames = enumerate_frames(&z(4), 21).unwrap();
        assert!(frames.contains(&frame_f21()));
    }

    #[test]
    fn projection_examples() {
        let c = project_frame(&z(1), &Frame::new(4, vec![vec![2]])).unwrap();
        assert_eq!(c, ZkCode::from_generators(4, 1, &[[2]]).unwrap());
        let c = project_frame(&z(2), &Frame::new(2, vec![vec![1, 1], vec![1, -1]])).unwrap();
        assert_eq!(c, ZkCode::from_generators(2, 2, &[[1, 1]]).unwrap());
    }

    #[test]
    fn invalid_frames_rejected() {
        let bad = Frame::new(2, vec![vec![1, 1], vec![1, 0]]);
        assert!(project_frame(&z(2), &bad).is_err());
        // norm-1 vectors of scale-4 model are not lattice vectors of E8
        let e8 = standard_lattice(LatticeClass::E8);
        let mut v = vec![vec![0i64; 8]; 8];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 2;
        }
        assert!(Frame::new(1, v).validate(&e8).is_err());
    }

    #[test]
    fn od_frames() {
        for (x, k) in [([3, 0, 0, 0], 9), ([1, 1, 1, 1], 4), ([3, 2, 1, 1], 15)] {
            od_frame_m(x, k).unwrap().validate(&z(4)).unwrap();
        }
        od_frame_n([3, 1, 2, -1], 15).unwrap().validate(&z(4)).unwrap();
        assert!(od_frame_n([1, 1, 1, -1], 4).is_err());
        assert!(od_frame_m([1, 1, 1, 1], 5).is_err());
        frame_f9().validate(&z(4)).unwrap();
        frame_f21().validate(&z(4)).unwrap();
    }

    #[test]
    fn cover_is_subset_of_all_frames() {
        for k in [2, 5, 9, 10] {
            let all = enumerate_frames(&z(4), k).unwrap();
            let cover = frame_cover(&z(4), k, None).unwrap();
            assert!(!cover.is_empty());
            assert!(cover.iter().all(|f| all.binary_search(f).is_ok()), "k={k}");
        }
    }
}
