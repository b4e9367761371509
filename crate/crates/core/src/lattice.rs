//! Integer models of unimodular lattices.
//!
//! A [`ScaledLattice`] stores an integer basis `B` of a sublattice `Λ ⊂ Z^n`
//! together with a scale `s`; the modeled lattice is `Λ / √s`, so the
//! inner product of two modeled vectors with coordinate rows `u`, `v` is
//! `(u, v) / s`. No rational arithmetic is ever needed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::ZkCode;
use crate::error::{Result, ZkError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeClass {
    /// The cubic lattice `Z^n`.
    Zn(usize),
    E8,
    /// `E8 ⊕ Z`, dimension 9.
    E8PlusZ,
}

impl LatticeClass {
    pub fn dim(&self) -> usize {
        match *self {
            LatticeClass::Zn(n) => n,
            LatticeClass::E8 => 8,
            LatticeClass::E8PlusZ => 9,
        }
    }

    /// Short tag used in files and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            LatticeClass::Zn(_) => "zn",
            LatticeClass::E8 => "e8",
            LatticeClass::E8PlusZ => "e8z",
        }
    }

    pub fn from_tag(tag: &str, n: usize) -> Result<LatticeClass> {
        let class = match tag {
            "zn" => LatticeClass::Zn(n),
            "e8" => LatticeClass::E8,
            "e8z" => LatticeClass::E8PlusZ,
            other => return Err(ZkError::Lattice(format!("unknown lattice tag {other:?}"))),
        };
        if class.dim() != n {
            return Err(ZkError::Lattice(format!(
                "lattice {} has dimension {}, not {n}",
                tag,
                class.dim()
            )));
        }
        Ok(class)
    }

    pub fn is_even(&self) -> bool {
        matches!(self, LatticeClass::E8)
    }

    /// Every unimodular lattice class of dimension `n` (`n <= 9`).
    pub fn all_of_dim(n: usize) -> Vec<LatticeClass> {
        let mut v = vec![LatticeClass::Zn(n)];
        match n {
            8 => v.push(LatticeClass::E8),
            9 => v.push(LatticeClass::E8PlusZ),
            _ => {}
        }
        v
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeClass::Zn(n) => write!(f, "Z^{n}"),
            LatticeClass::E8 => write!(f, "E8"),
            LatticeClass::E8PlusZ => write!(f, "E8+Z"),
        }
    }
}

impl FromStr for LatticeClass {
    type Err = ZkError;

    /// Parses `zn<N>`, `e8` or `e8z`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e8" => Ok(LatticeClass::E8),
            "e8z" => Ok(LatticeClass::E8PlusZ),
            _ => s
                .strip_prefix("zn")
                .and_then(|d| d.parse().ok())
                .map(LatticeClass::Zn)
                .ok_or_else(|| ZkError::Lattice(format!("cannot parse lattice {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledLattice {
    n: usize,
    scale: u32,
    basis: Vec<Vec<i64>>,
}

impl ScaledLattice {
    pub fn new(scale: u32, basis: Vec<Vec<i64>>) -> Result<ScaledLattice> {
        let n = basis.len();
        if scale == 0 {
            return Err(ZkError::Lattice("scale must be positive".into()));
        }
        if basis.iter().any(|r| r.len() != n) {
            return Err(ZkError::Lattice("basis must be square".into()));
        }
        let l = ScaledLattice { n, scale, basis };
        if l.determinant() == 0 {
            return Err(ZkError::Lattice("basis is singular".into()));
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn determinant(&self) -> i128 {
        let m: Vec<Vec<i128>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        bareiss_det(m)
    }

    /// Ambient inner product `(u, v)` before division by the scale.
    pub fn ambient_dot(u: &[i64], v: &[i64]) -> i64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Modeled inner product, `None` if `(u, v)` is not divisible by the scale.
    pub fn inner(&self, u: &[i64], v: &[i64]) -> Option<i64> {
        let d = Self::ambient_dot(u, v);
        (d % self.scale as i64 == 0).then(|| d / self.scale as i64)
    }

    /// Gram matrix of the modeled lattice, if integral.
    pub fn gram(&self) -> Option<Vec<Vec<i64>>> {
        let mut g = vec![vec![0; self.n]; self.n];
        for i in 0..self.n {
            for j in i..self.n {
                let x = self.inner(&self.basis[i], &self.basis[j])?;
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        Some(g)
    }

    pub fn is_unimodular(&self) -> bool {
        let d = self.determinant();
        let target = (self.scale as i128).checked_pow(self.n as u32);
        target.is_some_and(|t| d.checked_mul(d) == Some(t)) && self.gram().is_some()
    }

    /// Every basis vector has even norm. Assumes the lattice is integral.
    pub fn is_even(&self) -> bool {
        self.basis
            .iter()
            .all(|u| self.inner(u, u).is_some_and(|x| x % 2 == 0))
    }

    /// All lattice vectors of modeled norm exactly `norm`, in ambient
    /// coordinates, sorted lexicographically; closed under negation.
    pub fn short_vectors(&self, norm: i64) -> Result<Vec<Vec<i64>>> {
        let gram = self
            .gram()
            .ok_or_else(|| ZkError::Lattice("lattice is not integral".into()))?;
        let mut out: Vec<Vec<i64>> = fincke_pohst(&gram, norm)?
            .into_iter()
            .map(|c| self.to_ambient(&c))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Ambient coordinates of the lattice vector with basis coefficients `c`.
    pub fn to_ambient(&self, c: &[i64]) -> Vec<i64> {
        let mut v = vec![0i64; self.n];
        for (coef, row) in c.iter().zip(&self.basis) {
            if *coef != 0 {
                for (x, &b) in v.iter_mut().zip(row) {
                    *x += coef * b;
                }
            }
        }
        v
    }

    /// Lattice isomorphism class, for unimodular lattices of dimension at most 9.
    pub fn identify_class(&self) -> Result<LatticeClass> {
        if !self.is_unimodular() {
            return Err(ZkError::Lattice("not unimodular".into()));
        }
        match self.n {
            0..=7 => Ok(LatticeClass::Zn(self.n)),
            8 => Ok(if self.is_even() {
                LatticeClass::E8
            } else {
                LatticeClass::Zn(8)
            }),
            9 => match self.short_vectors(1)?.len() {
                18 => Ok(LatticeClass::Zn(9)),
                2 => Ok(LatticeClass::E8PlusZ),
                m => Err(ZkError::Lattice(format!(
                    "9-dimensional unimodular lattice with {m} unit vectors"
                ))),
            },
            n => Err(ZkError::LengthUnsupported(n, 9)),
        }
    }
}

/// Construction A: the lattice `{x in Z^n : x mod k in C} / √k`.
///
/// The basis lifts each Howell generator row and adds `k e_j` for every
/// non-pivot column, giving a triangular basis of the preimage.
pub fn construction_a(code: &ZkCode) -> Result<ScaledLattice> {
    if !code.is_self_dual() {
        return Err(ZkError::NotSelfDual);
    }
    let k = code.modulus();
    let n = code.length();
    let gen = code.generator();
    let pivots = gen.pivots();
    let mut basis = Vec::with_capacity(n);
    let mut next = 0;
    for c in 0..n {
        if next < pivots.len() && pivots[next].0 == c {
            basis.push(gen.row(next).iter().map(|&x| x as i64).collect());
            next += 1;
        } else {
            let mut row = vec![0i64; n];
            row[c] = k as i64;
            basis.push(row);
        }
    }
    ScaledLattice::new(k, basis)
}

/// Fixed reference model of each lattice class.
///
/// `Z^n` is the identity basis at scale 1. `E8` is modeled at scale 4 as
/// twice the usual half-integral coordinates (even coordinates or odd
/// coordinates, coordinate sum divisible by 4); `E8 ⊕ Z` appends `2 e_9`.
pub fn standard_lattice(class: LatticeClass) -> ScaledLattice {
    match class {
        LatticeClass::Zn(n) => {
            let basis = (0..n)
                .map(|i| (0..n).map(|j| (i == j) as i64).collect())
                .collect();
            ScaledLattice::new(1, basis).expect("identity basis")
        }
        LatticeClass::E8 => ScaledLattice::new(4, e8_doubled_basis()).expect("E8 basis"),
        LatticeClass::E8PlusZ => {
            let mut basis: Vec<Vec<i64>> = e8_doubled_basis()
                .into_iter()
                .map(|mut r| {
                    r.push(0);
                    r
                })
                .collect();
            let mut last = vec![0; 9];
            last[8] = 2;
            basis.push(last);
            ScaledLattice::new(4, basis).expect("E8+Z basis")
        }
    }
}

fn e8_doubled_basis() -> Vec<Vec<i64>> {
    let mut basis = Vec::with_capacity(8);
    let mut first = vec![0i64; 8];
    first[0] = 4;
    basis.push(first);
    for i in 0..6 {
        let mut r = vec![0i64; 8];
        r[i] = -2;
        r[i + 1] = 2;
        basis.push(r);
    }
    basis.push(vec![1; 8]);
    basis
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Integer coefficient vectors `c` with `c^T G c = norm`.
///
/// Enumerates the ellipsoid `c^T G c <= norm` coordinate by coordinate from
/// the last one, using the floating-point LDL decomposition for bounds and an
/// exact integer check on each candidate.
fn fincke_pohst(gram: &[Vec<i64>], norm: i64) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    if norm < 0 {
        return Ok(Vec::new());
    }
    // q[i][i] = d_i, q[i][j] = mu_ji for j > i so that
    // Q(x) = sum_i d_i (x_i + sum_{j>i} q[i][j] x_j)^2
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gram[i][j] as f64;
        }
    }
    for i in 0..n {
        if q[i][i] <= 0.0 {
            return Err(ZkError::Lattice("Gram matrix is not positive definite".into()));
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for a in i + 1..n {
            for b in a..n {
                q[a][b] -= q[a][i] * q[i][b];
            }
        }
    }
    let bound = norm as f64 + 1e-6;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    search_level(&q, gram, norm, n, bound, &mut x, &mut out);
    Ok(out)
}

fn search_level(
    q: &[Vec<f64>],
    gram: &[Vec<i64>],
    norm: i64,
    level: usize,
    remaining: f64,
    x: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if level == 0 {
        if exact_norm(gram, x) == norm {
            out.push(x.clone());
        }
        return;
    }
    let i = level - 1;
    let center: f64 = -(i + 1..q.len()).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let radius = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo = (center - radius - 1e-9).ceil() as i64;
    let hi = (center + radius + 1e-9).floor() as i64;
    for v in lo..=hi {
        let t = v as f64 - center;
        let rest = remaining - q[i][i] * t * t;
        if rest < -1e-6 {
            continue;
        }
        x[i] = v;
        search_level(q, gram, norm, i, rest, x, out);
    }
    x[i] = 0;
}

fn exact_norm(gram: &[Vec<i64>], x: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        for j in 0..x.len() {
            s += x[i] * gram[i][j] * x[j];
        }
    }
    s
}
