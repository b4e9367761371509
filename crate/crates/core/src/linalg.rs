//! Exact linear algebra over `Z_k`.
//!
//! Matrices hold entries reduced into `[0, k)`. The modulus is bounded by
//! [`MAX_MODULUS`] so that every product of two entries plus an accumulator
//! fits comfortably in a `u64`.
//!
//! The canonical representation of a submodule of `Z_k^n` is its Howell
//! normal form: an echelon generator matrix whose pivots divide `k`, whose
//! entries above each pivot are reduced modulo that pivot, and which has the
//! Howell property (for every `j`, the rows whose first `j` entries vanish
//! span every element of the module whose first `j` entries vanish). Two
//! matrices have the same row span iff their Howell forms are identical.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZkError};

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1000;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZkMatrix {
    k: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl ZkMatrix {
    /// Builds a matrix from rows of arbitrary integers, reducing each entry mod `k`.
    pub fn from_rows<R: AsRef<[i64]>>(k: u32, cols: usize, rows: &[R]) -> Result<Self> {
        check_modulus(k)?;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(ZkError::Dimension(format!(
                    "row of length {} in matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|&x| x.rem_euclid(k as i64) as u32));
        }
        Ok(ZkMatrix {
            k,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(k: u32, cols: usize, data: Vec<u32>) -> Self {
        debug_assert!(cols == 0 || data.len() % cols == 0);
        let rows = if cols == 0 { 0 } else { data.len() / cols };
        ZkMatrix { k, rows, cols, data }
    }

    pub fn zero(k: u32, rows: usize, cols: usize) -> Result<Self> {
        check_modulus(k)?;
        Ok(ZkMatrix {
            k,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    /// The matrix with no rows, representing the zero module of `Z_k^cols`.
    pub fn empty(k: u32, cols: usize) -> Result<Self> {
        Self::zero(k, 0, cols)
    }

    pub fn identity(k: u32, n: usize) -> Result<Self> {
        let mut m = Self::zero(k, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1 % k;
        }
        Ok(m)
    }

    pub fn modulus(&self) -> u32 {
        self.k
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> ZkMatrix {
        let mut data = vec![0; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.get(r, c);
            }
        }
        ZkMatrix {
            k: self.k,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Builds the matrix whose column `j` is `sign_j * self[:, col_j]` for each `(col_j, negate_j)`.
    pub fn select_columns(&self, picks: &[(usize, bool)]) -> ZkMatrix {
        let k = self.k;
        let mut data = Vec::with_capacity(self.rows * picks.len());
        for r in 0..self.rows {
            let row = self.row(r);
            for &(c, neg) in picks {
                let x = row[c];
                data.push(if neg && x != 0 { k - x } else { x });
            }
        }
        ZkMatrix {
            k,
            rows: self.rows,
            cols: picks.len(),
            data,
        }
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &ZkMatrix) -> Result<ZkMatrix> {
        if self.k != other.k {
            return Err(ZkError::ModulusMismatch(self.k, other.k));
        }
        if self.cols != other.cols {
            return Err(ZkError::Dimension(format!(
                "cannot stack {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(ZkMatrix::from_raw(self.k, self.cols, data))
    }

    /// Pivot `(column, value)` of each row; meaningful for echelon matrices.
    pub fn pivots(&self) -> Vec<(usize, u32)> {
        self.rows()
            .filter_map(|row| row.iter().position(|&x| x != 0).map(|c| (c, row[c])))
            .collect()
    }

    /// Flattened row-major comparison of entries; used for canonical ordering.
    pub fn cmp_entries(&self, other: &ZkMatrix) -> Ordering {
        self.data.cmp(&other.data)
    }
}

impl PartialOrd for ZkMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ZkMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then(self.cols.cmp(&other.cols))
            .then_with(|| self.data.cmp(&other.data))
    }
}

impl fmt::Debug for ZkMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZkMatrix(k={}, {:?})", self.k, self.to_rows())
    }
}

impl fmt::Display for ZkMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn check_modulus(k: u32) -> Result<()> {
    if (2..=MAX_MODULUS).contains(&k) {
        Ok(())
    } else {
        Err(ZkError::ModulusOutOfRange(k))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// A unit `u` of `Z_k` with `u * a ≡ gcd(a, k) (mod k)`, for `a != 0`.
fn normalizing_unit(a: u64, k: u64) -> u64 {
    let g = gcd(a, k);
    let (a1, k1) = (a / g, k / g);
    let base = if k1 == 1 {
        0
    } else {
        let (_, s, _) = xgcd(a1 as i64, k1 as i64);
        s.rem_euclid(k1 as i64) as u64
    };
    let mut u = base;
    while gcd(u, k) != 1 {
        u += k1;
    }
    u % k
}

/// Howell normal form of the row span of `m`, zero rows removed.
pub fn howell_form(m: &ZkMatrix) -> ZkMatrix {
    let k = m.k as u64;
    let n = m.cols;
    let mut rows: Vec<Vec<u64>> = m
        .rows()
        .filter(|r| r.iter().any(|&x| x != 0))
        .map(|r| r.iter().map(|&x| x as u64).collect())
        .collect();
    let mut r = 0;
    for c in 0..n {
        if r >= rows.len() {
            break;
        }
        for i in r + 1..rows.len() {
            let b = rows[i][c];
            if b == 0 {
                continue;
            }
            let a = rows[r][c];
            if a == 0 {
                rows.swap(r, i);
                continue;
            }
            let (g, s, t) = xgcd(a as i64, b as i64);
            let s = s.rem_euclid(k as i64) as u64;
            let t = t.rem_euclid(k as i64) as u64;
            let bg = (b / g as u64) % k;
            let ag = (k - (a / g as u64) % k) % k;
            let (top, bottom) = pair_mut(&mut rows, r, i);
            for j in c..n {
                let x = top[j];
                let y = bottom[j];
                top[j] = (s * x + t * y) % k;
                bottom[j] = (bg * x + ag * y) % k;
            }
        }
        let a = rows[r][c];
        if a == 0 {
            continue;
        }
        let u = normalizing_unit(a, k);
        if u != 1 {
            for x in rows[r][c..].iter_mut() {
                *x = (*x * u) % k;
            }
        }
        let p = rows[r][c];
        debug_assert_eq!(k % p, 0);
        if p != 1 {
            let ann = k / p;
            let extra: Vec<u64> = rows[r].iter().map(|&x| (x * ann) % k).collect();
            if extra.iter().any(|&x| x != 0) {
                rows.push(extra);
            }
        }
        for i in 0..r {
            let q = rows[i][c] / p;
            if q != 0 {
                let (above, piv) = pair_mut(&mut rows, i, r);
                for j in c..n {
                    above[j] = (above[j] + (k - q) * piv[j]) % k;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    let data = rows.into_iter().flatten().map(|x| x as u32).collect();
    ZkMatrix::from_raw(m.k, n, data)
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert!(a != b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Howell form of `{ x in Z_k^cols : m * x^T = 0 }`.
///
/// The row space of `[m^T | I]` is `{ (x m^T, x) }`; by the Howell property
/// the rows of its normal form whose first `m.rows` entries vanish generate
/// exactly the pairs with `x m^T = 0`.
pub fn kernel_mod_k(m: &ZkMatrix) -> ZkMatrix {
    let (r, n) = (m.rows, m.cols);
    let width = r + n;
    let mut data = vec![0u32; n * width];
    for i in 0..n {
        for j in 0..r {
            data[i * width + j] = m.get(j, i);
        }
        data[i * width + r + i] = 1 % m.k;
    }
    let h = howell_form(&ZkMatrix::from_raw(m.k, width, data));
    let mut kernel = Vec::new();
    for row in h.rows() {
        if row[..r].iter().all(|&x| x == 0) {
            kernel.extend_from_slice(&row[r..]);
        }
    }
    howell_form(&ZkMatrix::from_raw(m.k, n, kernel))
}

/// Number of elements in the row span of a Howell-form matrix.
pub fn row_span_cardinality(m: &ZkMatrix) -> u128 {
    m.pivots()
        .iter()
        .map(|&(_, p)| (m.k / p) as u128)
        .product()
}

pub fn mat_mul_mod_k(a: &ZkMatrix, b: &ZkMatrix) -> Result<ZkMatrix> {
    if a.k != b.k {
        return Err(ZkError::ModulusMismatch(a.k, b.k));
    }
    if a.cols != b.rows {
        return Err(ZkError::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let k = a.k as u64;
    let mut out = ZkMatrix::zero(a.k, a.rows, b.cols)?;
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = 0u64;
            for t in 0..a.cols {
                acc = (acc + a.get(i, t) as u64 * b.get(t, j) as u64) % k;
            }
            out.data[i * b.cols + j] = acc as u32;
        }
    }
    Ok(out)
}

/// Whether `v` lies in the row span of the Howell-form matrix `h`.
pub fn span_contains(h: &ZkMatrix, v: &[u32]) -> bool {
    debug_assert_eq!(v.len(), h.cols);
    let k = h.k as u64;
    let mut w: Vec<u64> = v.iter().map(|&x| x as u64 % k).collect();
    let mut next = 0;
    for c in 0..h.cols {
        let pivot_row = if next < h.rows && h.get(next, c) != 0 {
            next += 1;
            Some(next - 1)
        } else {
            None
        };
        // rows whose pivot lies before c have been consumed already
        match pivot_row {
            Some(r) => {
                let p = h.get(r, c) as u64;
                if w[c] % p != 0 {
                    return false;
                }
                let q = w[c] / p;
                if q != 0 {
                    let row = h.row(r);
                    for j in c..h.cols {
                        w[j] = (w[j] + (k - q) * row[j] as u64) % k;
                    }
                }
            }
            None => {
                if w[c] != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Dot product of two vectors over `Z_k`.
pub fn dot_mod(a: &[u32], b: &[u32], k: u32) -> u32 {
    let k = k as u64;
    (a.iter()
        .zip(b)
        .map(|(&x, &y)| x as u64 * y as u64)
        .sum::<u64>()
        % k) as u32
}
