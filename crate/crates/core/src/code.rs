//! Codes over `Z_k` held in canonical (Howell) form.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZkError};
use crate::linalg::{self, check_modulus, dot_mod, howell_form, kernel_mod_k, ZkMatrix};

/// Default number of codewords an enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// A `Z_k`-submodule of `Z_k^n`, stored as its Howell-form generator matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZkCode {
    k: u32,
    n: usize,
    gen: ZkMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CodeType {
    TypeI,
    TypeII,
    NotSelfDual,
}

impl ZkCode {
    /// The code spanned by the rows of `m`.
    pub fn from_matrix(m: &ZkMatrix) -> ZkCode {
        ZkCode {
            k: m.modulus(),
            n: m.ncols(),
            gen: howell_form(m),
        }
    }

    pub fn from_generators<R: AsRef<[i64]>>(k: u32, n: usize, rows: &[R]) -> Result<ZkCode> {
        Ok(Self::from_matrix(&ZkMatrix::from_rows(k, n, rows)?))
    }

    pub fn zero(k: u32, n: usize) -> Result<ZkCode> {
        Ok(ZkCode {
            k,
            n,
            gen: ZkMatrix::empty(k, n)?,
        })
    }

    pub fn full(k: u32, n: usize) -> Result<ZkCode> {
        Ok(ZkCode {
            k,
            n,
            gen: ZkMatrix::identity(k, n)?,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.k
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &ZkMatrix {
        &self.gen
    }

    /// `|C|`.
    pub fn size(&self) -> u128 {
        linalg::row_span_cardinality(&self.gen)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        linalg::span_contains(&self.gen, v)
    }

    pub fn dual(&self) -> ZkCode {
        ZkCode {
            k: self.k,
            n: self.n,
            gen: kernel_mod_k(&self.gen),
        }
    }

    pub fn is_self_orthogonal(&self) -> bool {
        let rows: Vec<&[u32]> = self.gen.rows().collect();
        rows.iter().enumerate().all(|(i, a)| {
            rows[i..]
                .iter()
                .all(|b| dot_mod(a, b, self.k) == 0)
        })
    }

    pub fn is_self_dual(&self) -> bool {
        self.dual().gen == self.gen
    }

    /// Type via the generator-norm criterion: for even `k`, a self-dual code is
    /// Type II iff every generator row has `g.g ≡ 0 (mod 2k)`.
    pub fn code_type(&self) -> CodeType {
        if !self.is_self_dual() {
            return CodeType::NotSelfDual;
        }
        if self.k % 2 == 1 {
            return CodeType::TypeI;
        }
        let two_k = 2 * self.k as u64;
        let all_even = self
            .gen
            .rows()
            .all(|g| g.iter().map(|&x| x as u64 * x as u64).sum::<u64>() % two_k == 0);
        if all_even {
            CodeType::TypeII
        } else {
            CodeType::TypeI
        }
    }

    /// Streams every codeword exactly once, in lexicographic order of the
    /// coefficient vector over the Howell generators.
    pub fn codewords(&self) -> Codewords<'_> {
        Codewords::new(self)
    }

    pub fn codewords_within(&self, budget: u128) -> Result<Codewords<'_>> {
        let needed = self.size();
        if needed > budget {
            return Err(ZkError::BudgetExceeded { needed, budget });
        }
        Ok(self.codewords())
    }

    /// Counted multiset of codeword compositions, where a codeword's
    /// composition counts how many coordinates take each symmetrized value
    /// `min(v, k - v)`.
    pub fn symmetrized_weight_enumerator(&self, budget: u128) -> Result<SymWeightEnumerator> {
        let half = (self.k / 2) as usize;
        let mut counts: BTreeMap<Vec<u16>, u64> = BTreeMap::new();
        let mut comp = vec![0u16; half + 1];
        for w in self.codewords_within(budget)? {
            comp.iter_mut().for_each(|c| *c = 0);
            for &x in &w {
                comp[sym_value(x, self.k) as usize] += 1;
            }
            *counts.entry(comp.clone()).or_insert(0) += 1;
        }
        Ok(SymWeightEnumerator(counts))
    }

    /// The code spanned by `self` and `v`.
    pub fn extended_by(&self, v: &[u32]) -> Result<ZkCode> {
        let extra = ZkMatrix::from_raw(self.k, self.n, v.to_vec());
        Ok(ZkCode::from_matrix(&self.gen.vstack(&extra)?))
    }
}

impl fmt::Debug for ZkCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZkCode(k={}, n={}, {:?})", self.k, self.n, self.gen.to_rows())
    }
}

/// `min(x, k - x)` for `x` in `[0, k)`.
pub fn sym_value(x: u32, k: u32) -> u32 {
    x.min(k - x)
}

/// Euclidean weight `sum_i min(v_i^2, (k - v_i)^2)`.
///
/// Defined for any modulus; the Type II divisibility test only makes sense
/// for even `k` (see [`is_type_ii_weight`]).
pub fn euclidean_weight(v: &[u32], k: u32) -> u64 {
    v.iter()
        .map(|&x| {
            let s = sym_value(x % k, k) as u64;
            s * s
        })
        .sum()
}

/// Whether the Euclidean weight of `v` is divisible by `2k`. Errors for odd `k`.
pub fn is_type_ii_weight(v: &[u32], k: u32) -> Result<bool> {
    if k % 2 == 1 {
        return Err(ZkError::ModulusMismatch(k, 2));
    }
    Ok(euclidean_weight(v, k) % (2 * k as u64) == 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymWeightEnumerator(pub BTreeMap<Vec<u16>, u64>);

pub struct Codewords<'a> {
    code: &'a ZkCode,
    orders: Vec<u32>,
    coeffs: Vec<u32>,
    done: bool,
}

impl<'a> Codewords<'a> {
    fn new(code: &'a ZkCode) -> Self {
        let orders = code
            .gen
            .pivots()
            .iter()
            .map(|&(_, p)| code.k / p)
            .collect::<Vec<_>>();
        let coeffs = vec![0; orders.len()];
        Codewords {
            code,
            orders,
            coeffs,
            done: false,
        }
    }
}

impl Iterator for Codewords<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let k = self.code.k as u64;
        let mut w = vec![0u64; self.code.n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (x, &g) in w.iter_mut().zip(self.code.gen.row(i)) {
                *x += a as u64 * g as u64;
            }
        }
        let word = w.into_iter().map(|x| (x % k) as u32).collect();
        // odometer, last generator varies fastest
        let mut i = self.coeffs.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.coeffs[i] += 1;
            if self.coeffs[i] < self.orders[i] {
                break;
            }
            self.coeffs[i] = 0;
        }
        Some(word)
    }
}

fn is_square(k: u32) -> bool {
    let r = (k as f64).sqrt().round() as u32;
    r * r == k
}

fn is_sum_of_two_squares(k: u32) -> bool {
    let mut m = k;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if p % 4 == 3 && e % 2 == 1 {
            return false;
        }
        p += 1;
    }
    !(m > 1 && m % 4 == 3)
}

/// Necessary condition for a self-dual `Z_k`-code of length `n` to exist.
///
/// `false` means existence is excluded; `true` does not promise existence.
pub fn allowed_length(k: u32, n: usize) -> bool {
    const FOUR: [u32; 12] = [3, 6, 7, 11, 12, 14, 15, 19, 21, 22, 23, 24];
    const TWO: [u32; 8] = [2, 5, 8, 10, 13, 17, 18, 20];
    if n == 0 || is_square(k) {
        return true;
    }
    if FOUR.contains(&k) {
        return n % 4 == 0;
    }
    if TWO.contains(&k) {
        return n % 2 == 0;
    }
    // |C|^2 = k^n forces n even; the form k*I_n must be rationally
    // equivalent to I_n, which for n ≡ 2 (mod 4) needs k = a^2 + b^2.
    if n % 2 == 1 {
        return false;
    }
    n % 4 == 0 || is_sum_of_two_squares(k)
}

/// Resource limits for [`brute_force_classify`].
#[derive(Debug, Clone, Copy)]
pub struct BruteForceBudget {
    /// Upper bound on `k^n`.
    pub max_space: u128,
    pub max_length: usize,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget {
            max_space: 5u128.pow(4),
            max_length: 4,
        }
    }
}

/// All self-dual codes of length `n` over `Z_k` up to monomial equivalence,
/// by exhaustive search. Independent of the frame pipeline.
///
/// Each class is represented by the lexicographically least Howell matrix
/// over its full orbit under signed permutations; output is sorted.
pub fn brute_force_classify(k: u32, n: usize, budget: BruteForceBudget) -> Result<Vec<ZkCode>> {
    check_modulus(k)?;
    let space = (k as u128).pow(n as u32);
    if space > budget.max_space {
        return Err(ZkError::BudgetExceeded {
            needed: space,
            budget: budget.max_space,
        });
    }
    if n > budget.max_length {
        return Err(ZkError::LengthUnsupported(n, budget.max_length));
    }
    let target = space;
    let isotropic: Vec<Vec<u32>> = all_vectors(k, n)
        .filter(|v| dot_mod(v, v, k) == 0 && v.iter().any(|&x| x != 0))
        .collect();

    let mut seen: HashSet<ZkCode> = HashSet::new();
    let mut stack = vec![ZkCode::zero(k, n)?];
    let mut self_dual = Vec::new();
    seen.insert(stack[0].clone());
    while let Some(c) = stack.pop() {
        let s = c.size();
        if s * s == target {
            self_dual.push(c);
            continue;
        }
        for v in &isotropic {
            if c.contains(v) {
                continue;
            }
            if c.gen.rows().any(|g| dot_mod(g, v, k) != 0) {
                continue;
            }
            let next = c.extended_by(v)?;
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }

    let maps = all_signed_permutations(n);
    let mut reps: Vec<ZkCode> = self_dual
        .iter()
        .map(|c| {
            maps.iter()
                .map(|(perm, neg)| {
                    let picks: Vec<(usize, bool)> =
                        perm.iter().zip(neg).map(|(&p, &s)| (p, s)).collect();
                    ZkCode::from_matrix(&c.gen.select_columns(&picks))
                })
                .min_by(|a, b| a.gen.cmp_entries(&b.gen))
                .expect("nonempty group")
        })
        .collect();
    reps.sort_by(|a, b| a.gen.cmp_entries(&b.gen));
    reps.dedup();
    Ok(reps)
}

fn all_vectors(k: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (k as u64).pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u32; n];
        for x in v.iter_mut().rev() {
            *x = (idx % k as u64) as u32;
            idx /= k as u64;
        }
        v
    })
}

/// Every (column order, negation pattern) pair for length `n`.
fn all_signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect::<Vec<_>>(), 0, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << n);
    for p in perms {
        for mask in 0..(1u32 << n) {
            let neg = (0..n).map(|i| mask >> i & 1 == 1).collect();
            out.push((p.clone(), neg));
        }
    }
    out
}

fn permutations(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(k: u32, n: usize, rows: &[&[i64]]) -> ZkCode {
        ZkCode::from_generators(k, n, rows).unwrap()
    }

    #[test]
    fn dual_examples() {
        assert_eq!(ZkCode::full(2, 2).unwrap().dual(), ZkCode::zero(2, 2).unwrap());
        let c = code(4, 2, &[&[2, 0], &[0, 2]]);
        assert_eq!(c.dual(), c);
        let c = code(2, 2, &[&[1, 1]]);
        assert_eq!(c.dual(), c);
    }

    #[test]
    fn self_duality() {
        assert!(code(2, 2, &[&[1, 1]]).is_self_dual());
        assert!(code(4, 1, &[&[2]]).is_self_dual());
        assert!(!ZkCode::full(2, 2).unwrap().is_self_dual());
    }

    #[test]
    fn euclidean_weights() {
        assert_eq!(euclidean_weight(&[0, 0, 0], 8), 0);
        assert_eq!(euclidean_weight(&[5, 1], 8), 10);
        assert_eq!(euclidean_weight(&[1; 8], 2), 8);
        assert!(is_type_ii_weight(&[1; 8], 2).unwrap());
        assert!(is_type_ii_weight(&[1, 1], 3).is_err());
    }

    #[test]
    fn types() {
        assert_eq!(code(2, 2, &[&[1, 1]]).code_type(), CodeType::TypeI);
        let hamming = code(
            2,
            8,
            &[
                &[1, 1, 1, 1, 0, 0, 0, 0],
                &[0, 0, 1, 1, 1, 1, 0, 0],
                &[0, 0, 0, 0, 1, 1, 1, 1],
                &[1, 0, 1, 0, 1, 0, 1, 0],
            ],
        );
        assert!(hamming.is_self_dual());
        assert_eq!(hamming.code_type(), CodeType::TypeII);
        assert_eq!(code(5, 2, &[&[1, 2]]).code_type(), CodeType::TypeI);
        assert_eq!(ZkCode::full(3, 2).unwrap().code_type(), CodeType::NotSelfDual);
    }

    #[test]
    fn codeword_streams() {
        let z = ZkCode::zero(5, 3).unwrap();
        assert_eq!(z.codewords().collect::<Vec<_>>(), vec![vec![0, 0, 0]]);
        let c = code(4, 1, &[&[2]]);
        assert_eq!(c.codewords().collect::<Vec<_>>(), vec![vec![0], vec![2]]);
        let c = code(2, 2, &[&[1, 1]]);
        assert_eq!(c.codewords().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 1]]);
        assert!(matches!(
            ZkCode::full(9, 4).unwrap().codewords_within(100),
            Err(ZkError::BudgetExceeded { needed: 6561, budget: 100 })
        ));
    }

    #[test]
    fn swe_examples() {
        let z = ZkCode::zero(4, 1).unwrap();
        let swe = z.symmetrized_weight_enumerator(100).unwrap();
        assert_eq!(swe.0.len(), 1);
        assert_eq!(swe.0[&vec![1u16, 0, 0]], 1);
        let c = code(4, 1, &[&[2]]);
        let swe = c.symmetrized_weight_enumerator(100).unwrap();
        assert_eq!(swe.0[&vec![1u16, 0, 0]], 1);
        assert_eq!(swe.0[&vec![0u16, 0, 1]], 1);
    }

    #[test]
    fn length_rules() {
        assert!(!allowed_length(3, 5));
        assert!(allowed_length(9, 7));
        assert!(!allowed_length(2, 3));
        assert!(allowed_length(16, 9));
        assert!(!allowed_length(6, 2));
        assert!(allowed_length(10, 6));
    }

    #[test]
    fn general_length_rule_agrees_with_tabulated_lists() {
        // the sum-of-two-squares rule reproduces every tabulated case k <= 24
        for k in 2..=24u32 {
            for n in 1..=12usize {
                let general = is_square(k)
                    || (n % 2 == 0 && (n % 4 == 0 || is_sum_of_two_squares(k)));
                assert_eq!(allowed_length(k, n), general, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn brute_force_small_cells() {
        let b = BruteForceBudget::default();
        let r = brute_force_classify(2, 2, b).unwrap();
        assert_eq!(r, vec![code(2, 2, &[&[1, 1]])]);
        let r = brute_force_classify(4, 1, b).unwrap();
        assert_eq!(r, vec![code(4, 1, &[&[2]])]);
        assert_eq!(brute_force_classify(5, 2, b).unwrap().len(), 1);
        assert!(brute_force_classify(7, 4, b).is_err());
    }
}
