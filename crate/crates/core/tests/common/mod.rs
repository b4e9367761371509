#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use zkframe_core::{MonomialMap, ZkMatrix};

/// All elements of the row span of `m`, by enumerating coefficient vectors.
pub fn span_oracle(m: &ZkMatrix) -> HashSet<Vec<u32>> {
    let k = m.modulus();
    let mut out = HashSet::new();
    let mut coeffs = vec![0u32; m.nrows()];
    loop {
        let mut v = vec![0u32; m.ncols()];
        for (c, row) in coeffs.iter().zip(m.rows()) {
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + c * r) % k;
            }
        }
        out.insert(v);
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return out;
            }
            coeffs[i] += 1;
            if coeffs[i] < k {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

pub fn all_vectors(k: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..k).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn random_map(n: usize, rng: &mut impl Rng) -> MonomialMap {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let signs = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
    MonomialMap::new(perm, signs).unwrap()
}
