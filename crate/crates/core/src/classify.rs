//! The classification pipeline: frames → codes → classes, per lattice.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{allowed_length, CodeType, ZkCode};
use crate::equivalence::dedupe;
use crate::error::{Result, ZkError};
use crate::frames::{frame_cover, project_frame};
use crate::lattice::{construction_a, standard_lattice, LatticeClass};
use crate::linalg::check_modulus;

/// Which cells may be searched. The standard tier covers lengths up to 7;
/// lengths 8 and 9 can take hours and need the extended tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Tier {
    #[default]
    Standard,
    Extended,
}

impl Tier {
    pub fn admits(&self, n: usize) -> bool {
        match self {
            Tier::Standard => n <= 7,
            Tier::Extended => n <= 9,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    pub tier: Tier,
    /// Wall-clock limit per (k, n, lattice) job.
    pub budget: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub k: u32,
    pub n: usize,
    pub lattice: LatticeClass,
    pub representatives: Vec<ZkCode>,
    pub count: usize,
    /// `(Type I, Type II)`.
    pub type_counts: (usize, usize),
    pub timing_secs: f64,
}

impl ClassificationResult {
    pub fn from_representatives(
        k: u32,
        n: usize,
        lattice: LatticeClass,
        representatives: Vec<ZkCode>,
        timing_secs: f64,
    ) -> ClassificationResult {
        let type_ii = representatives
            .iter()
            .filter(|c| c.code_type() == CodeType::TypeII)
            .count();
        ClassificationResult {
            k,
            n,
            lattice,
            count: representatives.len(),
            type_counts: (representatives.len() - type_ii, type_ii),
            representatives,
            timing_secs,
        }
    }

    /// Equality ignoring timing.
    pub fn same_classes(&self, other: &ClassificationResult) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.lattice == other.lattice
            && self.representatives == other.representatives
            && self.type_counts == other.type_counts
    }
}

/// Whether the cell is zero by the length rules or by parity, without search.
pub fn trivially_empty(k: u32, n: usize, lattice: LatticeClass) -> bool {
    !allowed_length(k, n) || (lattice.is_even() && k % 2 == 1)
}

/// Classifies self-dual `Z_k`-codes `C` of length `n` with `A_k(C) ≅ lattice`.
pub fn classify(
    k: u32,
    n: usize,
    lattice: LatticeClass,
    opts: &ClassifyOptions,
) -> Result<ClassificationResult> {
    check_modulus(k)?;
    if lattice.dim() != n {
        return Err(ZkError::Lattice(format!("{lattice} does not have dimension {n}")));
    }
    if n == 0 || n > 9 {
        return Err(ZkError::LengthUnsupported(n, 9));
    }
    let start = Instant::now();
    if trivially_empty(k, n, lattice) {
        return Ok(ClassificationResult::from_representatives(k, n, lattice, Vec::new(), 0.0));
    }
    if !opts.tier.admits(n) {
        return Err(ZkError::LengthUnsupported(n, 7));
    }
    let deadline = opts.budget.map(|b| start + b);
    let exhausted = |_| ZkError::TimeExhausted(start.elapsed().as_secs_f64());
    let l = standard_lattice(lattice);
    let frames = frame_cover(&l, k, deadline).map_err(|e| match e {
        ZkError::TimeExhausted(_) => exhausted(()),
        other => other,
    })?;
    let codes: Vec<ZkCode> = frames
        .par_iter()
        .map(|f| project_frame(&l, f))
        .collect::<Result<_>>()?;
    if deadline.is_some_and(|d| Instant::now() > d) {
        return Err(exhausted(()));
    }
    let reps = dedupe(&codes)?;
    if deadline.is_some_and(|d| Instant::now() > d) {
        return Err(exhausted(()));
    }
    for c in &reps {
        let ty = c.code_type();
        let ok = match ty {
            CodeType::NotSelfDual => false,
            CodeType::TypeII => lattice.is_even(),
            CodeType::TypeI => !lattice.is_even(),
        };
        if !ok {
            return Err(ZkError::Lattice(format!(
                "projected code {c:?} has type {ty:?} for lattice {lattice}"
            )));
        }
    }
    Ok(ClassificationResult::from_representatives(
        k,
        n,
        lattice,
        reps,
        start.elapsed().as_secs_f64(),
    ))
}

/// [`classify`] for every unimodular lattice class of dimension `n`.
pub fn classify_length(k: u32, n: usize, opts: &ClassifyOptions) -> Result<Vec<ClassificationResult>> {
    LatticeClass::all_of_dim(n)
        .into_iter()
        .map(|l| classify(k, n, l, opts))
        .collect()
}

/// `N_4(k)` for each `k` in the range.
pub fn table_n4(
    ks: impl IntoIterator<Item = u32>,
    opts: &ClassifyOptions,
) -> Result<BTreeMap<u32, usize>> {
    ks.into_iter()
        .map(|k| Ok((k, classify(k, 4, LatticeClass::Zn(4), opts)?.count)))
        .collect()
}

/// Checks that every representative is self-dual and lands in the recorded lattice class.
pub fn verify_result(r: &ClassificationResult) -> Result<()> {
    for c in &r.representatives {
        if c.modulus() != r.k || c.length() != r.n {
            return Err(ZkError::Dimension("representative has wrong parameters".into()));
        }
        let class = construction_a(c)?.identify_class()?;
        if class != r.lattice {
            return Err(ZkError::Lattice(format!(
                "representative lies over {class}, not {}",
                r.lattice
            )));
        }
    }
    Ok(())
}

/// Type I versus Type II counts at length 8 for one even modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureCheck {
    pub k: u32,
    pub type_i: usize,
    pub type_ii: usize,
    /// `k = 2`: the counts agree. `k >= 4`: Type I strictly dominates.
    pub holds: bool,
}

/// Compares Type I and Type II counts for each even `k` whose length-8
/// results cover both `Z^8` and `E8`.
pub fn conjecture_monitor(results: &[ClassificationResult]) -> Vec<ConjectureCheck> {
    let mut by_k: BTreeMap<u32, (Option<usize>, Option<usize>, usize, usize)> = BTreeMap::new();
    for r in results.iter().filter(|r| r.n == 8 && r.k % 2 == 0) {
        let e = by_k.entry(r.k).or_default();
        match r.lattice {
            LatticeClass::Zn(_) => e.0 = Some(r.count),
            LatticeClass::E8 => e.1 = Some(r.count),
            LatticeClass::E8PlusZ => {}
        }
        e.2 += r.type_counts.0;
        e.3 += r.type_counts.1;
    }
    by_k.into_iter()
        .filter(|(_, (z, e, _, _))| z.is_some() && e.is_some())
        .map(|(k, (_, _, type_i, type_ii))| ConjectureCheck {
            k,
            type_i,
            type_ii,
            holds: if k == 2 { type_i == type_ii } else { type_i > type_ii },
        })
        .collect()
}

/// Column headers of the length/lattice table.
pub const TABLE2_COLUMNS: [&str; 11] = [
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "E8", "Z9", "E8+Z",
];

pub fn table2_column(lattice: LatticeClass) -> usize {
    match lattice {
        LatticeClass::Zn(n) if n <= 8 => n - 1,
        LatticeClass::E8 => 8,
        LatticeClass::Zn(_) => 9,
        LatticeClass::E8PlusZ => 10,
    }
}

/// TSV with one row per modulus; `-` marks cells that were not computed.
pub fn table2_tsv(rows: &BTreeMap<u32, [Option<usize>; 11]>) -> String {
    let mut out = String::from("k");
    for c in TABLE2_COLUMNS {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for (k, cells) in rows {
        out.push_str(&k.to_string());
        for c in cells {
            out.push('\t');
            match c {
                Some(v) => out.push_str(&v.to_string()),
                None => out.push('-'),
            }
        }
        out.push('\n');
    }
    out
}

pub fn table3_tsv(values: &BTreeMap<u32, usize>) -> String {
    let mut out = String::from("k\tN4\n");
    for (k, v) in values {
        out.push_str(&format!("{k}\t{v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_cells_need_no_search() {
        let r = classify(3, 5, LatticeClass::Zn(5), &ClassifyOptions::default()).unwrap();
        assert_eq!(r.count, 0);
        let r = classify(5, 8, LatticeClass::E8, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn tier_gate() {
        let err = classify(4, 8, LatticeClass::Zn(8), &ClassifyOptions::default());
        assert!(matches!(err, Err(ZkError::LengthUnsupported(8, 7))));
    }

    #[test]
    fn small_cells() {
        let opts = ClassifyOptions::default();
        let r = classify(9, 4, LatticeClass::Zn(4), &opts).unwrap();
        assert_eq!(r.count, 3);
        assert_eq!(r.type_counts, (3, 0));
        verify_result(&r).unwrap();
        let r = classify(4, 1, LatticeClass::Zn(1), &opts).unwrap();
        assert_eq!(r.representatives, vec![ZkCode::from_generators(4, 1, &[[2]]).unwrap()]);
    }

    #[test]
    fn mismatched_dimension_rejected() {
        assert!(classify(4, 7, LatticeClass::E8, &ClassifyOptions::default()).is_err());
    }

    #[test]
    fn monitor_relations() {
        let mk = |k, lattice, t: (usize, usize)| ClassificationResult {
            k,
            n: 8,
            lattice,
            representatives: Vec::new(),
            count: t.0 + t.1,
            type_counts: t,
            timing_secs: 0.0,
        };
        let rs = vec![
            mk(2, LatticeClass::Zn(8), (1, 0)),
            mk(2, LatticeClass::E8, (0, 1)),
            mk(4, LatticeClass::Zn(8), (7, 0)),
            mk(4, LatticeClass::E8, (0, 4)),
            mk(6, LatticeClass::Zn(8), (3, 0)),
        ];
        let checks = conjecture_monitor(&rs);
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn tsv_layout() {
        let mut rows = BTreeMap::new();
        let mut cells = [None; 11];
        cells[3] = Some(3);
        rows.insert(9, cells);
        let tsv = table2_tsv(&rows);
        assert_eq!(tsv.lines().nth(1).unwrap(), "9\t-\t-\t-\t3\t-\t-\t-\t-\t-\t-\t-");
        let mut t3 = BTreeMap::new();
        t3.insert(25, 5);
        assert_eq!(table3_tsv(&t3), "k\tN4\n25\t5\n");
    }
}
