//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zkframe_core::classify::{conjecture_monitor, verify_result};
use zkframe_core::frames::{od_frame_m, od_frame_n, frame_f21, frame_f9};
use zkframe_core::reference::known_count;
use zkframe_core::*;

mod common;
use common::{random_map, span_oracle};

type Outcome = std::result::Result<String, String>;

fn standard() -> ClassifyOptions {
    ClassifyOptions::default()
}

fn extended() -> ClassifyOptions {
    ClassifyOptions {
        tier: Tier::Extended,
        budget: None,
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn compare_cells(results: &[ClassificationResult]) -> std::result::Result<usize, String> {
    for r in results {
        let want = known_count(r.k, r.lattice).ok_or_else(|| format!("no reference for k={} {}", r.k, r.lattice))?;
        check(r.count as u32 == want, || {
            format!("k={} n={} {}: got {}, expected {want}", r.k, r.n, r.lattice, r.count)
        })?;
    }
    Ok(results.len())
}

fn lookup(results: &[ClassificationResult], k: u32, lattice: LatticeClass) -> Option<usize> {
    results.iter().find(|r| r.k == k && r.lattice == lattice).map(|r| r.count)
}

fn lengths_1_to_4(out: &mut Vec<ClassificationResult>) -> Outcome {
    let mut rs = Vec::new();
    for k in 2..=24 {
        for n in 1..=4 {
            rs.extend(classify_length(k, n, &standard()).map_err(|e| e.to_string())?);
        }
    }
    let cells = compare_cells(&rs)?;
    let z4 = |k| lookup(&rs, k, LatticeClass::Zn(4));
    check(
        z4(12) == Some(2) && z4(21) == Some(3) && z4(23) == Some(1) && lookup(&rs, 4, LatticeClass::Zn(1)) == Some(1),
        || "anchor cells differ".into(),
    )?;
    out.extend(rs);
    Ok(format!("{cells} cells match"))
}

fn table3() -> Outcome {
    let values = table_n4(25..=200, &standard()).map_err(|e| e.to_string())?;
    for (&k, &v) in &values {
        let want = known_count(k, LatticeClass::Zn(4)).ok_or_else(|| format!("no reference for k={k}"))?;
        check(v as u32 == want, || format!("N4({k}) = {v}, expected {want}"))?;
    }
    for (k, want) in [(25, 5), (49, 6), (75, 11), (100, 12), (128, 1), (169, 15), (198, 33), (200, 10)] {
        check(values[&k] == want, || format!("anchor N4({k}) = {}, expected {want}", values[&k]))?;
    }
    Ok(format!("{} values match", values.len()))
}

fn lengths_5_to_7(out: &mut Vec<ClassificationResult>) -> Outcome {
    let mut rs = Vec::new();
    for k in 2..=24 {
        for n in 5..=7 {
            rs.extend(classify_length(k, n, &standard()).map_err(|e| e.to_string())?);
        }
    }
    for k in 2..=24u32 {
        let got: Vec<usize> = (5..=7).map(|n| lookup(&rs, k, LatticeClass::Zn(n)).unwrap()).collect();
        let want = match k {
            4 => vec![2, 3, 4],
            9 => vec![3, 6, 9],
            16 => vec![3, 7, 23],
            // every even length is admissible for these moduli
            2 | 5 | 8 | 10 | 13 | 17 | 18 | 20 => {
                vec![0, known_count(k, LatticeClass::Zn(6)).unwrap() as usize, 0]
            }
            _ => vec![0, 0, 0],
        };
        check((5..=7).all(|n| (got[n - 5] > 0) == allowed_length(k, n)), || {
            format!("k={k}: {got:?} disagrees with the length rules")
        })?;
        check(got == want, || format!("k={k}: got {got:?}, expected {want:?}"))?;
    }
    let cells = compare_cells(&rs)?;
    out.extend(rs);
    Ok(format!("{cells} cells match"))
}

fn length_8_small(out: &mut Vec<ClassificationResult>) -> Outcome {
    let mut rs = Vec::new();
    for k in 2..=6 {
        rs.extend(classify_length(k, 8, &extended()).map_err(|e| e.to_string())?);
    }
    let expected = [(2, 1, 1), (3, 1, 0), (4, 7, 4), (5, 3, 0), (6, 3, 2)];
    for (k, z8, e8) in expected {
        let got = (lookup(&rs, k, LatticeClass::Zn(8)), lookup(&rs, k, LatticeClass::E8));
        check(got == (Some(z8), Some(e8)), || format!("k={k}: got {got:?}, expected ({z8}, {e8})"))?;
    }
    check(
        matches!(
            classify(4, 8, LatticeClass::Zn(8), &standard()),
            Err(ZkError::LengthUnsupported(8, 7))
        ),
        || "standard tier accepted length 8".into(),
    )?;
    let tight = ClassifyOptions {
        tier: Tier::Extended,
        budget: Some(Duration::from_millis(200)),
    };
    for (k, n, l) in [(24, 8, LatticeClass::Zn(8)), (24, 8, LatticeClass::E8), (16, 9, LatticeClass::E8PlusZ)] {
        match classify(k, n, l, &tight) {
            Ok(_) | Err(ZkError::TimeExhausted(_)) => {}
            Err(e) => return Err(format!("k={k} n={n} {l} rejected: {e}")),
        }
    }
    out.extend(rs);
    Ok("k <= 6 match; heavy cells accepted under the extended tier".into())
}

fn oracle_equivalence() -> Outcome {
    let mut cells = 0;
    for k in 2..=5 {
        for n in 1..=4 {
            let brute = brute_force_classify(k, n, BruteForceBudget::default()).map_err(|e| e.to_string())?;
            let framed: usize = classify_length(k, n, &standard())
                .map_err(|e| e.to_string())?
                .iter()
                .map(|r| r.count)
                .sum();
            check(brute.len() == framed, || {
                format!("k={k} n={n}: brute force {}, frames {framed}", brute.len())
            })?;
            cells += 1;
        }
    }
    Ok(format!("{cells} (k, n) pairs agree"))
}

fn explicit_frames() -> Outcome {
    let z4 = standard_lattice(LatticeClass::Zn(4));
    let err = |e: ZkError| e.to_string();
    let groups = [
        (9, vec![frame_f9(), od_frame_m([3, 0, 0, 0], 9).map_err(err)?, od_frame_m([2, 2, 1, 0], 9).map_err(err)?], 3),
        (15, vec![od_frame_n([3, 1, 2, -1], 15).map_err(err)?, od_frame_m([3, 2, 1, 1], 15).map_err(err)?], 2),
        (21, vec![frame_f21(), od_frame_m([0, 1, 2, 4], 21).map_err(err)?, od_frame_m([2, 2, 2, 3], 21).map_err(err)?], 3),
    ];
    for (k, frames, want) in groups {
        let mut codes = Vec::new();
        for f in &frames {
            f.validate(&z4).map_err(err)?;
            codes.push(project_frame(&z4, f).map_err(err)?);
        }
        let classes = dedupe(&codes).map_err(err)?.len();
        check(classes == want, || format!("k={k}: {classes} classes, expected {want}"))?;
    }
    Ok("8 frames valid; classes 3, 2, 3".into())
}

fn property_checks(results: &[ClassificationResult]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let k = rng.gen_range(2..=9u32);
        let (r, c) = (rng.gen_range(1..=4usize), rng.gen_range(1..=4usize));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..k as i64)).collect()).collect();
        let m = ZkMatrix::from_rows(k, c, &rows).map_err(|e| e.to_string())?;
        let h = howell_form(&m);
        check(howell_form(&h) == h, || format!("Howell form not idempotent on {m:?}"))?;
        check(span_oracle(&h) == span_oracle(&m), || format!("Howell form changed the span of {m:?}"))?;
        let code = ZkCode::from_matrix(&m);
        check(code.dual().dual() == code, || format!("dual not an involution on {m:?}"))?;
    }
    let mut codes = Vec::new();
    for r in results {
        verify_result(r).map_err(|e| e.to_string())?;
        for c in &r.representatives {
            check(c.size().pow(2) == (r.k as u128).pow(r.n as u32), || format!("|C|^2 != k^n for {c:?}"))?;
            let l = construction_a(c).map_err(|e| e.to_string())?;
            check(l.is_unimodular(), || format!("A_k({c:?}) not unimodular"))?;
            let type_ii = c.code_type() == CodeType::TypeII;
            check(l.is_even() == type_ii, || format!("parity/type mismatch for {c:?}"))?;
            check(!type_ii || (r.n % 8 == 0 && r.k % 2 == 0), || format!("Type II code {c:?} at n={}", r.n))?;
            if r.n <= 7 {
                codes.push(c.clone());
            }
        }
    }
    for _ in 0..500 {
        let c = codes.choose(&mut rng).ok_or("no codes")?;
        let image = apply(c, &random_map(c.length(), &mut rng)).map_err(|e| e.to_string())?;
        check(canonical_form(&image) == canonical_form(c), || format!("canonical form varies on orbit of {c:?}"))?;
    }
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| classify_length(16, 6, &standard()))
    };
    let (a, b) = (run(1).map_err(|e| e.to_string())?, run(4).map_err(|e| e.to_string())?);
    check(a.iter().zip(&b).all(|(x, y)| x.same_classes(y)), || "results depend on thread count".into())?;
    for _ in 0..200 {
        let x = [0; 4].map(|_| rng.gen_range(-40..=40i64));
        let m = OdMatrix::new(OdKind::M, x);
        let s = m.sum_of_squares();
        let diag = |g: [[i64; 4]; 4]| (0..4).all(|i| (0..4).all(|j| g[i][j] == if i == j { s } else { 0 }));
        check(diag(m.gram()), || format!("M{x:?} M^T is not {s} I"))?;
        let n = OdMatrix::new(OdKind::N, x);
        check(diag(n.gram()) == (n.n_condition() == 0), || format!("N{x:?} condition gate wrong"))?;
    }
    Ok(format!("{} classified codes checked", results.iter().map(|r| r.count).sum::<usize>()))
}

fn conjecture(length8: &[ClassificationResult]) -> Outcome {
    let mut rs = length8.to_vec();
    for k in [8, 10, 12] {
        rs.extend(classify_length(k, 8, &extended()).map_err(|e| e.to_string())?);
    }
    let mut report = BTreeMap::new();
    for c in conjecture_monitor(&rs) {
        report.insert(c.k, (c.type_i, c.type_ii));
        check(c.holds, || format!("k={}: Type I {} vs Type II {}", c.k, c.type_i, c.type_ii))?;
    }
    let ks: Vec<u32> = report.keys().copied().collect();
    check(ks == [2, 4, 6, 8, 10, 12], || format!("monitored moduli {ks:?}"))?;
    Ok(report
        .iter()
        .map(|(k, (i, ii))| format!("k={k}: {i}>{ii}"))
        .collect::<Vec<_>>()
        .join(", ")
        .replacen(">", "=", 1))
}

fn main() -> ExitCode {
    let mut small = Vec::new();
    let mut length8 = Vec::new();
    let mut failed = 0;
    let mut report = |name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {msg}");
            }
        }
    };
    let t = Instant::now();
    let o = lengths_1_to_4(&mut small);
    report("1 lengths 1-4, k = 2..24", t, o);
    let t = Instant::now();
    report("2 N4(k), k = 25..200", t, table3());
    let t = Instant::now();
    let o = lengths_5_to_7(&mut small);
    report("3 lengths 5-7, k = 2..24", t, o);
    let t = Instant::now();
    let o = length_8_small(&mut length8);
    report("4 length 8, k <= 6", t, o);
    let t = Instant::now();
    report("5 frame pipeline vs brute force", t, oracle_equivalence());
    let t = Instant::now();
    report("6 explicit frames of Z^4", t, explicit_frames());
    let t = Instant::now();
    let all: Vec<ClassificationResult> = small.iter().chain(&length8).cloned().collect();
    report("7 structural properties", t, property_checks(&all));
    let t = Instant::now();
    report("8 Type I vs Type II at length 8", t, conjecture(&length8));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
