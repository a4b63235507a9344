//! Independent checks: multiplicativity scans, bounded-partial-sum windows,
//! the randomized blockwise-cancellation test, structural level conditions,
//! telescoping chains, and a brute-force DFS oracle.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::general::{GeneralConstruction, LevelState};
use crate::primes::PrimeSet;
use crate::sequence::{sup_abs_over, SignSequence, UNSET};
use crate::small::Program235;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: u64,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks_run: Vec<CheckEntry>,
    pub sup_abs_partial_sum: Option<i64>,
    pub first_violation: Option<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks_run.iter().all(|c| c.passed)
    }

    fn pass(&mut self, name: impl Into<String>) {
        self.checks_run.push(CheckEntry {
            name: name.into(),
            passed: true,
            witness: None,
        });
    }

    fn fail(&mut self, name: impl Into<String>, witness: String) {
        self.checks_run.push(CheckEntry {
            name: name.into(),
            passed: false,
            witness: Some(witness),
        });
    }

    fn record_violation(&mut self, v: Violation) {
        if self.first_violation.is_none() {
            self.first_violation = Some(v);
        }
    }
}

/// v[pn] = f(p) v[n] for every prime of the set and every n with pn inside.
pub fn check_multiplicativity(seq: &SignSequence, set: &PrimeSet) -> VerificationReport {
    check_multiplicativity_sharded(seq, set, 1)
}

/// Same scan sharded over byte ranges; the report is identical for every
/// thread count (the smallest witness index wins).
pub fn check_multiplicativity_sharded(
    seq: &SignSequence,
    set: &PrimeSet,
    threads: usize,
) -> VerificationReport {
    let threads = threads.max(1);
    let horizon = seq.horizon();
    let find_in = |lo: u64, hi: u64| -> Option<(u64, u64)> {
        // returns (p, n) of the smallest violating product pn in [lo, hi]
        let mut best: Option<(u64, u64)> = None;
        for m in lo..=hi {
            for &p in set.primes() {
                if m % p == 0 {
                    let n = m / p;
                    let fp = seq.prime_sign(p).unwrap_or(1);
                    if seq.get(m) != fp * seq.get(n) {
                        best = Some((p, n));
                        break;
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        best
    };

    let hit = if threads == 1 || horizon < 1024 {
        find_in(2, horizon)
    } else {
        let chunk = horizon / threads as u64 + 1;
        let mut results: Vec<Option<(u64, u64)>> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads {
                let lo = (2 + t as u64 * chunk).min(horizon + 1);
                let hi = (1 + (t as u64 + 1) * chunk).min(horizon);
                handles.push(scope.spawn(move || if lo <= hi { find_in(lo, hi) } else { None }));
            }
            for h in handles {
                results.push(h.join().expect("scan thread panicked"));
            }
        });
        results.into_iter().flatten().min_by_key(|&(p, n)| p * n)
    };

    let mut report = VerificationReport::default();
    match hit {
        None => report.pass("multiplicativity"),
        Some((p, n)) => {
            let fp = seq.prime_sign(p).unwrap_or(1);
            report.fail("multiplicativity", format!("p={p}, n={n}"));
            report.record_violation(Violation {
                index: p * n,
                expected: (fp * seq.get(n)) as i64,
                actual: seq.get(p * n) as i64,
            });
        }
    }
    report
}

/// sup |S| per window; passes when the per-window sups never increase.
pub fn check_bounded(seq: &SignSequence, windows: &[(u64, u64)]) -> VerificationReport {
    let mut report = VerificationReport::default();
    let mut sups = Vec::new();
    for &(lo, hi) in windows {
        match sup_abs_over(seq, lo, hi) {
            Ok(s) => sups.push(s),
            Err(e) => {
                report.fail("bounded", format!("window [{lo},{hi}]: {e}"));
                return report;
            }
        }
    }
    report.sup_abs_partial_sum = sups.iter().max().copied();
    let mut ok = true;
    for (i, w) in sups.windows(2).enumerate() {
        if w[1] > w[0] {
            ok = false;
            report.fail(
                format!("bounded window {}", i + 1),
                format!(
                    "sup grew from {} (window {:?}) to {} (window {:?})",
                    w[0],
                    windows[i],
                    w[1],
                    windows[i + 1]
                ),
            );
        }
    }
    if ok {
        report.pass(format!("bounded over {} windows, sups {:?}", windows.len(), sups));
    }
    report
}

/// Structural conditions on the level tower over a finite horizon:
/// nesting and shift-closure of the free sets, unique relation targets,
/// same-block new pairs landing in the parent free set, and the modulus
/// factorization along the tower.
pub fn check_level_conditions(gc: &GeneralConstruction, horizon: u64) -> VerificationReport {
    let mut report = VerificationReport::default();
    let levels = gc.levels();

    for lv in levels {
        let free = lv.free_in_range(1, horizon);
        let b = lv.modulus;
        let mut shift_ok = true;
        for &n in &free {
            if n + b <= horizon && !lv.contains(n + b) {
                report.fail(
                    format!("free set closure (level {})", lv.level),
                    format!("{n} free but {} not", n + b),
                );
                shift_ok = false;
                break;
            }
            if n > 2 * b && !lv.contains(n - b) {
                report.fail(
                    format!("free set closure (level {})", lv.level),
                    format!("{n} free but {} not", n - b),
                );
                shift_ok = false;
                break;
            }
        }
        if shift_ok {
            report.pass(format!("free set closure (level {})", lv.level));
        }
        let rough_ok = free.iter().all(|&n| gc.prime_set().is_rough(n));
        if rough_ok {
            report.pass(format!("free set coprime (level {})", lv.level));
        } else {
            report.fail(format!("free set coprime (level {})", lv.level), String::new());
        }
    }

    for pair in levels.windows(2) {
        let (parent, child) = (&pair[0], &pair[1]);
        let nested = child
            .free_in_range(1, horizon)
            .iter()
            .all(|&n| parent.contains(n));
        if nested {
            report.pass(format!("free set nesting (level {})", child.level));
        } else {
            report.fail(format!("free set nesting (level {})", child.level), String::new());
        }

        // new pairs: target free in the parent but not the child, same block
        let mut pair_ok = true;
        for (x, y) in child.pair_instances(horizon) {
            let same_block = (x - 1) / child.modulus == (y - 1) / child.modulus;
            if !same_block || !parent.contains(y) || child.contains(y) {
                report.fail(
                    format!("new pair placement (level {})", child.level),
                    format!("pair ({x},{y})"),
                );
                pair_ok = false;
                break;
            }
        }
        if pair_ok {
            report.pass(format!("new pair placement (level {})", child.level));
        }

        // modulus factorization
        let p = child.prime.unwrap_or(0);
        let a = child.exponent.unwrap_or(0);
        if p != 0 && child.modulus == p.pow(a) * parent.modulus {
            report.pass(format!("modulus factorization (level {})", child.level));
        } else {
            report.fail(
                format!("modulus factorization (level {})", child.level),
                format!("{} vs {}^{} * {}", child.modulus, p, a, parent.modulus),
            );
        }
    }

    // unique targets across the whole tower
    let mut seen = std::collections::BTreeSet::new();
    let mut unique = true;
    for lv in levels {
        for (_, y) in lv.pair_instances(horizon) {
            if !seen.insert(y) {
                report.fail("unique relation targets", format!("target {y} repeated"));
                unique = false;
                break;
            }
        }
    }
    if unique {
        report.pass("unique relation targets");
    }

    if levels[0].modulus == gc.prime_set().product() {
        report.pass("base modulus equals the prime product");
    } else {
        report.fail("base modulus equals the prime product", String::new());
    }

    report
}

/// Admissible random functions for one level: multiplicative at the primes
/// the level still controls, flipped across its relation set, free
/// everywhere else. Every complete block of the level's modulus must have a
/// vanishing restricted sum.
pub fn check_condition_v(
    gc: &GeneralConstruction,
    level_j: usize,
    trials: u32,
    rng_seed: u64,
    horizon: u64,
) -> VerificationReport {
    let level = gc
        .levels()
        .iter()
        .find(|l| l.level == level_j)
        .expect("no such level");
    let relations = gc.relations_at_level(level_j, horizon);
    condition_v_core(gc.prime_set(), level, &relations, trials, rng_seed, horizon, None)
}

/// Same check with an explicit relation list (used to show the test notices
/// a dropped pair).
pub fn check_condition_v_with_relations(
    gc: &GeneralConstruction,
    level_j: usize,
    relations: &[(u64, u64)],
    trials: u32,
    rng_seed: u64,
    horizon: u64,
) -> VerificationReport {
    let level = gc
        .levels()
        .iter()
        .find(|l| l.level == level_j)
        .expect("no such level");
    condition_v_core(
        gc.prime_set(),
        level,
        relations,
        trials,
        rng_seed,
        horizon,
        None,
    )
}

/// Exhaustive variant over every assignment of the relevant free values;
/// only usable when there are few of them.
pub fn check_condition_v_exhaustive(
    gc: &GeneralConstruction,
    level_j: usize,
    horizon: u64,
    max_free: u32,
) -> Result<VerificationReport> {
    let level = gc
        .levels()
        .iter()
        .find(|l| l.level == level_j)
        .expect("no such level");
    let relations = gc.relations_at_level(level_j, horizon);
    let free = count_relevant_free(gc.prime_set(), level, &relations, horizon);
    if free > max_free as u64 {
        return Err(Error::Precondition(format!(
            "{free} relevant free values exceed the exhaustive limit {max_free}"
        )));
    }
    let total = 1u64 << free;
    Ok(condition_v_core(
        gc.prime_set(),
        level,
        &relations,
        total as u32,
        0,
        horizon,
        Some(free as u32),
    ))
}

fn count_relevant_free(
    set: &PrimeSet,
    level: &LevelState,
    relations: &[(u64, u64)],
    eval_to: u64,
) -> u64 {
    let j = level.level;
    let controlled = &set.primes()[j - 1..];
    let lower = &set.primes()[..j - 1];
    let targets: std::collections::BTreeSet<u64> = relations.iter().map(|&(_, y)| y).collect();
    let mut count = 0u64;
    for n in 2..=eval_to {
        if controlled.iter().any(|&p| n % p == 0) || targets.contains(&n) {
            continue;
        }
        if lower.iter().all(|&p| n % p != 0) {
            count += 1;
        }
    }
    count + controlled.len() as u64
}

fn condition_v_core(
    set: &PrimeSet,
    level: &LevelState,
    relations: &[(u64, u64)],
    trials: u32,
    rng_seed: u64,
    horizon: u64,
    exhaustive_bits: Option<u32>,
) -> VerificationReport {
    let mut report = VerificationReport::default();
    let j = level.level;
    let controlled: Vec<u64> = set.primes()[j - 1..].to_vec();
    let lower: Vec<u64> = set.primes()[..j - 1].to_vec();

    let mut rule: Vec<u64> = vec![0; horizon as usize + 1]; // y -> x (0 = none)
    for &(x, y) in relations {
        if y <= horizon {
            rule[y as usize] = x;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut values = vec![0i8; horizon as usize + 1];
    let b = level.modulus;

    for trial in 0..trials {
        // Free choices for this trial. In exhaustive mode the positions that
        // the block sums can actually read (coprime to the lower primes) take
        // one enumeration bit each; the rest are pinned to +1.
        let mut bit = 0u32;
        let mut next_free = |rng: &mut ChaCha8Rng, relevant: bool| -> i8 {
            match exhaustive_bits {
                None => {
                    if rng.gen::<bool>() {
                        1
                    } else {
                        -1
                    }
                }
                Some(_) => {
                    if !relevant {
                        return 1;
                    }
                    let v = if (trial >> bit.min(31)) & 1 == 1 { 1 } else { -1 };
                    bit += 1;
                    v
                }
            }
        };
        let mut signs: BTreeMap<u64, i8> = BTreeMap::new();
        for &p in &controlled {
            let s = next_free(&mut rng, true);
            signs.insert(p, s);
        }
        let reduce = |signs: &BTreeMap<u64, i8>, mut x: u64| -> (i8, u64) {
            let mut s = 1i8;
            for (&p, &v) in signs {
                while x % p == 0 {
                    x /= p;
                    s *= v;
                }
            }
            (s, x)
        };
        for n in 1..=horizon {
            let (s, core) = reduce(&signs, n);
            let v = if core < n {
                s * values[core as usize]
            } else if n == 1 {
                1
            } else if rule[n as usize] != 0 {
                let (cx, rx) = reduce(&signs, rule[n as usize]);
                debug_assert!(rx < n, "relation source must resolve earlier");
                -cx * values[rx as usize]
            } else {
                let relevant = lower.iter().all(|&p| n % p != 0);
                next_free(&mut rng, relevant)
            };
            values[n as usize] = v;
        }

        let mut block = 1u64;
        while b * (block + 1) <= horizon {
            let mut sum = 0i64;
            for n in b * block + 1..=b * (block + 1) {
                if lower.iter().any(|&p| n % p == 0) || level.contains(n) {
                    continue;
                }
                sum += values[n as usize] as i64;
            }
            if sum != 0 {
                report.fail(
                    format!("blockwise cancellation (level {j})"),
                    format!("trial {trial}, block {block}, sum {sum}"),
                );
                report.record_violation(Violation {
                    index: b * block,
                    expected: 0,
                    actual: sum,
                });
                return report;
            }
            block += 1;
        }
    }
    report.pass(format!(
        "blockwise cancellation (level {j}, {} assignments)",
        trials
    ));
    report
}

/// Alternating chains on the materialized table: for each scaled family the
/// signed terms cancel completely (odd length) or collapse to the head
/// (even length).
pub fn check_telescoping(gc: &GeneralConstruction, seq: &SignSequence) -> VerificationReport {
    let mut report = VerificationReport::default();
    let horizon = seq.horizon();
    let levels = gc.levels();
    let mut total = 0u64;
    for idx in 1..levels.len() {
        let child = &levels[idx];
        let parent = &levels[idx - 1];
        let p = child.prime.unwrap();
        let a = child.exponent.unwrap();
        let b = parent.modulus;
        for head in parent.free_in_range(1, horizon) {
            let r = (head - 1) % b + 1;
            let w = (head - r) / b;
            if w == 0 || w % p != 0 {
                continue;
            }
            let mut s = 0u32;
            let mut ww = w;
            while ww % p == 0 {
                s += 1;
                ww /= p;
            }
            let s = s.min(a);
            let last = head + (p.pow(s) - 1) * r;
            if last > horizon {
                continue;
            }
            total += 1;
            let sum: i64 = (0..=s)
                .map(|i| seq.get(head + (p.pow(i) - 1) * r) as i64)
                .sum();
            let want = if s % 2 == 1 { 0 } else { seq.get(head) as i64 };
            if sum != want {
                report.fail(
                    format!("telescoping (level {})", child.level),
                    format!("head {head}, length {}, sum {sum}, want {want}", s + 1),
                );
                report.record_violation(Violation {
                    index: head,
                    expected: want,
                    actual: sum,
                });
                return report;
            }
        }
    }
    report.pass(format!("telescoping ({total} chains)"));
    report
}

/// Every relation of the {2,3,5} program holds verbatim on a table, and the
/// odd half of every thirty-block collapses to its 17-residue entry.
pub fn check_program235(seq: &SignSequence, program: &Program235) -> VerificationReport {
    let mut report = VerificationReport::default();
    let n_max = seq.horizon();
    let value = |x: u64| -> i64 {
        let (s, rough) = seq.reduce(x);
        (s * seq.get(rough)) as i64
    };

    let mut check = |name: &str, target: u64, want: i64, report: &mut VerificationReport| -> bool {
        let got = seq.get(target) as i64;
        if got != want {
            report.fail(name.to_string(), format!("target {target}: {got} vs {want}"));
            report.record_violation(Violation {
                index: target,
                expected: want,
                actual: got,
            });
            false
        } else {
            true
        }
    };

    let mut ok = true;
    'outer: for m in 0..=n_max / 30 {
        for &(t, s) in &program.odd_pairs {
            let target = 30 * m + t;
            if target > n_max {
                continue;
            }
            if !check("odd pair", target, -value(30 * m + s), &mut report) {
                ok = false;
                break 'outer;
            }
        }
        let target = 30 * m + 17;
        if target > n_max || m == 0 {
            continue;
        }
        let want = if m % 2 == 0 {
            -value(30 * m + 34)
        } else if m % 8 == 5 || m % 32 == 17 || m % 64 == 1 {
            -value(30 * (m - 1) + 17)
        } else {
            let j = m % 64;
            let i = match program.j_index(j) {
                Some(i) => i,
                None => {
                    report.fail("window coverage", format!("position {j} uncovered"));
                    ok = false;
                    break 'outer;
                }
            };
            if i <= program.paired {
                -value(1920 * (m / 64) + 128 * i as u64)
            } else {
                program.tail_signs[i - 1 - program.paired] as i64
            }
        };
        if !check("17-residue rule", target, want, &mut report) {
            ok = false;
            break 'outer;
        }
    }
    if ok {
        report.pass("all program relations hold verbatim");
    }

    // odd-block identity
    let mut identity_ok = true;
    for m in 0..n_max / 30 {
        let sum: i64 = (1..=15).map(|t| seq.get(30 * m + 2 * t - 1) as i64).sum();
        if sum != seq.get(30 * m + 17) as i64 {
            report.fail("odd-block identity", format!("m={m}: {sum}"));
            identity_ok = false;
            break;
        }
    }
    if identity_ok {
        report.pass("odd-block identity");
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Sat,
    Unsat,
    ExhaustedBudget,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub prime_signs: BTreeMap<u64, i8>,
    /// signs at the rough decision indices, ascending
    pub rough_signs: Vec<(u64, i8)>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub witness: Option<Witness>,
    pub nodes_explored: u64,
    pub backtracks: u64,
}

/// Depth-first search over sign choices at the primes of the set and at the
/// rough indices, deriving composite values by multiplicativity and pruning
/// any prefix whose partial sum leaves [-bound, bound]. Explores -1 before
/// +1, so the first witness found is the lexicographically smallest.
pub fn brute_force_search(
    set: &PrimeSet,
    bound: i64,
    horizon: u64,
    budget: u64,
) -> SearchResult {
    assert!(bound >= 0);
    assert!(horizon >= 1);
    let n = horizon as usize;
    let mut values = vec![0i8; n + 1];
    let mut sums = vec![0i64; n + 1];
    // decision stack: (index, tried_plus)
    let mut decisions: Vec<(usize, bool)> = Vec::new();
    let mut nodes = 0u64;
    let mut backtracks = 0u64;

    let derive = |values: &[i8], m: usize, set: &PrimeSet| -> Option<i8> {
        if m == 1 {
            return Some(1);
        }
        for &p in set.primes() {
            let p = p as usize;
            if m % p == 0 && m != p {
                return Some(values[p] * values[m / p]);
            }
        }
        None // a decision index: a member prime or a rough number
    };

    let mut m = 1usize;
    loop {
        if m > n {
            let mut prime_signs = BTreeMap::new();
            for &p in set.primes() {
                if (p as usize) <= n {
                    prime_signs.insert(p, values[p as usize]);
                }
            }
            let rough_signs = (2..=n)
                .filter(|&i| set.is_rough(i as u64))
                .map(|i| (i as u64, values[i]))
                .collect();
            return SearchResult {
                status: SearchStatus::Sat,
                witness: Some(Witness { prime_signs, rough_signs }),
                nodes_explored: nodes,
                backtracks,
            };
        }
        if nodes >= budget {
            return SearchResult {
                status: SearchStatus::ExhaustedBudget,
                witness: None,
                nodes_explored: nodes,
                backtracks,
            };
        }

        let prev = sums[m - 1];
        let (value, decision) = match derive(&values, m, set) {
            Some(v) => (v, false),
            None => (-1i8, true), // -1 first
        };
        nodes += 1;
        values[m] = value;
        sums[m] = prev + value as i64;
        if sums[m].abs() <= bound {
            if decision {
                decisions.push((m, false));
            }
            m += 1;
            continue;
        }

        // pruned: flip here if this was a fresh decision, otherwise backtrack
        if decision {
            nodes += 1;
            values[m] = 1;
            sums[m] = prev + 1;
            if sums[m].abs() <= bound {
                decisions.push((m, true));
                m += 1;
                continue;
            }
        }
        loop {
            backtracks += 1;
            match decisions.pop() {
                None => {
                    return SearchResult {
                        status: SearchStatus::Unsat,
                        witness: None,
                        nodes_explored: nodes,
                        backtracks,
                    };
                }
                Some((idx, tried_plus)) => {
                    for v in values.iter_mut().take(m + 1).skip(idx) {
                        *v = 0;
                    }
                    if tried_plus {
                        continue; // both signs exhausted here
                    }
                    nodes += 1;
                    values[idx] = 1;
                    sums[idx] = sums[idx - 1] + 1;
                    if sums[idx].abs() <= bound {
                        decisions.push((idx, true));
                        m = idx + 1;
                        break;
                    }
                }
            }
        }
    }
}

/// The pruning predicate on an existing table: |S(n)| <= bound everywhere.
pub fn replay_within_bound(seq: &SignSequence, bound: i64) -> Result<bool> {
    let mut sum = 0i64;
    for n in 1..=seq.horizon() {
        match seq.get(n) {
            UNSET => return Err(Error::UnsetValue(n)),
            v => sum += v as i64,
        }
        if sum.abs() > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::eval;
    use crate::small::{construct_p23, construct_p235, Seeds23};

    #[test]
    fn multiplicativity_passes_on_construction() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let seq = construct_p23(6000, Seeds23::default()).unwrap();
        assert!(check_multiplicativity(&seq, &set).passed());
    }

    #[test]
    fn multiplicativity_catches_single_flip() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let mut seq = construct_p23(60, Seeds23::default()).unwrap();
        // flip v[4] via a fresh table
        let mut values = seq.values().to_vec();
        values[4] = -values[4];
        seq = SignSequence::from_values(values, seq.prime_signs().clone()).unwrap();
        let report = check_multiplicativity(&seq, &set);
        assert!(!report.passed());
        let v = report.first_violation.unwrap();
        assert_eq!(v.index, 4); // witness p=2, n=2
    }

    #[test]
    fn multiplicativity_all_ones() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let values = vec![0i8; 101].iter().map(|_| 1i8).collect::<Vec<_>>();
        let mut values = values;
        values[0] = 0;
        let seq = SignSequence::from_values(values, [(2, 1), (3, 1)].into_iter().collect()).unwrap();
        assert!(check_multiplicativity(&seq, &set).passed());
    }

    #[test]
    fn sharded_scan_matches_single_thread() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let mut values = construct_p23(50_000, Seeds23::default()).unwrap().values().to_vec();
        values[30_000] = -values[30_000];
        let seq = SignSequence::from_values(values, [(2, 1), (3, -1)].into_iter().collect()).unwrap();
        let single = check_multiplicativity_sharded(&seq, &set, 1);
        let many = check_multiplicativity_sharded(&seq, &set, 8);
        assert_eq!(
            single.first_violation.as_ref().map(|v| v.index),
            many.first_violation.as_ref().map(|v| v.index)
        );
    }

    #[test]
    fn bounded_windows() {
        let seq = construct_p23(100_000, Seeds23::default()).unwrap();
        let report = check_bounded(&seq, &[(1, 1000), (1000, 100_000)]);
        assert!(report.passed());
        assert_eq!(report.sup_abs_partial_sum, Some(2));

        let all_ones: Vec<i8> = std::iter::once(0).chain(std::iter::repeat(1).take(1000)).collect();
        let seq = SignSequence::from_values(all_ones, Default::default()).unwrap();
        assert!(!check_bounded(&seq, &[(1, 500), (500, 1000)]).passed());
    }

    #[test]
    fn program235_checks() {
        let seq = construct_p235(1920 * 16, &Program235::default()).unwrap();
        assert!(check_program235(&seq, &Program235::default()).passed());
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        assert!(check_multiplicativity(&seq, &set).passed());
    }

    #[test]
    fn search_forced_unsat_at_one() {
        let set = PrimeSet::new(&[2]).unwrap();
        let r = brute_force_search(&set, 0, 1, 1000);
        assert_eq!(r.status, SearchStatus::Unsat);
    }

    #[test]
    fn search_finds_small_witness() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let r = brute_force_search(&set, 2, 1000, 10_000_000);
        assert_eq!(r.status, SearchStatus::Sat);
        // replay the witness through the bound predicate
        let w = r.witness.unwrap();
        let mut values = vec![0i8; 1001];
        values[1] = 1;
        for &(i, s) in &w.rough_signs {
            values[i as usize] = s;
        }
        for &p in set.primes() {
            values[p as usize] = w.prime_signs[&p];
        }
        for m in 2..=1000usize {
            for &p in set.primes() {
                let p = p as usize;
                if m % p == 0 && m != p {
                    values[m] = values[p] * values[m / p];
                    break;
                }
            }
        }
        let seq = SignSequence::from_values(values, w.prime_signs.clone()).unwrap();
        assert!(replay_within_bound(&seq, 2).unwrap());
    }

    #[test]
    fn search_max_horizon_at_bound_one() {
        // Oracle-produced value: with bound 1 over {2,3} the tree is refuted
        // first at horizon 10.
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let mut first_unsat = None;
        for n in 1..=64 {
            let r = brute_force_search(&set, 1, n, 1_000_000);
            if r.status == SearchStatus::Unsat {
                first_unsat = Some(n);
                break;
            }
        }
        assert_eq!(first_unsat, Some(10));
    }

    #[test]
    fn search_without_bound_never_backtracks() {
        let set = PrimeSet::new(&[2, 3]).unwrap();
        let r = brute_force_search(&set, i64::MAX, 2000, 10_000_000);
        assert_eq!(r.status, SearchStatus::Sat);
        assert_eq!(r.backtracks, 0);
    }

    #[test]
    fn condition_v_is_deterministic() {
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        let gc = GeneralConstruction::build(&set, 1_000_000).unwrap();
        let a = check_condition_v(&gc, 2, 5, 42, 30 * 50);
        let b = check_condition_v(&gc, 2, 5, 42, 30 * 50);
        assert_eq!(a.passed(), b.passed());
        assert_eq!(format!("{:?}", a.checks_run), format!("{:?}", b.checks_run));
        assert!(a.passed());
    }

    #[test]
    fn condition_v_zero_trials_vacuous() {
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        let gc = GeneralConstruction::build(&set, 1_000_000).unwrap();
        assert!(check_condition_v(&gc, 2, 0, 0, 30 * 10).passed());
    }

    #[test]
    fn condition_v_notices_dropped_pair() {
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        let gc = GeneralConstruction::build(&set, 1_000_000).unwrap();
        let horizon = 30 * 40;
        let mut relations = gc.relations_at_level(2, horizon + 2 * gc.b1());
        // drop one base pair whose target is inside the tested range
        let pos = relations.iter().position(|&(_, y)| y > 60 && y < horizon / 2).unwrap();
        relations.remove(pos);
        let report = check_condition_v_with_relations(&gc, 2, &relations, 64, 7, horizon);
        assert!(!report.passed());
    }

    #[test]
    fn condition_v_exhaustive_small_horizon() {
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        let gc = GeneralConstruction::build(&set, 1_000_000).unwrap();
        let report = check_condition_v_exhaustive(&gc, 2, 120, 20).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn telescoping_on_materialized() {
        let set = PrimeSet::new(&[2, 3, 5]).unwrap();
        let gc = GeneralConstruction::build(&set, 1_000_000).unwrap();
        let horizon = 8 * 1920;
        let program = gc.finalize_default(horizon).unwrap();
        let seq = crate::general::materialize(&program, &set, horizon).unwrap();
        assert!(check_telescoping(&gc, &seq).passed());
        // and the relations hold on the table
        for &(x, y) in &program.relations {
            if y <= horizon {
                assert_eq!(eval(&seq, y).unwrap(), -eval(&seq, x).unwrap());
            }
        }
    }
}
