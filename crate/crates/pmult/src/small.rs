//! The two explicit hand constructions: the inductive six-block case
//! analysis over {2,3}, and the relation program over {2,3,5}.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sequence::SignSequence;

/// One row of the relation-application log (`target,source,rule`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub target: u64,
    pub source: u64,
    pub rule: &'static str,
}

/// Seed values for the {2,3} construction. f(1) must be +1; the remaining
/// three are free subject to the first block balancing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeds23 {
    pub f1: i8,
    pub f2: i8,
    pub f3: i8,
    pub f5: i8,
}

impl Default for Seeds23 {
    fn default() -> Self {
        Seeds23 {
            f1: 1,
            f2: 1,
            f3: -1,
            f5: -1,
        }
    }
}

/// The values of one six-block: the four entries predetermined by
/// multiplicativity and the two chosen by the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block23State {
    pub block: u64,
    /// values at 6N+2, 6N+3, 6N+4, 6N+6
    pub predetermined: [i8; 4],
    /// values at 6N+1, 6N+5
    pub chosen: [i8; 2],
}

pub fn block23_state(seq: &SignSequence, block: u64) -> Block23State {
    let b = 6 * block;
    Block23State {
        block,
        predetermined: [
            seq.get(b + 2),
            seq.get(b + 3),
            seq.get(b + 4),
            seq.get(b + 6),
        ],
        chosen: [seq.get(b + 1), seq.get(b + 5)],
    }
}

/// The block relation: each half of a six-block sums to +-1 and the two
/// halves cancel. Holds for every complete block of a valid construction.
pub fn block23_star_holds(seq: &SignSequence, block: u64) -> bool {
    let b = 6 * block;
    let first =
        (seq.get(b + 1) + seq.get(b + 2) + seq.get(b + 3)) as i64;
    let second =
        (seq.get(b + 4) + seq.get(b + 5) + seq.get(b + 6)) as i64;
    first.abs() == 1 && second == -first
}

pub fn construct_p23(horizon: u64, seeds: Seeds23) -> Result<SignSequence> {
    build_p23(horizon, seeds, None)
}

pub fn construct_p23_traced(horizon: u64, seeds: Seeds23) -> Result<(SignSequence, Vec<TraceRow>)> {
    let mut trace = Vec::new();
    let seq = build_p23(horizon, seeds, Some(&mut trace))?;
    Ok((seq, trace))
}

fn build_p23(horizon: u64, seeds: Seeds23, mut trace: Option<&mut Vec<TraceRow>>) -> Result<SignSequence> {
    if horizon < 6 {
        return Err(Error::Horizon("the {2,3} construction needs at least one full block".into()));
    }
    let Seeds23 { f1, f2, f3, f5 } = seeds;
    for (name, v) in [("f1", f1), ("f2", f2), ("f3", f3), ("f5", f5)] {
        if v != 1 && v != -1 {
            return Err(Error::InvalidSeeds(format!("{name} must be +-1")));
        }
    }
    if f1 != 1 {
        return Err(Error::InvalidSeeds("f(1) is forced to +1".into()));
    }
    // Block 0 must already balance, otherwise the induction never starts.
    let first = (f1 + f2 + f3) as i64;
    let second = (f2 * f2 + f5 + f2 * f3) as i64;
    if first.abs() != 1 || second != -first {
        return Err(Error::InvalidSeeds(
            "seed block does not balance: choose f(5) = -1 and not both f(2) = f(3) = +1".into(),
        ));
    }

    let mut signs = BTreeMap::new();
    signs.insert(2u64, f2);
    signs.insert(3u64, f3);
    let mut seq = SignSequence::new(horizon, signs)?;

    let mut put = |seq: &mut SignSequence, n: u64, v: i8, src: u64, rule: &'static str| -> Result<()> {
        if n <= horizon {
            seq.set(n, v)?;
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceRow { target: n, source: src, rule });
            }
        }
        Ok(())
    };

    put(&mut seq, 1, f1, 0, "seed")?;
    put(&mut seq, 2, f2, 0, "seed")?;
    put(&mut seq, 3, f3, 0, "seed")?;
    put(&mut seq, 4, f2 * f2, 2, "mult2")?;
    put(&mut seq, 5, f5, 0, "seed")?;
    put(&mut seq, 6, f2 * f3, 3, "mult2")?;

    let mut block = 1u64;
    while 6 * block + 1 <= horizon {
        let b = 6 * block;
        // predetermined by multiplicativity from earlier entries
        let p2 = f2 * seq.get(3 * block + 1);
        let p3 = f3 * seq.get(2 * block + 1);
        let p4 = f2 * seq.get(3 * block + 2);
        let p6 = f2 * seq.get(3 * block + 3);

        let (c1, c5, rule) = if p2 == p3 && p4 == p6 {
            if p2 == p4 {
                return Err(Error::CaseFiveViolation(block));
            }
            (-p2, -p4, "case1")
        } else if p2 == p3 {
            (-p2, -p2, "case2")
        } else if p4 == p6 {
            (-p4, -p4, "case3")
        } else {
            (1, -1, "case4")
        };

        put(&mut seq, b + 1, c1, 0, rule)?;
        put(&mut seq, b + 2, p2, 3 * block + 1, "mult2")?;
        put(&mut seq, b + 3, p3, 2 * block + 1, "mult3")?;
        put(&mut seq, b + 4, p4, 3 * block + 2, "mult2")?;
        put(&mut seq, b + 5, c5, 0, rule)?;
        put(&mut seq, b + 6, p6, 3 * block + 3, "mult2")?;
        block += 1;
    }
    Ok(seq)
}

/// The complete rule set for the {2,3,5} construction: the seven odd-residue
/// pairings inside every thirty-block, the doubling rules on the 17-residue
/// column, the three carry arrows, and the per-window frees (21 positions:
/// the first `paired` are cancelled against multiples of 128, the tail takes
/// fixed alternating signs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program235 {
    /// f(2), f(3), f(5)
    pub prime_signs: [i8; 3],
    /// (target residue, source residue) mod 30, targets among the odd
    /// residues coprime to 30 other than 17
    pub odd_pairs: [(u64, u64); 7],
    /// window positions (mod 64) left free by the doubling rules
    pub j_list: [u64; 21],
    /// how many leading j-list positions are paired with multiples of 128
    pub paired: usize,
    /// the one genuinely free value
    pub f17: i8,
    /// signs assigned to the unpaired tail positions
    pub tail_signs: [i8; 6],
}

impl Default for Program235 {
    fn default() -> Self {
        Program235 {
            prime_signs: [-1, -1, 1],
            odd_pairs: [(1, 3), (7, 5), (11, 9), (13, 15), (19, 21), (23, 25), (29, 27)],
            j_list: [
                3, 7, 9, 11, 15, 19, 23, 25, 27, 31, 33, 35, 39, 41, 43, 47, 51, 55, 57, 59, 63,
            ],
            paired: 15,
            f17: 1,
            // (-1)^i for positions i = 16..21
            tail_signs: [1, -1, 1, -1, 1, -1],
        }
    }
}

impl Program235 {
    pub fn with_f17(f17: i8) -> Self {
        Program235 { f17, ..Default::default() }
    }

    /// Index (1-based) of a window position in the j list.
    pub fn j_index(&self, j: u64) -> Option<usize> {
        self.j_list.iter().position(|&x| x == j).map(|i| i + 1)
    }
}

pub fn construct_p235(horizon: u64, program: &Program235) -> Result<SignSequence> {
    build_p235(horizon, program, None)
}

pub fn construct_p235_traced(
    horizon: u64,
    program: &Program235,
) -> Result<(SignSequence, Vec<TraceRow>)> {
    let mut trace = Vec::new();
    let seq = build_p235(horizon, program, Some(&mut trace))?;
    Ok((seq, trace))
}

fn build_p235(
    horizon: u64,
    program: &Program235,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<SignSequence> {
    if horizon < 1920 {
        return Err(Error::Horizon(
            "the {2,3,5} construction needs at least one full 1920-window".into(),
        ));
    }
    let [f2, f3, f5] = program.prime_signs;
    for v in [f2, f3, f5, program.f17] {
        if v != 1 && v != -1 {
            return Err(Error::InvalidSeeds("signs must be +-1".into()));
        }
    }
    // The even doubling rule at its first instance reads f(17) = -f(2)f(17),
    // which is consistent only when f(2) = -1.
    if f2 != -1 {
        return Err(Error::InvalidSeeds("f(2) must be -1 for the doubling rules".into()));
    }
    if program.paired + program.tail_signs.len() != program.j_list.len() {
        return Err(Error::InvalidSeeds("paired + tail must cover the j list".into()));
    }
    let mut source_of = [0u64; 30];
    for &(t, s) in &program.odd_pairs {
        source_of[t as usize] = s;
    }

    let mut signs = BTreeMap::new();
    signs.insert(2u64, f2);
    signs.insert(3u64, f3);
    signs.insert(5u64, f5);
    let mut seq = SignSequence::new(horizon, signs)?;

    // Evaluate a source index (which may exceed the target) by deflating
    // 2, 3, 5; its rough part is always strictly smaller than the target.
    let reduce = |seq: &SignSequence, x: u64| -> (i8, u64) { seq.reduce(x) };

    for n in 1..=horizon {
        let (value, source, rule): (i8, u64, &'static str) = if n % 2 == 0 {
            (f2 * seq.get(n / 2), n / 2, "mult2")
        } else if n % 3 == 0 {
            (f3 * seq.get(n / 3), n / 3, "mult3")
        } else if n % 5 == 0 {
            (f5 * seq.get(n / 5), n / 5, "mult5")
        } else if n == 1 {
            (1, 0, "seed")
        } else {
            let m = n / 30;
            let k = n % 30;
            if k != 17 {
                let src = 30 * m + source_of[k as usize];
                let (s, rough) = reduce(&seq, src);
                debug_assert!(rough < n);
                (-s * seq.get(rough), src, "odd-pair")
            } else if m == 0 {
                (program.f17, 0, "seed")
            } else if m % 2 == 0 {
                // f(30(2m')+17) = -f(30(2m') + 34)
                let src = 30 * m + 34;
                let (s, rough) = reduce(&seq, src);
                debug_assert!(rough < n);
                (-s * seq.get(rough), src, "double")
            } else if m % 8 == 5 {
                (-seq.get(n - 30), n - 30, "arrow8")
            } else if m % 32 == 17 {
                (-seq.get(n - 30), n - 30, "arrow32")
            } else if m % 64 == 1 {
                (-seq.get(n - 30), n - 30, "arrow64")
            } else {
                let j = m % 64;
                let i = program
                    .j_index(j)
                    .ok_or(Error::RelationConflict(n))?;
                if i <= program.paired {
                    let src = 1920 * (m / 64) + 128 * i as u64;
                    let (s, rough) = reduce(&seq, src);
                    debug_assert!(rough < n);
                    (-s * seq.get(rough), src, "pair128")
                } else {
                    (program.tail_signs[i - 1 - program.paired], 0, "tail")
                }
            }
        };
        seq.set(n, value)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRow { target: n, source, rule });
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::prefix_sums;

    #[test]
    fn first_two_blocks_of_p23() {
        let seq = construct_p23(12, Seeds23::default()).unwrap();
        let want = [1i8, 1, -1, 1, -1, -1, -1, 1, 1, -1, 1, -1];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(seq.get(i as u64 + 1), w, "at {}", i + 1);
        }
        // block 1 predetermined/chosen split
        let st = block23_state(&seq, 1);
        assert_eq!(st.predetermined, [1, 1, -1, -1]);
        assert_eq!(st.chosen, [-1, 1]);
        let p = prefix_sums(&seq, 6).unwrap();
        assert_eq!(p.checkpoints, vec![(6, 0), (12, 0)]);
    }

    #[test]
    fn p23_block_sums_and_star() {
        let n = 60_000;
        let seq = construct_p23(n, Seeds23::default()).unwrap();
        let p = prefix_sums(&seq, 6).unwrap();
        for &(x, s) in &p.checkpoints {
            if x % 6 == 0 {
                assert_eq!(s, 0, "block sum at {x}");
            }
        }
        assert_eq!(p.sup_abs, 2);
        for b in 0..n / 6 {
            assert!(block23_star_holds(&seq, b), "star fails at block {b}");
        }
    }

    #[test]
    fn p23_rejects_unbalanced_seeds() {
        let bad = Seeds23 { f1: 1, f2: 1, f3: 1, f5: -1 };
        assert!(construct_p23(60, bad).is_err());
        let bad = Seeds23 { f1: 1, f2: 1, f3: -1, f5: 1 };
        assert!(construct_p23(60, bad).is_err());
        // the other balanced seeds are accepted
        let ok = Seeds23 { f1: 1, f2: -1, f3: 1, f5: -1 };
        let seq = construct_p23(600, ok).unwrap();
        assert_eq!(prefix_sums(&seq, 6).unwrap().checkpoints.last().unwrap().1, 0);
    }

    #[test]
    fn p235_first_window_values() {
        let seq = construct_p235(1920, &Program235::default()).unwrap();
        // derived odd values in the first thirty-block
        for (n, want) in [(1, 1i8), (7, -1), (11, -1), (13, 1), (19, -1), (23, -1), (29, 1)] {
            assert_eq!(seq.get(n), want, "at {n}");
        }
    }

    #[test]
    fn p235_window_sums_vanish() {
        let n = 1920 * 64;
        let seq = construct_p235(n, &Program235::default()).unwrap();
        let p = prefix_sums(&seq, 1920).unwrap();
        for &(x, s) in &p.checkpoints {
            if x % 1920 == 0 {
                assert_eq!(s, 0, "window sum at {x}");
            }
        }
        // the f(17) seed is genuinely free
        let seq = construct_p235(n, &Program235::with_f17(-1)).unwrap();
        let p = prefix_sums(&seq, 1920).unwrap();
        for &(x, s) in &p.checkpoints {
            if x % 1920 == 0 {
                assert_eq!(s, 0, "window sum at {x} with f17=-1");
            }
        }
    }

    #[test]
    fn p235_odd_block_identity() {
        // sum of the fifteen odd entries of every thirty-block equals the
        // 17-residue entry
        let n = 1920 * 8;
        let seq = construct_p235(n, &Program235::default()).unwrap();
        for m in 0..n / 30 {
            let s: i64 = (1..=15).map(|t| seq.get(30 * m + 2 * t - 1) as i64).sum();
            assert_eq!(s, seq.get(30 * m + 17) as i64, "at m={m}");
        }
    }

    #[test]
    fn trace_has_rule_rows() {
        let (_, trace) = construct_p23_traced(12, Seeds23::default()).unwrap();
        assert!(trace.iter().any(|r| r.rule == "case1"));
        assert!(trace.iter().any(|r| r.rule.starts_with("mult")));
        let (_, trace) = construct_p235_traced(1920, &Program235::default()).unwrap();
        assert!(trace.iter().any(|r| r.rule == "pair128"));
        assert!(trace.iter().any(|r| r.rule == "tail"));
    }
}
