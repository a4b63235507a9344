use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Unset table entries are stored as 0; set entries are -1 or +1.
pub const UNSET: i8 = 0;

/// A table of signs on [1, horizon] together with the signs chosen at the
/// primes the table is multiplicative over.
#[derive(Debug, Clone)]
pub struct SignSequence {
    horizon: u64,
    values: Vec<i8>, // index 0 unused
    prime_signs: BTreeMap<u64, i8>,
}

impl SignSequence {
    pub fn new(horizon: u64, prime_signs: BTreeMap<u64, i8>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Horizon("horizon must be at least 1".into()));
        }
        for (&p, &s) in &prime_signs {
            if s != 1 && s != -1 {
                return Err(Error::InvalidSeeds(format!("sign at prime {p} must be +-1")));
            }
        }
        Ok(SignSequence {
            horizon,
            values: vec![UNSET; horizon as usize + 1],
            prime_signs,
        })
    }

    /// Wrap an existing value table (1-based content in values[1..]).
    pub fn from_values(values: Vec<i8>, prime_signs: BTreeMap<u64, i8>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Horizon("value table is empty".into()));
        }
        for (i, &v) in values.iter().enumerate().skip(1) {
            if v != 1 && v != -1 && v != UNSET {
                return Err(Error::Parse(format!("bad value {v} at {i}")));
            }
        }
        if values[1] == -1 {
            return Err(Error::RelationConflict(1));
        }
        Ok(SignSequence {
            horizon: values.len() as u64 - 1,
            values,
            prime_signs,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn prime_signs(&self) -> &BTreeMap<u64, i8> {
        &self.prime_signs
    }

    pub fn prime_sign(&self, p: u64) -> Option<i8> {
        self.prime_signs.get(&p).copied()
    }

    /// 0 when unset.
    #[inline]
    pub fn get(&self, n: u64) -> i8 {
        self.values[n as usize]
    }

    pub fn set(&mut self, n: u64, sign: i8) -> Result<()> {
        if n == 0 || n > self.horizon {
            return Err(Error::Precondition(format!("index {n} out of range")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Precondition(format!("sign must be +-1, got {sign}")));
        }
        if n == 1 && sign != 1 {
            // f(p*1) = f(p)f(1) forces f(1) = +1
            return Err(Error::RelationConflict(1));
        }
        let slot = &mut self.values[n as usize];
        if *slot != UNSET && *slot != sign {
            return Err(Error::RelationConflict(n));
        }
        *slot = sign;
        Ok(())
    }

    pub fn first_unset(&self) -> Option<u64> {
        (1..=self.horizon).find(|&n| self.values[n as usize] == UNSET)
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Reduce n by the primes the table is multiplicative over, returning the
    /// accumulated sign and the remaining rough part.
    pub fn reduce(&self, n: u64) -> (i8, u64) {
        let mut sign = 1i8;
        let mut m = n;
        for (&p, &s) in &self.prime_signs {
            while m % p == 0 {
                m /= p;
                sign *= s;
            }
        }
        (sign, m)
    }
}

/// Evaluate the sequence at n through its rough part, so the result is
/// defined even when the table entry itself was never written.
pub fn eval(seq: &SignSequence, n: u64) -> Result<i8> {
    assert!(n >= 1);
    let (sign, rough) = seq.reduce(n);
    if rough > seq.horizon() {
        return Err(Error::UnsetValue(rough));
    }
    match seq.get(rough) {
        UNSET => Err(Error::UnsetValue(rough)),
        v => Ok(sign * v),
    }
}

/// Running partial sums: checkpoints, the sup of |S|, and where it is first
/// attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSumProfile {
    pub checkpoints: Vec<(u64, i64)>,
    pub sup_abs: i64,
    pub argmax: u64,
}

pub fn prefix_sums(seq: &SignSequence, checkpoint_stride: u64) -> Result<PartialSumProfile> {
    assert!(checkpoint_stride >= 1);
    let mut sum = 0i64;
    let mut sup_abs = 0i64;
    let mut argmax = 0u64;
    let mut checkpoints = Vec::new();
    for n in 1..=seq.horizon() {
        match seq.get(n) {
            UNSET => return Err(Error::UnsetValue(n)),
            v => sum += v as i64,
        }
        if sum.abs() > sup_abs {
            sup_abs = sum.abs();
            argmax = n;
        }
        if n % checkpoint_stride == 0 || n == seq.horizon() {
            checkpoints.push((n, sum));
        }
    }
    Ok(PartialSumProfile {
        checkpoints,
        sup_abs,
        argmax,
    })
}

/// sup |S(n)| over a closed index window, with S accumulated from 1.
pub fn sup_abs_over(seq: &SignSequence, lo: u64, hi: u64) -> Result<i64> {
    let mut sum = 0i64;
    let mut sup = 0i64;
    for n in 1..=hi.min(seq.horizon()) {
        match seq.get(n) {
            UNSET => return Err(Error::UnsetValue(n)),
            v => sum += v as i64,
        }
        if n >= lo && sum.abs() > sup {
            sup = sum.abs();
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(vals: &[i8], signs: &[(u64, i8)]) -> SignSequence {
        let mut v = vec![UNSET];
        v.extend_from_slice(vals);
        SignSequence::from_values(v, signs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn forced_value_at_one() {
        let mut s = SignSequence::new(6, BTreeMap::new()).unwrap();
        assert!(s.set(1, -1).is_err());
        assert!(s.set(1, 1).is_ok());
        assert!(s.set(2, 1).is_ok());
        assert!(s.set(2, -1).is_err()); // conflicting rewrite
    }

    #[test]
    fn eval_first_block() {
        // f(2)=1, f(3)=-1 assignment: first six values 1,1,-1,1,-1,-1
        let s = table(&[1, 1, -1, 1, -1, -1], &[(2, 1), (3, -1)]);
        assert_eq!(eval(&s, 6).unwrap(), -1);
        assert_eq!(eval(&s, 1).unwrap(), 1);
        // 12 = 2^2 * 3 evaluates through the rough part
        assert_eq!(eval(&s, 12).unwrap(), -1);
    }

    #[test]
    fn prefix_sums_first_block() {
        let s = table(&[1, 1, -1, 1, -1, -1], &[(2, 1), (3, -1)]);
        let p = prefix_sums(&s, 1).unwrap();
        let sums: Vec<i64> = p.checkpoints.iter().map(|&(_, s)| s).collect();
        assert_eq!(sums, vec![1, 2, 1, 2, 1, 0]);
        assert_eq!(p.sup_abs, 2);
        assert_eq!(p.argmax, 2);
    }

    #[test]
    fn prefix_sums_all_ones() {
        let s = table(&[1, 1, 1, 1, 1], &[]);
        let p = prefix_sums(&s, 5).unwrap();
        assert_eq!(p.checkpoints.last().copied(), Some((5, 5)));
    }

    #[test]
    fn prefix_sums_reports_gap() {
        let mut s = SignSequence::new(3, BTreeMap::new()).unwrap();
        s.set(1, 1).unwrap();
        s.set(3, 1).unwrap();
        match prefix_sums(&s, 1) {
            Err(Error::UnsetValue(2)) => {}
            other => panic!("expected unset at 2, got {other:?}"),
        }
    }

    #[test]
    fn additivity_over_ranges() {
        let s = table(&[1, -1, 1, 1, -1, -1, 1, -1], &[]);
        let p = prefix_sums(&s, 1).unwrap();
        let sum_at = |n: u64| p.checkpoints[n as usize - 1].1;
        for a in 1..8u64 {
            for b in (a + 1)..=8 {
                let direct: i64 = (a + 1..=b).map(|n| s.get(n) as i64).sum();
                assert_eq!(sum_at(b) - sum_at(a), direct);
            }
        }
    }
}
