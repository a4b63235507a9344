use crate::error::{Error, Result};

/// An ascending set of distinct primes `p_1 < ... < p_k` with its product
/// and the subproduct `p_1 * ... * p_{k-2}` used by the level construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    primes: Vec<u64>,
    product: u64,
    coprime_part: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeSet {
    pub fn new(primes: &[u64]) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::InvalidPrimes("empty list".into()));
        }
        for w in primes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidPrimes(format!(
                    "not strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::InvalidPrimes(format!("{p} is not prime")));
            }
        }
        let mut product: u64 = 1;
        for &p in primes {
            product = product
                .checked_mul(p)
                .ok_or(Error::Overflow("prime product"))?;
        }
        let mut coprime_part: u64 = 1;
        for &p in &primes[..primes.len().saturating_sub(2)] {
            coprime_part *= p;
        }
        Ok(PrimeSet {
            primes: primes.to_vec(),
            product,
            coprime_part,
        })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// P, the product of all members.
    pub fn product(&self) -> u64 {
        self.product
    }

    /// P', the product of all members except the two largest.
    pub fn coprime_part(&self) -> u64 {
        self.coprime_part
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// True iff n is divisible by some member.
    pub fn divides(&self, n: u64) -> bool {
        self.primes.iter().any(|&p| n % p == 0)
    }

    /// True iff n is coprime to every member.
    pub fn is_rough(&self, n: u64) -> bool {
        !self.divides(n)
    }
}

/// The split n = (prod p_i^{e_i}) * m with m coprime to the prime set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoughFactorization {
    pub exponents: Vec<u32>,
    pub rough_part: u64,
}

pub fn rough_decompose(n: u64, set: &PrimeSet) -> RoughFactorization {
    assert!(n >= 1, "rough_decompose requires n >= 1");
    let mut m = n;
    let mut exponents = vec![0u32; set.len()];
    for (i, &p) in set.primes().iter().enumerate() {
        while m % p == 0 {
            m /= p;
            exponents[i] += 1;
        }
    }
    RoughFactorization {
        exponents,
        rough_part: m,
    }
}

impl RoughFactorization {
    pub fn recompose(&self, set: &PrimeSet) -> Result<u64> {
        let mut n = self.rough_part;
        for (i, &p) in set.primes().iter().enumerate() {
            for _ in 0..self.exponents[i] {
                n = n.checked_mul(p).ok_or(Error::Overflow("recompose"))?;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sets() {
        assert!(PrimeSet::new(&[]).is_err());
        assert!(PrimeSet::new(&[3, 2]).is_err());
        assert!(PrimeSet::new(&[2, 2]).is_err());
        assert!(PrimeSet::new(&[2, 4]).is_err());
    }

    #[test]
    fn products() {
        let s = PrimeSet::new(&[2, 3, 5]).unwrap();
        assert_eq!(s.product(), 30);
        assert_eq!(s.coprime_part(), 2);
        let s = PrimeSet::new(&[3, 5, 7]).unwrap();
        assert_eq!(s.product(), 105);
        assert_eq!(s.coprime_part(), 3);
        let s = PrimeSet::new(&[2, 3]).unwrap();
        assert_eq!(s.coprime_part(), 1);
    }

    #[test]
    fn decompose_examples() {
        let s23 = PrimeSet::new(&[2, 3]).unwrap();
        let f = rough_decompose(12, &s23);
        assert_eq!(f.exponents, vec![2, 1]);
        assert_eq!(f.rough_part, 1);

        let s235 = PrimeSet::new(&[2, 3, 5]).unwrap();
        let f = rough_decompose(1, &s235);
        assert_eq!(f.exponents, vec![0, 0, 0]);
        assert_eq!(f.rough_part, 1);

        // 227 = 30*7 + 17 is coprime to 30; oracle: trial division below.
        let n = 227u64;
        assert!(n % 2 != 0 && n % 3 != 0 && n % 5 != 0);
        let f = rough_decompose(n, &s235);
        assert_eq!(f.exponents, vec![0, 0, 0]);
        assert_eq!(f.rough_part, 227);
    }

    #[test]
    fn recompose_round_trip() {
        let s = PrimeSet::new(&[2, 3, 5]).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(rough_decompose(n, &s).recompose(&s).unwrap(), n);
        }
    }
}
