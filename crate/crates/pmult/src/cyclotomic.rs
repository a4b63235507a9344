//! Exact accumulation of sums of roots of unity: integer coefficients on
//! the powers of a fixed primitive root, with zero tested by reduction
//! modulo the cyclotomic polynomial. Floating point appears only on output.

/// Coefficients of the n-th cyclotomic polynomial, constant term first.
/// Built by dividing x^n - 1 by the cyclotomic polynomials of the proper
/// divisors; all divisions are exact over the integers.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    let mut memo: Vec<Option<Vec<i64>>> = vec![None; n as usize + 1];
    fill_cyclotomic(n, &mut memo);
    memo[n as usize].take().unwrap()
}

fn fill_cyclotomic(n: u32, memo: &mut Vec<Option<Vec<i64>>>) {
    if memo[n as usize].is_some() {
        return;
    }
    // x^n - 1
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            fill_cyclotomic(d, memo);
            let phi_d = memo[d as usize].clone().unwrap();
            poly = divide_exact(&poly, &phi_d);
        }
    }
    memo[n as usize] = Some(poly);
}

/// Exact division of integer polynomials with monic divisor.
fn divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    assert_eq!(den[dn], 1, "divisor must be monic");
    let mut rem = num.to_vec();
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division must be exact");
    quot
}

/// An exact element of Z[zeta_order]: sum of coeffs[i] * zeta^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycSum {
    order: u32,
    coeffs: Vec<i64>,
}

impl CycSum {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1);
        CycSum {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Add e^{2 pi i num/ord}; ord must divide the ambient order.
    pub fn add_root(&mut self, num: u32, ord: u32) {
        self.add_root_scaled(num, ord, 1);
    }

    pub fn add_root_scaled(&mut self, num: u32, ord: u32, count: i64) {
        assert!(self.order % ord == 0, "root order {ord} outside basis {}", self.order);
        let idx = (num % ord) * (self.order / ord);
        self.coeffs[idx as usize] += count;
    }

    pub fn add_assign(&mut self, other: &CycSum) {
        assert_eq!(self.order, other.order);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn add_assign_scaled(&mut self, other: &CycSum, count: i64) {
        assert_eq!(self.order, other.order);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * count;
        }
    }

    pub fn sub_assign(&mut self, other: &CycSum) {
        assert_eq!(self.order, other.order);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
    }

    /// The sum multiplied by e^{2 pi i num/ord} (a rotation of the basis).
    pub fn rotated(&self, num: u32, ord: u32) -> CycSum {
        assert!(self.order % ord == 0);
        let shift = (num % ord) * (self.order / ord);
        let n = self.order as usize;
        let mut out = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[(i + shift as usize) % n] += c;
        }
        CycSum {
            order: self.order,
            coeffs: out,
        }
    }

    /// Exact zero test: the coefficient polynomial must reduce to zero
    /// modulo the cyclotomic polynomial of the basis order.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|&c| c == 0) {
            return true;
        }
        let phi = cyclotomic_polynomial(self.order);
        let mut rem = self.coeffs.clone();
        let dn = phi.len() - 1;
        if rem.len() <= dn {
            return rem.iter().all(|&c| c == 0);
        }
        for i in (0..=rem.len() - 1 - dn).rev() {
            let c = rem[i + dn];
            if c != 0 {
                for (j, &d) in phi.iter().enumerate() {
                    rem[i + j] -= c * d;
                }
            }
        }
        rem.iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        let n = self.order as f64;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / n;
                re += c as f64 * theta.cos();
                im += c as f64 * theta.sin();
            }
        }
        (re, im)
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn full_orbit_sums_to_zero() {
        for order in [2u32, 3, 4, 5, 6, 12] {
            let mut s = CycSum::zero(order);
            for i in 0..order {
                s.add_root(i, order);
            }
            assert!(s.is_zero(), "orbit of order {order}");
            assert!(s.abs() < 1e-9);
        }
    }

    #[test]
    fn nonzero_detected_exactly() {
        let mut s = CycSum::zero(3);
        s.add_root(0, 3);
        s.add_root(1, 3);
        assert!(!s.is_zero()); // 1 + omega = -omega^2 != 0
        s.add_root(2, 3);
        assert!(s.is_zero());
    }

    #[test]
    fn rotation_matches_multiplication() {
        let mut s = CycSum::zero(6);
        s.add_root(1, 6);
        s.add_root(1, 2); // -1 as zeta_6^3
        let r = s.rotated(1, 6);
        let (re1, im1) = s.to_complex();
        let theta = std::f64::consts::PI / 3.0;
        let want = (
            re1 * theta.cos() - im1 * theta.sin(),
            re1 * theta.sin() + im1 * theta.cos(),
        );
        let got = r.to_complex();
        assert!((got.0 - want.0).abs() < 1e-9 && (got.1 - want.1).abs() < 1e-9);
    }
}
