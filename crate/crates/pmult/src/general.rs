//! The general construction for an arbitrary prime set of size k > 2.
//!
//! Levels run from k-1 (the base, modulus P) down to 1. Each level j keeps a
//! free set F_j of integers coprime to P and a set of cancellation pairs
//! (x, y) meaning f(y) = -f(x). Both are periodic: the free set is a union
//! of residue classes mod b_j starting at a per-class smallest member, and
//! the pairs are block templates instantiated at every block of length b_j.
//! Refining level j+1 to level j multiplies the modulus by p_j^{a_j} and
//! consumes free elements in three sweeps: elements sitting at a p-multiple
//! of the parent modulus are cancelled against their own p-fold ("scaled"),
//! even-length alternating chains are closed by a parent-modulus shift
//! ("chain close"), and the multiples of p^{a+1} inside each block absorb
//! the smallest remaining free elements ("deep multiple").

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::primes::{rough_decompose, PrimeSet};
use crate::sequence::SignSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationStep {
    Base,
    Scaled,
    ChainClose,
    DeepMultiple,
}

/// One relation pattern, repeated every block: the instance at block M is
/// (x_off + b*M, y_off + b*M). min_block is 1 where the block-0 instance
/// would be degenerate (no valid target, or a self-referential source).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTemplate {
    pub x_off: u64,
    pub y_off: u64,
    pub min_block: u64,
    pub step: RelationStep,
}

/// One level of the construction.
#[derive(Debug, Clone)]
pub struct LevelState {
    /// level index j; the base level is k-1
    pub level: usize,
    /// the prime whose power extended the modulus (refined levels only)
    pub prime: Option<u64>,
    /// b_j
    pub modulus: u64,
    /// a_j with b_j = p_j^{a_j} * b_{j+1} (refined levels only)
    pub exponent: Option<u32>,
    /// smallest member of each free residue class, ascending
    classes: Vec<u64>,
    class_by_residue: BTreeMap<u64, u64>,
    /// relation templates created at this level
    pub pairs: Vec<PairTemplate>,
}

fn canonical_residue(n: u64, b: u64) -> u64 {
    (n - 1) % b + 1
}

impl LevelState {
    fn new(
        level: usize,
        prime: Option<u64>,
        modulus: u64,
        exponent: Option<u32>,
        classes: Vec<u64>,
        pairs: Vec<PairTemplate>,
    ) -> Self {
        let class_by_residue = classes
            .iter()
            .map(|&c| (canonical_residue(c, modulus), c))
            .collect();
        LevelState {
            level,
            prime,
            modulus,
            exponent,
            classes,
            class_by_residue,
            pairs,
        }
    }

    /// Smallest members of the free residue classes, ascending.
    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    /// Membership in the free set.
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self.class_by_residue.get(&canonical_residue(n, self.modulus)) {
            Some(&smallest) => n >= smallest,
            None => false,
        }
    }

    /// Free elements in [lo, hi], ascending.
    pub fn free_in_range(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for &c in &self.classes {
            let mut m = if c >= lo {
                c
            } else {
                c + (lo - c).div_ceil(self.modulus) * self.modulus
            };
            while m <= hi {
                out.push(m);
                m += self.modulus;
            }
        }
        out.sort_unstable();
        out
    }

    pub fn free_count_in_block(&self, block: u64) -> u64 {
        let b = self.modulus;
        self.free_in_range(b * block + 1, b * (block + 1)).len() as u64
    }

    /// Instances of this level's templates inside block M.
    pub fn pairs_in_block(&self, block: u64) -> Vec<(u64, u64)> {
        self.pairs
            .iter()
            .filter(|t| block >= t.min_block)
            .map(|t| (t.x_off + self.modulus * block, t.y_off + self.modulus * block))
            .collect()
    }

    /// All template instances with target at most max_target.
    pub fn pair_instances(&self, max_target: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for t in &self.pairs {
            let mut m = t.min_block;
            loop {
                let y = t.y_off + self.modulus * m;
                if y > max_target {
                    break;
                }
                out.push((t.x_off + self.modulus * m, y));
                m += 1;
            }
        }
        out.sort_unstable_by_key(|&(_, y)| y);
        out
    }
}

/// Base level: in every block of length P, the numbers coprime to P' but
/// divisible by one of the two largest primes are paired, in ascending
/// order, against the numbers coprime to P. The survivors form the free set.
pub fn base_step(set: &PrimeSet, horizon: u64) -> Result<LevelState> {
    let k = set.len();
    if k <= 2 {
        return Err(Error::Precondition(
            "the general construction needs at least three primes".into(),
        ));
    }
    let p = set.product();
    if horizon < 2 * p {
        return Err(Error::Horizon(format!(
            "horizon {horizon} below one full base block (need {})",
            2 * p
        )));
    }
    let pp = set.coprime_part();
    let big = set.primes()[k - 1];
    let second = set.primes()[k - 2];
    let mut fixed = Vec::new(); // divisible by one of the two largest, coprime to the rest
    let mut free = Vec::new(); // coprime to P
    for n in p + 1..=2 * p {
        if set.is_rough(n) {
            free.push(n);
        } else if gcd(n, pp) == 1 && (n % big == 0 || n % second == 0) {
            fixed.push(n);
        }
    }
    if free.len() <= fixed.len() {
        return Err(Error::CountingFailure(
            1,
            format!("{} free vs {} fixed", free.len(), fixed.len()),
        ));
    }
    let pairs = fixed
        .iter()
        .zip(free.iter())
        .map(|(&x, &y)| PairTemplate {
            x_off: x - p,
            y_off: y - p,
            min_block: 1,
            step: RelationStep::Base,
        })
        .collect();
    let classes = free[fixed.len()..].to_vec();
    Ok(LevelState::new(k - 1, None, p, None, classes, pairs))
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Smallest exponent a >= 1 with
/// free_classes * (p^{a-1} - p^{a-2} + ... +- 1) > modulus / p.
pub fn min_exponent(free_classes: u64, p: u64, modulus: u64) -> Result<u32> {
    if free_classes == 0 {
        return Err(Error::Precondition("empty free set".into()));
    }
    if modulus % p != 0 {
        return Err(Error::Precondition(format!("{p} does not divide {modulus}")));
    }
    let target = modulus / p;
    let mut a: u32 = 1;
    let mut alternating: u64 = 1; // p^{a-1} - p^{a-2} + ... for the current a
    loop {
        let lhs = free_classes
            .checked_mul(alternating)
            .ok_or(Error::Overflow("min_exponent"))?;
        if lhs > target {
            return Ok(a);
        }
        a += 1;
        let power = p
            .checked_pow(a - 1)
            .ok_or(Error::Overflow("min_exponent power"))?;
        alternating = power - alternating;
    }
}

/// Refine one level: modulus grows by p^a and the three sweeps consume free
/// elements block by block. The whole level is periodic, so it is derived
/// from block 1 alone and replayed everywhere; block-0 instances keep only
/// the pairs whose structure re-checks there (a scaled pair needs its target
/// strictly above the parent modulus, and deep-multiple pairs would tie a
/// seed-range value to its own scaled copy, so they start at block 1).
pub fn refine_level(parent: &LevelState, p: u64, horizon: u64) -> Result<LevelState> {
    let b = parent.modulus;
    if b % p != 0 || (b / p) % p == 0 {
        return Err(Error::Precondition(format!(
            "prime {p} must divide the parent modulus {b} exactly once"
        )));
    }
    let class_count = parent.classes.len() as u64;
    let a = min_exponent(class_count, p, b)?;
    let scale = p
        .checked_pow(a)
        .ok_or(Error::Overflow("refine_level scale"))?;
    let bp = scale.checked_mul(b).ok_or(Error::Overflow("refine_level modulus"))?;
    if horizon < 2 * bp {
        return Err(Error::Horizon(format!(
            "horizon {horizon} below one full refined block (need {})",
            2 * bp
        )));
    }

    // Build everything from block 1.
    let free = parent.free_in_range(bp + 1, 2 * bp);
    let mut scaled_targets = BTreeSet::new();
    let mut chain_close = Vec::new();
    let mut pairs: Vec<(u64, u64, RelationStep)> = Vec::new();
    for &n in &free {
        let r = canonical_residue(n, b);
        let w = (n - r) / b;
        if w % p != 0 {
            continue;
        }
        // scaled pair: n = p^s b m + r is cancelled against p(b w/p + r)
        let x = n + (p - 1) * r;
        debug_assert!(x > bp && x <= 2 * bp);
        pairs.push((x, n, RelationStep::Scaled));
        scaled_targets.insert(n);
        // chain head with s = min(v_p(w), a); even chains need closing
        let mut s = 0u32;
        let mut ww = w;
        while ww % p == 0 {
            s += 1;
            ww /= p;
        }
        let s = s.min(a);
        if s % 2 == 0 {
            let y = n + b;
            debug_assert!(y <= 2 * bp && parent.contains(y));
            chain_close.push((n, y));
        }
    }
    let chain_close_targets: BTreeSet<u64> = chain_close.iter().map(|&(_, y)| y).collect();
    for (x, y) in chain_close {
        pairs.push((x, y, RelationStep::ChainClose));
    }

    let deep_stride = p
        .checked_pow(a + 1)
        .ok_or(Error::Overflow("refine_level deep stride"))?;
    let deep: Vec<u64> = (b / p + 1..=2 * (b / p)).map(|w| deep_stride * w).collect();
    debug_assert!(deep.iter().all(|&v| v > bp && v <= 2 * bp));

    let remaining: Vec<u64> = free
        .iter()
        .copied()
        .filter(|n| !scaled_targets.contains(n) && !chain_close_targets.contains(n))
        .collect();
    if remaining.len() <= deep.len() {
        return Err(Error::SurplusFailure(
            1,
            format!("{} remaining vs {} deep multiples", remaining.len(), deep.len()),
        ));
    }
    for (i, &v) in deep.iter().enumerate() {
        pairs.push((v, remaining[i], RelationStep::DeepMultiple));
    }

    let mut classes = Vec::new();
    for &n in &remaining[deep.len()..] {
        let offset = n - bp;
        // Survivors repeat from block 0 onward: the offset itself is free in
        // the parent (it lies above the parent modulus and its class start).
        if !parent.contains(offset) {
            return Err(Error::SurplusFailure(
                1,
                format!("survivor offset {offset} escapes the parent free set"),
            ));
        }
        classes.push(offset);
    }

    let templates = pairs
        .into_iter()
        .map(|(x, y, step)| {
            let (x_off, y_off) = (x - bp, y - bp);
            let min_block = match step {
                RelationStep::DeepMultiple => 1,
                RelationStep::Scaled => {
                    let r = canonical_residue(y_off, b);
                    if parent.contains(y_off) && y_off > r { 0 } else { 1 }
                }
                _ => {
                    if parent.contains(y_off) {
                        0
                    } else {
                        1
                    }
                }
            };
            PairTemplate { x_off, y_off, min_block, step }
        })
        .collect();

    Ok(LevelState::new(
        parent.level - 1,
        Some(p),
        bp,
        Some(a),
        classes,
        templates,
    ))
}

/// The full level tower for a prime set, base level first, level 1 last.
#[derive(Debug, Clone)]
pub struct GeneralConstruction {
    prime_set: PrimeSet,
    levels: Vec<LevelState>,
}

impl GeneralConstruction {
    pub fn build(set: &PrimeSet, horizon: u64) -> Result<Self> {
        let mut levels = vec![base_step(set, horizon)?];
        for j in (1..=set.len() - 2).rev() {
            let next = refine_level(levels.last().unwrap(), set.primes()[j - 1], horizon)?;
            levels.push(next);
        }
        Ok(GeneralConstruction {
            prime_set: set.clone(),
            levels,
        })
    }

    pub fn prime_set(&self) -> &PrimeSet {
        &self.prime_set
    }

    /// Levels ordered base (k-1) first down to 1.
    pub fn levels(&self) -> &[LevelState] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> Option<&LevelState> {
        self.levels.iter().find(|l| l.level == j)
    }

    pub fn level_one(&self) -> &LevelState {
        self.levels.last().unwrap()
    }

    pub fn b1(&self) -> u64 {
        self.level_one().modulus
    }

    /// Union of the relation sets of all levels with index >= level_j,
    /// i.e. everything in force at that level.
    pub fn relations_at_level(&self, level_j: usize, max_target: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for lv in &self.levels {
            if lv.level >= level_j {
                out.extend(lv.pair_instances(max_target));
            }
        }
        out.sort_unstable_by_key(|&(_, y)| y);
        out
    }

    /// Ascending free elements of level 1 up to the horizon.
    pub fn chain_elements(&self, max: u64) -> Vec<u64> {
        self.level_one().free_in_range(1, max)
    }

    /// Default prime signs: -1 at the smallest prime, +1 elsewhere.
    pub fn default_prime_signs(&self) -> BTreeMap<u64, i8> {
        let mut signs = BTreeMap::new();
        for (i, &p) in self.prime_set.primes().iter().enumerate() {
            signs.insert(p, if i == 0 { -1 } else { 1 });
        }
        signs
    }

    pub fn finalize(
        &self,
        prime_signs: &BTreeMap<u64, i8>,
        seed_overrides: &BTreeMap<u64, i8>,
        horizon: u64,
    ) -> Result<RuleProgram> {
        finalize(self, prime_signs, seed_overrides, horizon)
    }

    pub fn finalize_default(&self, horizon: u64) -> Result<RuleProgram> {
        self.finalize(&self.default_prime_signs(), &BTreeMap::new(), horizon)
    }
}

/// A materializable rule set: prime signs, cancellation pairs, the
/// alternating chain over the surviving free set, and seed values for the
/// finitely many indices no rule reaches.
#[derive(Debug, Clone)]
pub struct RuleProgram {
    pub prime_signs: BTreeMap<u64, i8>,
    /// (x, y) with f(y) = -f(x)
    pub relations: Vec<(u64, u64)>,
    /// consecutive free survivors (a_i, a_{i+1}) with f(a_{i+1}) = -f(a_i)
    pub chain: Vec<(u64, u64)>,
    pub seeds: Vec<(u64, i8)>,
}

fn finalize(
    gc: &GeneralConstruction,
    prime_signs: &BTreeMap<u64, i8>,
    seed_overrides: &BTreeMap<u64, i8>,
    horizon: u64,
) -> Result<RuleProgram> {
    let b1 = gc.b1();
    if horizon < 2 * b1 {
        return Err(Error::Horizon(format!(
            "horizon {horizon} below two refined blocks (need {})",
            2 * b1
        )));
    }
    let set = gc.prime_set();
    for &p in set.primes() {
        match prime_signs.get(&p) {
            Some(&s) if s == 1 || s == -1 => {}
            _ => return Err(Error::InvalidSeeds(format!("missing or bad sign at prime {p}"))),
        }
    }

    let relations = gc.relations_at_level(1, horizon);
    let mut targets = BTreeSet::new();
    for &(_, y) in &relations {
        if !targets.insert(y) {
            return Err(Error::RelationConflict(y));
        }
    }

    let elements = gc.chain_elements(horizon);
    let mut chain = Vec::with_capacity(elements.len().saturating_sub(1));
    for w in elements.windows(2) {
        if targets.contains(&w[1]) {
            return Err(Error::RelationConflict(w[1]));
        }
        chain.push((w[0], w[1]));
    }
    let chain_targets: BTreeSet<u64> = chain.iter().map(|&(_, y)| y).collect();

    // Everything coprime to P below the refined modulus that no rule
    // reaches is a seed; default signs alternate to keep the seed range flat.
    let mut seeds = Vec::new();
    let mut position = 0usize;
    for n in 1..=b1.min(horizon) {
        if !set.is_rough(n) || targets.contains(&n) || chain_targets.contains(&n) {
            continue;
        }
        let default = if position % 2 == 0 { 1 } else { -1 };
        position += 1;
        let sign = if n == 1 {
            if seed_overrides.get(&1).copied().unwrap_or(1) != 1 {
                return Err(Error::InvalidSeeds("f(1) is forced to +1".into()));
            }
            1
        } else {
            seed_overrides.get(&n).copied().unwrap_or(default)
        };
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidSeeds(format!("seed at {n} must be +-1")));
        }
        seeds.push((n, sign));
    }

    Ok(RuleProgram {
        prime_signs: prime_signs.clone(),
        relations,
        chain,
        seeds,
    })
}

enum Rule {
    None,
    Seed(i8),
    Relation(u64),
    Chain(u64),
}

/// Evaluate a rule program into a full sign table. Composite indices reduce
/// to their rough part; rough indices follow their rule. Resolution runs a
/// worklist so a relation whose source reduces to a later rough index still
/// evaluates; a source reducing to the target itself is accepted only when
/// the accumulated sign makes the relation vacuous, and such a value falls
/// back to its seed.
pub fn materialize(program: &RuleProgram, set: &PrimeSet, horizon: u64) -> Result<SignSequence> {
    let mut rules: Vec<Rule> = Vec::with_capacity(horizon as usize + 1);
    rules.resize_with(horizon as usize + 1, || Rule::None);
    for &(n, s) in &program.seeds {
        if n <= horizon {
            rules[n as usize] = Rule::Seed(s);
        }
    }
    for &(x, y) in &program.relations {
        if y <= horizon {
            if !matches!(rules[y as usize], Rule::None) {
                return Err(Error::RelationConflict(y));
            }
            rules[y as usize] = Rule::Relation(x);
        }
    }
    for &(prev, y) in &program.chain {
        if y <= horizon {
            if !matches!(rules[y as usize], Rule::None) {
                return Err(Error::RelationConflict(y));
            }
            rules[y as usize] = Rule::Chain(prev);
        }
    }

    let mut seq = SignSequence::new(horizon, program.prime_signs.clone())?;
    let mut values = vec![0i8; horizon as usize + 1];
    let mut on_stack = vec![false; horizon as usize + 1];

    let reduce = |n: u64| -> (i8, u64) {
        let f = rough_decompose(n, set);
        let mut sign = 1i8;
        for (i, &p) in set.primes().iter().enumerate() {
            if f.exponents[i] % 2 == 1 {
                sign *= program.prime_signs[&p];
            }
        }
        (sign, f.rough_part)
    };

    let mut stack: Vec<u64> = Vec::new();
    for start in 1..=horizon {
        if values[start as usize] != 0 {
            continue;
        }
        stack.push(start);
        on_stack[start as usize] = true;
        while let Some(&m) = stack.last() {
            if values[m as usize] != 0 {
                on_stack[m as usize] = false;
                stack.pop();
                continue;
            }
            // Work out the single value m depends on.
            let (coeff, rough) = reduce(m);
            let dep: u64;
            if rough < m {
                dep = rough;
            } else {
                match rules[m as usize] {
                    Rule::Seed(s) => {
                        values[m as usize] = s;
                        on_stack[m as usize] = false;
                        stack.pop();
                        continue;
                    }
                    Rule::Relation(x) => {
                        let (cx, rx) = reduce(x);
                        if rx == m {
                            // f(m) = -cx f(m): vacuous when cx = -1
                            if cx == -1 {
                                values[m as usize] = 1;
                                on_stack[m as usize] = false;
                                stack.pop();
                                continue;
                            }
                            return Err(Error::DependencyCycle(m));
                        }
                        if rx > horizon {
                            return Err(Error::UnsetValue(rx));
                        }
                        dep = rx;
                    }
                    Rule::Chain(prev) => dep = prev,
                    Rule::None => {
                        if m == 1 {
                            values[1] = 1;
                            on_stack[1] = false;
                            stack.pop();
                            continue;
                        }
                        return Err(Error::UnsetValue(m));
                    }
                }
            }
            if values[dep as usize] != 0 {
                let v = if rough < m {
                    coeff * values[rough as usize]
                } else {
                    match rules[m as usize] {
                        Rule::Relation(x) => {
                            let (cx, rx) = reduce(x);
                            -cx * values[rx as usize]
                        }
                        Rule::Chain(prev) => -values[prev as usize],
                        _ => unreachable!(),
                    }
                };
                values[m as usize] = v;
                on_stack[m as usize] = false;
                stack.pop();
            } else {
                if on_stack[dep as usize] {
                    return Err(Error::DependencyCycle(dep));
                }
                stack.push(dep);
                on_stack[dep as usize] = true;
            }
        }
    }

    for n in 1..=horizon {
        seq.set(n, values[n as usize])?;
    }
    Ok(seq)
}
