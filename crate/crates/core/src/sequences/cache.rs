use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{binomial, Rule, SeqError, SequenceSpec};
use crate::exactnum::{int, rat, rat_add, rat_div, rat_mul, Rational};

pub const DEFAULT_CEILING: usize = 100_000;

/// Append-only memo of exact terms.
#[derive(Debug, Clone)]
pub struct TermCache {
    spec: SequenceSpec,
    first: i64,
    terms: Vec<Rational>,
    ceiling: usize,
    /// Current Bell triangle row.
    bell_row: Vec<BigInt>,
}

impl TermCache {
    pub fn new(spec: SequenceSpec) -> Self {
        Self::with_ceiling(spec, DEFAULT_CEILING)
    }

    pub fn with_ceiling(spec: SequenceSpec, ceiling: usize) -> Self {
        let first = spec.first_index();
        let terms = spec.initial_terms.iter().map(|(_, t)| t.clone()).collect();
        TermCache {
            spec,
            first,
            terms,
            ceiling,
            bell_row: vec![BigInt::one()],
        }
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    /// Highest index computed so far.
    pub fn computed_to(&self) -> i64 {
        self.first + self.terms.len() as i64 - 1
    }

    /// Drop every computed term beyond the initial ones.
    pub fn clear(&mut self) {
        *self = Self::with_ceiling(self.spec.clone(), self.ceiling);
    }

    pub fn term(&mut self, n: i64) -> Result<Rational, SeqError> {
        self.warm(n)?;
        Ok(self.terms[(n - self.first) as usize].clone())
    }

    /// Compute every term up to `n`.
    pub fn warm(&mut self, n: i64) -> Result<(), SeqError> {
        if n < self.first {
            return Err(SeqError::BelowRange { n, first: self.first });
        }
        if (n - self.first) as usize >= self.ceiling {
            return Err(SeqError::CeilingExceeded { n, ceiling: self.ceiling });
        }
        while self.computed_to() < n {
            let next = self.next_term()?;
            self.terms.push(next);
        }
        Ok(())
    }

    /// Read a warmed term without mutation.
    pub fn get(&self, n: i64) -> Option<&Rational> {
        (n >= self.first).then(|| self.terms.get((n - self.first) as usize))?
    }

    /// Terms on `[from, to]`.
    pub fn range(&mut self, from: i64, to: i64) -> Result<Vec<Rational>, SeqError> {
        if to < from {
            return Ok(Vec::new());
        }
        self.warm(to)?;
        if from < self.first {
            return Err(SeqError::BelowRange { n: from, first: self.first });
        }
        let lo = (from - self.first) as usize;
        let hi = (to - self.first) as usize;
        Ok(self.terms[lo..=hi].to_vec())
    }

    /// `a_n / a_{n−1}`.
    pub fn ratio(&mut self, n: i64) -> Result<Rational, SeqError> {
        let prev = self.term(n - 1)?;
        if prev.is_zero() {
            return Err(SeqError::ZeroPredecessor { at: n - 1 });
        }
        Ok(rat_div(&self.term(n)?, &prev))
    }

    fn next_term(&mut self) -> Result<Rational, SeqError> {
        let n = self.computed_to() + 1;
        let last = |k: usize| &self.terms[self.terms.len() - k];
        let nn = int(n);
        Ok(match &self.spec.rule {
            Rule::Recurrence => {
                let u = self.spec.u.as_ref().expect("recurrence without u");
                let pole = |_| SeqError::Pole { at: n };
                let mut t = rat_mul(&u.eval(n).map_err(pole)?, last(1));
                if let Some(v) = self.spec.v.as_ref().filter(|v| !v.is_zero()) {
                    t = rat_add(&t, &rat_mul(&v.eval(n).map_err(pole)?, last(2)));
                }
                if let Some(e) = &self.spec.extra {
                    t = rat_add(&t, &e.at(n));
                }
                t
            }
            Rule::Catalan => rat_mul(last(1), &rat(2 * (2 * n - 1), n + 1)),
            Rule::CentralBinomial => rat_mul(last(1), &rat(2 * (2 * n - 1), n)),
            Rule::Harmonic { m } => rat_add(last(1), &(Rational::one() / num_traits::pow(nn, *m as usize))),
            Rule::BernoulliAbsEven => self.bernoulli_abs_even(n),
            Rule::Bell => {
                let mut row = Vec::with_capacity(self.bell_row.len() + 1);
                row.push(self.bell_row.last().unwrap().clone());
                for above in &self.bell_row {
                    let x = row.last().unwrap() + above;
                    row.push(x);
                }
                self.bell_row = row;
                Rational::from_integer(self.bell_row[0].clone())
            }
        })
    }

    /// `|B_{2k}|` from `Σ_{j<m} C(m+1, j)B_j = −(m+1)B_m` with `m = 2k`,
    /// using `B_0 = 1`, `B_1 = −1/2`, odd `B_j = 0` for `j ≥ 3` and the
    /// alternating sign `B_{2j} = (−1)^{j+1}|B_{2j}|`.
    fn bernoulli_abs_even(&self, k: i64) -> Rational {
        let m = 2 * k as u64;
        let mut sum = Rational::one() - Rational::new((m + 1).into(), 2.into());
        for j in 1..k {
            let bj = &self.terms[(j - self.first) as usize];
            let signed = if j % 2 == 1 { bj.clone() } else { -bj.clone() };
            sum += Rational::from_integer(binomial(m + 1, 2 * j as u64)) * signed;
        }
        let b = -sum / int(m as i64 + 1);
        if k % 2 == 1 {
            b
        } else {
            -b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{builtin, builtin_names};

    fn first(name: &str, m: u32, count: i64) -> Vec<Rational> {
        let mut c = TermCache::new(builtin(name, m).unwrap());
        let f = c.first_index();
        c.range(f, f + count - 1).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(first("motzkin", 0, 6), ints(&[1, 1, 2, 4, 9, 21]));
        assert_eq!(first("domb", 0, 5), ints(&[1, 4, 28, 256, 2716]));
        assert_eq!(first("fine", 0, 6), ints(&[1, 0, 1, 2, 6, 18]));
        assert_eq!(first("harmonic", 1, 3)[2], rat(11, 6));
        assert_eq!(first("bernoulli_abs_even", 0, 3), vec![rat(1, 6), rat(1, 30), rat(1, 42)]);
    }

    #[test]
    fn known_prefixes() {
        assert_eq!(first("catalan", 0, 6), ints(&[1, 1, 2, 5, 14, 42]));
        assert_eq!(first("central_binomial", 0, 5), ints(&[1, 2, 6, 20, 70]));
        assert_eq!(first("delannoy", 0, 6), ints(&[1, 3, 13, 63, 321, 1683]));
        assert_eq!(first("polyhex", 0, 8), ints(&[1, 1, 3, 10, 36, 137, 543, 2219]));
        assert_eq!(first("derangement", 0, 7), ints(&[1, 0, 1, 2, 9, 44, 265]));
        assert_eq!(first("bell", 0, 8), ints(&[1, 1, 2, 5, 15, 52, 203, 877]));
        assert_eq!(first("harmonic", 2, 3), vec![int(1), rat(5, 4), rat(49, 36)]);
        assert_eq!(first("bernoulli_abs_even", 0, 6)[3..], [rat(1, 30), rat(5, 66), rat(691, 2730)]);
    }

    #[test]
    fn ratios() {
        let mut m = TermCache::new(builtin("motzkin", 0).unwrap());
        assert_eq!(m.ratio(4).unwrap(), rat(9, 4));
        let mut f = TermCache::new(builtin("fine", 0).unwrap());
        assert_eq!(f.ratio(2), Err(SeqError::ZeroPredecessor { at: 1 }));
        let mut d = TermCache::new(builtin("delannoy", 0).unwrap());
        assert_eq!(d.ratio(2).unwrap(), rat(13, 3));
        assert_eq!(d.term(-1), Err(SeqError::BelowRange { n: -1, first: 0 }));
    }

    #[test]
    fn integrality_of_first_fifty() {
        for name in builtin_names() {
            let spec = builtin(name, 1).unwrap();
            if !spec.integral {
                continue;
            }
            for (i, t) in first(name, 1, 50).iter().enumerate() {
                assert!(t.denom().is_one(), "{name} term {i} = {t}");
            }
        }
    }

    #[test]
    fn recompute_after_clear() {
        let mut c = TermCache::new(builtin("domb", 0).unwrap());
        let a = c.range(0, 60).unwrap();
        c.clear();
        assert_eq!(c.computed_to(), 1);
        assert_eq!(c.range(0, 60).unwrap(), a);
    }

    #[test]
    fn ceiling() {
        let mut c = TermCache::with_ceiling(builtin("catalan", 0).unwrap(), 10);
        assert!(c.term(9).is_ok());
        assert_eq!(c.term(10), Err(SeqError::CeilingExceeded { n: 10, ceiling: 10 }));
    }

    #[test]
    fn derangement_recurrences_agree() {
        let mut c = TermCache::new(builtin("derangement", 0).unwrap());
        for n in 3..=100 {
            let (a, b, d) = (c.term(n - 2).unwrap(), c.term(n - 1).unwrap(), c.term(n).unwrap());
            assert_eq!(d, int(n - 1) * (b.clone() + a));
            let alt = if n % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(d, int(n) * b + alt);
        }
    }

    #[test]
    fn derangement_exceeds_linear_bound() {
        let mut c = TermCache::new(builtin("derangement", 0).unwrap());
        for n in 5..=10_000 {
            assert!(c.term(n).unwrap() > int(5 * (n + 3)), "n = {n}");
        }
    }
}
