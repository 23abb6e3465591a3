use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::exactnum::{Field, QuadNum, Rational, Sign};

/// Dense univariate polynomial in `n`, lowest degree first. The highest
/// stored coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `n`.
    pub fn var() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    pub fn monomial(c: F, degree: usize) -> Self {
        let mut coeffs = vec![F::zero(); degree];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| F::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_int(&self, n: i64) -> F {
        self.eval(&F::from_int(n))
    }

    pub fn eval_rational(&self, x: &Rational) -> F {
        self.eval(&F::from_rational(x.clone()))
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&(F::one() / lc.clone())),
            None => Poly::zero(),
        }
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `q(n) = p(n + t)`, by Horner expansion in `n + t`.
    pub fn shift(&self, t: i64) -> Self {
        let step = Poly::new(vec![F::from_int(t), F::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &step) + &Poly::constant(c.clone()))
    }

    /// Euclidean division over the field. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc_inv = F::one() / divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return (Poly::zero(), self.clone());
        };
        let mut quot = vec![F::zero(); nd - dd + 1];
        for k in (dd..=nd).rev() {
            let c = rem[k].clone() * lc_inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = rem[idx].clone() - c.clone() * dc.clone();
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Pseudo-remainder `prem(self, divisor)`: the remainder of
    /// `lc(divisor)^(deg self − deg divisor + 1) · self` computed without
    /// dividing by the leading coefficient.
    pub fn pseudo_rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        while let Some(rd) = rem.degree().filter(|&rd| rd >= dd) {
            let top = rem.leading().unwrap().clone();
            let shifted = Poly::monomial(top, rd - dd);
            rem = &rem.scale(&lc) - &(&shifted * divisor);
        }
        rem
    }

    /// Divide out [`Field::content`], leaving a primitive polynomial.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = F::content(&self.coeffs);
        self.scale(&(F::one() / c))
    }

    /// Monic gcd via a primitive pseudo-remainder sequence. `gcd(0, 0) = 0`.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.primitive_part(), b.primitive_part());
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let r = x.pseudo_rem(&y).primitive_part();
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Squarefree part `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Sign of `p(n)` for all sufficiently large `n`.
    pub fn eventual_sign(&self) -> Sign {
        self.leading().map_or(Sign::Zero, Field::sign)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_quad(&self) -> Poly<QuadNum> {
        self.map(Field::to_quad)
    }

    /// Composition `self(inner(n))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * inner) + &Poly::constant(c.clone()))
    }
}

impl Poly<QuadNum> {
    /// Back to rational coefficients, if every coefficient is rational.
    pub fn to_rational(&self) -> Option<Poly<Rational>> {
        self.coeffs
            .iter()
            .map(QuadNum::to_rational)
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }

    /// The common radicand of the coefficients (1 for rational polynomials).
    pub fn radicand(&self) -> u64 {
        self.coeffs
            .iter()
            .map(QuadNum::radicand)
            .find(|&d| d != 1)
            .unwrap_or(1)
    }
}

impl<'a, F: Field> Add<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a, F: Field> Sub<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a, F: Field> Mul<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<F: Field> Add for Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: Poly<F>) -> Poly<F> {
        &self + &rhs
    }
}

impl<F: Field> Sub for Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: Poly<F>) -> Poly<F> {
        &self - &rhs
    }
}

impl<F: Field> Mul for Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: Poly<F>) -> Poly<F> {
        &self * &rhs
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.coeffs.into_iter().map(Neg::neg).collect())
    }
}

/// Negative-looking coefficients print with a leading minus so that the sign
/// folds into the `+`/`-` between terms.
fn split_sign<F: Field>(c: &F) -> (bool, String) {
    let q = c.to_quad();
    let simple = q.is_rational() || q.rat_part().is_zero();
    if !simple {
        return (false, format!("({q})"));
    }
    if q.sign() == Sign::Negative {
        (true, (-q).to_string())
    } else {
        (false, q.to_string())
    }
}

/// Renders in `n`, highest degree first, e.g. `16*n^2+16*n-23`. The output
/// parses back with the expression grammar.
impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = split_sign(c);
            if neg {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let unit = mag == "1";
            match k {
                0 => f.write_str(&mag)?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("n")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sturm chain `p, p', −rem(p, p'), …` of a nonzero polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain<F> {
    chain: Vec<Poly<F>>,
}

impl<F: Field> SturmChain<F> {
    pub fn new(p: &Poly<F>) -> Self {
        assert!(!p.is_zero(), "Sturm chain of the zero polynomial");
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d);
            loop {
                let k = chain.len();
                let r = chain[k - 2].div_rem(&chain[k - 1]).1;
                if r.is_zero() {
                    break;
                }
                // positive rescaling keeps the sign pattern and tames growth
                let r = -r;
                let lc_abs = r.leading().unwrap().clone();
                let r = if lc_abs.sign() == Sign::Negative {
                    r.scale(&(-(F::one() / lc_abs)))
                } else {
                    r.scale(&(F::one() / lc_abs))
                };
                chain.push(r);
            }
        }
        SturmChain { chain }
    }

    pub fn polys(&self) -> &[Poly<F>] {
        &self.chain
    }

    fn variations(signs: impl Iterator<Item = Sign>) -> usize {
        let mut last = Sign::Zero;
        let mut count = 0;
        for s in signs.filter(|s| *s != Sign::Zero) {
            if last != Sign::Zero && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Sign variations of the chain at `x`.
    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.eval_rational(x).sign()))
    }

    /// Sign variations at `+∞`.
    pub fn variations_at_infinity(&self) -> usize {
        Self::variations(self.chain.iter().map(Poly::eventual_sign))
    }

    /// Sign variations at `−∞`.
    pub fn variations_at_neg_infinity(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = p.eventual_sign();
            if p.degree().unwrap_or(0) % 2 == 1 {
                s.flip()
            } else {
                s
            }
        }))
    }

    /// Number of distinct real roots in `(x, +∞)`.
    pub fn roots_above(&self, x: &Rational) -> usize {
        self.variations_at(x) - self.variations_at_infinity()
    }

    /// Number of distinct real roots.
    pub fn real_root_count(&self) -> usize {
        self.variations_at_neg_infinity() - self.variations_at_infinity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    type P = Poly<Rational>;

    #[test]
    fn shift_examples() {
        assert_eq!(P::from_ints(&[-1, 0, 1]).shift(1), P::from_ints(&[0, 2, 1]));
        assert_eq!(
            P::from_ints(&[-23, 16, 16]).shift(2),
            P::from_ints(&[73, 80, 16])
        );
        assert_eq!(P::from_ints(&[5]).shift(7), P::from_ints(&[5]));
        assert_eq!(P::zero().shift(3), P::zero());
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = P::from_ints(&[-4, 0, 3, 1]);
        let b = P::from_ints(&[1, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = P::from_ints(&[-1, 0, 1]); // (n-1)(n+1)
        let b = P::from_ints(&[1, 2, 1]); // (n+1)^2
        assert_eq!(P::gcd(&a, &b), P::from_ints(&[1, 1]));
        assert_eq!(b.squarefree(), P::from_ints(&[1, 1]));
        assert_eq!(P::gcd(&a, &P::zero()), a.monic());
        let c = Poly::new(vec![rat(1, 2), rat(3, 4)]);
        assert_eq!(P::gcd(&c, &c), Poly::new(vec![rat(2, 3), int(1)]));
    }

    #[test]
    fn display() {
        assert_eq!(P::from_ints(&[-23, 16, 16]).to_string(), "16*n^2+16*n-23");
        assert_eq!(P::from_ints(&[0, -1]).to_string(), "-n");
        assert_eq!(Poly::new(vec![rat(-9, 8), int(3)]).to_string(), "3*n-9/8");
        assert_eq!(P::zero().to_string(), "0");
        let s2 = QuadNum::new(int(3), int(2), 2).unwrap();
        let p = Poly::new(vec![QuadNum::new(int(0), rat(-1, 32), 2).unwrap(), s2]);
        assert_eq!(p.to_string(), "(3+2*sqrt(2))*n-1/32*sqrt(2)");
    }

    #[test]
    fn sturm_counts() {
        let p = P::from_ints(&[-2, 0, 1]);
        let s = SturmChain::new(&p);
        assert_eq!(s.real_root_count(), 2);
        assert_eq!(s.roots_above(&int(0)), 1);
        assert_eq!(s.roots_above(&int(2)), 0);
        let s = SturmChain::new(&P::from_ints(&[1, 0, 1]));
        assert_eq!(s.real_root_count(), 0);
        // repeated root counted once
        let s = SturmChain::new(&P::from_ints(&[1, -2, 1]));
        assert_eq!(s.real_root_count(), 1);
    }

    #[test]
    fn sturm_over_quadratic_field() {
        // n - √2 has one root near 1.414
        let p = Poly::new(vec![QuadNum::new(int(0), int(-1), 2).unwrap(), QuadNum::from_int(1)]);
        let s = SturmChain::new(&p);
        assert_eq!(s.roots_above(&rat(141, 100)), 1);
        assert_eq!(s.roots_above(&rat(142, 100)), 0);
    }
}
