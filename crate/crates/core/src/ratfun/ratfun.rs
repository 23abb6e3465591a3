use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};


use super::poly::Poly;
use super::RatFunError;
use crate::exactnum::{Field, QuadNum, Rational};

/// Rational function `numer(n) / denom(n)` in lowest terms with a monic
/// denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFun<F> {
    numer: Poly<F>,
    denom: Poly<F>,
}

impl<F: Field> RatFun<F> {
    pub fn new(numer: Poly<F>, denom: Poly<F>) -> Result<Self, RatFunError> {
        if denom.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::normalized(numer, denom))
    }

    fn normalized(numer: Poly<F>, denom: Poly<F>) -> Self {
        if numer.is_zero() {
            return RatFun {
                numer,
                denom: Poly::one(),
            };
        }
        let g = Poly::gcd(&numer, &denom);
        let (numer, denom) = if g.is_constant() {
            (numer, denom)
        } else {
            (numer.div_rem(&g).0, denom.div_rem(&g).0)
        };
        let lc_inv = F::one() / denom.leading().unwrap().clone();
        RatFun {
            numer: numer.scale(&lc_inv),
            denom: denom.scale(&lc_inv),
        }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFun {
            numer: p,
            denom: Poly::one(),
        }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(i: i64) -> Self {
        Self::constant(F::from_int(i))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    /// The rational function `n`.
    pub fn var() -> Self {
        Self::from_poly(Poly::var())
    }

    pub fn numer(&self) -> &Poly<F> {
        &self.numer
    }

    pub fn denom(&self) -> &Poly<F> {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denom.is_constant()
    }

    pub fn as_constant(&self) -> Option<F> {
        (self.numer.is_constant() && self.denom.is_constant())
            .then(|| self.numer.coeff(0) / self.denom.coeff(0))
    }

    /// Exact value at an integer, or the offending index when `denom(n) = 0`.
    pub fn eval(&self, n: i64) -> Result<F, RatFunError> {
        let d = self.denom.eval_int(n);
        if d.is_zero() {
            return Err(RatFunError::Pole { at: n });
        }
        Ok(self.numer.eval_int(n) / d)
    }

    pub fn eval_at(&self, x: &F) -> Option<F> {
        let d = self.denom.eval(x);
        (!d.is_zero()).then(|| self.numer.eval(x) / d)
    }

    /// `f(n + t)`.
    pub fn shift(&self, t: i64) -> Self {
        Self::normalized(self.numer.shift(t), self.denom.shift(t))
    }

    pub fn pow(&self, k: u32) -> Self {
        RatFun {
            numer: self.numer.pow(k),
            denom: self.denom.pow(k),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::normalized(self.numer.scale(c), self.denom.clone())
    }

    pub fn inv(&self) -> Result<Self, RatFunError> {
        RatFun::new(self.denom.clone(), self.numer.clone())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, RatFunError> {
        if rhs.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::normalized(
            &self.numer * &rhs.denom,
            &self.denom * &rhs.numer,
        ))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RatFun<G> {
        RatFun::normalized(self.numer.map(&f), self.denom.map(&f))
    }

    pub fn to_quad(&self) -> RatFun<QuadNum> {
        self.map(Field::to_quad)
    }
}

impl RatFun<QuadNum> {
    pub fn to_rational(&self) -> Option<RatFun<Rational>> {
        Some(RatFun::normalized(
            self.numer.to_rational()?,
            self.denom.to_rational()?,
        ))
    }

    pub fn radicand(&self) -> u64 {
        match self.numer.radicand() {
            1 => self.denom.radicand(),
            d => d,
        }
    }
}

impl<'a, F: Field> Add<&'a RatFun<F>> for &'a RatFun<F> {
    type Output = RatFun<F>;
    fn add(self, rhs: &RatFun<F>) -> RatFun<F> {
        if self.denom == rhs.denom {
            return RatFun::normalized(&self.numer + &rhs.numer, self.denom.clone());
        }
        RatFun::normalized(
            &(&self.numer * &rhs.denom) + &(&rhs.numer * &self.denom),
            &self.denom * &rhs.denom,
        )
    }
}

impl<'a, F: Field> Sub<&'a RatFun<F>> for &'a RatFun<F> {
    type Output = RatFun<F>;
    fn sub(self, rhs: &RatFun<F>) -> RatFun<F> {
        if self.denom == rhs.denom {
            return RatFun::normalized(&self.numer - &rhs.numer, self.denom.clone());
        }
        RatFun::normalized(
            &(&self.numer * &rhs.denom) - &(&rhs.numer * &self.denom),
            &self.denom * &rhs.denom,
        )
    }
}

impl<'a, F: Field> Mul<&'a RatFun<F>> for &'a RatFun<F> {
    type Output = RatFun<F>;
    fn mul(self, rhs: &RatFun<F>) -> RatFun<F> {
        RatFun::normalized(&self.numer * &rhs.numer, &self.denom * &rhs.denom)
    }
}

/// Panics when dividing by the zero function; see [`RatFun::checked_div`].
impl<'a, F: Field> Div<&'a RatFun<F>> for &'a RatFun<F> {
    type Output = RatFun<F>;
    fn div(self, rhs: &RatFun<F>) -> RatFun<F> {
        self.checked_div(rhs)
            .expect("division by the zero rational function")
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for RatFun<F> {
            type Output = RatFun<F>;
            fn $m(self, rhs: RatFun<F>) -> RatFun<F> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<F: Field> Neg for RatFun<F> {
    type Output = RatFun<F>;
    fn neg(self) -> RatFun<F> {
        RatFun {
            numer: -self.numer,
            denom: self.denom,
        }
    }
}

impl<F: Field> fmt::Display for RatFun<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_constant() && self.denom.coeff(0) == F::one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "({})/({})", self.numer, self.denom)
        }
    }
}

/// `rational_part + scale·√radicand`, with each part a rational function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalRatio<F> {
    pub rational_part: RatFun<F>,
    pub radicand: RatFun<F>,
    pub scale: RatFun<F>,
}

impl<F: Field> RadicalRatio<F> {
    /// Exact value when the radicand at `n` is a perfect square of a
    /// quadratic number, evaluated in `Q(√·)`.
    pub fn eval(&self, n: i64) -> Result<QuadNum, RatFunError> {
        let r = self.radicand.eval(n)?.to_quad();
        let root = r
            .to_rational()
            .and_then(|q| QuadNum::sqrt_rational(&q))
            .ok_or(RatFunError::NonRationalRadicand { at: n })?;
        let base = self.rational_part.eval(n)?.to_quad();
        let scale = self.scale.eval(n)?.to_quad();
        base.checked_add(&scale.checked_mul(&root)?)
            .map_err(RatFunError::from)
    }
}

impl<F: Field> fmt::Display for RadicalRatio<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}+({})*sqrt({})",
            self.rational_part, self.scale, self.radicand
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    type R = RatFun<Rational>;

    fn rf(n: &[i64], d: &[i64]) -> R {
        R::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(rf(&[1, 2], &[2, 1]).eval(2).unwrap(), rat(5, 4));
        assert_eq!(rf(&[-3, 3], &[2, 1]).eval(1).unwrap(), int(0));
        assert_eq!(
            rf(&[1], &[-3, 1]).eval(3),
            Err(RatFunError::Pole { at: 3 })
        );
    }

    #[test]
    fn normalization() {
        // (n^2 - 1)/(2n + 2) = (n - 1)/2 -> numer (1/2)n - 1/2, denom 1
        let f = rf(&[-1, 0, 1], &[2, 2]);
        assert!(f.is_polynomial());
        assert_eq!(f.numer(), &Poly::new(vec![rat(-1, 2), rat(1, 2)]));
        let g = rf(&[3], &[4, 2]);
        assert_eq!(g.denom(), &Poly::from_ints(&[2, 1]));
        assert_eq!(g.numer(), &Poly::new(vec![rat(3, 2)]));
        assert!(R::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn arithmetic() {
        let u = rf(&[1, 2], &[2, 1]);
        let v = rf(&[-3, 3], &[2, 1]);
        let s = &u + &v;
        assert_eq!(s, rf(&[-2, 5], &[2, 1]));
        assert_eq!(&(&u * &v) / &v, u);
        assert_eq!(&u - &u, R::zero());
        assert!(u.checked_div(&R::zero()).is_err());
        assert_eq!(u.shift(1), rf(&[3, 2], &[3, 1]));
        assert_eq!(rf(&[0, 1], &[1]).to_string(), "n");
        assert_eq!(u.to_string(), "(2*n+1)/(n+2)");
    }
}
