//! String encodings for exact values in JSON: rationals as `p/q`, quadratic
//! numbers as `a+b*sqrt(d)`, polynomials and rational functions as
//! expressions in `n`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactnum::{Field, QuadNum, Rational};
use crate::expr::{parse_ratfun_in, parse_scalar};
use crate::ratfun::{Poly, RatFun};

fn scalar_from_str<F: Field>(s: &str) -> Result<F, String> {
    let q = parse_scalar(s).map_err(|e| e.to_string())?;
    F::from_quad(&q).ok_or_else(|| format!("{s} is outside the coefficient field"))
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(|_| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

pub mod scalar {
    use super::*;

    pub fn serialize<F: Field, S: Serializer>(x: &F, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, F: Field, D: Deserializer<'de>>(d: D) -> Result<F, D::Error> {
        scalar_from_str(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod scalar_vec {
    use super::*;

    pub fn serialize<F: Field, S: Serializer>(v: &[F], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, F: Field, D: Deserializer<'de>>(d: D) -> Result<Vec<F>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| scalar_from_str(s).map_err(D::Error::custom))
            .collect()
    }
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        scalar_from_str(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl<F: Field> Serialize for RatFun<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, F: Field> Deserialize<'de> for RatFun<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        parse_ratfun_in(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl<F: Field> Serialize for Poly<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, F: Field> Deserialize<'de> for Poly<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = String::deserialize(d)?;
        let f: RatFun<F> = parse_ratfun_in(&src).map_err(D::Error::custom)?;
        if !f.is_polynomial() {
            return Err(D::Error::custom(format!("{src:?} is not a polynomial")));
        }
        let c = f.denom().coeff(0);
        Ok(f.numer().scale(&(F::one() / c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_ratfun;

    #[test]
    fn round_trips() {
        let h = parse_ratfun("((3+2*sqrt(2))*n^2-3/2*n-sqrt(2)*n-sqrt(2)/32)/n^2").unwrap();
        let js = serde_json::to_string(&h).unwrap();
        let back: RatFun<QuadNum> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);

        let p = Poly::<Rational>::from_ints(&[-23, 16, 16]);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, "\"16*n^2+16*n-23\"");
        assert_eq!(serde_json::from_str::<Poly<Rational>>(&js).unwrap(), p);

        let q = h.numer().coeff(1);
        let back: QuadNum = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<RatFun<Rational>>("\"sqrt(2)*n\"").is_err());
    }
}
