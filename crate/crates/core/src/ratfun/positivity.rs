use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Poly, SturmChain};
use super::ratfun::RatFun;
use super::PositivityError;
use crate::exactnum::{Field, Rational, Sign};
use crate::serde_util;

/// How a [`PositivityCertificate`] discharges "f(n) > 0 for every integer n ≥ N".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivityMethod {
    ShiftedCoefficients,
    SturmWithPrefix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "F: Field")]
pub enum PositivityWitness<F> {
    /// Coefficients of numerator and denominator after `n → n + N`; each list
    /// has a single sign and a nonzero constant term.
    ShiftedCoefficients {
        #[serde(with = "serde_util::scalar_vec")]
        numer: Vec<F>,
        #[serde(with = "serde_util::scalar_vec")]
        denom: Vec<F>,
    },
    /// Every real root of `numer·denom` is at most `root_bound`; `signs`
    /// lists `f(n)` for each integer `N ≤ n ≤ ⌈root_bound⌉`; beyond that the
    /// sign is `eventual_sign`.
    SturmWithPrefix {
        #[serde(with = "serde_util::rational")]
        root_bound: Rational,
        signs: Vec<(i64, Sign)>,
        eventual_sign: Sign,
    },
}

/// Re-checkable evidence that `target(n) > 0` for every integer `n ≥ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct PositivityCertificate<F> {
    pub target: RatFun<F>,
    pub threshold: i64,
    pub method: PositivityMethod,
    pub witness: PositivityWitness<F>,
}

impl<F: Field> PositivityCertificate<F> {
    /// Recompute the witness from `target` and confirm it proves the claim.
    pub fn recheck(&self) -> Result<(), PositivityError> {
        let bad = |why: &str| Err(PositivityError::InvalidWitness(why.to_string()));
        match &self.witness {
            PositivityWitness::ShiftedCoefficients { numer, denom } => {
                let ns = self.target.numer().shift(self.threshold);
                let ds = self.target.denom().shift(self.threshold);
                if ns.coeffs() != numer.as_slice() || ds.coeffs() != denom.as_slice() {
                    return bad("shifted coefficients do not match the target");
                }
                match (uniform_sign(&ns), uniform_sign(&ds)) {
                    (Some(a), Some(b)) if a.times(b) == Sign::Positive => Ok(()),
                    _ => bad("shifted coefficients are not sign-uniform and positive"),
                }
            }
            PositivityWitness::SturmWithPrefix {
                root_bound,
                signs,
                eventual_sign,
            } => {
                let product = self.target.numer() * self.target.denom();
                let chain = SturmChain::new(&product.squarefree());
                if chain.roots_above(root_bound) != 0 {
                    return bad("a real root lies above the recorded bound");
                }
                if *eventual_sign != product.eventual_sign() || *eventual_sign != Sign::Positive {
                    return bad("eventual sign is not positive");
                }
                let last = ceil(root_bound);
                let expected: Vec<i64> = (self.threshold..=last).collect();
                if signs.iter().map(|(n, _)| *n).collect::<Vec<_>>() != expected {
                    return bad("sign table does not cover the prefix");
                }
                for (n, s) in signs {
                    let v = self.target.eval(*n).map_err(|_| PositivityError::Pole { at: *n })?;
                    if v.sign() != *s || *s != Sign::Positive {
                        return bad("sign table entry is wrong or not positive");
                    }
                }
                Ok(())
            }
        }
    }
}

fn ceil(r: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    r.ceil().to_integer().to_i64().expect("root bound out of i64 range")
}

fn floor(r: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    r.floor().to_integer().to_i64().expect("root bound out of i64 range")
}

/// `Some(s)` when every nonzero coefficient has sign `s` and the constant
/// term is nonzero, so `p(n)` has sign `s` for every `n ≥ 0`.
fn uniform_sign<F: Field>(p: &Poly<F>) -> Option<Sign> {
    let s = p.coeffs().first()?.sign();
    if s == Sign::Zero {
        return None;
    }
    p.coeffs()
        .iter()
        .all(|c| matches!(c.sign(), Sign::Zero) || c.sign() == s)
        .then_some(s)
}

/// Cauchy bound: every real root of `p` lies strictly inside `(−B, B)`.
pub fn cauchy_bound<F: Field>(p: &Poly<F>) -> Rational {
    let Some(d) = p.degree().filter(|&d| d > 0) else {
        return Rational::one();
    };
    let m = p.monic();
    let max = m.coeffs()[..d]
        .iter()
        .map(Field::abs_upper_bound)
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::one() + max
}

/// A rational `ρ` at or above every real root of `p`, found by bisecting the
/// Cauchy interval with Sturm counts until the bracket is at most 1 wide.
pub fn sturm_largest_root_bound<F: Field>(p: &Poly<F>) -> Rational {
    assert!(!p.is_zero(), "root bound of the zero polynomial");
    let bound = cauchy_bound(p);
    if p.is_constant() {
        return bound;
    }
    let chain = SturmChain::new(&p.squarefree());
    if chain.real_root_count() == 0 {
        return bound;
    }
    let mut lo = -bound.clone();
    let mut hi = bound;
    let two = Rational::from_integer(2.into());
    while &hi - &lo > Rational::one() {
        let mid = (&lo + &hi) / &two;
        if chain.roots_above(&mid) == 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Certify `f(n) > 0` for every integer `n ≥ start`: shift test first, Sturm
/// root bound with an exhaustive prefix second.
pub fn certify_positive<F: Field>(
    f: &RatFun<F>,
    start: i64,
) -> Result<PositivityCertificate<F>, PositivityError> {
    if f.is_zero() {
        return Err(PositivityError::Refuted {
            at: start,
            value: "0".into(),
        });
    }
    let ns = f.numer().shift(start);
    let ds = f.denom().shift(start);
    if let (Some(a), Some(b)) = (uniform_sign(&ns), uniform_sign(&ds)) {
        if a.times(b) == Sign::Positive {
            return Ok(PositivityCertificate {
                target: f.clone(),
                threshold: start,
                method: PositivityMethod::ShiftedCoefficients,
                witness: PositivityWitness::ShiftedCoefficients {
                    numer: ns.into_coeffs(),
                    denom: ds.into_coeffs(),
                },
            });
        }
        return Err(refuted(f, start));
    }

    let product = f.numer() * f.denom();
    let rho = sturm_largest_root_bound(&product);
    let last = ceil(&rho);
    let mut signs = Vec::new();
    for n in start..=last {
        let v = f.eval(n).map_err(|_| PositivityError::Pole { at: n })?;
        if v.sign() != Sign::Positive {
            return Err(PositivityError::Refuted {
                at: n,
                value: v.to_string(),
            });
        }
        signs.push((n, Sign::Positive));
    }
    let eventual = product.eventual_sign();
    if eventual != Sign::Positive {
        return Err(refuted(f, start.max(floor(&rho) + 1)));
    }
    Ok(PositivityCertificate {
        target: f.clone(),
        threshold: start,
        method: PositivityMethod::SturmWithPrefix,
        witness: PositivityWitness::SturmWithPrefix {
            root_bound: rho,
            signs,
            eventual_sign: eventual,
        },
    })
}

fn refuted<F: Field>(f: &RatFun<F>, at: i64) -> PositivityError {
    match f.eval(at) {
        Ok(v) => PositivityError::Refuted {
            at,
            value: v.to_string(),
        },
        Err(_) => PositivityError::Pole { at },
    }
}

/// Least `N ≥ from` with `f(n) > 0` for every integer `n ≥ N`, or `None` when
/// `f` is not eventually positive.
pub fn positivity_threshold<F: Field>(f: &RatFun<F>, from: i64) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    let product = f.numer() * f.denom();
    if product.eventual_sign() != Sign::Positive {
        return None;
    }
    let ns = f.numer().shift(from);
    let ds = f.denom().shift(from);
    if let (Some(a), Some(b)) = (uniform_sign(&ns), uniform_sign(&ds)) {
        if a.times(b) == Sign::Positive {
            return Some(from);
        }
    }
    let last = ceil(&sturm_largest_root_bound(&product));
    let mut n = last;
    while n >= from {
        match f.eval(n) {
            Ok(v) if v.sign() == Sign::Positive => n -= 1,
            _ => return Some(n + 1),
        }
    }
    Some(from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, QuadNum};

    type R = RatFun<Rational>;

    fn rf(n: &[i64], d: &[i64]) -> R {
        R::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn shift_test_certificate() {
        let c = certify_positive(&rf(&[-5, 1], &[1]), 6).unwrap();
        assert_eq!(c.method, PositivityMethod::ShiftedCoefficients);
        match &c.witness {
            PositivityWitness::ShiftedCoefficients { numer, .. } => {
                assert_eq!(numer, &vec![int(1), int(1)])
            }
            _ => unreachable!(),
        }
        c.recheck().unwrap();
    }

    #[test]
    fn motzkin_v_positive() {
        let c = certify_positive(&rf(&[-3, 3], &[2, 1]), 2).unwrap();
        c.recheck().unwrap();
    }

    #[test]
    fn refutes_at_first_violation() {
        // roots 1 and 9, so every n in [2, 8] violates
        assert_eq!(
            certify_positive(&rf(&[9, -10, 1], &[1]), 2),
            Err(PositivityError::Refuted {
                at: 2,
                value: "-7".into()
            })
        );
        assert_eq!(
            certify_positive(&rf(&[9, -10, 1], &[1]), 3),
            Err(PositivityError::Refuted {
                at: 3,
                value: "-12".into()
            })
        );
        assert!(certify_positive(&rf(&[9, -10, 1], &[1]), 10).is_ok());
        assert!(matches!(
            certify_positive(&R::zero(), 4),
            Err(PositivityError::Refuted { at: 4, .. })
        ));
        assert!(matches!(
            certify_positive(&rf(&[-1], &[1]), 0),
            Err(PositivityError::Refuted { at: 0, .. })
        ));
    }

    #[test]
    fn sturm_path_and_recheck() {
        // positive from 10 on, mixed coefficient signs after shifting by 10
        let f = rf(&[90, -19, 1], &[1]); // (n-9)(n-10)
        let c = certify_positive(&f, 11).unwrap();
        c.recheck().unwrap();
        assert_eq!(
            certify_positive(&f, 9).unwrap_err(),
            PositivityError::Refuted {
                at: 9,
                value: "0".into()
            }
        );
        let mut tampered = c.clone();
        if let PositivityWitness::SturmWithPrefix { root_bound, .. } = &mut tampered.witness {
            *root_bound = int(5);
        }
        if tampered.method == PositivityMethod::SturmWithPrefix {
            assert!(tampered.recheck().is_err());
        }
    }

    #[test]
    fn pole_is_reported() {
        let f = rf(&[1, 0, 1], &[-5, 1]);
        assert_eq!(certify_positive(&f, 3), Err(PositivityError::Refuted { at: 3, value: "-5".into() }));
        assert_eq!(
            certify_positive(&rf(&[-1, 0, 1], &[-25, 0, 1]), 2),
            Err(PositivityError::Refuted {
                at: 2,
                value: "-1/7".into()
            })
        );
        // (n²+1)/(n−5)²: positive at 3 and 4, undefined at 5
        let g = rf(&[1, 0, 1], &[25, -10, 1]);
        assert_eq!(certify_positive(&g, 3), Err(PositivityError::Pole { at: 5 }));
    }

    #[test]
    fn root_bound_examples() {
        let r = sturm_largest_root_bound(&Poly::<Rational>::from_ints(&[-2, 0, 1]));
        assert!(r >= int(1) && r <= int(2), "{r}");
        assert!(&r * &r >= int(2));
        let r = sturm_largest_root_bound(&Poly::<Rational>::from_ints(&[-7, 1]));
        assert!(r >= int(7) && r <= int(8));
        let p = Poly::<Rational>::from_ints(&[1, 0, 1]);
        assert_eq!(sturm_largest_root_bound(&p), cauchy_bound(&p));
    }

    #[test]
    fn threshold_search() {
        let f = rf(&[90, -19, 1], &[1]);
        assert_eq!(positivity_threshold(&f, 0), Some(11));
        assert_eq!(positivity_threshold(&f, 20), Some(20));
        assert_eq!(positivity_threshold(&rf(&[1, -1], &[1]), 0), None);
        assert_eq!(positivity_threshold(&rf(&[1], &[-5, 1]), 0), Some(6));
    }

    #[test]
    fn quadratic_field_target() {
        // n − 3√2 > 0 from 5 (3√2 ≈ 4.243)
        let f = RatFun::from_poly(Poly::new(vec![
            QuadNum::new(int(0), int(-3), 2).unwrap(),
            QuadNum::from_int(1),
        ]));
        assert!(matches!(
            certify_positive(&f, 4),
            Err(PositivityError::Refuted { at: 4, .. })
        ));
        certify_positive(&f, 5).unwrap().recheck().unwrap();
        assert_eq!(positivity_threshold(&f, 0), Some(5));
    }
}
