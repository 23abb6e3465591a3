use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::DecomposeError;
use crate::exactnum::{Field, QuadNum, Sign};

/// Which side of the square the constant remainder must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqrtMode {
    /// `p = S² − c`
    Minus,
    /// `p = S² + c`
    Plus,
}

/// Polynomial square-root prefix of `p` by top-down coefficient matching,
/// with positive leading coefficient. Returns `(S, p − S²)`; the remainder has
/// degree below `deg S`.
pub fn sqrt_prefix<F: Field>(p: &Poly<F>) -> Result<(Poly<QuadNum>, Poly<QuadNum>), DecomposeError> {
    let p = p.to_quad();
    let deg = p.degree().ok_or(DecomposeError::Zero)?;
    if deg % 2 == 1 {
        return Err(DecomposeError::OddDegree(deg));
    }
    let m = deg / 2;
    let lc = p.leading().unwrap();
    let lead = lc
        .to_rational()
        .filter(|r| Sign::of_rational(r) == Sign::Positive)
        .and_then(|r| QuadNum::sqrt_rational(&r))
        .ok_or_else(|| DecomposeError::LeadingNotSquarable(lc.to_string()))?;
    let (pd, ld) = (p.radicand(), lead.radicand());
    if pd != 1 && ld != 1 && pd != ld {
        return Err(DecomposeError::RadicandMismatch(pd, ld));
    }

    let mut s = vec![QuadNum::zero(); m + 1];
    s[m] = lead.clone();
    let two_lead = lead.clone() + lead;
    for k in (0..m).rev() {
        let partial = Poly::new(s.clone());
        let sq = &partial * &partial;
        s[k] = (p.coeff(m + k) - sq.coeff(m + k)) / two_lead.clone();
    }
    let root = Poly::new(s);
    let rem = &p - &(&root * &root);
    Ok((root, rem))
}

/// Write `p` as `S² − c` (mode minus) or `S² + c` (mode plus) with `c > 0`.
pub fn poly_sqrt_decompose<F: Field>(
    p: &Poly<F>,
    mode: SqrtMode,
) -> Result<(Poly<QuadNum>, QuadNum), DecomposeError> {
    let (root, rem) = sqrt_prefix(p)?;
    if !rem.is_constant() {
        return Err(DecomposeError::NonConstantRemainder {
            root: root.to_string(),
            remainder: rem.to_string(),
        });
    }
    let r = rem.coeff(0);
    let c = match mode {
        SqrtMode::Minus => -r.clone(),
        SqrtMode::Plus => r.clone(),
    };
    if c.sign() != Sign::Positive {
        return Err(DecomposeError::WrongSign {
            root: root.to_string(),
            remainder: r.to_string(),
        });
    }
    Ok((root, c))
}

/// Exact square root of a polynomial that is a perfect square.
pub fn exact_sqrt<F: Field>(p: &Poly<F>) -> Option<Poly<QuadNum>> {
    if p.is_constant() && p.coeff(0).is_one() {
        return Some(Poly::one());
    }
    match sqrt_prefix(p) {
        Ok((root, rem)) if rem.is_zero() => Some(root),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, Rational};

    type P = Poly<Rational>;

    #[test]
    fn motzkin_radicand_minus() {
        let (s, c) = poly_sqrt_decompose(&P::from_ints(&[-23, 16, 16]), SqrtMode::Minus).unwrap();
        assert_eq!(s, Poly::<QuadNum>::from_ints(&[2, 4]));
        assert_eq!(c, QuadNum::from_int(27));
    }

    #[test]
    fn delannoy_radicand_plus() {
        let (s, c) = poly_sqrt_decompose(&P::from_ints(&[9, -32, 32]), SqrtMode::Plus).unwrap();
        let r2 = |b: i64| QuadNum::new(int(0), int(b), 2).unwrap();
        assert_eq!(s, Poly::new(vec![r2(-2), r2(4)]));
        assert_eq!(c, QuadNum::from_int(1));
        assert_eq!(s.to_string(), "4*sqrt(2)*n-2*sqrt(2)");
    }

    #[test]
    fn domb_radicand_fails_with_remainder() {
        let r = P::from_ints(&[-8, 22, -18, 12]);
        let p = &(&r * &r) + &P::from_ints(&[48, -208, 208]);
        match poly_sqrt_decompose(&p, SqrtMode::Minus) {
            Err(DecomposeError::NonConstantRemainder { root, remainder }) => {
                assert_eq!(root, "12*n^3-18*n^2+22*n-8");
                assert_eq!(remainder, "208*n^2-208*n+48");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            poly_sqrt_decompose(&P::from_ints(&[1, 1, 1, 1]), SqrtMode::Plus),
            Err(DecomposeError::OddDegree(3))
        );
        // 16n^2+16n-23 = (4n+2)^2 - 27: wrong sign for plus
        assert!(matches!(
            poly_sqrt_decompose(&P::from_ints(&[-23, 16, 16]), SqrtMode::Plus),
            Err(DecomposeError::WrongSign { .. })
        ));
        assert!(matches!(
            poly_sqrt_decompose(&P::from_ints(&[1, 0, -1]), SqrtMode::Plus),
            Err(DecomposeError::LeadingNotSquarable(_))
        ));
        assert_eq!(exact_sqrt(&P::from_ints(&[1, 2, 1])), Some(Poly::from_ints(&[1, 1])));
        assert_eq!(exact_sqrt(&P::from_ints(&[1, 2, 2])), None);
    }
}
