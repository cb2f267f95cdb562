//! Dense polynomials over `Q` (exact), used to split an L-polynomial into
//! squarefree factors before any floating point root finding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    c: Vec<BigRational>,
}

impl RatPoly {
    pub fn from_ints(c: &[i64]) -> Self {
        let mut p = RatPoly {
            c: c.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect(),
        };
        p.trim();
        p
    }

    pub fn from_rats(c: Vec<BigRational>) -> Self {
        let mut p = RatPoly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(Zero::is_zero) {
            self.c.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.c.iter().map(rat_to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        RatPoly::from_rats(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| v * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let z = BigRational::zero();
        RatPoly::from_rats(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - other.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.c.len() < d.c.len() {
            return (RatPoly { c: vec![] }, self.clone());
        }
        let db = d.degree();
        let lead = d.c[db].clone();
        let mut rem = self.c.clone();
        let mut quot = vec![BigRational::zero(); self.c.len() - db];
        for shift in (0..quot.len()).rev() {
            let t = &rem[shift + db] / &lead;
            if t.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                rem[shift + j] = &rem[shift + j] - &t * b;
            }
            quot[shift] = t;
        }
        rem.truncate(db);
        (RatPoly::from_rats(quot), RatPoly::from_rats(rem))
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                RatPoly::from_rats(self.c.iter().map(|v| v / &l).collect())
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divmod(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scales so the constant term is 1; the constant term must be nonzero.
    pub fn normalize_constant(&self) -> Self {
        let c0 = self.c[0].clone();
        RatPoly::from_rats(self.c.iter().map(|v| v / &c0).collect())
    }

    /// Yun's squarefree decomposition: pairs `(factor, multiplicity)`,
    /// factors monic, pairwise coprime, nonconstant.
    pub fn squarefree_decomposition(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divmod(&a0).0;
        let c = df.divmod(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            let bn = b.divmod(&a).0;
            let cn = d.divmod(&a).0;
            d = cn.sub(&bn.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            b = bn;
            i += 1;
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_splits_multiplicities() {
        // (u - 1)^2 (u + 2) = u^3 - 3u + 2
        let p = RatPoly::from_ints(&[2, -3, 0, 1]);
        let parts = p.squarefree_decomposition();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (RatPoly::from_ints(&[2, 1]), 1));
        assert_eq!(parts[1], (RatPoly::from_ints(&[-1, 1]), 2));
    }

    #[test]
    fn rational_to_float() {
        let r = BigRational::new(BigInt::from(-1), BigInt::from(3));
        assert!((rat_to_f64(&r) + 1.0 / 3.0).abs() < 1e-16);
        let r = BigRational::from_integer(BigInt::from(1i64 << 40) * BigInt::from(12345));
        assert_eq!(rat_to_f64(&r), (1u64 << 40) as f64 * 12345.0);
        assert_eq!(rat_to_f64(&BigRational::zero()), 0.0);
    }
}
