//! The quadratic residue symbol over `F_q[x]`, the character `chi_D` and
//! the character and von Mangoldt sums built from it.

use std::borrow::Cow;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fq::{is_squarefree, FieldSpec, MonicPoly, Poly, PrimeTable};

/// `(f / b)` for a monic modulus `b`, by Euclidean descent with quadratic
/// reciprocity.
///
/// Each step reduces `f` mod `b`, pulls out the leading coefficient `l` of
/// the remainder (which contributes `legendre(l)^deg b`), then flips the
/// now-monic pair with the sign `(-1)^((q-1)/2 * deg a * deg b)`.
pub fn residue_symbol(f: &Poly, modulus: &Poly) -> Result<i8> {
    if modulus.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if !modulus.is_monic() {
        return Err(Error::Config(format!("modulus {modulus} is not monic")));
    }
    let field = modulus.field();
    let half = (field.q() - 1) / 2;
    let mut acc = 1i8;
    let mut a = f.rem(modulus)?;
    let mut b = modulus.clone();
    loop {
        let db = b.degree().expect("modulus nonzero");
        if db == 0 {
            return Ok(acc);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let lead = a.leading();
        if lead != 1 {
            if db % 2 == 1 {
                acc *= field.legendre(lead);
            }
            a = a.make_monic();
        }
        let da = a.degree().expect("nonzero");
        if da == 0 {
            return Ok(acc);
        }
        if half % 2 == 1 && da % 2 == 1 && db % 2 == 1 {
            acc = -acc;
        }
        let r = b.rem(&a)?;
        b = a;
        a = r;
    }
}

/// `f^((|P|-1)/2) mod P` read as -1, 0 or +1; valid for prime `P`.
pub fn euler_criterion(f: &Poly, prime: &MonicPoly) -> Result<i8> {
    let field = prime.field();
    let norm = prime.norm().ok_or_else(|| Error::Resource {
        degree: prime.degree(),
        reason: "q^deg overflows u64".into(),
    })?;
    let r = f.pow_mod((norm - 1) / 2, prime.as_poly())?;
    if r.is_zero() {
        Ok(0)
    } else if r.is_one() {
        Ok(1)
    } else if r == Poly::constant(field, field.q() - 1) {
        Ok(-1)
    } else {
        Err(Error::InternalConsistency(format!(
            "Euler criterion gave {r} modulo {prime}; modulus not prime?"
        )))
    }
}

const CACHED_DEGREES: usize = 16;

/// The quadratic character `chi_D(f) = (D / f)` for `D` monic, squarefree,
/// of odd degree `d = 2g + 1 >= 3`.
#[derive(Clone, Debug)]
pub struct Character {
    d: MonicPoly,
    genus: usize,
    prime_values: Vec<OnceLock<Vec<i8>>>,
}

impl Character {
    pub fn new(d: MonicPoly) -> Result<Self> {
        let deg = d.degree();
        if deg.is_multiple_of(2) {
            return Err(Error::UnsupportedDegree {
                degree: deg,
                reason: "only odd d = 2g+1 is supported (even d has a trivial zero at u = 1)",
            });
        }
        if deg < 3 {
            return Err(Error::UnsupportedDegree {
                degree: deg,
                reason: "need d >= 3 for a nontrivial L-function",
            });
        }
        if !is_squarefree(d.as_poly()) {
            return Err(Error::Config(format!("{d} is not squarefree")));
        }
        Ok(Character {
            genus: (deg - 1) / 2,
            d,
            prime_values: (0..=CACHED_DEGREES).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn modulus(&self) -> &MonicPoly {
        &self.d
    }

    pub fn field(&self) -> FieldSpec {
        self.d.field()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.d.degree()
    }

    pub fn chi(&self, f: &MonicPoly) -> i8 {
        residue_symbol(self.d.as_poly(), f.as_poly()).expect("monic modulus")
    }

    /// `chi_D` on all primes of `degree` in table order; cached per degree
    /// for degrees up to 16.
    pub fn prime_values<'a>(&'a self, table: &PrimeTable, degree: usize) -> Result<Cow<'a, [i8]>> {
        if table.field() != self.field() {
            return Err(Error::Config("prime table over a different field".into()));
        }
        if degree > table.cap() {
            return Err(Error::Resource {
                degree,
                reason: format!("prime table cap {} too small", table.cap()),
            });
        }
        let compute = || table.primes(degree).map(|p| self.chi(&p)).collect::<Vec<_>>();
        match self.prime_values.get(degree) {
            Some(cell) => Ok(Cow::Borrowed(cell.get_or_init(compute).as_slice())),
            None => Ok(Cow::Owned(compute())),
        }
    }

    /// `c_k = sum of chi_D(f)` over monic `f` of degree `k`.
    pub fn coefficient_sum(&self, k: usize) -> i64 {
        let field = self.field();
        let total = field.monic_count(k).expect("q^k fits in u64");
        (0..total)
            .map(|i| self.chi(&MonicPoly::from_index(field, k, i)) as i64)
            .sum()
    }

    /// `sum over deg f = k of chi_D(f) Lambda(f)`, over prime powers
    /// `P^e` with `e * deg P = k`, each weighted `deg P * chi_D(P)^e`.
    pub fn twisted_lambda_sum(&self, table: &PrimeTable, k: usize) -> Result<i64> {
        if k == 0 {
            return Err(Error::Config("twisted lambda sum needs k >= 1".into()));
        }
        let mut total = 0i64;
        for m in (1..=k).filter(|m| k.is_multiple_of(*m)) {
            let e = (k / m) as u32;
            let s: i64 = self
                .prime_values(table, m)?
                .iter()
                .map(|&v| (v as i64).pow(e))
                .sum();
            total += m as i64 * s;
        }
        Ok(total)
    }
}

/// `sum over monic f of degree k of Lambda(f) = sum_{m | k} m * #primes(m)`.
pub fn lambda_sum(table: &PrimeTable, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::Config("lambda sum needs k >= 1".into()));
    }
    if k > table.cap() {
        return Err(Error::Resource {
            degree: k,
            reason: format!("prime table cap {} too small", table.cap()),
        });
    }
    Ok((1..=k)
        .filter(|m| k.is_multiple_of(*m))
        .map(|m| m as u64 * table.count(m) as u64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    // All squares modulo P, by enumerating residues.
    fn is_square_mod(f: &Poly, p: &MonicPoly) -> bool {
        let field = p.field();
        let r = f.rem(p.as_poly()).unwrap();
        let n = p.degree();
        (0..field.monic_count(n).unwrap()).any(|i| {
            let mut c = MonicPoly::from_index(field, n, i).into_poly().coeffs().to_vec();
            c.pop();
            let s = Poly::from_coeffs(field, c);
            s.mul(&s).unwrap().rem(p.as_poly()).unwrap() == r
        })
    }

    #[test]
    fn symbol_examples() {
        let f = f3();
        let x = Poly::x(f);
        assert_eq!(residue_symbol(&x, &x).unwrap(), 0);
        let p = MonicPoly::parse(f, "x^2+1").unwrap();
        let expected = if is_square_mod(&x, &p) { 1 } else { -1 };
        assert_eq!(residue_symbol(&x, p.as_poly()).unwrap(), expected);
        assert_eq!(
            residue_symbol(&x, &Poly::zero(f)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn symbol_matches_square_enumeration_on_primes() {
        let f = f3();
        let t = PrimeTable::build(f, 3).unwrap();
        for m in 1..=3 {
            for p in t.primes(m) {
                for i in 0..81u64 {
                    let a = MonicPoly::from_index(f, 4, i).into_poly();
                    let a = a.scale(2); // non-monic numerator
                    let want = if a.rem(p.as_poly()).unwrap().is_zero() {
                        0
                    } else if is_square_mod(&a, &p) {
                        1
                    } else {
                        -1
                    };
                    assert_eq!(residue_symbol(&a, p.as_poly()).unwrap(), want, "{a} / {p}");
                }
            }
        }
    }

    #[test]
    fn character_rejects_even_degree_and_squares() {
        let f = f3();
        assert!(matches!(
            Character::new(MonicPoly::parse(f, "x^4+1").unwrap()),
            Err(Error::UnsupportedDegree { degree: 4, .. })
        ));
        assert!(Character::new(MonicPoly::parse(f, "x^3").unwrap()).is_err());
    }

    #[test]
    fn chi_basics() {
        let f = f3();
        let ch = Character::new(MonicPoly::parse(f, "x^3+2x+1").unwrap()).unwrap();
        assert_eq!(ch.chi(&MonicPoly::one(f)), 1);
        let t = PrimeTable::build(f, 3).unwrap();
        for m in 1..=3 {
            for p in t.primes(m) {
                let divides = ch.modulus().as_poly().rem(p.as_poly()).unwrap().is_zero();
                assert_eq!(ch.chi(&p) == 0, divides);
                if !divides {
                    assert_eq!(ch.chi(&p), euler_criterion(ch.modulus().as_poly(), &p).unwrap());
                }
            }
        }
    }

    #[test]
    fn lambda_sum_small() {
        let t = PrimeTable::build(f3(), 2).unwrap();
        assert_eq!(lambda_sum(&t, 1).unwrap(), 3);
        assert_eq!(lambda_sum(&t, 2).unwrap(), 9);
        assert!(matches!(lambda_sum(&t, 3), Err(Error::Resource { .. })));
        let t5 = PrimeTable::build(FieldSpec::new(5).unwrap(), 3).unwrap();
        assert_eq!(lambda_sum(&t5, 3).unwrap(), 125);
    }

    #[test]
    fn coefficient_sum_edges() {
        let f = f3();
        let ch = Character::new(MonicPoly::parse(f, "x^3+2x+1").unwrap()).unwrap();
        assert_eq!(ch.coefficient_sum(0), 1);
        for k in 3..=6 {
            assert_eq!(ch.coefficient_sum(k), 0);
        }
        let k1: i64 = (0..3)
            .map(|a| ch.chi(&MonicPoly::from_index(f, 1, a)) as i64)
            .sum();
        let t = PrimeTable::build(f, 1).unwrap();
        assert_eq!(ch.twisted_lambda_sum(&t, 1).unwrap(), k1);
    }
}
