//! Arithmetic in `F_q` (odd prime `q`) and in `F_q[x]`.
//!
//! Polynomials are dense, lowest degree first, with residues in `[0, q)`.
//! Monic polynomials of degree `d` are in bijection with the integers
//! `0..q^d` through their base-`q` digits (constant term least significant),
//! which gives the fixed lexicographic enumeration order used everywhere
//! downstream.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_q`, `q` an odd prime below `2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    q: u32,
}

impl TryFrom<u32> for FieldSpec {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        FieldSpec::new(q)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.q
    }
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let n = n as u64;
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if !(3..1 << 31).contains(&q) {
            return Err(Error::Config(format!("modulus {q} outside [3, 2^31)")));
        }
        if q.is_multiple_of(2) {
            return Err(Error::Config(format!("modulus {q} is even")));
        }
        if !is_prime_u32(q) {
            return Err(Error::Config(format!("modulus {q} is not prime")));
        }
        Ok(FieldSpec { q })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.q));
        self.pow(a, self.q as u64 - 2)
    }

    /// Quadratic character of `F_q`: `a^((q-1)/2)` as -1, 0 or +1.
    pub fn legendre(self, a: u32) -> i8 {
        let a = a % self.q;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.q as u64 - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Number of monic polynomials of degree `d`, or `None` on overflow.
    pub fn monic_count(self, d: usize) -> Option<u64> {
        (self.q as u64).checked_pow(d as u32)
    }
}

/// A polynomial over `F_q`; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero(field: FieldSpec) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        Poly::constant(field, 1)
    }

    pub fn x(field: FieldSpec) -> Self {
        Poly {
            field,
            coeffs: vec![0, 1],
        }
    }

    pub fn constant(field: FieldSpec, c: u32) -> Self {
        Poly::from_coeffs(field, vec![c])
    }

    /// Builds a polynomial from raw coefficients (lowest degree first),
    /// reducing mod `q` and trimming leading zeros.
    pub fn from_coeffs(field: FieldSpec, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= field.q;
        }
        let mut p = Poly { field, coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(field: FieldSpec, coeffs: &[i64]) -> Self {
        Poly::from_coeffs(field, coeffs.iter().map(|&c| field.reduce_i64(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn check_field(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Config(format!(
                "mismatched field moduli {} and {}",
                self.field.q, other.field.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.add(a, b)
            })
            .collect();
        Ok(Poly::from_coeffs(f, coeffs))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.sub(a, b)
            })
            .collect();
        Ok(Poly::from_coeffs(f, coeffs))
    }

    /// Product of two polynomials over the same field.
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.field));
        }
        let q = self.field.q as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % q;
            }
        }
        Ok(Poly::from_coeffs(
            self.field,
            acc.into_iter().map(|c| c as u32).collect(),
        ))
    }

    pub fn scale(&self, c: u32) -> Poly {
        let f = self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Euclidean division `self = quotient * divisor + remainder`,
    /// `deg remainder < deg divisor`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(divisor)?;
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let f = self.field;
        let da = match self.degree() {
            Some(da) if da >= db => da,
            _ => return Ok((Poly::zero(f), self.clone())),
        };
        let inv_lead = f.inv(divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; da - db + 1];
        for shift in (0..=da - db).rev() {
            let c = rem[shift + db];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv_lead);
            quot[shift] = t;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = f.sub(rem[shift + j], f.mul(t, b));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(f, quot), Poly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(divisor)?.1)
    }

    pub fn derivative(&self) -> Poly {
        let f = self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, (i as u64 % f.q as u64) as u32))
            .collect();
        Poly::from_coeffs(f, coeffs)
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.make_monic())
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(self.field).rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?.rem(modulus)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base)?.rem(modulus)?;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Parses `"x^3+2x+1"`-style text. Accepts `-`, optional `*` and spaces.
    pub fn parse(field: FieldSpec, text: &str) -> Result<Poly> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = |msg: &str| Error::Parse(format!("{msg} in {text:?}"));
        let mut terms: Vec<(i64, usize)> = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i != 0 {
                return Err(bad("expected '+' or '-'"));
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &s[start..i];
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (coef, exp) = match term.find('x') {
                None => (
                    term.parse::<i64>().map_err(|_| bad("invalid constant"))?,
                    0,
                ),
                Some(pos) => {
                    let c = term[..pos].trim_end_matches('*');
                    let coef = if c.is_empty() {
                        1
                    } else {
                        c.parse::<i64>().map_err(|_| bad("invalid coefficient"))?
                    };
                    let rest = &term[pos + 1..];
                    let exp = if rest.is_empty() {
                        1
                    } else if let Some(e) = rest.strip_prefix('^') {
                        e.parse::<usize>().map_err(|_| bad("invalid exponent"))?
                    } else {
                        return Err(bad("unexpected text after x"));
                    };
                    (coef, exp)
                }
            };
            if exp > 4096 {
                return Err(bad("exponent too large"));
            }
            terms.push((sign * coef, exp));
        }
        let max_exp = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut acc = vec![0i64; max_exp + 1];
        for (c, e) in terms {
            acc[e] = (acc[e] + c.rem_euclid(field.q as i64)) % field.q as i64;
        }
        Ok(Poly::from_i64s(field, &acc))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A monic polynomial of degree `>= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn new(p: Poly) -> Result<Self> {
        if !p.is_monic() {
            return Err(Error::Config(format!("{p} is not monic")));
        }
        Ok(MonicPoly(p))
    }

    pub fn parse(field: FieldSpec, text: &str) -> Result<Self> {
        let p = Poly::parse(field, text)?;
        if !p.is_monic() {
            return Err(Error::Parse(format!("{text:?} is not monic")));
        }
        Ok(MonicPoly(p))
    }

    pub fn one(field: FieldSpec) -> Self {
        MonicPoly(Poly::one(field))
    }

    /// The monic polynomial of degree `degree` whose lower coefficients are
    /// the base-`q` digits of `index` (constant term least significant).
    pub fn from_index(field: FieldSpec, degree: usize, mut index: u64) -> Self {
        let q = field.q as u64;
        let mut coeffs = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            coeffs.push((index % q) as u32);
            index /= q;
        }
        coeffs.push(1);
        MonicPoly(Poly { field, coeffs })
    }

    /// Inverse of [`MonicPoly::from_index`].
    pub fn index(&self) -> u64 {
        let q = self.0.field.q as u64;
        self.0.coeffs[..self.degree()]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * q + c as u64)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.coeffs.len() - 1
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.0.field
    }

    #[inline]
    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0.coeffs
    }

    pub fn mul(&self, other: &MonicPoly) -> Result<MonicPoly> {
        Ok(MonicPoly(self.0.mul(&other.0)?))
    }

    /// Norm `|f| = q^deg f`, if it fits in `u64`.
    pub fn norm(&self) -> Option<u64> {
        self.field().monic_count(self.degree())
    }
}

impl Ord for MonicPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.coeffs.iter().rev().cmp(other.0.coeffs.iter().rev()))
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// True iff `gcd(f, f') = 1`.
pub fn is_squarefree(f: &Poly) -> bool {
    debug_assert!(!f.is_zero());
    match f.gcd(&f.derivative()) {
        Ok(g) => g.is_one(),
        Err(_) => false,
    }
}

/// Size of the hyperelliptic ensemble: `q^d - q^(d-1)` for `d >= 2`.
pub fn hd_count(field: FieldSpec, d: usize) -> Option<u64> {
    let q = field.q as u64;
    let full = field.monic_count(d)?;
    Some(full - full / q)
}

fn check_hd_degree(field: FieldSpec, d: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::UnsupportedDegree {
            degree: d,
            reason: "ensemble degree must be at least 2",
        });
    }
    field.monic_count(d).ok_or_else(|| Error::Resource {
        degree: d,
        reason: "q^d overflows u64".into(),
    })
}

/// Streams the monic squarefree polynomials of degree `d` in increasing
/// lexicographic order (constant term fastest).
pub fn enumerate_hd(field: FieldSpec, d: usize) -> Result<impl Iterator<Item = MonicPoly>> {
    let total = check_hd_degree(field, d)?;
    Ok(hd_block(field, d, 0..total))
}

/// The squarefree members of a contiguous block of monic indices.
pub fn hd_block(
    field: FieldSpec,
    d: usize,
    range: std::ops::Range<u64>,
) -> impl Iterator<Item = MonicPoly> {
    range
        .map(move |i| MonicPoly::from_index(field, d, i))
        .filter(|f| is_squarefree(f.as_poly()))
}

/// Collects the whole ensemble, splitting the index range into disjoint
/// blocks processed according to `exec`.
pub fn collect_hd(field: FieldSpec, d: usize, exec: crate::par::Exec) -> Result<Vec<MonicPoly>> {
    let total = check_hd_degree(field, d)?;
    let block = 4096u64;
    let blocks: Vec<std::ops::Range<u64>> = (0..total.div_ceil(block))
        .map(|b| b * block..((b + 1) * block).min(total))
        .collect();
    let parts = crate::par::map(exec, &blocks, |r| {
        hd_block(field, d, r.clone()).collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `m`: `(1/m) sum_{e | m} mu(e) q^(m/e)`.
pub fn necklace_count(q: u32, m: usize) -> u64 {
    assert!(m >= 1);
    let total: i128 = (1..=m)
        .filter(|e| m.is_multiple_of(*e))
        .map(|e| mobius(e) as i128 * (q as i128).pow((m / e) as u32))
        .sum();
    (total / m as i128) as u64
}

/// Largest `q^m` the sieve will allocate a bitmap for.
pub const PRIME_TABLE_BUDGET: u64 = 1 << 28;

/// All monic irreducible polynomials up to a degree cap, stored by index.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    field: FieldSpec,
    cap: usize,
    // by_degree[m] holds the indices of the primes of degree m; slot 0 is empty.
    by_degree: Vec<Vec<u64>>,
}

impl PrimeTable {
    /// Sieves the primes of each degree `1..=max_degree` and checks every
    /// per-degree count against the necklace formula.
    pub fn build(field: FieldSpec, max_degree: usize) -> Result<Self> {
        if max_degree < 1 {
            return Err(Error::UnsupportedDegree {
                degree: max_degree,
                reason: "prime table needs max_degree >= 1",
            });
        }
        let q = field.q;
        let mut by_degree: Vec<Vec<u64>> = vec![Vec::new()];
        for m in 1..=max_degree {
            let size = match field.monic_count(m) {
                Some(s) if s <= PRIME_TABLE_BUDGET => s,
                _ => {
                    return Err(Error::Resource {
                        degree: m,
                        reason: format!("q^{m} exceeds sieve budget {PRIME_TABLE_BUDGET}"),
                    })
                }
            };
            let mut composite = vec![false; size as usize];
            for a in 1..=m / 2 {
                for &p in &by_degree[a] {
                    let pc = MonicPoly::from_index(field, a, p);
                    mark_multiples(q, pc.coeffs(), m, &mut composite);
                }
            }
            let primes: Vec<u64> = composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| i as u64)
                .collect();
            let expected = necklace_count(q, m);
            if primes.len() as u64 != expected {
                return Err(Error::InternalConsistency(format!(
                    "sieve found {} primes of degree {m}, necklace count is {expected}",
                    primes.len()
                )));
            }
            by_degree.push(primes);
        }
        Ok(PrimeTable {
            field,
            cap: max_degree,
            by_degree,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn count(&self, degree: usize) -> usize {
        self.by_degree.get(degree).map_or(0, Vec::len)
    }

    /// Indices (see [`MonicPoly::from_index`]) of the primes of `degree`.
    pub fn indices(&self, degree: usize) -> &[u64] {
        self.by_degree.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn primes(&self, degree: usize) -> impl Iterator<Item = MonicPoly> + '_ {
        let field = self.field;
        self.indices(degree)
            .iter()
            .map(move |&i| MonicPoly::from_index(field, degree, i))
    }

    pub fn contains(&self, f: &MonicPoly) -> bool {
        f.field() == self.field
            && f.degree() <= self.cap
            && self.indices(f.degree()).binary_search(&f.index()).is_ok()
    }

    /// Irreducibility by trial division with the tabulated primes of degree
    /// up to `deg f / 2`.
    pub fn is_irreducible(&self, f: &MonicPoly) -> Result<bool> {
        let n = f.degree();
        if n == 0 {
            return Ok(false);
        }
        if n / 2 > self.cap {
            return Err(Error::Resource {
                degree: n,
                reason: format!("prime table cap {} below half the degree", self.cap),
            });
        }
        for a in 1..=n / 2 {
            for p in self.primes(a) {
                if f.as_poly().rem(p.as_poly())?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Factors `f` into tabulated primes with multiplicities.
    pub fn factor(&self, f: &MonicPoly) -> Result<Vec<(MonicPoly, u32)>> {
        let mut rest = f.as_poly().clone();
        let mut out = Vec::new();
        'outer: for a in 1..=self.cap {
            if rest.degree().unwrap_or(0) < a {
                break;
            }
            for p in self.primes(a) {
                if rest.degree().unwrap_or(0) < a {
                    break 'outer;
                }
                let mut e = 0;
                loop {
                    let (quot, r) = rest.divmod(p.as_poly())?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
            }
        }
        if rest.degree().unwrap_or(0) > 0 {
            let m = MonicPoly::new(rest)?;
            return Err(Error::Resource {
                degree: m.degree(),
                reason: format!("cofactor {m} exceeds prime table cap {}", self.cap),
            });
        }
        Ok(out)
    }
}

// Marks every monic p*g of degree m with g monic of degree m - deg p.
fn mark_multiples(q: u32, p: &[u32], m: usize, composite: &mut [bool]) {
    let a = p.len() - 1;
    let b = m - a;
    let qq = q as u64;
    let mut g = vec![0u32; b + 1];
    g[b] = 1;
    let mut prod = vec![0u64; m + 1];
    loop {
        prod.iter_mut().for_each(|c| *c = 0);
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0 {
                continue;
            }
            for (j, &gj) in g.iter().enumerate() {
                prod[i + j] += pi as u64 * gj as u64;
            }
        }
        let idx = prod[..m]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * qq + c % qq);
        composite[idx as usize] = true;
        // next g in index order
        let mut k = 0;
        loop {
            if k == b {
                return;
            }
            g[k] += 1;
            if g[k] == q {
                g[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// Rabin's irreducibility test, independent of any table:
/// `f` of degree `n` is irreducible iff `x^(q^n) = x mod f` and
/// `gcd(x^(q^(n/r)) - x, f) = 1` for every prime `r | n`.
pub fn is_irreducible_rabin(f: &MonicPoly) -> Result<bool> {
    let n = f.degree();
    if n == 0 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    let field = f.field();
    let fp = f.as_poly();
    let x = Poly::x(field);
    // frob[i] = x^(q^i) mod f
    let mut frob = vec![x.rem(fp)?];
    for i in 1..=n {
        let next = frob[i - 1].pow_mod(field.q as u64, fp)?;
        frob.push(next);
    }
    if frob[n] != x.rem(fp)? {
        return Ok(false);
    }
    let mut r = 2;
    let mut m = n;
    while m > 1 {
        if m.is_multiple_of(r) {
            while m.is_multiple_of(r) {
                m /= r;
            }
            let h = frob[n / r].sub(&x)?;
            if !h.gcd(fp)?.is_one() {
                return Ok(false);
            }
        }
        r += 1;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    fn p(field: FieldSpec, s: &str) -> Poly {
        Poly::parse(field, s).unwrap()
    }

    #[test]
    fn field_rejects_bad_moduli() {
        assert!(FieldSpec::new(2).is_err());
        assert!(FieldSpec::new(9).is_err());
        assert!(FieldSpec::new(15).is_err());
        assert!(FieldSpec::new(1 << 31).is_err());
        assert!(FieldSpec::new(7).is_ok());
        assert!(FieldSpec::new(2147483647).is_ok());
    }

    #[test]
    fn mul_examples() {
        let f = f3();
        assert_eq!(p(f, "x+1").mul(&p(f, "x+2")).unwrap(), p(f, "x^2+2"));
        let a = p(f, "2x^2+x+1");
        assert_eq!(a.mul(&Poly::one(f)).unwrap(), a);
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(p(f5, "x").mul(&p(f5, "x")).unwrap(), p(f5, "x^2"));
    }

    #[test]
    fn mismatched_fields_are_config_errors() {
        let a = p(f3(), "x+1");
        let b = p(FieldSpec::new(5).unwrap(), "x+1");
        assert!(matches!(a.mul(&b), Err(Error::Config(_))));
        assert!(matches!(a.divmod(&b), Err(Error::Config(_))));
    }

    #[test]
    fn divmod_examples() {
        let f = f3();
        let (q, r) = p(f, "x^2+1").divmod(&p(f, "x")).unwrap();
        assert_eq!((q, r), (p(f, "x"), Poly::one(f)));
        let a = p(f, "x^3+2x+2");
        let (q, r) = a.divmod(&a).unwrap();
        assert_eq!((q, r), (Poly::one(f), Poly::zero(f)));
        // long division by hand: x^3+x+1 = x*(x^2+1) + 1
        let (q, r) = p(f, "x^3+x+1").divmod(&p(f, "x^2+1")).unwrap();
        assert_eq!((q, r), (p(f, "x"), Poly::one(f)));
        assert_eq!(a.divmod(&Poly::zero(f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn squarefree_examples() {
        let f = f3();
        assert!(!is_squarefree(&p(f, "x^2")));
        assert!(is_squarefree(&p(f, "x^2+1")));
        for a in 0..3 {
            assert!(is_squarefree(&Poly::from_coeffs(f, vec![a, 1])));
        }
        // x^3 + 1 = (x+1)^3 in characteristic 3
        assert!(!is_squarefree(&p(f, "x^3+1")));
    }

    #[test]
    fn display_and_parse() {
        let f = f3();
        assert_eq!(p(f, "x^3+2x+1").to_string(), "x^3+2x+1");
        assert_eq!(p(f, "x^3 - x + 4").to_string(), "x^3+2x+1");
        assert_eq!(p(f, "2*x^2+x").to_string(), "2x^2+x");
        assert_eq!(Poly::zero(f).to_string(), "0");
        assert!(Poly::parse(f, "x^").is_err());
        assert!(Poly::parse(f, "y+1").is_err());
        assert!(Poly::parse(f, "").is_err());
        assert!(MonicPoly::parse(f, "2x+1").is_err());
    }

    #[test]
    fn index_round_trip_and_order() {
        let f = f3();
        for i in 0..27 {
            let m = MonicPoly::from_index(f, 3, i);
            assert_eq!(m.index(), i);
            if i > 0 {
                assert!(MonicPoly::from_index(f, 3, i - 1) < m);
            }
        }
    }

    #[test]
    fn hd_counts_small() {
        let f = f3();
        assert_eq!(enumerate_hd(f, 3).unwrap().count(), 18);
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(enumerate_hd(f5, 2).unwrap().count(), 20);
        assert!(matches!(
            enumerate_hd(f, 1),
            Err(Error::UnsupportedDegree { degree: 1, .. })
        ));
        let v: Vec<_> = enumerate_hd(f, 4).unwrap().collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn prime_table_examples() {
        let t = PrimeTable::build(f3(), 3).unwrap();
        assert_eq!(t.count(1), 3);
        assert_eq!(t.count(2), 3);
        let names: Vec<String> = t.primes(1).map(|p| p.to_string()).collect();
        assert_eq!(names, ["x", "x+1", "x+2"]);
        let t5 = PrimeTable::build(FieldSpec::new(5).unwrap(), 3).unwrap();
        assert_eq!(t5.count(3), 40);
        assert_eq!(necklace_count(3, 2), 3);
        assert_eq!(necklace_count(5, 3), 40);
    }

    #[test]
    fn prime_table_budget() {
        let f = FieldSpec::new(65537).unwrap();
        match PrimeTable::build(f, 3) {
            Err(Error::Resource { degree, .. }) => assert_eq!(degree, 2),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn factor_recovers_product() {
        let f = f3();
        let t = PrimeTable::build(f, 4).unwrap();
        let a = MonicPoly::parse(f, "x^2+1").unwrap();
        let b = MonicPoly::parse(f, "x+2").unwrap();
        let prod = a.mul(&a).unwrap().mul(&b).unwrap();
        let fac = t.factor(&prod).unwrap();
        assert_eq!(fac, vec![(b, 1), (a, 2)]);
    }
}
