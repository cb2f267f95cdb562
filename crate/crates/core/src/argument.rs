//! Bernoulli periodic functions and the argument functions built on them:
//! `log |L|` on the critical circle, `S_n(theta)`, the zero counter, and the
//! constant families `M_n, m_n, A_n^±, C_n^±`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lpoly::ZeroAngles;

/// Largest Bernoulli index held in the shared table.
pub const BERNOULLI_NMAX: usize = 13;

/// Distance below which `theta` is treated as sitting on a zero angle.
pub const ZERO_SNAP: f64 = 1e-12;

/// Extrema of `B_n` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub max: f64,
    pub argmax: f64,
    pub min: f64,
    pub argmin: f64,
}

/// Exact Bernoulli polynomials `B_0..B_nmax` with float copies and extrema.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    exact: Vec<Vec<BigRational>>,
    float: Vec<Vec<f64>>,
    extrema: Vec<Extremum>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn eval_exact(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Bernoulli numbers `b_0..b_n` with `b_1 = -1/2`.
fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=n {
        let s: BigRational = (0..m)
            .map(|k| BigRational::from_integer(binomial(m + 1, k)) * &b[k])
            .sum();
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Real roots of an exact polynomial in `[0, 1]`, assumed simple.
fn roots_in_unit_interval(c: &[BigRational]) -> Vec<f64> {
    const CELLS: i64 = 64;
    if c.iter().all(Zero::is_zero) || c.len() <= 1 {
        return Vec::new();
    }
    let sign = |x: &BigRational| {
        let v = eval_exact(c, x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };
    let mut roots = Vec::new();
    for i in 0..=CELLS {
        let x = rat(i, CELLS);
        if sign(&x) == 0 {
            roots.push(x.to_f64().unwrap_or(f64::NAN));
        }
    }
    for i in 0..CELLS {
        let mut lo = rat(i, CELLS);
        let mut hi = rat(i + 1, CELLS);
        let (slo, shi) = (sign(&lo), sign(&hi));
        if slo == 0 || shi == 0 || slo == shi {
            continue;
        }
        let two = rat(2, 1);
        for _ in 0..60 {
            let mid = (&lo + &hi) / &two;
            let s = sign(&mid);
            if s == 0 {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if s == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(((&lo + &hi) / two).to_f64().unwrap_or(f64::NAN));
    }
    roots.sort_by(f64::total_cmp);
    roots
}

impl BernoulliTable {
    pub fn new(nmax: usize) -> Self {
        let b = bernoulli_numbers(nmax);
        let exact: Vec<Vec<BigRational>> = (0..=nmax)
            .map(|n| {
                (0..=n)
                    .map(|k| BigRational::from_integer(binomial(n, k)) * &b[n - k])
                    .collect()
            })
            .collect();
        let float: Vec<Vec<f64>> = exact
            .iter()
            .map(|c| c.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        let extrema = (0..=nmax)
            .map(|n| {
                let mut pts = vec![0.0, 1.0];
                if n >= 1 {
                    pts.extend(roots_in_unit_interval(&exact[n - 1]));
                }
                let mut e = Extremum {
                    max: f64::NEG_INFINITY,
                    argmax: 0.0,
                    min: f64::INFINITY,
                    argmin: 0.0,
                };
                pts.sort_by(f64::total_cmp);
                for x in pts {
                    let v = horner(&float[n], x);
                    if v > e.max {
                        e.max = v;
                        e.argmax = x;
                    }
                    if v < e.min {
                        e.min = v;
                        e.argmin = x;
                    }
                }
                e
            })
            .collect();
        BernoulliTable {
            exact,
            float,
            extrema,
        }
    }

    /// The table up to [`BERNOULLI_NMAX`], built once per process.
    pub fn shared() -> &'static BernoulliTable {
        static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
        TABLE.get_or_init(|| BernoulliTable::new(BERNOULLI_NMAX))
    }

    pub fn nmax(&self) -> usize {
        self.exact.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.nmax() {
            return Err(Error::TableRange {
                index: n,
                max: self.nmax(),
            });
        }
        Ok(())
    }

    /// Exact coefficients of `B_n`, lowest degree first.
    pub fn coefficients(&self, n: usize) -> Result<&[BigRational]> {
        self.check(n)?;
        Ok(&self.exact[n])
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n)?;
        Ok(horner(&self.float[n], x))
    }

    /// `B_n(x)` for exact `x`.
    pub fn eval_exact(&self, n: usize, x: &BigRational) -> Result<BigRational> {
        self.check(n)?;
        Ok(eval_exact(&self.exact[n], x))
    }

    /// `B_n` at the fractional part of `x`; `B_1` is 0 at integers.
    pub fn periodic(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n)?;
        Ok(self.periodic_unchecked(n, x))
    }

    #[inline]
    fn periodic_unchecked(&self, n: usize, x: f64) -> f64 {
        let t = x - x.floor();
        if n == 1 && t == 0.0 {
            return 0.0;
        }
        horner(&self.float[n], t)
    }

    /// `(M_n, m_n)`: max and min of `B_n` on `[0, 1]`.
    pub fn extrema(&self, n: usize) -> Result<Extremum> {
        self.check(n)?;
        Ok(self.extrema[n])
    }
}

/// `B_n(x - floor x)` from the shared table, with `B_1(integer) = 0`.
pub fn periodic_bernoulli(n: usize, x: f64) -> Result<f64> {
    BernoulliTable::shared().periodic(n, x)
}

/// `(M_n, m_n)` from the shared table.
pub fn bernoulli_extrema(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Config("extrema need n >= 1".into()));
    }
    let e = BernoulliTable::shared().extrema(n)?;
    Ok((e.max, e.min))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Signed distance from `x` to the nearest integer.
#[inline]
fn wrap(x: f64) -> f64 {
    x - x.round()
}

/// `sum_j log 2|sin pi(theta - theta_j)|`, i.e. `log |L(q^(-1/2) e(theta))|`.
/// Within [`ZERO_SNAP`] of a zero angle the value is `-inf`.
pub fn log_modulus(zeros: &ZeroAngles, theta: f64) -> f64 {
    let mut s = 0.0;
    for &t in &zeros.theta {
        let x = wrap(theta - t);
        if x.abs() < ZERO_SNAP {
            return f64::NEG_INFINITY;
        }
        s += (2.0 * (PI * x).sin().abs()).ln();
    }
    s
}

/// `S_n(theta) = -1/(n+1)! sum_j B_{n+1}(theta - theta_j)` for a fixed
/// zero set and order.
#[derive(Clone, Debug)]
pub struct SnEvaluator<'a> {
    zeros: &'a ZeroAngles,
    n: usize,
    table: &'a BernoulliTable,
    scale: f64,
}

impl<'a> SnEvaluator<'a> {
    pub fn new(zeros: &'a ZeroAngles, n: usize) -> Result<Self> {
        Self::with_table(zeros, n, BernoulliTable::shared())
    }

    pub fn with_table(zeros: &'a ZeroAngles, n: usize, table: &'a BernoulliTable) -> Result<Self> {
        if n + 1 > table.nmax() {
            return Err(Error::TableRange {
                index: n + 1,
                max: table.nmax(),
            });
        }
        Ok(SnEvaluator {
            zeros,
            n,
            table,
            scale: -1.0 / factorial(n + 1),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let m = self.n + 1;
        let s: f64 = self
            .zeros
            .theta
            .iter()
            .map(|&t| {
                let x = theta - t;
                if m == 1 && wrap(x).abs() < ZERO_SNAP {
                    0.0
                } else {
                    self.table.periodic_unchecked(m, x)
                }
            })
            .sum();
        self.scale * s
    }

    /// Number of zero angles within [`ZERO_SNAP`] of `theta`.
    pub fn multiplicity_at(&self, theta: f64) -> usize {
        self.zeros
            .theta
            .iter()
            .filter(|&&t| wrap(theta - t).abs() < ZERO_SNAP)
            .count()
    }

    /// `(S_n(theta-), S_n(theta+))`. Only `S_0` jumps: by `+1` per zero.
    pub fn one_sided_limits(&self, theta: f64) -> (f64, f64) {
        let v = self.eval(theta);
        if self.n > 0 {
            return (v, v);
        }
        let half = self.multiplicity_at(theta) as f64 / 2.0;
        (v - half, v + half)
    }
}

/// `S_n(theta)` for the given zeros.
pub fn s_n(zeros: &ZeroAngles, n: usize, theta: f64) -> Result<f64> {
    Ok(SnEvaluator::new(zeros, n)?.eval(theta))
}

/// `c_n = -1/(n+1)! sum_j B_{n+1}(-theta_j)`, the constant making `S_n`
/// mean zero; equal to `S_n(0)`.
pub fn c_n_constant(zeros: &ZeroAngles, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("c_n needs n >= 1".into()));
    }
    let table = BernoulliTable::shared();
    let ev = SnEvaluator::new(zeros, n)?;
    let s: f64 = zeros
        .theta
        .iter()
        .map(|&t| table.periodic_unchecked(n + 1, -t))
        .sum();
    Ok(ev.scale * s)
}

/// Normalized number of zero angles in `[alpha, beta]` on `R/Z`: interior
/// zeros count 1, zeros at an endpoint count 1/2, the full circle counts
/// everything once.
pub fn count_zeros(zeros: &ZeroAngles, alpha: f64, beta: f64) -> Result<f64> {
    let len = beta - alpha;
    if !(0.0..=1.0).contains(&len) {
        return Err(Error::Config(format!(
            "interval length {len} outside [0, 1]"
        )));
    }
    if len == 1.0 {
        return Ok(zeros.theta.len() as f64);
    }
    let mut n = 0.0;
    for &t in &zeros.theta {
        // representative of t in [alpha, alpha + 1)
        let mut r = alpha + (t - alpha).rem_euclid(1.0);
        if alpha + 1.0 - r < ZERO_SNAP {
            r -= 1.0;
        }
        if (r - alpha).abs() < ZERO_SNAP || (r - beta).abs() < ZERO_SNAP {
            n += 0.5;
        } else if r > alpha && r < beta {
            n += 1.0;
        }
    }
    Ok(n)
}

/// `zeta(s)` for integer `s >= 2`: direct sum to `K - 1` plus an
/// Euler-Maclaurin tail through the `B_6` term.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta needs s >= 2");
    const K: u32 = 1000;
    let sf = s as f64;
    let head: f64 = (1..K).rev().map(|k| (k as f64).powf(-sf)).sum();
    let k = K as f64;
    let tail = k.powf(1.0 - sf) / (sf - 1.0) + 0.5 * k.powf(-sf) + sf / 12.0 * k.powf(-sf - 1.0)
        - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * k.powf(-sf - 3.0)
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) / 30240.0 * k.powf(-sf - 5.0);
    head + tail
}

/// `(A_n^-, A_n^+) = (pi^n/2) (M_{n+1}, -m_{n+1}) / (n+1)!`; both are `1/4`
/// at `n = 0`.
pub fn constants_a(n: usize) -> Result<(f64, f64)> {
    let (mx, mn) = bernoulli_extrema(n + 1)?;
    let f = PI.powi(n as i32) / 2.0 / factorial(n + 1);
    Ok((f * mx, -f * mn))
}

fn c_odd(n: usize) -> (f64, f64) {
    let base = zeta(n as u32 + 1) / (PI * 2f64.powi(n as i32 + 1));
    let other = (1.0 - 2f64.powi(-(n as i32))) * base;
    if n % 4 == 1 {
        (base, other)
    } else {
        (other, base)
    }
}

/// `(C_n^-, C_n^+)`. Odd `n` uses the `n = 4k +- 1` closed forms; even `n`
/// uses the closed square-root form.
pub fn constants_c(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Config("C_n needs n >= 1".into()));
    }
    if n % 2 == 1 {
        return Ok(c_odd(n));
    }
    let ni = n as i32;
    let inner = (1.0 - 2f64.powi(-ni - 2)) * (1.0 - 2f64.powi(-ni + 1)) * zeta(n as u32) * zeta(n as u32 + 2)
        / (1.0 - 2f64.powi(-ni));
    let c = 2f64.sqrt() / (PI * 2f64.powi(ni + 1)) * inner.sqrt();
    Ok((c, c))
}

/// Even `n >= 2`: `C_n` from its odd neighbours,
/// `sqrt(2 (C_{n+1}^+ + C_{n+1}^-) C_{n-1}^+ C_{n-1}^- / (C_{n-1}^+ + C_{n-1}^-))`.
pub fn constants_c_recursive(n: usize) -> Result<f64> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Config(format!("recursive C_n needs even n >= 2, got {n}")));
    }
    let (um, up) = c_odd(n + 1);
    let (lm, lp) = c_odd(n - 1);
    Ok((2.0 * (up + um) * lp * lm / (lp + lm)).sqrt())
}

/// Lehmer's bracket for even `n`: `((1 - 3^-n), 1) / (pi 2^(n+1))`.
pub fn lehmer_bracket(n: usize) -> (f64, f64) {
    let hi = 1.0 / (PI * 2f64.powi(n as i32 + 1));
    (hi * (1.0 - 3f64.powi(-(n as i32))), hi)
}

/// One row of the constants table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsRow {
    pub n: usize,
    pub big_m: f64,
    pub small_m: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    /// `exact_match` (odd n), `A<C` (even n) or `violated`.
    pub relation: &'static str,
    /// `in_bracket`, `outside` or `n/a` (odd n).
    pub lehmer: &'static str,
}

pub fn constants_table(nmax: usize) -> Result<Vec<ConstantsRow>> {
    if nmax + 1 > BERNOULLI_NMAX {
        return Err(Error::TableRange {
            index: nmax + 1,
            max: BERNOULLI_NMAX,
        });
    }
    (1..=nmax)
        .map(|n| {
            let (big_m, small_m) = bernoulli_extrema(n + 1)?;
            let (a_minus, a_plus) = constants_a(n)?;
            let (c_minus, c_plus) = constants_c(n)?;
            let (relation, lehmer) = if n % 2 == 1 {
                let ok = (a_minus - c_minus).abs() <= 1e-10 && (a_plus - c_plus).abs() <= 1e-10;
                (if ok { "exact_match" } else { "violated" }, "n/a")
            } else {
                let ok = a_minus < c_minus && a_plus < c_plus;
                let (lo, hi) = lehmer_bracket(n);
                let inside = [a_minus, a_plus].iter().all(|&a| lo < a && a < hi);
                (
                    if ok { "A<C" } else { "violated" },
                    if inside { "in_bracket" } else { "outside" },
                )
            };
            Ok(ConstantsRow {
                n,
                big_m,
                small_m,
                a_minus,
                a_plus,
                c_minus,
                c_plus,
                relation,
                lehmer,
            })
        })
        .collect()
}

pub fn constants_csv(rows: &[ConstantsRow]) -> String {
    let mut s = String::from("n,M_n1,m_n1,A_minus,A_plus,C_minus,C_plus,relation,lehmer\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            r.n, r.big_m, r.small_m, r.a_minus, r.a_plus, r.c_minus, r.c_plus, r.relation, r.lehmer
        );
    }
    s
}

/// Composite Simpson rule with `panels` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Integral over `[a, b]` split at `breaks`, doubling panels on each piece
/// until successive estimates differ by less than `tol` (at most `2^16`
/// panels per piece).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            // stay off the endpoints where f may jump
            let eps = (hi - lo) * 1e-13;
            let (lo, hi) = (lo + eps, hi - eps);
            let mut panels = 16;
            let mut prev = simpson(&f, lo, hi, panels);
            while panels < 1 << 16 {
                panels *= 2;
                let next = simpson(&f, lo, hi, panels);
                let done = (next - prev).abs() < tol;
                prev = next;
                if done {
                    break;
                }
            }
            prev
        })
        .sum()
}
