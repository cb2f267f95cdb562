//! The L-polynomial `L(u, chi_D) = sum c_k u^k`, its functional equation and
//! its zeros on the critical circle `|u| = q^(-1/2)`.
//!
//! Zeros are written `u_j = q^(-1/2) e(theta_j)` with `theta_j` in `[0, 1)`.
//! On the circle, `L(q^(-1/2) e(theta)) = e(g theta) Xi(theta)` where `Xi` is
//! a real cosine polynomial of degree `g`, so the zero angles are the zeros
//! of `Xi`. The integer polynomial is first split into exact squarefree
//! factors over `Q`; each factor then has only simple zeros, which are
//! isolated by sign changes on a grid and polished by bisection and Newton.

mod aberth;
mod exact;

pub use aberth::aberth_roots;
pub use exact::RatPoly;

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Character;

/// Integer coefficients `c_0..c_{2g}` of `L(u, chi_D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub q: u32,
    pub d: usize,
    #[serde(rename = "D")]
    pub modulus: String,
    pub c: Vec<i64>,
}

/// Builds `L(u, chi_D)`: `c_0..c_g` by direct character sums, the upper half
/// from the functional equation `c_{2g-k} = q^(g-k) c_k`, and the upper half
/// again by direct summation. The two routes must agree exactly.
pub fn compute_lpolynomial(ch: &Character) -> Result<LPolynomial> {
    let g = ch.genus();
    let q = ch.field().q() as i64;
    let mut c = vec![0i64; 2 * g + 1];
    for (k, slot) in c.iter_mut().enumerate().take(g + 1) {
        *slot = ch.coefficient_sum(k);
    }
    for k in 0..g {
        c[2 * g - k] = q.pow((g - k) as u32) * c[k];
    }
    for k in g + 1..=2 * g {
        let direct = ch.coefficient_sum(k);
        if direct != c[k] {
            return Err(Error::InternalConsistency(format!(
                "c_{k} for D = {}: functional equation gives {}, direct sum gives {direct}",
                ch.modulus(),
                c[k]
            )));
        }
    }
    Ok(LPolynomial {
        q: ch.field().q(),
        d: ch.degree(),
        modulus: ch.modulus().to_string(),
        c,
    })
}

/// A real cosine polynomial `sum_m w[m] cos(2 pi m theta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosinePoly {
    pub w: Vec<f64>,
}

impl CosinePoly {
    pub fn degree(&self) -> usize {
        self.w.len().saturating_sub(1)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.w
            .iter()
            .enumerate()
            .map(|(m, &w)| w * (TAU * m as f64 * theta).cos())
            .sum()
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        self.w
            .iter()
            .enumerate()
            .map(|(m, &w)| -w * TAU * m as f64 * (TAU * m as f64 * theta).sin())
            .sum()
    }

    /// Mean over `[0, 1)`.
    pub fn mean(&self) -> f64 {
        self.w.first().copied().unwrap_or(0.0)
    }

    /// `sum |w|`, an upper bound for `sup |Xi|`.
    pub fn scale(&self) -> f64 {
        self.w.iter().map(|w| w.abs()).sum()
    }

    /// From the coefficients of a self-reciprocal polynomial with symmetric
    /// normalized coefficients `a_k = a_{2h-k}`: `a_h + 2 sum_{k<h} a_k cos(2 pi (h-k) theta)`.
    fn from_symmetric(a: &[f64]) -> Self {
        let h = (a.len() - 1) / 2;
        let mut w = vec![0.0; h + 1];
        w[0] = a[h];
        for k in 0..h {
            w[h - k] = 2.0 * a[k];
        }
        CosinePoly { w }
    }
}

impl LPolynomial {
    pub fn genus(&self) -> usize {
        (self.c.len() - 1) / 2
    }

    /// `c_0 = 1`, `c_{2g-k} = q^(g-k) c_k` exactly, for every `k`.
    pub fn functional_equation_holds(&self) -> bool {
        let g = self.genus();
        let q = self.q as i128;
        self.c.len() == 2 * g + 1
            && self.c[0] == 1
            && (0..=2 * g).all(|k| {
                let lhs = self.c[2 * g - k] as i128;
                if k <= g {
                    lhs == q.pow((g - k) as u32) * self.c[k] as i128
                } else {
                    lhs * q.pow((k - g) as u32) == self.c[k] as i128
                }
            })
    }

    /// `Xi(theta) = c_g q^(-g/2) + 2 sum_{k<g} c_k q^(-k/2) cos(2 pi (g-k) theta)`.
    pub fn unitarize(&self) -> CosinePoly {
        let sq = (self.q as f64).sqrt();
        let a: Vec<f64> = self
            .c
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 / sq.powi(k as i32))
            .collect();
        CosinePoly::from_symmetric(&a)
    }

    /// `L(q^(-1/2) e(theta))` by direct evaluation.
    pub fn value_on_circle(&self, theta: f64) -> Complex64 {
        let sq = (self.q as f64).sqrt();
        self.c
            .iter()
            .enumerate()
            .map(|(k, &c)| Complex64::from_polar(c as f64 / sq.powi(k as i32), TAU * k as f64 * theta))
            .sum()
    }

    /// Exact squarefree factorization of `L` over `Q`.
    pub fn squarefree_factors(&self) -> Vec<(RatPoly, usize)> {
        RatPoly::from_ints(&self.c).squarefree_decomposition()
    }

    /// Power sums `p_k = sum_j alpha_j^k`, `k = 1..=kmax`, of the inverse
    /// roots `alpha_j = q^(1/2) e(-theta_j)`, from Newton's identities on the
    /// integer coefficients. `|sum_j e(k theta_j)| = |p_k| q^(-k/2)`.
    pub fn power_sums(&self, kmax: usize) -> Vec<BigInt> {
        let c: Vec<BigInt> = self.c.iter().map(|&v| BigInt::from(v)).collect();
        let coeff = |i: usize| c.get(i).cloned().unwrap_or_default();
        let mut p: Vec<BigInt> = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let mut v = -BigInt::from(k) * coeff(k);
            for i in 1..k {
                v -= coeff(i) * &p[k - i - 1];
            }
            p.push(v);
        }
        p
    }

    /// Largest `| |u| q^(1/2) - 1 |` over the roots of the squarefree part of
    /// `L`, located by a generic complex root finder.
    pub fn rh_radius_error(&self) -> f64 {
        let sq = (self.q as f64).sqrt();
        self.squarefree_factors()
            .iter()
            .flat_map(|(f, _)| aberth_roots(&f.normalize_constant().to_f64()))
            .map(|u| (u.norm() * sq - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Sorted zero angles in `[0, 1)`, repeated by multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroAngles {
    pub theta: Vec<f64>,
    /// Largest `|Xi(theta_j)|` after polishing.
    pub residual: f64,
}

impl ZeroAngles {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Number of zeros `2g`.
    pub fn count(&self) -> usize {
        self.theta.len()
    }
}

pub const MAX_GRID_FACTOR: usize = 1024;

/// Locates all `2g` zero angles of `L`.
///
/// Each squarefree factor has the zeros at `theta = 0, 1/2` (the factor
/// `q u^2 - 1`) removed exactly; the rest is a self-reciprocal polynomial of
/// degree `2h` whose cosine form has exactly `h` simple zeros in `(0, 1/2)`.
/// These are bracketed on a uniform grid of `grid_factor * (2g + 2)` cells
/// (doubled up to [`MAX_GRID_FACTOR`] when brackets are missing) and mirrored
/// to `(1/2, 1)`.
pub fn find_zero_angles(l: &LPolynomial, grid_factor: usize) -> Result<ZeroAngles> {
    if grid_factor < 16 {
        return Err(Error::Config(format!("grid factor {grid_factor} < 16")));
    }
    if !l.functional_equation_holds() {
        return Err(Error::InternalConsistency(format!(
            "L-polynomial of {} violates the functional equation",
            l.modulus
        )));
    }
    let g = l.genus();
    let q = l.q as i64;
    let sq = (l.q as f64).sqrt();
    let real_pair = RatPoly::from_ints(&[-1, 0, q]);
    let mut theta = Vec::with_capacity(2 * g);
    for (factor, mult) in l.squarefree_factors() {
        let mut f = factor.normalize_constant();
        let (quot, rem) = f.divmod(&real_pair);
        let has_real_pair = rem.is_zero();
        if has_real_pair {
            f = quot.normalize_constant();
        }
        let h = check_self_reciprocal(&f, q).ok_or_else(|| {
            Error::InternalConsistency(format!(
                "squarefree factor of L for {} is not self-reciprocal",
                l.modulus
            ))
        })?;
        let a: Vec<f64> = f
            .to_f64()
            .iter()
            .enumerate()
            .map(|(k, v)| v / sq.powi(k as i32))
            .collect();
        let xi = CosinePoly::from_symmetric(&a);
        let roots = simple_zeros_half_period(&xi, h, grid_factor, 2 * g + 2)?;
        for _ in 0..mult {
            if has_real_pair {
                theta.push(0.0);
                theta.push(0.5);
            }
            for &t in &roots {
                theta.push(t);
                theta.push(1.0 - t);
            }
        }
    }
    if theta.len() != 2 * g {
        return Err(Error::RootIsolation {
            found: theta.len(),
            expected: 2 * g,
            suspects: Vec::new(),
        });
    }
    theta.sort_by(f64::total_cmp);
    let xi = l.unitarize();
    let residual = theta.iter().map(|&t| xi.eval(t).abs()).fold(0.0, f64::max);
    if residual > 1e-8 * xi.scale() {
        return Err(Error::InternalConsistency(format!(
            "zero residual {residual:e} too large for {}",
            l.modulus
        )));
    }
    Ok(ZeroAngles { theta, residual })
}

// Returns h if f has degree 2h and f_{2h-k} = q^(h-k) f_k (f_0 = 1).
fn check_self_reciprocal(f: &RatPoly, q: i64) -> Option<usize> {
    let n = f.degree();
    if n % 2 == 1 {
        return None;
    }
    let h = n / 2;
    let c = f.coeffs();
    let qb = BigInt::from(q);
    for k in 0..h {
        let scale = BigRational::from_integer(qb.pow((h - k) as u32));
        if c[n - k] != &c[k] * scale {
            return None;
        }
    }
    Some(h)
}

// The `h` zeros of `xi` in (0, 1/2), all simple and none at the endpoints.
fn simple_zeros_half_period(
    xi: &CosinePoly,
    h: usize,
    grid_factor: usize,
    unit: usize,
) -> Result<Vec<f64>> {
    if h == 0 {
        return Ok(Vec::new());
    }
    let mut cells = grid_factor * unit;
    let max_cells = (MAX_GRID_FACTOR * unit).max(cells);
    loop {
        let step = 0.5 / cells as f64;
        let values: Vec<f64> = (0..=cells).map(|i| xi.eval(i as f64 * step)).collect();
        let mut brackets = Vec::new();
        let mut i = 0;
        while i < cells {
            let (a, b) = (values[i], values[i + 1]);
            if b == 0.0 && i + 1 < cells {
                brackets.push((i as f64 * step, (i + 2) as f64 * step, true));
                i += 2;
                continue;
            }
            if a * b < 0.0 {
                brackets.push((i as f64 * step, (i + 1) as f64 * step, false));
            }
            i += 1;
        }
        if brackets.len() == h {
            return Ok(brackets
                .into_iter()
                .map(|(lo, hi, exact_mid)| {
                    if exact_mid {
                        0.5 * (lo + hi)
                    } else {
                        polish(xi, lo, hi)
                    }
                })
                .collect());
        }
        if brackets.len() > h || cells >= max_cells {
            let suspects = (1..cells)
                .filter(|&i| {
                    values[i].abs() <= values[i - 1].abs()
                        && values[i].abs() <= values[i + 1].abs()
                        && values[i - 1] * values[i + 1] > 0.0
                })
                .map(|i| ((i - 1) as f64 * step, (i + 1) as f64 * step))
                .collect();
            return Err(Error::RootIsolation {
                found: 2 * brackets.len(),
                expected: 2 * h,
                suspects,
            });
        }
        cells *= 2;
    }
}

// Bisection on a sign-change bracket, then safeguarded Newton.
fn polish(xi: &CosinePoly, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = xi.eval(lo);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let fm = xi.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..8 {
        let f = xi.eval(t);
        let df = xi.derivative(t);
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = t - f / df;
        if !(lo..=hi).contains(&next) {
            break;
        }
        if (next - t).abs() < 1e-17 {
            t = next;
            break;
        }
        t = next;
    }
    t
}

/// `sum_j e(k theta_j)`.
pub fn power_sum(zeros: &ZeroAngles, k: i64) -> Complex64 {
    zeros
        .theta
        .iter()
        .map(|&t| Complex64::from_polar(1.0, TAU * k as f64 * t))
        .sum()
}

/// Coefficients of `prod_j (1 - u q^(1/2) e(-theta_j))`, real parts.
pub fn reconstruct_coefficients(zeros: &ZeroAngles, q: u32) -> Vec<f64> {
    let sq = (q as f64).sqrt();
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &t in &zeros.theta {
        let r = -Complex64::from_polar(sq, -TAU * t);
        let mut next = poly.clone();
        next.push(Complex64::new(0.0, 0.0));
        for (k, &p) in poly.iter().enumerate() {
            next[k + 1] += r * p;
        }
        poly = next;
    }
    poly.into_iter().map(|c| c.re).collect()
}
