//! One-sided trigonometric approximation: majorants and minorants of degree
//! `N` for `log 2|sin pi theta|`, the Bernoulli periodic functions and
//! interval indicators.
//!
//! Construction is by linear programming on a grid: minimize the mean of
//! `V` subject to `V >= g` at the grid points, where `g` is the target (for
//! a majorant) or its negative (for a minorant, which is then negated
//! back). The LP is solved in dual form, whose multipliers are the
//! coefficients of `V`. Violations found on a grid ten times finer are fed
//! back as extra constraints, and whatever violation survives is removed by
//! shifting the constant term.

mod lp;
mod trig;

pub use lp::{maximize, LpSolution, WarmLp};
pub use trig::TrigPoly;

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::argument::{bernoulli_extrema, BernoulliTable, BERNOULLI_NMAX};
use crate::error::{Error, Result};

/// Default LP grid size per unit of `N + 1`.
pub const GRID_FACTOR: usize = 40;
/// Fine certification grid relative to the LP grid.
pub const CERTIFY_FACTOR: usize = 10;
/// Points `2^-j` and `1 - 2^-j`, `j <= CLUSTER_DEPTH`, added near a
/// singularity at 0.
pub const CLUSTER_DEPTH: i32 = 40;
/// Smallest certified margin accepted after repair.
pub const MARGIN_TOL: f64 = -1e-12;

const CUT_ROUNDS: usize = 40;
const CUT_TOL: f64 = 1e-14;
const CUT_REL_TOL: f64 = 1e-9;
const CUTS_PER_ROUND: usize = 32;
const STALL_ROUNDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    /// `log 2|sin pi theta|`.
    Log2Sin,
    /// The Bernoulli periodic function of index `m >= 1`; `m = 1` is the
    /// sawtooth.
    Bernoulli(usize),
}

impl Target {
    pub fn sawtooth() -> Self {
        Target::Bernoulli(1)
    }

    fn validate(self) -> Result<()> {
        match self {
            Target::Bernoulli(m) if m == 0 || m > BERNOULLI_NMAX => Err(Error::TableRange {
                index: m,
                max: BERNOULLI_NMAX,
            }),
            _ => Ok(()),
        }
    }

    /// Whether the target is even in `theta` (then cosine terms suffice).
    pub fn is_even(self) -> bool {
        match self {
            Target::Log2Sin => true,
            Target::Bernoulli(m) => m % 2 == 0,
        }
    }

    fn singular_at_zero(self) -> bool {
        matches!(self, Target::Log2Sin | Target::Bernoulli(1))
    }

    /// Target value; `-inf` for `log2sin` at integers.
    pub fn eval(self, theta: f64) -> f64 {
        match self {
            Target::Log2Sin => {
                let x = theta - theta.round();
                if x == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (2.0 * (PI * x).sin().abs()).ln()
                }
            }
            Target::Bernoulli(m) => BernoulliTable::shared()
                .periodic(m, theta)
                .expect("validated index"),
        }
    }

    /// Upper envelope of `sign * target` (the function a majorant of
    /// `sign * target` must dominate).
    fn upper_envelope(self, sign: f64, theta: f64) -> f64 {
        if self == Target::Bernoulli(1) && theta == theta.floor() {
            return 0.5;
        }
        sign * self.eval(theta)
    }

    /// Optimal mean of the extremal polynomial of degree `n`.
    pub fn oracle_mean(self, side: Side, n: usize) -> Result<f64> {
        self.validate()?;
        let d = (n + 1) as f64;
        match (self, side) {
            (Target::Log2Sin, Side::Majorant) => Ok(LN_2 / d),
            (Target::Log2Sin, Side::Minorant) => Err(unbounded_below()),
            (Target::Bernoulli(m), _) => {
                let (mx, mn) = bernoulli_extrema(m)?;
                let v = if side == Side::Majorant { mx } else { mn };
                Ok(v / d.powi(m as i32))
            }
        }
    }
}

fn unbounded_below() -> Error {
    Error::Unsupported("log2sin is unbounded below; no trigonometric minorant exists".into())
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Log2Sin => write!(f, "log2sin"),
            Target::Bernoulli(1) => write!(f, "sawtooth"),
            Target::Bernoulli(m) => write!(f, "bernoulli:{}", m - 1),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    /// `log2sin`, `sawtooth`, or `bernoulli:n` for the index `n + 1`
    /// function.
    fn from_str(s: &str) -> Result<Self> {
        let t = match s.trim() {
            "log2sin" => Target::Log2Sin,
            "sawtooth" => Target::Bernoulli(1),
            other => {
                let n = other
                    .strip_prefix("bernoulli:")
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown extremal target {other:?}")))?;
                Target::Bernoulli(n + 1)
            }
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Majorant,
    Minorant,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Majorant => 1.0,
            Side::Minorant => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Side::Majorant => Side::Minorant,
            Side::Minorant => Side::Majorant,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Majorant => "majorant",
            Side::Minorant => "minorant",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "majorant" | "upper" => Ok(Side::Majorant),
            "minorant" | "lower" => Ok(Side::Minorant),
            other => Err(Error::Parse(format!("unknown side {other:?}"))),
        }
    }
}

/// A certified one-sided polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSidedResult {
    pub poly: TrigPoly,
    pub side: Side,
    pub target: Target,
    /// Minimum of `side * (poly - target)` over the certification points.
    pub certified_margin: f64,
    /// Constant shift applied (in the direction of `side`).
    pub repair_epsilon: f64,
    pub achieved_mean: f64,
    /// Mean before the repair shift.
    pub lp_mean: f64,
    pub oracle_mean: f64,
    pub lp_iterations: usize,
    pub cut_rounds: usize,
}

impl OneSidedResult {
    /// `(achieved - oracle) / |oracle|`.
    pub fn relative_gap(&self) -> f64 {
        (self.achieved_mean - self.oracle_mean) / self.oracle_mean.abs()
    }
}

fn basis_len(n: usize, even: bool) -> usize {
    if even {
        n + 1
    } else {
        2 * n + 1
    }
}

fn basis_column(theta: f64, n: usize, even: bool) -> Vec<f64> {
    let mut col = Vec::with_capacity(basis_len(n, even));
    col.push(1.0);
    for k in 1..=n {
        col.push((TAU * k as f64 * theta).cos());
    }
    if !even {
        for k in 1..=n {
            col.push((TAU * k as f64 * theta).sin());
        }
    }
    col
}

fn poly_from_coefficients(y: &[f64], n: usize, even: bool) -> TrigPoly {
    let cos = y[..=n].to_vec();
    let sin = if even { vec![0.0; n] } else { y[n + 1..].to_vec() };
    TrigPoly::new(cos, sin).expect("consistent lengths")
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-16 {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

struct MarginScan {
    worst: f64,
    worst_theta: f64,
    /// Refined local minima below `CUT_TOL`, most violated first.
    violations: Vec<(f64, f64)>,
}

/// Scans `V - g` on a fine grid plus the extra points, refining local minima
/// by golden section.
fn scan_margin(v: &TrigPoly, g: &dyn Fn(f64) -> f64, fine: usize, extra: &[f64]) -> MarginScan {
    let margin = |t: f64| {
        let gv = g(t);
        if gv == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            v.eval(t) - gv
        }
    };
    let h = 1.0 / fine as f64;
    let vals: Vec<f64> = (0..fine).map(|i| margin(i as f64 * h)).collect();
    let mut worst = f64::INFINITY;
    let mut worst_theta = 0.0;
    let mut found = Vec::new();
    let mut note = |t: f64, m: f64, found: &mut Vec<(f64, f64)>| {
        if m < worst {
            worst = m;
            worst_theta = t;
        }
        if m < -CUT_TOL {
            found.push((t.rem_euclid(1.0), m));
        }
    };
    for (i, &m) in vals.iter().enumerate() {
        let prev = vals[(i + fine - 1) % fine];
        let next = vals[(i + 1) % fine];
        note(i as f64 * h, m, &mut found);
        if m <= prev && m <= next && m < 1e-6 {
            let t0 = i as f64 * h;
            let (t, mv) = golden_min(margin, t0 - h, t0 + h);
            note(t, mv, &mut found);
        }
    }
    for &t in extra {
        note(t, margin(t), &mut found);
    }
    found.sort_by(|a, b| a.1.total_cmp(&b.1));
    MarginScan {
        worst,
        worst_theta,
        violations: found,
    }
}

/// LP in dual form started at the midpoint rule on `2N + 1` nodes, whose
/// positive weights integrate every basis function exactly.
fn quadrature_start(g: &dyn Fn(f64) -> f64, n: usize, even: bool) -> Result<WarmLp> {
    let m = 2 * n + 1;
    let nodes: Vec<f64> = if even {
        (0..=n).map(|i| (i as f64 + 0.5) / m as f64).collect()
    } else {
        (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect()
    };
    let cols: Vec<Vec<f64>> = nodes.iter().map(|&t| basis_column(t, n, even)).collect();
    let cost: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    let mut rhs = vec![0.0; basis_len(n, even)];
    rhs[0] = 1.0;
    let basis = (0..cols.len()).collect();
    WarmLp::new(rhs, cols, cost, basis)
}

fn cluster_points() -> Vec<f64> {
    (1..=CLUSTER_DEPTH)
        .flat_map(|j| {
            let e = 2f64.powi(-j);
            [e, 1.0 - e]
        })
        .collect()
}

/// Builds the degree-`n` majorant or minorant of `target` on an LP grid of
/// `grid_points` points and certifies it on a grid ten times finer.
pub fn construct_one_sided(target: Target, side: Side, n: usize, grid_points: usize) -> Result<OneSidedResult> {
    target.validate()?;
    if grid_points < 40 * (n + 1) {
        return Err(Error::Config(format!(
            "grid of {grid_points} points too coarse for degree {n} (need >= {})",
            40 * (n + 1)
        )));
    }
    if target == Target::Log2Sin && side == Side::Minorant {
        return Err(unbounded_below());
    }
    let oracle_mean = target.oracle_mean(side, n)?;
    let sign = side.sign();
    let even = target.is_even();
    let g = move |t: f64| target.upper_envelope(sign, t);

    let mut points: Vec<f64> = (0..grid_points).map(|i| i as f64 / grid_points as f64).collect();
    let extra = if target.singular_at_zero() {
        cluster_points()
    } else {
        Vec::new()
    };
    points.extend(&extra);

    let fine = CERTIFY_FACTOR * grid_points;
    let mut lp = quadrature_start(&g, n, even)?;
    for &t in &points {
        let gv = g(t);
        if gv.is_finite() {
            lp.add_column(basis_column(t, n, even), gv);
        }
    }
    // cutting stops once violations are negligible against the optimum
    let cut_tol = CUT_REL_TOL * oracle_mean.abs();
    let mut rounds = 0;
    let mut stalled = 0;
    let mut prev_worst = f64::NEG_INFINITY;
    let mut best: Option<(f64, TrigPoly, f64)> = None;
    loop {
        lp.solve()?;
        let v = poly_from_coefficients(&lp.duals(), n, even);
        rounds += 1;
        let scan = scan_margin(&v, &g, fine, &extra);
        let repaired = v.mean() + (-scan.worst).max(0.0);
        if best.as_ref().is_none_or(|b| repaired < b.0) {
            best = Some((repaired, v, lp.objective()));
        }
        if scan.worst < 0.0 && scan.worst <= 0.9 * prev_worst {
            stalled += 1;
        } else {
            stalled = 0;
        }
        prev_worst = scan.worst;
        if scan.worst >= -cut_tol || stalled >= STALL_ROUNDS || rounds >= CUT_ROUNDS {
            break;
        }
        for &(t, _) in scan.violations.iter().take(CUTS_PER_ROUND) {
            let gv = g(t);
            if gv.is_finite() {
                points.push(t);
                lp.add_column(basis_column(t, n, even), gv);
            }
        }
    }
    let (_, mut v, lp_objective) = best.expect("at least one round");
    let iterations = lp.iterations();

    let mut certify_points = extra.clone();
    certify_points.extend(&points);
    let scan = scan_margin(&v, &g, fine, &certify_points);
    let repair_epsilon = (-scan.worst).max(0.0);
    v = v.add_constant(repair_epsilon);
    let after = scan_margin(&v, &g, fine, &certify_points);
    if after.worst < MARGIN_TOL {
        return Err(Error::Certification {
            theta: after.worst_theta,
            violation: -after.worst,
        });
    }
    let poly = v.scale(sign);
    Ok(OneSidedResult {
        achieved_mean: poly.mean(),
        lp_mean: sign * lp_objective,
        poly,
        side,
        target,
        certified_margin: after.worst,
        repair_epsilon,
        oracle_mean,
        lp_iterations: iterations,
        cut_rounds: rounds,
    })
}

type Slot = Arc<OnceLock<Result<Arc<OneSidedResult>>>>;

/// Populate-once store of constructions keyed by `(target, side, N)`.
#[derive(Debug)]
pub struct ExtremalCache {
    grid_factor: usize,
    slots: Mutex<HashMap<(Target, Side, usize), Slot>>,
}

impl ExtremalCache {
    pub fn new(grid_factor: usize) -> Self {
        ExtremalCache {
            grid_factor: grid_factor.max(40),
            slots: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide cache with the default grid.
    pub fn global() -> &'static ExtremalCache {
        static CACHE: OnceLock<ExtremalCache> = OnceLock::new();
        CACHE.get_or_init(|| ExtremalCache::new(GRID_FACTOR))
    }

    pub fn get(&self, target: Target, side: Side, n: usize) -> Result<Arc<OneSidedResult>> {
        let slot = {
            let mut map = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            map.entry((target, side, n)).or_default().clone()
        };
        slot.get_or_init(|| {
            construct_one_sided(target, side, n, self.grid_factor * (n + 1)).map(Arc::new)
        })
        .clone()
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `T(theta) = (beta - alpha) + P(alpha - theta) + P(theta - beta)` for a
/// sawtooth polynomial `P`.
pub fn interval_from_sawtooth(p: &TrigPoly, alpha: f64, beta: f64) -> TrigPoly {
    p.reflect().shift(alpha).add(&p.shift(beta)).add_constant(beta - alpha)
}

/// `(T^-, T^+)` with `T^- <= 1_[alpha, beta] <= T^+`, built from the
/// degree-`n` sawtooth minorant and majorant in `cache`.
pub fn interval_polys_with(cache: &ExtremalCache, alpha: f64, beta: f64, n: usize) -> Result<(TrigPoly, TrigPoly)> {
    let len = beta - alpha;
    if !(0.0..=1.0).contains(&len) {
        return Err(Error::Config(format!("interval length {len} outside [0, 1]")));
    }
    let lo = cache.get(Target::sawtooth(), Side::Minorant, n)?;
    let hi = cache.get(Target::sawtooth(), Side::Majorant, n)?;
    Ok((
        interval_from_sawtooth(&lo.poly, alpha, beta),
        interval_from_sawtooth(&hi.poly, alpha, beta),
    ))
}

pub fn interval_polys(alpha: f64, beta: f64, n: usize) -> Result<(TrigPoly, TrigPoly)> {
    interval_polys_with(ExtremalCache::global(), alpha, beta, n)
}

/// Normalized indicator of `[alpha, beta]` on `R/Z` (1/2 at the endpoints
/// of a proper subinterval).
pub fn interval_indicator(alpha: f64, beta: f64, theta: f64) -> f64 {
    let len = beta - alpha;
    if len >= 1.0 {
        return 1.0;
    }
    let r = alpha + (theta - alpha).rem_euclid(1.0);
    if r == alpha || r == beta {
        if len == 0.0 {
            1.0
        } else {
            0.5
        }
    } else if r < beta {
        1.0
    } else {
        0.0
    }
}

/// A one-sided approximation of the indicator of `[alpha, beta]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalResult {
    pub poly: TrigPoly,
    pub side: Side,
    pub alpha: f64,
    pub beta: f64,
    /// `|T^(0) - (beta - alpha)|`, ideally `1/(N+1)`.
    pub gap: f64,
    /// `(gap - 1/(N+1)) (N+1)`.
    pub relative_gap: f64,
    /// Smallest `T - 1_I` (majorant, closed interval) or `1_I - T`
    /// (minorant, open interval) found on the certification grid.
    pub certified_margin: f64,
}

/// Degree-`n` majorant or minorant of the indicator of `[alpha, beta]`,
/// certified on its own fine grid.
pub fn interval_one_sided(cache: &ExtremalCache, alpha: f64, beta: f64, side: Side, n: usize) -> Result<IntervalResult> {
    let (lo, hi) = interval_polys_with(cache, alpha, beta, n)?;
    let poly = match side {
        Side::Majorant => hi,
        Side::Minorant => lo,
    };
    let sign = side.sign();
    let len = beta - alpha;
    let envelope = move |t: f64| {
        let r = alpha + (t - alpha).rem_euclid(1.0);
        let inside_open = r > alpha && r < beta;
        let on_edge = r == alpha || r == beta || len >= 1.0;
        match side {
            Side::Majorant => f64::from(inside_open || on_edge),
            Side::Minorant => -f64::from(inside_open || len >= 1.0),
        }
    };
    let fine = CERTIFY_FACTOR * GRID_FACTOR * (n + 1);
    let v = poly.scale(sign);
    let scan = scan_margin(&v, &envelope, fine, &[alpha.rem_euclid(1.0), beta.rem_euclid(1.0)]);
    if scan.worst < MARGIN_TOL {
        return Err(Error::Certification {
            theta: scan.worst_theta,
            violation: -scan.worst,
        });
    }
    let gap = (poly.mean() - len).abs();
    Ok(IntervalResult {
        gap,
        relative_gap: (gap * (n + 1) as f64) - 1.0,
        poly,
        side,
        alpha,
        beta,
        certified_margin: scan.worst,
    })
}

/// Coefficient diagnostics for a constructed polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientReport {
    /// `log2sin` only: largest amount by which some `U^(k)` leaves
    /// `[-1/(2|k|), 0]` (non-positive when the bounds hold).
    pub coefficient_excess: Option<f64>,
    /// Bernoulli targets: smallest `C` with `|P^(k)| <= C / k^m`.
    pub c_fit: Option<f64>,
}

pub const COEFFICIENT_TOL: f64 = 1e-6;

pub fn verify_coefficient_bounds(result: &OneSidedResult) -> Result<CoefficientReport> {
    let p = &result.poly;
    match result.target {
        Target::Log2Sin => {
            let excess = (1..=p.degree() as i64)
                .map(|k| {
                    let u = p.hat(k).re;
                    u.max(-1.0 / (2.0 * k as f64) - u)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if excess > COEFFICIENT_TOL {
                return Err(Error::InternalConsistency(format!(
                    "log2sin majorant coefficient outside [-1/(2k), 0] by {excess:e}"
                )));
            }
            Ok(CoefficientReport {
                coefficient_excess: Some(excess),
                c_fit: None,
            })
        }
        Target::Bernoulli(m) => {
            let c = (1..=p.degree() as i64)
                .map(|k| p.hat(k).norm() * (k as f64).powi(m as i32))
                .fold(0.0, f64::max);
            Ok(CoefficientReport {
                coefficient_excess: None,
                c_fit: Some(c),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(target: Target, side: Side, n: usize) -> OneSidedResult {
        construct_one_sided(target, side, n, GRID_FACTOR * (n + 1)).unwrap()
    }

    #[test]
    fn degree_zero_constants() {
        let r = build(Target::Log2Sin, Side::Majorant, 0);
        assert!((r.achieved_mean - LN_2).abs() < 1e-12);
        let r = build(Target::sawtooth(), Side::Majorant, 0);
        assert!((r.achieved_mean - 0.5).abs() < 1e-12);
        let r = build(Target::sawtooth(), Side::Minorant, 0);
        assert!((r.achieved_mean + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bernoulli2_majorant_mean() {
        for n in [4, 8] {
            let r = build(Target::Bernoulli(2), Side::Majorant, n);
            let oracle = 1.0 / 6.0 / ((n + 1) * (n + 1)) as f64;
            assert!((r.achieved_mean / oracle - 1.0).abs() < 5e-3);
            assert!(r.lp_mean <= oracle * (1.0 + 1e-9));
            assert!(r.poly.odd_part_norm() == 0.0);
            assert!(r.certified_margin >= MARGIN_TOL);
        }
    }

    #[test]
    fn log2sin_minorant_unsupported() {
        assert!(matches!(
            construct_one_sided(Target::Log2Sin, Side::Minorant, 4, 200),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            construct_one_sided(Target::Log2Sin, Side::Majorant, 4, 100),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn target_parsing() {
        assert_eq!("bernoulli:1".parse::<Target>().unwrap(), Target::Bernoulli(2));
        assert_eq!("sawtooth".parse::<Target>().unwrap(), Target::Bernoulli(1));
        assert_eq!(Target::Bernoulli(3).to_string(), "bernoulli:2");
        assert!("bernoulli:13".parse::<Target>().is_err());
        assert!("cosine".parse::<Target>().is_err());
        assert_eq!("lower".parse::<Side>().unwrap(), Side::Minorant);
    }

    #[test]
    fn interval_degree_zero() {
        let cache = ExtremalCache::new(GRID_FACTOR);
        let (lo, hi) = interval_polys_with(&cache, 0.2, 0.7, 0).unwrap();
        assert!((hi.mean() - 1.5).abs() < 1e-12);
        assert!((lo.mean() + 0.5).abs() < 1e-12);
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn interval_gap_is_one_over_n_plus_one() {
        let cache = ExtremalCache::new(GRID_FACTOR);
        for side in [Side::Majorant, Side::Minorant] {
            let r = interval_one_sided(&cache, 0.2, 0.7, side, 4).unwrap();
            assert!(r.relative_gap.abs() < 5e-3, "{side}: {}", r.relative_gap);
            assert!(r.certified_margin >= MARGIN_TOL);
        }
    }

    #[test]
    fn indicator_conventions() {
        assert_eq!(interval_indicator(0.2, 0.7, 0.5), 1.0);
        assert_eq!(interval_indicator(0.2, 0.7, 0.7), 0.5);
        assert_eq!(interval_indicator(0.2, 0.7, 1.2), 0.5);
        assert_eq!(interval_indicator(0.2, 0.7, 0.9), 0.0);
        assert_eq!(interval_indicator(-0.1, 0.1, 0.95), 1.0);
        assert_eq!(interval_indicator(0.0, 1.0, 0.3), 1.0);
    }
}
