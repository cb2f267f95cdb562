//! Executable bounds for `log |L|` and `S_n` along the critical circle.
//!
//! For `F(theta) = sum_j G(theta - theta_j)` and a trigonometric
//! polynomial `V >= G` of degree `N`,
//!
//! `F(theta) <= 2g V^(0) + sum_{0<|k|<=N} |V^(k)| w_k`
//!
//! where `w_k` bounds `|sum_j e(k theta_j)|`: either `q^(|k|/2)` (`weil`
//! mode) or the exact value from the integer power sums (`exact` mode).
//! Lower bounds are upper bounds for `-F`, so every report compares a
//! maximum against a bound on the same quantity.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::argument::{constants_a, log_modulus, SnEvaluator};
use crate::error::{Error, Result};
use crate::extremal::{interval_polys_with, ExtremalCache, Side, Target, TrigPoly};
use crate::lpoly::{compute_lpolynomial, find_zero_angles, LPolynomial, ZeroAngles};
use crate::symbol::Character;

/// Default `theta` grid for empirical extrema.
pub const DEFAULT_GRID: usize = 1 << 14;
/// Smallest accepted grid.
pub const MIN_GRID: usize = 1 << 10;
/// Default upper end of the exhaustive degree search.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 16;
/// Slack allowed in `empirical <= rigorous`.
pub const SOUNDNESS_TOL: f64 = 1e-9;
/// Cells refined by golden section in [`empirical_max`].
const REFINE_CELLS: usize = 8;
/// Zero-finding grid factor used for scans.
pub const ZERO_GRID_FACTOR: usize = 32;
/// Number of `theta` values at which the interval method is checked.
pub const INTERVAL_THETAS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundTarget {
    LogModulus,
    Sn(usize),
}

impl BoundTarget {
    /// Exponent `n` in the envelope `d / (log_q d)^(n+1)`.
    pub fn order(self) -> usize {
        match self {
            BoundTarget::LogModulus => 0,
            BoundTarget::Sn(n) => n,
        }
    }

    pub fn sides(self) -> &'static [BoundSide] {
        match self {
            BoundTarget::LogModulus => &[BoundSide::Upper],
            BoundTarget::Sn(_) => &[BoundSide::Upper, BoundSide::Lower],
        }
    }

    /// Name used in the CSV `target` column.
    pub fn column(self) -> &'static str {
        match self {
            BoundTarget::LogModulus => "logmod",
            BoundTarget::Sn(_) => "S",
        }
    }

    /// The one-sided approximation problem behind `(self, side)` and the
    /// factor turning its polynomial into a majorant of the summand of
    /// `side * F`.
    fn extremal_problem(self, side: BoundSide) -> Result<(Target, Side, f64)> {
        match (self, side) {
            (BoundTarget::LogModulus, BoundSide::Upper) => Ok((Target::Log2Sin, Side::Majorant, 1.0)),
            (BoundTarget::LogModulus, BoundSide::Lower) => Err(Error::Unsupported(
                "log_modulus has no lower bound (it is -inf at every zero)".into(),
            )),
            // S_n = -1/(n+1)! sum B_{n+1}: majorize -B_{n+1} by -P^-, and
            // -S_n by P^+
            (BoundTarget::Sn(n), BoundSide::Upper) => {
                Ok((Target::Bernoulli(n + 1), Side::Minorant, -1.0 / factorial(n + 1)))
            }
            (BoundTarget::Sn(n), BoundSide::Lower) => {
                Ok((Target::Bernoulli(n + 1), Side::Majorant, 1.0 / factorial(n + 1)))
            }
        }
    }

    /// Constant `C` of the envelope `C d / (log_q d)^(n+1)` for `side`.
    pub fn envelope_constant(self, side: BoundSide) -> Result<f64> {
        match self {
            BoundTarget::LogModulus => Ok(std::f64::consts::LN_2 / 2.0),
            BoundTarget::Sn(n) => {
                let (a_minus, a_plus) = constants_a(n)?;
                let a = match side {
                    BoundSide::Upper => a_plus,
                    BoundSide::Lower => a_minus,
                };
                Ok(a / std::f64::consts::TAU.powi(n as i32))
            }
        }
    }

    pub fn envelope(self, side: BoundSide, q: u32, d: usize) -> Result<f64> {
        let l = (d as f64).ln() / (q as f64).ln();
        Ok(self.envelope_constant(side)? * d as f64 / l.powi(self.order() as i32 + 1))
    }
}

impl fmt::Display for BoundTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundTarget::LogModulus => write!(f, "logmod"),
            BoundTarget::Sn(n) => write!(f, "s:{n}"),
        }
    }
}

impl FromStr for BoundTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "logmod" || s == "log_modulus" {
            return Ok(BoundTarget::LogModulus);
        }
        if let Some(n) = s.strip_prefix("s:").or_else(|| s.strip_prefix("S:")) {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad order in target '{s}'")))?;
            Target::Bernoulli(n + 1).oracle_mean(Side::Majorant, 0)?;
            return Ok(BoundTarget::Sn(n));
        }
        Err(Error::Parse(format!("unknown target '{s}' (expected logmod or s:n)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundSide {
    Upper,
    Lower,
}

impl BoundSide {
    pub fn sign(self) -> f64 {
        match self {
            BoundSide::Upper => 1.0,
            BoundSide::Lower => -1.0,
        }
    }
}

impl fmt::Display for BoundSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundSide::Upper => "upper",
            BoundSide::Lower => "lower",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Weil,
    Exact,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Weil, Mode::Exact];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weil => "weil",
            Mode::Exact => "exact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegreePolicy {
    Formula,
    /// Best bound over `0..=max(cap, formula)`.
    Exhaustive { cap: usize },
    Fixed(usize),
}

impl fmt::Display for DegreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreePolicy::Formula => write!(f, "formula"),
            DegreePolicy::Exhaustive { cap } => write!(f, "exhaustive:{cap}"),
            DegreePolicy::Fixed(n) => write!(f, "fixed:{n}"),
        }
    }
}

impl FromStr for DegreePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree in policy '{s}'")))
        };
        match s.split_once(':') {
            None if s == "formula" => Ok(DegreePolicy::Formula),
            None if s == "exhaustive" => Ok(DegreePolicy::Exhaustive {
                cap: DEFAULT_EXHAUSTIVE_CAP,
            }),
            Some(("exhaustive", n)) => Ok(DegreePolicy::Exhaustive { cap: num(n)? }),
            Some(("fixed", n)) => Ok(DegreePolicy::Fixed(num(n)?)),
            _ => Err(Error::Parse(format!(
                "unknown degree policy '{s}' (expected formula, exhaustive[:cap] or fixed:N)"
            ))),
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `max(0, floor(2 log_q d - (2n+6) log_q log_q d))`, with `0` when
/// `log_q d <= 1` makes the second logarithm non-positive or undefined.
pub fn degree_choice(q: u32, d: usize, n: usize) -> usize {
    let lq = (q as f64).ln();
    let l = (d as f64).ln() / lq;
    if l <= 1.0 {
        return 0;
    }
    let v = 2.0 * l - (2 * n + 6) as f64 * l.ln() / lq;
    if v.is_finite() && v > 0.0 {
        v.floor() as usize
    } else {
        0
    }
}

/// One `D` with its zeros and the two families of power-sum weights.
#[derive(Clone, Debug)]
pub struct Instance {
    pub lpoly: LPolynomial,
    pub zeros: ZeroAngles,
    /// `|sum_j e(k theta_j)|` for `k = 1..=kmax`, from exact power sums.
    exact_weights: Vec<f64>,
}

impl Instance {
    pub fn new(ch: &Character, kmax: usize) -> Result<Self> {
        Self::from_lpoly(compute_lpolynomial(ch)?, kmax)
    }

    pub fn from_lpoly(lpoly: LPolynomial, kmax: usize) -> Result<Self> {
        let zeros = find_zero_angles(&lpoly, ZERO_GRID_FACTOR)?;
        let q = lpoly.q as f64;
        let mut exact_weights = Vec::with_capacity(kmax);
        for (i, p) in lpoly.power_sums(kmax).iter().enumerate() {
            let k = i as i32 + 1;
            // |p_k| <= q^k by the prime polynomial theorem
            let qk = num_bigint::BigInt::from(lpoly.q).pow(k as u32);
            if p.abs() > qk {
                return Err(Error::InternalConsistency(format!(
                    "power sum p_{k} = {p} exceeds q^{k} for D = {}",
                    lpoly.modulus
                )));
            }
            let v: f64 = p.abs().to_string().parse().expect("integer");
            exact_weights.push(v / q.powf(k as f64 / 2.0));
        }
        Ok(Instance {
            lpoly,
            zeros,
            exact_weights,
        })
    }

    pub fn genus(&self) -> usize {
        self.lpoly.genus()
    }

    pub fn kmax(&self) -> usize {
        self.exact_weights.len()
    }

    /// Weight `w_k` for `k >= 1`.
    pub fn weight(&self, mode: Mode, k: usize) -> Result<f64> {
        let q = self.lpoly.q as f64;
        match mode {
            Mode::Weil => Ok(q.powf(k as f64 / 2.0)),
            Mode::Exact => self.exact_weights.get(k - 1).copied().ok_or(Error::TableRange {
                index: k,
                max: self.exact_weights.len(),
            }),
        }
    }

    /// `2g V^(0)` and `sum_{k != 0} |V^(k)| w_k`.
    pub fn terms(&self, v: &TrigPoly, mode: Mode) -> Result<(f64, f64)> {
        let main = 2.0 * self.genus() as f64 * v.mean();
        let mut tail = 0.0;
        for k in 1..=v.degree() {
            tail += 2.0 * v.hat(k as i64).norm() * self.weight(mode, k)?;
        }
        Ok((main, tail))
    }
}

/// Majorant of the summand of `side * F` for `target`, degree `n`.
pub fn majorant_for(cache: &ExtremalCache, target: BoundTarget, side: BoundSide, n: usize) -> Result<TrigPoly> {
    let (t, s, factor) = target.extremal_problem(side)?;
    Ok(cache.get(t, s, n)?.poly.scale(factor))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub n_used: usize,
    pub mode: Mode,
    pub main_term: f64,
    pub tail_term: f64,
    pub value: f64,
}

/// The bound on `sup side * F` at a fixed degree.
pub fn rigorous_bound(
    cache: &ExtremalCache,
    inst: &Instance,
    target: BoundTarget,
    side: BoundSide,
    n: usize,
    mode: Mode,
) -> Result<Bound> {
    let v = majorant_for(cache, target, side, n)?;
    let (main, tail) = inst.terms(&v, mode)?;
    Ok(Bound {
        n_used: n,
        mode,
        main_term: main,
        tail_term: tail,
        value: main + tail,
    })
}

/// The bound under a degree policy; exhaustive mode keeps the smallest
/// value (the lowest degree on ties).
pub fn bound_with_policy(
    cache: &ExtremalCache,
    inst: &Instance,
    target: BoundTarget,
    side: BoundSide,
    policy: DegreePolicy,
    mode: Mode,
) -> Result<Bound> {
    let (q, d, n) = (inst.lpoly.q, inst.lpoly.d, target.order());
    match policy {
        DegreePolicy::Formula => rigorous_bound(cache, inst, target, side, degree_choice(q, d, n), mode),
        DegreePolicy::Fixed(big_n) => rigorous_bound(cache, inst, target, side, big_n, mode),
        DegreePolicy::Exhaustive { cap } => {
            let top = cap.max(degree_choice(q, d, n));
            let mut best: Option<Bound> = None;
            for big_n in 0..=top {
                let b = rigorous_bound(cache, inst, target, side, big_n, mode)?;
                if best.is_none_or(|c| b.value < c.value) {
                    best = Some(b);
                }
            }
            Ok(best.expect("non-empty degree range"))
        }
    }
}

/// Largest degree any policy may ask for.
pub fn policy_max_degree(policy: DegreePolicy, q: u32, d: usize, n: usize) -> usize {
    match policy {
        DegreePolicy::Formula => degree_choice(q, d, n),
        DegreePolicy::Fixed(big_n) => big_n,
        DegreePolicy::Exhaustive { cap } => cap.max(degree_choice(q, d, n)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Empirical {
    pub max: f64,
    pub argmax: f64,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
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
        if b - a < 1e-15 {
            break;
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `side * F` at `theta`, with `F` the target built on `zeros`.
pub struct TargetFunction<'a> {
    zeros: &'a ZeroAngles,
    target: BoundTarget,
    sign: f64,
    sn: Option<SnEvaluator<'a>>,
}

impl<'a> TargetFunction<'a> {
    pub fn new(zeros: &'a ZeroAngles, target: BoundTarget, side: BoundSide) -> Result<Self> {
        let sn = match target {
            BoundTarget::LogModulus => None,
            BoundTarget::Sn(n) => Some(SnEvaluator::new(zeros, n)?),
        };
        Ok(TargetFunction {
            zeros,
            target,
            sign: side.sign(),
            sn,
        })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match &self.sn {
            None => self.sign * log_modulus(self.zeros, theta),
            Some(s) => self.sign * s.eval(theta),
        }
    }

    /// Largest one-sided limit of `side * F` at `theta`.
    pub fn upper_limit(&self, theta: f64) -> f64 {
        match &self.sn {
            None => self.eval(theta),
            Some(s) => {
                let (l, r) = s.one_sided_limits(theta);
                (self.sign * l).max(self.sign * r)
            }
        }
    }

    pub fn target(&self) -> BoundTarget {
        self.target
    }
}

/// `sup side * F` over a uniform grid of `grid` points, refined by golden
/// section around the best `8` cells and, for `S_0`, the one-sided limits
/// at every zero.
pub fn empirical_max(zeros: &ZeroAngles, target: BoundTarget, side: BoundSide, grid: usize) -> Result<Empirical> {
    if grid < MIN_GRID {
        return Err(Error::Config(format!("grid {grid} < {MIN_GRID}")));
    }
    let f = TargetFunction::new(zeros, target, side)?;
    let h = 1.0 / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|i| f.eval(i as f64 * h)).collect();
    let mut best = Empirical {
        max: f64::NEG_INFINITY,
        argmax: 0.0,
    };
    let mut consider = |t: f64, v: f64| {
        if v > best.max {
            best = Empirical {
                max: v,
                argmax: t.rem_euclid(1.0),
            };
        }
    };
    for (i, &v) in vals.iter().enumerate() {
        consider(i as f64 * h, v);
    }
    let mut order: Vec<usize> = (0..grid).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    for &i in order.iter().take(REFINE_CELLS) {
        let t0 = i as f64 * h;
        let (t, v) = golden_max(|t| f.eval(t), t0 - h, t0 + h);
        consider(t, v);
    }
    if target == BoundTarget::Sn(0) {
        for &t in &zeros.theta {
            consider(t, f.upper_limit(t));
        }
    }
    Ok(best)
}

/// Bound on `side * S_0(theta)` from the majorant (upper) or minorant
/// (lower) of the indicator of the symmetric interval `[-t, t]`, reduced to
/// `0 <= t <= 1/2` by oddness.
pub fn s0_bound_interval_method(
    cache: &ExtremalCache,
    inst: &Instance,
    theta: f64,
    n: usize,
    side: BoundSide,
    mode: Mode,
) -> Result<f64> {
    let t = theta.rem_euclid(1.0);
    if t > 0.5 {
        // S(t) = -S(1 - t): an upper bound at t is a lower bound at 1 - t
        let other = match side {
            BoundSide::Upper => BoundSide::Lower,
            BoundSide::Lower => BoundSide::Upper,
        };
        return s0_bound_interval_method(cache, inst, 1.0 - t, n, other, mode);
    }
    let (lo, hi) = interval_polys_with(cache, -t, t, n)?;
    let g2 = 2.0 * inst.genus() as f64;
    let poly = match side {
        BoundSide::Upper => hi,
        BoundSide::Lower => lo,
    };
    let (_, tail) = inst.terms(&poly, mode)?;
    // 2 S(t) = -4 g t + N([-t, t]); N is bounded by 2g T^(0) -/+ tail
    let counted = match side {
        BoundSide::Upper => g2 * poly.mean() + tail,
        BoundSide::Lower => -(g2 * poly.mean() - tail),
    };
    Ok(0.5 * (side.sign() * -2.0 * g2 * t + counted))
}

/// Outcome of checking the interval method for one `D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalCheck {
    pub points: usize,
    pub violations: usize,
    /// Smallest `bound - side * S_0` seen.
    pub min_slack: f64,
    /// Largest bound over the checked points.
    pub max_bound: f64,
}

/// Checks `side * S_0 <= bound` at [`INTERVAL_THETAS`] grid values and at
/// both one-sided limits at every zero.
pub fn check_interval_method(
    cache: &ExtremalCache,
    inst: &Instance,
    n: usize,
    side: BoundSide,
    mode: Mode,
) -> Result<IntervalCheck> {
    let f = TargetFunction::new(&inst.zeros, BoundTarget::Sn(0), side)?;
    let mut out = IntervalCheck {
        points: 0,
        violations: 0,
        min_slack: f64::INFINITY,
        max_bound: f64::NEG_INFINITY,
    };
    let thetas = (0..INTERVAL_THETAS)
        .map(|i| i as f64 / INTERVAL_THETAS as f64)
        .chain(inst.zeros.theta.iter().copied());
    for t in thetas {
        let bound = s0_bound_interval_method(cache, inst, t, n, side, mode)?;
        let slack = bound - f.upper_limit(t);
        out.points += 1;
        out.min_slack = out.min_slack.min(slack);
        out.max_bound = out.max_bound.max(bound);
        if slack < -SOUNDNESS_TOL {
            out.violations += 1;
        }
    }
    Ok(out)
}
