//! Ensemble scans: every (or a seeded random sample of) `D` in `H_d`, each
//! run through character, L-polynomial, zeros, empirical extrema and
//! rigorous bounds. Rows come out sorted by `D` whatever the schedule.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_with_policy, check_interval_method, empirical_max, policy_max_degree, BoundSide, BoundTarget,
    DegreePolicy, Empirical, Instance, IntervalCheck, Mode, DEFAULT_GRID, MIN_GRID, SOUNDNESS_TOL,
};
use crate::error::{Error, Result};
use crate::extremal::{ExtremalCache, Side, Target};
use crate::fq::{hd_count, hd_block, is_squarefree, FieldSpec, MonicPoly};
use crate::par::{self, Exec};
use crate::symbol::Character;

/// Default cap on the number of `D` per scan.
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sample {
    All,
    Random(u64),
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sample::All => write!(f, "all"),
            Sample::Random(m) => write!(f, "random:{m}"),
        }
    }
}

impl FromStr for Sample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(Sample::All);
        }
        if let Some(m) = s.strip_prefix("random:") {
            let m: u64 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad sample size in '{s}'")))?;
            if m == 0 {
                return Err(Error::Parse("random sample size must be positive".into()));
            }
            return Ok(Sample::Random(m));
        }
        Err(Error::Parse(format!("unknown sample '{s}' (expected all or random:m)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub q: u32,
    pub d: usize,
    pub targets: Vec<BoundTarget>,
    pub policies: Vec<DegreePolicy>,
    pub sample: Sample,
    pub seed: u64,
    pub grid: usize,
    pub budget: u64,
    /// Slack allowed in `empirical <= rigorous`; at most the default.
    pub soundness_tol: f64,
    pub exec: Exec,
}

impl ScanConfig {
    pub fn new(q: u32, d: usize) -> Self {
        ScanConfig {
            q,
            d,
            targets: vec![
                BoundTarget::LogModulus,
                BoundTarget::Sn(0),
                BoundTarget::Sn(1),
                BoundTarget::Sn(2),
            ],
            policies: vec![DegreePolicy::Formula, DegreePolicy::Exhaustive { cap: 16 }],
            sample: Sample::All,
            seed: 0,
            grid: DEFAULT_GRID,
            budget: DEFAULT_BUDGET,
            soundness_tol: SOUNDNESS_TOL,
            exec: Exec::Parallel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        FieldSpec::new(self.q)?;
        if self.d < 3 || self.d.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "scans need odd d >= 3 (genus >= 1), got d = {}",
                self.d
            )));
        }
        if self.targets.is_empty() || self.policies.is_empty() {
            return Err(Error::Config("at least one target and one degree policy required".into()));
        }
        if self.grid < MIN_GRID {
            return Err(Error::Config(format!("grid {} < {MIN_GRID}", self.grid)));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if !(0.0..=SOUNDNESS_TOL).contains(&self.soundness_tol) {
            return Err(Error::Config(format!("soundness tolerance must lie in [0, {SOUNDNESS_TOL:e}]")));
        }
        Ok(())
    }

    fn kmax(&self) -> usize {
        let mut k = 0;
        for &t in &self.targets {
            for &p in &self.policies {
                k = k.max(policy_max_degree(p, self.q, self.d, t.order()));
            }
        }
        k
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "D")]
    pub modulus: String,
    pub index: u64,
    pub c: Vec<i64>,
    pub target: BoundTarget,
    pub side: BoundSide,
    pub policy: DegreePolicy,
    pub mode: Mode,
    pub n_used: usize,
    pub main_term: f64,
    pub tail_term: f64,
    pub rigorous_bound: f64,
    pub empirical_max: f64,
    pub argmax: f64,
    pub ratio: f64,
}

impl ScanRow {
    pub fn is_sound(&self, tol: f64) -> bool {
        self.empirical_max <= self.rigorous_bound + tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: String,
    #[serde(rename = "D")]
    pub modulus: String,
    pub detail: String,
}

/// Interval-method results for `S_0`, per `(side, policy, mode)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSummary {
    pub side: BoundSide,
    pub policy: DegreePolicy,
    pub mode: Mode,
    pub points: usize,
    pub violations: usize,
    pub min_slack: f64,
    /// Largest `(sup of the sup-norm bound) / (sup of the interval bound)`.
    pub max_bound_ratio: f64,
    pub min_bound_ratio: f64,
}

/// Lower edges of the ratio histogram bins; the last bin is open.
pub const HISTOGRAM_EDGES: [f64; 12] = [
    f64::NEG_INFINITY,
    0.0,
    0.25,
    0.5,
    0.75,
    1.0,
    1.25,
    1.5,
    2.0,
    3.0,
    5.0,
    10.0,
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub target: BoundTarget,
    pub side: BoundSide,
    pub policy: DegreePolicy,
    pub mode: Mode,
    pub rows: usize,
    pub max_empirical: f64,
    pub mean_empirical: f64,
    pub max_bound: f64,
    pub mean_bound: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub histogram: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanOutput {
    pub q: u32,
    pub d: usize,
    pub polys: usize,
    pub truncated: bool,
    pub rows: Vec<ScanRow>,
    pub aggregates: Vec<Aggregate>,
    pub interval: Vec<IntervalSummary>,
    pub violations: Vec<Violation>,
}

/// The `D` to scan in index order, and whether the budget cut the list.
pub fn select_polys(cfg: &ScanConfig) -> Result<(Vec<MonicPoly>, bool)> {
    let field = FieldSpec::new(cfg.q)?;
    let total = hd_count(field, cfg.d).ok_or_else(|| Error::Resource {
        degree: cfg.d,
        reason: "q^d overflows u64".into(),
    })?;
    let monic = field.monic_count(cfg.d).expect("checked above");
    match cfg.sample {
        Sample::All => {
            let take = total.min(cfg.budget);
            let polys: Vec<MonicPoly> = if cfg.exec == Exec::Parallel && take == total {
                crate::fq::collect_hd(field, cfg.d, cfg.exec)?
            } else {
                hd_block(field, cfg.d, 0..monic).take(take as usize).collect()
            };
            Ok((polys, take < total))
        }
        Sample::Random(m) => {
            if m > total {
                return Err(Error::Config(format!(
                    "random sample of {m} exceeds |H_{}| = {total}",
                    cfg.d
                )));
            }
            let take = m.min(cfg.budget);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut chosen = BTreeSet::new();
            while (chosen.len() as u64) < take {
                let i = rng.random_range(0..monic);
                if !chosen.contains(&i) && is_squarefree(MonicPoly::from_index(field, cfg.d, i).as_poly()) {
                    chosen.insert(i);
                }
            }
            let polys = chosen
                .into_iter()
                .map(|i| MonicPoly::from_index(field, cfg.d, i))
                .collect();
            Ok((polys, take < m))
        }
    }
}

/// Builds every extremal polynomial the scan can ask for, in parallel.
pub fn prewarm(cache: &ExtremalCache, cfg: &ScanConfig) -> Result<()> {
    let mut keys = BTreeSet::new();
    for &t in &cfg.targets {
        for &p in &cfg.policies {
            let top = policy_max_degree(p, cfg.q, cfg.d, t.order());
            let degrees: Vec<usize> = match p {
                DegreePolicy::Exhaustive { .. } => (0..=top).collect(),
                _ => vec![top],
            };
            for n in degrees {
                let problems: Vec<(Target, Side)> = match t {
                    BoundTarget::LogModulus => vec![(Target::Log2Sin, Side::Majorant)],
                    BoundTarget::Sn(k) => {
                        let mut v = vec![
                            (Target::Bernoulli(k + 1), Side::Majorant),
                            (Target::Bernoulli(k + 1), Side::Minorant),
                        ];
                        if k == 0 {
                            v.push((Target::sawtooth(), Side::Majorant));
                            v.push((Target::sawtooth(), Side::Minorant));
                        }
                        v
                    }
                };
                for (target, side) in problems {
                    keys.insert((target, side, n));
                }
            }
        }
    }
    let keys: Vec<(Target, Side, usize)> = keys.into_iter().collect();
    for r in par::map(cfg.exec, &keys, |&(t, s, n)| cache.get(t, s, n).map(|_| ())) {
        r?;
    }
    Ok(())
}

struct PerPoly {
    rows: Vec<ScanRow>,
    interval: Vec<(BoundSide, DegreePolicy, Mode, IntervalCheck, f64)>,
    violations: Vec<Violation>,
}

fn scan_one(cache: &ExtremalCache, cfg: &ScanConfig, d: &MonicPoly, kmax: usize) -> Result<PerPoly> {
    let ch = Character::new(d.clone())?;
    let inst = Instance::new(&ch, kmax)?;
    let modulus = d.to_string();
    let mut out = PerPoly {
        rows: Vec::new(),
        interval: Vec::new(),
        violations: Vec::new(),
    };
    for &target in &cfg.targets {
        for &side in target.sides() {
            let emp: Empirical = empirical_max(&inst.zeros, target, side, cfg.grid)?;
            let envelope = target.envelope(side, cfg.q, cfg.d)?;
            for &policy in &cfg.policies {
                let mut by_mode = Vec::new();
                for mode in Mode::ALL {
                    let b = bound_with_policy(cache, &inst, target, side, policy, mode)?;
                    let row = ScanRow {
                        modulus: modulus.clone(),
                        index: d.index(),
                        c: inst.lpoly.c.clone(),
                        target,
                        side,
                        policy,
                        mode,
                        n_used: b.n_used,
                        main_term: b.main_term,
                        tail_term: b.tail_term,
                        rigorous_bound: b.value,
                        empirical_max: emp.max,
                        argmax: emp.argmax,
                        ratio: emp.max / envelope,
                    };
                    if !row.is_sound(cfg.soundness_tol) {
                        out.violations.push(Violation {
                            kind: "empirical_exceeds_bound".into(),
                            modulus: modulus.clone(),
                            detail: csv_row(cfg.q, cfg.d, &row),
                        });
                    }
                    by_mode.push(b);
                    out.rows.push(row);
                    if target == BoundTarget::Sn(0) {
                        let check = check_interval_method(cache, &inst, b.n_used, side, mode)?;
                        if check.violations > 0 {
                            out.violations.push(Violation {
                                kind: "interval_method".into(),
                                modulus: modulus.clone(),
                                detail: format!(
                                    "{side} {policy} {mode} N={}: {} of {} points, worst slack {:e}",
                                    b.n_used, check.violations, check.points, check.min_slack
                                ),
                            });
                        }
                        out.interval.push((side, policy, mode, check, b.value / check.max_bound));
                    }
                }
                if by_mode[1].value > by_mode[0].value + cfg.soundness_tol {
                    out.violations.push(Violation {
                        kind: "mode_order".into(),
                        modulus: modulus.clone(),
                        detail: format!(
                            "{target} {side} {policy}: exact {} > weil {}",
                            by_mode[1].value, by_mode[0].value
                        ),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn aggregate(rows: &[ScanRow]) -> Vec<Aggregate> {
    let mut groups: Vec<Aggregate> = Vec::new();
    for r in rows {
        let pos = groups
            .iter()
            .position(|a| a.target == r.target && a.side == r.side && a.policy == r.policy && a.mode == r.mode);
        let a = match pos {
            Some(i) => &mut groups[i],
            None => {
                groups.push(Aggregate {
                    target: r.target,
                    side: r.side,
                    policy: r.policy,
                    mode: r.mode,
                    rows: 0,
                    max_empirical: f64::NEG_INFINITY,
                    mean_empirical: 0.0,
                    max_bound: f64::NEG_INFINITY,
                    mean_bound: 0.0,
                    max_ratio: f64::NEG_INFINITY,
                    mean_ratio: 0.0,
                    histogram: vec![0; HISTOGRAM_EDGES.len()],
                });
                groups.last_mut().expect("just pushed")
            }
        };
        a.rows += 1;
        a.max_empirical = a.max_empirical.max(r.empirical_max);
        a.mean_empirical += r.empirical_max;
        a.max_bound = a.max_bound.max(r.rigorous_bound);
        a.mean_bound += r.rigorous_bound;
        a.max_ratio = a.max_ratio.max(r.ratio);
        a.mean_ratio += r.ratio;
        let bin = HISTOGRAM_EDGES.iter().rposition(|&e| r.ratio >= e).unwrap_or(0);
        a.histogram[bin] += 1;
    }
    for a in &mut groups {
        let n = a.rows as f64;
        a.mean_empirical /= n;
        a.mean_bound /= n;
        a.mean_ratio /= n;
    }
    groups
}

/// Runs the scan with the given extremal cache.
pub fn ensemble_scan_with(cache: &ExtremalCache, cfg: &ScanConfig) -> Result<ScanOutput> {
    cfg.validate()?;
    let (polys, truncated) = select_polys(cfg)?;
    prewarm(cache, cfg)?;
    let kmax = cfg.kmax();
    let parts = par::map(cfg.exec, &polys, |d| scan_one(cache, cfg, d, kmax));
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut interval: Vec<IntervalSummary> = Vec::new();
    for part in parts {
        let part = part?;
        rows.extend(part.rows);
        violations.extend(part.violations);
        for (side, policy, mode, check, ratio) in part.interval {
            let pos = interval
                .iter()
                .position(|s| s.side == side && s.policy == policy && s.mode == mode);
            let s = match pos {
                Some(i) => &mut interval[i],
                None => {
                    interval.push(IntervalSummary {
                        side,
                        policy,
                        mode,
                        points: 0,
                        violations: 0,
                        min_slack: f64::INFINITY,
                        max_bound_ratio: f64::NEG_INFINITY,
                        min_bound_ratio: f64::INFINITY,
                    });
                    interval.last_mut().expect("just pushed")
                }
            };
            s.points += check.points;
            s.violations += check.violations;
            s.min_slack = s.min_slack.min(check.min_slack);
            s.max_bound_ratio = s.max_bound_ratio.max(ratio);
            s.min_bound_ratio = s.min_bound_ratio.min(ratio);
        }
    }
    Ok(ScanOutput {
        q: cfg.q,
        d: cfg.d,
        polys: polys.len(),
        truncated,
        aggregates: aggregate(&rows),
        rows,
        interval,
        violations,
    })
}

pub fn ensemble_scan(cfg: &ScanConfig) -> Result<ScanOutput> {
    ensemble_scan_with(ExtremalCache::global(), cfg)
}

pub fn csv_header(d: usize) -> String {
    let g = (d - 1) / 2;
    let mut h = String::from("q,d,D");
    for k in 0..=2 * g {
        let _ = write!(h, ",c_{k}");
    }
    h.push_str(",target,n,side,policy,N_used,mode,main_term,tail_term,rigorous_bound,empirical_max,argmax,ratio");
    h
}

/// One CSV line (no newline); floats use the shortest round-trip form.
pub fn csv_row(q: u32, d: usize, r: &ScanRow) -> String {
    let mut s = format!("{q},{d},{}", r.modulus);
    for c in &r.c {
        let _ = write!(s, ",{c}");
    }
    let _ = write!(
        s,
        ",{},{},{},{},{},{},{},{},{},{},{},{}",
        r.target.column(),
        r.target.order(),
        r.side,
        r.policy,
        r.n_used,
        r.mode,
        r.main_term,
        r.tail_term,
        r.rigorous_bound,
        r.empirical_max,
        r.argmax,
        r.ratio
    );
    s
}

pub fn to_csv(out: &ScanOutput) -> String {
    let mut s = csv_header(out.d);
    s.push('\n');
    for r in &out.rows {
        s.push_str(&csv_row(out.q, out.d, r));
        s.push('\n');
    }
    s
}

/// Run manifest: configuration, build, tolerances and summaries. Contains
/// nothing time- or schedule-dependent.
pub fn manifest(cfg: &ScanConfig, out: &ScanOutput) -> serde_json::Value {
    serde_json::json!({
        "q": cfg.q,
        "d": cfg.d,
        "sample": cfg.sample.to_string(),
        "seed": cfg.seed,
        "grid_size": cfg.grid,
        "targets": cfg.targets.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "degree_policies": cfg.policies.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "budget": cfg.budget,
        "tolerances": {
            "soundness": cfg.soundness_tol,
            "mode_order": cfg.soundness_tol,
            "extremal_margin": crate::extremal::MARGIN_TOL,
            "zero_snap": crate::argument::ZERO_SNAP,
        },
        "git_describe": env!("HYPERELL_GIT_DESCRIBE"),
        "version": env!("CARGO_PKG_VERSION"),
        "polys": out.polys,
        "rows": out.rows.len(),
        "truncated": out.truncated,
        "violations": out.violations,
        "aggregates": out.aggregates.iter().map(|a| serde_json::json!({
            "target": a.target.to_string(),
            "side": a.side.to_string(),
            "policy": a.policy.to_string(),
            "mode": a.mode.to_string(),
            "rows": a.rows,
            "max_empirical": a.max_empirical,
            "mean_empirical": a.mean_empirical,
            "max_bound": a.max_bound,
            "mean_bound": a.mean_bound,
            "max_ratio": a.max_ratio,
            "mean_ratio": a.mean_ratio,
            "histogram_edges": HISTOGRAM_EDGES.iter().map(|e| if e.is_finite() { serde_json::json!(e) } else { serde_json::json!("-inf") }).collect::<Vec<_>>(),
            "histogram": a.histogram,
        })).collect::<Vec<_>>(),
        "interval_method": out.interval.iter().map(|s| serde_json::json!({
            "side": s.side.to_string(),
            "policy": s.policy.to_string(),
            "mode": s.mode.to_string(),
            "points": s.points,
            "violations": s.violations,
            "min_slack": s.min_slack,
            "sup_norm_over_interval_bound": [s.min_bound_ratio, s.max_bound_ratio],
        })).collect::<Vec<_>>(),
    })
}
