//! Acceptance gate. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits non-zero if any fail.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperell::argument::{
    constants_table, count_zeros, integrate, lehmer_bracket, log_modulus, SnEvaluator,
};
use hyperell::bounds::Mode;
use hyperell::extremal::{
    interval_one_sided, verify_coefficient_bounds, ExtremalCache, Side, Target, GRID_FACTOR,
};
use hyperell::fq::{enumerate_hd, FieldSpec, MonicPoly, Poly, PrimeTable};
use hyperell::lpoly::{compute_lpolynomial, find_zero_angles, power_sum, LPolynomial, ZeroAngles};
use hyperell::scan::{ensemble_scan, ScanConfig};
use hyperell::symbol::{lambda_sum, Character};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s as f64, || {
        format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn field(q: u32) -> FieldSpec {
    FieldSpec::new(q).unwrap()
}

/// Squarefree test by trial division with the squares of every monic
/// polynomial of degree `1..=deg/2`.
fn squarefree_by_trial(f: &Poly, squares: &[Poly]) -> bool {
    squares.iter().all(|s| !f.rem(s).unwrap().is_zero())
}

fn monic_squares(q: u32, max_deg: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    for deg in 1..=max_deg {
        for i in 0..(q as u64).pow(deg as u32) {
            let g = MonicPoly::from_index(field(q), deg, i).into_poly();
            out.push(g.mul(&g).unwrap());
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut cases = Vec::new();
    let mut enum_time = Duration::ZERO;
    for q in [3u32, 5, 7] {
        for d in [3usize, 5, 7] {
            if q == 7 && d > 5 {
                continue;
            }
            let t = Instant::now();
            let hd: Vec<MonicPoly> = enumerate_hd(field(q), d).map_err(|e| e.to_string())?.collect();
            enum_time += t.elapsed();
            let expected = (q as u64).pow(d as u32) - (q as u64).pow(d as u32 - 1);
            check(hd.len() as u64 == expected, || {
                format!("q={q} d={d}: {} != {expected}", hd.len())
            })?;
            let squares = monic_squares(q, d / 2);
            let oracle: Vec<u64> = (0..(q as u64).pow(d as u32))
                .map(|i| MonicPoly::from_index(field(q), d, i))
                .filter(|f| squarefree_by_trial(f.as_poly(), &squares))
                .map(|f| f.index())
                .collect();
            let got: Vec<u64> = hd.iter().map(|f| f.index()).collect();
            check(got == oracle, || format!("q={q} d={d}: members differ from trial division"))?;
            cases.push(format!("{q}/{d}"));
        }
    }
    within(enum_time, 10)?;
    Ok(format!(
        "{} (q,d) cases match q^d - q^(d-1) and trial division; enumeration {:.2}s",
        cases.len(),
        enum_time.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    for q in [3u32, 5, 7] {
        let table = PrimeTable::build(field(q), 8).map_err(|e| e.to_string())?;
        for k in 1..=8 {
            let s = lambda_sum(&table, k).map_err(|e| e.to_string())?;
            check(s == (q as u64).pow(k as u32), || format!("q={q} k={k}: {s}"))?;
        }
    }
    within(t.elapsed(), 5)?;
    Ok(format!("q in {{3,5,7}}, k <= 8 exact; {:.2}s", t.elapsed().as_secs_f64()))
}

/// All of H_5 and H_7 at q = 3, then 100 distinct random members of H_5 at
/// q = 5.
fn test_set() -> Vec<MonicPoly> {
    let mut set: Vec<MonicPoly> = Vec::new();
    for d in [5, 7] {
        set.extend(enumerate_hd(field(3), d).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut picked = BTreeSet::new();
    while picked.len() < 100 {
        let f = MonicPoly::from_index(field(5), 5, rng.random_range(0..5u64.pow(5)));
        let der = f.as_poly().derivative();
        if f.as_poly().gcd(&der).unwrap().is_one() {
            picked.insert(f.index());
        }
    }
    set.extend(picked.into_iter().map(|i| MonicPoly::from_index(field(5), 5, i)));
    set
}

struct Member {
    chi: Character,
    l: LPolynomial,
    zeros: ZeroAngles,
}

fn build_members(set: &[MonicPoly]) -> Result<Vec<Member>, String> {
    set.iter()
        .map(|d| {
            let chi = Character::new(d.clone()).map_err(|e| e.to_string())?;
            let l = compute_lpolynomial(&chi).map_err(|e| e.to_string())?;
            let zeros = find_zero_angles(&l, 32).map_err(|e| e.to_string())?;
            Ok(Member { chi, l, zeros })
        })
        .collect()
}

fn criterion_3(members: &[Member], build_time: Duration) -> Outcome {
    let t = Instant::now();
    for m in members {
        let c = &m.l.c;
        let g = m.l.genus();
        let q = m.l.q as i128;
        check(c.len() == 2 * g + 1 && c[0] == 1, || format!("{}: bad shape", m.l.modulus))?;
        for k in 0..=2 * g {
            let lhs = c[2 * g - k] as i128;
            let rhs_ok = if k <= g {
                lhs == q.pow((g - k) as u32) * c[k] as i128
            } else {
                lhs * q.pow((k - g) as u32) == c[k] as i128
            };
            check(rhs_ok, || format!("{}: k={k}", m.l.modulus))?;
        }
    }
    let total = build_time + t.elapsed();
    within(total, 60)?;
    Ok(format!("{} polynomials exact; {:.2}s", members.len(), total.as_secs_f64()))
}

fn criterion_4(members: &[Member]) -> Outcome {
    let t = Instant::now();
    let tables: Vec<(u32, PrimeTable)> = [3u32, 5]
        .iter()
        .map(|&q| (q, PrimeTable::build(field(q), 6).unwrap()))
        .collect();
    let mut worst_rh = 0.0f64;
    let mut worst_ef = 0.0f64;
    for m in members {
        let q = m.l.q;
        let sq = (q as f64).sqrt();
        let rh = m.l.rh_radius_error();
        worst_rh = worst_rh.max(rh);
        let table = &tables.iter().find(|(p, _)| *p == q).unwrap().1;
        for k in 1..=6usize {
            let z = power_sum(&m.zeros, -(k as i64)) * -sq.powi(k as i32);
            let exact = m.chi.twisted_lambda_sum(table, k).map_err(|e| e.to_string())? as f64;
            worst_ef = worst_ef.max((z.re - exact).abs()).max(z.im.abs());
        }
    }
    check(worst_rh <= 1e-9, || format!("max radius error {worst_rh:e}"))?;
    check(worst_ef <= 1e-6, || format!("max explicit formula error {worst_ef:e}"))?;
    within(t.elapsed(), 120)?;
    Ok(format!(
        "max radius err {worst_rh:.1e}, max explicit-formula err {worst_ef:.1e}; {:.2}s",
        t.elapsed().as_secs_f64()
    ))
}

fn criterion_5(members: &[Member]) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for m in members {
        let q = m.l.q as f64;
        for k in -8i64..=8 {
            if k == 0 {
                continue;
            }
            let excess = power_sum(&m.zeros, k).norm() - q.powf(k.abs() as f64 / 2.0);
            worst = worst.max(excess);
        }
    }
    check(worst <= 1e-9, || format!("max excess {worst:e}"))?;
    Ok(format!("max (|sum| - q^(|k|/2)) = {worst:.3}"))
}

fn off_zeros(zeros: &ZeroAngles, theta: f64, gap: f64) -> bool {
    zeros.theta.iter().all(|&t| {
        let x = (theta - t).rem_euclid(1.0);
        x > gap && x < 1.0 - gap
    })
}

fn criterion_6(members: &[Member]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h5: Vec<&Member> = members.iter().filter(|m| m.l.q == 3 && m.l.d == 5).collect();
    let h7: Vec<&Member> = members.iter().filter(|m| m.l.q == 3 && m.l.d == 7).collect();

    let mut lm = 0.0f64;
    for m in &h5 {
        for _ in 0..16 {
            let theta: f64 = rng.random();
            if !off_zeros(&m.zeros, theta, 1e-4) {
                continue;
            }
            let direct = m.l.value_on_circle(theta).norm().ln();
            lm = lm.max((log_modulus(&m.zeros, theta) - direct).abs());
        }
    }
    check(lm <= 1e-8, || format!("log_modulus err {lm:e}"))?;

    let mut mean = 0.0f64;
    let mut chain = 0.0f64;
    for m in h5.iter().step_by(4) {
        for n in 0..=4 {
            let s = SnEvaluator::new(&m.zeros, n).map_err(|e| e.to_string())?;
            let avg = integrate(|x| s.eval(x), 0.0, 1.0, &m.zeros.theta, 1e-12);
            mean = mean.max(avg.abs());
            if n == 0 {
                continue;
            }
            let lower = SnEvaluator::new(&m.zeros, n - 1).map_err(|e| e.to_string())?;
            for _ in 0..8 {
                let theta: f64 = rng.random();
                if !off_zeros(&m.zeros, theta, 1e-3) {
                    continue;
                }
                let h = 1e-5;
                let fd = (s.eval(theta + h) - s.eval(theta - h)) / (2.0 * h);
                chain = chain.max((fd - lower.eval(theta)).abs());
            }
        }
    }
    check(mean <= 1e-7, || format!("S_n mean {mean:e}"))?;
    check(chain <= 1e-6, || format!("derivative chain err {chain:e}"))?;

    let mut count = 0.0f64;
    for _ in 0..100 {
        let m = h7[rng.random_range(0..h7.len())];
        let alpha: f64 = rng.random();
        let beta = alpha + rng.random::<f64>();
        let n_i = count_zeros(&m.zeros, alpha, beta).map_err(|e| e.to_string())?;
        let s = SnEvaluator::new(&m.zeros, 0).map_err(|e| e.to_string())?;
        let g = m.l.genus() as f64;
        let rhs = 2.0 * g * (beta - alpha) + s.eval(beta) - s.eval(alpha);
        count = count.max((n_i - rhs).abs());
    }
    check(count <= 1e-8, || format!("zero-count identity err {count:e}"))?;
    Ok(format!(
        "log_modulus {lm:.1e}, S_n mean {mean:.1e}, chain {chain:.1e}, zero count {count:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let cache = ExtremalCache::new(GRID_FACTOR);
    let mut worst_gap = 0.0f64;
    let mut worst_coeff = f64::NEG_INFINITY;
    let mut built = 0;
    for n in [4usize, 8, 16] {
        let mut jobs = vec![(Target::Log2Sin, Side::Majorant)];
        for order in 0..=3 {
            for side in [Side::Majorant, Side::Minorant] {
                jobs.push((Target::Bernoulli(order + 1), side));
            }
        }
        for (target, side) in jobs {
            let r = cache.get(target, side, n).map_err(|e| format!("{target} {side} N={n}: {e}"))?;
            let gap = r.relative_gap().abs();
            check(gap <= 5e-3, || format!("{target} {side} N={n}: relative gap {gap:e}"))?;
            check(r.certified_margin >= -1e-12, || {
                format!("{target} {side} N={n}: margin {:e}", r.certified_margin)
            })?;
            worst_gap = worst_gap.max(gap);
            if target == Target::Log2Sin {
                let report = verify_coefficient_bounds(&r).map_err(|e| e.to_string())?;
                let excess = report.coefficient_excess.ok_or("no coefficient report")?;
                worst_coeff = worst_coeff.max(excess);
                check(excess <= 1e-6, || format!("N={n}: coefficient excess {excess:e}"))?;
            }
            built += 1;
        }
        for (a, b) in [(0.2, 0.7), (-0.1, 0.05), (0.3, 0.95)] {
            for side in [Side::Majorant, Side::Minorant] {
                let r = interval_one_sided(&cache, a, b, side, n).map_err(|e| e.to_string())?;
                let gap = r.relative_gap.abs();
                check(gap <= 5e-3, || format!("interval [{a},{b}] {side} N={n}: {gap:e}"))?;
                worst_gap = worst_gap.max(gap);
                built += 1;
            }
        }
    }
    within(t.elapsed(), 600)?;
    Ok(format!(
        "{built} polynomials, worst relative gap {worst_gap:.1e}, worst coefficient excess {worst_coeff:.1e}; {:.2}s",
        t.elapsed().as_secs_f64()
    ))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut rows = 0;
    let mut interval_points = 0;
    for d in [5, 7] {
        let cfg = ScanConfig::new(3, d);
        let out = ensemble_scan(&cfg).map_err(|e| e.to_string())?;
        check(out.violations.is_empty(), || {
            format!("d={d}: {} violations, first {:?}", out.violations.len(), out.violations[0])
        })?;
        let unsound = out.rows.iter().filter(|r| !r.is_sound(cfg.soundness_tol)).count();
        check(unsound == 0, || format!("d={d}: {unsound} unsound rows"))?;
        for mode in Mode::ALL {
            check(out.rows.iter().any(|r| r.mode == mode), || format!("d={d}: no {mode} rows"))?;
            check(out.interval.iter().any(|s| s.mode == mode), || {
                format!("d={d}: no interval check in {mode} mode")
            })?;
        }
        for s in &out.interval {
            check(s.violations == 0, || format!("d={d}: interval method {s:?}"))?;
            interval_points += s.points;
        }
        check(out.polys as u64 == 2 * 3u64.pow(d as u32 - 1), || format!("d={d}: {} polys", out.polys))?;
        rows += out.rows.len();
    }
    Ok(format!(
        "{rows} rows, {interval_points} interval-method points, 0 violations; {:.1}s",
        t.elapsed().as_secs_f64()
    ))
}

fn criterion_9() -> Outcome {
    let rows = constants_table(5).map_err(|e| e.to_string())?;
    for r in &rows {
        if r.n % 2 == 1 {
            let err = (r.a_minus - r.c_minus).abs().max((r.a_plus - r.c_plus).abs());
            check(err <= 1e-10, || format!("n={}: |A - C| = {err:e}", r.n))?;
        } else {
            check(r.a_minus < r.c_minus && r.a_plus < r.c_plus, || {
                format!("n={}: A not below C", r.n)
            })?;
        }
    }
    let two = &rows[1];
    let (lo, hi) = lehmer_bracket(2);
    for a in [two.a_minus, two.a_plus] {
        check(lo < a && a < hi, || format!("A_2 = {a} outside ({lo}, {hi})"))?;
    }
    Ok(format!("n=1,3,5 match, n=2,4 strict, A_2 in ({lo:.6}, {hi:.6})"))
}

fn run_scan(dir: &std::path::Path, name: &str, threads: Option<&str>) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperell"));
    cmd.args(["scan", "--q", "3", "--d", "7", "--sample", "random:80", "--seed", "17", "--out"])
        .arg(&out);
    match threads {
        Some(n) => cmd.env("HYPERELL_THREADS", n),
        None => cmd.env_remove("HYPERELL_THREADS"),
    };
    let status = cmd.output().map_err(|e| e.to_string())?;
    check(status.status.success(), || {
        format!("{name}: exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))
    })?;
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_scan(dir.path(), "a.csv", None)?;
    let b = run_scan(dir.path(), "b.csv", None)?;
    let one = run_scan(dir.path(), "t1.csv", Some("1"))?;
    let eight = run_scan(dir.path(), "t8.csv", Some("8"))?;
    check(a == b, || "two runs differ".into())?;
    check(one == eight, || "1 vs 8 threads differ".into())?;
    check(a == one, || "default vs 1 thread differ".into())?;
    Ok(format!("4 runs byte-identical ({} bytes)", a.len()))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("ensemble cardinality", criterion_1()));
    results.push(("prime polynomial theorem", criterion_2()));

    let build = Instant::now();
    let members = build_members(&test_set());
    let build_time = build.elapsed();
    match &members {
        Ok(members) => {
            results.push(("functional equation", criterion_3(members, build_time)));
            results.push(("RH and explicit formula", criterion_4(members)));
            results.push(("power-sum bound", criterion_5(members)));
            results.push(("representation formulas", criterion_6(members)));
        }
        Err(e) => {
            for name in [
                "functional equation",
                "RH and explicit formula",
                "power-sum bound",
                "representation formulas",
            ] {
                results.push((name, Err(format!("building L-polynomials: {e}"))));
            }
        }
    }
    results.push(("extremal means", criterion_7()));
    results.push(("executed bounds", criterion_8()));
    results.push(("constants", criterion_9()));
    results.push(("determinism", criterion_10()));

    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
