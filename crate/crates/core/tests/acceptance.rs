//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use anosov_tori::catalog::{conjugacy_check, enumerate_tori, growth_rate_table, SolverSettings, System};
use anosov_tori::circle::{FnMap, ForceMap, PeriodicMap, SampledMap, TrigPoly, Waveform};
use anosov_tori::commands::{Overrides, Session};
use anosov_tori::periodic::RationalPoint2;
use anosov_tori::{
    build_base_torus, count_fixed, eigen_split, fixed_points, minimal_degree_m, periodic_points_up_to, rational_inverse,
    solve_twisted_cocycle, torus_degree, IntMatrix2,
};
use num_bigint::BigInt;
use num_complex::Complex64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn session(name: &str) -> Session {
    Session::from_path(&config(name), Overrides::default()).expect("config loads")
}

fn cat() -> IntMatrix2 {
    IntMatrix2::cat_map()
}

fn alpha() -> f64 {
    2f64.sqrt() - 1.0
}

fn within(elapsed: Duration, limit_ms: f64) -> bool {
    elapsed.as_secs_f64() * 1e3 < limit_ms
}

fn c1_minimal_m() -> Outcome {
    let t = Instant::now();
    let m_cat = minimal_degree_m(&cat(), [1, 0]).unwrap();
    let a2 = IntMatrix2::from_rows([[3, 1], [2, 1]]);
    let m2 = minimal_degree_m(&a2, [0, 1]).unwrap();
    let deg = torus_degree(&a2, [0, 1], m2).unwrap();
    let el = t.elapsed();
    outcome(
        m_cat == 1 && m2 == 2 && deg == [-1, 2] && within(el, 1.0),
        format!("m = {m_cat}; m = {m2}, deg g = {deg:?}; {:.3} ms (limit 1 ms)", el.as_secs_f64() * 1e3),
    )
}

fn c2_fixed_counts() -> Outcome {
    let t = Instant::now();
    let first: Vec<BigInt> = (1..=4).map(|n| count_fixed(&cat(), n)).collect();
    let ok_first = first == [1, 5, 16, 45].map(BigInt::from);
    let lu = eigen_split(&cat()).unwrap().lambda_u;
    let mismatches: Vec<i32> = (1..=30)
        .filter(|&n| {
            let want = (lu.powi(n) + lu.powi(-n) - 2.0).round();
            count_fixed(&cat(), n as u64) != BigInt::from(want as i64)
        })
        .collect();
    let el = t.elapsed();
    outcome(
        ok_first && mismatches.is_empty() && within(el, 1000.0),
        format!("n=1..4: {first:?}; n<=30 mismatches vs λⁿ+λ⁻ⁿ−2: {mismatches:?}; {:.1} ms", el.as_secs_f64() * 1e3),
    )
}

fn c3_enumeration() -> Outcome {
    let t = Instant::now();
    let got: Vec<RationalPoint2> = fixed_points(&cat(), 2, 1000).unwrap().points.iter().map(|p| p.point).collect();
    let mut want = vec![
        RationalPoint2::new(0, 0, 1),
        RationalPoint2::new(1, 2, 5),
        RationalPoint2::new(2, 4, 5),
        RationalPoint2::new(3, 1, 5),
        RationalPoint2::new(4, 3, 5),
    ];
    want.sort();
    let mut sorted = got.clone();
    sorted.sort();
    let union = periodic_points_up_to(&cat(), 3, 1000).unwrap();
    let el = t.elapsed();
    outcome(
        sorted == want && union.len() == 20 && union.exact && within(el, 1000.0),
        format!("Fix(A²) = {} points, exact match {}; |P(A;3)| = {}; {:.1} ms", got.len(), sorted == want, union.len(), el.as_secs_f64() * 1e3),
    )
}

fn c4_residual() -> Outcome {
    let s = session("acceptance1.toml");
    let sys = &s.system;
    let k = sys.force.mode_cutoff();
    let max_coeff = sys.force.modes.iter().flat_map(|p| p.modes().map(|(_, c)| c.norm())).fold(0.0, f64::max);
    let amp = sys.force.remainder.as_ref().map_or(0.0, |r| r.sup_norm());
    let t = Instant::now();
    let m = minimal_degree_m(&sys.a, sys.force.degree).unwrap();
    let full = build_base_torus(&sys.a, sys.alpha, &sys.force, m, 4096, s.settings.tol).unwrap();
    let smooth = build_base_torus(&sys.a, sys.alpha, &sys.force.trig_part(), m, 4096, s.settings.tol).unwrap();
    let el = t.elapsed();
    let shape = k <= 8 && max_coeff <= 0.2 && (amp - 0.01).abs() < 1e-15 && sys.force.degree == [1, 0];
    outcome(
        shape && full.residual_sup <= 1e-5 && smooth.residual_sup <= 1e-8 && within(el, 5000.0),
        format!(
            "K = {k}, max |b_k| = {max_coeff}, remainder sup {amp}; residual {:.3e} (<= 1e-5), without remainder {:.3e} (<= 1e-8); {:.0} ms",
            full.residual_sup,
            smooth.residual_sup,
            el.as_secs_f64() * 1e3
        ),
    )
}

fn c5_constant_force() -> Outcome {
    let h = ForceMap::constant([0.3, 0.1]);
    let base = build_base_torus(&cat(), alpha(), &h, 1, 4096, 1e-9).unwrap();
    let dev = base
        .grid
        .iter()
        .map(|g| (g[0].rem_euclid(1.0) - 0.9).abs().max((g[1].rem_euclid(1.0) - 0.8).abs()))
        .fold(0.0, f64::max);
    outcome(
        dev <= 1e-10 && base.residual_sup <= 1e-10,
        format!("max |g − (0.9, 0.8)| = {dev:.2e}, residual {:.2e} (both <= 1e-10)", base.residual_sup),
    )
}

fn c6_cocycle() -> Outcome {
    let t = Instant::now();
    let n = 1024;
    let inv = rational_inverse(&cat().identity_minus()).unwrap().to_f64();
    let mut const_err = 0.0f64;
    for c in [[0.3, 0.1], [-0.7, 0.25], [0.0, 1.0]] {
        let sol = solve_twisted_cocycle(&cat(), alpha(), &FnMap(move |_| c), n, 1e-13).unwrap();
        let want = [inv[0][0] * c[0] + inv[0][1] * c[1], inv[1][0] * c[0] + inv[1][1] * c[1]];
        for v in sol.samples.values() {
            const_err = const_err.max((v[0] - want[0]).abs()).max((v[1] - want[1]).abs());
        }
    }

    let p = TrigPoly::from_modes(3, &[(1, Complex64::new(0.1, 0.05)), (3, Complex64::new(0.0, -0.02))]).unwrap();
    let r1 = SampledMap::from_fn(n, |w| [p.eval(w) + 0.01 * Waveform::Triangle.eval(w), 0.02 * p.eval(2.0 * w)]);
    let r2 = Waveform::SawtoothSmoothed.sample(0.03, n);
    let c = -1.7;
    let combo = SampledMap::new(r1.values().iter().zip(r2.values()).map(|(a, b)| [a[0] + c * b[0], a[1] + c * b[1]]).collect());
    let solve = |r: &SampledMap| solve_twisted_cocycle(&cat(), alpha(), r, n, 1e-12).unwrap();
    let (s1, s2, s12) = (solve(&r1), solve(&r2), solve(&combo));
    let lin_err = (0..n)
        .map(|j| {
            let (a, b, s) = (s1.samples.values()[j], s2.samples.values()[j], s12.samples.values()[j]);
            (s[0] - a[0] - c * b[0]).abs().max((s[1] - a[1] - c * b[1]).abs())
        })
        .fold(0.0, f64::max);

    let shift = 37;
    let shifted = SampledMap::new((0..n).map(|j| r1.values()[(j + shift) % n]).collect());
    let ss = solve(&shifted);
    let grid_shift_err = (0..n)
        .map(|j| {
            let (x, y) = (s1.samples.values()[(j + shift) % n], ss.samples.values()[j]);
            (x[0] - y[0]).abs().max((x[1] - y[1]).abs())
        })
        .fold(0.0, f64::max);

    let beta = 0.123_456_789;
    let f = |w: f64| [p.eval(w) + 0.01 * Waveform::Triangle.eval(w), 0.0];
    let base = solve_twisted_cocycle(&cat(), alpha(), &FnMap(&f), n, 1e-12).unwrap();
    let moved = solve_twisted_cocycle(&cat(), alpha(), &FnMap(|w| f(w + beta)), n, 1e-12).unwrap();
    let off_tol = 2.0 * base.interp_estimate + 1e-9;
    let off_err = (0..n)
        .map(|j| {
            let (x, y) = (base.eval(j as f64 / n as f64 + beta), moved.samples.values()[j]);
            (x[0] - y[0]).abs().max((x[1] - y[1]).abs())
        })
        .fold(0.0, f64::max);
    let el = t.elapsed();
    outcome(
        const_err <= 1e-10 && lin_err <= 1e-9 && grid_shift_err <= 1e-9 && off_err <= off_tol && within(el, 5000.0),
        format!(
            "constant {const_err:.1e} (<= 1e-10), linearity {lin_err:.1e} (<= 1e-9), grid shift {grid_shift_err:.1e} (<= 1e-9), \
             off-grid shift {off_err:.1e} (<= {off_tol:.1e}); {:.0} ms",
            el.as_secs_f64() * 1e3
        ),
    )
}

fn c7_conjugacy() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    let mut lines = Vec::new();
    for name in ["acceptance1.toml", "cat_constant.toml", "cat_homogeneous.toml", "degree_two.toml"] {
        let s = session(name);
        let sys = &s.system;
        let m = minimal_degree_m(&sys.a, sys.force.degree).unwrap();
        let base = build_base_torus(&sys.a, sys.alpha, &sys.force, m, s.settings.grid, s.settings.tol).unwrap();
        let res = base.residual_sup;
        for n in 1..=3 {
            let conj = conjugacy_check(sys, &base, n, base.grid_size());
            let bound = 30.0 * res + 1e-12;
            ok &= conj <= bound;
            if res > 1e-12 {
                worst_ratio = worst_ratio.max(conj / res);
            }
            if n == 3 {
                lines.push(format!("{name}: {conj:.1e} vs residual {res:.1e}"));
            }
        }
    }
    outcome(ok, format!(
            "max conj/residual {worst_ratio:.2} where residual > 1e-12 (bound 30; rounding-level residuals use a 1e-12 floor); n=3: {}",
            lines.join("; ")
        ))
}

fn c8_growth() -> Outcome {
    let t = Instant::now();
    let rep = growth_rate_table(&cat(), 14, 5_000_000).unwrap();
    let el = t.elapsed();
    let h = rep.summary.h_top;
    let all_exact = rep.rows.iter().all(|r| r.exact.is_some());
    let final_gap = (rep.rows[13].rate() - 0.96242).abs();
    let gaps: Vec<f64> = rep.rows[3..].iter().map(|r| (r.rate() - h).abs()).collect();
    let env: Vec<f64> = rep.gap_envelope(4).into_iter().map(|(_, e)| e).collect();
    let env_ok = env.windows(2).all(|w| w[1] <= w[0]) && env.last() < env.first();
    let ok = all_exact && final_gap <= 0.05 && gaps.iter().all(|&g| g <= 0.15) && env_ok && within(el, 60_000.0);
    outcome(
        ok,
        format!(
            "#P(A;14) = {}, |rate(14) − 0.96242| = {final_gap:.4} (<= 0.05), gaps n=4..14 max {:.4} (<= 0.15), \
             envelope {:.4} -> {:.4}; {:.1} s",
            rep.rows[13].exact.unwrap_or(0),
            gaps.iter().cloned().fold(0.0, f64::max),
            env[0],
            env[env.len() - 1],
            el.as_secs_f64()
        ),
    )
}

fn c9_count_independence() -> Outcome {
    let settings = SolverSettings { grid: 1024, ..Default::default() };
    let three = ForceMap::trig(
        [1, 0],
        TrigPoly::from_modes(2, &[(1, Complex64::new(0.1, 0.05)), (2, Complex64::new(0.02, 0.0))]).unwrap(),
        TrigPoly::from_modes(3, &[(3, Complex64::new(0.0, 0.04))]).unwrap(),
    );
    let mut all = Vec::new();
    for force in [ForceMap::zero(), ForceMap::constant([0.3, 0.1]), three] {
        let sys = System { a: cat(), alpha: alpha(), force };
        let c = enumerate_tori(&sys, 3, &settings).unwrap();
        all.push((1..=3).map(|n| c.count(n).unwrap_or(0)).collect::<Vec<_>>());
    }
    outcome(all.iter().all(|c| c == &[1, 5, 20]), format!("h = 0, constant, 3-mode: {all:?}"))
}

fn c10_mode_support() -> Outcome {
    let s = session("degree_two.toml");
    let sys = &s.system;
    let base = build_base_torus(&sys.a, sys.alpha, &sys.force, 2, s.settings.grid, s.settings.tol).unwrap();
    let c = base.mode_cutoff as i64;
    let odd_nonzero = (-c..=c).filter(|j| j % 2 != 0).filter(|&j| base.mode(j) != [Complex64::new(0.0, 0.0); 2]).count();
    let even_nonzero = (-c..=c).filter(|j| j % 2 == 0).filter(|&j| base.mode(j) != [Complex64::new(0.0, 0.0); 2]).count();
    outcome(
        base.m == 2 && odd_nonzero == 0 && even_nonzero > 1,
        format!("m = {}, |j| <= {c}: {odd_nonzero} odd modes nonzero, {even_nonzero} even modes nonzero", base.m),
    )
}

fn c11_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_anosov-tori"))
            .args(["--config", config("acceptance1.toml").to_str().unwrap(), "--out", d.path().to_str().unwrap(), "growth", "--nmax", "10"])
            .output()
            .expect("binary runs")
            .status;
        outputs.push((status.success(), std::fs::read(d.path().join("growth.csv")).unwrap_or_default()));
    }
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    outcome(outputs.iter().all(|o| o.0) && same, format!("growth.csv {} bytes, identical: {same}", outputs[0].1.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("minimal degree m", c1_minimal_m),
        ("fixed-point counts", c2_fixed_counts),
        ("periodic-point enumeration", c3_enumeration),
        ("torus construction residual", c4_residual),
        ("constant force", c5_constant_force),
        ("cocycle solver", c6_cocycle),
        ("conjugacy", c7_conjugacy),
        ("growth rate vs entropy", c8_growth),
        ("count independence of h", c9_count_independence),
        ("mode support", c10_mode_support),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.passed);
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
