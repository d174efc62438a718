//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.
//!
//! 1. bounds (d, 2d, 2d − 1) per family, under 1 ms
//! 2. four verified cycles per reference system, printed pairs within 1e-4
//! 3. return-map oracle agrees one-to-one with the verified cycles
//! 4. first integrals conserved along all five families
//! 5. closed-form and numerically cleared `P_i` proportional, degrees 3..6
//! 6. `P_S = 2 (H_S(x,0) − H_S(0,y))`
//! 7. affine pushforward identity
//! 8. perturbed candidates rejected, origin never admissible, bounded drift
//! 9. byte-identical outputs across repeated runs

use std::process::Command;
use std::time::{Duration, Instant};

use cycles_cli::builtin::builtin_examples;
use cycles_cli::report::{run, Analysis, RunOptions, MATCH_TOL};
use cycles_core::closing::{
    bound_report, cleared_difference, closing_poly_center, closing_poly_saddle, ClosingPair,
};
use cycles_core::fields::{
    base_center_field, base_center_integral, AffineMap, CenterKind, CenterSystem, Flow, Point,
    SaddleParams,
};
use cycles_core::orbits::{verify_cycle, MAX_DRIFT};
use cycles_core::solver::{classify_candidates, RejectReason, SolverOpts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

type Outcome = Result<String, String>;

fn random_affine(rng: &mut ChaCha8Rng, span: f64) -> AffineMap {
    loop {
        let m: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-span..span));
        if let Ok(a) = AffineMap::new(m[0], m[1], m[2], m[3], m[4], m[5]) {
            if a.nondegeneracy().abs() >= 0.05 {
                return a;
            }
        }
    }
}

fn random_saddle(rng: &mut ChaCha8Rng) -> SaddleParams {
    loop {
        let s: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if let Ok(sp) = SaddleParams::new(s[0], s[1], s[2], s[3], s[4]) {
            return sp;
        }
    }
}

fn analyses(opts: RunOptions) -> Result<Vec<(String, Analysis, Duration)>, String> {
    builtin_examples()
        .iter()
        .map(|cfg| {
            let t = Instant::now();
            let a = run(cfg, opts).map_err(|e| format!("{}: {e}", cfg.label()))?;
            Ok((cfg.label(), a, t.elapsed()))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let want = [(3, 6, 5), (4, 8, 7), (5, 10, 9), (6, 12, 11)];
    let mut slowest = Duration::ZERO;
    for (k, w) in CenterKind::ALL.iter().zip(want) {
        let t = Instant::now();
        let b = bound_report(*k);
        slowest = slowest.max(t.elapsed());
        if (b.d, b.bezout, b.max_admissible) != w {
            return Err(format!(
                "{k}: got ({}, {}, {})",
                b.d, b.bezout, b.max_admissible
            ));
        }
    }
    if slowest >= Duration::from_millis(1) {
        return Err(format!("slowest bound took {slowest:?}"));
    }
    Ok(format!(
        "(3,6,5) (4,8,7) (5,10,9) (6,12,11); slowest {slowest:?}"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (name, a, took) in analyses(RunOptions::default())? {
        let r = &a.report;
        let reg = r
            .regression
            .as_ref()
            .ok_or(format!("{name}: no expected table"))?;
        if r.cycle_count != 4 || !reg.passed {
            return Err(format!(
                "{name}: {} cycles, max error {:e}",
                r.cycle_count, reg.max_abs_error
            ));
        }
        if took >= Duration::from_secs(10) {
            return Err(format!("{name}: took {took:?}"));
        }
        worst = worst.max(reg.max_abs_error);
        pairs += reg.expected;
    }
    Ok(format!(
        "4 cycles per case, {pairs} pairs within {MATCH_TOL:e} (max error {worst:.1e})"
    ))
}

fn criterion_3() -> Outcome {
    let opts = RunOptions {
        oracle: true,
        ..RunOptions::default()
    };
    let mut notes = Vec::new();
    for (name, a, took) in analyses(opts)? {
        let o = a
            .report
            .oracle
            .as_ref()
            .ok_or(format!("{name}: oracle missing"))?;
        if !o.matches_cycles {
            return Err(format!(
                "{name}: {} fixed points vs {} cycles",
                o.fixed_points.len(),
                a.report.cycle_count
            ));
        }
        if took >= Duration::from_secs(60) {
            return Err(format!("{name}: took {took:?}"));
        }
        // admissible roots in range without a cycle must be those verification rejected
        for &(x, y) in &o.unmatched_admissible {
            let c = a
                .report
                .solutions
                .iter()
                .find(|c| c.x == x && c.y == y)
                .unwrap();
            if c.verified {
                return Err(format!("{name}: verified ({x}, {y}) lacks a fixed point"));
            }
            notes.push(format!(
                "{name} admissible ({x:.6}, {y:.6}) is {:?} with no fixed point",
                c.verification
            ));
        }
    }
    let tail = if notes.is_empty() {
        String::new()
    } else {
        format!("; {}", notes.join("; "))
    };
    Ok(format!(
        "fixed points match verified cycles one-to-one in all four scans{tail}"
    ))
}

fn integral_dd(kind: CenterKind, m: &AffineMap, p: Point) -> TwoFloat {
    let t = TwoFloat::from;
    let u = t(m.a1) * p.x + t(m.b1) * p.y + m.c1;
    let v = t(m.alpha1) * p.x + t(m.beta1) * p.y + m.gamma1;
    let r2 = u * u + v * v;
    let (num, den) = match kind {
        CenterKind::Q1 => (r2, v * 2.0 + 1.0),
        CenterKind::Q2 => (r2, (v + 1.0) * (v + 1.0)),
        CenterKind::Q3 => (
            r2 * 9.0 - u * u * v * 24.0 + u * u * u * u * 16.0,
            v * 16.0 - 3.0,
        ),
        CenterKind::Q4 => {
            let w = v * 8.0 + 3.0;
            (
                r2 * 9.0 + v * v * v * 24.0 + v * v * v * v * 16.0,
                w * w * w * w,
            )
        }
    };
    num / den
}

/// Largest `|∇H·F| / (|∇H||F| + 1)` over 1000 points, central differences
/// with step 1e-6.
fn worst_residual(
    flow: &dyn Flow,
    diff: &dyn Fn(Point, Point) -> f64,
    valid: &dyn Fn(Point) -> bool,
    rng: &mut ChaCha8Rng,
) -> f64 {
    const H: f64 = 1e-6;
    let mut worst = 0.0f64;
    let mut taken = 0;
    while taken < 1000 {
        let p = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if !valid(p) {
            continue;
        }
        let (xp, xm) = (Point::new(p.x + H, p.y), Point::new(p.x - H, p.y));
        let (yp, ym) = (Point::new(p.x, p.y + H), Point::new(p.x, p.y - H));
        let grad = Point::new(diff(xp, xm) / (xp.x - xm.x), diff(yp, ym) / (yp.y - ym.y));
        let f = flow.velocity(p);
        worst = worst.max(grad.dot(f).abs() / (grad.norm() * f.norm() + 1.0));
        taken += 1;
    }
    worst
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let sp = random_saddle(&mut rng);
        let diff = |a: Point, b: Point| sp.integral(a) - sp.integral(b);
        worst = worst.max(worst_residual(&sp, &diff, &|_| true, &mut rng));
    }
    let mut summary = vec![format!("saddle {worst:.1e}")];
    for kind in CenterKind::ALL {
        let v_star = match kind {
            CenterKind::Q1 => -0.5,
            CenterKind::Q2 => -1.0,
            CenterKind::Q3 => 3.0 / 16.0,
            CenterKind::Q4 => -3.0 / 8.0,
        };
        let mut w = 0.0f64;
        for _ in 0..100 {
            let m = random_affine(&mut rng, 1.0);
            let sys = CenterSystem::new(kind, m).unwrap();
            let valid = |p: Point| (m.apply(p).y - v_star).abs() / m.alpha1.hypot(m.beta1) >= 0.1;
            let diff =
                |a: Point, b: Point| f64::from(integral_dd(kind, &m, a) - integral_dd(kind, &m, b));
            w = w.max(worst_residual(&sys, &diff, &valid, &mut rng));
        }
        worst = worst.max(w);
        summary.push(format!("{kind} {w:.1e}"));
    }
    let line = format!("worst scaled residual per family: {}", summary.join(", "));
    if worst <= 1e-9 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for kind in CenterKind::ALL {
        for _ in 0..100 {
            let s = CenterSystem::new(kind, random_affine(&mut rng, 1.0)).unwrap();
            let closed = closing_poly_center(&s).map_err(|e| e.to_string())?;
            let cleared = cleared_difference(&s);
            if closed.deg_total() != kind.closing_degree()
                || cleared.deg_total() != kind.closing_degree()
            {
                return Err(format!(
                    "{kind}: degrees {} / {}",
                    closed.deg_total(),
                    cleared.deg_total()
                ));
            }
            let mut ratios = Vec::new();
            for _ in 0..100 {
                let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let (a, b) = (closed.eval(x, y), cleared.eval(x, y));
                if a.abs() > 1e-10 * closed.scale_at(x, y)
                    && b.abs() > 1e-10 * cleared.scale_at(x, y)
                {
                    ratios.push(a / b);
                }
            }
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max((hi - lo) / lo.abs());
        }
    }
    let line = format!("max relative ratio spread {worst:.1e}; degrees (3,4,5,6) in all 400 draws");
    if worst <= 1e-7 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let sp = random_saddle(&mut rng);
        let (x, y) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let p = closing_poly_saddle(&sp);
        let want = 2.0 * (sp.integral(Point::new(x, 0.0)) - sp.integral(Point::new(0.0, y)));
        worst = worst.max((p.eval(x, y) - want).abs() / p.scale_at(x, y));
    }
    let line = format!("max scaled deviation {worst:.1e} over 10000 draws");
    if worst <= 1e-12 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    for kind in CenterKind::ALL {
        for _ in 0..2000 {
            let m = random_affine(&mut rng, 2.0);
            let sys = CenterSystem::new(kind, m).unwrap();
            let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (lhs, rhs) = (
                m.push_vector(sys.field(p)),
                base_center_field(kind, m.apply(p)),
            );
            worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm())));
        }
        let id = CenterSystem::new(kind, AffineMap::IDENTITY).unwrap();
        for _ in 0..200 {
            let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = (id.field(p), base_center_field(kind, p));
            if (a - b).norm() > 4.0 * f64::EPSILON * (1.0 + b.norm()) {
                return Err(format!("{kind}: identity field differs at {p}"));
            }
            if id.integral(p).ok() != base_center_integral(kind, p).ok() {
                return Err(format!("{kind}: identity integral differs at {p}"));
            }
        }
    }
    let line = format!(
        "max relative deviation {worst:.1e}; identity reproduces base fields and integrals"
    );
    if worst <= 1e-10 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_8() -> Outcome {
    let mut perturbed = 0;
    let mut arcs = 0;
    let mut max_drift = 0.0f64;
    for cfg in builtin_examples() {
        let (sp, cs) = (cfg.saddle, cfg.center_system());
        let pair = ClosingPair::new(&sp, &cs).map_err(|e| e.to_string())?;
        let all = classify_candidates(&sp, &cs, &pair, &SolverOpts::default())
            .map_err(|e| e.to_string())?;
        if all.iter().any(|c| c.admissible && c.is_origin(1e-8)) {
            return Err(format!("{}: origin admissible", cfg.label()));
        }
        let a = run(&cfg, RunOptions::default()).map_err(|e| e.to_string())?;
        for v in &a.cycles {
            let mut k = v.candidate.clone();
            k.y += 0.05;
            match verify_cycle(&sp, &cs, &k, &cfg.integrator) {
                Err(r) if r.reason == RejectReason::ArcMismatch => perturbed += 1,
                other => {
                    return Err(format!(
                        "{}: y + 0.05 at x = {} gave {other:?}",
                        cfg.label(),
                        k.x
                    ))
                }
            }
            for arc in [&v.plus_arc, &v.minus_arc] {
                max_drift = max_drift.max(arc.integral_drift);
                arcs += 1;
            }
        }
    }
    if max_drift > MAX_DRIFT {
        return Err(format!("drift {max_drift:e}"));
    }
    Ok(format!(
        "{perturbed} perturbed candidates rejected as ArcMismatch; origin never admissible; max drift {max_drift:.1e} over {arcs} arcs"
    ))
}

fn criterion_9() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_cycles");
    let degenerate = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/degenerate-no-cycles.json"
    );
    let q1 = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/q1.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["bound"],
        vec!["bound", "--kind", "Q3"],
        vec!["closing-polys", "--case", "q4"],
        vec!["solve", "--config", q1],
        vec!["solve", "--config", degenerate],
        vec!["verify", "--case", "q3"],
        vec!["oracle", "--case", "q2"],
        vec![
            "plot",
            "--case",
            "q1",
            "--window=-0.5,1.2,-0.5,1.2",
            "--glyphs",
        ],
        vec!["plot", "--config", degenerate],
        vec!["paper-examples", "--json-indent", "0"],
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = Command::new(exe)
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{args:?} exited with {}", out.status));
            }
            // same command through --out
            let file = dir.path().join(format!("{k}-{rep}.out"));
            let status = Command::new(exe)
                .args(args)
                .arg("--out")
                .arg(&file)
                .status()
                .map_err(|e| e.to_string())?;
            let written = std::fs::read(&file).map_err(|e| e.to_string())?;
            if !status.success() || written != out.stdout {
                return Err(format!("{args:?}: --out differs from stdout"));
            }
            outputs.push(out.stdout);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{args:?}: outputs differ"));
        }
        bytes += outputs[0].len();
    }
    Ok(format!(
        "{} commands byte-identical across runs ({bytes} bytes each pass)",
        runs.len()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("bound reproduction", criterion_1),
        ("reference-system regression", criterion_2),
        ("oracle equivalence", criterion_3),
        ("conservation", criterion_4),
        ("closing-polynomial cross-validation", criterion_5),
        ("saddle clearing identity", criterion_6),
        ("pushforward identity", criterion_7),
        ("verification robustness", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {} {tag}: {name}: {detail} [{:.2?}]",
            k + 1,
            t.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
