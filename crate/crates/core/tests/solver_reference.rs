mod common;

use cycles_core::closing::ClosingPair;
use cycles_core::fields::{AffineMap, CenterKind, CenterSystem, SaddleParams};
use cycles_core::polycore::BivariatePoly;
use cycles_core::solver::{
    admissible_candidates, classify_candidates, crossing_test, solve_closing, SolveError,
    SolverOpts, POLISHED_RTOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(c: &common::Case) -> ClosingPair {
    ClosingPair::new(&c.saddle, &c.center).unwrap()
}

#[test]
fn q1_solutions_contain_origin_and_reference_pairs() {
    let c = &common::cases()[0];
    let sols = solve_closing(&pair(c), &SolverOpts::default()).unwrap();
    assert!(sols.iter().any(|s| s.x.abs() <= 1e-8 && s.y.abs() <= 1e-8));
    for (x, y) in c.pairs {
        let hit = sols
            .iter()
            .any(|s| (s.x - x).abs() <= 1e-4 && (s.y - y).abs() <= 1e-4);
        assert!(hit, "({x}, {y}) missing from {sols:?}");
    }
}

#[test]
fn shared_component_is_reported() {
    let ps = BivariatePoly::from_terms([(0, 1, 1.0), (1, 0, -1.0)]);
    let pi = &(&BivariatePoly::from_terms([(1, 0, 1.0), (0, 0, -1.0)])
        * &BivariatePoly::from_terms([(1, 0, 1.0), (0, 0, -2.0)]))
        * &ps;
    let pair = ClosingPair {
        ps,
        pi,
        d_i: 3,
        bezout: 6,
        max_admissible: 5,
    };
    assert_eq!(
        solve_closing(&pair, &SolverOpts::default()),
        Err(SolveError::CommonComponent)
    );
}

#[test]
fn reference_candidates_cross_both_axes() {
    for c in common::cases() {
        let cands =
            admissible_candidates(&c.saddle, &c.center, &pair(&c), &SolverOpts::default()).unwrap();
        for (x, y) in c.pairs {
            let k = cands
                .iter()
                .find(|k| (k.x - x).abs() <= 1e-4 && (k.y - y).abs() <= 1e-4)
                .unwrap_or_else(|| panic!("{}: ({x}, {y}) not admissible", c.name));
            assert!(k.crossing_x_axis && k.crossing_y_axis);
            let f = crossing_test(&c.saddle, &c.center, (k.x, k.y), 1e-9);
            assert!(f.x_axis && f.y_axis && !f.tangency);
        }
    }
}

#[test]
fn admissible_counts() {
    let counts: Vec<usize> = common::cases()
        .iter()
        .map(|c| {
            admissible_candidates(&c.saddle, &c.center, &pair(c), &SolverOpts::default())
                .unwrap()
                .len()
        })
        .collect();
    // q2 keeps a far root whose saddle arc escapes, q3 a root whose arcs do
    // not connect; both are removed by orbit verification
    assert_eq!(counts, vec![4, 5, 5, 4]);
}

#[test]
fn origin_is_never_admissible() {
    for c in common::cases() {
        let opts = SolverOpts::default();
        let all = classify_candidates(&c.saddle, &c.center, &pair(&c), &opts).unwrap();
        let origin: Vec<_> = all.iter().filter(|k| k.is_origin(opts.pos_tol)).collect();
        assert_eq!(origin.len(), 1, "{}", c.name);
        assert!(!origin[0].admissible);
        assert!(origin[0].notes.iter().any(|n| n == "origin solution"));
    }
}

#[test]
fn reported_residuals_round_trip() {
    for c in common::cases() {
        let p = pair(&c);
        for s in solve_closing(&p, &SolverOpts::default()).unwrap() {
            let rps = p.ps.eval(s.x, s.y).abs() / p.ps.scale_at(s.x, s.y).max(f64::MIN_POSITIVE);
            let rpi = p.pi.eval(s.x, s.y).abs() / p.pi.scale_at(s.x, s.y).max(f64::MIN_POSITIVE);
            assert_eq!(rps, s.residual_ps, "{}", c.name);
            assert_eq!(rpi, s.residual_pi, "{}", c.name);
            if s.simple {
                assert!(s.residual_ps <= POLISHED_RTOL && s.residual_pi <= POLISHED_RTOL);
            }
        }
    }
}

#[test]
fn solving_is_deterministic() {
    for c in common::cases() {
        let opts = SolverOpts::default();
        let a = classify_candidates(&c.saddle, &c.center, &pair(&c), &opts).unwrap();
        let b = classify_candidates(&c.saddle, &c.center, &pair(&c), &opts).unwrap();
        let bits = |v: &Vec<_>| -> Vec<(u64, u64)> {
            v.iter()
                .map(|k: &cycles_core::solver::CycleCandidate| (k.x.to_bits(), k.y.to_bits()))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a, b);
    }
}

#[test]
fn bound_violation_is_reported() {
    let c = &common::cases()[0];
    let mut p = pair(c);
    p.max_admissible = 1;
    assert_eq!(
        classify_candidates(&c.saddle, &c.center, &p, &SolverOpts::default()),
        Err(SolveError::BoundViolation { count: 4, max: 1 })
    );
}

#[test]
fn invalid_options_are_rejected() {
    let opts = SolverOpts {
        tol_root: -1.0,
        ..SolverOpts::default()
    };
    let c = &common::cases()[0];
    assert!(matches!(
        solve_closing(&pair(c), &opts),
        Err(SolveError::InvalidOptions(_))
    ));
}

/// Intersections of `P_S = 0` and `P_i = 0` in `(X0, X1) × (Y0, Y1)`, found by
/// walking both branches of the saddle conic on a dense `x` grid and
/// bisecting sign changes of `P_i` along each branch.
fn grid_oracle(sp: &SaddleParams, pi: &BivariatePoly) -> Vec<(f64, f64)> {
    const N: usize = 40_000;
    let branch = |x: f64, s: f64| -> Option<f64> {
        let k = -2.0 * sp.c * x - sp.mu * x * x;
        let disc = sp.b * sp.b - sp.delta * k;
        (disc >= 0.0).then(|| (sp.b + s * disc.sqrt()) / sp.delta)
    };
    let mut out = Vec::new();
    for s in [-1.0, 1.0] {
        let g = |x: f64| branch(x, s).map(|y| pi.eval(x, y));
        let xs: Vec<f64> = (0..=N)
            .map(|i| X0 + (X1 - X0) * i as f64 / N as f64)
            .collect();
        for w in xs.windows(2) {
            let (Some(ga), Some(gb)) = (g(w[0]), g(w[1])) else {
                continue;
            };
            if ga.signum() == gb.signum() {
                continue;
            }
            let (mut a, mut b, mut fa) = (w[0], w[1], ga);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let Some(gm) = g(m) else { break };
                if gm.signum() == fa.signum() {
                    a = m;
                    fa = gm;
                } else {
                    b = m;
                }
            }
            let x = 0.5 * (a + b);
            if let Some(y) = branch(x, s) {
                if y > Y0 && y < Y1 {
                    out.push((x, y));
                }
            }
        }
    }
    out
}

const X0: f64 = 0.05;
const X1: f64 = 3.0;
const Y0: f64 = 0.05;
const Y1: f64 = 3.0;

#[test]
fn resultant_solver_agrees_with_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tried = 0;
    let mut nonempty = 0;
    while tried < 200 {
        let s: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let m: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let kind = if rng.gen_bool(0.5) {
            CenterKind::Q1
        } else {
            CenterKind::Q2
        };
        let Ok(sp) = SaddleParams::new(s[0], s[1], s[2], s[3], s[4]) else {
            continue;
        };
        let Ok(affine) = AffineMap::new(m[0], m[1], m[2], m[3], m[4], m[5]) else {
            continue;
        };
        if sp.delta.abs() < 1e-2 || affine.nondegeneracy().abs() < 0.05 {
            continue;
        }
        let cs = CenterSystem::new(kind, affine).unwrap();
        let p = ClosingPair::new(&sp, &cs).unwrap();
        tried += 1;
        let sols = solve_closing(&p, &SolverOpts::default()).unwrap();
        let oracle = grid_oracle(&sp, &p.pi);
        nonempty += usize::from(!oracle.is_empty());
        let near = |a: (f64, f64), b: (f64, f64), tol: f64| {
            (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
        };
        for &o in &oracle {
            assert!(
                sols.iter()
                    .any(|s| near((s.x, s.y), o, 1e-6 * (1.0 + o.0.max(o.1)))),
                "oracle root {o:?} missed by solver: {sols:?}"
            );
        }
        // simple, well-separated solver roots inside the box are seen by the grid
        let inside: Vec<_> = sols
            .iter()
            .filter(|s| {
                s.simple && s.x > X0 + 1e-3 && s.x < X1 - 1e-3 && s.y > Y0 + 1e-3 && s.y < Y1 - 1e-3
            })
            .collect();
        for s in &inside {
            let crowded = inside
                .iter()
                .any(|t| !std::ptr::eq(*s, *t) && (t.x - s.x).abs() <= 1e-3);
            if crowded {
                continue;
            }
            assert!(
                oracle
                    .iter()
                    .any(|&o| near((s.x, s.y), o, 1e-6 * (1.0 + s.x.max(s.y)))),
                "solver root ({}, {}) not seen by grid oracle {oracle:?}",
                s.x,
                s.y
            );
        }
    }
    assert!(
        nonempty >= 20,
        "only {nonempty} instances had roots in the box"
    );
}
