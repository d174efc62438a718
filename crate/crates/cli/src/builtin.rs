//! Built-in reference systems, one per center family, each with four
//! crossing limit cycles and its expected crossing table.
//!
//! Affine data for q1..q3 carry more digits than their six-figure printed
//! forms (every value rounds to the printed one); the printed values alone
//! shift the cycles by up to `4e-3` and, for q2, destroy three of them.

use cycles_core::fields::{AffineMap, CenterKind, SaddleParams};

use crate::config::{CenterConfig, OracleConfig, SystemConfig};

fn system(
    name: &str,
    saddle: [f64; 5],
    kind: CenterKind,
    affine: [f64; 6],
    scan: (f64, f64),
    expected: [(f64, f64); 4],
) -> SystemConfig {
    let [mu, a, delta, b, c] = saddle;
    let [a1, b1, c1, alpha1, beta1, gamma1] = affine;
    SystemConfig {
        name: Some(name.to_string()),
        saddle: SaddleParams { mu, a, delta, b, c },
        center: CenterConfig {
            kind,
            affine: AffineMap {
                a1,
                b1,
                c1,
                alpha1,
                beta1,
                gamma1,
            },
        },
        solver: Default::default(),
        integrator: Default::default(),
        oracle: OracleConfig {
            x_range: scan,
            ..OracleConfig::default()
        },
        expected: expected.to_vec(),
    }
}

/// The four reference systems `q1`..`q4`, in family order.
pub fn builtin_examples() -> Vec<SystemConfig> {
    vec![
        system(
            "q1",
            [-0.33, -0.79, 0.05, -0.53, 0.88],
            CenterKind::Q1,
            [
                -2.27857972925829,
                1.30093921655177,
                0.0982285,
                -0.14395039620258,
                -0.52,
                0.903597920844486,
            ],
            (0.05, 1.0),
            [
                (0.247078, 0.384272),
                (0.415771, 0.618477),
                (0.612878, 0.865349),
                (0.688027, 0.952239),
            ],
        ),
        system(
            "q2",
            [-0.76, 0.47, -0.19, 0.11, -0.85],
            CenterKind::Q2,
            [
                0.064,
                -0.0305115483353468,
                0.0365432066741643,
                -0.040948217124109,
                -0.02,
                -0.0872418309923638,
            ],
            (0.5, 1.5),
            [
                (0.879937, 2.78341),
                (0.963775, 2.98109),
                (1.01989, 3.11175),
                (1.06254, 3.21026),
            ],
        ),
        system(
            "q3",
            [-0.2, 0.9, 0.8, 0.1, 0.6],
            CenterKind::Q3,
            [
                -0.5555555555555556,
                0.4236258704086555,
                -0.38413627568127173,
                0.6390955250000079,
                -0.2727272727272727,
                0.6570253458786044,
            ],
            (0.3, 3.0),
            [
                (2.21003, 1.57745),
                (1.64943, 1.47022),
                (1.34953, 1.38381),
                (1.07022, 1.28025),
            ],
        ),
        system(
            "q4",
            [0.01931322, 0.48, -0.00914158, -0.03, 0.0309612],
            CenterKind::Q4,
            [0.53, -0.37, -0.01, 0.5, 0.5, -0.03],
            (0.1, 1.5),
            [
                (1.15329, 2.89772),
                (0.874219, 1.48358),
                (0.491262, 0.648826),
                (0.300288, 0.358519),
            ],
        ),
    ]
}

pub fn builtin_example(name: &str) -> Option<SystemConfig> {
    builtin_examples().into_iter().find(|c| {
        c.name
            .as_deref()
            .is_some_and(|n| n.eq_ignore_ascii_case(name))
    })
}
