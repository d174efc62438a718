//! The four reference systems with four crossing cycles each.
#![allow(dead_code)]

use cycles_core::fields::{AffineMap, CenterKind, CenterSystem, SaddleParams};

pub struct Case {
    pub name: &'static str,
    pub saddle: SaddleParams,
    pub center: CenterSystem,
    pub pairs: [(f64, f64); 4],
    pub scan: (f64, f64),
}

fn case(
    name: &'static str,
    s: [f64; 5],
    kind: CenterKind,
    m: [f64; 6],
    pairs: [(f64, f64); 4],
    scan: (f64, f64),
) -> Case {
    Case {
        name,
        saddle: SaddleParams::new(s[0], s[1], s[2], s[3], s[4]).unwrap(),
        center: CenterSystem::new(
            kind,
            AffineMap::new(m[0], m[1], m[2], m[3], m[4], m[5]).unwrap(),
        )
        .unwrap(),
        pairs,
        scan,
    }
}

pub fn cases() -> Vec<Case> {
    vec![
        case(
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
            [
                (0.247078, 0.384272),
                (0.415771, 0.618477),
                (0.612878, 0.865349),
                (0.688027, 0.952239),
            ],
            (0.05, 1.0),
        ),
        case(
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
            [
                (0.879937, 2.78341),
                (0.963775, 2.98109),
                (1.01989, 3.11175),
                (1.06254, 3.21026),
            ],
            (0.5, 1.5),
        ),
        case(
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
            [
                (1.07022, 1.28025),
                (1.34953, 1.38381),
                (1.64943, 1.47022),
                (2.21003, 1.57745),
            ],
            (0.3, 3.0),
        ),
        case(
            "q4",
            [0.01931322, 0.48, -0.00914158, -0.03, 0.0309612],
            CenterKind::Q4,
            [0.53, -0.37, -0.01, 0.5, 0.5, -0.03],
            [
                (0.300288, 0.358519),
                (0.491262, 0.648826),
                (0.874219, 1.48358),
                (1.15329, 2.89772),
            ],
            (0.1, 1.5),
        ),
    ]
}
