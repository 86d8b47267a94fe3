#![allow(dead_code)]

use echeight::{Curve, RationalPoint};

/// Curves whose height gap vanishes, each with a small non-torsion point.
pub const FIXTURES: &[(i64, i64, i64, i64)] = &[
    (-3, -4, 8, 22),
    (0, -2, 3, 5),
    (0, -11, 3, 4),
    (-5, 3, 2, 1),
    (-9, -9, -2, 1),
    (-3, 1, 0, 1),
    (-4, -2, -1, 1),
    (-11, 4, 0, 2),
];

pub fn fixture(i: usize) -> (Curve, RationalPoint) {
    let (a4, a6, x, y) = FIXTURES[i];
    let e = Curve::new(a4, a6).unwrap();
    let p = e.point(x, y).unwrap();
    (e, p)
}

/// Curves with nontrivial torsion, with the expected group order.
pub const TORSION_CURVES: &[(i64, i64, u32)] = &[(-1, 0, 4), (0, 1, 6), (0, 4, 3), (-43, 166, 7), (-2, 1, 4)];
