//! Built-in geometries used by the examples and tests.

use super::patch::Patch;
use super::topology::{Face, Interface, MultipatchTopology};
use crate::spline::KnotVector;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

fn bezier_knots(p: usize) -> KnotVector {
    let mut k = vec![0.0; p + 1];
    k.extend(vec![1.0; p + 1]);
    KnotVector::new(k, p).expect("valid Bezier knots")
}

pub fn unit_interval() -> Patch {
    Patch::identity(1)
}

pub fn unit_square() -> Patch {
    Patch::identity(2)
}

pub fn unit_cube() -> Patch {
    Patch::identity(3)
}

/// Biquadratic distortion of the unit square with a stretched upper right corner.
pub fn stretched_square() -> Patch {
    let corners = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [2.2, 1.6]];
    let bilinear = |u: f64, v: f64| -> [f64; 2] {
        let mut x = [0.0; 2];
        for c in 0..2 {
            x[c] = (1.0 - u) * (1.0 - v) * corners[0][c]
                + (1.0 - u) * v * corners[1][c]
                + u * (1.0 - v) * corners[2][c]
                + u * v * corners[3][c];
        }
        x
    };
    let mut control = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let mut x = bilinear(i as f64 / 2.0, j as f64 / 2.0);
            if i == 1 && j == 1 {
                x[0] += 0.25;
                x[1] -= 0.15;
            }
            control.push(x.to_vec());
        }
    }
    Patch::new(vec![bezier_knots(2), bezier_knots(2)], control, None).expect("valid net")
}

/// Quarter annulus in the first quadrant; direction 0 is radial, direction 1 angular.
pub fn quarter_annulus(r_in: f64, r_out: f64) -> Patch {
    let w = FRAC_1_SQRT_2;
    let mut control = Vec::new();
    let mut weights = Vec::new();
    for r in [r_in, r_out] {
        for (x, y, wt) in [(r, 0.0, 1.0), (r, r, w), (0.0, r, 1.0)] {
            control.push(vec![x, y]);
            weights.push(wt);
        }
    }
    Patch::new(vec![bezier_knots(1), bezier_knots(2)], control, Some(weights)).expect("valid net")
}

/// Quarter of a square plate `[-4,0] x [0,4]` with a unit circular hole at the origin.
///
/// Direction 0 runs along the hole from `(-1,0)` to `(0,1)`; direction 1 runs outward.
/// The map degenerates only at the outer corner `(-4,4)`.
pub fn plate_with_hole() -> Patch {
    let t = 2f64.sqrt() - 1.0;
    let wm = (1.0 + FRAC_1_SQRT_2) / 2.0;
    let rows = [
        [[-1.0, 0.0], [-1.0, t], [-t, 1.0], [0.0, 1.0]],
        [[-2.5, 0.0], [-2.5, 0.75], [-0.75, 2.5], [0.0, 2.5]],
        [[-4.0, 0.0], [-4.0, 4.0], [-4.0, 4.0], [0.0, 4.0]],
    ];
    let wcol = [1.0, wm, wm, 1.0];
    let mut control = Vec::new();
    let mut weights = Vec::new();
    for i in 0..4 {
        for row in &rows {
            control.push(row[i].to_vec());
            weights.push(wcol[i]);
        }
    }
    let ku = KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).expect("valid knots");
    Patch::new(vec![ku, bezier_knots(2)], control, Some(weights)).expect("valid net")
}

/// The plate with a hole split along the diagonal into two regular patches.
///
/// Face `u = 1` of patch 0 is glued to face `u = 0` of patch 1.
pub fn plate_with_hole_two_patch() -> MultipatchTopology {
    let t = FRAC_PI_8.tan();
    let w = FRAC_PI_8.cos();
    let s = FRAC_1_SQRT_2;
    let make = |inner: [[f64; 2]; 3], outer: [[f64; 2]; 3]| {
        let mut control = Vec::new();
        let mut weights = Vec::new();
        for i in 0..3 {
            let wt = if i == 1 { w } else { 1.0 };
            control.push(inner[i].to_vec());
            control.push(outer[i].to_vec());
            weights.push(wt);
            weights.push(wt);
        }
        Patch::new(vec![bezier_knots(2), bezier_knots(1)], control, Some(weights)).expect("valid net")
    };
    let a = make([[-1.0, 0.0], [-1.0, t], [-s, s]], [[-4.0, 0.0], [-4.0, 2.0], [-4.0, 4.0]]);
    let b = make([[-s, s], [-t, 1.0], [0.0, 1.0]], [[-4.0, 4.0], [-2.0, 4.0], [0.0, 4.0]]);
    MultipatchTopology::new(
        vec![a, b],
        vec![Interface {
            patch_a: 0,
            face_a: Face { direction: 0, side: 1 },
            patch_b: 1,
            face_b: Face { direction: 0, side: 0 },
            orientation: vec![(0, false)],
        }],
    )
    .expect("conforming catalog topology")
}

/// A curved 3D bar: a quarter-annulus sweep of radii `[1,2]` extruded over `z in [0,1]`.
///
/// Directions are (radial, angular, height).
pub fn magnet() -> Patch {
    let w = FRAC_1_SQRT_2;
    let mut control = Vec::new();
    let mut weights = Vec::new();
    for r in [1.0, 2.0] {
        for (x, y, wt) in [(r, 0.0, 1.0), (r, r, w), (0.0, r, 1.0)] {
            for z in [0.0, 1.0] {
                control.push(vec![x, y, z]);
                weights.push(wt);
            }
        }
    }
    Patch::new(vec![bezier_knots(1), bezier_knots(2), bezier_knots(1)], control, Some(weights))
        .expect("valid net")
}

/// Three unit cubes stacked along x, with cross sections rotated by an angle
/// growing linearly in x (`twist` radians over the full length).
pub fn twisted_box(twist: f64) -> MultipatchTopology {
    let npatch = 3;
    let total = npatch as f64;
    let mut patches = Vec::new();
    for k in 0..npatch {
        let mut control = Vec::new();
        for i in 0..3 {
            let x = k as f64 + i as f64 / 2.0;
            let (s, c) = (twist * x / total).sin_cos();
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    let (dy, dz) = (y - 0.5, z - 0.5);
                    control.push(vec![x, 0.5 + c * dy - s * dz, 0.5 + s * dy + c * dz]);
                }
            }
        }
        patches.push(
            Patch::new(vec![bezier_knots(2), bezier_knots(1), bezier_knots(1)], control, None).expect("valid net"),
        );
    }
    let interfaces = (0..npatch - 1)
        .map(|k| Interface {
            patch_a: k,
            face_a: Face { direction: 0, side: 1 },
            patch_b: k + 1,
            face_b: Face { direction: 0, side: 0 },
            orientation: vec![(0, false), (1, false)],
        })
        .collect();
    MultipatchTopology::new(patches, interfaces).expect("conforming catalog topology")
}

/// Rectangle `[0,lx] x [0,ly]` split into `px x py` equal axis-aligned patches.
///
/// Patches are numbered with the x index most significant.
pub fn rectangle_grid(lx: f64, ly: f64, px: usize, py: usize) -> MultipatchTopology {
    let (hx, hy) = (lx / px as f64, ly / py as f64);
    let mut patches = Vec::new();
    for i in 0..px {
        for j in 0..py {
            let lo = [i as f64 * hx, j as f64 * hy];
            let hi = [(i + 1) as f64 * hx, (j + 1) as f64 * hy];
            patches.push(Patch::axis_box(&lo, &hi));
        }
    }
    let mut interfaces = Vec::new();
    for i in 0..px {
        for j in 0..py {
            let id = i * py + j;
            if i + 1 < px {
                interfaces.push(Interface {
                    patch_a: id,
                    face_a: Face { direction: 0, side: 1 },
                    patch_b: id + py,
                    face_b: Face { direction: 0, side: 0 },
                    orientation: vec![(0, false)],
                });
            }
            if j + 1 < py {
                interfaces.push(Interface {
                    patch_a: id,
                    face_a: Face { direction: 1, side: 1 },
                    patch_b: id + 1,
                    face_b: Face { direction: 1, side: 0 },
                    orientation: vec![(0, false)],
                });
            }
        }
    }
    MultipatchTopology::new(patches, interfaces).expect("conforming catalog topology")
}

/// Two unit intervals `[0,1]` and `[1,2]` glued at `x = 1`.
pub fn two_intervals() -> MultipatchTopology {
    MultipatchTopology::new(
        vec![Patch::axis_box(&[0.0], &[1.0]), Patch::axis_box(&[1.0], &[2.0])],
        vec![Interface {
            patch_a: 0,
            face_a: Face { direction: 0, side: 1 },
            patch_b: 1,
            face_b: Face { direction: 0, side: 0 },
            orientation: vec![],
        }],
    )
    .expect("conforming catalog topology")
}
