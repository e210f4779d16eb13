//! Oracles that do not share code paths with the library.

#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_csv() -> PathBuf {
    fixture_dir().join("synthetic7.csv")
}

pub fn fixture_conf() -> PathBuf {
    fixture_dir().join("synthetic7.conf")
}

/// Roots of `det(A - lambda I)` for a symmetric 2x2 matrix, descending.
pub fn char_roots_2(a: [[f64; 2]; 2]) -> Vec<f64> {
    // lambda^2 - tr lambda + det
    let tr = a[0][0] + a[1][1];
    let half_gap = 0.5 * (a[0][0] - a[1][1]);
    let disc = (half_gap * half_gap + a[0][1] * a[1][0]).sqrt();
    vec![0.5 * tr + disc, 0.5 * tr - disc]
}

/// Roots of the characteristic cubic of a symmetric 3x3 matrix, descending.
/// Closed-form trigonometric solution, polished by Newton steps on the cubic.
pub fn char_roots_3(a: [[f64; 3]; 3]) -> Vec<f64> {
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2]
        - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    // p(l) = l^3 - tr l^2 + minors l - det
    let poly = |l: f64| ((l - tr) * l + minors) * l - det;
    let dpoly = |l: f64| (3.0 * l - 2.0 * tr) * l + minors;

    let q = tr / 3.0;
    let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * off;
    if p2 == 0.0 {
        return vec![q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (*x - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det_b / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    let mut roots: Vec<f64> = [l1, l2, l3]
        .into_iter()
        .map(|mut l| {
            for _ in 0..3 {
                let d = dpoly(l);
                if d.abs() < 1e-12 {
                    break;
                }
                let step = poly(l) / d;
                if !step.is_finite() {
                    break;
                }
                l -= step;
            }
            l
        })
        .collect();
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}

/// `V^T diag(lambda) V` from eigenpairs, rows of `vectors` being eigenvectors.
pub fn reconstruct(values: &[f64], vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = values.len();
    let mut m = vec![vec![0.0; n]; n];
    for (l, v) in values.iter().zip(vectors) {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += l * v[i] * v[j];
            }
        }
    }
    m
}
