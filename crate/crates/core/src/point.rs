//! Small fixed-size vector helpers for points of R^{2n} with the complex
//! structure `z_j = x_j + i y_j` laid out as `[x1, y1, x2, y2]`.

use crate::Point;

pub const ZERO: Point = [0.0; 4];

/// Real dot product over the first `rd` coordinates.
pub fn dot(a: &Point, b: &Point, rd: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..rd {
        s += a[k] * b[k];
    }
    s
}

pub fn norm(a: &Point, rd: usize) -> f64 {
    dot(a, a, rd).sqrt()
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn axpy(a: &Point, t: f64, d: &Point) -> Point {
    [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2], a[3] + t * d[3]]
}

pub fn scale(a: &Point, t: f64) -> Point {
    [t * a[0], t * a[1], t * a[2], t * a[3]]
}

pub fn dist(a: &Point, b: &Point, rd: usize) -> f64 {
    let d = sub(a, b);
    norm(&d, rd)
}

/// Re <z, v> for the Hermitian inner product; equals the real dot product.
pub fn re_inner(z: &Point, v: &Point, n: usize) -> f64 {
    dot(z, v, 2 * n)
}

/// Im <z, v> = sum_j (y_j vx_j - x_j vy_j).
pub fn im_inner(z: &Point, v: &Point, n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        s += z[2 * j + 1] * v[2 * j] - z[2 * j] * v[2 * j + 1];
    }
    s
}

/// Multiply the complex vector `a` by `e^{i theta}` componentwise.
pub fn cplx_rotate(a: &Point, theta: f64, n: usize) -> Point {
    let (s, c) = theta.sin_cos();
    let mut out = ZERO;
    for j in 0..n {
        let (x, y) = (a[2 * j], a[2 * j + 1]);
        out[2 * j] = c * x - s * y;
        out[2 * j + 1] = s * x + c * y;
    }
    out
}

/// The 4n signed real coordinate directions, unit length, axes-first order.
pub fn signed_axes(rd: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(2 * rd);
    for k in 0..rd {
        let mut p = ZERO;
        p[k] = 1.0;
        out.push(p);
        let mut m = ZERO;
        m[k] = -1.0;
        out.push(m);
    }
    out
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Deterministic low-discrepancy directions on the unit sphere of R^{rd}
/// (rd = 2 or 4), signed axes first.
pub fn sphere_directions(rd: usize, count: usize) -> Vec<Point> {
    let mut dirs = signed_axes(rd);
    let mut j = 1usize;
    while dirs.len() < count.max(2 * rd) {
        let p = match rd {
            2 => {
                let t = 2.0 * std::f64::consts::PI * halton(j, 2);
                [t.cos(), t.sin(), 0.0, 0.0]
            }
            4 => {
                // Hopf-style parametrization of S^3 from a 3-d Halton point.
                let u = 2.0 * std::f64::consts::PI * halton(j, 2);
                let v = 2.0 * std::f64::consts::PI * halton(j, 3);
                let t = halton(j, 5);
                let (a, b) = ((1.0 - t).sqrt(), t.sqrt());
                [a * u.cos(), a * u.sin(), b * v.cos(), b * v.sin()]
            }
            _ => unreachable!("only real dimensions 2 and 4 are supported"),
        };
        dirs.push(p);
        j += 1;
    }
    dirs.truncate(count.max(2 * rd));
    dirs
}

/// Deterministic complex directions spanning the sampled complex lines of a
/// sweep: the complex coordinate axes followed by a Fibonacci set of lines
/// (for n = 2, lines correspond to points of S^2 via the Hopf fibration).
pub fn complex_directions(n: usize, count: usize) -> Vec<Point> {
    let mut dirs: Vec<Point> = Vec::with_capacity(count);
    match n {
        1 => {
            for k in 0..count.max(1) {
                let t = std::f64::consts::PI * (k as f64) / (count.max(1) as f64);
                dirs.push([t.cos(), t.sin(), 0.0, 0.0]);
            }
        }
        2 => {
            dirs.push([1.0, 0.0, 0.0, 0.0]);
            dirs.push([0.0, 0.0, 1.0, 0.0]);
            let extra = count.saturating_sub(2);
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            for j in 0..extra {
                // Fibonacci point on S^2, lifted to a unit vector of C^2.
                let zc = 1.0 - 2.0 * (j as f64 + 0.5) / (extra as f64);
                let tau = zc.acos();
                let psi = 2.0 * std::f64::consts::PI * (j as f64) / golden;
                let (ht, hc) = ((tau / 2.0).sin(), (tau / 2.0).cos());
                dirs.push([hc, 0.0, ht * psi.cos(), ht * psi.sin()]);
            }
        }
        _ => unreachable!("only n = 1, 2 are supported"),
    }
    dirs
}
