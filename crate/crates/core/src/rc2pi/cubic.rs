// SPDX-License-Identifier: Apache-2.0

//! Closed-form roots of low-degree real polynomials, Newton polished.

use num_complex::Complex64;

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Roots of the monic cubic `s^3 + b2 s^2 + b1 s + b0`.
///
/// Complex roots come out as an exact conjugate pair. Roots are ordered by
/// ascending `|Re|`.
pub fn solve_cubic_stable(b2: f64, b1: f64, b0: f64) -> [Complex64; 3] {
    let r = real_cubic_root(b2, b1, b0);
    // Deflate (s - r)(s^2 + c1 s + c0). Of the two ways to get c0 the
    // division is better conditioned when r is large.
    let c1 = b2 + r;
    let c0 = if r.abs() > 1.0 && r != 0.0 { -b0 / r } else { b1 + r * c1 };
    let [q0, q1] = solve_quadratic(c1, c0);

    let f = |s: Complex64| ((s + b2) * s + b1) * s + b0;
    let df = |s: Complex64| (3.0 * s + 2.0 * b2) * s + b1;
    let mut roots = [Complex64::new(r, 0.0), q0, q1].map(|s| polish(s, f, df));
    if q0.im != 0.0 {
        // keep the pair exactly conjugate after independent polishing
        roots[1] = Complex64::new(roots[1].re, roots[1].im.abs());
        roots[2] = roots[1].conj();
        roots[0].im = 0.0;
    } else {
        roots.iter_mut().for_each(|z| z.im = 0.0);
    }
    roots.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()).then(a.im.total_cmp(&b.im)));
    roots
}

/// Roots of the monic quadratic `s^2 + c1 s + c0`, computed without cancellation.
pub fn solve_quadratic(c1: f64, c0: f64) -> [Complex64; 2] {
    let disc = c1 * c1 - 4.0 * c0;
    if disc >= 0.0 {
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q, 0.0), Complex64::new(c0 / q, 0.0)]
    } else {
        let re = -0.5 * c1;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// One real root of the monic cubic (Cardano, or the trigonometric form when
/// all three roots are real), polished with real Newton steps.
fn real_cubic_root(b2: f64, b1: f64, b0: f64) -> f64 {
    let shift = b2 / 3.0;
    let p = b1 - b2 * shift;
    let q = b0 - b1 * shift + 2.0 * shift * shift * shift;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let y = if disc > 0.0 {
        let a = -half_q.signum() * (half_q.abs() + disc.sqrt()).cbrt();
        if a == 0.0 {
            0.0
        } else {
            a - third_p / a
        }
    } else if third_p == 0.0 {
        0.0
    } else {
        let m = 2.0 * (-third_p).sqrt();
        let cos_arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = cos_arg.acos() / 3.0;
        // largest-magnitude of the three real roots deflates best
        [0.0, 1.0, 2.0]
            .map(|k| m * (phi - k * TWO_PI_3).cos())
            .into_iter()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0)
    };
    let mut r = y - shift;
    for _ in 0..4 {
        let f = ((r + b2) * r + b1) * r + b0;
        let df = (3.0 * r + 2.0 * b2) * r + b1;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let next = r - f / df;
        let f_next = ((next + b2) * next + b1) * next + b0;
        if f_next.abs() >= f.abs() {
            break;
        }
        r = next;
    }
    r
}

/// Newton steps on `f` that are kept only while they reduce the residual.
fn polish(mut s: Complex64, f: impl Fn(Complex64) -> Complex64, df: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let mut fs = f(s);
    for _ in 0..3 {
        let d = df(s);
        if d.norm() == 0.0 || fs.norm() == 0.0 {
            break;
        }
        let next = s - fs / d;
        let f_next = f(next);
        if !(f_next.norm() < fs.norm()) {
            break;
        }
        s = next;
        fs = f_next;
    }
    s
}

/// Roots of `c[0] + c[1] p + ... + c[n] p^n` for degree `n <= 3` with `c[n] != 0`.
pub(crate) fn poly_roots(c: &[f64]) -> Vec<Complex64> {
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![Complex64::new(-c[0] / c[1], 0.0)],
        3 => solve_quadratic(c[1] / c[2], c[0] / c[2]).to_vec(),
        4 => solve_cubic_stable(c[2] / c[3], c[1] / c[3], c[0] / c[3]).to_vec(),
        n => panic!("poly_roots: degree {} unsupported", n - 1),
    }
}
