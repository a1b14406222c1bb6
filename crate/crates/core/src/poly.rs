//! Real roots of low-degree polynomials.

/// Evaluates `coeffs[0] x^n + ... + coeffs[n]` by Horner's rule.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// A few Newton steps on the original coefficients. A step is kept only if it
/// does not increase |p|.
fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if p == 0.0 || dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() || eval(coeffs, next).abs() > p.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots of a x² + b x + c, ascending.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // q = -(b + sgn(b) sqrt(disc)) / 2 avoids cancellation in one root.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Real roots of a x³ + b x² + c x + d, ascending, each polished by Newton.
///
/// Uses the trigonometric form when the depressed cubic has three real roots
/// and Cardano's formula otherwise.
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic_roots(b, c, d);
    }
    let (b1, c1, d1) = (b / a, c / a, d / a);
    // x = t - b1/3:  t³ + p t + q = 0
    let shift = b1 / 3.0;
    let p = c1 - b1 * b1 / 3.0;
    let q = 2.0 * b1 * b1 * b1 / 27.0 - b1 * c1 / 3.0 + d1;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if p == 0.0 && q == 0.0 {
        vec![-shift]
    } else if disc < 0.0 {
        // three distinct real roots, p < 0
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let mut r = vec![u + v - shift];
        if disc == 0.0 {
            r.push(-(u + v) / 2.0 - shift);
        }
        r
    };
    let coeffs = [a, b, c, d];
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}
