//! Simultaneous (Aberth–Ehrlich) iteration for all complex roots of a
//! polynomial. Generic and independent of the cosine-polynomial route; used
//! only as a cross-check.

use num_complex::Complex64;

fn eval_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `sum c[k] z^k`; the leading coefficient must be nonzero.
pub fn aberth_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let radius = (c[0] / lead).abs().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(c, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}
