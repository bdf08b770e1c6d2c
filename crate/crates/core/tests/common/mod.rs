//! Shared oracle machinery for the integration suites: tanh-sinh quadrature
//! over `(-1, 1)` and the factorized interval-moment oracles it backs.
//! Everything here is independent of the moment engine's closed form.

/// Tanh-sinh quadrature of `f` over `(-1, 1)`.
///
/// The integrand receives the distances to the two endpoints,
/// `(1 + s, 1 - s)`, computed in a cancellation-free way, so endpoint
/// singularities like `(1 - s)^beta` with `beta > -1` are integrated
/// accurately.
pub fn tanh_sinh(f: impl Fn(f64, f64) -> f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    // Distances 1 +- tanh(v) without cancellation.
    let deltas = |v: f64| -> (f64, f64) {
        if v >= 0.0 {
            let e = (-2.0 * v).exp();
            (2.0 / (1.0 + e), 2.0 * e / (1.0 + e))
        } else {
            let e = (2.0 * v).exp();
            (2.0 * e / (1.0 + e), 2.0 / (1.0 + e))
        }
    };
    let point = |t: f64| -> (f64, f64, f64) {
        let v = half_pi * t.sinh();
        let w = half_pi * t.cosh() / v.cosh().powi(2);
        let (dm, dp) = deltas(v);
        (dm, dp, w)
    };
    // The node range must grow with the strength of the endpoint
    // singularity; 6.5 keeps the truncated tail below 1e-14 for exponents
    // down to -0.95.
    let t_max = 6.5;
    let mut h = 0.5;
    let (dm, dp, w) = point(0.0);
    let mut sum = w * f(dm, dp);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = (k as f64) * h;
        for s in [t, -t] {
            let (dm, dp, w) = point(s);
            let contribution = w * f(dm, dp);
            if contribution.is_finite() {
                sum += contribution;
            }
        }
        k += 1;
    }
    let mut integral = h * sum;
    for level in 0..12 {
        h *= 0.5;
        // Add the new (odd-multiple) nodes of the refined mesh.
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = (k as f64) * h;
            for s in [t, -t] {
                let (dm, dp, w) = point(s);
                let contribution = w * f(dm, dp);
                if contribution.is_finite() {
                    sum += contribution;
                }
            }
            k += 2;
        }
        let refined = h * sum;
        if level >= 3 && (refined - integral).abs() <= 1e-14 * refined.abs().max(1.0) {
            return refined;
        }
        integral = refined;
    }
    integral
}

/// `int_{-1}^{1} |x|^g (1 - x^2)^beta dx` for `g, beta > -1`, computed as
/// `2 int_0^1` with `x = (1 + s)/2`.
pub fn interval_moment(g: f64, beta: f64) -> f64 {
    tanh_sinh(|dm, dp| {
        let x = dm / 2.0; // distance to s = -1 maps to x itself
        let one_minus_x = dp / 2.0;
        let one_plus_x = (4.0 - dp) / 2.0;
        x.powf(g) * (one_minus_x * one_plus_x).powf(beta)
    })
}

/// Quadrature value of the unit-mass moment in d = 1.
pub fn oracle_moment_1d(alpha: f64, gamma: f64, b: u32, theta: f64) -> f64 {
    interval_moment(gamma + theta + 2.0 * b as f64, alpha) / interval_moment(gamma, alpha)
}

/// Quadrature value of the unit-mass moment in d = 2, after factorizing the
/// disk integral into two interval integrals by the inner change of
/// variable `x_2 = sqrt(1 - x_1^2) s`.
pub fn oracle_moment_2d(alpha: f64, gamma: [f64; 2], b: [u32; 2], theta: [f64; 2]) -> f64 {
    let factorized = |bb: [u32; 2], th: [f64; 2]| -> f64 {
        let g2 = gamma[1] + th[1] + 2.0 * bb[1] as f64;
        let g1 = gamma[0] + th[0] + 2.0 * bb[0] as f64;
        interval_moment(g2, alpha) * interval_moment(g1, alpha + (g2 + 1.0) / 2.0)
    };
    factorized(b, theta) / factorized([0, 0], [0.0, 0.0])
}
