use std::f64::consts::PI;

/// Flow of `dX/dt = sin(aX)`: with `Y = aX`, `tan(Y_t/2) = e^{at} tan(Y_0/2)`.
///
/// `t` may be negative. Equilibria (`|sin(ax)| < 1e-14`) are returned as is.
pub fn sin_flow(a: f64, t: f64, x: f64) -> f64 {
    let y = a * x;
    if y.sin().abs() < 1e-14 {
        return x;
    }
    let two_pi = 2.0 * PI;
    let k = (y / two_pi).floor();
    let r = y - k * two_pi;
    let half = 0.5 * r;
    let e = (a * t).exp();
    let yt = 2.0 * (e * half.sin()).atan2(half.cos());
    (yt + k * two_pi) / a
}

/// Classical RK4 for `dX = h(X) γ dt` over `[0, t]` in `substeps` steps.
pub fn rk4_flow<H: Fn(f64) -> f64 + ?Sized>(h: &H, gamma: f64, t: f64, x: f64, substeps: usize) -> f64 {
    let n = substeps.max(1);
    let dt = t / n as f64;
    let f = |x: f64| gamma * h(x);
    let mut x = x;
    for _ in 0..n {
        let k1 = f(x);
        let k2 = f(x + 0.5 * dt * k1);
        let k3 = f(x + 0.5 * dt * k2);
        let k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x
}
