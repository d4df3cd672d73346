//! Adaptive Gauss–Kronrod integration and Gauss–Legendre rules.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// One 15-point Kronrod panel with its embedded Gauss error estimate.
fn qk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)` or `max_panels` panels
/// are in use.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_panels: usize) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, abs_error: 0.0, converged: true, evaluations: 0 };
    }
    let (value, err) = qk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    loop {
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= max_panels || !total.is_finite() {
            return Estimate { value: total, abs_error: total_err, converged: false, evaluations };
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            return Estimate { value: total, abs_error: total_err, converged: false, evaluations };
        }
        let (v1, e1) = qk15(&mut f, worst.a, mid);
        let (v2, e2) = qk15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // re-sum to shed the drift of the running totals
    let value = heap.iter().map(|p| p.value).sum();
    let abs_error = heap.iter().map(|p| p.err).sum();
    Estimate { value, abs_error, converged: true, evaluations }
}

/// Nested adaptive integration over the box `[lo, hi]³`.
///
/// Each inner integral is computed adaptively to `rel_tol / 10`; the
/// reported error adds the outer estimate and the inner estimates
/// integrated over the outer variables.
pub fn integrate_box<F: Fn([f64; 3]) -> f64>(f: &F, lo: [f64; 3], hi: [f64; 3], rel_tol: f64, max_panels: usize) -> Estimate {
    let inner_tol = rel_tol / 10.0;
    let mut all_converged = true;
    let mut evaluations = 0usize;
    let mut inner_err = 0.0;
    let outer = integrate(
        |x| {
            let mid = integrate(
                |y| {
                    let e = integrate(|z| f([x, y, z]), lo[2], hi[2], 0.0, inner_tol, max_panels);
                    all_converged &= e.converged;
                    evaluations += e.evaluations;
                    e.value
                },
                lo[1],
                hi[1],
                0.0,
                inner_tol,
                max_panels,
            );
            all_converged &= mid.converged;
            inner_err += mid.abs_error;
            mid.value
        },
        lo[0],
        hi[0],
        0.0,
        rel_tol,
        max_panels,
    );
    // `inner_err` summed over all outer nodes; scale by the mean node weight.
    let width = hi[0] - lo[0];
    let nodes = (outer.evaluations.max(1)) as f64;
    let abs_error = outer.abs_error + inner_err * width / nodes;
    Estimate {
        value: outer.value,
        abs_error,
        converged: outer.converged && all_converged,
        evaluations: evaluations.max(outer.evaluations),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let e = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, 1e-14, 0.0, 10);
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((e.value - exact).abs() < 1e-13);
        assert!(e.converged);
    }

    #[test]
    fn endpoint_singularity_refines() {
        let e = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10, 200);
        assert!((e.value - 2.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn divergent_integrand_does_not_converge() {
        let e = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10, 1e-10, 100);
        assert!(!e.converged);
    }

    #[test]
    fn gauss_legendre_weights() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // exact for degree 2n - 1
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn box_gaussian() {
        let f = |p: [f64; 3]| (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).exp();
        let e = integrate_box(&f, [-6.0; 3], [6.0; 3], 1e-8, 200);
        assert!((e.value - PI.powf(1.5)).abs() < 1e-7 * PI.powf(1.5), "{e:?}");
    }
}
