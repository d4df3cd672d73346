//! Independent reference computations for the core numerics.

use dirac_enclosure::bs::{largest_singular_value, DenseMatrix};
use dirac_enclosure::resolvent::RescaledKernel;
use dirac_enclosure::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix4(rng: &mut ChaCha8Rng) -> Matrix4C {
    let mut m = Matrix4C::zero();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        }
    }
    m
}

/// Largest eigenvalue of a Hermitian positive semidefinite 4×4 matrix from its
/// characteristic polynomial (Faddeev–LeVerrier) and Newton's method started
/// above every root.
fn largest_eigenvalue_charpoly(g: &Matrix4C) -> f64 {
    // p(t) = t⁴ + c3 t³ + c2 t² + c1 t + c0
    let n = 4;
    let mut coeffs = [Complex64::new(0.0, 0.0); 5];
    coeffs[4] = c(1.0, 0.0);
    let mut mk = Matrix4C::zero();
    for k in 1..=n {
        let mut next = *g * mk;
        for i in 0..4 {
            next[(i, i)] += coeffs[n - k + 1];
        }
        mk = next;
        coeffs[n - k] = -(*g * mk).trace() / k as f64;
    }
    let p: Vec<f64> = coeffs.iter().map(|v| v.re).collect();
    let eval = |t: f64| (((p[4] * t + p[3]) * t + p[2]) * t + p[1]) * t + p[0];
    let deriv = |t: f64| ((4.0 * p[4] * t + 3.0 * p[3]) * t + 2.0 * p[2]) * t + p[1];
    let mut t = g.trace().re.max(0.0) + 1.0;
    for _ in 0..200 {
        let step = eval(t) / deriv(t);
        t -= step;
        if step.abs() <= 1e-15 * t.abs() {
            break;
        }
    }
    t
}

fn to_nalgebra(m: &DenseMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m.get(i, j))
}

fn svd_max(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

#[test]
fn operator_norm_matches_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let m = random_matrix4(&mut rng);
        let oracle = largest_eigenvalue_charpoly(&(m.adjoint() * m)).sqrt();
        let got = m.operator_norm();
        assert!((got - oracle).abs() <= 1e-12 * oracle, "{got} vs {oracle}");
    }
}

#[test]
fn operator_norm_matches_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let m = random_matrix4(&mut rng);
        let n = DMatrix::from_fn(4, 4, |i, j| m[(i, j)]);
        let oracle = svd_max(&n);
        assert!((m.operator_norm() - oracle).abs() <= 1e-12 * oracle);
    }
}

#[test]
fn kernel_operator_norm_matches_svd() {
    let b = DiracBasis::new(Representation::Weyl);
    let p = SpectralPoint::new(c(0.7, -1.3), 2.0).unwrap();
    let k = kernel(&p, [0.1, 0.2, -0.3], [0.4, -0.5, 0.6], &b).unwrap().matrix;
    let n = DMatrix::from_fn(4, 4, |i, j| k[(i, j)]);
    assert!((k.operator_norm() - svd_max(&n)).abs() <= 1e-12 * svd_max(&n));
}

/// `‖K‖²_HS = |e^{-κr}/(4πr³)|² tr(A*A)` and `tr(A*A) = 4(|a|² + a₄² + |a₀|²)`
/// because `B` is traceless; both checked against the closed form.
#[test]
fn hilbert_schmidt_through_rescaled_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for rep in Representation::ALL {
        let b = DiracBasis::new(rep);
        for _ in 0..1000 {
            let p = SpectralPoint::new(c(rng.random_range(-6.0..6.0), rng.random_range(0.01..6.0)), rng.random_range(0.0..4.0)).unwrap();
            let d: [f64; 3] = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let a = RescaledKernel::new(&p, d).unwrap();
            let am = a.matrix(&b);
            let via_trace = (am.adjoint() * am).trace().re * a.prefactor().norm_sqr();
            let closed = hs_closed_form(&p, r).unwrap();
            assert!((via_trace - closed).abs() <= 1e-12 * closed, "{rep}: {via_trace} vs {closed}");
            let kernel_hs = kernel(&p, d, [0.0; 3], &b).unwrap().matrix.hs_norm().powi(2);
            assert!((kernel_hs - closed).abs() <= 1e-12 * closed);
            let b_trace = a.traceless_part(&b).trace().norm();
            assert!(b_trace <= 1e-12 * am.hs_norm().powi(2));
        }
    }
}

/// Gaussian norms by a fixed composite Simpson rule on the radial integral,
/// independent of the adaptive machinery.
#[test]
fn gaussian_norms_against_fixed_grid() {
    let (v0, w) = (0.37, 1.6);
    let g = PotentialModel::gaussian(v0, w).unwrap();
    for (p, exp) in [(LpExponent::Three, 3.0), (LpExponent::ThreeHalves, 1.5)] {
        let n = 20_000;
        let rmax = 12.0 * w;
        let h = rmax / n as f64;
        let f = |r: f64| 4.0 * std::f64::consts::PI * r * r * (v0 * (-(r / w).powi(2)).exp()).powf(exp);
        let mut sum = f(0.0) + f(rmax);
        for i in 1..n {
            sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = (sum * h / 3.0).powf(1.0 / exp);
        let got = g.lp_norm(p, 1e-8).unwrap();
        assert!(got.converged);
        assert!((got.value - oracle).abs() <= 1e-7 * oracle, "{p:?}: {} vs {oracle}", got.value);
    }
}

#[test]
fn general_kind_agrees_with_radial_kind() {
    let radial = PotentialModel::bump(0.4, 1.3).unwrap();
    let general = PotentialModel::scalar_general(
        move |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            radial.scalar_value([r, 0.0, 0.0]).unwrap()
        },
        1.3,
    )
    .unwrap();
    let radial = PotentialModel::bump(0.4, 1.3).unwrap();
    let a = radial.lp_norm(LpExponent::Three, 1e-6).unwrap().value;
    let b = general.lp_norm(LpExponent::Three, 1e-6).unwrap().value;
    assert!((a - b).abs() <= 1e-4 * a, "{a} vs {b}");
}

#[test]
fn power_iteration_matches_svd_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for dim in [1, 2, 7, 16, 64] {
        for _ in 0..5 {
            let data: Vec<Complex64> =
                (0..dim * dim).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let m = DenseMatrix::from_rows(dim, data).unwrap();
            let oracle = svd_max(&to_nalgebra(&m));
            let est = largest_singular_value(&m, &PowerIteration { max_iterations: 20_000, ..Default::default() });
            assert!(est.converged, "dim {dim}");
            assert!((est.value - oracle).abs() <= 1e-8 * oracle, "dim {dim}: {} vs {oracle}", est.value);
        }
    }
}

#[test]
fn power_iteration_matches_svd_on_bs_matrix() {
    let b = DiracBasis::new(Representation::Standard);
    let g = PotentialModel::gaussian(0.3, 1.0).unwrap();
    for (scheme, z, m) in [
        (BsScheme::MonteCarlo { nodes: 16, seed: 4 }, c(0.5, 1.0), 1.0),
        (BsScheme::TensorGauss { per_axis: 4, half_width: 2.5 }, c(-3.0, 0.2), 0.0),
    ] {
        let p = SpectralPoint::new(z, m).unwrap();
        let d = build_bs(p, &g, scheme, &b).unwrap();
        let oracle = svd_max(&to_nalgebra(&d.matrix));
        let est = bs_norm_estimate(&d, &PowerIteration { max_iterations: 20_000, ..Default::default() });
        assert!((est.value - oracle).abs() <= 1e-8 * oracle, "{scheme:?}: {} vs {oracle}", est.value);
    }
}
