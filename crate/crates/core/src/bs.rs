//! Nyström discretisation of the Birman–Schwinger operator
//! `K_z = W^{1/2} (H₀ - z)⁻¹ U W^{1/2}` for scalar potentials.
//!
//! For `v` scalar, `W = |v|` and `U = v/|v|`. On nodes `xᵢ` with weights
//! `ωᵢ` the operator becomes the `4N × 4N` block matrix
//!
//! ```text
//! Mᵢⱼ = sqrt(ωᵢ |v(xᵢ)|) · (H₀ - z)⁻¹(xᵢ, xⱼ) · u(xⱼ) sqrt(|v(xⱼ)| ωⱼ),   i ≠ j,
//! ```
//!
//! with zero diagonal blocks. Dropping the integrable `|x - x'|⁻²`
//! singularity under-estimates the norm, so the discrete norm is only ever
//! compared against analytic *upper* bounds.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algebra::DiracBasis;
use crate::constants::{C_PRIME, LEMMA1_COEFF};
use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::quadrature::gauss_legendre;
use crate::resolvent::{kernel, SpectralPoint};
use crate::Vec3;

/// Largest admissible matrix dimension `4N`.
pub const MAX_DIM: usize = 8192;

/// Node placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BsScheme {
    /// Tensor Gauss–Legendre rule with `per_axis` nodes on `[-half_width, half_width]³`.
    TensorGauss { per_axis: usize, half_width: f64 },
    /// `nodes` samples from an isotropic Gaussian of standard deviation
    /// `length_scale / sqrt(2)`, weighted by the inverse sampling density.
    MonteCarlo { nodes: usize, seed: u64 },
}

impl BsScheme {
    pub fn node_count(&self) -> usize {
        match *self {
            BsScheme::TensorGauss { per_axis, .. } => per_axis.pow(3),
            BsScheme::MonteCarlo { nodes, .. } => nodes,
        }
    }

    fn nodes(&self, length_scale: f64) -> (Vec<Vec3>, Vec<f64>) {
        match *self {
            BsScheme::TensorGauss { per_axis, half_width } => {
                let (x, w) = gauss_legendre(per_axis);
                let mut nodes = Vec::with_capacity(per_axis.pow(3));
                let mut weights = Vec::with_capacity(per_axis.pow(3));
                let h = half_width;
                for a in 0..per_axis {
                    for b in 0..per_axis {
                        for c in 0..per_axis {
                            nodes.push([h * x[a], h * x[b], h * x[c]]);
                            weights.push(h * h * h * w[a] * w[b] * w[c]);
                        }
                    }
                }
                (nodes, weights)
            }
            BsScheme::MonteCarlo { nodes: n, seed } => {
                let sigma = length_scale / 2f64.sqrt();
                let norm = (2.0 * PI * sigma * sigma).powf(1.5);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut nodes = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                for _ in 0..n {
                    let g: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
                    let x = g.map(|v| sigma * v);
                    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                    let density = (-r2 / (2.0 * sigma * sigma)).exp() / norm;
                    nodes.push(x);
                    weights.push(1.0 / (n as f64 * density));
                }
                (nodes, weights)
            }
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Config(format!("expected {} entries, got {}", dim * dim, data.len())));
        }
        Ok(DenseMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// `y = M x`, rows in parallel, each row summed sequentially.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .par_chunks_exact(self.dim.max(1))
            .map(|row| row.iter().zip(x).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `y = M* x`. Accumulates row by row in a fixed order.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for (row, xi) in self.rows().zip(x) {
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += a.conj() * xi;
            }
        }
        y
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
}

/// Power-iteration settings for the largest singular value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIteration {
    pub max_iterations: usize,
    /// Relative accuracy target for the singular value.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration { max_iterations: 1000, tolerance: 1e-8, seed: 1 }
    }
}

/// Result of a largest-singular-value estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularValueEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of `m` by power iteration on `M*M` from a seeded
/// random start. Every iterate `‖M x‖` with `‖x‖ = 1` is a lower bound on
/// the true value.
///
/// The stopping rule extrapolates the remaining error from the observed
/// contraction `q = Δₖ/Δₖ₋₁` of successive increments, `Δₖ q/(1 - q)`, so the
/// tolerance bounds the distance to the limit rather than the last step.
pub fn largest_singular_value(m: &DenseMatrix, cfg: &PowerIteration) -> SingularValueEstimate {
    let n = m.dim();
    if n == 0 || m.is_zero() {
        return SingularValueEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut sigma = 0.0f64;
    let mut prev_delta = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        let y = m.mul_vec(&x);
        let s = norm(&y);
        let mut z = m.adjoint_mul_vec(&y);
        let nz = norm(&z);
        if nz == 0.0 {
            return SingularValueEstimate { value: s.max(sigma), iterations: it, converged: true };
        }
        z.iter_mut().for_each(|v| *v /= nz);
        x = z;
        let delta = (s - sigma).abs();
        sigma = sigma.max(s);
        if it > 1 {
            let q = delta / prev_delta;
            let remaining = if q < 1.0 { delta * (q / (1.0 - q)).max(1.0) } else { f64::INFINITY };
            if delta <= 8.0 * f64::EPSILON * sigma || remaining <= cfg.tolerance * sigma {
                return SingularValueEstimate { value: sigma, iterations: it, converged: true };
            }
        }
        prev_delta = delta;
    }
    warn!(
        "power iteration stopped at the cap of {} iterations before reaching relative accuracy {:e}",
        cfg.max_iterations, cfg.tolerance
    );
    SingularValueEstimate { value: sigma, iterations: cfg.max_iterations, converged: false }
}

/// Assembled Birman–Schwinger matrix with its nodes.
#[derive(Clone, Debug)]
pub struct BsDiscretization {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub point: SpectralPoint,
    pub scheme: BsScheme,
    pub matrix: DenseMatrix,
}

/// Assembles the discretised Birman–Schwinger operator.
pub fn build_bs(point: SpectralPoint, potential: &PotentialModel, scheme: BsScheme, basis: &DiracBasis) -> Result<BsDiscretization> {
    if !potential.is_scalar() {
        return Err(Error::Unsupported("Birman–Schwinger discretisation supports scalar potentials only".into()));
    }
    if !point.is_resolvent_point() {
        return Err(Error::Unsupported(format!(
            "z = {} lies in the essential spectrum for m = {}; the discretisation needs a resolvent point",
            point.z, point.m
        )));
    }
    let n = scheme.node_count();
    if n == 0 {
        return Err(Error::Config("at least one node is required".into()));
    }
    if 4 * n > MAX_DIM {
        return Err(Error::Config(format!("{n} nodes exceed the cap of {} (matrix dimension 4N)", MAX_DIM / 4)));
    }
    if let BsScheme::TensorGauss { half_width, .. } = scheme {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("half width must be positive, got {half_width}")));
        }
    }

    let (nodes, weights) = scheme.nodes(potential.length_scale());
    // left factor sqrt(ω |v|), right factor u sqrt(|v| ω) = v sqrt(ω/|v|)
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (x, &w) in nodes.iter().zip(&weights) {
        let v = potential.scalar_value(*x).expect("scalar potential");
        let a = v.norm();
        if a == 0.0 || !a.is_finite() {
            left.push(0.0);
            right.push(Complex64::new(0.0, 0.0));
        } else {
            left.push((w * a).sqrt());
            right.push(v / a * (a * w).sqrt());
        }
    }

    let dim = 4 * n;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut block_rows = vec![Complex64::new(0.0, 0.0); 4 * dim];
            if left[i] == 0.0 {
                return Ok(block_rows);
            }
            for j in 0..n {
                if i == j || right[j] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let k = kernel(&point, nodes[i], nodes[j], basis)?;
                let s = right[j] * left[i];
                for a in 0..4 {
                    for b in 0..4 {
                        block_rows[a * dim + 4 * j + b] = k.matrix.0[a][b] * s;
                    }
                }
            }
            Ok(block_rows)
        })
        .collect::<Result<_>>()?;
    let data = rows.into_iter().flatten().collect();
    Ok(BsDiscretization { nodes, weights, point, scheme, matrix: DenseMatrix { dim, data } })
}

/// Estimated operator norm of a discretisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsNormEstimate {
    pub value: f64,
    pub node_count: usize,
    pub estimator_iterations: usize,
    pub seed: u64,
    pub converged: bool,
}

pub fn bs_norm_estimate(disc: &BsDiscretization, cfg: &PowerIteration) -> BsNormEstimate {
    let est = largest_singular_value(&disc.matrix, cfg);
    BsNormEstimate {
        value: est.value,
        node_count: disc.nodes.len(),
        estimator_iterations: est.iterations,
        seed: cfg.seed,
        converged: est.converged,
    }
}

/// `(π/2)^{1/3} sqrt(1 + e⁻¹ + e⁻²) · sqrt(1 + (Re z)²/(Re κ)²) · ‖|V|‖_{L³}`;
/// infinite when `Re κ = 0` and `Re z ≠ 0`.
pub fn lemma1_bound(point: &SpectralPoint, norm3: f64) -> f64 {
    if norm3 == 0.0 {
        return 0.0;
    }
    let x = point.z.re;
    let weight = if x == 0.0 {
        1.0
    } else {
        let k = point.kappa().re;
        if k == 0.0 {
            return f64::INFINITY;
        }
        1f64.hypot(x / k)
    };
    LEMMA1_COEFF * weight * norm3
}

/// `(π/2)^{1/3} sqrt(1 + e⁻¹ + e⁻²) ‖|V|‖_{L³} + C' |Re z| ‖|V|‖_{L^{3/2}}`.
pub fn lemma2_bound(point: &SpectralPoint, norm3: f64, norm32: f64) -> f64 {
    let x = point.z.re.abs();
    let second = if x == 0.0 || norm32 == 0.0 { 0.0 } else { C_PRIME * x * norm32 };
    let first = if norm3 == 0.0 { 0.0 } else { LEMMA1_COEFF * norm3 };
    first + second
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Representation;
    use crate::constants::C_THM1;
    use crate::enclosure::certify_thm1;

    fn pt(re: f64, im: f64, m: f64) -> SpectralPoint {
        SpectralPoint::new(Complex64::new(re, im), m).unwrap()
    }

    fn basis() -> DiracBasis {
        DiracBasis::new(Representation::Standard)
    }

    #[test]
    fn zero_potential_gives_zero_matrix() {
        let d = build_bs(pt(0.0, 2.0, 1.0), &PotentialModel::zero(), BsScheme::MonteCarlo { nodes: 32, seed: 3 }, &basis()).unwrap();
        assert!(d.matrix.is_zero());
        assert_eq!(bs_norm_estimate(&d, &PowerIteration::default()).value, 0.0);
    }

    #[test]
    fn refusals() {
        let g = PotentialModel::gaussian(0.1, 1.0).unwrap();
        let s = BsScheme::MonteCarlo { nodes: 8, seed: 1 };
        assert!(matches!(build_bs(pt(2.0, 0.0, 1.0), &g, s, &basis()), Err(Error::Unsupported(_))));
        let mat = PotentialModel::matrix_general(|_| crate::Matrix4C::identity(), 1.0).unwrap();
        assert!(matches!(build_bs(pt(0.0, 1.0, 1.0), &mat, s, &basis()), Err(Error::Unsupported(_))));
        let big = BsScheme::MonteCarlo { nodes: 2049, seed: 1 };
        assert!(matches!(build_bs(pt(0.0, 1.0, 1.0), &g, big, &basis()), Err(Error::Config(_))));
    }

    #[test]
    fn single_node_is_its_zero_block() {
        let g = PotentialModel::gaussian(0.3, 1.0).unwrap();
        let d = build_bs(pt(0.0, 1.0, 1.0), &g, BsScheme::TensorGauss { per_axis: 1, half_width: 2.0 }, &basis()).unwrap();
        assert_eq!(d.matrix.dim(), 4);
        assert_eq!(bs_norm_estimate(&d, &PowerIteration::default()).value, 0.0);
    }

    #[test]
    fn two_node_block_structure() {
        let g = PotentialModel::gaussian(0.3, 1.0).unwrap();
        let p = pt(0.4, 1.5, 1.0);
        let d = build_bs(p, &g, BsScheme::MonteCarlo { nodes: 2, seed: 11 }, &basis()).unwrap();
        let (x0, x1) = (d.nodes[0], d.nodes[1]);
        let v0 = g.scalar_value(x0).unwrap().norm();
        let v1 = g.scalar_value(x1).unwrap().norm();
        let k = kernel(&p, x0, x1, &basis()).unwrap().matrix;
        let s = (d.weights[0] * v0).sqrt() * (d.weights[1] * v1).sqrt();
        for a in 0..4 {
            for b in 0..4 {
                assert!((d.matrix.get(a, 4 + b) - k.0[a][b] * s).norm() < 1e-15);
                assert_eq!(d.matrix.get(a, b), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn scaling_is_linear_for_sign_definite_potentials() {
        let p = pt(0.0, 2.0, 1.0);
        let s = BsScheme::MonteCarlo { nodes: 16, seed: 5 };
        let a = build_bs(p, &PotentialModel::gaussian(0.1, 1.0).unwrap(), s, &basis()).unwrap();
        let b = build_bs(p, &PotentialModel::gaussian(-0.3, 1.0).unwrap(), s, &basis()).unwrap();
        for i in 0..a.matrix.dim() {
            for j in 0..a.matrix.dim() {
                assert!((b.matrix.get(i, j).norm() - 3.0 * a.matrix.get(i, j).norm()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lemma_bounds() {
        let p = pt(0.0, 3.0, 2.0);
        assert!((lemma1_bound(&p, 1.0) - LEMMA1_COEFF).abs() < 1e-15);
        assert!((LEMMA1_COEFF - 1.42523).abs() < 1e-5);
        assert_eq!(lemma1_bound(&p, 0.0), 0.0);
        assert_eq!(lemma2_bound(&p, 0.0, 0.0), 0.0);
        assert_eq!(lemma2_bound(&p, 0.7, 123.0), LEMMA1_COEFF * 0.7);
        let q = pt(1.5, 0.5, 2.0);
        assert!((lemma2_bound(&q, 0.2, 0.3) - (LEMMA1_COEFF * 0.2 + C_PRIME * 1.5 * 0.3)).abs() < 1e-15);
        // the single-norm bound never exceeds the first criterion's left-hand side
        for (re, im, m) in [(0.5, 0.5, 1.0), (4.0, 0.01, 1.0), (-3.0, 2.0, 0.0)] {
            let z = pt(re, im, m);
            let lhs = certify_thm1(z.z, m, 0.4).lhs;
            assert!(lemma1_bound(&z, 0.4) <= lhs);
            assert!(lhs <= lemma1_bound(&z, 0.4) * C_THM1 / LEMMA1_COEFF * (1.0 + 1e-15));
        }
        assert_eq!(lemma1_bound(&pt(3.0, 0.0, 1.0), 0.1), f64::INFINITY);
    }

    #[test]
    fn power_iteration_diagonal() {
        let mut m = DenseMatrix::zeros(3);
        m.data[0] = Complex64::new(0.5, 0.0);
        m.data[4] = Complex64::new(0.0, -2.0);
        m.data[8] = Complex64::new(1.0, 1.0);
        let e = largest_singular_value(&m, &PowerIteration { tolerance: 1e-14, ..Default::default() });
        assert!((e.value - 2.0).abs() < 1e-12);
        assert!(e.converged);
    }

    #[test]
    fn power_iteration_cap_reports_non_convergence() {
        let mut m = DenseMatrix::zeros(2);
        m.data[0] = Complex64::new(1.0, 0.0);
        m.data[3] = Complex64::new(0.999999, 0.0);
        let e = largest_singular_value(&m, &PowerIteration { max_iterations: 2, tolerance: 1e-16, seed: 1 });
        assert!(!e.converged);
        assert_eq!(e.iterations, 2);
        assert!(e.value <= 1.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = PotentialModel::gaussian(0.2, 1.0).unwrap();
        let s = BsScheme::MonteCarlo { nodes: 40, seed: 9 };
        let a = build_bs(pt(0.3, 1.0, 1.0), &g, s, &basis()).unwrap();
        let b = build_bs(pt(0.3, 1.0, 1.0), &g, s, &basis()).unwrap();
        assert_eq!(a.matrix, b.matrix);
        let cfg = PowerIteration::default();
        assert_eq!(bs_norm_estimate(&a, &cfg), bs_norm_estimate(&b, &cfg));
    }
}
