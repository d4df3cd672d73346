//! Self-check suites run by `dirac-enclosure check`.
//!
//! Each suite draws its random inputs from a seeded ChaCha8 stream, so a
//! failing run can be reproduced exactly from the seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{DiracBasis, Matrix4C, Representation};
use crate::constants;
use crate::enclosure::f_function;
use crate::resolvent::{hs_bound, hs_closed_form, kernel, RescaledKernel, SpectralPoint};

pub const HS_SAMPLES: usize = 1000;
pub const DOMINANCE_SAMPLES: usize = 100_000;
pub const HS_REL_TOL: f64 = 1e-12;
const MAX_DETAILS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Perturb one Dirac matrix; every algebra-dependent suite must then fail.
    pub corrupt_basis: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 0x5eed, corrupt_basis: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    /// The first few failing cases, human readable.
    pub details: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, checks: 0, failures: 0, details: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

fn bases(opts: &CheckOptions) -> Vec<DiracBasis> {
    Representation::ALL
        .iter()
        .map(|&rep| {
            let b = DiracBasis::new(rep);
            if opts.corrupt_basis {
                corrupt(&b)
            } else {
                b
            }
        })
        .collect()
}

/// Adds `0.1` to one off-diagonal entry pair of `α₁`, keeping it Hermitian.
pub fn corrupt(basis: &DiracBasis) -> DiracBasis {
    let mut alpha = *basis.matrices();
    alpha[0][(0, 1)] += Complex64::new(0.1, 0.0);
    alpha[0][(1, 0)] += Complex64::new(0.1, 0.0);
    DiracBasis::from_raw(alpha, basis.representation())
}

pub fn anticommutation(opts: &CheckOptions) -> SuiteResult {
    let mut s = SuiteResult::new("anticommutation");
    for b in bases(opts) {
        let res = b.anticommutation_residual();
        s.record(res <= 1e-14, || format!("{}: anticommutator residual {res:e}", b.representation()));
        let tr = b.trace_residual();
        s.record(tr <= 1e-14, || format!("{}: trace residual {tr:e}", b.representation()));
        s.record(b.is_hermitian(), || format!("{}: not Hermitian", b.representation()));
    }
    s
}

fn random_point(rng: &mut ChaCha8Rng) -> SpectralPoint {
    loop {
        let z = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let m = rng.random_range(0.0..5.0);
        if let Ok(p) = SpectralPoint::new(z, m) {
            if p.is_resolvent_point() {
                return p;
            }
        }
    }
}

fn random_displacement(rng: &mut ChaCha8Rng, point: &SpectralPoint) -> [f64; 3] {
    // keep e^{-Re κ r} well clear of underflow
    let rmax = (50.0 / point.kappa().re.max(1e-3)).min(10.0);
    let r = (rng.random_range(1e-3f64.ln()..rmax.ln())).exp();
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|c| r * c / n);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Kernel Hilbert–Schmidt norm against the closed form, and the closed form
/// against the traceless-part route `tr(A*A) = 4(|a|² + a₄² + |a₀|²)`.
pub fn hilbert_schmidt(opts: &CheckOptions) -> SuiteResult {
    let mut s = SuiteResult::new("hilbert-schmidt");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for b in bases(opts) {
        for _ in 0..HS_SAMPLES {
            let p = random_point(&mut rng);
            let d = random_displacement(&mut rng, &p);
            let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let xp = [x[0] - d[0], x[1] - d[1], x[2] - d[2]];
            // the displacement the kernel actually sees, after rounding
            let d = [x[0] - xp[0], x[1] - xp[1], x[2] - xp[2]];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let k = match kernel(&p, x, xp, &b) {
                Ok(k) => k,
                Err(e) => {
                    s.record(false, || format!("kernel refused z={}, m={}: {e}", p.z, p.m));
                    continue;
                }
            };
            let hs2 = k.matrix.hs_norm().powi(2);
            let closed = hs_closed_form(&p, r).expect("r > 0");
            let e1 = rel(hs2, closed);
            s.record(e1 <= HS_REL_TOL, || {
                format!("{}: z={}, m={}, r={r:e}: ‖K‖²={hs2:e} vs closed form {closed:e}", b.representation(), p.z, p.m)
            });

            let resc = RescaledKernel::new(&p, d).expect("r > 0");
            let a2: f64 = resc.a.iter().map(|c| c.norm_sqr()).sum();
            let trace_route = 4.0 * (a2 + resc.a4 * resc.a4 + resc.a0.norm_sqr()) * resc.prefactor().norm_sqr();
            let tl: Matrix4C = resc.traceless_part(&b);
            let e2 = rel(trace_route, closed);
            let e3 = tl.trace().norm() / (a2 + resc.a4 * resc.a4 + resc.a0.norm_sqr());
            s.record(e2 <= HS_REL_TOL && e3 <= HS_REL_TOL, || {
                format!("{}: z={}, m={}, r={r:e}: trace route {trace_route:e}, tr B = {e3:e}", b.representation(), p.z, p.m)
            });
        }
    }
    s
}

/// The closed form never exceeds the pointwise bound.
pub fn dominance(opts: &CheckOptions) -> SuiteResult {
    let mut s = SuiteResult::new("dominance");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xd0);
    for k in 0..DOMINANCE_SAMPLES {
        // every fourth sample sits on the essential spectrum, z real with |z| ≥ m
        let p = if k % 4 == 3 {
            let m = rng.random_range(0.0..5.0);
            let x = rng.random_range(m..m + 10.0);
            let x = if rng.random_bool(0.5) { x } else { -x };
            SpectralPoint::new(Complex64::new(x, 0.0), m).expect("finite")
        } else {
            random_point(&mut rng)
        };
        let r = rng.random_range(-4.0f64..2.0).exp();
        let closed = hs_closed_form(&p, r).expect("r > 0");
        let bound = hs_bound(&p, r).expect("r > 0");
        s.record(closed <= bound * (1.0 + 1e-12), || format!("z={}, m={}, r={r:e}: {closed:e} > {bound:e}", p.z, p.m));
    }
    s
}

pub fn constants_table(_opts: &CheckOptions) -> SuiteResult {
    let mut s = SuiteResult::new("constants");
    for (name, literal, runtime) in constants::table() {
        let e = rel(literal, runtime);
        s.record(e <= 1e-12, || format!("{name}: literal {literal} vs computed {runtime} (rel {e:e})"));
    }
    s
}

/// `f` is invariant under conjugation and negation, and equals `|λ|/|Im λ|` at `m = 0`.
pub fn symmetry(opts: &CheckOptions) -> SuiteResult {
    let mut s = SuiteResult::new("symmetry");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5f);
    for _ in 0..HS_SAMPLES {
        let l = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let m = rng.random_range(0.0..5.0);
        let f = f_function(l, m);
        let fc = f_function(l.conj(), m);
        let fn_ = f_function(-l, m);
        s.record(f == fc && f == fn_, || format!("λ={l}, m={m}: f={f}, f(conj)={fc}, f(-λ)={fn_}"));
        let f0 = f_function(l, 0.0);
        let expect = l.norm() / l.im.abs();
        let e = rel(f0, expect);
        s.record(e <= 1e-12, || format!("λ={l}, m=0: f={f0} vs |λ|/|Im λ|={expect}"));
    }
    s
}

/// All suites in a fixed order.
pub fn run_all(opts: &CheckOptions) -> Vec<SuiteResult> {
    vec![anticommutation(opts), hilbert_schmidt(opts), dominance(opts), constants_table(opts), symmetry(opts)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_suites_pass() {
        let o = CheckOptions::default();
        for s in [anticommutation(&o), constants_table(&o), symmetry(&o)] {
            assert!(s.passed(), "{s:?}");
        }
    }

    #[test]
    fn hs_suite_passes() {
        let s = hilbert_schmidt(&CheckOptions::default());
        assert_eq!(s.checks, 2 * 2 * HS_SAMPLES);
        assert!(s.passed(), "{} failures: {:?}", s.failures, s.details);
    }

    #[test]
    fn corruption_is_detected() {
        let o = CheckOptions { corrupt_basis: true, ..Default::default() };
        assert!(!anticommutation(&o).passed());
        let hs = hilbert_schmidt(&o);
        assert!(!hs.passed());
        assert!(hs.details.len() <= MAX_DETAILS);
    }
}
