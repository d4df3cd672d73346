//! Exclusion criteria for eigenvalues of `H_V`.
//!
//! A point `λ` is certified eigenvalue-free when either
//!
//! * `C f(λ, m) ‖|V|‖_{L³} < 1`, or
//! * `C ‖|V|‖_{L³} + C' |Re λ| ‖|V|‖_{L^{3/2}} < 1`,
//!
//! with `f(λ, m) = sqrt(1 + (Re λ)² / (Re sqrt(m² - λ²))²)`. Both inequalities
//! are strict; a left-hand side of exactly 1 is not certified.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{C_PRIME, C_THM1};
use crate::error::{Error, Result};
use crate::resolvent::principal_sqrt;

/// The weight `f(λ, m)`.
///
/// Infinite exactly on `(-∞, -m] ∪ [m, ∞)` (except at `λ = 0 = m`); equal
/// to 1 on the imaginary axis, including the `0/0` point `λ = 0, m = 0`.
pub fn f_function(lambda: Complex64, m: f64) -> f64 {
    let x = lambda.re;
    if x == 0.0 {
        return 1.0;
    }
    let y = lambda.im;
    let k = principal_sqrt(Complex64::new(m * m - (x * x - y * y), -2.0 * x * y)).re;
    if k == 0.0 {
        return f64::INFINITY;
    }
    1f64.hypot(x / k)
}

/// Outcome of one criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub lhs: f64,
    pub certified: bool,
}

impl Verdict {
    fn from_lhs(lhs: f64) -> Self {
        Verdict { lhs, certified: lhs < 1.0 }
    }
}

fn check_norm(n: f64) {
    debug_assert!(n >= 0.0, "Lebesgue norms are nonnegative, got {n}");
}

/// `C f(λ, m) ‖|V|‖_{L³} < 1`.
pub fn certify_thm1(lambda: Complex64, m: f64, norm3: f64) -> Verdict {
    check_norm(norm3);
    let f = f_function(lambda, m);
    let lhs = if f.is_infinite() || norm3.is_infinite() { f64::INFINITY } else { C_THM1 * f * norm3 };
    Verdict::from_lhs(lhs)
}

/// `C ‖|V|‖_{L³} + C' |Re λ| ‖|V|‖_{L^{3/2}} < 1`; independent of the mass.
pub fn certify_thm2(lambda: Complex64, norm3: f64, norm32: f64) -> Verdict {
    check_norm(norm3);
    check_norm(norm32);
    let re = lambda.re.abs();
    let second = if re == 0.0 { 0.0 } else { C_PRIME * re * norm32 };
    Verdict::from_lhs(C_THM1 * norm3 + second)
}

/// Per-point certification record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnclosureReport {
    pub lambda: Complex64,
    pub m: f64,
    pub f_value: f64,
    pub thm1_lhs: f64,
    pub thm1_certified: bool,
    /// Absent when no L^{3/2} norm is available.
    pub thm2_lhs: Option<f64>,
    pub thm2_certified: Option<bool>,
    pub certified: bool,
}

impl EnclosureReport {
    /// Human-readable explanations of the verdicts.
    pub fn reasons(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.f_value.is_infinite() {
            out.push("f infinite on essential spectrum".to_string());
        }
        if self.thm1_certified {
            out.push(format!("first criterion holds: {} < 1", self.thm1_lhs));
        } else if self.f_value.is_finite() {
            out.push(format!("first criterion fails: {} >= 1", self.thm1_lhs));
        }
        match (self.thm2_lhs, self.thm2_certified) {
            (Some(lhs), Some(true)) => out.push(format!("mass-independent criterion holds: {lhs} < 1")),
            (Some(lhs), _) => out.push(format!("mass-independent criterion fails: {lhs} >= 1")),
            (None, _) => out.push("mass-independent criterion not evaluated (no L^{3/2} norm)".to_string()),
        }
        out
    }
}

/// Evaluates both criteria at `λ`; the verdict is their union.
pub fn certify(lambda: Complex64, m: f64, norm3: f64, norm32: Option<f64>) -> EnclosureReport {
    let t1 = certify_thm1(lambda, m, norm3);
    let t2 = norm32.map(|n| certify_thm2(lambda, norm3, n));
    EnclosureReport {
        lambda,
        m,
        f_value: f_function(lambda, m),
        thm1_lhs: t1.lhs,
        thm1_certified: t1.certified,
        thm2_lhs: t2.map(|v| v.lhs),
        thm2_certified: t2.map(|v| v.certified),
        certified: t1.certified || t2.is_some_and(|v| v.certified),
    }
}

/// Evenly spaced axis `min, …, max` with `count ≥ 2` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || !(min < max) {
            return Err(Error::Config(format!("axis range must satisfy min < max, got [{min}, {max}]")));
        }
        if count < 2 {
            return Err(Error::Config(format!("axis needs at least 2 samples, got {count}")));
        }
        Ok(GridAxis { min, max, count })
    }

    /// `i`-th sample, computed as a weighted mean of the endpoints so that
    /// symmetric ranges give exactly symmetric samples (and exact zeros).
    pub fn value(&self, i: usize) -> f64 {
        let n = (self.count - 1) as f64;
        let i = i as f64;
        (self.min * (n - i) + self.max * i) / n
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

/// A rectangle `[re_min, re_max] × [im_min, im_max]` of spectral points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub re: GridAxis,
    pub im: GridAxis,
}

impl GridSpec {
    /// Parses `REMIN,REMAX,NRE,IMMIN,IMMAX,NIM`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(Error::Config(format!("grid spec needs 6 comma-separated fields, got `{s}`")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|e| Error::Config(format!("bad grid bound `{t}`: {e}")));
        let cnt = |t: &str| t.parse::<usize>().map_err(|e| Error::Config(format!("bad grid count `{t}`: {e}")));
        Ok(GridSpec {
            re: GridAxis::new(num(parts[0])?, num(parts[1])?, cnt(parts[2])?)?,
            im: GridAxis::new(num(parts[3])?, num(parts[4])?, cnt(parts[5])?)?,
        })
    }

    pub fn len(&self) -> usize {
        self.re.count * self.im.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point of cell `(i, j)`: `re_i + i im_j`.
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re.value(i), self.im.value(j))
    }

    /// Row-major index of cell `(i, j)`; the imaginary part is the outer loop.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.re.count + i
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.re.min, self.re.max, self.re.count, self.im.min, self.im.max, self.im.count
        )
    }
}

/// Certification verdicts over a rectangular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub spec: GridSpec,
    pub m: f64,
    pub norm3: f64,
    pub norm32: Option<f64>,
    /// Row-major: cell `(i, j)` is at `spec.index(i, j)`.
    pub cells: Vec<EnclosureReport>,
}

impl RegionGrid {
    pub fn cell(&self, i: usize, j: usize) -> &EnclosureReport {
        &self.cells[self.spec.index(i, j)]
    }
}

fn check_inputs(m: f64, norm3: f64, norm32: Option<f64>) -> Result<()> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::Config(format!("mass must be finite and nonnegative, got {m}")));
    }
    for n in std::iter::once(norm3).chain(norm32) {
        if !(n >= 0.0) {
            return Err(Error::Config(format!("norms must be nonnegative, got {n}")));
        }
    }
    Ok(())
}

/// Fills every cell of the grid. Cells are independent and evaluated in
/// parallel; the output does not depend on the schedule.
pub fn raster(spec: &GridSpec, m: f64, norm3: f64, norm32: Option<f64>) -> Result<RegionGrid> {
    GridAxis::new(spec.re.min, spec.re.max, spec.re.count)?;
    GridAxis::new(spec.im.min, spec.im.max, spec.im.count)?;
    check_inputs(m, norm3, norm32)?;
    let cells = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % spec.re.count, idx / spec.re.count);
            certify(spec.point(i, j), m, norm3, norm32)
        })
        .collect();
    Ok(RegionGrid { spec: *spec, m, norm3, norm32, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_function(c(0.0, 2.0), 1.0), 1.0);
        assert_eq!(f_function(c(0.0, 0.0), 0.0), 1.0);
        assert_eq!(f_function(c(1.0, 0.0), 1.0), f64::INFINITY);
        assert_eq!(f_function(c(-3.0, 0.0), 1.0), f64::INFINITY);
        assert!(f_function(c(0.5, 0.0), 1.0).is_finite());
        let l = c(3.0, -4.0);
        assert!((f_function(l, 0.0) - 5.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn f_stays_finite_near_real_rays() {
        for im in [1e-3, 1e-8, 1e-12] {
            let f = f_function(c(6.0, im), 5.0);
            assert!(f.is_finite() && f > 1.0 / im, "im = {im}: {f}");
        }
    }

    #[test]
    fn thm1_examples() {
        let v = certify_thm1(c(0.0, 2.0), 1.0, 0.5);
        assert!((v.lhs - C_THM1 * 0.5).abs() < 1e-15);
        assert!((v.lhs - 0.744).abs() < 1e-3);
        assert!(v.certified);
        assert!(!certify_thm1(c(1.0, 0.0), 1.0, 0.0).certified);
        assert!(certify_thm1(c(7.0, 0.1), 1.0, 0.0).certified);
        assert!(!certify_thm1(c(0.0, 1.0), 1.0, f64::INFINITY).certified);
    }

    #[test]
    fn thm2_examples() {
        let n3 = 0.5;
        let n32 = 0.2;
        let edge = (1.0 - C_THM1 * n3) / (C_PRIME * n32);
        assert!((edge - 1.155701129344671).abs() < 1e-12);
        assert!(certify_thm2(c(1.15, 3.0), n3, n32).certified);
        assert!(certify_thm2(c(-1.15, -3.0), n3, n32).certified);
        assert!(!certify_thm2(c(1.16, 3.0), n3, n32).certified);
        // imaginary axis: only the first term matters
        assert!(certify_thm2(c(0.0, 100.0), 0.6, f64::INFINITY).certified);
        assert!(!certify_thm2(c(0.0, 1.0), 1.0 / C_THM1, 0.0).certified);
    }

    #[test]
    fn boundary_is_not_certified() {
        assert!(!Verdict::from_lhs(1.0).certified);
        assert!(Verdict::from_lhs(1.0 - f64::EPSILON).certified);
    }

    #[test]
    fn report_union_and_reasons() {
        let r = certify(c(1.0, 0.0), 1.0, 0.1, Some(0.1));
        assert!(!r.thm1_certified);
        assert_eq!(r.thm2_certified, Some(true));
        assert!(r.certified);
        assert!(r.reasons().iter().any(|s| s.contains("f infinite on essential spectrum")));
        let r = certify(c(1.0, 0.0), 1.0, 0.1, None);
        assert!(!r.certified);
        assert_eq!(r.thm2_lhs, None);
    }

    #[test]
    fn axis_values_are_symmetric() {
        let a = GridAxis::new(-10.0, 10.0, 201).unwrap();
        assert_eq!(a.value(100), 0.0);
        assert_eq!(a.value(150), 5.0);
        assert_eq!(a.value(200), 10.0);
        for i in 0..201 {
            assert_eq!(a.value(i), -a.value(200 - i));
        }
    }

    #[test]
    fn grid_spec_errors() {
        assert!(GridSpec::parse("-1,1,3,-1,1,3").is_ok());
        assert!(GridSpec::parse("-1,1,1,-1,1,3").is_err());
        assert!(GridSpec::parse("1,-1,3,-1,1,3").is_err());
        assert!(GridSpec::parse("-1,1,3,-1,1").is_err());
        assert!(GridSpec::parse("a,1,3,-1,1,3").is_err());
        assert!(GridSpec::parse("-1,1,3.5,-1,1,3").is_err());
    }

    #[test]
    fn raster_layout() {
        let spec = GridSpec::parse("-2,2,5,-1,1,3").unwrap();
        let g = raster(&spec, 1.0, 0.2, None).unwrap();
        assert_eq!(g.cells.len(), 15);
        assert_eq!(g.cells[0].lambda, c(-2.0, -1.0));
        assert_eq!(g.cells[1].lambda, c(-1.0, -1.0));
        assert_eq!(g.cells[5].lambda, c(-2.0, 0.0));
        assert_eq!(g.cell(2, 1).f_value, 1.0);
        assert!(g.cells.iter().all(|r| r.thm2_lhs.is_none()));
        assert!(raster(&spec, -1.0, 0.2, None).is_err());
        assert!(raster(&spec, 1.0, -0.2, None).is_err());
    }
}
