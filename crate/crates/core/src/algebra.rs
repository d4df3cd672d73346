//! Dense 4×4 complex matrices and the Dirac matrices.
//!
//! The Dirac matrices `α₁, α₂, α₃, α₄` are Hermitian and satisfy
//! `αμ αν + αν αμ = 2 δμν I`. Two representations are built in; every
//! quantity computed downstream depends only on the anticommutation rules, so
//! results must agree between them.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix4C(pub [[Complex64; 4]; 4]);

impl Default for Matrix4C {
    fn default() -> Self {
        Self::zero()
    }
}

impl Matrix4C {
    pub const fn zero() -> Self {
        Matrix4C([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; 4])
    }

    pub fn diagonal(d: [Complex64; 4]) -> Self {
        let mut m = Self::zero();
        for (k, v) in d.into_iter().enumerate() {
            m.0[k][k] = v;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Self::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(v, 0.0);
            }
        }
        m
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// Hilbert–Schmidt (Frobenius) norm `sqrt(tr(M*M))`.
    pub fn hs_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm (largest singular value).
    ///
    /// Power iteration on the Hermitian matrix `G = M*M`, accelerated by
    /// repeated squaring: after `k` squarings the columns of `G^(2^k)` are the
    /// iterates of `2^k` power steps started from the basis vectors. The
    /// Rayleigh quotient of `G` over those columns is monotone in `k` and is
    /// stopped once it changes by less than `1e-14` relatively. Starting from
    /// every basis vector guarantees one start is not orthogonal to the
    /// dominant eigenvector.
    pub fn operator_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        let scale = g.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return scale.sqrt();
        }
        let g = g.scale_real(1.0 / scale);

        let mut power = g;
        let mut best = rayleigh_over_columns(&g, &power);
        for _ in 0..64 {
            power = power * power;
            let norm = power.max_abs();
            if norm == 0.0 {
                break;
            }
            power = power.scale_real(1.0 / norm);
            let next = rayleigh_over_columns(&g, &power).max(best);
            let converged = (next - best).abs() <= 1e-14 * next;
            best = next;
            if converged {
                break;
            }
        }
        (best * scale).sqrt()
    }
}

fn rayleigh_over_columns(g: &Matrix4C, p: &Matrix4C) -> f64 {
    let mut best = 0.0f64;
    for j in 0..4 {
        let col = [p.0[0][j], p.0[1][j], p.0[2][j], p.0[3][j]];
        let nn: f64 = col.iter().map(|v| v.norm_sqr()).sum();
        if nn == 0.0 {
            continue;
        }
        let gv = g.mul_vec(&col);
        let num: Complex64 = col.iter().zip(&gv).map(|(a, b)| a.conj() * b).sum();
        best = best.max(num.re / nn);
    }
    best
}

impl Index<(usize, usize)> for Matrix4C {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix4C {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Matrix4C {
    type Output = Matrix4C;
    fn add(mut self, rhs: Matrix4C) -> Matrix4C {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for Matrix4C {
    type Output = Matrix4C;
    fn sub(mut self, rhs: Matrix4C) -> Matrix4C {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for Matrix4C {
    type Output = Matrix4C;
    fn neg(self) -> Matrix4C {
        self.scale_real(-1.0)
    }
}

impl Mul for Matrix4C {
    type Output = Matrix4C;
    fn mul(self, rhs: Matrix4C) -> Matrix4C {
        let mut out = Matrix4C::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl Mul<Complex64> for Matrix4C {
    type Output = Matrix4C;
    fn mul(self, rhs: Complex64) -> Matrix4C {
        self.scale(rhs)
    }
}

/// Built-in representations of the Dirac matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Dirac–Pauli: `α₄ = diag(1, 1, -1, -1)`, `αk = [[0, σk], [σk, 0]]`.
    Standard,
    /// Chiral: `α₄ = [[0, I], [I, 0]]`, `αk = [[-σk, 0], [0, σk]]`.
    Weyl,
}

impl Representation {
    pub const ALL: [Representation; 2] = [Representation::Standard, Representation::Weyl];

    pub fn tag(&self) -> &'static str {
        match self {
            Representation::Standard => "standard",
            Representation::Weyl => "weyl",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "dirac" | "dirac-pauli" => Ok(Representation::Standard),
            "weyl" | "chiral" => Ok(Representation::Weyl),
            other => Err(Error::Config(format!("unknown Dirac representation `{other}`"))),
        }
    }
}

/// The four Dirac matrices `(α₁, α₂, α₃, α₄)` in a fixed representation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracBasis {
    alpha: [Matrix4C; 4],
    representation: Representation,
}

fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

fn blocks(tl: [[Complex64; 2]; 2], tr: [[Complex64; 2]; 2], bl: [[Complex64; 2]; 2], br: [[Complex64; 2]; 2]) -> Matrix4C {
    let mut m = Matrix4C::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = tl[i][j];
            m.0[i][j + 2] = tr[i][j];
            m.0[i + 2][j] = bl[i][j];
            m.0[i + 2][j + 2] = br[i][j];
        }
    }
    m
}

impl DiracBasis {
    pub fn new(representation: Representation) -> Self {
        let zero2 = [[ZERO; 2]; 2];
        let id2 = [[ONE, ZERO], [ZERO, ONE]];
        let neg = |s: [[Complex64; 2]; 2]| s.map(|row| row.map(|v| -v));
        let sigma = pauli();
        let alpha = match representation {
            Representation::Standard => [
                blocks(zero2, sigma[0], sigma[0], zero2),
                blocks(zero2, sigma[1], sigma[1], zero2),
                blocks(zero2, sigma[2], sigma[2], zero2),
                blocks(id2, zero2, zero2, neg(id2)),
            ],
            Representation::Weyl => [
                blocks(neg(sigma[0]), zero2, zero2, sigma[0]),
                blocks(neg(sigma[1]), zero2, zero2, sigma[1]),
                blocks(neg(sigma[2]), zero2, zero2, sigma[2]),
                blocks(zero2, id2, id2, zero2),
            ],
        };
        DiracBasis { alpha, representation }
    }

    /// Wraps arbitrary matrices without checking the anticommutation rules.
    /// Used by the self-check suites to run negative controls.
    pub fn from_raw(alpha: [Matrix4C; 4], representation: Representation) -> Self {
        DiracBasis { alpha, representation }
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// `αμ` for `μ ∈ {1, 2, 3, 4}`.
    ///
    /// # Panics
    /// If `mu` is outside `1..=4`.
    pub fn alpha(&self, mu: usize) -> &Matrix4C {
        assert!((1..=4).contains(&mu), "Dirac matrix index {mu} out of range 1..=4");
        &self.alpha[mu - 1]
    }

    pub fn matrices(&self) -> &[Matrix4C; 4] {
        &self.alpha
    }

    /// `α·v = α₁v₁ + α₂v₂ + α₃v₃` for a complex 3-vector.
    pub fn dot(&self, v: [Complex64; 3]) -> Matrix4C {
        let mut m = Matrix4C::zero();
        for (k, c) in v.into_iter().enumerate() {
            m = m + self.alpha[k].scale(c);
        }
        m
    }

    /// Largest entry modulus of `αμαν + αναμ - 2δμν I` over all pairs.
    pub fn anticommutation_residual(&self) -> f64 {
        let id = Matrix4C::identity();
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let a = self.alpha[mu];
                let b = self.alpha[nu];
                let mut r = a * b + b * a;
                if mu == nu {
                    r = r - id.scale_real(2.0);
                }
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }

    /// Largest modulus among `tr(αμ)` and `tr(α₄αk)`.
    pub fn trace_residual(&self) -> f64 {
        let singles = self.alpha.iter().map(|a| a.trace().norm());
        let mixed = (0..3).map(|k| (self.alpha[3] * self.alpha[k]).trace().norm());
        singles.chain(mixed).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.alpha.iter().all(Matrix4C::is_hermitian)
    }
}

/// Builds the Dirac matrices for a representation tag (`standard` or `weyl`).
pub fn dirac_basis(tag: &str) -> Result<DiracBasis> {
    Ok(DiracBasis::new(tag.parse()?))
}
