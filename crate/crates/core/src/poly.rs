//! Dense real polynomials and a simultaneous complex root finder.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real polynomial with ascending coefficients: `coeffs[i]` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Coefficients given from the highest power down.
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().rev().copied().collect())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// All complex roots. See [`roots`].
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let descending: Vec<f64> = self.coeffs.iter().rev().copied().collect();
        roots(&descending)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Determinant of a 3x3 matrix of polynomials by cofactor expansion along the first row.
pub fn det3(m: &[[Polynomial; 3]; 3]) -> Polynomial {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
    };
    let t0 = &m[0][0] * &minor(1, 2, 1, 2);
    let t1 = &m[0][1] * &minor(1, 2, 0, 2);
    let t2 = &m[0][2] * &minor(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

const MAX_ITERATIONS: usize = 500;

/// Roots of `c[0] x^n + c[1] x^(n-1) + ... + c[n]` by Aberth-Ehrlich iteration,
/// each root finished with a few Newton steps.
///
/// Leading zeros are dropped; trailing zeros give exact zero roots.
pub fn roots(descending: &[f64]) -> Result<Vec<Complex64>> {
    let start = descending
        .iter()
        .position(|&c| c != 0.0)
        .unwrap_or(descending.len());
    let mut c: Vec<f64> = descending[start..].to_vec();
    let mut zeros = 0;
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
        zeros += 1;
    }
    let mut found = vec![Complex64::new(0.0, 0.0); zeros];
    if c.len() <= 1 {
        return Ok(found);
    }
    let lead = c[0];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let n = monic.len() - 1;
    if n == 1 {
        found.push(Complex64::new(-monic[1], 0.0));
        return Ok(found);
    }

    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        let az = z.norm();
        for &a in &monic {
            dp = dp * z + p;
            p = p * z + a;
            bound = bound * az + a.abs();
        }
        (p, dp, bound)
    };

    // initial guesses on a circle whose radius matches the geometric mean root size
    let centre = -monic[1] / n as f64;
    let radius = {
        let shifted = monic[n].abs().powf(1.0 / n as f64);
        let cauchy = monic[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| a.abs().powf(1.0 / (i + 1) as f64))
            .fold(0.0, f64::max);
        if shifted > 0.0 {
            shifted.max(1e-3 * cauchy)
        } else {
            cauchy.max(1e-12)
        }
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut done = true;
        for k in 0..n {
            let (p, dp, bound) = eval(z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * bound {
                continue;
            }
            let ratio = if dp.norm() == 0.0 {
                Complex64::new(1e-8, 0.0)
            } else {
                p / dp
            };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= w;
            if w.norm() > 1e-15 * z[k].norm().max(f64::MIN_POSITIVE) {
                done = false;
            }
        }
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
        });
    }

    for root in &mut z {
        for _ in 0..3 {
            let (p, dp, _) = eval(*root);
            if dp.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            let next = *root - p / dp;
            if eval(next).0.norm() < p.norm() {
                *root = next;
            } else {
                break;
            }
        }
        // drop rounding-level imaginary parts of real roots
        let real = Complex64::new(root.re, 0.0);
        let (p_root, _, bound) = eval(*root);
        if root.im.abs() <= 1e-10 * root.norm()
            && eval(real).0.norm() <= p_root.norm().max(4.0 * f64::EPSILON * bound)
        {
            root.im = 0.0;
        }
    }
    found.extend(z);
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(found)
}
