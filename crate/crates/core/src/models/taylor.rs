//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] value is a polynomial in the four variables `(x1, x2, x3, mu)`
//! truncated at total degree [`MAX_ORDER`]. Evaluating a vector field on seeded
//! `Taylor` inputs yields its exact Taylor coefficients at the expansion point,
//! which is how the built-in models provide exact derivative jets.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Number of independent variables: three state coordinates plus the parameter.
pub const NVARS: usize = 4;
/// Highest total degree kept.
pub const MAX_ORDER: usize = 3;
/// Number of monomials of total degree at most [`MAX_ORDER`] in [`NVARS`] variables.
pub const NTERMS: usize = 35;

struct Tables {
    exps: [[u8; NVARS]; NTERMS],
    degree: [u8; NTERMS],
    // (i, j, k) triples with exps[i] + exps[j] = exps[k]
    products: Vec<(u8, u8, u8)>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps = [[0u8; NVARS]; NTERMS];
        let mut degree = [0u8; NTERMS];
        let mut n = 0;
        for d in 0..=MAX_ORDER as u8 {
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    for c in (0..=d - a - b).rev() {
                        let e = d - a - b - c;
                        exps[n] = [a, b, c, e];
                        degree[n] = d;
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(n, NTERMS);
        let mut products = Vec::new();
        for i in 0..NTERMS {
            for j in 0..NTERMS {
                if degree[i] + degree[j] > MAX_ORDER as u8 {
                    continue;
                }
                let mut sum = [0u8; NVARS];
                for v in 0..NVARS {
                    sum[v] = exps[i][v] + exps[j][v];
                }
                let k = exps.iter().position(|e| *e == sum).expect("monomial present");
                products.push((i as u8, j as u8, k as u8));
            }
        }
        Tables { exps, degree, products }
    })
}

/// Position of the monomial with the given exponents, if its degree is kept.
pub fn monomial_index(exps: [u8; NVARS]) -> Option<usize> {
    tables().exps.iter().position(|e| *e == exps)
}

/// Exponents of the `k`-th monomial.
pub fn monomial_exponents(k: usize) -> [u8; NVARS] {
    tables().exps[k]
}

/// Minimal scalar interface shared by `f64` and [`Taylor`], so that one model
/// implementation serves both plain evaluation and exact jet extraction.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(value: f64) -> Self;
    /// Value at the expansion point (the value itself for `f64`).
    fn value(&self) -> f64;

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::cst(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Scalar for f64 {
    fn cst(value: f64) -> Self {
        value
    }

    fn value(&self) -> f64 {
        *self
    }

    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

/// Truncated Taylor polynomial; `coef[k]` multiplies the `k`-th monomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    pub coef: [f64; NTERMS],
}

impl Taylor {
    pub fn constant(value: f64) -> Self {
        let mut coef = [0.0; NTERMS];
        coef[0] = value;
        Taylor { coef }
    }

    /// The variable `var` expanded about `at`.
    pub fn variable(var: usize, at: f64) -> Self {
        let mut t = Taylor::constant(at);
        let mut e = [0u8; NVARS];
        e[var] = 1;
        t.coef[monomial_index(e).unwrap()] = 1.0;
        t
    }

    /// Partial derivative at the expansion point for the multi-index `exps`.
    pub fn derivative(&self, exps: [u8; NVARS]) -> f64 {
        match monomial_index(exps) {
            Some(k) => {
                let fact: f64 = exps.iter().map(|&e| factorial(e)).product();
                self.coef[k] * fact
            }
            None => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coef.iter().all(|c| c.is_finite())
    }

    fn recip(self) -> Self {
        let a0 = self.coef[0];
        // 1/(a0 + d) = (1/a0) * sum_k (-d/a0)^k, d nilpotent of order MAX_ORDER + 1
        let mut d = self;
        d.coef[0] = 0.0;
        let q = d * Taylor::constant(-1.0 / a0);
        let mut sum = Taylor::constant(1.0);
        let mut pow = Taylor::constant(1.0);
        for _ in 0..MAX_ORDER {
            pow = pow * q;
            sum = sum + pow;
        }
        sum * Taylor::constant(1.0 / a0)
    }

    /// Total degree of the `k`-th monomial.
    pub fn degree_of(k: usize) -> usize {
        tables().degree[k] as usize
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: Taylor) -> Taylor {
        for (a, b) in self.coef.iter_mut().zip(rhs.coef.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: Taylor) -> Taylor {
        for (a, b) in self.coef.iter_mut().zip(rhs.coef.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for a in self.coef.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let mut out = [0.0; NTERMS];
        for &(i, j, k) in &tables().products {
            out[k as usize] += self.coef[i as usize] * rhs.coef[j as usize];
        }
        Taylor { coef: out }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        self * rhs.recip()
    }
}

impl Scalar for Taylor {
    fn cst(value: f64) -> Self {
        Taylor::constant(value)
    }

    fn value(&self) -> f64 {
        self.coef[0]
    }
}
