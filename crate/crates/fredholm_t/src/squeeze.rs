//! Elimination on pair tuples until the frontier 2x2 system is invertible.
//!
//! Convention: for a tuple `E = (e_1, .., e_p)` and a pair sequence `V`,
//! `bracket(E, V, m) = sum_i e_i . v_{m+i}` (bilinear, i.e. `<e_i, conj v_{m+i}>`).
//! The last entry meets the newest unknown `v_{m+p}`.

use crate::FredholmError;
use fourier_core::{c64, IndexedPairs, Pair, Tuple, C64};

fn dot(a: &Pair, v: &Pair) -> C64 {
    a.first * v.first + a.second * v.second
}

/// `sum_i e_i . v_{m+i}`.
pub fn bracket(e: &Tuple, v: &IndexedPairs<f64>, m: i64) -> C64 {
    e.entries()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| v.get(&(m + i as i64 + 1)).map(|x| dot(a, x)))
        .fold(c64(0.0, 0.0), |s, z| s + z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Right-hand side of the `A` equations.
    A,
    /// Right-hand side of the `A-hat` equations.
    Hat,
}

/// `m -> sum coeff * X_side(m + shift)`: how a squeezed equation's right-hand side is
/// assembled from the original ones.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub terms: Vec<(usize, Side, C64)>,
}

impl LinearForm {
    fn unit(side: Side) -> Self {
        Self {
            terms: vec![(0, side, c64(1.0, 0.0))],
        }
    }

    fn shifted(&self, by: usize) -> Self {
        Self {
            terms: self.terms.iter().map(|&(s, side, c)| (s + by, side, c)).collect(),
        }
    }

    fn scaled(&self, a: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(s, side, c)| (s, side, c * a)).collect(),
        }
    }

    fn plus(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&o.terms);
        Self { terms }
    }

    pub fn eval(&self, m: i64, x: impl Fn(Side, i64) -> C64) -> C64 {
        self.terms
            .iter()
            .fold(c64(0.0, 0.0), |acc, &(s, side, c)| acc + c * x(side, m + s as i64))
    }

    pub fn max_shift(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SqueezeStep {
    /// `alpha a_q = spouse(a_1)`; replace by `A-hat - alpha A`, shifted.
    Eliminate(C64),
    /// Last entry was zero; drop it.
    Drop,
}

/// Result of `squeeze`. `b` and `b_star` are padded with leading zeros to the input length.
#[derive(Clone, Debug, PartialEq)]
pub struct Squeezed {
    pub b: Tuple,
    pub b_star: Tuple,
    /// Number of nonzero trailing entries `q`.
    pub q: usize,
    pub steps: Vec<SqueezeStep>,
    /// `bracket(b, V, m) = rhs_b(m)` given `bracket(A, V, m) = X_A(m)`, `bracket(A-hat, V, m) = X_Hat(m)`.
    pub rhs_b: LinearForm,
    pub rhs_b_star: LinearForm,
    pub det: C64,
    /// `||A||^2`, the scale for determinant thresholds.
    pub scale: f64,
}

/// Relative determinant threshold for the frontier.
pub const DET_TOL: f64 = 1e-10;

fn pad(e: &[Pair], p: usize) -> Tuple {
    let mut out = vec![Pair::zero(); p - e.len()];
    out.extend_from_slice(e);
    Tuple::new(out).expect("p >= 1")
}

fn spouse_of(e: &[Pair]) -> Vec<Pair> {
    e.iter().rev().map(|a| a.spouse()).collect()
}

/// Squeeze `A` until `det(b_q; spouse(b_1))` is nonzero (relative to `||A||^2`).
pub fn squeeze(a: &Tuple) -> Result<Squeezed, FredholmError> {
    let p = a.len();
    let scale = a.norm().powi(2);
    if scale == 0.0 || !scale.is_finite() {
        return Err(FredholmError::ZeroTuple);
    }
    let tiny = 1e-13 * scale.sqrt();
    let mut e: Vec<Pair> = a.entries().to_vec();
    let (mut f, mut g) = (LinearForm::unit(Side::A), LinearForm::unit(Side::Hat));
    let mut steps = Vec::new();
    loop {
        if e.is_empty() || e.iter().all(|x| x.norm() <= tiny) {
            return Err(FredholmError::Exhausted);
        }
        let last = *e.last().unwrap();
        let hat1 = e[0].spouse();
        let det = last.det(&hat1);
        if det.norm() >= DET_TOL * scale {
            return Ok(Squeezed {
                b: pad(&e, p),
                b_star: pad(&spouse_of(&e), p),
                q: e.len(),
                steps,
                rhs_b: f,
                rhs_b_star: g,
                det,
                scale,
            });
        }
        if last.norm() <= tiny {
            e.pop();
            f = f.shifted(1);
            steps.push(SqueezeStep::Drop);
            continue;
        }
        let alpha = hat1.herm(&last) / last.norm().powi(2);
        let hat = spouse_of(&e);
        let q = e.len();
        let next: Vec<Pair> = (0..q - 1).map(|j| hat[j] - e[j] * alpha).collect();
        let nf = g.shifted(1).plus(&f.shifted(1).scaled(-alpha));
        let ng = f.plus(&g.scaled(alpha.conj())).scaled(c64(-1.0, 0.0));
        e = next;
        f = nf;
        g = ng;
        steps.push(SqueezeStep::Eliminate(alpha));
    }
}
