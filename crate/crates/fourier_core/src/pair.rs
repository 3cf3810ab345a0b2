use crate::scalar::Real;
use num_complex::Complex;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair<T: Real> {
    pub first: Complex<T>,
    pub second: Complex<T>,
}

impl<T: Real> ComplexPair<T> {
    pub fn new(first: Complex<T>, second: Complex<T>) -> Self {
        Self { first, second }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z)
    }

    /// `(x, y) -> (conj y, -conj x)`. Twice gives `-id`.
    pub fn spouse(&self) -> Self {
        Self::new(self.second.conj(), -self.first.conj())
    }

    /// Hermitian pairing `x1 conj(y1) + x2 conj(y2)`.
    pub fn herm(&self, other: &Self) -> Complex<T> {
        self.first * other.first.conj() + self.second * other.second.conj()
    }

    pub fn norm(&self) -> T {
        (self.first.norm_sqr() + self.second.norm_sqr()).sqrt()
    }

    /// `det` of the 2x2 matrix with rows `self` and `other`.
    pub fn det(&self, other: &Self) -> Complex<T> {
        self.first * other.second - self.second * other.first
    }

    pub fn conj(&self) -> Self {
        Self::new(self.first.conj(), self.second.conj())
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self::new(self.first * a, self.second * a)
    }
}

impl<T: Real> Add for ComplexPair<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.first + o.first, self.second + o.second)
    }
}

impl<T: Real> Sub for ComplexPair<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.first - o.first, self.second - o.second)
    }
}

impl<T: Real> Neg for ComplexPair<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.first, -self.second)
    }
}

impl<T: Real> Mul<Complex<T>> for ComplexPair<T> {
    type Output = Self;
    fn mul(self, a: Complex<T>) -> Self {
        self.scale(a)
    }
}

/// Ordered tuple `(a_1, ..., a_p)` of pairs, `p >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTuple<T: Real> {
    entries: Vec<ComplexPair<T>>,
}

impl<T: Real> PairTuple<T> {
    pub fn new(entries: Vec<ComplexPair<T>>) -> Option<Self> {
        if entries.is_empty() {
            None
        } else {
            Some(Self { entries })
        }
    }

    pub fn entries(&self) -> &[ComplexPair<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based access matching the usual `a_1 .. a_p` labels.
    pub fn get(&self, i: usize) -> ComplexPair<T> {
        self.entries[i - 1]
    }

    pub fn first(&self) -> ComplexPair<T> {
        self.entries[0]
    }

    pub fn last(&self) -> ComplexPair<T> {
        self.entries[self.entries.len() - 1]
    }

    /// `(a_1, ..., a_p) -> (spouse a_p, ..., spouse a_1)`.
    pub fn spouse(&self) -> Self {
        Self {
            entries: self.entries.iter().rev().map(|a| a.spouse()).collect(),
        }
    }

    pub fn norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |s, a| s + a.norm() * a.norm())
            .sqrt()
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.entries.iter().all(|a| a.norm() <= tol)
    }
}

/// Finitely supported pair sequence indexed by integers.
pub type IndexedPairs<T> = BTreeMap<i64, ComplexPair<T>>;

/// `<<U, W>>_n = sum_i <u_i, w_{n-i}>`.
pub fn double_bracket<T: Real>(u: &IndexedPairs<T>, w: &IndexedPairs<T>, n: i64) -> Complex<T> {
    u.iter()
        .filter_map(|(i, ui)| w.get(&(n - i)).map(|wj| ui.herm(wj)))
        .fold(Complex::new(T::zero(), T::zero()), |s, x| s + x)
}
