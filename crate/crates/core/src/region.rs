//! Axis-aligned boxes in R^n (joint-limit boxes, clamp regions, sampling regions).

use rand::Rng;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Real> BoxRegion<T> {
    /// Returns `None` unless both corners have equal length and `lo < hi` componentwise.
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Option<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return None;
        }
        Some(Self { lo, hi })
    }

    /// The cube `[-half, half]^n`.
    pub fn cube(dim: usize, half: T) -> Self {
        Self::new(vec![-half; dim], vec![half; dim]).expect("positive half width")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    /// Closed containment.
    pub fn contains(&self, q: &[T]) -> bool {
        q.len() == self.lo.len()
            && q.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&l, &h))| x >= l && x <= h)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| l + (h - l) * T::lit(rng.gen::<f64>()))
            .collect()
    }
}
