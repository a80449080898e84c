use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Capacity used when none is configured.
pub const DEFAULT_BANK_CAPACITY: usize = 2560;

/// First-in-first-out store of representation vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryBank<T> {
    capacity: usize,
    dim: usize,
    buffer: VecDeque<Vec<T>>,
}

impl<T: Scalar> MemoryBank<T> {
    pub fn new(capacity: usize, dim: usize) -> Result<Self> {
        if capacity == 0 || dim == 0 {
            return Err(Error::invalid("memory bank needs nonzero capacity and dimension"));
        }
        Ok(Self {
            capacity,
            dim,
            buffer: VecDeque::with_capacity(capacity.min(4096)),
        })
    }

    /// Bank seeded with a single zero vector.
    pub fn zero_initialized(capacity: usize, dim: usize) -> Result<Self> {
        let mut bank = Self::new(capacity, dim)?;
        bank.buffer.push_back(vec![T::zero(); dim]);
        Ok(bank)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.buffer.iter().map(Vec::as_slice)
    }

    pub fn clear(&mut self) {
        self.buffer.clear();
    }

    /// Appends every row of `vectors`, evicting the oldest entries beyond
    /// capacity.
    pub fn push(&mut self, vectors: &Tensor2<T>) -> Result<()> {
        if vectors.cols() != self.dim {
            return Err(Error::shape(
                "bank_push",
                format!("vector dim {} vs bank dim {}", vectors.cols(), self.dim),
            ));
        }
        for r in vectors.iter_rows() {
            self.push_one(r.to_vec());
        }
        Ok(())
    }

    pub fn push_one(&mut self, v: Vec<T>) {
        debug_assert_eq!(v.len(), self.dim);
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(v);
    }

    /// Elementwise mean of the stored vectors.
    pub fn finalize(&self) -> Result<Vec<T>> {
        if self.buffer.is_empty() {
            return Err(Error::Empty("bank_finalize on empty bank"));
        }
        let mut acc = vec![T::zero(); self.dim];
        for v in &self.buffer {
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = *a + x;
            }
        }
        let n = T::from_usize_lossy(self.buffer.len());
        Ok(acc.into_iter().map(|a| a / n).collect())
    }
}
