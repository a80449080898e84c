use crate::error::{Error, Result};
use crate::numerics::ParamStore;
use crate::scalar::Scalar;

/// Exponential moving average of a parameter store.
#[derive(Clone, Debug, PartialEq)]
pub struct EmaShadow<T> {
    shadow: ParamStore<T>,
    momentum: T,
}

impl<T: Scalar> EmaShadow<T> {
    pub fn new(live: &ParamStore<T>, momentum: T) -> Result<Self> {
        if !(momentum >= T::zero() && momentum <= T::one()) {
            return Err(Error::invalid("ema momentum must lie in [0, 1]"));
        }
        Ok(Self {
            shadow: live.clone(),
            momentum,
        })
    }

    pub fn momentum(&self) -> T {
        self.momentum
    }

    pub fn params(&self) -> &ParamStore<T> {
        &self.shadow
    }

    /// `shadow <- m shadow + (1 - m) live`.
    pub fn update(&mut self, live: &ParamStore<T>) -> Result<()> {
        self.shadow.check_layout(live)?;
        let m = self.momentum;
        let one_m = T::one() - m;
        for (s, l) in self.shadow.values_mut().iter_mut().zip(live.values()) {
            for (a, &b) in s.data_mut().iter_mut().zip(l.data()) {
                *a = m * *a + one_m * b;
            }
        }
        Ok(())
    }
}

pub fn ema_update<T: Scalar>(shadow: &mut EmaShadow<T>, live: &ParamStore<T>) -> Result<()> {
    shadow.update(live)
}
