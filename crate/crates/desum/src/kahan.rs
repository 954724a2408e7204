//! Compensated (Kahan–Babuška–Neumaier) summation.
//!
//! The mean scans accumulate ~p^2 terms whose total reaches ~3·10^13 at
//! p = 499; plain doubles already carry enough precision there, but the
//! compensated path keeps the error budget documented and future-proofs
//! larger moduli. Every accumulation below is sequential in a fixed order, so
//! results are bit-reproducible regardless of worker count.

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
