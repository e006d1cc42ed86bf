use crate::error::{Error, Result};

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Welford accumulator for mean and standard error of the mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Merge two accumulators (parallel reduction); order-sensitive only at
    /// rounding level.
    pub fn merge(mut self, other: Self) -> Self {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let nf = n as f64;
        self.mean += delta * other.n as f64 / nf;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / nf;
        self.n = n;
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (n-1 denominator); zero for n < 2.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.mean,
            std_error: (self.variance() / self.n.max(1) as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Equal-width histogram specification.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hi > self.lo) || self.bins == 0 {
            return Err(Error::InvalidParams(format!(
                "histogram spec must satisfy hi > lo and bins >= 1, got [{}, {}] x {}",
                self.lo, self.hi, self.bins
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }
}

/// Histogram of a sub-probability quantity: densities are normalized by the
/// total number of trials, not by the number of in-range samples, so the
/// histogram mass estimates the probability of the recorded event.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub spec: HistogramSpec,
    counts: Vec<u64>,
    trials: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
    pub density: f64,
    pub std_error: f64,
}

impl Histogram {
    pub fn new(spec: HistogramSpec) -> Self {
        Self {
            counts: vec![0; spec.bins],
            spec,
            trials: 0,
        }
    }

    /// Count one trial; values outside [lo, hi) are counted as trials but
    /// land in no bin.
    pub fn record(&mut self, x: f64) {
        self.trials += 1;
        if x >= self.spec.lo && x < self.spec.hi {
            let i = ((x - self.spec.lo) / self.spec.width()) as usize;
            let i = i.min(self.spec.bins - 1);
            self.counts[i] += 1;
        }
    }

    /// Count a trial that produced no in-range value (e.g. a surviving path).
    pub fn record_miss(&mut self) {
        self.trials += 1;
    }

    pub fn merge(mut self, other: Self) -> Self {
        assert_eq!(self.spec, other.spec);
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.trials += other.trials;
        self
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    /// Total in-range mass as a fraction of trials.
    pub fn mass(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.trials.max(1) as f64
    }

    pub fn bin(&self, i: usize) -> Bin {
        let w = self.spec.width();
        let n = self.trials.max(1) as f64;
        let p = self.counts[i] as f64 / n;
        Bin {
            left: self.spec.lo + i as f64 * w,
            right: self.spec.lo + (i + 1) as f64 * w,
            count: self.counts[i],
            density: p / w,
            std_error: (p * (1.0 - p) / n).sqrt() / w,
        }
    }

    pub fn bins(&self) -> impl Iterator<Item = Bin> + '_ {
        (0..self.spec.bins).map(|i| self.bin(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.5, 0.0, 7.25, 3.0];
        let mut st = RunningStats::new();
        for &x in &xs {
            st.push(x);
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((st.mean() - mean).abs() < 1e-14);
        assert!((st.variance() - var).abs() < 1e-14);
        assert!((st.estimate().std_error - (var / xs.len() as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.77).sin()).collect();
        let mut all = RunningStats::new();
        for &x in &xs {
            all.push(x);
        }
        let mut a = RunningStats::new();
        let mut b = RunningStats::new();
        for &x in &xs[..37] {
            a.push(x);
        }
        for &x in &xs[37..] {
            b.push(x);
        }
        let merged = a.merge(b);
        assert!((merged.mean() - all.mean()).abs() < 1e-13);
        assert!((merged.variance() - all.variance()).abs() < 1e-13);
    }

    #[test]
    fn single_sample_has_zero_std_error() {
        let mut st = RunningStats::new();
        st.push(5.0);
        let e = st.estimate();
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n, 1);
    }

    #[test]
    fn histogram_mass_counts_only_in_range() {
        let mut h = Histogram::new(HistogramSpec {
            lo: 0.0,
            hi: 1.0,
            bins: 4,
        });
        for x in [0.1, 0.3, 0.9, 1.5, -0.2] {
            h.record(x);
        }
        h.record_miss();
        assert_eq!(h.trials(), 6);
        assert!((h.mass() - 0.5).abs() < 1e-15);
        let b = h.bin(0);
        assert_eq!(b.count, 1);
        assert!((b.density - (1.0 / 6.0) / 0.25).abs() < 1e-12);
    }
}
