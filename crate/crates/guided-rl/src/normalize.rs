//! Online per-feature standardization with Welford running statistics.
//! Indicator features (the per-row presence flags of the observation) are
//! excluded: they are already in {0, 1} and carry structural meaning.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationNormalizer {
    mean: Vec<f64>,
    /// Sum of squared deviations from the running mean (Welford's M2).
    m2: Vec<f64>,
    count: u64,
    /// Features passed through untouched.
    skip: Vec<bool>,
    /// Symmetric clip applied after standardization.
    clip: f64,
}

impl ObservationNormalizer {
    pub fn new(dim: usize, skip_indices: &[usize], clip: f64) -> Self {
        assert!(dim > 0 && clip > 0.0);
        let mut skip = vec![false; dim];
        for &i in skip_indices {
            skip[i] = true;
        }
        Self {
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            count: 0,
            skip,
            clip,
        }
    }

    /// Normalizer for observations laid out as fixed-width vehicle rows
    /// whose first feature per row is a presence indicator.
    pub fn for_vehicle_rows(rows: usize, row_width: usize, clip: f64) -> Self {
        let skip: Vec<usize> = (0..rows).map(|r| r * row_width).collect();
        Self::new(rows * row_width, &skip, clip)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn update(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim(), "observation dimension mismatch");
        self.count += 1;
        let n = self.count as f64;
        for ((&xi, mean), m2) in x
            .iter()
            .zip(self.mean.iter_mut())
            .zip(self.m2.iter_mut())
        {
            let delta = xi - *mean;
            *mean += delta / n;
            *m2 += delta * (xi - *mean);
        }
    }

    pub fn feature_mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Population variance of feature `i` seen so far.
    pub fn feature_variance(&self, i: usize) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2[i] / self.count as f64
        }
    }

    /// Standardizes every non-indicator feature with the current statistics
    /// and clips the result; leaves indicator features untouched. Read-only,
    /// so evaluation cannot drift the statistics.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "observation dimension mismatch");
        let mut out = Vec::with_capacity(x.len());
        for (i, &xi) in x.iter().enumerate() {
            if self.skip[i] || self.count < 2 {
                out.push(xi);
                continue;
            }
            let std = self.feature_variance(i).sqrt().max(1e-6);
            let z = (xi - self.mean[i]) / std;
            out.push(z.clamp(-self.clip, self.clip));
        }
        out
    }

    /// Serializable snapshot (mean, m2, count, skip, clip).
    pub fn state(&self) -> (&[f64], &[f64], u64, &[bool], f64) {
        (&self.mean, &self.m2, self.count, &self.skip, self.clip)
    }

    pub fn from_state(mean: Vec<f64>, m2: Vec<f64>, count: u64, skip: Vec<bool>, clip: f64) -> Self {
        assert_eq!(mean.len(), m2.len());
        assert_eq!(mean.len(), skip.len());
        Self {
            mean,
            m2,
            count,
            skip,
            clip,
        }
    }
}
