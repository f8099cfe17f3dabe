//! Deterministic binning of the unit sphere 𝕊^{d−1} and histogram utilities.
//!
//! * `d = 1`: the two points ±1.
//! * `d = 2`: 64 equal-angle bins; bin `i` covers `[−π + 2πi/64, −π + 2π(i+1)/64)`.
//! * `d ≥ 3`: 100 caps, nearest-center assignment. Centers are 50 Halton directions
//!   followed by their antipodes, so folding through `u ↦ −u` is an index shift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CIRCLE_BINS: usize = 64;
const CAP_HALF: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BinningError {
    #[error("histograms use different binnings ({left} vs {right})")]
    BinningMismatch { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereBinning {
    dim: usize,
    centers: Vec<Vec<f64>>,
}

impl SphereBinning {
    pub fn for_dim(dim: usize) -> Self {
        let centers = match dim {
            0 => panic!("sphere binning needs d ≥ 1"),
            1 => vec![vec![-1.0], vec![1.0]],
            2 => (0..CIRCLE_BINS)
                .map(|i| {
                    let angle = circle_center(i);
                    vec![angle.cos(), angle.sin()]
                })
                .collect(),
            d => {
                let half = halton_directions(d, CAP_HALF);
                let mut c = half.clone();
                c.extend(half.into_iter().map(|v| v.into_iter().map(|x| -x).collect()));
                c
            }
        };
        Self { dim, centers }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    fn label(&self) -> String {
        format!("d={} bins={}", self.dim, self.len())
    }

    /// Bin of a nonzero vector (need not be normalized).
    pub fn bin_of(&self, u: &[f64]) -> usize {
        match self.dim {
            1 => usize::from(u[0] >= 0.0),
            2 => {
                let angle = u[1].atan2(u[0]);
                let t = (angle + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
                ((t * CIRCLE_BINS as f64).floor() as usize).min(CIRCLE_BINS - 1)
            }
            _ => {
                let mut best = 0;
                let mut best_dot = f64::NEG_INFINITY;
                for (i, c) in self.centers.iter().enumerate() {
                    let d: f64 = c.iter().zip(u).map(|(a, b)| a * b).sum();
                    if d > best_dot {
                        best_dot = d;
                        best = i;
                    }
                }
                best
            }
        }
    }

    /// Bin containing the antipodes of bin `i`'s center.
    pub fn antipode(&self, i: usize) -> usize {
        match self.dim {
            1 => 1 - i,
            2 => (i + CIRCLE_BINS / 2) % CIRCLE_BINS,
            _ => (i + CAP_HALF) % (2 * CAP_HALF),
        }
    }
}

fn circle_center(i: usize) -> f64 {
    -std::f64::consts::PI + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / CIRCLE_BINS as f64
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while n > 0 {
        x += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    x
}

/// Low-discrepancy directions: Halton points of the cube `[−1,1]^d` kept inside the unit
/// ball (away from the origin) and normalized.
fn halton_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    assert!(d <= PRIMES.len(), "cap binning supports d ≤ {}", PRIMES.len());
    let mut out = Vec::with_capacity(count);
    let mut n = 1u64;
    while out.len() < count {
        let p: Vec<f64> = (0..d).map(|k| 2.0 * radical_inverse(n, PRIMES[k]) - 1.0).collect();
        n += 1;
        let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.2 && r <= 1.0 {
            out.push(p.into_iter().map(|x| x / r).collect());
        }
    }
    out
}

/// Probability histogram over a [`SphereBinning`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereHistogram {
    pub binning: SphereBinning,
    pub masses: Vec<f64>,
}

impl SphereHistogram {
    /// Normalized histogram of weighted directions; zero vectors are skipped.
    pub fn from_weighted<'a>(
        binning: SphereBinning,
        points: impl IntoIterator<Item = (&'a [f64], f64)>,
    ) -> Self {
        let mut masses = vec![0.0; binning.len()];
        for (u, w) in points {
            if u.iter().any(|&x| x != 0.0) {
                masses[binning.bin_of(u)] += w;
            }
        }
        let total: f64 = masses.iter().sum();
        if total > 0.0 {
            masses.iter_mut().for_each(|m| *m /= total);
        }
        Self { binning, masses }
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.masses.iter().filter(|&&m| m > 0.0).count()
    }

    fn check(&self, other: &Self) -> Result<(), BinningError> {
        if self.binning != other.binning || self.masses.len() != other.masses.len() {
            return Err(BinningError::BinningMismatch {
                left: self.binning.label(),
                right: other.binning.label(),
            });
        }
        Ok(())
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn tv_distance(&self, other: &Self) -> Result<f64, BinningError> {
        self.check(other)?;
        Ok(0.5 * self.masses.iter().zip(&other.masses).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// Image under `u ↦ −u`.
    pub fn antipodal_image(&self) -> Self {
        let mut masses = vec![0.0; self.masses.len()];
        for (i, &m) in self.masses.iter().enumerate() {
            masses[self.binning.antipode(i)] = m;
        }
        Self {
            binning: self.binning.clone(),
            masses,
        }
    }

    /// Quotient by `±`: mass of each antipodal pair, indexed by its lower bin.
    pub fn folded(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.masses.len() {
            let j = self.binning.antipode(i);
            if i < j {
                out.push(self.masses[i] + self.masses[j]);
            }
        }
        out
    }

    /// TV distance between the `±`-folded histograms.
    pub fn folded_tv_distance(&self, other: &Self) -> Result<f64, BinningError> {
        self.check(other)?;
        Ok(0.5
            * self
                .folded()
                .iter()
                .zip(other.folded())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_bins_and_antipodes() {
        let b = SphereBinning::for_dim(2);
        assert_eq!(b.len(), 64);
        for i in 0..64 {
            let c = &b.centers()[i];
            assert_eq!(b.bin_of(c), i);
            let anti = [-c[0], -c[1]];
            assert_eq!(b.bin_of(&anti), b.antipode(i));
        }
    }

    #[test]
    fn caps_are_antipodally_paired() {
        let b = SphereBinning::for_dim(3);
        assert_eq!(b.len(), 100);
        for i in 0..100 {
            let c = &b.centers()[i];
            assert_eq!(b.bin_of(c), i);
            let anti: Vec<f64> = c.iter().map(|x| -x).collect();
            assert_eq!(b.bin_of(&anti), b.antipode(i));
        }
    }

    #[test]
    fn sign_bins() {
        let b = SphereBinning::for_dim(1);
        assert_eq!(b.bin_of(&[3.0]), 1);
        assert_eq!(b.bin_of(&[-0.1]), 0);
        assert_eq!(b.antipode(0), 1);
    }

    #[test]
    fn tv_and_folding() {
        let b = SphereBinning::for_dim(2);
        let e1 = [1.0, 0.0];
        let h = SphereHistogram::from_weighted(b.clone(), [(&e1[..], 1.0)]);
        let anti = h.antipodal_image();
        assert!((h.tv_distance(&anti).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(h.folded_tv_distance(&anti).unwrap(), 0.0);
        assert_eq!(h.tv_distance(&h).unwrap(), 0.0);
        let other = SphereHistogram::from_weighted(SphereBinning::for_dim(3), [(&[1.0, 0.0, 0.0][..], 1.0)]);
        assert!(h.tv_distance(&other).is_err());
    }
}
