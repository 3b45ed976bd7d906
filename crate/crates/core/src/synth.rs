//! Labelled 2-D benchmark datasets and element-wise missingness.
//!
//! The five families are the usual clustering gallery: two noisy rings, two interleaved
//! half-moons, three isotropic blobs, three blobs with unequal spreads, and three blobs
//! sheared by a fixed linear map. Blob centres are fixed per family, so each seed only
//! changes the sampled points.
//!
//! All draws come from a [`ChaCha8Rng`](rand_chacha::ChaCha8Rng) seeded with
//! `seed_from_u64(spec.seed)`. Normals use the ziggurat sampler in `rand_distr`.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::model::{Dataset, ObservationMask};
use crate::rng::rng_from_seed;

/// Centres used by the `blobs` family.
pub const BLOBS_CENTERS: [[f64; 2]; 3] = [
    [7.468_588_06, 9.370_813_26],
    [7.383_890_80, 0.617_113_83],
    [-5.345_433_44, -9.772_023_91],
];

/// Centres shared by the `varied` and `aniso` families.
pub const SHARED_CENTERS: [[f64; 2]; 3] = [
    [-8.947_091_65, -5.462_764_35],
    [-4.589_389_89, 0.088_761_78],
    [1.938_754_32, 0.505_136_13],
];

/// Per-component standard deviations of the `varied` family.
pub const VARIED_STDS: [f64; 3] = [1.0, 2.5, 0.5];

/// Row-vector transform applied by the `aniso` family: `[x, y] · ANISO_TRANSFORM`.
pub const ANISO_TRANSFORM: [[f64; 2]; 2] = [[0.6, -0.6], [-0.4, 0.8]];

pub const CIRCLES_OUTER_RADIUS: f64 = 1.0;
pub const CIRCLES_INNER_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Circles,
    Moons,
    Blobs,
    Varied,
    Aniso,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Circles,
        Family::Moons,
        Family::Varied,
        Family::Aniso,
        Family::Blobs,
    ];

    /// Number of generating components, which is also the K used to cluster it.
    pub fn k_true(self) -> usize {
        match self {
            Family::Circles | Family::Moons => 2,
            Family::Blobs | Family::Varied | Family::Aniso => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Circles => "circles",
            Family::Moons => "moons",
            Family::Blobs => "blobs",
            Family::Varied => "varied",
            Family::Aniso => "aniso",
        }
    }

    /// Name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Family::Circles => "noisy circles",
            Family::Moons => "noisy moons",
            Family::Blobs => "blobs",
            Family::Varied => "varied",
            Family::Aniso => "aniso",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circles" | "noisy_circles" | "noisy circles" => Ok(Family::Circles),
            "moons" | "noisy_moons" | "noisy moons" => Ok(Family::Moons),
            "blobs" => Ok(Family::Blobs),
            "varied" => Ok(Family::Varied),
            "aniso" => Ok(Family::Aniso),
            other => Err(ClusterError::InvalidConfig(format!(
                "unknown dataset family '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub family: Family,
    pub n: usize,
    /// Gaussian noise std for circles and moons; blob families use fixed spreads.
    pub noise: f64,
    pub seed: u64,
}

impl DatasetSpec {
    pub const DEFAULT_N: usize = 500;
    pub const DEFAULT_NOISE: f64 = 0.05;

    pub fn new(family: Family, seed: u64) -> Self {
        DatasetSpec {
            family,
            n: Self::DEFAULT_N,
            noise: Self::DEFAULT_NOISE,
            seed,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn k_true(&self) -> usize {
        self.family.k_true()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < self.k_true() {
            return Err(ClusterError::InvalidConfig(format!(
                "{} needs at least {} samples, got {}",
                self.family,
                self.k_true(),
                self.n
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(ClusterError::InvalidConfig(format!(
                "noise must be a finite nonnegative number, got {}",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Splits `n` into `parts` counts that differ by at most one; earlier parts get the extra.
pub fn split_counts(n: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|p| n / parts + usize::from(p < n % parts))
        .collect()
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn linspace(start: f64, stop: f64, count: usize, endpoint: bool) -> impl Iterator<Item = f64> {
    let intervals = if endpoint {
        count.saturating_sub(1).max(1)
    } else {
        count.max(1)
    };
    let step = (stop - start) / intervals as f64;
    (0..count).map(move |i| start + step * i as f64)
}

/// Gaussian clusters around `centers` with per-component `stds`, emitted component by component.
pub fn isotropic_blobs<R: Rng + ?Sized>(
    centers: &[[f64; 2]],
    stds: &[f64],
    n: usize,
    rng: &mut R,
) -> (Vec<[f64; 2]>, Vec<usize>) {
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, &count) in split_counts(n, centers.len()).iter().enumerate() {
        for _ in 0..count {
            let x = centers[c][0] + stds[c] * normal(rng);
            let y = centers[c][1] + stds[c] * normal(rng);
            points.push([x, y]);
            labels.push(c);
        }
    }
    (points, labels)
}

pub fn apply_aniso_transform(p: [f64; 2]) -> [f64; 2] {
    let a = ANISO_TRANSFORM;
    [
        p[0] * a[0][0] + p[1] * a[1][0],
        p[0] * a[0][1] + p[1] * a[1][1],
    ]
}

/// Builds the raw (unscaled) labelled dataset described by `spec`.
pub fn generate(spec: &DatasetSpec) -> Result<Dataset<f64>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let (points, labels) = match spec.family {
        Family::Circles => {
            let mut points = Vec::with_capacity(spec.n);
            let mut labels = Vec::with_capacity(spec.n);
            let radii = [CIRCLES_OUTER_RADIUS, CIRCLES_INNER_RADIUS];
            for (c, &count) in split_counts(spec.n, 2).iter().enumerate() {
                for t in linspace(0.0, std::f64::consts::TAU, count, false) {
                    points.push([radii[c] * t.cos(), radii[c] * t.sin()]);
                    labels.push(c);
                }
            }
            add_noise(&mut points, spec.noise, &mut rng);
            (points, labels)
        }
        Family::Moons => {
            let mut points = Vec::with_capacity(spec.n);
            let mut labels = Vec::with_capacity(spec.n);
            for (c, &count) in split_counts(spec.n, 2).iter().enumerate() {
                for t in linspace(0.0, std::f64::consts::PI, count, true) {
                    points.push(moon_point(c, t));
                    labels.push(c);
                }
            }
            add_noise(&mut points, spec.noise, &mut rng);
            (points, labels)
        }
        Family::Blobs => isotropic_blobs(&BLOBS_CENTERS, &[1.0; 3], spec.n, &mut rng),
        Family::Varied => isotropic_blobs(&SHARED_CENTERS, &VARIED_STDS, spec.n, &mut rng),
        Family::Aniso => {
            let (points, labels) = isotropic_blobs(&SHARED_CENTERS, &[1.0; 3], spec.n, &mut rng);
            (points.into_iter().map(apply_aniso_transform).collect(), labels)
        }
    };
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    let matrix = Array2::from_shape_vec((points.len(), 2), flat)
        .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
    Dataset::new(matrix, Some(labels))
}

/// Noiseless point at parameter `t ∈ [0, π]` on half-moon `c`.
pub fn moon_point(c: usize, t: f64) -> [f64; 2] {
    if c == 0 {
        [t.cos(), t.sin()]
    } else {
        [1.0 - t.cos(), 1.0 - t.sin() - 0.5]
    }
}

fn add_noise<R: Rng + ?Sized>(points: &mut [[f64; 2]], noise: f64, rng: &mut R) {
    if noise == 0.0 {
        return;
    }
    for p in points.iter_mut() {
        p[0] += noise * normal(rng);
        p[1] += noise * normal(rng);
    }
}

/// Per-feature z-score using the population standard deviation.
/// Constant features are only centred.
pub fn standardize(data: &Dataset<f64>) -> Result<Dataset<f64>> {
    let mut points = data.points().to_owned();
    let m = data.m() as f64;
    for mut col in points.columns_mut() {
        let mean = col.iter().sum::<f64>() / m;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        let std = var.sqrt();
        let scale = if std > 0.0 { std } else { 1.0 };
        col.mapv_inplace(|v| (v - mean) / scale);
    }
    Dataset::new(points, data.labels().map(<[usize]>::to_vec))
}

/// Hides exactly `round(fraction · m · d)` elements chosen uniformly without replacement.
pub fn inject_missing<R: Rng + ?Sized>(
    data: &Dataset<f64>,
    fraction: f64,
    rng: &mut R,
) -> Result<ObservationMask> {
    inject_missing_shape(data.m(), data.d(), fraction, rng)
}

pub fn inject_missing_shape<R: Rng + ?Sized>(
    m: usize,
    d: usize,
    fraction: f64,
    rng: &mut R,
) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(ClusterError::InvalidConfig(format!(
            "missing fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let total = m * d;
    let count = missing_count(total, fraction);
    let mut mask = ObservationMask::all_observed(m, d);
    if count == 0 {
        return Ok(mask);
    }
    for flat in rand::seq::index::sample(rng, total, count) {
        mask.set(flat / d, flat % d, false);
    }
    Ok(mask)
}

/// `round(fraction · total)`, clamped to `total`.
pub fn missing_count(total: usize, fraction: f64) -> usize {
    ((fraction * total as f64).round() as usize).min(total)
}
