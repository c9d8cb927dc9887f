use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dyadic::japanese;
use crate::error::{config, resolution, Result};
use crate::lattice::{Profile, ProfileDomain};

/// Spectral data given by samples on a uniform frequency lattice, together
/// with a pointwise evaluator that agrees with the samples.
pub trait SpectralData: Sync {
    /// `(xi, f^(xi))` sorted by `xi`, spacing `spacing()`.
    fn samples(&self) -> &[(f64, Complex64)];
    fn spacing(&self) -> f64;
    /// `f^(xi)` anywhere on the line.
    fn eval(&self, xi: f64) -> Complex64;

    /// Intervals outside which `eval` vanishes.
    fn support(&self) -> Vec<(f64, f64)> {
        let h = self.spacing();
        match (self.samples().first(), self.samples().last()) {
            (Some(a), Some(b)) => vec![(a.0 - 0.5 * h, b.0 + 0.5 * h)],
            _ => Vec::new(),
        }
    }

    /// `(sum <xi>^{2s} |f^|^2 dxi)^{1/2}` over the samples.
    fn hs_norm(&self, s: f64) -> f64 {
        (self.samples().iter().map(|(x, v)| japanese(*x).powf(2.0 * s) * v.norm_sqr()).sum::<f64>() * self.spacing())
            .sqrt()
    }
}

/// How the band data are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalize {
    /// Level `r N / 1000` on the bands.
    Ball,
    /// Scaled to unit `H^s` norm.
    UnitHs,
}

impl fmt::Display for Normalize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalize::Ball => "ball",
            Normalize::UnitHs => "unitHs",
        })
    }
}

impl FromStr for Normalize {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ball" => Ok(Normalize::Ball),
            "unitHs" | "unit-hs" | "unit" => Ok(Normalize::UnitHs),
            other => Err(format!("unknown normalization `{other}` (expected ball or unitHs)")),
        }
    }
}

/// Half-width of each frequency band around `±N`.
pub const BAND_HALF_WIDTH: f64 = 10.0;

/// The two-band profile `f^ = level * 1_{[-10, 10]}(|xi| - N)`, sampled at
/// band midpoints so the samples tile both bands exactly.
#[derive(Debug, Clone)]
pub struct BandData {
    pub n: f64,
    pub level: f64,
    spacing: f64,
    samples: Vec<(f64, Complex64)>,
}

impl BandData {
    /// `spacing` is an upper bound; the actual spacing divides the band width.
    pub fn new(n: f64, level: f64, spacing: f64) -> Result<BandData> {
        if !(spacing > 0.0 && spacing <= 0.25) {
            return resolution(format!("band spacing {spacing} does not resolve the bands (need <= 1/4)"));
        }
        if !(n > BAND_HALF_WIDTH) {
            return config(format!("band centre {n} must exceed the band half-width"));
        }
        let per_band = (2.0 * BAND_HALF_WIDTH / spacing).ceil() as usize;
        let h = 2.0 * BAND_HALF_WIDTH / per_band as f64;
        let v = Complex64::new(level, 0.0);
        let mut samples: Vec<(f64, Complex64)> =
            (0..per_band).rev().map(|i| (-(n - BAND_HALF_WIDTH + (i as f64 + 0.5) * h), v)).collect();
        samples.extend((0..per_band).map(|i| (n - BAND_HALF_WIDTH + (i as f64 + 0.5) * h, v)));
        Ok(BandData { n, level, spacing: h, samples })
    }

    pub fn scaled(mut self, factor: f64) -> BandData {
        self.level *= factor;
        self.samples.iter_mut().for_each(|(_, v)| *v *= factor);
        self
    }

    /// Samples with `xi > 0`.
    pub fn positive(&self) -> &[(f64, Complex64)] {
        &self.samples[self.samples.len() / 2..]
    }
}

impl SpectralData for BandData {
    fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }
    fn spacing(&self) -> f64 {
        self.spacing
    }
    fn support(&self) -> Vec<(f64, f64)> {
        let (a, b) = (self.n - BAND_HALF_WIDTH, self.n + BAND_HALF_WIDTH);
        vec![(-b, -a), (a, b)]
    }
    fn eval(&self, xi: f64) -> Complex64 {
        if (xi.abs() - self.n).abs() <= BAND_HALF_WIDTH {
            Complex64::new(self.level, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// The cascade data `f_N`. Ball normalization uses level `r N / 1000`;
/// unit normalization rescales that profile to `||f_N||_{H^s} = 1`.
pub fn make_fn(r: f64, n: f64, normalize: Normalize, s: f64, spacing: f64) -> Result<BandData> {
    if !(n > 100.0) {
        return config(format!("N must exceed 100, got {n}"));
    }
    let data = BandData::new(n, r * n / 1000.0, spacing)?;
    Ok(match normalize {
        Normalize::Ball => data,
        Normalize::UnitHs => {
            let norm = data.hs_norm(s);
            data.scaled(1.0 / norm)
        }
    })
}

/// Nonzero samples of a frequency profile on its grid lattice.
#[derive(Debug, Clone)]
pub struct LatticeData {
    spacing: f64,
    samples: Vec<(f64, Complex64)>,
}

impl LatticeData {
    pub fn from_profile(p: &Profile) -> Result<LatticeData> {
        p.expect(ProfileDomain::Frequency)?;
        let samples =
            p.grid().xi().iter().zip(p.values()).filter(|(_, v)| v.norm() > 0.0).map(|(x, v)| (*x, *v)).collect();
        Ok(LatticeData { spacing: p.grid().dxi(), samples })
    }
}

impl SpectralData for LatticeData {
    fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }
    fn spacing(&self) -> f64 {
        self.spacing
    }
    fn eval(&self, xi: f64) -> Complex64 {
        let k = (xi / self.spacing).round();
        if (xi / self.spacing - k).abs() > 1e-6 {
            return Complex64::new(0.0, 0.0);
        }
        let target = k * self.spacing;
        let i = self.samples.partition_point(|(x, _)| *x < target - 0.5 * self.spacing);
        match self.samples.get(i) {
            Some((x, v)) if (x - target).abs() < 0.5 * self.spacing => *v,
            _ => Complex64::new(0.0, 0.0),
        }
    }
}
