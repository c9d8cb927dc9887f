use std::fmt;
use std::str::FromStr;

use super::sum_space::{z_norm_with, ZConfig};
use super::{besov_norm, l1_norm, l1xi_l2tau, l2xi_l1tau_weighted, xsb_norm, y_norm, CellMasses};
use crate::error::{usage, Result};
use crate::lattice::Field;
use crate::report::RatioReport;

/// The four embeddings of the sum space into mixed Lebesgue norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    /// `||<xi>^{-1} f||_{L^2_xi L^1_tau} <= C ||f||_Z`
    F21,
    /// `||f||_{L^2} <= C (1 + 2^j 2^{-d/2}) ||f||_Z` on `A_j ∩ B_{>=d}`
    F22,
    /// `||f||_{L^1} <= C 2^{3j/2} ||f||_Z` on `A_j ∩ B_{>=d}`
    F11,
    /// `||f||_{L^1_xi L^2_tau} <= C (2^{j/2} + 2^{3j/2} 2^{-d/2}) ||f||_Z`
    F12,
}

impl Embedding {
    pub const ALL: [Embedding; 4] = [Embedding::F21, Embedding::F22, Embedding::F11, Embedding::F12];

    pub fn as_str(self) -> &'static str {
        match self {
            Embedding::F21 => "f21",
            Embedding::F22 => "f22",
            Embedding::F11 => "f11",
            Embedding::F12 => "f12",
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Embedding {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Embedding::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| format!("unknown embedding `{s}`"))
    }
}

/// Single annulus `j` and smallest shell `d` of the support, for the
/// localized embeddings.
fn single_annulus(f: &Field) -> Result<Option<(u32, u32)>> {
    let cells = CellMasses::of(f).support();
    let Some(first) = cells.first() else { return Ok(None) };
    if cells.iter().any(|c| c.j != first.j) {
        return usage("embedding needs support in a single annulus A_j");
    }
    Ok(Some((first.j, cells.iter().map(|c| c.d).min().unwrap())))
}

/// Empirical constant `LHS / (factor * ||F||_Z)` of one embedding.
pub fn embedding_check(f: &Field, which: Embedding, cfg: &ZConfig) -> Result<RatioReport> {
    let (lhs, factor, jd) = match which {
        Embedding::F21 => (l2xi_l1tau_weighted(f), 1.0, None),
        _ => {
            let Some((j, d)) = single_annulus(f)? else {
                return Ok(RatioReport::single(which.as_str(), 0.0));
            };
            let (j2, d2) = (2f64.powi(j as i32), 2f64.powf(d as f64 / 2.0));
            match which {
                Embedding::F22 => (f.l2_norm(), 1.0 + j2 / d2, Some((j, d))),
                Embedding::F11 => (l1_norm(f), j2.powf(1.5), Some((j, d))),
                _ => (l1xi_l2tau(f), j2.sqrt() + j2.powf(1.5) / d2, Some((j, d))),
            }
        }
    };
    let z = z_norm_with(f, cfg);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / (factor * z.value) };
    let mut r = RatioReport::single(which.as_str(), ratio).with_param("z_method", z.method);
    if let Some((j, d)) = jd {
        r = r.with_param("j", j).with_param("d", d);
    }
    Ok(r)
}

/// The two sides of the pasting boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PasteSide {
    /// Support in `d >= 2j - offset`; measures `||F||_Y / ||F||_Z`.
    A,
    /// Support in `d <= 2j + offset`; measures `||F||_X / ||F||_Z`.
    B,
}

pub fn pasting_check(f: &Field, side: PasteSide, offset: i64, cfg: &ZConfig) -> Result<RatioReport> {
    let cells = CellMasses::of(f).support();
    let bad = cells.iter().find(|c| {
        let (j, d) = (c.j as i64, c.d as i64);
        match side {
            PasteSide::A => d < 2 * j - offset,
            PasteSide::B => d > 2 * j + offset,
        }
    });
    if let Some(c) = bad {
        return usage(format!("support cell {c} violates the {side:?} pasting region (offset {offset})"));
    }
    let name = match side {
        PasteSide::A => "paste-a",
        PasteSide::B => "paste-b",
    };
    if cells.is_empty() {
        return Ok(RatioReport::single(name, 0.0).with_param("offset", offset));
    }
    let lhs = match side {
        PasteSide::A => y_norm(f),
        PasteSide::B => besov_norm(f),
    };
    let z = z_norm_with(f, cfg);
    Ok(RatioReport::single(name, lhs / z.value).with_param("offset", offset).with_param("z_method", z.method))
}

/// For `F` on `B_{>=d}`: returns `(ratio, d)` where the ratio is
/// `||F||_{X^{-1,b}} / ||F||_{X^{-1,1/2,1}}` when `b < 1/2` and its
/// reciprocal when `b > 1/2`; it should decay like `2^{-|b - 1/2| d}`.
pub fn x_trivial_ratio(f: &Field, b: f64) -> Result<(f64, u32)> {
    if b == 0.5 {
        return usage("b = 1/2 has no trivial embedding");
    }
    let cells = CellMasses::of(f).support();
    let Some(d) = cells.iter().map(|c| c.d).min() else { return Ok((0.0, 0)) };
    let (x, besov) = (xsb_norm(f, -1.0, b), besov_norm(f));
    Ok((if b < 0.5 { x / besov } else { besov / x }, d))
}
