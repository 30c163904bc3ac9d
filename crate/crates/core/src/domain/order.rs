use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ambient dimension.
pub const DIM: usize = 2;

/// The fractional parameter `s ∈ (0, 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 && s < 0.5 {
            Ok(FractionalOrder(s))
        } else {
            Err(Error::InvalidOrder(s))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `n + 2s`.
    pub fn kernel_exponent(self) -> f64 {
        DIM as f64 + 2.0 * self.0
    }

    /// Homogeneity degree `n − 2s` of `Per_s` under dilation.
    pub fn scaling_exponent(self) -> f64 {
        DIM as f64 - 2.0 * self.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        FractionalOrder::new(s)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(s: FractionalOrder) -> f64 {
        s.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometricConstants {
    /// Volume of the unit `n`-ball.
    pub kappa: f64,
    /// Surface measure of the unit sphere `S^{n−1}`.
    pub varpi: f64,
}

/// `κ_n` and `ϖ_n = n κ_n`.
pub fn geometric_constants(n: usize) -> Result<GeometricConstants> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    // κ_n = κ_{n−2} · 2π / n, seeded by κ_0 = 1 and κ_1 = 2.
    let mut kappa = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        kappa *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(GeometricConstants { kappa, varpi: n as f64 * kappa })
}
