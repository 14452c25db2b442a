//! Model parameters, frame constants, and the model catalogue.

use crate::error::{Error, Result};
use crate::ops::check_nu;

/// Physical parameters of the two-parameter family: nonlinearity power `p`,
/// dispersion exponent `nu`, amplitude parameter `eps`, long-wave parameter
/// `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: u32,
    pub nu: f64,
    pub eps: f64,
    pub delta: f64,
}

impl ModelParams {
    pub fn new(p: u32, nu: f64, eps: f64, delta: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParam {
                name: "p",
                value: p as f64,
                reason: "nonlinearity power must be a positive integer",
            });
        }
        check_nu(nu)?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParam { name: "eps", value: eps, reason: "need 0 < eps <= 1" });
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParam { name: "delta", value: delta, reason: "need 0 < delta <= 1" });
        }
        Ok(Self { p, nu, eps, delta })
    }

    /// `eps^p`, the amplitude-order weight.
    pub fn eps_pow(&self) -> f64 {
        self.eps.powi(self.p as i32)
    }

    /// `delta^(2 nu)`, the dispersion-order weight.
    pub fn delta_pow(&self) -> f64 {
        self.delta.powf(2.0 * self.nu)
    }
}

/// Moving-frame constants `(a, b, c)` of the map `X = aY + bS, T = cS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrameConstants {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParam { name: match name {
                    "a" => "a",
                    "b" => "b",
                    _ => "c",
                }, value: v, reason: "frame constants must be positive" });
            }
        }
        Ok(Self { a, b, c })
    }
}

/// Coordinate frame a model lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Original laboratory coordinates (x, t).
    Physical,
    /// Slow right-going coordinates (Y, S).
    Slow,
    /// Generic moving frame (X, T).
    Moving,
    /// Parameter-free unidirectional coordinates (zeta, tau).
    Unidirectional,
}

/// Every evolution equation the harness knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Boussinesq,
    SlowFrameUnidirectional,
    MovingFrameGeneric,
    GfCh,
    GfChOriginal,
    Gch,
    Mch,
    ClassicalCh,
    GfBbm,
    GfBbmOriginal,
    GfKdv,
    GfKdvOriginal,
}

impl ModelId {
    pub const ALL: [ModelId; 12] = [
        ModelId::Boussinesq,
        ModelId::SlowFrameUnidirectional,
        ModelId::MovingFrameGeneric,
        ModelId::GfCh,
        ModelId::GfChOriginal,
        ModelId::Gch,
        ModelId::Mch,
        ModelId::ClassicalCh,
        ModelId::GfBbm,
        ModelId::GfBbmOriginal,
        ModelId::GfKdv,
        ModelId::GfKdvOriginal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelId::Boussinesq => "Boussinesq",
            ModelId::SlowFrameUnidirectional => "SlowFrameUnidirectional",
            ModelId::MovingFrameGeneric => "MovingFrameGeneric",
            ModelId::GfCh => "GfCH",
            ModelId::GfChOriginal => "GfCH-original",
            ModelId::Gch => "GCH",
            ModelId::Mch => "MCH",
            ModelId::ClassicalCh => "ClassicalCH",
            ModelId::GfBbm => "GfBBM",
            ModelId::GfBbmOriginal => "GfBBM-original",
            ModelId::GfKdv => "GfKdV",
            ModelId::GfKdvOriginal => "GfKdV-original",
        }
    }

    pub fn frame(&self) -> Frame {
        match self {
            ModelId::Boussinesq
            | ModelId::GfChOriginal
            | ModelId::GfBbmOriginal
            | ModelId::GfKdvOriginal => Frame::Physical,
            ModelId::SlowFrameUnidirectional | ModelId::GfKdv => Frame::Slow,
            ModelId::MovingFrameGeneric => Frame::Moving,
            ModelId::GfCh | ModelId::Gch | ModelId::Mch | ModelId::ClassicalCh | ModelId::GfBbm => {
                Frame::Unidirectional
            }
        }
    }
}

impl std::str::FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 1.0, 0.1, 0.1).is_ok());
        assert!(ModelParams::new(0, 1.0, 0.1, 0.1).is_err());
        assert!(ModelParams::new(1, 0.0, 0.1, 0.1).is_err());
        assert!(ModelParams::new(1, 1.0, 0.0, 0.1).is_err());
        assert!(ModelParams::new(1, 1.0, 0.1, 1.5).is_err());
        // sub-critical nu is accepted (with a logged warning)
        assert!(ModelParams::new(1, 0.8, 0.1, 0.1).is_ok());
    }

    #[test]
    fn order_weights() {
        let p = ModelParams::new(3, 1.5, 0.5, 0.25).unwrap();
        assert!((p.eps_pow() - 0.125).abs() < 1e-15);
        assert!((p.delta_pow() - 0.25f64.powf(3.0)).abs() < 1e-15);
    }

    #[test]
    fn model_names_round_trip() {
        for id in ModelId::ALL {
            let parsed: ModelId = id.name().parse().unwrap();
            assert_eq!(parsed, id);
        }
        assert!("NotAModel".parse::<ModelId>().is_err());
    }
}
