//! Vertical weights φ(z) and their primitives ϑ (ϑ' = e^φ).
//!
//! Four families are supported. `gauge` is an additive constant on φ, so it
//! scales e^φ and ϑ by `exp(gauge)`; the correspondence multiplies by e^φ, which
//! makes the constant observable and it is carried through every operation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// φ ≡ 0.
    Minimal,
    /// φ = c·z.
    Linear { c: f64 },
    /// φ = α·log z on z > 0.
    LogAlpha { alpha: f64 },
    /// φ = a·log(b·z) on b·z > 0.
    ScaledLog { a: f64, b: f64 },
}

/// Open interval of admissible heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn contains(&self, z: f64) -> bool {
        z > self.lo && z < self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightEval {
    pub phi: f64,
    pub phi_dot: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub kind: WeightKind,
    pub gauge: f64,
}

impl WeightFunction {
    /// Validate and canonicalise: `Linear(0)` is `Minimal` and
    /// `ScaledLog(a, 1)` is `LogAlpha(a)`.
    pub fn new(kind: WeightKind, gauge: f64) -> Result<Self> {
        if !gauge.is_finite() {
            return Err(Error::InvalidWeight(format!("gauge must be finite, got {gauge}")));
        }
        let kind = match kind {
            WeightKind::Minimal => WeightKind::Minimal,
            WeightKind::Linear { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidWeight(format!("linear slope must be finite, got {c}")));
                }
                if c == 0.0 {
                    WeightKind::Minimal
                } else {
                    WeightKind::Linear { c }
                }
            }
            WeightKind::LogAlpha { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidWeight(format!("log exponent must be finite, got {alpha}")));
                }
                WeightKind::LogAlpha { alpha }
            }
            WeightKind::ScaledLog { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidWeight(format!("scaledlog parameters must be finite, got a={a} b={b}")));
                }
                if b == 0.0 {
                    return Err(Error::InvalidWeight("scaledlog scale b must be non-zero".into()));
                }
                // dual∘dual with a gauge lands on b = 1 up to a few ulps
                if (b - 1.0).abs() <= 4.0 * f64::EPSILON {
                    WeightKind::LogAlpha { alpha: a }
                } else {
                    WeightKind::ScaledLog { a, b }
                }
            }
        };
        Ok(Self { kind, gauge })
    }

    pub fn minimal() -> Self {
        Self { kind: WeightKind::Minimal, gauge: 0.0 }
    }

    pub fn linear(c: f64) -> Result<Self> {
        Self::new(WeightKind::Linear { c }, 0.0)
    }

    pub fn log_alpha(alpha: f64) -> Result<Self> {
        Self::new(WeightKind::LogAlpha { alpha }, 0.0)
    }

    pub fn scaled_log(a: f64, b: f64) -> Result<Self> {
        Self::new(WeightKind::ScaledLog { a, b }, 0.0)
    }

    /// `(a, b)` such that φ = a·log(b·z) + gauge, for the log families.
    fn log_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            WeightKind::LogAlpha { alpha } => Some((alpha, 1.0)),
            WeightKind::ScaledLog { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn domain(&self) -> Interval {
        match self.log_params() {
            Some((_, b)) if b > 0.0 => Interval { lo: 0.0, hi: f64::INFINITY },
            Some(_) => Interval { lo: f64::NEG_INFINITY, hi: 0.0 },
            None => Interval::REAL,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        self.domain().contains(z)
    }

    fn check(&self, z: f64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::Domain { weight: self.to_string(), z, domain: self.domain().to_string() })
        }
    }

    /// φ(z), unchecked.
    pub fn phi_unchecked(&self, z: f64) -> f64 {
        self.gauge
            + match self.kind {
                WeightKind::Minimal => 0.0,
                WeightKind::Linear { c } => c * z,
                _ => {
                    let (a, b) = self.log_params().unwrap();
                    a * (b * z).ln()
                }
            }
    }

    /// dφ/dz, unchecked.
    pub fn phi_dot_unchecked(&self, z: f64) -> f64 {
        match self.kind {
            WeightKind::Minimal => 0.0,
            WeightKind::Linear { c } => c,
            _ => self.log_params().unwrap().0 / z,
        }
    }

    /// d²φ/dz², unchecked.
    pub fn phi_ddot_unchecked(&self, z: f64) -> f64 {
        match self.kind {
            WeightKind::Minimal | WeightKind::Linear { .. } => 0.0,
            _ => -self.log_params().unwrap().0 / (z * z),
        }
    }

    /// ϑ(z), unchecked.
    pub fn theta_unchecked(&self, z: f64) -> f64 {
        let scale = self.gauge.exp();
        scale
            * match self.kind {
                WeightKind::Minimal => z,
                WeightKind::Linear { c } => (c * z).exp() / c,
                _ => {
                    let (a, b) = self.log_params().unwrap();
                    if a == -1.0 {
                        (b * z).ln() / b
                    } else {
                        (b * z).powf(a + 1.0) / (b * (a + 1.0))
                    }
                }
            }
    }

    pub fn phi(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.phi_unchecked(z))
    }

    pub fn phi_dot(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.phi_dot_unchecked(z))
    }

    pub fn exp_phi(&self, z: f64) -> Result<f64> {
        Ok(self.phi(z)?.exp())
    }

    pub fn theta(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.theta_unchecked(z))
    }

    /// ϑ⁻¹(w); errors when `w` is outside the range of ϑ.
    pub fn theta_inv(&self, w: f64) -> Result<f64> {
        let ws = w * (-self.gauge).exp();
        let z = match self.kind {
            WeightKind::Minimal => ws,
            WeightKind::Linear { c } => (c * ws).ln() / c,
            _ => {
                let (a, b) = self.log_params().unwrap();
                if a == -1.0 {
                    (b * ws).exp() / b
                } else {
                    (b * (a + 1.0) * ws).powf(1.0 / (a + 1.0)) / b
                }
            }
        };
        if z.is_finite() && self.contains(z) {
            Ok(z)
        } else {
            Err(Error::Domain {
                weight: format!("inverse primitive of {self}"),
                z: w,
                domain: "range of the primitive".into(),
            })
        }
    }

    /// (φ, φ̇, ϑ) at `z`.
    pub fn evaluate(&self, z: f64) -> Result<WeightEval> {
        self.check(z)?;
        Ok(WeightEval {
            phi: self.phi_unchecked(z),
            phi_dot: self.phi_dot_unchecked(z),
            theta: self.theta_unchecked(z),
        })
    }

    /// The weight −φ∘ϑ⁻¹ carried by the image of the correspondence.
    pub fn dual(&self) -> Self {
        let g = self.gauge;
        let kind = match self.kind {
            WeightKind::Minimal => WeightKind::Minimal,
            // ϑ⁻¹(w) = log(c e^{-g} w)/c, so −φ∘ϑ⁻¹ = −log(c e^{-g} w) − g
            WeightKind::Linear { c } => WeightKind::ScaledLog { a: -1.0, b: c * (-g).exp() },
            _ => {
                let (a, b) = self.log_params().unwrap();
                if a == -1.0 {
                    WeightKind::Linear { c: b * (-g).exp() }
                } else {
                    WeightKind::ScaledLog { a: -a / (a + 1.0), b: b * (a + 1.0) * (-g).exp() }
                }
            }
        };
        Self::new(kind, -g).expect("dual of a valid weight is valid")
    }

    /// The CLI spec string (without gauge).
    pub fn spec(&self) -> String {
        match self.kind {
            WeightKind::Minimal => "minimal".into(),
            WeightKind::Linear { c } => format!("linear:{c}"),
            WeightKind::LogAlpha { alpha } => format!("log:{alpha}"),
            WeightKind::ScaledLog { a, b } => format!("scaledlog:{a}:{b}"),
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gauge == 0.0 {
            write!(f, "{}", self.spec())
        } else {
            write!(f, "{} (gauge {})", self.spec(), self.gauge)
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// Parses `minimal`, `linear:<c>`, `log:<alpha>`, `scaledlog:<a>:<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in weight spec {s:?}")))
        };
        let kind = match parts.as_slice() {
            ["minimal"] => WeightKind::Minimal,
            ["linear", c] => WeightKind::Linear { c: num(c)? },
            ["log", a] => WeightKind::LogAlpha { alpha: num(a)? },
            ["scaledlog", a, b] => WeightKind::ScaledLog { a: num(a)?, b: num(b)? },
            _ => {
                return Err(Error::Parse(format!(
                    "unknown weight spec {s:?}; expected minimal | linear:<c> | log:<alpha> | scaledlog:<a>:<b>"
                )))
            }
        };
        WeightFunction::new(kind, 0.0)
    }
}
