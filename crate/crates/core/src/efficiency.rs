//! Packet success rate curves f(γ) and the utility-optimal SIR.
//!
//! The per-transmission packet success probability is a sigmoidal function
//! of the received SIR with f(0) = 0 and f(∞) = 1. The energy-efficiency
//! sweet spot γ* maximizes f(γ)/γ, equivalently it is the unique positive
//! root of f(γ) = γ f'(γ). Both the curve and γ* feed every other module:
//! the delay constraint turns into an SIR floor through the inverse curve,
//! and the equilibrium operates all users at γ*.
//!
//! The default curve family is f(γ) = (1 − e^{−γ})^M for an M-bit packet.
//! Alternative sigmoids plug in through the [`SuccessCurve`] trait.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::solve;

/// Absolute tolerance on root residuals: |f(γ*) − γ* f'(γ*)| and
/// |f(γ̂) − η| are driven below this value.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Initial search bracket for γ* is `[GAMMA_BRACKET_LO, 10·M]`, widened by
/// doubling when the sign change is not captured.
const GAMMA_BRACKET_LO: f64 = 1e-6;

/// A packet success probability curve: increasing, S-shaped, f(0) = 0,
/// f(∞) = 1.
///
/// Implementations only supply the curve and its slope for γ ≥ 0;
/// inversion and the optimal-SIR solve are generic over the trait.
pub trait SuccessCurve: fmt::Debug + Send + Sync {
    /// f(γ). The caller guarantees `gamma >= 0`.
    fn success(&self, gamma: f64) -> f64;
    /// f'(γ). The caller guarantees `gamma >= 0`.
    fn slope(&self, gamma: f64) -> f64;
    /// Short family name for reports and configuration files.
    fn family(&self) -> &'static str;
}

/// The default curve family f(γ) = (1 − e^{−γ})^M: success of an M-bit
/// packet when bit errors are independent with probability e^{−γ}.
#[derive(Debug, Clone, Copy)]
pub struct PacketSuccessCurve {
    packet_size_bits: u32,
}

impl PacketSuccessCurve {
    /// Requires M ≥ 2; with a single bit the curve is concave rather than
    /// S-shaped and f(γ) = γ f'(γ) has no positive root.
    pub fn new(packet_size_bits: u32) -> Result<Self> {
        if packet_size_bits < 2 {
            return Err(Error::InvalidEfficiency(format!(
                "packet-success family needs at least 2 bits per packet, got {packet_size_bits}"
            )));
        }
        Ok(Self { packet_size_bits })
    }
}

impl SuccessCurve for PacketSuccessCurve {
    fn success(&self, gamma: f64) -> f64 {
        let m = f64::from(self.packet_size_bits);
        // (1 - e^{-γ})^M written as exp(M ln(1 - e^{-γ})) to stay accurate
        // for small γ; ln_1p(-e^{-γ}) -> -inf at γ = 0 gives f(0) = 0 exactly.
        (m * (-(-gamma).exp()).ln_1p()).exp()
    }

    fn slope(&self, gamma: f64) -> f64 {
        let m = f64::from(self.packet_size_bits);
        let e = (-gamma).exp();
        m * e * ((m - 1.0) * (-e).ln_1p()).exp()
    }

    fn family(&self) -> &'static str {
        "packet-success"
    }
}

/// The utility-optimal operating point: the unique positive root of
/// f(γ) = γ f'(γ), which maximizes f(γ)/γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalSir {
    /// γ*, linear (not dB).
    pub sir: f64,
    /// f* = f(γ*).
    pub success_prob: f64,
}

/// A packet success curve bound to a packet size, with evaluation,
/// differentiation, inversion, and the optimal-SIR solve.
///
/// Values are immutable after construction; every operation is pure, so one
/// instance may be shared freely across threads.
#[derive(Debug, Clone)]
pub struct EfficiencyFunction {
    packet_size_bits: u32,
    curve: Arc<dyn SuccessCurve>,
}

impl EfficiencyFunction {
    /// Default family (1 − e^{−γ})^M with M = `packet_size_bits`.
    pub fn packet_success(packet_size_bits: u32) -> Result<Self> {
        Ok(Self {
            packet_size_bits,
            curve: Arc::new(PacketSuccessCurve::new(packet_size_bits)?),
        })
    }

    /// Bind an alternative sigmoid to a packet size.
    pub fn with_curve(packet_size_bits: u32, curve: Arc<dyn SuccessCurve>) -> Self {
        Self {
            packet_size_bits,
            curve,
        }
    }

    pub fn packet_size_bits(&self) -> u32 {
        self.packet_size_bits
    }

    pub fn family(&self) -> &'static str {
        self.curve.family()
    }

    /// f(γ): per-transmission packet success probability at SIR `gamma`.
    pub fn eval(&self, gamma: f64) -> Result<f64> {
        check_sir(gamma)?;
        Ok(self.curve.success(gamma))
    }

    /// f'(γ).
    pub fn derivative(&self, gamma: f64) -> Result<f64> {
        check_sir(gamma)?;
        Ok(self.curve.slope(gamma))
    }

    /// γ̂ = f⁻¹(η): the SIR at which the curve reaches success probability
    /// `eta`. Solved by bracketed bisection/Newton on the monotone curve;
    /// no closed form is assumed for any family.
    ///
    /// `eta >= 1` is rejected: success probability 1 requires an infinite
    /// SIR.
    pub fn inverse(&self, eta: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&eta) || !eta.is_finite() {
            return if eta >= 1.0 {
                Err(Error::InfeasibleTarget { eta })
            } else {
                Err(Error::Domain(format!(
                    "success probability must lie in [0, 1), got {eta}"
                )))
            };
        }
        if eta == 0.0 {
            return Ok(0.0);
        }

        // Bracket: f is monotone with f(0) = 0, so double until f(hi) > eta.
        let mut hi = 1.0;
        let mut tries = 0;
        while self.curve.success(hi) <= eta {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::InvalidEfficiency(format!(
                    "curve never reaches success probability {eta}"
                )));
            }
        }
        let curve = &self.curve;
        solve::bisect_newton(
            |g| curve.success(g) - eta,
            |g| curve.slope(g),
            0.0,
            hi,
            ROOT_TOLERANCE,
            500,
        )
        .ok_or_else(|| Error::InvalidEfficiency("inverse bracketing failed".into()))
    }

    /// Solve f(γ) = γ f'(γ) for the utility-optimal SIR γ* and return it
    /// together with f* = f(γ*).
    ///
    /// The residual g(γ) = f(γ) − γ f'(γ) is negative left of γ* and
    /// positive right of it; the initial bracket `[1e-6, 10·M]` is widened
    /// by doubling if the sign change is not captured.
    pub fn optimal_sir(&self) -> Result<OptimalSir> {
        let curve = &self.curve;
        let residual = |g: f64| curve.success(g) - g * curve.slope(g);

        let mut hi = 10.0 * f64::from(self.packet_size_bits.max(1));
        let mut bracket = solve::bracket_sign_change(&residual, GAMMA_BRACKET_LO, hi, 1024);
        let mut widenings = 0;
        while bracket.is_none() && widenings < 16 {
            hi *= 2.0;
            bracket = solve::bracket_sign_change(&residual, GAMMA_BRACKET_LO, hi, 2048);
            widenings += 1;
        }
        let (lo, hi) = bracket.ok_or_else(|| {
            Error::InvalidEfficiency(
                "no sign change of f(g) - g f'(g); curve is not S-shaped".into(),
            )
        })?;

        // Newton on g(γ) needs g'(γ) = -γ f''(γ); estimate f'' by central
        // differences of the slope. Accuracy only affects step quality.
        let d_residual = |g: f64| {
            let h = (1e-7 * g).max(1e-9);
            let fpp = (curve.slope(g + h) - curve.slope((g - h).max(0.0))) / (2.0 * h);
            -g * fpp
        };
        let gamma = solve::bisect_newton(residual, d_residual, lo, hi, ROOT_TOLERANCE, 500)
            .ok_or_else(|| Error::InvalidEfficiency("optimal-SIR bracketing failed".into()))?;

        Ok(OptimalSir {
            sir: gamma,
            success_prob: self.curve.success(gamma),
        })
    }
}

fn check_sir(gamma: f64) -> Result<()> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::Domain(format!("SIR must be nonnegative, got {gamma}")));
    }
    Ok(())
}
