//! The joint power-and-rate control game: SIR model, utilities, user
//! sizes, and the closed-form Nash equilibrium.
//!
//! Uplink users on a shared band of width B choose transmit power p and
//! rate R to maximize energy efficiency u = R·f(γ)/p (bits per joule)
//! subject to a mean-delay bound. With a matched-filter receiver the SIR is
//!
//!   γ_k = (B/R_k) · p_k h_k / (σ² + Σ_{j≠k} p_j h_j).
//!
//! Every user's best response operates at the efficiency-optimal SIR γ*
//! and, among the rates meeting its delay bound, the Pareto-dominant
//! equilibrium picks the smallest, Ω*, where the bound is met exactly.
//! Each user then occupies a fixed fraction of the network — its size
//!
//!   Φ* = 1/(1 + B/(Ω*·γ*))
//!
//! — and the equilibrium powers have the closed form
//!
//!   p_k* = (σ²/h_k) · Φ_k*/(1 − Σ_j Φ_j*),
//!
//! which exists iff the total size is below 1. A round-robin
//! best-response iteration doubles as an independent oracle for that
//! closed form: it converges to the same powers exactly when the size
//! budget holds and diverges otherwise.

use crate::efficiency::{EfficiencyFunction, OptimalSir};
use crate::error::{Error, Result};
use crate::queueing::{DelayConstraint, TrafficSpec};

/// Default relative-change stopping tolerance for
/// [`best_response_dynamics`].
pub const BRD_DEFAULT_TOL: f64 = 1e-10;

/// Default sweep budget for [`best_response_dynamics`].
pub const BRD_DEFAULT_MAX_SWEEPS: usize = 100_000;

/// Total sizes within this margin of 1 are treated as infeasible: the
/// power denominator 1 − ΣΦ would be evaluated next to its singularity.
const SIZE_BUDGET_GUARD: f64 = 1e-12;

/// Divergence is declared when total power grows by more than
/// `BRD_DIVERGENCE_FACTOR` over `BRD_DIVERGENCE_WINDOW` consecutive sweeps.
const BRD_DIVERGENCE_WINDOW: usize = 100;
const BRD_DIVERGENCE_FACTOR: f64 = 10.0;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Cell-wide constants: bandwidth, receiver noise power, packet size, and
/// an optional transmit power cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    bandwidth_hz: f64,
    noise_power_w: f64,
    packet_size_bits: u32,
    max_power_w: Option<f64>,
}

impl SystemParams {
    /// Requires B > 0, σ² > 0, M ≥ 1. The power cap defaults to unbounded.
    pub fn new(bandwidth_hz: f64, noise_power_w: f64, packet_size_bits: u32) -> Result<Self> {
        if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
            return Err(Error::Domain(format!(
                "bandwidth must be finite and positive, got {bandwidth_hz}"
            )));
        }
        if !noise_power_w.is_finite() || noise_power_w <= 0.0 {
            return Err(Error::Domain(format!(
                "noise power must be finite and positive, got {noise_power_w}"
            )));
        }
        if packet_size_bits == 0 {
            return Err(Error::Domain("packet size must be at least 1 bit".into()));
        }
        Ok(Self {
            bandwidth_hz,
            noise_power_w,
            packet_size_bits,
            max_power_w: None,
        })
    }

    /// Impose a finite transmit power cap. Closed forms are computed for
    /// the uncapped game; violations are reported, not re-solved.
    pub fn with_max_power(mut self, max_power_w: f64) -> Result<Self> {
        if !max_power_w.is_finite() || max_power_w <= 0.0 {
            return Err(Error::Domain(format!(
                "power cap must be finite and positive, got {max_power_w}"
            )));
        }
        self.max_power_w = Some(max_power_w);
        Ok(self)
    }

    /// B, Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    /// σ², Watts of noise in bandwidth B.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    /// M, bits per packet (system-wide).
    pub fn packet_size_bits(&self) -> u32 {
        self.packet_size_bits
    }

    /// P_max, if a finite cap was imposed.
    pub fn max_power_w(&self) -> Option<f64> {
        self.max_power_w
    }

    fn ensure_packet_size(&self, bits: u32, what: &str) -> Result<()> {
        if bits != self.packet_size_bits {
            return Err(Error::Domain(format!(
                "{what} uses {bits}-bit packets but the system is configured for {} bits",
                self.packet_size_bits
            )));
        }
        Ok(())
    }
}

/// One user: its traffic, delay bound, and uplink channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserProfile {
    traffic: TrafficSpec,
    delay: DelayConstraint,
    channel_gain: f64,
}

impl UserProfile {
    /// Requires h > 0.
    pub fn new(traffic: TrafficSpec, delay: DelayConstraint, channel_gain: f64) -> Result<Self> {
        if !channel_gain.is_finite() || channel_gain <= 0.0 {
            return Err(Error::Domain(format!(
                "channel gain must be finite and positive, got {channel_gain}"
            )));
        }
        Ok(Self {
            traffic,
            delay,
            channel_gain,
        })
    }

    pub fn traffic(&self) -> &TrafficSpec {
        &self.traffic
    }

    pub fn delay(&self) -> &DelayConstraint {
        &self.delay
    }

    /// h, dimensionless power gain.
    pub fn channel_gain(&self) -> f64 {
        self.channel_gain
    }
}

/// A user's footprint on the network: its equilibrium rate and the
/// resource fraction that rate consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSize {
    /// Ω*, bits/second: the Pareto-dominant equilibrium rate.
    pub omega_star: f64,
    /// Φ* = 1/(1 + B/(Ω*·γ*)), in (0, 1).
    pub phi_star: f64,
}

impl UserSize {
    /// Size of one QoS demand under the given system and efficiency
    /// optimum. The channel gain plays no role: size depends only on what
    /// the user asks for.
    pub fn evaluate(
        traffic: &TrafficSpec,
        delay: &DelayConstraint,
        params: &SystemParams,
        optimal: &OptimalSir,
    ) -> Result<Self> {
        params.ensure_packet_size(traffic.packet_size_bits(), "user traffic")?;
        let omega_star = target_rate_omega_star(traffic, delay, optimal.success_prob)?;
        Ok(Self {
            omega_star,
            phi_star: user_size(omega_star, optimal.sir, params.bandwidth_hz())?,
        })
    }
}

/// One user's slice of the Nash equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumUser {
    /// p*, Watts.
    pub power_w: f64,
    /// R = Ω*, bits/second.
    pub rate_bps: f64,
    /// Received SIR, recomputed from the powers; equals γ* up to rounding.
    pub sir: f64,
    /// u, bits/joule.
    pub utility: f64,
}

/// The Pareto-dominant Nash equilibrium, or the infeasibility evidence.
///
/// `users` is empty when `feasible` is false: no equilibrium powers exist
/// once the total size reaches 1. Sizes are reported either way.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    pub feasible: bool,
    /// Σ Φ*, the size budget consumed.
    pub total_size: f64,
    /// Per-user sizes, in input order.
    pub sizes: Vec<UserSize>,
    /// Per-user equilibrium operating points, in input order; empty when
    /// infeasible.
    pub users: Vec<EquilibriumUser>,
    /// Indices of users whose closed-form power exceeds the cap, when a
    /// finite P_max is configured.
    pub power_cap_exceeded: Vec<usize>,
}

/// A single user's best response against fixed interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    /// The power achieving γ* at rate Ω* (clamped to P_max if capped).
    pub power_w: f64,
    /// Ω*, bits/second.
    pub rate_bps: f64,
    /// True when the unclamped power exceeded a finite P_max.
    pub capped: bool,
}

/// Outcome of [`best_response_dynamics`]. `total_power_trajectory` holds
/// the sum of powers after each completed sweep, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum BrdReport {
    /// Max relative power change over a sweep fell to the tolerance.
    Converged {
        powers: Vec<f64>,
        rates: Vec<f64>,
        sweeps: usize,
        total_power_trajectory: Vec<f64>,
    },
    /// Total power grew more than 10x over 100 consecutive sweeps: the
    /// size budget is violated and no equilibrium exists.
    Diverged {
        sweeps: usize,
        total_power_trajectory: Vec<f64>,
    },
    /// Neither converged nor provably diverging within the sweep budget.
    MaxSweepsExceeded {
        powers: Vec<f64>,
        sweeps: usize,
        total_power_trajectory: Vec<f64>,
        last_max_rel_step: f64,
    },
}

// ---------------------------------------------------------------------------
// SIR and utility
// ---------------------------------------------------------------------------

/// Matched-filter SIR of user `k`:
/// γ_k = (B/R_k)·p_k·h_k/(σ² + Σ_{j≠k} p_j·h_j).
pub fn sir(
    k: usize,
    powers: &[f64],
    rates: &[f64],
    gains: &[f64],
    params: &SystemParams,
) -> Result<f64> {
    if powers.len() != rates.len() || powers.len() != gains.len() {
        return Err(Error::Domain(format!(
            "powers/rates/gains lengths disagree: {}/{}/{}",
            powers.len(),
            rates.len(),
            gains.len()
        )));
    }
    if k >= powers.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: powers.len(),
        });
    }
    for (j, (&p, (&r, &h))) in powers.iter().zip(rates.iter().zip(gains)).enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Domain(format!("power of user {j} must be nonnegative, got {p}")));
        }
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::Domain(format!("rate of user {j} must be positive, got {r}")));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Domain(format!("gain of user {j} must be positive, got {h}")));
        }
    }
    let interference: f64 = powers
        .iter()
        .zip(gains)
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, (&p, &h))| p * h)
        .sum();
    Ok(params.bandwidth_hz() / rates[k] * powers[k] * gains[k]
        / (params.noise_power_w() + interference))
}

/// Energy efficiency u = R·f(γ)/p, bits per joule.
pub fn utility(rate_bps: f64, gamma: f64, power_w: f64, f: &EfficiencyFunction) -> Result<f64> {
    if !rate_bps.is_finite() || rate_bps <= 0.0 {
        return Err(Error::Domain(format!(
            "rate must be finite and positive, got {rate_bps}"
        )));
    }
    if power_w == 0.0 {
        return Err(Error::UndefinedUtility);
    }
    if !power_w.is_finite() || power_w < 0.0 {
        return Err(Error::Domain(format!(
            "power must be finite and positive, got {power_w}"
        )));
    }
    Ok(rate_bps * f.eval(gamma)? / power_w)
}

// ---------------------------------------------------------------------------
// Rate region and size
// ---------------------------------------------------------------------------

/// Ω∞ = (M/D)·(1 + Dλ + sqrt(1 + D²λ²))/2: the rate at which the
/// success-probability demand η reaches 1. Below it the delay bound is
/// unmeetable at any finite SIR; η is strictly decreasing in R above it.
pub fn min_rate_omega_inf(traffic: &TrafficSpec, delay: &DelayConstraint) -> Result<f64> {
    let m = f64::from(traffic.packet_size_bits());
    let d = delay.max_avg_delay();
    let dl = d * traffic.packet_rate_lambda();
    Ok(m / d * (1.0 + dl + (1.0 + dl * dl).sqrt()) / 2.0)
}

/// Ω* = (M/D)·(1 + Dλ + sqrt(1 + D²λ² + 2(1 − f*)Dλ))/(2f*): the unique
/// rate at which the demand η equals f*, so the delay bound is met exactly
/// while operating at the optimal SIR γ*. Always exceeds Ω∞.
pub fn target_rate_omega_star(
    traffic: &TrafficSpec,
    delay: &DelayConstraint,
    f_star: f64,
) -> Result<f64> {
    if !(f_star > 0.0 && f_star < 1.0) {
        return Err(Error::Domain(format!(
            "optimal success probability must lie in (0, 1), got {f_star}"
        )));
    }
    let m = f64::from(traffic.packet_size_bits());
    let d = delay.max_avg_delay();
    let dl = d * traffic.packet_rate_lambda();
    Ok(m / d * (1.0 + dl + (1.0 + dl * dl + 2.0 * (1.0 - f_star) * dl).sqrt()) / (2.0 * f_star))
}

/// Φ* = 1/(1 + B/(Ω*·γ*)): the fraction of network resources one user's
/// demand pins down. Always in (0, 1).
pub fn user_size(omega_star: f64, gamma_star: f64, bandwidth_hz: f64) -> Result<f64> {
    for (name, v) in [
        ("rate", omega_star),
        ("SIR", gamma_star),
        ("bandwidth", bandwidth_hz),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
        }
    }
    Ok(1.0 / (1.0 + bandwidth_hz / (omega_star * gamma_star)))
}

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

/// The Pareto-dominant Nash equilibrium: every user at rate Ω* and SIR γ*,
/// powers from the closed form p_k* = (σ²/h_k)·Φ_k/(1 − ΣΦ).
///
/// When the total size reaches 1 no equilibrium exists; the solution is
/// returned with `feasible = false` and the sizes as evidence, since being
/// over budget is an answer rather than a caller mistake.
pub fn equilibrium(
    users: &[UserProfile],
    params: &SystemParams,
    f: &EfficiencyFunction,
) -> Result<EquilibriumSolution> {
    if users.is_empty() {
        return Err(Error::Domain("equilibrium needs at least one user".into()));
    }
    params.ensure_packet_size(f.packet_size_bits(), "efficiency function")?;
    let optimal = f.optimal_sir()?;

    let sizes = users
        .iter()
        .map(|u| UserSize::evaluate(u.traffic(), u.delay(), params, &optimal))
        .collect::<Result<Vec<_>>>()?;
    let total_size: f64 = sizes.iter().map(|s| s.phi_star).sum();

    if total_size >= 1.0 - SIZE_BUDGET_GUARD {
        return Ok(EquilibriumSolution {
            feasible: false,
            total_size,
            sizes,
            users: Vec::new(),
            power_cap_exceeded: Vec::new(),
        });
    }

    let sigma2 = params.noise_power_w();
    let powers: Vec<f64> = users
        .iter()
        .zip(&sizes)
        .map(|(u, s)| sigma2 / u.channel_gain() * s.phi_star / (1.0 - total_size))
        .collect();
    let rates: Vec<f64> = sizes.iter().map(|s| s.omega_star).collect();
    let gains: Vec<f64> = users.iter().map(|u| u.channel_gain()).collect();
    let phis: Vec<f64> = sizes.iter().map(|s| s.phi_star).collect();

    let mut solution_users = Vec::with_capacity(users.len());
    for k in 0..users.len() {
        solution_users.push(EquilibriumUser {
            power_w: powers[k],
            rate_bps: rates[k],
            sir: sir(k, &powers, &rates, &gains, params)?,
            utility: equilibrium_utility(k, &phis, &gains, params, optimal.success_prob, optimal.sir)?,
        });
    }

    let power_cap_exceeded = match params.max_power_w() {
        Some(cap) => (0..powers.len()).filter(|&k| powers[k] > cap).collect(),
        None => Vec::new(),
    };

    Ok(EquilibriumSolution {
        feasible: true,
        total_size,
        sizes,
        users: solution_users,
        power_cap_exceeded,
    })
}

/// Closed-form equilibrium utility of user `k` in an admitted set with the
/// given sizes:
///
///   u_k = (B·h_k·f*/(σ²·γ*)) · (1 − Σ_j Φ_j)/(1 − Φ_k).
pub fn equilibrium_utility(
    k: usize,
    sizes: &[f64],
    gains: &[f64],
    params: &SystemParams,
    f_star: f64,
    gamma_star: f64,
) -> Result<f64> {
    if sizes.len() != gains.len() {
        return Err(Error::Domain(format!(
            "sizes/gains lengths disagree: {}/{}",
            sizes.len(),
            gains.len()
        )));
    }
    if k >= sizes.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: sizes.len(),
        });
    }
    for &phi in sizes {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::Domain(format!("user size must lie in (0, 1), got {phi}")));
        }
    }
    let total: f64 = sizes.iter().sum();
    if total >= 1.0 - SIZE_BUDGET_GUARD {
        return Err(Error::InfeasibleSet { total_size: total });
    }
    Ok(params.bandwidth_hz() * gains[k] * f_star / (params.noise_power_w() * gamma_star)
        * (1.0 - total)
        / (1.0 - sizes[k]))
}

// ---------------------------------------------------------------------------
// Best-response oracle
// ---------------------------------------------------------------------------

/// User `k`'s best response against the other users' fixed powers: rate
/// Ω* and the unique power putting its SIR at γ*,
///
///   p = γ*·Ω*·(σ² + Σ_{j≠k} p_j h_j)/(B·h_k),
///
/// clamped to P_max (with `capped` set) when a finite cap is configured.
pub fn best_response(
    k: usize,
    powers: &[f64],
    gains: &[f64],
    profile: &UserProfile,
    params: &SystemParams,
    f: &EfficiencyFunction,
) -> Result<BestResponse> {
    if powers.len() != gains.len() {
        return Err(Error::Domain(format!(
            "powers/gains lengths disagree: {}/{}",
            powers.len(),
            gains.len()
        )));
    }
    if k >= powers.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: powers.len(),
        });
    }
    params.ensure_packet_size(f.packet_size_bits(), "efficiency function")?;
    params.ensure_packet_size(profile.traffic().packet_size_bits(), "user traffic")?;
    let optimal = f.optimal_sir()?;
    let omega = target_rate_omega_star(profile.traffic(), profile.delay(), optimal.success_prob)?;

    let interference: f64 = powers
        .iter()
        .zip(gains)
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, (&p, &h))| p * h)
        .sum();
    let power = optimal.sir * omega * (params.noise_power_w() + interference)
        / (params.bandwidth_hz() * profile.channel_gain());

    Ok(match params.max_power_w() {
        Some(cap) if power > cap => BestResponse {
            power_w: cap,
            rate_bps: omega,
            capped: true,
        },
        _ => BestResponse {
            power_w: power,
            rate_bps: omega,
            capped: false,
        },
    })
}

/// Round-robin (Gauss–Seidel) best-response iteration from the given
/// initial powers, as an independent oracle for [`equilibrium`].
///
/// Each sweep updates every user in index order to the power achieving γ*
/// at rate Ω* against current interference; iteration stops when the
/// largest relative power change in a sweep is at most `tol`. The update
/// is a standard interference function, so it converges exactly when
/// ΣΦ < 1 and grows without bound otherwise; unbounded growth is reported
/// as [`BrdReport::Diverged`] once total power rises more than 10x across
/// a 100-sweep window. Any finite P_max is ignored here: the iteration
/// tracks the uncapped game that the closed form solves.
pub fn best_response_dynamics(
    users: &[UserProfile],
    params: &SystemParams,
    f: &EfficiencyFunction,
    init_powers: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<BrdReport> {
    if users.is_empty() {
        return Err(Error::Domain("best-response dynamics needs at least one user".into()));
    }
    if init_powers.len() != users.len() {
        return Err(Error::Domain(format!(
            "got {} initial powers for {} users",
            init_powers.len(),
            users.len()
        )));
    }
    for &p in init_powers {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Domain(format!("initial power must be nonnegative, got {p}")));
        }
    }
    if !(tol > 0.0) || max_sweeps == 0 {
        return Err(Error::Domain(format!(
            "need tol > 0 and max_sweeps > 0, got {tol} and {max_sweeps}"
        )));
    }
    params.ensure_packet_size(f.packet_size_bits(), "efficiency function")?;
    let optimal = f.optimal_sir()?;

    // Per-user constant in the update p_k <- c_k·(σ² + Σ_{j≠k} p_j h_j):
    // c_k = γ*·Ω_k/(B·h_k).
    let coeffs = users
        .iter()
        .map(|u| {
            params.ensure_packet_size(u.traffic().packet_size_bits(), "user traffic")?;
            let omega = target_rate_omega_star(u.traffic(), u.delay(), optimal.success_prob)?;
            Ok(optimal.sir * omega / (params.bandwidth_hz() * u.channel_gain()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rates = users
        .iter()
        .map(|u| target_rate_omega_star(u.traffic(), u.delay(), optimal.success_prob))
        .collect::<Result<Vec<f64>>>()?;
    let gains: Vec<f64> = users.iter().map(|u| u.channel_gain()).collect();

    let mut powers = init_powers.to_vec();
    let mut trajectory = Vec::new();
    let mut last_max_rel_step = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let mut max_rel = 0.0_f64;
        for k in 0..powers.len() {
            let interference: f64 = powers
                .iter()
                .zip(&gains)
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, (&p, &h))| p * h)
                .sum();
            let updated = coeffs[k] * (params.noise_power_w() + interference);
            let rel = if powers[k] > 0.0 {
                (updated - powers[k]).abs() / powers[k]
            } else if updated == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            max_rel = max_rel.max(rel);
            powers[k] = updated;
        }
        trajectory.push(powers.iter().sum::<f64>());
        last_max_rel_step = max_rel;

        if max_rel <= tol {
            return Ok(BrdReport::Converged {
                powers,
                rates,
                sweeps: sweep,
                total_power_trajectory: trajectory,
            });
        }
        if sweep > BRD_DIVERGENCE_WINDOW {
            let before = trajectory[sweep - 1 - BRD_DIVERGENCE_WINDOW];
            if trajectory[sweep - 1] > BRD_DIVERGENCE_FACTOR * before {
                return Ok(BrdReport::Diverged {
                    sweeps: sweep,
                    total_power_trajectory: trajectory,
                });
            }
        }
    }

    Ok(BrdReport::MaxSweepsExceeded {
        powers,
        sweeps: max_sweeps,
        total_power_trajectory: trajectory,
        last_max_rel_step,
    })
}
