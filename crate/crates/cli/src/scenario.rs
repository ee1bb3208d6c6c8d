//! Scenario files: the single input every subcommand reads.
//!
//! A scenario is TOML with unit-suffixed quantities (see [`crate::units`]):
//!
//! ```toml
//! seed = 12345
//!
//! [system]
//! bandwidth = "5 MHz"
//! noise_power = "5e-15 W"
//!
//! [efficiency]
//! family = "packet-success"
//! packet_size_bits = 100
//!
//! [[classes]]
//! label = "A"
//! source_rate = "5 kbps"
//! max_delay = "10 ms"
//! gain = 1.0
//! population = 25
//!
//! [sweep]
//! min_delay = "2 ms"
//! max_delay = "1 s"
//! samples = 40
//! scale = "log"
//! source_rate = "5 kbps"
//! other_size = 0.2
//!
//! [validate]
//! packets = 1000000
//! ```
//!
//! Loading validates units, uniqueness of labels, and ranges; the
//! validated [`Scenario`] stores SI floats only. Serializing and
//! re-parsing a scenario yields an identical value (round-trip identity).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use prc_core::efficiency::EfficiencyFunction;
use prc_core::game::{SystemParams, UserProfile};
use prc_core::queueing::{DelayConstraint, TrafficSpec};

use crate::units::{format_quantity, parse_quantity, Dimension};
use crate::CliError;

/// The only implemented success-probability family.
pub const FAMILY_PACKET_SUCCESS: &str = "packet-success";

// ---------------------------------------------------------------------------
// Validated scenario (SI units throughout)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Base RNG seed for anything randomized (Monte-Carlo validation).
    pub seed: u64,
    pub system: SystemScenario,
    pub efficiency: EfficiencyScenario,
    /// QoS classes; a class with population n stands for n identical users.
    pub classes: Vec<ClassScenario>,
    pub sweep: Option<SweepScenario>,
    pub validate: Option<ValidateScenario>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemScenario {
    pub bandwidth_hz: f64,
    pub noise_power_w: f64,
    pub max_power_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyScenario {
    pub family: String,
    pub packet_size_bits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScenario {
    pub label: String,
    pub source_rate_bps: f64,
    pub max_delay_s: f64,
    pub gain: f64,
    pub population: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepScenario {
    pub min_delay_s: f64,
    pub max_delay_s: f64,
    pub samples: u32,
    pub scale: SweepScale,
    /// Source rate of the swept user (delay-sweep figures).
    pub source_rate_bps: f64,
    /// Fixed aggregate size of the other users sharing the channel.
    pub other_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateScenario {
    pub packets: u64,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Parses and validates scenario TOML. Errors name the field.
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| e.to_string())?;
        raw.validate()
    }

    /// Canonical TOML with SI base units; parsing it back yields `self`.
    pub fn to_toml_string(&self) -> String {
        let raw = RawScenario::from_scenario(self);
        toml::to_string(&raw).expect("scenario serialization cannot fail")
    }

    // --- Conversions into the library's domain types ---

    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        let params = SystemParams::new(
            self.system.bandwidth_hz,
            self.system.noise_power_w,
            self.efficiency.packet_size_bits,
        )?;
        match self.system.max_power_w {
            Some(cap) => Ok(params.with_max_power(cap)?),
            None => Ok(params),
        }
    }

    pub fn efficiency_function(&self) -> Result<EfficiencyFunction, CliError> {
        debug_assert_eq!(self.efficiency.family, FAMILY_PACKET_SUCCESS);
        Ok(EfficiencyFunction::packet_success(
            self.efficiency.packet_size_bits,
        )?)
    }

    /// λ = r/M packets per second for a class's source rate.
    pub fn traffic(&self, class: &ClassScenario) -> Result<TrafficSpec, CliError> {
        let m = self.efficiency.packet_size_bits;
        Ok(TrafficSpec::new(class.source_rate_bps / f64::from(m), m)?)
    }

    pub fn delay(&self, class: &ClassScenario) -> Result<DelayConstraint, CliError> {
        Ok(DelayConstraint::new(class.max_delay_s)?)
    }

    /// Expands classes into individual users: population n (default 1)
    /// yields n users labeled "A#1".."A#n" (or just "A" when n = 1).
    pub fn expand_users(&self) -> Result<Vec<(String, UserProfile)>, CliError> {
        let mut users = Vec::new();
        for class in &self.classes {
            let n = class.population.unwrap_or(1);
            let profile =
                UserProfile::new(self.traffic(class)?, self.delay(class)?, class.gain)?;
            for i in 1..=n {
                let label = if n == 1 {
                    class.label.clone()
                } else {
                    format!("{}#{i}", class.label)
                };
                users.push((label, profile));
            }
        }
        if users.is_empty() {
            return Err(CliError::Config(
                "classes: scenario defines no users".into(),
            ));
        }
        Ok(users)
    }
}

// ---------------------------------------------------------------------------
// Raw TOML layer (strings with unit suffixes)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    seed: u64,
    system: RawSystem,
    efficiency: RawEfficiency,
    #[serde(default)]
    classes: Vec<RawClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    validate: Option<RawValidate>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    bandwidth: String,
    noise_power: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_power: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEfficiency {
    family: String,
    packet_size_bits: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    label: String,
    source_rate: String,
    max_delay: String,
    gain: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    population: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    min_delay: String,
    max_delay: String,
    samples: u32,
    scale: SweepScale,
    source_rate: String,
    other_size: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidate {
    packets: u64,
}

/// Parses `text` as a `dim` quantity, prefixing errors with the field
/// path so messages read "system.bandwidth: unknown frequency unit ...".
fn field_quantity(field: &str, text: &str, dim: Dimension) -> Result<f64, String> {
    parse_quantity(text, dim).map_err(|e| format!("{field}: {e}"))
}

fn ensure(cond: bool, message: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message.into())
    }
}

impl RawScenario {
    fn validate(self) -> Result<Scenario, String> {
        let bandwidth_hz =
            field_quantity("system.bandwidth", &self.system.bandwidth, Dimension::Frequency)?;
        let noise_power_w =
            field_quantity("system.noise_power", &self.system.noise_power, Dimension::Power)?;
        let max_power_w = self
            .system
            .max_power
            .as_deref()
            .map(|s| field_quantity("system.max_power", s, Dimension::Power))
            .transpose()?;
        ensure(
            bandwidth_hz > 0.0,
            format!("system.bandwidth: must be positive, got {bandwidth_hz} Hz"),
        )?;
        ensure(
            noise_power_w > 0.0,
            format!("system.noise_power: must be positive, got {noise_power_w} W"),
        )?;

        ensure(
            self.efficiency.family == FAMILY_PACKET_SUCCESS,
            format!(
                "efficiency.family: unknown family {:?} (implemented: {:?})",
                self.efficiency.family, FAMILY_PACKET_SUCCESS
            ),
        )?;
        ensure(
            self.efficiency.packet_size_bits >= 2,
            format!(
                "efficiency.packet_size_bits: need at least 2 bits, got {}",
                self.efficiency.packet_size_bits
            ),
        )?;

        let mut classes = Vec::with_capacity(self.classes.len());
        for (i, raw) in self.classes.iter().enumerate() {
            let at = format!("classes[{i}]");
            ensure(!raw.label.is_empty(), format!("{at}.label: must be nonempty"))?;
            ensure(
                !raw.label.contains(',') && !raw.label.chars().any(char::is_whitespace),
                format!("{at}.label: {:?} must not contain commas or whitespace", raw.label),
            )?;
            let source_rate_bps =
                field_quantity(&format!("{at}.source_rate"), &raw.source_rate, Dimension::Rate)?;
            let max_delay_s =
                field_quantity(&format!("{at}.max_delay"), &raw.max_delay, Dimension::Time)?;
            ensure(
                source_rate_bps >= 0.0,
                format!("{at}.source_rate: must be nonnegative, got {source_rate_bps} bps"),
            )?;
            ensure(
                max_delay_s > 0.0,
                format!("{at}.max_delay: must be positive, got {max_delay_s} s"),
            )?;
            ensure(
                raw.gain.is_finite() && raw.gain > 0.0,
                format!("{at}.gain: must be positive, got {}", raw.gain),
            )?;
            classes.push(ClassScenario {
                label: raw.label.clone(),
                source_rate_bps,
                max_delay_s,
                gain: raw.gain,
                population: raw.population,
            });
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                ensure(
                    a.label != b.label,
                    format!("classes: duplicate label {:?}", a.label),
                )?;
            }
        }

        let sweep = self
            .sweep
            .map(|raw| -> Result<SweepScenario, String> {
                let min_delay_s =
                    field_quantity("sweep.min_delay", &raw.min_delay, Dimension::Time)?;
                let max_delay_s =
                    field_quantity("sweep.max_delay", &raw.max_delay, Dimension::Time)?;
                let source_rate_bps =
                    field_quantity("sweep.source_rate", &raw.source_rate, Dimension::Rate)?;
                ensure(
                    min_delay_s > 0.0 && max_delay_s > min_delay_s,
                    format!(
                        "sweep: need 0 < min_delay < max_delay, got {min_delay_s} s and {max_delay_s} s"
                    ),
                )?;
                ensure(
                    raw.samples >= 2,
                    format!("sweep.samples: need at least 2, got {}", raw.samples),
                )?;
                ensure(
                    source_rate_bps >= 0.0,
                    format!("sweep.source_rate: must be nonnegative, got {source_rate_bps} bps"),
                )?;
                ensure(
                    (0.0..1.0).contains(&raw.other_size),
                    format!("sweep.other_size: must lie in [0, 1), got {}", raw.other_size),
                )?;
                Ok(SweepScenario {
                    min_delay_s,
                    max_delay_s,
                    samples: raw.samples,
                    scale: raw.scale,
                    source_rate_bps,
                    other_size: raw.other_size,
                })
            })
            .transpose()?;

        let validate = self
            .validate
            .map(|raw| -> Result<ValidateScenario, String> {
                ensure(
                    raw.packets > 0,
                    format!("validate.packets: must be positive, got {}", raw.packets),
                )?;
                Ok(ValidateScenario { packets: raw.packets })
            })
            .transpose()?;

        Ok(Scenario {
            seed: self.seed,
            system: SystemScenario {
                bandwidth_hz,
                noise_power_w,
                max_power_w,
            },
            efficiency: EfficiencyScenario {
                family: self.efficiency.family,
                packet_size_bits: self.efficiency.packet_size_bits,
            },
            classes,
            sweep,
            validate,
        })
    }

    fn from_scenario(s: &Scenario) -> Self {
        RawScenario {
            seed: s.seed,
            system: RawSystem {
                bandwidth: format_quantity(s.system.bandwidth_hz, Dimension::Frequency),
                noise_power: format_quantity(s.system.noise_power_w, Dimension::Power),
                max_power: s
                    .system
                    .max_power_w
                    .map(|p| format_quantity(p, Dimension::Power)),
            },
            efficiency: RawEfficiency {
                family: s.efficiency.family.clone(),
                packet_size_bits: s.efficiency.packet_size_bits,
            },
            classes: s
                .classes
                .iter()
                .map(|c| RawClass {
                    label: c.label.clone(),
                    source_rate: format_quantity(c.source_rate_bps, Dimension::Rate),
                    max_delay: format_quantity(c.max_delay_s, Dimension::Time),
                    gain: c.gain,
                    population: c.population,
                })
                .collect(),
            sweep: s.sweep.as_ref().map(|w| RawSweep {
                min_delay: format_quantity(w.min_delay_s, Dimension::Time),
                max_delay: format_quantity(w.max_delay_s, Dimension::Time),
                samples: w.samples,
                scale: w.scale,
                source_rate: format_quantity(w.source_rate_bps, Dimension::Rate),
                other_size: w.other_size,
            }),
            validate: s.validate.as_ref().map(|v| RawValidate { packets: v.packets }),
        }
    }
}
