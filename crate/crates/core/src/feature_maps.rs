//! Encoding circuits that map a classical feature vector to `|phi(x)>`.
//!
//! Nine families are supported: single-axis angle encodings, amplitude
//! encoding, the Pauli Z and ZZ feature maps, and angle encodings followed by
//! a nearest-neighbour chain of controlled gates.
//!
//! Conventions:
//! * Rotation angles are `angle_scale * x_i` (default `angle_scale = pi`), so
//!   features in `[0, 1]` sweep `[0, pi]`.
//! * Pauli maps use `phi_i(x) = angle_scale * x_i` and
//!   `phi_ij(x) = (pi - angle_scale * x_i) * (pi - angle_scale * x_j)`. Each
//!   repetition emits `H` on every qubit, `RZ(2 phi_i)` on every qubit and, for
//!   the ZZ map, `CX(i, i+1) RZ_{i+1}(2 phi_{i,i+1}) CX(i, i+1)` along the chain.
//! * Entangling layers use the linear chain `i -> i+1`.
//! * Amplitude encoding zero-pads to `2^n` at the high-index end and
//!   normalizes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeatureMapFamily {
    AngleX,
    AngleY,
    AngleZ,
    Amplitude,
    ZFeature,
    ZzFeature,
    ParamXCx,
    ParamYCy,
    ParamZCz,
}

impl FeatureMapFamily {
    pub const ALL: [FeatureMapFamily; 9] = [
        FeatureMapFamily::AngleX,
        FeatureMapFamily::AngleY,
        FeatureMapFamily::AngleZ,
        FeatureMapFamily::ParamXCx,
        FeatureMapFamily::ParamYCy,
        FeatureMapFamily::ParamZCz,
        FeatureMapFamily::Amplitude,
        FeatureMapFamily::ZFeature,
        FeatureMapFamily::ZzFeature,
    ];

    /// Canonical configuration name, e.g. `ANGLE_X`.
    pub fn name(self) -> &'static str {
        match self {
            FeatureMapFamily::AngleX => "ANGLE_X",
            FeatureMapFamily::AngleY => "ANGLE_Y",
            FeatureMapFamily::AngleZ => "ANGLE_Z",
            FeatureMapFamily::Amplitude => "AMPLITUDE",
            FeatureMapFamily::ZFeature => "Z_FEATURE",
            FeatureMapFamily::ZzFeature => "ZZ_FEATURE",
            FeatureMapFamily::ParamXCx => "PARAM_X_CX",
            FeatureMapFamily::ParamYCy => "PARAM_Y_CY",
            FeatureMapFamily::ParamZCz => "PARAM_Z_CZ",
        }
    }

    /// Short label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            FeatureMapFamily::AngleX => "Rx",
            FeatureMapFamily::AngleY => "Ry",
            FeatureMapFamily::AngleZ => "Rz",
            FeatureMapFamily::Amplitude => "AmplitudeEncoding",
            FeatureMapFamily::ZFeature => "ZFeatureMap",
            FeatureMapFamily::ZzFeature => "ZZFeatureMap",
            FeatureMapFamily::ParamXCx => "Rx and CX",
            FeatureMapFamily::ParamYCy => "Ry and CY",
            FeatureMapFamily::ParamZCz => "Rz and CZ",
        }
    }

    /// Layer count used for this family in the reference comparison:
    /// 2 for the Pauli maps, 1 for everything else.
    pub fn reference_repetitions(self) -> usize {
        match self {
            FeatureMapFamily::ZFeature | FeatureMapFamily::ZzFeature => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for FeatureMapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureMapFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        let family = match key.as_str() {
            "ANGLEX" | "RX" => FeatureMapFamily::AngleX,
            "ANGLEY" | "RY" => FeatureMapFamily::AngleY,
            "ANGLEZ" | "RZ" => FeatureMapFamily::AngleZ,
            "AMPLITUDE" | "AMPLITUDEENCODING" => FeatureMapFamily::Amplitude,
            "ZFEATURE" | "ZFEATUREMAP" => FeatureMapFamily::ZFeature,
            "ZZFEATURE" | "ZZFEATUREMAP" => FeatureMapFamily::ZzFeature,
            "PARAMXCX" | "RXCX" | "RXANDCX" => FeatureMapFamily::ParamXCx,
            "PARAMYCY" | "RYCY" | "RYANDCY" => FeatureMapFamily::ParamYCy,
            "PARAMZCZ" | "RZCZ" | "RZANDCZ" => FeatureMapFamily::ParamZCz,
            _ => return Err(Error::Config(format!("unknown feature map {s:?}"))),
        };
        Ok(family)
    }
}

fn default_angle_scale() -> f64 {
    PI
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub family: FeatureMapFamily,
    pub repetitions: usize,
    #[serde(default = "default_angle_scale")]
    pub angle_scale: f64,
}

impl FeatureMapSpec {
    pub fn new(family: FeatureMapFamily, repetitions: usize) -> Self {
        Self {
            family,
            repetitions,
            angle_scale: PI,
        }
    }

    pub fn with_angle_scale(mut self, angle_scale: f64) -> Self {
        self.angle_scale = angle_scale;
        self
    }

    /// The nine maps of the reference comparison at their reference layer counts.
    pub fn reference_suite() -> Vec<FeatureMapSpec> {
        FeatureMapFamily::ALL
            .iter()
            .map(|&f| FeatureMapSpec::new(f, f.reference_repetitions()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !self.angle_scale.is_finite() {
            return Err(Error::Config("angle_scale must be finite".into()));
        }
        Ok(())
    }

    /// Table label, e.g. `ZZFeatureMap`.
    pub fn label(&self) -> &'static str {
        self.family.label()
    }
}

/// Qubits needed to encode a `d`-dimensional vector.
pub fn required_qubits(spec: &FeatureMapSpec, d: usize) -> usize {
    match spec.family {
        FeatureMapFamily::Amplitude => {
            (d.max(1).next_power_of_two().trailing_zeros() as usize).max(1)
        }
        _ => d,
    }
}

fn check_features(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Shape("feature vector is empty".into()));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput(format!(
            "non-finite feature value {v}"
        )));
    }
    Ok(())
}

/// Gate list preparing `|phi(x)>` from `|0...0>`. Amplitude encoding has no
/// circuit form here.
pub fn circuit_for(spec: &FeatureMapSpec, x: &[f64]) -> Result<Vec<Gate>> {
    spec.validate()?;
    check_features(x)?;
    let n = x.len();
    let angle = |i: usize| spec.angle_scale * x[i];
    let mut gates = Vec::new();

    for _ in 0..spec.repetitions {
        match spec.family {
            FeatureMapFamily::Amplitude => {
                return Err(Error::UnsupportedFamily(spec.family.name().into()))
            }
            FeatureMapFamily::AngleX
            | FeatureMapFamily::AngleY
            | FeatureMapFamily::AngleZ
            | FeatureMapFamily::ParamXCx
            | FeatureMapFamily::ParamYCy
            | FeatureMapFamily::ParamZCz => {
                for target in 0..n {
                    let angle = angle(target);
                    gates.push(match spec.family {
                        FeatureMapFamily::AngleX | FeatureMapFamily::ParamXCx => {
                            Gate::Rx { target, angle }
                        }
                        FeatureMapFamily::AngleY | FeatureMapFamily::ParamYCy => {
                            Gate::Ry { target, angle }
                        }
                        _ => Gate::Rz { target, angle },
                    });
                }
                for control in 0..n.saturating_sub(1) {
                    let target = control + 1;
                    match spec.family {
                        FeatureMapFamily::ParamXCx => gates.push(Gate::Cx { control, target }),
                        FeatureMapFamily::ParamYCy => gates.push(Gate::Cy { control, target }),
                        FeatureMapFamily::ParamZCz => gates.push(Gate::Cz { control, target }),
                        _ => {}
                    }
                }
            }
            FeatureMapFamily::ZFeature | FeatureMapFamily::ZzFeature => {
                gates.extend((0..n).map(|target| Gate::H { target }));
                gates.extend((0..n).map(|target| Gate::Rz {
                    target,
                    angle: 2.0 * angle(target),
                }));
                if spec.family == FeatureMapFamily::ZzFeature {
                    for control in 0..n.saturating_sub(1) {
                        let target = control + 1;
                        let phi = (PI - angle(control)) * (PI - angle(target));
                        gates.push(Gate::Cx { control, target });
                        gates.push(Gate::Rz {
                            target,
                            angle: 2.0 * phi,
                        });
                        gates.push(Gate::Cx { control, target });
                    }
                }
            }
        }
    }
    Ok(gates)
}

/// Prepares `|phi(x)>`.
pub fn encode(spec: &FeatureMapSpec, x: &[f64]) -> Result<StateVector> {
    spec.validate()?;
    check_features(x)?;
    if spec.family == FeatureMapFamily::Amplitude {
        return encode_amplitude(x);
    }
    let gates = circuit_for(spec, x)?;
    let mut state = StateVector::zero(required_qubits(spec, x.len()))?;
    state.apply_circuit(&gates)?;
    Ok(state)
}

fn encode_amplitude(x: &[f64]) -> Result<StateVector> {
    let n = (x.len().next_power_of_two().trailing_zeros() as usize).max(1);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateInput(
            "amplitude encoding of the all-zero vector".into(),
        ));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (amp, v) in amplitudes.iter_mut().zip(x) {
        *amp = Complex64::new(v / norm, 0.0);
    }
    StateVector::from_amplitudes(amplitudes)
}
