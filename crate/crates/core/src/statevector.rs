//! Dense pure-state simulation over `n` qubits.
//!
//! Amplitudes are stored in a flat vector indexed by the computational basis
//! state, with qubit 0 as the least-significant bit: basis index `i` has qubit
//! `q` set iff `(i >> q) & 1 == 1`. Every gate is applied in place over
//! strided amplitude pairs, so a gate costs O(2^n) and no 2^n x 2^n operator
//! is ever built.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register `StateVector::zero` will allocate (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// Tolerance used when accepting externally supplied amplitudes as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    Cx,
    Cy,
    Cz,
    CPhase,
}

/// A single gate of the supported set. Rotation angles are in radians.
///
/// Controlled gates apply their 2x2 target matrix on the subspace where the
/// control qubit is 1. `CPhase` multiplies the `|11>` component by `e^{i angle}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rx {
        target: usize,
        angle: f64,
    },
    Ry {
        target: usize,
        angle: f64,
    },
    Rz {
        target: usize,
        angle: f64,
    },
    H {
        target: usize,
    },
    Cx {
        control: usize,
        target: usize,
    },
    Cy {
        control: usize,
        target: usize,
    },
    Cz {
        control: usize,
        target: usize,
    },
    CPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::H { .. } => GateKind::H,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Cy { .. } => GateKind::Cy,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::CPhase { .. } => GateKind::CPhase,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::H { target }
            | Gate::Cx { target, .. }
            | Gate::Cy { target, .. }
            | Gate::Cz { target, .. }
            | Gate::CPhase { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cx { control, .. }
            | Gate::Cy { control, .. }
            | Gate::Cz { control, .. }
            | Gate::CPhase { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::CPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// The 2x2 unitary applied to the target qubit (conditioned on the control
    /// being 1 for controlled gates), row-major.
    pub fn target_matrix(&self) -> [[Complex64; 2]; 2] {
        match *self {
            Gate::Rx { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ]
            }
            Gate::Ry { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            Gate::Rz { angle, .. } => [
                [Complex64::from_polar(1.0, -angle / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, angle / 2.0)],
            ],
            Gate::H { .. } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::Cx { .. } => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Cy { .. } => [[ZERO, -I], [I, ZERO]],
            Gate::Cz { .. } => [[ONE, ZERO], [ZERO, -ONE]],
            Gate::CPhase { angle, .. } => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, angle)]],
        }
    }

    fn is_diagonal(&self) -> bool {
        matches!(
            self,
            Gate::Rz { .. } | Gate::Cz { .. } | Gate::CPhase { .. }
        )
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let target = self.target();
        if target >= n_qubits {
            return Err(Error::QubitIndex {
                index: target,
                n_qubits,
            });
        }
        if let Some(control) = self.control() {
            if control >= n_qubits || control == target {
                return Err(Error::QubitIndex {
                    index: control,
                    n_qubits,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector. The length must be a power of two (at least 2)
    /// and the squared norm must be 1 within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Shape(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::DegenerateInput(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns the state after `gate`; `self` is left untouched.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let m = gate.target_matrix();
        let target_bit = 1usize << gate.target();
        let control_mask = gate.control().map_or(0, |c| 1usize << c);

        if gate.is_diagonal() {
            let (d0, d1) = (m[0][0], m[1][1]);
            for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                if i & control_mask != control_mask {
                    continue;
                }
                *amp *= if i & target_bit == 0 { d0 } else { d1 };
            }
            return Ok(());
        }

        let len = self.amplitudes.len();
        for block in (0..len).step_by(target_bit << 1) {
            for lo in block..block + target_bit {
                if lo & control_mask != control_mask {
                    continue;
                }
                let hi = lo | target_bit;
                let a = self.amplitudes[lo];
                let b = self.amplitudes[hi];
                self.amplitudes[lo] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[hi] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply_in_place(g))
    }

    /// `<self|other> = sum_i conj(self_i) * other_i`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Shape(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`, unclamped.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }
}
