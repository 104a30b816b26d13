//! Fidelity kernels `k(x, x') = |<phi(x)|phi(x')>|^2` and their Gram matrices.
//!
//! Exact mode takes the squared overlap of simulated states. Sampled mode
//! replaces each entry by the all-zeros frequency of `shots` measurements of
//! the inversion circuit `U(x)^dagger U(x')`, which on a noise-free device is a
//! binomial draw with success probability equal to the exact fidelity.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_maps::{encode, FeatureMapSpec};
use crate::statevector::StateVector;

/// Fidelities within this distance of 0 or 1 are rounded to the endpoint.
///
/// States that differ only by a global phase then give exactly 1.0, so a
/// degenerate map yields a constant Gram matrix bit-for-bit.
pub const FIDELITY_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    #[default]
    Exact,
    Sampled {
        shots: u64,
    },
}

/// Dense row-major matrix of kernel values.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl KernelMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} kernel matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            symmetric: false,
        })
    }

    /// Builds a Gram matrix and marks it symmetric after checking
    /// `K[i][j] == K[j][i]` exactly.
    pub fn new_symmetric(n: usize, entries: Vec<f64>) -> Result<Self> {
        let mut m = Self::new(n, n, entries)?;
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Shape(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        m.symmetric = true;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged kernel rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Same matrix with every entry multiplied by `factor`; symmetry is kept.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Writes `# rows=R cols=C symmetric=B` followed by one comma-separated
    /// line per row. Values use the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# rows={} cols={} symmetric={}",
            self.rows, self.cols, self.symmetric
        )?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Shape("empty kernel file".into()))??;
        let mut rows = None;
        let mut cols = None;
        let mut symmetric = false;
        for field in header.trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("rows", v)) => rows = v.parse::<usize>().ok(),
                Some(("cols", v)) => cols = v.parse::<usize>().ok(),
                Some(("symmetric", v)) => symmetric = v == "true",
                _ => {}
            }
        }
        let (rows, cols) = rows
            .zip(cols)
            .ok_or_else(|| Error::Shape(format!("bad kernel header {header:?}")))?;
        let mut entries = Vec::with_capacity(rows * cols);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for v in line.split(',') {
                entries.push(
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Shape(format!("bad kernel value {v:?}: {e}")))?,
                );
            }
        }
        if symmetric && rows == cols {
            Self::new_symmetric(rows, entries)
        } else {
            Self::new(rows, cols, entries)
        }
    }
}

/// Rounds a raw squared overlap into a valid kernel value in `[0, 1]`.
pub fn clamp_fidelity(raw: f64) -> f64 {
    if raw >= 1.0 - FIDELITY_SNAP {
        1.0
    } else if raw <= FIDELITY_SNAP {
        0.0
    } else {
        raw
    }
}

fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(clamp_fidelity(a.fidelity(b)?))
}

/// Exact kernel value between two feature vectors.
pub fn kernel_entry(spec: &FeatureMapSpec, x: &[f64], x2: &[f64]) -> Result<f64> {
    check_same_dim(x.len(), x2.len())?;
    state_fidelity(&encode(spec, x)?, &encode(spec, x2)?)
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "feature vectors of dimension {a} and {b}"
        )));
    }
    Ok(())
}

/// Draws the measured all-zeros frequency for a known fidelity.
pub fn sample_fidelity(fidelity: f64, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let p = fidelity.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = Binomial::new(shots, p)
        .map_err(|e| Error::DegenerateInput(format!("binomial({shots}, {p}): {e}")))?
        .sample(&mut rng);
    Ok(hits as f64 / shots as f64)
}

/// Shot-sampled kernel value; deterministic for a fixed `seed`.
pub fn kernel_entry_sampled(
    spec: &FeatureMapSpec,
    x: &[f64],
    x2: &[f64],
    shots: u64,
    seed: u64,
) -> Result<f64> {
    sample_fidelity(kernel_entry(spec, x, x2)?, shots, seed)
}

/// Seed for entry `(i, j)` of a sampled matrix: a SplitMix64 hash of the base
/// seed and the index pair, independent of evaluation order.
pub fn entry_seed(seed: u64, i: usize, j: usize) -> u64 {
    let mut z = seed
        .wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((j as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_dataset(name: &str, data: &[Vec<f64>]) -> Result<usize> {
    let d = data
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Shape(format!("{name} is empty")))?;
    if let Some((i, row)) = data.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(Error::Shape(format!(
            "{name}[{i}] has dimension {}, expected {d}",
            row.len()
        )));
    }
    Ok(d)
}

/// Encodes every vector once, in parallel.
pub fn encode_all(spec: &FeatureMapSpec, data: &[Vec<f64>]) -> Result<Vec<StateVector>> {
    data.par_iter().map(|x| encode(spec, x)).collect()
}

/// Gram matrix of `a` (when `b` is `None`) or the `a` x `b` cross matrix.
pub fn kernel_matrix(
    spec: &FeatureMapSpec,
    a: &[Vec<f64>],
    b: Option<&[Vec<f64>]>,
) -> Result<KernelMatrix> {
    build_matrix(spec, a, b, KernelMode::Exact, 0)
}

/// Like [`kernel_matrix`], evaluating entries according to `mode`. In sampled
/// mode entry `(i, j)` uses [`entry_seed`]`(seed, i, j)`; the symmetric case
/// samples each unordered pair once and mirrors it.
pub fn kernel_matrix_with_mode(
    spec: &FeatureMapSpec,
    a: &[Vec<f64>],
    b: Option<&[Vec<f64>]>,
    mode: KernelMode,
    seed: u64,
) -> Result<KernelMatrix> {
    build_matrix(spec, a, b, mode, seed)
}

fn build_matrix(
    spec: &FeatureMapSpec,
    a: &[Vec<f64>],
    b: Option<&[Vec<f64>]>,
    mode: KernelMode,
    seed: u64,
) -> Result<KernelMatrix> {
    let d = check_dataset("A", a)?;
    if let Some(b) = b {
        check_same_dim(d, check_dataset("B", b)?)?;
    }
    if let KernelMode::Sampled { shots: 0 } = mode {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let left = encode_all(spec, a)?;
    let right = match b {
        Some(b) => Some(encode_all(spec, b)?),
        None => None,
    };

    let entry = |i: usize, j: usize, u: &StateVector, v: &StateVector| -> Result<f64> {
        let exact = state_fidelity(u, v)?;
        match mode {
            KernelMode::Exact => Ok(exact),
            KernelMode::Sampled { shots } => sample_fidelity(exact, shots, entry_seed(seed, i, j)),
        }
    };

    match right {
        Some(right) => {
            let cols = right.len();
            let rows: Vec<Vec<f64>> = left
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    right
                        .iter()
                        .enumerate()
                        .map(|(j, v)| entry(i, j, u, v))
                        .collect()
                })
                .collect::<Result<_>>()?;
            KernelMatrix::new(left.len(), cols, rows.concat())
        }
        None => {
            let n = left.len();
            // Row i holds entries (i, j) for j >= i.
            let upper: Vec<Vec<f64>> = left
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    left[i..]
                        .iter()
                        .enumerate()
                        .map(|(off, v)| entry(i, i + off, u, v))
                        .collect()
                })
                .collect::<Result<_>>()?;
            let mut entries = vec![0.0; n * n];
            for (i, row) in upper.iter().enumerate() {
                for (off, &v) in row.iter().enumerate() {
                    let j = i + off;
                    entries[i * n + j] = v;
                    entries[j * n + i] = v;
                }
            }
            KernelMatrix::new_symmetric(n, entries)
        }
    }
}
