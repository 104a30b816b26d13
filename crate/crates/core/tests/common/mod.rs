//! Reference implementations used as test oracles. They are written
//! independently of the library code paths they check: dense matrices instead
//! of strided updates, enumeration instead of SMO, Jacobi sweeps instead of
//! the library eigensolver, pairwise counting instead of ranks.
#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qsvm_core::kernel::kernel_matrix;
use qsvm_core::{FeatureMapSpec, Gate, KernelMatrix, Label};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Dense simulator

pub fn identity2() -> CMat {
    CMat::identity(2, 2)
}

pub fn single_qubit_matrix(gate: &Gate) -> CMat {
    let m = |a: [Complex64; 4]| CMat::from_row_slice(2, 2, &a);
    let cos = |t: f64| (t / 2.0).cos();
    let sin = |t: f64| (t / 2.0).sin();
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match *gate {
        Gate::Rx { angle, .. } => m([
            c(cos(angle), 0.0),
            c(0.0, -sin(angle)),
            c(0.0, -sin(angle)),
            c(cos(angle), 0.0),
        ]),
        Gate::Ry { angle, .. } => m([
            c(cos(angle), 0.0),
            c(-sin(angle), 0.0),
            c(sin(angle), 0.0),
            c(cos(angle), 0.0),
        ]),
        Gate::Rz { angle, .. } => m([
            Complex64::from_polar(1.0, -angle / 2.0),
            z,
            z,
            Complex64::from_polar(1.0, angle / 2.0),
        ]),
        Gate::H { .. } => m([one, one, one, -one]).scale(std::f64::consts::FRAC_1_SQRT_2),
        Gate::Cx { .. } => m([z, one, one, z]),
        Gate::Cy { .. } => m([z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Gate::Cz { .. } => m([one, z, z, -one]),
        Gate::CPhase { angle, .. } => m([one, z, z, Complex64::from_polar(1.0, angle)]),
    }
}

/// Kronecker product of per-qubit factors; `factors[q]` acts on qubit `q`,
/// and qubit 0 is the least significant index bit.
pub fn kron_all(factors: &[CMat]) -> CMat {
    factors
        .iter()
        .rev()
        .fold(CMat::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Full `2^n x 2^n` unitary of one gate.
pub fn dense_gate(gate: &Gate, n: usize) -> CMat {
    let u = single_qubit_matrix(gate);
    let target = gate.target();
    match gate.control() {
        None => {
            let mut f = vec![identity2(); n];
            f[target] = u;
            kron_all(&f)
        }
        Some(control) => {
            let p0 =
                CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
            let p1 =
                CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
            let mut off = vec![identity2(); n];
            off[control] = p0;
            let mut on = vec![identity2(); n];
            on[control] = p1;
            on[target] = u;
            kron_all(&off) + kron_all(&on)
        }
    }
}

pub fn dense_circuit(gates: &[Gate], n: usize) -> CMat {
    gates.iter().fold(CMat::identity(1 << n, 1 << n), |acc, g| {
        dense_gate(g, n) * acc
    })
}

pub fn zero_state(n: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(1 << n, c(0.0, 0.0));
    v[0] = c(1.0, 0.0);
    v
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// |<a|b>|^2 of two dense vectors.
pub fn dense_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

pub fn random_gate(rng: &mut impl Rng, n: usize) -> Gate {
    let target = rng.random_range(0..n);
    let angle = rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
    let kind = if n == 1 {
        rng.random_range(0..4)
    } else {
        rng.random_range(0..8)
    };
    let control = if n > 1 {
        let mut q = rng.random_range(0..n - 1);
        if q >= target {
            q += 1;
        }
        q
    } else {
        0
    };
    match kind {
        0 => Gate::Rx { target, angle },
        1 => Gate::Ry { target, angle },
        2 => Gate::Rz { target, angle },
        3 => Gate::H { target },
        4 => Gate::Cx { control, target },
        5 => Gate::Cy { control, target },
        6 => Gate::Cz { control, target },
        _ => Gate::CPhase {
            control,
            target,
            angle,
        },
    }
}

// ---------------------------------------------------------------------------
// Pauli-Z feature map from its Hamiltonian form: each layer is
// exp(-i (sum_i p_i Z_i + sum_{i} p_{i,i+1} Z_i Z_{i+1})) H^n.

fn z_eigen(index: usize, q: usize) -> f64 {
    if index >> q & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn pauli_z_layer(x: &[f64], scale: f64, with_pairs: bool) -> CMat {
    let n = x.len();
    let dim = 1 << n;
    let pi = std::f64::consts::PI;
    let mut hamiltonian = CMat::zeros(dim, dim);
    for k in 0..dim {
        let mut e = 0.0;
        for (q, &v) in x.iter().enumerate() {
            e += scale * v * z_eigen(k, q);
        }
        if with_pairs {
            for q in 0..n.saturating_sub(1) {
                let w = (pi - scale * x[q]) * (pi - scale * x[q + 1]);
                e += w * z_eigen(k, q) * z_eigen(k, q + 1);
            }
        }
        hamiltonian[(k, k)] = c(e, 0.0);
    }
    let phase = (hamiltonian * c(0.0, -1.0)).exp();
    let h = dense_gate(&Gate::H { target: 0 }, 1);
    let hadamards = kron_all(&vec![h; n]);
    phase * hadamards
}

pub fn pauli_z_state(x: &[f64], scale: f64, reps: usize, with_pairs: bool) -> Vec<Complex64> {
    let layer = pauli_z_layer(x, scale, with_pairs);
    let mut v = zero_state(x.len());
    for _ in 0..reps {
        v = &layer * v;
    }
    v.iter().copied().collect()
}

/// Schmidt rank of a two-qubit pure state: 1 iff the 2x2 coefficient matrix
/// is singular.
pub fn two_qubit_concurrence(amps: &[Complex64]) -> f64 {
    assert_eq!(amps.len(), 4);
    // index = b1 b0; coefficient matrix rows by qubit 1, columns by qubit 0
    2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm()
}

// ---------------------------------------------------------------------------
// Dual QP oracle: maximise sum(a) - 1/2 a^T Q a over 0 <= a <= C, y^T a = 0,
// with Q_ij = y_i y_j K_ij, by enumerating which coefficients sit at 0, at C,
// or strictly inside, and solving the stationarity system on the free set.

pub fn dual_value(k: &DMatrix<f64>, y: &[f64], a: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += a[i] * a[j] * y[i] * y[j] * k[(i, j)];
        }
    }
    a.iter().sum::<f64>() - 0.5 * quad
}

pub fn brute_force_dual(k: &DMatrix<f64>, y: &[f64], cap: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    assert!(n <= 10);
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut a: Vec<f64> = state
            .iter()
            .map(|&s| if s == 1 { cap } else { 0.0 })
            .collect();
        let bound_sum: f64 = (0..n).map(|i| y[i] * a[i]).sum();
        if free.is_empty() {
            if bound_sum.abs() > 1e-12 {
                continue;
            }
        } else {
            // [Q_FF  y_F] [a_F]   [1 - Q_FB a_B]
            // [y_F^T  0 ] [nu ] = [  -y_B^T a_B ]
            let m = free.len();
            let mut sys = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut rhs = DVector::<f64>::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    sys[(r, s)] = y[i] * y[j] * k[(i, j)];
                }
                sys[(r, m)] = y[i];
                sys[(m, r)] = y[i];
                let mut b = 1.0;
                for j in 0..n {
                    if state[j] == 1 {
                        b -= y[i] * y[j] * k[(i, j)] * cap;
                    }
                }
                rhs[r] = b;
            }
            rhs[m] = -bound_sum;
            let Some(sol) = sys.clone().lu().solve(&rhs) else {
                continue;
            };
            if (&sys * &sol - &rhs).amax() > 1e-9 {
                continue;
            }
            let mut feasible = true;
            for (r, &i) in free.iter().enumerate() {
                if sol[r] < -1e-12 || sol[r] > cap + 1e-12 {
                    feasible = false;
                }
                a[i] = sol[r].clamp(0.0, cap);
            }
            if !feasible {
                continue;
            }
        }
        let v = dual_value(k, y, &a);
        if v > best.0 {
            best = (v, a);
        }
    }
    best
}

/// A random small training problem on a quantum or Gaussian kernel.
pub struct Problem {
    pub k: KernelMatrix,
    pub y: Vec<Label>,
    pub c: f64,
}

pub fn random_problem(seed: u64) -> Problem {
    let mut r = rng(seed);
    let n = r.random_range(2..=8);
    let d = r.random_range(1..=4);
    let data = random_unit_data(&mut r, n, d);
    let y = random_labels(&mut r, n);
    let c = [0.1, 0.5, 1.0, 2.0, 10.0][r.random_range(0..5)];
    let which = r.random_range(0..10);
    let k = if which == 9 {
        let gamma = r.random_range(0.5..5.0);
        let entries: Vec<f64> = (0..n * n)
            .map(|t| {
                let (i, j) = (t / n, t % n);
                let d2: f64 = data[i]
                    .iter()
                    .zip(&data[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                (-gamma * d2).exp()
            })
            .collect();
        KernelMatrix::new_symmetric(n, entries).unwrap()
    } else {
        let s = FeatureMapSpec::reference_suite()[which];
        kernel_matrix(&s, &data, None).unwrap()
    };
    Problem { k, y, c }
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition by cyclic Jacobi rotations.

pub fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = cs * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Sample covariance (n - 1 denominator) of row-major data.
pub fn covariance(data: &[Vec<f64>]) -> DMatrix<f64> {
    let n = data.len();
    let d = data[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| data.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    DMatrix::from_fn(d, d, |i, j| {
        data.iter()
            .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
            .sum::<f64>()
            / (n - 1) as f64
    })
}

// ---------------------------------------------------------------------------
// Metrics

/// Fraction of (positive, negative) pairs ranked correctly, ties counted half,
/// as an exact ratio of integers.
pub fn pairwise_auroc(y: &[Label], s: &[f64]) -> f64 {
    let mut twice_wins = 0u64;
    let mut pairs = 0u64;
    for (i, &yi) in y.iter().enumerate() {
        if yi != Label::Positive {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            if yj != Label::Negative {
                continue;
            }
            pairs += 1;
            twice_wins += match s[i].partial_cmp(&s[j]).unwrap() {
                std::cmp::Ordering::Greater => 2,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    twice_wins as f64 / (2 * pairs) as f64
}

// ---------------------------------------------------------------------------
// Data helpers

pub fn random_unit_data(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn random_labels(rng: &mut impl Rng, n: usize) -> Vec<Label> {
    loop {
        let y: Vec<Label> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        if y.contains(&Label::Positive) && y.contains(&Label::Negative) {
            return y;
        }
    }
}

pub const GLIOMA_GENES: [&str; 20] = [
    "IDH1", "TP53", "ATRX", "PTEN", "EGFR", "CIC", "MUC16", "PIK3CA", "NF1", "PIK3R1", "FUBP1",
    "RB1", "NOTCH1", "BCOR", "CSMD3", "SMARCA4", "GRIN2A", "IDH2", "FAT4", "PDGFRA",
];

/// Writes a synthetic clinical/mutation table shaped like the glioma grading
/// cohort: 862 patients, 23 of them with a missing cell, an age column, two
/// demographic categoricals, twenty mutation flags and an LGG/GBM grade.
/// Returns (total rows, rows with a missing cell).
pub fn write_glioma_fixture(path: &Path, seed: u64) -> (usize, usize) {
    let mut r = rng(seed);
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    let mut header = vec![
        "Grade".to_string(),
        "Gender".into(),
        "Age_at_diagnosis".into(),
        "Race".into(),
    ];
    header.extend(GLIOMA_GENES.iter().map(|g| g.to_string()));
    writeln!(f, "{}", header.join(",")).unwrap();
    let total = 862;
    let missing_rows: std::collections::BTreeSet<usize> = {
        let mut set = std::collections::BTreeSet::new();
        while set.len() < 23 {
            set.insert(r.random_range(0..total));
        }
        set
    };
    let races = [
        "white",
        "black or african american",
        "asian",
        "american indian or alaska native",
    ];
    for row in 0..total {
        let gbm = r.random_bool(0.42);
        let age: f64 = if gbm {
            r.random_range(35.0..85.0)
        } else {
            r.random_range(15.0..70.0)
        };
        let mut cells = vec![
            if gbm { "GBM" } else { "LGG" }.to_string(),
            if r.random_bool(0.58) {
                "Male"
            } else {
                "Female"
            }
            .to_string(),
            format!("{age:.2}"),
            races[r.random_range(0..races.len())].to_string(),
        ];
        for (g, _) in GLIOMA_GENES.iter().enumerate() {
            // IDH1 and ATRX mutations are far more common in lower grades
            let p = match (g, gbm) {
                (0, false) => 0.75,
                (0, true) => 0.08,
                (2, false) => 0.4,
                (2, true) => 0.05,
                (4, true) => 0.3,
                (_, _) => 0.08,
            };
            cells.push(
                if r.random_bool(p) {
                    "MUTATED"
                } else {
                    "NOT_MUTATED"
                }
                .to_string(),
            );
        }
        if missing_rows.contains(&row) {
            let col = r.random_range(1..cells.len());
            cells[col] = if r.random_bool(0.5) { "?" } else { "" }.to_string();
        }
        writeln!(f, "{}", cells.join(",")).unwrap();
    }
    (total, missing_rows.len())
}
