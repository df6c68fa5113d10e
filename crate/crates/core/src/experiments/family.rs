//! Fixed-concurrence two-qubit state family and the schemes used to average
//! over its local angles.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CVector, PureState, C64};
use crate::random::seeded;

/// `cos(theta) |0n 0n> + sin(theta) |1n 1n>` with locally rotated bases
///
/// ```text
/// |0n_i> = cos(theta_i/2) |0> + sin(theta_i/2) e^{i phi_i} |1>
/// |1n_i> = cos(theta_i/2) |1> - sin(theta_i/2) e^{-i phi_i} |0>
/// ```
///
/// Its concurrence is `sin(2 theta)` for every choice of local angles.
pub fn sample_family_state(
    theta: f64,
    theta1: f64,
    theta2: f64,
    phi1: f64,
    phi2: f64,
) -> Result<PureState> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    for (name, x) in [("theta1", theta1), ("theta2", theta2)] {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {x} outside [0, pi]"
            )));
        }
    }
    if !(phi1.is_finite() && phi2.is_finite()) {
        return Err(Error::InvalidArgument("phase angles must be finite".into()));
    }
    let local = |t: f64, p: f64| {
        let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
        let zero = [C64::from(c), C64::from_polar(s, p)];
        let one = [-C64::from_polar(s, -p), C64::from(c)];
        (zero, one)
    };
    let (z1, o1) = local(theta1, phi1);
    let (z2, o2) = local(theta2, phi2);
    let (ct, st) = (theta.cos(), theta.sin());
    let amps = CVector::from_fn(4, |k, _| {
        let (i, j) = (k >> 1, k & 1);
        z1[i] * z2[j] * ct + o1[i] * o2[j] * st
    });
    PureState::new(amps)
}

/// How the local angles `(theta1, theta2, phi1, phi2)` are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingScheme {
    /// Gauss-Legendre in `cos(theta_i)` and in `phi_i`, `n_nodes` per angle.
    Quadrature { n_nodes: usize },
    /// Bloch-uniform random angles from a seeded generator.
    MonteCarlo { n_samples: usize, seed: u64 },
    /// Explicit `[theta1, theta2, phi1, phi2]` tuples, equally weighted.
    Fixed { angles: Vec<[f64; 4]> },
}

impl Default for AveragingScheme {
    fn default() -> Self {
        AveragingScheme::Quadrature { n_nodes: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialStateFamily {
    pub theta: f64,
    #[serde(default)]
    pub scheme: AveragingScheme,
}

impl InitialStateFamily {
    /// Weighted states; the weights sum to one.
    pub fn samples(&self) -> Result<Vec<(f64, PureState)>> {
        let angles = match &self.scheme {
            AveragingScheme::Quadrature { n_nodes } => quadrature_angles(*n_nodes)?,
            AveragingScheme::MonteCarlo { n_samples, seed } => {
                if *n_samples == 0 {
                    return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
                }
                let mut rng = seeded(*seed);
                let w = 1.0 / *n_samples as f64;
                (0..*n_samples)
                    .map(|_| {
                        let t1 = (1.0 - 2.0 * rng.random::<f64>()).acos();
                        let t2 = (1.0 - 2.0 * rng.random::<f64>()).acos();
                        let p1 = TAU * rng.random::<f64>();
                        let p2 = TAU * rng.random::<f64>();
                        (w, [t1, t2, p1, p2])
                    })
                    .collect()
            }
            AveragingScheme::Fixed { angles } => {
                if angles.is_empty() {
                    return Err(Error::InvalidArgument(
                        "fixed scheme needs at least one angle set".into(),
                    ));
                }
                let w = 1.0 / angles.len() as f64;
                angles.iter().map(|a| (w, *a)).collect()
            }
        };
        angles
            .into_iter()
            .map(|(w, [t1, t2, p1, p2])| Ok((w, sample_family_state(self.theta, t1, t2, p1, p2)?)))
            .collect()
    }
}

fn quadrature_angles(n_nodes: usize) -> Result<Vec<(f64, [f64; 4])>> {
    if n_nodes == 0 {
        return Err(Error::InvalidArgument("n_nodes must be >= 1".into()));
    }
    let (x, w) = gauss_legendre(n_nodes);
    // cos(theta_i) uniform on [-1, 1]; phi_i uniform on [0, 2 pi].
    let polar: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(&u, &wu)| (u.acos(), wu / 2.0))
        .collect();
    let azimuth: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(&u, &wu)| (PI * (u + 1.0), wu / 2.0))
        .collect();
    let mut out = Vec::with_capacity(n_nodes.pow(4));
    for &(t1, w1) in &polar {
        for &(t2, w2) in &polar {
            for &(p1, w3) in &azimuth {
                for &(p2, w4) in &azimuth {
                    out.push((w1 * w2 * w3 * w4, [t1, t2, p1, p2]));
                }
            }
        }
    }
    Ok(out)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
