//! Exact reduced dynamics of qubits coupled through `sigma_z` to a common
//! bosonic bath.
//!
//! The bath enters only through two symmetric matrices over the physical
//! qubits: the dephasing correlations `Gamma_jk(t)` and the induced coupling
//! `V_jk`. Both the dephasing superoperator and the induced unitary
//! `U = exp(i t sum_{j<k} V_jk Z_j Z_k)` are diagonal in the computational
//! basis, so a density-matrix element `rho_ab` evolves by a scalar factor
//!
//! ```text
//! rho_ab(t) = rho_ab(0) * exp(-D_ab(t)) * exp(i phi_ab(t))
//! D_ab(t)   = sum_{j,k} Gamma_jk(t) (s_j(b) - s_j(a)) (s_k(b) - s_k(a))
//! phi_ab(t) = t * sum_{j<k} V_jk (s_j(a) s_k(a) - s_j(b) s_k(b))
//! ```
//!
//! where `s_j(a) = +1` for bit 0 and `-1` for bit 1. With this normalization a
//! two-qubit Bell state `(|00> + |11>)/sqrt 2` has concurrence
//! `exp(-4 (Gamma_11 + 2 Gamma_12 + Gamma_22))`, and the concurrence created
//! from `|++>` oscillates as `|sin(2 V t)|`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qstate::{hermitian_eigensystem, CMatrix, DensityMatrix, C64};

/// Symmetry tolerance for bath matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// How the double sum over qubit pairs in the induced unitary is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingConvention {
    /// Each unordered pair `j < k` contributes `V_jk t Z_j Z_k`.
    #[default]
    UnorderedPairs,
    /// Both `(j, k)` and `(k, j)` contribute, doubling the effective coupling.
    OrderedPairs,
}

impl CouplingConvention {
    fn pair_weight(self) -> f64 {
        match self {
            CouplingConvention::UnorderedPairs => 1.0,
            CouplingConvention::OrderedPairs => 2.0,
        }
    }
}

/// Time profile `g(t)` with `Gamma_jk(t) = rate_jk * g(t)`.
pub type GammaProfile = fn(f64) -> f64;

fn linear_profile(t: f64) -> f64 {
    t
}

#[derive(Debug, Clone)]
pub struct BathSpec {
    gamma_rate: DMatrix<f64>,
    coupling: DMatrix<f64>,
    convention: CouplingConvention,
    profile: GammaProfile,
}

fn check_symmetric(name: &str, m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!("{name} must be square")));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (m[(i, j)], m[(j, i)]);
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} has a non-finite entry"
                )));
            }
            if (x - y).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidArgument(format!(
                    "{name} is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

impl BathSpec {
    pub fn new(gamma_rate: DMatrix<f64>, coupling: DMatrix<f64>) -> Result<Self> {
        check_symmetric("gamma_rate", &gamma_rate)?;
        check_symmetric("coupling", &coupling)?;
        if gamma_rate.nrows() != coupling.nrows() {
            return Err(Error::DimensionMismatch {
                expected: gamma_rate.nrows(),
                actual: coupling.nrows(),
            });
        }
        if gamma_rate.nrows() == 0 {
            return Err(Error::InvalidArgument("bath over zero qubits".into()));
        }
        let complex = gamma_rate.map(C64::from);
        let spectrum = hermitian_eigensystem(&complex)?;
        let scale = gamma_rate.amax().max(1.0);
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -SYMMETRY_TOL * scale {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            gamma_rate,
            coupling,
            convention: CouplingConvention::default(),
            profile: linear_profile,
        })
    }

    /// `V_jk = v` for every `j != k` and `Gamma_dot_jk = gamma_rate` for every
    /// `j, k` (fully correlated dephasing).
    pub fn uniform(n_physical: usize, v: f64, gamma_rate: f64) -> Result<Self> {
        let gamma = DMatrix::from_element(n_physical, n_physical, gamma_rate);
        let coupling =
            DMatrix::from_fn(n_physical, n_physical, |i, j| if i == j { 0.0 } else { v });
        Self::new(gamma, coupling)
    }

    /// `V = 1`, `Gamma(t) = 0.1 t` on every qubit pair.
    pub fn default_bath(n_physical: usize) -> Self {
        Self::uniform(n_physical, 1.0, 0.1).expect("uniform defaults are valid")
    }

    pub fn with_convention(mut self, convention: CouplingConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Replaces the linear `Gamma(t) = rate * t` growth with `rate * g(t)`.
    /// `g` must vanish at zero and be non-decreasing.
    pub fn with_profile(mut self, profile: GammaProfile) -> Result<Self> {
        if profile(0.0) != 0.0 {
            return Err(Error::InvalidArgument(
                "Gamma profile must vanish at t = 0".into(),
            ));
        }
        self.profile = profile;
        Ok(self)
    }

    pub fn n_physical(&self) -> usize {
        self.gamma_rate.nrows()
    }

    pub fn gamma_rate(&self) -> &DMatrix<f64> {
        &self.gamma_rate
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn convention(&self) -> CouplingConvention {
        self.convention
    }

    /// `Gamma_jk(t)`.
    pub fn gamma_at(&self, t: f64) -> DMatrix<f64> {
        &self.gamma_rate * (self.profile)(t)
    }

    /// Restriction of the bath to a subset of qubits, in the given order.
    pub fn restrict(&self, qubits: &[usize]) -> Result<BathSpec> {
        let n = self.n_physical();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        let pick = |m: &DMatrix<f64>| {
            DMatrix::from_fn(qubits.len(), qubits.len(), |i, j| m[(qubits[i], qubits[j])])
        };
        Ok(BathSpec {
            gamma_rate: pick(&self.gamma_rate),
            coupling: pick(&self.coupling),
            convention: self.convention,
            profile: self.profile,
        })
    }
}

/// A computational-basis label of fixed length; bit 0 is the leftmost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bitstring {
    value: usize,
    len: usize,
}

impl Bitstring {
    pub fn new(value: usize, len: usize) -> Result<Self> {
        if len == 0 || len >= usize::BITS as usize || value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "{value} does not fit in {len} bits"
            )));
        }
        Ok(Self { value, len })
    }

    pub fn parse(bits: &str) -> Result<Self> {
        let value = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::InvalidArgument(format!("bad bit string {bits:?}")))?;
        Self::new(value, bits.len())
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `sigma_z` eigenvalue of qubit `j`.
    pub fn sign(&self, j: usize) -> f64 {
        if (self.value >> (self.len - 1 - j)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn check_lengths(a: &Bitstring, b: &Bitstring, bath: &BathSpec) -> Result<()> {
    for s in [a, b] {
        if s.len() != bath.n_physical() {
            return Err(Error::DimensionMismatch {
                expected: bath.n_physical(),
                actual: s.len(),
            });
        }
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

fn exponent_from(gamma: &DMatrix<f64>, a: &Bitstring, b: &Bitstring) -> f64 {
    let n = a.len();
    let delta: Vec<f64> = (0..n).map(|j| b.sign(j) - a.sign(j)).collect();
    let mut sum = 0.0;
    for j in 0..n {
        if delta[j] == 0.0 {
            continue;
        }
        for k in 0..n {
            sum += gamma[(j, k)] * delta[j] * delta[k];
        }
    }
    sum.max(0.0)
}

fn zz_energy(coupling: &DMatrix<f64>, s: &Bitstring) -> f64 {
    let n = s.len();
    let mut e = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            e += coupling[(j, k)] * s.sign(j) * s.sign(k);
        }
    }
    e
}

/// Decay exponent `D_ab(t)` of the element `rho_ab`; zero when `a == b`.
pub fn damping_exponent(a: &Bitstring, b: &Bitstring, bath: &BathSpec, t: f64) -> Result<f64> {
    check_lengths(a, b, bath)?;
    check_time(t)?;
    Ok(exponent_from(&bath.gamma_at(t), a, b))
}

/// Phase `phi_ab(t)` picked up by `rho_ab` from the induced unitary.
pub fn coupling_phase(a: &Bitstring, b: &Bitstring, bath: &BathSpec, t: f64) -> Result<f64> {
    check_lengths(a, b, bath)?;
    check_time(t)?;
    let w = bath.convention.pair_weight();
    Ok(w * t * (zz_energy(&bath.coupling, a) - zz_energy(&bath.coupling, b)))
}

/// Element-wise multipliers `exp(-D_ab) exp(i phi_ab)` for a fixed bath and
/// duration. Immutable once built and safe to share between threads.
#[derive(Debug, Clone)]
pub struct DephasingFactors {
    factors: CMatrix,
    duration: f64,
}

impl DephasingFactors {
    pub fn new(bath: &BathSpec, t: f64) -> Result<Self> {
        check_time(t)?;
        let n = bath.n_physical();
        let dim = 1usize << n;
        let gamma = bath.gamma_at(t);
        let w = bath.convention.pair_weight();
        let labels: Vec<Bitstring> = (0..dim).map(|i| Bitstring { value: i, len: n }).collect();
        let energy: Vec<f64> = labels
            .iter()
            .map(|s| zz_energy(&bath.coupling, s))
            .collect();
        let factors = CMatrix::from_fn(dim, dim, |a, b| {
            if a == b {
                return C64::new(1.0, 0.0);
            }
            let damp = exponent_from(&gamma, &labels[a], &labels[b]);
            let phase = w * t * (energy[a] - energy[b]);
            C64::from_polar((-damp).exp(), phase)
        });
        Ok(Self {
            factors,
            duration: t,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dim(&self) -> usize {
        self.factors.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.factors
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        DensityMatrix::from_matrix_unchecked(rho.matrix().component_mul(&self.factors))
    }

    /// Same map on an arbitrary (not necessarily physical) operator.
    pub fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        op.component_mul(&self.factors)
    }
}

/// `rho(t) = $[U rho(0) U^dagger]`.
pub fn evolve(rho: &DensityMatrix, bath: &BathSpec, t: f64) -> Result<DensityMatrix> {
    if rho.n_qubits() != bath.n_physical() {
        return Err(Error::DimensionMismatch {
            expected: bath.n_physical(),
            actual: rho.n_qubits(),
        });
    }
    DephasingFactors::new(bath, t)?.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn bits(s: &str) -> Bitstring {
        Bitstring::parse(s).unwrap()
    }

    fn bath2(g11: f64, g12: f64, g22: f64, v: f64) -> BathSpec {
        BathSpec::new(dmatrix![g11, g12; g12, g22], dmatrix![0.0, v; v, 0.0]).unwrap()
    }

    #[test]
    fn diagonal_elements_are_never_damped() {
        let bath = BathSpec::default_bath(3);
        for a in 0..8 {
            let s = Bitstring::new(a, 3).unwrap();
            assert_eq!(damping_exponent(&s, &s, &bath, 2.5).unwrap(), 0.0);
            assert_eq!(coupling_phase(&s, &s, &bath, 2.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_qubit_flip_decays_with_four_gamma() {
        let bath = BathSpec::new(dmatrix![0.3], dmatrix![0.0]).unwrap();
        let e = damping_exponent(&bits("0"), &bits("1"), &bath, 2.0).unwrap();
        assert_abs_diff_eq!(e, 4.0 * 0.6, epsilon = 1e-15);
    }

    #[test]
    fn two_qubit_exponents_match_bell_forms() {
        let bath = bath2(0.1, 0.03, 0.2, 0.0);
        let t = 1.5;
        let (g11, g12, g22) = (0.1 * t, 0.03 * t, 0.2 * t);
        let e = damping_exponent(&bits("00"), &bits("11"), &bath, t).unwrap();
        assert_abs_diff_eq!(e, 4.0 * (g11 + 2.0 * g12 + g22), epsilon = 1e-14);
        let e = damping_exponent(&bits("01"), &bits("10"), &bath, t).unwrap();
        assert_abs_diff_eq!(e, 4.0 * (g11 - 2.0 * g12 + g22), epsilon = 1e-14);
    }

    #[test]
    fn single_qubit_has_no_coupling_phase() {
        let bath = BathSpec::new(dmatrix![0.1], dmatrix![5.0]).unwrap();
        assert_eq!(
            coupling_phase(&bits("0"), &bits("1"), &bath, 3.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn two_qubit_coupling_phase() {
        let v = 0.7;
        let t = 0.4;
        let bath = bath2(0.0, 0.0, 0.0, v);
        let p = coupling_phase(&bits("00"), &bits("01"), &bath, t).unwrap();
        assert_abs_diff_eq!(p, 2.0 * v * t, epsilon = 1e-15);
        let ordered = bath.with_convention(CouplingConvention::OrderedPairs);
        let p = coupling_phase(&bits("00"), &bits("01"), &ordered, t).unwrap();
        assert_abs_diff_eq!(p, 4.0 * v * t, epsilon = 1e-15);
    }

    #[test]
    fn length_mismatch_and_negative_time_are_rejected() {
        let bath = BathSpec::default_bath(2);
        assert!(damping_exponent(&bits("0"), &bits("01"), &bath, 1.0).is_err());
        assert!(coupling_phase(&bits("000"), &bits("001"), &bath, 1.0).is_err());
        assert!(damping_exponent(&bits("00"), &bits("01"), &bath, -1.0).is_err());
        assert!(DephasingFactors::new(&bath, f64::NAN).is_err());
    }

    #[test]
    fn bath_construction_rejects_bad_matrices() {
        assert!(BathSpec::new(dmatrix![0.1, 0.2; 0.0, 0.1], dmatrix![0.0, 0.0; 0.0, 0.0]).is_err());
        // Eigenvalues 0.1 +- 0.5: indefinite.
        assert!(matches!(
            BathSpec::new(dmatrix![0.1, 0.5; 0.5, 0.1], dmatrix![0.0, 0.0; 0.0, 0.0]),
            Err(Error::NotPositive { .. })
        ));
        assert!(BathSpec::new(dmatrix![0.1], dmatrix![0.0, 0.0; 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let bath = BathSpec::default_bath(3);
        let rho = DensityMatrix::maximally_mixed(3);
        let f = DephasingFactors::new(&bath, 0.0).unwrap();
        for z in f.matrix().iter() {
            assert_eq!(*z, C64::new(1.0, 0.0));
        }
        assert_eq!(evolve(&rho, &bath, 0.0).unwrap(), rho);
    }

    #[test]
    fn evolve_rejects_wrong_register() {
        let bath = BathSpec::default_bath(3);
        assert!(evolve(&DensityMatrix::maximally_mixed(2), &bath, 1.0).is_err());
    }

    #[test]
    fn custom_profile_scales_gamma() {
        let bath = BathSpec::uniform(2, 0.0, 0.1)
            .unwrap()
            .with_profile(|t| t * t)
            .unwrap();
        let e = damping_exponent(
            &bits("0"),
            &bits("1").clone(),
            &bath.restrict(&[0]).unwrap(),
            3.0,
        )
        .unwrap();
        assert_abs_diff_eq!(e, 4.0 * 0.1 * 9.0, epsilon = 1e-14);
        assert!(BathSpec::default_bath(1).with_profile(|t| t + 1.0).is_err());
    }

    #[test]
    fn factor_table_agrees_with_pointwise_functions() {
        let bath = BathSpec::new(
            dmatrix![0.2, 0.05, 0.0; 0.05, 0.1, 0.02; 0.0, 0.02, 0.3],
            dmatrix![0.0, 1.0, 0.3; 1.0, 0.0, -0.4; 0.3, -0.4, 0.0],
        )
        .unwrap();
        let t = 0.8;
        let f = DephasingFactors::new(&bath, t).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let (sa, sb) = (Bitstring::new(a, 3).unwrap(), Bitstring::new(b, 3).unwrap());
                let d = damping_exponent(&sa, &sb, &bath, t).unwrap();
                let p = coupling_phase(&sa, &sb, &bath, t).unwrap();
                let want = C64::from_polar((-d).exp(), p);
                assert_abs_diff_eq!((f.matrix()[(a, b)] - want).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }
}
