//! Dense model Hamiltonians `H = p^2/2 + V(phi)` in the truncated oscillator
//! basis, and their exact ground state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{
    momentum_op, position_op, tensor_product, HermitianOperator, TruncationConfig,
};
use crate::potentials::{su3_value, GaugeGroup, ModelSpec, Su2Potential};

#[derive(Debug, Clone)]
pub struct ModelHamiltonian {
    pub operator: HermitianOperator,
    pub n_qubits: u32,
    /// `None` for Hamiltonians built from a custom potential.
    pub spec: Option<ModelSpec>,
    pub truncation: TruncationConfig,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<Complex64>,
}

fn kinetic(trunc: &TruncationConfig) -> HermitianOperator {
    momentum_op(trunc).square().scale(0.5)
}

/// `p^2/2 + f(phi)` for an arbitrary real potential.
pub fn build_su2_custom<F>(trunc: &TruncationConfig, potential: F) -> Result<ModelHamiltonian>
where
    F: Fn(f64) -> f64,
{
    let n_qubits = trunc.qubits()?;
    let phi = position_op(trunc);
    let spectrum = phi.eigen();
    let values: Vec<f64> = spectrum.values.iter().map(|&x| potential(x)).collect();
    let v = spectrum.recompose(&values);
    Ok(ModelHamiltonian {
        operator: kinetic(trunc).add(&v)?,
        n_qubits,
        spec: None,
        truncation: *trunc,
    })
}

pub fn build_su2(spec: &ModelSpec, trunc: &TruncationConfig) -> Result<ModelHamiltonian> {
    if spec.group != GaugeGroup::Su2 {
        return Err(Error::SpecMismatch(format!(
            "build_su2 needs an su2 spec, got {}",
            spec.group
        )));
    }
    let potential = Su2Potential::new(spec)?;
    let mut h = build_su2_custom(trunc, |x| potential.eval(x).value)?;
    h.spec = Some(spec.clone());
    Ok(h)
}

/// `p1^2/2 + p2^2/2 + f(phi1, phi2)` on the tensor-product space.
///
/// `phi1 = phi ⊗ I` and `phi2 = I ⊗ phi` commute and are both diagonal in the
/// product of the single-variable eigenbases, so the two-variable potential
/// is evaluated on eigenvalue pairs and rotated back with `U ⊗ U`.
pub fn build_su3_custom<F>(trunc: &TruncationConfig, potential: F) -> Result<ModelHamiltonian>
where
    F: Fn(f64, f64) -> f64,
{
    let single = trunc.qubits()?;
    let n = trunc.levels();
    let identity = HermitianOperator::identity(n);
    let t = kinetic(trunc);
    let kinetic_total = tensor_product(&t, &identity).add(&tensor_product(&identity, &t))?;

    let spectrum = position_op(trunc).eigen();
    let lambda = &spectrum.values;
    let mut diag = Vec::with_capacity(n * n);
    for &a in lambda {
        for &b in lambda {
            diag.push(potential(a, b));
        }
    }
    let u = &spectrum.vectors;
    let uu: DMatrix<Complex64> = u.kronecker(u);
    let mut scaled = uu.clone();
    for (c, &d) in diag.iter().enumerate() {
        let w = Complex64::new(d, 0.0);
        for r in 0..n * n {
            scaled[(r, c)] *= w;
        }
    }
    let v = HermitianOperator::from_hermitian_unchecked(scaled * uu.adjoint());
    Ok(ModelHamiltonian {
        operator: kinetic_total.add(&v)?,
        n_qubits: 2 * single,
        spec: None,
        truncation: *trunc,
    })
}

pub fn build_su3(spec: &ModelSpec, trunc: &TruncationConfig) -> Result<ModelHamiltonian> {
    if spec.group != GaugeGroup::Su3 {
        return Err(Error::SpecMismatch(format!(
            "build_su3 needs an su3 spec, got {}",
            spec.group
        )));
    }
    spec.validate()?;
    let mut h = build_su3_custom(trunc, |a, b| su3_value(a, b, spec).value)?;
    h.spec = Some(spec.clone());
    Ok(h)
}

/// Dispatches on `spec.group`.
pub fn build(spec: &ModelSpec, trunc: &TruncationConfig) -> Result<ModelHamiltonian> {
    match spec.group {
        GaugeGroup::Su2 => build_su2(spec, trunc),
        GaugeGroup::Su3 => build_su3(spec, trunc),
    }
}

/// Lowest eigenvalue and a unit-norm eigenvector of a dense Hermitian operator.
pub fn ground_state(op: &HermitianOperator) -> GroundState {
    let spectrum = op.eigen();
    let vector = spectrum.vectors.column(0).iter().copied().collect();
    GroundState {
        energy: spectrum.values[0],
        vector,
    }
}

impl ModelHamiltonian {
    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn ground_energy(&self) -> GroundState {
        ground_state(&self.operator)
    }
}
