//! Reference configurations with their known energies and Pauli counts, and
//! a sweep over the convention flags that those values leave open.

use std::fmt::Write as _;

use crate::error::Result;
use crate::hamiltonian::build;
use crate::oscillator::TruncationConfig;
use crate::pauli::{decompose, DEFAULT_ZERO_THRESHOLD};
use crate::potentials::{DensityDomain, ModelSpec, ThermalForm};

/// Known values for one reference configuration.
#[derive(Debug, Clone)]
pub struct ReferenceTarget {
    pub name: &'static str,
    pub spec: ModelSpec,
    pub qubits: u32,
    pub pauli_terms: usize,
    pub exact: f64,
    pub vqe: f64,
}

pub fn reference_targets() -> Vec<ReferenceTarget> {
    vec![
        ReferenceTarget {
            name: "su2 vacuum",
            spec: ModelSpec::su2_vacuum(),
            qubits: 4,
            pauli_terms: 71,
            exact: 0.442_567_3,
            vqe: 0.442_631_0,
        },
        ReferenceTarget {
            name: "su2 thermal",
            spec: ModelSpec::su2_thermal(),
            qubits: 4,
            pauli_terms: 55,
            exact: 0.466_171_83,
            vqe: 0.466_172_28,
        },
        ReferenceTarget {
            name: "su2 density",
            spec: ModelSpec::su2_density(),
            qubits: 4,
            pauli_terms: 55,
            exact: -7.320_517_88,
            vqe: -7.320_517_82,
        },
        ReferenceTarget {
            name: "su3 vacuum",
            spec: ModelSpec::su3_vacuum(),
            qubits: 8,
            pauli_terms: 9137,
            exact: -21.988_081_68,
            vqe: -21.793_084_965,
        },
    ]
}

/// Convention variants tried for each reference.
pub fn candidate_conventions(target: &ReferenceTarget) -> Vec<(String, ModelSpec)> {
    let base = target.spec.clone();
    match base.scenario {
        crate::potentials::Scenario::Thermal => {
            let mut out = Vec::new();
            for m0 in [false, true] {
                out.push((
                    format!("double_sum, include_m_zero={m0}"),
                    ModelSpec {
                        thermal_form: ThermalForm::DoubleSum,
                        include_m_zero: m0,
                        ..base.clone()
                    },
                ));
            }
            for consts in [false, true] {
                out.push((
                    format!("high_t, include_constant_terms={consts}"),
                    ModelSpec {
                        thermal_form: ThermalForm::HighT,
                        include_constant_terms: consts,
                        ..base.clone()
                    },
                ));
            }
            out
        }
        crate::potentials::Scenario::Density => [DensityDomain::Mod2Pi, DensityDomain::Raw]
            .into_iter()
            .map(|d| {
                (
                    format!("density_domain={d}"),
                    ModelSpec {
                        density_domain: d,
                        ..base.clone()
                    },
                )
            })
            .collect(),
        crate::potentials::Scenario::Vacuum => vec![("default".to_string(), base)],
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationRow {
    pub reference: &'static str,
    pub convention: String,
    pub is_default: bool,
    pub exact: f64,
    pub target_exact: f64,
    /// Term counts at thresholds 1e-8, 1e-10, 1e-12.
    pub pauli_terms: [usize; 3],
    pub target_pauli_terms: usize,
}

impl CalibrationRow {
    pub fn exact_error(&self) -> f64 {
        self.exact - self.target_exact
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub levels: usize,
    pub rows: Vec<CalibrationRow>,
}

pub const SENSITIVITY_THRESHOLDS: [f64; 3] = [1e-8, DEFAULT_ZERO_THRESHOLD, 1e-12];

pub fn calibrate(trunc: &TruncationConfig) -> Result<CalibrationReport> {
    let mut rows = Vec::new();
    for target in reference_targets() {
        for (label, spec) in candidate_conventions(&target) {
            let h = build(&spec, trunc)?;
            let exact = h.ground_energy().energy;
            let full = decompose(&h.operator, 0.0)?;
            let mut counts = [0usize; 3];
            for (slot, th) in counts.iter_mut().zip(SENSITIVITY_THRESHOLDS) {
                *slot = full.terms().iter().filter(|(_, c)| c.abs() > th).count();
            }
            rows.push(CalibrationRow {
                reference: target.name,
                convention: label,
                is_default: spec == target.spec,
                exact,
                target_exact: target.exact,
                pauli_terms: counts,
                target_pauli_terms: target.pauli_terms,
            });
        }
    }
    Ok(CalibrationReport {
        levels: trunc.levels(),
        rows,
    })
}

impl CalibrationReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Convention calibration\n");
        let _ = writeln!(
            s,
            "Oscillator levels per Wilson line: {}. `L = V = N_F = 1`, series cutoff 1000, \
             thermal image cutoff 1000. Pauli counts are listed at thresholds 1e-8 / 1e-10 / 1e-12.\n",
            self.levels
        );
        let _ = writeln!(
            s,
            "| reference | convention | default | exact | reference exact | difference | Pauli terms | reference terms |"
        );
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.8} | {:.8} | {:+.3e} | {} / {} / {} | {} |",
                r.reference,
                r.convention,
                if r.is_default { "yes" } else { "" },
                r.exact,
                r.target_exact,
                r.exact_error(),
                r.pauli_terms[0],
                r.pauli_terms[1],
                r.pauli_terms[2],
                r.target_pauli_terms
            );
        }
        s
    }
}
