//! One-loop effective potentials of the Wilson-line variables.
//!
//! All cosine series are summed directly up to a cutoff and carry a certified
//! bound on the discarded tail. Natural units: `L` is the circle radius, `V`
//! the spatial volume factor, `beta` the inverse temperature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Apery's constant.
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

pub const DEFAULT_SERIES_CUTOFF: usize = 1000;
pub const DEFAULT_M_CUTOFF: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeGroup {
    Su2,
    Su3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Vacuum,
    Thermal,
    Density,
}

/// Which finite-temperature expression is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalForm {
    /// Vacuum potential plus the image-sum correction over `(l, m)`.
    DoubleSum,
    /// Leading small-`beta` expansion.
    HighT,
}

/// How the finite-density polynomial is extended outside `(0, 2pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityDomain {
    /// Reduce the argument into `[0, 2pi)` first.
    Mod2Pi,
    /// Use the argument as is; the outer branches extend past the ends.
    Raw,
}

macro_rules! impl_flag_text {
    ($ty:ty, $($variant:path => $text:literal),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s = match self { $($variant => $text),+ };
                f.write_str(s)
            }
        }

        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($variant),)+
                    other => Err(Error::Parse(format!(
                        "unknown {} '{}'", stringify!($ty), other
                    ))),
                }
            }
        }
    };
}

impl_flag_text!(GaugeGroup, GaugeGroup::Su2 => "su2", GaugeGroup::Su3 => "su3");
impl_flag_text!(
    Scenario,
    Scenario::Vacuum => "vacuum",
    Scenario::Thermal => "thermal",
    Scenario::Density => "density",
);
impl_flag_text!(ThermalForm, ThermalForm::DoubleSum => "double_sum", ThermalForm::HighT => "high_t");
impl_flag_text!(DensityDomain, DensityDomain::Mod2Pi => "mod_2pi", DensityDomain::Raw => "raw");

/// Gauge group, scenario, physical parameters and series conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub group: GaugeGroup,
    pub scenario: Scenario,
    pub n_f: u32,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "V")]
    pub volume: f64,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub series_cutoff: usize,
    pub m_cutoff: usize,
    pub thermal_form: ThermalForm,
    pub include_m_zero: bool,
    pub include_constant_terms: bool,
    pub density_domain: DensityDomain,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            group: GaugeGroup::Su2,
            scenario: Scenario::Vacuum,
            n_f: 1,
            l: 1.0,
            volume: 1.0,
            beta: None,
            mu: None,
            series_cutoff: DEFAULT_SERIES_CUTOFF,
            m_cutoff: DEFAULT_M_CUTOFF,
            thermal_form: ThermalForm::DoubleSum,
            include_m_zero: false,
            include_constant_terms: false,
            density_domain: DensityDomain::Mod2Pi,
        }
    }
}

impl ModelSpec {
    /// SU(2) with one fundamental fermion at zero temperature.
    pub fn su2_vacuum() -> Self {
        Self::default()
    }

    /// SU(2) at the temperature where `V L / (L^3 beta) = 1`.
    pub fn su2_thermal() -> Self {
        let base = Self::default();
        let beta = base.volume * base.l / base.l.powi(3);
        Self {
            scenario: Scenario::Thermal,
            beta: Some(beta),
            ..base
        }
    }

    /// SU(2) at zero temperature with chemical potential `mu = pi/2`.
    pub fn su2_density() -> Self {
        Self {
            scenario: Scenario::Density,
            mu: Some(PI / 2.0),
            ..Self::default()
        }
    }

    pub fn su3_vacuum() -> Self {
        Self {
            group: GaugeGroup::Su3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "L must be positive, got {}",
                self.l
            )));
        }
        if !(self.volume.is_finite() && self.volume > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "V must be positive, got {}",
                self.volume
            )));
        }
        if self.series_cutoff == 0 {
            return Err(Error::InvalidParameter("series cutoff must be >= 1".into()));
        }
        if self.m_cutoff == 0 {
            return Err(Error::InvalidParameter("m cutoff must be >= 1".into()));
        }
        if self.group == GaugeGroup::Su3 && self.scenario != Scenario::Vacuum {
            return Err(Error::SpecMismatch(format!(
                "su3 supports only the vacuum scenario, got {}",
                self.scenario
            )));
        }
        match self.scenario {
            Scenario::Vacuum => {}
            Scenario::Thermal => {
                self.beta_checked()?;
            }
            Scenario::Density => {
                self.mu_checked()?;
            }
        }
        Ok(())
    }

    fn beta_checked(&self) -> Result<f64> {
        match self.beta {
            Some(b) if b.is_finite() && b > 0.0 => Ok(b),
            Some(b) => Err(Error::InvalidParameter(format!(
                "beta must be positive, got {b}"
            ))),
            None => Err(Error::InvalidParameter(
                "thermal scenario requires beta".into(),
            )),
        }
    }

    fn mu_checked(&self) -> Result<f64> {
        match self.mu {
            Some(mu) if mu.is_finite() && mu >= 0.0 => {
                let mu_l = mu * self.l;
                // tolerate rounding of mu = pi / L
                if mu_l > PI * (1.0 + 4.0 * f64::EPSILON) {
                    Err(Error::UnsupportedChemicalPotential { mu_l })
                } else {
                    Ok(mu)
                }
            }
            Some(mu) => Err(Error::InvalidParameter(format!(
                "mu must be >= 0, got {mu}"
            ))),
            None => Err(Error::InvalidParameter(
                "density scenario requires mu".into(),
            )),
        }
    }

    fn inv_l4_pi2(&self) -> f64 {
        1.0 / (self.l.powi(4) * PI * PI)
    }
}

/// Cutoff together with a guaranteed bound on the absolute truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTail {
    pub cutoff: usize,
    pub tail_bound: f64,
}

/// Potential value with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    pub tail: SeriesTail,
}

/// Upper bound on `sum_{l > cutoff} l^-power`, from the integral test:
/// `cutoff^(1-power) / (power-1)`.
pub fn series_tail_bound(cutoff: usize, power: u32) -> f64 {
    assert!(cutoff >= 1, "series cutoff must be >= 1");
    assert!(power >= 2, "series power must be >= 2");
    let c = cutoff as f64;
    c.powi(1 - power as i32) / (power as f64 - 1.0)
}

/// `sum_{l=1}^{cutoff} weight(l) * cos(l * x)`, summed from the smallest terms up.
fn cosine_series(cutoff: usize, x: f64, weight: impl Fn(usize) -> f64) -> f64 {
    (1..=cutoff)
        .rev()
        .map(|l| weight(l) * (l as f64 * x).cos())
        .sum()
}

fn inv_pow(l: usize, p: i32) -> f64 {
    (l as f64).powi(-p)
}

/// Per-`l` weights of the thermal image sum, independent of `phi`.
#[derive(Debug, Clone)]
struct ThermalWeights {
    // sum over m of 1/(L^2 l^2 + beta^2 m^2)^2
    gauge: Vec<f64>,
    // same with (-1)^m
    fermion: Vec<f64>,
}

impl ThermalWeights {
    fn new(spec: &ModelSpec, beta: f64) -> Self {
        let mut gauge = Vec::with_capacity(spec.series_cutoff);
        let mut fermion = Vec::with_capacity(spec.series_cutoff);
        let l2 = spec.l * spec.l;
        let b2 = beta * beta;
        for l in 1..=spec.series_cutoff {
            let a = l2 * (l * l) as f64;
            let mut plain = 0.0;
            let mut alternating = 0.0;
            for m in (1..=spec.m_cutoff).rev() {
                let d = a + b2 * (m * m) as f64;
                let t = 1.0 / (d * d);
                plain += t;
                alternating += if m % 2 == 0 { t } else { -t };
            }
            plain *= 2.0;
            alternating *= 2.0;
            if spec.include_m_zero {
                plain += 1.0 / (a * a);
                alternating += 1.0 / (a * a);
            }
            gauge.push(plain);
            fermion.push(alternating);
        }
        Self { gauge, fermion }
    }
}

/// Single-variable SU(2) potential with any scenario-dependent weights
/// precomputed, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Su2Potential {
    spec: ModelSpec,
    thermal: Option<ThermalWeights>,
}

impl Su2Potential {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        if spec.group != GaugeGroup::Su2 {
            return Err(Error::SpecMismatch(format!(
                "expected su2 spec, got {}",
                spec.group
            )));
        }
        spec.validate()?;
        let thermal = match (spec.scenario, spec.thermal_form) {
            (Scenario::Thermal, ThermalForm::DoubleSum) => {
                Some(ThermalWeights::new(spec, spec.beta_checked()?))
            }
            _ => None,
        };
        Ok(Self {
            spec: spec.clone(),
            thermal,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn eval(&self, phi: f64) -> PotentialValue {
        match self.spec.scenario {
            Scenario::Vacuum => vacuum_value(phi, &self.spec),
            Scenario::Thermal => match self.spec.thermal_form {
                ThermalForm::DoubleSum => {
                    let weights = self.thermal.as_ref().expect("weights built for double sum");
                    double_sum_value(phi, &self.spec, weights)
                }
                ThermalForm::HighT => high_t_value(phi, &self.spec),
            },
            Scenario::Density => density_value(phi, &self.spec),
        }
    }
}

fn vacuum_value(phi: f64, spec: &ModelSpec) -> PotentialValue {
    let cutoff = spec.series_cutoff;
    let pref = spec.inv_l4_pi2();
    let gauge_osc = cosine_series(cutoff, phi, |l| inv_pow(l, 4));
    let zeta4_partial: f64 = (1..=cutoff).rev().map(|l| inv_pow(l, 4)).sum();
    let fermion_osc = cosine_series(cutoff, phi / 2.0, |l| inv_pow(l, 4));
    let n_f = spec.n_f as f64;
    let value =
        -2.0 * pref * (2.0 * gauge_osc + zeta4_partial) + n_f * 4.0 * pref * 2.0 * fermion_osc;
    let amplitude = 2.0 * pref * 3.0 + n_f * 4.0 * pref * 2.0;
    PotentialValue {
        value,
        tail: SeriesTail {
            cutoff,
            tail_bound: amplitude * series_tail_bound(cutoff, 4),
        },
    }
}

fn double_sum_value(phi: f64, spec: &ModelSpec, w: &ThermalWeights) -> PotentialValue {
    let vac = vacuum_value(phi, spec);
    let beta = spec.beta.expect("validated");
    let n_f = spec.n_f as f64;
    let gauge = cosine_series(spec.series_cutoff, 2.0 * phi, |l| w.gauge[l - 1]);
    let fermion = cosine_series(spec.series_cutoff, phi, |l| w.fermion[l - 1]);
    // gauge piece carries no 1/L^4, fermion piece does
    let correction = -2.0 / (PI * PI) * gauge + n_f * 4.0 * spec.inv_l4_pi2() * fermion;

    let l = spec.l;
    let l_tail = series_tail_bound(spec.series_cutoff, 4) / l.powi(4)
        + PI / (2.0 * beta * l.powi(3)) * series_tail_bound(spec.series_cutoff, 3);
    let m_tail = PI / (2.0 * l * beta.powi(3)) * series_tail_bound(spec.m_cutoff, 3);
    let amplitude = 2.0 / (PI * PI) + n_f * 4.0 * spec.inv_l4_pi2();
    PotentialValue {
        value: vac.value + correction,
        tail: SeriesTail {
            cutoff: spec.series_cutoff,
            tail_bound: vac.tail.tail_bound + amplitude * (l_tail + m_tail),
        },
    }
}

fn high_t_value(phi: f64, spec: &ModelSpec) -> PotentialValue {
    let beta = spec.beta.expect("validated");
    let (l, v) = (spec.l, spec.volume);
    let n_f = spec.n_f as f64;
    let coupling = 2.0 * v / l.powi(3) * (l / beta);
    let osc = cosine_series(spec.series_cutoff, 2.0 * phi, |k| inv_pow(k, 3));
    let mut value = -coupling * 2.0 * osc;
    if spec.include_constant_terms {
        let dof = 2.0 * 3.0 + 7.0 / 8.0 * 4.0 * n_f;
        value -= v * l * PI * PI / 90.0 * dof / beta.powi(4);
        value -= coupling * ZETA3;
    }
    PotentialValue {
        value,
        tail: SeriesTail {
            cutoff: spec.series_cutoff,
            tail_bound: coupling * 2.0 * series_tail_bound(spec.series_cutoff, 3),
        },
    }
}

fn density_value(phi: f64, spec: &ModelSpec) -> PotentialValue {
    let mu_l = spec.mu.expect("validated") * spec.l;
    let two_pi = 2.0 * PI;
    let x = match spec.density_domain {
        DensityDomain::Mod2Pi => {
            let r = phi.rem_euclid(two_pi);
            // 0 and 2pi are the same point; the closed end of the last branch is 2pi
            if r == 0.0 {
                two_pi
            } else {
                r
            }
        }
        DensityDomain::Raw => phi,
    };
    let y = x - PI;
    let mut bracket = (2.0 * PI * PI * y * y - y.powi(4) - 7.0 / 15.0 * PI.powi(4)) / 6.0;
    if x <= mu_l {
        bracket -= PI / 3.0 * (x - mu_l).powi(2) * (2.0 * x + mu_l);
    } else if x > two_pi - mu_l {
        bracket -= PI / 3.0 * (two_pi - x - mu_l).powi(2) * (4.0 * PI - 2.0 * x + mu_l);
    }
    let pref = spec.n_f as f64 * spec.volume * spec.l * spec.inv_l4_pi2();
    PotentialValue {
        value: pref * bracket,
        tail: SeriesTail {
            cutoff: 0,
            tail_bound: 0.0,
        },
    }
}

fn require(spec: &ModelSpec, group: GaugeGroup, scenario: Scenario) -> Result<()> {
    if spec.group != group || spec.scenario != scenario {
        return Err(Error::SpecMismatch(format!(
            "expected {group}/{scenario}, got {}/{}",
            spec.group, spec.scenario
        )));
    }
    spec.validate()
}

/// SU(2) one-loop potential at zero temperature.
pub fn su2_vacuum(phi: f64, spec: &ModelSpec) -> Result<PotentialValue> {
    require(spec, GaugeGroup::Su2, Scenario::Vacuum)?;
    Ok(vacuum_value(phi, spec))
}

/// SU(2) potential at finite temperature, in the form selected by
/// `spec.thermal_form`.
pub fn su2_thermal(phi: f64, spec: &ModelSpec) -> Result<PotentialValue> {
    require(spec, GaugeGroup::Su2, Scenario::Thermal)?;
    Ok(Su2Potential::new(spec)?.eval(phi))
}

/// SU(2) fermion potential at zero temperature and chemical potential `mu`.
pub fn su2_density(phi: f64, spec: &ModelSpec) -> Result<PotentialValue> {
    require(spec, GaugeGroup::Su2, Scenario::Density)?;
    Ok(density_value(phi, spec))
}

/// `sum_{m<=cutoff} cos(m x) / m^4`.
fn quartic_cosine(cutoff: usize, x: f64) -> f64 {
    cosine_series(cutoff, x, |m| inv_pow(m, 4))
}

/// SU(3) potential of the two independent Wilson lines, `phi3 = -phi1 - phi2`.
pub fn su3_vacuum(phi1: f64, phi2: f64, spec: &ModelSpec) -> Result<PotentialValue> {
    require(spec, GaugeGroup::Su3, Scenario::Vacuum)?;
    Ok(su3_value(phi1, phi2, spec))
}

pub(crate) fn su3_value(phi1: f64, phi2: f64, spec: &ModelSpec) -> PotentialValue {
    let cutoff = spec.series_cutoff;
    let phis = [phi1, phi2, -phi1 - phi2];
    let mut gauge = 0.0;
    for &a in &phis {
        for &b in &phis {
            gauge += quartic_cosine(cutoff, a - b);
        }
    }
    let fermion: f64 = phis.iter().map(|&a| quartic_cosine(cutoff, a)).sum();
    let pref = 2.0 * spec.inv_l4_pi2();
    let n_f = spec.n_f as f64;
    PotentialValue {
        value: -pref * gauge - n_f * pref * fermion,
        tail: SeriesTail {
            cutoff,
            tail_bound: pref * (9.0 + 3.0 * n_f) * series_tail_bound(cutoff, 4),
        },
    }
}
