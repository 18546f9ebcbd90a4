//! `emm` command-line frontend.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::calibration::calibrate;
use crate::error::{Error, Result};
use crate::hamiltonian::build;
use crate::oscillator::{TruncationConfig, DEFAULT_LEVELS};
use crate::pauli::{decompose, DEFAULT_ZERO_THRESHOLD};
use crate::potentials::{
    su3_vacuum, DensityDomain, GaugeGroup, ModelSpec, Scenario, Su2Potential, ThermalForm,
    DEFAULT_M_CUTOFF, DEFAULT_SERIES_CUTOFF,
};
use crate::vqe::{
    run_vqe, AnsatzSpec, Entanglement, MinimizeOptions, VqeOptions, DEFAULT_DEPTH,
    DEFAULT_MAX_ITERATIONS, DEFAULT_RESTARTS,
};

pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "emm",
    version,
    about = "Effective matrix-model Hamiltonians, Pauli decomposition and VQE"
)]
pub struct Cli {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, global = true, default_value = "su2", value_parser = parse_flag::<GaugeGroup>)]
    pub group: GaugeGroup,
    #[arg(long, global = true, default_value = "vacuum", value_parser = parse_flag::<Scenario>)]
    pub scenario: Scenario,
    /// Number of fundamental fermion flavors.
    #[arg(long, global = true, default_value_t = 1)]
    pub nf: u32,
    /// Circle radius.
    #[arg(long = "L", global = true, default_value_t = 1.0)]
    pub l: f64,
    /// Spatial volume factor.
    #[arg(long = "V", global = true, default_value_t = 1.0)]
    pub volume: f64,
    /// Inverse temperature; defaults to the value with V L / (L^3 beta) = 1.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Chemical potential; defaults to pi/2.
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Oscillator levels per Wilson line (power of two).
    #[arg(long, global = true, default_value_t = DEFAULT_LEVELS)]
    pub levels: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SERIES_CUTOFF)]
    pub lmax: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_M_CUTOFF)]
    pub mcut: usize,
    #[arg(long, global = true, default_value = "double_sum", value_parser = parse_flag::<ThermalForm>)]
    pub thermal_form: ThermalForm,
    #[arg(long, global = true)]
    pub include_m_zero: bool,
    #[arg(long, global = true)]
    pub include_constants: bool,
    #[arg(long, global = true, default_value = "mod_2pi", value_parser = parse_flag::<DensityDomain>)]
    pub density_domain: DensityDomain,
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, global = true, default_value = "full", value_parser = parse_flag::<Entanglement>)]
    pub entanglement: Entanglement,
    #[arg(long, global = true, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pauli coefficient cutoff.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_THRESHOLD)]
    pub threshold: f64,
    /// Output file (format depends on the command).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_flag<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential on a grid as CSV (`phi,V` or `phi1,phi2,V`).
    Potential {
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Exact ground-state energy by dense diagonalization.
    Exact,
    /// Pauli-string decomposition of the Hamiltonian.
    Paulis,
    /// Multi-start VQE run.
    Vqe {
        /// Convergence trace CSV (`evaluation,energy`).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
    },
    /// Sweep the open conventions against the reference values (Markdown).
    Calibrate,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec> {
        let beta = match (self.scenario, self.beta) {
            (Scenario::Thermal, None) => Some(self.volume * self.l / self.l.powi(3)),
            (_, b) => b,
        };
        let mu = match (self.scenario, self.mu) {
            (Scenario::Density, None) => Some(PI / 2.0),
            (_, m) => m,
        };
        let spec = ModelSpec {
            group: self.group,
            scenario: self.scenario,
            n_f: self.nf,
            l: self.l,
            volume: self.volume,
            beta,
            mu,
            series_cutoff: self.lmax,
            m_cutoff: self.mcut,
            thermal_form: self.thermal_form,
            include_m_zero: self.include_m_zero,
            include_constant_terms: self.include_constants,
            density_domain: self.density_domain,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn truncation(&self) -> Result<TruncationConfig> {
        let t = TruncationConfig::new(self.levels)?;
        t.qubits()?;
        Ok(t)
    }
}

/// One result-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec: ModelSpec,
    pub levels: usize,
    pub n_qubits: u32,
    pub pauli_term_count: Option<usize>,
    pub exact_energy: f64,
    pub vqe_energy: Option<f64>,
    pub vqe_gap: Option<f64>,
    pub depth: Option<usize>,
    pub entanglement: Option<Entanglement>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub wall_time_seconds: f64,
}

impl RunRecord {
    fn key_values(&self) -> Vec<(&'static str, String)> {
        let s = &self.spec;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let mut kv = vec![
            ("group", s.group.to_string()),
            ("scenario", s.scenario.to_string()),
            ("nf", s.n_f.to_string()),
            ("L", s.l.to_string()),
            ("V", s.volume.to_string()),
            ("beta", opt(s.beta.map(|b| b.to_string()))),
            ("mu", opt(s.mu.map(|m| m.to_string()))),
            ("lmax", s.series_cutoff.to_string()),
            ("mcut", s.m_cutoff.to_string()),
            ("thermal_form", s.thermal_form.to_string()),
            ("include_m_zero", s.include_m_zero.to_string()),
            (
                "include_constant_terms",
                s.include_constant_terms.to_string(),
            ),
            ("density_domain", s.density_domain.to_string()),
            ("levels", self.levels.to_string()),
            ("n_qubits", self.n_qubits.to_string()),
            ("exact_energy", self.exact_energy.to_string()),
        ];
        if let Some(c) = self.pauli_term_count {
            kv.push(("pauli_term_count", c.to_string()));
        }
        if let Some(e) = self.vqe_energy {
            kv.push(("vqe_energy", e.to_string()));
        }
        if let Some(g) = self.vqe_gap {
            kv.push(("vqe_gap", g.to_string()));
        }
        if let Some(r) = self.restarts {
            kv.push(("restarts", r.to_string()));
        }
        if let Some(seed) = self.seed {
            kv.push(("seed", seed.to_string()));
        }
        kv.push(("wall_time_seconds", self.wall_time_seconds.to_string()));
        kv
    }

    pub fn write_key_values<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in self.key_values() {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Inclusive grid `from, from+step, ...` up to `to` (within rounding).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from {
        return Err(Error::InvalidParameter(format!(
            "invalid range from={from} to={to} step={step}"
        )));
    }
    let span = (to - from) / step;
    let count = (span + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::InvalidParameter(format!(
            "grid of {count} points is too large"
        )));
    }
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

pub fn write_potential_csv<W: Write>(
    spec: &ModelSpec,
    from: Option<f64>,
    to: Option<f64>,
    step: Option<f64>,
    mut out: W,
) -> Result<usize> {
    let (def_to, def_step) = match spec.group {
        GaugeGroup::Su2 => (4.0 * PI, PI / 100.0),
        GaugeGroup::Su3 => (2.0 * PI, PI / 50.0),
    };
    let points = grid(
        from.unwrap_or(0.0),
        to.unwrap_or(def_to),
        step.unwrap_or(def_step),
    )?;
    let mut rows = 0;
    match spec.group {
        GaugeGroup::Su2 => {
            let v = Su2Potential::new(spec)?;
            writeln!(out, "phi,V")?;
            for &phi in &points {
                writeln!(out, "{},{}", phi, v.eval(phi).value)?;
                rows += 1;
            }
        }
        GaugeGroup::Su3 => {
            writeln!(out, "phi1,phi2,V")?;
            for &a in &points {
                for &b in &points {
                    writeln!(out, "{},{},{}", a, b, su3_vacuum(a, b, spec)?.value)?;
                    rows += 1;
                }
            }
        }
    }
    Ok(rows)
}

pub fn run(cli: &Cli) -> Result<()> {
    let args = &cli.model;
    let stdout = io::stdout();
    match &cli.command {
        Command::Potential { from, to, step } => {
            let spec = args.spec()?;
            match &args.out {
                Some(p) => {
                    let mut w = create(p)?;
                    write_potential_csv(&spec, *from, *to, *step, &mut w)?;
                    w.flush()?;
                }
                None => {
                    write_potential_csv(&spec, *from, *to, *step, stdout.lock())?;
                }
            }
        }
        Command::Exact => {
            let start = Instant::now();
            let spec = args.spec()?;
            let trunc = args.truncation()?;
            let h = build(&spec, &trunc)?;
            let exact = h.ground_energy().energy;
            let record = RunRecord {
                spec,
                levels: trunc.levels(),
                n_qubits: h.n_qubits,
                pauli_term_count: None,
                exact_energy: exact,
                vqe_energy: None,
                vqe_gap: None,
                depth: None,
                entanglement: None,
                restarts: None,
                seed: None,
                wall_time_seconds: start.elapsed().as_secs_f64(),
            };
            emit_record(&record, args.out.as_deref())?;
        }
        Command::Paulis => {
            let spec = args.spec()?;
            let h = build(&spec, &args.truncation()?)?;
            let sum = decompose(&h.operator, args.threshold)?;
            match &args.out {
                Some(p) => {
                    let mut w = create(p)?;
                    w.write_all(sum.to_text().as_bytes())?;
                    w.flush()?;
                    println!("pauli_term_count={}", sum.len());
                }
                None => {
                    print!("{}", sum.to_text());
                    eprintln!("pauli_term_count={}", sum.len());
                }
            }
        }
        Command::Vqe {
            trace,
            max_iterations,
        } => {
            let start = Instant::now();
            let spec = args.spec()?;
            let trunc = args.truncation()?;
            let h = build(&spec, &trunc)?;
            let exact = h.ground_energy().energy;
            let terms = decompose(&h.operator, args.threshold)?.len();
            let ansatz = AnsatzSpec::new(h.n_qubits, args.depth, args.entanglement);
            let opts = VqeOptions {
                restarts: args.restarts,
                seed: args.seed,
                minimize: MinimizeOptions {
                    max_iterations: *max_iterations,
                    ..Default::default()
                },
            };
            let result = run_vqe(&h, &ansatz, &opts, Some(exact))?;
            let gap = result.best_energy - exact;
            if result.min_recorded() < exact - 1e-9 {
                return Err(Error::VariationalBound {
                    energy: result.min_recorded(),
                    exact,
                });
            }
            if let Some(p) = trace {
                let mut w = create(p)?;
                result.write_trace_csv(&mut w)?;
                w.flush()?;
            }
            let record = RunRecord {
                spec,
                levels: trunc.levels(),
                n_qubits: h.n_qubits,
                pauli_term_count: Some(terms),
                exact_energy: exact,
                vqe_energy: Some(result.best_energy),
                vqe_gap: Some(gap),
                depth: Some(args.depth),
                entanglement: Some(args.entanglement),
                restarts: Some(args.restarts),
                seed: Some(args.seed),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            };
            emit_record(&record, args.out.as_deref())?;
        }
        Command::Calibrate => {
            let report = calibrate(&args.truncation()?)?;
            let md = report.to_markdown();
            match &args.out {
                Some(p) => std::fs::write(p, md)?,
                None => print!("{md}"),
            }
        }
    }
    Ok(())
}

fn emit_record(record: &RunRecord, out: Option<&Path>) -> Result<()> {
    record.write_key_values(io::stdout().lock())?;
    if let Some(p) = out {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, record)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID_CONFIG
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("emm").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid(0.0, 4.0 * PI, PI / 100.0).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert!((g[400] - 4.0 * PI).abs() < 1e-12);
        assert_eq!(grid(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
    }

    #[test]
    fn grid_rejects_bad_ranges() {
        for (from, to, step) in [
            (0.0, 1.0, 0.0),
            (0.0, 1.0, -0.1),
            (2.0, 1.0, 0.1),
            (0.0, f64::NAN, 0.1),
        ] {
            assert!(matches!(
                grid(from, to, step),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn su3_grid_row_count() {
        let mut buf = Vec::new();
        let rows =
            write_potential_csv(&ModelSpec::su3_vacuum(), None, None, None, &mut buf).unwrap();
        assert_eq!(rows, 101 * 101);
    }

    #[test]
    fn scenario_defaults_fill_in_beta_and_mu() {
        let cli = parse(&["--scenario", "thermal", "exact"]);
        assert_eq!(cli.model.spec().unwrap(), ModelSpec::su2_thermal());
        let cli = parse(&["--scenario", "density", "exact"]);
        assert_eq!(cli.model.spec().unwrap(), ModelSpec::su2_density());
        let cli = parse(&["exact"]);
        assert_eq!(cli.model.spec().unwrap(), ModelSpec::su2_vacuum());
        assert_eq!(cli.model.truncation().unwrap().levels(), 16);
    }

    #[test]
    fn bad_configurations_are_rejected() {
        let cli = parse(&["--levels", "12", "exact"]);
        assert!(matches!(
            cli.model.truncation(),
            Err(Error::NotPowerOfTwo(12))
        ));
        let cli = parse(&["--group", "su3", "--scenario", "density", "exact"]);
        assert!(matches!(cli.model.spec(), Err(Error::SpecMismatch(_))));
        assert!(Cli::try_parse_from(["emm", "--group", "su4", "exact"]).is_err());
    }

    #[test]
    fn exit_codes_separate_config_from_numerics() {
        assert_eq!(exit_code(&Error::NotPowerOfTwo(12)), EXIT_INVALID_CONFIG);
        assert_eq!(
            exit_code(&Error::InvalidParameter("x".into())),
            EXIT_INVALID_CONFIG
        );
        assert_eq!(exit_code(&Error::NotNormalized(2.0)), EXIT_NUMERICAL);
        assert_eq!(
            exit_code(&Error::VariationalBound {
                energy: -1.0,
                exact: 0.0
            }),
            EXIT_NUMERICAL
        );
    }
}
