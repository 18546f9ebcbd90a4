use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use emm_core::hamiltonian::{build_su3_custom, ground_state};
use emm_core::oscillator::{apply_scalar_function, tensor_product};
use emm_core::potentials::{
    su2_density, su2_thermal, su2_vacuum, su3_vacuum, DensityDomain, ThermalForm,
};
use emm_core::vqe::run_vqe;
use emm_core::{
    build, decompose, AnsatzSpec, HermitianOperator, ModelSpec, PauliSum, TruncationConfig,
    VqeOptions,
};

fn hermitian_from(dim: usize, raw: &[f64]) -> HermitianOperator {
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut it = raw.iter().copied();
    for r in 0..dim {
        m[(r, r)] = Complex64::new(it.next().unwrap(), 0.0);
        for c in r + 1..dim {
            let z = Complex64::new(it.next().unwrap(), it.next().unwrap());
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

fn hermitian(dim: usize) -> impl Strategy<Value = HermitianOperator> {
    prop::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |raw| hermitian_from(dim, &raw))
}

fn unit_vector(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let v: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / n).collect()
        })
}

fn unitary(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| {
            let m =
                DMatrix::from_iterator(dim, dim, v.into_iter().map(|(a, b)| Complex64::new(a, b)));
            m.qr().q()
        })
        .prop_filter("unitary", move |q| {
            max_norm(&(q.adjoint() * q - DMatrix::identity(dim, dim))) < 1e-12
        })
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dense_expectation(h: &HermitianOperator, v: &[Complex64]) -> f64 {
    let x = nalgebra::DVector::from_column_slice(v);
    (x.adjoint() * h.matrix() * &x)[(0, 0)].re
}

fn table_hamiltonian() -> emm_core::ModelHamiltonian {
    build(&ModelSpec::su2_vacuum(), &TruncationConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_function_is_unitarily_covariant(a in hermitian(6), u in unitary(6)) {
        let f = |x: f64| (1.3 * x).cos() + x * x * x;
        let lhs = apply_scalar_function(&a.conjugate_by(&u).unwrap(), f).unwrap();
        let rhs = apply_scalar_function(&a, f).unwrap().conjugate_by(&u).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn tensor_product_is_associative(a in hermitian(2), b in hermitian(4), c in hermitian(2)) {
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-14);
    }

    #[test]
    fn mixed_products_factorize(a in hermitian(4), b in hermitian(4)) {
        let ia = tensor_product(&a, &HermitianOperator::identity(4));
        let ib = tensor_product(&HermitianOperator::identity(4), &b);
        let prod = ia.mul(&ib).unwrap();
        let direct = tensor_product(&a, &b);
        prop_assert!(max_norm(&(prod - direct.matrix())) < 1e-14);
    }

    #[test]
    fn pauli_coefficients_satisfy_parseval(h in hermitian(16)) {
        let sum = decompose(&h, 0.0).unwrap();
        let weighted: f64 = sum.terms().iter().map(|(_, c)| c * c).sum::<f64>() * 16.0;
        let frob: f64 = h.matrix().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((weighted - frob).abs() < 1e-8);
    }

    #[test]
    fn term_count_is_monotone_in_threshold(h in hermitian(8), lo in 0.0f64..0.5, extra in 0.0f64..0.5) {
        let small = decompose(&h, lo).unwrap().len();
        let large = decompose(&h, lo + extra).unwrap().len();
        prop_assert!(large <= small);
    }

    #[test]
    fn pauli_expectation_matches_dense(h in hermitian(16), psi in unit_vector(16)) {
        let sum = decompose(&h, 0.0).unwrap();
        prop_assert!((sum.expectation(&psi).unwrap() - dense_expectation(&h, &psi)).abs() <= 1e-10);
    }

    #[test]
    fn pauli_text_round_trips_exactly(h in hermitian(8)) {
        let sum = decompose(&h, 1e-10).unwrap();
        let back = PauliSum::from_text(&sum.to_text()).unwrap();
        prop_assert_eq!(back.terms(), sum.terms());
    }

    #[test]
    fn vacuum_is_even_and_4pi_periodic(phi in -20.0f64..20.0) {
        let spec = ModelSpec::su2_vacuum();
        let v = su2_vacuum(phi, &spec).unwrap();
        let mirrored = su2_vacuum(-phi, &spec).unwrap();
        let shifted = su2_vacuum(phi + 4.0 * PI, &spec).unwrap();
        prop_assert!(v.value.is_finite());
        prop_assert!((v.value - mirrored.value).abs() <= 1e-14);
        prop_assert!((v.value - shifted.value).abs() <= 2.0 * v.tail.tail_bound);
    }

    #[test]
    fn density_wrapped_is_2pi_periodic(phi in -20.0f64..20.0, mu in 0.0f64..PI) {
        let spec = ModelSpec { mu: Some(mu), ..ModelSpec::su2_density() };
        let a = su2_density(phi, &spec).unwrap().value;
        let b = su2_density(phi + 2.0 * PI, &spec).unwrap().value;
        prop_assert!(a.is_finite());
        // adding 2pi perturbs phi by one ulp of |phi| + 2pi
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn raw_density_is_finite(phi in -50.0f64..50.0, mu in 0.0f64..PI) {
        let spec = ModelSpec {
            mu: Some(mu),
            density_domain: DensityDomain::Raw,
            ..ModelSpec::su2_density()
        };
        prop_assert!(su2_density(phi, &spec).unwrap().value.is_finite());
    }

    #[test]
    fn su3_is_swap_symmetric(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let spec = ModelSpec::su3_vacuum();
        let x = su3_vacuum(a, b, &spec).unwrap().value;
        let y = su3_vacuum(b, a, &spec).unwrap().value;
        prop_assert!(x.is_finite());
        prop_assert!((x - y).abs() <= 1e-12);
    }

    #[test]
    fn ground_energy_tracks_identity_shift(c in -50.0f64..50.0) {
        let h = table_hamiltonian();
        let e = ground_state(&h.operator).energy;
        let shifted = ground_state(&h.operator.shift(c)).energy;
        prop_assert!((shifted - (e + c)).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn thermal_double_sum_matches_two_sided_sum(
        phi in -7.0f64..7.0,
        beta in 0.3f64..3.0,
        l in 0.5f64..2.0,
        n_f in 0u32..3,
        include_m_zero in any::<bool>(),
    ) {
        let spec = ModelSpec {
            beta: Some(beta),
            l,
            n_f,
            include_m_zero,
            series_cutoff: 60,
            m_cutoff: 60,
            ..ModelSpec::su2_thermal()
        };
        let got = su2_thermal(phi, &spec).unwrap().value;
        let want = two_sided_thermal(phi, &spec);
        prop_assert!((got - want).abs() <= 1e-12, "got {} want {}", got, want);
    }

    #[test]
    fn spectrum_bounds_every_expectation(psi in unit_vector(16)) {
        let h = table_hamiltonian();
        let e = h.ground_energy().energy;
        prop_assert!(e <= dense_expectation(&h.operator, &psi) + 1e-12);
    }

    #[test]
    fn hamiltonians_are_hermitian(
        l in 0.5f64..2.0,
        volume in 0.5f64..2.0,
        n_f in 0u32..4,
        beta in 0.5f64..4.0,
        mu_frac in 0.0f64..1.0,
        scenario in 0usize..4,
    ) {
        let base = ModelSpec { l, volume, n_f, series_cutoff: 200, m_cutoff: 50, ..ModelSpec::default() };
        let spec = match scenario {
            0 => ModelSpec { ..base },
            1 => ModelSpec { beta: Some(beta), ..ModelSpec { scenario: emm_core::Scenario::Thermal, ..base } },
            2 => ModelSpec {
                beta: Some(beta),
                thermal_form: ThermalForm::HighT,
                include_constant_terms: true,
                ..ModelSpec { scenario: emm_core::Scenario::Thermal, ..base }
            },
            _ => ModelSpec { mu: Some(mu_frac * PI / l), ..ModelSpec { scenario: emm_core::Scenario::Density, ..base } },
        };
        let h = build(&spec, &TruncationConfig::default()).unwrap();
        let m = h.operator.matrix();
        prop_assert!(max_norm(&(m - m.adjoint())) <= 1e-10);
    }
}

/// Vacuum part plus the image correction summed literally over
/// `m = -M..=M` with no use of the `m <-> -m` symmetry.
fn two_sided_thermal(phi: f64, spec: &ModelSpec) -> f64 {
    let vacuum = su2_vacuum(
        phi,
        &ModelSpec {
            scenario: emm_core::Scenario::Vacuum,
            beta: None,
            ..spec.clone()
        },
    )
    .unwrap()
    .value;
    let beta = spec.beta.unwrap();
    let m_max = spec.m_cutoff as i64;
    let mut gauge = 0.0;
    let mut fermion = 0.0;
    for m in -m_max..=m_max {
        if m == 0 && !spec.include_m_zero {
            continue;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for ell in 1..=spec.series_cutoff {
            let ell_f = ell as f64;
            let d = spec.l * spec.l * ell_f * ell_f + beta * beta * (m * m) as f64;
            gauge += (2.0 * ell_f * phi).cos() / (d * d);
            fermion += sign * (ell_f * phi).cos() / (d * d);
        }
    }
    vacuum - 2.0 / (PI * PI) * gauge + spec.n_f as f64 * 4.0 / (spec.l.powi(4) * PI * PI) * fermion
}

#[test]
fn thermal_double_sum_at_quarter_period_matches_brute_force() {
    let spec = ModelSpec {
        series_cutoff: 200,
        m_cutoff: 200,
        ..ModelSpec::su2_thermal()
    };
    let got = su2_thermal(PI / 2.0, &spec).unwrap().value;
    assert!((got - two_sided_thermal(PI / 2.0, &spec)).abs() <= 1e-9);
}

fn swap_factors(op: &HermitianOperator, n: usize) -> HermitianOperator {
    let m = op.matrix();
    let idx = |i: usize| (i % n) * n + i / n;
    HermitianOperator::new(DMatrix::from_fn(n * n, n * n, |r, c| m[(idx(r), idx(c))])).unwrap()
}

#[test]
fn su3_hamiltonian_is_invariant_under_factor_swap() {
    let trunc = TruncationConfig::default();
    let h = build(&ModelSpec::su3_vacuum(), &trunc).unwrap();
    let swapped = swap_factors(&h.operator, 16);
    assert!(h.operator.max_abs_diff(&swapped) <= 1e-10);
}

#[test]
fn su3_ground_energy_ignores_line_labelling() {
    let trunc = TruncationConfig::new(8).unwrap();
    let f = |a: f64, b: f64| 0.3 * a * a + 0.1 * b * b * b * b - (a - 2.0 * b).cos();
    let h = build_su3_custom(&trunc, f).unwrap();
    let g = build_su3_custom(&trunc, |a, b| f(b, a)).unwrap();
    let (e, e_swapped) = (h.ground_energy().energy, g.ground_energy().energy);
    assert!((e - e_swapped).abs() <= 1e-10, "{e} vs {e_swapped}");
}

#[test]
fn vqe_is_deterministic_for_a_seed() {
    let h = table_hamiltonian();
    let ansatz = AnsatzSpec::full(4);
    let opts = VqeOptions {
        restarts: 4,
        seed: 7,
        ..Default::default()
    };
    let a = run_vqe(&h, &ansatz, &opts, None).unwrap();
    let b = run_vqe(&h, &ansatz, &opts, None).unwrap();
    assert_eq!(a, b);
    let other = run_vqe(&h, &ansatz, &VqeOptions { seed: 8, ..opts }, None).unwrap();
    assert_ne!(a.traces, other.traces);
}
