//! Pauli-string expansion of `2^n x 2^n` Hermitian operators.
//!
//! A string is stored as two bit masks: bit `b` of `x` (resp. `z`) is set when
//! the letter acting on amplitude-index bit `b` has an X (resp. Z) part, with
//! `Y = i X Z`. Letter 0 of the text form acts on the most significant bit.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::HermitianOperator;

pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: u32,
    x: u64,
    z: u64,
}

/// `i^k`
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn new(n_qubits: u32, x: u64, z: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 32 {
            return Err(Error::InvalidParameter(format!(
                "pauli string length {n_qubits} out of range 1..=32"
            )));
        }
        let mask = (1u64 << n_qubits) - 1;
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParameter(format!(
                "masks x={x:#b} z={z:#b} exceed {n_qubits} qubits"
            )));
        }
        Ok(Self { n_qubits, x, z })
    }

    pub fn identity(n_qubits: u32) -> Self {
        Self {
            n_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Letter for qubit `q` (0 = leftmost = most significant bit).
    pub fn letter(&self, q: u32) -> char {
        let bit = self.n_qubits - 1 - q;
        match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// `P|k> = phase(k) |k ^ x>`.
    #[inline]
    fn phase(&self, k: usize) -> Complex64 {
        let sign = ((self.z & k as u64).count_ones() & 1) * 2;
        i_pow(self.y_count() + sign)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            m[(k ^ self.x as usize, k)] = self.phase(k);
        }
        m
    }

    /// `<state|P|state>` without materializing the matrix.
    pub fn expectation(&self, state: &[Complex64]) -> f64 {
        let x = self.x as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, amp) in state.iter().enumerate() {
            acc += state[k ^ x].conj() * self.phase(k) * amp;
        }
        acc.re
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count() as u32;
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in s.chars().enumerate() {
            let bit = n - 1 - q as u32;
            let (xb, zb) = match ch {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => return Err(Error::Parse(format!("bad pauli letter '{other}' in {s}"))),
            };
            x |= xb << bit;
            z |= zb << bit;
        }
        PauliString::new(n, x, z)
    }
}

/// Real-weighted sum of distinct Pauli strings on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: u32,
    terms: Vec<(PauliString, f64)>,
    zero_threshold: f64,
}

fn letter_key(p: &PauliString) -> Vec<u8> {
    (0..p.n_qubits)
        .map(|q| match p.letter(q) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        })
        .collect()
}

impl PauliSum {
    /// Builds a sum from explicit terms; duplicate strings are merged and
    /// coefficients at or below `zero_threshold` dropped.
    pub fn from_terms(
        n_qubits: u32,
        terms: impl IntoIterator<Item = (PauliString, f64)>,
        zero_threshold: f64,
    ) -> Result<Self> {
        let mut merged: std::collections::BTreeMap<PauliString, f64> = Default::default();
        for (p, c) in terms {
            if p.n_qubits != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits as usize,
                    actual: p.n_qubits as usize,
                });
            }
            *merged.entry(p).or_insert(0.0) += c;
        }
        let mut terms: Vec<_> = merged
            .into_iter()
            .filter(|(_, c)| c.abs() > zero_threshold)
            .collect();
        terms.sort_by_key(|(p, _)| letter_key(p));
        Ok(Self {
            n_qubits,
            terms,
            zero_threshold,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// `sum_P c_P <state|P|state>`, reduced in term order.
    pub fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.len(),
            });
        }
        let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self
            .terms
            .iter()
            .map(|(p, c)| c * p.expectation(state))
            .sum())
    }

    /// One `<string> <coefficient>` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.terms {
            out.push_str(&format!("{p} {c}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_qubits = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(s), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected '<string> <coeff>'",
                    lineno + 1
                )));
            };
            let p: PauliString = s.parse()?;
            let c: f64 = c
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            match n_qubits {
                None => n_qubits = Some(p.n_qubits),
                Some(n) if n != p.n_qubits => {
                    return Err(Error::Parse(format!(
                        "line {}: string length {} differs from {n}",
                        lineno + 1,
                        p.n_qubits
                    )))
                }
                _ => {}
            }
            terms.push((p, c));
        }
        let n = n_qubits.ok_or_else(|| Error::Parse("empty pauli sum".into()))?;
        Self::from_terms(n, terms, 0.0)
    }
}

// In-place Walsh-Hadamard transform: out[z] = sum_j (-1)^{popcount(z & j)} a[j].
fn walsh_hadamard(a: &mut [Complex64]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (u, v) = (a[j], a[j + h]);
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// Coefficients `c_P = Tr(P H) / 2^n` of every Pauli string, keeping those with
/// `|c_P| > threshold`.
///
/// For fixed X part the traces over all Z parts are a Walsh-Hadamard transform
/// of the diagonal `H[k, k ^ x]`, so the full expansion costs `O(4^n n)`.
pub fn decompose(h: &HermitianOperator, threshold: f64) -> Result<PauliSum> {
    let d = h.dim();
    if !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    let n_qubits = d.trailing_zeros();
    let scale = 1.0 / d as f64;
    let mut terms = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); d];
    for x in 0..d {
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = h.get(k, k ^ x);
        }
        walsh_hadamard(&mut buf);
        for (z, w) in buf.iter().enumerate() {
            let p = PauliString {
                n_qubits,
                x: x as u64,
                z: z as u64,
            };
            let c = i_pow(p.y_count()) * w * scale;
            if c.im.abs() > crate::oscillator::HERMITICITY_TOL {
                return Err(Error::NotHermitian {
                    max_deviation: c.im.abs(),
                    tolerance: crate::oscillator::HERMITICITY_TOL,
                });
            }
            if c.re.abs() > threshold {
                terms.push((p, c.re));
            }
        }
    }
    terms.sort_by_key(|(p, _)| letter_key(p));
    Ok(PauliSum {
        n_qubits,
        terms,
        zero_threshold: threshold,
    })
}

/// Dense `sum_P c_P P`.
pub fn reconstruct(s: &PauliSum) -> HermitianOperator {
    let d = s.dim();
    let mut m = DMatrix::zeros(d, d);
    for (p, c) in &s.terms {
        let x = p.x as usize;
        for k in 0..d {
            m[(k ^ x, k)] += p.phase(k) * *c;
        }
    }
    HermitianOperator::from_hermitian_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(s: &str, coeff: f64) -> PauliSum {
        let p: PauliString = s.parse().unwrap();
        PauliSum::from_terms(p.n_qubits(), [(p, coeff)], 0.0).unwrap()
    }

    #[test]
    fn letters_round_trip_and_ordering() {
        let p: PauliString = "IXZY".parse().unwrap();
        assert_eq!(p.to_string(), "IXZY");
        // letter 0 on the most significant bit
        assert_eq!(p.x_mask(), 0b0101);
        assert_eq!(p.z_mask(), 0b0011);
        assert!("IXQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn single_qubit_matrices() {
        let y: PauliString = "Y".parse().unwrap();
        let m = y.to_dense();
        assert_eq!(m[(0, 1)], c(0.0, -1.0));
        assert_eq!(m[(1, 0)], c(0.0, 1.0));
        let z: PauliString = "Z".parse().unwrap();
        let m = z.to_dense();
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        assert_eq!(m[(1, 1)], c(-1.0, 0.0));
    }

    #[test]
    fn decompose_identity_and_x() {
        let s = decompose(&HermitianOperator::identity(2), 1e-10).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].0.to_string(), "I");
        assert!((s.terms()[0].1 - 1.0).abs() < 1e-15);

        let x = HermitianOperator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = decompose(&x, 1e-10).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].0.to_string(), "X");
        assert!((s.terms()[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_rejects_non_power_of_two() {
        let h = HermitianOperator::identity(3);
        assert!(matches!(decompose(&h, 1e-10), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn reconstruct_examples() {
        let z = reconstruct(&single("Z", 1.0));
        assert!(z.max_abs_diff(&HermitianOperator::from_real_diagonal(&[1.0, -1.0])) < 1e-15);
        let xx = reconstruct(&single("XX", 0.5));
        let mut want = vec![0.0; 16];
        for j in 0..4 {
            want[j * 4 + (3 - j)] = 0.5;
        }
        assert!(xx.max_abs_diff(&HermitianOperator::from_real(4, &want).unwrap()) < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let zero_zero = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!((single("ZI", 1.0).expectation(&zero_zero).unwrap() - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(r, 0.0), c(r, 0.0)];
        assert!((single("X", 1.0).expectation(&plus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_errors() {
        let s = single("X", 1.0);
        assert!(matches!(
            s.expectation(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.expectation(&[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn pauli_strings_are_orthogonal() {
        for n in 1..=3u32 {
            let d = 1usize << n;
            let strings: Vec<PauliString> = (0..d as u64)
                .flat_map(|x| (0..d as u64).map(move |z| PauliString::new(n, x, z).unwrap()))
                .collect();
            let dense: Vec<_> = strings.iter().map(|p| p.to_dense()).collect();
            for (a, pa) in dense.iter().enumerate() {
                for (b, pb) in dense.iter().enumerate() {
                    let tr = (pa * pb).trace();
                    let want = if a == b { d as f64 } else { 0.0 };
                    assert!((tr - c(want, 0.0)).norm() < 1e-12, "n={n} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let h = HermitianOperator::from_real(
            4,
            &[
                0.1,
                0.2,
                0.0,
                1.0 / 3.0,
                0.2,
                -0.7,
                0.5,
                0.0,
                0.0,
                0.5,
                2.0,
                1e-7,
                1.0 / 3.0,
                0.0,
                1e-7,
                0.3,
            ],
        )
        .unwrap();
        let s = decompose(&h, 0.0).unwrap();
        let back = PauliSum::from_text(&s.to_text()).unwrap();
        assert_eq!(back.terms(), s.terms());
    }

    #[test]
    fn from_terms_merges_duplicates() {
        let x: PauliString = "X".parse().unwrap();
        let s = PauliSum::from_terms(1, [(x, 0.25), (x, 0.25)], 0.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].1, 0.5);
        let gone = PauliSum::from_terms(1, [(x, 0.25), (x, -0.25)], 1e-12).unwrap();
        assert!(gone.is_empty());
    }
}
