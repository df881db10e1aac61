//! The 1-query algorithm realised by a witness `β`.
//!
//! The state space has one basis vector per query index `i ∈ {0,…,n}`. The
//! initial state has amplitude `√βᵢ` on `|i⟩`; the oracle multiplies `|i⟩` by
//! `(−1)^{xᵢ}` for `i ≥ 1` and fixes `|0⟩`. The witness equations make every
//! post-query state of a 0-input orthogonal to every post-query state of a
//! 1-input, so an orthonormal basis of the span of the 1-states gives the
//! accepting measurement and its orthogonal complement the rejecting one.
//!
//! Orthogonality is first checked exactly on the rationals; only then are
//! square roots taken and the floating point stage (tolerance [`TOLERANCE`])
//! entered.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use crate::decider::{signed_overlap, verify_witness};
use crate::linalg::{format_rationals, to_f64, Rational};
use crate::pbf::{format_input, PartialBooleanFunction};
use crate::representation::{depends_on, query_sign, DEPENDS_ON_MAX_BITS};
use crate::{Error, Result};

pub const TOLERANCE: f64 = 1e-9;

/// Residual norm below which a Gram-Schmidt candidate counts as dependent.
const DEPENDENCE_CUTOFF: f64 = 1e-10;

/// `O_x ψ`: entry 0 unchanged, entry `i` multiplied by `(−1)^{xᵢ}`.
pub fn oracle_vector(x: usize, n: usize, amplitudes: &[f64]) -> Result<Vec<f64>> {
    if amplitudes.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, actual: amplitudes.len() });
    }
    Ok(amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| a * query_sign(x, i, n) as f64)
        .collect())
}

/// Appends the normalised component of `v` orthogonal to `basis`, if any.
fn extend_orthonormal(basis: &mut Vec<DVector<f64>>, v: &DVector<f64>) -> bool {
    let mut w = v.clone();
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for e in basis.iter() {
            let c = e.dot(&w);
            w.axpy(-c, e, 1.0);
        }
    }
    let norm = w.norm();
    if norm > DEPENDENCE_CUTOFF {
        basis.push(w / norm);
        true
    } else {
        false
    }
}

fn projector(basis: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    basis.iter().fold(DMatrix::zeros(dim, dim), |acc, e| acc + e * e.transpose())
}

#[derive(Clone, Debug)]
pub struct QueryAlgorithm {
    n: usize,
    beta: Vec<Rational>,
    amplitudes: DVector<f64>,
    accept_basis: Vec<DVector<f64>>,
    reject_basis: Vec<DVector<f64>>,
}

/// Builds the algorithm for `f` from a witness that verifies exactly.
pub fn build_algorithm(f: &PartialBooleanFunction, beta: &[Rational]) -> Result<QueryAlgorithm> {
    let delta = f.difference_set()?;
    if !verify_witness(f, beta)? {
        return Err(Error::InvalidWitness);
    }
    let n = f.n();
    if let Some(z) = delta.elements().iter().find(|&&z| !signed_overlap(beta, z, n).is_zero()) {
        return Err(Error::Internal(format!(
            "nonzero cross-class overlap for difference {}",
            format_input(*z, n)
        )));
    }

    let amplitudes = DVector::from_iterator(n + 1, beta.iter().map(|b| to_f64(b).sqrt()));
    let state = |x: usize| {
        DVector::from_iterator(n + 1, (0..=n).map(|i| amplitudes[i] * query_sign(x, i, n) as f64))
    };

    let mut accept_basis = Vec::new();
    for y in f.ones() {
        extend_orthonormal(&mut accept_basis, &state(y));
    }
    let mut spanned = accept_basis.clone();
    let mut reject_basis = Vec::new();
    let mut push_reject = |v: &DVector<f64>| {
        if extend_orthonormal(&mut spanned, v) {
            reject_basis.push(spanned.last().expect("just pushed").clone());
        }
    };
    for x in f.zeros() {
        push_reject(&state(x));
    }
    // complete to the whole space so that every input, promised or not, is normalised
    for i in 0..=n {
        push_reject(&DVector::from_fn(n + 1, |r, _| if r == i { 1.0 } else { 0.0 }));
    }

    Ok(QueryAlgorithm { n, beta: beta.to_vec(), amplitudes, accept_basis, reject_basis })
}

impl QueryAlgorithm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.n + 1
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    pub fn accept_basis(&self) -> &[DVector<f64>] {
        &self.accept_basis
    }

    pub fn reject_basis(&self) -> &[DVector<f64>] {
        &self.reject_basis
    }

    pub fn final_state(&self, x: usize) -> DVector<f64> {
        DVector::from_iterator(
            self.n + 1,
            (0..=self.n).map(|i| self.amplitudes[i] * query_sign(x, i, self.n) as f64),
        )
    }

    /// Probability of output 1 on input `x`.
    pub fn accept_probability(&self, x: usize) -> f64 {
        let phi = self.final_state(x);
        self.accept_basis.iter().map(|e| e.dot(&phi).powi(2)).sum()
    }

    pub fn reject_probability(&self, x: usize) -> f64 {
        let phi = self.final_state(x);
        self.reject_basis.iter().map(|e| e.dot(&phi).powi(2)).sum()
    }

    pub fn accept_projector(&self) -> DMatrix<f64> {
        projector(&self.accept_basis, self.dimension())
    }

    pub fn reject_projector(&self) -> DMatrix<f64> {
        projector(&self.reject_basis, self.dimension())
    }

    /// Max-norm defects of the measurement: idempotence of both projectors,
    /// their mutual orthogonality, and completeness `P₁ + P₀ = I`.
    pub fn measurement_defects(&self) -> MeasurementDefects {
        let p1 = self.accept_projector();
        let p0 = self.reject_projector();
        let max_abs = |m: DMatrix<f64>| m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dim = self.dimension();
        MeasurementDefects {
            accept_idempotence: max_abs(&p1 * &p1 - &p1),
            reject_idempotence: max_abs(&p0 * &p0 - &p0),
            cross: max_abs(&p1 * &p0),
            completeness: max_abs(&p1 + &p0 - DMatrix::identity(dim, dim)),
        }
    }

    pub fn export(&self, f: &PartialBooleanFunction) -> AlgorithmExport {
        let fmt_matrix = |m: DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| format_decimal(m[(i, j)])).collect())
                .collect()
        };
        AlgorithmExport {
            n: self.n,
            beta: format_rationals(&self.beta),
            amplitudes: self.amplitudes.iter().map(|a| format_decimal(*a)).collect(),
            accept_projector: fmt_matrix(self.accept_projector()),
            reject_projector: fmt_matrix(self.reject_projector()),
            simulation: simulation_table(self, f),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeasurementDefects {
    pub accept_idempotence: f64,
    pub reject_idempotence: f64,
    pub cross: f64,
    pub completeness: f64,
}

impl MeasurementDefects {
    pub fn max(&self) -> f64 {
        self.accept_idempotence.max(self.reject_idempotence).max(self.cross).max(self.completeness)
    }
}

/// Probability that `alg` outputs 1 on `x`.
pub fn simulate(alg: &QueryAlgorithm, x: usize) -> f64 {
    alg.accept_probability(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationRow {
    pub input: String,
    /// `"0"`, `"1"` or `"*"`.
    pub expected: char,
    pub p_one: String,
    pub p_zero: String,
    #[serde(skip)]
    pub p_one_value: f64,
    #[serde(skip)]
    pub p_zero_value: f64,
}

/// Output probabilities on every input of the cube.
pub fn simulation_table(alg: &QueryAlgorithm, f: &PartialBooleanFunction) -> Vec<SimulationRow> {
    (0..1usize << alg.n)
        .map(|x| {
            let p1 = alg.accept_probability(x);
            let p0 = alg.reject_probability(x);
            SimulationRow {
                input: format_input(x, alg.n),
                expected: f.get(x).to_char(),
                p_one: format_decimal(p1),
                p_zero: format_decimal(p0),
                p_one_value: p1,
                p_zero_value: p0,
            }
        })
        .collect()
}

/// `max_{x ∈ D} |P(output = 1) − f(x)|`.
pub fn max_simulation_error(alg: &QueryAlgorithm, f: &PartialBooleanFunction) -> f64 {
    f.domain()
        .map(|x| {
            let target = if f.value(x) == Some(true) { 1.0 } else { 0.0 };
            (alg.accept_probability(x) - target).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmExport {
    pub n: usize,
    pub beta: Vec<String>,
    pub amplitudes: Vec<String>,
    pub accept_projector: Vec<Vec<String>>,
    pub reject_projector: Vec<Vec<String>>,
    pub simulation: Vec<SimulationRow>,
}

/// Degree-1 sum-of-squares representation: row `l` holds the coefficients of
/// the Fourier polynomial `⟨αˡ|F(x)⟩₁ = ⟨eₗ, O_x ψ⟩`; the first `accept_rows`
/// rows belong to output 1.
#[derive(Clone, Debug)]
pub struct SosRepresentation {
    pub matrix: DMatrix<f64>,
    pub accept_rows: usize,
    pub gram: DMatrix<f64>,
    pub gram_diagonal: Vec<f64>,
    /// Number of bits the represented function depends on, when computed.
    pub dependence: Option<usize>,
}

/// Builds `[α_f]` from the algorithm's measurement basis and checks that its
/// Gram matrix is `diag(β)` and that at least `k` query columns are nonzero.
pub fn sos_matrix(alg: &QueryAlgorithm, f: &PartialBooleanFunction) -> Result<SosRepresentation> {
    if f.n() != alg.n {
        return Err(Error::DimensionMismatch { expected: alg.n, actual: f.n() });
    }
    let dim = alg.dimension();
    let rows: Vec<&DVector<f64>> = alg.accept_basis.iter().chain(&alg.reject_basis).collect();
    let matrix = DMatrix::from_fn(rows.len(), dim, |l, i| rows[l][i] * alg.amplitudes[i]);
    let gram = matrix.transpose() * &matrix;
    let gram_diagonal: Vec<f64> = (0..dim).map(|i| gram[(i, i)]).collect();

    let dependence = if f.n() <= DEPENDS_ON_MAX_BITS { Some(depends_on(f)?.k) } else { None };
    let sos = SosRepresentation { matrix, accept_rows: alg.accept_basis.len(), gram, gram_diagonal, dependence };

    let off = sos.gram_off_diagonal_max();
    if off > TOLERANCE {
        return Err(Error::Internal(format!("Gram off-diagonal entry {off:e} exceeds tolerance")));
    }
    let dev = sos.diagonal_deviation(&alg.beta);
    if dev > TOLERANCE {
        return Err(Error::Internal(format!("Gram diagonal deviates from the witness by {dev:e}")));
    }
    if let Some(k) = dependence {
        let nonzero = sos.nonzero_query_columns().len();
        if nonzero < k {
            return Err(Error::TheoremViolation(format!(
                "{nonzero} nonzero query columns for a function depending on {k} bits"
            )));
        }
    }
    Ok(sos)
}

impl SosRepresentation {
    pub fn n(&self) -> usize {
        self.matrix.ncols() - 1
    }

    fn row_value(&self, l: usize, x: usize) -> f64 {
        let n = self.n();
        (0..=n).map(|i| self.matrix[(l, i)] * query_sign(x, i, n) as f64).sum()
    }

    /// `Σ_{l ≤ p} |⟨αˡ|F(x)⟩₁|²`.
    pub fn accept_sum(&self, x: usize) -> f64 {
        (0..self.accept_rows).map(|l| self.row_value(l, x).powi(2)).sum()
    }

    /// `Σ_{l > p} |⟨αˡ|F(x)⟩₁|²`.
    pub fn reject_sum(&self, x: usize) -> f64 {
        (self.accept_rows..self.matrix.nrows()).map(|l| self.row_value(l, x).powi(2)).sum()
    }

    pub fn gram_off_diagonal_max(&self) -> f64 {
        let d = self.gram.nrows();
        (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.gram[(i, j)].abs())
            .fold(0.0, f64::max)
    }

    pub fn diagonal_deviation(&self, beta: &[Rational]) -> f64 {
        self.gram_diagonal
            .iter()
            .zip(beta)
            .map(|(u, b)| (u - to_f64(b)).abs())
            .fold(0.0, f64::max)
    }

    /// Query indices `i ∈ 1..=n` whose column has norm above the tolerance.
    pub fn nonzero_query_columns(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.matrix.column(i).norm() > TOLERANCE).collect()
    }

    /// Worst deviations from the defining identities, over `D` and over the full cube.
    pub fn check(&self, f: &PartialBooleanFunction) -> SosCheck {
        let mut c = SosCheck::default();
        for x in 0..1usize << self.n() {
            let acc = self.accept_sum(x);
            let rej = self.reject_sum(x);
            c.normalization = c.normalization.max((acc + rej - 1.0).abs());
            c.accept_excess = c.accept_excess.max(acc - 1.0);
            if let Some(v) = f.value(x) {
                let target = if v { 1.0 } else { 0.0 };
                c.accept = c.accept.max((acc - target).abs());
                c.reject = c.reject.max((rej - (1.0 - target)).abs());
            }
        }
        c.gram_off_diagonal = self.gram_off_diagonal_max();
        c
    }

    /// Rebuilds an algorithm from the representation alone: amplitudes
    /// `√uᵢ`, measurement vectors `αˡᵢ / √uᵢ` on the support of `u`.
    pub fn rebuild(&self) -> RebuiltAlgorithm {
        let dim = self.matrix.ncols();
        let amplitudes = DVector::from_iterator(dim, self.gram_diagonal.iter().map(|u| u.max(0.0).sqrt()));
        let accept = (0..self.accept_rows)
            .map(|l| {
                DVector::from_fn(dim, |i, _| {
                    if amplitudes[i] > TOLERANCE {
                        self.matrix[(l, i)] / amplitudes[i]
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        RebuiltAlgorithm { n: dim - 1, amplitudes, accept }
    }

    pub fn export(&self) -> SosExport {
        let d = self.matrix.ncols();
        SosExport {
            accept_rows: self.accept_rows,
            matrix: (0..self.matrix.nrows())
                .map(|l| (0..d).map(|i| format_decimal(self.matrix[(l, i)])).collect())
                .collect(),
            gram_diagonal: self.gram_diagonal.iter().map(|u| format_decimal(*u)).collect(),
            gram_off_diagonal_max: format!("{:.3e}", self.gram_off_diagonal_max()),
            nonzero_query_columns: self.nonzero_query_columns(),
            dependence: self.dependence,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SosCheck {
    /// `max_{x∈D} |Σ_{l≤p} − f(x)|`.
    pub accept: f64,
    /// `max_{x∈D} |Σ_{l>p} − (1 − f(x))|`.
    pub reject: f64,
    /// `max_x |Σ_all − 1|` over the whole cube.
    pub normalization: f64,
    /// `max_x (Σ_{l≤p} − 1)` over the whole cube; at most `τ` when sub-normalised.
    pub accept_excess: f64,
    pub gram_off_diagonal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SosExport {
    pub accept_rows: usize,
    pub matrix: Vec<Vec<String>>,
    pub gram_diagonal: Vec<String>,
    pub gram_off_diagonal_max: String,
    pub nonzero_query_columns: Vec<usize>,
    pub dependence: Option<usize>,
}

/// Algorithm reconstructed from an SOS matrix with diagonal Gram.
#[derive(Clone, Debug)]
pub struct RebuiltAlgorithm {
    n: usize,
    amplitudes: DVector<f64>,
    accept: Vec<DVector<f64>>,
}

impl RebuiltAlgorithm {
    pub fn accept_probability(&self, x: usize) -> f64 {
        let phi = DVector::from_iterator(
            self.n + 1,
            (0..=self.n).map(|i| self.amplitudes[i] * query_sign(x, i, self.n) as f64),
        );
        self.accept.iter().map(|e| e.dot(&phi).powi(2)).sum()
    }
}

/// At most 12 significant digits.
pub fn format_decimal(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if rounded == 0.0 {
        "0".to_owned()
    } else {
        format!("{rounded}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decider::decide_q1;
    use crate::linalg::rational;

    fn f(s: &str) -> PartialBooleanFunction {
        s.parse().unwrap()
    }

    fn half() -> Rational {
        rational(1, 2)
    }

    #[test]
    fn oracle_action() {
        let psi = [0.0, 0.5f64.sqrt(), 0.5f64.sqrt()];
        assert_eq!(oracle_vector(0b00, 2, &psi).unwrap(), psi.to_vec());
        assert_eq!(oracle_vector(0b10, 2, &psi).unwrap(), vec![0.0, -(0.5f64.sqrt()), 0.5f64.sqrt()]);
        assert!(oracle_vector(0, 2, &psi[..2]).is_err());
    }

    #[test]
    fn overlap_of_oracle_states_is_signed_beta_sum() {
        let beta = [rational(1, 6), rational(1, 3), rational(1, 4), rational(1, 4)];
        let amps: Vec<f64> = beta.iter().map(|b| to_f64(b).sqrt()).collect();
        for x in 0..8 {
            for y in 0..8 {
                let ox = oracle_vector(x, 3, &amps).unwrap();
                let oy = oracle_vector(y, 3, &amps).unwrap();
                let inner: f64 = ox.iter().zip(&oy).map(|(a, b)| a * b).sum();
                assert!((inner - to_f64(&signed_overlap(&beta, x ^ y, 3))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parity_algorithm() {
        let g = f("1001");
        let beta = vec![rational(0, 1), half(), half()];
        let alg = build_algorithm(&g, &beta).unwrap();
        assert_eq!(alg.dimension(), 3);
        // 00 and 11 share a line, 01 and 10 share the orthogonal one
        assert_eq!(alg.accept_basis().len(), 1);
        let s00 = alg.final_state(0b00);
        let s01 = alg.final_state(0b01);
        assert!((s00.dot(&alg.final_state(0b11)).abs() - 1.0).abs() < 1e-12);
        assert!(s00.dot(&s01).abs() < 1e-12);

        assert!((simulate(&alg, 0b00) - 1.0).abs() < TOLERANCE);
        assert!(simulate(&alg, 0b01).abs() < TOLERANCE);
        for x in 0..4 {
            assert!((alg.accept_probability(x) + alg.reject_probability(x) - 1.0).abs() < TOLERANCE);
        }
        assert!(alg.measurement_defects().max() < TOLERANCE);
    }

    #[test]
    fn one_bit_algorithm() {
        let alg = build_algorithm(&f("01"), &[half(), half()]).unwrap();
        assert!(simulate(&alg, 0).abs() < TOLERANCE);
        assert!((simulate(&alg, 1) - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(build_algorithm(&f("11"), &[half(), half()]), Err(Error::ConstantFunction)));
        assert!(matches!(
            build_algorithm(&f("1001"), &[half(), rational(1, 4), rational(1, 4)]),
            Err(Error::InvalidWitness)
        ));
    }

    #[test]
    fn parity_sos_matrix() {
        let g = f("1001");
        let alg = build_algorithm(&g, &[rational(0, 1), half(), half()]).unwrap();
        let sos = sos_matrix(&alg, &g).unwrap();
        assert!(sos.matrix.column(0).norm() < TOLERANCE);
        let u = &sos.gram_diagonal;
        assert!(u[0].abs() < TOLERANCE && (u[1] - 0.5).abs() < TOLERANCE && (u[2] - 0.5).abs() < TOLERANCE);
        assert_eq!(sos.nonzero_query_columns(), vec![1, 2]);
        assert_eq!(sos.dependence, Some(2));
        assert!(sos.gram_off_diagonal_max() < TOLERANCE);
        let c = sos.check(&g);
        assert!(c.accept < TOLERANCE && c.reject < TOLERANCE && c.normalization < TOLERANCE);
    }

    #[test]
    fn spread_witness_still_gives_diagonal_gram() {
        // 0 at 00, 1 at 10: any β with β₁ = ½ works; force one with β₀, β₂ > 0
        let g = f("0*1*");
        let beta = vec![rational(1, 4), half(), rational(1, 4)];
        let alg = build_algorithm(&g, &beta).unwrap();
        let sos = sos_matrix(&alg, &g).unwrap();
        assert!(sos.gram_off_diagonal_max() < TOLERANCE);
        assert!(sos.diagonal_deviation(&beta) < TOLERANCE);
        let c = sos.check(&g);
        assert!(c.normalization < TOLERANCE && c.accept_excess < TOLERANCE);
    }

    #[test]
    fn rebuilt_algorithm_reproduces_probabilities() {
        for text in ["1001", "0110", "01", "0*1*", "01*0", "0*****1*"] {
            let g = f(text);
            let beta = decide_q1(&g, false).unwrap().witness.unwrap();
            let alg = build_algorithm(&g, &beta).unwrap();
            let rebuilt = sos_matrix(&alg, &g).unwrap().rebuild();
            for x in g.domain() {
                assert!((rebuilt.accept_probability(x) - alg.accept_probability(x)).abs() <= 2.0 * TOLERANCE);
            }
        }
    }

    #[test]
    fn export_is_decimal_and_exact() {
        let g = f("1001");
        let alg = build_algorithm(&g, &[rational(0, 1), half(), half()]).unwrap();
        let e = alg.export(&g);
        assert_eq!(e.beta, vec!["0", "1/2", "1/2"]);
        assert_eq!(e.amplitudes, vec!["0", "0.707106781187", "0.707106781187"]);
        assert_eq!(e.simulation.len(), 4);
        assert_eq!(e.simulation[0].p_one, "1");
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(0.0), "0");
        assert_eq!(format_decimal(1.0 - 1e-16), "1");
        assert_eq!(format_decimal(-0.5), "-0.5");
        assert_eq!(format_decimal(1.0 / 3.0), "0.333333333333");
    }
}
