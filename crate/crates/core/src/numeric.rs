//! Numerical checks on admissible realizations.
//!
//! Structural verdicts are statements about almost every numerical
//! realization of a pattern pair. This module samples realizations and
//! tests them with the classical rank criteria:
//!
//! * controllability: `rank [B, AB, ..., A^{n-1}B] = n`, cross-checked with
//!   the Hautus test `rank [A - λI, B] = n` at every eigenvalue;
//! * zero controllability: `im A^n ⊆ im [B, AB, ..., A^{n-1}B]`,
//!   cross-checked with the Hautus test at every nonzero eigenvalue.
//!
//! Numerical rank counts singular values above
//! `max(rows, cols) · σ_max · 1e-10`.

use nalgebra::{ComplexField, DMatrix, DVector};
type Complex64 = nalgebra::Complex<f64>;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::PatternMatrix;
use crate::structural::{is_generically_controllable, is_generically_zero_controllable};

/// Relative singular-value threshold for numerical rank.
pub const RANK_RTOL: f64 = 1e-10;

/// Default threshold separating nonzero eigenvalues from zero ones,
/// relative to `1 + spectral radius`.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Sampling law for the free entries: magnitude uniform in
/// `[min_magnitude, max_magnitude]`, sign uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueSpec {
    pub min_magnitude: f64,
    pub max_magnitude: f64,
}

impl Default for ValueSpec {
    fn default() -> Self {
        Self {
            min_magnitude: 0.1,
            max_magnitude: 2.0,
        }
    }
}

impl ValueSpec {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let magnitude = rng.gen_range(self.min_magnitude..=self.max_magnitude);
        if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    }
}

/// A numerical pair `(Ā, B̄)` admissible to a pattern pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub seed: u64,
    pub value_spec: ValueSpec,
}

impl Realization {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    /// Wraps explicit matrices. `b` may have zero columns.
    pub fn from_matrices(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || b.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch {
                what: "A must be n x n and B must be n x m",
                a_rows: a.nrows(),
                a_cols: a.ncols(),
                b_rows: b.nrows(),
                b_cols: b.ncols(),
            });
        }
        Ok(Self {
            a,
            b,
            seed: 0,
            value_spec: ValueSpec::default(),
        })
    }
}

pub fn sample_realization(
    pattern_a: &PatternMatrix,
    pattern_b: Option<&PatternMatrix>,
    seed: u64,
) -> Result<Realization> {
    sample_realization_with(pattern_a, pattern_b, seed, ValueSpec::default())
}

/// Draws a realization; identical `(patterns, seed, spec)` give identical
/// matrices. Entries are drawn in row-major order, `A` before `B`.
pub fn sample_realization_with(
    pattern_a: &PatternMatrix,
    pattern_b: Option<&PatternMatrix>,
    seed: u64,
    value_spec: ValueSpec,
) -> Result<Realization> {
    let n = pattern_a.n_rows();
    let empty_b = PatternMatrix::zeros(n, 0);
    let pattern_b = pattern_b.unwrap_or(&empty_b);
    if !pattern_a.is_square() || pattern_b.n_rows() != n {
        return Err(Error::DimensionMismatch {
            what: "A must be n x n and B must be n x m",
            a_rows: pattern_a.n_rows(),
            a_cols: pattern_a.n_cols(),
            b_rows: pattern_b.n_rows(),
            b_cols: pattern_b.n_cols(),
        });
    }
    if !(value_spec.min_magnitude > 0.0 && value_spec.min_magnitude <= value_spec.max_magnitude) {
        return Err(Error::InvalidArgument(format!(
            "magnitude range [{}, {}] must be positive and non-empty",
            value_spec.min_magnitude, value_spec.max_magnitude
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(n, n);
    for (i, j) in pattern_a.iter() {
        a[(i, j)] = value_spec.sample(&mut rng);
    }
    let mut b = DMatrix::zeros(n, pattern_b.n_cols());
    for (i, j) in pattern_b.iter() {
        b[(i, j)] = value_spec.sample(&mut rng);
    }
    Ok(Realization {
        a,
        b,
        seed,
        value_spec,
    })
}

/// Numerical rank by singular values.
pub fn numeric_rank<T>(m: &DMatrix<T>) -> usize
where
    T: ComplexField<RealField = f64>,
{
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    let cutoff = m.nrows().max(m.ncols()) as f64 * smax * RANK_RTOL;
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Scales every column to unit length, so the rank decision no longer
/// depends on how fast `Ā^k` grows. `bound` is the same product evaluated on
/// absolute values; a column that is negligible next to its bound is
/// cancellation noise and becomes zero instead.
fn normalize_columns(m: &DMatrix<f64>, bound: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (mut col, limit) in out.column_iter_mut().zip(bound.column_iter()) {
        let norm = col.norm();
        if norm > RANK_RTOL * limit.norm() {
            col /= norm;
        } else {
            col.fill(0.0);
        }
    }
    out
}

fn hcat(left: &DMatrix<f64>, right: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols())
        .copy_from(right);
    out
}

/// `[B̄, ĀB̄, ..., Ā^{n-1}B̄]`, of size `n × nm`.
pub fn controllability_matrix(r: &Realization) -> DMatrix<f64> {
    krylov(&r.a, &r.b)
}

fn krylov(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.ncols());
    let mut out = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.columns_mut(k * m, m).copy_from(&block);
        block = a * block;
    }
    out
}

/// Controllability matrix and `Ā^n`, column-normalized for the image tests.
fn normalized_image_blocks(r: &Realization) -> (DMatrix<f64>, DMatrix<f64>) {
    let (abs_a, abs_b) = (r.a.abs(), r.b.abs());
    let n = r.n();
    let c = normalize_columns(&krylov(&r.a, &r.b), &krylov(&abs_a, &abs_b));
    let an = normalize_columns(&matrix_power(&r.a, n), &matrix_power(&abs_a, n));
    (c, an)
}

fn matrix_power(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = a * out;
    }
    out
}

/// Groups the indices of a square matrix into the strongly connected
/// components of its nonzero pattern (edge `j -> i` when `m[(i, j)] != 0`).
/// Permuting to these blocks makes the matrix block triangular, so its
/// spectrum is the union of the diagonal blocks' spectra.
fn irreducible_blocks(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let edge = |from: usize, to: usize| from != to && m[(to, from)] != 0.0;

    // Kosaraju: finishing order on the forward graph, then sweeps on the reverse.
    let mut seen = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&(v, next)) = stack.last() {
            match (next..n).find(|&w| !seen[w] && edge(v, w)) {
                Some(w) => {
                    stack.last_mut().expect("non-empty").1 = w + 1;
                    seen[w] = true;
                    stack.push((w, 0));
                }
                None => {
                    finish.push(v);
                    stack.pop();
                }
            }
        }
    }

    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    for &root in finish.iter().rev() {
        if assigned[root] {
            continue;
        }
        assigned[root] = true;
        let mut block = vec![root];
        let mut todo = vec![root];
        while let Some(v) = todo.pop() {
            for w in 0..n {
                if !assigned[w] && edge(w, v) {
                    assigned[w] = true;
                    block.push(w);
                    todo.push(w);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of one irreducible block. The unshifted QR iteration can
/// stall on nilpotent blocks, so a failed attempt is retried on `M + σI`.
fn block_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let k = m.nrows();
    if k == 1 {
        return Some(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    let scale = m.norm().max(1.0);
    for factor in [0.0, 0.7, -1.3, 2.1, -0.45] {
        let shift = factor * scale;
        let shifted = m + DMatrix::<f64>::identity(k, k) * shift;
        if let Some(schur) = nalgebra::Schur::try_new(shifted, f64::EPSILON, SCHUR_MAX_ITER) {
            return Some(
                schur
                    .complex_eigenvalues()
                    .iter()
                    .map(|l| l - shift)
                    .collect(),
            );
        }
    }
    None
}

/// Eigenvalues of `Ā`, with multiplicity. Exact zeros in `Ā` are used to
/// split it into irreducible diagonal blocks first, which keeps eigenvalues
/// of trivial blocks exact.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut out = Vec::with_capacity(a.nrows());
    for block in irreducible_blocks(a) {
        let sub = a.select_rows(&block).select_columns(&block);
        let eigs = block_eigenvalues(&sub).ok_or_else(|| {
            Error::Numerical(format!(
                "eigenvalue iteration did not converge on a {}x{} block",
                sub.nrows(),
                sub.ncols()
            ))
        })?;
        out.extend(eigs);
    }
    Ok(out)
}

fn spectral_radius(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// `rank [Ā - λI, B̄] = n`.
fn hautus_full_rank(r: &Realization, lambda: Complex64) -> bool {
    let n = r.n();
    let m = r.m();
    let pencil = DMatrix::from_fn(n, n + m, |i, j| {
        if j < n {
            let shift = if i == j {
                lambda
            } else {
                Complex64::new(0.0, 0.0)
            };
            Complex64::new(r.a[(i, j)], 0.0) - shift
        } else {
            Complex64::new(r.b[(i, j - n)], 0.0)
        }
    });
    numeric_rank(&pencil) == n
}

/// Result of a numerical test run two ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericVerdict {
    /// Final verdict; false whenever the two routes disagree.
    pub verdict: bool,
    /// Image (Krylov subspace) criterion.
    pub image_test: bool,
    /// Hautus eigenvalue criterion.
    pub hautus_test: bool,
    /// The two routes disagreed: the instance is numerically borderline.
    pub flagged: bool,
}

impl NumericVerdict {
    fn combine(image_test: bool, hautus_test: bool) -> Self {
        let flagged = image_test != hautus_test;
        Self {
            verdict: image_test && hautus_test,
            image_test,
            hautus_test,
            flagged,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Controllability of a realization. `tol` is unused by the rank tests and
/// only validated, for symmetry with [`is_zero_controllable_numeric`].
pub fn is_controllable_numeric(r: &Realization, tol: f64) -> Result<NumericVerdict> {
    check_tol(tol)?;
    let n = r.n();
    let (c, _) = normalized_image_blocks(r);
    let image_test = numeric_rank(&c) == n;
    let hautus_test = eigenvalues(&r.a)?
        .into_iter()
        .all(|l| hautus_full_rank(r, l));
    Ok(NumericVerdict::combine(image_test, hautus_test))
}

/// Zero controllability of a realization. Eigenvalues with
/// `|λ| <= tol · (1 + ρ(Ā))` count as zero in the Hautus route.
pub fn is_zero_controllable_numeric(r: &Realization, tol: f64) -> Result<NumericVerdict> {
    check_tol(tol)?;
    let (c, an) = normalized_image_blocks(r);
    let image_test = numeric_rank(&hcat(&c, &an)) == numeric_rank(&c);

    let eigs = eigenvalues(&r.a)?;
    let cutoff = tol * (1.0 + spectral_radius(&eigs));
    let hautus_test = eigs
        .into_iter()
        .filter(|l| l.norm() > cutoff)
        .all(|l| hautus_full_rank(r, l));
    Ok(NumericVerdict::combine(image_test, hautus_test))
}

/// Number of eigenvalues of `Ā` with `|λ| > tol · (1 + ρ(Ā))`.
pub fn count_nonzero_eigenvalues(r: &Realization, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    let eigs = eigenvalues(&r.a)?;
    let cutoff = tol * (1.0 + spectral_radius(&eigs));
    Ok(eigs.iter().filter(|l| l.norm() > cutoff).count())
}

/// Separation of zero and nonzero eigenvalue groups.
pub const WELL_CONDITIONED_GAP: f64 = 1e-3;
/// Smallest admissible `(min |λ| / ρ)^n` over nonzero eigenvalues.
pub const WELL_CONDITIONED_RANGE: f64 = 1e-6;

/// Spectral quantities that decide how trustworthy the rank tests are on a
/// realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub spectral_radius: f64,
    /// Smallest `|λ|` above the zero cutoff, or `None` if every eigenvalue
    /// is numerically zero.
    pub min_nonzero_modulus: Option<f64>,
    /// Smallest distance between two nonzero eigenvalues.
    pub min_separation: Option<f64>,
    pub well_conditioned: bool,
}

/// Classifies a realization. It is well conditioned when every nonzero
/// eigenvalue lies at least `1e-3 · (1 + ρ)` from zero and from every other
/// nonzero eigenvalue, and `(min |λ| / ρ)^n ≥ 1e-6`. Nothing here looks at
/// `B̄` or at either verdict.
pub fn conditioning(r: &Realization, tol: f64) -> Result<Conditioning> {
    check_tol(tol)?;
    let eigs = eigenvalues(&r.a)?;
    let rho = spectral_radius(&eigs);
    let cutoff = tol * (1.0 + rho);
    let nonzero: Vec<Complex64> = eigs.into_iter().filter(|l| l.norm() > cutoff).collect();
    let min_nonzero_modulus = nonzero.iter().map(|l| l.norm()).reduce(f64::min);
    let min_separation = nonzero
        .iter()
        .enumerate()
        .flat_map(|(i, a)| nonzero[i + 1..].iter().map(move |b| (a - b).norm()))
        .reduce(f64::min);

    let gap = WELL_CONDITIONED_GAP * (1.0 + rho);
    let well_conditioned = min_nonzero_modulus
        .is_none_or(|m| m >= gap && (m / rho).powi(r.n() as i32) >= WELL_CONDITIONED_RANGE)
        && min_separation.is_none_or(|s| s >= gap);

    Ok(Conditioning {
        spectral_radius: rho,
        min_nonzero_modulus,
        min_separation,
        well_conditioned,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringResult {
    /// `u(0), ..., u(τ-1)`.
    pub controls: Vec<DVector<f64>>,
    /// `x(0), ..., x(τ)`.
    pub trajectory: Vec<DVector<f64>>,
    pub final_norm: f64,
    pub horizon: usize,
}

/// Simulates `x(k+1) = Āx(k) + B̄u(k)` for the given controls.
pub fn simulate(
    r: &Realization,
    x0: &DVector<f64>,
    controls: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut traj = Vec::with_capacity(controls.len() + 1);
    traj.push(x0.clone());
    for u in controls {
        let x = traj.last().expect("trajectory starts non-empty");
        let next = &r.a * x + &r.b * u;
        traj.push(next);
    }
    traj
}

/// Minimum-norm least-squares controls driving `x0` towards the origin in
/// `horizon` steps: solves `Σ_k Ā^{τ-1-k} B̄ u(k) = -Ā^τ x0`, then simulates.
/// With no inputs the system simply runs freely.
pub fn deadbeat_steer(
    r: &Realization,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<SteeringResult> {
    let (n, m) = (r.n(), r.m());
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if x0.len() != n {
        return Err(Error::InvalidArgument(format!(
            "initial state has length {}, expected {n}",
            x0.len()
        )));
    }

    let controls = if m == 0 {
        vec![DVector::zeros(0); horizon]
    } else {
        // column block k holds Ā^{τ-1-k} B̄
        let mut reach = DMatrix::zeros(n, horizon * m);
        let mut block = r.b.clone();
        for k in (0..horizon).rev() {
            reach.columns_mut(k * m, m).copy_from(&block);
            block = &r.a * block;
        }
        let rhs = -(matrix_power(&r.a, horizon) * x0);
        let svd = reach.svd(true, true);
        let smax = svd.singular_values.max();
        let eps = n.max(horizon * m) as f64 * smax * RANK_RTOL;
        let stacked = if smax == 0.0 {
            DVector::zeros(horizon * m)
        } else {
            svd.solve(&rhs, eps)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
        };
        (0..horizon)
            .map(|k| stacked.rows(k * m, m).into_owned())
            .collect()
    };

    let trajectory = simulate(r, x0, &controls);
    let final_norm = trajectory.last().expect("non-empty").norm();
    Ok(SteeringResult {
        controls,
        trajectory,
        final_norm,
        horizon,
    })
}

/// Largest relative residual of the closed-form solution
/// `x(l) = Ā^l x(0) + Σ_{k<l} Ā^{l-1-k} B̄ u(k)` along a trajectory.
pub fn solution_formula_residual(
    r: &Realization,
    trajectory: &[DVector<f64>],
    controls: &[DVector<f64>],
) -> f64 {
    let x0 = &trajectory[0];
    let mut worst: f64 = 0.0;
    for l in 1..trajectory.len().min(controls.len() + 1) {
        let free = matrix_power(&r.a, l) * x0;
        let mut scale = free.norm();
        let mut predicted = free;
        for (k, u) in controls.iter().enumerate().take(l) {
            let term = matrix_power(&r.a, l - 1 - k) * (&r.b * u);
            scale += term.norm();
            predicted += term;
        }
        let residual = (&trajectory[l] - predicted).norm() / scale.max(1.0);
        worst = worst.max(residual);
    }
    worst
}

/// Agreement between structural verdicts and numerical tests over many
/// seeded realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub trials: usize,
    pub base_seed: u64,
    pub structural_zero_controllable: bool,
    pub zero_controllable_agree: usize,
    pub zero_controllable_flagged: usize,
    pub structural_controllable: Option<bool>,
    pub controllable_agree: Option<usize>,
    pub controllable_flagged: Option<usize>,
}

impl MonteCarloStats {
    pub fn zero_controllable_fraction(&self) -> f64 {
        self.zero_controllable_agree as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    zc: NumericVerdict,
    ctrl: Option<NumericVerdict>,
}

/// Runs `trials` realizations; trial `i` uses seed `base_seed + i`, so the
/// outcome does not depend on scheduling.
pub fn monte_carlo_verify(
    pattern_a: &PatternMatrix,
    pattern_b: Option<&PatternMatrix>,
    trials: usize,
    base_seed: u64,
    tol: f64,
    check_controllability: bool,
) -> Result<MonteCarloStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    check_tol(tol)?;
    let structural_zc = is_generically_zero_controllable(pattern_a, pattern_b)?.verdict;
    let structural_ctrl = if check_controllability {
        let empty = PatternMatrix::zeros(pattern_a.n_rows(), 0);
        Some(is_generically_controllable(pattern_a, pattern_b.unwrap_or(&empty))?.controllable)
    } else {
        None
    };

    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Trial> {
            let r = sample_realization(pattern_a, pattern_b, base_seed.wrapping_add(i as u64))?;
            let zc = is_zero_controllable_numeric(&r, tol)?;
            let ctrl = if check_controllability {
                Some(is_controllable_numeric(&r, tol)?)
            } else {
                None
            };
            Ok(Trial { zc, ctrl })
        })
        .collect::<Result<_>>()?;

    let zc_agree = outcomes
        .iter()
        .filter(|t| t.zc.verdict == structural_zc)
        .count();
    let zc_flagged = outcomes.iter().filter(|t| t.zc.flagged).count();
    let (controllable_agree, controllable_flagged) = match structural_ctrl {
        Some(s) => (
            Some(
                outcomes
                    .iter()
                    .filter(|t| t.ctrl.is_some_and(|c| c.verdict == s))
                    .count(),
            ),
            Some(
                outcomes
                    .iter()
                    .filter(|t| t.ctrl.is_some_and(|c| c.flagged))
                    .count(),
            ),
        ),
        None => (None, None),
    };

    Ok(MonteCarloStats {
        trials,
        base_seed,
        structural_zero_controllable: structural_zc,
        zero_controllable_agree: zc_agree,
        zero_controllable_flagged: zc_flagged,
        structural_controllable: structural_ctrl,
        controllable_agree,
        controllable_flagged,
    })
}

/// A random vector of unit length, reproducible from `seed`.
pub fn random_unit_vector(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        let norm = v.norm();
        if norm > 1e-3 || n == 0 {
            return if n == 0 { v } else { v / norm };
        }
    }
}
