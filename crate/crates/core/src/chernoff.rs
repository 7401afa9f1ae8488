//! Chernoff iteration for matrix semigroups, where `e^{tL}` is computable,
//! and the numeric form of the rate estimate for `‖S(t/n)^n f − e^{tL}f‖`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::exec::{map_range, Execution};
use crate::jet::factorial;

/// Dense `d × d` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    /// From row-major entries.
    pub fn new(d: usize, row_major: &[f64]) -> Result<Self> {
        if d == 0 || row_major.len() != d * d {
            return Err(Error::Shape(format!(
                "{} entries do not form a non-empty square matrix of order {d}",
                row_major.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(d, d, row_major))
    }

    /// Order inferred from the entry count.
    pub fn from_row_major(row_major: &[f64]) -> Result<Self> {
        let d = (row_major.len() as f64).sqrt().round() as usize;
        Self::new(d, row_major)
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!("{}x{} is not a non-empty square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Range("matrix has non-finite entries".into()));
        }
        Ok(SquareMatrix(m))
    }

    pub fn identity(d: usize) -> Self {
        SquareMatrix(DMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        SquareMatrix(DMatrix::zeros(d, d))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        SquareMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }

    pub fn apply(&self, f: &DVector<f64>) -> DVector<f64> {
        &self.0 * f
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        SquareMatrix(&self.0 * &other.0)
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        SquareMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SquareMatrix) -> SquareMatrix {
        SquareMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> SquareMatrix {
        SquareMatrix(&self.0 * s)
    }

    /// `M^k` by repeated squaring.
    pub fn pow(&self, mut k: usize) -> SquareMatrix {
        let mut result = DMatrix::identity(self.order(), self.order());
        let mut base = self.0.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        SquareMatrix(result)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 2-norm, see [`operator_norm`].
    pub fn norm2(&self) -> f64 {
        operator_norm(&self.0)
    }

    fn check_same_order(&self, other: &SquareMatrix) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Shape(format!(
                "orders {} and {} differ",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }
}

const POWER_ITERATION_TOL: f64 = 1e-12;
const POWER_ITERATION_CAP: usize = 2000;

/// Largest singular value by power iteration on `MᵀM`, stopping at relative
/// change below 1e-12. Falls back to a symmetric eigendecomposition of
/// `MᵀM` when the iteration cap is reached (clustered top singular values).
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    let d = gram.nrows();
    if gram.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let mut x = DVector::from_fn(d, |i, _| 1.0 + 0.1 * ((i + 1) as f64).sin());
    x /= x.norm();
    let mut lambda = 0.0f64;
    for _ in 0..POWER_ITERATION_CAP {
        let y = &gram * &x;
        let next = x.dot(&y);
        let ny = y.norm();
        if ny == 0.0 {
            break;
        }
        x = y / ny;
        if (next - lambda).abs() <= POWER_ITERATION_TOL * next.abs() {
            // guard against a start vector orthogonal to the top singular
            // direction: the residual must vanish too
            let r = (&gram * &x - &x * next).norm();
            if r <= 1e-6 * next.abs() {
                return next.max(0.0).sqrt();
            }
        }
        lambda = next;
    }
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt()
}

/// `e^{tL}` by scaling and squaring around a truncated Taylor series.
pub fn expm(l: &SquareMatrix, t: f64, tol: f64) -> Result<SquareMatrix> {
    if !(tol > 0.0) {
        return Err(crate::error::domain("tolerance must be positive"));
    }
    if !t.is_finite() {
        return Err(Error::Range(format!("non-finite time {t}")));
    }
    let d = l.order();
    let a = l.as_dmatrix() * t;
    let norm = SquareMatrix(a.clone()).norm1();
    if norm > 1e6 {
        return Err(Error::Range(format!("‖tL‖₁ = {norm:e} is too large for e^(tL)")));
    }
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let a = a / 2f64.powi(s as i32);
    let mut sum = DMatrix::identity(d, d);
    let mut term = DMatrix::identity(d, d);
    for k in 1..64 {
        term = &term * &a / k as f64;
        sum += &term;
        let tn = SquareMatrix(term.clone()).norm1();
        if tn <= tol * 1e-3 * SquareMatrix(sum.clone()).norm1() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    SquareMatrix::from_dmatrix(sum).map_err(|_| Error::Range("e^(tL) overflowed".into()))
}

/// Default accuracy of `e^{tL}`: two decades below the bound-check slack.
pub const EXPM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TelescopingResidual {
    pub residual: f64,
    /// Roundoff allowance `1e-10 (‖Z‖ + ‖Y‖)^n`.
    pub bound: f64,
}

impl TelescopingResidual {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

/// `‖(Z^n − Y^n) − Σ_k Z^{n−k−1}(Z−Y)Y^k‖`.
pub fn telescoping_residual(z: &SquareMatrix, y: &SquareMatrix, n: usize) -> Result<TelescopingResidual> {
    z.check_same_order(y)?;
    if n == 0 {
        return Err(precondition("telescoping needs n >= 1"));
    }
    let d = z.order();
    let mut zp = vec![DMatrix::identity(d, d)];
    let mut yp = vec![DMatrix::identity(d, d)];
    for k in 1..=n {
        zp.push(&zp[k - 1] * z.as_dmatrix());
        yp.push(&yp[k - 1] * y.as_dmatrix());
    }
    let diff = z.as_dmatrix() - y.as_dmatrix();
    let mut sum = DMatrix::zeros(d, d);
    for k in 0..n {
        sum += &zp[n - k - 1] * &diff * &yp[k];
    }
    let lhs = &zp[n] - &yp[n];
    Ok(TelescopingResidual {
        residual: operator_norm(&(lhs - sum)),
        bound: 1e-10 * (z.norm2() + y.norm2()).powi(n as i32),
    })
}

/// `Σ_{k=0}^{m} t^k L^k f / k!` in Horner form.
pub fn taylor_polynomial_apply(l: &SquareMatrix, f: &DVector<f64>, t: f64, m: usize) -> DVector<f64> {
    let mut acc = f.clone();
    for k in (1..=m).rev() {
        acc = f + l.apply(&acc) * (t / k as f64);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorRemainder {
    pub lhs: f64,
    pub rhs: f64,
    /// Allowance for the `e^{tL}` oracle error.
    pub roundoff: f64,
}

impl TaylorRemainder {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.roundoff
    }
}

/// Points of the `s`-lattice used for `sup_{s∈[0,t]} ‖e^{sL}‖`.
pub const REMAINDER_S_LATTICE: usize = 64;

/// `‖e^{tL}f − P_m‖` against `t^{m+1}/(m+1)! ‖L^{m+1}f‖ sup_s ‖e^{sL}‖`, the
/// sup taken over a 64-point lattice and inflated by `e^{‖L‖Δs}` so that it
/// dominates the continuum sup.
pub fn taylor_remainder_check(l: &SquareMatrix, f: &DVector<f64>, t: f64, m: usize) -> Result<TaylorRemainder> {
    if !(t >= 0.0) {
        return Err(precondition(format!("needs t >= 0, got {t}")));
    }
    let exact = expm(l, t, EXPM_TOL)?.apply(f);
    let lhs = (exact - taylor_polynomial_apply(l, f, t, m)).norm();
    let mut lfm = f.clone();
    for _ in 0..=m {
        lfm = l.apply(&lfm);
    }
    let ds = t / REMAINDER_S_LATTICE as f64;
    let mut sup = 0.0f64;
    for i in 0..=REMAINDER_S_LATTICE {
        sup = sup.max(expm(l, i as f64 * ds, EXPM_TOL)?.norm2());
    }
    let sup = sup * (l.norm2() * ds).exp();
    let rhs = t.powi(m as i32 + 1) / factorial(m + 1) * lfm.norm() * sup;
    Ok(TaylorRemainder {
        lhs,
        rhs,
        roundoff: 4.0 * EXPM_TOL * f.norm() * sup,
    })
}

/// `K_j(t)` of the Taylor-defect condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum KFunction {
    Zero,
    Constant { value: f64 },
    /// `coef · t^exponent`.
    Power { coef: f64, exponent: f64 },
}

impl KFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            KFunction::Zero => 0.0,
            KFunction::Constant { value } => *value,
            KFunction::Power { coef, exponent } => coef * t.powf(*exponent),
        }
    }
}

/// How `S(t)` is formed from `L`.
#[derive(Debug, Clone, PartialEq)]
pub enum ChernoffRecipe {
    ExactExp,
    /// `S(t) = Σ_{k≤m} t^k L^k / k! + t^exponent · P`.
    TaylorPlusPerturbation { perturbation: SquareMatrix, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSemigroupSystem {
    pub l: SquareMatrix,
    pub recipe: ChernoffRecipe,
    pub t_max: f64,
    pub m: usize,
    pub p: usize,
    pub m1: f64,
    pub m2: f64,
    pub w: f64,
    /// `K_0 .. K_{m+p}`; missing entries count as zero.
    pub k: Vec<KFunction>,
    /// Seed of the random unit vectors used for the Taylor-defect condition.
    pub condition_seed: u64,
}

/// Points of the `t`-lattices and largest power `k` used to certify the
/// conditions.
pub const CONDITION_LATTICE: usize = 64;
pub const CONDITION_MAX_POWER: usize = 64;
const CONDITION_VECTORS: usize = 16;
const CONDITION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `‖e^{tL}‖ <= M1 e^{wt}` on the lattice.
    pub growth: bool,
    /// `‖S(t)^k‖ <= M2 e^{kwt}` for `k <= 64`.
    pub power_bound: bool,
    /// Taylor-defect inequality on random unit vectors.
    pub taylor_defect: bool,
    /// `K_j(t) t^m` decreasing below 1e-6 as `t ↓ 0`; informative, not proved.
    pub small_t_flag: bool,
    pub lattice_points: usize,
    pub max_power: usize,
    /// Largest lhs/rhs ratio seen for each of the three conditions.
    pub worst_ratios: [f64; 3],
}

impl ConditionReport {
    /// Index (1-based) of the first failed condition.
    pub fn first_failure(&self) -> Option<usize> {
        [self.growth, self.power_bound, self.taylor_defect]
            .iter()
            .position(|ok| !ok)
            .map(|i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckRow {
    pub t: f64,
    pub n: usize,
    pub f_index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub rows: Vec<BoundCheckRow>,
    pub conditions: ConditionReport,
    pub min_slack: f64,
}

/// Slack tolerance of the bound check.
pub const SLACK_TOL: f64 = 1e-10;

impl BoundCheckReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.slack >= -SLACK_TOL)
    }
}

impl MatrixSemigroupSystem {
    pub fn order(&self) -> usize {
        self.l.order()
    }

    fn k_at(&self, j: usize, t: f64) -> f64 {
        self.k.get(j).map_or(0.0, |k| k.eval(t))
    }

    /// `S(t)`.
    pub fn chernoff_matrix(&self, t: f64) -> Result<SquareMatrix> {
        match &self.recipe {
            ChernoffRecipe::ExactExp => expm(&self.l, t, EXPM_TOL),
            ChernoffRecipe::TaylorPlusPerturbation { perturbation, exponent } => {
                let d = self.order();
                let mut sum = DMatrix::identity(d, d);
                let mut term = DMatrix::identity(d, d);
                for k in 1..=self.m {
                    term = &term * self.l.as_dmatrix() * (t / k as f64);
                    sum += &term;
                }
                let pert = if t == 0.0 { 0.0 } else { t.powf(*exponent) };
                SquareMatrix::from_dmatrix(sum + perturbation.as_dmatrix() * pert)
            }
        }
    }

    /// `‖L^j f‖` for `j = 0..=m+p`.
    fn generator_norms(&self, f: &DVector<f64>) -> Vec<f64> {
        let mut v = f.clone();
        let mut out = Vec::with_capacity(self.m + self.p + 1);
        for j in 0..=self.m + self.p {
            if j > 0 {
                v = self.l.apply(&v);
            }
            out.push(v.norm());
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) || self.p == 0 || self.m1 < 1.0 || self.m2 < 1.0 || self.w < 0.0 {
            return Err(precondition(
                "system needs T > 0, p >= 1, M1 >= 1, M2 >= 1 and w >= 0",
            ));
        }
        if let ChernoffRecipe::TaylorPlusPerturbation { perturbation, .. } = &self.recipe {
            self.l.check_same_order(perturbation)?;
        }
        Ok(())
    }

    /// Certifies the three hypotheses on lattices.
    pub fn check_conditions(&self) -> Result<ConditionReport> {
        self.validate()?;
        let ts: Vec<f64> = (1..=CONDITION_LATTICE)
            .map(|i| self.t_max * i as f64 / CONDITION_LATTICE as f64)
            .collect();
        let mut worst = [0.0f64; 3];
        let mut growth = true;
        for &t in std::iter::once(&0.0).chain(&ts) {
            let r = expm(&self.l, t, EXPM_TOL)?.norm2() / (self.m1 * (self.w * t).exp());
            worst[0] = worst[0].max(r);
            growth &= r <= 1.0 + CONDITION_RTOL;
        }
        let mut power_bound = true;
        for &t in &ts {
            let s = self.chernoff_matrix(t)?;
            let mut sk = s.clone();
            for k in 1..=CONDITION_MAX_POWER {
                if k > 1 {
                    sk = sk.mul(&s);
                }
                let r = sk.norm2() / (self.m2 * (k as f64 * self.w * t).exp());
                worst[1] = worst[1].max(r);
                power_bound &= r <= 1.0 + CONDITION_RTOL;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.condition_seed);
        let d = self.order();
        let mut taylor_defect = true;
        for _ in 0..CONDITION_VECTORS {
            let mut f = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
            let nf = f.norm();
            if nf == 0.0 {
                continue;
            }
            f /= nf;
            let norms = self.generator_norms(&f);
            for &t in &ts {
                let lhs = (self.chernoff_matrix(t)?.apply(&f) - taylor_polynomial_apply(&self.l, &f, t, self.m)).norm();
                let rhs = t.powi(self.m as i32 + 1)
                    * norms.iter().enumerate().map(|(j, n)| self.k_at(j, t) * n).sum::<f64>();
                let allowance = CONDITION_RTOL * rhs + 4.0 * EXPM_TOL;
                if rhs > 0.0 {
                    worst[2] = worst[2].max(lhs / rhs);
                } else if lhs > allowance {
                    worst[2] = f64::INFINITY;
                }
                taylor_defect &= lhs <= rhs + allowance;
            }
        }
        let small_ts: Vec<f64> = (1..=12).map(|k| self.t_max * 10f64.powi(-k)).collect();
        let small_t_flag = (0..=self.m + self.p).all(|j| {
            let vals: Vec<f64> = small_ts
                .iter()
                .map(|&t| self.k_at(j, t) * t.powi(self.m as i32))
                .collect();
            vals.windows(2).all(|w| w[1] <= w[0] + 1e-300) && vals.last().is_some_and(|v| *v < 1e-6)
        });
        Ok(ConditionReport {
            growth,
            power_bound,
            taylor_defect,
            small_t_flag,
            lattice_points: CONDITION_LATTICE,
            max_power: CONDITION_MAX_POWER,
            worst_ratios: worst,
        })
    }
}

/// `(M1 M2 t^{m+1} e^{wt} / n^m) Σ_j C_j(t/n) ‖L^j f‖` with
/// `C_{m+1}(τ) = K_{m+1}(τ)e^{−wτ} + M1/(m+1)!` and `C_j(τ) = K_j(τ)e^{−wτ}`.
pub fn chernoff_bound_rhs(sys: &MatrixSemigroupSystem, f: &DVector<f64>, t: f64, n: usize) -> Result<f64> {
    if n == 0 || (n as f64) < t / sys.t_max * (1.0 - 1e-12) {
        return Err(precondition(format!(
            "the estimate needs n >= t/T; got n = {n}, t = {t}, T = {}",
            sys.t_max
        )));
    }
    let tau = t / n as f64;
    let decay = (-sys.w * tau).exp();
    let norms = sys.generator_norms(f);
    let sum: f64 = norms
        .iter()
        .enumerate()
        .map(|(j, nj)| {
            let mut c = sys.k_at(j, tau) * decay;
            if j == sys.m + 1 {
                c += sys.m1 / factorial(sys.m + 1);
            }
            c * nj
        })
        .sum();
    Ok(sys.m1 * sys.m2 * t.powi(sys.m as i32 + 1) * (sys.w * t).exp() / (n as f64).powi(sys.m as i32) * sum)
}

/// Checks the estimate on every `(f, t, n)` with `n >= t/T`.
pub fn verify_main_bound(
    sys: &MatrixSemigroupSystem,
    fs: &[DVector<f64>],
    ts: &[f64],
    ns: &[usize],
) -> Result<BoundCheckReport> {
    verify_main_bound_with(sys, fs, ts, ns, Execution::default())
}

pub fn verify_main_bound_with(
    sys: &MatrixSemigroupSystem,
    fs: &[DVector<f64>],
    ts: &[f64],
    ns: &[usize],
    exec: Execution,
) -> Result<BoundCheckReport> {
    let conditions = sys.check_conditions()?;
    if let Some(index) = conditions.first_failure() {
        return Err(Error::ConditionViolated {
            index,
            detail: format!("worst lhs/rhs ratio {:.6e}", conditions.worst_ratios[index - 1]),
        });
    }
    if let Some(f) = fs.iter().find(|f| f.len() != sys.order()) {
        return Err(Error::Shape(format!("vector of length {} for order {}", f.len(), sys.order())));
    }
    let mut ts_sorted = ts.to_vec();
    ts_sorted.sort_by(f64::total_cmp);
    let mut ns_sorted = ns.to_vec();
    ns_sorted.sort_unstable();
    let pairs: Vec<(f64, usize)> = ts_sorted
        .iter()
        .flat_map(|&t| ns_sorted.iter().map(move |&n| (t, n)))
        .filter(|&(t, n)| n >= 1 && (n as f64) >= t / sys.t_max * (1.0 - 1e-12))
        .collect();
    let exact: Vec<Vec<DVector<f64>>> = ts_sorted
        .iter()
        .map(|&t| expm(&sys.l, t, EXPM_TOL).map(|e| fs.iter().map(|f| e.apply(f)).collect()))
        .collect::<Result<_>>()?;
    let chunks = map_range(pairs.len(), exec, |i| -> Result<Vec<BoundCheckRow>> {
        let (t, n) = pairs[i];
        let ti = ts_sorted.iter().position(|&x| x == t).expect("t from list");
        let s = sys.chernoff_matrix(t / n as f64)?;
        fs.iter()
            .enumerate()
            .map(|(fi, f)| {
                let mut v = f.clone();
                for _ in 0..n {
                    v = s.apply(&v);
                }
                let lhs = (v - &exact[ti][fi]).norm();
                let rhs = chernoff_bound_rhs(sys, f, t, n)?;
                Ok(BoundCheckRow {
                    t,
                    n,
                    f_index: fi,
                    lhs,
                    rhs,
                    slack: rhs - lhs,
                })
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(pairs.len() * fs.len());
    for chunk in chunks {
        rows.extend(chunk?);
    }
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Ok(BoundCheckReport {
        rows,
        conditions,
        min_slack,
    })
}

/// Random orthogonal `d × d` matrix from the QR factorization of a
/// uniform random matrix.
fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// Symmetric `L` with eigenvalues spread over `[-1, -0.1]`, perturbation
/// `P = N L^3` with `‖N‖ = 1`, and `S(t) = I + tL + t²L²/2 + t^{2+ε} P`.
/// Constants `m = 2`, `p = 1`, `M1 = M2 = w = T = 1`, `K_3(t) = t^{ε−1}`.
/// Also returns a unit test vector.
pub fn example_system(d: usize, epsilon: f64, seed: u64) -> Result<(MatrixSemigroupSystem, DVector<f64>)> {
    if d == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(precondition("needs d >= 1 and 0 < ε < 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(d, &mut rng);
    let eig: Vec<f64> = (0..d)
        .map(|i| if d == 1 { -1.0 } else { -1.0 + 0.9 * i as f64 / (d - 1) as f64 })
        .collect();
    let l = &q * DMatrix::from_diagonal(&DVector::from_vec(eig)) * q.transpose();
    let l = SquareMatrix::from_dmatrix(l)?;
    let n = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let n = &n / operator_norm(&n);
    let p = SquareMatrix::from_dmatrix(n * l.pow(3).as_dmatrix())?;
    let mut f = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
    f /= f.norm();
    let mut k = vec![KFunction::Zero; 4];
    k[3] = KFunction::Power {
        coef: 1.0,
        exponent: epsilon - 1.0,
    };
    Ok((
        MatrixSemigroupSystem {
            l,
            recipe: ChernoffRecipe::TaylorPlusPerturbation {
                perturbation: p,
                exponent: 2.0 + epsilon,
            },
            t_max: 1.0,
            m: 2,
            p: 1,
            m1: 1.0,
            m2: 1.0,
            w: 1.0,
            k,
            condition_seed: seed,
        },
        f,
    ))
}

/// `A − (λ_max(sym A) + margin) I` for uniform `A ∈ [−1, 1]^{d×d}`: the
/// symmetric part is negative definite, so `‖e^{tL}‖ <= 1`.
pub fn random_stable_matrix(d: usize, margin: f64, rng: &mut ChaCha8Rng) -> SquareMatrix {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let sym = (&a + a.transpose()) * 0.5;
    let top = SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    SquareMatrix(a - DMatrix::identity(d, d) * (top + margin))
}

/// Uniform `[−1, 1]` entries.
pub fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> SquareMatrix {
    SquareMatrix(DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)))
}

/// JSON form of a [`MatrixSemigroupSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Row-major entries of `L`.
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    #[serde(rename = "S")]
    pub s: RecipeSpec,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    pub w: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    #[serde(rename = "K", default)]
    pub k: Vec<KSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum RecipeSpec {
    ExactExp,
    TaylorPlusPerturbation {
        /// Row-major entries of `P`.
        perturbation: Vec<f64>,
        exponent: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSpec {
    pub j: usize,
    #[serde(flatten)]
    pub k: KFunction,
}

impl SystemSpec {
    pub fn build(&self, condition_seed: u64) -> Result<MatrixSemigroupSystem> {
        let l = SquareMatrix::from_row_major(&self.l)?;
        let recipe = match &self.s {
            RecipeSpec::ExactExp => ChernoffRecipe::ExactExp,
            RecipeSpec::TaylorPlusPerturbation { perturbation, exponent } => {
                ChernoffRecipe::TaylorPlusPerturbation {
                    perturbation: SquareMatrix::from_row_major(perturbation)?,
                    exponent: *exponent,
                }
            }
        };
        let mut k = vec![KFunction::Zero; self.m + self.p + 1];
        for spec in &self.k {
            let slot = k.get_mut(spec.j).ok_or_else(|| {
                Error::Shape(format!("K index {} exceeds m + p = {}", spec.j, self.m + self.p))
            })?;
            *slot = spec.k.clone();
        }
        let sys = MatrixSemigroupSystem {
            l,
            recipe,
            t_max: self.t_max,
            m: self.m,
            p: self.p,
            m1: self.m1,
            m2: self.m2,
            w: self.w,
            k,
            condition_seed,
        };
        sys.validate()?;
        Ok(sys)
    }
}
