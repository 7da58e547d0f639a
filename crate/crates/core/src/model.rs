//! Gaussian linear bandit environment, sufficient statistics and the
//! closed-form half-space projections every other module builds on.
//!
//! Arm `k` has mean `φ_kᵀθ` and unit variance. Arms are indexed from 0.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ridge added to the design before every solve.
pub const RIDGE: f64 = 1e-8;

/// The design and response are rebuilt from per-arm totals at this period.
pub const RECOMPUTE_PERIOD: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Linear,
    Unstructured,
}

impl Structure {
    pub fn as_str(self) -> &'static str {
        match self {
            Structure::Linear => "linear",
            Structure::Unstructured => "unstructured",
        }
    }
}

/// A bandit environment: features, true parameter and structure tag.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    features: Vec<DVector<f64>>,
    theta: DVector<f64>,
    structure: Structure,
    means: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    #[serde(rename = "K")]
    k: usize,
    d: usize,
    structure: Structure,
    features: Vec<Vec<f64>>,
    theta: Vec<f64>,
}

impl BanditInstance {
    /// Builds an instance, checking dimensions, finiteness and the
    /// canonical-basis requirement of the unstructured tag.
    pub fn new(features: Vec<Vec<f64>>, theta: Vec<f64>, structure: Structure) -> Result<Self> {
        let k = features.len();
        let d = theta.len();
        if k < 2 {
            return Err(Error::InvalidInstance(format!("need at least 2 arms, got {k}")));
        }
        if d == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        if let Some(bad) = features.iter().position(|f| f.len() != d) {
            return Err(Error::InvalidInstance(format!(
                "feature {bad} has length {}, expected {d}",
                features[bad].len()
            )));
        }
        let finite = features.iter().flatten().chain(theta.iter()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInstance("non-finite entry".into()));
        }
        if structure == Structure::Unstructured {
            let canonical = d == k
                && features.iter().enumerate().all(|(i, f)| {
                    f.iter().enumerate().all(|(j, &x)| x == if i == j { 1.0 } else { 0.0 })
                });
            if !canonical {
                return Err(Error::InvalidInstance(
                    "unstructured instances must use the canonical basis".into(),
                ));
            }
        }
        let features: Vec<DVector<f64>> = features.into_iter().map(DVector::from_vec).collect();
        let theta = DVector::from_vec(theta);
        let means = features.iter().map(|f| f.dot(&theta)).collect();
        Ok(Self { features, theta, structure, means })
    }

    /// Unstructured instance with the given arm means.
    pub fn unstructured(means: Vec<f64>) -> Result<Self> {
        let k = means.len();
        let features = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(features, means, Structure::Unstructured)
    }

    pub fn k(&self) -> usize {
        self.features.len()
    }

    pub fn d(&self) -> usize {
        self.theta.len()
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn feature(&self, k: usize) -> &DVector<f64> {
        &self.features[k]
    }

    pub fn features(&self) -> &[DVector<f64>] {
        &self.features
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    /// True arm means `φ_kᵀθ`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Means `φ_kᵀλ` under an arbitrary parameter.
    pub fn means_under(&self, lambda: &DVector<f64>) -> Vec<f64> {
        self.features.iter().map(|f| f.dot(lambda)).collect()
    }

    pub fn check_arm(&self, k: usize) -> Result<()> {
        if k < self.k() {
            Ok(())
        } else {
            Err(Error::ArmOutOfRange { arm: k, k: self.k() })
        }
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            k: self.k(),
            d: self.d(),
            structure: self.structure,
            features: self.features.iter().map(|f| f.iter().copied().collect()).collect(),
            theta: self.theta.iter().copied().collect(),
        };
        serde_json::to_string(&file).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.k != file.features.len() || file.d != file.theta.len() {
            return Err(Error::InvalidInstance("K or d disagrees with the arrays".into()));
        }
        Self::new(file.features, file.theta, file.structure)
    }
}

/// Seeded source of Gaussian noise. Same seed, same draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Draws `φ_kᵀθ + z` with `z` standard normal.
pub fn sample_reward(inst: &BanditInstance, k: usize, rng: &mut RngStream) -> Result<f64> {
    inst.check_arm(k)?;
    Ok(inst.means[k] + rng.standard_normal())
}

/// A closed half-space `{λ : uᵀλ ≤ 0}` whose normal is built from arm features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSpace {
    /// `u = φ_a − φ_b`: arm `b` at least as good as arm `a`.
    Pair { a: usize, b: usize },
    /// `u = φ_arm` when `nonpositive`, else `u = −φ_arm`.
    Sign { arm: usize, nonpositive: bool },
}

/// Value and minimizer of `inf_{λ ∈ H} ½‖θ − λ‖²_W` for a half-space `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub value: f64,
    pub minimizer: DVector<f64>,
}

/// Metric in which projections are measured: the inverse of a
/// regularized design `W = Σ_k w_k φ_kφ_kᵀ`.
#[derive(Debug, Clone)]
pub enum InverseDesign {
    /// Unstructured instances keep the raw per-arm weights `w_k`.
    Diagonal(Vec<f64>),
    /// `(W + ridge·I)⁻¹`.
    Dense(DMatrix<f64>),
}

impl InverseDesign {
    /// Metric for real-valued per-arm weights (counts or allocations).
    pub fn from_weights(inst: &BanditInstance, weights: &[f64]) -> Self {
        match inst.structure {
            Structure::Unstructured => InverseDesign::Diagonal(weights.to_vec()),
            Structure::Linear => {
                let d = inst.d();
                let mut w = DMatrix::<f64>::zeros(d, d);
                for (f, &wk) in inst.features.iter().zip(weights) {
                    if wk != 0.0 {
                        w.ger(wk, f, f, 1.0);
                    }
                }
                InverseDesign::Dense(regularized_inverse(w))
            }
        }
    }

    /// `‖φ_k‖²` in the inverse metric; infinite for an unweighted unstructured arm.
    pub fn feature_norm_sq(&self, inst: &BanditInstance, k: usize) -> f64 {
        match self {
            InverseDesign::Diagonal(w) => 1.0 / w[k],
            InverseDesign::Dense(m) => quad(m, &inst.features[k]),
        }
    }

    fn normal(inst: &BanditInstance, h: HalfSpace) -> DVector<f64> {
        match h {
            HalfSpace::Pair { a, b } => &inst.features[a] - &inst.features[b],
            HalfSpace::Sign { arm, nonpositive: true } => inst.features[arm].clone(),
            HalfSpace::Sign { arm, nonpositive: false } => -&inst.features[arm],
        }
    }

    /// Infimum value only, without building the minimizer.
    pub fn value(&self, inst: &BanditInstance, theta: &DVector<f64>, h: HalfSpace) -> f64 {
        match self {
            InverseDesign::Diagonal(w) => match h {
                HalfSpace::Pair { a, b } => {
                    let gap = theta[a] - theta[b];
                    let s = w[a] + w[b];
                    if gap <= 0.0 || s <= 0.0 {
                        0.0
                    } else {
                        w[a] * w[b] / s * gap * gap / 2.0
                    }
                }
                HalfSpace::Sign { arm, nonpositive } => {
                    let g = if nonpositive { theta[arm] } else { -theta[arm] };
                    if g <= 0.0 {
                        0.0
                    } else {
                        w[arm] * g * g / 2.0
                    }
                }
            },
            InverseDesign::Dense(m) => {
                let u = Self::normal(inst, h);
                let g = u.dot(theta);
                if g <= 0.0 {
                    0.0
                } else {
                    g * g / (2.0 * quad(m, &u))
                }
            }
        }
    }

    /// Infimum value and the boundary point attaining it (`θ` itself when inside).
    pub fn project(&self, inst: &BanditInstance, theta: &DVector<f64>, h: HalfSpace) -> Projection {
        match self {
            InverseDesign::Diagonal(w) => {
                let value = self.value(inst, theta, h);
                let mut lambda = theta.clone();
                match h {
                    HalfSpace::Pair { a, b } => {
                        if theta[a] > theta[b] {
                            let s = w[a] + w[b];
                            let avg = if s > 0.0 {
                                (w[a] * theta[a] + w[b] * theta[b]) / s
                            } else {
                                (theta[a] + theta[b]) / 2.0
                            };
                            lambda[a] = avg;
                            lambda[b] = avg;
                        }
                    }
                    HalfSpace::Sign { arm, nonpositive } => {
                        let g = if nonpositive { theta[arm] } else { -theta[arm] };
                        if g > 0.0 {
                            lambda[arm] = 0.0;
                        }
                    }
                }
                Projection { value, minimizer: lambda }
            }
            InverseDesign::Dense(m) => {
                let u = Self::normal(inst, h);
                let g = u.dot(theta);
                if g <= 0.0 {
                    return Projection { value: 0.0, minimizer: theta.clone() };
                }
                let mu = m * &u;
                let q = u.dot(&mu);
                Projection { value: g * g / (2.0 * q), minimizer: theta - mu * (g / q) }
            }
        }
    }
}

fn quad(m: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    (m * u).dot(u)
}

fn regularized_inverse(mut w: DMatrix<f64>) -> DMatrix<f64> {
    for i in 0..w.nrows() {
        w[(i, i)] += RIDGE;
    }
    w.cholesky()
        .map(|c| c.inverse())
        .expect("ridge-regularized design is positive definite")
}

/// Sufficient statistics of a run. Observations themselves are not kept.
#[derive(Debug, Clone)]
pub struct Statistics {
    structure: Structure,
    t: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    design: DMatrix<f64>,
    response: DVector<f64>,
    theta_hat: DVector<f64>,
    inverse: InverseDesign,
}

impl Statistics {
    pub fn new(inst: &BanditInstance) -> Self {
        let (k, d) = (inst.k(), inst.d());
        let inverse = InverseDesign::from_weights(inst, &vec![0.0; k]);
        Self {
            structure: inst.structure,
            t: 0,
            counts: vec![0; k],
            sums: vec![0.0; k],
            design: DMatrix::zeros(d, d),
            response: DVector::zeros(d),
            theta_hat: DVector::zeros(d),
            inverse,
        }
    }

    /// Records observation `x` from arm `k` and refreshes the estimate.
    pub fn update(&mut self, inst: &BanditInstance, k: usize, x: f64) -> Result<()> {
        inst.check_arm(k)?;
        let phi = &inst.features[k];
        self.t += 1;
        self.counts[k] += 1;
        self.sums[k] += x;
        if self.t.is_multiple_of(RECOMPUTE_PERIOD) {
            self.rebuild(inst);
        } else {
            self.design.ger(1.0, phi, phi, 1.0);
            self.response.axpy(x, phi, 1.0);
        }
        self.refresh();
        Ok(())
    }

    fn rebuild(&mut self, inst: &BanditInstance) {
        self.design.fill(0.0);
        self.response.fill(0.0);
        for (j, f) in inst.features.iter().enumerate() {
            if self.counts[j] > 0 {
                self.design.ger(self.counts[j] as f64, f, f, 1.0);
                self.response.axpy(self.sums[j], f, 1.0);
            }
        }
    }

    fn refresh(&mut self) {
        match self.structure {
            Structure::Unstructured => {
                for j in 0..self.counts.len() {
                    self.theta_hat[j] = self.sums[j] / (self.counts[j] as f64 + RIDGE);
                }
                self.inverse = InverseDesign::Diagonal(self.counts.iter().map(|&n| n as f64).collect());
            }
            Structure::Linear => {
                let inv = regularized_inverse(self.design.clone());
                self.theta_hat = &inv * &self.response;
                self.inverse = InverseDesign::Dense(inv);
            }
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    pub fn inverse(&self) -> &InverseDesign {
        &self.inverse
    }

    /// Per-arm empirical means; zero for arms never pulled.
    pub fn emp_means(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(&self.sums)
            .map(|(&n, &s)| if n == 0 { 0.0 } else { s / n as f64 })
            .collect()
    }

    /// Solves `(V + ridge·I) θ = response` from scratch.
    pub fn estimate_theta(&self) -> DVector<f64> {
        let mut v = self.design.clone();
        for i in 0..v.nrows() {
            v[(i, i)] += RIDGE;
        }
        v.cholesky()
            .expect("ridge-regularized design is positive definite")
            .solve(&self.response)
    }

    /// Log-likelihood ratio `½(θ̂ − λ)ᵀ V (θ̂ − λ)`.
    pub fn llr_to(&self, lambda: &DVector<f64>) -> f64 {
        let diff = &self.theta_hat - lambda;
        ((&self.design * &diff).dot(&diff) / 2.0).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn two_arm() -> BanditInstance {
        BanditInstance::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 0.5], Structure::Linear).unwrap()
    }

    #[test]
    fn zero_noise_mean_is_feature_dot_theta() {
        let inst = BanditInstance::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 0.8], Structure::Linear)
            .unwrap();
        assert_eq!(inst.means(), &[1.0, 0.8]);
    }

    #[test]
    fn reward_noise_is_standard_normal() {
        let inst = BanditInstance::unstructured(vec![0.0, 1.0]).unwrap();
        let mut rng = RngStream::new(7);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_reward(&inst, 0, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() <= 0.02, "mean {mean}");
        assert!((0.97..=1.03).contains(&var), "variance {var}");
    }

    #[test]
    fn reward_rejects_bad_arm() {
        let inst = two_arm();
        assert!(matches!(
            sample_reward(&inst, 2, &mut RngStream::new(0)),
            Err(Error::ArmOutOfRange { arm: 2, k: 2 })
        ));
    }

    #[test]
    fn instance_validation() {
        assert!(BanditInstance::new(vec![vec![1.0]], vec![1.0], Structure::Linear).is_err());
        assert!(BanditInstance::new(vec![vec![1.0], vec![f64::NAN]], vec![1.0], Structure::Linear).is_err());
        assert!(BanditInstance::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]], vec![0.0, 0.0], Structure::Unstructured)
            .is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let inst = BanditInstance::new(
            vec![vec![0.1, -0.7], vec![1.0 / 3.0, 2.0f64.sqrt()]],
            vec![1e-17, -4.25],
            Structure::Linear,
        )
        .unwrap();
        let text = inst.to_json();
        assert!(text.starts_with("{\"K\":2,\"d\":2,\"structure\":\"linear\",\"features\""));
        assert_eq!(BanditInstance::from_json(&text).unwrap(), inst);
    }

    #[test]
    fn single_pull_updates_counts_and_design() {
        let inst = two_arm();
        let mut s = Statistics::new(&inst);
        s.update(&inst, 0, 0.7).unwrap();
        assert_eq!(s.counts(), &[1, 0]);
        assert_eq!(s.design(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert_abs_diff_eq!(s.theta_hat()[0], 0.7, epsilon = 1e-7);
        assert_eq!(s.theta_hat()[1], 0.0);
    }

    #[test]
    fn identity_design_estimate() {
        let inst = two_arm();
        let mut s = Statistics::new(&inst);
        s.update(&inst, 0, 1.0).unwrap();
        s.update(&inst, 1, 0.5).unwrap();
        assert_eq!(s.design(), &DMatrix::identity(2, 2));
        assert_eq!(s.response(), &DVector::from_vec(vec![1.0, 0.5]));
        assert_abs_diff_eq!(s.theta_hat()[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(s.theta_hat()[1], 0.5, epsilon = 1e-6);
    }

    #[test]
    fn empty_statistics_estimate_zero() {
        let s = Statistics::new(&two_arm());
        assert_eq!(s.theta_hat(), &DVector::zeros(2));
        assert_eq!(s.estimate_theta(), DVector::zeros(2));
    }

    #[test]
    fn llr_identity_design_example() {
        let inst = two_arm();
        let mut s = Statistics::new(&inst);
        s.update(&inst, 0, 1.0).unwrap();
        s.update(&inst, 1, 0.5).unwrap();
        assert_eq!(s.llr_to(&s.theta_hat().clone()), 0.0);
        let lambda = DVector::from_vec(vec![0.75, 0.75]);
        assert_abs_diff_eq!(s.llr_to(&lambda), 0.0625, epsilon = 1e-7);
    }

    fn random_linear(rng: &mut RngStream, k: usize, d: usize) -> BanditInstance {
        let features = (0..k).map(|_| (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect();
        let theta = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        BanditInstance::new(features, theta, Structure::Linear).unwrap()
    }

    #[test]
    fn design_matches_counts_after_many_updates() {
        let mut rng = RngStream::new(3);
        let inst = random_linear(&mut rng, 6, 4);
        let mut s = Statistics::new(&inst);
        for step in 0..10_007u64 {
            let k = (step * 7 + step / 3) as usize % 6;
            let x = sample_reward(&inst, k, &mut rng).unwrap();
            s.update(&inst, k, x).unwrap();
        }
        assert_eq!(s.counts().iter().sum::<u64>(), s.t());
        let mut expected = DMatrix::zeros(4, 4);
        for k in 0..6 {
            expected += inst.feature(k) * inst.feature(k).transpose() * s.counts()[k] as f64;
        }
        assert!((s.design() - expected).abs().max() <= 1e-12);
    }

    #[test]
    fn estimate_matches_dense_normal_equations() {
        let mut rng = RngStream::new(11);
        let inst = random_linear(&mut rng, 8, 5);
        let mut s = Statistics::new(&inst);
        for j in 0..20 {
            let x = sample_reward(&inst, j % 8, &mut rng).unwrap();
            s.update(&inst, j % 8, x).unwrap();
        }
        let mut v = s.design().clone();
        for i in 0..5 {
            v[(i, i)] += RIDGE;
        }
        let oracle = v.lu().solve(s.response()).unwrap();
        assert!((s.theta_hat() - &oracle).abs().max() <= 1e-8);
        assert!((s.estimate_theta() - &oracle).abs().max() <= 1e-8);
    }

    #[test]
    fn unstructured_estimate_is_empirical_mean() {
        let inst = BanditInstance::unstructured(vec![0.3, -0.1, 0.9]).unwrap();
        let mut rng = RngStream::new(5);
        let mut s = Statistics::new(&inst);
        for j in 0..300 {
            let x = sample_reward(&inst, j % 3, &mut rng).unwrap();
            s.update(&inst, j % 3, x).unwrap();
        }
        for (a, b) in s.theta_hat().iter().zip(s.emp_means()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn dense_and_diagonal_projections_agree() {
        let feats = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let dense_inst = BanditInstance::new(feats, vec![0.5, 0.1, -0.2], Structure::Linear).unwrap();
        let diag_inst = BanditInstance::unstructured(vec![0.5, 0.1, -0.2]).unwrap();
        let w = [3.0, 5.0, 2.0];
        let dense = InverseDesign::from_weights(&dense_inst, &w);
        let diag = InverseDesign::from_weights(&diag_inst, &w);
        let theta = dense_inst.theta().clone();
        for h in [
            HalfSpace::Pair { a: 0, b: 1 },
            HalfSpace::Pair { a: 1, b: 0 },
            HalfSpace::Pair { a: 1, b: 2 },
            HalfSpace::Sign { arm: 0, nonpositive: true },
            HalfSpace::Sign { arm: 2, nonpositive: false },
            HalfSpace::Sign { arm: 2, nonpositive: true },
        ] {
            let a = dense.project(&dense_inst, &theta, h);
            let b = diag.project(&diag_inst, &theta, h);
            assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-7);
            assert!((a.minimizer - b.minimizer).abs().max() < 1e-7, "{h:?}");
        }
    }

    proptest! {
        #[test]
        fn llr_equals_count_weighted_kl(seed in any::<u64>(), steps in 5usize..60) {
            let mut rng = RngStream::new(seed);
            let inst = random_linear(&mut rng, 5, 3);
            let mut s = Statistics::new(&inst);
            for j in 0..steps {
                let x = sample_reward(&inst, j % 5, &mut rng).unwrap();
                s.update(&inst, j % 5, x).unwrap();
            }
            let lambda = DVector::from_fn(3, |_, _| rng.uniform(-2.0, 2.0));
            let lhs = s.llr_to(&lambda);
            let rhs: f64 = (0..5)
                .map(|k| {
                    let diff = inst.feature(k).dot(s.theta_hat()) - inst.feature(k).dot(&lambda);
                    s.counts()[k] as f64 * diff * diff / 2.0
                })
                .sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
            prop_assert!(lhs >= 0.0);
        }

        #[test]
        fn doubling_counts_doubles_llr(seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let inst = random_linear(&mut rng, 4, 2);
            let mut once = Statistics::new(&inst);
            let mut twice = Statistics::new(&inst);
            for j in 0..8 {
                once.update(&inst, j % 4, 0.3 * j as f64).unwrap();
            }
            for j in 0..8 {
                twice.update(&inst, j % 4, 0.3 * j as f64).unwrap();
                twice.update(&inst, j % 4, 0.3 * j as f64).unwrap();
            }
            let lambda = DVector::from_fn(2, |_, _| rng.uniform(-1.0, 1.0));
            let a = once.llr_to(&lambda);
            let b = twice.llr_to(&lambda);
            prop_assert!((b - 2.0 * a).abs() <= 1e-6 * (1.0 + a));
        }

        #[test]
        fn identical_seeds_identical_rewards(seed in any::<u64>()) {
            let inst = BanditInstance::unstructured(vec![0.0, 0.5]).unwrap();
            let mut a = RngStream::new(seed);
            let mut b = RngStream::new(seed);
            for k in [0, 1, 1, 0, 1] {
                prop_assert_eq!(
                    sample_reward(&inst, k, &mut a).unwrap().to_bits(),
                    sample_reward(&inst, k, &mut b).unwrap().to_bits()
                );
            }
        }
    }
}
