//! Per-agent objective bundles: value, gradient, Hessian, and the
//! strong-convexity / smoothness moduli the stepsize theory consumes.
//!
//! Two families are provided: scalar quadratics `c_i (x - b_i)^2` and
//! regularized logistic regression over a partitioned dataset.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{cast, Scalar};

/// One labelled sample: dense feature vector and a label in `{-1, +1}`.
#[derive(Debug, Clone)]
pub struct DataPoint<T> {
    pub features: Vec<T>,
    pub label: T,
}

/// A labelled dataset with a common feature dimension.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    points: Vec<DataPoint<T>>,
    dim: usize,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(points: Vec<DataPoint<T>>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.features.len());
        if points.iter().any(|p| p.features.len() != dim) {
            return Err(Error::InvalidInput("feature dimensions differ across points".into()));
        }
        let one = T::one();
        if points.iter().any(|p| p.label != one && p.label != -one) {
            return Err(Error::UnsupportedDataset("labels must be -1 or +1".into()));
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[DataPoint<T>] {
        &self.points
    }

    /// Deterministic subsample without replacement.
    pub fn subsample(&self, count: usize, seed: u64) -> Self {
        if count >= self.points.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        // Partial Fisher-Yates: the first `count` slots end up uniform.
        for i in 0..count {
            let j = rng.random_range(i..idx.len());
            idx.swap(i, j);
        }
        let points = idx[..count].iter().map(|&i| self.points[i].clone()).collect();
        Self { points, dim: self.dim }
    }
}

/// Parse a file in LIBSVM sparse text format: each line is
/// `label idx:val idx:val ...` with 1-based indices. Feature vectors are
/// densified to the largest index seen; the two raw label values are mapped
/// to `-1`/`+1` (smaller raw label becomes `-1`).
pub fn load_libsvm<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_libsvm(&text)
}

/// Same as [`load_libsvm`] but over in-memory text.
pub fn parse_libsvm<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    let mut raw: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let line_id = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_id,
            msg: format!("label `{label_tok}` is not a number"),
        })?;

        let mut entries = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_id,
                msg: format!("feature `{tok}` is not idx:val"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: line_id,
                msg: format!("index `{idx_s}` is not a positive integer"),
            })?;
            if idx == 0 {
                return Err(Error::Parse { line: line_id, msg: "indices are 1-based".into() });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: line_id,
                msg: format!("value `{val_s}` is not a number"),
            })?;
            max_index = max_index.max(idx);
            entries.push((idx, val));
        }
        raw.push((label, entries));
    }

    let mut labels: Vec<f64> = raw.iter().map(|(l, _)| *l).collect();
    labels.sort_by(|a, b| a.partial_cmp(b).expect("finite labels"));
    labels.dedup();
    if labels.len() > 2 {
        return Err(Error::UnsupportedDataset(format!(
            "expected at most two distinct labels, found {}",
            labels.len()
        )));
    }

    let to_pm_one = |raw_label: f64| -> T {
        if labels.len() == 2 && raw_label == labels[0] {
            -T::one()
        } else {
            T::one()
        }
    };

    let points = raw
        .into_iter()
        .map(|(label, entries)| {
            let mut features = vec![T::zero(); max_index];
            for (idx, val) in entries {
                features[idx - 1] = cast(val);
            }
            DataPoint { features, label: to_pm_one(label) }
        })
        .collect();
    Dataset::new(points)
}

/// One agent's local function.
#[derive(Debug, Clone)]
enum AgentFunction<T> {
    /// `c (x - b)^2` over scalars.
    Quadratic { c: T, b: T },
    /// `(nu / 2n) |x|^2 + (1/K) sum_j log(1 + exp(-v_j u_j' x))`.
    Logistic { points: Vec<DataPoint<T>>, reg: T, inv_k: T, smoothness: T },
}

/// Bundle of `n` agent-local smooth strongly convex functions over a shared
/// decision dimension.
#[derive(Debug, Clone)]
pub struct Objective<T> {
    agents: Vec<AgentFunction<T>>,
    dim: usize,
}

impl<T: Scalar> Objective<T> {
    /// Scalar quadratics `f_i(x) = c_i (x - b_i)^2` with `c_i > 0`.
    pub fn quadratic(c: &[T], b: &[T]) -> Result<Self> {
        if c.len() != b.len() || c.is_empty() {
            return Err(Error::InvalidObjective("c and b must be equal-length and nonempty".into()));
        }
        if let Some(bad) = c.iter().find(|&&ci| ci <= T::zero()) {
            return Err(Error::InvalidObjective(format!("curvature must be positive, got {bad}")));
        }
        let agents =
            c.iter().zip(b).map(|(&ci, &bi)| AgentFunction::Quadratic { c: ci, b: bi }).collect();
        Ok(Self { agents, dim: 1 })
    }

    /// Random quadratic instance with integer `c_i` uniform in `[1, 10^4]`
    /// and integer `b_i` uniform in `[1, 100]`. Deterministic per seed.
    pub fn random_quadratic(n: usize, seed: u64) -> Self {
        Self::random_quadratic_ranged(n, seed, (1, 10_000), (1, 100))
    }

    /// Random quadratic with caller-chosen integer coefficient ranges.
    pub fn random_quadratic_ranged(
        n: usize,
        seed: u64,
        c_range: (u32, u32),
        b_range: (u32, u32),
    ) -> Self {
        assert!(c_range.0 >= 1 && c_range.0 <= c_range.1, "bad curvature range");
        assert!(b_range.0 <= b_range.1, "bad offset range");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<T> =
            (0..n).map(|_| cast(rng.random_range(c_range.0..=c_range.1) as f64)).collect();
        let b: Vec<T> =
            (0..n).map(|_| cast(rng.random_range(b_range.0..=b_range.1) as f64)).collect();
        Self::quadratic(&c, &b).expect("generated curvatures are positive")
    }

    /// Regularized logistic regression split contiguously over `n` agents.
    ///
    /// Each agent receives `floor(K/n)` points; the remainder is discarded so
    /// all batches are equal-sized. The `1/K` normalization uses the full
    /// dataset size. The smoothness modulus uses the standard `1/4` bound on
    /// the logistic curvature: `L_i = nu/n + (1/4K) sum_j |u_ij|^2`.
    pub fn logistic(data: &Dataset<T>, n: usize, nu: T) -> Result<Self> {
        if nu <= T::zero() {
            return Err(Error::InvalidObjective(format!("regularizer must be positive, got {nu}")));
        }
        if data.is_empty() {
            return Err(Error::InvalidObjective("dataset is empty".into()));
        }
        let k_total = data.len();
        if k_total < n {
            return Err(Error::InvalidPartition(format!(
                "{k_total} points cannot cover {n} agents"
            )));
        }
        let per_agent = k_total / n;
        let reg = nu / cast(n as f64);
        let inv_k = T::one() / cast(k_total as f64);

        let agents = (0..n)
            .map(|i| {
                let chunk = &data.points()[i * per_agent..(i + 1) * per_agent];
                let quarter = cast::<T>(0.25);
                let smoothness = reg
                    + inv_k
                        * quarter
                        * chunk
                            .iter()
                            .map(|p| p.features.iter().map(|&u| u * u).sum::<T>())
                            .sum::<T>();
                AgentFunction::Logistic { points: chunk.to_vec(), reg, inv_k, smoothness }
            })
            .collect();
        Ok(Self { agents, dim: data.dim() })
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_quadratic(&self) -> bool {
        self.agents.iter().all(|a| matches!(a, AgentFunction::Quadratic { .. }))
    }

    /// `(c_i, b_i)` pairs for all-quadratic bundles.
    pub fn quadratic_coefficients(&self) -> Option<(Vec<T>, Vec<T>)> {
        let mut cs = Vec::with_capacity(self.agents.len());
        let mut bs = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            match a {
                AgentFunction::Quadratic { c, b } => {
                    cs.push(*c);
                    bs.push(*b);
                }
                AgentFunction::Logistic { .. } => return None,
            }
        }
        Some((cs, bs))
    }

    pub fn value(&self, agent: usize, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        match &self.agents[agent] {
            AgentFunction::Quadratic { c, b } => {
                let d = x[0] - *b;
                *c * d * d
            }
            AgentFunction::Logistic { points, reg, inv_k, .. } => {
                let half = cast::<T>(0.5);
                let sq: T = x.iter().map(|&v| v * v).sum();
                let mut s = *reg * half * sq;
                for p in points {
                    let z = p.label * dot_dense(&p.features, x);
                    s = s + *inv_k * log1p_exp_neg(z);
                }
                s
            }
        }
    }

    pub fn gradient(&self, agent: usize, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.agents[agent] {
            AgentFunction::Quadratic { c, b } => vec![cast::<T>(2.0) * *c * (x[0] - *b)],
            AgentFunction::Logistic { points, reg, inv_k, .. } => {
                let mut g: Vec<T> = x.iter().map(|&v| *reg * v).collect();
                for p in points {
                    let z = p.label * dot_dense(&p.features, x);
                    let w = -p.label * *inv_k * sigmoid_neg(z);
                    for (gi, &ui) in g.iter_mut().zip(&p.features) {
                        *gi = *gi + w * ui;
                    }
                }
                g
            }
        }
    }

    pub fn hessian(&self, agent: usize, x: &[T]) -> Mat<T> {
        match &self.agents[agent] {
            AgentFunction::Quadratic { c, .. } => {
                let mut h = Mat::zeros(1, 1);
                h[(0, 0)] = cast::<T>(2.0) * *c;
                h
            }
            AgentFunction::Logistic { points, reg, inv_k, .. } => {
                let d = self.dim;
                let mut h = Mat::zeros(d, d);
                for i in 0..d {
                    h[(i, i)] = *reg;
                }
                for p in points {
                    let z = p.label * dot_dense(&p.features, x);
                    let s = sigmoid_neg(z);
                    let w = *inv_k * s * (T::one() - s);
                    for i in 0..d {
                        let wi = w * p.features[i];
                        if wi == T::zero() {
                            continue;
                        }
                        for j in 0..d {
                            h[(i, j)] = h[(i, j)] + wi * p.features[j];
                        }
                    }
                }
                h
            }
        }
    }

    /// Strong-convexity modulus of agent `i`.
    pub fn strong_convexity(&self, agent: usize) -> T {
        match &self.agents[agent] {
            AgentFunction::Quadratic { c, .. } => cast::<T>(2.0) * *c,
            AgentFunction::Logistic { reg, .. } => *reg,
        }
    }

    /// Gradient Lipschitz modulus of agent `i`.
    pub fn smoothness(&self, agent: usize) -> T {
        match &self.agents[agent] {
            AgentFunction::Quadratic { c, .. } => cast::<T>(2.0) * *c,
            AgentFunction::Logistic { smoothness, .. } => *smoothness,
        }
    }

    /// Stacked moduli `(m, L) = (min_i m_i, max_i L_i)`.
    pub fn global_moduli(&self) -> (T, T) {
        let m = (0..self.agents.len())
            .map(|i| self.strong_convexity(i))
            .fold(T::infinity(), T::min);
        let l = (0..self.agents.len()).map(|i| self.smoothness(i)).fold(T::zero(), T::max);
        (m, l)
    }

    /// `f(x) = sum_i f_i(x_i)` over a stacked vector of `n` blocks.
    pub fn stacked_value(&self, x: &[T]) -> T {
        self.blocks(x).enumerate().map(|(i, xi)| self.value(i, xi)).sum()
    }

    /// Block-separable stacked gradient.
    pub fn stacked_gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = Vec::with_capacity(x.len());
        for (i, xi) in self.blocks(x).enumerate() {
            g.extend(self.gradient(i, xi));
        }
        g
    }

    /// `F(y) = sum_i f_i(y)` for a single shared decision vector.
    pub fn central_value(&self, y: &[T]) -> T {
        (0..self.agents.len()).map(|i| self.value(i, y)).sum()
    }

    pub fn central_gradient(&self, y: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim];
        for i in 0..self.agents.len() {
            for (gi, v) in g.iter_mut().zip(self.gradient(i, y)) {
                *gi = *gi + v;
            }
        }
        g
    }

    pub fn central_hessian(&self, y: &[T]) -> Mat<T> {
        let mut h = Mat::zeros(self.dim, self.dim);
        for i in 0..self.agents.len() {
            h = h.add(&self.hessian(i, y));
        }
        h
    }

    fn blocks<'a>(&self, x: &'a [T]) -> impl Iterator<Item = &'a [T]> {
        debug_assert_eq!(x.len(), self.agents.len() * self.dim);
        x.chunks(self.dim)
    }
}

fn dot_dense<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `log(1 + exp(-z))`, stable across the whole real line.
fn log1p_exp_neg<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `sigmoid(-z) = 1 / (1 + exp(z))`, stable across the whole real line.
fn sigmoid_neg<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        let e = (-z).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + z.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_value_and_gradient() {
        let obj = Objective::quadratic(&[1.0], &[0.0]).unwrap();
        assert_eq!(obj.value(0, &[3.0]), 9.0);
        assert_eq!(obj.gradient(0, &[3.0]), vec![6.0]);
    }

    #[test]
    fn quadratic_moduli_are_twice_curvature() {
        let obj = Objective::quadratic(&[5.0], &[17.0]).unwrap();
        assert_eq!(obj.strong_convexity(0), 10.0);
        assert_eq!(obj.smoothness(0), 10.0);
    }

    #[test]
    fn quadratic_rejects_nonpositive_curvature() {
        assert!(matches!(
            Objective::quadratic(&[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::InvalidObjective(_))
        ));
        assert!(Objective::quadratic(&[-1.0], &[1.0]).is_err());
    }

    #[test]
    fn weighted_mean_minimizer_matches_gradient_descent_oracle() {
        // argmin sum c_i (x - b_i)^2 = sum(c b) / sum(c); for c=(1,3), b=(4,0)
        // that is 1. Cross-check with a slow high-precision descent.
        let obj = Objective::quadratic(&[1.0, 3.0], &[4.0, 0.0]).unwrap();
        let closed = (1.0 * 4.0 + 3.0 * 0.0) / 4.0;
        assert_eq!(closed, 1.0);

        let mut y = 0.0f64;
        for _ in 0..2000 {
            let g: f64 = obj.central_gradient(&[y])[0];
            y -= 0.1 * g;
        }
        assert!((y - closed).abs() < 1e-12);
    }

    #[test]
    fn random_quadratic_is_deterministic_and_in_range() {
        let a = Objective::<f64>::random_quadratic(50, 123);
        let b = Objective::<f64>::random_quadratic(50, 123);
        let (ca, ba) = a.quadratic_coefficients().unwrap();
        let (cb, bb) = b.quadratic_coefficients().unwrap();
        assert_eq!(ca, cb);
        assert_eq!(ba, bb);
        assert!(ca.iter().all(|&c| (1.0..=10_000.0).contains(&c) && c.fract() == 0.0));
        assert!(ba.iter().all(|&v| (1.0..=100.0).contains(&v) && v.fract() == 0.0));
    }

    #[test]
    fn random_quadratic_offset_mean_is_near_center() {
        // Mean of 1000 uniform integers on [1, 100] should sit within 3 sigma
        // of 50.5, sigma = sqrt((100^2 - 1) / 12 / 1000).
        let obj = Objective::<f64>::random_quadratic(1000, 7);
        let (_, b) = obj.quadratic_coefficients().unwrap();
        let mean = b.iter().sum::<f64>() / 1000.0;
        let sigma = ((100.0f64.powi(2) - 1.0) / 12.0 / 1000.0).sqrt();
        assert!((mean - 50.5).abs() < 3.0 * sigma, "mean {mean} too far from 50.5");
    }

    #[test]
    fn logistic_zero_feature_point() {
        // u = 0 makes the data term log(2)/K regardless of x.
        let data = Dataset::new(vec![DataPoint { features: vec![0.0, 0.0], label: 1.0 }]).unwrap();
        let nu = 0.4;
        let obj = Objective::logistic(&data, 1, nu).unwrap();
        let x = [3.0, -2.0];
        let expect = nu / 2.0 * (9.0 + 4.0) + 2.0f64.ln();
        assert!((obj.value(0, &x) - expect).abs() < 1e-14);
    }

    #[test]
    fn logistic_gradient_at_origin_single_point() {
        let u = vec![0.5f64, -1.0, 2.0];
        let v = -1.0;
        let data = Dataset::new(vec![DataPoint { features: u.clone(), label: v }]).unwrap();
        let obj = Objective::logistic(&data, 1, 1e-9).unwrap();
        let g = obj.gradient(0, &[0.0, 0.0, 0.0]);
        // sigmoid(0) = 1/2, so the data part is -v u / (2K) with K = 1.
        for (gi, ui) in g.iter().zip(&u) {
            assert!((gi - (-v * ui / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let points: Vec<DataPoint<f64>> = (0..20)
            .map(|_| DataPoint {
                features: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                label: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            })
            .collect();
        let data = Dataset::new(points).unwrap();
        let obj = Objective::logistic(&data, 2, 0.3).unwrap();

        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
        for agent in 0..2 {
            let g = obj.gradient(agent, &x);
            let h = 1e-6;
            for coord in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[coord] += h;
                xm[coord] -= h;
                let fd = (obj.value(agent, &xp) - obj.value(agent, &xm)) / (2.0 * h);
                let denom = g[coord].abs().max(1.0);
                assert!(
                    ((g[coord] - fd) / denom).abs() < 1e-5,
                    "agent {agent} coord {coord}: analytic {} vs fd {fd}",
                    g[coord]
                );
            }
        }
    }

    #[test]
    fn logistic_hessian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let points: Vec<DataPoint<f64>> = (0..15)
            .map(|_| DataPoint {
                features: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                label: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            })
            .collect();
        let data = Dataset::new(points).unwrap();
        let obj = Objective::logistic(&data, 1, 0.2).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();

        let h = obj.hessian(0, &x);
        let step = 1e-5;
        for col in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[col] += step;
            xm[col] -= step;
            let gp = obj.gradient(0, &xp);
            let gm = obj.gradient(0, &xm);
            for row in 0..3 {
                let fd = (gp[row] - gm[row]) / (2.0 * step);
                assert!(
                    (h[(row, col)] - fd).abs() < 1e-6 * fd.abs().max(1.0),
                    "entry ({row}, {col}): analytic {} vs fd {fd}",
                    h[(row, col)]
                );
            }
        }
    }

    #[test]
    fn logistic_partition_discards_remainder() {
        let points: Vec<DataPoint<f64>> =
            (0..7).map(|i| DataPoint { features: vec![i as f64], label: 1.0 }).collect();
        let data = Dataset::new(points).unwrap();
        let obj = Objective::logistic(&data, 3, 1.0).unwrap();
        assert_eq!(obj.agent_count(), 3);
        // Each agent got floor(7/3) = 2 points; the seventh is dropped. With
        // one-dimensional features the agent smoothness reveals the split.
        let l0 = obj.smoothness(0);
        let expect = 1.0 / 3.0 + (0.0 + 1.0) / (4.0 * 7.0);
        assert!((l0 - expect).abs() < 1e-14);
    }

    #[test]
    fn logistic_rejects_fewer_points_than_agents() {
        let data =
            Dataset::new(vec![DataPoint { features: vec![1.0], label: 1.0 }]).unwrap();
        assert!(matches!(Objective::logistic(&data, 2, 1.0), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn libsvm_line_parses_to_dense_vector() {
        let data: Dataset<f64> = parse_libsvm("1 1:0.5 3:2\n-1 2:1\n").unwrap();
        assert_eq!(data.dim(), 3);
        assert_eq!(data.points()[0].features, vec![0.5, 0.0, 2.0]);
        assert_eq!(data.points()[0].label, 1.0);
        assert_eq!(data.points()[1].label, -1.0);
    }

    #[test]
    fn libsvm_maps_smaller_raw_label_to_minus_one() {
        let data: Dataset<f64> = parse_libsvm("2 1:1\n4 1:2\n2 1:3\n").unwrap();
        let labels: Vec<f64> = data.points().iter().map(|p| p.label).collect();
        assert_eq!(labels, vec![-1.0, 1.0, -1.0]);
    }

    #[test]
    fn libsvm_rejects_bad_label_with_line_number() {
        match parse_libsvm::<f64>("1 1:1\nabc 1:1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn libsvm_rejects_three_label_classes() {
        assert!(matches!(
            parse_libsvm::<f64>("1 1:1\n2 1:1\n3 1:1\n"),
            Err(Error::UnsupportedDataset(_))
        ));
    }

    #[test]
    fn subsample_is_deterministic() {
        let points: Vec<DataPoint<f64>> =
            (0..100).map(|i| DataPoint { features: vec![i as f64], label: 1.0 }).collect();
        let data = Dataset::new(points).unwrap();
        let a = data.subsample(10, 3);
        let b = data.subsample(10, 3);
        assert_eq!(a.len(), 10);
        for (pa, pb) in a.points().iter().zip(b.points()) {
            assert_eq!(pa.features, pb.features);
        }
    }
}
