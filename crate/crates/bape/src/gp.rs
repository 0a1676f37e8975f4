//! Exact Gaussian-process regression with a squared-exponential kernel.
//!
//! The GP models the log-joint density of parameters and observations. A
//! fitted [`GpPosterior`] is immutable: prediction, path sampling and
//! target-only refits never mutate shared state, so one posterior can be read
//! from many threads at once.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative diagonal boost first tried when factoring a training kernel.
const JITTER_START_REL: f64 = 1e-10;
/// Relative diagonal boost first tried when factoring a path covariance.
/// Smaller than the training start so that sampling at a noiseless training
/// point stays within 1e-6 of the target.
const PATH_JITTER_START_REL: f64 = 1e-14;
/// Jitter ladder gives up beyond this relative boost.
const JITTER_MAX_REL: f64 = 1e-4;

mod linalg {
    use nalgebra::{DMatrix, DVector};

    /// In-place lower Cholesky via LAPACK `dpotrf`. Returns false when the
    /// matrix is not positive definite.
    pub fn chol_lower_inplace(a: &mut DMatrix<f64>) -> bool {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        if n == 0 {
            return true;
        }
        let mut info = 0i32;
        unsafe {
            lapack::dpotrf(b'L', n as i32, a.as_mut_slice(), n as i32, &mut info);
        }
        info == 0
    }

    /// Solve `L X = B` in place of `B` for lower-triangular `L`.
    pub fn solve_lower_mat(l: &DMatrix<f64>, b: &mut DMatrix<f64>) {
        let n = l.nrows() as i32;
        let m = b.ncols() as i32;
        debug_assert_eq!(l.nrows(), b.nrows());
        if n == 0 || m == 0 {
            return;
        }
        unsafe {
            blas::dtrsm(
                b'L', b'L', b'N', b'N', n, m, 1.0, l.as_slice(), n,
                b.as_mut_slice(), n,
            );
        }
    }

    /// Solve `L x = b` in place of `b`.
    pub fn solve_lower_vec(l: &DMatrix<f64>, b: &mut DVector<f64>) {
        let n = l.nrows() as i32;
        if n == 0 {
            return;
        }
        unsafe {
            blas::dtrsv(b'L', b'N', b'N', n, l.as_slice(), n, b.as_mut_slice(), 1);
        }
    }

    /// Solve `L^T x = b` in place of `b`.
    pub fn solve_lower_t_vec(l: &DMatrix<f64>, b: &mut DVector<f64>) {
        let n = l.nrows() as i32;
        if n == 0 {
            return;
        }
        unsafe {
            blas::dtrsv(b'L', b'T', b'N', n, l.as_slice(), n, b.as_mut_slice(), 1);
        }
    }

    /// `x <- L x` for lower-triangular `L`.
    pub fn mul_lower_vec(l: &DMatrix<f64>, x: &mut DVector<f64>) {
        let n = l.nrows() as i32;
        if n == 0 {
            return;
        }
        unsafe {
            blas::dtrmv(b'L', b'N', b'N', n, l.as_slice(), n, x.as_mut_slice(), 1);
        }
    }
}

/// Kernel and mean hyperparameters of the GP prior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpHyperParams {
    signal_variance: f64,
    bandwidth: f64,
    noise_variance: f64,
    prior_mean: f64,
}

impl GpHyperParams {
    pub fn new(
        signal_variance: f64,
        bandwidth: f64,
        noise_variance: f64,
        prior_mean: f64,
    ) -> Result<Self> {
        if !(signal_variance > 0.0) || !signal_variance.is_finite() {
            return Err(Error::invalid(format!(
                "signal variance must be positive and finite, got {signal_variance}"
            )));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::invalid(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be non-negative and finite, got {noise_variance}"
            )));
        }
        if !prior_mean.is_finite() {
            return Err(Error::invalid("prior mean must be finite"));
        }
        Ok(GpHyperParams {
            signal_variance,
            bandwidth,
            noise_variance,
            prior_mean,
        })
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    /// Same kernel with a different constant prior mean.
    pub fn with_prior_mean(mut self, prior_mean: f64) -> Result<Self> {
        if !prior_mean.is_finite() {
            return Err(Error::invalid("prior mean must be finite"));
        }
        self.prior_mean = prior_mean;
        Ok(self)
    }
}

/// The (parameter, log-joint) pairs the GP conditions on.
#[derive(Clone, Debug, Default)]
pub struct TrainingSet {
    points: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if points.len() != targets.len() {
            return Err(Error::invalid(format!(
                "{} points vs {} targets",
                points.len(),
                targets.len()
            )));
        }
        if let Some(first) = points.first() {
            let d = first.len();
            if d == 0 {
                return Err(Error::invalid("points must have dimension >= 1"));
            }
            if points.iter().any(|p| p.len() != d) {
                return Err(Error::invalid("points have inconsistent dimensions"));
            }
        }
        if targets.iter().any(|t| !t.is_finite())
            || points.iter().flatten().any(|x| !x.is_finite())
        {
            return Err(Error::invalid("training data must be finite"));
        }
        Ok(TrainingSet { points, targets })
    }

    pub fn count(&self) -> usize {
        self.targets.len()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Population standard deviation of the targets (0 for a single point).
    pub fn target_std(&self) -> f64 {
        let n = self.targets.len();
        if n == 0 {
            return 0.0;
        }
        let mean = self.targets.iter().sum::<f64>() / n as f64;
        (self.targets.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
    }

    /// Population variance of the targets.
    pub fn target_variance(&self) -> f64 {
        let s = self.target_std();
        s * s
    }

    /// The default constant prior mean: one target standard deviation below
    /// the smallest observed target, so unexplored regions exponentiate to
    /// negligible posterior mass instead of hallucinated mass.
    pub fn default_prior_mean(&self) -> f64 {
        let min = self
            .targets
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            min - self.target_std()
        } else {
            0.0
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Squared-exponential cross-covariance `sigma_f^2 exp(-|a-b|^2 / (2 h^2))`.
///
/// Observation noise is not part of the cross-covariance; it enters only on
/// the diagonal of the training kernel matrix during [`fit`].
pub fn kernel_eval(hp: &GpHyperParams, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "kernel arguments have dimensions {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(kernel_raw(hp, a, b))
}

#[inline]
fn kernel_raw(hp: &GpHyperParams, a: &[f64], b: &[f64]) -> f64 {
    let h2 = hp.bandwidth * hp.bandwidth;
    hp.signal_variance * (-squared_distance(a, b) / (2.0 * h2)).exp()
}

/// Lower Cholesky of `base + rel * scale * I`, escalating `rel` tenfold on
/// failure up to `JITTER_MAX_REL`.
fn cholesky_with_jitter(
    base: &DMatrix<f64>,
    scale: f64,
    start_rel: f64,
    context: &str,
) -> Result<(DMatrix<f64>, f64)> {
    let mut rel = start_rel;
    loop {
        let mut a = base.clone();
        let jitter = rel * scale;
        for i in 0..a.nrows() {
            a[(i, i)] += jitter;
        }
        if linalg::chol_lower_inplace(&mut a) {
            a.fill_upper_triangle(0.0, 1);
            return Ok((a, jitter));
        }
        if rel >= JITTER_MAX_REL {
            return Err(Error::NumericalFailure {
                context: context.to_string(),
                jitter,
            });
        }
        rel *= 10.0;
    }
}

/// A fitted GP: prior hyperparameters, training data, and the factored
/// training kernel state needed for O(n^2) predictions.
#[derive(Clone, Debug)]
pub struct GpPosterior {
    hyper: GpHyperParams,
    train: TrainingSet,
    /// Lower Cholesky factor of `K + (noise + jitter) I`.
    factor: DMatrix<f64>,
    /// `(K + (noise + jitter) I)^{-1} (y - mu0)`.
    alpha: DVector<f64>,
    jitter: f64,
}

/// Condition the GP prior on the training set.
pub fn fit(hp: &GpHyperParams, train: &TrainingSet) -> Result<GpPosterior> {
    if train.count() == 0 {
        return Err(Error::invalid("cannot fit a GP on an empty training set"));
    }
    let n = train.count();
    let pts = train.points();
    let mut k = DMatrix::zeros(n, n);
    // Only the lower triangle is read by the factorization.
    for j in 0..n {
        for i in j..n {
            k[(i, j)] = kernel_raw(hp, &pts[i], &pts[j]);
        }
        k[(j, j)] += hp.noise_variance;
    }
    let (factor, jitter) =
        cholesky_with_jitter(&k, hp.signal_variance, JITTER_START_REL, "training kernel")?;
    let mut alpha = DVector::from_iterator(n, train.targets().iter().map(|y| y - hp.prior_mean));
    linalg::solve_lower_vec(&factor, &mut alpha);
    linalg::solve_lower_t_vec(&factor, &mut alpha);
    Ok(GpPosterior {
        hyper: *hp,
        train: train.clone(),
        factor,
        alpha,
        jitter,
    })
}

impl GpPosterior {
    pub fn hyper(&self) -> &GpHyperParams {
        &self.hyper
    }

    pub fn training(&self) -> &TrainingSet {
        &self.train
    }

    /// Diagonal boost that made the training kernel factorable.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        let d = self.train.dim().expect("fitted GP has training points");
        if theta.len() != d {
            return Err(Error::invalid(format!(
                "query has dimension {}, training data has {}",
                theta.len(),
                d
            )));
        }
        Ok(())
    }

    /// Cross-covariance matrix `k(X, C)` between training points and `points`
    /// (an `n x m` matrix).
    fn cross_kernel(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let n = self.train.count();
        let m = points.len();
        let pts = self.train.points();
        let mut k = DMatrix::zeros(n, m);
        for j in 0..m {
            for i in 0..n {
                k[(i, j)] = kernel_raw(&self.hyper, &pts[i], &points[j]);
            }
        }
        k
    }

    /// Posterior mean and variance of the latent function at `theta`.
    /// The variance is clamped to be non-negative.
    pub fn predict(&self, theta: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(theta)?;
        let n = self.train.count();
        let pts = self.train.points();
        let mut k_star = DVector::from_fn(n, |i, _| kernel_raw(&self.hyper, &pts[i], theta));
        let mean = self.hyper.prior_mean + k_star.dot(&self.alpha);
        linalg::solve_lower_vec(&self.factor, &mut k_star);
        let var = (self.hyper.signal_variance - k_star.norm_squared()).max(0.0);
        Ok((mean, var))
    }

    /// Posterior means at many points. Costs O(n m) plus kernel evaluations.
    pub fn predict_mean_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        for p in points {
            self.check_dim(p)?;
        }
        let kxc = self.cross_kernel(points);
        let means = kxc.tr_mul(&self.alpha);
        Ok(means.iter().map(|m| m + self.hyper.prior_mean).collect())
    }

    /// Posterior means and variances at many points; one batched triangular
    /// solve instead of a solve per point.
    pub fn predict_many(&self, points: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
        for p in points {
            self.check_dim(p)?;
        }
        let mut kxc = self.cross_kernel(points);
        let means = kxc.tr_mul(&self.alpha);
        linalg::solve_lower_mat(&self.factor, &mut kxc);
        let out = (0..points.len())
            .map(|j| {
                let mean = means[j] + self.hyper.prior_mean;
                let var = (self.hyper.signal_variance - kxc.column(j).norm_squared()).max(0.0);
                (mean, var)
            })
            .collect();
        Ok(out)
    }

    /// Full posterior covariance restricted to `points`.
    pub(crate) fn posterior_cov(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let m = points.len();
        let mut kcc = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in j..m {
                let v = kernel_raw(&self.hyper, &points[i], &points[j]);
                kcc[(i, j)] = v;
                kcc[(j, i)] = v;
            }
        }
        let mut v = self.cross_kernel(points);
        linalg::solve_lower_mat(&self.factor, &mut v);
        kcc - v.tr_mul(&v)
    }

    /// Joint draws from the posterior restricted to `grid`: a `count x
    /// grid.len()` matrix of sampled function values. Rows share the joint
    /// covariance, so nearby grid nodes move together. Deterministic given
    /// the generator state.
    pub fn sample_paths<R: Rng>(
        &self,
        grid: &[Vec<f64>],
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>> {
        if grid.is_empty() {
            return Err(Error::invalid("sample_paths needs a non-empty grid"));
        }
        if count == 0 {
            return Err(Error::invalid("sample_paths needs count >= 1"));
        }
        let sampler = self.path_sampler(grid)?;
        let mean = DVector::from_vec(self.predict_mean_many(grid)?);
        Ok((0..count).map(|_| sampler.draw(&mean, rng)).collect())
    }

    /// Precomputed covariance factor for repeated path draws on one grid.
    pub(crate) fn path_sampler(&self, grid: &[Vec<f64>]) -> Result<PathSampler> {
        for p in grid {
            self.check_dim(p)?;
        }
        let cov = self.posterior_cov(grid);
        let (factor, _) = cholesky_with_jitter(
            &cov,
            self.hyper.signal_variance,
            PATH_JITTER_START_REL,
            "path covariance",
        )?;
        Ok(PathSampler { factor })
    }

    /// Same kernel factor, new targets. The kernel matrix depends only on the
    /// points and hyperparameters, so conditioning on different observations
    /// at the same points reuses the factorization.
    pub fn refit_with_targets(&self, targets: &[f64]) -> Result<GpPosterior> {
        if targets.len() != self.train.count() {
            return Err(Error::invalid(format!(
                "{} targets for {} training points",
                targets.len(),
                self.train.count()
            )));
        }
        let train = TrainingSet::new(self.train.points().to_vec(), targets.to_vec())?;
        let mut alpha =
            DVector::from_iterator(targets.len(), targets.iter().map(|y| y - self.hyper.prior_mean));
        linalg::solve_lower_vec(&self.factor, &mut alpha);
        linalg::solve_lower_t_vec(&self.factor, &mut alpha);
        Ok(GpPosterior {
            hyper: self.hyper,
            train,
            factor: self.factor.clone(),
            alpha,
            jitter: self.jitter,
        })
    }
}

/// Factored joint covariance on a fixed grid; draws cost one mat-vec each.
pub(crate) struct PathSampler {
    factor: DMatrix<f64>,
}

impl PathSampler {
    pub fn draw<R: Rng>(&self, mean: &DVector<f64>, rng: &mut R) -> Vec<f64> {
        let g = self.factor.nrows();
        let mut z = DVector::from_fn(g, |_, _| rng.sample::<f64, _>(StandardNormal));
        linalg::mul_lower_vec(&self.factor, &mut z);
        (0..g).map(|i| mean[i] + z[i]).collect()
    }
}

/// The kernel bandwidth rule `5 n^(-1/d)`.
pub fn select_bandwidth(n: usize, d: usize) -> f64 {
    assert!(n >= 1 && d >= 1, "select_bandwidth needs n >= 1 and d >= 1");
    5.0 * (n as f64).powf(-1.0 / d as f64)
}

/// The default CV sweep for `(signal_variance, noise_variance)`: a 7-point
/// geometric grid over [0.01, 100] x target variance crossed with noise
/// fractions {1e-6, 1e-4, 1e-2, 1e-1} x target variance.
pub fn default_cv_candidates(target_variance: f64) -> Vec<(f64, f64)> {
    let v = target_variance.max(1e-12);
    let mut out = Vec::with_capacity(28);
    for k in 0..7 {
        let sf = v * 10f64.powf(-2.0 + 4.0 * k as f64 / 6.0);
        for nf in [1e-6, 1e-4, 1e-2, 1e-1] {
            out.push((sf, v * nf));
        }
    }
    out
}

/// Pick `(signal_variance, noise_variance)` by k-fold cross-validation with
/// the bandwidth held fixed. Folds are shuffled with the caller's generator;
/// the winner is the candidate with the smallest mean held-out squared
/// prediction error, ties broken by list order.
pub fn cv_tune<R: Rng>(
    train: &TrainingSet,
    bandwidth: f64,
    candidates: &[(f64, f64)],
    rng: &mut R,
) -> Result<GpHyperParams> {
    if train.count() < 4 {
        return Err(Error::invalid("cross-validation needs at least 4 points"));
    }
    if candidates.is_empty() {
        return Err(Error::invalid("cross-validation needs candidates"));
    }
    let n = train.count();
    let k = 5.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    use rand::seq::SliceRandom;
    order.shuffle(rng);

    let mut best: Option<(f64, usize)> = None;
    'candidates: for (ci, &(sf, nv)) in candidates.iter().enumerate() {
        let mut total_se = 0.0;
        for fold in 0..k {
            let mut fit_pts = Vec::with_capacity(n);
            let mut fit_ys = Vec::with_capacity(n);
            let mut held_pts = Vec::new();
            let mut held_ys = Vec::new();
            for (pos, &idx) in order.iter().enumerate() {
                if pos % k == fold {
                    held_pts.push(train.points()[idx].clone());
                    held_ys.push(train.targets()[idx]);
                } else {
                    fit_pts.push(train.points()[idx].clone());
                    fit_ys.push(train.targets()[idx]);
                }
            }
            let fold_train = TrainingSet::new(fit_pts, fit_ys)?;
            let hp = match GpHyperParams::new(sf, bandwidth, nv, fold_train.default_prior_mean()) {
                Ok(hp) => hp,
                Err(_) => continue 'candidates,
            };
            let gp = match fit(&hp, &fold_train) {
                Ok(gp) => gp,
                Err(_) => continue 'candidates,
            };
            let preds = gp.predict_mean_many(&held_pts)?;
            total_se += preds
                .iter()
                .zip(&held_ys)
                .map(|(p, y)| (p - y) * (p - y))
                .sum::<f64>();
        }
        let mean_se = total_se / n as f64;
        if best.map_or(true, |(b, _)| mean_se < b) {
            best = Some((mean_se, ci));
        }
    }

    match best {
        Some((_, ci)) => {
            let (sf, nv) = candidates[ci];
            GpHyperParams::new(sf, bandwidth, nv, train.default_prior_mean())
        }
        None => Err(Error::NumericalFailure {
            context: "every cross-validation candidate failed to factorize".to_string(),
            jitter: JITTER_MAX_REL,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hp(sf: f64, h: f64, nv: f64, mu: f64) -> GpHyperParams {
        GpHyperParams::new(sf, h, nv, mu).unwrap()
    }

    #[test]
    fn kernel_at_equal_points() {
        let k = kernel_eval(&hp(1.0, 1.0, 0.0, 0.0), &[0.3, 0.4], &[0.3, 0.4]).unwrap();
        assert_relative_eq!(k, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn kernel_direct_substitution() {
        // squared distance 2, sigma_f^2 = 4, h = 1 -> 4 exp(-1)
        let k = kernel_eval(&hp(4.0, 1.0, 0.0, 0.0), &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_relative_eq!(k, 4.0 * (-1.0f64).exp(), max_relative = 1e-14);
        assert!((k - 1.47152).abs() < 1e-5);
    }

    #[test]
    fn kernel_wide_bandwidth_limit() {
        let k = kernel_eval(&hp(1.0, 1e12, 0.0, 0.0), &[-3.0], &[7.0]).unwrap();
        assert_relative_eq!(k, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn kernel_dimension_mismatch() {
        assert!(kernel_eval(&hp(1.0, 1.0, 0.0, 0.0), &[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn single_point_interpolates_exactly() {
        let train = TrainingSet::new(vec![vec![0.4]], vec![2.5]).unwrap();
        let gp = fit(&hp(1.0, 0.5, 0.0, 0.0), &train).unwrap();
        let (m, v) = gp.predict(&[0.4]).unwrap();
        assert!((m - 2.5).abs() < 1e-8);
        assert!(v >= 0.0 && v < 1e-8);
    }

    #[test]
    fn far_query_recovers_prior() {
        let train = TrainingSet::new(vec![vec![0.0], vec![0.1]], vec![1.0, 1.1]).unwrap();
        let gp = fit(&hp(2.0, 0.05, 0.0, -3.0), &train).unwrap();
        let (m, v) = gp.predict(&[50.0]).unwrap();
        assert!((m - (-3.0)).abs() < 1e-6 * 2.0);
        assert!((v - 2.0).abs() < 1e-6 * 2.0);
    }

    #[test]
    fn sample_paths_at_training_point_are_exact() {
        let train = TrainingSet::new(vec![vec![0.25, 0.75]], vec![-4.0]).unwrap();
        let gp = fit(&hp(1.0, 0.3, 0.0, 0.0), &train).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let paths = gp.sample_paths(&[vec![0.25, 0.75]], 64, &mut rng).unwrap();
        for p in &paths {
            assert!((p[0] - (-4.0)).abs() < 1e-6, "sample {} drifted", p[0]);
        }
    }

    #[test]
    fn sample_paths_deterministic_for_fixed_seed() {
        let train =
            TrainingSet::new(vec![vec![0.1], vec![0.5], vec![0.9]], vec![0.0, 1.0, -1.0]).unwrap();
        let gp = fit(&hp(1.0, 0.2, 1e-4, 0.0), &train).unwrap();
        let grid: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
        let a = gp
            .sample_paths(&grid, 5, &mut ChaCha8Rng::seed_from_u64(42))
            .unwrap();
        let b = gp
            .sample_paths(&grid, 5, &mut ChaCha8Rng::seed_from_u64(42))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn far_point_sample_variance_matches_prior() {
        let train = TrainingSet::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let gp = fit(&hp(2.0, 0.1, 0.0, 0.0), &train).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let paths = gp.sample_paths(&[vec![100.0]], 10_000, &mut rng).unwrap();
        let vals: Vec<f64> = paths.iter().map(|p| p[0]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        assert!(
            (var - 2.0).abs() < 0.05 * 2.0,
            "sample variance {var} should be within 5% of 2.0"
        );
    }

    #[test]
    fn bandwidth_rule_values() {
        assert_relative_eq!(select_bandwidth(32, 5), 2.5, max_relative = 1e-12);
        assert_relative_eq!(select_bandwidth(1, 3), 5.0, max_relative = 1e-12);
        assert_relative_eq!(select_bandwidth(100, 1), 0.05, max_relative = 1e-12);
    }

    #[test]
    fn refit_with_targets_matches_fresh_fit() {
        let pts = vec![vec![0.1], vec![0.4], vec![0.8]];
        let train = TrainingSet::new(pts.clone(), vec![1.0, -0.5, 0.3]).unwrap();
        let gp = fit(&hp(1.5, 0.3, 1e-3, 0.2), &train).unwrap();
        let new_targets = vec![0.7, 0.1, -0.9];
        let refit = gp.refit_with_targets(&new_targets).unwrap();
        let fresh = fit(
            &hp(1.5, 0.3, 1e-3, 0.2),
            &TrainingSet::new(pts, new_targets).unwrap(),
        )
        .unwrap();
        for x in [0.0, 0.25, 0.6, 1.0] {
            let (ma, va) = refit.predict(&[x]).unwrap();
            let (mb, vb) = fresh.predict(&[x]).unwrap();
            assert_relative_eq!(ma, mb, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(va, vb, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn cv_single_candidate_is_returned() {
        let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (3.0 * p[0]).sin()).collect();
        let train = TrainingSet::new(pts, ys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let got = cv_tune(&train, 0.5, &[(2.0, 1e-3)], &mut rng).unwrap();
        assert_eq!(got.signal_variance(), 2.0);
        assert_eq!(got.noise_variance(), 1e-3);
        assert_eq!(got.bandwidth(), 0.5);
    }

    #[test]
    fn cv_prefers_noiseless_model_on_noiseless_data() {
        // Exact draw from a smooth function; the noiseless candidate
        // interpolates held-out points far better.
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 29.0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (4.0 * p[0]).sin()).collect();
        let train = TrainingSet::new(pts, ys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let got = cv_tune(&train, 0.4, &[(1.0, 0.0), (1.0, 1.0)], &mut rng).unwrap();
        assert_eq!(got.noise_variance(), 0.0);
    }

    #[test]
    fn cv_rejects_tiny_training_sets() {
        let train = TrainingSet::new(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(cv_tune(&train, 1.0, &[(1.0, 0.0)], &mut rng).is_err());
    }

    #[test]
    fn training_set_validation() {
        assert!(TrainingSet::new(vec![vec![0.0]], vec![]).is_err());
        assert!(TrainingSet::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.0, 1.0]).is_err());
        assert!(TrainingSet::new(vec![vec![0.0]], vec![f64::NEG_INFINITY]).is_err());
    }
}
