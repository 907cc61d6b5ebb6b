//! PCA statistics over 3-D face shapes and textures.
//!
//! Two views of the data are supported:
//!
//! * [`build_basis`] treats each N×3 sample as one `3N` vector and builds a
//!   morphable basis (mean plus principal components) across many samples.
//! * [`pca_fit`] analyses a single N×3 matrix as N observations of three
//!   variables, producing 3×3 loadings. [`reexpress`] and [`combine_average`]
//!   blend two faces through those per-face models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd_thin, Matrix};
use crate::scalar::Real;

/// Components whose singular value falls below this fraction of the largest
/// are treated as numerically zero by [`build_basis`].
pub const RANK_CUTOFF: f64 = 1e-12;

fn ensure_same_shapes<T: Real>(samples: &[Matrix<T>]) -> Result<(usize, usize)> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Empty("no samples".into()))?;
    let shape = first.shape();
    if let Some(bad) = samples.iter().find(|s| s.shape() != shape) {
        return Err(Error::Shape(format!(
            "samples are {}x{} and {}x{}",
            shape.0,
            shape.1,
            bad.rows(),
            bad.cols()
        )));
    }
    Ok(shape)
}

/// Entrywise mean of equally sized samples.
pub fn compute_mean<T: Real>(samples: &[Matrix<T>]) -> Result<Matrix<T>> {
    let (rows, cols) = ensure_same_shapes(samples)?;
    let mut acc = Matrix::zeros(rows, cols);
    for s in samples {
        for (a, &v) in acc.as_mut_slice().iter_mut().zip(s.as_slice()) {
            *a += v;
        }
    }
    let inv = T::one() / T::from_usize_lossy(samples.len());
    Ok(acc.map(|v| v * inv))
}

/// Column-major vectorisation: all of column 0, then column 1, ...
pub fn vectorize<T: Real>(m: &Matrix<T>) -> Vec<T> {
    (0..m.cols()).flat_map(|c| m.column(c)).collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize<T: Real>(v: &[T], rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |r, c| v[c * rows + r])
}

/// Morphable basis over a set of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisModel<T> {
    /// Mean sample, same shape as the inputs.
    pub mean: Matrix<T>,
    /// Principal components in sample layout (N×3), i.e. the columns of `U`
    /// un-vectorised. Only components above [`RANK_CUTOFF`] are kept.
    pub components: Vec<Matrix<T>>,
    /// All singular values of the centred data matrix, non-increasing.
    pub singular_values: Vec<T>,
    pub sample_count: usize,
}

impl<T: Real> BasisModel<T> {
    /// Eigenvalues of the sample covariance `A·Aᵀ/m`, i.e. `λᵢ²/m`.
    pub fn eigenvalues(&self) -> Vec<T> {
        let m = T::from_usize_lossy(self.sample_count);
        self.singular_values.iter().map(|&s| s * s / m).collect()
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }
}

/// Mean-centres the samples, stacks them as columns of `A` and takes its SVD.
pub fn build_basis<T: Real>(samples: &[Matrix<T>]) -> Result<BasisModel<T>> {
    if samples.len() < 2 {
        return Err(Error::Empty(format!(
            "a basis needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mean = compute_mean(samples)?;
    let (rows, cols) = mean.shape();
    let centred: Vec<Vec<T>> = samples
        .iter()
        .map(|s| vectorize(&s.sub(&mean).expect("same shape")))
        .collect();
    let a = Matrix::from_columns(rows * cols, &centred);
    let decomposition = svd_thin(&a)?;
    let sigma = decomposition.sigma;
    let cutoff = sigma[0] * T::lit(RANK_CUTOFF);
    let components = sigma
        .iter()
        .enumerate()
        .take_while(|(_, &s)| s > cutoff && s > T::zero())
        .map(|(j, _)| unvectorize(&decomposition.u.column(j), rows, cols))
        .collect();
    Ok(BasisModel {
        mean,
        components,
        singular_values: sigma,
        sample_count: samples.len(),
    })
}

/// Mean plus `Σ coeffs[i]·components[i]`.
pub fn synthesize<T: Real>(model: &BasisModel<T>, coeffs: &[T]) -> Result<Matrix<T>> {
    if coeffs.len() > model.components.len() {
        return Err(Error::Parameter(format!(
            "{} coefficients for {} components",
            coeffs.len(),
            model.components.len()
        )));
    }
    let mut out = model.mean.clone();
    for (&w, comp) in coeffs.iter().zip(&model.components) {
        for (o, &c) in out.as_mut_slice().iter_mut().zip(comp.as_slice()) {
            *o += w * c;
        }
    }
    Ok(out)
}

/// `Σ weights[i]·samples[i]`; weights are not required to be convex.
pub fn linear_combine<T: Real>(samples: &[Matrix<T>], weights: &[T]) -> Result<Matrix<T>> {
    if samples.len() != weights.len() {
        return Err(Error::Parameter(format!(
            "{} samples but {} weights",
            samples.len(),
            weights.len()
        )));
    }
    let (rows, cols) = ensure_same_shapes(samples)?;
    let mut out = Matrix::zeros(rows, cols);
    for (s, &w) in samples.iter().zip(weights) {
        for (o, &v) in out.as_mut_slice().iter_mut().zip(s.as_slice()) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// Entrywise `(a + b)/2`.
pub fn combine_average<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    linear_combine(&[a.clone(), b.clone()], &[T::lit(0.5), T::lit(0.5)])
}

/// Per-matrix PCA: the columns are variables, the rows observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    /// Column means, one per variable.
    pub mean: Vec<T>,
    /// p×p loadings; column `j` is the `j`-th principal axis, ordered by
    /// decreasing variance. The largest-magnitude entry of each column is
    /// positive.
    pub coeff: Matrix<T>,
    /// N×p scores, `(data − mean)·coeff`.
    pub score: Matrix<T>,
    /// Variance along each axis (divisor N − 1).
    pub explained_variance: Vec<T>,
}

impl<T: Real> PcaModel<T> {
    pub fn variables(&self) -> usize {
        self.coeff.cols()
    }

    pub fn observations(&self) -> usize {
        self.score.rows()
    }

    /// `score·coeffᵀ + mean`.
    pub fn reconstruct(&self) -> Matrix<T> {
        project(&self.score, &self.coeff, &self.mean, self.variables())
    }
}

/// `score[:, :k]·coeff[:, :k]ᵀ + mean`.
fn project<T: Real>(score: &Matrix<T>, coeff: &Matrix<T>, mean: &[T], k: usize) -> Matrix<T> {
    let p = coeff.rows();
    Matrix::from_fn(score.rows(), p, |r, c| {
        let mut v = mean[c];
        for j in 0..k {
            v += score[(r, j)] * coeff[(c, j)];
        }
        v
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlsOptions {
    /// Rank of the model used to impute missing entries.
    pub components: usize,
    /// Stop once the reconstruction changes by less than this, relatively.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self {
            components: 2,
            tolerance: 1e-8,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MissingPolicy {
    /// All entries must be finite.
    #[default]
    None,
    /// Non-finite entries are treated as missing. A rank-limited model
    /// `mean + scores·loadingsᵀ` is fitted to the observed entries by
    /// alternating least squares, the gaps are filled from it, and the
    /// completed matrix gets a full PCA.
    Als(AlsOptions),
}

pub fn pca_fit<T: Real>(data: &Matrix<T>, policy: MissingPolicy) -> Result<PcaModel<T>> {
    if data.rows() < 3 || data.cols() == 0 {
        return Err(Error::Dimension(format!(
            "PCA needs at least 3 rows and 1 column, got {}x{}",
            data.rows(),
            data.cols()
        )));
    }
    match policy {
        MissingPolicy::None => {
            if !data.is_finite() {
                return Err(Error::NonFinite("PCA input".into()));
            }
            fit_complete(data)
        }
        MissingPolicy::Als(opts) => fit_als(data, opts),
    }
}

fn column_means<T: Real>(data: &Matrix<T>) -> Vec<T> {
    let n = T::from_usize_lossy(data.rows());
    (0..data.cols())
        .map(|c| (0..data.rows()).map(|r| data[(r, c)]).sum::<T>() / n)
        .collect()
}

fn fit_complete<T: Real>(data: &Matrix<T>) -> Result<PcaModel<T>> {
    let mean = column_means(data);
    let centred = Matrix::from_fn(data.rows(), data.cols(), |r, c| data[(r, c)] - mean[c]);
    let mut dec = svd_thin(&centred)?;
    let k = dec.sigma.len();
    let p = data.cols();

    // Loadings sign rule: largest-magnitude entry of each column positive.
    for j in 0..k {
        let col = dec.v.column(j);
        let pivot = col
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > col[best].abs() { i } else { best });
        if col[pivot] < T::zero() {
            for r in 0..dec.v.rows() {
                dec.v[(r, j)] = -dec.v[(r, j)];
            }
            for r in 0..dec.u.rows() {
                dec.u[(r, j)] = -dec.u[(r, j)];
            }
        }
    }

    let mut coeff = Matrix::zeros(p, p);
    for j in 0..k {
        coeff.set_column(j, &dec.v.column(j));
    }
    // Fewer observations than variables: complete the loadings basis.
    if k < p {
        let full = crate::linalg::svd(&dec.v.transpose())?;
        for j in k..p {
            coeff.set_column(j, &full.v.column(j));
        }
    }
    let score = Matrix::from_fn(data.rows(), p, |r, j| {
        if j < k {
            dec.u[(r, j)] * dec.sigma[j]
        } else {
            T::zero()
        }
    });
    let dof = T::from_usize_lossy(data.rows() - 1);
    let explained_variance = (0..p)
        .map(|j| if j < k { dec.sigma[j] * dec.sigma[j] / dof } else { T::zero() })
        .collect();
    Ok(PcaModel {
        mean,
        coeff,
        score,
        explained_variance,
    })
}

fn fit_als<T: Real>(data: &Matrix<T>, opts: AlsOptions) -> Result<PcaModel<T>> {
    let (n, p) = data.shape();
    let missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| (0..p).map(move |c| (r, c)))
        .filter(|&(r, c)| !data[(r, c)].is_finite())
        .collect();
    if missing.is_empty() {
        return fit_complete(data);
    }
    let mut filled = data.clone();
    for c in 0..p {
        let observed: Vec<T> = (0..n).map(|r| data[(r, c)]).filter(|v| v.is_finite()).collect();
        if observed.is_empty() {
            return Err(Error::MissingColumn(c));
        }
        let m = observed.iter().copied().sum::<T>() / T::from_usize_lossy(observed.len());
        for r in 0..n {
            if !filled[(r, c)].is_finite() {
                filled[(r, c)] = m;
            }
        }
    }

    let k = opts.components.clamp(1, p);
    let tol = T::lit(opts.tolerance);
    let observed = |r: usize, c: usize| data[(r, c)].is_finite();

    let start = fit_complete(&filled)?;
    let mut mean = start.mean;
    let mut loadings = Matrix::from_fn(p, k, |r, j| start.coeff[(r, j)]);
    let mut scores = Matrix::from_fn(n, k, |r, j| start.score[(r, j)]);
    let mut previous = project(&scores, &loadings, &mean, k);

    for _ in 0..opts.max_iterations {
        // Scores: per row, least squares over the observed variables.
        for r in 0..n {
            let cols: Vec<usize> = (0..p).filter(|&c| observed(r, c)).collect();
            let design = Matrix::from_fn(cols.len(), k, |i, j| loadings[(cols[i], j)]);
            let target: Vec<T> = cols.iter().map(|&c| data[(r, c)] - mean[c]).collect();
            let s = least_squares(&design, &target)?;
            for j in 0..k {
                scores[(r, j)] = s[j];
            }
        }
        // Mean and loadings: per variable, least squares over the observed rows.
        for c in 0..p {
            let rows: Vec<usize> = (0..n).filter(|&r| observed(r, c)).collect();
            let design = Matrix::from_fn(rows.len(), k + 1, |i, j| {
                if j == 0 {
                    T::one()
                } else {
                    scores[(rows[i], j - 1)]
                }
            });
            let target: Vec<T> = rows.iter().map(|&r| data[(r, c)]).collect();
            let sol = least_squares(&design, &target)?;
            mean[c] = sol[0];
            for j in 0..k {
                loadings[(c, j)] = sol[j + 1];
            }
        }
        let recon = project(&scores, &loadings, &mean, k);
        let change = recon.sub(&previous)?.frobenius_norm();
        previous = recon;
        if change <= tol * previous.frobenius_norm() {
            for &(r, c) in &missing {
                filled[(r, c)] = previous[(r, c)];
            }
            return fit_complete(&filled);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
    })
}

/// Minimum-norm least-squares solution of `a·x ≈ b`.
fn least_squares<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.cols();
    if a.rows() == 0 {
        return Ok(vec![T::zero(); n]);
    }
    let dec = svd_thin(a)?;
    let cutoff = dec.sigma[0] * T::epsilon() * T::from_usize_lossy(a.rows().max(n));
    let mut x = vec![T::zero(); n];
    for (j, &s) in dec.sigma.iter().enumerate() {
        if s <= cutoff || s == T::zero() {
            continue;
        }
        let coef = (0..a.rows()).map(|i| dec.u[(i, j)] * b[i]).sum::<T>() / s;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += coef * dec.v[(i, j)];
        }
    }
    Ok(x)
}

/// Re-expresses `source`'s scores in `target`'s basis:
/// `score_source·coeff_targetᵀ + mean_target`.
pub fn reexpress<T: Real>(source: &PcaModel<T>, target: &PcaModel<T>) -> Result<Matrix<T>> {
    if source.variables() != target.variables() || source.observations() != target.observations()
    {
        return Err(Error::Shape(format!(
            "models are {}x{} and {}x{}",
            source.observations(),
            source.variables(),
            target.observations(),
            target.variables()
        )));
    }
    Ok(project(
        &source.score,
        &target.coeff,
        &target.mean,
        target.variables(),
    ))
}

/// Both faces moved into `b`'s basis, and their average.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination<T> {
    pub reexpressed_a: Matrix<T>,
    pub reexpressed_b: Matrix<T>,
    pub combined: Matrix<T>,
}

/// Fits both matrices, re-expresses each in `b`'s basis and averages.
pub fn combine_faces<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    policy: MissingPolicy,
) -> Result<Combination<T>> {
    a.ensure_same_shape(b)?;
    let model_a = pca_fit(a, policy)?;
    let model_b = pca_fit(b, policy)?;
    let reexpressed_a = reexpress(&model_a, &model_b)?;
    let reexpressed_b = reexpress(&model_b, &model_b)?;
    let combined = combine_average(&reexpressed_a, &reexpressed_b)?;
    Ok(Combination {
        reexpressed_a,
        reexpressed_b,
        combined,
    })
}

/// One synthetic registered face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSample<T> {
    pub shape: Matrix<T>,
    pub texture: Matrix<T>,
}

/// Number of deformation modes in [`synth_dataset`] output.
pub const SYNTH_RANK: usize = 3;
/// Half-width of the uniform noise added to shapes (model units).
pub const SYNTH_SHAPE_NOISE: f64 = 0.01;
/// Half-width of the uniform noise added to textures (colour levels).
pub const SYNTH_TEXTURE_NOISE: f64 = 0.5;

/// Deterministic stand-in for a registered face database: shapes on an
/// ellipsoid and skin-toned textures in `[0, 255]`, each a mean plus
/// [`SYNTH_RANK`] random modes plus small uniform noise.
pub fn synth_dataset<T: Real>(
    seed: u64,
    n_vertices: usize,
    n_samples: usize,
) -> Result<Vec<FaceSample<T>>> {
    if n_vertices < 3 || n_samples < 2 {
        return Err(Error::Parameter(format!(
            "need at least 3 vertices and 2 samples, got {n_vertices} and {n_samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut base_shape = Vec::with_capacity(n_vertices);
    let mut base_tex = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let theta: f64 = rng.gen_range(0.2..std::f64::consts::FRAC_PI_2 + 0.8);
        let phi: f64 = rng.gen_range(-1.3..1.3);
        base_shape.push([
            70.0 * theta.sin() * phi.sin(),
            95.0 * theta.cos(),
            80.0 * theta.sin() * phi.cos(),
        ]);
        let brightness: f64 = rng.gen_range(90.0..180.0);
        base_tex.push([brightness, 0.8 * brightness, 0.7 * brightness]);
    }
    let modes = |rng: &mut ChaCha8Rng, amplitude: f64| -> Vec<Vec<[f64; 3]>> {
        (0..SYNTH_RANK)
            .map(|_| {
                (0..n_vertices)
                    .map(|_| std::array::from_fn(|_| rng.gen_range(-amplitude..amplitude)))
                    .collect()
            })
            .collect()
    };
    let shape_modes = modes(&mut rng, 5.0);
    let tex_modes = modes(&mut rng, 15.0);

    let draw = |rng: &mut ChaCha8Rng, base: &[[f64; 3]], modes: &[Vec<[f64; 3]>], noise: f64| {
        let coeffs: Vec<f64> = (0..SYNTH_RANK).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut m = Matrix::zeros(n_vertices, 3);
        for v in 0..n_vertices {
            for c in 0..3 {
                let mut x = base[v][c];
                for (k, mode) in modes.iter().enumerate() {
                    x += coeffs[k] * mode[v][c];
                }
                x += rng.gen_range(-noise..=noise);
                m[(v, c)] = T::lit(x);
            }
        }
        m
    };
    Ok((0..n_samples)
        .map(|_| FaceSample {
            shape: draw(&mut rng, &base_shape, &shape_modes, SYNTH_SHAPE_NOISE),
            texture: draw(&mut rng, &base_tex, &tex_modes, SYNTH_TEXTURE_NOISE),
        })
        .collect())
}
