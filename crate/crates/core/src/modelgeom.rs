//! Explicit matrix model of `X = SL(n,R)/SO(n)`.
//!
//! The tangent space `p` is the space of symmetric traceless `n x n` matrices
//! with inner product `tr(XY)`; `K = SO(n)` acts by conjugation `X ↦ hXhᵀ`.
//! The flat `a` is the traceless diagonal, its orthocomplement in `p` is spanned
//! by `b_ij = (E_ij + E_ji)/√2`, and `k_ij = (E_ij - E_ji)/√2` spans `k`.
//! Vectors of the flat are passed around as their diagonals.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framematrix::{build_matrix, FrameSpec};
use crate::matcher::greedy_match;
use crate::rational::{to_f64, RatVec, Q};
use crate::rootdata::{lookup, SpaceDescriptor};

/// Index pair `(i, j)` with `i < j`, 0-based.
pub type Pair = (usize, usize);

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Coordinates closer than this are treated as equal in floating-point vectors.
const COORD_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ModelSpace {
    pub n: usize,
    pub space: SpaceDescriptor,
}

impl ModelSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("matrix size {n} < 2")));
        }
        let space = lookup(&format!("SL({n},R)"))?;
        Ok(ModelSpace { n, space })
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn pairs(&self) -> Vec<Pair> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).collect()
    }

    pub fn unit(&self, i: usize, j: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        m[(i, j)] = 1.0;
        m
    }

    pub fn b(&self, (i, j): Pair) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        m[(i, j)] = SQRT_HALF;
        m[(j, i)] = SQRT_HALF;
        m
    }

    pub fn k(&self, (i, j): Pair) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        m[(i, j)] = SQRT_HALF;
        m[(j, i)] = -SQRT_HALF;
        m
    }

    pub fn basis_perp(&self) -> Vec<DMatrix<f64>> {
        self.pairs().into_iter().map(|p| self.b(p)).collect()
    }

    pub fn basis_k(&self) -> Vec<DMatrix<f64>> {
        self.pairs().into_iter().map(|p| self.k(p)).collect()
    }

    /// Orthonormal basis of the traceless diagonal (Helmert vectors).
    pub fn basis_a(&self) -> Vec<DMatrix<f64>> {
        (1..self.n)
            .map(|m| {
                let s = ((m * (m + 1)) as f64).sqrt();
                let mut d = vec![0.0; self.n];
                d[..m].iter_mut().for_each(|x| *x = 1.0 / s);
                d[m] = -(m as f64) / s;
                diag(&d)
            })
            .collect()
    }
}

pub fn diag(t: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(t))
}

/// The trace form `tr(XY)`.
pub fn inner(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    x.component_mul(&y.transpose()).sum()
}

pub fn norm(x: &DMatrix<f64>) -> f64 {
    inner(x, &x.transpose()).sqrt()
}

pub fn conjugate(h: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    h * x * h.transpose()
}

pub fn gram_deviation(vectors: &[DMatrix<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, x) in vectors.iter().enumerate() {
        for y in &vectors[i + 1..] {
            worst = worst.max(inner(x, y).abs());
        }
    }
    worst
}

/// Angle between `v` and the span of an orthonormal family `basis`.
pub fn angle_to_subspace(v: &DMatrix<f64>, basis: &[DMatrix<f64>]) -> Result<f64> {
    let nv = norm(v);
    if nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut dev: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((inner(x, y) - want).abs());
        }
    }
    if dev > 1e-10 {
        return Err(Error::NonOrthonormalBasis(dev));
    }
    let proj: f64 = basis.iter().map(|w| inner(v, w).powi(2)).sum::<f64>().sqrt();
    Ok((proj / nv).clamp(0.0, 1.0).acos())
}

/// Angle from a symmetric traceless `x` to the flat (its diagonal part).
pub fn angle_to_flat(x: &DMatrix<f64>) -> f64 {
    let d = x.diagonal().norm();
    (d / norm(x)).clamp(0.0, 1.0).acos()
}

/// Angle from a symmetric traceless `x` to the orthocomplement of the flat.
pub fn angle_to_flat_perp(x: &DMatrix<f64>) -> f64 {
    let total = norm(x);
    let d = x.diagonal().norm();
    let off = (total * total - d * d).max(0.0).sqrt();
    (off / total).clamp(0.0, 1.0).acos()
}

/// Symmetric and trace deviation of `x` from `p`.
pub fn p_deviation(x: &DMatrix<f64>) -> f64 {
    (x - x.transpose()).amax().max(x.trace().abs())
}

fn haar_from_rng(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Sign fix makes Q Haar on O(n); flipping one column maps the det -1 coset onto SO(n).
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// A Haar-distributed element of `SO(n)`, reproducible from `seed`.
pub fn haar_rotation(n: usize, seed: u64) -> DMatrix<f64> {
    haar_sample(n, seed, 0)
}

/// Sample `index` of the stream for `seed`; independent of any worker layout.
pub fn haar_sample(n: usize, seed: u64, index: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    haar_from_rng(n, &mut rng)
}

/// `exp(s * x)` for a skew matrix `x`.
pub fn exp_skew(x: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    (x * s).exp()
}

fn check_flat_rational(model: &ModelSpace, v: &[Q]) -> Result<()> {
    model.space.rootsys.check_flat_vector(v)?;
    if v.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// The `b_ij` spanning `Q_v`: pairs whose coordinates differ.
pub fn q_subspace(model: &ModelSpace, v: &[Q]) -> Result<Vec<Pair>> {
    check_flat_rational(model, v)?;
    Ok(model.pairs().into_iter().filter(|&(i, j)| v[i] != v[j]).collect())
}

/// The `k_ij` spanning `k_v`: pairs whose coordinates agree.
pub fn stabilizer_generators(model: &ModelSpace, v: &[Q]) -> Vec<Pair> {
    model.pairs().into_iter().filter(|&(i, j)| v[i] == v[j]).collect()
}

/// Floating-point variant of [`q_subspace`] for diagonals known only numerically.
pub fn q_subspace_f64(model: &ModelSpace, v: &[f64]) -> Vec<Pair> {
    model
        .pairs()
        .into_iter()
        .filter(|&(i, j)| (v[i] - v[j]).abs() > COORD_TOL)
        .collect()
}

pub fn stabilizer_generators_f64(model: &ModelSpace, v: &[f64]) -> Vec<Pair> {
    model
        .pairs()
        .into_iter()
        .filter(|&(i, j)| (v[i] - v[j]).abs() <= COORD_TOL)
        .collect()
}

/// `∠(h·b, F⊥) / ∠(h·v, F)`, or `None` when the denominator is below `1e-6`.
pub fn ratio_at(v: &DMatrix<f64>, b: &DMatrix<f64>, h: &DMatrix<f64>) -> Option<f64> {
    let den = angle_to_flat(&conjugate(h, v));
    (den >= 1e-6).then(|| angle_to_flat_perp(&conjugate(h, b)) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioStats {
    pub max_ratio: f64,
    pub kept: u64,
    pub zero_denominator_count: u64,
}

/// Max over Haar samples of the angle ratio for `v` in the flat and `b ∈ Q_v`.
pub fn sample_ratio(model: &ModelSpace, v: &[f64], b: &DMatrix<f64>, samples: u64, seed: u64) -> Result<RatioStats> {
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if vn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q_basis: Vec<DMatrix<f64>> = q_subspace_f64(model, v).into_iter().map(|p| model.b(p)).collect();
    let proj: f64 = q_basis.iter().map(|w| inner(b, w).powi(2)).sum();
    let residual = (inner(b, b) - proj).max(0.0).sqrt();
    if residual > 1e-10 {
        return Err(Error::BNotInQ(residual));
    }
    let vm = diag(&v.iter().map(|x| x / vn).collect::<Vec<_>>());
    let n = model.n;
    let (max_ratio, kept, zero) = (0..samples)
        .into_par_iter()
        .map(|i| match ratio_at(&vm, b, &haar_sample(n, seed, i)) {
            Some(r) => (r, 1u64, 0u64),
            None => (0.0, 0, 1),
        })
        .reduce(|| (0.0, 0, 0), |a, b| (a.0.max(b.0), a.1 + b.1, a.2 + b.2));
    Ok(RatioStats {
        max_ratio,
        kept,
        zero_denominator_count: zero,
    })
}

/// Result of snapping a near-singular unit vector of the flat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snap {
    /// Unit vector on the chosen face.
    pub w: Vec<f64>,
    /// Blocks of equal coordinates of `w`.
    pub blocks: Vec<Vec<usize>>,
    /// Norm of the component of `w_hat` orthogonal to the face subspace.
    pub distance: f64,
    /// Number of positive roots vanishing on `w`.
    pub vanishing: usize,
}

/// Calls `f` on every set partition of `0..n` as a restricted growth string.
fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            rec(labels, n, max.max(l), f);
            labels.pop();
        }
    }
    if n == 0 {
        return;
    }
    let mut labels = vec![0];
    rec(&mut labels, n, 0, f);
}

fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        blocks[l].push(i);
    }
    blocks
}

/// Most singular vector within `eps0` of the unit vector `w_hat`.
///
/// Faces of the `A_{n-1}` arrangement are set partitions of the coordinates
/// (equal coordinates within a block); the projection onto a face replaces each
/// coordinate by its block mean. Among faces within `eps0`, the one with the
/// most vanishing roots wins, ties going to the smaller distance.
pub fn snap_to_singular(model: &ModelSpace, w_hat: &[f64], eps0: f64) -> Snap {
    let n = model.n;
    let mut best: Option<(usize, f64, Vec<usize>)> = None;
    for_each_partition(n, &mut |labels| {
        let blocks = blocks_of(labels);
        if blocks.len() < 2 {
            return;
        }
        let mut dist2 = 0.0;
        for b in &blocks {
            let mean = b.iter().map(|&i| w_hat[i]).sum::<f64>() / b.len() as f64;
            dist2 += b.iter().map(|&i| (w_hat[i] - mean).powi(2)).sum::<f64>();
        }
        let dist = dist2.sqrt();
        if dist > eps0 {
            return;
        }
        let vanishing: usize = blocks.iter().map(|b| b.len() * (b.len() - 1) / 2).sum();
        let better = match &best {
            None => true,
            Some((bv, bd, _)) => vanishing > *bv || (vanishing == *bv && dist < *bd),
        };
        if better {
            best = Some((vanishing, dist, labels.to_vec()));
        }
    });
    let (vanishing, distance, labels) = best.expect("the discrete partition is always within eps0");
    let blocks = blocks_of(&labels);
    let mut w = vec![0.0; n];
    for b in &blocks {
        let mean = b.iter().map(|&i| w_hat[i]).sum::<f64>() / b.len() as f64;
        b.iter().for_each(|&i| w[i] = mean);
    }
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter_mut().for_each(|x| *x /= wn);
    Snap {
        w,
        blocks,
        distance,
        vanishing,
    }
}

/// `ε0 = 1/(rank+1)^2`.
pub fn default_eps0(model: &ModelSpace) -> f64 {
    1.0 / ((model.rank() + 1) as f64).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOptions {
    /// Haar samples per `(v_i, b)` pair; zero skips ratio estimation.
    pub samples: u64,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            samples: 10_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DoubledFrame {
    pub primed: Vec<DMatrix<f64>>,
    pub double_primed: Vec<DMatrix<f64>>,
    /// The `(b_{j_i}, b_{k_i})` index pairs chosen for each frame vector.
    pub labels: Vec<[Pair; 2]>,
    pub gram_deviation: f64,
    pub ratio_estimate: Option<f64>,
}

impl DoubledFrame {
    fn assemble(primed: Vec<DMatrix<f64>>, double_primed: Vec<DMatrix<f64>>, labels: Vec<[Pair; 2]>) -> Self {
        let all: Vec<DMatrix<f64>> = primed.iter().chain(&double_primed).cloned().collect();
        DoubledFrame {
            gram_deviation: gram_deviation(&all),
            primed,
            double_primed,
            labels,
            ratio_estimate: None,
        }
    }

    pub fn members(&self) -> impl Iterator<Item = &DMatrix<f64>> {
        self.primed.iter().chain(&self.double_primed)
    }

    pub fn max_p_deviation(&self) -> f64 {
        self.members().map(p_deviation).fold(0.0, f64::max)
    }

    /// Largest `|<x, f>|` of a member against the flat basis.
    pub fn max_flat_component(&self, model: &ModelSpace) -> f64 {
        let flat = model.basis_a();
        self.members()
            .flat_map(|x| flat.iter().map(move |f| inner(x, f).abs()))
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.primed.len() + self.double_primed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn column_pair(model: &ModelSpace, root_index: usize) -> Pair {
    let s = model.space.rootsys.positives[root_index].support();
    (s[0].0, s[1].0)
}

/// The exact-flat case: match the selection matrix of a rational spanning
/// frame and read off `v'_i = b_{j_i}`, `v''_i = b_{k_i}`.
pub fn pipeline_flat(model: &ModelSpace, frame: &[RatVec], opts: SampleOptions) -> Result<DoubledFrame> {
    let spec = FrameSpec::new(&model.space, frame.to_vec())?;
    if frame.len() != model.rank() || !spec.spans() {
        return Err(Error::InvalidParams(format!(
            "frame must consist of {} vectors spanning the flat",
            model.rank()
        )));
    }
    model.space.ensure_allowed()?;
    let a = build_matrix(&spec)?;
    let (result, _) = greedy_match(&a.grid).map_err(|e| Error::MatchFailed(e.to_string()))?;
    let labels: Vec<[Pair; 2]> = result
        .pairs
        .iter()
        .map(|&(j, k)| {
            [
                column_pair(model, a.col_labels[j].root_index),
                column_pair(model, a.col_labels[k].root_index),
            ]
        })
        .collect();
    let primed = labels.iter().map(|l| model.b(l[0])).collect();
    let double_primed = labels.iter().map(|l| model.b(l[1])).collect();
    let mut out = DoubledFrame::assemble(primed, double_primed, labels);

    if opts.samples > 0 {
        let mut worst: f64 = 0.0;
        for (v, l) in frame.iter().zip(&out.labels) {
            let vf: Vec<f64> = v.iter().map(to_f64).collect();
            for &p in l {
                let stats = sample_ratio(model, &vf, &model.b(p), opts.samples, opts.seed)?;
                worst = worst.max(stats.max_ratio);
            }
        }
        out.ratio_estimate = Some(worst);
    }
    Ok(out)
}

/// Exact rational diagonal with the block pattern of a snapped vector.
fn rationalize(snap: &Snap) -> Result<RatVec> {
    const GRID: f64 = (1u32 << 20) as f64;
    let mut x = vec![0i64; snap.w.len()];
    for b in &snap.blocks {
        let r = (snap.w[b[0]] * GRID).round() as i64;
        b.iter().for_each(|&i| x[i] = r);
    }
    let len = x.len() as i64;
    let sum: i64 = x.iter().sum();
    let v: RatVec = x.iter().map(|&c| Q::from_integer(len * c - sum)).collect();
    let distinct: Vec<Q> = snap.blocks.iter().map(|b| v[b[0]]).collect();
    for (i, x) in distinct.iter().enumerate() {
        if distinct[i + 1..].contains(x) {
            return Err(Error::InvalidParams("snapped blocks collide after rounding".into()));
        }
    }
    Ok(v)
}

/// Rotation `k` near the identity with `kᵀ v k` block diagonal along `blocks`.
///
/// Eigenvectors of `v` are assigned to coordinates by rank order of
/// `reference`, then each block's eigenvector columns are replaced by the
/// orthonormal basis of their span closest to the standard one (polar factor).
pub fn polar_alignment(v: &DMatrix<f64>, blocks: &[Vec<usize>], reference: &[f64]) -> DMatrix<f64> {
    let n = v.nrows();
    let eig = SymmetricEigen::new(v.clone());
    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut by_position: Vec<usize> = (0..n).collect();
    by_position.sort_by(|&a, &b| reference[a].total_cmp(&reference[b]).then(a.cmp(&b)));

    let mut m = DMatrix::zeros(n, n);
    for (&pos, &e) in by_position.iter().zip(&by_value) {
        m.set_column(pos, &eig.eigenvectors.column(e));
    }

    let mut k = DMatrix::zeros(n, n);
    for b in blocks {
        let cols = DMatrix::from_fn(n, b.len(), |r, c| m[(r, b[c])]);
        let overlap = DMatrix::from_fn(b.len(), b.len(), |a, c| cols[(b[c], a)]);
        let svd = SVD::new(overlap, true, true);
        let polar = svd.u.unwrap() * svd.v_t.unwrap();
        let aligned = cols * polar;
        for (c, &pos) in b.iter().enumerate() {
            k.set_column(pos, &aligned.column(c));
        }
    }
    k
}

#[derive(Debug, Clone)]
pub struct PerturbedOutcome {
    pub frame: DoubledFrame,
    pub perturbed: Vec<DMatrix<f64>>,
    pub snaps: Vec<Snap>,
    /// `‖k'_i - I‖_F` for each frame vector.
    pub rotation_sizes: Vec<f64>,
    /// Largest `|<v'_i, v_i>|`, `|<v''_i, v_i>|`.
    pub self_overlap: f64,
    /// Smallest singular value of `ad(ŵ_i)` on the orthocomplement of `k_i`.
    pub bracket_floors: Vec<f64>,
}

/// Perturbed case: `v_i = exp(εu) w_i exp(-εu)` for an orthonormal flat frame `w`.
pub fn pipeline_perturbed(
    model: &ModelSpace,
    frame: &[Vec<f64>],
    u: &DMatrix<f64>,
    eps: f64,
    opts: SampleOptions,
) -> Result<PerturbedOutcome> {
    let limit = default_eps0(model);
    if !(0.0..limit).contains(&eps) {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    if (norm(u) - 1.0).abs() > 1e-9 || (u + u.transpose()).amax() > 1e-12 {
        return Err(Error::InvalidParams("u must be a unit skew-symmetric matrix".into()));
    }
    for w in frame {
        if w.len() != model.n {
            return Err(Error::DimensionMismatch {
                expected: model.n,
                got: w.len(),
            });
        }
    }
    let g = exp_skew(u, eps);
    let perturbed: Vec<DMatrix<f64>> = frame.iter().map(|w| conjugate(&g, &diag(w))).collect();

    let mut snaps = Vec::new();
    let mut hats = Vec::new();
    for v in &perturbed {
        let d: Vec<f64> = v.diagonal().iter().copied().collect();
        let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if dn == 0.0 {
            return Err(Error::ZeroVector);
        }
        let hat: Vec<f64> = d.iter().map(|x| x / dn).collect();
        snaps.push(snap_to_singular(model, &hat, limit));
        hats.push(hat);
    }
    let rational: Vec<RatVec> = snaps.iter().map(rationalize).collect::<Result<_>>()?;
    let flat = pipeline_flat(model, &rational, opts)?;

    let mut primed = Vec::new();
    let mut double_primed = Vec::new();
    let mut rotation_sizes = Vec::new();
    let mut self_overlap: f64 = 0.0;
    let mut bracket_floors = Vec::new();
    for (i, v) in perturbed.iter().enumerate() {
        let k = polar_alignment(v, &snaps[i].blocks, &snaps[i].w);
        rotation_sizes.push((&k - DMatrix::identity(model.n, model.n)).norm());
        let p = conjugate(&k, &flat.primed[i]);
        let pp = conjugate(&k, &flat.double_primed[i]);
        self_overlap = self_overlap.max(inner(&p, v).abs()).max(inner(&pp, v).abs());
        primed.push(p);
        double_primed.push(pp);

        let floor = q_subspace_f64(model, &snaps[i].w)
            .into_iter()
            .map(|(a, b)| std::f64::consts::SQRT_2 * (hats[i][a] - hats[i][b]).abs())
            .fold(f64::INFINITY, f64::min);
        bracket_floors.push(floor);
    }
    let mut out = DoubledFrame::assemble(primed, double_primed, flat.labels.clone());
    out.ratio_estimate = flat.ratio_estimate;
    Ok(PerturbedOutcome {
        frame: out,
        perturbed,
        snaps,
        rotation_sizes,
        self_overlap,
        bracket_floors,
    })
}

/// A uniformly random unit element of `k` (skew-symmetric), from `seed`.
pub fn random_unit_skew(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let s = &g - g.transpose();
    let ns = norm(&s.transpose());
    s / ns
}

/// A random orthonormal frame of the flat, as diagonals. With `singular`, the
/// first vector lies on a random wall `t_p = t_q`.
pub fn random_flat_frame(n: usize, singular: bool, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame: Vec<Vec<f64>> = Vec::new();
    while frame.len() < n - 1 {
        let mut t: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if singular && frame.is_empty() {
            let p = rng.random_range(0..n);
            let q = (p + rng.random_range(1..n)) % n;
            let m = (t[p] + t[q]) / 2.0;
            t[p] = m;
            t[q] = m;
        }
        let mean = t.iter().sum::<f64>() / n as f64;
        t.iter_mut().for_each(|x| *x -= mean);
        for f in &frame {
            let c: f64 = t.iter().zip(f).map(|(a, b)| a * b).sum();
            t.iter_mut().zip(f).for_each(|(a, b)| *a -= c * b);
        }
        let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if tn > 1e-3 {
            frame.push(t.into_iter().map(|x| x / tn).collect());
        }
    }
    frame
}

/// `[E_ij - E_ji, diag(t)]` by exact matrix products.
pub fn bracket_rational(n: usize, (i, j): Pair, t: &[Q]) -> Vec<Vec<Q>> {
    let mut k = vec![vec![Q::zero(); n]; n];
    k[i][j] = Q::from_integer(1);
    k[j][i] = Q::from_integer(-1);
    let mut d = vec![vec![Q::zero(); n]; n];
    (0..n).for_each(|r| d[r][r] = t[r]);
    let mul = |a: &Vec<Vec<Q>>, b: &Vec<Vec<Q>>| -> Vec<Vec<Q>> {
        (0..n)
            .map(|r| (0..n).map(|c| (0..n).map(|m| a[r][m] * b[m][c]).sum()).collect())
            .collect()
    };
    let (kd, dk) = (mul(&k, &d), mul(&d, &k));
    (0..n).map(|r| (0..n).map(|c| kd[r][c] - dk[r][c]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;

    fn m4() -> ModelSpace {
        ModelSpace::new(4).unwrap()
    }

    #[test]
    fn bases_are_orthonormal() {
        let m = m4();
        let all: Vec<_> = m.basis_perp().into_iter().chain(m.basis_a()).collect();
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner(x, y) - want).abs() < 1e-15);
            }
        }
        assert_eq!(m.basis_perp().len() as u32, m.space.dim_x - m.space.rank as u32);
    }

    #[test]
    fn angle_examples() {
        let m = m4();
        let w = m.b((0, 1));
        let u = m.b((2, 3));
        let basis = vec![w.clone()];
        assert!(angle_to_subspace(&w, &basis).unwrap().abs() < 1e-12);
        assert!((angle_to_subspace(&u, &basis).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let mix = (&w + &u) * SQRT_HALF;
        assert!((angle_to_subspace(&mix, &basis).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert_eq!(angle_to_subspace(&DMatrix::zeros(4, 4), &basis), Err(Error::ZeroVector));
        assert!(matches!(
            angle_to_subspace(&w, &[w.clone(), w.clone()]),
            Err(Error::NonOrthonormalBasis(_))
        ));
    }

    #[test]
    fn fast_angles_match_projection() {
        let m = m4();
        let h = haar_rotation(4, 9);
        let x = conjugate(&h, &diag(&[3.0, 1.0, -1.0, -3.0]));
        let a = angle_to_subspace(&x, &m.basis_a()).unwrap();
        let p = angle_to_subspace(&x, &m.basis_perp()).unwrap();
        assert!((a - angle_to_flat(&x)).abs() < 1e-10);
        assert!((p - angle_to_flat_perp(&x)).abs() < 1e-10);
    }

    #[test]
    fn haar_is_special_orthogonal_and_reproducible() {
        for seed in 0..20 {
            let r = haar_rotation(5, seed);
            let dev = (r.transpose() * &r - DMatrix::identity(5, 5)).amax();
            assert!(dev <= 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
        assert_eq!(haar_rotation(4, 3), haar_rotation(4, 3));
        assert_ne!(haar_sample(4, 3, 0), haar_sample(4, 3, 1));
    }

    #[test]
    fn q_subspace_examples() {
        let m = m4();
        assert_eq!(
            q_subspace(&m, &qv(&[1, 1, -1, -1])).unwrap(),
            vec![(0, 2), (0, 3), (1, 2), (1, 3)]
        );
        assert_eq!(q_subspace(&m, &qv(&[1, 2, 3, -6])).unwrap().len(), 6);
        assert_eq!(
            q_subspace(&m, &qv(&[1, 1, 1, -3])).unwrap(),
            vec![(0, 3), (1, 3), (2, 3)]
        );
        assert_eq!(q_subspace(&m, &qv(&[0, 0, 0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn stabilizer_examples() {
        let m = m4();
        assert_eq!(stabilizer_generators(&m, &qv(&[1, 1, -1, -1])), vec![(0, 1), (2, 3)]);
        assert!(stabilizer_generators(&m, &qv(&[1, 2, 3, -6])).is_empty());
        assert_eq!(
            stabilizer_generators(&m, &qv(&[1, 1, 1, -3])),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        let v = diag(&[1.0, 1.0, 1.0, -3.0]);
        for p in stabilizer_generators(&m, &qv(&[1, 1, 1, -3])) {
            let h = exp_skew(&m.k(p), 0.7);
            assert!((conjugate(&h, &v) - &v).amax() < 1e-12);
        }
    }

    #[test]
    fn identity_sample_is_degenerate() {
        let m = m4();
        let v = diag(&[1.0, 1.0, 1.0, -3.0]);
        assert_eq!(ratio_at(&v, &m.b((0, 3)), &DMatrix::identity(4, 4)), None);
    }

    #[test]
    fn stabilizer_rotations_keep_b_perpendicular() {
        let m = m4();
        let b = m.b((0, 3));
        for p in stabilizer_generators(&m, &qv(&[1, 1, 1, -3])) {
            for step in 1..=30 {
                let h = exp_skew(&m.k(p), 0.1 * step as f64);
                assert!(angle_to_flat_perp(&conjugate(&h, &b)) <= 1e-9);
            }
        }
    }

    #[test]
    fn b_outside_q_is_rejected() {
        let m = m4();
        let v = [1.0, 1.0, 1.0, -3.0];
        assert!(matches!(
            sample_ratio(&m, &v, &m.b((0, 1)), 10, 1),
            Err(Error::BNotInQ(_))
        ));
        let s = sample_ratio(&m, &v, &m.b((0, 3)), 200, 1).unwrap();
        assert!(s.max_ratio.is_finite() && s.max_ratio > 0.0);
        assert_eq!(s.kept + s.zero_denominator_count, 200);
    }

    #[test]
    fn snapping() {
        let m = m4();
        let eps0 = default_eps0(&m);
        assert_eq!(eps0, 1.0 / 16.0);
        let unit = |v: &[f64]| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / n).collect::<Vec<_>>()
        };
        let regular = unit(&[3.0, 1.0, -1.0, -3.0]);
        let s = snap_to_singular(&m, &regular, eps0);
        assert_eq!(s.vanishing, 0);
        assert!(s.w.iter().zip(&regular).all(|(a, b)| (a - b).abs() < 1e-15));

        let near = unit(&[1.0, 1.0 + 1e-4, -1.0, -1.0 - 1e-4]);
        let s = snap_to_singular(&m, &near, eps0);
        assert_eq!(s.blocks, vec![vec![0, 1], vec![2, 3]]);
        assert!(s
            .w
            .iter()
            .zip(&[0.5, 0.5, -0.5, -0.5])
            .all(|(a, b)| (a - b).abs() < 1e-12));

        let on_wall = unit(&[1.0, 1.0, 1.0, -3.0]);
        let s = snap_to_singular(&m, &on_wall, eps0);
        assert_eq!(s.vanishing, 3);
        assert!(s.w.iter().zip(&on_wall).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn flat_pipeline_on_wall_frame() {
        let m = m4();
        let frame = vec![qv(&[1, 1, 1, -3]), qv(&[-3, 1, 1, 1]), qv(&[1, -1, 1, -1])];
        let out = pipeline_flat(&m, &frame, SampleOptions { samples: 0, seed: 1 }).unwrap();
        assert_eq!(out.labels, vec![[(0, 3), (1, 3)], [(0, 1), (0, 2)], [(1, 2), (2, 3)]]);
        assert!(out.gram_deviation <= 1e-15);
        assert_eq!(out.max_flat_component(&m), 0.0);
    }

    #[test]
    fn perturbed_reduces_to_flat_at_zero() {
        let m = m4();
        let frame = vec![
            vec![0.5, 0.5, -0.5, -0.5],
            vec![0.5, -0.5, 0.5, -0.5],
            vec![0.5, -0.5, -0.5, 0.5],
        ];
        let u = random_unit_skew(4, 5);
        let opts = SampleOptions { samples: 0, seed: 1 };
        let out = pipeline_perturbed(&m, &frame, &u, 0.0, opts).unwrap();
        let rational: Vec<RatVec> = out.snaps.iter().map(|s| rationalize(s).unwrap()).collect();
        let flat = pipeline_flat(&m, &rational, opts).unwrap();
        for (a, b) in out.frame.members().zip(flat.members()) {
            assert!((a - b).amax() < 1e-12);
        }
        assert!(matches!(
            pipeline_perturbed(&m, &frame, &u, 0.1, opts),
            Err(Error::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let m = m4();
        for singular in [false, true] {
            let f = random_flat_frame(4, singular, 3);
            let mats: Vec<_> = f.iter().map(|t| diag(t)).collect();
            assert!(gram_deviation(&mats) < 1e-12);
            assert!(mats
                .iter()
                .all(|x| (norm(x) - 1.0).abs() < 1e-12 && x.trace().abs() < 1e-12));
            if singular {
                assert!(!stabilizer_generators_f64(&m, &f[0]).is_empty());
            }
        }
    }

    #[test]
    fn singular_member_is_recovered_by_snapping() {
        let m = m4();
        let r = SQRT_HALF;
        let frame = vec![vec![0.5, 0.5, -0.5, -0.5], vec![r, -r, 0.0, 0.0], vec![0.0, 0.0, r, -r]];
        let u = random_unit_skew(4, 2);
        let out = pipeline_perturbed(&m, &frame, &u, 1e-4, SampleOptions { samples: 0, seed: 1 }).unwrap();
        assert_eq!(out.snaps[0].blocks, vec![vec![0, 1], vec![2, 3]]);
        for (s, w) in out.snaps.iter().zip(&frame) {
            assert!(s.w.iter().zip(w).all(|(a, b)| (a - b).abs() < 1e-6));
        }
    }

    #[test]
    fn perturbed_outputs_stay_orthogonal_to_inputs() {
        let m = m4();
        let frame = vec![
            vec![0.5, 0.5, -0.5, -0.5],
            vec![0.5, -0.5, 0.5, -0.5],
            vec![0.5, -0.5, -0.5, 0.5],
        ];
        let u = random_unit_skew(4, 11);
        let out = pipeline_perturbed(&m, &frame, &u, 1e-3, SampleOptions { samples: 0, seed: 1 }).unwrap();
        assert!(out.self_overlap < 1e-10);
        assert!(out.frame.gram_deviation < 1e-2);
        assert!(out.rotation_sizes.iter().all(|&r| r < 1e-2));
        assert!(out.frame.max_p_deviation() < 1e-12);
    }
}
