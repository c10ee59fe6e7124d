//! The acceptance sweep: ten numbered checks shared by the test suite and `all`.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chamber::{enumerate_faces, verify_codim_bounds};
use crate::error::Result;
use crate::framematrix::{build_matrix, verify_properties, BinaryMatrix, FrameSpec};
use crate::fuzz::{frame_corpus, sweep, unconstrained_sweep};
use crate::matcher::greedy_match;
use crate::modelgeom::{
    angle_to_flat_perp, bracket_rational, conjugate, inner, pipeline_flat, pipeline_perturbed, q_subspace,
    random_flat_frame, random_unit_skew, sample_ratio, stabilizer_generators, ModelSpace, SampleOptions,
};
use crate::rational::{qv, Q};
use crate::rootdata::{catalogue, lookup, KType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub frames_per_space: usize,
    pub unconstrained: usize,
    /// Seeds for the ratio spread; the first also seeds the corpora.
    pub seeds: Vec<u64>,
    pub samples: u64,
    pub calibration_samples: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            frames_per_space: 1000,
            unconstrained: 1000,
            seeds: vec![1, 2, 3, 4, 5],
            samples: 10_000,
            calibration_samples: 100_000,
        }
    }
}

impl SuiteConfig {
    fn seed(&self) -> u64 {
        self.seeds.first().copied().unwrap_or(1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub checks_pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub budget: Duration,
}

impl Outcome {
    pub fn within_budget(&self) -> bool {
        self.elapsed < self.budget
    }

    pub fn pass(&self) -> bool {
        self.checks_pass && self.within_budget()
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} ({:.2?} of {:.0?}) {}",
            self.id,
            self.title,
            if self.pass() { "PASS" } else { "FAIL" },
            self.elapsed,
            self.budget,
            self.detail
        )
    }
}

pub const TITLES: [&str; 10] = [
    "catalogue identities",
    "codimension bounds",
    "matrix properties",
    "key claim",
    "hand-derived instance",
    "model algebra",
    "stabilizer zero case",
    "ratio stability",
    "flat pipeline",
    "epsilon scaling",
];

const BUDGETS_SECS: [u64; 10] = [1, 5, 120, 120, 1, 1, 30, 300, 60, 300];

fn timed(id: u8, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (checks_pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        title: TITLES[usize::from(id) - 1],
        checks_pass,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(BUDGETS_SECS[usize::from(id) - 1]),
    }
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Outcome {
    timed(id, || match id {
        1 => catalogue_identities(),
        2 => codim_bounds(),
        3 => matrix_properties(cfg),
        4 => key_claim(cfg),
        5 => hand_instance(),
        6 => model_algebra(cfg),
        7 => stabilizer_zero_case(cfg),
        8 => ratio_stability(cfg),
        9 => flat_pipeline(cfg),
        10 => epsilon_scaling(cfg),
        _ => Ok((false, format!("no criterion {id}"))),
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Outcome> {
    (1..=10).map(|id| run_criterion(id, cfg)).collect()
}

fn catalogue_identities() -> Result<(bool, String)> {
    let cat = catalogue();
    let mut bad = Vec::new();
    for s in &cat {
        bad.extend(s.identity_violations());
        let sum: u32 = s.rootsys.positives.iter().map(|r| r.multiplicity).sum();
        if s.dim_x != s.rank as u32 + sum || s.dim_k != s.dim_m + sum {
            bad.push(s.name.clone());
        }
    }
    Ok((
        bad.is_empty(),
        format!("{} spaces, {} violations {:?}", cat.len(), bad.len(), bad),
    ))
}

fn codim_bounds() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut checked = 0;
    for s in catalogue()
        .into_iter()
        .filter(|s| !s.excluded && (2..=8).contains(&s.rank))
    {
        let r = verify_codim_bounds(&s)?;
        let n = s.rank;
        checked += 1;
        if !r.pass {
            bad.push(format!("{} bound", s.name));
        }
        let min = r.min_codim as usize;
        let ok = match s.ktype {
            KType::SoNPlus1 => {
                let attaining: Vec<Vec<usize>> = r.faces_attaining_rank().map(|f| f.simple_subset.clone()).collect();
                attaining == vec![(1..n).collect::<Vec<_>>(), (2..=n).collect()]
            }
            KType::SoNxSoNr(rr) => min == 2 * n - 2 + rr as usize,
            KType::Other => min + 1 >= 2 * n,
        };
        if !ok {
            bad.push(format!("{} min {min}", s.name));
        }
    }
    Ok((bad.is_empty(), format!("{checked} spaces, failures {bad:?}")))
}

fn corpus_spaces() -> Vec<crate::rootdata::SpaceDescriptor> {
    catalogue()
        .into_iter()
        .filter(|s| !s.excluded && (2..=6).contains(&s.rank))
        .collect()
}

fn matrix_properties(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut failures = [0usize; 5];
    let mut frames = 0;
    let mut equal_rows = 0;
    for s in corpus_spaces() {
        let st = sweep(&s, cfg.frames_per_space, cfg.seed())?;
        frames += st.frames;
        equal_rows += st.equal_row_frames;
        for (a, b) in failures.iter_mut().zip(st.property_failures) {
            *a += b;
        }
    }
    Ok((
        failures.iter().all(|&c| c == 0) && cfg.frames_per_space >= 1000,
        format!("{frames} frames, failures per property {failures:?}, frames with equal rows {equal_rows}"),
    ))
}

fn key_claim(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let (mut frames, mut greedy, mut invalid, mut oracle, mut repairs) = (0, 0, 0, 0, 0);
    for s in corpus_spaces() {
        let st = sweep(&s, cfg.frames_per_space, cfg.seed())?;
        frames += st.frames;
        greedy += st.greedy_failures;
        invalid += st.invalid_outputs;
        oracle += st.oracle_failures;
        repairs += st.repairs;
    }
    let u = unconstrained_sweep(cfg.unconstrained, cfg.seed());
    let pass = greedy + invalid + oracle == 0 && u.unsound == 0 && u.disagreements == 0 && cfg.frames_per_space >= 1000;
    Ok((
        pass,
        format!(
            "{frames} frames: greedy failures {greedy}, invalid {invalid}, oracle failures {oracle}, repairs {repairs}; \
             unconstrained {}: greedy {} oracle {} unsound {} disagreements {}",
            u.matrices, u.greedy_successes, u.oracle_successes, u.unsound, u.disagreements
        ),
    ))
}

fn hand_instance() -> Result<(bool, String)> {
    let s = lookup("SL(4,R)")?;
    let frame = FrameSpec::new(&s, vec![qv(&[1, 1, 1, -3]), qv(&[-3, 1, 1, 1]), qv(&[1, -1, 1, -1])])?;
    let a = build_matrix(&frame)?;
    let expected = BinaryMatrix::new(vec![
        vec![0, 0, 1, 0, 1, 1],
        vec![1, 1, 1, 0, 0, 0],
        vec![1, 0, 1, 1, 0, 1],
    ])?;
    let rows_ok = a.grid == expected;
    let props_ok = verify_properties(&a.grid, &s)?.all_pass();
    let (m, _) = greedy_match(&a.grid)?;
    let short = |j: usize| {
        let sup = s.rootsys.positives[a.col_labels[j].root_index].support();
        format!("{}{}", sup[0].0 + 1, sup[1].0 + 1)
    };
    let chosen: Vec<[String; 2]> = m.pairs.iter().map(|&(j, k)| [short(j), short(k)]).collect();
    let want = [["14", "24"], ["12", "13"], ["23", "34"]];
    let trace_ok = chosen.iter().zip(&want).all(|(c, w)| c[0] == w[0] && c[1] == w[1]);
    Ok((
        rows_ok && props_ok && trace_ok,
        format!("rows {rows_ok}, properties {props_ok}, choices {chosen:?}"),
    ))
}

fn model_algebra(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut bracket_ok = true;
    let mut worst_gram: f64 = 0.0;
    let mut counts_ok = true;
    for n in 3..=8 {
        let m = ModelSpace::new(n)?;
        let t: Vec<Q> = (0..n)
            .map(|_| Q::new(rng.random_range(-50..=50), rng.random_range(1..=12)))
            .collect();
        for (i, j) in m.pairs() {
            let br = bracket_rational(n, (i, j), &t);
            for (r, row) in br.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    let want = if (r, c) == (i, j) || (r, c) == (j, i) {
                        t[j] - t[i]
                    } else {
                        Q::zero()
                    };
                    bracket_ok &= *x == want;
                }
            }
        }
        let basis = m.basis_perp();
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((inner(x, y) - want).abs());
            }
            for f in m.basis_a() {
                worst_gram = worst_gram.max(inner(x, &f).abs());
            }
        }
        counts_ok &= basis.len() as u32 == m.space.dim_x - m.space.rank as u32;
    }
    Ok((
        bracket_ok && worst_gram <= 1e-14 && counts_ok,
        format!("bracket exact {bracket_ok}, gram deviation {worst_gram:e}, counts {counts_ok}"),
    ))
}

fn stabilizer_zero_case(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [4, 5] {
        let m = ModelSpace::new(n)?;
        for face in enumerate_faces(&m.space)
            .into_iter()
            .filter(|f| !f.is_regular() && !f.is_origin())
        {
            let v = &face.witness;
            let gens = stabilizer_generators(&m, v);
            for p in q_subspace(&m, v)? {
                let b = m.b(p);
                for _ in 0..50 {
                    let mut x = DMatrix::zeros(n, n);
                    for &g in &gens {
                        x += m.k(g) * rng.random_range(-3.0..3.0);
                    }
                    let h = x.exp();
                    worst = worst.max(angle_to_flat_perp(&conjugate(&h, &b)));
                    cases += 1;
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("{cases} rotations, worst angle {worst:e}")))
}

fn ratio_stability(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let m = ModelSpace::new(4)?;
    let v: Vec<f64> = [1.0, 1.0, 1.0, -3.0].iter().map(|x| x / 12f64.sqrt()).collect();
    let b = m.b((0, 3));
    let mut small = Vec::new();
    let mut growth: f64 = 0.0;
    for &seed in &cfg.seeds {
        let a = sample_ratio(&m, &v, &b, cfg.samples, seed)?.max_ratio;
        let c = sample_ratio(&m, &v, &b, cfg.calibration_samples, seed)?.max_ratio;
        growth = growth.max(c / a);
        small.push(a);
    }
    let lo = small.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = small.iter().copied().fold(0.0, f64::max);
    let finite = small.iter().all(|x| x.is_finite() && *x > 0.0);
    let pass = finite && hi / lo <= 2.0 && growth < 2.0 && !cfg.seeds.is_empty();
    Ok((
        pass,
        format!(
            "max ratios {small:.4?}, spread x{:.3}, calibration growth x{growth:.3}",
            hi / lo
        ),
    ))
}

fn flat_pipeline(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut worst_gram: f64 = 0.0;
    let mut worst_flat: f64 = 0.0;
    let mut bad_len = 0;
    let mut frames = 0;
    let opts = SampleOptions {
        samples: 0,
        seed: cfg.seed(),
    };
    for n in [4, 5, 6] {
        let m = ModelSpace::new(n)?;
        for (_, frame) in frame_corpus(&m.space, 150, cfg.seed()) {
            let out = pipeline_flat(&m, &frame, opts)?;
            frames += 1;
            bad_len += usize::from(out.len() != 2 * m.rank());
            worst_gram = worst_gram.max(out.gram_deviation);
            worst_flat = worst_flat.max(out.max_flat_component(&m));
            let all: Vec<DMatrix<f64>> = out.members().cloned().collect();
            worst_gram = worst_gram.max(all.iter().map(|x| (inner(x, x) - 1.0).abs()).fold(0.0, f64::max));
        }
    }
    Ok((
        bad_len == 0 && worst_gram <= 1e-12 && worst_flat <= 1e-12,
        format!("{frames} frames, gram deviation {worst_gram:e}, flat component {worst_flat:e}"),
    ))
}

/// Gram deviation quotients `dev(ε)/ε` for the three step sizes.
pub fn scaling_quotients(m: &ModelSpace, frame: &[Vec<f64>], u: &DMatrix<f64>) -> Result<[f64; 3]> {
    let opts = SampleOptions { samples: 0, seed: 1 };
    let mut out = [0.0; 3];
    for (o, eps) in out.iter_mut().zip([1e-2, 1e-3, 1e-4]) {
        *o = pipeline_perturbed(m, frame, u, eps, opts)?.frame.gram_deviation / eps;
    }
    Ok(out)
}

fn epsilon_scaling(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let m = ModelSpace::new(4)?;
    let mut worst_spread: f64 = 0.0;
    let mut c1: f64 = 0.0;
    for i in 0..10 {
        let seed = cfg.seed() * 1000 + i;
        let frame = random_flat_frame(4, true, seed);
        let quot = scaling_quotients(&m, &frame, &random_unit_skew(4, seed))?;
        let lo = quot.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = quot.iter().copied().fold(0.0, f64::max);
        worst_spread = worst_spread.max(if lo > 0.0 { hi / lo } else { f64::INFINITY });
        c1 = c1.max(hi);
    }
    // Frames far from every wall are carried by one common rotation, so the
    // output stays orthonormal to rounding error.
    let mut regular_dev: f64 = 0.0;
    for i in 0..10 {
        let seed = cfg.seed() * 1000 + 500 + i;
        let frame = random_flat_frame(4, false, seed);
        let out = pipeline_perturbed(
            &m,
            &frame,
            &random_unit_skew(4, seed),
            1e-3,
            SampleOptions { samples: 0, seed },
        )?;
        if out.snaps.iter().all(|s| s.vanishing == 0) {
            regular_dev = regular_dev.max(out.frame.gram_deviation);
        }
    }
    Ok((
        worst_spread <= 10.0 && regular_dev <= 1e-10,
        format!(
            "worst quotient spread x{worst_spread:.3}, C1 estimate {c1:.4}, regular-frame deviation {regular_dev:e}"
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_pass() {
        let cfg = SuiteConfig::default();
        for id in [1, 2, 5, 6] {
            let o = run_criterion(id, &cfg);
            assert!(o.checks_pass, "{}", o.line());
        }
    }
}
