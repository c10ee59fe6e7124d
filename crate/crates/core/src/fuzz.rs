//! Seeded random frames and matrices for the property and matching sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chamber::enumerate_faces;
use crate::error::Result;
use crate::framematrix::{build_matrix, verify_properties, BinaryMatrix, FrameSpec};
use crate::matcher::{greedy_match, oracle_match, validate};
use crate::rational::{is_zero_vec, q, rank, RatVec, Q};
use crate::rootdata::{Family, SpaceDescriptor, WeylElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Integer entries uniform on `[-9, 9]`.
    Generic,
    /// Generic vectors, each merged onto a wall with probability 1/2.
    Mixed,
    /// Every vector is a scaled face witness moved by a random Weyl element.
    Snapped,
}

impl FrameKind {
    pub const ALL: [FrameKind; 3] = [FrameKind::Generic, FrameKind::Mixed, FrameKind::Snapped];
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Projects onto the flat: the trace-zero hyperplane for type A.
fn into_flat(family: Family, w: RatVec) -> RatVec {
    if family != Family::A {
        return w;
    }
    let len = q(w.len() as i64);
    let sum: Q = w.iter().sum();
    w.iter().map(|x| x * len - sum).collect()
}

fn generic_vector(space: &SpaceDescriptor, rng: &mut impl Rng) -> RatVec {
    let dim = space.rootsys.ambient_dim();
    (0..dim).map(|_| q(rng.random_range(-9..=9))).collect()
}

/// Forces one coordinate equality (or, off type A, a zero or sign-flipped
/// equality), so at least one root vanishes.
fn merge_coordinates(family: Family, w: &mut RatVec, rng: &mut impl Rng) {
    let dim = w.len();
    let i = rng.random_range(0..dim);
    let mut j = rng.random_range(0..dim - 1);
    if j >= i {
        j += 1;
    }
    let choice = if family == Family::A { 0 } else { rng.random_range(0..3) };
    match choice {
        0 => w[j] = w[i],
        1 => w[j] = -w[i],
        _ => w[i] = Q::from_integer(0),
    }
}

fn snapped_vector(space: &SpaceDescriptor, witnesses: &[RatVec], rng: &mut impl Rng) -> RatVec {
    let face = &witnesses[rng.random_range(0..witnesses.len())];
    let w = WeylElement::random(space.rootsys.family, face.len(), rng);
    let scale = q(rng.random_range(1..=5));
    w.apply(face).into_iter().map(|x| x * scale).collect()
}

/// Witnesses of every nonzero face, regular one included.
fn face_witnesses(space: &SpaceDescriptor) -> Vec<RatVec> {
    enumerate_faces(space)
        .into_iter()
        .filter(|f| !f.is_origin())
        .map(|f| f.witness)
        .collect()
}

fn draw_vector(space: &SpaceDescriptor, kind: FrameKind, witnesses: &[RatVec], rng: &mut impl Rng) -> RatVec {
    let family = space.rootsys.family;
    match kind {
        FrameKind::Generic => into_flat(family, generic_vector(space, rng)),
        FrameKind::Mixed => {
            if rng.random_bool(0.5) {
                let mut w = generic_vector(space, rng);
                merge_coordinates(family, &mut w, rng);
                into_flat(family, w)
            } else if rng.random_bool(0.5) {
                snapped_vector(space, witnesses, rng)
            } else {
                into_flat(family, generic_vector(space, rng))
            }
        }
        FrameKind::Snapped => snapped_vector(space, witnesses, rng),
    }
}

/// A spanning frame of `rank` nonzero vectors, redrawn until it spans.
pub fn random_frame(space: &SpaceDescriptor, kind: FrameKind, rng: &mut impl Rng) -> Vec<RatVec> {
    let witnesses = face_witnesses(space);
    random_frame_with(space, kind, &witnesses, rng)
}

fn random_frame_with(
    space: &SpaceDescriptor,
    kind: FrameKind,
    witnesses: &[RatVec],
    rng: &mut impl Rng,
) -> Vec<RatVec> {
    let n = space.rank;
    loop {
        let frame: Vec<RatVec> = (0..n).map(|_| draw_vector(space, kind, witnesses, rng)).collect();
        if frame.iter().all(|v| !is_zero_vec(v)) && rank(&frame) == n {
            return frame;
        }
    }
}

/// `count` frames cycling through the three kinds; frame `i` uses stream `i`.
pub fn frame_corpus(space: &SpaceDescriptor, count: usize, seed: u64) -> Vec<(FrameKind, Vec<RatVec>)> {
    let witnesses = face_witnesses(space);
    (0..count)
        .into_par_iter()
        .map(|i| {
            let kind = FrameKind::ALL[i % 3];
            let mut rng = stream_rng(seed, i as u64);
            (kind, random_frame_with(space, kind, &witnesses, &mut rng))
        })
        .collect()
}

/// Unconstrained 0/1 matrix with 2..=6 rows and 4..=16 columns.
pub fn random_binary_matrix(rng: &mut impl Rng) -> BinaryMatrix {
    let rows = rng.random_range(2..=6);
    let cols = rng.random_range(4..=16);
    let p = rng.random_range(0.3..0.95);
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| u8::from(rng.random_bool(p))).collect())
        .collect();
    BinaryMatrix::new(entries).expect("rectangular by construction")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub space: String,
    pub frames: usize,
    pub property_failures: [usize; 5],
    pub greedy_failures: usize,
    pub invalid_outputs: usize,
    pub oracle_failures: usize,
    pub repairs: usize,
    /// Frames with two identical rows; property 4's hypothesis.
    pub equal_row_frames: usize,
    /// Stage-to-stage weight drops beyond one in the light phase.
    pub weight_drop_violations: usize,
}

impl CorpusStats {
    pub fn properties_pass(&self) -> bool {
        self.property_failures.iter().all(|&c| c == 0)
    }

    pub fn matching_pass(&self) -> bool {
        self.greedy_failures == 0 && self.invalid_outputs == 0 && self.oracle_failures == 0
    }

    fn merge(mut self, o: CorpusStats) -> CorpusStats {
        self.frames += o.frames;
        for (a, b) in self.property_failures.iter_mut().zip(o.property_failures) {
            *a += b;
        }
        self.greedy_failures += o.greedy_failures;
        self.invalid_outputs += o.invalid_outputs;
        self.oracle_failures += o.oracle_failures;
        self.repairs += o.repairs;
        self.equal_row_frames += o.equal_row_frames;
        self.weight_drop_violations += o.weight_drop_violations;
        self
    }
}

fn check_frame(space: &SpaceDescriptor, frame: Vec<RatVec>) -> Result<CorpusStats> {
    let spec = FrameSpec::new(space, frame)?;
    let a = build_matrix(&spec)?.grid;
    let report = verify_properties(&a, space)?;
    let mut s = CorpusStats {
        frames: 1,
        ..Default::default()
    };
    for v in &report.verdicts {
        if !v.holds {
            s.property_failures[usize::from(v.id) - 1] += 1;
        }
    }
    s.equal_row_frames = usize::from(!report.equal_row_pairs.is_empty());
    match greedy_match(&a) {
        Ok((m, trace)) => {
            s.invalid_outputs = usize::from(!validate(&a, &m));
            s.repairs = trace.repairs.len();
            s.weight_drop_violations = trace.weight_drop_violations().len();
        }
        Err(_) => s.greedy_failures = 1,
    }
    s.oracle_failures = usize::from(oracle_match(&a).is_none());
    Ok(s)
}

/// Property and matching sweep over a seeded corpus of `count` frames.
pub fn sweep(space: &SpaceDescriptor, count: usize, seed: u64) -> Result<CorpusStats> {
    space.ensure_allowed()?;
    let stats = frame_corpus(space, count, seed)
        .into_par_iter()
        .map(|(_, f)| check_frame(space, f))
        .try_reduce(CorpusStats::default, |a, b| Ok(a.merge(b)))?;
    Ok(CorpusStats {
        space: space.name.clone(),
        ..stats
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UnconstrainedStats {
    pub matrices: usize,
    pub greedy_successes: usize,
    pub oracle_successes: usize,
    /// Greedy output that fails validation.
    pub unsound: usize,
    /// Greedy succeeded but the oracle found nothing.
    pub disagreements: usize,
}

/// Soundness check of the greedy matcher on matrices without any hypotheses.
pub fn unconstrained_sweep(count: usize, seed: u64) -> UnconstrainedStats {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let a = random_binary_matrix(&mut stream_rng(seed, i as u64));
            let oracle = oracle_match(&a).is_some();
            let mut s = UnconstrainedStats {
                matrices: 1,
                oracle_successes: usize::from(oracle),
                ..Default::default()
            };
            if let Ok((m, _)) = greedy_match(&a) {
                s.greedy_successes = 1;
                s.unsound = usize::from(!validate(&a, &m));
                s.disagreements = usize::from(!oracle);
            }
            s
        })
        .reduce(UnconstrainedStats::default, |a, b| UnconstrainedStats {
            matrices: a.matrices + b.matrices,
            greedy_successes: a.greedy_successes + b.greedy_successes,
            oracle_successes: a.oracle_successes + b.oracle_successes,
            unsound: a.unsound + b.unsound,
            disagreements: a.disagreements + b.disagreements,
        })
}
