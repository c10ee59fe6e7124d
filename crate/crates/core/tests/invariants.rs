use eigmatch::chamber::{enumerate_faces, stabilizer_codim};
use eigmatch::framematrix::{build_matrix, verify_properties, BinaryMatrix, FrameSpec};
use eigmatch::fuzz::{random_frame, stream_rng, FrameKind};
use eigmatch::matcher::{greedy_match, oracle_match, validate};
use eigmatch::modelgeom::{
    conjugate, default_eps0, diag, haar_sample, inner, sample_ratio, snap_to_singular, ModelSpace,
};
use eigmatch::rootdata::{catalogue, SpaceDescriptor, WeylElement};
use proptest::prelude::*;

fn spaces() -> Vec<SpaceDescriptor> {
    catalogue().into_iter().filter(|s| !s.excluded && s.rank <= 6).collect()
}

fn matrix_strategy() -> impl Strategy<Value = BinaryMatrix> {
    (1usize..=6, 2usize..=14).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(0u8..=1, c), r).prop_map(|e| BinaryMatrix::new(e).unwrap())
    })
}

fn shuffle(len: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..len).collect();
    let mut x = seed;
    for i in (1..len).rev() {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        p.swap(i, (x >> 33) as usize % (i + 1));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn codim_is_weyl_invariant(idx in 0usize..200, seed in any::<u64>()) {
        let all = spaces();
        let s = &all[idx % all.len()];
        let mut rng = stream_rng(seed, 0);
        for v in random_frame(s, FrameKind::Mixed, &mut rng) {
            let w = WeylElement::random(s.rootsys.family, v.len(), &mut rng);
            prop_assert_eq!(stabilizer_codim(s, &v).unwrap(), stabilizer_codim(s, &w.apply(&v)).unwrap());
        }
    }

    #[test]
    fn row_weight_is_stabilizer_codim(idx in 0usize..200, seed in any::<u64>()) {
        let all = spaces();
        let s = &all[idx % all.len()];
        let frame = random_frame(s, FrameKind::Snapped, &mut stream_rng(seed, 1));
        let a = build_matrix(&FrameSpec::new(s, frame.clone()).unwrap()).unwrap();
        for (i, v) in frame.iter().enumerate() {
            prop_assert_eq!(a.grid.row_weight(i) as u32, stabilizer_codim(s, v).unwrap());
        }
    }

    #[test]
    fn verdicts_are_permutation_invariant(idx in 0usize..200, seed in any::<u64>()) {
        let all = spaces();
        let s = &all[idx % all.len()];
        let frame = random_frame(s, FrameKind::Mixed, &mut stream_rng(seed, 2));
        let a = build_matrix(&FrameSpec::new(s, frame.clone()).unwrap()).unwrap().grid;
        let rp = shuffle(a.rows, seed);
        let cp = shuffle(a.cols, seed ^ 0xabcdef);
        let b = a.permuted(&rp, &cp);
        let holds = |m: &BinaryMatrix| -> Vec<bool> {
            verify_properties(m, s).unwrap().verdicts.iter().map(|v| v.holds).collect()
        };
        prop_assert_eq!(holds(&a), holds(&b));

        let mut reordered = vec![Vec::new(); frame.len()];
        for (i, v) in frame.into_iter().enumerate() {
            reordered[rp[i]] = v;
        }
        let c = build_matrix(&FrameSpec::new(s, reordered).unwrap()).unwrap().grid;
        prop_assert_eq!(c, a.permuted(&rp, &(0..a.cols).collect::<Vec<_>>()));
    }

    #[test]
    fn greedy_is_sound_and_deterministic(a in matrix_strategy()) {
        let first = greedy_match(&a);
        prop_assert_eq!(&first, &greedy_match(&a));
        if let Ok((m, _)) = first {
            prop_assert!(validate(&a, &m));
            prop_assert!(oracle_match(&a).is_some());
        }
        if let Some(m) = oracle_match(&a) {
            prop_assert!(validate(&a, &m));
        }
    }

    #[test]
    fn greedy_matches_are_permutation_robust(idx in 0usize..200, seed in any::<u64>()) {
        let all = spaces();
        let s = &all[idx % all.len()];
        let frame = random_frame(s, FrameKind::Snapped, &mut stream_rng(seed, 3));
        let a = build_matrix(&FrameSpec::new(s, frame).unwrap()).unwrap().grid;
        let b = a.permuted(&shuffle(a.rows, seed), &shuffle(a.cols, seed.rotate_left(7)));
        let (m, _) = greedy_match(&b).unwrap();
        prop_assert!(validate(&b, &m));
    }

    #[test]
    fn face_codim_is_monotone(idx in 0usize..200) {
        let all = spaces();
        let s = &all[idx % all.len()];
        let faces = enumerate_faces(s);
        for f in &faces {
            for g in &faces {
                if f.simple_subset.iter().all(|i| g.simple_subset.contains(i)) {
                    prop_assert!(f.codim >= g.codim);
                }
            }
        }
    }

    #[test]
    fn snapping_stays_in_the_ball(t in proptest::collection::vec(-1.0f64..1.0, 5)) {
        let m = ModelSpace::new(5).unwrap();
        let mean = t.iter().sum::<f64>() / 5.0;
        let c: Vec<f64> = t.iter().map(|x| x - mean).collect();
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(nrm > 1e-3);
        let hat: Vec<f64> = c.iter().map(|x| x / nrm).collect();
        let s = snap_to_singular(&m, &hat, default_eps0(&m));
        prop_assert!(s.distance <= default_eps0(&m));
        let w_norm = s.w.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((w_norm - 1.0).abs() < 1e-12);
        prop_assert!(s.w.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn conjugation_preserves_trace_form(seed in any::<u64>(), a in proptest::collection::vec(-2.0f64..2.0, 4), b in proptest::collection::vec(-2.0f64..2.0, 4)) {
        let h = haar_sample(4, seed, 0);
        let m = ModelSpace::new(4).unwrap();
        let x = diag(&a) + m.b((0, 2)) * a[0];
        let y = diag(&b) + m.b((1, 3)) * b[1];
        prop_assert!((inner(&conjugate(&h, &x), &conjugate(&h, &y)) - inner(&x, &y)).abs() < 1e-12);
    }
}

#[test]
fn max_ratio_is_nondecreasing_in_samples() {
    let m = ModelSpace::new(4).unwrap();
    let v: Vec<f64> = [1.0, 1.0, 1.0, -3.0].iter().map(|x| x / 12f64.sqrt()).collect();
    let b = m.b((0, 3));
    let mut last = 0.0;
    for n in [100, 1000, 5000] {
        let r = sample_ratio(&m, &v, &b, n, 4).unwrap().max_ratio;
        assert!(r >= last);
        last = r;
    }
}
