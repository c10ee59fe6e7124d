//! Faces of the closed Weyl chamber and codimensions of vector stabilizers.
//!
//! A face is indexed by a subset `S` of the simple roots. The positive roots
//! vanishing on it are exactly those in `span(S)`, and the stabilizer `K_v` of
//! any `v` in its relative interior has Lie algebra `m ⊕ Σ_{α(v)=0} k_α`, so
//! `dim K - dim K_v = Σ_{α(v)≠0} m_α`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{in_span, is_zero_vec, primitive_integer, q, solve, RatVec, Q};
use crate::rootdata::{Family, KType, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceClass {
    /// Indices into `rootsys.simple_roots()`.
    pub simple_subset: Vec<usize>,
    /// Indices into `rootsys.positives` of the roots vanishing on the face.
    pub vanishing: Vec<usize>,
    pub codim: u32,
    /// Integral point of the relative interior; zero only for the full subset.
    pub witness: RatVec,
}

impl FaceClass {
    pub fn is_regular(&self) -> bool {
        self.simple_subset.is_empty()
    }

    /// The face `S = all simple roots` is the origin of the flat.
    pub fn is_origin(&self) -> bool {
        is_zero_vec(&self.witness)
    }
}

/// One face per subset of the standard simple system, ordered by bitmask.
pub fn enumerate_faces(space: &SpaceDescriptor) -> Vec<FaceClass> {
    let sys = &space.rootsys;
    let simple = sys.simple_roots();
    let n = sys.rank;
    let dim = sys.ambient_dim();

    (0u32..1 << n)
        .map(|mask| {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let span: Vec<RatVec> = subset.iter().map(|&i| simple[i].clone()).collect();
            let vanishing: Vec<usize> = sys
                .positives
                .iter()
                .enumerate()
                .filter(|(_, r)| in_span(&r.coords, &span))
                .map(|(i, _)| i)
                .collect();
            let codim = sys
                .positives
                .iter()
                .enumerate()
                .filter(|(i, _)| !vanishing.contains(i))
                .map(|(_, r)| r.multiplicity)
                .sum();

            // Sum of the fundamental coweights dual to the simple roots outside S.
            let mut rows = simple.clone();
            let mut rhs: RatVec = (0..n)
                .map(|i| if mask & (1 << i) != 0 { Q::zero() } else { q(1) })
                .collect();
            if sys.family == Family::A {
                rows.push(vec![q(1); dim]);
                rhs.push(Q::zero());
            }
            let witness = solve(&rows, &rhs).expect("simple roots form a basis of the flat");
            FaceClass {
                simple_subset: subset,
                vanishing,
                codim,
                witness: primitive_integer(&witness),
            }
        })
        .collect()
}

/// `dim K - dim K_v` for a nonzero `v` in the flat.
pub fn stabilizer_codim(space: &SpaceDescriptor, v: &[Q]) -> Result<u32> {
    space.rootsys.check_flat_vector(v)?;
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    Ok(space
        .rootsys
        .positives
        .iter()
        .filter(|r| !r.eval_unchecked(v).is_zero())
        .map(|r| r.multiplicity)
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceBound {
    /// 1-based indices of the simple roots in `S`.
    pub simple_subset: Vec<usize>,
    pub vanishing: usize,
    pub codim: u32,
    pub bound: String,
    pub attains_rank: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub space: String,
    pub rank: usize,
    pub ktype: KType,
    pub faces: Vec<FaceBound>,
    pub min_codim: u32,
    pub pass: bool,
}

impl BoundReport {
    /// Faces whose stabilizer has codimension exactly `n`.
    pub fn faces_attaining_rank(&self) -> impl Iterator<Item = &FaceBound> {
        self.faces.iter().filter(|f| f.attains_rank)
    }
}

/// Checks the codimension bounds of every singular, nonzero face by `K` type:
///
/// * `K = SO(n+1)`: `d >= 2n-2` or `d = n`,
/// * `K = SO(n) x SO(n+r)`: `d >= 2n-2+r`,
/// * otherwise `d >= 2n-1`.
pub fn verify_codim_bounds(space: &SpaceDescriptor) -> Result<BoundReport> {
    space.ensure_allowed()?;
    let n = space.rank as u32;
    if n < 2 {
        return Err(Error::InvalidParams(format!("{} has rank {n} < 2", space.name)));
    }
    let (bound, check): (String, Box<dyn Fn(u32) -> bool>) = match space.ktype {
        KType::SoNPlus1 => (
            format!("d >= {} or d = {n}", 2 * n - 2),
            Box::new(move |d| d >= 2 * n - 2 || d == n),
        ),
        KType::SoNxSoNr(r) => (format!("d >= {}", 2 * n - 2 + r), Box::new(move |d| d >= 2 * n - 2 + r)),
        KType::Other => (format!("d >= {}", 2 * n - 1), Box::new(move |d| d >= 2 * n - 1)),
    };

    let faces: Vec<FaceBound> = enumerate_faces(space)
        .into_iter()
        .filter(|f| !f.vanishing.is_empty() && !f.is_origin())
        .map(|f| FaceBound {
            simple_subset: f.simple_subset.iter().map(|i| i + 1).collect(),
            vanishing: f.vanishing.len(),
            codim: f.codim,
            bound: bound.clone(),
            attains_rank: f.codim == n,
            ok: check(f.codim),
        })
        .collect();
    let min_codim = faces.iter().map(|f| f.codim).min().unwrap_or(0);
    let pass = faces.iter().all(|f| f.ok);
    Ok(BoundReport {
        space: space.name.clone(),
        rank: space.rank,
        ktype: space.ktype,
        faces,
        min_codim,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;
    use crate::rootdata::lookup;

    fn face<'a>(faces: &'a [FaceClass], subset: &[usize]) -> &'a FaceClass {
        faces.iter().find(|f| f.simple_subset == subset).unwrap()
    }

    #[test]
    fn sl4_faces() {
        let s = lookup("SL(4,R)").unwrap();
        let faces = enumerate_faces(&s);
        assert_eq!(faces.len(), 8);
        let regular = face(&faces, &[]);
        assert!(regular.vanishing.is_empty());
        assert_eq!(regular.codim, 6);
        let wall = face(&faces, &[0, 1]);
        let labels: Vec<String> = wall.vanishing.iter().map(|&i| s.rootsys.positives[i].label()).collect();
        assert_eq!(labels, vec!["e1-e2", "e1-e3", "e2-e3"]);
        assert_eq!(wall.codim, 3);
        assert_eq!(wall.witness, qv(&[1, 1, 1, -3]));
    }

    #[test]
    fn sp6_c2_subwall() {
        let s = lookup("Sp(6,R)").unwrap();
        let faces = enumerate_faces(&s);
        let f = face(&faces, &[1, 2]);
        assert_eq!(f.vanishing.len(), 4);
        assert_eq!(f.codim, 5);
        assert_eq!(f.witness, qv(&[1, 0, 0]));
    }

    #[test]
    fn stabilizer_codims() {
        assert_eq!(
            stabilizer_codim(&lookup("SL(4,R)").unwrap(), &qv(&[1, 1, 1, -3])).unwrap(),
            3
        );
        assert_eq!(
            stabilizer_codim(&lookup("SO(4,4)").unwrap(), &qv(&[1, 0, 0, 0])).unwrap(),
            6
        );
        assert_eq!(
            stabilizer_codim(&lookup("Sp(6,R)").unwrap(), &qv(&[1, 0, 0])).unwrap(),
            5
        );
        let sp6 = lookup("Sp(6,R)").unwrap();
        assert_eq!(stabilizer_codim(&sp6, &qv(&[0, 0, 0])), Err(Error::ZeroVector));
        assert!(matches!(
            stabilizer_codim(&sp6, &qv(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            stabilizer_codim(&lookup("SL(4,R)").unwrap(), &qv(&[1, 1, 1, 1])),
            Err(Error::NotInFlat)
        );
    }

    #[test]
    fn sl4_bounds() {
        let r = verify_codim_bounds(&lookup("SL(4,R)").unwrap()).unwrap();
        assert!(r.pass);
        let attaining: Vec<_> = r.faces_attaining_rank().map(|f| f.simple_subset.clone()).collect();
        assert_eq!(attaining, vec![vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn so35_and_sp4_bounds() {
        let r = verify_codim_bounds(&lookup("SO(3,5)").unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_codim, 6);
        let r = verify_codim_bounds(&lookup("Sp(4,R)").unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_codim, 3);
    }

    #[test]
    fn sl3_is_refused() {
        assert!(matches!(
            verify_codim_bounds(&lookup("SL(3,R)").unwrap()),
            Err(Error::ExcludedSpace(_))
        ));
    }
}
