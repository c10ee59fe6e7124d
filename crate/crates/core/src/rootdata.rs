//! Restricted root systems of the classical families and a catalogue of
//! irreducible symmetric spaces of noncompact type.
//!
//! Roots are linear functionals on the flat `a`, written in the standard
//! `e_i` coordinates. For type `A_n` the flat is the trace-zero hyperplane of
//! `R^(n+1)`, so vectors and roots there have `n + 1` coordinates; every other
//! family uses `n` coordinates.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, RatVec, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "BC" => Ok(Family::BC),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
        };
        f.write_str(s)
    }
}

impl Family {
    /// Number of coordinates used for the flat of a rank-`rank` system.
    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            Family::A => rank + 1,
            _ => rank,
        }
    }
}

/// A positive restricted root with its multiplicity `m_α = dim p_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub coords: RatVec,
    pub multiplicity: u32,
    // Every classical root has at most two nonzero integer coordinates.
    support: Vec<(usize, i64)>,
}

impl Root {
    pub fn new(coords: RatVec, multiplicity: u32) -> Result<Self> {
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::ZeroVector);
        }
        if multiplicity == 0 {
            return Err(Error::InvalidParams("root multiplicity must be >= 1".into()));
        }
        let support = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_integer() {
                    Ok((i, c.to_integer()))
                } else {
                    Err(Error::InvalidParams("root coordinates must be integral".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Root {
            coords,
            multiplicity,
            support,
        })
    }

    fn from_terms(dim: usize, terms: &[(usize, i64)], multiplicity: u32) -> Self {
        let mut coords = vec![Q::zero(); dim];
        for &(i, c) in terms {
            coords[i] = q(c);
        }
        Root::new(coords, multiplicity).expect("pattern roots are valid")
    }

    /// Sparse `(index, coefficient)` form; this is also the column sort key.
    pub fn support(&self) -> &[(usize, i64)] {
        &self.support
    }

    /// Exact value `α(v)`.
    pub fn eval(&self, v: &[Q]) -> Result<Q> {
        if v.len() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: v.len(),
            });
        }
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &[Q]) -> Q {
        self.support.iter().fold(Q::zero(), |acc, &(i, c)| acc + v[i] * c)
    }

    /// Human label such as `e1-e2`, `e1+e3`, `e2` or `2e1` (1-based indices).
    pub fn label(&self) -> String {
        let mut out = String::new();
        for (k, &(i, c)) in self.support.iter().enumerate() {
            match (k, c) {
                (0, 1) => {}
                (0, -1) => out.push('-'),
                (_, 1) => out.push('+'),
                (_, -1) => out.push('-'),
                (_, c) if c > 0 && k > 0 => out.push_str(&format!("+{c}")),
                (_, c) => out.push_str(&c.to_string()),
            }
            out.push_str(&format!("e{}", i + 1));
        }
        out
    }
}

/// `evaluate_root`: the exact pairing of a root with a vector of the flat.
pub fn evaluate_root(alpha: &Root, v: &[Q]) -> Result<Q> {
    alpha.eval(v)
}

/// Multiplicities of the three root lengths that occur in classical systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Multiplicities {
    /// `e_i ± e_j` (and `e_i - e_j` in type A).
    pub middle: u32,
    /// `e_i` (types B and BC).
    pub short: u32,
    /// `2 e_i` (types C and BC).
    pub long: u32,
}

impl Multiplicities {
    pub const SPLIT: Multiplicities = Multiplicities {
        middle: 1,
        short: 1,
        long: 1,
    };

    /// Root data of `SO(n, n+r)`: type B with `m(e_i) = r`.
    pub fn indefinite_orthogonal(r: u32) -> Self {
        Multiplicities {
            middle: 1,
            short: r,
            long: 0,
        }
    }

    /// Root data of `SU(p, q)`; `short` is zero exactly when `p == q`.
    pub fn unitary(p: u32, q: u32) -> Self {
        Multiplicities {
            middle: 2,
            short: 2 * p.saturating_sub(q),
            long: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub positives: Vec<Root>,
}

impl RootSystem {
    pub fn ambient_dim(&self) -> usize {
        self.family.ambient_dim(self.rank)
    }

    /// `Σ_{α>0} m_α`, the number of columns of the selection matrix.
    pub fn total_multiplicity(&self) -> u32 {
        self.positives.iter().map(|r| r.multiplicity).sum()
    }

    /// The standard simple system `α_1, ..., α_n`.
    pub fn simple_roots(&self) -> Vec<RatVec> {
        let n = self.rank;
        let dim = self.ambient_dim();
        let unit = |terms: &[(usize, i64)]| {
            let mut v = vec![Q::zero(); dim];
            for &(i, c) in terms {
                v[i] = q(c);
            }
            v
        };
        let chain = match self.family {
            Family::A => n,
            _ => n - 1,
        };
        let mut simple: Vec<RatVec> = (0..chain).map(|i| unit(&[(i, 1), (i + 1, -1)])).collect();
        match self.family {
            Family::A => {}
            Family::B | Family::BC => simple.push(unit(&[(n - 1, 1)])),
            Family::C => simple.push(unit(&[(n - 1, 2)])),
            Family::D => simple.push(unit(&[(n - 2, 1), (n - 1, 1)])),
        }
        simple
    }

    /// Whether `v` lies in the flat: the right length and, for type A, trace zero.
    pub fn check_flat_vector(&self, v: &[Q]) -> Result<()> {
        let dim = self.ambient_dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        if self.family == Family::A && v.iter().fold(Q::zero(), |a, x| a + x) != Q::zero() {
            return Err(Error::NotInFlat);
        }
        Ok(())
    }
}

/// Builds the complete positive system of `family` in rank `rank`.
pub fn build_root_system(family: Family, rank: usize, mult: Multiplicities) -> Result<RootSystem> {
    if rank == 0 {
        return Err(Error::InvalidParams("rank must be >= 1".into()));
    }
    if family == Family::D && rank < 2 {
        return Err(Error::InvalidParams("type D needs rank >= 2".into()));
    }
    let needs = |m: u32, what: &str| {
        if m == 0 {
            Err(Error::InvalidParams(format!(
                "{what} multiplicity must be >= 1 for {family}"
            )))
        } else {
            Ok(())
        }
    };
    if rank >= 2 || family == Family::A {
        needs(mult.middle, "e_i±e_j")?;
    }
    match family {
        Family::B => needs(mult.short, "e_i")?,
        Family::C => needs(mult.long, "2e_i")?,
        Family::BC => {
            needs(mult.short, "e_i")?;
            needs(mult.long, "2e_i")?;
        }
        Family::A | Family::D => {}
    }

    let dim = family.ambient_dim(rank);
    let mut positives = Vec::new();
    if family == Family::A {
        for i in 0..dim {
            for j in i + 1..dim {
                positives.push(Root::from_terms(dim, &[(i, 1), (j, -1)], mult.middle));
            }
        }
    } else {
        for i in 0..rank {
            for j in i + 1..rank {
                positives.push(Root::from_terms(dim, &[(i, 1), (j, -1)], mult.middle));
                positives.push(Root::from_terms(dim, &[(i, 1), (j, 1)], mult.middle));
            }
        }
        for i in 0..rank {
            if matches!(family, Family::B | Family::BC) {
                positives.push(Root::from_terms(dim, &[(i, 1)], mult.short));
            }
            if matches!(family, Family::C | Family::BC) {
                positives.push(Root::from_terms(dim, &[(i, 2)], mult.long));
            }
        }
    }
    Ok(RootSystem {
        family,
        rank,
        positives,
    })
}

/// Shape of the maximal compact subgroup, as needed by the codimension bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KType {
    /// `K = SO(n+1)`.
    SoNPlus1,
    /// `K = SO(n) x SO(n+r)`.
    SoNxSoNr(u32),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceDescriptor {
    pub name: String,
    pub params: Vec<u32>,
    pub rank: usize,
    pub rootsys: RootSystem,
    pub dim_x: u32,
    pub dim_k: u32,
    pub dim_m: u32,
    pub ktype: KType,
    pub excluded: bool,
}

impl SpaceDescriptor {
    pub fn columns(&self) -> u32 {
        self.rootsys.total_multiplicity()
    }

    pub fn is_special_linear(&self) -> bool {
        self.name.starts_with("SL(")
    }

    /// Returns `Err(ExcludedSpace)` for the `SL(3,R)` entry.
    pub fn ensure_allowed(&self) -> Result<()> {
        if self.excluded {
            Err(Error::ExcludedSpace(self.name.clone()))
        } else {
            Ok(())
        }
    }

    /// The self-checking dimension identities; returns a description of each failure.
    pub fn identity_violations(&self) -> Vec<String> {
        let sum = self.columns();
        let n = self.rank as u32;
        let mut bad = Vec::new();
        if self.dim_x != n + sum {
            bad.push(format!("{}: dimX {} != rank {} + Σm {}", self.name, self.dim_x, n, sum));
        }
        if self.dim_k != self.dim_m + sum {
            bad.push(format!(
                "{}: dimK {} != dimM {} + Σm {}",
                self.name, self.dim_k, self.dim_m, sum
            ));
        }
        if n >= 2 {
            let floor = n * (n + 1) / 2;
            let cols = self.dim_x - n;
            if cols < floor {
                bad.push(format!("{}: dimX - rank = {cols} < n(n+1)/2 = {floor}", self.name));
            }
            if (cols == floor) != self.is_special_linear() {
                bad.push(format!(
                    "{}: equality dimX - rank = n(n+1)/2 is {} but the space is {}SL(n+1,R)",
                    self.name,
                    cols == floor,
                    if self.is_special_linear() { "" } else { "not " }
                ));
            }
        }
        bad
    }
}

fn sl(n: usize) -> SpaceDescriptor {
    let size = (n + 1) as u32;
    SpaceDescriptor {
        name: format!("SL({size},R)"),
        params: vec![size],
        rank: n,
        rootsys: build_root_system(Family::A, n, Multiplicities::SPLIT).unwrap(),
        dim_x: size * (size + 1) / 2 - 1,
        dim_k: size * (size - 1) / 2,
        dim_m: 0,
        ktype: KType::SoNPlus1,
        excluded: n == 2,
    }
}

fn so(n: usize, r: u32) -> SpaceDescriptor {
    let p = n as u32;
    let qq = p + r;
    let (family, mult) = if r == 0 {
        (Family::D, Multiplicities::SPLIT)
    } else {
        (Family::B, Multiplicities::indefinite_orthogonal(r))
    };
    SpaceDescriptor {
        name: format!("SO({p},{qq})"),
        params: vec![p, qq],
        rank: n,
        rootsys: build_root_system(family, n, mult).unwrap(),
        dim_x: p * qq,
        dim_k: p * (p - 1) / 2 + qq * (qq - 1) / 2,
        dim_m: r * r.saturating_sub(1) / 2,
        ktype: KType::SoNxSoNr(r),
        excluded: false,
    }
}

fn sp(n: usize) -> SpaceDescriptor {
    let m = n as u32;
    SpaceDescriptor {
        name: format!("Sp({},R)", 2 * m),
        params: vec![2 * m],
        rank: n,
        rootsys: build_root_system(Family::C, n, Multiplicities::SPLIT).unwrap(),
        dim_x: m * (m + 1),
        dim_k: m * m,
        dim_m: 0,
        ktype: KType::Other,
        excluded: false,
    }
}

/// `SU(p, q)` with `p >= q >= 1`.
pub fn su(p: u32, qq: u32) -> Result<SpaceDescriptor> {
    if qq == 0 || p < qq {
        return Err(Error::InvalidParams(format!(
            "SU(p,q) needs p >= q >= 1, got ({p},{qq})"
        )));
    }
    let family = if p == qq { Family::C } else { Family::BC };
    Ok(SpaceDescriptor {
        name: format!("SU({p},{qq})"),
        params: vec![p, qq],
        rank: qq as usize,
        rootsys: build_root_system(family, qq as usize, Multiplicities::unitary(p, qq))?,
        dim_x: 2 * p * qq,
        dim_k: p * p + qq * qq - 1,
        // Centralizer of a in K: S(U(p-q) x U(1)^q); stored, checked by the identities.
        dim_m: (p - qq) * (p - qq) + qq - 1,
        ktype: KType::Other,
        excluded: false,
    })
}

/// The closed list of catalogued spaces.
///
/// `SO(2,2)` (not simple) and `SO(3,3)` (locally `SL(4,R)`) are left out.
pub fn catalogue() -> Vec<SpaceDescriptor> {
    let mut out: Vec<SpaceDescriptor> = (2..=8).map(sl).collect();
    for n in 2..=8 {
        for r in 0..=3 {
            if r == 0 && n <= 3 {
                continue;
            }
            out.push(so(n, r));
        }
    }
    out.extend((2..=8).map(sp));
    for qq in 2..=6 {
        for p in qq..=6 {
            out.push(su(p, qq).unwrap());
        }
    }
    out
}

fn normalize_name(name: &str) -> String {
    name.chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace('ℝ', "R")
        .to_ascii_uppercase()
}

pub fn lookup(name: &str) -> Result<SpaceDescriptor> {
    let key = normalize_name(name);
    catalogue()
        .into_iter()
        .find(|s| normalize_name(&s.name) == key)
        .ok_or_else(|| Error::UnknownSpace(name.to_string()))
}

/// An element of the Weyl group acting on `e_i` coordinates: a signed permutation.
///
/// `apply(v)[perm[i]] = signs[i] * v[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl WeylElement {
    pub fn identity(dim: usize) -> Self {
        WeylElement {
            perm: (0..dim).collect(),
            signs: vec![1; dim],
        }
    }

    pub fn apply(&self, v: &[Q]) -> RatVec {
        let mut out = vec![Q::zero(); v.len()];
        for (i, x) in v.iter().enumerate() {
            out[self.perm[i]] = x * self.signs[i];
        }
        out
    }

    /// Uniform element of the Weyl group of `family` (permutations for A,
    /// even sign changes for D, all sign changes otherwise).
    pub fn random<R: Rng + ?Sized>(family: Family, dim: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut signs: Vec<i64> = match family {
            Family::A => vec![1; dim],
            _ => (0..dim).map(|_| if rng.random_bool(0.5) { -1 } else { 1 }).collect(),
        };
        if family == Family::D && signs.iter().filter(|&&s| s < 0).count() % 2 == 1 {
            signs[0] = -signs[0];
        }
        WeylElement { perm, signs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;

    fn labels(sys: &RootSystem) -> Vec<(String, u32)> {
        sys.positives.iter().map(|r| (r.label(), r.multiplicity)).collect()
    }

    #[test]
    fn a3_has_six_roots() {
        let sys = build_root_system(Family::A, 3, Multiplicities::SPLIT).unwrap();
        assert_eq!(sys.positives.len(), 6);
        assert!(sys.positives.iter().all(|r| r.multiplicity == 1));
        assert_eq!(sys.ambient_dim(), 4);
    }

    #[test]
    fn c2_roots() {
        let sys = build_root_system(Family::C, 2, Multiplicities::SPLIT).unwrap();
        let mut got = labels(&sys);
        got.sort();
        let mut want = vec![
            ("e1-e2".to_string(), 1),
            ("e1+e2".to_string(), 1),
            ("2e1".to_string(), 1),
            ("2e2".to_string(), 1),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn su31_is_rank_one_bc() {
        let s = su(3, 1).unwrap();
        assert_eq!(labels(&s.rootsys), vec![("e1".to_string(), 4), ("2e1".to_string(), 1)]);
        assert_eq!(s.dim_x, 6);
        assert_eq!(s.rank as u32 + s.columns(), 6);
        assert!(s.identity_violations().is_empty());
    }

    #[test]
    fn su_pp_drops_short_roots() {
        let s = su(2, 2).unwrap();
        assert_eq!(s.rootsys.family, Family::C);
        assert!(s.rootsys.positives.iter().all(|r| r.label() != "e1"));
    }

    #[test]
    fn bad_params() {
        assert_eq!("E".parse::<Family>(), Err(Error::UnknownFamily("E".into())));
        assert!(matches!(
            build_root_system(Family::A, 0, Multiplicities::SPLIT),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(su(1, 2), Err(Error::InvalidParams(_))));
        assert!(matches!(
            build_root_system(Family::B, 2, Multiplicities::indefinite_orthogonal(0)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn lookups() {
        let s = lookup("SL(4,R)").unwrap();
        assert_eq!((s.dim_x, s.dim_k, s.dim_m, s.rank), (9, 6, 0, 3));
        let s = lookup("Sp(4,ℝ)").unwrap();
        assert_eq!((s.dim_x, s.dim_k, s.dim_m, s.rank), (6, 4, 0, 2));
        let s = lookup("SU(2,2)").unwrap();
        assert_eq!((s.dim_x, s.dim_k, s.dim_m, s.rank), (8, 7, 1, 2));
        assert!(lookup("SL(3,R)").unwrap().excluded);
        assert!(matches!(lookup("G2"), Err(Error::UnknownSpace(_))));
    }

    #[test]
    fn evaluate_examples() {
        let a = build_root_system(Family::A, 3, Multiplicities::SPLIT).unwrap();
        let find = |sys: &RootSystem, l: &str| sys.positives.iter().find(|r| r.label() == l).unwrap().clone();
        let v = qv(&[1, 1, -1, -1]);
        assert_eq!(evaluate_root(&find(&a, "e1-e2"), &v).unwrap(), q(0));
        assert_eq!(evaluate_root(&find(&a, "e1-e4"), &v).unwrap(), q(2));
        let c = build_root_system(Family::C, 2, Multiplicities::SPLIT).unwrap();
        let v = vec![Q::new(3, 2), q(0)];
        assert_eq!(evaluate_root(&find(&c, "2e1"), &v).unwrap(), q(3));
        assert!(matches!(
            evaluate_root(&find(&c, "2e1"), &qv(&[1, 2, 3])),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn catalogue_is_self_consistent() {
        let cat = catalogue();
        for s in &cat {
            assert!(s.identity_violations().is_empty(), "{:?}", s.identity_violations());
        }
        assert_eq!(cat.iter().filter(|s| s.excluded).count(), 1);
        let mut names: Vec<_> = cat.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cat.len());
    }

    #[test]
    fn simple_roots_have_rank_many() {
        for s in catalogue() {
            let simple = s.rootsys.simple_roots();
            assert_eq!(simple.len(), s.rank);
            assert_eq!(crate::rational::rank(&simple), s.rank, "{}", s.name);
        }
    }
}
