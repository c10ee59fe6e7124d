//! Small exact linear-algebra kernel over `Rational64`.
//!
//! Everything here works on dense row vectors of length at most ~10, so plain
//! Gauss-Jordan elimination with fraction reduction after each step is enough.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = Rational64;
pub type RatVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qv(entries: &[i64]) -> RatVec {
    entries.iter().map(|&x| q(x)).collect()
}

/// Parses `"3"`, `"-3/2"` or `" 7 "` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((num, den)) => {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Q::new(num, den))
        }
        None => s.parse::<i64>().map(q).map_err(|_| bad()),
    }
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Row-reduces `rows` in place and returns the rank.
fn row_reduce(rows: &mut [RatVec]) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Exact rank by fraction-free (Bareiss) elimination on integer-scaled rows.
pub fn rank(rows: &[RatVec]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| BigInt::from(*x.numer()) * (l / x.denom())).collect()
        })
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..width {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            for c in col + 1..width {
                m[r][c] = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// True iff `v` lies in the row span of `basis`.
pub fn in_span(v: &[Q], basis: &[RatVec]) -> bool {
    if basis.is_empty() {
        return is_zero_vec(v);
    }
    let r = rank(basis);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    rank(&ext) == r
}

/// Solves the square system `a x = b`; `None` if `a` is singular.
pub fn solve(a: &[RatVec], b: &[Q]) -> Option<RatVec> {
    let n = a.len();
    let mut aug: Vec<RatVec> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    if row_reduce(&mut aug) < n {
        return None;
    }
    // Reduced row echelon with a full-rank square block: the solution is the last column.
    (0..n).map(|i| (aug[i][i] == Q::one()).then_some(aug[i][n])).collect()
}

/// Smallest positive integer multiple of `v` (entries coprime), keeping the sign pattern.
pub fn primitive_integer(v: &[Q]) -> RatVec {
    let lcm = v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = v.iter().map(|x| (x * q(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    ints.iter().map(|x| q(x / g.abs())).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn max_abs(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_q("-3").unwrap(), q(-3));
        assert_eq!(parse_q(" 3/2 ").unwrap(), Q::new(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(format_q(&Q::new(-6, 4)), "-3/2");
    }

    #[test]
    fn rank_and_span() {
        let rows = vec![qv(&[1, 1, 0]), qv(&[0, 1, 1]), qv(&[1, 2, 1])];
        assert_eq!(rank(&rows), 2);
        assert!(in_span(&qv(&[2, 3, 1]), &rows[..2]));
        assert!(!in_span(&qv(&[0, 0, 1]), &rows[..2]));
        assert!(in_span(&qv(&[0, 0, 0]), &[]));
    }

    #[test]
    fn solves_square_systems() {
        let a = vec![qv(&[2, 1]), qv(&[1, -1])];
        let x = solve(&a, &qv(&[3, 0])).unwrap();
        assert_eq!(x, qv(&[1, 1]));
        assert!(solve(&[qv(&[1, 1]), qv(&[2, 2])], &qv(&[1, 2])).is_none());
    }

    #[test]
    fn primitive_integer_clears_denominators() {
        let v = vec![Q::new(1, 4), Q::new(1, 4), Q::new(1, 4), Q::new(-3, 4)];
        assert_eq!(primitive_integer(&v), qv(&[1, 1, 1, -3]));
    }
}
