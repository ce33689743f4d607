//! Exact rational rank computation, used as an independent oracle for the
//! numerical rank decisions.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational value of a finite float.
pub fn to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for i in rank + 1..rows {
            let factor = m[i][col].clone();
            for j in col + 1..cols {
                let v = &pivot * &m[i][j] - &factor * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix; each row is scaled by the lcm of its
/// denominators before elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let ints = rows
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect();
    integer_rank(ints)
}
