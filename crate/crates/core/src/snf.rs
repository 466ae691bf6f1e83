//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Nonzero invariant factors (positive, each dividing the next) of an integer matrix.
pub fn invariant_factors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let f = a[i][t].div_floor(&a[t][t]);
                    for j in t..cols {
                        let d = &f * &a[t][j];
                        a[i][j] -= d;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let f = a[t][j].div_floor(&a[t][t]);
                    for r in a.iter_mut().skip(t) {
                        let d = &f * &r[t];
                        r[j] -= d;
                    }
                    if !a[t][j].is_zero() {
                        for r in a.iter_mut() {
                            r.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank and torsion (factors at least 2) of the cokernel of `m: Z^cols -> Z^rows`
/// read row-wise as relations on `cols` generators.
pub fn cokernel(m: &[Vec<BigInt>], cols: usize) -> (usize, Vec<BigInt>) {
    let d = invariant_factors(m);
    let rank = cols - d.len();
    let torsion = d.into_iter().filter(|v| !v.is_one()).collect();
    (rank, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn small_factors() {
        assert_eq!(invariant_factors(&mat(&[&[2, -3]])), vec![BigInt::from(1)]);
        assert_eq!(invariant_factors(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])), vec![2.into(), 6.into(), 12.into()]);
        assert_eq!(cokernel(&mat(&[&[5]]), 1), (0, vec![BigInt::from(5)]));
        assert_eq!(cokernel(&[], 3), (3, vec![]));
        assert_eq!(cokernel(&mat(&[&[1, 1, -2]]), 3).0, 2);
        assert_eq!(cokernel(&mat(&[&[1, 1, -2], &[2, 0, -1]]), 3), (1, vec![]));
        assert_eq!(cokernel(&mat(&[&[0, 0], &[0, 0]]), 2), (2, vec![]));
    }

    #[test]
    fn torsion_divisibility_is_restored() {
        // diag(2, 3) has invariant factors (1, 6).
        assert_eq!(invariant_factors(&mat(&[&[2, 0], &[0, 3]])), vec![1.into(), 6.into()]);
        assert_eq!(invariant_factors(&mat(&[&[4, 0], &[0, 6]])), vec![2.into(), 12.into()]);
    }
}
