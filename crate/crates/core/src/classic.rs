//! Classical integer magic squares: Siamese (odd), complement pattern
//! (doubly even) and LUX (singly even).

use crate::error::{Error, Result};

/// An `n × n` integer square, row-major. Entries are `base..base + n²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSquare {
    side: usize,
    base: u64,
    cells: Vec<u64>,
}

impl IntSquare {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * self.side + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.cells.chunks(self.side).map(<[u64]>::to_vec).collect()
    }

    /// The common line sum, if entries are exactly `base..base+n²` and all
    /// rows, columns and both diagonals agree.
    pub fn magic_constant(&self) -> Option<u64> {
        let n = self.side;
        let mut seen = vec![false; n * n];
        for &v in &self.cells {
            let k = v.checked_sub(self.base)? as usize;
            if k >= n * n || std::mem::replace(&mut seen[k], true) {
                return None;
            }
        }
        let target: u64 = (0..n).map(|i| self.get(i, i)).sum();
        let anti: u64 = (0..n).map(|i| self.get(i, n - 1 - i)).sum();
        let rows_ok = (0..n).all(|i| (0..n).map(|j| self.get(i, j)).sum::<u64>() == target);
        let cols_ok = (0..n).all(|j| (0..n).map(|i| self.get(i, j)).sum::<u64>() == target);
        (anti == target && rows_ok && cols_ok).then_some(target)
    }

    pub fn to_text(&self) -> String {
        let width = (self.base + (self.side * self.side) as u64).to_string().len();
        self.rows()
            .iter()
            .map(|r| r.iter().map(|v| format!("{v:>width$}")).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A magic square on `1..=n²` for `n ≥ 3`.
pub fn integer_ms(n: usize) -> Result<IntSquare> {
    if n <= 2 {
        return Err(Error::NonExistence {
            what: "integer magic square",
            reason: format!("side {n} admits no magic square; sides above 2 do"),
        });
    }
    let cells = match n % 4 {
        0 => doubly_even(n),
        2 => lux(n),
        _ => siamese(n),
    };
    Ok(IntSquare { side: n, base: 1, cells })
}

/// Like [`integer_ms`], but returns the trivial `[1]` for `n = 1`.
pub fn integer_ms_or_trivial(n: usize) -> Result<IntSquare> {
    if n == 1 {
        return Ok(IntSquare { side: 1, base: 1, cells: vec![1] });
    }
    integer_ms(n)
}

/// Subtracts one from every entry, giving entries `0..n²` and line sums
/// `n(n²−1)/2`.
pub fn zero_based(sq: &IntSquare) -> IntSquare {
    IntSquare { side: sq.side, base: sq.base - 1, cells: sq.cells.iter().map(|v| v - 1).collect() }
}

fn siamese(n: usize) -> Vec<u64> {
    let mut cells = vec![0u64; n * n];
    let (mut i, mut j) = (0, n / 2);
    for v in 1..=(n * n) as u64 {
        cells[i * n + j] = v;
        let (ui, rj) = ((i + n - 1) % n, (j + 1) % n);
        if cells[ui * n + rj] == 0 {
            (i, j) = (ui, rj);
        } else {
            i = (i + 1) % n;
        }
    }
    cells
}

fn doubly_even(n: usize) -> Vec<u64> {
    let total = (n * n) as u64;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = (i * n + j) as u64 + 1;
            let (a, b) = (i % 4, j % 4);
            cells.push(if a == b || a + b == 3 { total + 1 - v } else { v });
        }
    }
    cells
}

fn lux(n: usize) -> Vec<u64> {
    const L: [[u64; 2]; 2] = [[4, 1], [2, 3]];
    const U: [[u64; 2]; 2] = [[1, 4], [2, 3]];
    const X: [[u64; 2]; 2] = [[1, 4], [3, 2]];
    let k = n / 2;
    let m = (n - 2) / 4;
    let inner = siamese(k);
    let mut letters: Vec<Vec<[[u64; 2]; 2]>> = (0..k)
        .map(|r| {
            let p = if r <= m {
                L
            } else if r == m + 1 {
                U
            } else {
                X
            };
            vec![p; k]
        })
        .collect();
    let mid = k / 2;
    let tmp = letters[m][mid];
    letters[m][mid] = letters[m + 1][mid];
    letters[m + 1][mid] = tmp;

    let mut cells = vec![0u64; n * n];
    for bi in 0..k {
        for bj in 0..k {
            let base = 4 * (inner[bi * k + bj] - 1);
            let p = letters[bi][bj];
            for di in 0..2 {
                for dj in 0..2 {
                    cells[(2 * bi + di) * n + 2 * bj + dj] = base + p[di][dj];
                }
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_constants() {
        assert_eq!(integer_ms(3).unwrap().rows(), vec![vec![8, 1, 6], vec![3, 5, 7], vec![4, 9, 2]]);
        assert_eq!(integer_ms(3).unwrap().magic_constant(), Some(15));
        assert_eq!(integer_ms(4).unwrap().magic_constant(), Some(34));
        assert_eq!(integer_ms(6).unwrap().magic_constant(), Some(111));
        assert_eq!(zero_based(&integer_ms(3).unwrap()).magic_constant(), Some(12));
        assert_eq!(zero_based(&integer_ms(4).unwrap()).magic_constant(), Some(30));
        assert_eq!(zero_based(&integer_ms(5).unwrap()).magic_constant(), Some(60));
    }

    #[test]
    fn sides_below_three() {
        assert!(matches!(integer_ms(2), Err(Error::NonExistence { .. })));
        assert!(integer_ms(1).is_err());
        assert_eq!(integer_ms_or_trivial(1).unwrap().cells(), &[1]);
    }

    #[test]
    fn all_methods_up_to_fifty() {
        for n in 3..=50u64 {
            let sq = integer_ms(n as usize).unwrap();
            assert_eq!(sq.magic_constant(), Some(n * (n * n + 1) / 2), "n = {n}");
            assert_eq!(zero_based(&sq).magic_constant(), Some(n * (n * n - 1) / 2), "n = {n}");
        }
    }
}
