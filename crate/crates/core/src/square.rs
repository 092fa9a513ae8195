//! Square arrays over a group, the exact verifier, translations and
//! design-block export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::solve_linear_congruence;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Isomorphism};

/// An `n × n` array of elements of a group, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SquareRepr", into = "SquareRepr")]
pub struct Square {
    spec: GroupSpec,
    side: usize,
    cells: Vec<GroupElement>,
}

#[derive(Serialize, Deserialize)]
struct SquareRepr {
    group: GroupSpec,
    n: usize,
    cells: Vec<Vec<GroupElement>>,
}

impl TryFrom<SquareRepr> for Square {
    type Error = Error;
    fn try_from(r: SquareRepr) -> Result<Self> {
        if r.cells.len() != r.n {
            return Err(Error::MalformedInput(format!("expected {} rows, got {}", r.n, r.cells.len())));
        }
        Square::new(r.group, r.cells)
    }
}

impl From<Square> for SquareRepr {
    fn from(s: Square) -> Self {
        let cells = s.rows().map(|r| r.to_vec()).collect();
        SquareRepr { group: s.spec, n: s.side, cells }
    }
}

/// Line sums of a square and the verdicts derived from them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsReport {
    pub row_sums: Vec<GroupElement>,
    pub col_sums: Vec<GroupElement>,
    pub diag_sum: GroupElement,
    pub antidiag_sum: GroupElement,
    /// Every group element appears exactly once.
    pub distinct: bool,
    pub is_magic: bool,
    pub constant: Option<GroupElement>,
    pub is_zero_sum: bool,
}

/// Outcome of solving `n·x = −μ` for a magic square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroTranslation {
    /// The smallest solution `x` and the translated zero-sum square.
    Shifted { shift: GroupElement, square: Square },
    /// `n·x ≡ −μ_i` has no solution modulo the modulus at `coordinate`.
    Unsolvable { coordinate: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Row,
    Column,
    Diagonal,
    Antidiagonal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: LineKind,
    pub index: usize,
    pub elements: Vec<GroupElement>,
}

/// The `2n + 2` zero-sum lines of a zero-sum square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignBlocks {
    pub group: GroupSpec,
    pub blocks: Vec<Block>,
}

impl Square {
    /// Builds a square from rows, checking shape and element membership.
    pub fn new(spec: GroupSpec, rows: Vec<Vec<GroupElement>>) -> Result<Self> {
        let side = rows.len();
        let mut cells = Vec::with_capacity(side * side);
        for row in rows {
            if row.len() != side {
                return Err(Error::MalformedInput(format!(
                    "row of length {} in a square of side {side}",
                    row.len()
                )));
            }
            cells.extend(row);
        }
        Self::from_cells(spec, side, cells)
    }

    pub fn from_cells(spec: GroupSpec, side: usize, cells: Vec<GroupElement>) -> Result<Self> {
        if cells.len() != side * side {
            return Err(Error::MalformedInput(format!(
                "{} cells cannot form a square of side {side}",
                cells.len()
            )));
        }
        for c in &cells {
            spec.check(c)?;
        }
        Ok(Square { spec, side, cells })
    }

    /// Trusted constructor for construction code whose cells are reduced by
    /// construction.
    pub(crate) fn from_cells_unchecked(spec: GroupSpec, side: usize, cells: Vec<GroupElement>) -> Self {
        debug_assert_eq!(cells.len(), side * side);
        debug_assert!(cells.iter().all(|c| spec.contains(c)));
        Square { spec, side, cells }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> &[GroupElement] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupElement {
        &self.cells[i * self.side + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[GroupElement]> + '_ {
        self.cells.chunks(self.side.max(1)).take(self.side)
    }

    fn lines(&self) -> Vec<(LineKind, usize, Vec<usize>)> {
        let n = self.side;
        let mut out = Vec::with_capacity(2 * n + 2);
        for i in 0..n {
            out.push((LineKind::Row, i, (0..n).map(|j| i * n + j).collect()));
        }
        for j in 0..n {
            out.push((LineKind::Column, j, (0..n).map(|i| i * n + j).collect()));
        }
        out.push((LineKind::Diagonal, 0, (0..n).map(|i| i * n + i).collect()));
        out.push((LineKind::Antidiagonal, 0, (0..n).map(|i| i * n + (n - 1 - i)).collect()));
        out
    }

    /// Exact line sums and the magic / zero-sum verdicts.
    pub fn verify(&self) -> Result<SumsReport> {
        let n = self.side;
        if self.spec.order() != (n as u64) * (n as u64) {
            return Err(Error::OrderSideMismatch { order: self.spec.order(), side: n });
        }
        let mut seen = vec![false; self.spec.order() as usize];
        let mut distinct = true;
        for c in &self.cells {
            let idx = self.spec.index_of(c) as usize;
            distinct &= !std::mem::replace(&mut seen[idx], true);
        }
        let sum_of = |idx: &[usize]| -> GroupElement {
            let mut acc = self.spec.identity();
            for &k in idx {
                self.spec.add_assign(&mut acc, &self.cells[k]);
            }
            acc
        };
        let mut row_sums = Vec::with_capacity(n);
        let mut col_sums = Vec::with_capacity(n);
        let mut diag_sum = self.spec.identity();
        let mut antidiag_sum = self.spec.identity();
        for (kind, _, idx) in self.lines() {
            let s = sum_of(&idx);
            match kind {
                LineKind::Row => row_sums.push(s),
                LineKind::Column => col_sums.push(s),
                LineKind::Diagonal => diag_sum = s,
                LineKind::Antidiagonal => antidiag_sum = s,
            }
        }
        let all_equal = row_sums
            .iter()
            .chain(&col_sums)
            .chain([&diag_sum, &antidiag_sum])
            .all(|s| *s == diag_sum);
        let is_magic = distinct && all_equal;
        let constant = is_magic.then(|| diag_sum.clone());
        let is_zero_sum = constant.as_ref().is_some_and(|c| c.is_zero());
        Ok(SumsReport { row_sums, col_sums, diag_sum, antidiag_sum, distinct, is_magic, constant, is_zero_sum })
    }

    /// Magic constant, if the square is magic.
    pub fn magic_constant(&self) -> Option<GroupElement> {
        self.verify().ok().and_then(|r| r.constant)
    }

    pub fn is_zero_sum(&self) -> bool {
        self.verify().map(|r| r.is_zero_sum).unwrap_or(false)
    }

    /// Adds `x` to every cell. A magic constant `μ` becomes `μ + n·x`.
    pub fn translate(&self, x: &GroupElement) -> Result<Square> {
        self.spec.check(x)?;
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let mut c = c.clone();
                self.spec.add_assign(&mut c, x);
                c
            })
            .collect();
        Ok(Square { spec: self.spec.clone(), side: self.side, cells })
    }

    /// Solves `n·x = −μ` coordinatewise, taking the smallest solution `x`.
    pub fn zero_translate(&self) -> Result<ZeroTranslation> {
        let mu = self.verify()?.constant.ok_or(Error::NotMagic)?;
        let neg = self.spec.neg(&mu)?;
        let n = self.side as u64;
        let mut shift = Vec::with_capacity(self.spec.rank());
        for (i, (&b, &m)) in neg.residues().iter().zip(self.spec.moduli()).enumerate() {
            match solve_linear_congruence(n, b, m) {
                Some(x) => shift.push(x),
                None => return Ok(ZeroTranslation::Unsolvable { coordinate: i }),
            }
        }
        let shift = GroupElement::new(shift);
        let square = self.translate(&shift)?;
        if !square.is_zero_sum() {
            return Err(Error::VerificationFailed("translated square is not zero-sum".into()));
        }
        Ok(ZeroTranslation::Shifted { shift, square })
    }

    /// Rows, columns and both diagonals as blocks of an additive design.
    pub fn export_blocks(&self) -> Result<DesignBlocks> {
        if !self.verify()?.is_zero_sum {
            return Err(Error::NotZeroSum);
        }
        let blocks = self
            .lines()
            .into_iter()
            .map(|(kind, index, idx)| Block {
                kind,
                index,
                elements: idx.iter().map(|&k| self.cells[k].clone()).collect(),
            })
            .collect();
        Ok(DesignBlocks { group: self.spec.clone(), blocks })
    }

    /// Transports every cell through `iso`.
    pub fn map_square(&self, iso: &Isomorphism) -> Result<Square> {
        if *iso.source() != self.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: iso.source().to_string(),
            });
        }
        let cells = self.cells.iter().map(|c| iso.apply(c)).collect::<Result<Vec<_>>>()?;
        Ok(Square { spec: iso.target().clone(), side: self.side, cells })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("squares always serialize")
    }

    pub fn from_json(text: &str) -> Result<Square> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    /// Figure-style text: a `group:` header then rows of `(a,b)` separated by `|`.
    pub fn to_text(&self) -> String {
        let width = self.cells.iter().map(|c| c.to_string().len()).max().unwrap_or(0);
        let mut out = format!("group: {}\n", self.spec);
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|c| format!("{:<width$}", c.to_string())).collect();
            let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Square> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::MalformedInput("empty square text".into()))?;
        let group = header
            .strip_prefix("group:")
            .ok_or_else(|| Error::MalformedInput("missing `group:` header".into()))?;
        let spec = GroupSpec::parse(group)?;
        let rows = lines
            .map(|line| line.split('|').map(GroupElement::parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Square::new(spec, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9(rows: [[u64; 3]; 3]) -> Square {
        let spec = GroupSpec::cyclic(9).unwrap();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| GroupElement::new(vec![v])).collect())
            .collect();
        Square::new(spec, rows).unwrap()
    }

    #[test]
    fn verifies_small_cyclic_squares() {
        let a = z9([[7, 0, 5], [2, 4, 6], [3, 8, 1]]);
        let r = a.verify().unwrap();
        assert!(r.is_magic && !r.is_zero_sum);
        assert_eq!(r.constant, Some(GroupElement::new(vec![3])));
        let b = a.translate(&GroupElement::new(vec![2])).unwrap();
        assert_eq!(b, z9([[0, 2, 7], [4, 6, 8], [5, 1, 3]]));
        assert!(b.is_zero_sum());
    }

    #[test]
    fn zero_translate_picks_smallest() {
        let a = z9([[7, 0, 5], [2, 4, 6], [3, 8, 1]]);
        match a.zero_translate().unwrap() {
            ZeroTranslation::Shifted { shift, .. } => assert_eq!(shift, GroupElement::new(vec![2])),
            other => panic!("unexpected {other:?}"),
        }
        let bad = z9([[0, 1, 2], [3, 4, 5], [6, 7, 8]]);
        assert_eq!(bad.zero_translate(), Err(Error::NotMagic));
    }

    #[test]
    fn mismatched_order_is_an_error() {
        let spec = GroupSpec::cyclic(8).unwrap();
        let rows = vec![vec![GroupElement::new(vec![0]), GroupElement::new(vec![1])]; 2];
        let s = Square::new(spec, rows).unwrap();
        assert!(matches!(s.verify(), Err(Error::OrderSideMismatch { .. })));
    }

    #[test]
    fn duplicates_are_not_magic() {
        let spec = GroupSpec::cyclic(4).unwrap();
        let zero = GroupElement::new(vec![0]);
        let s = Square::new(spec, vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]]).unwrap();
        let r = s.verify().unwrap();
        assert!(!r.distinct && !r.is_magic && r.constant.is_none());
    }

    #[test]
    fn side_one_is_magic() {
        let s = Square::new(GroupSpec::trivial(), vec![vec![GroupElement::new(vec![])]]).unwrap();
        let r = s.verify().unwrap();
        assert!(r.is_magic && r.is_zero_sum);
    }

    #[test]
    fn text_and_json_round_trip() {
        let a = z9([[7, 0, 5], [2, 4, 6], [3, 8, 1]]);
        assert_eq!(Square::from_text(&a.to_text()).unwrap(), a);
        assert_eq!(Square::from_json(&a.to_json()).unwrap(), a);
        assert!(a.to_json().starts_with(r#"{"group":{"moduli":[9]},"n":3,"cells":[[[7],[0],[5]]"#));
        assert!(Square::from_json(r#"{"group":{"moduli":[9]},"n":2,"cells":[[[0]]]}"#).is_err());
    }

    #[test]
    fn blocks_need_zero_sum() {
        let a = z9([[7, 0, 5], [2, 4, 6], [3, 8, 1]]);
        assert_eq!(a.export_blocks(), Err(Error::NotZeroSum));
        let b = a.translate(&GroupElement::new(vec![2])).unwrap();
        let blocks = b.export_blocks().unwrap();
        assert_eq!(blocks.blocks.len(), 8);
        for blk in &blocks.blocks {
            assert!(b.spec().sum(&blk.elements).unwrap().is_zero());
        }
    }
}
