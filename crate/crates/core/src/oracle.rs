//! Brute-force search over cell assignments, independent of the
//! constructions: ground truth for small sides and a probe of which magic
//! constants occur.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::build::{build_zms, figures, BuildOutcome};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::square::Square;

/// Node budget used when none is given.
pub const DEFAULT_BUDGET: u64 = 50_000_000;
/// Squares kept in a report when no cap is given.
pub const DEFAULT_CAP: usize = 1000;
const MAX_SIDE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Only squares with this constant. `None` accepts every magic square.
    pub filter: Option<GroupElement>,
    /// Cell placements allowed before giving up.
    pub budget: u64,
    /// Squares stored in the report; counting continues past the cap.
    pub cap: usize,
    /// Stop once this many squares are found.
    pub stop_after: Option<u64>,
    /// Put the identity in cell `(0,0)`; counts then cover only such squares.
    pub fix_first_cell: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { filter: None, budget: DEFAULT_BUDGET, cap: DEFAULT_CAP, stop_after: None, fix_first_cell: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub group: GroupSpec,
    pub side: usize,
    pub filter: Option<GroupElement>,
    pub first_cell_fixed: bool,
    /// Found squares in lexicographic order of their cell indices, up to the cap.
    pub squares: Vec<Square>,
    /// Exact when `exhaustive`.
    pub count: u64,
    /// The whole space was covered.
    pub exhaustive: bool,
    /// The filter was refuted without search: `n·μ` differs from the sum of all elements.
    pub refuted_by_sum: bool,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

impl PartialEq for SearchReport {
    /// Ignores wall time.
    fn eq(&self, o: &Self) -> bool {
        (&self.group, self.side, &self.filter, self.first_cell_fixed, &self.squares, self.count, self.exhaustive, self.refuted_by_sum, self.nodes)
            == (&o.group, o.side, &o.filter, o.first_cell_fixed, &o.squares, o.count, o.exhaustive, o.refuted_by_sum, o.nodes)
    }
}

struct Dfs<'a> {
    n: usize,
    size: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
    used: Vec<bool>,
    cells: Vec<u32>,
    rows: Vec<u32>,
    cols: Vec<u32>,
    diag: u32,
    anti: u32,
    mu: Option<u32>,
    opts: &'a SearchOptions,
    nodes: u64,
    count: u64,
    found: Vec<Vec<u32>>,
    aborted: bool,
    stopped: bool,
}

impl Dfs<'_> {
    fn sum(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.size + b as usize]
    }

    fn run(&mut self, pos: usize) {
        let n = self.n;
        if pos == n * n {
            self.count += 1;
            if self.found.len() < self.opts.cap {
                self.found.push(self.cells.clone());
            }
            if self.opts.stop_after.is_some_and(|s| self.count >= s) {
                self.stopped = true;
            }
            return;
        }
        let (i, j) = (pos / n, pos % n);
        let forced = match self.mu {
            Some(mu) if j == n - 1 => Some(self.sum(mu, self.neg[self.rows[i] as usize])),
            Some(mu) if i == n - 1 => Some(self.sum(mu, self.neg[self.cols[j] as usize])),
            _ => None,
        };
        let candidates: Vec<u32> = match forced {
            Some(v) => vec![v],
            None if pos == 0 && self.opts.fix_first_cell => vec![0],
            None => (0..self.size as u32).collect(),
        };
        for v in candidates {
            if self.used[v as usize] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.opts.budget {
                self.aborted = true;
                return;
            }
            let (row, col) = (self.sum(self.rows[i], v), self.sum(self.cols[j], v));
            let diag = if i == j { self.sum(self.diag, v) } else { self.diag };
            let anti = if i + j == n - 1 { self.sum(self.anti, v) } else { self.anti };
            let saved_mu = self.mu;
            if j == n - 1 && self.mu.is_none() {
                self.mu = Some(row);
            }
            let mu = self.mu;
            let ok = (j < n - 1 || Some(row) == mu)
                && (i < n - 1 || Some(col) == mu)
                && (i < n - 1 || j < n - 1 || Some(diag) == mu)
                && (i < n - 1 || j > 0 || Some(anti) == mu);
            if ok {
                let (r0, c0, d0, a0) = (self.rows[i], self.cols[j], self.diag, self.anti);
                self.used[v as usize] = true;
                self.cells.push(v);
                (self.rows[i], self.cols[j], self.diag, self.anti) = (row, col, diag, anti);
                self.run(pos + 1);
                (self.rows[i], self.cols[j], self.diag, self.anti) = (r0, c0, d0, a0);
                self.cells.pop();
                self.used[v as usize] = false;
            }
            self.mu = saved_mu;
            if self.aborted || self.stopped {
                return;
            }
        }
    }
}

fn brute_sum(spec: &GroupSpec) -> Result<GroupElement> {
    let all: Vec<GroupElement> = spec.elements().collect();
    spec.sum(all.iter())
}

/// Backtracking over row-major cell assignments. A line is checked the
/// moment its last cell is placed, and once the constant is known the last
/// cell of each row and of each column is forced.
pub fn search(spec: &GroupSpec, n: usize, opts: &SearchOptions) -> Result<SearchReport> {
    if spec.order() != (n * n) as u64 {
        return Err(Error::OrderSideMismatch { order: spec.order(), side: n });
    }
    if n > MAX_SIDE {
        return Err(Error::Precondition(format!("search is limited to sides up to {MAX_SIDE}")));
    }
    let start = Instant::now();
    let mut report = SearchReport {
        group: spec.clone(),
        side: n,
        filter: opts.filter.clone(),
        first_cell_fixed: opts.fix_first_cell,
        squares: Vec::new(),
        count: 0,
        exhaustive: true,
        refuted_by_sum: false,
        nodes: 0,
        elapsed_ms: 0,
    };
    let target = match &opts.filter {
        Some(mu) => {
            spec.check(mu)?;
            if spec.scale(n as i64, mu)? != brute_sum(spec)? {
                report.refuted_by_sum = true;
                return Ok(report);
            }
            Some(spec.index_of(mu) as u32)
        }
        None => None,
    };
    let size = n * n;
    let els: Vec<GroupElement> = spec.elements().collect();
    let mut add = Vec::with_capacity(size * size);
    for a in &els {
        for b in &els {
            add.push(spec.index_of(&spec.add(a, b)?) as u32);
        }
    }
    let neg = els.iter().map(|a| spec.neg(a).map(|x| spec.index_of(&x) as u32)).collect::<Result<Vec<_>>>()?;
    let mut dfs = Dfs {
        n,
        size,
        add,
        neg,
        used: vec![false; size],
        cells: Vec::with_capacity(size),
        rows: vec![0; n],
        cols: vec![0; n],
        diag: 0,
        anti: 0,
        mu: target,
        opts,
        nodes: 0,
        count: 0,
        found: Vec::new(),
        aborted: false,
        stopped: false,
    };
    dfs.run(0);
    report.squares = dfs
        .found
        .iter()
        .map(|cells| Square::from_cells(spec.clone(), n, cells.iter().map(|&c| els[c as usize].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    for s in &report.squares {
        let mu = s.verify()?.constant.ok_or_else(|| Error::VerificationFailed("search produced a non-magic square".into()))?;
        if opts.filter.as_ref().is_some_and(|f| *f != mu) {
            return Err(Error::VerificationFailed("search produced a square with the wrong constant".into()));
        }
    }
    report.count = dfs.count;
    report.nodes = dfs.nodes;
    report.exhaustive = !dfs.aborted && !dfs.stopped;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// [`search`] with default options and an optional constant filter.
pub fn exhaustive_search(spec: &GroupSpec, n: usize, filter: Option<GroupElement>, budget: u64) -> Result<SearchReport> {
    search(spec, n, &SearchOptions { filter, budget, ..SearchOptions::default() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// From the builder or a stored square.
    Constructed,
    /// Adding a constant to every cell of another witness.
    Translated,
    /// Found by the oracle.
    Searched,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub mu: GroupElement,
    pub source: Provenance,
    pub witness: Square,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub group: GroupSpec,
    pub side: usize,
    /// Achieved constants in element order, each with a witness.
    pub achieved: Vec<SpectrumEntry>,
    /// Constants proven absent, by the element-sum test or exhaustive search.
    pub excluded: Vec<GroupElement>,
    /// Constants whose search ran out of budget.
    pub unresolved: Vec<GroupElement>,
    /// Every constant is either achieved or excluded.
    pub exhaustive: bool,
    /// `μ₀ + n·Γ` for the first achieved `μ₀`.
    pub coset_lower_bound: Vec<GroupElement>,
    pub nodes: u64,
}

impl SpectrumReport {
    /// Every witness verifies with its constant, and the achieved set
    /// contains the coset bound.
    pub fn check(&self) -> Result<()> {
        for e in &self.achieved {
            if e.witness.spec() != &self.group || e.witness.magic_constant().as_ref() != Some(&e.mu) {
                return Err(Error::VerificationFailed(format!("witness for {} does not verify", e.mu)));
            }
        }
        if let Some(missing) = self.coset_lower_bound.iter().find(|c| !self.achieved.iter().any(|e| &e.mu == *c)) {
            return Err(Error::VerificationFailed(format!("coset element {missing} has no witness")));
        }
        Ok(())
    }

    pub fn constants(&self) -> Vec<GroupElement> {
        self.achieved.iter().map(|e| e.mu.clone()).collect()
    }
}

fn close_under_translation(spec: &GroupSpec, n: usize, achieved: &mut BTreeMap<u64, SpectrumEntry>) -> Result<()> {
    let seeds: Vec<SpectrumEntry> = achieved.values().cloned().collect();
    for e in seeds {
        for x in spec.elements() {
            let mu = spec.add(&e.mu, &spec.scale(n as i64, &x)?)?;
            if let std::collections::btree_map::Entry::Vacant(slot) = achieved.entry(spec.index_of(&mu)) {
                let witness = e.witness.translate(&x)?;
                slot.insert(SpectrumEntry { mu, source: Provenance::Translated, witness });
            }
        }
    }
    Ok(())
}

/// Which magic constants occur for side `n`: seeds from the builder and
/// stored squares, closes under translation, then searches each remaining
/// constant with `budget` nodes.
pub fn spectrum(spec: &GroupSpec, n: usize, budget: u64) -> Result<SpectrumReport> {
    if spec.order() != (n * n) as u64 {
        return Err(Error::OrderSideMismatch { order: spec.order(), side: n });
    }
    let mut achieved: BTreeMap<u64, SpectrumEntry> = BTreeMap::new();
    let mut seed = |sq: Square| -> Result<()> {
        let mu = sq.verify()?.constant.ok_or(Error::NotMagic)?;
        achieved.entry(spec.index_of(&mu)).or_insert(SpectrumEntry { mu, source: Provenance::Constructed, witness: sq });
        Ok(())
    };
    if n > 2 {
        if let BuildOutcome::Built { square, .. } = build_zms(spec)? {
            seed(square)?;
        }
    }
    for f in figures::for_group(spec) {
        seed(f.square)?;
    }
    let first = achieved.values().next().map(|e| e.mu.clone());
    close_under_translation(spec, n, &mut achieved)?;
    let (mut excluded, mut unresolved, mut nodes) = (Vec::new(), Vec::new(), 0);
    for mu in spec.elements() {
        if achieved.contains_key(&spec.index_of(&mu)) {
            continue;
        }
        let opts = SearchOptions { filter: Some(mu.clone()), budget, cap: 1, stop_after: Some(1), fix_first_cell: false };
        let r = search(spec, n, &opts)?;
        nodes += r.nodes;
        if let Some(sq) = r.squares.into_iter().next() {
            achieved.insert(spec.index_of(&mu), SpectrumEntry { mu, source: Provenance::Searched, witness: sq });
            close_under_translation(spec, n, &mut achieved)?;
        } else if r.exhaustive {
            excluded.push(mu);
        } else {
            unresolved.push(mu);
        }
    }
    let first = first.or_else(|| achieved.values().next().map(|e| e.mu.clone()));
    let coset_lower_bound = match first {
        Some(mu0) => {
            let mut c: BTreeMap<u64, GroupElement> = BTreeMap::new();
            for x in spec.elements() {
                let v = spec.add(&mu0, &spec.scale(n as i64, &x)?)?;
                c.insert(spec.index_of(&v), v);
            }
            c.into_values().collect()
        }
        None => Vec::new(),
    };
    let report = SpectrumReport {
        group: spec.clone(),
        side: n,
        achieved: achieved.into_values().collect(),
        exhaustive: unresolved.is_empty(),
        excluded,
        unresolved,
        coset_lower_bound,
        nodes,
    };
    report.check()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    fn el(v: &[u64]) -> GroupElement {
        GroupElement::new(v.to_vec())
    }

    #[test]
    fn side_two_has_no_magic_squares() {
        for s in ["Z4", "Z2xZ2"] {
            let r = exhaustive_search(&g(s), 2, None, DEFAULT_BUDGET).unwrap();
            assert!(r.exhaustive && r.count == 0, "{s}");
        }
    }

    #[test]
    fn sum_precheck_short_circuits() {
        let r = exhaustive_search(&g("Z16"), 4, Some(el(&[0])), 1).unwrap();
        assert!(r.refuted_by_sum && r.exhaustive && r.count == 0 && r.nodes == 0);
    }

    #[test]
    fn side_three_counts() {
        let z9 = g("Z9");
        for mu in [0, 3, 6] {
            assert_eq!(exhaustive_search(&z9, 3, Some(el(&[mu])), DEFAULT_BUDGET).unwrap().count, 72);
        }
        assert_eq!(exhaustive_search(&z9, 3, Some(el(&[1])), DEFAULT_BUDGET).unwrap().count, 0);
        let all = exhaustive_search(&g("Z3xZ3"), 3, None, DEFAULT_BUDGET).unwrap();
        assert!(all.exhaustive);
        assert_eq!(all.count, 432);
        assert!(all.squares.iter().all(Square::is_zero_sum));
    }

    #[test]
    fn fixing_the_first_cell() {
        let opts = SearchOptions { filter: Some(el(&[0])), fix_first_cell: true, ..SearchOptions::default() };
        let r = search(&g("Z9"), 3, &opts).unwrap();
        assert!(r.first_cell_fixed && r.count > 0 && r.squares.iter().all(|s| s.get(0, 0).is_zero()));
    }

    #[test]
    fn budget_cuts_search() {
        let r = exhaustive_search(&g("Z9"), 3, None, 10).unwrap();
        assert!(!r.exhaustive && r.nodes <= 11);
        assert_eq!(r, exhaustive_search(&g("Z9"), 3, None, 10).unwrap());
    }

    #[test]
    fn spectra_at_side_three() {
        let r = spectrum(&g("Z9"), 3, DEFAULT_BUDGET).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.constants(), vec![el(&[0]), el(&[3]), el(&[6])]);
        assert_eq!(r.coset_lower_bound, vec![el(&[0]), el(&[3]), el(&[6])]);
        let r = spectrum(&g("Z3xZ3"), 3, DEFAULT_BUDGET).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.constants(), vec![el(&[0, 0])]);
    }
}
