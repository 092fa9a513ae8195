//! Kotzig arrays, complete mappings and zero-sum partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Isomorphism};

/// Node budget for the backtracking searches in this module.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A `j × |Γ|` array whose rows are permutations of `Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KotzigArray {
    pub group: GroupSpec,
    pub rows: Vec<Vec<GroupElement>>,
    /// When set, each row splits into consecutive zero-sum groups of this size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_size: Option<usize>,
}

impl KotzigArray {
    pub fn column_sums(&self) -> Vec<GroupElement> {
        let k = self.group.order() as usize;
        (0..k)
            .map(|c| {
                let mut acc = self.group.identity();
                for r in &self.rows {
                    self.group.add_assign(&mut acc, &r[c]);
                }
                acc
            })
            .collect()
    }

    fn rows_are_permutations(&self) -> bool {
        let k = self.group.order() as usize;
        self.rows.iter().all(|r| {
            let mut seen = vec![false; k];
            r.len() == k
                && r.iter().all(|e| {
                    self.group.contains(e) && !std::mem::replace(&mut seen[self.group.index_of(e) as usize], true)
                })
        })
    }

    /// Rows are permutations and all column sums agree.
    pub fn is_kotzig(&self) -> bool {
        let sums = self.column_sums();
        self.rows_are_permutations() && sums.windows(2).all(|w| w[0] == w[1])
    }

    /// Full invariant check: permutation rows, zero column sums, zero-sum groups.
    pub fn check(&self) -> Result<()> {
        if !self.rows_are_permutations() {
            return Err(Error::VerificationFailed("Kotzig row is not a permutation".into()));
        }
        if !self.column_sums().iter().all(GroupElement::is_zero) {
            return Err(Error::VerificationFailed("Kotzig column sum is not zero".into()));
        }
        if let Some(g) = self.group_size {
            let k = self.group.order() as usize;
            if g == 0 || k % g != 0 {
                return Err(Error::VerificationFailed(format!("group size {g} does not divide {k}")));
            }
            for r in &self.rows {
                for chunk in r.chunks(g) {
                    if !self.group.sum(chunk)?.is_zero() {
                        return Err(Error::VerificationFailed("Kotzig row group is not zero-sum".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Subtracts each row's first entry from the whole row. The first column
    /// becomes zero, so equal column sums become zero column sums.
    pub fn normalize(&self) -> KotzigArray {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let shift = self.group.neg(&r[0]).expect("row entries belong to the group");
                r.iter()
                    .map(|e| {
                        let mut e = e.clone();
                        self.group.add_assign(&mut e, &shift);
                        e
                    })
                    .collect()
            })
            .collect();
        KotzigArray { group: self.group.clone(), rows, group_size: None }
    }
}

/// A permutation `σ` of `Γ` with `x ↦ x + σ(x)` also a permutation.
/// `images[i]` is `σ` of the `i`-th element in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompleteMapping {
    pub group: GroupSpec,
    pub images: Vec<GroupElement>,
}

impl CompleteMapping {
    pub fn apply(&self, x: &GroupElement) -> &GroupElement {
        &self.images[self.group.index_of(x) as usize]
    }

    /// Both bijection conditions, checked exhaustively.
    pub fn is_valid(&self) -> bool {
        let k = self.group.order() as usize;
        if self.images.len() != k {
            return false;
        }
        let mut seen_sigma = vec![false; k];
        let mut seen_sum = vec![false; k];
        self.group.elements().zip(&self.images).all(|(x, s)| {
            if !self.group.contains(s) {
                return false;
            }
            let mut t = x;
            self.group.add_assign(&mut t, s);
            !std::mem::replace(&mut seen_sigma[self.group.index_of(s) as usize], true)
                && !std::mem::replace(&mut seen_sum[self.group.index_of(&t) as usize], true)
        })
    }
}

fn unique_involution_reason(spec: &GroupSpec) -> String {
    let iota = spec.classify().total_sum;
    format!("{spec} has the unique involution {iota}, and the sum of all its elements is {iota}")
}

/// Complete-mapping search restricted to `candidates[x]` (element indices).
/// Always branches on the unassigned `x` with the fewest feasible images,
/// trying images in the given order, so the result is deterministic.
fn search_complete_mapping(spec: &GroupSpec, candidates: &[Vec<usize>], budget: u64) -> Result<Option<Vec<usize>>> {
    let k = spec.order() as usize;
    let elems: Vec<GroupElement> = spec.elements().collect();
    let add: Vec<usize> = (0..k * k)
        .map(|ab| {
            let mut s = elems[ab / k].clone();
            spec.add_assign(&mut s, &elems[ab % k]);
            spec.index_of(&s) as usize
        })
        .collect();

    struct State<'a> {
        k: usize,
        add: &'a [usize],
        candidates: &'a [Vec<usize>],
        used: Vec<bool>,
        used_sum: Vec<bool>,
        sigma: Vec<usize>,
        nodes: u64,
        budget: u64,
    }

    fn feasible(st: &State<'_>, x: usize) -> usize {
        st.candidates[x].iter().filter(|&&y| !st.used[y] && !st.used_sum[st.add[x * st.k + y]]).count()
    }

    fn go(st: &mut State<'_>, remaining: usize) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        let mut best = None;
        for x in 0..st.k {
            if st.sigma[x] == usize::MAX {
                let f = feasible(st, x);
                if best.is_none_or(|(_, bf)| f < bf) {
                    best = Some((x, f));
                    if f == 0 {
                        return Ok(false);
                    }
                }
            }
        }
        let (x, _) = best.expect("an unassigned element remains");
        for ci in 0..st.candidates[x].len() {
            let y = st.candidates[x][ci];
            let s = st.add[x * st.k + y];
            if st.used[y] || st.used_sum[s] {
                continue;
            }
            st.nodes += 1;
            if st.nodes > st.budget {
                return Err(Error::BudgetExhausted { what: "complete mapping", budget: st.budget });
            }
            st.used[y] = true;
            st.used_sum[s] = true;
            st.sigma[x] = y;
            if go(st, remaining - 1)? {
                return Ok(true);
            }
            st.used[y] = false;
            st.used_sum[s] = false;
            st.sigma[x] = usize::MAX;
        }
        Ok(false)
    }

    let mut st = State {
        k,
        add: &add,
        candidates,
        used: vec![false; k],
        used_sum: vec![false; k],
        sigma: vec![usize::MAX; k],
        nodes: 0,
        budget,
    };
    Ok(go(&mut st, k)?.then_some(st.sigma))
}

/// A complete mapping of `Γ`, which exists exactly when `Γ` is in the class
/// of groups with zero element sum.
///
/// Odd order uses the identity. Otherwise the 2-primary part is searched
/// deterministically, the odd part keeps the identity, and the result is
/// carried back to the given presentation.
pub fn complete_mapping(spec: &GroupSpec) -> Result<CompleteMapping> {
    complete_mapping_with_budget(spec, DEFAULT_BUDGET)
}

pub fn complete_mapping_with_budget(spec: &GroupSpec, budget: u64) -> Result<CompleteMapping> {
    if !spec.in_g() {
        return Err(Error::NonExistence { what: "complete mapping", reason: unique_involution_reason(spec) });
    }
    if spec.order() % 2 == 1 {
        return Ok(CompleteMapping { group: spec.clone(), images: spec.elements().collect() });
    }
    let (primary, iso) = spec.primary_split();
    let two: Vec<usize> = (0..primary.rank()).filter(|&i| primary.moduli()[i] % 2 == 0).collect();
    let two_spec = primary.select(&two);
    let all: Vec<usize> = (0..two_spec.order() as usize).collect();
    let candidates = vec![all; two_spec.order() as usize];
    let sigma2 = search_complete_mapping(&two_spec, &candidates, budget)?.ok_or_else(|| {
        Error::VerificationFailed(format!("exhaustive search found no complete mapping of {two_spec}"))
    })?;
    let images = spec
        .elements()
        .map(|x| {
            let mut y = iso.apply(&x).expect("element of source").into_residues();
            let part: Vec<u64> = two.iter().map(|&i| y[i]).collect();
            let img = two_spec.element_at(sigma2[two_spec.index_of(&GroupElement::new(part)) as usize] as u64);
            for (&i, &r) in two.iter().zip(img.residues()) {
                y[i] = r;
            }
            iso.apply_inverse(&GroupElement::new(y)).expect("element of target")
        })
        .collect();
    let cm = CompleteMapping { group: spec.clone(), images };
    if !cm.is_valid() {
        return Err(Error::VerificationFailed("complete mapping failed its bijection checks".into()));
    }
    Ok(cm)
}

/// A `j`-row Kotzig array with zero column sums.
///
/// Even `j` uses pairs `(π, −π)`. Odd `j` starts with the block
/// `(x, σ(x), −(x + σ(x)))` for a complete mapping `σ`, then adds pairs.
pub fn build_kotzig(spec: &GroupSpec, j: usize) -> Result<KotzigArray> {
    if j < 2 {
        return Err(Error::Precondition(format!("a Kotzig array needs at least 2 rows, got {j}")));
    }
    let pi: Vec<GroupElement> = spec.elements().collect();
    let neg_pi: Vec<GroupElement> = pi.iter().map(|x| spec.neg(x).expect("member")).collect();
    let mut rows = Vec::with_capacity(j);
    if j % 2 == 1 {
        if !spec.in_g() {
            return Err(Error::NonExistence {
                what: "Kotzig array with an odd number of rows",
                reason: unique_involution_reason(spec),
            });
        }
        let sigma = complete_mapping(spec)?;
        let second: Vec<GroupElement> = pi.iter().map(|x| sigma.apply(x).clone()).collect();
        let third = pi
            .iter()
            .zip(&second)
            .map(|(x, s)| spec.neg(&spec.add(x, s).expect("member")).expect("member"))
            .collect();
        rows.push(pi.clone());
        rows.push(second);
        rows.push(third);
    }
    while rows.len() < j {
        rows.push(pi.clone());
        rows.push(neg_pi.clone());
    }
    let ka = KotzigArray { group: spec.clone(), rows, group_size: None };
    ka.check()?;
    Ok(ka)
}

/// Splits `Γ` into `parts` disjoint zero-sum subsets of `size` elements.
///
/// Each part starts with the smallest unused element and continues in
/// ascending order; its last element is forced to cancel the others.
pub fn zero_sum_partition(spec: &GroupSpec, parts: usize, size: usize) -> Result<Vec<Vec<GroupElement>>> {
    zero_sum_partition_with_budget(spec, parts, size, DEFAULT_BUDGET)
}

pub fn zero_sum_partition_with_budget(
    spec: &GroupSpec,
    parts: usize,
    size: usize,
    budget: u64,
) -> Result<Vec<Vec<GroupElement>>> {
    let k = spec.order() as usize;
    if parts.checked_mul(size) != Some(k) || size == 0 {
        return Err(Error::Precondition(format!("{parts} parts of size {size} cannot cover a group of order {k}")));
    }
    if !spec.in_g() {
        return Err(Error::NonExistence { what: "zero-sum partition", reason: unique_involution_reason(spec) });
    }
    let elems: Vec<GroupElement> = spec.elements().collect();
    let mut used = vec![false; k];
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(parts);
    let mut nodes = 0u64;

    struct Ctx<'a> {
        spec: &'a GroupSpec,
        elems: &'a [GroupElement],
        size: usize,
        parts: usize,
        budget: u64,
    }

    fn fill_part(
        ctx: &Ctx<'_>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        current: &mut Vec<usize>,
        sum: &GroupElement,
        nodes: &mut u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > ctx.budget {
            return Err(Error::BudgetExhausted { what: "zero-sum partition", budget: ctx.budget });
        }
        let last = *current.last().expect("part is seeded");
        if current.len() + 1 == ctx.size {
            let need = ctx.spec.index_of(&ctx.spec.neg(sum)?) as usize;
            if need > last && !used[need] {
                used[need] = true;
                current.push(need);
                out.push(current.clone());
                if next_part(ctx, used, out, nodes)? {
                    return Ok(true);
                }
                out.pop();
                current.pop();
                used[need] = false;
            }
            return Ok(false);
        }
        for y in last + 1..ctx.elems.len() {
            if used[y] {
                continue;
            }
            used[y] = true;
            current.push(y);
            let mut s = sum.clone();
            ctx.spec.add_assign(&mut s, &ctx.elems[y]);
            if fill_part(ctx, used, out, current, &s, nodes)? {
                return Ok(true);
            }
            current.pop();
            used[y] = false;
        }
        Ok(false)
    }

    fn next_part(ctx: &Ctx<'_>, used: &mut [bool], out: &mut Vec<Vec<usize>>, nodes: &mut u64) -> Result<bool> {
        if out.len() == ctx.parts {
            return Ok(true);
        }
        let first = used.iter().position(|&u| !u).expect("unused element remains");
        if ctx.size == 1 {
            if !ctx.elems[first].is_zero() {
                return Ok(false);
            }
            used[first] = true;
            out.push(vec![first]);
            let ok = next_part(ctx, used, out, nodes)?;
            if !ok {
                out.pop();
                used[first] = false;
            }
            return Ok(ok);
        }
        used[first] = true;
        let mut current = vec![first];
        let ok = fill_part(ctx, used, out, &mut current, &ctx.elems[first].clone(), nodes)?;
        if !ok {
            used[first] = false;
        }
        Ok(ok)
    }

    let ctx = Ctx { spec, elems: &elems, size, parts, budget };
    if !next_part(&ctx, &mut used, &mut out, &mut nodes)? {
        return Err(Error::NonExistence {
            what: "zero-sum partition",
            reason: format!("exhaustive search over {spec} into {parts} parts of size {size} found none"),
        });
    }
    Ok(out.into_iter().map(|p| p.into_iter().map(|i| elems[i].clone()).collect()).collect())
}

/// An automorphism `φ` with `1 + φ` also an automorphism, when every
/// 2-primary cyclic factor occurs at least twice. Automorphisms map zero-sum
/// parts to zero-sum parts, so `φ` is a complete mapping that keeps any
/// zero-sum partition intact.
///
/// Pairs of equal factors use `(x, y) ↦ (y, −x−y)`, a leftover triple uses
/// the companion matrix of `t³ + t + 1`, and odd factors use the identity.
fn orthomorphic_automorphism(spec: &GroupSpec) -> Option<CompleteMapping> {
    let (primary, iso) = spec.primary_split();
    let moduli = primary.moduli();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < moduli.len() && moduli[i] % 2 == 0 {
        let run: Vec<usize> = (i..moduli.len()).take_while(|&c| moduli[c] == moduli[i]).collect();
        if run.len() < 2 {
            return None;
        }
        let mut rest = &run[..];
        while rest.len() > 3 || rest.len() == 2 {
            blocks.push(rest[..2].to_vec());
            rest = &rest[2..];
        }
        if !rest.is_empty() {
            blocks.push(rest.to_vec());
        }
        i += run.len();
    }
    let images = spec
        .elements()
        .map(|x| {
            let y = iso.apply(&x).expect("element of source");
            let r: Vec<i128> = y.residues().iter().map(|&v| v as i128).collect();
            let mut out = r.clone();
            for b in &blocks {
                if let [p, q] = b[..] {
                    out[p] = r[q];
                    out[q] = -r[p] - r[q];
                } else if let [p, q, t] = b[..] {
                    out[p] = -r[t];
                    out[q] = r[p] - r[t];
                    out[t] = r[q];
                }
            }
            iso.apply_inverse(&primary.reduce(&out).expect("same rank")).expect("element of target")
        })
        .collect();
    let cm = CompleteMapping { group: spec.clone(), images };
    cm.is_valid().then_some(cm)
}

/// A complete mapping sending every part onto a part, as a permutation of
/// element indices. Part permutations are tried in lexicographic order,
/// starting with the identity.
fn part_mapping(spec: &GroupSpec, parts: &[Vec<GroupElement>]) -> Result<Vec<usize>> {
    const PER_LAYOUT_BUDGET: u64 = 200_000;
    const MAX_LAYOUTS: usize = 5040;
    let k = spec.order() as usize;
    let idx: Vec<Vec<usize>> =
        parts.iter().map(|p| p.iter().map(|e| spec.index_of(e) as usize).collect()).collect();
    let mut tau: Vec<usize> = (0..parts.len()).collect();
    for _ in 0..MAX_LAYOUTS {
        let mut candidates = vec![Vec::new(); k];
        for (i, part) in idx.iter().enumerate() {
            for &x in part {
                candidates[x] = idx[tau[i]].clone();
            }
        }
        match search_complete_mapping(spec, &candidates, PER_LAYOUT_BUDGET) {
            Ok(Some(sigma)) => return Ok(sigma),
            Ok(None) | Err(Error::BudgetExhausted { .. }) => {}
            Err(e) => return Err(e),
        }
        if !next_permutation(&mut tau) {
            break;
        }
    }
    Err(Error::Incomplete(format!("no part-respecting complete mapping found for the chosen partition of {spec}")))
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A Kotzig array whose rows split into consecutive zero-sum groups of size `g`.
///
/// Every row reorders one zero-sum partition of `Γ`. Odd `j` needs a complete
/// mapping that sends parts onto parts: the identity for odd order, an
/// automorphism when the 2-part allows one, otherwise a search.
pub fn build_grouped_kotzig(spec: &GroupSpec, j: usize, g: usize) -> Result<KotzigArray> {
    if j < 2 {
        return Err(Error::Precondition(format!("a Kotzig array needs at least 2 rows, got {j}")));
    }
    let k = spec.order() as usize;
    if g == 0 || k % g != 0 {
        return Err(Error::Precondition(format!("group size {g} does not divide {k}")));
    }
    let parts = zero_sum_partition(spec, k / g, g)?;
    let pi: Vec<GroupElement> = parts.concat();
    let negate = |row: &[GroupElement]| -> Vec<GroupElement> { row.iter().map(|x| spec.neg(x).expect("member")).collect() };
    let mut rows = Vec::with_capacity(j);
    if j % 2 == 1 {
        let sigma_row: Vec<GroupElement> = if k % 2 == 1 {
            pi.clone()
        } else {
            match orthomorphic_automorphism(spec) {
                Some(phi) => pi.iter().map(|x| phi.apply(x).clone()).collect(),
                None => {
                    let sigma = part_mapping(spec, &parts)?;
                    pi.iter().map(|x| spec.element_at(sigma[spec.index_of(x) as usize] as u64)).collect()
                }
            }
        };
        let third: Vec<GroupElement> = pi
            .iter()
            .zip(&sigma_row)
            .map(|(x, s)| spec.neg(&spec.add(x, s).expect("member")).expect("member"))
            .collect();
        rows.push(pi.clone());
        rows.push(sigma_row);
        rows.push(third);
    }
    while rows.len() < j {
        rows.push(pi.clone());
        rows.push(negate(&pi));
    }
    let ka = KotzigArray { group: spec.clone(), rows, group_size: Some(g) };
    ka.check()?;
    Ok(ka)
}

/// Carries a Kotzig array to an isomorphic presentation.
pub fn map_kotzig(ka: &KotzigArray, iso: &Isomorphism) -> Result<KotzigArray> {
    if *iso.source() != ka.group {
        return Err(Error::SpecMismatch { left: ka.group.to_string(), right: iso.source().to_string() });
    }
    let rows = ka
        .rows
        .iter()
        .map(|r| r.iter().map(|e| iso.apply(e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(KotzigArray { group: iso.target().clone(), rows, group_size: ka.group_size })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    fn e(v: &[u64]) -> GroupElement {
        GroupElement::new(v.to_vec())
    }

    #[test]
    fn odd_group_three_rows() {
        let ka = build_kotzig(&g("Z5"), 3).unwrap();
        let third: Vec<u64> = ka.rows[2].iter().map(|x| x.residues()[0]).collect();
        assert_eq!(third, vec![0, 3, 1, 4, 2]);
    }

    #[test]
    fn paired_rows() {
        let ka = build_kotzig(&g("Z4"), 2).unwrap();
        let rows: Vec<Vec<u64>> = ka.rows.iter().map(|r| r.iter().map(|x| x.residues()[0]).collect()).collect();
        assert_eq!(rows, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]);
    }

    #[test]
    fn odd_rows_over_unique_involution() {
        assert!(matches!(build_kotzig(&g("Z16"), 3), Err(Error::NonExistence { .. })));
        assert!(matches!(complete_mapping(&g("Z8")), Err(Error::NonExistence { .. })));
        assert!(build_kotzig(&g("Z16"), 4).is_ok());
        assert!(build_kotzig(&g("Z3"), 1).is_err());
    }

    #[test]
    fn klein_complete_mapping() {
        let cm = complete_mapping(&g("Z2xZ2")).unwrap();
        assert!(cm.is_valid());
        assert_eq!(cm.images, vec![e(&[0, 0]), e(&[1, 0]), e(&[1, 1]), e(&[0, 1])]);
    }

    #[test]
    fn complete_mappings_of_two_groups() {
        for s in ["Z2xZ2xZ2", "Z2xZ4", "Z4xZ4", "Z2xZ8", "Z2xZ2xZ2xZ2", "Z2xZ16", "Z6xZ2", "Z2xZ2xZ8"] {
            assert!(complete_mapping(&g(s)).unwrap().is_valid(), "{s}");
        }
    }

    #[test]
    fn partitions() {
        let p = zero_sum_partition(&g("Z9"), 3, 3).unwrap();
        let as_ints: Vec<Vec<u64>> = p.iter().map(|part| part.iter().map(|x| x.residues()[0]).collect()).collect();
        assert_eq!(as_ints, vec![vec![0, 1, 8], vec![2, 3, 4], vec![5, 6, 7]]);
        assert!(matches!(zero_sum_partition(&g("Z2xZ2"), 2, 2), Err(Error::NonExistence { .. })));
        assert!(matches!(zero_sum_partition(&g("Z9"), 2, 3), Err(Error::Precondition(_))));
        let p = zero_sum_partition(&g("Z3xZ3"), 3, 3).unwrap();
        for part in &p {
            assert!(g("Z3xZ3").sum(part).unwrap().is_zero());
        }
    }

    #[test]
    fn exhausted_budget_is_distinct() {
        assert!(matches!(
            zero_sum_partition_with_budget(&g("Z5xZ5"), 5, 5, 3),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn grouped_arrays() {
        for (s, j, grp) in [("Z5xZ5", 3, 5), ("Z9", 4, 3), ("Z4xZ4", 3, 4), ("Z3xZ3", 5, 3)] {
            let ka = build_grouped_kotzig(&g(s), j, grp).unwrap();
            assert_eq!(ka.rows.len(), j);
            ka.check().unwrap();
        }
    }

    #[test]
    fn normalization_zeroes_columns() {
        let spec = g("Z7");
        let base = build_kotzig(&spec, 3).unwrap();
        let shifted: Vec<Vec<GroupElement>> = base
            .rows
            .iter()
            .zip(0u64..)
            .map(|(row, r)| row.iter().map(|x| spec.add(x, &e(&[r])).unwrap()).collect())
            .collect();
        let ka = KotzigArray { group: spec, rows: shifted, group_size: None };
        assert!(ka.is_kotzig());
        assert!(ka.check().is_err());
        ka.normalize().check().unwrap();
    }
}
