//! Finite Abelian groups presented as direct sums of cyclic groups.
//!
//! A [`GroupSpec`] is an ordered list of cyclic moduli; elements are residue
//! vectors against that list. Constructions run on the primary form returned
//! by [`GroupSpec::primary_split`] and are carried back to the caller's
//! presentation through the accompanying [`Isomorphism`].

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{crt, factorize, partitions};
use crate::error::{Error, Result};

/// Largest group order accepted by [`GroupSpec::new`].
pub const DEFAULT_ORDER_CEILING: u64 = 1 << 32;

/// A finite Abelian group `Z_{m_1} ⊕ … ⊕ Z_{m_r}`. The empty list is the
/// trivial group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct GroupSpec {
    moduli: Vec<u64>,
    order: u64,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    moduli: Vec<u64>,
}

impl TryFrom<SpecRepr> for GroupSpec {
    type Error = Error;
    fn try_from(repr: SpecRepr) -> Result<Self> {
        GroupSpec::new(repr.moduli)
    }
}

impl From<GroupSpec> for SpecRepr {
    fn from(spec: GroupSpec) -> Self {
        SpecRepr { moduli: spec.moduli }
    }
}

/// A group element: one reduced residue per cyclic factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    /// Wraps raw residues without checking them against any group.
    pub fn new(residues: Vec<u64>) -> Self {
        GroupElement(residues)
    }

    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    pub fn into_residues(self) -> Vec<u64> {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }

    /// Parses `(1,6)`, `[1,6]`, `1,6` or a bare `7`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .or_else(|| t.strip_prefix('[').and_then(|s| s.strip_suffix(']')))
            .unwrap_or(t);
        if inner.trim().is_empty() {
            return Ok(GroupElement(Vec::new()));
        }
        inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::MalformedInput(format!("bad element `{text}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupElement)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Structural facts about a group relevant to zero-sum squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupProfile {
    pub order: u64,
    /// `n` with `n² = order`, when the order is a perfect square.
    pub side: Option<u64>,
    pub involution_count: u64,
    /// Odd order, or more than one involution.
    pub in_g: bool,
    /// The sum of all group elements.
    pub total_sum: GroupElement,
}

impl GroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        Self::with_ceiling(moduli, DEFAULT_ORDER_CEILING)
    }

    pub fn with_ceiling(moduli: Vec<u64>, ceiling: u64) -> Result<Self> {
        let mut order: u64 = 1;
        for &m in &moduli {
            if m < 2 {
                return Err(Error::ModulusTooSmall(m));
            }
            order = order
                .checked_mul(m)
                .filter(|&o| o <= ceiling)
                .ok_or(Error::OrderOverflow { ceiling })?;
        }
        Ok(GroupSpec { moduli, order })
    }

    pub fn trivial() -> Self {
        GroupSpec { moduli: Vec::new(), order: 1 }
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(vec![m])
    }

    /// Parses `Z2xZ8`, `z2+z8`, `Z2⊕Z8`, `trivial`, or the JSON forms
    /// `{"moduli":[2,8]}` and `[2,8]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            return serde_json::from_str::<GroupSpec>(t).map_err(|e| match e.classify() {
                serde_json::error::Category::Data => {
                    // Surface the validation error from `new` when possible.
                    serde_json::from_str::<SpecRepr>(t)
                        .ok()
                        .and_then(|r| GroupSpec::new(r.moduli).err())
                        .unwrap_or_else(|| Error::MalformedGroup(t.to_string()))
                }
                _ => Error::MalformedGroup(t.to_string()),
            });
        }
        if t.starts_with('[') {
            let moduli: Vec<u64> =
                serde_json::from_str(t).map_err(|_| Error::MalformedGroup(t.to_string()))?;
            return Self::new(moduli);
        }
        if t.eq_ignore_ascii_case("trivial") {
            return Ok(Self::trivial());
        }
        let mut moduli = Vec::new();
        for token in t.split(['x', 'X', '+', '⊕']) {
            let token = token.trim();
            let digits = token
                .strip_prefix('Z')
                .or_else(|| token.strip_prefix('z'))
                .ok_or_else(|| Error::MalformedGroup(t.to_string()))?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::MalformedGroup(t.to_string()));
            }
            let m = digits
                .parse::<u64>()
                .map_err(|_| Error::OrderOverflow { ceiling: DEFAULT_ORDER_CEILING })?;
            moduli.push(m);
        }
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    /// `n` with `n² = |Γ|`.
    pub fn side(&self) -> Option<u64> {
        crate::arith::exact_sqrt(self.order)
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1, |acc, &m| acc.lcm(&m))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn check(&self, e: &GroupElement) -> Result<()> {
        if e.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: e.rank() });
        }
        for (&r, &m) in e.0.iter().zip(&self.moduli) {
            if r >= m {
                return Err(Error::ResidueOutOfRange { residue: r, modulus: m });
            }
        }
        Ok(())
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.check(e).is_ok()
    }

    /// Validated element from residues already in range.
    pub fn element(&self, residues: Vec<u64>) -> Result<GroupElement> {
        let e = GroupElement(residues);
        self.check(&e)?;
        Ok(e)
    }

    /// Element from arbitrary integers, reduced coordinatewise.
    pub fn reduce(&self, values: &[i128]) -> Result<GroupElement> {
        if values.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: values.len() });
        }
        Ok(GroupElement(
            values
                .iter()
                .zip(&self.moduli)
                .map(|(&v, &m)| v.rem_euclid(m as i128) as u64)
                .collect(),
        ))
    }

    fn dims(&self, e: &GroupElement) -> Result<()> {
        if e.rank() == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.rank(), got: e.rank() })
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.dims(a)?;
        self.dims(b)?;
        let mut out = a.clone();
        self.add_assign(&mut out, b);
        Ok(out)
    }

    /// `acc += b` without dimension checks; callers guarantee matching ranks.
    pub(crate) fn add_assign(&self, acc: &mut GroupElement, b: &GroupElement) {
        for ((x, &y), &m) in acc.0.iter_mut().zip(&b.0).zip(&self.moduli) {
            let s = *x + y;
            *x = if s >= m { s - m } else { s };
        }
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.dims(a)?;
        Ok(GroupElement(
            a.0.iter().zip(&self.moduli).map(|(&r, &m)| if r == 0 { 0 } else { m - r }).collect(),
        ))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.add(a, &self.neg(b)?)
    }

    /// `c · a`; negative `c` multiplies the inverse.
    pub fn scale(&self, c: i64, a: &GroupElement) -> Result<GroupElement> {
        self.dims(a)?;
        Ok(GroupElement(
            a.0.iter()
                .zip(&self.moduli)
                .map(|(&r, &m)| (c as i128 * r as i128).rem_euclid(m as i128) as u64)
                .collect(),
        ))
    }

    pub fn sum<'a, I>(&self, items: I) -> Result<GroupElement>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut acc = self.identity();
        for e in items {
            self.dims(e)?;
            self.add_assign(&mut acc, e);
        }
        Ok(acc)
    }

    /// Position of `e` in the lexicographic enumeration (first coordinate
    /// most significant).
    pub fn index_of(&self, e: &GroupElement) -> u64 {
        e.0.iter().zip(&self.moduli).fold(0, |acc, (&r, &m)| acc * m + r)
    }

    pub fn element_at(&self, mut index: u64) -> GroupElement {
        let mut res = vec![0; self.rank()];
        for (slot, &m) in res.iter_mut().zip(&self.moduli).rev() {
            *slot = index % m;
            index /= m;
        }
        GroupElement(res)
    }

    /// All elements in lexicographic order of residues.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// Elements `ι ≠ 0` with `2ι = 0`, in lexicographic order.
    pub fn involutions(&self) -> Vec<GroupElement> {
        let choices: Vec<Vec<u64>> = self
            .moduli
            .iter()
            .map(|&m| if m % 2 == 0 { vec![0, m / 2] } else { vec![0] })
            .collect();
        let mut out = vec![Vec::new()];
        for c in &choices {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    c.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(GroupElement).filter(|e| !e.is_zero()).collect()
    }

    /// Closed form of `Σ_{g∈Γ} g`: coordinate `i` is `(|Γ|/m_i) · m_i(m_i−1)/2`.
    fn total_sum(&self) -> GroupElement {
        GroupElement(
            self.moduli
                .iter()
                .map(|&m| {
                    let cofactor = self.order / m;
                    if m % 2 == 0 && cofactor % 2 == 1 {
                        m / 2
                    } else {
                        0
                    }
                })
                .collect(),
        )
    }

    pub fn in_g(&self) -> bool {
        self.order % 2 == 1 || self.moduli.iter().filter(|&&m| m % 2 == 0).count() >= 2
    }

    pub fn classify(&self) -> GroupProfile {
        let even = self.moduli.iter().filter(|&&m| m % 2 == 0).count() as u32;
        GroupProfile {
            order: self.order,
            side: self.side(),
            involution_count: (1u64 << even) - 1,
            in_g: self.in_g(),
            total_sum: self.total_sum(),
        }
    }

    /// Prime-power cyclic factors `(p, e)` sorted by prime, then exponent.
    pub fn primary_factors(&self) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = self.moduli.iter().flat_map(|&m| factorize(m)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_isomorphic(&self, other: &GroupSpec) -> bool {
        self.primary_factors() == other.primary_factors()
    }

    /// `self ⊕ other`, factors of `self` first.
    pub fn direct_sum(&self, other: &GroupSpec) -> Result<GroupSpec> {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        GroupSpec::new(moduli)
    }

    /// Isomorphic copy listing prime-power cyclic factors grouped by prime
    /// (ascending), exponents ascending within a prime, plus the CRT map.
    pub fn primary_split(&self) -> (GroupSpec, Isomorphism) {
        let mut slots: Vec<(u64, u32, usize)> = Vec::new();
        for (i, &m) in self.moduli.iter().enumerate() {
            for (p, e) in factorize(m) {
                slots.push((p, e, i));
            }
        }
        slots.sort_unstable();
        let target_moduli: Vec<u64> = slots.iter().map(|&(p, e, _)| p.pow(e)).collect();
        let target = GroupSpec { order: self.order, moduli: target_moduli };
        let forward: Vec<Vec<(usize, u64)>> =
            slots.iter().map(|&(p, e, i)| vec![(i, p.pow(e))]).collect();
        let mut inverse: Vec<Vec<(usize, u64)>> = vec![Vec::new(); self.rank()];
        for (t, &(p, e, i)) in slots.iter().enumerate() {
            inverse[i].push((t, p.pow(e)));
        }
        let iso = Isomorphism { source: self.clone(), target: target.clone(), forward, inverse };
        (target, iso)
    }

    /// The sub-sum made of the factors at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> GroupSpec {
        let moduli: Vec<u64> = indices.iter().map(|&i| self.moduli[i]).collect();
        let order = moduli.iter().product();
        GroupSpec { moduli, order }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "trivial");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

/// Every isomorphism class of Abelian groups of the given order, each in
/// primary form. Classes are listed prime by prime, partitions ascending.
pub fn abelian_groups_of_order(order: u64) -> Vec<GroupSpec> {
    let mut classes: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in factorize(order) {
        let options: Vec<Vec<u64>> =
            partitions(e).into_iter().map(|parts| parts.iter().map(|&x| p.pow(x)).collect()).collect();
        classes = classes
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |opt| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(opt);
                    v
                })
            })
            .collect();
    }
    classes.into_iter().map(|m| GroupSpec::new(m).expect("valid moduli")).collect()
}

/// Each output coordinate is the CRT combination of `input[s] mod q` over its
/// terms `(s, q)`, then reduced modulo the output modulus.
type CoordinateMap = Vec<Vec<(usize, u64)>>;

/// An additive bijection between two presentations of the same group,
/// built from per-coordinate reductions and CRT recombinations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    source: GroupSpec,
    target: GroupSpec,
    forward: CoordinateMap,
    inverse: CoordinateMap,
}

fn apply_map(map: &CoordinateMap, out_spec: &GroupSpec, input: &GroupElement) -> GroupElement {
    GroupElement(
        map.iter()
            .zip(out_spec.moduli())
            .map(|(terms, &m)| {
                let parts: Vec<(u64, u64)> =
                    terms.iter().map(|&(s, q)| (input.0[s] % q, q)).collect();
                crt(&parts) % m
            })
            .collect(),
    )
}

fn compose_maps(first: &CoordinateMap, second: &CoordinateMap) -> CoordinateMap {
    second
        .iter()
        .map(|terms| {
            let mut out = Vec::new();
            for &(t, q) in terms {
                for &(s, q_inner) in &first[t] {
                    let g = q.gcd(&q_inner);
                    if g > 1 {
                        out.push((s, g));
                    }
                }
            }
            out
        })
        .collect()
}

impl Isomorphism {
    pub fn identity(spec: &GroupSpec) -> Self {
        let map: CoordinateMap =
            spec.moduli.iter().enumerate().map(|(i, &m)| vec![(i, m)]).collect();
        Isomorphism { source: spec.clone(), target: spec.clone(), forward: map.clone(), inverse: map }
    }

    /// Reorders factors: target coordinate `t` is source coordinate `perm[t]`.
    pub fn permutation(source: &GroupSpec, perm: &[usize]) -> Result<Self> {
        let r = source.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation of {r} factors")));
        }
        let target = source.select(perm);
        let forward: CoordinateMap = perm.iter().map(|&s| vec![(s, source.moduli[s])]).collect();
        let mut inverse: CoordinateMap = vec![Vec::new(); r];
        for (t, &s) in perm.iter().enumerate() {
            inverse[s] = vec![(t, source.moduli[s])];
        }
        Ok(Isomorphism { source: source.clone(), target, forward, inverse })
    }

    /// Some isomorphism `a → b`, via both primary forms.
    pub fn between(a: &GroupSpec, b: &GroupSpec) -> Result<Self> {
        if !a.is_isomorphic(b) {
            return Err(Error::SpecMismatch { left: a.to_string(), right: b.to_string() });
        }
        let (_, ia) = a.primary_split();
        let (_, ib) = b.primary_split();
        ia.then(&ib.inverse())
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn inverse(&self) -> Isomorphism {
        Isomorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Isomorphism) -> Result<Isomorphism> {
        if self.target != next.source {
            return Err(Error::SpecMismatch {
                left: self.target.to_string(),
                right: next.source.to_string(),
            });
        }
        Ok(Isomorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            forward: compose_maps(&self.forward, &next.forward),
            inverse: compose_maps(&next.inverse, &self.inverse),
        })
    }

    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        self.source.check(e)?;
        Ok(apply_map(&self.forward, &self.target, e))
    }

    pub fn apply_inverse(&self, e: &GroupElement) -> Result<GroupElement> {
        self.target.check(e)?;
        Ok(apply_map(&self.inverse, &self.source, e))
    }

    /// Checks that the map is an additive bijection. Exhaustive for groups of
    /// order at most 10⁴; larger groups are checked on generators and their
    /// pairwise sums.
    pub fn is_consistent(&self) -> bool {
        let src = &self.source;
        let gens: Vec<GroupElement> = (0..src.rank())
            .map(|i| {
                let mut v = vec![0; src.rank()];
                v[i] = 1;
                GroupElement(v)
            })
            .collect();
        let hom_at = |x: &GroupElement| -> bool {
            let fx = apply_map(&self.forward, &self.target, x);
            if apply_map(&self.inverse, src, &fx) != *x {
                return false;
            }
            gens.iter().all(|g| {
                let mut xg = x.clone();
                src.add_assign(&mut xg, g);
                let mut expect = fx.clone();
                self.target.add_assign(&mut expect, &apply_map(&self.forward, &self.target, g));
                apply_map(&self.forward, &self.target, &xg) == expect
            })
        };
        if src.order() != self.target.order() {
            return false;
        }
        if src.order() <= 10_000 {
            src.elements().all(|x| hom_at(&x))
        } else {
            let mut probes = vec![src.identity()];
            probes.extend(gens.iter().cloned());
            for a in &gens {
                for b in &gens {
                    let mut s = a.clone();
                    src.add_assign(&mut s, b);
                    probes.push(s);
                }
            }
            probes.iter().all(hom_at)
        }
    }
}
