//! Filters and ultrafilters over a finite universe.
//!
//! Every filter over a finite set is principal, so a [`Filter`] is stored by
//! its kernel `V`: a set `U` is a member iff `V ⊆ U`. Raw collections of
//! subsets ([`SetFamily`]) can be classified with [`validate_family`] and
//! turned into kernel form with [`canonicalize`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest universe a [`Subset`] bitset can address.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not a filter: {0}")]
    NotAFilter(AxiomViolation),
    #[error("not an ultrafilter: kernel has {kernel_size} points")]
    NotUltrafilter { kernel_size: usize },
    #[error("universe mismatch")]
    UniverseMismatch,
}

/// A subset of a universe, one bit per point in label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// All points `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_POINTS && self.0 & (1u64 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Complement relative to a universe of `n` points.
    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    /// Indices of the points in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_POINTS).filter(move |&i| bits & (1u64 << i) != 0)
    }

    /// Lowest point, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(Subset(cur))
        })
    }
}

/// An ordered list of distinct, nonempty point labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(labels: I) -> Result<Self, FilterError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FilterError::InvalidInput("universe is empty".into()));
        }
        if labels.len() > MAX_POINTS {
            return Err(FilterError::InvalidInput(format!(
                "universe has {} points, at most {MAX_POINTS} supported",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if label.is_empty() {
                return Err(FilterError::InvalidInput("empty label".into()));
            }
            if !seen.insert(label.as_str()) {
                return Err(FilterError::InvalidInput(format!("duplicate label {label:?}")));
            }
        }
        Ok(Universe { labels })
    }

    /// Universe with labels `prefix0, prefix1, …`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self, FilterError> {
        Universe::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset, FilterError> {
        let mut out = Subset::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| FilterError::InvalidInput(format!("unknown label {label:?}")))?;
            out = out.union(Subset::singleton(i));
        }
        Ok(out)
    }

    pub fn labels_of(&self, set: Subset) -> Vec<String> {
        set.indices().map(|i| self.labels[i].clone()).collect()
    }

    pub fn contains_subset(&self, set: Subset) -> bool {
        set.is_subset_of(self.full())
    }

    /// Every subset of the universe. Exponential; intended for small universes.
    pub fn power_set(&self) -> impl Iterator<Item = Subset> {
        self.full().subsets()
    }
}

impl TryFrom<Vec<String>> for Universe {
    type Error = FilterError;

    fn try_from(labels: Vec<String>) -> Result<Self, Self::Error> {
        Universe::new(labels)
    }
}

impl From<Universe> for Vec<String> {
    fn from(u: Universe) -> Self {
        u.labels
    }
}

/// A candidate collection of subsets, not yet known to be a filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    universe: Universe,
    members: Vec<Subset>,
}

impl SetFamily {
    pub fn new(universe: Universe, members: Vec<Subset>) -> Result<Self, FilterError> {
        let mut seen = HashSet::with_capacity(members.len());
        for &m in &members {
            if !universe.contains_subset(m) {
                return Err(FilterError::InvalidInput(format!(
                    "member {:#b} is not a subset of the universe",
                    m.bits()
                )));
            }
            if !seen.insert(m) {
                return Err(FilterError::InvalidInput(format!(
                    "duplicate member {:?}",
                    universe.labels_of(m)
                )));
            }
        }
        Ok(SetFamily { universe, members })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }
}

/// The first filter axiom a family was found to violate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    NoMembers,
    ContainsEmptySet,
    MissingUniverse,
    NotIntersectionClosed { left: Subset, right: Subset },
    NotUpwardClosed { member: Subset, missing: Subset },
}

impl AxiomViolation {
    /// Stable machine-readable name of the violated axiom.
    pub fn code(&self) -> &'static str {
        match self {
            AxiomViolation::NoMembers => "no_members",
            AxiomViolation::ContainsEmptySet => "contains_empty_set",
            AxiomViolation::MissingUniverse => "missing_universe",
            AxiomViolation::NotIntersectionClosed { .. } => "not_intersection_closed",
            AxiomViolation::NotUpwardClosed { .. } => "not_upward_closed",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::NoMembers => write!(f, "family is empty"),
            AxiomViolation::ContainsEmptySet => write!(f, "contains empty set"),
            AxiomViolation::MissingUniverse => write!(f, "does not contain the universe"),
            AxiomViolation::NotIntersectionClosed { left, right } => write!(
                f,
                "intersection of {:#b} and {:#b} is missing",
                left.bits(),
                right.bits()
            ),
            AxiomViolation::NotUpwardClosed { member, missing } => write!(
                f,
                "superset {:#b} of member {:#b} is missing",
                missing.bits(),
                member.bits()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    NotFilter(AxiomViolation),
    Filter(Filter),
    Ultrafilter(Filter),
}

impl Classification {
    pub fn is_filter(&self) -> bool {
        !matches!(self, Classification::NotFilter(_))
    }

    pub fn is_ultrafilter(&self) -> bool {
        matches!(self, Classification::Ultrafilter(_))
    }
}

/// Classify a family as not a filter, a filter, or an ultrafilter.
///
/// Runs in `O(|members|² · |X|)`. Upward closure is decided exactly: once the
/// family is intersection closed its kernel `V` is a member, and a family of
/// distinct supersets of `V` is upward closed iff it has `2^(|X|-|V|)` members.
pub fn validate_family(family: &SetFamily) -> Classification {
    let members = family.members();
    let universe = family.universe();
    if members.is_empty() {
        return Classification::NotFilter(AxiomViolation::NoMembers);
    }
    if members.iter().any(|m| m.is_empty()) {
        return Classification::NotFilter(AxiomViolation::ContainsEmptySet);
    }
    let full = universe.full();
    if !members.contains(&full) {
        return Classification::NotFilter(AxiomViolation::MissingUniverse);
    }
    let lookup: HashSet<Subset> = members.iter().copied().collect();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if !lookup.contains(&a.intersection(b)) {
                return Classification::NotFilter(AxiomViolation::NotIntersectionClosed {
                    left: a,
                    right: b,
                });
            }
        }
    }
    let kernel = members.iter().fold(full, |acc, &m| acc.intersection(m));
    let free = full.difference(kernel);
    let expected = 1u64 << free.len();
    if members.len() as u64 != expected {
        let missing = free
            .subsets()
            .map(|extra| kernel.union(extra))
            .find(|s| !lookup.contains(s))
            .expect("a member count below 2^k leaves some superset missing");
        return Classification::NotFilter(AxiomViolation::NotUpwardClosed {
            member: kernel,
            missing,
        });
    }
    let filter = Filter {
        universe: universe.clone(),
        kernel,
    };
    if kernel.len() == 1 {
        Classification::Ultrafilter(filter)
    } else {
        Classification::Filter(filter)
    }
}

/// Kernel form of a validated family.
pub fn canonicalize(family: &SetFamily) -> Result<Filter, FilterError> {
    match validate_family(family) {
        Classification::NotFilter(v) => Err(FilterError::NotAFilter(v)),
        Classification::Filter(f) | Classification::Ultrafilter(f) => Ok(f),
    }
}

/// A filter over a finite universe in kernel form: `U ∈ F ⟺ kernel ⊆ U`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FilterJson", into = "FilterJson")]
pub struct Filter {
    universe: Universe,
    kernel: Subset,
}

impl Filter {
    pub fn principal(universe: Universe, kernel: Subset) -> Result<Self, FilterError> {
        if kernel.is_empty() {
            return Err(FilterError::InvalidInput("kernel is empty".into()));
        }
        if !universe.contains_subset(kernel) {
            return Err(FilterError::InvalidInput(
                "kernel is not a subset of the universe".into(),
            ));
        }
        Ok(Filter { universe, kernel })
    }

    /// The principal ultrafilter at point `i`.
    pub fn at_point(universe: Universe, i: usize) -> Result<Self, FilterError> {
        if i >= universe.len() {
            return Err(FilterError::InvalidInput(format!("point {i} out of range")));
        }
        Filter::principal(universe, Subset::singleton(i))
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn kernel(&self) -> Subset {
        self.kernel
    }

    pub fn contains(&self, set: Subset) -> bool {
        self.kernel.is_subset_of(set)
    }

    pub fn is_ultrafilter(&self) -> bool {
        self.kernel.len() == 1
    }

    /// Over a finite universe every filter is closed under arbitrary intersections.
    pub fn is_sigma_complete(&self) -> bool {
        true
    }

    /// The kernel point of an ultrafilter.
    pub fn point(&self) -> Result<usize, FilterError> {
        if self.is_ultrafilter() {
            Ok(self.kernel.first().expect("nonempty kernel"))
        } else {
            Err(FilterError::NotUltrafilter {
                kernel_size: self.kernel.len(),
            })
        }
    }

    /// All members, as a family. Exponential in `|X| - |kernel|`.
    pub fn expand(&self) -> SetFamily {
        let free = self.universe.full().difference(self.kernel);
        let members = free.subsets().map(|s| s.union(self.kernel)).collect();
        SetFamily {
            universe: self.universe.clone(),
            members,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FilterJson {
    universe: Vec<String>,
    kernel: Vec<String>,
}

impl TryFrom<FilterJson> for Filter {
    type Error = FilterError;

    fn try_from(json: FilterJson) -> Result<Self, Self::Error> {
        let universe = Universe::new(json.universe)?;
        let kernel = universe.subset(&json.kernel)?;
        Filter::principal(universe, kernel)
    }
}

impl From<Filter> for FilterJson {
    fn from(f: Filter) -> Self {
        FilterJson {
            kernel: f.universe.labels_of(f.kernel),
            universe: f.universe.labels,
        }
    }
}

/// A partition of the universe into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    universe: Universe,
    blocks: Vec<Subset>,
}

impl Partition {
    pub fn new(universe: Universe, blocks: Vec<Subset>) -> Result<Self, FilterError> {
        let mut covered = Subset::EMPTY;
        for &b in &blocks {
            if b.is_empty() {
                return Err(FilterError::InvalidInput("empty block".into()));
            }
            if !universe.contains_subset(b) {
                return Err(FilterError::InvalidInput("block outside universe".into()));
            }
            if !covered.intersection(b).is_empty() {
                return Err(FilterError::InvalidInput("blocks overlap".into()));
            }
            covered = covered.union(b);
        }
        if covered != universe.full() {
            return Err(FilterError::InvalidInput(
                "blocks do not cover the universe".into(),
            ));
        }
        Ok(Partition { universe, blocks })
    }

    pub fn from_labels<S: AsRef<str>>(
        universe: Universe,
        blocks: &[Vec<S>],
    ) -> Result<Self, FilterError> {
        let blocks = blocks
            .iter()
            .map(|b| universe.subset(b))
            .collect::<Result<Vec<_>, _>>()?;
        Partition::new(universe, blocks)
    }

    /// Group points by a key; blocks appear in order of first occurrence.
    pub fn by_key<K: PartialEq, F: Fn(usize) -> K>(universe: Universe, key: F) -> Self {
        let mut keys: Vec<K> = Vec::new();
        let mut blocks: Vec<Subset> = Vec::new();
        for i in 0..universe.len() {
            let k = key(i);
            match keys.iter().position(|existing| *existing == k) {
                Some(pos) => blocks[pos] = blocks[pos].union(Subset::singleton(i)),
                None => {
                    keys.push(k);
                    blocks.push(Subset::singleton(i));
                }
            }
        }
        Partition { universe, blocks }
    }

    pub fn singletons(universe: Universe) -> Self {
        let blocks = (0..universe.len()).map(Subset::singleton).collect();
        Partition { universe, blocks }
    }

    pub fn trivial(universe: Universe) -> Self {
        let blocks = vec![universe.full()];
        Partition { universe, blocks }
    }

    /// Every partition of the universe, via restricted growth strings.
    pub fn enumerate_all(universe: &Universe) -> Vec<Partition> {
        let n = universe.len();
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        loop {
            let count = rgs.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Subset::EMPTY; count];
            for (i, &b) in rgs.iter().enumerate() {
                blocks[b] = blocks[b].union(Subset::singleton(i));
            }
            out.push(Partition {
                universe: universe.clone(),
                blocks,
            });
            // advance to the next restricted growth string
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= prefix_max {
                    rgs[i] += 1;
                    rgs[i + 1..].iter_mut().for_each(|v| *v = 0);
                    break;
                }
            }
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of the blocks whose indices are in `selection`.
    pub fn union_of(&self, selection: Subset) -> Subset {
        selection
            .indices()
            .fold(Subset::EMPTY, |acc, i| acc.union(self.blocks[i]))
    }

    /// Universe of block labels `b0, b1, …` in block order.
    pub fn block_universe(&self) -> Universe {
        Universe::numbered("b", self.blocks.len()).expect("at least one block")
    }

    pub fn to_labels(&self) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|&b| self.universe.labels_of(b))
            .collect()
    }
}

/// Index of the unique block that belongs to an ultrafilter.
pub fn partition_select(filter: &Filter, partition: &Partition) -> Result<usize, FilterError> {
    if filter.universe() != partition.universe() {
        return Err(FilterError::UniverseMismatch);
    }
    let point = filter.point()?;
    Ok(partition
        .blocks()
        .iter()
        .position(|b| b.contains(point))
        .expect("partition covers the universe"))
}

/// The pushed-forward filter on block labels: `I ∈ F_κ ⟺ ∪_{i∈I} X_i ∈ F`.
///
/// Its kernel is the set of blocks meeting the kernel of `filter`.
pub fn quotient_filter(filter: &Filter, partition: &Partition) -> Result<Filter, FilterError> {
    if filter.universe() != partition.universe() {
        return Err(FilterError::UniverseMismatch);
    }
    let kernel = Subset::from_indices(
        partition
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.intersection(filter.kernel()).is_empty())
            .map(|(i, _)| i),
    );
    Filter::principal(partition.block_universe(), kernel)
}
