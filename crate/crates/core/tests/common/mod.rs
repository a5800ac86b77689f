#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrarep::filters::{SetFamily, Subset};
use ultrarep::fixtures::{self, Fixture};
use ultrarep::IndexSet;

pub const CORPUS_SEED: u64 = 20_261_018;
pub const CORPUS_SIZE: usize = 200;

pub struct CorpusEntry {
    pub index_set: IndexSet,
    pub fixture: Fixture,
}

/// Conjugated sums `S₀ (⊕ I_{m_y} ⊗ p_y) S₀⁻¹` with `|X| ≤ 5`, `|Y| ≤ 3`,
/// `m_y ≤ 3`, `n_y ≤ 3`, `cond(S₀) ≤ 100`.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| {
            let points = rng.gen_range(1..=5);
            let index_set = fixtures::random_index_set(points, 3, &mut rng);
            let fixture = fixtures::random_fixture(&index_set, 3, 3, 100.0, &mut rng);
            CorpusEntry { index_set, fixture }
        })
        .collect()
}

/// Filter classification straight from the axioms, by enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteClass {
    NotFilter,
    Filter,
    Ultrafilter,
}

pub fn brute_force_classify(family: &SetFamily) -> BruteClass {
    let n = family.universe().len();
    let full = Subset::full(n);
    let members: HashSet<Subset> = family.members().iter().copied().collect();
    if members.is_empty() || members.contains(&Subset::EMPTY) || !members.contains(&full) {
        return BruteClass::NotFilter;
    }
    for &a in &members {
        for &b in &members {
            if !members.contains(&a.intersection(b)) {
                return BruteClass::NotFilter;
            }
        }
        for v in full.subsets() {
            if a.is_subset_of(v) && !members.contains(&v) {
                return BruteClass::NotFilter;
            }
        }
    }
    let ultra = full
        .subsets()
        .all(|u| members.contains(&u) || members.contains(&u.complement(n)));
    if ultra {
        BruteClass::Ultrafilter
    } else {
        BruteClass::Filter
    }
}
