//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrarep::algebra::{check_idempotent_spectrum, check_positive_spectrum, spectrum};
use ultrarep::filters::{
    partition_select, quotient_filter, validate_family, Classification, Filter, Partition,
    SetFamily, Subset, Universe,
};
use ultrarep::fixtures;
use ultrarep::linalg::{self, CMatrix};
use ultrarep::reps::{
    build_from_filter, commutant_dimension, decompose, enumerate_irreducibles, equivalent,
    extract_filter, involution_representation, is_irreducible, BasisChoice, Decomposition,
};
use ultrarep::{AlgebraElement, IndexSet, Representation, DEFAULT_TOL};

use common::{brute_force_classify, corpus, BruteClass, CorpusEntry};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64, what: &str) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_secs), || {
        format!("{what} took {elapsed:.2?}, limit {limit_secs} s")
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Criterion 1: extract_filter(build_from_filter(F, bases)) = F for |X| ≤ 6.
fn bijection_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for points in 1..=6 {
        for _draw in 0..3 {
            let set = fixtures::random_index_set(points, 3, &mut rng);
            for y in 0..points {
                let filter = Filter::at_point(set.universe().clone(), y).map_err(|e| e.to_string())?;
                for _ in 0..5 {
                    let bases: BasisChoice = (0..points)
                        .map(|x| {
                            let s = fixtures::random_invertible(set.dim(x), 50.0, &mut rng);
                            (set.label(x).to_string(), s)
                        })
                        .collect();
                    let rep = build_from_filter(&filter, &set, Some(&bases))
                        .map_err(|e| e.to_string())?;
                    rep.validate(DEFAULT_TOL).map_err(|e| e.to_string())?;
                    let back = extract_filter(&rep, DEFAULT_TOL).map_err(|e| e.to_string())?;
                    ensure(back == filter, || {
                        format!("round trip changed kernel {:?} -> {:?}", filter.kernel(), back.kernel())
                    })?;
                    checked += 1;
                }
            }
        }
    }
    within(start.elapsed(), 10, "round trip")?;
    Ok(format!("{checked} round trips exact in {:.2?}", start.elapsed()))
}

struct Decomposed<'a> {
    entry: &'a CorpusEntry,
    result: Decomposition,
}

fn expected_signature(entry: &CorpusEntry) -> Vec<(usize, usize)> {
    entry.fixture.parts.clone()
}

/// Criterion 2: decompose recovers (Y, m_y) exactly with residual ≤ 1e-7.
fn decomposition_oracle<'a>(entries: &'a [CorpusEntry]) -> Result<(String, Vec<Decomposed<'a>>), String> {
    let start = Instant::now();
    let mut out = Vec::with_capacity(entries.len());
    let mut worst: f64 = 0.0;
    for (k, entry) in entries.iter().enumerate() {
        let result = decompose(&entry.fixture.rep, DEFAULT_TOL)
            .map_err(|e| format!("fixture {k}: {e}"))?;
        ensure(result.signature() == expected_signature(entry), || {
            format!(
                "fixture {k}: signature {:?}, expected {:?}",
                result.signature(),
                expected_signature(entry)
            )
        })?;
        ensure(result.residual() <= 1e-7, || {
            format!("fixture {k}: residual {:e}", result.residual())
        })?;
        let total: usize = result
            .support()
            .iter()
            .zip(result.multiplicities())
            .map(|(&y, &m)| m * entry.index_set.dim(y))
            .sum();
        ensure(total == entry.fixture.rep.carrier_dim(), || {
            format!("fixture {k}: Σ m_y n_y = {total}")
        })?;
        worst = worst.max(result.residual());
        out.push(Decomposed { entry, result });
    }
    within(start.elapsed(), 60, "decomposition corpus")?;
    Ok((
        format!(
            "{} fixtures recovered, worst residual {worst:.2e}, {:.2?}",
            entries.len(),
            start.elapsed()
        ),
        out,
    ))
}

/// Criterion 3: irreducibles decompose to a single copy of p_y; Σ m_y ≥ 2 is reducible.
fn irreducibility_classification(decomposed: &[Decomposed<'_>]) -> Outcome {
    let mut irreducible = 0;
    let mut reducible = 0;
    let mut misclassified = Vec::new();
    for (k, d) in decomposed.iter().enumerate() {
        let rep = &d.entry.fixture.rep;
        let total_mult: usize = d.entry.fixture.parts.iter().map(|p| p.1).sum();
        let flagged = is_irreducible(rep, DEFAULT_TOL);
        if total_mult == 1 {
            irreducible += 1;
            let y = d.result.support()[0];
            let p_y = &enumerate_irreducibles(&d.entry.index_set)[y];
            let cert = equivalent(rep, p_y, DEFAULT_TOL).map_err(|e| format!("fixture {k}: {e}"))?;
            let ok = flagged
                && d.result.support().len() == 1
                && d.result.multiplicities() == [1]
                && cert.equivalent;
            if !ok {
                misclassified.push(k);
            }
        } else {
            reducible += 1;
            if flagged {
                misclassified.push(k);
            }
        }
    }
    ensure(misclassified.is_empty(), || format!("misclassified fixtures {misclassified:?}"))?;
    ensure(irreducible > 0 && reducible > 0, || {
        format!("degenerate corpus: {irreducible} irreducible, {reducible} reducible")
    })?;
    Ok(format!(
        "{irreducible} irreducible and {reducible} reducible fixtures, 0 misclassified"
    ))
}

/// Criterion 4: the involution representation of ℂ² on ℂ².
fn involution_regression() -> Outcome {
    let mut lines = Vec::new();
    for h in [c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.5)] {
        let rep = involution_representation(h).map_err(|e| e.to_string())?;
        rep.validate(DEFAULT_TOL).map_err(|e| e.to_string())?;
        let dim = commutant_dimension(&rep, DEFAULT_TOL);
        ensure(dim == 2, || format!("h = {h}: commutant dimension {dim}"))?;
        // a = e_{x2} − e_{x1}
        let set = rep.index_set().clone();
        let a = AlgebraElement::from_fn(&set, |x| {
            CMatrix::from_element(1, 1, c(if x == 0 { -1.0 } else { 1.0 }, 0.0))
        })
        .map_err(|e| e.to_string())?;
        let pa = rep.evaluate(&a).map_err(|e| e.to_string())?;
        let e = (linalg::identity(2) - &pa) * c(0.5, 0.0);
        let defect = linalg::op_norm(&(&e * &e - &e));
        ensure(defect <= 1e-12, || format!("h = {h}: ‖e² − e‖ = {defect:e}"))?;
        ensure(
            linalg::op_norm(&e) > 0.5 && linalg::op_norm(&(&e - linalg::identity(2))) > 0.5,
            || format!("h = {h}: e is trivial"),
        )?;
        let ev = spectrum(&pa).map_err(|e| e.to_string())?;
        let err = (ev[0] - c(-1.0, 0.0)).norm().max((ev[1] - c(1.0, 0.0)).norm());
        ensure(ev.len() == 2 && err <= 1e-10, || format!("h = {h}: spectrum {ev:?}"))?;
        lines.push(format!("h={h}: defect {defect:.1e}, spectrum err {err:.1e}"));
    }
    Ok(lines.join("; "))
}

/// Criterion 5: σ(π(χ_U)) ⊂ {0, 1} on every fixture and subset; σ(π(f)) ⊂ [0, ∞) for
/// abelian fixtures and f ≥ 0.
fn idempotent_spectra(entries: &[CorpusEntry]) -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (k, entry) in entries.iter().enumerate() {
        let rep = &entry.fixture.rep;
        for u in entry.index_set.universe().power_set() {
            let image = rep.indicator_image(u);
            let report = check_idempotent_spectrum(&image, DEFAULT_TOL)
                .map_err(|e| format!("fixture {k}, U = {:#b}: {e}", u.bits()))?;
            ensure(report.max_deviation <= 1e-6, || {
                format!("fixture {k}: eigenvalue {:e} away from {{0, 1}}", report.max_deviation)
            })?;
            worst = worst.max(report.max_deviation);
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut abelian_checked = 0;
    let mut worst_neg: f64 = 0.0;
    for _ in 0..60 {
        let points = rng.gen_range(1..=6);
        let set = IndexSet::abelian(Universe::numbered("a", points).map_err(|e| e.to_string())?);
        let fx = fixtures::random_fixture(&set, 3, 3, 100.0, &mut rng);
        for _ in 0..5 {
            let f = AlgebraElement::from_fn(&set, |_| {
                let v = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..10.0) };
                CMatrix::from_element(1, 1, c(v, 0.0))
            })
            .map_err(|e| e.to_string())?;
            let report = check_positive_spectrum(&f, &fx.rep, DEFAULT_TOL).map_err(|e| e.to_string())?;
            ensure(report.min_real >= -1e-6 && report.max_abs_imag <= 1e-6, || {
                format!("min real {:e}, max |imag| {:e}", report.min_real, report.max_abs_imag)
            })?;
            worst_neg = worst_neg.max(-report.min_real).max(report.max_abs_imag);
            abelian_checked += 1;
        }
    }
    Ok(format!(
        "{checked} indicator spectra (worst {worst:.1e}), {abelian_checked} positive spectra (worst {worst_neg:.1e})"
    ))
}

fn class_of(c: &Classification) -> BruteClass {
    match c {
        Classification::NotFilter(_) => BruteClass::NotFilter,
        Classification::Filter(_) => BruteClass::Filter,
        Classification::Ultrafilter(_) => BruteClass::Ultrafilter,
    }
}

fn family_from_mask(universe: &Universe, mask: u64) -> SetFamily {
    let members = (0..(1usize << universe.len()))
        .filter(|&s| mask & (1u64 << s) != 0)
        .map(|s| Subset::from_bits(s as u64))
        .collect();
    SetFamily::new(universe.clone(), members).expect("distinct subsets of the universe")
}

/// Criterion 6: Filter laws against a brute-force axiom checker.
fn filter_laws() -> Outcome {
    let start = Instant::now();
    let mut families = 0usize;
    let mut compare = |family: &SetFamily| -> Result<(), String> {
        let got = validate_family(family);
        let want = brute_force_classify(family);
        families += 1;
        ensure(class_of(&got) == want, || {
            format!("family {:?}: got {got:?}, brute force {want:?}", family.members())
        })?;
        if let Classification::Filter(f) | Classification::Ultrafilter(f) = &got {
            let kernel = family
                .members()
                .iter()
                .fold(family.universe().full(), |acc, &m| acc.intersection(m));
            ensure(f.kernel() == kernel, || "kernel mismatch".to_string())?;
        }
        Ok(())
    };
    for n in 1..=3 {
        let u = Universe::numbered("p", n).map_err(|e| e.to_string())?;
        let subsets = 1u32 << n;
        for mask in 0..(1u64 << subsets) {
            compare(&family_from_mask(&u, mask))?;
        }
    }
    let u4 = Universe::numbered("p", 4).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for kernel in u4.power_set().filter(|k| !k.is_empty()) {
        let principal = Filter::principal(u4.clone(), kernel).map_err(|e| e.to_string())?;
        let mask: u64 = principal
            .expand()
            .members()
            .iter()
            .fold(0, |acc, s| acc | (1u64 << s.bits()));
        compare(&family_from_mask(&u4, mask))?;
        for bit in 0..16 {
            compare(&family_from_mask(&u4, mask ^ (1u64 << bit)))?;
        }
    }
    for _ in 0..20_000 {
        let mask = rng.gen_range(0..(1u64 << 16));
        compare(&family_from_mask(&u4, mask))?;
    }

    let mut pairs = 0;
    for n in 1..=4 {
        let u = Universe::numbered("p", n).map_err(|e| e.to_string())?;
        let partitions = Partition::enumerate_all(&u);
        for y in 0..n {
            let f = Filter::at_point(u.clone(), y).map_err(|e| e.to_string())?;
            for p in &partitions {
                let members: Vec<usize> = (0..p.len()).filter(|&i| f.contains(p.blocks()[i])).collect();
                let selected = partition_select(&f, p).map_err(|e| e.to_string())?;
                ensure(members == [selected], || {
                    format!("partition {:?}: members {members:?}, selected {selected}", p.blocks())
                })?;
                let q = quotient_filter(&f, p).map_err(|e| e.to_string())?;
                ensure(q.is_ultrafilter() && q.kernel() == Subset::singleton(selected), || {
                    "quotient kernel mismatch".to_string()
                })?;
                for sel in q.universe().power_set() {
                    ensure(q.contains(sel) == f.contains(p.union_of(sel)), || {
                        "quotient membership mismatch".to_string()
                    })?;
                }
                pairs += 1;
            }
        }
    }
    within(start.elapsed(), 30, "filter laws")?;
    Ok(format!(
        "{families} families agree with brute force, {pairs} ultrafilter/partition pairs, {:.2?}",
        start.elapsed()
    ))
}

/// Criterion 7: Characters of ℂ(X) are point evaluations.
fn characters_are_point_evaluations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for points in 1..=6 {
        let set = IndexSet::abelian(Universe::numbered("a", points).map_err(|e| e.to_string())?);
        let chars = enumerate_irreducibles(&set);
        ensure(chars.len() == points, || format!("|X| = {points}: {} characters", chars.len()))?;
        let f = AlgebraElement::random(&set, &mut rng);
        for (x, ch) in chars.iter().enumerate() {
            ensure(ch.carrier_dim() == 1, || "character is not one-dimensional".to_string())?;
            let value = ch.evaluate(&f).map_err(|e| e.to_string())?[(0, 0)];
            ensure(value == f.block(x)[(0, 0)], || format!("character {x} is not evaluation at {x}"))?;
        }
    }
    let mut valid = 0;
    let mut rejected = 0;
    while valid < 100 {
        let points = rng.gen_range(1..=6);
        let set = IndexSet::abelian(Universe::numbered("a", points).map_err(|e| e.to_string())?);
        let values: Vec<Complex64> = (0..points)
            .map(|_| match rng.gen_range(0..4) {
                0 => c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                1 | 2 => c(0.0, 0.0),
                _ => c(1.0, 0.0),
            })
            .collect();
        let rep = Representation::from_fn(&set, 1, |x, _, _| CMatrix::from_element(1, 1, values[x]))
            .map_err(|e| e.to_string())?;
        if rep.validate(DEFAULT_TOL).is_err() {
            rejected += 1;
            continue;
        }
        valid += 1;
        ensure(is_irreducible(&rep, DEFAULT_TOL), || "one-dimensional rep reducible".to_string())?;
        let matches = enumerate_irreducibles(&set)
            .iter()
            .map(|ch| equivalent(&rep, ch, DEFAULT_TOL).map(|cert| cert.equivalent))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|&eq| eq)
            .count();
        ensure(matches == 1, || format!("{values:?} matches {matches} Dirac evaluations"))?;
    }
    Ok(format!("|X| = 1..6 enumerated; {valid} random characters each Dirac ({rejected} candidates rejected)"))
}

/// Criterion 8: commutant_dimension = Σ m_y².
fn commutant_bookkeeping(entries: &[CorpusEntry]) -> Outcome {
    for (k, entry) in entries.iter().enumerate() {
        let expected: usize = entry.fixture.parts.iter().map(|&(_, m)| m * m).sum();
        let got = commutant_dimension(&entry.fixture.rep, DEFAULT_TOL);
        ensure(got == expected, || format!("fixture {k}: commutant {got}, expected {expected}"))?;
    }
    Ok(format!("{} fixtures, exact Σ m_y² match", entries.len()))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string());
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {name}: {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let entries = corpus();
    let mut ok = true;
    ok &= run("1 bijection round trip", bijection_round_trip);

    let mut decomposed = None;
    ok &= run("2 decomposition oracle", || {
        let (detail, d) = decomposition_oracle(&entries)?;
        decomposed = Some(d);
        Ok(detail)
    });
    ok &= run("3 irreducibility classification", || match &decomposed {
        Some(d) => irreducibility_classification(d),
        None => Err("decompositions unavailable (criterion 2 failed)".into()),
    });
    ok &= run("4 involution regression", involution_regression);
    ok &= run("5 idempotent spectra", || idempotent_spectra(&entries));
    ok &= run("6 filter laws", filter_laws);
    ok &= run("7 characters are point evaluations", characters_are_point_evaluations);
    ok &= run("8 commutant bookkeeping", || commutant_bookkeeping(&entries));

    if ok {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
