//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false`.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hb_core::groups::Idx;
use hb_core::invariantspace::{odd_matches_odd_times_a, random_grid_function};
use hb_core::repr::InductionTarget;
use hb_core::witness::DEFAULT_SCALE;
use hb_core::{
    all_subgroups, brute_force_subgroups, character_table, dual_apply, gamma, gamma_sign, make_ambient,
    run_witness, sigma_project, subgroup_domain, verify_elementary, verify_orthogonality, verify_invariant_space,
    ClassTag, FiniteSubgroup, GridSpec, GroupElement, Rational,
};

const TRIALS: usize = 50;

fn evens(max: u32) -> impl Iterator<Item = u32> + Clone {
    (1..=max / 2).map(|k| 2 * k)
}

fn ambients(ns: &[u32]) -> Vec<(u32, u32)> {
    ns.iter().flat_map(|&n| ns.iter().map(move |&m| (n, m))).collect()
}

fn up_to(max: u32) -> Vec<(u32, u32)> {
    ambients(&evens(max).collect::<Vec<_>>())
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sets(list: &[FiniteSubgroup]) -> Vec<Vec<Idx>> {
    list.iter().map(|f| f.members().to_vec()).collect()
}

fn criterion_1() -> Outcome {
    let results: Vec<(bool, usize, String)> = up_to(16)
        .par_iter()
        .map(|&(n, m)| {
            let found = sets(&all_subgroups(n, m, None).unwrap());
            let distinct: BTreeSet<_> = found.iter().cloned().collect();
            let oracle: BTreeSet<_> = sets(&brute_force_subgroups(n, m).unwrap()).into_iter().collect();
            (distinct == oracle && distinct.len() == found.len(), found.len(), format!("C{n}xC{m}"))
        })
        .collect();
    let bad: Vec<&str> = results.iter().filter(|r| !r.0).map(|r| r.2.as_str()).collect();
    let total: usize = results.iter().map(|r| r.1).sum();
    outcome(bad.is_empty(), format!("{} ambients, {total} subgroups, mismatches {bad:?}", results.len()))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (n, m) in up_to(16) {
        for f in all_subgroups(n, m, None).unwrap() {
            checked += 1;
            match f.params() {
                Some(p) if p.formula_order() == f.order() => {}
                _ => bad.push(f.id()),
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} subgroups, exact order mismatches {bad:?}"))
}

fn criterion_3() -> Outcome {
    let mut partition_ok = true;
    for (n, m) in up_to(16) {
        let list = all_subgroups(n, m, None).unwrap();
        let counted: usize = ClassTag::ALL.iter().map(|&c| list.iter().filter(|f| f.class() == c).count()).sum();
        partition_ok &= counted == list.len();
    }
    let list: Vec<FiniteSubgroup> = up_to(16).into_iter().flat_map(|(n, m)| all_subgroups(n, m, None).unwrap()).collect();
    let annihilated: Vec<&FiniteSubgroup> = list.iter().filter(|f| f.class().is_annihilated()).collect();
    let zero_fails: Vec<String> = annihilated
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let spec = GridSpec::new(2 * f.ambient().n(), 2 * f.ambient().m()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(300 + i as u64);
            let ok = (0..TRIALS).all(|_| sigma_project(f, &random_grid_function(spec, &mut rng)).unwrap().is_zero());
            (!ok).then(|| f.id())
        })
        .collect();
    let odd: Vec<&FiniteSubgroup> = list.iter().filter(|f| f.class() == ClassTag::O).collect();
    let odd_fails: Vec<String> = odd
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| (!odd_matches_odd_times_a(f, TRIALS, 700 + i as u64).unwrap()).then(|| f.id()))
        .collect();
    outcome(
        partition_ok && zero_fails.is_empty() && odd_fails.is_empty(),
        format!(
            "partition over n,m<=16 {partition_ok}; sigma zero on {}x{TRIALS} E2/E3/E4 cases (n,m<=16), failures {zero_fails:?}; O vs OxA on {} odd groups, failures {odd_fails:?}",
            annihilated.len(),
            odd.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let list: Vec<FiniteSubgroup> = ambients(&[2, 4, 6])
        .into_iter()
        .flat_map(|(n, m)| all_subgroups(n, m, None).unwrap())
        .filter(|f| !f.class().is_annihilated())
        .collect();
    let fails: Vec<String> = list
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let r = verify_invariant_space(f, TRIALS, 400 + i as u64).unwrap();
            (!(r.rho_sigma_identity && r.sigma_rho_identity)).then(|| f.id())
        })
        .collect();
    outcome(fails.is_empty(), format!("{} O/E1 subgroups x {TRIALS} trials each way, failures {fails:?}", list.len()))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut fails = Vec::new();
    for (n, m) in ambients(&[2, 4, 6]) {
        let g = make_ambient(n, m).unwrap();
        for h in all_subgroups(n, m, None).unwrap() {
            checked += 1;
            let r = verify_elementary(&subgroup_domain(&g, &h).unwrap(), &h).unwrap();
            let want = Rational::new(h.kernel_part().len() as i64, h.order() as i64);
            if !(r.condition_a && r.condition_b && r.area == want) {
                fails.push(h.id());
            }
        }
    }
    outcome(fails.is_empty(), format!("{checked} subgroups, (A), (B) and area exact, failures {fails:?}"))
}

fn criterion_6() -> Outcome {
    let list: Vec<FiniteSubgroup> =
        up_to(8).into_iter().flat_map(|(n, m)| all_subgroups(n, m, Some(ClassTag::E1)).unwrap()).collect();
    let fails: Vec<String> = list
        .par_iter()
        .filter_map(|g| (!run_witness(g, DEFAULT_SCALE).unwrap().matches).then(|| g.id()))
        .collect();
    outcome(fails.is_empty(), format!("{} E1 subgroups scanned over the 2x ambient, failures {fails:?}", list.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = [0usize; 4];
    let count = 10_000;
    for _ in 0..count {
        let n = 2 * rng.gen_range(1..=4u32);
        let m = 2 * rng.gen_range(1..=4u32);
        let el = |rng: &mut ChaCha8Rng| {
            GroupElement::from_fractions(rng.gen_range(0..n) as i64, n as i64, rng.gen_range(0..m) as i64, m as i64)
        };
        let (g, h) = (el(&mut rng), el(&mut rng));
        let spec = GridSpec::new(2 * n, 2 * m).unwrap();
        let (r, s) = spec.point(rng.gen_range(0..spec.n1), rng.gen_range(0..spec.n2));
        let moved = (&r + &g.theta.times(2), &s + &g.phi.times(2));
        let lhs = gamma_sign(&g.compose(&h), (&r, &s)).unwrap();
        let rhs = gamma_sign(&g, (&r, &s)).unwrap() * gamma_sign(&h, (&moved.0, &moved.1)).unwrap();
        fails[0] += (lhs != rhs) as usize;
        let v = gamma(&g, (&r, &s)).unwrap();
        fails[1] += (&v * &v != Rational::one()) as usize;
        let f = random_grid_function(spec, &mut rng);
        let gf = dual_apply(&g, &f).unwrap();
        fails[2] += (dual_apply(&h, &gf).unwrap() != dual_apply(&h.compose(&g), &f).unwrap()) as usize;
        fails[3] += (gf.norm_sq() != f.norm_sq()) as usize;
    }
    outcome(
        fails.iter().all(|&c| c == 0),
        format!("{count} triples; failures cocycle {}, square {}, group law {}, norm {}", fails[0], fails[1], fails[2], fails[3]),
    )
}

fn criterion_8() -> Outcome {
    let per_ambient: Vec<(usize, usize, usize, Vec<String>)> = up_to(8)
        .par_iter()
        .map(|&(n, m)| {
            let list = all_subgroups(n, m, None).unwrap();
            let mut bad = Vec::new();
            let mut tables = 0;
            for f in &list {
                let t = character_table(f).unwrap();
                tables += 1;
                let mult = t.characters.len() as u64 == f.order() && t.characters.iter().all(|c| c.is_multiplicative(f));
                if !mult || !verify_orthogonality(&t).unwrap() {
                    bad.push(format!("table {}", f.id()));
                }
            }
            let (mut pairs, mut chars) = (0, 0);
            for g in &list {
                let target = InductionTarget::new(g).unwrap();
                for f in list.iter().filter(|f| f.is_subgroup_of(g)) {
                    pairs += 1;
                    for chi in &character_table(f).unwrap().characters {
                        chars += 1;
                        let r = target.induce(f, chi).unwrap();
                        if !(r.frobenius && r.total == r.index) {
                            bad.push(format!("{} in {} chi {}", f.id(), g.id(), chi.label));
                        }
                    }
                }
            }
            (tables, pairs, chars, bad)
        })
        .collect();
    let tables: usize = per_ambient.iter().map(|r| r.0).sum();
    let pairs: usize = per_ambient.iter().map(|r| r.1).sum();
    let chars: usize = per_ambient.iter().map(|r| r.2).sum();
    let bad: Vec<&String> = per_ambient.iter().flat_map(|r| &r.3).take(10).collect();
    outcome(
        bad.is_empty(),
        format!("{tables} tables; {pairs} pairs F<=G, {chars} (F, G, chi) inductions; failures {bad:?}"),
    )
}

fn criterion_9() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hb"))
            .args(["verify-all", "6", "6"])
            .env_remove("HB_GUARD_MAX")
            .output()
            .expect("hb runs")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(ok, format!("two runs of `hb verify-all 6 6`: {} bytes, exits {} / {}", a.stdout.len(), a.status, b.status))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("enumeration equals brute-force oracle, n,m <= 16", criterion_1, Some(Duration::from_secs(60))),
        ("product order formulas exact", criterion_2, None),
        ("class partition, E2/E3/E4 annihilation, odd groups", criterion_3, None),
        ("rho-sigma identities for O/E1, n,m in {2,4,6}", criterion_4, Some(Duration::from_secs(120))),
        ("elementary domains (A), (B), area identity", criterion_5, None),
        ("witness stabilizer equals E1 subgroup, n,m <= 8", criterion_6, Some(Duration::from_secs(300))),
        ("dual-action algebra on 10^4 random triples", criterion_7, None),
        ("characters, orthogonality, Frobenius reciprocity, n,m <= 8", criterion_8, None),
        ("verify-all 6 6 byte-identical across runs", criterion_9, None),
    ];
    let mut all = true;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = budget.is_none_or(|b| took <= b);
        let pass = out.pass && in_time;
        all &= pass;
        let time_note = match budget {
            Some(b) => format!("{:.1}s of {}s", took.as_secs_f64(), b.as_secs()),
            None => format!("{:.1}s", took.as_secs_f64()),
        };
        println!(
            "{} criterion {}: {name} [{time_note}] {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
