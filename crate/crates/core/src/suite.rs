//! One-shot verification over every even ambient up to given bounds.
//! The report holds no timings, so equal inputs give equal JSON.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{subgroup_domain, verify_elementary};
use crate::error::{Error, Result};
use crate::groups::{all_subgroups, brute_force_subgroups, make_ambient, ClassTag, FiniteSubgroup, Idx};
use crate::invariantspace::{odd_matches_odd_times_a, verify_invariant_space};
use crate::repr::{character_table, product_rule_holds, verify_orthogonality, InductionTarget};
use crate::witness::{run_witness, DEFAULT_SCALE};

/// Largest `max_n · max_m` accepted without an explicit override.
pub const SUITE_GUARD: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub max_n: u32,
    pub max_m: u32,
    pub trials: usize,
    pub seed: u64,
    pub guard: u64,
}

impl SuiteConfig {
    pub fn new(max_n: u32, max_m: u32) -> Self {
        SuiteConfig { max_n, max_m, trials: 50, seed: 2024, guard: SUITE_GUARD }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: usize,
    pub passed: usize,
}

impl Tally {
    fn add(&mut self, other: Tally) {
        self.checked += other.checked;
        self.passed += other.passed;
    }

    pub fn pass(&self) -> bool {
        self.checked == self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmbientSummary {
    pub ambient: String,
    pub subgroups: usize,
    pub cyclic: usize,
    pub two_generator: usize,
    pub classes: BTreeMap<String, usize>,
    pub checks: BTreeMap<&'static str, Tally>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub bounds: [u32; 2],
    pub trials: usize,
    pub seed: u64,
    pub ambients: Vec<AmbientSummary>,
    pub checks: BTreeMap<&'static str, Tally>,
    /// `check: subgroup` for each failure.
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Default)]
struct Sheet {
    checks: BTreeMap<&'static str, Tally>,
    failures: Vec<String>,
}

impl Sheet {
    fn record(&mut self, name: &'static str, what: &str, ok: bool) {
        let t = self.checks.entry(name).or_default();
        t.checked += 1;
        if ok {
            t.passed += 1;
        } else {
            self.failures.push(format!("{name}: {what}"));
        }
    }

    /// Errors count as failures of the check that raised them.
    fn record_result(&mut self, name: &'static str, what: &str, r: Result<bool>) {
        match r {
            Ok(ok) => self.record(name, what, ok),
            Err(e) => {
                self.record(name, what, false);
                let last = self.failures.last_mut().expect("just pushed");
                last.push_str(&format!(" ({e})"));
            }
        }
    }
}

fn element_sets(list: &[FiniteSubgroup]) -> Vec<Vec<Idx>> {
    list.iter().map(|f| f.members().to_vec()).collect()
}

fn per_subgroup(f: &FiniteSubgroup, ambient: &FiniteSubgroup, cfg: &SuiteConfig, seed: u64) -> Sheet {
    let mut s = Sheet::default();
    let id = f.id();
    if let Some(p) = f.params() {
        s.record("order_formula", &id, p.formula_order() == f.order());
    }
    s.record_result(
        "domains",
        &id,
        subgroup_domain(ambient, f).and_then(|e| verify_elementary(&e, f)).map(|r| r.pass),
    );
    let name = if f.class().is_annihilated() { "annihilation" } else { "invariants" };
    s.record_result(name, &id, verify_invariant_space(f, cfg.trials, seed).map(|r| r.pass));
    if f.class() == ClassTag::O {
        s.record_result("odd_rationale", &id, odd_matches_odd_times_a(f, cfg.trials, seed));
    }
    if f.class() == ClassTag::E1 {
        s.record_result("witness", &id, run_witness(f, DEFAULT_SCALE).map(|r| r.matches));
    }
    let chars = character_table(f).and_then(|t| {
        Ok(t.characters.len() as u64 == f.order()
            && t.characters.iter().all(|c| c.is_multiplicative(f))
            && verify_orthogonality(&t)?
            && product_rule_holds(f)?)
    });
    s.record_result("characters", &id, chars);
    s
}

fn induction_sheet(list: &[FiniteSubgroup]) -> Sheet {
    let mut s = Sheet::default();
    for g in list {
        let target = match InductionTarget::new(g) {
            Ok(t) => t,
            Err(e) => {
                s.record_result("induction", &g.id(), Err(e));
                continue;
            }
        };
        for f in list.iter().filter(|f| f.is_subgroup_of(g)) {
            let pairs = character_table(f).and_then(|t| {
                t.characters.iter().try_fold(true, |ok, chi| Ok(ok && target.induce(f, chi)?.pass))
            });
            s.record_result("induction", &format!("{} in {}", f.id(), g.id()), pairs);
        }
    }
    s
}

fn ambient_summary(n: u32, m: u32, cfg: &SuiteConfig) -> Result<(AmbientSummary, Vec<String>)> {
    let ambient = make_ambient(n, m)?;
    let list = all_subgroups(n, m, None)?;
    let oracle = brute_force_subgroups(n, m)?;
    let mut sheet = Sheet::default();

    let found = element_sets(&list);
    let distinct: BTreeSet<Vec<Idx>> = found.iter().cloned().collect();
    let want: BTreeSet<Vec<Idx>> = element_sets(&oracle).into_iter().collect();
    let label = ambient.ambient().to_string();
    sheet.record("enumeration", &label, distinct == want && distinct.len() == found.len());

    let mut classes: BTreeMap<String, usize> = ClassTag::ALL.iter().map(|c| (c.to_string(), 0)).collect();
    for f in &list {
        *classes.get_mut(&f.class().to_string()).expect("all tags") += 1;
    }
    sheet.record("class_partition", &label, classes.values().sum::<usize>() == list.len());

    let sheets: Vec<Sheet> = list
        .par_iter()
        .enumerate()
        .map(|(i, f)| per_subgroup(f, &ambient, cfg, cfg.seed.wrapping_add(i as u64)))
        .collect();
    for s in sheets.into_iter().chain([induction_sheet(&list)]) {
        for (k, t) in s.checks {
            sheet.checks.entry(k).or_default().add(t);
        }
        sheet.failures.extend(s.failures);
    }

    let cyclic = list.iter().filter(|f| f.params().is_some_and(|p| !p.is_two_generator())).count();
    let summary = AmbientSummary {
        ambient: label,
        subgroups: list.len(),
        cyclic,
        two_generator: list.len() - cyclic,
        classes,
        checks: sheet.checks,
    };
    Ok((summary, sheet.failures))
}

pub fn verify_all(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let size = cfg.max_n as u64 * cfg.max_m as u64;
    if size > cfg.guard {
        return Err(Error::Size { what: "max_n * max_m", value: size, limit: cfg.guard });
    }
    if cfg.max_n < 2 || cfg.max_m < 2 {
        return Err(Error::Domain(format!("bounds {}x{} contain no even ambient", cfg.max_n, cfg.max_m)));
    }
    let pairs: Vec<(u32, u32)> = (1..=cfg.max_n / 2)
        .flat_map(|a| (1..=cfg.max_m / 2).map(move |b| (2 * a, 2 * b)))
        .collect();
    let results = pairs
        .iter()
        .map(|&(n, m)| ambient_summary(n, m, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut checks: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut ambients = Vec::new();
    for (a, f) in results {
        for (k, t) in &a.checks {
            checks.entry(k).or_default().add(*t);
        }
        failures.extend(f);
        ambients.push(a);
    }
    let pass = checks.values().all(Tally::pass);
    Ok(SuiteReport { bounds: [cfg.max_n, cfg.max_m], trials: cfg.trials, seed: cfg.seed, ambients, checks, failures, pass })
}
