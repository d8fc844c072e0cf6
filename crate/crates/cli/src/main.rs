//! `hb`: enumeration, domains, witnesses and characters of the finite
//! little groups, as JSON on stdout.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hb_core::dualaction::set_gamma_fault;
use hb_core::groups::{brute_force_subgroups_with_limit, SubgroupRecord, BRUTE_FORCE_LIMIT};
use hb_core::suite::SUITE_GUARD;
use hb_core::{
    all_subgroups, character_table, induce_finite, induced_descriptor, make_ambient, run_witness,
    subgroup_domain, verify_all, verify_elementary, verify_orthogonality, CharLabel, ClassTag, ElementaryReport,
    Error, FiniteSubgroup, RectUnion, SuiteConfig,
};

const INDEX_HELP: &str = "Subgroup indices are positions in the enumeration of C_N x C_M: \
cyclic subgroups first, then two-generator ones, each block sorted by element set \
(elements as index pairs (i, j) standing for (i/N, j/M)). `hb subgroups N M` lists them.";

const GUARD_ENV: &str = "HB_GUARD_MAX";

#[derive(Parser)]
#[command(name = "hb", version, about = "Finite little groups of C_N x C_M: enumeration, domains, witnesses, characters")]
#[command(after_long_help = INDEX_HELP)]
struct Cli {
    /// Human-readable output instead of compact JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Ambient {
    /// First cyclic order (even).
    n: u32,
    /// Second cyclic order (even).
    m: u32,
}

#[derive(Subcommand)]
enum Command {
    /// List subgroups of C_N x C_M.
    #[command(after_long_help = INDEX_HELP)]
    Subgroups {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long, conflicts_with = "two_gen")]
        cyclic: bool,
        #[arg(long)]
        two_gen: bool,
        /// Keep one class: O, E1, E2, E3 or E4.
        #[arg(long, value_parser = parse_class)]
        class: Option<ClassTag>,
        /// Compare against brute-force closure enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Elementary domain of a subgroup.
    #[command(after_long_help = INDEX_HELP)]
    Domain {
        #[command(flatten)]
        ambient: Ambient,
        index: usize,
        /// Check both tiling conditions and the area identity.
        #[arg(long)]
        verify: bool,
    },
    /// Build the witness function of an E1 subgroup and scan for its stabilizer.
    #[command(after_long_help = INDEX_HELP)]
    Witness {
        #[command(flatten)]
        ambient: Ambient,
        index: usize,
        /// Scan C_{sN} x C_{sM}.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        ambient_scale: u32,
    },
    /// Character table over the stored decomposition.
    #[command(after_long_help = INDEX_HELP)]
    Characters {
        #[command(flatten)]
        ambient: Ambient,
        index: usize,
    },
    /// Induce a character of subgroup F up to G and check reciprocity.
    #[command(after_long_help = INDEX_HELP)]
    Induce {
        #[command(flatten)]
        ambient: Ambient,
        f_index: usize,
        g_index: usize,
        /// `nu` or `nu1,nu2`.
        label: String,
    },
    /// Induced-representation descriptor for an E1 little group.
    #[command(after_long_help = INDEX_HELP)]
    Descriptor {
        #[command(flatten)]
        ambient: Ambient,
        index: usize,
        label: String,
    },
    /// Run every check over all even ambients up to the bounds.
    VerifyAll {
        max_n: u32,
        max_m: u32,
        /// Random functions per invariant-space check.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, hide = true)]
        tamper_gamma: bool,
    },
}

fn parse_class(s: &str) -> Result<ClassTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parameter(_) | Error::Size { .. } | Error::Input(_) | Error::Label { .. } => 2,
            Error::Class { .. }
            | Error::Containment { .. }
            | Error::Decomposition
            | Error::Unsupported(_)
            | Error::Grid(_)
            | Error::Boundary(_) => 3,
            Error::OrderMismatch { .. } | Error::Impossible(_) | Error::Table(_) => 4,
        };
        Fail { code, message: e.to_string() }
    }
}

fn usage(message: String) -> Fail {
    Fail { code: 2, message }
}

struct Output {
    text: String,
    ok: bool,
}

fn json(value: &impl Serialize, pretty: bool, ok: bool) -> Output {
    let text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) };
    Output { text: text.expect("report serializes"), ok }
}

fn guard(default: u64) -> Result<u64, Fail> {
    match std::env::var(GUARD_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{GUARD_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(default),
    }
}

fn check_size(a: &Ambient) -> Result<(), Fail> {
    let limit = guard(BRUTE_FORCE_LIMIT)?;
    let size = a.n as u64 * a.m as u64;
    if size > limit {
        return Err(Error::Size { what: "n * m", value: size, limit }.into());
    }
    Ok(())
}

fn subgroups_of(a: &Ambient) -> Result<Vec<FiniteSubgroup>, Fail> {
    check_size(a)?;
    Ok(all_subgroups(a.n, a.m, None)?)
}

fn pick(list: &[FiniteSubgroup], index: usize) -> Result<&FiniteSubgroup, Fail> {
    list.get(index)
        .ok_or_else(|| usage(format!("subgroup index {index} out of range: {} subgroups", list.len())))
}

#[derive(Serialize)]
struct Listed {
    index: usize,
    id: String,
    #[serde(flatten)]
    record: SubgroupRecord,
}

#[derive(Serialize)]
struct OracleCounts {
    enumerated: usize,
    cyclic: usize,
    two_generator: usize,
    oracle: usize,
    duplicates: usize,
}

#[derive(Serialize)]
struct OracleReport {
    agree: bool,
    counts: OracleCounts,
}

#[derive(Serialize)]
struct DomainOutput {
    index: usize,
    subgroup: String,
    domain: RectUnion,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ElementaryReport>,
}

#[derive(Serialize)]
struct CharactersOutput {
    index: usize,
    orthogonal: bool,
    #[serde(flatten)]
    table: hb_core::CharacterTable,
}

fn cmd_subgroups(
    a: &Ambient,
    cyclic: bool,
    two_gen: bool,
    class: Option<ClassTag>,
    oracle: bool,
    pretty: bool,
) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let n_cyclic = list.iter().filter(|f| f.params().is_some_and(|p| !p.is_two_generator())).count();
    if oracle {
        let brute = brute_force_subgroups_with_limit(a.n, a.m, guard(BRUTE_FORCE_LIMIT)?)?;
        let mut sets: Vec<&[(u32, u32)]> = list.iter().map(|f| f.members()).collect();
        sets.sort();
        let before = sets.len();
        sets.dedup();
        let mut want: Vec<&[(u32, u32)]> = brute.iter().map(|f| f.members()).collect();
        want.sort();
        let report = OracleReport {
            agree: sets == want && before == sets.len(),
            counts: OracleCounts {
                enumerated: list.len(),
                cyclic: n_cyclic,
                two_generator: list.len() - n_cyclic,
                oracle: brute.len(),
                duplicates: before - sets.len(),
            },
        };
        let ok = report.agree;
        return Ok(json(&report, pretty, ok));
    }
    let rows: Vec<Listed> = list
        .iter()
        .enumerate()
        .filter(|(i, _)| !(cyclic && *i >= n_cyclic) && !(two_gen && *i < n_cyclic))
        .filter(|(_, f)| class.is_none_or(|c| f.class() == c))
        .map(|(index, f)| Listed { index, id: f.id(), record: f.to_record() })
        .collect();
    if pretty {
        let mut t = format!("{:>5}  {:>5}  {:<5}  generators\n", "index", "order", "class");
        for r in &rows {
            let gens: Vec<String> = r.record.generators.iter().map(|g| g.to_string()).collect();
            writeln!(t, "{:>5}  {:>5}  {:<5}  {}", r.index, r.record.order, r.record.class.to_string(), gens.join(" ")).unwrap();
        }
        return Ok(Output { text: t.trim_end().to_string(), ok: true });
    }
    Ok(json(&rows, false, true))
}

fn cmd_domain(a: &Ambient, index: usize, verify: bool, pretty: bool) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let h = pick(&list, index)?;
    let domain = subgroup_domain(&make_ambient(a.n, a.m)?, h)?;
    let report = if verify { Some(verify_elementary(&domain, h)?) } else { None };
    let ok = report.as_ref().is_none_or(|r| r.pass);
    Ok(json(&DomainOutput { index, subgroup: h.id(), domain, report }, pretty, ok))
}

fn cmd_witness(a: &Ambient, index: usize, scale: u32, pretty: bool) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let g = pick(&list, index)?;
    check_size(&Ambient { n: a.n * scale, m: a.m * scale })?;
    let report = run_witness(g, scale)?;
    let ok = report.matches;
    Ok(json(&report, pretty, ok))
}

fn cmd_characters(a: &Ambient, index: usize, pretty: bool) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let f = pick(&list, index)?;
    let table = character_table(f)?;
    let orthogonal = verify_orthogonality(&table)?;
    if pretty {
        let mut t = format!("{}\n{:>8}", table.group, "label");
        for g in &table.elements {
            write!(t, "  {:>12}", g.to_string()).unwrap();
        }
        for c in &table.characters {
            write!(t, "\n{:>8}", c.label.to_string()).unwrap();
            for p in &c.phases {
                write!(t, "  {:>12}", p.to_string()).unwrap();
            }
        }
        return Ok(Output { text: t, ok: orthogonal });
    }
    Ok(json(&CharactersOutput { index, orthogonal, table }, false, orthogonal))
}

fn label_of(s: &str) -> Result<CharLabel, Fail> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn cmd_induce(a: &Ambient, fi: usize, gi: usize, label: &str, pretty: bool) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let (f, g) = (pick(&list, fi)?, pick(&list, gi)?);
    let label = label_of(label)?;
    let table = character_table(f)?;
    let chi = table
        .get(label)
        .ok_or_else(|| usage(format!("{f} has no character labelled {label}", f = f.id())))?;
    let report = induce_finite(f, g, chi)?;
    let ok = report.pass;
    Ok(json(&report, pretty, ok))
}

fn cmd_descriptor(a: &Ambient, index: usize, label: &str, pretty: bool) -> Result<Output, Fail> {
    let list = subgroups_of(a)?;
    let g = pick(&list, index)?;
    let d = induced_descriptor(g, label_of(label)?)?;
    Ok(json(&d, pretty, true))
}

fn cmd_verify_all(max_n: u32, max_m: u32, trials: usize, tamper: bool, pretty: bool) -> Result<Output, Fail> {
    let mut cfg = SuiteConfig::new(max_n, max_m);
    cfg.trials = trials;
    cfg.guard = guard(SUITE_GUARD)?;
    if tamper {
        set_gamma_fault(true);
    }
    let report = verify_all(&cfg)?;
    let ok = report.pass;
    Ok(json(&report, pretty, ok))
}

fn run(cli: Cli) -> Result<Output, Fail> {
    let p = cli.pretty;
    match cli.command {
        Command::Subgroups { ambient, cyclic, two_gen, class, oracle } => {
            cmd_subgroups(&ambient, cyclic, two_gen, class, oracle, p)
        }
        Command::Domain { ambient, index, verify } => cmd_domain(&ambient, index, verify, p),
        Command::Witness { ambient, index, ambient_scale } => cmd_witness(&ambient, index, ambient_scale, p),
        Command::Characters { ambient, index } => cmd_characters(&ambient, index, p),
        Command::Induce { ambient, f_index, g_index, label } => cmd_induce(&ambient, f_index, g_index, &label, p),
        Command::Descriptor { ambient, index, label } => cmd_descriptor(&ambient, index, &label, p),
        Command::VerifyAll { max_n, max_m, trials, tamper_gamma } => {
            cmd_verify_all(max_n, max_m, trials, tamper_gamma, p)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(f) => {
            eprintln!("hb: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
