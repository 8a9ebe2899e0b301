use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;

use reversal_bias::lab::{self, CellOutcome, Verdict, VerifyConfig};
use reversal_bias::search::{fixture_by_name, SearchOutcome, WitnessBundle};
use reversal_bias::{
    majority_graph, profile_threshold, BiasType, FixtureId, Profile, SearchMode,
    SearchStrategy,
};

mod args;

use args::{Cli, Command, FixturesCommand, Format, ProfileSource};

const EXIT_CONTRADICTION: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("revbias: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("revbias: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

fn load_profile(src: &ProfileSource) -> anyhow::Result<Profile> {
    if let Some(name) = &src.fixture {
        return Ok(fixture_by_name(name, src.param)?);
    }
    let path = src.file.as_deref().expect("clap requires a file or a fixture");
    let text = read_input(path)?;
    Profile::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn print_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Audit(a) => {
            let p = load_profile(&a.source)?;
            let out = lab::audit(&p, &a.rules, &a.mus)?;
            if a.json {
                print_json(&out)?;
            } else {
                println!("h = {}, n = {}, mu(p) = {}, mu(p^r) = {}", out.h, out.n, out.mu_p, out.mu_pr);
                println!("{:<10} {:<16} {:<16} {:<6} {:<6} {:<6}", "rule", "C(p)", "C(p^r)", "type1", "type2", "type3");
                for r in &out.reports {
                    println!(
                        "{:<10} {:<16} {:<16} {:<6} {:<6} {:<6}",
                        r.rule.name(),
                        r.selection_p.to_string(),
                        r.selection_pr.to_string(),
                        yes(r.type1),
                        yes(r.type2),
                        yes(r.type3)
                    );
                }
                for (side, graphs) in [("p", &out.graphs), ("p^r", &out.graphs_reversal)] {
                    for g in graphs {
                        println!(
                            "{side} at mu = {}: {} arcs, dominant set {}, acyclic {}",
                            g.mu,
                            g.arcs.len(),
                            g.dominant_set,
                            yes(g.analysis.acyclic)
                        );
                    }
                }
            }
            Ok(0)
        }

        Command::Verify(v) => {
            let js = v
                .js
                .0
                .iter()
                .map(|&j| BiasType::from_index(u8::try_from(j).unwrap_or(0)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut cfg = VerifyConfig {
                strategy: v.strategy,
                budget: v.budget,
                samples: v.samples,
                seed: v.seed,
                neutral: !v.no_neutral,
                timing: v.timing,
            };
            if v.long_run {
                cfg = cfg.long_run();
            }
            let report = lab::verify(&v.hs.0, &v.ns.0, &js, &cfg)?;
            emit_verify(&report, &v.format)?;
            Ok(match report.exit_code() {
                0 => 0,
                2 => EXIT_CONTRADICTION,
                _ => EXIT_INCONCLUSIVE,
            })
        }

        Command::Graph(g) => {
            let mut p = load_profile(&g.source)?;
            if g.reversed {
                p = p.reversed();
            }
            let mu = g.mu.unwrap_or_else(|| profile_threshold(&p));
            let summary = lab::graph_summary(&p, mu)?;
            if let Some(path) = &g.dot {
                let dot = majority_graph(&p, mu)?.to_dot(None);
                if path == Path::new("-") {
                    print!("{dot}");
                    return Ok(0);
                }
                fs::write(path, dot).with_context(|| format!("cannot write {}", path.display()))?;
            }
            #[derive(Serialize)]
            struct GraphOutput {
                h: usize,
                n: usize,
                reversed: bool,
                profile_threshold: usize,
                #[serde(flatten)]
                summary: lab::GraphSummary,
            }
            print_json(&GraphOutput {
                h: p.h(),
                n: p.n(),
                reversed: g.reversed,
                profile_threshold: profile_threshold(&p),
                summary,
            })?;
            Ok(0)
        }

        Command::Compare(c) => {
            let [a, b] = c.rules[..] else {
                bail!("--rules takes exactly two rules");
            };
            let strategy = match c.strategy {
                SearchMode::Sampled => SearchStrategy::sampled(c.budget, c.seed),
                SearchMode::Exhaustive => SearchStrategy::exhaustive(c.budget).with_neutral(false),
                SearchMode::Constructive => bail!("compare supports exhaustive and sampled"),
            };
            let r = lab::compare_rules(c.h, c.n, a, b, &strategy)?;
            if c.json {
                print_json(&r)?;
            } else {
                let verdict = match r.verdict {
                    Verdict::Equal => "equal",
                    Verdict::Differ => "differ",
                    Verdict::Inconclusive => "inconclusive",
                };
                println!("{a} vs {b} at (h, n) = ({}, {}): {verdict}", c.h, c.n);
                println!("{} profiles examined ({})", r.examined, r.mode);
                if let Some(total) = r.profiles_covered {
                    println!("{total} voter-labelled profiles covered");
                }
                if let Some(d) = &r.first_difference {
                    println!("{a} selects {}, {b} selects {} on\n{}", d.selection_a, d.selection_b, d.profile);
                }
            }
            Ok(if r.verdict == Verdict::Inconclusive { EXIT_INCONCLUSIVE } else { 0 })
        }

        Command::Witness(w) => {
            let strategy = match w.strategy {
                SearchMode::Constructive => SearchStrategy::constructive(),
                SearchMode::Exhaustive => SearchStrategy::exhaustive(w.budget).with_neutral(!w.no_neutral),
                SearchMode::Sampled => SearchStrategy::sampled(w.budget, w.seed),
            };
            let outcome = reversal_bias::find_witness(w.h, w.n, w.j, reversal_bias::Rule::Minimax, &strategy)?;
            match outcome {
                SearchOutcome::Found(found) => {
                    let bundle = found.bundle(Some(&strategy));
                    let text = serde_json::to_string_pretty(&bundle)? + "\n";
                    match &w.out {
                        Some(path) => fs::write(path, text)
                            .with_context(|| format!("cannot write {}", path.display()))?,
                        None => print!("{text}"),
                    }
                    Ok(0)
                }
                SearchOutcome::CertifiedImmune { examined } => {
                    println!("certified immune: no witness among {examined} profiles");
                    Ok(0)
                }
                SearchOutcome::Inconclusive { reason, .. } => {
                    eprintln!("inconclusive: {reason}");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }

        Command::Certify { bundle } => {
            let text = read_input(&bundle)?;
            let b: WitnessBundle = serde_json::from_str(&text).context("malformed witness bundle")?;
            let w = b.to_witness()?;
            if w.certify() {
                println!("certified: bias type {} for {} at (h, n) = ({}, {})", w.j, w.rule, w.h, w.n);
                Ok(0)
            } else {
                println!("NOT certified: re-audit disagrees with the bundle");
                Ok(EXIT_CONTRADICTION)
            }
        }

        Command::Fixtures(FixturesCommand::List { json }) => {
            #[derive(Serialize)]
            struct Entry {
                name: &'static str,
                parameter: Option<&'static str>,
                h: String,
                n: String,
            }
            let entries: Vec<Entry> = FixtureId::ALL
                .iter()
                .map(|id| {
                    let (h, n) = id.shape(0);
                    let show = |v: usize, name: &str| match id.parameter() {
                        Some(p) if p == name => p.to_string(),
                        _ => v.to_string(),
                    };
                    Entry {
                        name: id.name(),
                        parameter: id.parameter(),
                        h: show(h, "h"),
                        n: show(n, "n"),
                    }
                })
                .collect();
            if json {
                print_json(&entries)?;
            } else {
                for e in &entries {
                    println!("{:<16} h = {:<3} n = {}", e.name, e.h, e.n);
                }
            }
            Ok(0)
        }

        Command::Fixtures(FixturesCommand::Emit { name, param }) => {
            println!("{}", fixture_by_name(&name, param)?.to_text());
            Ok(0)
        }

        Command::Thresholds(t) => {
            let rows = lab::thresholds(&t.hs.0, &t.ns.0)?;
            if t.format.json {
                print_json(&rows)?;
            } else if t.format.csv {
                print_csv(&rows)?;
            } else {
                println!("{:>4} {:>4} {:>5} {:>5} {:>5}", "h", "n", "mu0", "mu_a", "mu_G");
                for r in &rows {
                    println!("{:>4} {:>4} {:>5} {:>5} {:>5}", r.h, r.n, r.mu0, r.mu_a, r.mu_g);
                }
            }
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct CellRow {
    h: usize,
    n: usize,
    j: u8,
    expected_immune: bool,
    method: lab::Method,
    outcome: CellOutcome,
    profiles_examined: u64,
    kramer_mismatches: Option<u64>,
    elapsed: Option<f64>,
}

fn emit_verify(report: &lab::VerifyReport, format: &Format) -> anyhow::Result<()> {
    if format.json {
        return print_json(report);
    }
    let rows = report.cells.iter().map(|c| CellRow {
        h: c.h,
        n: c.n,
        j: c.j.index(),
        expected_immune: c.expected,
        method: c.method,
        outcome: c.outcome,
        profiles_examined: c.profiles_examined,
        kramer_mismatches: c.kramer_mismatches,
        elapsed: c.elapsed,
    });
    if format.csv {
        return print_csv(rows);
    }
    println!(
        "{:>3} {:>3} {:>2}  {:<8} {:<13} {:<17} {:>12}",
        "h", "n", "j", "immune", "method", "outcome", "examined"
    );
    for c in &report.cells {
        let outcome = serde_json::to_value(c.outcome)?;
        let method = serde_json::to_value(c.method)?;
        println!(
            "{:>3} {:>3} {:>2}  {:<8} {:<13} {:<17} {:>12}{}",
            c.h,
            c.n,
            c.j,
            yes(c.expected),
            method.as_str().unwrap_or_default(),
            outcome.as_str().unwrap_or_default(),
            c.profiles_examined,
            if c.contradicts() { "  CONTRADICTION" } else { "" }
        );
    }
    let s = report.summary;
    println!(
        "{} cells: {} consistent, {} contradictions, {} inconclusive",
        s.cells, s.consistent, s.contradictions, s.inconclusive
    );
    Ok(())
}
