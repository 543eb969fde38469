use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use hatc_core::catalog::{format_group, read_catalog, read_group};
use hatc_core::census::{run_census, write_census, CensusConfig, CensusError, DEFAULT_MAX_ORDER};
use hatc_core::cover::{check_lemma_nq, quotient};
use hatc_core::homology::{minimal_admissible_covers, CoverOptions};
use hatc_core::io::{format_graph, read_graph};
use hatc_core::symmetry::{
    aut_group, classify_nonsimple_tetravalent_et, is_relevant_pair, transitivity_profile,
    GraphAction, NonSimpleForm,
};
use hatc_core::universal::epimorphism_search;
use hatc_core::verify::{verify_tables, Budget};
use hatc_core::{Graph, PermGroup};

#[derive(Parser)]
#[command(
    name = "hatc",
    version,
    about = "Census tools for tetravalent half-arc-transitive graphs with stabiliser D4"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transitivity profile of a graph under its full automorphism group.
    Classify { graph: PathBuf },
    /// Generators and order of the automorphism group, in catalog format.
    Autgroup { graph: PathBuf },
    /// Quotient of a graph by a group acting on it.
    Quotient { graph: PathBuf, group: PathBuf },
    /// Minimal admissible elementary abelian covers of a relevant pair.
    Covers {
        graph: PathBuf,
        group: PathBuf,
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Epimorphisms from the universal group onto a permutation group.
    Episearch { group: PathBuf },
    /// Runs the level-by-level census and writes its files.
    Census {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Check order bookkeeping and round trips on every cover.
        #[arg(long)]
        check: bool,
    },
    /// Compares computed values against the known tables.
    Verify {
        #[arg(long, value_parser = parse_budget)]
        budget: Budget,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    s.parse()
}

enum Outcome {
    Ok,
    VerificationFailed,
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(path).with_context(|| format!("reading graph {}", path.display()))
}

/// A group file acts on vertices (simple graphs) or on darts.
fn load_action(g: &Graph, path: &Path) -> Result<GraphAction> {
    let cg = read_group(path).with_context(|| format!("reading group {}", path.display()))?;
    let gens = cg.group.generators().to_vec();
    let order = Some(cg.group.order());
    let degree = cg.group.degree();
    let action = if g.is_simple() && degree == g.vertex_count() {
        GraphAction::from_vertex_perms(g, gens, order)
    } else if degree == g.dart_count() {
        GraphAction::from_dart_perms(g, gens, order)
    } else {
        bail!(
            "group {} has degree {degree}, which matches neither the {} vertices nor the {} darts",
            cg.name,
            g.vertex_count(),
            g.dart_count()
        );
    };
    action.with_context(|| format!("group {} does not act on the graph", cg.name))
}

fn classify(path: &Path) -> Result<Outcome> {
    let g = load_graph(path)?;
    let aut = aut_group(&g)?;
    let prof = transitivity_profile(&g, &aut);
    println!(
        "|V|={} |D|={} simple={}",
        g.vertex_count(),
        g.dart_count(),
        g.is_simple()
    );
    println!("|Aut|={}", aut.order());
    println!(
        "vertex_transitive={} edge_transitive={} arc_transitive={}",
        prof.vertex_transitive, prof.edge_transitive, prof.dart_transitive
    );
    println!("classification={:?}", prof.classification);
    if g.is_connected() && g.is_tetravalent() && !g.is_simple() && prof.edge_transitive {
        match classify_nonsimple_tetravalent_et(&g, &aut)? {
            NonSimpleForm::DoubledCycle(n, _) => println!("form=doubled_cycle({n})"),
            NonSimpleForm::FourSemiedges(_) => println!("form=four_semiedges"),
            NonSimpleForm::NotApplicable => {}
        }
    }
    Ok(Outcome::Ok)
}

fn autgroup(path: &Path) -> Result<Outcome> {
    let g = load_graph(path)?;
    let aut = aut_group(&g)?;
    let perms = if g.is_simple() {
        aut.vertex_perms()
    } else {
        aut.dart_perms()
    };
    let degree = if g.is_simple() {
        g.vertex_count()
    } else {
        g.dart_count()
    };
    let group = PermGroup::with_order(degree, perms.to_vec(), aut.order())?;
    print!("{}", format_group("Aut", &group));
    Ok(Outcome::Ok)
}

fn quotient_cmd(graph: &Path, group: &Path) -> Result<Outcome> {
    let g = load_graph(graph)?;
    let n = load_action(&g, group)?;
    let check = check_lemma_nq(&g, &n)?;
    let (q, _) = quotient(&g, &n)?;
    println!(
        "# semiregular={} valence_preserving={} covering={}",
        check.semiregular, check.valence_preserving, check.covering
    );
    print!("{}", format_graph(&q));
    Ok(Outcome::Ok)
}

fn covers(
    graph: &Path,
    group: &Path,
    max_order: usize,
    prime: Option<u32>,
    dim: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let g = load_graph(graph)?;
    let a = load_action(&g, group)?;
    if !is_relevant_pair(&g, &a) {
        bail!("the group does not form a relevant pair with the graph");
    }
    let opts = CoverOptions {
        primes: prime.map(|p| vec![p]),
        dim,
        seed,
    };
    let found = minimal_admissible_covers(&g, &a, max_order, &opts)?;
    let base_id = graph
        .file_stem()
        .map_or_else(|| "base".to_string(), |s| s.to_string_lossy().into_owned());
    for c in &found {
        println!("{}", c.record(&base_id));
    }
    println!("covers={}", found.len());
    Ok(Outcome::Ok)
}

fn episearch(group: &Path) -> Result<Outcome> {
    let cg = read_group(group).with_context(|| format!("reading group {}", group.display()))?;
    let ws = epimorphism_search(&cg.group);
    for w in &ws {
        let n = match w.coset_graph(&cg.group) {
            Ok((g, _)) => g.vertex_count(),
            Err(_) => 0,
        };
        println!("{}", w.record(&cg.name, n));
    }
    println!("witnesses={}", ws.len());
    Ok(Outcome::Ok)
}

fn census(
    catalog: &Path,
    max_order: usize,
    levels: Option<usize>,
    seed: u64,
    out: &Path,
    check: bool,
) -> Result<Outcome> {
    if max_order == 0 {
        bail!("--max-order must be at least 1");
    }
    let groups = read_catalog(catalog)?;
    let mut cfg = CensusConfig::new(max_order, groups);
    cfg.max_level = levels;
    cfg.seed = seed;
    cfg.check_covers = check;
    let c = match run_census(&cfg) {
        Ok(c) => c,
        Err(e @ CensusError::Bookkeeping { .. }) => {
            eprintln!("error: {e}");
            return Ok(Outcome::VerificationFailed);
        }
        Err(e) => return Err(e.into()),
    };
    write_census(&c, out).with_context(|| format!("writing census to {}", out.display()))?;
    print!("{}", c.summary.render());
    Ok(Outcome::Ok)
}

fn verify(budget: Budget, seed: u64) -> Result<Outcome> {
    let report = verify_tables(budget, seed)?;
    print!("{}", report.render());
    Ok(if report.all_passed() {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HATC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("HATC_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            bail!("HATC_THREADS must be a positive integer, got `{v}`");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Classify { graph } => classify(&graph),
        Command::Autgroup { graph } => autgroup(&graph),
        Command::Quotient { graph, group } => quotient_cmd(&graph, &group),
        Command::Covers {
            graph,
            group,
            max_order,
            prime,
            dim,
            seed,
        } => covers(&graph, &group, max_order, prime, dim, seed),
        Command::Episearch { group } => episearch(&group),
        Command::Census {
            catalog,
            max_order,
            levels,
            seed,
            out,
            check,
        } => census(&catalog, max_order, levels, seed, &out, check),
        Command::Verify { budget, seed } => verify(budget, seed),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on bad usage, which is reserved for verification failures here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
