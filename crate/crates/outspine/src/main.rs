use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use outspine::counting::{build_context, count_i, lipschitz_audit};
use outspine::covers::{minimal_subtree_collapse_check, realizes, stallings_core, FreeFactorSystem};
use outspine::format::{
    parse_automorphism, parse_endo, parse_graph, parse_marked, parse_splitting, parse_system, parse_word, print_endo,
    print_graph, print_marked, print_path,
};
use outspine::graph::{collapse, enumerate_blowups};
use outspine::marked::MarkedGraph;
use outspine::retract_aut::{self, embed_j, retract_r, PointedMarkedGraph};
use outspine::retract_split::{in_cvkt, retract_big_r, retraction_audit};
use outspine::spine::{bfs_distance, fold_path};
use outspine::witness::{Witness, WitnessCase, WitnessParams};
use outspine::word::{cyclic_reduce, format_symbols, CyclicWord, Endo, Word};
use outspine::{selftest, Error, Result};

/// Marked graphs, Stallings cores, crossing counts and spine retractions.
///
/// Graph files use `graph { v: v0 v1; e: e1 v0 v1; ... }`, optionally
/// followed by `marking { a1 = e1; ... }` and `basepoint: v0`. Words are
/// written `a1 a2^-1`; maps as `a1 a2; a2` (images in order) or
/// `a1 -> a1 a2, a2 -> a2`; free factor systems as `a1, a2 | a3`.
#[derive(Parser)]
#[command(name = "outspine", version)]
struct Cli {
    /// Also write the output to this directory, one file per command
    /// (defaults to $OUTSPINE_OUTPUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Freely reduce a word, or cyclically reduce it with --cyclic.
    Reduce {
        word: String,
        #[arg(long)]
        cyclic: bool,
    },
    /// Apply an endomorphism to a word.
    Apply {
        #[arg(long)]
        map: String,
        word: String,
    },
    /// Print f∘g.
    Compose { f: String, g: String },
    /// Decide whether a map is an automorphism and print its inverse.
    IsAuto { map: String },
    /// Collapse a forest (edges like `e1 e3`) in a graph or marked graph.
    Collapse {
        file: PathBuf,
        #[arg(long)]
        forest: String,
    },
    /// List the blow-ups of a graph.
    Blowups { file: PathBuf },
    /// Decide equivalence of two marked graphs.
    Equiv { a: PathBuf, b: PathBuf },
    /// Right action of an automorphism on a marked graph.
    Act {
        file: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// The immersed circuit representing a conjugacy class.
    Circuit { file: PathBuf, class: String },
    /// Stallings core of a finitely generated subgroup.
    Core {
        file: PathBuf,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        based: bool,
    },
    /// Core subgraph realizing a free factor system, if any.
    Realizes {
        file: PathBuf,
        #[arg(long)]
        system: String,
    },
    /// Coindex of a free factor system.
    Coindex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        system: String,
    },
    /// Crossing count of a conjugacy class.
    CountI {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        class: String,
    },
    /// Crossing counts before and after collapsing a forest.
    LipschitzAudit {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        forest: String,
        class: String,
    },
    /// Compare the core of a collapse with the collapse of the core.
    CoreCollapse {
        file: PathBuf,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        forest: String,
    },
    /// Distortion table as CSV: k, upper_nielsen, i_k, spine_lb.
    Witness {
        #[arg(long)]
        case: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        r1: Option<usize>,
        /// Ranks of further components (case 3), comma separated.
        #[arg(long, value_delimiter = ',')]
        extra: Vec<usize>,
        #[arg(long)]
        kmax: usize,
    },
    /// Attach a loop at the basepoint of a pointed marked graph.
    EmbedJ { file: PathBuf },
    /// Retract a pointed marked graph to rank n-1.
    RetractAut { file: PathBuf },
    /// Check the retraction along a collapse of a pointed marked graph.
    RetractAutAudit {
        file: PathBuf,
        #[arg(long)]
        forest: String,
    },
    /// Retract a marked graph onto the subcomplex of a splitting.
    RetractSplit {
        file: PathBuf,
        #[arg(long)]
        splitting: PathBuf,
    },
    /// Decide membership in the subcomplex of a splitting.
    SplitMembership {
        file: PathBuf,
        #[arg(long)]
        splitting: PathBuf,
    },
    /// Check the splitting retraction along a natural collapse.
    RetractSplitAudit {
        file: PathBuf,
        #[arg(long)]
        splitting: PathBuf,
        #[arg(long)]
        forest: String,
    },
    /// Breadth-first spine distance, up to a cap.
    SpineBfs {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        cap: usize,
    },
    /// Certified spine path between two marked graphs.
    FoldPath {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        system: Option<String>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
}

fn marked(path: &Path) -> Result<MarkedGraph> {
    parse_marked(&read(path)?)
}

fn forest(s: &str) -> Result<Vec<usize>> {
    s.split([' ', ','])
        .filter(|t| !t.is_empty())
        .map(|t| match outspine::word::parse_symbol(t, 'e')? {
            e if e > 0 => Ok(e as usize - 1),
            _ => Err(Error::Parse(format!("forest edges are uninverted, got '{t}'"))),
        })
        .collect()
}

fn words(s: &str) -> Result<Vec<Word>> {
    s.split(',').map(parse_word).collect()
}

fn class(s: &str) -> Result<CyclicWord> {
    CyclicWord::of(&parse_word(s)?)
}

fn components(s: &str) -> Result<Vec<Vec<Word>>> {
    s.split('|').map(str::trim).filter(|c| !c.is_empty()).map(words).collect()
}

fn edges(es: &[usize]) -> String {
    es.iter().map(|e| format!("e{}", e + 1)).collect::<Vec<_>>().join(" ")
}

/// Output text and whether the command reported a failed check.
fn execute(command: &Command) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut failed = false;
    match command {
        Command::Reduce { word, cyclic } => {
            let w = parse_word(word)?;
            if *cyclic {
                let (c, g) = cyclic_reduce(&w)?;
                writeln!(out, "{}\nconjugator: {}", format_symbols(c.letters(), 'a'), g).unwrap();
            } else {
                writeln!(out, "{w}").unwrap();
            }
        }
        Command::Apply { map, word } => writeln!(out, "{}", parse_endo(map)?.apply(&parse_word(word)?)?).unwrap(),
        Command::Compose { f, g } => {
            writeln!(out, "{}", print_endo(&Endo::compose(&parse_endo(f)?, &parse_endo(g)?)?)).unwrap()
        }
        Command::IsAuto { map } => match parse_endo(map)?.inverse() {
            Some(inv) => writeln!(out, "true\ninverse: {}", print_endo(&inv)).unwrap(),
            None => writeln!(out, "false").unwrap(),
        },
        Command::Collapse { file, forest: f } => {
            let text = read(file)?;
            let f = forest(f)?;
            if text.contains("marking") {
                let (g, _) = parse_marked(&text)?.collapse_marked(&f)?;
                out.push_str(&print_marked(&g));
            } else {
                writeln!(out, "{}", print_graph(&collapse(&parse_graph(&text)?, &f)?.target)).unwrap();
            }
        }
        Command::Blowups { file } => {
            let g = parse_graph(&read(file)?)?;
            let ups = enumerate_blowups(&g);
            writeln!(out, "# {} blow-ups", ups.len()).unwrap();
            for b in &ups {
                writeln!(out, "{}  # v{} split, new edge e{}", print_graph(&b.graph), b.vertex, b.new_edge + 1)
                    .unwrap();
            }
        }
        Command::Equiv { a, b } => match marked(a)?.equivalent(&marked(b)?) {
            Some(eq) => writeln!(out, "equivalent\nconjugator: {}", eq.conjugator).unwrap(),
            None => {
                writeln!(out, "not equivalent").unwrap();
            }
        },
        Command::Act { file, map } => out.push_str(&print_marked(&marked(file)?.act(&parse_automorphism(map)?)?)),
        Command::Circuit { file, class: c } => {
            writeln!(out, "{}", format_symbols(&marked(file)?.circuit_of(&class(c)?)?, 'e')).unwrap()
        }
        Command::Core { file, gens, based } => {
            let k = stallings_core(&words(gens)?, &marked(file)?, *based)?;
            writeln!(out, "{}", print_graph(k.graph())).unwrap();
            let labels: Vec<String> = k
                .labels()
                .iter()
                .enumerate()
                .map(|(i, &l)| format!("e{} -> {};", i + 1, format_symbols(&[l], 'e')))
                .collect();
            writeln!(out, "labels {{ {} }}", labels.join(" ")).unwrap();
            if let Some(b) = k.base() {
                writeln!(out, "basepoint: v{b}").unwrap();
            }
            writeln!(out, "rank: {}", k.rank()).unwrap();
        }
        Command::Realizes { file, system } => {
            let g = marked(file)?;
            match realizes(&g, &parse_system(g.rank(), system)?)? {
                Some(w) => {
                    for (i, c) in w.components.iter().enumerate() {
                        writeln!(out, "component {}: {}", i + 1, edges(c)).unwrap();
                    }
                }
                None => {
                    writeln!(out, "not realized").unwrap();
                }
            }
        }
        Command::Coindex { n, system } => writeln!(out, "{}", parse_system(*n, system)?.coindex()?).unwrap(),
        Command::CountI { file, a, b, class: c } => {
            let ctx = build_context(&components(a)?, &words(b)?, &marked(file)?)?;
            writeln!(out, "{}", count_i(&ctx, &class(c)?)?.value).unwrap();
        }
        Command::LipschitzAudit { file, a, b, forest: f, class: c } => {
            let (before, after) =
                lipschitz_audit(&components(a)?, &words(b)?, &marked(file)?, &forest(f)?, &class(c)?)?;
            writeln!(out, "before: {before}\nafter: {after}").unwrap();
            if before.abs_diff(after) > 2 {
                return Err(Error::Invariant(format!("count moved from {before} to {after}")));
            }
        }
        Command::CoreCollapse { file, gens, forest: f } => {
            if !minimal_subtree_collapse_check(&marked(file)?, &forest(f)?, &words(gens)?)? {
                return Err(Error::Invariant("core of the collapse differs from the collapse of the core".into()));
            }
            writeln!(out, "agree").unwrap();
        }
        Command::Witness { case, n, r, r1, extra, kmax } => {
            let case = match case {
                1 => WitnessCase::Connected { r: *r },
                2 => WitnessCase::TwoComponent { r0: *r, r1: r1.unwrap_or(1) },
                3 => WitnessCase::MultiComponent {
                    r0: *r,
                    r1: r1.unwrap_or(1),
                    extra: if extra.is_empty() { vec![1] } else { extra.clone() },
                },
                c => return Err(Error::Precondition(format!("case must be 1, 2 or 3, got {c}"))),
            };
            let w = Witness::new(WitnessParams { n: *n, case })?;
            let mut csv = csv::Writer::from_writer(Vec::new());
            csv.write_record(["k", "upper_nielsen", "i_k", "spine_lb"])
                .map_err(|e| Error::Precondition(e.to_string()))?;
            for row in w.report(*kmax)? {
                csv.serialize((row.k, row.upper_nielsen, row.i_k, row.spine_lb))
                    .map_err(|e| Error::Precondition(e.to_string()))?;
            }
            let bytes = csv.into_inner().map_err(|e| Error::Precondition(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv is utf-8"));
        }
        Command::EmbedJ { file } => {
            out.push_str(&print_marked(embed_j(&PointedMarkedGraph::new(marked(file)?)?)?.inner()))
        }
        Command::RetractAut { file } => {
            out.push_str(&print_marked(retract_r(&PointedMarkedGraph::new(marked(file)?)?)?.inner()))
        }
        Command::RetractAutAudit { file, forest: f } => {
            let a = retract_aut::lipschitz_audit(&PointedMarkedGraph::new(marked(file)?)?, &forest(f)?)?;
            writeln!(out, "distance: {}\nhull: {}", a.distance, edges(&a.hull)).unwrap();
        }
        Command::RetractSplit { file, splitting } => {
            let data = parse_splitting(&read(splitting)?)?;
            out.push_str(&print_marked(&retract_big_r(&marked(file)?, &data)?));
        }
        Command::SplitMembership { file, splitting } => {
            let data = parse_splitting(&read(splitting)?)?;
            match in_cvkt(&marked(file)?, &data.blueprint)? {
                Some(w) => {
                    for (i, c) in w.cores.iter().enumerate() {
                        writeln!(out, "vertex core {}: {}", i + 1, edges(c)).unwrap();
                    }
                    writeln!(out, "edge: {}", format_symbols(&w.edge, 'e')).unwrap();
                }
                None => {
                    writeln!(out, "not a member").unwrap();
                }
            }
        }
        Command::RetractSplitAudit { file, splitting, forest: f } => {
            let data = parse_splitting(&read(splitting)?)?;
            writeln!(out, "distance: {}", retraction_audit(&marked(file)?, &forest(f)?, &data)?).unwrap();
        }
        Command::SpineBfs { a, b, cap } => match bfs_distance(&marked(a)?, &marked(b)?, *cap)? {
            Some(d) => writeln!(out, "{d}").unwrap(),
            None => writeln!(out, "> {cap}").unwrap(),
        },
        Command::FoldPath { a, b, system } => {
            let (g, h) = (marked(a)?, marked(b)?);
            let f: Option<FreeFactorSystem> = system.as_deref().map(|s| parse_system(g.rank(), s)).transpose()?;
            let p = fold_path(&g, &h, f.as_ref())?;
            writeln!(out, "# length {}", p.path.len()).unwrap();
            if let Some(gd) = p.guarded {
                writeln!(out, "# guarded: {gd}").unwrap();
            }
            out.push_str(&print_path(&p.path));
        }
        Command::Selftest { seed } => {
            for r in selftest::run_all(*seed) {
                failed |= !r.pass;
                writeln!(out, "{r}").unwrap();
            }
        }
    }
    Ok((out, failed))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Reduce { .. } => "reduce",
        Command::Apply { .. } => "apply",
        Command::Compose { .. } => "compose",
        Command::IsAuto { .. } => "is-auto",
        Command::Collapse { .. } => "collapse",
        Command::Blowups { .. } => "blowups",
        Command::Equiv { .. } => "equiv",
        Command::Act { .. } => "act",
        Command::Circuit { .. } => "circuit",
        Command::Core { .. } => "core",
        Command::Realizes { .. } => "realizes",
        Command::Coindex { .. } => "coindex",
        Command::CountI { .. } => "count-i",
        Command::LipschitzAudit { .. } => "lipschitz-audit",
        Command::CoreCollapse { .. } => "core-collapse",
        Command::Witness { .. } => "witness.csv",
        Command::EmbedJ { .. } => "embed-j",
        Command::RetractAut { .. } => "retract-aut",
        Command::RetractAutAudit { .. } => "retract-aut-audit",
        Command::RetractSplit { .. } => "retract-split",
        Command::SplitMembership { .. } => "split-membership",
        Command::RetractSplitAudit { .. } => "retract-split-audit",
        Command::SpineBfs { .. } => "spine-bfs",
        Command::FoldPath { .. } => "fold-path",
        Command::Selftest { .. } => "selftest",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((out, failed)) => {
            print!("{out}");
            let dir = cli.out_dir.or_else(|| std::env::var_os("OUTSPINE_OUTPUT_DIR").map(PathBuf::from));
            if let Some(dir) = dir {
                let path = dir.join(command_name(&cli.command));
                if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, &out)) {
                    eprintln!("error[io]: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
