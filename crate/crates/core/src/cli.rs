//! Command-line front end. `run` never prints; it returns what the binary
//! should write and the exit code, so tests can drive it directly.

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::{huli_driver, norm_blowup, ChartNode, NodeStatus};
use crate::diagonal::{
    cone_components, diagonalize_local, filtration, DiagonalForm, Diagonalization,
};
use crate::error::{Error, Result};
use crate::fitting::{fitting_chain, parse_matrix, rank_profile, smith_normal_form, SnfRing};
use crate::ideal::{moody_dominates, parse_monomial_ideal, Domination, DEFAULT_ALPHA_MAX};
use crate::poly::{identifiers, parse_poly_list, Poly, VarSet};
use crate::tree::{parse_tree, vz_process, VzNode};

pub const THREADS_ENV: &str = "FITTING_FORGE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "fitting-forge",
    version,
    about = "Fitting ideals, blow-up charts and diagonalization of module presentations"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Variable order, e.g. `x,y,z`. Defaults to the input's variables sorted alphabetically.
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fitting ideals and rank profile of a presentation matrix.
    Fitting {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Norm ideal and its blow-up center.
    Norm {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Smith normal form over Z or Q[t].
    Snf {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Local diagonalization by elementary operations.
    Diagonalize {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Divisors D_i and Fitting ideals of a diagonal module.
    Filtration {
        #[arg(allow_hyphen_values = true)]
        entries: String,
    },
    /// Components of the abelian cone of a diagonal module.
    Cone {
        #[arg(allow_hyphen_values = true)]
        entries: String,
    },
    /// Iterated blow-up chart tree.
    Blowup {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 8)]
        max_rounds: usize,
    },
    /// Ideals and chart report of a terminally weighted tree.
    Tree {
        tree: String,
        #[arg(long, default_value_t = 16)]
        max_depth: usize,
    },
    /// Search for K with I * K = J^alpha.
    Moody {
        i: String,
        j: String,
        #[arg(long, default_value_t = DEFAULT_ALPHA_MAX)]
        alpha_max: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub vars: Vec<String>,
    pub results: Value,
    pub warnings: Vec<String>,
}

/// What a subcommand produced: the report plus its human-readable body.
struct Output {
    report: Report,
    text: Vec<String>,
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| dispatch(&cli)),
        Ok(None) => dispatch(&cli),
        Err(msg) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    match result {
        Ok(out) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&out.report).expect("report serializes");
                s.push('\n');
                s
            } else {
                let mut s = String::new();
                for line in &out.text {
                    s.push_str(line);
                    s.push('\n');
                }
                for w in &out.report.warnings {
                    s.push_str(&format!("warning: {w}\n"));
                }
                s
            };
            Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: if e.is_parse_error() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error[{}]: {e}\n", e.name()),
        },
    }
}

fn thread_pool() -> std::result::Result<Option<rayon::ThreadPool>, String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| e.to_string())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn resolve_vars(given: &Option<Vec<String>>, texts: &[&str]) -> Result<VarSet> {
    match given {
        Some(names) => {
            if let Some(bad) = names.iter().find(|n| !is_identifier(n)) {
                return Err(Error::Syntax {
                    position: 0,
                    message: format!("`{bad}` is not a variable name"),
                });
            }
            VarSet::new(names.clone())
        }
        None => {
            let mut all = std::collections::BTreeSet::new();
            for t in texts {
                all.extend(identifiers(t));
            }
            VarSet::new(all)
        }
    }
}

fn render_list(items: &[Poly], vars: &VarSet) -> Vec<String> {
    items.iter().map(|p| p.render(vars)).collect()
}

fn render_matrix(m: &[Vec<Poly>], vars: &VarSet) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", render_list(r, vars).join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Fitting { matrix } => cmd_fitting(cli, matrix),
        Command::Norm { matrix } => cmd_norm(cli, matrix),
        Command::Snf { matrix } => cmd_snf(cli, matrix),
        Command::Diagonalize { matrix } => cmd_diagonalize(cli, matrix),
        Command::Filtration { entries } => cmd_filtration(cli, entries),
        Command::Cone { entries } => cmd_cone(cli, entries),
        Command::Blowup { matrix, max_rounds } => cmd_blowup(cli, matrix, *max_rounds),
        Command::Tree { tree, max_depth } => cmd_tree(tree, *max_depth),
        Command::Moody { i, j, alpha_max } => cmd_moody(cli, i, j, *alpha_max),
    }
}

fn report(
    command: &str,
    inputs: Value,
    vars: &VarSet,
    results: Value,
    warnings: Vec<String>,
) -> Report {
    Report {
        command: command.to_string(),
        inputs,
        vars: vars.names().to_vec(),
        results,
        warnings,
    }
}

fn cmd_fitting(cli: &Cli, matrix: &str) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[matrix])?;
    let a = parse_matrix(matrix, &vars)?;
    let chain = fitting_chain(&a);
    let rendered: Vec<String> = chain.iter().map(|f| f.render(&vars)).collect();
    let mut text: Vec<String> = rendered
        .iter()
        .enumerate()
        .map(|(i, f)| format!("F_{i} = {f}"))
        .collect();
    let mut warnings = Vec::new();
    let (generic, maximal) = match rank_profile(&a) {
        Ok(p) => (json!(p.generic_rank), json!(p.maximal_rank)),
        Err(e @ Error::UnitDetectionUnsupported { .. }) => {
            warnings.push(format!("{}: {e}", e.name()));
            let g = chain
                .iter()
                .position(|f| !f.is_zero())
                .expect("F_q is the unit ideal");
            (json!(g), Value::Null)
        }
        Err(e) => return Err(e),
    };
    text.push(format!("generic rank = {generic}"));
    text.push(format!(
        "maximal rank = {}",
        if maximal.is_null() {
            "undetermined".to_string()
        } else {
            maximal.to_string()
        }
    ));
    let results = json!({
        "fitting": rendered,
        "generic_rank": generic,
        "maximal_rank": maximal,
    });
    Ok(Output {
        report: report(
            "fitting",
            json!({ "matrix": matrix }),
            &vars,
            results,
            warnings,
        ),
        text,
    })
}

fn cmd_norm(cli: &Cli, matrix: &str) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[matrix])?;
    let a = parse_matrix(matrix, &vars)?;
    let nc = norm_blowup(&a, &vars)?;
    let columns: Vec<usize> = nc.norm.columns.iter().map(|c| c + 1).collect();
    let mut warnings = Vec::new();
    let mut text = vec![
        format!("norm = {}", nc.norm.ideal.render(&vars)),
        format!("columns = {columns:?}"),
        format!("generic rank = {}", nc.norm.generic_rank),
        format!("content = {}", nc.factored.monomial.render(&vars)),
        format!("residual = {}", nc.factored.residual.render(&vars)),
    ];
    let charts: Vec<Value> = nc
        .charts
        .iter()
        .map(|c| {
            json!({
                "chart": c.labels(),
                "substitution": c.substitution_text(&vars),
            })
        })
        .collect();
    match &nc.center {
        Some(c) if c.is_empty() => text.push("center = (1), nothing to blow up".to_string()),
        Some(c) => {
            text.push(format!("center = ({})", c.join(", ")));
            for ch in &nc.charts {
                let subst: Vec<String> = ch
                    .substitution_text(&vars)
                    .into_iter()
                    .map(|(k, v)| format!("{k} -> {v}"))
                    .collect();
                text.push(format!("  chart {}: {}", ch.labels().join(","), subst.join(", ")));
            }
        }
        None => warnings.push(
            "unsupported-center: the residual norm ideal is not generated by distinct variables; only the ideal is reported"
                .to_string(),
        ),
    }
    let results = json!({
        "norm": nc.norm.ideal.render(&vars),
        "columns": columns,
        "generic_rank": nc.norm.generic_rank,
        "content": nc.factored.monomial.render(&vars),
        "residual": nc.factored.residual.render(&vars),
        "center": nc.center,
        "charts": charts,
    });
    Ok(Output {
        report: report(
            "norm",
            json!({ "matrix": matrix }),
            &vars,
            results,
            warnings,
        ),
        text,
    })
}

fn cmd_snf(cli: &Cli, matrix: &str) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[matrix])?;
    let a = parse_matrix(matrix, &vars)?;
    let s = smith_normal_form(&a)?;
    let ring = match &s.ring {
        SnfRing::Integers => "Z".to_string(),
        SnfRing::Univariate(Some(t)) => format!("Q[{t}]"),
        SnfRing::Univariate(None) => "Q".to_string(),
    };
    let diagonal = render_list(&s.diagonal, &vars);
    let text = vec![
        format!("ring = {ring}"),
        format!("diagonal = [{}]", diagonal.join(", ")),
        format!("left = {}", render_matrix(&s.left, &vars)),
        format!("right = {}", render_matrix(&s.right, &vars)),
    ];
    let results = json!({
        "ring": ring,
        "diagonal": diagonal,
        "left": render_matrix(&s.left, &vars),
        "right": render_matrix(&s.right, &vars),
    });
    Ok(Output {
        report: report(
            "snf",
            json!({ "matrix": matrix }),
            &vars,
            results,
            Vec::new(),
        ),
        text,
    })
}

fn cmd_diagonalize(cli: &Cli, matrix: &str) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[matrix])?;
    let a = parse_matrix(matrix, &vars)?;
    let (results, text) = match diagonalize_local(&a) {
        Diagonalization::Diagonal(d) => {
            let entries = render_list(&d.entries, &vars);
            let text = vec![
                format!("diagonal = [{}]", entries.join(", ")),
                format!("free rank = {}", d.free_rank()),
                format!("operations = {}", d.ops.len()),
            ];
            (
                json!({
                    "diagonal": true,
                    "entries": entries,
                    "free_rank": d.free_rank(),
                    "operations": d.ops,
                }),
                text,
            )
        }
        Diagonalization::Obstruction { pivots, block } => {
            let pivots = render_list(&pivots, &vars);
            let text = vec![
                "not diagonalizable by this pivot search".to_string(),
                format!("pivots = [{}]", pivots.join(", ")),
                format!("obstruction = {}", block.render(&vars)),
            ];
            (
                json!({
                    "diagonal": false,
                    "pivots": pivots,
                    "obstruction": block.render(&vars),
                }),
                text,
            )
        }
    };
    Ok(Output {
        report: report(
            "diagonalize",
            json!({ "matrix": matrix }),
            &vars,
            results,
            Vec::new(),
        ),
        text,
    })
}

fn diagonal_input(cli: &Cli, entries: &str) -> Result<(VarSet, DiagonalForm)> {
    let vars = resolve_vars(&cli.vars, &[entries])?;
    let list = parse_poly_list(entries, &vars)?;
    Ok((vars, DiagonalForm::from_entries(list)?))
}

fn cmd_filtration(cli: &Cli, entries: &str) -> Result<Output> {
    let (vars, d) = diagonal_input(cli, entries)?;
    let f = filtration(&d)?;
    let mut text: Vec<String> = f
        .divisors
        .iter()
        .rev()
        .map(|dv| format!("D_{} = ({})", dv.index, dv.generator.render(&vars)))
        .collect();
    text.extend(
        f.fitting
            .iter()
            .enumerate()
            .map(|(k, p)| format!("F_{k} = ({})", p.render(&vars))),
    );
    let divisors: Vec<Value> = f
        .divisors
        .iter()
        .map(|dv| {
            json!({
                "index": dv.index,
                "generator": dv.generator.render(&vars),
                "empty": dv.is_empty(),
            })
        })
        .collect();
    let results = json!({
        "divisors": divisors,
        "fitting": render_list(&f.fitting, &vars),
    });
    Ok(Output {
        report: report(
            "filtration",
            json!({ "entries": entries }),
            &vars,
            results,
            Vec::new(),
        ),
        text,
    })
}

fn cmd_cone(cli: &Cli, entries: &str) -> Result<Output> {
    let (vars, d) = diagonal_input(cli, entries)?;
    let c = cone_components(&d);
    let mut text = vec![format!("main component: rank {}", c.main_rank)];
    text.extend(c.torsion.iter().map(|(v, r)| format!("V({v}): rank {r}")));
    let warnings = if c.unsupported.is_empty() {
        Vec::new()
    } else {
        vec![format!(
            "non-monomial divisors {:?}: their supports are not factored into components",
            c.unsupported
        )]
    };
    let components: Vec<Value> = c
        .torsion
        .iter()
        .map(|(v, r)| json!({ "support": v, "rank": r }))
        .collect();
    let results = json!({
        "main_rank": c.main_rank,
        "components": components,
        "unsupported": c.unsupported,
    });
    Ok(Output {
        report: report(
            "cone",
            json!({ "entries": entries }),
            &vars,
            results,
            warnings,
        ),
        text,
    })
}

fn chart_lines(n: &ChartNode, vars: &VarSet, depth: usize, out: &mut Vec<String>) {
    let path = n.chart.labels();
    let name = if path.is_empty() {
        "root".to_string()
    } else {
        path.join(",")
    };
    let fitting: Vec<String> = n.fitting.iter().map(|f| f.render(vars)).collect();
    let mut line = format!(
        "{}{name}: {} F = [{}]",
        "  ".repeat(depth),
        n.status.name(),
        fitting.join(", ")
    );
    if let Some(b) = &n.blown_up {
        line.push_str(&format!(
            " blow up F_{} = {} * ({})",
            b.index,
            b.content.render(vars),
            b.center.join(", ")
        ));
    }
    if let Some(d) = &n.diagonal {
        line.push_str(&format!(
            " diagonal [{}]",
            render_list(&d.entries, vars).join(", ")
        ));
    }
    out.push(line);
    for c in &n.children {
        chart_lines(c, vars, depth + 1, out);
    }
}

fn cmd_blowup(cli: &Cli, matrix: &str, max_rounds: usize) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[matrix])?;
    let a = parse_matrix(matrix, &vars)?;
    let t = huli_driver(&a, &vars, max_rounds)?;
    let cert = t.certificate();
    let mut warnings = Vec::new();
    for leaf in t.root.leaves() {
        let path = leaf.chart.labels().join(",");
        match &leaf.status {
            NodeStatus::UnsupportedCenter(reason) => {
                warnings.push(format!("unsupported-center at chart [{path}]: {reason}"))
            }
            NodeStatus::Open => warnings.push(format!("round budget exhausted at chart [{path}]")),
            NodeStatus::DiagonalCertified => {}
        }
    }
    let mut text = Vec::new();
    chart_lines(&t.root, &t.vars, 0, &mut text);
    text.push(format!("certified = {}", cert.certified));
    Ok(Output {
        report: report(
            "blowup",
            json!({ "matrix": matrix, "max_rounds": max_rounds }),
            &t.vars,
            t.to_json(),
            warnings,
        ),
        text,
    })
}

fn tree_lines(n: &VzNode, vars: &VarSet, depth: usize, out: &mut Vec<String>) {
    let labels: Vec<String> = n
        .labels()
        .iter()
        .map(|z| z.strip_prefix("z_").unwrap_or(z).to_string())
        .collect();
    let name = if labels.is_empty() {
        "root".to_string()
    } else {
        labels.join(",")
    };
    out.push(format!(
        "{}{name}: {}  Phi = {} * ({})  J = ({}) * {}{}{}",
        "  ".repeat(depth),
        n.tree,
        n.phi.0.render(vars),
        n.phi.1.render(vars),
        n.j.monomial.render(vars),
        n.j.residual.render(vars),
        if n.principal { "  principal" } else { "" },
        if n.path_tree && n.snc { "  snc" } else { "" },
    ));
    for c in &n.children {
        tree_lines(c, vars, depth + 1, out);
    }
}

fn cmd_tree(text_in: &str, max_depth: usize) -> Result<Output> {
    let g = parse_tree(text_in)?;
    let vars = g.vars();
    let r = vz_process(&g, max_depth)?;
    let i = g.i_ideal().map(|i| i.render(&vars));
    let mut text = vec![
        format!("tree = {g}"),
        format!("Phi = {}", g.phi().render(&vars)),
        format!(
            "I = {}",
            i.clone().unwrap_or_else(|| "none (path tree)".to_string())
        ),
        format!("J = {}", g.j_ideal().render(&vars)),
    ];
    tree_lines(&r, &vars, 0, &mut text);
    let mut warnings = Vec::new();
    for n in r.terminal_charts() {
        if !(n.principal && n.snc) {
            let labels: Vec<String> = n.labels();
            warnings.push(format!(
                "terminal chart [{}] is not {}",
                labels.join(","),
                if n.principal { "snc" } else { "principal" }
            ));
        }
    }
    let results = json!({
        "tree": g.to_json(),
        "phi": g.phi().render(&vars),
        "i": i,
        "j": g.j_ideal().render(&vars),
        "charts": r.to_json(&vars),
    });
    Ok(Output {
        report: report(
            "tree",
            json!({ "tree": text_in, "max_depth": max_depth }),
            &vars,
            results,
            warnings,
        ),
        text,
    })
}

fn cmd_moody(cli: &Cli, i: &str, j: &str, alpha_max: u32) -> Result<Output> {
    let vars = resolve_vars(&cli.vars, &[i, j])?;
    let ii = parse_monomial_ideal(i, &vars)?;
    let jj = parse_monomial_ideal(j, &vars)?;
    let (results, text, warnings) = match moody_dominates(&ii, &jj, alpha_max)? {
        Domination::Dominates { alpha, witness } => (
            json!({ "dominates": true, "alpha": alpha, "witness": witness.render(&vars) }),
            vec![
                "dominates".to_string(),
                format!("alpha = {alpha}"),
                format!("K = {}", witness.render(&vars)),
            ],
            Vec::new(),
        ),
        Domination::NoWitness { alpha_max } => (
            json!({ "dominates": false, "alpha_max": alpha_max }),
            vec![format!("no witness for alpha <= {alpha_max}")],
            vec![format!(
                "no monomial ideal K with I*K = J^alpha for alpha <= {alpha_max}; larger exponents are not searched"
            )],
        ),
    };
    Ok(Output {
        report: report(
            "moody",
            json!({ "i": i, "j": j, "alpha_max": alpha_max }),
            &vars,
            results,
            warnings,
        ),
        text,
    })
}
