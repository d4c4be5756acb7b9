use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use exdec_core::cutmatch::{
    dense_f64, potential_f64, run_cut_matching, CutMatchConfig, Termination,
};
use exdec_core::decomp::{decompose, from_text, to_text, DecompConfig, DecompositionResult, Mode};
use exdec_core::graph::{parse_edge_list, Graph};
use exdec_core::oracle::validate_decomposition;
use exdec_core::rational::{fmt_q, parse_q};
use exdec_core::Q;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Potentials are traced only up to this many vertices (dense 2n x 2n products).
const PSI_TRACE_LIMIT: usize = 64;

#[derive(Parser)]
#[command(name = "exdec", version, about = "Directed expander decomposition")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weak or strong expander decomposition of an edge-list graph.
    Decompose {
        #[arg(long, default_value = "strong")]
        mode: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "4096")]
        c_0: f64,
        /// Validate the result and exit 1 if any check fails.
        #[arg(long)]
        verify: bool,
        graph: PathBuf,
    },
    /// A single cut-matching run on the regularized weighting.
    CutMatching {
        #[command(flatten)]
        common: Common,
        /// Write `round,psi_rows,psi_cols` to this CSV file.
        #[arg(long)]
        dump_potentials: Option<PathBuf>,
        graph: PathBuf,
    },
    /// Validate a stored decomposition against its graph.
    Verify { result: PathBuf, graph: PathBuf },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "0.01")]
    phi: String,
    #[arg(long, default_value = "10000")]
    tau: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "10")]
    c_t: f64,
    #[arg(long)]
    json: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Bad flags or unreadable input; exits with 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(InputError(msg.into()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph> {
    parse_edge_list(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_result(path: &Path) -> Result<DecompositionResult> {
    let text = read(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text)
            .map_err(|e| input_err(format!("{}: line {}: {e}", path.display(), e.line())))
    } else {
        from_text(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
    };
    parsed
}

fn params(c: &Common) -> Result<(Q, Q)> {
    let phi = parse_q(&c.phi).map_err(|e| input_err(format!("--phi: {e}")))?;
    let tau = parse_q(&c.tau).map_err(|e| input_err(format!("--tau: {e}")))?;
    if phi <= Q::from_integer(0) || phi >= Q::from_integer(1) {
        return Err(input_err("--phi must lie in (0, 1)"));
    }
    if tau < Q::from_integer(10_000) {
        return Err(input_err("--tau must be at least 10000"));
    }
    if !(c.c_t > 0.0) {
        return Err(input_err("--c-t must be positive"));
    }
    Ok((phi, tau))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_decompose(mode: &str, common: &Common, c_0: f64, verify: bool, graph: &Path) -> Result<u8> {
    let mode = Mode::parse(mode).ok_or_else(|| input_err(format!("unknown mode `{mode}`")))?;
    let (phi, tau) = params(common)?;
    if !(c_0 > 0.0) {
        return Err(input_err("--c-0 must be positive"));
    }
    let g = load_graph(graph)?;
    let mut cfg = DecompConfig::new(mode, phi, common.seed);
    cfg.tau = tau;
    cfg.c_t = common.c_t;
    cfg.c0 = c_0;
    let r = decompose(&g, &cfg).map_err(|e| anyhow!("{e}"))?;
    let body = if common.json {
        serde_json::to_string_pretty(&r)? + "\n"
    } else {
        to_text(&r, &g)
    };
    emit(&common.output, &body)?;
    if verify {
        let rep = validate_decomposition(&g, &r, None);
        eprint!("{}", rep.render());
        if !rep.passed() {
            return Ok(1);
        }
    }
    Ok(0)
}

fn run_cut_matching_cmd(common: &Common, dump: &Option<PathBuf>, graph: &Path) -> Result<u8> {
    let (phi, tau) = params(common)?;
    let g = load_graph(graph)?;
    let d = g.regularized_weighting().map_err(|e| anyhow!("{e}"))?;
    let mut cfg = CutMatchConfig::new(phi, common.seed);
    cfg.tau = tau;
    cfg.c_t = common.c_t;
    let out = run_cut_matching(&g, &d, &cfg).map_err(|e| anyhow!("{e}"))?;
    let psi: Option<Vec<(f64, f64)>> = (g.n() <= PSI_TRACE_LIMIT).then(|| {
        (0..=out.flow_matrix.len())
            .map(|t| {
                let f = dense_f64(&out.flow_matrix, t);
                let w = out.flow_matrix.weights(t);
                (potential_f64(&f, w, false), potential_f64(&f, w, true))
            })
            .collect()
    });
    let tag = match out.tag {
        Termination::NearExpander => "near-expander",
        Termination::EarlyTermination => "early-termination",
    };
    let body = if common.json {
        let cuts: Vec<_> = out
            .cuts
            .iter()
            .map(|c| json!({"kind": c.kind.name(), "bound": c.bound_str(), "side": c.side, "host": c.host}))
            .collect();
        let rounds: Vec<_> = out
            .rounds
            .iter()
            .map(|r| {
                json!({"t": r.t, "cuts_added": r.cuts_added, "cut_weight": r.cut_weight.to_string(),
                       "deleted_weight": r.deleted_weight.to_string(), "active_weight": r.active_weight.to_string(),
                       "fallbacks": r.fallbacks})
            })
            .collect();
        let v = json!({
            "format": "exdec-cut-matching 1",
            "n": g.n(),
            "phi": fmt_q(&phi),
            "tau": fmt_q(&tau),
            "c_t": common.c_t,
            "seed": common.seed,
            "outcome": tag,
            "rounds_max": out.t_max,
            "rounds_run": out.rounds.len(),
            "cuts": cuts,
            "survivors": out.survivors,
            "deleted": out.deleted,
            "congestion": fmt_q(&out.congestion),
            "stats": {
                "matching_fallbacks": out.fallbacks,
                "rounds": rounds,
                "psi": psi.as_ref().map(|p| p.iter().map(|(a, b)| vec![*a, *b]).collect::<Vec<_>>()),
            }
        });
        serde_json::to_string_pretty(&v)? + "\n"
    } else {
        let mut s = String::new();
        let mut line = |x: String| {
            s.push_str(&x);
            s.push('\n');
        };
        line("exdec-cut-matching 1".into());
        line(format!("n {}", g.n()));
        line(format!("phi {}", fmt_q(&phi)));
        line(format!("tau {}", fmt_q(&tau)));
        line(format!("c_t {}", common.c_t));
        line(format!("seed {}", common.seed));
        line(format!("outcome {tag}"));
        line(format!("rounds {} of {}", out.rounds.len(), out.t_max));
        line(format!("cuts {}", out.cuts.len()));
        for c in &out.cuts {
            line(format!(
                "S {} {} | {} | {}",
                c.kind.name(),
                c.bound_str(),
                join(&c.side),
                join(&c.host)
            ));
        }
        line(format!("survivors {}", join(&out.survivors)));
        line(format!("deleted {}", join(&out.deleted)));
        line(format!("congestion {}", fmt_q(&out.congestion)));
        line("stats".into());
        line(format!("stat matching-fallbacks {}", out.fallbacks));
        for r in &out.rounds {
            line(format!(
                "round {} cuts {} cut-weight {} deleted-weight {} active-weight {}",
                r.t, r.cuts_added, r.cut_weight, r.deleted_weight, r.active_weight
            ));
        }
        match &psi {
            Some(p) => {
                for (t, (a, b)) in p.iter().enumerate() {
                    line(format!("psi {t} {a:.9e} {b:.9e}"));
                }
            }
            None => line(format!("psi skipped n > {PSI_TRACE_LIMIT}")),
        }
        s
    };
    emit(&common.output, &body)?;
    if let Some(path) = dump {
        let p = psi
            .ok_or_else(|| input_err(format!("--dump-potentials needs n <= {PSI_TRACE_LIMIT}")))?;
        let mut csv = String::from("round,psi_rows,psi_cols\n");
        for (t, (a, b)) in p.iter().enumerate() {
            csv.push_str(&format!("{t},{a:.9e},{b:.9e}\n"));
        }
        std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn run_verify(result: &Path, graph: &Path) -> Result<u8> {
    let r = load_result(result)?;
    let g = load_graph(graph)?;
    if r.n != g.n() {
        return Err(input_err(format!(
            "result has {} vertices, graph has {}",
            r.n,
            g.n()
        )));
    }
    let rep = validate_decomposition(&g, &r, None);
    print!("{}", rep.render());
    Ok(if rep.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Decompose {
            mode,
            common,
            c_0,
            verify,
            graph,
        } => run_decompose(mode, common, *c_0, *verify, graph),
        Cmd::CutMatching {
            common,
            dump_potentials,
            graph,
        } => run_cut_matching_cmd(common, dump_potentials, graph),
        Cmd::Verify { result, graph } => run_verify(result, graph),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
