use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use isocap::capacity::{capacity, capacity_p2_oracle};
use isocap::checks::{
    hardy_suite, layer_cake_suite, lemma_lfun_check, levels_suite, sweep, sweep_csv, theorem_bounds_check, BoundOptions,
    SuiteSummary,
};
use isocap::geometry::{gen_model, load_graph, mesh_disk, mesh_to_graph, read_off, graph_to_json, ModelSpec};
use isocap::isocap::{isocap_exact, isocap_heuristic, IsocapMode, IsocapOptions};
use isocap::spectral::{first_eigenvalue, sobolev_constant, SobolevMode, SobolevOptions};
use isocap::{VertexSet, WeightedGraph};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{csv_rows, emit, json as to_json, write};

const OK: u8 = 0;
const VIOLATED: u8 = 2;

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Cap(a) => cap(a),
        Command::Eig(a) => eig(a),
        Command::Isocap(a) => isocap_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Lemma(a) => lemma(a),
    }
}

fn model(spec: &str, seed: Option<u64>) -> Result<WeightedGraph> {
    let spec: ModelSpec = spec.parse()?;
    if matches!(spec, ModelSpec::RandomGnp { .. }) && seed.is_none() {
        bail!("`{spec}` is random; pass --seed");
    }
    Ok(gen_model(&spec, seed)?)
}

fn load(source: &Source, seed: Option<u64>) -> Result<WeightedGraph> {
    match (&source.gen, &source.graph) {
        (Some(spec), _) => model(spec, seed),
        (None, Some(path)) => load_graph(path).with_context(|| format!("loading {}", path.display())),
        (None, None) => bail!("pass --gen or --graph"),
    }
}

fn sobolev_mode(mode: Mode) -> Result<SobolevMode> {
    match mode {
        Mode::Steklov => Ok(SobolevMode::Steklov),
        Mode::Neumann => Ok(SobolevMode::Neumann),
        Mode::Dirichlet => bail!("--mode dirichlet only applies to `isocap`"),
    }
}

fn isocap_mode(mode: Mode) -> IsocapMode {
    match mode {
        Mode::Steklov => IsocapMode::Steklov,
        Mode::Neumann => IsocapMode::Neumann,
        Mode::Dirichlet => IsocapMode::Dirichlet,
    }
}

/// Descent options; refuses random starts without a seed.
fn sobolev_options(s: &Spectral, p: f64, alpha: f64, seed: Option<u64>) -> Result<SobolevOptions> {
    let opts = SobolevOptions {
        starts: s.starts,
        tol: s.tol,
        seed: seed.unwrap_or(0),
        use_oracle: !s.no_oracle,
        ..SobolevOptions::default()
    };
    let exact = opts.use_oracle && p == 2.0 && alpha == 1.0;
    let random_starts = opts.starts > usize::from(opts.oracle_start);
    if !exact && random_starts && seed.is_none() {
        bail!("descent uses random starts; pass --seed");
    }
    Ok(opts)
}

/// Merges extra fields in front of a serialized result.
fn tagged<T: Serialize>(head: Value, body: &T) -> Result<Value> {
    let mut out = head;
    if let (Value::Object(map), Value::Object(rest)) = (&mut out, serde_json::to_value(body)?) {
        map.extend(rest);
    }
    Ok(out)
}

fn gen(a: GenArgs) -> Result<u8> {
    let s = &a.source;
    let g = match (&s.gen, s.disk, &s.off) {
        (Some(spec), _, _) => model(spec, a.seed)?,
        (None, Some(level), _) => report_clamped(mesh_to_graph(&mesh_disk(level))?),
        (None, None, Some(path)) => report_clamped(mesh_to_graph(&read_off(path)?)?),
        _ => bail!("pass --gen, --disk or --off"),
    };
    let mut text = graph_to_json(&g);
    text.push('\n');
    write(&text, a.out.as_deref())?;
    Ok(OK)
}

fn report_clamped(mg: isocap::geometry::MeshGraph) -> WeightedGraph {
    if mg.clamped > 0 {
        eprintln!("warning: {} cotangent weights raised to the positive floor", mg.clamped);
    }
    mg.graph
}

fn cap(a: CapArgs) -> Result<u8> {
    let g = load(&a.source, a.seed)?;
    let sa = VertexSet::new(&g, a.a.iter().copied())?;
    let sb = VertexSet::new(&g, a.b.iter().copied())?;
    let r = if a.linear {
        if a.p != 2.0 {
            bail!("--linear needs --p 2");
        }
        capacity_p2_oracle(&g, &sa, &sb)?
    } else {
        capacity(&g, &sa, &sb, a.p, a.tol)?
    };
    let out = tagged(json!({ "p": a.p, "a": sa, "b": sb }), &r)?;
    emit(&out, &a.output, Format::Json)?;
    Ok(OK)
}

fn eig(a: EigArgs) -> Result<u8> {
    let g = load(&a.source, a.seed)?;
    let mode = sobolev_mode(a.mode)?;
    let opts = sobolev_options(&a.spectral, a.p, a.alpha, a.seed)?;
    let r = if a.alpha == 1.0 {
        first_eigenvalue(&g, a.p, mode, &opts)?
    } else {
        sobolev_constant(&g, a.p, a.alpha, mode, &opts)?
    };
    let head = json!({ "p": a.p, "alpha": a.alpha, "kind": mode, "seed": opts.seed });
    emit(&tagged(head, &r)?, &a.output, Format::Json)?;
    Ok(OK)
}

fn isocap_cmd(a: IsocapArgs) -> Result<u8> {
    let g = load(&a.source, a.seed)?;
    let mode = isocap_mode(a.mode);
    let opts = IsocapOptions {
        budget: a.budget,
        ..IsocapOptions::default()
    };
    let r = if a.heuristic {
        // seed the sweep with the extremal of the matching quotient
        let smode = match mode {
            IsocapMode::Steklov => SobolevMode::Steklov,
            _ => SobolevMode::Neumann,
        };
        let sopts = sobolev_options(&a.spectral, a.p, a.alpha, a.seed)?;
        let sob = sobolev_constant(&g, a.p, a.alpha, smode, &sopts)?;
        isocap_heuristic(&g, a.p, a.alpha, mode, &sob.extremal, a.thresholds, &opts)?
    } else {
        isocap_exact(&g, a.p, a.alpha, mode, &opts)?
    };
    emit(&r, &a.output, Format::Json)?;
    Ok(OK)
}

fn bound_options(s: &Spectral, p: &[f64], alpha: &[f64], seed: Option<u64>, budget: u64, heuristic: bool, thresholds: usize) -> Result<BoundOptions> {
    let mut sobolev = None;
    for &pp in p {
        for &aa in alpha {
            sobolev = Some(sobolev_options(s, pp, aa, seed)?);
        }
    }
    Ok(BoundOptions {
        sobolev: sobolev.unwrap_or_default(),
        isocap: IsocapOptions {
            budget,
            ..IsocapOptions::default()
        },
        heuristic,
        thresholds,
    })
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let g = load(&a.source, a.seed)?;
    let mode = sobolev_mode(a.mode)?;
    let opts = bound_options(&a.spectral, &[a.p], &[a.alpha], a.seed, a.budget, a.heuristic, a.thresholds)?;
    let r = theorem_bounds_check(&g, a.p, a.alpha, mode, &opts)?;
    emit(&r, &a.output, Format::Json)?;
    if !r.violated() {
        return Ok(OK);
    }
    let dump = a.dump.clone().unwrap_or_else(|| match &a.output.out {
        Some(out) => {
            let mut s = out.clone().into_os_string();
            s.push(".instance.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("isocap-violation.instance.json"),
    });
    let graph: Value = serde_json::from_str(&graph_to_json(&g))?;
    let instance = json!({
        "graph": graph,
        "p": a.p,
        "alpha": a.alpha,
        "mode": mode,
        "seed": opts.sobolev.seed,
        "starts": opts.sobolev.starts,
        "tol": opts.sobolev.tol,
        "budget": a.budget,
        "heuristic": a.heuristic,
        "report": r,
    });
    write(&to_json(&instance)?, Some(&dump))?;
    eprintln!("violation: instance written to {}", dump.display());
    Ok(VIOLATED)
}

fn sweep_cmd(a: SweepArgs) -> Result<u8> {
    let g = load(&a.source, a.seed)?;
    let mode = sobolev_mode(a.mode)?;
    let opts = bound_options(&a.spectral, &a.p, &a.alpha, a.seed, a.budget, a.heuristic, a.thresholds)?;
    let rows = sweep(&g, &a.p, &a.alpha, mode, &opts);
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&rows),
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| match &row.report {
                    Ok(r) => serde_json::to_value(r).map_err(Into::into),
                    Err(msg) => Ok(json!({ "p": row.p, "alpha": row.alpha, "mode": row.mode, "seed": row.seed, "error": msg })),
                })
                .collect::<Result<_>>()?;
            to_json(&rows)?
        }
    };
    write(&text, a.output.out.as_deref())?;
    let violated = rows.iter().any(|r| r.report.as_ref().is_ok_and(|r| r.violated()));
    Ok(if violated { VIOLATED } else { OK })
}

type Weight = (&'static str, fn(f64) -> f64);

/// Test weights for the one-dimensional identity.
fn lemma_weights() -> Vec<Weight> {
    vec![
        ("1", |_| 1.0),
        ("t+0.1", |t| t + 0.1),
        ("4", |_| 4.0),
        ("exp(t)", f64::exp),
        ("t", |t| t),
    ]
}

#[derive(Serialize)]
struct LemmaRow {
    check: &'static str,
    case: String,
    p: f64,
    closed_form: f64,
    minimized: f64,
    gap: f64,
}

fn lemma(a: LemmaArgs) -> Result<u8> {
    let Some(seed) = a.seed else {
        bail!("the random suites need --seed");
    };
    let mut rows = Vec::new();
    for (name, g) in lemma_weights() {
        for &p in &a.p {
            let r = lemma_lfun_check(g, p, a.grid)?;
            rows.push(LemmaRow {
                check: "lemma",
                case: name.into(),
                p,
                closed_form: r.closed_form,
                minimized: r.minimized,
                gap: r.gap,
            });
        }
    }
    let suites: Vec<SuiteSummary> = vec![
        levels_suite(seed, a.draws, a.max_n, &a.p)?,
        layer_cake_suite(seed, a.draws, &a.p, &a.alpha)?,
        hardy_suite(seed, a.draws, &a.p)?,
    ];
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({ "seed": seed, "grid": a.grid, "lemma": rows, "suites": suites }))?,
        Format::Csv => {
            let mut out = csv_rows(&rows.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?)?;
            out.push('\n');
            out.push_str(&csv_rows(&suites.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?)?);
            out
        }
    };
    write(&text, a.output.out.as_deref())?;
    let violated = suites.iter().any(|s| s.violations > 0);
    Ok(if violated { VIOLATED } else { OK })
}
