mod args;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use netboundary::boundary::{cluster_size_histogram, ClusterHistogram};
use netboundary::figures::{
    boundary_study, fit_cluster_exponent, fractal_pairs, model_tag, reproduce, study_prepared, Figure, FigureOptions,
    Prepared, PDF_BINS_PER_DECADE,
};
use netboundary::gf::{gf_from_degree_dist, shell_size_pdf};
use netboundary::graph::{degree_distribution, load_edge_list, write_edge_list, Graph};
use netboundary::shells::shell_branching;
use netboundary::stats::{
    bin_points, empirical_ccdf, fit_discrete_power_law, fit_fractal_dimension, fit_loglog, log_binned_pdf,
    power_law_vs_exponential, quantile, scaling_window, FitResult, MIN_FIT_SAMPLES,
};
use netboundary::Error;
use serde::Serialize;
use serde_json::{json, Value};

use args::{
    build_model, BoundaryArgs, Cli, Command, FitArgs, FitKind, GenerateArgs, GfArgs, ProfileArgs, ReproduceArgs,
};

/// Exit status 1: bad invocation or parameters. Exit status 2: unreadable
/// or unusable data.
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Profile(a) => profile(&a),
        Command::Boundary(a) => boundary(&a),
        Command::Gf(a) => gf(&a),
        Command::Fit(a) => fit(&a),
        Command::Reproduce(a) => reproduce_figure(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// Header shared by every JSON document: no timestamps, so identical
/// invocations give identical bytes.
fn metadata(seed: Option<u64>, parameters: &impl Serialize) -> Value {
    let command: Vec<String> = std::iter::once("netboundary".to_string())
        .chain(std::env::args().skip(1))
        .collect();
    json!({
        "tool": "netboundary",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.join(" "),
        "seed": seed,
        "parameters": parameters,
    })
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    match load_edge_list(path) {
        Ok((g, _)) => Ok(g),
        Err(e @ Error::Io { .. }) => Err(Failure::Data(e.to_string())),
        Err(e) => Err(Failure::Data(format!("{}: {e}", path.display()))),
    }
}

fn graph_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn emit(doc: &Value, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| write_failure(path, e)),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Data(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn generate(a: &GenerateArgs) -> Outcome {
    let model = a.model.network_model();
    let (graph, audit) = model.generate(a.seed)?;
    let isolated = (0..graph.node_count()).filter(|&v| graph.degree(v) == 0).count();
    let model_json = serde_json::to_string(&model).expect("models serialize");
    let header = vec![
        format!("netboundary {} generate", env!("CARGO_PKG_VERSION")),
        format!("model: {model_json}"),
        format!("seed: {}", a.seed),
        format!("nodes: {} edges: {} isolated: {isolated}", graph.node_count(), graph.edge_count()),
    ];
    let file = File::create(&a.out).map_err(|e| write_failure(&a.out, e))?;
    let mut w = BufWriter::new(file);
    write_edge_list(&graph, &mut w, &header)
        .and_then(|_| w.flush())
        .map_err(|e| write_failure(&a.out, e))?;
    emit(
        &json!({
            "kind": "generate",
            "metadata": metadata(Some(a.seed), a),
            "model": model,
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "mean_degree": graph.mean_degree(),
            "isolated_nodes": isolated,
            "audit": audit,
            "output": a.out,
        }),
        None,
    )
}

fn profile(a: &ProfileArgs) -> Outcome {
    let net = Prepared::from_graph(graph_label(&a.graph), load_graph(&a.graph)?);
    let study = study_prepared(&net, a.origins, a.pair_samples, a.seed)?;
    let ens = &study.ensemble;
    let origins: Vec<Value> = ens
        .profiles
        .iter()
        .map(|p| json!({ "origin": net.giant.label(p.origin), "sizes": p.sizes }))
        .collect();
    emit(
        &json!({
            "kind": "shell-profile",
            "metadata": metadata(Some(a.seed), a),
            "network": net.info,
            "distance": study.distances[0],
            "cut": study.cut(),
            "origins": origins,
            "mean_sizes": ens.mean_sizes(),
            "branching": shell_branching(ens),
        }),
        a.out.as_deref(),
    )
}

fn boundary(a: &BoundaryArgs) -> Outcome {
    let net = Prepared::from_graph(graph_label(&a.graph), load_graph(&a.graph)?);
    let explicit: Option<Vec<usize>> = a
        .cut
        .map(|c| (c..=c + if a.sweep { 2 } else { 0 }).collect());
    if explicit.as_ref().is_some_and(|c| c[0] == 0) {
        return Err(Failure::Usage("--cut must be at least 1".into()));
    }
    let study = boundary_study(
        &net,
        a.origins,
        explicit.as_deref(),
        a.sweep,
        !a.no_distances,
        a.pair_samples,
        a.seed,
    )?;
    let cuts: Vec<Value> = study
        .cuts
        .iter()
        .zip(&study.sets)
        .map(|(&cut, sets)| {
            let hist = cluster_size_histogram(sets, false).unwrap_or_default();
            let pairs = fractal_pairs(sets);
            let largest: Vec<usize> = sets
                .iter()
                .map(|s| s.largest.map_or(0, |i| s.clusters[i].size))
                .collect();
            let histogram: Vec<[u64; 2]> = hist.counts.iter().map(|(&s, &c)| [s as u64, c]).collect();
            json!({
                "cut": cut,
                "clusters": hist.clusters(),
                "mass": hist.mass(),
                "largest_sizes": largest,
                "histogram": histogram,
                "theta": fit_cluster_exponent(&hist).ok(),
                "fractal_pairs": pairs,
                "phi": fit_fractal_dimension(&pairs, 0.0, f64::INFINITY).ok(),
            })
        })
        .collect();
    emit(
        &json!({
            "kind": "boundary",
            "metadata": metadata(Some(a.seed), a),
            "network": net.info,
            "distance": study.distance,
            "origins": study.sets.first().map_or(0, Vec::len),
            "cuts": cuts,
        }),
        a.out.as_deref(),
    )
}

fn gf(a: &GfArgs) -> Outcome {
    let (source, model, tag) = match &a.graph {
        Some(path) => {
            let g = load_graph(path)?;
            let m = gf_from_degree_dist(&degree_distribution(&g))
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            (json!({ "graph": path }), m, None)
        }
        None => {
            let nm = a.model.network_model();
            let m = gf_from_degree_dist(&nm.degree_distribution()?)?;
            (json!(nm), m, model_tag(&nm))
        }
    };
    let pdfs = a
        .shell_pdf
        .iter()
        .map(|&m| shell_size_pdf(&model, m, a.b_max))
        .collect::<netboundary::Result<Vec<_>>>()?;
    emit(
        &json!({
            "kind": "gf",
            "metadata": metadata(None, a),
            "source": source,
            "report": model.report(tag),
            "shell_pdfs": pdfs,
        }),
        a.out.as_deref(),
    )
}

fn fit(a: &FitArgs) -> Outcome {
    let text = fs::read_to_string(&a.input).map_err(|e| write_failure(&a.input, e))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", a.input.display())))?;
    let bad = |msg: String| Failure::Data(format!("{}: {msg}", a.input.display()));
    let (result, line) = match a.kind {
        FitKind::Ccdf | FitKind::Pdf | FitKind::Mle | FitKind::Lr => {
            let samples = samples_from(&doc, a.shell).map_err(bad)?;
            sample_fit(a, &samples)?
        }
        FitKind::Cluster => {
            let hist = histogram_from(&doc, a.cut).map_err(bad)?;
            let r = fit_cluster_exponent(&hist)?;
            let line = describe("cluster-size exponent", &r);
            (json!(r), line)
        }
        FitKind::Fractal => {
            let pairs = pairs_from(&doc, a.cut).map_err(bad)?;
            let r = fit_fractal_dimension(&pairs, a.x_min.unwrap_or(0.0), a.x_max.unwrap_or(f64::INFINITY))?;
            let line = describe("fractal dimension", &r);
            (json!(r), line)
        }
    };
    eprintln!("{line}");
    emit(
        &json!({
            "kind": "fit",
            "metadata": metadata(None, a),
            "fit": a.kind,
            "shell": a.shell,
            "cut": a.cut,
            "result": result,
        }),
        a.out.as_deref(),
    )
}

fn describe(what: &str, r: &FitResult) -> String {
    format!(
        "{what}: {:.4} +- {:.4} over [{:.4}, {:.4}] from {} points",
        r.exponent, r.stderr, r.fit_range.0, r.fit_range.1, r.sample_count
    )
}

fn sample_fit(a: &FitArgs, samples: &[usize]) -> Result<(Value, String), Failure> {
    if a.kind == FitKind::Lr {
        let x_min = match a.x_min {
            Some(x) => x.ceil().max(1.0) as usize,
            None => quantile(samples, 0.5).ok_or(Error::InsufficientData { needed: 1, got: 0 })?,
        };
        let lr = power_law_vs_exponential(samples, x_min)?;
        let line = format!(
            "likelihood ratio from x_min {}: R = {:.3}, normalized {:.3}, p = {:.3}, favours {:?}",
            lr.x_min, lr.log_ratio, lr.normalized, lr.p_value, lr.verdict
        );
        return Ok((json!(lr), line));
    }
    let window = scaling_window(samples);
    let lo = a.x_min.or(window.map(|w| w.0 as f64));
    let hi = a.x_max.or(if a.x_min.is_some() { None } else { window.map(|w| w.1 as f64) });
    let Some(lo) = lo else {
        return Err(Error::InsufficientData {
            needed: 2 * MIN_FIT_SAMPLES + 1,
            got: samples.len(),
        }
        .into());
    };
    let r = match a.kind {
        FitKind::Ccdf => {
            let pts: Vec<(f64, f64)> = empirical_ccdf(samples)?
                .into_iter()
                .map(|(x, p)| (x as f64, p))
                .collect();
            fit_loglog(&pts, lo, hi.unwrap_or(f64::INFINITY))?
        }
        FitKind::Pdf => {
            let pts = bin_points(&log_binned_pdf(samples, PDF_BINS_PER_DECADE));
            fit_loglog(&pts, lo, hi.unwrap_or(f64::INFINITY))?
        }
        _ => fit_discrete_power_law(samples, lo.ceil().max(1.0) as usize, hi.map(|h| h.floor() as usize))?,
    };
    let what = match a.kind {
        FitKind::Ccdf => "ccdf slope",
        FitKind::Pdf => "pdf slope",
        _ => "mle exponent",
    };
    Ok((json!(r), describe(what, &r)))
}

fn samples_from(doc: &Value, shell: Option<usize>) -> Result<Vec<usize>, String> {
    if let Some(origins) = doc.get("origins").and_then(Value::as_array) {
        let shell = shell.ok_or("profile input needs --shell")?;
        let mut out = Vec::new();
        for o in origins {
            let sizes = o.get("sizes").and_then(Value::as_array).ok_or("origin entry without sizes")?;
            if let Some(b) = sizes.get(shell).and_then(Value::as_u64).filter(|&b| b > 0) {
                out.push(b as usize);
            }
        }
        return Ok(out);
    }
    let raw = doc
        .get("samples")
        .and_then(Value::as_array)
        .ok_or("expected a profile (\"origins\") or a \"samples\" array")?;
    raw.iter()
        .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| format!("sample {v} is not a non-negative integer")))
        .collect()
}

/// The entry of a boundary document's `cuts` matching `cut`, or the first one.
fn cut_entry(doc: &Value, cut: Option<usize>) -> Result<Option<&Value>, String> {
    let Some(cuts) = doc.get("cuts").and_then(Value::as_array) else {
        return Ok(None);
    };
    let entry = match cut {
        Some(c) => cuts.iter().find(|e| e.get("cut").and_then(Value::as_u64) == Some(c as u64)),
        None => cuts.first(),
    };
    entry.map(Some).ok_or_else(|| format!("no cut {} in input", cut.map_or("entries".into(), |c| c.to_string())))
}

fn histogram_from(doc: &Value, cut: Option<usize>) -> Result<ClusterHistogram, String> {
    let src = cut_entry(doc, cut)?.unwrap_or(doc);
    let rows = src
        .get("histogram")
        .and_then(Value::as_array)
        .ok_or("expected a boundary document or a \"histogram\" array of [size, count]")?;
    let mut hist = ClusterHistogram::default();
    for row in rows {
        match (row.get(0).and_then(Value::as_u64), row.get(1).and_then(Value::as_u64)) {
            (Some(s), Some(c)) if s > 0 => *hist.counts.entry(s as usize).or_insert(0) += c,
            _ => return Err(format!("bad histogram row {row}")),
        }
    }
    Ok(hist)
}

fn pairs_from(doc: &Value, cut: Option<usize>) -> Result<Vec<(f64, f64)>, String> {
    let src = cut_entry(doc, cut)?.unwrap_or(doc);
    let rows = src
        .get("fractal_pairs")
        .or_else(|| src.get("pairs"))
        .and_then(Value::as_array)
        .ok_or("expected a boundary document or a \"pairs\" array of [size, distance]")?;
    rows.iter()
        .map(|row| match (row.get(0).and_then(Value::as_f64), row.get(1).and_then(Value::as_f64)) {
            (Some(s), Some(d)) => Ok((s, d)),
            _ => Err(format!("bad pair {row}")),
        })
        .collect()
}

fn reproduce_figure(a: &ReproduceArgs) -> Outcome {
    let figure: Figure = a.figure.parse()?;
    let opts = FigureOptions {
        n: a.n,
        mean_degree: a.mean_degree,
        lambda: a.lambda,
        k_min: a.k_min,
        model: a.model.map(|m| build_model(m, a.n, a.mean_degree, a.lambda, a.k_min, a.degree)),
        origins: a.origins,
        seed: a.seed,
        realizations: a.realizations,
        pair_samples: a.pair_samples,
        cut: a.cut,
        sweep: a.sweep,
    };
    let label = a.graph.as_deref().map(graph_label);
    let graph = match &a.graph {
        Some(path) => Some(load_graph(path)?),
        None => None,
    };
    let out = reproduce(figure, label.as_deref().zip(graph), &opts)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| write_failure(&a.out_dir, e))?;

    let meta = metadata(Some(a.seed), a);
    let header = vec![
        format!("netboundary {} reproduce --figure {}", env!("CARGO_PKG_VERSION"), figure),
        format!("command: {}", meta["command"].as_str().unwrap_or_default()),
    ];
    for curve in &out.curves {
        let path = a.out_dir.join(format!("{}_{}.dat", figure, curve.name));
        let file = File::create(&path).map_err(|e| write_failure(&path, e))?;
        let mut w = BufWriter::new(file);
        curve
            .write_to(&mut w, &header)
            .and_then(|_| w.flush())
            .map_err(|e| write_failure(&path, e))?;
    }
    let summary: PathBuf = a.out_dir.join(format!("{figure}_summary.json"));
    emit(&json!({ "kind": "figure", "metadata": meta, "report": out.report }), Some(&summary))?;

    for c in &out.report.checks {
        let value = c.value.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        println!(
            "{} {}: {value} in [{}, {}]",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.min,
            c.max
        );
    }
    let verdict = match out.report.passed {
        Some(true) => "all checks passed",
        Some(false) => "some checks failed",
        None => "no checks for user data",
    };
    println!(
        "figure {figure}: {} curves and {} written, {verdict}",
        out.curves.len(),
        summary.display()
    );
    Ok(())
}
