//! `htv`: Hessian-Schatten total variation from the command line.

mod error;
mod functions;
mod parse;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use htv_core::domain::BoxDomain;
use htv_core::ingest::{self, read_mesh_file, relu_to_cpwl_1d, relu_to_cpwl_2d, write_mesh_file, MeshFile, MlpWeights};
use htv_core::matnorm::SchattenOrder;
use htv_core::oracle::{grid_htv, GridEvaluation};
use htv_core::smooth::{htv_quadrature, sweep_rbf_width, QuadratureRule, QuadratureSpec};
use htv_core::transforms::{apply_to_cpwl, predicted_factor};

use error::CliError;
use report::{sig12, Format, Report};

/// Relative gap allowed between measured and predicted CPWL factors.
const INVARIANCE_TOLERANCE: f64 = 1e-9;
/// Below this an HTV value is treated as the affine null space.
const NULL_SPACE: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "htv", version, about = "Hessian-Schatten total variation of CPWL and smooth functions")]
#[command(after_help = "Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 numerical failure.\n\
Errors go to stderr as one line: error: kind=<parse|invariant|numerical> message=\"...\".")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// One JSON object instead of `key value` lines.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// A header row and one value row.
    #[arg(long)]
    csv: bool,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact HTV of a mesh file and its number of linear regions.
    Cpwl {
        #[arg(long)]
        mesh: PathBuf,
        /// Schatten order: a number >= 1 or `inf`.
        #[arg(long, default_value = "1")]
        p: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quadrature HTV of a named smooth function.
    #[command(after_help = "Functions and parameters:\n  \
        bowl                          ||x||^2 / 2\n  \
        cubic     axis=K              x_K^3\n  \
        affine    gradient=G,.. offset=B\n  \
        gaussian  center=C,.. sigma=S weight=W\n  \
        rbf       centers=FILE sigma=S  (FILE: {\"centers\": [[..]], \"weights\": [..]})")]
    Smooth {
        #[arg(long = "fn")]
        name: String,
        /// `K=V` parameters of the function.
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
        /// Box `lo:hi,lo:hi,...`; its axis count sets the dimension.
        #[arg(long = "box", allow_hyphen_values = true)]
        domain: String,
        /// Cells per axis.
        #[arg(long, default_value_t = 128)]
        nodes: usize,
        #[arg(long, default_value = "1")]
        p: String,
        /// `gauss2` or `midpoint`.
        #[arg(long, default_value = "gauss2")]
        rule: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-difference grid oracle on a named function or a mesh file.
    #[command(after_help = "Functions: bowl, cubic, affine, gaussian, rbf (see `htv smooth --help`), \
        pyramid (2D), hat (1D).")]
    Oracle {
        #[arg(long = "fn", required_unless_present = "mesh", conflicts_with = "mesh")]
        name: Option<String>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
        /// Box `lo:hi,...`; defaults to the mesh bounding box.
        #[arg(long = "box", required_unless_present = "mesh", allow_hyphen_values = true)]
        domain: Option<String>,
        /// Grid cells per axis.
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long, default_value = "inf")]
        p: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Measured versus predicted HTV factor under a domain transform.
    #[command(after_help = "Transform steps, separated by '/' and applied left to right:\n  \
        rot:ANGLEdeg[@i,j]  rot:ANGLErad[@i,j]  rotation in the (i, j) plane, default (0, 1)\n  \
        scale:A             x -> A x\n  \
        shift:X,Y,..        x -> x - shift")]
    CheckInvariance {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        transform: String,
        #[arg(long, default_value = "1")]
        p: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// HTV of a fixed RBF mixture as the kernel width varies.
    #[command(after_help = "CSV columns: sigma, htv, error_estimate (quadrature |value(n) - value(n/2)|).\n\
        Centres file: {\"centers\": [[x, y], ...], \"weights\": [w, ...]}.")]
    SweepRbf {
        #[arg(long)]
        centers: PathBuf,
        /// Comma-separated widths.
        #[arg(long)]
        widths: String,
        #[arg(long, default_value = "1")]
        p: String,
        /// Output file, `-` for stdout.
        #[arg(long, default_value = "-")]
        csv: String,
        /// Box `lo:hi,...`; defaults to the centres' bounding box padded by 4 × the largest width.
        #[arg(long = "box", allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
    },
    /// CPWL mesh of a ReLU network given as JSON weights.
    #[command(after_help = "Weights: {\"input_dim\": d, \"layers\": [{\"weights\": [[..]], \"bias\": [..]}, ..]}.\n\
        1D networks are exact at any depth. 2D networks are exact with one hidden layer, otherwise\n\
        sampled on NODES x NODES cells and marked approximate.")]
    ImportRelu {
        #[arg(long)]
        weights: PathBuf,
        /// Box `lo:hi,...`; 1D defaults to an interval covering every breakpoint, 2D to [-1,1]^2.
        #[arg(long = "box", allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn cpwl(mesh: &Path, p: &str) -> Result<Report, CliError> {
    let p = parse::order(p)?;
    let file = read_mesh_file(mesh)?;
    let m = file.to_mesh()?;
    let value = m.htv(p);
    if !value.is_finite() {
        return Err(CliError::Numerical(format!("htv of {} is not finite", mesh.display())));
    }
    let mut r = Report::default()
        .text("p", parse::order_label(p))
        .num("htv", value)
        .int("regions", m.region_count())
        .int("dim", m.dim())
        .int("simplices", m.simplices().len());
    if let Some(exact) = file.exact {
        r = r.flag("exact", exact);
    }
    Ok(r)
}

fn quadrature_rule(s: &str) -> Result<QuadratureRule, CliError> {
    match s {
        "gauss2" => Ok(QuadratureRule::Gauss2),
        "midpoint" => Ok(QuadratureRule::Midpoint),
        other => Err(CliError::Parse(format!("rule: '{other}' is not gauss2 or midpoint"))),
    }
}

fn smooth(name: &str, params: &[String], domain: &str, nodes: usize, p: &str, rule: &str) -> Result<Report, CliError> {
    let p = parse::order(p)?;
    let domain = parse::box_spec(domain)?;
    let (f, is_smooth) = functions::build(name, parse::params(params)?, domain.dim())?;
    if !is_smooth {
        return Err(CliError::Parse(format!("{name} is not smooth; use `htv oracle`")));
    }
    let spec = QuadratureSpec::new(domain, nodes, quadrature_rule(rule)?)?;
    let q = htv_quadrature(&f, &spec, p)?;
    if !q.value.is_finite() {
        return Err(CliError::Numerical(format!("quadrature of {name} is not finite")));
    }
    Ok(Report::default()
        .text("p", parse::order_label(p))
        .num("htv", q.value)
        .num("error_estimate", q.error_estimate)
        .int("nodes", nodes)
        .text("rule", rule))
}

fn bounding_box(vertices: &[Vec<f64>]) -> Result<BoxDomain, CliError> {
    let d = vertices[0].len();
    let lower = (0..d).map(|a| vertices.iter().map(|v| v[a]).fold(f64::INFINITY, f64::min)).collect();
    let upper = (0..d).map(|a| vertices.iter().map(|v| v[a]).fold(f64::NEG_INFINITY, f64::max)).collect();
    Ok(BoxDomain::new(lower, upper)?)
}

fn oracle(
    name: Option<&str>,
    mesh: Option<&Path>,
    params: &[String],
    domain: Option<&str>,
    nodes: usize,
    p: &str,
) -> Result<Report, CliError> {
    let p = parse::order(p)?;
    let grid = match (name, mesh) {
        (_, Some(path)) => {
            let m = ingest::read_mesh(path)?;
            let domain = match domain {
                Some(s) => parse::box_spec(s)?,
                None => bounding_box(m.vertices())?,
            };
            if domain.dim() != m.dim() {
                return Err(CliError::Parse(format!("box has {} axes, mesh is {}-dimensional", domain.dim(), m.dim())));
            }
            // Points outside the mesh have no value.
            let outside = std::sync::atomic::AtomicBool::new(false);
            let g = GridEvaluation::sample(
                |x| {
                    m.evaluate(x).unwrap_or_else(|_| {
                        outside.store(true, std::sync::atomic::Ordering::Relaxed);
                        0.0
                    })
                },
                domain,
                nodes,
            )?;
            if outside.into_inner() {
                return Err(CliError::Parse("box reaches outside the mesh".into()));
            }
            g
        }
        (Some(name), None) => {
            let domain = parse::box_spec(domain.expect("clap requires --box"))?;
            let (f, _) = functions::build(name, parse::params(params)?, domain.dim())?;
            GridEvaluation::sample(|x| f.eval(x), domain, nodes)?
        }
        (None, None) => unreachable!("clap requires --fn or --mesh"),
    };
    let r = grid_htv(&grid, p)?;
    Ok(Report::default()
        .text("p", parse::order_label(p))
        .num("htv", r.value)
        .num("interior", r.interior_value)
        .int("excluded_nodes", r.excluded_nodes)
        .num("boundary_volume", r.boundary_volume)
        .int("nodes", nodes))
}

/// The report is printed even when the check fails.
fn check_invariance(mesh: &Path, spec: &str, p: &str) -> Result<(Report, Option<CliError>), CliError> {
    let p = parse::order(p)?;
    let m = ingest::read_mesh(mesh)?;
    let t = parse::transform(spec, m.dim())?;
    let moved = apply_to_cpwl(&m, &t)?;
    let (before, after) = (m.htv(p), moved.htv(p));
    let predicted = predicted_factor(&t, m.dim());
    let report = Report::default().text("p", parse::order_label(p)).num("before", before).num("after", after);
    if before <= NULL_SPACE {
        let ok = after <= NULL_SPACE * predicted.max(1.0);
        let failure = (!ok).then(|| CliError::Invariant(format!("affine input maps to htv {}", sig12(after))));
        let report = report.num("predicted", predicted).text("measured", "null-space").flag("ok", ok);
        return Ok((report, failure));
    }
    let measured = after / before;
    let deviation = (measured / predicted - 1.0).abs();
    let ok = deviation <= INVARIANCE_TOLERANCE;
    let failure = (!ok).then(|| {
        CliError::Invariant(format!(
            "measured factor {} differs from predicted {} by {}",
            sig12(measured),
            sig12(predicted),
            sig12(deviation)
        ))
    });
    let report = report
        .num("predicted", predicted)
        .num("measured", measured)
        .num("deviation", deviation)
        .flag("ok", ok);
    Ok((report, failure))
}

fn sweep_rbf(centers: &Path, widths: &str, p: &str, csv: &str, domain: Option<&str>, nodes: usize) -> Result<String, CliError> {
    let p = parse::order(p)?;
    let c = parse::centers_file(centers)?;
    let widths = parse::widths(widths)?;
    let domain = match domain {
        Some(s) => parse::box_spec(s)?,
        None => {
            let pad = 4.0 * widths.iter().cloned().fold(0.0, f64::max);
            let b = bounding_box(&c.centers)?;
            BoxDomain::new(
                b.lower().iter().map(|x| x - pad).collect(),
                b.upper().iter().map(|x| x + pad).collect(),
            )?
        }
    };
    let spec = QuadratureSpec::new(domain, nodes, QuadratureRule::Gauss2)?;
    let rows = sweep_rbf_width(&c.centers, &c.weights, &widths, &spec, p)?;
    let mut table = String::from("sigma,htv,error_estimate\n");
    for r in &rows {
        table += &format!("{},{},{}\n", sig12(r.sigma), sig12(r.htv), sig12(r.error_estimate));
    }
    if csv == "-" {
        return Ok(table);
    }
    std::fs::write(csv, &table).map_err(|e| CliError::Parse(format!("{csv}: {e}")))?;
    Ok(Report::default()
        .text("p", parse::order_label(p))
        .int("rows", rows.len())
        .text("csv", csv)
        .render(Format::Text))
}

fn import_relu(weights: &Path, domain: Option<&str>, nodes: usize, out: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(weights).map_err(|e| CliError::Parse(format!("{}: {e}", weights.display())))?;
    let w = MlpWeights::parse(&text)?;
    let domain = domain.map(parse::box_spec).transpose()?;
    let (mesh, exact, notice) = match w.input_dim {
        1 => {
            let s = relu_to_cpwl_1d(&w)?;
            let (lo, hi) = match &domain {
                Some(b) if b.dim() == 1 => (b.lower()[0], b.upper()[0]),
                Some(b) => return Err(CliError::Parse(format!("box has {} axes, network input is 1", b.dim()))),
                None => s.covering_interval(),
            };
            (s.to_mesh(lo, hi)?, true, None)
        }
        2 => {
            let b = match domain {
                Some(b) => b,
                None => BoxDomain::cube(2, -1.0, 1.0)?,
            };
            let imported = relu_to_cpwl_2d(&w, &b, nodes)?;
            (imported.mesh, imported.exact, imported.notice)
        }
        d => return Err(CliError::Parse(format!("import supports 1D and 2D networks, got input dimension {d}"))),
    };
    let stem = weights.file_stem().map_or("relu".into(), |s| s.to_string_lossy().into_owned());
    let mut file = MeshFile::from_mesh(&mesh, stem, "");
    file.source = Some(if exact { "relu-exact" } else { "relu-approximate" }.into());
    file.exact = Some(exact);
    write_mesh_file(&file, out)?;
    let mut r = Report::default()
        .flag("exact", exact)
        .num("htv", mesh.htv(SchattenOrder::ONE))
        .int("regions", mesh.region_count())
        .int("vertices", mesh.vertices().len())
        .int("simplices", mesh.simplices().len())
        .text("out", out.display().to_string());
    if let Some(n) = notice {
        r = r.text("notice", n);
    }
    Ok(r)
}

fn run(cli: Cli) -> Result<(String, Option<CliError>), CliError> {
    let single = |r: Report, o: &OutputArgs| (r.render(o.format()), None);
    Ok(match cli.command {
        Command::Cpwl { mesh, p, output } => single(cpwl(&mesh, &p)?, &output),
        Command::Smooth { name, params, domain, nodes, p, rule, output } => {
            single(smooth(&name, &params, &domain, nodes, &p, &rule)?, &output)
        }
        Command::Oracle { name, mesh, params, domain, nodes, p, output } => single(
            oracle(name.as_deref(), mesh.as_deref(), &params, domain.as_deref(), nodes, &p)?,
            &output,
        ),
        Command::CheckInvariance { mesh, transform, p, output } => {
            let (r, failure) = check_invariance(&mesh, &transform, &p)?;
            (r.render(output.format()), failure)
        }
        Command::SweepRbf { centers, widths, p, csv, domain, nodes } => {
            (sweep_rbf(&centers, &widths, &p, &csv, domain.as_deref(), nodes)?, None)
        }
        Command::ImportRelu { weights, domain, nodes, out, output } => {
            single(import_relu(&weights, domain.as_deref(), nodes, &out)?, &output)
        }
    })
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.line());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail(&CliError::Parse(first.trim_start_matches("error: ").to_string()));
        }
    };
    match run(cli) {
        Ok((out, failure)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            match failure {
                Some(e) => fail(&e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
