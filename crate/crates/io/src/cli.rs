use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::{Matrix3, Rotation3, Unit, Vector2, Vector3};
use polyflex::constructions::{minkowski_flex, minkowski_sum, stack_pyramid, validate_flex_path, zonotope_flex, flex_path_follow, Zonotope};
use polyflex::contraction::{contraction_sequence, convergence_report, flex_limit, ContractionCase, FlexGauge, LimitVerdict};
use polyflex::geometry::CatalogEntry;
use polyflex::graph::contract_edge;
use polyflex::rigidity::{flex_analysis_with, ExactMode, Verdict};
use polyflex::tutte_mc::{check_self_stress, lift_to_polytope, mc_lift, reciprocal_build, reciprocity_residual, tutte_embed};
use polyflex::{PolyhedralGraph, ToleranceConfig};
use serde_json::{json, Value};

use crate::error::{IoError, Result};
use crate::experiments::minkowski_family;
use crate::format::{
    framework_json, load_graph, load_source, parse_framework_json, polytope_text, read_text, write_text, Format, Source,
    TutteInput,
};
use crate::generators::{self, DEFAULT_SEED};
use crate::report::{report_json, run_analyze, verdict_name, AnalyzeOptions};
use crate::sequence::{save_contraction, save_flex_path, SaveOptions};

/// First-order rigidity and flexibility of 3-polytopes.
#[derive(Debug, Parser)]
#[command(name = "polyflex", version)]
pub struct Cli {
    /// Residual tolerance, relative to the diameter.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Relative singular value threshold for the numerical rank.
    #[arg(long = "rank-gap", global = true, default_value_t = 1e-8)]
    pub rank_gap: f64,
    /// Seed of every randomized choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Run the rational rank oracle whenever the input is exactly flat.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Format of written polytopes.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output directory; single results go to standard output without it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Polytope arguments are `catalog:NAME` or a JSON / OFF file.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rigidity report of a polytope.
    Analyze {
        source: Option<Source>,
        /// Catalog entry, same as `catalog:NAME`.
        #[arg(long, conflicts_with = "source")]
        catalog: Option<String>,
        /// Include the matrices of the affine flexes.
        #[arg(long)]
        affine: bool,
        /// Include the running time (the report is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// List the catalog, or write one entry.
    Catalog { name: Option<String> },
    /// Minkowski sum `P + Q`; with `--angle`, the path `P + R(t) Q`.
    Minkowski {
        p: Source,
        q: Source,
        /// Total rotation of `Q` in degrees.
        #[arg(long)]
        angle: Option<f64>,
        /// Rotation axis `x,y,z`; seeded when absent.
        #[arg(long, value_parser = parse_vector)]
        axis: Option<Vector3<f64>>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Zonotope with generators redirected along a shear `I + t s u vᵀ`.
    ZonotopeFlex {
        /// Generators `x,y,z;x,y,z;...`; seeded when absent.
        #[arg(long)]
        generators: Option<String>,
        /// Number of seeded generators.
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Shear strength `s`.
        #[arg(long, default_value_t = 0.5)]
        shear: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Stack a pyramid on a facet.
    Stack {
        source: Source,
        #[arg(long)]
        facet: usize,
        #[arg(long)]
        height: f64,
    },
    /// Tutte drawing of a graph with an outer triangle; writes a framework.
    Tutte { input: PathBuf },
    /// Reciprocal and Maxwell-Cremona lift of a framework; writes a polytope.
    Lift { framework: PathBuf },
    /// Contraction sequence of `G` towards a realization of `G / e`.
    Contract {
        /// Graph file or `catalog:NAME`.
        #[arg(long)]
        graph: Source,
        /// Edge `a,b` of the graph.
        #[arg(long, value_parser = parse_edge)]
        edge: [usize; 2],
        /// Realization of `G / e`, numbered as the contraction numbers it;
        /// a seeded generic one when absent.
        #[arg(long)]
        target: Option<Source>,
        #[arg(long, default_value_t = polyflex::contraction::DEFAULT_LENGTH)]
        n: usize,
        #[arg(long, default_value_t = polyflex::contraction::DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Follow a nontrivial first-order flex to a path of realizations.
    FlexPath {
        source: Source,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Which nontrivial kernel vector to start from.
        #[arg(long, default_value_t = 0)]
        flex: usize,
    },
    /// Limit of the flexes of `P + tQ` turning `Q`, as `t -> 0`.
    FlexLimit {
        p: Source,
        /// Seeded tetrahedron when absent.
        q: Option<Source>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.02, 0.002, 2e-4, 2e-5, 2e-6])]
        t: Vec<f64>,
        #[arg(long, value_parser = parse_vector)]
        axis: Option<Vector3<f64>>,
    },
}

fn parse_numbers(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"))).collect()
}

fn parse_vector(s: &str) -> std::result::Result<Vector3<f64>, String> {
    match parse_numbers(s)?.as_slice() {
        &[x, y, z] => Ok(Vector3::new(x, y, z)),
        _ => Err("expected x,y,z".into()),
    }
}

fn parse_edge(s: &str) -> std::result::Result<[usize; 2], String> {
    let ids: Vec<usize> = s.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<std::result::Result<_, _>>()?;
    match ids.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err("expected a,b".into()),
    }
}

struct Ctx {
    tol: ToleranceConfig,
    exact: ExactMode,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
}

impl Ctx {
    /// `text` to `out/name`, or to standard output.
    fn emit(&self, name: &str, text: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
                write_text(&dir.join(name), text)
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| IoError::io("<stdout>", e))
            }
        }
    }

    fn polytope_name(&self, stem: &str) -> String {
        format!("{stem}.{}", self.format.extension())
    }

    fn out_dir(&self, command: &str) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| IoError::Usage(format!("`{command}` writes a directory; pass --out DIR")))
    }

    fn save_opts(&self) -> SaveOptions {
        SaveOptions {
            format: self.format,
            obj: true,
        }
    }

    fn load(&self, src: &Source) -> Result<crate::format::Loaded> {
        let loaded = load_source(src, None, &self.tol)?;
        for w in &loaded.warnings {
            eprintln!("warning: {src}: {w}");
        }
        Ok(loaded)
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Parses the arguments, runs, reports errors on standard error and returns
/// the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let tol = ToleranceConfig::new(cli.tol, cli.rank_gap)?;
    let ctx = Ctx {
        tol,
        exact: if cli.exact { ExactMode::Force } else { ExactMode::Auto },
        seed: cli.seed,
        format: cli.format,
        out: cli.out,
    };
    let mut rng = generators::rng(ctx.seed);
    match cli.command {
        Command::Analyze {
            source,
            catalog,
            affine,
            timing,
        } => {
            let src = match (source, catalog) {
                (Some(s), None) => s,
                (None, Some(name)) => Source::Catalog(name),
                _ => return Err(IoError::Usage("analyze needs a source or --catalog NAME".into())),
            };
            let loaded = ctx.load(&src)?;
            let opts = AnalyzeOptions {
                tol: ctx.tol,
                exact: ctx.exact,
                affine_matrices: affine,
                timing,
            };
            let report = run_analyze(&src.to_string(), &loaded, &opts)?;
            ctx.emit("report.json", &report_json(&report))?;
            Ok(0)
        }
        Command::Catalog { name: None } => {
            let names: Vec<String> = CatalogEntry::all().iter().map(|e| format!("{e}\n")).collect();
            ctx.emit("catalog.txt", &names.concat())?;
            Ok(0)
        }
        Command::Catalog { name: Some(name) } => {
            let loaded = ctx.load(&Source::Catalog(name.clone()))?;
            let text = polytope_text(&loaded.combinatorial_type, &loaded.realization, ctx.format);
            ctx.emit(&ctx.polytope_name(&name), &text)?;
            Ok(0)
        }
        Command::Minkowski {
            p,
            q,
            angle,
            axis,
            samples,
        } => {
            let p = ctx.load(&p)?;
            let q = ctx.load(&q)?;
            match angle {
                None => {
                    let (ct, r, _) = minkowski_sum(&p.realization, &q.realization)?;
                    ctx.emit(&ctx.polytope_name("sum"), &polytope_text(&ct, &r, ctx.format))?;
                    Ok(0)
                }
                Some(deg) => {
                    let axis = Unit::try_new(axis.unwrap_or_else(|| generators::random_axis(&mut rng)), 1e-12)
                        .ok_or_else(|| IoError::Usage("zero axis".into()))?;
                    let path = minkowski_flex(
                        &p.realization,
                        &q.realization,
                        |t| Rotation3::from_axis_angle(&axis, t * deg.to_radians()).into_inner(),
                        samples,
                    )?;
                    let parameters = params(&[
                        ("angle_degrees", json!(deg)),
                        ("axis", json!(axis.as_slice())),
                        ("samples", json!(samples)),
                    ]);
                    flex_path_outcome(&ctx, &path, parameters)
                }
            }
        }
        Command::ZonotopeFlex {
            generators: gens,
            count,
            shear,
            samples,
        } => {
            let gens = match gens {
                Some(s) => s.split(';').map(parse_vector).collect::<std::result::Result<Vec<_>, _>>().map_err(IoError::Usage)?,
                None => generators::random_generators(&mut rng, count),
            };
            let u = generators::random_axis(&mut rng);
            let w = generators::random_axis(&mut rng);
            let v = (w - u * u.dot(&w)).normalize();
            let z = Zonotope::new(&gens)?;
            let shear_at = |t: f64| Matrix3::identity() + u * v.transpose() * (t * shear);
            let path = zonotope_flex(&z, shear_at, samples)?;
            let parameters = params(&[
                ("generators", json!(z.generators().iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>())),
                ("shear", json!(shear)),
                ("shear_u", json!(u.as_slice())),
                ("shear_v", json!(v.as_slice())),
                ("samples", json!(samples)),
            ]);
            flex_path_outcome(&ctx, &path, parameters)
        }
        Command::Stack { source, facet, height } => {
            let l = ctx.load(&source)?;
            let (ct, r) = stack_pyramid(&l.combinatorial_type, &l.realization, facet, height, &ctx.tol)?;
            ctx.emit(&ctx.polytope_name("stacked"), &polytope_text(&ct, &r, ctx.format))?;
            Ok(0)
        }
        Command::Tutte { input } => {
            let (g, doc) = TutteInput::parse(&read_text(&input)?, &input)?;
            let at = |deg: f64| Vector2::new(deg.to_radians().cos(), deg.to_radians().sin());
            let outer = doc
                .pinned_positions
                .map(|p| p.map(|x| Vector2::new(x[0], x[1])))
                .unwrap_or([at(90.0), at(210.0), at(330.0)]);
            let partial = doc.edge_stresses(&g, &input)?;
            let f = tutte_embed(&g, doc.outer_face, outer, &partial)?;
            eprintln!("equilibrium residual {:.3e}", check_self_stress(&f));
            ctx.emit("framework.json", &framework_json(&f))?;
            Ok(0)
        }
        Command::Lift { framework } => {
            let f = parse_framework_json(&read_text(&framework)?, &framework)?;
            let outer = f.outer_face();
            let w = reciprocal_build(&f, (outer, Vector2::zeros()), 1e-8)?;
            eprintln!("reciprocity residual {:.3e}", reciprocity_residual(&f, &w));
            let lift = mc_lift(&f, &w, (f.graph().face(outer)[0], 0.0), 1e-8)?;
            let (ct, r) = lift_to_polytope(&f, &lift, &ctx.tol)?;
            ctx.emit(&ctx.polytope_name("lift"), &polytope_text(&ct, &r, ctx.format))?;
            Ok(0)
        }
        Command::Contract {
            graph,
            edge,
            target,
            n,
            gamma,
        } => contract(&ctx, &mut rng, &graph, edge, target.as_ref(), n, gamma),
        Command::FlexPath {
            source,
            step,
            samples,
            flex,
        } => {
            let l = ctx.load(&source)?;
            let fa = flex_analysis_with(&l.combinatorial_type, &l.realization, &ctx.tol, ctx.exact)?;
            let m = fa.basis.nontrivial.get(flex).ok_or_else(|| {
                IoError::Usage(format!("flex {flex} requested, nontrivial dimension is {}", fa.nontrivial_dim))
            })?;
            let path = flex_path_follow(&l.combinatorial_type, &l.realization, m, step, samples, &ctx.tol)?;
            let parameters = params(&[
                ("source", json!(source.to_string())),
                ("step", json!(step)),
                ("samples", json!(samples)),
                ("flex", json!(flex)),
            ]);
            flex_path_outcome(&ctx, &path, parameters)
        }
        Command::FlexLimit { p, q, t, axis } => {
            let p = ctx.load(&p)?;
            let q = match q {
                Some(src) => ctx.load(&src)?.realization,
                None => generators::random_tetrahedron(&mut rng).1,
            };
            let axis = axis.unwrap_or_else(|| generators::random_axis(&mut rng));
            flex_limit_outcome(&ctx, &p, &q, axis, &t)
        }
    }
}

/// Saves a path when `--out` is given and prints its certificate; exit
/// status 2 if the path does not certify a flex.
fn flex_path_outcome(ctx: &Ctx, path: &polyflex::constructions::FlexPath, parameters: BTreeMap<String, Value>) -> Result<i32> {
    let rep = validate_flex_path(path, &ctx.tol)?;
    let summary = json!({
        "samples": path.len(),
        "max_length_deviation": rep.max_length_deviation,
        "max_realization_residual": rep.max_realization_residual,
        "type_constant": rep.type_constant,
        "endpoints_congruent": rep.endpoints_congruent,
        "lengths_constant": rep.lengths_constant,
        "certifies_flex": rep.certifies_flex(),
    });
    match &ctx.out {
        Some(dir) => {
            save_flex_path(dir, path, parameters, ctx.save_opts())?;
            write_text(&dir.join("path_report.json"), &json_text(&summary))?;
        }
        None => print!("{}", json_text(&summary)),
    }
    Ok(if rep.certifies_flex() { 0 } else { 2 })
}

fn contract(
    ctx: &Ctx,
    rng: &mut impl rand::Rng,
    graph: &Source,
    edge: [usize; 2],
    target: Option<&Source>,
    n: usize,
    gamma: f64,
) -> Result<i32> {
    let dir = ctx.out_dir("contract")?;
    let g: PolyhedralGraph = load_graph(graph)?;
    let (minor, _) = contract_edge(&g, edge).map_err(|e| IoError::Usage(format!("edge {edge:?}: {e}")))?;
    let target = match target {
        Some(src) => ctx.load(src)?.realization,
        None => generators::generic_realization(&minor, rng, &ctx.tol)
            .ok_or_else(|| IoError::Usage("G / e has no triangle for a generic target; pass --target".into()))??,
    };
    let seq = contraction_sequence(&g, edge, &target, n, gamma, &ctx.tol)?;
    let case = match seq.case() {
        ContractionCase::Triangle { face } => json!({ "triangle": face }),
        ContractionCase::ThreeVertex { vertex } => json!({ "three_vertex": vertex }),
    };
    let parameters = params(&[
        ("graph", json!(graph.to_string())),
        ("edge", json!(edge)),
        ("n", json!(n)),
        ("gamma", json!(gamma)),
        ("seed", json!(ctx.seed)),
        ("case", case),
    ]);
    save_contraction(dir, &seq, parameters, &ctx.tol, ctx.save_opts())?;
    write_text(&dir.join(ctx.polytope_name("target")), &polytope_text(&minor.to_combinatorial_type(), &target, ctx.format))?;
    let rep = convergence_report(seq.sequence());
    let last = rep.edge_length.len() - 1;
    eprintln!(
        "{} members; at n = {}: edge length {:.3e}, vertex distance {:.3e}, normal deviation {:.3e}",
        seq.realizations().len(),
        last + 1,
        rep.edge_length[last],
        rep.vertex_distance[last],
        rep.normal_deviation[last]
    );
    Ok(0)
}

fn flex_limit_outcome(
    ctx: &Ctx,
    p: &crate::format::Loaded,
    q: &polyflex::Realization,
    axis: Vector3<f64>,
    ts: &[f64],
) -> Result<i32> {
    let fam = minkowski_family(&p.combinatorial_type, &p.realization, q, axis, ts)?;
    let seq = &fam.sequence;
    let g = seq.graph();
    let members: Vec<Value> = ts
        .iter()
        .zip(seq.members())
        .map(|(&t, r)| {
            let v = flex_analysis_with(&fam.combinatorial_type, r, &ctx.tol, ExactMode::Off)
                .map(|a| json!(verdict_name(a.verdict)))
                .unwrap_or_else(|e| json!(format!("undecided: {e}")));
            json!({ "t": t, "verdict": v })
        })
        .collect();
    let limit_rigid = flex_analysis_with(&p.combinatorial_type, &p.realization, &ctx.tol, ctx.exact)?.verdict;
    let e = (0..g.num_edges())
        .find(|&e| seq.map().edge_image(e).is_none())
        .ok_or_else(|| IoError::Usage("no edge collapses in this family".into()))?;
    let gauge = FlexGauge {
        edge: g.edges()[e],
        facet: g.edge_faces(e).0,
        line: None,
    };
    let (limit, code) = match flex_limit(seq, &fam.flexes, gauge, ctx.tol.residual_tol.max(1e-8)) {
        Ok(l) => (
            json!({
                "verdict": match l.verdict {
                    LimitVerdict::LimitIsFlex => "limit_is_flex",
                    LimitVerdict::LimitDegenerate => "limit_degenerate",
                },
                "residual": l.residual,
                "nontrivial_norm": l.nontrivial_norm,
                "tail_difference": l.tail_difference,
            }),
            0,
        ),
        Err(polyflex::Error::NoConvergence(d)) => (json!({ "verdict": "no_convergence", "tail_difference": d }), 4),
        Err(e) => return Err(e.into()),
    };
    let report = json!({
        "members": members,
        "limit_polytope": verdict_name(limit_rigid),
        "limit_rigid": limit_rigid == Verdict::FirstOrderRigid,
        "axis": axis.as_slice(),
        "limit": limit,
    });
    ctx.emit("flex_limit.json", &json_text(&report))?;
    Ok(code)
}
