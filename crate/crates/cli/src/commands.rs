//! One function per subcommand, each turning parsed arguments into JSON or SVG text.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use toric_mirror::braid::{
    represent_with, verify_relations_with, BTLabeling, BTMove, BraidWord, Letter, RelationKind, TwistConvention,
};
use toric_mirror::cech::cohomology_box;
use toric_mirror::equivariant::{
    euler_pairing_skyscrapers, local_ext_dims, verify_linking_disk_identification, verify_mutation_exactness, WeightedRing,
};
use toric_mirror::fan::{divisor_to_support_function, picard_group, RawFan, StackyFan};
use toric_mirror::graph::{
    braid_loop_frames, build_fltz_graph, build_phi_n, chamber_coloring, faces, flux_primitive, legendrian_lift, liftability,
    CylinderGraph, FltzMode, GraphJson, LoopGenerator,
};
use toric_mirror::rational::{format_rational, parse_rational, q, qi, Q};
use toric_mirror::transport::{canonical_graph, power_diagram, solve_weights, Site, TransportProblem, DEFAULT_TOLERANCE};

use crate::error::CliError;
use crate::svg::{render_diagram, render_front, render_graph};
use crate::{
    BraidArgs, BraidVerifyArgs, BtArgs, CohomologyArgs, Command, ExtArgs, FanSource, FltzArgs, FluxArgs, LiftArgs, ModeArg,
    MutationArgs, RationalList, RenderArgs, Report, VoronoiArgs,
};

pub fn dispatch(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Pic(a) => pic(a).map(json_report),
        Command::Cohomology(a) => cohomology(a).map(json_report),
        Command::Ext(a) => ext(a).map(json_report),
        Command::MutationCheck(a) => mutation_check(a).map(json_report),
        Command::Fltz(a) => fltz(a).map(json_report),
        Command::Lift(a) => lift(a).map(json_report),
        Command::Flux(a) => flux(a).map(json_report),
        Command::Voronoi(a) => voronoi(a).map(json_report),
        Command::Braid(a) => braid(a).map(json_report),
        Command::BraidVerify(a) => braid_verify(a),
        Command::Bt(a) => bt(a).map(json_report),
        Command::Render(a) => render(a).map(|text| Report { text, failure: None }),
    }
}

fn json_report(v: Value) -> Report {
    Report { text: pretty(&v), failure: None }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io("read_failed", path, &e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io("write_failed", path, &e))
}

/// Integers (possibly big) as JSON numbers when they fit, as strings otherwise.
fn int_json<T: ToString>(x: &T) -> Value {
    let s = x.to_string();
    s.parse::<i64>().map(Value::from).unwrap_or(Value::String(s))
}

fn rationals_json(xs: &[Q]) -> Value {
    Value::from(xs.iter().map(format_rational).collect::<Vec<_>>())
}

fn parse_q(s: &str) -> Q {
    parse_rational(s).expect("validated by the argument parser")
}

fn load_fan(src: &FanSource) -> Result<StackyFan, CliError> {
    if let Some(n) = src.an {
        return Ok(StackyFan::a_n_minus_1(n));
    }
    let path = src.fan.as_ref().expect("argument group requires --fan or --an");
    let raw: RawFan = serde_json::from_str(&read(path)?).map_err(|e| CliError::input("invalid_fan", format!("{}: {e}", path.display())))?;
    Ok(StackyFan::from_raw(&raw)?)
}

fn load_graph(path: &Path) -> Result<CylinderGraph, CliError> {
    Ok(CylinderGraph::from_json(&read(path)?)?)
}

fn graph_json(g: &CylinderGraph) -> Value {
    serde_json::to_value(g.to_json_value()).expect("graph JSON always serializes")
}

fn cylinder_bounds(bounds: &Option<RationalList>, default: (Q, Q)) -> Result<(Q, Q), CliError> {
    match bounds {
        None => Ok(default),
        Some(RationalList(b)) if b.len() == 2 => Ok((parse_q(&b[0]), parse_q(&b[1]))),
        Some(RationalList(b)) => Err(CliError::usage("invalid_bounds", format!("expected two bounds R-,R+, got {}", b.len()))),
    }
}

fn pic(a: &FanSource) -> Result<Value, CliError> {
    let g = picard_group(&load_fan(a)?);
    Ok(json!({ "torsion": g.torsion.iter().map(int_json).collect::<Vec<_>>(), "free_rank": g.free_rank }))
}

fn cohomology(a: &CohomologyArgs) -> Result<Value, CliError> {
    let fan = load_fan(&a.source)?;
    let coefficients: Vec<Q> = a.divisor.0.iter().map(|s| parse_q(s)).collect();
    let f = divisor_to_support_function(&fan, &coefficients)?;
    let table = cohomology_box(&fan, &f, &a.bounds.0)?;
    let degrees = fan.rank() + 1;
    let mut by_m: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    let mut totals = vec![0usize; degrees];
    for ((m, d), &dim) in &table.entries {
        if dim > 0 {
            by_m.entry(m.clone()).or_insert_with(|| vec![0; degrees])[*d] = dim;
            totals[*d] += dim;
        }
    }
    let entries: Vec<Value> = by_m.into_iter().map(|(m, h)| json!({ "m": m, "h": h })).collect();
    Ok(json!({
        "divisor": rationals_json(&coefficients),
        "box": a.bounds.0.iter().map(|&(lo, hi)| vec![lo, hi]).collect::<Vec<_>>(),
        "totals": totals,
        "entries": entries,
    }))
}

fn ext(a: &ExtArgs) -> Result<Value, CliError> {
    let ring = WeightedRing::new(a.n)?;
    let (e0, e1, e2) = local_ext_dims(&ring, a.i, a.j);
    Ok(json!({ "n": a.n, "i": a.i, "j": a.j, "dims": [e0, e1, e2], "euler": euler_pairing_skyscrapers(&ring, a.i, a.j) }))
}

fn mutation_check(a: &MutationArgs) -> Result<Value, CliError> {
    let ring = WeightedRing::new(a.n)?;
    let r = verify_mutation_exactness(&ring, a.i, a.trunc)?;
    let mut out = json!({
        "passed": true,
        "n": r.n,
        "i": r.i,
        "truncation": r.truncation,
        "identities": r.identities,
        "total_chain_dim": r.total_chain_dim,
        "homology_vanishes": r.homology_vanishes,
    });
    if a.linking {
        let l = verify_linking_disk_identification(&ring, a.i, a.trunc)?;
        out["linking_disk"] = json!({ "passed": true, "slices_compared": l.slices_compared });
    }
    Ok(out)
}

fn fltz(a: &FltzArgs) -> Result<Value, CliError> {
    let mode = match a.mode {
        ModeArg::Full => FltzMode::Full,
        ModeArg::Partial => FltzMode::Partial,
    };
    let g = build_fltz_graph(&a.chamber, a.n, mode)?;
    let fd = faces(&g)?;
    let lift = liftability(&g)?;
    if let Some(path) = &a.svg {
        write(path, &render_graph(&g))?;
    }
    let mut chamber = a.chamber.clone();
    chamber.sort_unstable();
    Ok(json!({
        "n": a.n,
        "chamber": chamber,
        "mode": match a.mode { ModeArg::Full => "full", ModeArg::Partial => "partial" },
        "coloring": chamber_coloring(&chamber),
        "bounded_areas": rationals_json(&fd.bounded_areas()),
        "liftable": lift.liftable,
        "graph": graph_json(&g),
    }))
}

fn lift(a: &LiftArgs) -> Result<Value, CliError> {
    let g = load_graph(&a.graph)?;
    let l = legendrian_lift(&g)?;
    Ok(json!({
        "liftable": true,
        "vertex_q1": rationals_json(&l.vertex_q1),
        "edge_q1": l.edge_q1.iter().map(|e| rationals_json(e)).collect::<Vec<_>>(),
    }))
}

fn loop_generator(text: &str) -> Result<LoopGenerator, CliError> {
    let letter: Letter = text.parse().map_err(|e| CliError::usage("invalid_loop", format!("{text:?}: {e}")))?;
    if letter.inverse {
        return Err(CliError::usage("invalid_loop", "built-in loops are positive generators; reverse the frames for inverses"));
    }
    Ok(match letter.generator {
        toric_mirror::braid::Generator::Tau(i) => LoopGenerator::Tau(i),
        toric_mirror::braid::Generator::Rho => LoopGenerator::Rho,
    })
}

fn flux(a: &FluxArgs) -> Result<Value, CliError> {
    let frames: Vec<CylinderGraph> = match (&a.frames_file, &a.generator) {
        (Some(path), _) => {
            let raw: Vec<GraphJson> =
                serde_json::from_str(&read(path)?).map_err(|e| CliError::input("invalid_frames", format!("{}: {e}", path.display())))?;
            raw.iter().map(CylinderGraph::from_json_value).collect::<Result<_, _>>()?
        }
        (None, Some(g)) => {
            let n = a.n.ok_or_else(|| CliError::usage("missing_strand_count", "--loop needs --n"))?;
            let (r_minus, r_plus) = cylinder_bounds(&a.bounds, (qi(-1), qi(n + 1)))?;
            braid_loop_frames(loop_generator(g)?, n, a.frames as usize, r_minus, r_plus)?
        }
        (None, None) => unreachable!("argument group requires a frame source"),
    };
    let count = frames.len();
    let t = a.t.unwrap_or(count / 2);
    let dt = match &a.dt {
        Some(s) => parse_q(s),
        None => q(1, (count.max(2) - 1) as i64),
    };
    if t >= count {
        return Err(CliError::usage("invalid_frame_index", format!("frame {t} of {count}")));
    }
    // The primitive at frame t only involves its neighbours; the rest of the isotopy may change
    // combinatorics.
    let lo = t.saturating_sub(1);
    let f = flux_primitive(&frames[lo..(t + 2).min(count)], t - lo, &dt)?;
    Ok(json!({
        "frames": count,
        "t": t,
        "dt": format_rational(&dt),
        "vertex": rationals_json(&f.vertex),
        "edge": f.edge.iter().map(|e| rationals_json(e)).collect::<Vec<_>>(),
        "max_path_discrepancy": format_rational(&f.max_path_discrepancy),
    }))
}

/// Sites, bounds and optional targets from a sites file.
struct SitesFile {
    bounds: Option<(f64, f64)>,
    sites: Vec<Site>,
    targets: Option<Vec<f64>>,
}

fn parse_sites(path: &Path) -> Result<SitesFile, CliError> {
    let bad = |m: String| CliError::input("invalid_sites", format!("{}: {m}", path.display()));
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
    let point = |p: &Value| -> Option<Site> {
        let a = p.as_array()?;
        (a.len() == 2).then(|| Site::new(a[0].as_f64()?, a[1].as_f64()?).into()).flatten()
    };
    let list = |v: &Value| -> Result<Vec<Site>, CliError> {
        v.as_array().ok_or_else(|| bad("sites must be a list".into()))?.iter().map(|p| point(p).ok_or_else(|| bad(format!("bad site {p}")))).collect()
    };
    let floats = |v: &Value, what: &str| -> Result<Vec<f64>, CliError> {
        v.as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| bad(format!("{what} must be a list of numbers")))
    };
    match &v {
        Value::Array(_) => Ok(SitesFile { bounds: None, sites: list(&v)?, targets: None }),
        Value::Object(o) => {
            let sites = list(o.get("sites").ok_or_else(|| bad("missing \"sites\"".into()))?)?;
            let bounds = match o.get("R") {
                None => None,
                Some(r) => match floats(r, "R")?.as_slice() {
                    [lo, hi] => Some((*lo, *hi)),
                    _ => return Err(bad("R must be [R-, R+]".into())),
                },
            };
            let targets = o.get("targets").map(|t| floats(t, "targets")).transpose()?;
            Ok(SitesFile { bounds, sites, targets })
        }
        _ => Err(bad("expected an object or a list of sites".into())),
    }
}

fn transport_problem(path: &Path, bounds: &Option<Vec<f64>>, targets: &Option<Vec<f64>>, tol: Option<f64>) -> Result<TransportProblem, CliError> {
    let file = parse_sites(path)?;
    let (r_minus, r_plus) = match (bounds, file.bounds) {
        (Some(b), _) if b.len() == 2 => (b[0], b[1]),
        (Some(b), _) => return Err(CliError::usage("invalid_bounds", format!("expected two bounds R-,R+, got {}", b.len()))),
        (None, Some(b)) => b,
        (None, None) => return Err(CliError::usage("missing_bounds", "the sites file has no \"R\"; pass --bounds")),
    };
    let problem = match targets.clone().or(file.targets) {
        None => TransportProblem::new(r_minus, r_plus, file.sites)?,
        Some(t) => {
            let boundary = 0.5 * (r_plus - r_minus - t.iter().sum::<f64>());
            TransportProblem::with_targets(r_minus, r_plus, file.sites, t, boundary, boundary)?
        }
    };
    Ok(problem.with_tolerance(tol.unwrap_or(DEFAULT_TOLERANCE)))
}

fn voronoi(a: &VoronoiArgs) -> Result<Value, CliError> {
    let problem = transport_problem(&a.sites, &a.bounds, &a.targets, a.tol)?;
    let c = canonical_graph(&problem)?;
    let fd = faces(&c.graph)?;
    let site_areas: Vec<Value> = c
        .labels
        .iter()
        .map(|p| fd.locate(&c.graph, p).map_or(Value::Null, |f| Value::from(format_rational(&fd.faces[f].area))))
        .collect();
    if let Some(path) = &a.svg {
        write(path, &render_graph(&c.graph))?;
    }
    if let Some(path) = &a.diagram_svg {
        write(path, &render_diagram(&power_diagram(problem.r_minus, problem.r_plus, &problem.sites, &c.weights)?))?;
    }
    Ok(json!({
        "R": [problem.r_minus, problem.r_plus],
        "sites": problem.sites.iter().map(|s| vec![s.r, s.q]).collect::<Vec<_>>(),
        "targets": problem.all_targets(),
        "tolerance": problem.tolerance,
        "weights": c.weights,
        "diagnostics": c.diagnostics,
        "site_areas": site_areas,
        "liftable": liftability(&c.graph)?.liftable,
        "graph": graph_json(&c.graph),
    }))
}

fn convention(dual: bool) -> TwistConvention {
    if dual {
        TwistConvention::Dual
    } else {
        TwistConvention::Relabelled
    }
}

fn braid(a: &BraidArgs) -> Result<Value, CliError> {
    let w = BraidWord::parse(a.n, &a.word)?;
    let m = represent_with(&w, convention(a.dual))?;
    Ok(json!({
        "n": a.n,
        "word": w.to_string(),
        "convention": convention(a.dual),
        "matrix": m.rows,
        "determinant": int_json(&m.determinant()),
        "permutation": w.permutation(),
    }))
}

fn braid_verify(a: &BraidVerifyArgs) -> Result<Report, CliError> {
    let report = verify_relations_with(a.n, convention(a.dual))?;
    let mut v = serde_json::to_value(&report).expect("relation reports always serialize");
    v["all_passed"] = Value::from(report.all_passed());
    let failure = (!report.all_passed()).then(|| {
        let failed: Vec<&str> = report.failures().map(|c| c.relation.as_str()).collect();
        let kinds: Vec<RelationKind> = report.failures().map(|c| c.kind).collect();
        CliError::domain("braid/relation_failed".into(), format!("{} relation(s) fail: {}", failed.len(), failed.join("; ")))
            .with_details(json!({ "kinds": kinds }))
    });
    Ok(Report { text: pretty(&v), failure })
}

fn bt(a: &BtArgs) -> Result<Value, CliError> {
    let start = match &a.labeling {
        None => BTLabeling::base(a.n)?,
        Some(path) => {
            let l: BTLabeling =
                serde_json::from_str(&read(path)?).map_err(|e| CliError::input("invalid_labeling", format!("{}: {e}", path.display())))?;
            if l.n != a.n {
                return Err(CliError::usage("invalid_labeling", format!("labeling is for n = {}, not {}", l.n, a.n)));
            }
            l
        }
    };
    let letters = a.moves.split_whitespace().map(str::parse).collect::<Result<Vec<Letter>, _>>()?;
    let end = letters.iter().try_fold(start, |l, &m| l.apply(BTMove::from(m)))?;
    let (faces, segments) = end.describe();
    Ok(json!({
        "n": a.n,
        "moves": letters.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "labels": end.to_string(),
        "faces": faces,
        "segments": segments,
        "labeling": end,
    }))
}

fn render(a: &RenderArgs) -> Result<String, CliError> {
    if let Some(path) = &a.graph {
        return Ok(render_graph(&load_graph(path)?));
    }
    if let Some(n) = a.phi {
        let (r_minus, r_plus) = cylinder_bounds(&a.bounds, (qi(-1), qi(n + 1)))?;
        return Ok(render_graph(&build_phi_n(n, r_minus, r_plus)?));
    }
    if let Some(n) = a.front {
        return Ok(render_front(&StackyFan::a_n_minus_1(n)));
    }
    if let Some(path) = &a.fan {
        let fan = load_fan(&FanSource { fan: Some(path.clone()), an: None })?;
        if fan.rank() != 2 {
            return Err(CliError::input("unsupported_rank", format!("front projections need a rank-2 fan, got rank {}", fan.rank())));
        }
        return Ok(render_front(&fan));
    }
    let path = a.sites.as_ref().expect("argument group requires an object to render");
    let bounds = a.bounds.as_ref().map(|b| b.0.iter().map(|s| toric_mirror::rational::to_f64(&parse_q(s))).collect());
    let problem = transport_problem(path, &bounds, &None, None)?;
    let solution = solve_weights(&problem)?;
    Ok(render_diagram(&solution.diagram))
}
