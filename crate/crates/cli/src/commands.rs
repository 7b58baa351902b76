use std::path::Path;

use freeiso::constructions::{gen_three_clique, lp_sum, union_basepoint, union_bounded, ConstructionRecipe, PowerMetric};
use freeiso::extgraph::{classify_prague, ext_graph, ExtGraph};
use freeiso::graphkit::{
    edge_components, is_2_connected, is_3_connected, simple_cycles, vertex_connectivity, CycleOptions,
    ConnectivityReport, DirectedSymGraph,
};
use freeiso::io::{cycle_json, edge_json, ext_graph_json, labels_json, read_json, InputDoc, MoleculeDoc, SigmaDoc};
use freeiso::isogroup::{
    apply_sigma, check_conditions, closure_order, decide_rigidity, enumerate_sigma, find_sigmas, graph_liso,
    l1_decomposition_check, CheckedSigma, Mode,
};
use freeiso::metric::compute_isometries;
use freeiso::whitney::{
    is_cycle_preserving, is_vertex_star_complement, reconstruct_vertex_map, star_complement, SignedEdgeBijection,
    StarOptions,
};
use freeiso::{free_norm, parse_rational, EdgeId, Error, FiniteMetricSpace, Rational, Result, Scalar};
use serde_json::{json, Map, Value};

use crate::{Command, Construct, Ctx, Outcome};

/// The graph a structural command works on: the input graph itself, or
/// `E_ext` of a metric input.
fn working_graph<S: Scalar>(doc: &InputDoc) -> Result<DirectedSymGraph> {
    match doc.graph()? {
        Some(g) => Ok(g),
        None => Ok(ext_graph(&doc.metric::<S>()?).graph().clone()),
    }
}

fn cycle_options(ctx: &Ctx, min_len: usize) -> CycleOptions {
    CycleOptions { min_len, max_len: ctx.caps.max_cycle_len, max_count: ctx.caps.max_cycles }
}

fn sigma_json(s: &SignedEdgeBijection, g1: &DirectedSymGraph, g2: &DirectedSymGraph) -> Value {
    serde_json::to_value(SigmaDoc::from_sigma(s, g1, g2)).expect("σ serializes")
}

fn vertex_map_json(g: &DirectedSymGraph, f: &[usize]) -> Value {
    Value::Object((0..f.len()).map(|v| (g.label(v).to_string(), json!(g.label(f[v])))).collect())
}

fn connectivity_json(g: &DirectedSymGraph, r: &ConnectivityReport) -> Value {
    json!({ "connected": r.connected, "min_cut": r.min_cut.as_ref().map(|c| labels_json(g, c)) })
}

pub fn run<S: Scalar>(cmd: &Command, ctx: &Ctx) -> Result<Outcome> {
    let done = |v: Value| Ok(Outcome::Done(v));
    match cmd {
        Command::Validate { input } => {
            let doc: InputDoc = read_json(input)?;
            let m = doc.metric::<S>()?;
            let mut out = json!({ "valid": true, "points": m.len(), "diameter": m.diameter().render() });
            if let Some(g) = doc.graph()? {
                out["kind"] = json!("graph");
                out["edges"] = json!(g.num_edges());
            } else {
                out["kind"] = json!("metric");
            }
            done(out)
        }
        Command::Extgraph { input } => {
            let m = read_json::<InputDoc>(input)?.metric::<S>()?;
            done(ext_graph_json(&ext_graph(&m)))
        }
        Command::Prague { input } => {
            let m = read_json::<InputDoc>(input)?.metric::<S>()?;
            done(serde_json::to_value(classify_prague(&m)).expect("verdict serializes"))
        }
        Command::Norm { input, molecule } => {
            let m = read_json::<InputDoc>(input)?.metric::<S>()?;
            let x = read_json::<MoleculeDoc>(molecule)?.molecule(&m)?;
            let r = free_norm(&m, &x)?;
            let witness: Map<String, Value> =
                r.witness.values.iter().enumerate().map(|(i, v)| (m.label(i).to_string(), json!(v.render()))).collect();
            let plan: Vec<Value> = r
                .plan
                .iter()
                .map(|(a, b, t)| json!({ "from": m.label(*a), "to": m.label(*b), "mass": t.render() }))
                .collect();
            done(json!({ "norm": r.value.render(), "witness": witness, "plan": plan }))
        }
        Command::Cycles { input, min_len } => {
            let g = working_graph::<S>(&read_json(input)?)?;
            let list = simple_cycles(&g, cycle_options(ctx, *min_len))?;
            let cycles: Vec<Value> = list.cycles.iter().map(|c| cycle_json(&g, c)).collect();
            let out = json!({ "count": cycles.len(), "cycles": cycles });
            Ok(if list.complete { Outcome::Done(out) } else { Outcome::Partial(out) })
        }
        Command::Connectivity { input } => {
            let g = working_graph::<S>(&read_json(input)?)?;
            done(json!({
                "vertex_connectivity": vertex_connectivity(&g),
                "two_connected": connectivity_json(&g, &is_2_connected(&g)),
                "three_connected": connectivity_json(&g, &is_3_connected(&g)),
            }))
        }
        Command::Components { input } => {
            let g = working_graph::<S>(&read_json(input)?)?;
            let comps: Vec<Value> = edge_components(&g)
                .iter()
                .map(|c| Value::Array(c.iter().map(|&k| edge_json(&g, EdgeId::new(k, false))).collect()))
                .collect();
            done(json!({ "count": comps.len(), "components": comps }))
        }
        Command::Whitney { input, sigma } => whitney::<S>(&read_json(input)?, sigma.as_deref(), ctx),
        Command::Sigma { input, target, sigma, molecule, mode, limit } => {
            let src: InputDoc = read_json(input)?;
            let dst: InputDoc = match target {
                Some(t) => read_json(t)?,
                None => src.clone(),
            };
            sigma_cmd::<S>(&src, &dst, sigma.as_deref(), molecule.as_deref(), (*mode).into(), *limit, ctx)
        }
        Command::Rigidity { input } => {
            let m = read_json::<InputDoc>(input)?.metric::<S>()?;
            let ext = ext_graph(&m);
            let g = ext.graph();
            let v = decide_rigidity(&m, &ctx.caps)?;
            let witness = v.witnesses.first().map(|(s, f)| {
                json!({ "sigma": sigma_json(s, g, g), "epsilon": f.epsilon, "vertex_map": vertex_map_json(g, &f.vertex_map) })
            });
            done(json!({
                "rigid": v.rigid,
                "path": v.path,
                "sigma_count": v.sigma_count,
                "isometries": v.isometries,
                "witness": witness,
                "counterexample": v.counterexample.as_ref().map(|s| sigma_json(s, g, g)),
            }))
        }
        Command::Isogroup { input } => isogroup::<S>(&read_json(input)?, ctx),
        Command::L1check { input, samples } => {
            let doc: InputDoc = read_json(input)?;
            let g = doc.graph()?.ok_or(Error::WeightedGraph)?;
            let r = l1_decomposition_check(&g, *samples, ctx.seed)?;
            done(json!({ "holds": r.holds(), "blocks": r.blocks, "samples": r.samples, "mismatches": r.mismatches }))
        }
        Command::Construct(c) => construct(c).map(Outcome::Done),
    }
}

fn whitney<S: Scalar>(doc: &InputDoc, sigma: Option<&Path>, ctx: &Ctx) -> Result<Outcome> {
    let g = working_graph::<S>(doc)?;
    let Some(path) = sigma else {
        let opts = StarOptions { exhaustive: ctx.exhaustive_bases, seed: ctx.seed, ..StarOptions::default() };
        let mut stars = Map::new();
        for v in 0..g.num_vertices() {
            let verdict = is_vertex_star_complement(&g, &star_complement(&g, v), opts)?;
            stars.insert(g.label(v).to_string(), serde_json::to_value(verdict).expect("verdict serializes"));
        }
        return Ok(Outcome::Done(json!({ "star_complements": stars })));
    };
    let s = read_json::<SigmaDoc>(path)?.sigma(&g, &g)?;
    let cycles = simple_cycles(&g, cycle_options(ctx, 3))?;
    if !cycles.complete {
        return Err(Error::IncompleteCycleList);
    }
    if !is_cycle_preserving(&s, &cycles)? {
        return Ok(Outcome::Done(json!({ "cycle_preserving": false, "vertex_map": null })));
    }
    let f = reconstruct_vertex_map(&g, &s, Some(&cycles))?;
    Ok(Outcome::Done(json!({ "cycle_preserving": true, "vertex_map": vertex_map_json(&g, &f) })))
}

fn sigma_cmd<S: Scalar>(
    src: &InputDoc,
    dst: &InputDoc,
    sigma: Option<&Path>,
    molecule: Option<&Path>,
    mode: Mode,
    limit: Option<usize>,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (m1, m2) = (src.metric::<S>()?, dst.metric::<S>()?);
    let (e1, e2) = (ext_graph(&m1), ext_graph(&m2));
    let (g1, g2) = (e1.graph(), e2.graph());
    let Some(path) = sigma else {
        let set = find_sigmas(&e1, &e2, &m1, &m2, mode, &ctx.caps, limit)?;
        let mut sigmas: Vec<Value> = set.sigmas.iter().map(|s| sigma_json(s, g1, g2)).collect();
        sort_values(&mut sigmas);
        return Ok(Outcome::Done(json!({
            "count": set.len(),
            "mode": set.mode,
            "nodes": set.nodes,
            "sigmas": sigmas,
        })));
    };
    let s = read_json::<SigmaDoc>(path)?.sigma(g1, g2)?;
    let report = check_conditions(&s, &e1, &e2, &m1, &m2, &ctx.caps)?;
    let mut out = json!({
        "conditions": report,
        "passes": report.passes(mode),
        "mode": mode,
    });
    if let Some(mpath) = molecule {
        let x = read_json::<MoleculeDoc>(mpath)?.molecule(&m1)?;
        let checked = CheckedSigma::verify(s, &e1, &e2, &m1, &m2, mode, &ctx.caps)?;
        let y = apply_sigma(&checked, &x, &e1, &e2)?;
        out["image"] = serde_json::to_value(MoleculeDoc::from_molecule(&m2, &y)).expect("molecule serializes");
        out["norm"] = json!(free_norm(&m1, &x)?.value.render());
        out["image_norm"] = json!(free_norm(&m2, &y)?.value.render());
    }
    Ok(Outcome::Done(out))
}

fn isogroup<S: Scalar>(doc: &InputDoc, ctx: &Ctx) -> Result<Outcome> {
    let m = doc.metric::<S>()?;
    let ext = ext_graph(&m);
    let g = ext.graph();
    let mut out = match doc.graph()? {
        Some(input) => {
            let desc = graph_liso(&input, &ctx.caps)?;
            let mut gens: Vec<Value> = desc.generators.iter().map(|s| sigma_json(s, &input, &input)).collect();
            sort_values(&mut gens);
            json!({
                "order": desc.order.to_string(),
                "structure": desc.structure.to_string(),
                "generators": gens,
                "blocks": desc.blocks,
            })
        }
        None => {
            let set = enumerate_sigma(&m, Mode::SaSbSc, &ctx.caps)?;
            let gens = greedy_generators(&set.sigmas, g.num_edges(), ctx.caps.closure_limit);
            let mut gens: Vec<Value> = gens.iter().map(|s| sigma_json(s, g, g)).collect();
            sort_values(&mut gens);
            json!({ "order": set.len().to_string(), "structure": null, "generators": gens })
        }
    };
    out["isometries"] = json!(compute_isometries(&m).len());
    match rigidity(&m, &ext, ctx) {
        Ok((rigid, witness)) => {
            out["rigid"] = json!(rigid);
            out["witness"] = witness;
            Ok(Outcome::Done(out))
        }
        Err(e) if e.is_cap() => {
            out["rigid"] = Value::Null;
            out["witness"] = Value::Null;
            out["error"] = json!({ "message": e.to_string() });
            Ok(Outcome::Partial(out))
        }
        Err(e) => Err(e),
    }
}

/// The verdict and, when not rigid, a σ that is not `±` an isometry.
fn rigidity<S: Scalar>(m: &FiniteMetricSpace<S>, ext: &ExtGraph<S>, ctx: &Ctx) -> Result<(bool, Value)> {
    let v = decide_rigidity(m, &ctx.caps)?;
    let g = ext.graph();
    Ok((v.rigid, v.counterexample.as_ref().map_or(Value::Null, |s| sigma_json(s, g, g))))
}

/// Adds group elements one at a time, keeping those that enlarge the
/// generated subgroup.
fn greedy_generators(all: &[SignedEdgeBijection], edges: usize, limit: usize) -> Vec<SignedEdgeBijection> {
    let mut gens: Vec<SignedEdgeBijection> = Vec::new();
    let mut order = 1;
    for s in all {
        if order >= all.len() {
            break;
        }
        gens.push(s.clone());
        match closure_order(&gens, edges, limit) {
            Some(o) if o > order => order = o,
            _ => {
                gens.pop();
            }
        }
    }
    gens
}

fn sort_values(v: &mut [Value]) {
    v.sort_by_cached_key(|x| x.to_string());
}

fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

fn power_metric_json(pm: &PowerMetric) -> Value {
    let doc = match pm.exact() {
        Some(m) => InputDoc::from_metric(&m),
        None => InputDoc::from_metric(pm.approx()),
    };
    let mut out = serde_json::to_value(doc).expect("document serializes");
    out["exact"] = json!(pm.exact().is_some());
    out["warnings"] = json!(pm.warnings);
    out
}

fn with_recipe(mut out: Value, recipe: &ConstructionRecipe) -> Value {
    out["recipe"] = serde_json::to_value(recipe).expect("recipe serializes");
    out
}

fn construct(c: &Construct) -> Result<Value> {
    let space = |p: &Path| read_json::<InputDoc>(p)?.metric::<Rational>();
    match c {
        Construct::LpSum { m, n, p } => {
            let p = rational(p)?;
            let pm = lp_sum(&space(m)?, &space(n)?, &p)?;
            let recipe = ConstructionRecipe::LpSum { p: freeiso::constructions::render_p(&p) };
            Ok(with_recipe(power_metric_json(&pm), &recipe))
        }
        Construct::UnionBounded { m, n } => {
            let (m, n) = (space(m)?, space(n)?);
            let u = union_bounded(&m, &n)?;
            let cross = u.dist(0, m.len()).render();
            let mut out = serde_json::to_value(InputDoc::from_metric(&u)).expect("document serializes");
            out["exact"] = json!(true);
            out["warnings"] = json!([]);
            Ok(with_recipe(out, &ConstructionRecipe::UnionBounded { cross }))
        }
        Construct::UnionBasepoint { m, n, base_m, base_n, p } => {
            let p = rational(p)?;
            let pm = union_basepoint(&space(m)?, &space(n)?, base_m, base_n, &p)?;
            let recipe = ConstructionRecipe::UnionBasepoint {
                p: freeiso::constructions::render_p(&p),
                base_m: base_m.clone(),
                base_n: base_n.clone(),
            };
            Ok(with_recipe(power_metric_json(&pm), &recipe))
        }
        Construct::ThreeClique { cliques, connectors } => {
            let i: [usize; 3] = cliques
                .as_slice()
                .try_into()
                .map_err(|_| Error::Input("--cliques needs three sizes".into()))?;
            let e = parse_matrix(connectors)?;
            let built = gen_three_clique(i, e)?;
            let mut out = serde_json::to_value(InputDoc::from_graph(&built.graph)).expect("document serializes");
            out["warnings"] = json!([]);
            Ok(with_recipe(out, &built.recipe))
        }
    }
}

fn parse_matrix(s: &str) -> Result<[[usize; 3]; 3]> {
    let bad = || Error::Input(format!("connector matrix {s:?}: expected three rows of three integers"));
    let mut out = [[0; 3]; 3];
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 3 {
        return Err(bad());
    }
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(bad());
        }
        for (j, c) in cells.iter().enumerate() {
            out[i][j] = c.parse().map_err(|_| bad())?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connector_matrix_parsing() {
        assert_eq!(parse_matrix("0,3,4;5,0,6;7,8,0").unwrap(), [[0, 3, 4], [5, 0, 6], [7, 8, 0]]);
        assert!(parse_matrix("0,3;3,0").is_err());
        assert!(parse_matrix("0,3,x;3,0,5;4,5,0").is_err());
    }
}
