use anyhow::bail;
use percolab_core::events::Crossing;
use percolab_core::lattice::{AnnulusSpec, BoxSpec};
use percolab_core::montecarlo::{estimate_chi, estimate_event, estimate_theta};
use percolab_core::rsw::annulus_bound_scan;
use percolab_core::{LatticeGraph, Model};
use serde_json::json;

use super::{estimate_cells, probability};
use crate::cli::{Command, Job, McCmd, SampleArgs, Session};
use crate::graph::GraphDump;
use crate::output::num;
use crate::params::Params;

fn sample(a: &SampleArgs, p: &mut Params, reps: u64) -> anyhow::Result<(Model, f64, u64)> {
    let model = p.get("model", a.model, Model::BondZ2)?;
    let at = probability(p.get("p", a.p, 0.5)?)?;
    let reps = p.get("reps", a.reps, reps)?;
    Ok((model, at, reps))
}

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Mc(cmd) = cmd else { unreachable!() };
    Ok(match cmd {
        McCmd::Theta { sample: a, radius } => {
            let (model, at, reps) = sample(a, p, 1000)?;
            let radius = p.get("radius", *radius, 16)?;
            Box::new(move |s: &mut Session| {
                let e = estimate_theta(model, at, radius, &s.spec(reps), &s.exec)?;
                s.run.record("theta", model.name(), json!({ "p": at, "radius": radius }), e.value, e.stderr, reps);
                println!("theta({model}, p={at}, L={radius}) = {} ± {}", num(e.value), num(e.stderr));
                Ok(())
            })
        }
        McCmd::Chi { sample: a, radius } => {
            let (model, at, reps) = sample(a, p, 1000)?;
            let radius = p.get("radius", *radius, 16)?;
            Box::new(move |s: &mut Session| {
                let e = estimate_chi(model, at, radius, &s.spec(reps), &s.exec)?;
                s.run.record("chi", model.name(), json!({ "p": at, "radius": radius }), e.value, e.stderr, reps);
                println!("chi({model}, p={at}, L={radius}) = {} ± {}", num(e.value), num(e.stderr));
                Ok(())
            })
        }
        McCmd::Crossing { sample: a, m, n } => {
            let (model, at, reps) = sample(a, p, 10_000)?;
            let n = p.get("n", *n, 4)?;
            let m = p.get("m", *m, n)?;
            Box::new(move |s: &mut Session| {
                let g = LatticeGraph::build_box(model, BoxSpec::new(m, n))?;
                let ev = Crossing::left_right(&g)?;
                let e = estimate_event(&ev, g.carrier_keys(), at, &s.spec(reps), &s.exec)?;
                s.run.record("lr_crossing", model.name(), json!({ "p": at, "m": m, "n": n }), e.value, e.stderr, reps);
                println!("LR({m},{n}) on {model} at p={at}: {} ± {}", num(e.value), num(e.stderr));
                Ok(())
            })
        }
        McCmd::Annulus { ns, p: at, reps } => {
            let ns = p.get_list("ns", ns.clone(), vec![1, 2, 4, 8])?;
            let at = probability(p.get("p", *at, 0.5)?)?;
            let reps = p.get("reps", *reps, 10_000)?;
            Box::new(move |s: &mut Session| annulus(&ns, at, reps, s))
        }
        McCmd::DumpGraph { model, shape, m, n } => {
            let model = p.get("model", *model, Model::BondZ2)?;
            let shape = p.get("shape", shape.clone(), "box".to_string())?;
            let n = p.get("n", *n, 1)?;
            let m = if shape == "box" { p.get("m", *m, n)? } else { n };
            let g = match shape.as_str() {
                "box" => LatticeGraph::build_box(model, BoxSpec::new(m, n))?,
                "centered" => LatticeGraph::centered(model, n)?,
                "cube" => LatticeGraph::cube(model, n)?,
                "annulus" => LatticeGraph::build_annulus(AnnulusSpec { n }, model)?,
                other => bail!("unknown shape `{other}` (expected box, centered, cube or annulus)"),
            };
            Box::new(move |s: &mut Session| {
                s.run.write_json("graph.json", &GraphDump::of(&g))?;
                println!("{model} {shape}: {} vertices, {} edges", g.vertex_count(), g.edge_count());
                Ok(())
            })
        }
    })
}

fn annulus(ns: &[u32], at: f64, reps: u64, s: &mut Session) -> anyhow::Result<()> {
    let scan = annulus_bound_scan(at, ns, &s.spec(reps), &s.exec)?;
    let mut rows = Vec::new();
    for r in &scan.rows {
        s.run.record("annulus", Model::BondZ2.name(), json!({ "p": at, "n": r.n }), r.estimate.value, r.estimate.stderr, reps);
        let [v, se] = estimate_cells(&r.estimate);
        rows.push(vec![r.n.to_string(), num(at), v, se, reps.to_string()]);
    }
    s.run.write_csv("annulus.csv", &["n", "p", "estimate", "stderr", "replicas"], &rows)?;
    match scan.pass {
        Some(pass) => s.run.check(
            format!("annulus-lower-bound p={at}"),
            pass,
            scan.min_lower,
            format!("min={} decays={}", num(scan.min_estimate), scan.decays),
        ),
        None => println!("p={at} is below 1/2: reported only (min {}, decays {})", num(scan.min_estimate), scan.decays),
    }
    s.run.write_json(crate::output::REPORT, &scan)
}
