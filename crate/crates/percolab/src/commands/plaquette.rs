use anyhow::{anyhow, bail};
use percolab_core::plaquette::{boundary_algebra, box_regions, coexistence_check, scaling_probe, spans_agreement, LoopGamma};
use percolab_core::rng::StreamKey;
use percolab_core::Model;
use serde_json::json;

use super::{estimate_cells, probability};
use crate::cli::{Command, Job, PlaquetteCmd, Session};
use crate::output::num;
use crate::params::Params;

/// Both-span frequency required on the cube.
pub const COEXISTENCE_LEVEL: f64 = 0.9;

fn parse_gamma(s: &str) -> anyhow::Result<LoopGamma> {
    let (m, n) = s.split_once('x').ok_or_else(|| anyhow!("loop `{s}` is not of the form MxN"))?;
    Ok(LoopGamma::new(m.trim().parse()?, n.trim().parse()?)?)
}

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Plaquette(cmd) = cmd else { unreachable!() };
    Ok(match cmd {
        PlaquetteCmd::Probe { gammas, p: ps, margin, reps } => {
            let default: Vec<String> = ["1x1", "2x1", "2x2", "3x2"].map(String::from).to_vec();
            let names = p.get_list("gammas", gammas.clone(), default)?;
            let gammas = names.iter().map(|g| parse_gamma(g)).collect::<anyhow::Result<Vec<_>>>()?;
            let ps = p.get_list("p", ps.clone(), vec![0.8, 0.2])?;
            for &x in &ps {
                probability(x)?;
            }
            let margin = p.get("margin", *margin, 2)?;
            let reps = p.get("reps", *reps, 10_000)?;
            Box::new(move |s: &mut Session| {
                let probe = scaling_probe(&gammas, &ps, margin, &s.spec(reps), &s.exec)?;
                let mut rows = Vec::new();
                for r in &probe.rows {
                    let g = r.gamma;
                    s.run.record(
                        "wgamma",
                        Model::BondZ3.name(),
                        json!({ "m": g.m, "n": g.n, "p": r.p, "margin": margin, "below_resolution": r.below_resolution }),
                        r.estimate.value,
                        r.estimate.stderr,
                        reps,
                    );
                    rows.push(vec![
                        g.m.to_string(),
                        g.n.to_string(),
                        g.area().to_string(),
                        g.perimeter().to_string(),
                        num(r.p),
                        r.minus_log.map_or(String::new(), num),
                        r.minus_log_stderr.map_or(String::new(), num),
                        margin.to_string(),
                    ]);
                }
                s.run.write_csv(
                    "scaling.csv",
                    &["gamma_m", "gamma_n", "area", "perimeter", "p", "minus_log_estimate", "stderr", "region_margin"],
                    &rows,
                )?;
                for f in &probe.fits {
                    println!(
                        "p={}: {:?} (area rss {}, perimeter rss {}, {} points)",
                        num(f.p),
                        f.preferred,
                        num(f.area_rss),
                        num(f.perimeter_rss),
                        f.points
                    );
                }
                s.run.write_json(crate::output::REPORT, &probe)
            })
        }
        PlaquetteCmd::Algebra { side, chains, max_plaquettes, stride } => {
            let side = p.get("side", *side, 3)?;
            let chains = p.get("chains", *chains, 1000)?;
            let max = p.get("max_plaquettes", *max_plaquettes, 20)?;
            let stride = p.get("stride", *stride, 1)?;
            if max > 24 {
                bail!("max-plaquettes above 24 is beyond exhaustive enumeration");
            }
            Box::new(move |s: &mut Session| {
                let a = boundary_algebra(side, chains, StreamKey::new(s.seed, 0))?;
                s.run.check("boundary-linear", a.nonlinear == 0, -(a.nonlinear as f64), format!("{} chain pairs", a.chains));
                s.run.check("boundaries-closed", a.open_boundaries == 0, -(a.open_boundaries as f64), format!("{} chains", a.chains));
                s.run.check("closed-surfaces-vanish", a.nonzero_closed == 0, -(a.nonzero_closed as f64), String::new());
                let regions = box_regions(max)?;
                let sp = spans_agreement(&regions, stride, &s.exec)?;
                s.run.check(
                    "spans-matches-enumeration",
                    sp.mismatches == 0,
                    -(sp.mismatches as f64),
                    format!("{} regions, {} loops, {} occupied sets", sp.regions, sp.loops, sp.compared),
                );
                s.run.write_json(crate::output::REPORT, &json!({ "boundary": a, "spans": sp }))
            })
        }
        PlaquetteCmd::Coexistence { p: at, side, reps } => {
            let at = probability(p.get("p", *at, 0.5)?)?;
            let side = p.get("side", *side, 24)?;
            let reps = p.get("reps", *reps, 1000)?;
            Box::new(move |s: &mut Session| {
                let r = coexistence_check(at, side, &s.spec(reps), &s.exec)?;
                for (op, e) in [("open_span", r.open), ("closed_span", r.closed), ("both_span", r.both)] {
                    s.run.record(op, Model::SiteZ3.name(), json!({ "p": at, "side": side }), e.value, e.stderr, reps);
                }
                let [v, _] = estimate_cells(&r.both);
                s.run.check(
                    format!("coexistence p={at} L={side}"),
                    r.both.value >= COEXISTENCE_LEVEL,
                    r.both.value - COEXISTENCE_LEVEL,
                    format!("both={v}"),
                );
                s.run.write_json(crate::output::REPORT, &r)
            })
        }
    })
}
