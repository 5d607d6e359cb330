use anyhow::bail;
use percolab_core::events::Crossing;
use percolab_core::lattice::BoxSpec;
use percolab_core::rsw::{dictator_window, lr_window, russo_shadow, sweep_points, talagrand_mc, ThresholdWindow};
use percolab_core::{LatticeGraph, Model};
use serde_json::json;

use super::probability;
use crate::cli::{Command, Job, Session, ThresholdCmd};
use crate::output::num;
use crate::params::Params;

/// Standard errors separating successive window widths.
pub const WINDOW_SIGMAS: f64 = 3.0;
/// Relative tolerance on the dictator width `1 - 2ε`.
pub const DICTATOR_TOLERANCE: f64 = 0.05;

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Threshold(cmd) = cmd else { unreachable!() };
    Ok(match cmd {
        ThresholdCmd::Windows { family, ns, epsilon, reps, eta_reps } => {
            let family = p.get("family", family.clone(), "lr".to_string())?;
            if family != "lr" && family != "dictator" {
                bail!("unknown family `{family}` (expected lr or dictator)");
            }
            let ns = p.get_list("ns", ns.clone(), vec![8, 16, 32])?;
            let epsilon = p.get("epsilon", *epsilon, 0.1)?;
            let reps = p.get("reps", *reps, 4000)?;
            let eta_reps = if family == "lr" { p.get("eta_reps", *eta_reps, 0)? } else { 0 };
            Box::new(move |s: &mut Session| windows(&family, &ns, epsilon, reps, eta_reps, s))
        }
        ThresholdCmd::Shadow { n, p: ps, h, reps } => {
            let n = p.get("n", *n, 4)?;
            let ps = p.get_list("p", ps.clone(), vec![0.45, 0.5, 0.55])?;
            for &x in &ps {
                probability(x)?;
            }
            let h = p.get("h", *h, 0.025)?;
            let reps = p.get("reps", *reps, 40_000)?;
            Box::new(move |s: &mut Session| shadow(n, &ps, h, reps, s))
        }
        ThresholdCmd::Talagrand { ns, p: at, reps } => {
            let ns = p.get_list("ns", ns.clone(), vec![2, 4, 8])?;
            let at = probability(p.get("p", *at, 0.5)?)?;
            let reps = p.get("reps", *reps, 10_000)?;
            Box::new(move |s: &mut Session| talagrand(&ns, at, reps, s))
        }
    })
}

fn windows(family: &str, ns: &[u32], epsilon: f64, reps: u64, eta_reps: u64, s: &mut Session) -> anyhow::Result<()> {
    let spec = s.spec(reps);
    let mut found: Vec<ThresholdWindow> = Vec::new();
    let mut sweep = Vec::new();
    for &n in ns {
        let (w, curve) = if family == "lr" {
            lr_window(n, epsilon, &spec, eta_reps, &s.exec)?
        } else {
            dictator_window(n as usize, epsilon, &spec, &s.exec)?
        };
        for x in sweep_points(&curve) {
            let e = curve.value_at(x);
            sweep.push(vec![n.to_string(), num(x), num(e.value), num(e.stderr), reps.to_string()]);
        }
        let model = if family == "lr" { Model::BondZ2.name() } else { "cube" };
        s.run.record("window_width", model, json!({ "family": family, "n": n, "epsilon": epsilon }), w.width, w.width_stderr, reps);
        println!("{family} n={n}: [{}, {}] width {} ± {}", num(w.p_low), num(w.p_high), num(w.width), num(w.width_stderr));
        found.push(w);
    }
    s.run.write_csv("sweep.csv", &["n", "p", "estimate", "stderr", "replicas"], &sweep)?;
    let rows: Vec<Vec<String>> = found
        .iter()
        .map(|w| {
            vec![
                w.n.to_string(),
                num(w.epsilon),
                num(w.p_low),
                num(w.p_high),
                num(w.width),
                num(w.width_stderr),
                num(w.p0),
                w.eta.map_or(String::new(), num),
            ]
        })
        .collect();
    s.run.write_csv("windows.csv", &["n", "epsilon", "p_low", "p_high", "width", "width_stderr", "p0", "eta"], &rows)?;
    if family == "lr" {
        for pair in found.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let se = a.width_stderr.hypot(b.width_stderr);
            s.run.check(
                format!("window-shrinks n={}->{}", a.n, b.n),
                b.narrower_than(a, WINDOW_SIGMAS),
                a.width - b.width - WINDOW_SIGMAS * se,
                format!("widths {} -> {}", num(a.width), num(b.width)),
            );
        }
    } else {
        let target = 1.0 - 2.0 * epsilon;
        for w in &found {
            let slack = DICTATOR_TOLERANCE * target - (w.width - target).abs();
            s.run.check(format!("dictator-width n={}", w.n), slack >= 0.0, slack, format!("width {} target {}", num(w.width), num(target)));
        }
    }
    s.run.write_json(crate::output::REPORT, &found)
}

fn shadow(n: u32, ps: &[f64], h: f64, reps: u64, s: &mut Session) -> anyhow::Result<()> {
    let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(n, n))?;
    let ev = Crossing::left_right(&g)?;
    let mut reports = Vec::new();
    for &at in ps {
        let spec = s.spec(reps).labelled(&format!("shadow-{at}"));
        let r = russo_shadow(&ev, g.carrier_keys(), at, h, &spec, &s.exec)?;
        s.run.record(
            "total_influence",
            Model::BondZ2.name(),
            json!({ "n": n, "p": at }),
            r.total_influence.value,
            r.total_influence.stderr,
            reps,
        );
        s.run.record(
            "finite_difference",
            Model::BondZ2.name(),
            json!({ "n": n, "p": at, "h": h }),
            r.derivative.value,
            r.derivative.stderr,
            reps,
        );
        s.run.check(
            format!("russo-shadow n={n} p={at}"),
            r.pass,
            r.sigmas * r.difference.stderr - r.difference.value.abs(),
            format!("influence={} difference={}", num(r.total_influence.value), num(r.derivative.value)),
        );
        reports.push(r);
    }
    s.run.write_json(crate::output::REPORT, &reports)
}

fn talagrand(ns: &[u32], at: f64, reps: u64, s: &mut Session) -> anyhow::Result<()> {
    let mut reports = Vec::new();
    let mut lowest = f64::INFINITY;
    for &n in ns {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(n, n))?;
        let ev = Crossing::left_right(&g)?;
        let spec = s.spec(reps).labelled(&format!("talagrand-{n}"));
        let r = talagrand_mc(&ev, g.carrier_keys(), at, &spec, &s.exec)?;
        s.run.record("talagrand_ratio", Model::BondZ2.name(), json!({ "n": n, "p": at }), r.ratio, f64::NAN, reps);
        println!("LR({n},{n}) p={at}: ratio {} (total {}, max influence {})", num(r.ratio), num(r.total), num(r.max_influence));
        lowest = lowest.min(r.ratio);
        reports.push(json!({ "n": n, "report": r }));
    }
    s.run.check("talagrand-ratio-positive", lowest > 0.0, lowest, format!("min ratio over n={ns:?}"));
    s.run.write_json(crate::output::REPORT, &reports)
}
