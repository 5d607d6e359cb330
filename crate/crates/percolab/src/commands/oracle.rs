use anyhow::bail;
use percolab_core::cube::{Dictator, Threshold, UpClosure};
use percolab_core::events::Crossing;
use percolab_core::lattice::BoxSpec;
use percolab_core::oracle::{self, DEFAULT_CAP};
use percolab_core::rng::StreamKey;
use percolab_core::rsw::talagrand_exact;
use percolab_core::{Event, LatticeGraph, Model};
use serde_json::json;

use super::{probability, reject_unused};
use crate::cli::{Command, EventArgs, Job, OracleCmd, Session};
use crate::output::num;
use crate::params::Params;

#[derive(Clone, Debug)]
pub enum EventSpec {
    Dictator { size: usize },
    Majority3,
    Threshold { size: usize, k: usize },
    Lr { m: u32, n: u32 },
    Random { size: usize, generators: usize, count: u64 },
}

impl EventSpec {
    pub fn resolve(a: &EventArgs, p: &mut Params) -> anyhow::Result<(Self, usize)> {
        let kind = p.get("event", a.event.clone(), "majority3".to_string())?;
        let spec = match kind.as_str() {
            "dictator" => {
                reject_unused(
                    &[
                        ("k", a.k.is_some()),
                        ("m", a.m.is_some()),
                        ("n", a.n.is_some()),
                        ("generators", a.generators.is_some()),
                        ("count", a.count.is_some()),
                    ],
                    "dictator",
                )?;
                EventSpec::Dictator { size: p.get("size", a.size, 3)? }
            }
            "majority3" => {
                reject_unused(
                    &[
                        ("size", a.size.is_some()),
                        ("k", a.k.is_some()),
                        ("m", a.m.is_some()),
                        ("n", a.n.is_some()),
                        ("generators", a.generators.is_some()),
                        ("count", a.count.is_some()),
                    ],
                    "majority3",
                )?;
                EventSpec::Majority3
            }
            "threshold" => {
                reject_unused(
                    &[("m", a.m.is_some()), ("n", a.n.is_some()), ("generators", a.generators.is_some()), ("count", a.count.is_some())],
                    "threshold",
                )?;
                let size = p.get("size", a.size, 5)?;
                let k = p.get("k", a.k, size.div_ceil(2))?;
                EventSpec::Threshold { size, k }
            }
            "lr" => {
                reject_unused(
                    &[
                        ("size", a.size.is_some()),
                        ("k", a.k.is_some()),
                        ("generators", a.generators.is_some()),
                        ("count", a.count.is_some()),
                    ],
                    "lr",
                )?;
                EventSpec::Lr { m: p.get("m", a.m, 1)?, n: p.get("n", a.n, 1)? }
            }
            "random" => {
                reject_unused(&[("k", a.k.is_some()), ("m", a.m.is_some()), ("n", a.n.is_some())], "random")?;
                let size = p.get("size", a.size, 8)?;
                let generators = p.get("generators", a.generators, 4)?;
                let count = p.get("count", a.count, 1)?;
                if size == 0 || generators == 0 || count == 0 {
                    bail!("random events need positive size, generators and count");
                }
                EventSpec::Random { size, generators, count }
            }
            other => bail!("unknown event `{other}` (expected dictator, majority3, threshold, lr or random)"),
        };
        if let EventSpec::Dictator { size: 0 } | EventSpec::Threshold { size: 0, .. } = spec {
            bail!("ground-set size must be positive");
        }
        let cap = p.get("cap", a.cap, DEFAULT_CAP)?;
        Ok((spec, cap))
    }

    pub fn count(&self) -> u64 {
        match self {
            EventSpec::Random { count, .. } => *count,
            _ => 1,
        }
    }

    pub fn model(&self) -> &'static str {
        match self {
            EventSpec::Lr { .. } => Model::BondZ2.name(),
            _ => "cube",
        }
    }

    /// Calls `f` with a label and the `i`-th event of the family.
    pub fn with_event<R>(&self, i: u64, seed: u64, f: impl FnOnce(&str, &dyn Event) -> R) -> anyhow::Result<R> {
        Ok(match *self {
            EventSpec::Dictator { size } => f(&format!("dictator-{size}"), &Dictator { size, element: 0 }),
            EventSpec::Majority3 => f("majority3", &Threshold::majority3()),
            EventSpec::Threshold { size, k } => f(&format!("threshold-{k}-of-{size}"), &Threshold { size, k }),
            EventSpec::Lr { m, n } => {
                let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(m, n))?;
                f(&format!("lr-{m}x{n}"), &Crossing::left_right(&g)?)
            }
            EventSpec::Random { size, generators, .. } => {
                let ev = UpClosure::random(size, generators, StreamKey::new(seed, i));
                f(&format!("random-{i}"), &ev)
            }
        })
    }
}

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Oracle(cmd) = cmd else { unreachable!() };
    match cmd {
        OracleCmd::VerifyRusso(a) => {
            let (spec, cap) = EventSpec::resolve(a, p)?;
            Ok(Box::new(move |s| verify(&spec, cap, s)))
        }
        OracleCmd::Polynomial { event, p: at } => {
            let (spec, cap) = EventSpec::resolve(event, p)?;
            let at = probability(p.get("p", *at, 0.5)?)?;
            Ok(Box::new(move |s| polynomial(&spec, cap, at, s)))
        }
        OracleCmd::Talagrand { event, p: at } => {
            let (spec, cap) = EventSpec::resolve(event, p)?;
            let at = probability(p.get("p", *at, 0.5)?)?;
            Ok(Box::new(move |s| talagrand(&spec, cap, at, s)))
        }
    }
}

fn verify(spec: &EventSpec, cap: usize, s: &mut Session) -> anyhow::Result<()> {
    let mut reports = Vec::new();
    for i in 0..spec.count() {
        let (label, report) = spec.with_event(i, s.seed, |label, ev| (label.to_string(), oracle::verify_russo(ev, cap, &s.exec)))?;
        let report = report?;
        s.run.record("verify_russo", spec.model(), json!({ "event": label, "n": report.n }), report.derivative.eval_f64(0.5), 0.0, 0);
        s.run.check(format!("russo-identity {label}"), report.equal, f64::NAN, format!("n={}", report.n));
        reports.push(json!({
            "event": label,
            "n": report.n,
            "equal": report.equal,
            "derivative": report.derivative,
            "pivotal_sum": report.pivotal_sum,
        }));
    }
    let all = s.run.all_pass();
    println!("identity: {}", if all { "exact" } else { "MISMATCH" });
    s.run.write_json(crate::output::REPORT, &reports)
}

fn polynomial(spec: &EventSpec, cap: usize, at: f64, s: &mut Session) -> anyhow::Result<()> {
    if spec.count() != 1 {
        bail!("polynomial takes a single event");
    }
    let (label, ep) = spec.with_event(0, s.seed, |label, ev| (label.to_string(), oracle::event_polynomial(ev, cap, &s.exec)))?;
    let ep = ep?;
    let value = ep.eval(at);
    s.run.record("event_polynomial", spec.model(), json!({ "event": label, "p": at }), value, 0.0, 0);
    let rows: Vec<Vec<String>> = ep.counts.iter().enumerate().map(|(k, c)| vec![k.to_string(), c.to_string()]).collect();
    s.run.write_csv("polynomial.csv", &["k", "count"], &rows)?;
    println!("{label}: n={} P_{at}(A)={}", ep.n, num(value));
    s.run.write_json(crate::output::REPORT, &json!({ "event": label, "polynomial": ep }))
}

fn talagrand(spec: &EventSpec, cap: usize, at: f64, s: &mut Session) -> anyhow::Result<()> {
    for i in 0..spec.count() {
        let (label, r) = spec.with_event(i, s.seed, |label, ev| (label.to_string(), talagrand_exact(ev, at, cap, &s.exec)))?;
        let r = r?;
        s.run.record("talagrand_ratio", spec.model(), json!({ "event": label, "p": at }), r.ratio, 0.0, 0);
        s.run.check(
            format!("talagrand-ratio-positive {label}"),
            r.ratio > 0.0,
            r.ratio,
            format!("total={} max={}", num(r.total), num(r.max_influence)),
        );
        println!("{label}: ratio={}", num(r.ratio));
    }
    Ok(())
}
