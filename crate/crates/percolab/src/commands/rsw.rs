use percolab_core::rsw::{rsw_check, SIGMAS};
use percolab_core::Model;
use serde_json::json;

use super::probability;
use crate::cli::{Command, Job, Session};
use crate::output::num;
use crate::params::Params;

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Rsw(a) = cmd else { unreachable!() };
    let ns = p.get_list("n", a.n.clone(), vec![8])?;
    let ps = p.get_list("p", a.p.clone(), vec![0.5])?;
    for &x in &ps {
        probability(x)?;
    }
    let reps = p.get("reps", a.reps, 10_000)?;
    Ok(Box::new(move |s: &mut Session| {
        let mut reports = Vec::new();
        let mut rows = Vec::new();
        for &n in &ns {
            for &at in &ps {
                let r = rsw_check(n, at, &s.spec(reps), &s.exec)?;
                s.run.record(
                    "rsw",
                    Model::BondZ2.name(),
                    json!({ "n": n, "p": at, "tau": r.tau.value }),
                    r.lhs.value,
                    r.pooled_stderr,
                    reps,
                );
                s.run.check(
                    format!("rsw n={n} p={at}"),
                    r.pass,
                    r.margin + SIGMAS * r.pooled_stderr,
                    format!("lhs={} bound={} gap={}", num(r.lhs.value), num(r.bound), num(r.margin)),
                );
                rows.push(vec![
                    n.to_string(),
                    num(at),
                    num(r.tau.value),
                    num(r.tau.stderr),
                    num(r.lhs.value),
                    num(r.lhs.stderr),
                    num(r.bound),
                    num(r.margin),
                    num(r.pooled_stderr),
                    reps.to_string(),
                ]);
                reports.push(r);
            }
        }
        s.run.write_csv(
            "rsw.csv",
            &["n", "p", "tau", "tau_stderr", "lhs", "lhs_stderr", "bound", "margin", "pooled_stderr", "replicas"],
            &rows,
        )?;
        let body = if reports.len() == 1 { serde_json::to_string_pretty(&reports[0])? } else { serde_json::to_string_pretty(&reports)? };
        println!("{body}");
        s.run.write_json(crate::output::REPORT, &reports)
    }))
}
