use anyhow::bail;
use percolab_core::rsw::{estimate_pc, PcEstimate};
use percolab_core::Model;
use serde_json::json;

use crate::cli::{Command, Job, Session};
use crate::output::num;
use crate::params::Params;

/// Accepted range for the bond-Z² estimate at the largest box.
pub const BOND_WINDOW: (f64, f64) = (0.48, 0.52);
/// Accepted distance of site + matching estimates from 1.
pub const DUAL_SUM_TOLERANCE: f64 = 0.03;

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Pc(a) = cmd else { unreachable!() };
    let models = p.get_list("model", a.model.clone(), vec![Model::BondZ2])?;
    if let Some(m) = models.iter().find(|m| m.dims() != 2) {
        bail!("pc uses planar crossings; {m} is not planar");
    }
    let nmin = p.get("nmin", a.nmin, 4)?;
    let nmax = p.get("nmax", a.nmax, 32)?;
    if nmin == 0 || nmax < nmin {
        bail!("need 0 < nmin <= nmax");
    }
    let reps = p.get("reps", a.reps, 4000)?;
    let ns: Vec<u32> = std::iter::successors(Some(nmin), |&n| n.checked_mul(2)).take_while(|&n| n <= nmax).collect();
    Ok(Box::new(move |s: &mut Session| run(&models, &ns, reps, s)))
}

fn run(models: &[Model], ns: &[u32], reps: u64, s: &mut Session) -> anyhow::Result<()> {
    let mut found: Vec<PcEstimate> = Vec::new();
    let mut rows = Vec::new();
    for &model in models {
        let est = estimate_pc(model, ns, &s.spec(reps), &s.exec)?;
        for r in &est.rows {
            s.run.record("pc", model.name(), json!({ "n": r.n }), r.estimate, r.stderr, reps);
            rows.push(vec![model.name().to_string(), r.n.to_string(), num(r.estimate), num(r.stderr), reps.to_string()]);
        }
        println!("{model}: p_c estimate {} ± {} at n={}", num(est.estimate), num(est.stderr), ns[ns.len() - 1]);
        found.push(est);
    }
    s.run.write_csv("pc.csv", &["model", "n", "estimate", "stderr", "replicas"], &rows)?;
    let get = |m: Model| found.iter().find(|e| e.model == m);
    if let Some(b) = get(Model::BondZ2) {
        let (lo, hi) = BOND_WINDOW;
        let margin = (b.estimate - lo).min(hi - b.estimate);
        s.run.check("pc bond-z2 in [0.48, 0.52]", margin >= 0.0, margin, format!("estimate {}", num(b.estimate)));
    }
    if let (Some(a), Some(b)) = (get(Model::SiteZ2), get(Model::SiteZ2Matching)) {
        let sum = a.estimate + b.estimate;
        let margin = DUAL_SUM_TOLERANCE - (sum - 1.0).abs();
        s.run.check("pc site-z2 + matching = 1 ± 0.03", margin >= 0.0, margin, format!("sum {}", num(sum)));
    }
    s.run.write_json(crate::output::REPORT, &found)
}
