use anyhow::bail;
use percolab_core::montecarlo::{uniqueness_diagnostics, UniquenessReport};
use percolab_core::Model;
use serde_json::json;

use super::probability;
use crate::cli::{Command, Job, Session};
use crate::output::num;
use crate::params::Params;

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Uniqueness(a) = cmd else { unreachable!() };
    let model = p.get("model", a.sample.model, Model::BondZ2)?;
    let at = probability(p.get("p", a.sample.p, 0.6)?)?;
    let reps = p.get("reps", a.sample.reps, 1000)?;
    let mut radii = p.get_list("radii", a.radii.clone(), vec![32, 64, 128])?;
    radii.sort_unstable();
    radii.dedup();
    if radii.len() < 2 {
        bail!("the trend needs at least two distinct radii");
    }
    Ok(Box::new(move |s: &mut Session| {
        let mut found: Vec<UniquenessReport> = Vec::new();
        let mut rows = Vec::new();
        for &l in &radii {
            let spec = s.spec(reps).labelled(&format!("uniqueness-{l}"));
            let r = uniqueness_diagnostics(model, at, l, &spec, &s.exec)?;
            let params = json!({ "p": at, "radius": l });
            s.run.record("density_two", model.name(), params.clone(), r.density_two.value, r.density_two.stderr, reps);
            s.run.record("density_three", model.name(), params.clone(), r.density_three.value, r.density_three.stderr, reps);
            s.run.record("multiple_large", model.name(), params, r.multiple_large.value, r.multiple_large.stderr, reps);
            rows.push(vec![
                l.to_string(),
                num(at),
                num(r.density_two.value),
                num(r.density_two.stderr),
                num(r.density_three.value),
                num(r.density_three.stderr),
                num(r.multiple_large.value),
                num(r.large_clusters.value),
                reps.to_string(),
            ]);
            found.push(r);
        }
        s.run.write_csv(
            "uniqueness.csv",
            &[
                "radius",
                "p",
                "density_two",
                "density_two_stderr",
                "density_three",
                "density_three_stderr",
                "multiple_large",
                "large_clusters",
                "replicas",
            ],
            &rows,
        )?;
        let margin = found.windows(2).map(|w| w[0].density_two.value - w[1].density_two.value).fold(f64::INFINITY, f64::min);
        let trend: Vec<String> = found.iter().map(|r| num(r.density_two.value)).collect();
        s.run.check("uniqueness density_two decreasing", margin > 0.0, margin, format!("densities {}", trend.join(" > ")));
        s.run.write_json(crate::output::REPORT, &found)
    }))
}
