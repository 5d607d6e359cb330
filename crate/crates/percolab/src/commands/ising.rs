use percolab_core::ising::{spin_percolation_scan, Boundary, Schedule};
use serde_json::json;

use crate::cli::{Command, Job, Session};
use crate::output::num;
use crate::params::Params;

/// Temperatures at or below this count as ordered for the checks.
pub const LOW_TEMPERATURE: f64 = 1.0;
/// Temperatures at or above this count as disordered.
pub const HIGH_TEMPERATURE: f64 = 5.0;
/// Boundary-sign spanning frequency required at low temperature.
pub const LOW_LEVEL: f64 = 0.95;
/// Neither-sign spanning frequency required at high temperature.
pub const HIGH_LEVEL: f64 = 0.5;

pub fn plan(cmd: &Command, p: &mut Params) -> anyhow::Result<Job> {
    let Command::Ising(a) = cmd else { unreachable!() };
    let side = p.get("side", a.side, 32)?;
    let temps = p.get_list("temps", a.temps.clone(), vec![0.5, 10.0])?;
    let field = p.get("field", a.field, 0.0)?;
    let boundary = p.get("boundary", a.boundary, Boundary::Plus)?;
    let d = Schedule::default();
    let schedule = Schedule {
        burn_in: p.get("burn_in", a.burn_in, d.burn_in)?,
        thin: p.get("thin", a.thin, d.thin)?,
        samples: p.get("samples", a.samples, d.samples)?,
    };
    let reps = p.get("reps", a.reps, 100)?;
    Ok(Box::new(move |s: &mut Session| {
        let rows = spin_percolation_scan(side, &temps, field, boundary, schedule, &s.spec(reps), &s.exec)?;
        let mut table = Vec::new();
        for r in &rows {
            let params = json!({ "side": side, "temperature": r.temperature, "field": field, "boundary": boundary.to_string() });
            for (op, e) in
                [("plus_span", r.plus_span), ("minus_span", r.minus_span), ("neither_span", r.neither), ("magnetization", r.magnetization)]
            {
                s.run.record(op, "ising-z2", params.clone(), e.value, e.stderr, reps);
            }
            table.push(vec![
                num(r.temperature),
                num(field),
                boundary.to_string(),
                num(r.plus_span.value),
                num(r.minus_span.value),
                num(r.neither.value),
                num(r.magnetization.value),
                reps.to_string(),
            ]);
            let t = r.temperature;
            if t <= LOW_TEMPERATURE && boundary != Boundary::Free {
                let span = if boundary == Boundary::Plus { r.plus_span } else { r.minus_span };
                s.run.check(
                    format!("ising ordered T={t} {boundary}-span"),
                    span.value > LOW_LEVEL,
                    span.value - LOW_LEVEL,
                    format!("span={}", num(span.value)),
                );
            } else if t >= HIGH_TEMPERATURE {
                s.run.check(
                    format!("ising disordered T={t} neither-span"),
                    r.neither.value > HIGH_LEVEL,
                    r.neither.value - HIGH_LEVEL,
                    format!("neither={} plus={} minus={}", num(r.neither.value), num(r.plus_span.value), num(r.minus_span.value)),
                );
            } else {
                println!("T={t}: plus {} minus {} neither {}", num(r.plus_span.value), num(r.minus_span.value), num(r.neither.value));
            }
        }
        s.run.write_csv(
            "ising.csv",
            &["temperature", "field", "boundary", "plus_span", "minus_span", "neither_span", "magnetization", "replicas"],
            &table,
        )?;
        s.run.write_json(crate::output::REPORT, &rows)
    }))
}
