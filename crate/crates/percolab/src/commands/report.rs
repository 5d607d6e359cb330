//! Summaries of finished runs and byte-level replay.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::cli::{run, EXIT_CHECK_FAILED};
use crate::output::{Check, Manifest, CHECKS};

/// Prints one line per check and writes a whitespace-separated `.dat`
/// copy of every CSV table, with a `#` header and a blank-line pair
/// between blocks of the first column, for gnuplot's `index`.
pub fn report(dir: &Path) -> anyhow::Result<i32> {
    let manifest = Manifest::load(dir)?;
    println!("{} (seed {}, {} threads, {:.2} s)", manifest.command, manifest.seed, manifest.threads, manifest.wall_time);
    let checks: Vec<Check> = if manifest.outputs.iter().any(|o| o == CHECKS) {
        let text = fs::read_to_string(dir.join(CHECKS)).with_context(|| format!("reading {CHECKS}"))?;
        serde_json::from_str(&text).with_context(|| format!("corrupt {CHECKS}"))?
    } else {
        Vec::new()
    };
    for c in &checks {
        let margin = c.margin.map_or(String::from("n/a"), |m| format!("{m:.6}"));
        println!("{} {} margin={margin} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.is_empty() {
        println!("no theorem checks in this run");
    }
    for name in manifest.outputs.iter().filter(|o| o.ends_with(".csv")) {
        let out = plot_data(&dir.join(name))?;
        println!("plot data: {}", out.display());
    }
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { EXIT_CHECK_FAILED })
}

fn plot_data(csv_path: &Path) -> anyhow::Result<PathBuf> {
    let mut r = csv::Reader::from_path(csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut text = format!("# {}\n", header.join(" "));
    let mut block: Option<String> = None;
    for rec in r.records() {
        let rec = rec?;
        let first = rec.get(0).unwrap_or_default().to_string();
        if block.as_ref().is_some_and(|b| *b != first) {
            text.push_str("\n\n");
        }
        block = Some(first);
        let cells: Vec<&str> = rec.iter().map(|c| if c.is_empty() { "NaN" } else { c }).collect();
        text.push_str(&cells.join(" "));
        text.push('\n');
    }
    let out = csv_path.with_extension("dat");
    fs::write(&out, text)?;
    Ok(out)
}

/// Re-runs the manifest's pinned arguments into a fresh directory and
/// compares every output file byte for byte.
pub fn replay(dir: &Path, threads: Option<usize>, out: Option<&Path>) -> anyhow::Result<i32> {
    let manifest = Manifest::load(dir)?;
    let target = out.map_or_else(|| dir.join("replay"), Path::to_path_buf);
    if target == dir {
        anyhow::bail!("replay output must differ from the original run directory");
    }
    let mut args = vec!["percolab".to_string()];
    args.extend(manifest.args.iter().cloned());
    args.push("--out".into());
    args.push(target.display().to_string());
    if let Some(t) = threads {
        args.push("--threads".into());
        args.push(t.to_string());
    }
    let code = run(&args);
    if code == crate::cli::EXIT_USAGE {
        anyhow::bail!("replay of {} failed", dir.display());
    }
    let mut differing = Vec::new();
    for name in &manifest.outputs {
        let a = fs::read(dir.join(name)).with_context(|| format!("reading {name}"))?;
        let b = fs::read(target.join(name)).unwrap_or_default();
        if a != b {
            differing.push(name.clone());
        }
    }
    if differing.is_empty() {
        println!("replay identical: {} files", manifest.outputs.len());
        Ok(0)
    } else {
        println!("replay differs: {}", differing.join(", "));
        Ok(EXIT_CHECK_FAILED)
    }
}
