//! One module per subcommand. Each `plan` resolves parameters and returns
//! the job that computes and writes results.

pub mod ising;
pub mod mc;
pub mod oracle;
pub mod pc;
pub mod plaquette;
pub mod report;
pub mod rsw;
pub mod threshold;
pub mod uniqueness;

use anyhow::bail;
use percolab_core::Estimate;

/// Rejects flags that the selected variant does not read.
pub(crate) fn reject_unused(given: &[(&str, bool)], context: &str) -> anyhow::Result<()> {
    if let Some((flag, _)) = given.iter().find(|(_, set)| *set) {
        bail!("--{flag} does not apply to {context}");
    }
    Ok(())
}

pub(crate) fn probability(p: f64) -> anyhow::Result<f64> {
    percolab_core::Probability::new(p)?;
    Ok(p)
}

pub(crate) fn estimate_cells(e: &Estimate) -> [String; 2] {
    [crate::output::num(e.value), crate::output::num(e.stderr)]
}
