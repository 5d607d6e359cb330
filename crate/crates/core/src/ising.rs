//! Two-dimensional Ising model on an `L × L` box with heat-bath dynamics.
//!
//! Spins live on `[0, L-1]²`, stored row-major. Under `+` or `-` boundary
//! conditions every box spin on the edge also feels the fixed frame spins
//! just outside the box; under free boundary conditions the frame is
//! absent. One sweep updates the spins in row-major order, each from the
//! conditional law `P(σ_x = +1 | rest) = 1 / (1 + exp(-2β(S_x + h)))` with
//! `S_x` the sum of neighbouring spins.
//!
//! Sweep `k` of a chain uses the uniform `key.uniform(k·L² + x)` at site
//! `x`. Chains that share a key are therefore coupled, and because the
//! heat-bath update is monotone in `S_x + h`, raising `h` can only raise
//! every spin of a coupled chain.

use alloc::vec::Vec;

use crate::clusters::connects;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exec::Executor;
use crate::lattice::{LatticeGraph, Model, Roles};
use crate::montecarlo::SamplerSpec;
use crate::rng::StreamKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Boundary {
    Plus,
    Minus,
    Free,
}

impl Boundary {
    pub fn frame(self) -> i32 {
        match self {
            Boundary::Plus => 1,
            Boundary::Minus => -1,
            Boundary::Free => 0,
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Boundary::Plus => Boundary::Minus,
            Boundary::Minus => Boundary::Plus,
            Boundary::Free => Boundary::Free,
        }
    }
}

impl core::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Boundary::Plus),
            "minus" | "-" => Ok(Boundary::Minus),
            "free" => Ok(Boundary::Free),
            _ => Err(Error::domain("boundary must be plus, minus or free")),
        }
    }
}

impl core::fmt::Display for Boundary {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Boundary::Plus => "plus",
            Boundary::Minus => "minus",
            Boundary::Free => "free",
        })
    }
}

/// `1 / (1 + exp(-2β(s + h)))`.
pub fn heat_bath_probability(beta: f64, local: f64, h: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-2.0 * beta * (local + h)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinConfig {
    side: usize,
    spins: Vec<i8>,
    boundary: Boundary,
    beta: f64,
    field: f64,
    sweeps: u64,
}

impl SpinConfig {
    /// Initial state: all `+1` under `+`, all `-1` under `-`, independent
    /// fair spins under free boundary conditions.
    pub fn new(side: u32, temperature: f64, field: f64, boundary: Boundary, key: StreamKey) -> Result<Self> {
        if temperature.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) || !temperature.is_finite() {
            return Err(Error::domain("temperature must be positive"));
        }
        if side == 0 || side > 4096 {
            return Err(Error::domain("box side must lie in [1, 4096]"));
        }
        if !field.is_finite() {
            return Err(Error::domain("field must be finite"));
        }
        let n = side as usize * side as usize;
        let init = key.child(0x1717);
        let spins = (0..n)
            .map(|x| match boundary {
                Boundary::Plus => 1,
                Boundary::Minus => -1,
                Boundary::Free => {
                    if init.uniform(x as u64) < 0.5 {
                        1
                    } else {
                        -1
                    }
                }
            })
            .collect();
        Ok(SpinConfig { side: side as usize, spins, boundary, beta: 1.0 / temperature, field, sweeps: 0 })
    }

    /// Explicit spins, for small exact checks.
    pub fn from_spins(side: u32, spins: Vec<i8>, temperature: f64, field: f64, boundary: Boundary) -> Result<Self> {
        let mut c = Self::new(side, temperature, field, boundary, StreamKey::new(0, 0))?;
        if spins.len() != c.spins.len() || spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("spins must be ±1 with one per site"));
        }
        c.spins = spins;
        Ok(c)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps
    }

    pub fn magnetization(&self) -> f64 {
        self.spins.iter().map(|&s| f64::from(s)).sum::<f64>() / self.spins.len() as f64
    }

    /// Sum of the four neighbours of site `x`, frame spins included.
    pub fn local_field(&self, x: usize) -> i32 {
        let l = self.side;
        let (i, j) = (x % l, x / l);
        let frame = self.boundary.frame();
        let at = |ok: bool, y: usize| if ok { i32::from(self.spins[y]) } else { frame };
        at(i > 0, x.wrapping_sub(1)) + at(i + 1 < l, x + 1) + at(j > 0, x.wrapping_sub(l)) + at(j + 1 < l, x + l)
    }

    /// `H(σ) = -Σ_{⟨xy⟩} σ_x σ_y - Σ_{x ∈ edge} σ_x·frame - h Σ_x σ_x`.
    pub fn energy(&self) -> f64 {
        let l = self.side;
        let frame = i64::from(self.boundary.frame());
        let (mut inner, mut outer) = (0i64, 0i64);
        for x in 0..self.spins.len() {
            let s = i64::from(self.spins[x]);
            let (i, j) = (x % l, x / l);
            let walls = [i == 0, i + 1 == l, j == 0, j + 1 == l].iter().filter(|&&b| b).count() as i64;
            // Interior bonds are seen from both ends.
            inner += s * (i64::from(self.local_field(x)) - frame * walls);
            outer += s * frame * walls;
        }
        let m: f64 = self.spins.iter().map(|&s| f64::from(s)).sum();
        -(inner as f64) / 2.0 - outer as f64 - self.field * m
    }

    /// Runs `count` sweeps drawing the uniform for sweep `k`, site `x` from
    /// `uniform(k·L² + x)`.
    pub fn sweep_with(&mut self, count: u64, uniform: impl Fn(u64) -> f64) {
        let n = self.spins.len() as u64;
        let table: [f64; 9] = core::array::from_fn(|k| heat_bath_probability(self.beta, k as f64 - 4.0, self.field));
        for _ in 0..count {
            let base = self.sweeps * n;
            for x in 0..self.spins.len() {
                let s = self.local_field(x);
                let p = table[(s + 4) as usize];
                self.spins[x] = if uniform(base + x as u64) < p { 1 } else { -1 };
            }
            self.sweeps += 1;
        }
    }

    pub fn sweep(&mut self, count: u64, key: StreamKey) {
        self.sweep_with(count, |i| key.uniform(i));
    }

    /// Sites with spin `sign` as a site configuration of `[0, L-1]²`.
    pub fn sign_sites(&self, sign: i8) -> Configuration {
        let bits: Vec<bool> = self.spins.iter().map(|&s| s == sign).collect();
        Configuration::from_bits(&bits)
    }
}

/// A heat-bath chain after `sweeps` sweeps from the initial state.
pub fn glauber_sample(side: u32, temperature: f64, field: f64, boundary: Boundary, sweeps: u64, key: StreamKey) -> Result<SpinConfig> {
    let mut c = SpinConfig::new(side, temperature, field, boundary, key)?;
    c.sweep(sweeps, key);
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub burn_in: u64,
    pub thin: u64,
    pub samples: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { burn_in: 1000, thin: 10, samples: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinRow {
    pub temperature: f64,
    pub field: f64,
    pub boundary: Boundary,
    /// Frequency that the `+` sites contain a left–right crossing.
    pub plus_span: Estimate,
    pub minus_span: Estimate,
    /// Frequency that neither sign crosses.
    pub neither: Estimate,
    pub magnetization: Estimate,
}

/// Per-chain averages over the sampled states give one value per replica;
/// the estimates are means of those values.
pub fn spin_percolation_scan<X: Executor>(
    side: u32,
    temperatures: &[f64],
    field: f64,
    boundary: Boundary,
    schedule: Schedule,
    spec: &SamplerSpec,
    exec: &X,
) -> Result<Vec<SpinRow>> {
    if spec.replicas == 0 || schedule.samples == 0 || schedule.thin == 0 {
        return Err(Error::domain("replicas, samples and thinning must be positive"));
    }
    if side < 2 {
        return Err(Error::domain("spin percolation needs L >= 2"));
    }
    let g = LatticeGraph::rect(Model::SiteZ2, [side - 1, side - 1, 0])?;
    let mut rows = Vec::with_capacity(temperatures.len());
    for (ti, &t) in temperatures.iter().enumerate() {
        let per = exec.map(spec.replicas as usize, |r| -> Result<[f64; 4]> {
            let key = spec.key(r as u64).child(ti as u64);
            let mut c = SpinConfig::new(side, t, field, boundary, key)?;
            c.sweep(schedule.burn_in, key);
            let mut acc = [0.0; 4];
            for _ in 0..schedule.samples {
                c.sweep(schedule.thin, key);
                let plus = connects(&g, &c.sign_sites(1), true, Roles::LEFT, Roles::RIGHT);
                let minus = connects(&g, &c.sign_sites(-1), true, Roles::LEFT, Roles::RIGHT);
                acc[0] += f64::from(u8::from(plus));
                acc[1] += f64::from(u8::from(minus));
                acc[2] += f64::from(u8::from(!plus && !minus));
                acc[3] += c.magnetization();
            }
            Ok(acc.map(|a| a / schedule.samples as f64))
        });
        let per = per.into_iter().collect::<Result<Vec<_>>>()?;
        let col = |i: usize| per.iter().map(|a| a[i]).collect::<Vec<f64>>();
        rows.push(SpinRow {
            temperature: t,
            field,
            boundary,
            plus_span: Estimate::mean(&col(0), 0.0, 1.0),
            minus_span: Estimate::mean(&col(1), 0.0, 1.0),
            neither: Estimate::mean(&col(2), 0.0, 1.0),
            magnetization: Estimate::mean(&col(3), -1.0, 1.0),
        });
    }
    Ok(rows)
}
