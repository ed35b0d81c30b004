//! Per-step phase schedules for dynamic phase disorder.
//!
//! One scalar phase per step is shared by every interferometer of that
//! step. Draws come from a ChaCha20 stream keyed by `(seed, config_index)`,
//! so a configuration's schedule does not depend on which thread runs it or
//! in what order.

use std::f64::consts::{FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::number::format_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    None,
    Dynamic,
}

/// Named phase intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoisePreset {
    /// [-pi/8, pi/8]
    Weak,
    /// [-pi, pi]
    Strong,
}

impl NoisePreset {
    pub fn interval(self) -> (f64, f64) {
        match self {
            NoisePreset::Weak => (-FRAC_PI_8, FRAC_PI_8),
            NoisePreset::Strong => (-PI, PI),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p_min: f64,
    pub p_max: f64,
    /// Rearrange the draws in ascending order over the steps.
    pub sorted: bool,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            p_min: 0.0,
            p_max: 0.0,
            sorted: false,
        }
    }

    pub fn dynamic(p_min: f64, p_max: f64, sorted: bool) -> Result<Self> {
        let spec = Self {
            kind: NoiseKind::Dynamic,
            p_min,
            p_max,
            sorted,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn preset(preset: NoisePreset, sorted: bool) -> Self {
        let (p_min, p_max) = preset.interval();
        Self {
            kind: NoiseKind::Dynamic,
            p_min,
            p_max,
            sorted,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.p_min, self.p_max);
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(())
    }
}

/// Phases `phi_1..phi_N` with the recipe that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub phases: Vec<f64>,
    pub spec: NoiseSpec,
    pub seed: u64,
    pub config_index: u64,
}

impl PhaseSchedule {
    pub fn zeros(steps: usize) -> Self {
        Self {
            phases: vec![0.0; steps],
            spec: NoiseSpec::none(),
            seed: 0,
            config_index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Schedule text: one `n,phi` line per step.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, phi) in self.phases.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, format_float(*phi)));
        }
        out
    }

    /// Parses schedule text. Blank lines and `#` comments are skipped; the
    /// step numbers must run 1, 2, 3, … in order.
    pub fn from_text(text: &str, spec: NoiseSpec) -> Result<Self> {
        let mut phases = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (n, phi) = line
                .split_once(',')
                .ok_or_else(|| parse_err(format!("expected `n,phi`, got `{line}`")))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad step number `{}`", n.trim())))?;
            let phi: f64 = phi
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad phase `{}`", phi.trim())))?;
            if n != phases.len() + 1 {
                return Err(parse_err(format!(
                    "expected step {}, got {n}",
                    phases.len() + 1
                )));
            }
            if !phi.is_finite() {
                return Err(parse_err(format!("phase `{phi}` is not finite")));
            }
            phases.push(phi);
        }
        Ok(Self {
            phases,
            spec,
            seed: 0,
            config_index: 0,
        })
    }
}

impl AsRef<[f64]> for PhaseSchedule {
    fn as_ref(&self) -> &[f64] {
        &self.phases
    }
}

/// Generator for configuration `config_index` of the ensemble seeded by `seed`.
pub fn stream(seed: u64, config_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(config_index);
    rng
}

/// Draws `steps` phases uniformly on the closed interval of `spec`.
pub fn draw_schedule(
    spec: &NoiseSpec,
    steps: usize,
    seed: u64,
    config_index: u64,
) -> Result<PhaseSchedule> {
    spec.validate()?;
    let phases = match spec.kind {
        NoiseKind::None => vec![0.0; steps],
        NoiseKind::Dynamic => {
            if steps == 0 {
                return Err(Error::NoSteps);
            }
            let mut rng = stream(seed, config_index);
            let mut phases: Vec<f64> = (0..steps)
                .map(|_| {
                    if spec.p_min == spec.p_max {
                        spec.p_min
                    } else {
                        rng.random_range(spec.p_min..=spec.p_max)
                    }
                })
                .collect();
            if spec.sorted {
                sort_ascending(&mut phases);
            }
            phases
        }
    };
    Ok(PhaseSchedule {
        phases,
        spec: *spec,
        seed,
        config_index,
    })
}

pub(crate) fn sort_ascending(phases: &mut [f64]) {
    phases.sort_by(|a, b| a.total_cmp(b));
}

/// Phase vectors used on the 20-mode processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fixture {
    SortedWeak,
    SortedStrong,
    UnsortedStrong,
}

impl Fixture {
    pub const ALL: [Fixture; 3] = [
        Fixture::SortedWeak,
        Fixture::SortedStrong,
        Fixture::UnsortedStrong,
    ];

    fn text(self) -> &'static str {
        match self {
            Fixture::SortedWeak => include_str!("../fixtures/sorted_weak.txt"),
            Fixture::SortedStrong => include_str!("../fixtures/sorted_strong.txt"),
            Fixture::UnsortedStrong => include_str!("../fixtures/unsorted_strong.txt"),
        }
    }

    pub fn spec(self) -> NoiseSpec {
        match self {
            Fixture::SortedWeak => NoiseSpec::preset(NoisePreset::Weak, true),
            Fixture::SortedStrong => NoiseSpec::preset(NoisePreset::Strong, true),
            Fixture::UnsortedStrong => NoiseSpec::preset(NoisePreset::Strong, false),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Fixture::SortedWeak => "SortedWeak",
            Fixture::SortedStrong => "SortedStrong",
            Fixture::UnsortedStrong => "UnsortedStrong",
        };
        f.write_str(name)
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// The 20-step schedule bundled for `fixture`.
pub fn load_fixture_schedule(fixture: Fixture) -> PhaseSchedule {
    PhaseSchedule::from_text(fixture.text(), fixture.spec())
        .expect("bundled fixtures are well formed")
}

/// Looks a fixture up by name.
pub fn load_fixture_by_name(name: &str) -> Result<PhaseSchedule> {
    Ok(load_fixture_schedule(name.parse()?))
}
