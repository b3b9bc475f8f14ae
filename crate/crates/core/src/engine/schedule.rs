use std::fmt;

use thiserror::Error;

/// Per-round infection thresholds.
///
/// `Relaxed { base: r, rounds: k, slack: t }` is the `Bootk(t)` family: in
/// round `m < k` a healthy vertex joins with at least `r - (k - m)·t`
/// infected neighbours, from round `k` on with at least `r`. `Boot1(t)` is
/// `k = 1` and `Boot3(t)` is `k = 3` (slacks `3t, 2t, t`). Relaxed
/// thresholds are clamped below at 1 (or at `r` when `r = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdSchedule {
    Constant { r: u32 },
    Relaxed { base: u32, rounds: u32, slack: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rule `{spec}`: {reason}")]
pub struct ScheduleParseError {
    pub spec: String,
    pub reason: String,
}

/// `⌈d/2⌉`, the majority threshold of a `d`-regular graph.
pub fn majority_threshold(degree: usize) -> u32 {
    degree.div_ceil(2) as u32
}

impl ThresholdSchedule {
    pub fn constant(r: u32) -> Self {
        Self::Constant { r }
    }

    pub fn bootk(base: u32, rounds: u32, slack: u32) -> Self {
        Self::Relaxed {
            base,
            rounds,
            slack,
        }
    }

    /// Constant majority rule for a graph of the given degree.
    pub fn majority(degree: usize) -> Self {
        Self::constant(majority_threshold(degree))
    }

    pub fn threshold_at(&self, round: usize) -> u32 {
        match *self {
            Self::Constant { r } => r,
            Self::Relaxed {
                base,
                rounds,
                slack,
            } => {
                if round >= rounds as usize {
                    base
                } else {
                    let relax = (rounds as u64 - round as u64) * slack as u64;
                    let t = (base as u64).saturating_sub(relax) as u32;
                    t.max(base.min(1))
                }
            }
        }
    }

    /// Number of leading relaxed rounds (`k`); zero for constant rules.
    pub fn relaxed_rounds(&self) -> usize {
        match *self {
            Self::Constant { .. } => 0,
            Self::Relaxed { rounds, .. } => rounds as usize,
        }
    }

    /// Threshold once all relaxation is over.
    pub fn base(&self) -> u32 {
        match *self {
            Self::Constant { r } => r,
            Self::Relaxed { base, .. } => base,
        }
    }

    /// Parse `majority`, `constant:<r>` or `bootk:<r>,<k>,<t>`; `<r>` may be
    /// the word `majority`, resolved against `degree`.
    pub fn parse(spec: &str, degree: usize) -> Result<Self, ScheduleParseError> {
        let err = |reason: &str| ScheduleParseError {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let threshold = |s: &str| -> Result<u32, ScheduleParseError> {
            match s.trim() {
                "majority" | "maj" => Ok(majority_threshold(degree)),
                other => other
                    .parse()
                    .map_err(|_| err(&format!("`{other}` is not a threshold"))),
            }
        };
        let spec_t = spec.trim();
        if spec_t == "majority" {
            return Ok(Self::majority(degree));
        }
        let (head, rest) = spec_t
            .split_once(':')
            .ok_or_else(|| err("expected majority, constant:<r> or bootk:<r>,<k>,<t>"))?;
        match head {
            "constant" => Ok(Self::constant(threshold(rest)?)),
            "bootk" => {
                let parts: Vec<&str> = rest.split(',').collect();
                let [r, k, t] = parts[..] else {
                    return Err(err("expected bootk:<r>,<k>,<t>"));
                };
                let k = k.trim().parse().map_err(|_| err("bad round count"))?;
                let t = t.trim().parse().map_err(|_| err("bad slack"))?;
                Ok(Self::bootk(threshold(r)?, k, t))
            }
            _ => Err(err("unknown rule family")),
        }
    }
}

impl fmt::Display for ThresholdSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Constant { r } => write!(f, "constant:{r}"),
            Self::Relaxed {
                base,
                rounds,
                slack,
            } => write!(f, "bootk:{base},{rounds},{slack}"),
        }
    }
}
