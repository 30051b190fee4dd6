//! Coefficient tables of inner splittings of `e^{T+W}`.

use alloc::{format, string::{String, ToString}, vec::Vec};

use crate::error::{Error, Result};

/// One exponential of an inner splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stage {
    /// `e^{aT}`.
    Kinetic(f64),
    /// `e^{bW}`.
    Potential(f64),
    /// `e^{bW + cU}` with the gradient term `U = −[[T,W],W]`.
    Compact { potential: f64, gradient: f64 },
}

impl Stage {
    /// Parses `"T a"`, `"W b"` or `"WU b c"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let kind = words.next().unwrap_or("");
        let numbers: Vec<f64> = words
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("stage '{text}': '{w}' is not a number")))
            })
            .collect::<Result<_>>()?;
        match (kind, numbers.as_slice()) {
            ("T", [a]) => Ok(Stage::Kinetic(*a)),
            ("W", [b]) => Ok(Stage::Potential(*b)),
            ("WU", [b, c]) => Ok(Stage::Compact {
                potential: *b,
                gradient: *c,
            }),
            _ => Err(Error::Parameter(format!(
                "stage '{text}' is not of the form 'T a', 'W b' or 'WU b c'"
            ))),
        }
    }
}

/// An ordered composition of kinetic and potential exponentials.
///
/// Stages are listed in the order they act on the state.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitScheme {
    pub name: String,
    pub stages: Vec<Stage>,
    pub order: u32,
    pub symmetric: bool,
}

const SUM_TOLERANCE: f64 = 1e-13;

impl SplitScheme {
    /// Validates consistency (`Σa = Σb = 1`) and detects palindromic tables.
    pub fn new(name: impl Into<String>, stages: Vec<Stage>, order: u32) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidTable {
            name: name.clone(),
            reason,
        };
        if stages.is_empty() {
            return Err(invalid("no stages".into()));
        }
        let (mut ta, mut wb) = (0.0, 0.0);
        for s in &stages {
            match *s {
                Stage::Kinetic(a) => ta += a,
                Stage::Potential(b) | Stage::Compact { potential: b, .. } => wb += b,
            }
        }
        if (ta - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("kinetic coefficients sum to {ta}, not 1")));
        }
        if (wb - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("potential coefficients sum to {wb}, not 1")));
        }
        let symmetric = stages.iter().eq(stages.iter().rev());
        Ok(Self {
            name,
            stages,
            order,
            symmetric,
        })
    }

    /// Parses a table from stage strings such as `["T 0.5", "W 1", "T 0.5"]`.
    pub fn parse(name: impl Into<String>, stages: &[impl AsRef<str>], order: u32) -> Result<Self> {
        let stages = stages.iter().map(|s| Stage::parse(s.as_ref())).collect::<Result<_>>()?;
        Self::new(name, stages, order)
    }

    /// Builds a palindrome `s₁ … s_{n−1} s_n s_{n−1} … s₁` from its first half
    /// and centre stage.
    pub fn palindrome(name: impl Into<String>, half: &[Stage], order: u32) -> Result<Self> {
        let mut stages = half.to_vec();
        stages.extend(half.iter().rev().skip(1));
        Self::new(name, stages, order)
    }

    /// 15-stage sixth-order classical splitting.
    #[allow(clippy::excessive_precision)] // published digits, kept verbatim
    pub fn omf85() -> Self {
        let a = [
            -1.0130879789171747,
            1.1874295737325427,
            -0.018335852096460590,
            0.3439942572810926,
        ];
        let b = [
            0.00016600692650009894,
            -0.3796242142637736,
            0.6891374118518106,
            0.3806415909709257,
        ];
        let half = [
            Stage::Kinetic(a[0]),
            Stage::Potential(b[0]),
            Stage::Kinetic(a[1]),
            Stage::Potential(b[1]),
            Stage::Kinetic(a[2]),
            Stage::Potential(b[2]),
            Stage::Kinetic(a[3]),
            Stage::Potential(b[3]),
        ];
        Self::palindrome("OMF85", &half, 6).expect("shipped table is consistent")
    }

    /// 11-stage sixth-order compact splitting.
    pub fn omf76() -> Self {
        let (a1, a2) = (0.1097059723948682, 0.4140632267310831);
        let (b1, b2) = (0.2693315848935301, 1.1319803486515564);
        let (c1, c2) = (0.0008642161339706166, -0.01324638643416052);
        let a3 = 0.5 - (a1 + a2);
        let b3 = 1.0 - 2.0 * (b1 + b2);
        let wu = |potential, gradient| Stage::Compact { potential, gradient };
        // The gradient terms sit on the outermost and the central potential
        // stages. Attaching `c₂` to the `b₂` stage instead leaves a second-order
        // method, which the oscillator tests detect.
        let half = [
            Stage::Kinetic(a1),
            wu(b1, c1),
            Stage::Kinetic(a2),
            Stage::Potential(b2),
            Stage::Kinetic(a3),
            wu(b3, c2),
        ];
        Self::palindrome("OMF76", &half, 6).expect("shipped table is consistent")
    }

    /// Strang splitting `e^{T/2} e^{W} e^{T/2}`.
    pub fn strang() -> Self {
        Self::new("Strang", [Stage::Kinetic(0.5), Stage::Potential(1.0), Stage::Kinetic(0.5)].to_vec(), 2)
            .expect("shipped table is consistent")
    }

    /// Looks up a shipped table by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "OMF85" => Ok(Self::omf85()),
            "OMF76" => Ok(Self::omf76()),
            "STRANG" => Ok(Self::strang()),
            _ => Err(Error::MissingTable(name.to_string())),
        }
    }

    pub fn is_compact(&self) -> bool {
        self.stages.iter().any(|s| matches!(s, Stage::Compact { .. }))
    }

    pub fn kinetic_stages(&self) -> usize {
        self.stages.iter().filter(|s| matches!(s, Stage::Kinetic(_))).count()
    }

    pub fn potential_stages(&self) -> usize {
        self.stages.len() - self.kinetic_stages()
    }

    pub fn starts_with_kinetic(&self) -> bool {
        matches!(self.stages.first(), Some(Stage::Kinetic(_)))
    }

    pub fn ends_with_kinetic(&self) -> bool {
        matches!(self.stages.last(), Some(Stage::Kinetic(_)))
    }
}
