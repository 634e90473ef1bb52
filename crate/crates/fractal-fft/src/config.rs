//! JSON system configuration and the plain-text signal format.
//!
//! Signals are one complex sample per line, `re,im`, written back with 17
//! significant digits so files round-trip bit-identically through
//! parse → format.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{FrequencyIfs, SpatialIfs};
use crate::transform::{build_system, FractalSystem, M1Class};

/// On-disk description of a system: dimensions, the integer matrix `A⁻¹`,
/// spatial translations `b`, and (optionally, absent while searching) the
/// frequency translations `c`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub dim: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub a_inverse: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub m1_class: M1Class,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SystemConfig = serde_json::from_str(text)?;
        config.validate_shape()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn validate_shape(&self) -> Result<()> {
        if self.a_inverse.len() != self.dim {
            return Err(Error::Validation(format!(
                "a_inverse has {} rows, expected dim = {}",
                self.a_inverse.len(),
                self.dim
            )));
        }
        if self.b.len() != self.k {
            return Err(Error::Validation(format!(
                "b has {} vectors, expected K = {}",
                self.b.len(),
                self.k
            )));
        }
        if let Some(c) = &self.c {
            if c.len() != self.k {
                return Err(Error::Validation(format!(
                    "c has {} vectors, expected K = {}",
                    c.len(),
                    self.k
                )));
            }
        }
        Ok(())
    }

    pub fn spatial(&self) -> Result<SpatialIfs> {
        SpatialIfs::new(&self.a_inverse, &self.b)
    }

    /// Builds and validates the full system; requires `c` to be present.
    pub fn to_system(&self) -> Result<FractalSystem> {
        let spatial = self.spatial()?;
        let c = self.c.as_ref().ok_or_else(|| {
            Error::Validation("config has no frequency translations c; run a search first".into())
        })?;
        let frequency = FrequencyIfs::dual_to(&spatial, c)?;
        build_system(spatial, frequency, self.m1_class)
    }
}

/// Parses a `re,im`-per-line signal file.
pub fn parse_signal(text: &str) -> Result<Vec<Complex64>> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (re, im) = line.split_once(',').ok_or_else(|| {
            Error::Validation(format!("signal line {}: expected \"re,im\"", lineno + 1))
        })?;
        let re: f64 = re.trim().parse().map_err(|e| {
            Error::Validation(format!("signal line {}: bad real part: {e}", lineno + 1))
        })?;
        let im: f64 = im.trim().parse().map_err(|e| {
            Error::Validation(format!(
                "signal line {}: bad imaginary part: {e}",
                lineno + 1
            ))
        })?;
        samples.push(Complex64::new(re, im));
    }
    Ok(samples)
}

pub fn read_signal(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_signal(&text)
}

pub fn format_signal(samples: &[Complex64]) -> String {
    let mut out = String::with_capacity(samples.len() * 48);
    for z in samples {
        out.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
    }
    out
}

pub fn write_signal(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| Error::Validation(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(format_signal(samples).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic_json() -> &'static str {
        r#"{
            "dim": 1,
            "K": 2,
            "a_inverse": [[2]],
            "b": [[0], [1]],
            "c": [[0], [1]],
            "m1_class": "hadamard"
        }"#
    }

    #[test]
    fn config_round_trip() {
        let config = SystemConfig::from_json(dyadic_json()).unwrap();
        assert_eq!(config.k, 2);
        assert_eq!(config.m1_class, M1Class::Hadamard);
        let again = SystemConfig::from_json(&config.to_json_pretty()).unwrap();
        assert_eq!(config, again);
        let sys = config.to_system().unwrap();
        assert_eq!(sys.branch_count(), 2);
    }

    #[test]
    fn config_without_c_builds_spatial_only() {
        let json = r#"{"dim": 1, "K": 2, "a_inverse": [[3]], "b": [[0], [2]]}"#;
        let config = SystemConfig::from_json(json).unwrap();
        assert!(config.spatial().is_ok());
        assert!(matches!(config.to_system(), Err(Error::Validation(_))));
    }

    #[test]
    fn config_errors_are_line_precise() {
        let bad = "{\n  \"dim\": 1,\n  \"K\": oops\n}";
        let err = SystemConfig::from_json(bad).unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn config_shape_errors() {
        let json = r#"{"dim": 2, "K": 2, "a_inverse": [[2]], "b": [[0], [1]]}"#;
        assert!(SystemConfig::from_json(json).is_err());
        let json = r#"{"dim": 1, "K": 3, "a_inverse": [[2]], "b": [[0], [1]]}"#;
        assert!(SystemConfig::from_json(json).is_err());
        let json = r#"{"dim": 1, "K": 2, "a_inverse": [[2]], "b": [[0], [1]], "extra": 1}"#;
        assert!(SystemConfig::from_json(json).is_err());
    }

    #[test]
    fn signal_round_trip_is_bit_identical() {
        let samples = vec![
            Complex64::new(1.0 / 3.0, -2.0 / 7.0),
            Complex64::new(0.0, f64::MIN_POSITIVE),
            Complex64::new(-1e300, 0.12345678901234568),
        ];
        let text = format_signal(&samples);
        let parsed = parse_signal(&text).unwrap();
        assert_eq!(samples.len(), parsed.len());
        for (a, b) in samples.iter().zip(&parsed) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // Formatting the parsed samples reproduces the file byte for byte.
        assert_eq!(text, format_signal(&parsed));
    }

    #[test]
    fn signal_parse_errors() {
        assert!(parse_signal("1.0").is_err());
        assert!(parse_signal("a,b").is_err());
        let err = parse_signal("1.0,2.0\nbad line").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
