//! JSON system specifications.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "energies": [0.0, 1.0],
//!   "h1": [[[0.0, 0.0], [0.1, 0.0]], [[0.1, 0.0], [0.0, 0.0]]],
//!   "coupling_scale": 1.0
//! }
//! ```

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use perturb::{CMatrix, SystemSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dimension: usize,
    pub energies: Vec<f64>,
    /// Row-major `[re, im]` pairs.
    pub h1: Vec<Vec<[f64; 2]>>,
    #[serde(default = "unit_scale")]
    pub coupling_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl SpecFile {
    pub fn from_spec(spec: &SystemSpec) -> Self {
        let n = spec.dimension();
        Self {
            dimension: n,
            energies: spec.energies.clone(),
            h1: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| [spec.perturbation[(i, j)].re, spec.perturbation[(i, j)].im])
                        .collect()
                })
                .collect(),
            coupling_scale: spec.coupling_scale,
        }
    }

    pub fn to_spec(&self) -> Result<SystemSpec> {
        let n = self.dimension;
        if n == 0 {
            bail!("field `dimension`: must be at least 1");
        }
        if self.energies.len() != n {
            bail!("field `energies`: has {} entries, expected {n}", self.energies.len());
        }
        if self.h1.len() != n {
            bail!("field `h1`: has {} rows, expected {n}", self.h1.len());
        }
        for (i, row) in self.h1.iter().enumerate() {
            if row.len() != n {
                bail!("field `h1[{i}]`: has {} entries, expected {n}", row.len());
            }
        }
        let h = CMatrix::from_fn(n, n, |i, j| Complex64::new(self.h1[i][j][0], self.h1[i][j][1]));
        Ok(SystemSpec::new(self.energies.clone(), h).with_coupling_scale(self.coupling_scale))
    }
}

pub fn parse_spec(text: &str) -> Result<SystemSpec> {
    let file: SpecFile = serde_json::from_str(text).context("invalid system specification")?;
    file.to_spec()
}

pub fn parse_spec_file(path: &Path) -> Result<SystemSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

pub fn spec_to_json(spec: &SystemSpec) -> String {
    let mut s = serde_json::to_string_pretty(&SpecFile::from_spec(spec)).expect("spec serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LEVEL: &str = r#"{
        "dimension": 2,
        "energies": [0.0, 1.0],
        "h1": [[[0.0, 0.0], [0.1, 0.0]], [[0.1, 0.0], [0.0, 0.0]]],
        "coupling_scale": 1.0
    }"#;

    #[test]
    fn minimal_two_level() {
        let spec = parse_spec(TWO_LEVEL).unwrap();
        assert_eq!(spec.dimension(), 2);
        assert_eq!(spec.perturbation[(0, 1)], Complex64::new(0.1, 0.0));
    }

    #[test]
    fn shape_errors_name_the_field() {
        let bad = TWO_LEVEL.replace("[0.0, 1.0]", "[0.0]");
        let err = parse_spec(&bad).unwrap_err().to_string();
        assert!(err.contains("energies"), "{err}");
        let bad = TWO_LEVEL.replace(r#"[[0.1, 0.0], [0.0, 0.0]]"#, r#"[[0.1, 0.0]]"#);
        assert!(parse_spec(&bad).unwrap_err().to_string().contains("h1[1]"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let bad = TWO_LEVEL.replace("\"energies\"", "\"energie\"");
        let err = format!("{:#}", parse_spec(&bad).unwrap_err());
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn round_trip() {
        let spec = parse_spec(TWO_LEVEL).unwrap();
        assert_eq!(parse_spec(&spec_to_json(&spec)).unwrap(), spec);
        for seed in 0..50 {
            let spec = crate::commands::sample(1 + (seed as usize % 8), 0.7, 0.1, seed)
                .unwrap()
                .with_coupling_scale(0.3);
            let text = spec_to_json(&spec);
            let back = parse_spec(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(spec_to_json(&back), text);
        }
    }
}
