//! Calibration constants shipped in `calibration.toml` at the crate root.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub const EMBEDDED: &str = include_str!("../calibration.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskCalibration {
    pub factor_re: f64,
    pub factor_im: f64,
    #[serde(default)]
    pub input: String,
    #[serde(default)]
    pub raw_re: Option<f64>,
    #[serde(default)]
    pub raw_im: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub n_parity: usize,
    pub n_b: usize,
    pub n_f: usize,
    pub re: f64,
    pub im: f64,
    #[serde(default)]
    pub calibration_n: Option<usize>,
    #[serde(default)]
    pub ratio_re: Option<f64>,
    #[serde(default)]
    pub ratio_im: Option<f64>,
    #[serde(default)]
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    pub generated_by: String,
    pub disk: DiskCalibration,
    #[serde(default)]
    pub phase: Vec<PhaseCell>,
}

impl Calibration {
    pub fn parse(text: &str) -> Result<Self> {
        let c: Calibration = toml::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("calibration file: {e}")))?;
        for cell in &c.phase {
            if ((cell.re * cell.re + cell.im * cell.im) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "calibrated phase {:?} is not unimodular",
                    cell
                )));
            }
        }
        Ok(c)
    }

    pub fn disk_measure_factor(&self) -> C64 {
        C64::new(self.disk.factor_re, self.disk.factor_im)
    }

    pub fn phase(&self, n: usize, n_b: usize, n_f: usize) -> Option<C64> {
        self.phase
            .iter()
            .find(|c| c.n_parity == n % 2 && c.n_b == n_b && c.n_f == n_f)
            .map(|c| C64::new(c.re, c.im))
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::from(
            "# Calibration constants. Regenerate with the command in `generated_by`.\n\
             # [disk]: factor multiplying the positive disk density so that the U(1,1)\n\
             # quadrature reproduces the block-determinant closed form at `input`.\n\
             # [[phase]]: fourth root of unity fixing the half-integer sign of the\n\
             # exact-representation constant per (N mod 2, n_B, n_F); `ratio` is\n\
             # Monte Carlo over the unit-phase exact value at N = calibration_n.\n",
        );
        out.push_str(&toml::to_string(self).expect("calibration serialises"));
        out
    }
}

pub fn get() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| Calibration::parse(EMBEDDED).expect("embedded calibration file is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_parses() {
        let c = get();
        assert!((c.disk_measure_factor() - C64::new(0.0, 1.0)).norm() < 1e-6);
        for cell in &c.phase {
            let z = C64::new(cell.re, cell.im);
            assert!((z.powi(4) - 1.0).norm() < 1e-12, "{cell:?}");
        }
    }

    #[test]
    fn round_trip() {
        let c = get();
        assert_eq!(&Calibration::parse(&c.to_toml()).unwrap(), c);
    }
}
