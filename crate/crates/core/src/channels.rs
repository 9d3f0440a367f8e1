//! DWDM and CWDM filter channel tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT;

const DEFAULT_TABLE: &str = include_str!("../data/channels.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelKind {
    Dwdm,
    Cwdm,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Dwdm => "DWDM",
            ChannelKind::Cwdm => "CWDM",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DWDM" => Ok(ChannelKind::Dwdm),
            "CWDM" => Ok(ChannelKind::Cwdm),
            _ => Err(Error::invalid(format!("unknown channel kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    pub kind: ChannelKind,
    pub index: u32,
    pub center_nm: f64,
    pub fwhm_nm: f64,
    /// Centre computed from the grid rather than taken from a measured filter.
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Measured {
    channel: u32,
    center_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DwdmSection {
    grid_anchor_thz: f64,
    grid_spacing_thz: f64,
    first: u32,
    last: u32,
    fwhm_nm: f64,
    nominal_spacing_nm: f64,
    #[serde(default)]
    measured: Vec<Measured>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CwdmSection {
    first_nm: f64,
    last_nm: f64,
    spacing_nm: f64,
    fwhm_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelTable {
    pub version: u32,
    dwdm: DwdmSection,
    cwdm: CwdmSection,
}

impl ChannelTable {
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_TABLE).expect("bundled channel table parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let t: Self = toml::from_str(text).map_err(|e| Error::parse("<channel table>", e.to_string()))?;
        if t.dwdm.first > t.dwdm.last || !(t.cwdm.spacing_nm > 0.0) || t.cwdm.last_nm < t.cwdm.first_nm {
            return Err(Error::parse("<channel table>", "empty channel range"));
        }
        Ok(t)
    }

    pub fn dwdm_range(&self) -> (u32, u32) {
        (self.dwdm.first, self.dwdm.last)
    }

    pub fn cwdm_count(&self) -> u32 {
        ((self.cwdm.last_nm - self.cwdm.first_nm) / self.cwdm.spacing_nm).round() as u32 + 1
    }

    /// DWDM channel N on its frequency grid, or CWDM channel N counted from 1.
    pub fn lookup(&self, kind: ChannelKind, index: u32) -> Result<Channel> {
        match kind {
            ChannelKind::Dwdm => {
                let d = &self.dwdm;
                if index < d.first || index > d.last {
                    return Err(Error::invalid(format!(
                        "DWDM channel {index} outside {}..={}",
                        d.first, d.last
                    )));
                }
                let (center_nm, extrapolated) = match d.measured.iter().find(|m| m.channel == index) {
                    Some(m) => (m.center_nm, false),
                    None => {
                        let f = (d.grid_anchor_thz + d.grid_spacing_thz * index as f64) * 1e12;
                        (SPEED_OF_LIGHT / f * 1e9, true)
                    }
                };
                Ok(Channel {
                    kind,
                    index,
                    center_nm,
                    fwhm_nm: d.fwhm_nm,
                    extrapolated,
                })
            }
            ChannelKind::Cwdm => {
                if index == 0 || index > self.cwdm_count() {
                    return Err(Error::invalid(format!(
                        "CWDM channel {index} outside 1..={}",
                        self.cwdm_count()
                    )));
                }
                Ok(Channel {
                    kind,
                    index,
                    center_nm: self.cwdm.first_nm + self.cwdm.spacing_nm * (index - 1) as f64,
                    fwhm_nm: self.cwdm.fwhm_nm,
                    extrapolated: false,
                })
            }
        }
    }

    /// Every channel of `kind`, sorted by centre wavelength.
    pub fn channels(&self, kind: ChannelKind) -> Vec<Channel> {
        let mut out: Vec<Channel> = match kind {
            ChannelKind::Dwdm => (self.dwdm.first..=self.dwdm.last)
                .map(|i| self.lookup(kind, i).unwrap())
                .collect(),
            ChannelKind::Cwdm => (1..=self.cwdm_count()).map(|i| self.lookup(kind, i).unwrap()).collect(),
        };
        out.sort_by(|a, b| a.center_nm.total_cmp(&b.center_nm));
        out
    }
}

/// Idler wavelength fixed by ω_s + ω_i = 2ω_p (all in nm).
pub fn idler_wavelength_nm(pump_nm: f64, signal_nm: f64) -> Result<f64> {
    let inv = 2.0 / pump_nm - 1.0 / signal_nm;
    if !(pump_nm > 0.0 && signal_nm > 0.0 && inv > 0.0) {
        return Err(Error::domain("no positive idler frequency for these wavelengths"));
    }
    Ok(1.0 / inv)
}
