//! Photon-pair generation by spontaneous four-wave mixing in silica
//! microspheres: whispering-gallery resonances, cavity Airy functions,
//! biphoton joint spectra, the time-of-emission distribution and the
//! analysis pipeline that recovers linewidths and Q factors from measured
//! coincidence data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cavity;
pub mod channels;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod material;
pub mod numeric;
pub mod resonator;
pub mod sfwm;
pub mod special;
pub mod temporal;
pub mod units;

pub use error::{Error, Result};
