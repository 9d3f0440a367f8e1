//! Two-dimensional joint spectral intensity over (ω_s, ω_i).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::UniformGrid;
use crate::units::TWO_PI;

use super::spectrum::{PhasematchMode, SfwmModel};
use super::phasematch_from_mismatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum JsiMode {
    /// Incoherent mixture over the pump resonance: each cell carries the
    /// pump weight at (ω_s + ω_i)/2.
    #[default]
    Mixed,
    /// One pump frequency; energy conservation ω_s + ω_i = 2ω_p restricts
    /// the support to cells within half a grid step of the line.
    Pure { omega_pump: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jsi {
    pub signal: UniformGrid,
    pub idler: UniformGrid,
    /// Row-major, one row per signal sample.
    pub values: Vec<f64>,
    pub mode: JsiMode,
    pub warnings: Vec<String>,
}

impl Jsi {
    pub fn get(&self, i_signal: usize, i_idler: usize) -> f64 {
        self.values[i_signal * self.idler.len + i_idler]
    }

    pub fn row(&self, i_signal: usize) -> &[f64] {
        let n = self.idler.len;
        &self.values[i_signal * n..(i_signal + 1) * n]
    }

    /// Marginal over ω_i as a function of ω_s.
    pub fn signal_marginal(&self) -> Vec<f64> {
        (0..self.signal.len)
            .map(|i| self.row(i).iter().sum::<f64>() * self.idler.step)
            .collect()
    }

    /// Marginal over ω_s as a function of ω_i.
    pub fn idler_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.idler.len];
        for i in 0..self.signal.len {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= self.signal.step);
        out
    }

    /// (i_signal, i_idler) of the largest cell.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (best / self.idler.len, best % self.idler.len)
    }
}

/// JSI on absolute signal and idler frequency grids (rad/s).
pub fn jsi_2d(model: &SfwmModel, signal: UniformGrid, idler: UniformGrid, mode: JsiMode) -> Result<Jsi> {
    let disp = model.dispersion();
    let coupling = &model.coupling;
    let line = |omega: f64, q: f64| -> Result<(f64, f64)> {
        let (m, dm, _) = disp.mode_number_derivs(omega)?;
        let c = crate::cavity::WaveCoupling::from_q(coupling.order_from(omega, m, dm), q)?;
        Ok((m, c.intensity(m)))
    };
    let s_lines = signal
        .values()
        .par_iter()
        .map(|&w| line(w, coupling.q_signal))
        .collect::<Result<Vec<_>>>()?;
    let i_lines = idler
        .values()
        .par_iter()
        .map(|&w| line(w, coupling.q_idler))
        .collect::<Result<Vec<_>>>()?;

    let pump = model.pump_coupling();
    let exact = model.phasematching == PhasematchMode::Exact;
    let kerr_cycles = disp.perimeter() * model.kerr / TWO_PI;
    let tol = 0.5 * signal.step.max(idler.step);

    let rows = (0..signal.len)
        .into_par_iter()
        .map(|a| -> Result<Vec<f64>> {
            let ws = signal.at(a);
            let (ms, as_) = s_lines[a];
            let mut row = Vec::with_capacity(idler.len);
            for (b, &(mi, ai)) in i_lines.iter().enumerate() {
                let wi = idler.at(b);
                let wp = match mode {
                    JsiMode::Mixed => 0.5 * (ws + wi),
                    JsiMode::Pure { omega_pump } => {
                        if (ws + wi - 2.0 * omega_pump).abs() > tol {
                            row.push(0.0);
                            continue;
                        }
                        omega_pump
                    }
                };
                let mp = disp.mode_number(wp)?;
                let mut v = pump.intensity(mp) * as_ * ai;
                if exact {
                    let mismatch = 2.0 * mp - ms - mi - kerr_cycles;
                    v *= phasematch_from_mismatch(TWO_PI * mismatch).norm_sqr();
                }
                row.push(v);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let mut warnings = Vec::new();
    if values.iter().all(|v| *v == 0.0) {
        warnings.push("JSI support is empty on this grid".to_string());
    }
    Ok(Jsi {
        signal,
        idler,
        values,
        mode,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::CouplingSpec;
    use crate::resonator::{Polarization, SphereSpec};
    use crate::sfwm::generation_modes;

    fn model() -> SfwmModel {
        let s = SphereSpec::silica(135e-6).unwrap();
        SfwmModel::for_sphere(&s, Polarization::TE, 774, CouplingSpec::shared(1e7), 0.0, TWO_PI * 3e12).unwrap()
    }

    #[test]
    fn peaks_sit_on_generation_modes() {
        let m = model();
        let gm = generation_modes(m.dispersion(), 774, 4, None).unwrap();
        let step = m.omega_p0 / 1e7 / 4.0;
        for p in &gm.pairs[1..] {
            let sg = UniformGrid::centered(p.omega_signal, step, 40).unwrap();
            let ig = UniformGrid::centered(p.omega_idler, step, 40).unwrap();
            let j = jsi_2d(&m, sg, ig, JsiMode::Mixed).unwrap();
            let (a, b) = j.argmax();
            assert!((sg.at(a) - p.omega_signal).abs() <= step);
            assert!((ig.at(b) - p.omega_idler).abs() <= step);
        }
    }

    #[test]
    fn central_cell_exchange_symmetric() {
        let m = model();
        let step = m.omega_p0 / 1e7 / 6.0;
        let g = UniformGrid::centered(m.omega_p0, step, 30).unwrap();
        let j = jsi_2d(&m, g, g, JsiMode::Mixed).unwrap();
        for a in 0..g.len {
            for b in 0..g.len {
                let (x, y) = (j.get(a, b), j.get(b, a));
                assert!((x - y).abs() <= 1e-12 * x.max(y).max(1e-300));
            }
        }
    }

    #[test]
    fn pure_state_lives_on_the_energy_line() {
        let m = model();
        let step = m.omega_p0 / 1e7 / 6.0;
        let g = UniformGrid::centered(m.omega_p0, step, 20).unwrap();
        let j = jsi_2d(&m, g, g, JsiMode::Pure { omega_pump: m.omega_p0 }).unwrap();
        for a in 0..g.len {
            for b in 0..g.len {
                if j.get(a, b) > 0.0 {
                    assert!((g.at(a) + g.at(b) - 2.0 * m.omega_p0).abs() <= 0.5 * step * (1.0 + 1e-9));
                }
            }
        }
        let total: f64 = j.signal_marginal().iter().sum::<f64>() * g.step;
        let total2: f64 = j.idler_marginal().iter().sum::<f64>() * g.step;
        assert!((total - total2).abs() < 1e-12 * total && total > 0.0);
    }

    #[test]
    fn empty_support_warns() {
        let m = model();
        let step = m.omega_p0 / 1e7 / 6.0;
        let g = UniformGrid::centered(m.omega_p0, step, 4).unwrap();
        let far = UniformGrid::centered(m.omega_p0 + 1e12, step, 4).unwrap();
        let j = jsi_2d(&m, g, far, JsiMode::Pure { omega_pump: m.omega_p0 }).unwrap();
        assert_eq!(j.warnings.len(), 1);
    }
}
