use crate::error::{Error, Result};
use crate::resonator::Dispersion;

/// One signal/idler resonance pair (l_p + j, l_p − j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationMode {
    pub j: u32,
    pub l_signal: u32,
    pub l_idler: u32,
    pub omega_signal: f64,
    pub omega_idler: f64,
    /// Ω = (ω_s − ω_i)/2.
    pub omega: f64,
    /// ε = ω_s + ω_i − 2ω_p.
    pub defect: f64,
}

/// Diagonal of the matrix of resonance pairs around a pump mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationModeMatrix {
    pub pump_l: u32,
    pub omega_pump: f64,
    /// Sorted by Ω.
    pub pairs: Vec<GenerationMode>,
}

impl GenerationModeMatrix {
    /// Every `stride`-th pair, starting from j = 0.
    pub fn strided(&self, stride: usize) -> Vec<GenerationMode> {
        self.pairs.iter().step_by(stride.max(1)).copied().collect()
    }

    /// Whether |ε_j| never decreases with j.
    pub fn defect_is_monotone(&self) -> bool {
        self.pairs.windows(2).all(|w| w[1].defect.abs() >= w[0].defect.abs())
    }
}

/// Pairs (l_p + j, l_p − j), j = 0..=n_pairs, with the pump at `omega_pump`
/// (its resonance when `None`).
pub fn generation_modes(
    disp: &dyn Dispersion,
    pump_l: u32,
    n_pairs: u32,
    omega_pump: Option<f64>,
) -> Result<GenerationModeMatrix> {
    if n_pairs < 1 {
        return Err(Error::invalid("need at least one generation-mode pair"));
    }
    if n_pairs >= pump_l {
        return Err(Error::domain("idler order would fall below 1"));
    }
    let wp_res = disp.resonance(pump_l)?;
    let wp = omega_pump.unwrap_or(wp_res);
    let pairs = (0..=n_pairs)
        .map(|j| {
            let ws = if j == 0 { wp_res } else { disp.resonance(pump_l + j)? };
            let wi = if j == 0 { wp_res } else { disp.resonance(pump_l - j)? };
            Ok(GenerationMode {
                j,
                l_signal: pump_l + j,
                l_idler: pump_l - j,
                omega_signal: ws,
                omega_idler: wi,
                omega: 0.5 * (ws - wi),
                // differences first to keep the small defect accurate
                defect: (ws - wp) + (wi - wp),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationModeMatrix {
        pump_l,
        omega_pump: wp,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonator::{LinearDispersion, Polarization, SphereDispersion, SphereSpec};
    use crate::units::TWO_PI;

    fn disp() -> SphereDispersion {
        SphereDispersion::new(SphereSpec::silica(135e-6).unwrap(), Polarization::TE)
    }

    #[test]
    fn central_pair_has_no_defect() {
        let m = generation_modes(&disp(), 774, 10, None).unwrap();
        assert_eq!(m.pairs[0].defect, 0.0);
        assert_eq!(m.pairs[0].omega, 0.0);
        assert!(m.pairs.windows(2).all(|w| w[1].omega > w[0].omega));
    }

    #[test]
    fn defect_grows_quadratically_on_a_concave_locus() {
        let m = generation_modes(&disp(), 774, 40, None).unwrap();
        assert!(m.defect_is_monotone());
        // ε_j ≈ D2·j² with one sign throughout
        let d2 = m.pairs[1].defect;
        assert!(d2.abs() > 0.0);
        for p in &m.pairs[1..] {
            assert_eq!(p.defect.signum(), d2.signum());
            let ratio = p.defect / (d2 * (p.j as f64).powi(2));
            assert!((ratio - 1.0).abs() < 0.05, "j={} ratio={ratio}", p.j);
        }
        assert!((d2 / TWO_PI - 0.6e6).abs() < 0.2e6, "{}", d2 / TWO_PI);
    }

    #[test]
    fn exact_comb_has_zero_defect() {
        let lin = LinearDispersion::tangent_to(&disp(), 774).unwrap();
        let m = generation_modes(&lin, 774, 20, None).unwrap();
        for p in &m.pairs {
            assert!(p.defect.abs() < 1e-6 * lin.fsr, "{}", p.defect);
        }
    }

    #[test]
    fn stride_six_spacing() {
        let m = generation_modes(&disp(), 774, 30, None).unwrap();
        let s = m.strided(6);
        let spacing = (s[1].omega_signal - s[0].omega_signal) / TWO_PI;
        // region spacing of about 1.5 THz along the signal axis
        assert!((spacing / 1.52e12 - 1.0).abs() < 0.05, "{spacing}");
    }
}
