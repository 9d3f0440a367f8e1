//! Least-squares fit of an Airy lineshape to a transmission dip.

use std::f64::consts::PI;
use std::path::Path;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DVector, Dyn, Matrix, Matrix4, Vector4, U4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::numeric::peaks::fwhm_around;
use crate::numeric::stats::{median, robust_sigma};

/// A laser scan across one resonance: frequency offset (Hz) and
/// transmittance normalized to the off-resonance level.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionScan {
    pub freq_offset_hz: Vec<f64>,
    pub transmittance: Vec<f64>,
}

impl TransmissionScan {
    pub fn new(freq_offset_hz: Vec<f64>, transmittance: Vec<f64>) -> Result<Self> {
        if freq_offset_hz.len() != transmittance.len() {
            return Err(Error::invalid("scan columns differ in length"));
        }
        if freq_offset_hz.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("scan frequencies must be strictly increasing"));
        }
        if transmittance.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite transmittance sample"));
        }
        Ok(Self {
            freq_offset_hz,
            transmittance,
        })
    }

    /// A dip 1 − depth·L(f) sampled uniformly over ±`half_span_hz`, with
    /// Gaussian noise of standard deviation `noise` (absolute) added.
    /// `lineshape` maps frequency offset to a unit-peak profile.
    pub fn synthetic<F: Fn(f64) -> f64>(
        lineshape: F,
        depth: f64,
        half_span_hz: f64,
        samples: usize,
        noise: f64,
        seed: u64,
    ) -> Result<Self> {
        if samples < 3 {
            return Err(Error::invalid("synthetic scan needs at least 3 samples"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise.max(0.0)).map_err(|e| Error::invalid(e.to_string()))?;
        let step = 2.0 * half_span_hz / (samples - 1) as f64;
        let f: Vec<f64> = (0..samples).map(|i| -half_span_hz + i as f64 * step).collect();
        let t = f
            .iter()
            .map(|&x| 1.0 - depth * lineshape(x) + normal.sample(&mut rng))
            .collect();
        Self::new(f, t)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::parse(path, e.to_string()))?;
        let (mut f, mut t) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::parse(path, "expected two columns"));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(path, format!("{s:?}: {e}")));
            f.push(parse(&rec[0])?);
            t.push(parse(&rec[1])?);
        }
        Self::new(f, t).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("freq_offset_Hz,transmittance_normalized\n");
        for (f, t) in self.freq_offset_hz.iter().zip(&self.transmittance) {
            s.push_str(&format!("{f:.16e},{t:.16e}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Free spectral range of the scanned resonance (Hz). `None` fits the
    /// single-peak (Lorentzian) limit of the Airy function.
    pub fsr_hz: Option<f64>,
    pub max_evaluations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            fsr_hz: None,
            max_evaluations: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryFit {
    pub center_hz: f64,
    pub center_sigma_hz: f64,
    pub fwhm_hz: f64,
    pub fwhm_sigma_hz: f64,
    /// Peak transmittance reduction.
    pub depth: f64,
    pub offset: f64,
    /// Root-mean-square fit residual.
    pub residual_rms: f64,
    pub baseline: f64,
}

/// Unit-peak Airy intensity profile of FWHM `w` (Hz), period `fsr` (Hz).
pub fn airy_profile(df: f64, w: f64, fsr: Option<f64>) -> f64 {
    match fsr {
        None => 1.0 / (1.0 + (2.0 * df / w).powi(2)),
        Some(fsr) => {
            let s = (0.5 * PI * w / fsr).sin();
            let rho = (-s + (s * s + 1.0).sqrt()).powi(2);
            let a = (1.0 - rho).powi(2);
            let sn = (PI * df / fsr).sin();
            a / (a + 4.0 * rho * sn * sn)
        }
    }
}

struct DipProblem<'a> {
    f: &'a [f64],
    y: &'a [f64],
    fsr: Option<f64>,
    p: Vector4<f64>,
}

impl DipProblem<'_> {
    fn model(&self, p: &Vector4<f64>, x: f64) -> f64 {
        p[3] + p[2] * airy_profile(x - p[0], p[1].abs(), self.fsr)
    }
}

impl LeastSquaresProblem<f64, Dyn, U4> for DipProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U4>;
    type ParameterStorage = Owned<f64, U4>;

    fn set_params(&mut self, x: &Vector4<f64>) {
        self.p = *x;
    }

    fn params(&self) -> Vector4<f64> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(DVector::from_iterator(
            self.f.len(),
            self.f.iter().zip(self.y).map(|(&x, &y)| self.model(&self.p, x) - y),
        ))
    }

    fn jacobian(&self) -> Option<Matrix<f64, Dyn, U4, Owned<f64, Dyn, U4>>> {
        let w = self.p[1].abs();
        let steps = [1e-6 * w, 1e-6 * w, 1e-6 * self.p[2].abs().max(1e-12), 1e-6 * self.p[2].abs().max(1e-12)];
        let mut j = Matrix::<f64, Dyn, U4, Owned<f64, Dyn, U4>>::zeros(self.f.len());
        for (c, h) in steps.iter().enumerate() {
            let mut hi = self.p;
            let mut lo = self.p;
            hi[c] += h;
            lo[c] -= h;
            for (r, &x) in self.f.iter().enumerate() {
                j[(r, c)] = (self.model(&hi, x) - self.model(&lo, x)) / (2.0 * h);
            }
        }
        Some(j)
    }
}

/// Fits the transmittance reduction (baseline − T) of a scan with a single
/// Airy peak. The baseline is the median of the top decile of samples.
pub fn fit_airy(scan: &TransmissionScan, opts: FitOptions) -> Result<AiryFit> {
    let n = scan.transmittance.len();
    if n < 20 {
        return Err(Error::precondition(format!("scan has {n} samples, need at least 20")));
    }
    let mut sorted = scan.transmittance.clone();
    sorted.sort_by(f64::total_cmp);
    let top = &sorted[n - n.div_ceil(10)..];
    let baseline = median(top).ok_or_else(|| Error::invalid("empty scan"))?;
    let reduction: Vec<f64> = scan.transmittance.iter().map(|t| baseline - t).collect();

    // noise floor: largest excursion expected from n Gaussian samples
    let level = median(&reduction).unwrap_or(0.0);
    let noise = robust_sigma(&reduction).unwrap_or(0.0) * (2.0 * (n as f64).ln()).sqrt();
    let (ipk, &peak) = reduction
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(peak - level > 3.0 * noise) || peak <= 0.0 {
        return Err(Error::NoRoot(format!(
            "no dip found: max reduction {peak:e} below 3× noise floor {noise:e}"
        )));
    }
    let f = &scan.freq_offset_hz;
    let width0 = fwhm_around(f, &reduction, ipk, 0.5 * peak)
        .unwrap_or_else(|| 0.1 * (f[n - 1] - f[0]));
    let across = f.iter().filter(|&&x| (x - f[ipk]).abs() <= width0).count();
    if across < 20 {
        return Err(Error::precondition(format!(
            "only {across} samples across the dip, need at least 20"
        )));
    }

    let problem = DipProblem {
        f,
        y: &reduction,
        fsr: opts.fsr_hz,
        p: Vector4::new(f[ipk], width0, peak, 0.0),
    };
    let (solved, report) = LevenbergMarquardt::new()
        .with_patience(opts.max_evaluations / 5 + 1)
        .minimize(problem);
    if !report.termination.was_successful() {
        return Err(Error::NoConvergence(format!("Airy fit: {:?}", report.termination)));
    }
    let p = solved.p;
    let res = solved.residuals().expect("residuals");
    let ssr = res.norm_squared();
    let dof = (n as f64 - 4.0).max(1.0);
    let jac = solved.jacobian().expect("jacobian");
    let jtj: Matrix4<f64> = jac.transpose() * &jac;
    let cov = jtj
        .try_inverse()
        .map(|m| m * (ssr / dof))
        .unwrap_or_else(|| Matrix4::from_element(f64::NAN));
    Ok(AiryFit {
        center_hz: p[0],
        center_sigma_hz: cov[(0, 0)].sqrt(),
        fwhm_hz: p[1].abs(),
        fwhm_sigma_hz: cov[(1, 1)].sqrt(),
        depth: p[2],
        offset: p[3],
        residual_rms: (ssr / n as f64).sqrt(),
        baseline,
    })
}
