//! Augmented complex steerable pyramid.
//!
//! The decomposition is built entirely in the Fourier domain. Radial
//! windows are raised-cosine transitions on log2 frequency arranged as an
//! exact partition of unity; angular windows are cos^(K-1) lobes restricted
//! to a half-plane and doubled, which makes each oriented band an analytic
//! (quadrature-pair) signal. Each level is extracted at the current
//! resolution and the lowpass is then cropped to half size in frequency,
//! so scale s is stored subsampled by 2^s.
//!
//! With K orientations and angular normalization
//! kappa = 2^(K-1) / sqrt(K * C(2K-2, K-1)), the real parts of the oriented
//! bands plus the two residuals form a tight frame: the squared frequency
//! responses sum to one everywhere, and [`reconstruct`] inverts the
//! transform to floating-point accuracy.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, crop_spectrum, fft2, ifft2, pad_spectrum};
use crate::plane::{ComplexPlane, Plane};

/// Pyramid shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyramidConfig {
    /// Number of bandpass scales.
    pub scales: usize,
    /// Number of orientation bands per scale.
    pub orientations: usize,
    /// End-stopping translation distance, in samples at band resolution.
    pub end_stop_shift: f64,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        PyramidConfig {
            scales: 6,
            orientations: 6,
            end_stop_shift: 1.0,
        }
    }
}

impl PyramidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scales < 3 {
            return Err(Error::InvalidConfig(format!(
                "scales must be >= 3, got {}",
                self.scales
            )));
        }
        if self.orientations < 2 {
            return Err(Error::InvalidConfig(format!(
                "orientations must be >= 2, got {}",
                self.orientations
            )));
        }
        if self.end_stop_shift < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "end_stop_shift must be >= 1 sample, got {}",
                self.end_stop_shift
            )));
        }
        Ok(())
    }

    /// Frequency-domain orientation angle of band `o`.
    pub fn orientation_angle(&self, o: usize) -> f64 {
        std::f64::consts::PI * o as f64 / self.orientations as f64
    }

    /// Angular window amplitude: kappa^2 * sum_o cos^(2K-2) = 1.
    pub(crate) fn angular_constant(&self) -> f64 {
        let n = self.orientations - 1;
        let mut binom = 1.0f64;
        for i in 0..n {
            binom = binom * (2 * n - i) as f64 / (i + 1) as f64;
        }
        2f64.powi(n as i32) / (self.orientations as f64 * binom).sqrt()
    }
}

/// Rising raised-cosine edge: 0 below x = -1, 1 above x = 0.
#[inline]
fn rise(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 0.0 {
        1.0
    } else {
        (std::f64::consts::FRAC_PI_2 * x).cos()
    }
}

/// Complementary falling edge; rise^2 + fall^2 = 1 everywhere.
#[inline]
fn fall(x: f64) -> f64 {
    if x <= -1.0 {
        1.0
    } else if x >= 0.0 {
        0.0
    } else {
        -(std::f64::consts::FRAC_PI_2 * x).sin()
    }
}

#[inline]
fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w > std::f64::consts::PI {
        w -= two_pi;
    } else if w <= -std::f64::consts::PI {
        w += two_pi;
    }
    w
}

/// Per-level frequency-domain masks at one working resolution.
pub(crate) struct LevelMasks {
    pub width: usize,
    pub height: usize,
    /// Falling lowpass edge applied before decimation.
    pub lo: Plane,
    /// Analytic oriented band masks (himask times single-sided angular lobe).
    pub band: Vec<Plane>,
}

/// Precomputed masks for building pyramids of one image size; reusable
/// across channels and synthesis iterations.
pub struct PyramidPlan {
    pub cfg: PyramidConfig,
    pub width: usize,
    pub height: usize,
    pub(crate) lo0: Plane,
    pub(crate) hi0: Plane,
    pub(crate) levels: Vec<LevelMasks>,
}

/// log2(|omega| / pi) at one frequency bin; -inf at DC.
#[inline]
fn rho_at(x: usize, y: usize, w: usize, h: usize) -> f64 {
    let ox = fft::omega(x, w);
    let oy = fft::omega(y, h);
    let r = ox.hypot(oy);
    (r / std::f64::consts::PI).log2()
}

#[inline]
fn theta_at(x: usize, y: usize, w: usize, h: usize) -> f64 {
    let ox = fft::omega(x, w);
    let oy = fft::omega(y, h);
    oy.atan2(ox)
}

impl PyramidPlan {
    pub fn new(width: usize, height: usize, cfg: PyramidConfig) -> Result<Self> {
        cfg.validate()?;
        let min_dim = 1usize << cfg.scales;
        if width.min(height) < min_dim {
            return Err(Error::ImageTooSmall {
                width,
                height,
                scales: cfg.scales,
                min: min_dim,
            });
        }
        let lo0 = Plane::from_fn(width, height, |x, y| fall(rho_at(x, y, width, height)));
        let hi0 = Plane::from_fn(width, height, |x, y| rise(rho_at(x, y, width, height)));

        let kappa = cfg.angular_constant();
        let n = cfg.orientations - 1;
        let mut levels = Vec::with_capacity(cfg.scales);
        let (mut w, mut h) = (width, height);
        for _ in 0..cfg.scales {
            let lo = Plane::from_fn(w, h, |x, y| fall(rho_at(x, y, w, h) + 1.0));
            let band = (0..cfg.orientations)
                .map(|o| {
                    let theta_o = cfg.orientation_angle(o);
                    Plane::from_fn(w, h, |x, y| {
                        let hi = rise(rho_at(x, y, w, h) + 1.0);
                        if hi == 0.0 {
                            return 0.0;
                        }
                        let d = wrap_angle(theta_at(x, y, w, h) - theta_o);
                        if d.abs() < std::f64::consts::FRAC_PI_2 {
                            hi * 2.0 * kappa * d.cos().powi(n as i32)
                        } else {
                            0.0
                        }
                    })
                })
                .collect();
            levels.push(LevelMasks {
                width: w,
                height: h,
                lo,
                band,
            });
            w = w.div_ceil(2);
            h = h.div_ceil(2);
        }
        Ok(PyramidPlan {
            cfg,
            width,
            height,
            lo0,
            hi0,
            levels,
        })
    }

    /// Hermitian-part band mask (real-filter response magnitude with sign
    /// folded in): himask * kappa * |cos(theta - theta_o)|^(K-1). Used by
    /// reconstruction and the tight-frame checks.
    pub(crate) fn hermitian_band_mask(&self, level: usize, o: usize) -> Plane {
        let lm = &self.levels[level];
        let (w, h) = (lm.width, lm.height);
        let kappa = self.cfg.angular_constant();
        let n = self.cfg.orientations - 1;
        let theta_o = self.cfg.orientation_angle(o);
        Plane::from_fn(w, h, |x, y| {
            let hi = rise(rho_at(x, y, w, h) + 1.0);
            if hi == 0.0 {
                return 0.0;
            }
            let d = wrap_angle(theta_at(x, y, w, h) - theta_o);
            hi * kappa * d.cos().abs().powi(n as i32)
        })
    }

    /// Decompose one plane. The input must match the plan dimensions.
    pub fn build(&self, plane: &Plane) -> SteerablePyramid {
        assert_eq!(plane.width, self.width);
        assert_eq!(plane.height, self.height);
        let spectrum = fft2(plane);
        let highpass = {
            let mut hp = spectrum.clone();
            apply_mask(&mut hp, &self.hi0);
            ifft2(&hp).real()
        };
        let mut working = spectrum;
        apply_mask(&mut working, &self.lo0);

        let mut bands: Vec<Vec<ComplexPlane>> = Vec::with_capacity(self.cfg.scales);
        for lm in &self.levels {
            let level_bands: Vec<ComplexPlane> = lm
                .band
                .par_iter()
                .map(|mask| {
                    let mut spec = working.clone();
                    apply_mask(&mut spec, mask);
                    ifft2(&spec)
                })
                .collect();
            bands.push(level_bands);
            apply_mask(&mut working, &lm.lo);
            let w2 = lm.width.div_ceil(2);
            let h2 = lm.height.div_ceil(2);
            let factor = (w2 * h2) as f64 / (lm.width * lm.height) as f64;
            working = crop_spectrum(&working, w2, h2, factor);
        }
        let lowpass = ifft2(&working).real();
        let magnitude = bands
            .iter()
            .map(|level| level.iter().map(|b| b.magnitude()).collect())
            .collect();
        SteerablePyramid {
            cfg: self.cfg,
            width: self.width,
            height: self.height,
            bands,
            magnitude,
            highpass,
            lowpass,
        }
    }
}

fn apply_mask(spec: &mut ComplexPlane, mask: &Plane) {
    for (v, m) in spec.data.iter_mut().zip(&mask.data) {
        *v *= *m;
    }
}

/// Oriented complex band images plus residuals for one channel.
pub struct SteerablePyramid {
    pub cfg: PyramidConfig,
    pub width: usize,
    pub height: usize,
    /// bands[s][o], scale s stored at ceil(W/2^s) x ceil(H/2^s).
    pub bands: Vec<Vec<ComplexPlane>>,
    /// Pointwise |bands[s][o]|.
    pub magnitude: Vec<Vec<Plane>>,
    pub highpass: Plane,
    pub lowpass: Plane,
}

impl SteerablePyramid {
    pub fn band_dims(&self, scale: usize) -> (usize, usize) {
        let b = &self.bands[scale][0];
        (b.width, b.height)
    }

    /// Phase-doubled copy of band (s, o); same magnitude, doubled phase.
    /// Derived on demand rather than stored.
    pub fn phase_doubled(&self, scale: usize, orientation: usize) -> ComplexPlane {
        phase_double(&self.bands[scale][orientation])
    }
}

/// Square the phase while keeping the magnitude: z^2 / |z|, with 0 mapped
/// to 0.
pub fn phase_double(band: &ComplexPlane) -> ComplexPlane {
    ComplexPlane {
        width: band.width,
        height: band.height,
        data: band
            .data
            .iter()
            .map(|z| {
                let m = z.norm();
                if m > 0.0 {
                    z * z / m
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect(),
    }
}

/// Invert the decomposition from the real parts of the oriented bands plus
/// the two residuals.
pub fn reconstruct(pyr: &SteerablePyramid) -> Plane {
    let plan = PyramidPlan::new(pyr.width, pyr.height, pyr.cfg)
        .expect("pyramid carries dimensions it was built with");
    // Start from the lowpass spectrum and fold levels back in, coarse to fine.
    let mut acc = fft2(&pyr.lowpass);
    for (s, lm) in plan.levels.iter().enumerate().rev() {
        let w2 = lm.width.div_ceil(2);
        let h2 = lm.height.div_ceil(2);
        let factor = (lm.width * lm.height) as f64 / (w2 * h2) as f64;
        let mut level_acc = pad_spectrum(&acc, lm.width, lm.height, factor);
        apply_mask(&mut level_acc, &lm.lo);
        let contribs: Vec<ComplexPlane> = (0..pyr.cfg.orientations)
            .into_par_iter()
            .map(|o| {
                let mask = plan.hermitian_band_mask(s, o);
                let mut spec = fft2(&pyr.bands[s][o].real());
                apply_mask(&mut spec, &mask);
                spec
            })
            .collect();
        for c in contribs {
            for (a, b) in level_acc.data.iter_mut().zip(&c.data) {
                *a += b;
            }
        }
        acc = level_acc;
    }
    apply_mask(&mut acc, &plan.lo0);
    let mut hp = fft2(&pyr.highpass);
    apply_mask(&mut hp, &plan.hi0);
    for (a, b) in acc.data.iter_mut().zip(&hp.data) {
        *a += b;
    }
    ifft2(&acc).real()
}

/// Convenience wrapper: plan and build in one call.
pub fn build_pyramid(plane: &Plane, cfg: PyramidConfig) -> Result<SteerablePyramid> {
    Ok(PyramidPlan::new(plane.width, plane.height, cfg)?.build(plane))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> PyramidConfig {
        PyramidConfig {
            scales: 3,
            orientations: 4,
            end_stop_shift: 1.0,
        }
    }

    #[test]
    fn constant_plane_has_silent_bands() {
        let c = 0.7;
        let plane = Plane::filled(32, 32, c);
        let pyr = build_pyramid(&plane, small_cfg()).unwrap();
        for level in &pyr.magnitude {
            for mag in level {
                assert!(mag.max_abs() <= 1e-9 * c.abs());
            }
        }
        for v in &pyr.lowpass.data {
            assert!((v - c).abs() < 1e-9);
        }
        assert!(pyr.highpass.max_abs() < 1e-9);
    }

    #[test]
    fn band_dims_follow_ceil_halving() {
        let plane = Plane::zeros(48, 40);
        let pyr = build_pyramid(&plane, small_cfg()).unwrap();
        assert_eq!(pyr.band_dims(0), (48, 40));
        assert_eq!(pyr.band_dims(1), (24, 20));
        assert_eq!(pyr.band_dims(2), (12, 10));
        assert_eq!(pyr.lowpass.width, 6);
        assert_eq!(pyr.lowpass.height, 5);
    }

    #[test]
    fn too_small_image_is_rejected() {
        let plane = Plane::zeros(7, 64);
        assert!(matches!(
            build_pyramid(&plane, small_cfg()),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn magnitude_matches_band_modulus() {
        let plane = Plane::from_fn(32, 32, |x, y| ((x * 13 + y * 7) % 11) as f64 / 11.0);
        let pyr = build_pyramid(&plane, small_cfg()).unwrap();
        for (level, mags) in pyr.bands.iter().zip(&pyr.magnitude) {
            for (band, mag) in level.iter().zip(mags) {
                for (z, m) in band.data.iter().zip(&mag.data) {
                    assert!((z.norm() - m).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn phase_double_definition() {
        let z = Complex64::from_polar(2.0, std::f64::consts::FRAC_PI_4);
        let single = ComplexPlane {
            width: 1,
            height: 1,
            data: vec![z],
        };
        let doubled = phase_double(&single);
        let want = Complex64::from_polar(2.0, std::f64::consts::FRAC_PI_2);
        assert!((doubled.data[0] - want).norm() < 1e-12);

        // Real positive stays put; zero maps to zero.
        let reals = ComplexPlane {
            width: 2,
            height: 1,
            data: vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)],
        };
        let d = phase_double(&reals);
        assert!((d.data[0] - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert_eq!(d.data[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_doubled_keeps_magnitude() {
        let plane = Plane::from_fn(32, 32, |x, y| (x as f64 * 0.4).sin() * (y as f64 * 0.3).cos());
        let pyr = build_pyramid(&plane, small_cfg()).unwrap();
        for s in 0..pyr.cfg.scales {
            for o in 0..pyr.cfg.orientations {
                let pd = pyr.phase_doubled(s, o);
                for (z, m) in pd.data.iter().zip(&pyr.magnitude[s][o].data) {
                    assert!((z.norm() - m).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn reconstruction_is_exact_for_constant() {
        let plane = Plane::filled(32, 32, 0.25);
        let pyr = build_pyramid(&plane, small_cfg()).unwrap();
        let rec = reconstruct(&pyr);
        for (a, b) in plane.data.iter().zip(&rec.data) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn reconstruction_is_linear() {
        let plane = Plane::from_fn(32, 32, |x, y| ((x * 3 + y * 5) % 17) as f64 / 17.0 - 0.3);
        let a = 2.5;
        let scaled = {
            let mut p = plane.clone();
            p.scale_in_place(a);
            p
        };
        let r1 = reconstruct(&build_pyramid(&plane, small_cfg()).unwrap());
        let r2 = reconstruct(&build_pyramid(&scaled, small_cfg()).unwrap());
        for (v1, v2) in r1.data.iter().zip(&r2.data) {
            assert!((a * v1 - v2).abs() < 1e-9);
        }
    }

    #[test]
    fn shift_equivariance_for_aligned_shifts() {
        // Shifts divisible by 2^scales move every stored band by an integer
        // number of samples; circular convolution makes this exact.
        let cfg = small_cfg();
        let plane = Plane::from_fn(32, 32, |x, y| ((x * 7 + y * 3) % 13) as f64 / 13.0);
        let (dx, dy) = (8isize, 16isize);
        let shifted = plane.shifted(dx, dy);
        let p1 = build_pyramid(&plane, cfg).unwrap();
        let p2 = build_pyramid(&shifted, cfg).unwrap();
        for s in 0..cfg.scales {
            let f = 1isize << s;
            for o in 0..cfg.orientations {
                let b1 = p1.bands[s][o].magnitude().shifted(dx / f, dy / f);
                let b2 = p2.bands[s][o].magnitude();
                for (a, b) in b1.data.iter().zip(&b2.data) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn quadrature_pair_relation() {
        // Real and imaginary filter responses agree in magnitude and sit 90
        // degrees apart wherever the band has support.
        let n = 32;
        let mut impulse = Plane::zeros(n, n);
        *impulse.at_mut(n / 2, n / 2) = 1.0;
        let pyr = build_pyramid(&impulse, small_cfg()).unwrap();
        let band = &pyr.bands[1][1];
        let f_re = fft2(&band.real());
        let f_im = fft2(&Plane {
            width: band.width,
            height: band.height,
            data: band.data.iter().map(|z| z.im).collect(),
        });
        let peak = f_re.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (i, (a, b)) in f_re.data.iter().zip(&f_im.data).enumerate() {
            let (x, y) = (i % band.width, i / band.width);
            // Skip DC and Nyquist rows/columns where the analytic split is
            // ambiguous by construction.
            if x == 0 || y == 0 || x == band.width / 2 || y == band.height / 2 {
                continue;
            }
            if a.norm() < 1e-9 * peak && b.norm() < 1e-9 * peak {
                continue;
            }
            assert!(
                (a.norm() - b.norm()).abs() <= 1e-6 * peak,
                "magnitude mismatch at bin {i}"
            );
            // 90 degree relation: the cross product has no real part.
            let cross = a * b.conj();
            assert!(cross.re.abs() <= 1e-6 * peak * peak, "phase at bin {i}");
        }
    }

    #[test]
    fn energy_is_preserved_with_decimation_weights() {
        let plane = Plane::from_fn(64, 64, |x, y| {
            ((x as f64 * 0.31).sin() + (y as f64 * 0.17).cos()) * 0.5
                + ((x * y) % 7) as f64 / 21.0
        });
        let cfg = PyramidConfig::default();
        let pyr = build_pyramid(&plane, cfg).unwrap();
        let e_in: f64 = plane.data.iter().map(|v| v * v).sum();
        let mut e_sum: f64 = pyr.highpass.data.iter().map(|v| v * v).sum();
        for (s, level) in pyr.bands.iter().enumerate() {
            let w = 4f64.powi(s as i32) / 2.0;
            for band in level {
                e_sum += w * band.energy();
            }
        }
        let s_last = cfg.scales as i32;
        e_sum += 4f64.powi(s_last) * pyr.lowpass.data.iter().map(|v| v * v).sum::<f64>();
        assert!(
            (e_in - e_sum).abs() <= 1e-3 * e_in,
            "energy {e_in} vs decomposed {e_sum}"
        );
    }
}
