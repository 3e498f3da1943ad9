//! Pooling of statistic images over overlapping circular regions.
//!
//! Uniform pooling convolves each statistic image with a radially symmetric
//! kernel (unit plateau over the inner half radius, squared-cosine falloff
//! to zero at the region boundary, normalized to unit sum) and samples the
//! result on a lattice with stride = spacing_fraction * diameter. The
//! convolution runs in the Fourier domain with circular boundaries.
//!
//! Gaze-centric pooling equalizes eccentricity-scaled regions by warping
//! into log-polar coordinates about the gaze point, where a single region
//! size applies everywhere; statistics are computed and pooled in that
//! space and results map back through the inverse warp.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{fft2, ifft2};
use crate::plane::{ComplexPlane, Plane};
use crate::statistics::{StatisticKind, StatisticSet};

/// Region layout for pooling.
#[derive(Debug, Clone, PartialEq)]
pub enum PoolingGeometry {
    /// Same region diameter everywhere; valid for a fixed target eccentricity.
    Uniform {
        /// Region diameter in pixels.
        diameter: usize,
        /// Lattice stride as a fraction of the diameter.
        spacing_fraction: f64,
    },
    /// Region diameter grows linearly with eccentricity: diameter = rate * e.
    GazeCentric {
        /// Diameter-per-eccentricity slope (Bouma-style scaling).
        rate: f64,
        spacing_fraction: f64,
        /// Gaze point in pixel coordinates.
        gaze: (f64, f64),
        /// Radius of the unpooled foveal disk, pixels.
        fovea_radius: f64,
        /// Constant region diameter in warped space; controls warp resolution.
        warped_diameter: usize,
    },
}

pub const DEFAULT_SPACING_FRACTION: f64 = 0.25;
pub const DEFAULT_ECCENTRICITY_RATE: f64 = 0.5;
pub const DEFAULT_WARPED_DIAMETER: usize = 16;

impl PoolingGeometry {
    pub fn uniform(diameter: usize) -> Self {
        PoolingGeometry::Uniform {
            diameter,
            spacing_fraction: DEFAULT_SPACING_FRACTION,
        }
    }

    pub fn gaze_centric(gaze: (f64, f64), rate: f64, fovea_radius: f64) -> Self {
        PoolingGeometry::GazeCentric {
            rate,
            spacing_fraction: DEFAULT_SPACING_FRACTION,
            gaze,
            fovea_radius,
            warped_diameter: DEFAULT_WARPED_DIAMETER,
        }
    }

    pub fn spacing_fraction(&self) -> f64 {
        match self {
            PoolingGeometry::Uniform {
                spacing_fraction, ..
            }
            | PoolingGeometry::GazeCentric {
                spacing_fraction, ..
            } => *spacing_fraction,
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let spacing = self.spacing_fraction();
        if !(spacing > 0.0 && spacing <= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "spacing_fraction must lie in (0, 1], got {spacing}"
            )));
        }
        match self {
            PoolingGeometry::Uniform { diameter, .. } => {
                if *diameter < 4 {
                    return Err(Error::InvalidGeometry(format!(
                        "pooling diameter must be >= 4, got {diameter}"
                    )));
                }
                if *diameter > width.min(height) {
                    return Err(Error::InvalidGeometry(format!(
                        "pooling diameter {diameter} exceeds image {width}x{height}"
                    )));
                }
            }
            PoolingGeometry::GazeCentric {
                rate,
                gaze,
                fovea_radius,
                warped_diameter,
                ..
            } => {
                if *rate <= 0.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "eccentricity rate must be positive, got {rate}"
                    )));
                }
                if *fovea_radius < 1.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "fovea_radius must be >= 1 pixel, got {fovea_radius}"
                    )));
                }
                if *warped_diameter < 4 {
                    return Err(Error::InvalidGeometry(format!(
                        "warped_diameter must be >= 4, got {warped_diameter}"
                    )));
                }
                let (gx, gy) = *gaze;
                if gx < 0.0 || gy < 0.0 || gx > (width - 1) as f64 || gy > (height - 1) as f64 {
                    return Err(Error::InvalidGeometry(format!(
                        "gaze ({gx}, {gy}) outside image {width}x{height}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lattice stride in pixels of the pooling domain.
    pub fn step(&self) -> usize {
        let d = match self {
            PoolingGeometry::Uniform { diameter, .. } => *diameter,
            PoolingGeometry::GazeCentric {
                warped_diameter, ..
            } => *warped_diameter,
        };
        ((self.spacing_fraction() * d as f64).round() as usize).max(1)
    }

    /// Region diameter in the pooling domain (warped space for gaze mode).
    pub fn pooling_diameter(&self) -> usize {
        match self {
            PoolingGeometry::Uniform { diameter, .. } => *diameter,
            PoolingGeometry::GazeCentric {
                warped_diameter, ..
            } => *warped_diameter,
        }
    }
}

/// Radially symmetric pooling kernel for one region: unit plateau to half
/// the region radius, squared-cosine falloff to zero at the radius, unit
/// sum. Returned as an odd-sized image with the center at ((w-1)/2, (h-1)/2).
pub fn pooling_kernel(diameter: usize) -> Plane {
    assert!(diameter >= 4, "kernel diameter must be >= 4");
    let radius = diameter as f64 / 2.0;
    let half = radius.floor() as isize;
    let size = (2 * half + 1) as usize;
    let mut kernel = Plane::zeros(size, size);
    let mut sum = 0.0;
    for v in -half..=half {
        for u in -half..=half {
            let r = ((u * u + v * v) as f64).sqrt();
            let w = kernel_profile(r, radius);
            *kernel.at_mut((u + half) as usize, (v + half) as usize) = w;
            sum += w;
        }
    }
    kernel.scale_in_place(1.0 / sum);
    kernel
}

/// Unnormalized radial profile of the pooling kernel.
#[inline]
pub(crate) fn kernel_profile(r: f64, radius: f64) -> f64 {
    if r <= radius / 2.0 {
        1.0
    } else if r < radius {
        let t = (r - radius / 2.0) / (radius / 2.0);
        let c = (std::f64::consts::FRAC_PI_2 * t).cos();
        c * c
    } else {
        0.0
    }
}

/// Kernel embedded in a full-size plane at wrapped offsets around (0, 0),
/// transformed; multiplying a spectrum by this realizes circular
/// convolution with the kernel.
pub(crate) fn kernel_spectrum(width: usize, height: usize, diameter: usize) -> ComplexPlane {
    let kernel = pooling_kernel(diameter);
    let half = ((kernel.width - 1) / 2) as isize;
    let mut embedded = Plane::zeros(width, height);
    for v in -half..=half {
        for u in -half..=half {
            let w = kernel.at((u + half) as usize, (v + half) as usize);
            if w != 0.0 {
                let x = u.rem_euclid(width as isize) as usize;
                let y = v.rem_euclid(height as isize) as usize;
                *embedded.at_mut(x, y) += w;
            }
        }
    }
    fft2(&embedded)
}

/// Circularly convolve a full-resolution plane with the pooling kernel and
/// sample the lattice. `kspec` must come from [`kernel_spectrum`] at the
/// plane's dimensions.
pub(crate) fn pool_plane_fft(plane: &Plane, kspec: &ComplexPlane, step: usize) -> Plane {
    let (w, h) = (plane.width, plane.height);
    let pooled_w = w.div_ceil(step);
    let pooled_h = h.div_ceil(step);
    let mut spec = fft2(plane);
    for (v, k) in spec.data.iter_mut().zip(&kspec.data) {
        *v *= *k;
    }
    if w % step == 0 && h % step == 0 {
        // Decimation folds the spectrum onto the pooled grid.
        let mut folded = ComplexPlane::zeros(pooled_w, pooled_h);
        for y in 0..h {
            let fy = y % pooled_h;
            for x in 0..w {
                let fx = x % pooled_w;
                folded.data[fy * pooled_w + fx] += spec.data[y * w + x];
            }
        }
        let norm = 1.0 / (step * step) as f64;
        for v in &mut folded.data {
            *v *= norm;
        }
        let small = ifft2(&folded);
        Plane {
            width: pooled_w,
            height: pooled_h,
            data: small.data.iter().map(|c| c.re).collect(),
        }
    } else {
        let full = ifft2(&spec);
        Plane::from_fn(pooled_w, pooled_h, |px, py| {
            full.at(px * step, py * step).re
        })
    }
}

/// Low-resolution pooled statistic stack.
pub struct PooledStatistics {
    pub entries: Vec<(StatisticKind, Plane)>,
    pub geometry: PoolingGeometry,
    /// Dimensions of the domain the pooling ran in (the warped image for
    /// gaze-centric pooling).
    pub domain_width: usize,
    pub domain_height: usize,
}

impl PooledStatistics {
    pub fn pooled_dims(&self) -> (usize, usize) {
        self.entries
            .first()
            .map(|(_, p)| (p.width, p.height))
            .unwrap_or((0, 0))
    }
}

/// Pool every statistic image over a uniform region lattice.
pub fn pool(stats: &StatisticSet, geometry: &PoolingGeometry) -> Result<PooledStatistics> {
    let diameter = match geometry {
        PoolingGeometry::Uniform { diameter, .. } => *diameter,
        PoolingGeometry::GazeCentric { .. } => {
            return Err(Error::InvalidGeometry(
                "pool() needs a uniform geometry; use pool_gaze() with warped statistics".into(),
            ))
        }
    };
    geometry.validate(stats.width, stats.height)?;
    let step = geometry.step();
    let kspec = kernel_spectrum(stats.width, stats.height, diameter);
    let entries: Vec<(StatisticKind, Plane)> = stats
        .entries
        .par_iter()
        .map(|(kind, plane)| (*kind, pool_plane_fft(plane, &kspec, step)))
        .collect();
    Ok(PooledStatistics {
        entries,
        geometry: geometry.clone(),
        domain_width: stats.width,
        domain_height: stats.height,
    })
}

/// Pool statistics that were computed on the log-polar warped image. The
/// warped space has constant region sizes, so this is uniform pooling with
/// the warped diameter.
pub fn pool_gaze(
    warped_stats: &StatisticSet,
    geometry: &PoolingGeometry,
) -> Result<PooledStatistics> {
    let warped_diameter = match geometry {
        PoolingGeometry::GazeCentric {
            warped_diameter, ..
        } => *warped_diameter,
        PoolingGeometry::Uniform { .. } => {
            return Err(Error::InvalidGeometry(
                "pool_gaze() needs a gaze-centric geometry".into(),
            ))
        }
    };
    let step = geometry.step();
    let kspec = kernel_spectrum(warped_stats.width, warped_stats.height, warped_diameter);
    let entries: Vec<(StatisticKind, Plane)> = warped_stats
        .entries
        .par_iter()
        .map(|(kind, plane)| (*kind, pool_plane_fft(plane, &kspec, step)))
        .collect();
    Ok(PooledStatistics {
        entries,
        geometry: geometry.clone(),
        domain_width: warped_stats.width,
        domain_height: warped_stats.height,
    })
}

/// Log-polar resampling map about a gaze point. Rows of the warped image
/// index log radius, columns index azimuth; scale factors are chosen so a
/// region of diameter rate * e at eccentricity e maps to a disk of
/// `warped_diameter` samples.
#[derive(Debug, Clone)]
pub struct LogPolarMap {
    pub gaze: (f64, f64),
    /// Inner radius of the warp (the fovea boundary).
    pub r_min: f64,
    /// Largest eccentricity covered (distance to the farthest corner).
    pub r_max: f64,
    /// Warped pixels per unit log radius.
    pub k_radial: f64,
    /// Warped pixels per radian of azimuth; the azimuth axis is exactly
    /// periodic with the warped width.
    pub k_azimuth: f64,
    pub width: usize,
    pub height: usize,
}

impl LogPolarMap {
    pub fn new(width: usize, height: usize, geometry: &PoolingGeometry) -> Result<Self> {
        geometry.validate(width, height)?;
        let (rate, gaze, fovea_radius, warped_diameter) = match geometry {
            PoolingGeometry::GazeCentric {
                rate,
                gaze,
                fovea_radius,
                warped_diameter,
                ..
            } => (*rate, *gaze, *fovea_radius, *warped_diameter),
            PoolingGeometry::Uniform { .. } => {
                return Err(Error::InvalidGeometry(
                    "log-polar map requires a gaze-centric geometry".into(),
                ))
            }
        };
        let (gx, gy) = gaze;
        let corners = [
            (0.0, 0.0),
            ((width - 1) as f64, 0.0),
            (0.0, (height - 1) as f64),
            ((width - 1) as f64, (height - 1) as f64),
        ];
        let r_max = corners
            .iter()
            .map(|(cx, cy)| (cx - gx).hypot(cy - gy))
            .fold(0.0, f64::max)
            .max(fovea_radius * 2.0);
        let k_radial = warped_diameter as f64 / rate;
        let warped_w = (2.0 * std::f64::consts::PI * k_radial).round().max(4.0) as usize;
        let k_azimuth = warped_w as f64 / (2.0 * std::f64::consts::PI);
        let warped_h = (k_radial * (r_max / fovea_radius).ln()).ceil().max(4.0) as usize;
        Ok(LogPolarMap {
            gaze,
            r_min: fovea_radius,
            r_max,
            k_radial,
            k_azimuth,
            width: warped_w,
            height: warped_h,
        })
    }

    /// Image-space position of warped coordinates (azimuth column, radial row).
    #[inline]
    pub fn to_image(&self, wx: f64, wy: f64) -> (f64, f64) {
        let r = self.r_min * (wy / self.k_radial).exp();
        let alpha = wx / self.k_azimuth - std::f64::consts::PI;
        (
            self.gaze.0 + r * alpha.cos(),
            self.gaze.1 + r * alpha.sin(),
        )
    }

    /// Warped coordinates of an image-space position. Radii below the fovea
    /// boundary map to the inner edge (row 0).
    #[inline]
    pub fn to_warped(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.gaze.0;
        let dy = y - self.gaze.1;
        let r = dx.hypot(dy).max(1e-12);
        let alpha = dy.atan2(dx);
        let wy = (self.k_radial * (r / self.r_min).ln()).max(0.0);
        let wx = self.k_azimuth * (alpha + std::f64::consts::PI);
        (wx, wy)
    }
}

/// Warp a plane into log-polar space (bilinear, clamp at image borders).
pub fn logpolar_warp(plane: &Plane, map: &LogPolarMap) -> Plane {
    Plane::from_fn(map.width, map.height, |wx, wy| {
        let (x, y) = map.to_image(wx as f64, wy as f64);
        plane.sample_bilinear_clamp(x, y)
    })
}

/// Bilinear sample with a circular x axis and clamped y axis.
fn sample_wrapx_clampy(plane: &Plane, x: f64, y: f64) -> f64 {
    let cy = y.clamp(0.0, (plane.height - 1) as f64);
    let x0 = x.floor();
    let y0 = cy.floor();
    let fx = x - x0;
    let fy = cy - y0;
    let xi = (x0 as isize).rem_euclid(plane.width as isize) as usize;
    let xi1 = (x0 as isize + 1).rem_euclid(plane.width as isize) as usize;
    let yi = y0 as usize;
    let yi1 = (yi + 1).min(plane.height - 1);
    let v00 = plane.at(xi, yi);
    let v10 = plane.at(xi1, yi);
    let v01 = plane.at(xi, yi1);
    let v11 = plane.at(xi1, yi1);
    (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
}

/// Invert the log-polar warp back to image space. Pixels inside the foveal
/// disk sample the warped image's inner boundary row; the azimuth axis is
/// treated as circular.
pub fn logpolar_unwarp(warped: &Plane, map: &LogPolarMap, width: usize, height: usize) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        let (wx, wy) = map.to_warped(x as f64, y as f64);
        sample_wrapx_clampy(warped, wx, wy)
    })
}

/// Write pooled statistics as f32 binary plus manifest, recording the
/// geometry parameters alongside the entry table.
pub fn dump_pooled(pooled: &PooledStatistics, bin_path: &Path, manifest_path: &Path) -> Result<()> {
    let io_err = |path: &Path| {
        let p = path.to_path_buf();
        move |source| Error::Io {
            path: p.clone(),
            source,
        }
    };
    let mut bin =
        std::io::BufWriter::new(std::fs::File::create(bin_path).map_err(io_err(bin_path))?);
    let mut manifest = String::new();
    manifest.push_str("format = f32le\n");
    manifest.push_str(&format!("entries = {}\n", pooled.entries.len()));
    manifest.push_str(&format!(
        "domain = {}x{}\n",
        pooled.domain_width, pooled.domain_height
    ));
    match &pooled.geometry {
        PoolingGeometry::Uniform {
            diameter,
            spacing_fraction,
        } => {
            manifest.push_str("mode = uniform\n");
            manifest.push_str(&format!("diameter = {diameter}\n"));
            manifest.push_str(&format!("spacing_fraction = {spacing_fraction}\n"));
        }
        PoolingGeometry::GazeCentric {
            rate,
            spacing_fraction,
            gaze,
            fovea_radius,
            warped_diameter,
        } => {
            manifest.push_str("mode = gaze_centric\n");
            manifest.push_str(&format!("rate = {rate}\n"));
            manifest.push_str(&format!("spacing_fraction = {spacing_fraction}\n"));
            manifest.push_str(&format!("gaze = {},{}\n", gaze.0, gaze.1));
            manifest.push_str(&format!("fovea_radius = {fovea_radius}\n"));
            manifest.push_str(&format!("warped_diameter = {warped_diameter}\n"));
        }
    }
    for (index, (kind, plane)) in pooled.entries.iter().enumerate() {
        let mut buf = Vec::with_capacity(plane.data.len() * 4);
        for &v in &plane.data {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        bin.write_all(&buf).map_err(io_err(bin_path))?;
        let channel = kind
            .channel()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".to_string());
        manifest.push_str(&format!(
            "{index}\t{kind}\t{channel}\t{}x{}\n",
            plane.width, plane.height
        ));
    }
    bin.flush().map_err(io_err(bin_path))?;
    std::fs::write(manifest_path, manifest).map_err(io_err(manifest_path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pyramid::PyramidConfig;
    use crate::statistics::{compute_statistics, ChannelSet};

    #[test]
    fn kernel_sums_to_one_and_has_compact_support() {
        for diameter in [4usize, 8, 16, 32, 64] {
            let k = pooling_kernel(diameter);
            assert!((k.sum() - 1.0).abs() <= 1e-9, "diameter {diameter}");
            let half = ((k.width - 1) / 2) as isize;
            let radius = diameter as f64 / 2.0;
            let center = k.at(half as usize, half as usize);
            for v in -half..=half {
                for u in -half..=half {
                    let w = k.at((u + half) as usize, (v + half) as usize);
                    let r = ((u * u + v * v) as f64).sqrt();
                    if r >= radius {
                        assert_eq!(w, 0.0);
                    }
                    assert!(center >= w);
                }
            }
        }
    }

    #[test]
    fn constant_field_pools_to_constant() {
        let c = 1.7;
        let plane = Plane::filled(64, 64, c);
        let kspec = kernel_spectrum(64, 64, 16);
        let pooled = pool_plane_fft(&plane, &kspec, 4);
        assert_eq!((pooled.width, pooled.height), (16, 16));
        for v in &pooled.data {
            assert!((v - c).abs() <= 1e-9);
        }
    }

    #[test]
    fn pooled_dims_follow_stride_rule() {
        let plane = Plane::zeros(128, 128);
        let stats = StatisticSet {
            width: 128,
            height: 128,
            entries: vec![(
                StatisticKind::PixelMean {
                    channel: crate::statistics::StatChannel::A,
                },
                plane,
            )],
        };
        let pooled = pool(&stats, &PoolingGeometry::uniform(32)).unwrap();
        assert_eq!(pooled.pooled_dims(), (16, 16));
    }

    #[test]
    fn impulse_pools_to_kernel_values() {
        let (w, h, d, step) = (64usize, 64usize, 16usize, 4usize);
        let (ix, iy) = (23usize, 37usize);
        let mut plane = Plane::zeros(w, h);
        *plane.at_mut(ix, iy) = 1.0;
        let kspec = kernel_spectrum(w, h, d);
        let pooled = pool_plane_fft(&plane, &kspec, step);
        let kernel = pooling_kernel(d);
        let half = ((kernel.width - 1) / 2) as isize;
        for py in 0..pooled.height {
            for px in 0..pooled.width {
                // Offset of the impulse from the lattice point, wrapped.
                let mut du = px as isize * step as isize - ix as isize;
                let mut dv = py as isize * step as isize - iy as isize;
                du = (du + w as isize / 2).rem_euclid(w as isize) - w as isize / 2;
                dv = (dv + h as isize / 2).rem_euclid(h as isize) - h as isize / 2;
                let want = if du.abs() <= half && dv.abs() <= half {
                    kernel.at((du + half) as usize, (dv + half) as usize)
                } else {
                    0.0
                };
                assert!(
                    (pooled.at(px, py) - want).abs() < 1e-10,
                    "lattice ({px},{py})"
                );
            }
        }
    }

    #[test]
    fn pooling_is_linear() {
        let p1 = Plane::from_fn(32, 32, |x, y| ((x * 5 + y) % 9) as f64);
        let p2 = Plane::from_fn(32, 32, |x, y| ((x + y * 3) % 7) as f64);
        let (a, b) = (1.7, -0.4);
        let combo = Plane {
            width: 32,
            height: 32,
            data: p1
                .data
                .iter()
                .zip(&p2.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        };
        let kspec = kernel_spectrum(32, 32, 8);
        let q1 = pool_plane_fft(&p1, &kspec, 2);
        let q2 = pool_plane_fft(&p2, &kspec, 2);
        let qc = pool_plane_fft(&combo, &kspec, 2);
        for i in 0..qc.data.len() {
            assert!((qc.data[i] - (a * q1.data[i] + b * q2.data[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn lattice_overlap_covers_every_pixel() {
        // spacing 0.25: every position sits under >= 4 region supports per
        // axis away from the wrap seam.
        let (w, d) = (128usize, 32usize);
        let step = 8usize;
        let radius = d as f64 / 2.0;
        for x in (d / 2)..(w - d / 2) {
            let covering = (0..w.div_ceil(step))
                .filter(|p| {
                    let c = (p * step) as f64;
                    (c - x as f64).abs() <= radius
                })
                .count();
            assert!(covering >= 4, "pixel {x} covered by {covering}");
        }
    }

    #[test]
    fn oversized_diameter_is_rejected() {
        let stats = StatisticSet {
            width: 32,
            height: 32,
            entries: vec![],
        };
        assert!(pool(&stats, &PoolingGeometry::uniform(64)).is_err());
    }

    #[test]
    fn pool_rejects_gaze_geometry() {
        let stats = StatisticSet {
            width: 64,
            height: 64,
            entries: vec![],
        };
        let geom = PoolingGeometry::gaze_centric((32.0, 32.0), 0.5, 4.0);
        assert!(pool(&stats, &geom).is_err());
    }

    fn smooth_plane(n: usize) -> Plane {
        Plane::from_fn(n, n, |x, y| {
            let fx = x as f64 / n as f64;
            let fy = y as f64 / n as f64;
            0.5 + 0.3 * (2.0 * std::f64::consts::PI * fx).sin() * (2.0 * std::f64::consts::PI * fy).cos()
                + 0.15 * (4.0 * std::f64::consts::PI * (fx + fy)).sin()
        })
    }

    #[test]
    fn logpolar_map_basics() {
        let geom = PoolingGeometry::gaze_centric((128.0, 128.0), 0.5, 8.0);
        let map = LogPolarMap::new(256, 256, &geom).unwrap();
        // A point on the +x axis lands at the azimuth midpoint and
        // k * log(e / r_min) radially.
        let e = 40.0;
        let (wx, wy) = map.to_warped(128.0 + e, 128.0);
        assert!((wy - map.k_radial * (e / map.r_min).ln()).abs() < 1e-9);
        assert!((wx - map.k_azimuth * std::f64::consts::PI).abs() < 1e-9);
        // Doubling the eccentricity advances the radial coordinate by
        // exactly k * log 2.
        let (_, wy2) = map.to_warped(128.0 + 2.0 * e, 128.0);
        assert!((wy2 - wy - map.k_radial * 2f64.ln()).abs() < 1e-9);
        // Monotone in eccentricity.
        let (_, wy3) = map.to_warped(128.0 + e + 5.0, 128.0);
        assert!(wy3 > wy);
    }

    #[test]
    fn constant_round_trips_outside_fovea() {
        let geom = PoolingGeometry::gaze_centric((64.0, 64.0), 0.5, 6.0);
        let map = LogPolarMap::new(128, 128, &geom).unwrap();
        let plane = Plane::filled(128, 128, 0.8);
        let back = logpolar_unwarp(&logpolar_warp(&plane, &map), &map, 128, 128);
        for y in 0..128 {
            for x in 0..128 {
                let r = (x as f64 - 64.0).hypot(y as f64 - 64.0);
                if r > 6.0 {
                    assert!((back.at(x, y) - 0.8).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn azimuth_axis_has_no_seam() {
        let geom = PoolingGeometry::gaze_centric((64.0, 64.0), 0.5, 6.0);
        let map = LogPolarMap::new(128, 128, &geom).unwrap();
        let plane = smooth_plane(128);
        let back = logpolar_unwarp(&logpolar_warp(&plane, &map), &map, 128, 128);
        // The -x axis from the gaze crosses the azimuth wrap; the error
        // there must stay at interpolation scale.
        for x in 0..40usize {
            let (px, py) = (x, 64usize);
            let r = (px as f64 - 64.0).hypot(py as f64 - 64.0);
            if r > 12.0 && r < 55.0 {
                assert!(
                    (back.at(px, py) - plane.at(px, py)).abs() < 0.05,
                    "seam error at ({px},{py})"
                );
            }
        }
    }

    #[test]
    fn gaze_pooling_of_constant_statistics_is_constant() {
        let geom = PoolingGeometry::gaze_centric((64.0, 64.0), 0.5, 8.0);
        let map = LogPolarMap::new(128, 128, &geom).unwrap();
        let warped = logpolar_warp(&Plane::filled(128, 128, 0.6), &map);
        let cfg = PyramidConfig {
            scales: 3,
            orientations: 4,
            end_stop_shift: 1.0,
        };
        let stats = compute_statistics(&ChannelSet::Gray(warped), cfg).unwrap();
        let pooled = pool_gaze(&stats, &geom).unwrap();
        for (kind, plane) in &pooled.entries {
            if matches!(kind, StatisticKind::PixelMean { .. }) {
                for v in &plane.data {
                    assert!((v - 0.6).abs() < 1e-9, "{kind}");
                }
            } else {
                assert!(plane.max_abs() < 1e-9, "{kind}");
            }
        }
    }
}
