//! Statistic images: raw moments and correlations of the pyramid bands.
//!
//! Every statistic starts life as a pointwise product at the resolution of
//! the bands involved and is bilinearly upsampled to full input resolution
//! for storage, so the pooling stage sees a uniform stack. Raw (uncentered)
//! moments are kept throughout; central moments are recoverable because the
//! means are part of the catalog.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::OpponentImage;
use crate::plane::{ComplexPlane, Plane};
use crate::pyramid::{phase_double, PyramidConfig, PyramidPlan, SteerablePyramid};

/// Which opponent channel a per-channel statistic belongs to. Grayscale
/// input uses the achromatic slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatChannel {
    A,
    RG,
    BY,
}

impl std::fmt::Display for StatChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StatChannel::A => "A",
            StatChannel::RG => "RG",
            StatChannel::BY => "BY",
        })
    }
}

/// Channel pair for the cross-color correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColorPair {
    ARg,
    ABy,
    RgBy,
}

impl ColorPair {
    pub const ALL: [ColorPair; 3] = [ColorPair::ARg, ColorPair::ABy, ColorPair::RgBy];

    pub fn channels(self) -> (StatChannel, StatChannel) {
        match self {
            ColorPair::ARg => (StatChannel::A, StatChannel::RG),
            ColorPair::ABy => (StatChannel::A, StatChannel::BY),
            ColorPair::RgBy => (StatChannel::RG, StatChannel::BY),
        }
    }
}

impl std::fmt::Display for ColorPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.channels();
        write!(f, "{a}-{b}")
    }
}

/// One scalar statistic type of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticKind {
    /// The channel plane itself.
    PixelMean { channel: StatChannel },
    /// Edge magnitude at (scale, orientation).
    MagMean {
        channel: StatChannel,
        scale: usize,
        orientation: usize,
    },
    /// Squared edge magnitude (raw second moment).
    MagSecondMoment {
        channel: StatChannel,
        scale: usize,
        orientation: usize,
    },
    /// Product of magnitudes of two orientations at one scale (o1 < o2).
    XOrientCorr {
        channel: StatChannel,
        scale: usize,
        o1: usize,
        o2: usize,
    },
    /// Magnitude at `scale` times upsampled magnitude at `scale + 1`.
    XScaleMagCorr {
        channel: StatChannel,
        scale: usize,
        orientation: usize,
    },
    /// Re(band(scale) * conj(upsampled phase-doubled band(scale + 1))).
    XScalePhaseCorr {
        channel: StatChannel,
        scale: usize,
        orientation: usize,
    },
    /// Squared magnitude change along the edge direction.
    EndStop {
        channel: StatChannel,
        scale: usize,
        orientation: usize,
    },
    /// Magnitude product across a channel pair at the same (scale, orientation).
    XColorMagCorr {
        scale: usize,
        orientation: usize,
        pair: ColorPair,
    },
    /// Re(band_c1 * conj(band_c2)) at the same (scale, orientation).
    XColorPhaseCorr {
        scale: usize,
        orientation: usize,
        pair: ColorPair,
    },
}

impl StatisticKind {
    /// Channel of a per-channel statistic; cross-color kinds have none.
    pub fn channel(&self) -> Option<StatChannel> {
        match self {
            StatisticKind::PixelMean { channel }
            | StatisticKind::MagMean { channel, .. }
            | StatisticKind::MagSecondMoment { channel, .. }
            | StatisticKind::XOrientCorr { channel, .. }
            | StatisticKind::XScaleMagCorr { channel, .. }
            | StatisticKind::XScalePhaseCorr { channel, .. }
            | StatisticKind::EndStop { channel, .. } => Some(*channel),
            _ => None,
        }
    }

    /// Pyramid scale at which the statistic's product is formed. PixelMean
    /// lives at full resolution (scale 0).
    pub fn product_scale(&self) -> usize {
        match self {
            StatisticKind::PixelMean { .. } => 0,
            StatisticKind::MagMean { scale, .. }
            | StatisticKind::MagSecondMoment { scale, .. }
            | StatisticKind::XOrientCorr { scale, .. }
            | StatisticKind::XScaleMagCorr { scale, .. }
            | StatisticKind::XScalePhaseCorr { scale, .. }
            | StatisticKind::EndStop { scale, .. }
            | StatisticKind::XColorMagCorr { scale, .. }
            | StatisticKind::XColorPhaseCorr { scale, .. } => *scale,
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatisticKind::PixelMean { .. } => write!(f, "PixelMean"),
            StatisticKind::MagMean {
                scale, orientation, ..
            } => write!(f, "MagMean(s={scale},o={orientation})"),
            StatisticKind::MagSecondMoment {
                scale, orientation, ..
            } => write!(f, "MagSecondMoment(s={scale},o={orientation})"),
            StatisticKind::XOrientCorr { scale, o1, o2, .. } => {
                write!(f, "XOrientCorr(s={scale},o1={o1},o2={o2})")
            }
            StatisticKind::XScaleMagCorr {
                scale, orientation, ..
            } => write!(f, "XScaleMagCorr(s={scale},o={orientation})"),
            StatisticKind::XScalePhaseCorr {
                scale, orientation, ..
            } => write!(f, "XScalePhaseCorr(s={scale},o={orientation})"),
            StatisticKind::EndStop {
                scale, orientation, ..
            } => write!(f, "EndStop(s={scale},o={orientation})"),
            StatisticKind::XColorMagCorr {
                scale,
                orientation,
                pair,
            } => write!(f, "XColorMagCorr(s={scale},o={orientation},pair={pair})"),
            StatisticKind::XColorPhaseCorr {
                scale,
                orientation,
                pair,
            } => write!(f, "XColorPhaseCorr(s={scale},o={orientation},pair={pair})"),
        }
    }
}

/// Input channels for the statistics pipeline.
pub enum ChannelSet {
    Gray(Plane),
    Opponent(OpponentImage),
}

impl ChannelSet {
    pub fn width(&self) -> usize {
        match self {
            ChannelSet::Gray(p) => p.width,
            ChannelSet::Opponent(o) => o.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            ChannelSet::Gray(p) => p.height,
            ChannelSet::Opponent(o) => o.height(),
        }
    }

    pub fn is_color(&self) -> bool {
        matches!(self, ChannelSet::Opponent(_))
    }

    pub fn planes(&self) -> Vec<(StatChannel, &Plane)> {
        match self {
            ChannelSet::Gray(p) => vec![(StatChannel::A, p)],
            ChannelSet::Opponent(o) => vec![
                (StatChannel::A, &o.achromatic),
                (StatChannel::RG, &o.red_green),
                (StatChannel::BY, &o.blue_yellow),
            ],
        }
    }
}

/// Deterministic statistic catalog for a configuration. The order is fixed:
/// per-channel kinds grouped by channel (A, RG, BY), each group in variant
/// order with scale-major then orientation indices, followed by the
/// cross-color kinds.
pub fn catalog(cfg: &PyramidConfig, color: bool) -> Vec<StatisticKind> {
    let s_count = cfg.scales;
    let o_count = cfg.orientations;
    let channels: &[StatChannel] = if color {
        &[StatChannel::A, StatChannel::RG, StatChannel::BY]
    } else {
        &[StatChannel::A]
    };
    let mut kinds = Vec::with_capacity(statistic_count(cfg, color));
    for &channel in channels {
        kinds.push(StatisticKind::PixelMean { channel });
        for scale in 0..s_count {
            for orientation in 0..o_count {
                kinds.push(StatisticKind::MagMean {
                    channel,
                    scale,
                    orientation,
                });
            }
        }
        for scale in 0..s_count {
            for orientation in 0..o_count {
                kinds.push(StatisticKind::MagSecondMoment {
                    channel,
                    scale,
                    orientation,
                });
            }
        }
        for scale in 0..s_count {
            for o1 in 0..o_count {
                for o2 in (o1 + 1)..o_count {
                    kinds.push(StatisticKind::XOrientCorr {
                        channel,
                        scale,
                        o1,
                        o2,
                    });
                }
            }
        }
        for scale in 0..s_count.saturating_sub(1) {
            for orientation in 0..o_count {
                kinds.push(StatisticKind::XScaleMagCorr {
                    channel,
                    scale,
                    orientation,
                });
            }
        }
        for scale in 0..s_count.saturating_sub(1) {
            for orientation in 0..o_count {
                kinds.push(StatisticKind::XScalePhaseCorr {
                    channel,
                    scale,
                    orientation,
                });
            }
        }
        for scale in 0..s_count {
            for orientation in 0..o_count {
                kinds.push(StatisticKind::EndStop {
                    channel,
                    scale,
                    orientation,
                });
            }
        }
    }
    if color {
        for pair in ColorPair::ALL {
            for scale in 0..s_count {
                for orientation in 0..o_count {
                    kinds.push(StatisticKind::XColorMagCorr {
                        scale,
                        orientation,
                        pair,
                    });
                }
            }
        }
        for pair in ColorPair::ALL {
            for scale in 0..s_count {
                for orientation in 0..o_count {
                    kinds.push(StatisticKind::XColorPhaseCorr {
                        scale,
                        orientation,
                        pair,
                    });
                }
            }
        }
    }
    kinds
}

/// Closed-form catalog size.
pub fn statistic_count(cfg: &PyramidConfig, color: bool) -> usize {
    let s = cfg.scales;
    let k = cfg.orientations;
    let per_channel = 1 + s * k + s * k + s * k * (k - 1) / 2 + (s - 1) * k + (s - 1) * k + s * k;
    if color {
        3 * per_channel + 2 * 3 * s * k
    } else {
        per_channel
    }
}

/// Labeled stack of full-resolution statistic images in catalog order.
pub struct StatisticSet {
    pub width: usize,
    pub height: usize,
    pub entries: Vec<(StatisticKind, Plane)>,
}

/// Bilinear resize with circular wrap; used both for the 2x cross-scale
/// alignment and for lifting band products to full resolution.
pub(crate) fn upsample_to(src: &Plane, width: usize, height: usize) -> Plane {
    if src.width == width && src.height == height {
        return src.clone();
    }
    let rx = width as f64 / src.width as f64;
    let ry = height as f64 / src.height as f64;
    Plane::from_fn(width, height, |x, y| {
        src.sample_bilinear_wrap(x as f64 / rx, y as f64 / ry)
    })
}

pub(crate) fn upsample_complex_to(src: &ComplexPlane, width: usize, height: usize) -> ComplexPlane {
    if src.width == width && src.height == height {
        return src.clone();
    }
    let re = Plane {
        width: src.width,
        height: src.height,
        data: src.data.iter().map(|z| z.re).collect(),
    };
    let im = Plane {
        width: src.width,
        height: src.height,
        data: src.data.iter().map(|z| z.im).collect(),
    };
    let re_up = upsample_to(&re, width, height);
    let im_up = upsample_to(&im, width, height);
    ComplexPlane {
        width,
        height,
        data: re_up
            .data
            .iter()
            .zip(&im_up.data)
            .map(|(&r, &i)| rustfft::num_complex::Complex64::new(r, i))
            .collect(),
    }
}

/// Squared difference between a magnitude image and a copy of itself
/// translated by `shift` samples along `edge_angle` (the direction the
/// underlying edge runs, i.e. perpendicular to the band's frequency-domain
/// orientation). Sampling is bilinear with circular wrap.
pub fn end_stop_image(mag: &Plane, shift: f64, edge_angle: f64) -> Plane {
    let dx = shift * edge_angle.cos();
    let dy = shift * edge_angle.sin();
    Plane::from_fn(mag.width, mag.height, |x, y| {
        let moved = mag.sample_bilinear_wrap(x as f64 - dx, y as f64 - dy);
        let d = mag.at(x, y) - moved;
        d * d
    })
}

/// Pyramids plus source planes for one image; the factory for statistic
/// products.
pub(crate) struct StatisticsEngine {
    pub cfg: PyramidConfig,
    pub width: usize,
    pub height: usize,
    pub channels: Vec<StatChannel>,
    pub planes: Vec<Plane>,
    pub pyramids: Vec<SteerablePyramid>,
}

impl StatisticsEngine {
    pub fn new(input: &ChannelSet, cfg: PyramidConfig) -> Result<Self> {
        let plan = PyramidPlan::new(input.width(), input.height(), cfg)?;
        let pairs = input.planes();
        let pyramids: Vec<SteerablePyramid> = pairs.iter().map(|(_, p)| plan.build(p)).collect();
        Ok(StatisticsEngine {
            cfg,
            width: input.width(),
            height: input.height(),
            channels: pairs.iter().map(|(c, _)| *c).collect(),
            planes: pairs.into_iter().map(|(_, p)| p.clone()).collect(),
            pyramids,
        })
    }

    fn channel_index(&self, c: StatChannel) -> usize {
        self.channels
            .iter()
            .position(|&x| x == c)
            .expect("channel present in input")
    }

    fn pyramid(&self, c: StatChannel) -> &SteerablePyramid {
        &self.pyramids[self.channel_index(c)]
    }

    /// Edge direction for an orientation band: perpendicular to its
    /// frequency-domain angle.
    pub fn edge_angle(&self, orientation: usize) -> f64 {
        self.cfg.orientation_angle(orientation) + std::f64::consts::FRAC_PI_2
    }

    /// The statistic's product image at the resolution it is formed at
    /// (band resolution for pyramid statistics).
    pub fn product(&self, kind: &StatisticKind) -> Plane {
        match *kind {
            StatisticKind::PixelMean { channel } => {
                self.planes[self.channel_index(channel)].clone()
            }
            StatisticKind::MagMean {
                channel,
                scale,
                orientation,
            } => self.pyramid(channel).magnitude[scale][orientation].clone(),
            StatisticKind::MagSecondMoment {
                channel,
                scale,
                orientation,
            } => {
                let m = &self.pyramid(channel).magnitude[scale][orientation];
                m.mul(m)
            }
            StatisticKind::XOrientCorr {
                channel,
                scale,
                o1,
                o2,
            } => {
                let pyr = self.pyramid(channel);
                pyr.magnitude[scale][o1].mul(&pyr.magnitude[scale][o2])
            }
            StatisticKind::XScaleMagCorr {
                channel,
                scale,
                orientation,
            } => {
                let pyr = self.pyramid(channel);
                let fine = &pyr.magnitude[scale][orientation];
                let coarse = upsample_to(
                    &pyr.magnitude[scale + 1][orientation],
                    fine.width,
                    fine.height,
                );
                fine.mul(&coarse)
            }
            StatisticKind::XScalePhaseCorr {
                channel,
                scale,
                orientation,
            } => {
                let pyr = self.pyramid(channel);
                let fine = &pyr.bands[scale][orientation];
                let pd = phase_double(&pyr.bands[scale + 1][orientation]);
                let coarse = upsample_complex_to(&pd, fine.width, fine.height);
                Plane {
                    width: fine.width,
                    height: fine.height,
                    data: fine
                        .data
                        .iter()
                        .zip(&coarse.data)
                        .map(|(a, b)| (a * b.conj()).re)
                        .collect(),
                }
            }
            StatisticKind::EndStop {
                channel,
                scale,
                orientation,
            } => {
                let mag = &self.pyramid(channel).magnitude[scale][orientation];
                end_stop_image(mag, self.cfg.end_stop_shift, self.edge_angle(orientation))
            }
            StatisticKind::XColorMagCorr {
                scale,
                orientation,
                pair,
            } => {
                let (c1, c2) = pair.channels();
                self.pyramid(c1).magnitude[scale][orientation]
                    .mul(&self.pyramid(c2).magnitude[scale][orientation])
            }
            StatisticKind::XColorPhaseCorr {
                scale,
                orientation,
                pair,
            } => {
                let (c1, c2) = pair.channels();
                let b1 = &self.pyramid(c1).bands[scale][orientation];
                let b2 = &self.pyramid(c2).bands[scale][orientation];
                Plane {
                    width: b1.width,
                    height: b1.height,
                    data: b1
                        .data
                        .iter()
                        .zip(&b2.data)
                        .map(|(a, b)| (a * b.conj()).re)
                        .collect(),
                }
            }
        }
    }

    /// Full-resolution statistic image for one kind.
    pub fn full_res(&self, kind: &StatisticKind) -> Plane {
        upsample_to(&self.product(kind), self.width, self.height)
    }
}

/// Compute the full statistic stack at input resolution.
pub fn compute_statistics(input: &ChannelSet, cfg: PyramidConfig) -> Result<StatisticSet> {
    let engine = StatisticsEngine::new(input, cfg)?;
    let kinds = catalog(&cfg, input.is_color());
    let entries: Vec<(StatisticKind, Plane)> = kinds
        .par_iter()
        .map(|k| (*k, engine.full_res(k)))
        .collect();
    Ok(StatisticSet {
        width: input.width(),
        height: input.height(),
        entries,
    })
}

/// Visit every statistic image in catalog order without materializing the
/// whole stack; used for dumps and the batch forward pass on large images.
pub fn for_each_statistic(
    input: &ChannelSet,
    cfg: PyramidConfig,
    mut f: impl FnMut(&StatisticKind, Plane),
) -> Result<()> {
    let engine = StatisticsEngine::new(input, cfg)?;
    for kind in catalog(&cfg, input.is_color()) {
        let plane = engine.full_res(&kind);
        f(&kind, plane);
    }
    Ok(())
}

fn write_f32_plane(w: &mut impl Write, plane: &Plane, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(plane.data.len() * 4);
    for &v in &plane.data {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write the statistic stack as little-endian f32 binary (entry-major,
/// row-major) plus a text manifest of (index, kind, channel, shape).
pub fn dump_statistics(
    input: &ChannelSet,
    cfg: PyramidConfig,
    bin_path: &Path,
    manifest_path: &Path,
) -> Result<usize> {
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
    manifest.push_str(&format!("width = {}\n", input.width()));
    manifest.push_str(&format!("height = {}\n", input.height()));
    manifest.push_str(&format!("scales = {}\n", cfg.scales));
    manifest.push_str(&format!("orientations = {}\n", cfg.orientations));
    let count = statistic_count(&cfg, input.is_color());
    manifest.push_str(&format!("entries = {count}\n"));
    let mut index = 0usize;
    let mut write_result: Result<()> = Ok(());
    for_each_statistic(input, cfg, |kind, plane| {
        if write_result.is_err() {
            return;
        }
        if let Err(e) = write_f32_plane(&mut bin, &plane, bin_path) {
            write_result = Err(e);
            return;
        }
        let channel = kind
            .channel()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".to_string());
        manifest.push_str(&format!(
            "{index}\t{kind}\t{channel}\t{}x{}\n",
            plane.width, plane.height
        ));
        index += 1;
    })?;
    write_result?;
    bin.flush().map_err(io_err(bin_path))?;
    std::fs::write(manifest_path, manifest).map_err(io_err(manifest_path))?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scales: usize, orientations: usize) -> PyramidConfig {
        PyramidConfig {
            scales,
            orientations,
            end_stop_shift: 1.0,
        }
    }

    #[test]
    fn catalog_counts_match_enumeration() {
        // Independent arithmetic: per channel
        //   1 + SK + SK + S*C(K,2) + (S-1)K + (S-1)K + SK
        let c66 = cfg(6, 6);
        assert_eq!(statistic_count(&c66, false), 259);
        assert_eq!(catalog(&c66, false).len(), 259);
        assert_eq!(statistic_count(&c66, true), 993);
        assert_eq!(catalog(&c66, true).len(), 993);
        let c44 = cfg(4, 4);
        assert_eq!(statistic_count(&c44, false), 97);
        assert_eq!(catalog(&c44, false).len(), 97);
    }

    #[test]
    fn catalog_is_deterministic() {
        let a = catalog(&cfg(4, 4), true);
        let b = catalog(&cfg(4, 4), true);
        assert_eq!(a, b);
    }

    #[test]
    fn constant_image_yields_mean_and_zeros() {
        let c = 0.42;
        let input = ChannelSet::Gray(Plane::filled(32, 32, c));
        let stats = compute_statistics(&input, cfg(3, 4)).unwrap();
        for (kind, plane) in &stats.entries {
            match kind {
                StatisticKind::PixelMean { .. } => {
                    for v in &plane.data {
                        assert!((v - c).abs() < 1e-12);
                    }
                }
                _ => {
                    assert!(plane.max_abs() <= 1e-9, "{kind} not silent");
                }
            }
        }
    }

    #[test]
    fn statistic_images_are_full_resolution_and_finite() {
        let plane = Plane::from_fn(40, 32, |x, y| ((x * 3 + y * 11) % 23) as f64 / 23.0);
        let stats = compute_statistics(&ChannelSet::Gray(plane), cfg(3, 4)).unwrap();
        for (kind, plane) in &stats.entries {
            assert_eq!((plane.width, plane.height), (40, 32), "{kind}");
            assert!(plane.is_finite(), "{kind}");
            if matches!(
                kind,
                StatisticKind::MagMean { .. }
                    | StatisticKind::MagSecondMoment { .. }
                    | StatisticKind::XOrientCorr { .. }
                    | StatisticKind::XScaleMagCorr { .. }
                    | StatisticKind::EndStop { .. }
            ) {
                assert!(plane.min() >= 0.0, "{kind} must be non-negative");
            }
        }
    }

    #[test]
    fn raw_moments_recover_variance() {
        let plane = Plane::from_fn(64, 64, |x, y| {
            (x as f64 * 0.37).sin() * 0.3 + (y as f64 * 0.23).cos() * 0.2 + 0.5
        });
        let c = cfg(3, 4);
        let engine = StatisticsEngine::new(&ChannelSet::Gray(plane), c).unwrap();
        for scale in 0..c.scales {
            for orientation in 0..c.orientations {
                let mag = &engine.pyramid(StatChannel::A).magnitude[scale][orientation];
                let mean_kind = StatisticKind::MagMean {
                    channel: StatChannel::A,
                    scale,
                    orientation,
                };
                let second_kind = StatisticKind::MagSecondMoment {
                    channel: StatChannel::A,
                    scale,
                    orientation,
                };
                let m1 = engine.full_res(&mean_kind).mean();
                let m2 = engine.full_res(&second_kind).mean();
                let var = mag.variance();
                assert!(
                    ((m2 - m1 * m1) - var).abs() < 1e-9,
                    "scale {scale} orient {orientation}"
                );
            }
        }
    }

    #[test]
    fn end_stop_is_zero_for_constant_magnitude() {
        let mag = Plane::filled(16, 16, 3.0);
        let out = end_stop_image(&mag, 1.0, 0.3);
        assert!(out.max_abs() < 1e-12);
    }

    #[test]
    fn end_stop_silent_along_infinite_edge() {
        // A vertical step edge is invariant along y. The vertically running
        // shift of the band tuned to vertical edges (frequency angle 0)
        // compares identical samples, so the statistic vanishes, wrap seam
        // included.
        let plane = Plane::from_fn(64, 64, |x, _| if x < 32 { 0.0 } else { 1.0 });
        let c = cfg(3, 4);
        let engine = StatisticsEngine::new(&ChannelSet::Gray(plane), c).unwrap();
        let scale = 1;
        let orientation = 0;
        let mag = &engine.pyramid(StatChannel::A).magnitude[scale][orientation];
        let es = end_stop_image(mag, 1.0, engine.edge_angle(orientation));
        let band_energy: f64 = mag.data.iter().map(|v| v * v).sum();
        assert!(es.sum() <= 1e-6 * band_energy);
    }

    #[test]
    fn upsample_preserves_mean_and_constants() {
        let src = Plane::from_fn(8, 8, |x, y| (x * 8 + y) as f64);
        let up = upsample_to(&src, 16, 16);
        assert!((up.mean() - src.mean()).abs() < 1e-12);
        let c = upsample_to(&Plane::filled(8, 8, 2.5), 32, 32);
        for v in &c.data {
            assert!((v - 2.5).abs() < 1e-12);
        }
    }
}
