//! Image containers, PNG I/O, and color transforms.
//!
//! Images load as linear-light planes (the sRGB electro-optical transfer
//! function is decoded on load) and save back through the matching encode
//! into 16-bit PNG. The opponent transform used by the encoding model is
//! CIELAB-based: achromatic = L*/100, red_green = a*/128, blue_yellow =
//! b*/128, with a fixed linear matrix available for linearity testing.

use std::path::Path;

use image::{DynamicImage, ImageBuffer as RawBuffer, Luma, Rgb};

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Color space tag of an [`ImageBuffer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    /// 8/16-bit sRGB-encoded data as stored in files. Never held in planes;
    /// decode happens on load.
    Srgb8,
    /// Linear-light RGB in [0, 1].
    LinearRgb,
    /// Opponent channels (achromatic, red-green, blue-yellow).
    Opponent,
    /// Single linear-light plane in [0, 1].
    Gray,
}

impl std::fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ColorSpace::Srgb8 => "sRGB8",
            ColorSpace::LinearRgb => "linearRGB",
            ColorSpace::Opponent => "opponent",
            ColorSpace::Gray => "gray",
        };
        f.write_str(s)
    }
}

/// Planar floating-point raster, 1-3 channels.
#[derive(Debug, Clone)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub space: ColorSpace,
    /// One plane per channel, each width*height.
    pub planes: Vec<Plane>,
}

impl ImageBuffer {
    pub fn new(space: ColorSpace, planes: Vec<Plane>) -> Self {
        assert!(!planes.is_empty() && planes.len() <= 3);
        let (w, h) = (planes[0].width, planes[0].height);
        assert!(planes.iter().all(|p| p.width == w && p.height == h));
        ImageBuffer {
            width: w,
            height: h,
            space,
            planes,
        }
    }

    pub fn from_gray(plane: Plane) -> Self {
        ImageBuffer::new(ColorSpace::Gray, vec![plane])
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn is_finite(&self) -> bool {
        self.planes.iter().all(|p| p.is_finite())
    }

    fn expect_space(&self, space: ColorSpace) -> Result<()> {
        if self.space == space {
            Ok(())
        } else {
            Err(Error::WrongColorSpace {
                expected: space.to_string(),
                actual: self.space.to_string(),
            })
        }
    }
}

/// Opponent-channel image: achromatic, red-green, blue-yellow.
#[derive(Debug, Clone)]
pub struct OpponentImage {
    pub achromatic: Plane,
    pub red_green: Plane,
    pub blue_yellow: Plane,
}

impl OpponentImage {
    pub fn width(&self) -> usize {
        self.achromatic.width
    }

    pub fn height(&self) -> usize {
        self.achromatic.height
    }

    pub fn planes(&self) -> [&Plane; 3] {
        [&self.achromatic, &self.red_green, &self.blue_yellow]
    }
}

/// sRGB electro-optical decode (encoded [0,1] -> linear [0,1]).
#[inline]
pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// sRGB opto-electronic encode (linear [0,1] -> encoded [0,1]).
#[inline]
pub fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Load an 8- or 16-bit PNG as a linear-light buffer (gray or RGB).
pub fn load_image(path: &Path) -> Result<ImageBuffer> {
    let img = image::open(path).map_err(|source| Error::ImageRead {
        path: path.to_path_buf(),
        source,
    })?;
    let unsupported = |detail: &str| Error::UnsupportedImage {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => {
            let plane = Plane {
                width: w,
                height: h,
                data: buf
                    .pixels()
                    .map(|p| srgb_to_linear(p[0] as f64 / 255.0))
                    .collect(),
            };
            Ok(ImageBuffer::new(ColorSpace::Gray, vec![plane]))
        }
        DynamicImage::ImageLuma16(buf) => {
            let plane = Plane {
                width: w,
                height: h,
                data: buf
                    .pixels()
                    .map(|p| srgb_to_linear(p[0] as f64 / 65535.0))
                    .collect(),
            };
            Ok(ImageBuffer::new(ColorSpace::Gray, vec![plane]))
        }
        DynamicImage::ImageRgb8(buf) => {
            let mut planes = vec![Plane::zeros(w, h); 3];
            for (i, p) in buf.pixels().enumerate() {
                for c in 0..3 {
                    planes[c].data[i] = srgb_to_linear(p[c] as f64 / 255.0);
                }
            }
            Ok(ImageBuffer::new(ColorSpace::LinearRgb, planes))
        }
        DynamicImage::ImageRgb16(buf) => {
            let mut planes = vec![Plane::zeros(w, h); 3];
            for (i, p) in buf.pixels().enumerate() {
                for c in 0..3 {
                    planes[c].data[i] = srgb_to_linear(p[c] as f64 / 65535.0);
                }
            }
            Ok(ImageBuffer::new(ColorSpace::LinearRgb, planes))
        }
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLumaA16(_) => {
            Err(unsupported("alpha channels are not supported"))
        }
        DynamicImage::ImageRgba8(_) | DynamicImage::ImageRgba16(_) => {
            Err(unsupported("alpha channels are not supported"))
        }
        other => Err(unsupported(&format!(
            "unhandled pixel format {:?}",
            other.color()
        ))),
    }
}

/// Write a linear gray or RGB buffer as a 16-bit PNG, clamping to [0, 1]
/// before the sRGB encode.
pub fn save_image(img: &ImageBuffer, path: &Path) -> Result<()> {
    if !img.is_finite() {
        return Err(Error::InvalidConfig(
            "refusing to save buffer with non-finite values".into(),
        ));
    }
    let encode = |v: f64| -> u16 {
        let e = linear_to_srgb(v.clamp(0.0, 1.0));
        (e * 65535.0).round().clamp(0.0, 65535.0) as u16
    };
    let write_err = |source| Error::ImageWrite {
        path: path.to_path_buf(),
        source,
    };
    match img.space {
        ColorSpace::Gray => {
            let mut out: RawBuffer<Luma<u16>, Vec<u16>> =
                RawBuffer::new(img.width as u32, img.height as u32);
            for (i, px) in out.pixels_mut().enumerate() {
                px[0] = encode(img.planes[0].data[i]);
            }
            out.save(path).map_err(write_err)
        }
        ColorSpace::LinearRgb => {
            let mut out: RawBuffer<Rgb<u16>, Vec<u16>> =
                RawBuffer::new(img.width as u32, img.height as u32);
            for (i, px) in out.pixels_mut().enumerate() {
                for c in 0..3 {
                    px[c] = encode(img.planes[c].data[i]);
                }
            }
            out.save(path).map_err(write_err)
        }
        other => Err(Error::WrongColorSpace {
            expected: "gray or linearRGB".into(),
            actual: other.to_string(),
        }),
    }
}

/// Rec. 709 luminance of a linear RGB buffer: L = 0.2126 R + 0.7152 G + 0.0722 B.
pub fn to_luminance(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_space(ColorSpace::LinearRgb)?;
    let [r, g, b] = [&img.planes[0], &img.planes[1], &img.planes[2]];
    let data = r
        .data
        .iter()
        .zip(&g.data)
        .zip(&b.data)
        .map(|((r, g), b)| 0.2126 * r + 0.7152 * g + 0.0722 * b)
        .collect();
    Ok(ImageBuffer::new(
        ColorSpace::Gray,
        vec![Plane {
            width: img.width,
            height: img.height,
            data,
        }],
    ))
}

/// Opponent transform selection. `Cielab` is the standard pipeline; `Linear`
/// swaps in a fixed linear matrix so affine-combination tests can bypass the
/// cube-root lightness stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OpponentMode {
    #[default]
    Cielab,
    Linear,
}

// Linear sRGB -> XYZ (D65).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];
const WHITE_XYZ: [f64; 3] = [0.95047, 1.0, 1.08883];

const LAB_DELTA: f64 = 6.0 / 29.0;

#[inline]
fn lab_f(t: f64) -> f64 {
    let d3 = LAB_DELTA * LAB_DELTA * LAB_DELTA;
    if t > d3 {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

/// Derivative of [`lab_f`], needed by the synthesis adjoint.
#[inline]
pub(crate) fn lab_f_prime(t: f64) -> f64 {
    let d3 = LAB_DELTA * LAB_DELTA * LAB_DELTA;
    if t > d3 {
        (1.0 / 3.0) * t.cbrt().powi(-2)
    } else {
        1.0 / (3.0 * LAB_DELTA * LAB_DELTA)
    }
}

/// CIELAB opponent coordinates of one linear RGB pixel, already scaled to
/// (L*/100, a*/128, b*/128).
#[inline]
pub(crate) fn rgb_to_opponent_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let x = RGB_TO_XYZ[0][0] * r + RGB_TO_XYZ[0][1] * g + RGB_TO_XYZ[0][2] * b;
    let y = RGB_TO_XYZ[1][0] * r + RGB_TO_XYZ[1][1] * g + RGB_TO_XYZ[1][2] * b;
    let z = RGB_TO_XYZ[2][0] * r + RGB_TO_XYZ[2][1] * g + RGB_TO_XYZ[2][2] * b;
    let fx = lab_f(x / WHITE_XYZ[0]);
    let fy = lab_f(y / WHITE_XYZ[1]);
    let fz = lab_f(z / WHITE_XYZ[2]);
    let l = 116.0 * fy - 16.0;
    let a = 500.0 * (fx - fy);
    let bb = 200.0 * (fy - fz);
    (l / 100.0, a / 128.0, bb / 128.0)
}

// Fixed matrix for the linear test mode. Rows map gray inputs to zero on
// both opponent axes.
const LINEAR_OPPONENT: [[f64; 3]; 3] = [
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [1.0, -1.0, 0.0],
    [0.5, 0.5, -1.0],
];

/// Convert a linear RGB buffer to opponent channels.
pub fn to_opponent(img: &ImageBuffer) -> Result<OpponentImage> {
    to_opponent_mode(img, OpponentMode::Cielab)
}

/// Opponent conversion with an explicit mode.
pub fn to_opponent_mode(img: &ImageBuffer, mode: OpponentMode) -> Result<OpponentImage> {
    img.expect_space(ColorSpace::LinearRgb)?;
    let n = img.width * img.height;
    let mut a = Plane::zeros(img.width, img.height);
    let mut rg = Plane::zeros(img.width, img.height);
    let mut by = Plane::zeros(img.width, img.height);
    for i in 0..n {
        let (r, g, b) = (
            img.planes[0].data[i],
            img.planes[1].data[i],
            img.planes[2].data[i],
        );
        let (va, vrg, vby) = match mode {
            OpponentMode::Cielab => rgb_to_opponent_pixel(r, g, b),
            OpponentMode::Linear => (
                LINEAR_OPPONENT[0][0] * r + LINEAR_OPPONENT[0][1] * g + LINEAR_OPPONENT[0][2] * b,
                LINEAR_OPPONENT[1][0] * r + LINEAR_OPPONENT[1][1] * g + LINEAR_OPPONENT[1][2] * b,
                LINEAR_OPPONENT[2][0] * r + LINEAR_OPPONENT[2][1] * g + LINEAR_OPPONENT[2][2] * b,
            ),
        };
        a.data[i] = va;
        rg.data[i] = vrg;
        by.data[i] = vby;
    }
    Ok(OpponentImage {
        achromatic: a,
        red_green: rg,
        blue_yellow: by,
    })
}

/// Adjoint of the CIELAB opponent transform at one pixel: given gradients
/// with respect to the (scaled) opponent outputs, accumulate gradients with
/// respect to linear R, G, B.
pub(crate) fn opponent_pixel_adjoint(
    r: f64,
    g: f64,
    b: f64,
    g_a: f64,
    g_rg: f64,
    g_by: f64,
) -> (f64, f64, f64) {
    let x = RGB_TO_XYZ[0][0] * r + RGB_TO_XYZ[0][1] * g + RGB_TO_XYZ[0][2] * b;
    let y = RGB_TO_XYZ[1][0] * r + RGB_TO_XYZ[1][1] * g + RGB_TO_XYZ[1][2] * b;
    let z = RGB_TO_XYZ[2][0] * r + RGB_TO_XYZ[2][1] * g + RGB_TO_XYZ[2][2] * b;
    // d(out)/d(fx, fy, fz) from the Lab definitions and the /100, /128 scales.
    let g_fy = g_a * 116.0 / 100.0 + g_rg * (-500.0 / 128.0) + g_by * (200.0 / 128.0);
    let g_fx = g_rg * (500.0 / 128.0);
    let g_fz = g_by * (-200.0 / 128.0);
    let g_x = g_fx * lab_f_prime(x / WHITE_XYZ[0]) / WHITE_XYZ[0];
    let g_y = g_fy * lab_f_prime(y / WHITE_XYZ[1]) / WHITE_XYZ[1];
    let g_z = g_fz * lab_f_prime(z / WHITE_XYZ[2]) / WHITE_XYZ[2];
    let g_r = RGB_TO_XYZ[0][0] * g_x + RGB_TO_XYZ[1][0] * g_y + RGB_TO_XYZ[2][0] * g_z;
    let g_g = RGB_TO_XYZ[0][1] * g_x + RGB_TO_XYZ[1][1] * g_y + RGB_TO_XYZ[2][1] * g_z;
    let g_b = RGB_TO_XYZ[0][2] * g_x + RGB_TO_XYZ[1][2] * g_y + RGB_TO_XYZ[2][2] * g_z;
    (g_r, g_g, g_b)
}
