//! Real and complex raster planes with circular-boundary sampling.
//!
//! A [`Plane`] is a single channel of image data, row-major `f64`. All
//! spatial operations in this crate treat planes as periodic (circular
//! boundary), which is what makes the Fourier-domain pipeline exactly
//! shift-equivariant.

use rustfft::num_complex::Complex64;

/// Row-major real-valued raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Plane {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn at_mut(&mut self, x: usize, y: usize) -> &mut f64 {
        &mut self.data[y * self.width + x]
    }

    /// Value at integer coordinates wrapped circularly.
    #[inline]
    pub fn at_wrapped(&self, x: isize, y: isize) -> f64 {
        let xi = x.rem_euclid(self.width as isize) as usize;
        let yi = y.rem_euclid(self.height as isize) as usize;
        self.data[yi * self.width + xi]
    }

    /// Bilinear sample with circular wrap on both axes.
    pub fn sample_bilinear_wrap(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let x0 = x0 as isize;
        let y0 = y0 as isize;
        let v00 = self.at_wrapped(x0, y0);
        let v10 = self.at_wrapped(x0 + 1, y0);
        let v01 = self.at_wrapped(x0, y0 + 1);
        let v11 = self.at_wrapped(x0 + 1, y0 + 1);
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    /// Bilinear sample with clamp-to-edge on both axes.
    pub fn sample_bilinear_clamp(&self, x: f64, y: f64) -> f64 {
        let cx = x.clamp(0.0, (self.width - 1) as f64);
        let cy = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = cx.floor();
        let y0 = cy.floor();
        let fx = cx - x0;
        let fy = cy - y0;
        let x0 = x0 as usize;
        let y0 = y0 as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let v00 = self.at(x0, y0);
        let v10 = self.at(x1, y0);
        let v01 = self.at(x0, y1);
        let v11 = self.at(x1, y1);
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn scale_in_place(&mut self, k: f64) {
        for v in &mut self.data {
            *v *= k;
        }
    }

    pub fn add_assign(&mut self, other: &Plane) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Pointwise product into a new plane.
    pub fn mul(&self, other: &Plane) -> Plane {
        debug_assert_eq!(self.data.len(), other.data.len());
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Circular shift by (dx, dy): output(x, y) = input(x - dx, y - dy).
    pub fn shifted(&self, dx: isize, dy: isize) -> Plane {
        Plane::from_fn(self.width, self.height, |x, y| {
            self.at_wrapped(x as isize - dx, y as isize - dy)
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Row-major complex-valued raster, used for Fourier spectra and oriented
/// band images.
#[derive(Debug, Clone)]
pub struct ComplexPlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

impl ComplexPlane {
    pub fn zeros(width: usize, height: usize) -> Self {
        ComplexPlane {
            width,
            height,
            data: vec![Complex64::new(0.0, 0.0); width * height],
        }
    }

    pub fn from_real(plane: &Plane) -> Self {
        ComplexPlane {
            width: plane.width,
            height: plane.height,
            data: plane.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.data[y * self.width + x]
    }

    pub fn real(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|c| c.re).collect(),
        }
    }

    pub fn magnitude(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|c| c.norm()).collect(),
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}
