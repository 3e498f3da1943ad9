//! 2D FFT on planes, plus the spectrum crop/pad used for pyramid decimation.
//!
//! Forward transforms are unnormalized; `ifft2` carries the 1/(W*H) factor.
//! Plans are cached per length for reuse across bands and iterations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::plane::{ComplexPlane, Plane};

struct PlanCache {
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
    planner: FftPlanner<f64>,
}

fn cache() -> &'static Mutex<PlanCache> {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    CACHE.get_or_init(|| {
        Mutex::new(PlanCache {
            forward: HashMap::new(),
            inverse: HashMap::new(),
            planner: FftPlanner::new(),
        })
    })
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut c = cache().lock().unwrap();
    let c = &mut *c;
    let map = if inverse { &mut c.inverse } else { &mut c.forward };
    map.entry(n)
        .or_insert_with(|| {
            if inverse {
                c.planner.plan_fft_inverse(n)
            } else {
                c.planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transpose(data: &[Complex64], width: usize, height: usize, out: &mut Vec<Complex64>) {
    out.clear();
    out.reserve(width * height);
    for x in 0..width {
        for y in 0..height {
            out.push(data[y * width + x]);
        }
    }
}

/// In-place 2D transform of `buf` interpreted as `height` rows of `width`.
fn fft2_in_place(buf: &mut Vec<Complex64>, width: usize, height: usize, inverse: bool) {
    let row_plan = plan(width, inverse);
    for row in buf.chunks_exact_mut(width) {
        row_plan.process(row);
    }
    let mut t = Vec::new();
    transpose(buf, width, height, &mut t);
    let col_plan = plan(height, inverse);
    for col in t.chunks_exact_mut(height) {
        col_plan.process(col);
    }
    transpose(&t, height, width, buf);
}

/// Unnormalized forward 2D FFT of a real plane.
pub fn fft2(plane: &Plane) -> ComplexPlane {
    let mut cp = ComplexPlane::from_real(plane);
    fft2_in_place(&mut cp.data, cp.width, cp.height, false);
    cp
}

/// Unnormalized forward 2D FFT of a complex plane.
pub fn fft2_complex(input: &ComplexPlane) -> ComplexPlane {
    let mut cp = input.clone();
    fft2_in_place(&mut cp.data, cp.width, cp.height, false);
    cp
}

/// Inverse 2D FFT, normalized by 1/(W*H).
pub fn ifft2(spectrum: &ComplexPlane) -> ComplexPlane {
    let mut cp = spectrum.clone();
    fft2_in_place(&mut cp.data, cp.width, cp.height, true);
    let norm = 1.0 / (cp.width * cp.height) as f64;
    for v in &mut cp.data {
        *v *= norm;
    }
    cp
}

/// Signed frequency (in cycles per image) of FFT bin `k` of an axis of
/// length `n`. For even `n` the shared bin n/2 is reported as +n/2.
#[inline]
pub fn signed_freq(k: usize, n: usize) -> isize {
    if k <= n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Angular frequency in radians/sample for bin `k` of axis length `n`.
#[inline]
pub fn omega(k: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * signed_freq(k, n) as f64 / n as f64
}

/// Central crop of a spectrum to (w2, h2), keeping bins by signed frequency
/// and scaling by `factor`. With factor = (w2*h2)/(w*h) this implements
/// exact spatial decimation of a signal whose content fits the new band.
pub fn crop_spectrum(src: &ComplexPlane, w2: usize, h2: usize, factor: f64) -> ComplexPlane {
    let mut out = ComplexPlane::zeros(w2, h2);
    for y2 in 0..h2 {
        let fy = signed_freq(y2, h2);
        let y = fy.rem_euclid(src.height as isize) as usize;
        for x2 in 0..w2 {
            let fx = signed_freq(x2, w2);
            let x = fx.rem_euclid(src.width as isize) as usize;
            out.data[y2 * w2 + x2] = src.data[y * src.width + x] * factor;
        }
    }
    out
}

/// Embed a small spectrum into a (w, h) spectrum (zeros elsewhere), scaling
/// by `factor`. This is the adjoint of [`crop_spectrum`] at the same factor,
/// and its inverse when factor is the reciprocal.
pub fn pad_spectrum(src: &ComplexPlane, w: usize, h: usize, factor: f64) -> ComplexPlane {
    let mut out = ComplexPlane::zeros(w, h);
    for y2 in 0..src.height {
        let fy = signed_freq(y2, src.height);
        let y = fy.rem_euclid(h as isize) as usize;
        for x2 in 0..src.width {
            let fx = signed_freq(x2, src.width);
            let x = fx.rem_euclid(w as isize) as usize;
            out.data[y * w + x] = src.data[y2 * src.width + x2] * factor;
        }
    }
    out
}
