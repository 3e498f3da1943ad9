//! Procedurally generated test images.
//!
//! Everything here is deterministic given its arguments, so tests and
//! benchmarks can share fixtures without shipping binary assets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{ColorSpace, ImageBuffer};
use crate::plane::Plane;

/// Uniform white noise in [lo, hi].
pub fn noise(width: usize, height: usize, lo: f64, hi: f64, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Plane {
        width,
        height,
        data: (0..width * height)
            .map(|_| rng.gen_range(lo..hi))
            .collect(),
    }
}

/// Sinusoidal grating with wavevector (cycles_x, cycles_y) cycles per image,
/// values in [0, 1].
pub fn grating(width: usize, height: usize, cycles_x: f64, cycles_y: f64) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        let phase = 2.0 * std::f64::consts::PI
            * (cycles_x * x as f64 / width as f64 + cycles_y * y as f64 / height as f64);
        0.5 + 0.5 * phase.cos()
    })
}

/// Checkerboard with square cells of the given size.
pub fn checkerboard(width: usize, height: usize, cell: usize) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        if (x / cell + y / cell) % 2 == 0 {
            0.1
        } else {
            0.9
        }
    })
}

/// Smooth low-frequency field in [0, 1]; a few incommensurate sinusoids.
pub fn smooth(width: usize, height: usize) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        let fx = x as f64 / width as f64;
        let fy = y as f64 / height as f64;
        let tau = 2.0 * std::f64::consts::PI;
        0.5 + 0.2 * (tau * fx).sin() * (tau * fy).cos()
            + 0.15 * (tau * 2.0 * fx + 0.7).cos()
            + 0.1 * (tau * 3.0 * (fx + fy)).sin()
    })
}

/// Natural-looking texture: 1/f-weighted random sinusoids plus a couple of
/// hard edges and blobs, normalized to [0, 1].
pub fn natural(width: usize, height: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let components: Vec<(f64, f64, f64, f64)> = (0..40)
        .map(|_| {
            let fx: f64 = rng.gen_range(0.5..24.0);
            let fy: f64 = rng.gen_range(0.5..24.0);
            let phase: f64 = rng.gen_range(0.0..tau);
            let amp = 1.0 / (fx.hypot(fy)).max(1.0);
            (fx, fy, phase, amp)
        })
        .collect();
    let blobs: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.02..0.12),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    let mut plane = Plane::from_fn(width, height, |x, y| {
        let fx = x as f64 / width as f64;
        let fy = y as f64 / height as f64;
        let mut v = 0.0;
        for &(cx, cy, phase, amp) in &components {
            v += amp * (tau * (cx * fx + cy * fy) + phase).sin();
        }
        for &(bx, by, sigma, amp) in &blobs {
            let d2 = (fx - bx).powi(2) + (fy - by).powi(2);
            v += amp * (-d2 / (2.0 * sigma * sigma)).exp();
        }
        // A vertical and a diagonal edge give the image sharp structure.
        if fx > 0.62 {
            v += 0.6;
        }
        if fx + fy > 1.3 {
            v -= 0.4;
        }
        v
    });
    let (lo, hi) = (plane.min(), plane.max());
    let range = (hi - lo).max(1e-12);
    for v in &mut plane.data {
        *v = (*v - lo) / range;
    }
    plane
}

/// Zero field with a bright horizontal line segment of the given length
/// centered at (cx, cy), one pixel thick.
pub fn line_segment(width: usize, height: usize, cx: usize, cy: usize, len: usize) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        if y == cy && x >= cx.saturating_sub(len / 2) && x < cx + len.div_ceil(2) {
            1.0
        } else {
            0.0
        }
    })
}

/// Vertical step edge: zeros on the left half, ones on the right.
pub fn step_edge(width: usize, height: usize) -> Plane {
    Plane::from_fn(width, height, |x, _| if x < width / 2 { 0.0 } else { 1.0 })
}

/// Grating whose orientation rotates smoothly across the image; locally
/// directional, globally isotropic.
pub fn swirl_grating(width: usize, height: usize, cycles: f64) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        let fx = x as f64 / width as f64 - 0.5;
        let fy = y as f64 / height as f64 - 0.5;
        let angle = fy.atan2(fx);
        let u = fx * angle.cos() + fy * angle.sin();
        0.5 + 0.5 * (2.0 * std::f64::consts::PI * cycles * u).cos()
    })
}

/// Gaussian blur with a spatial kernel (clamped boundary); handy for
/// sharp-vs-blurred descriptor fixtures.
pub fn blurred(plane: &Plane, sigma: f64) -> Plane {
    let radius = (3.0 * sigma).ceil() as isize;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let wsum: f64 = weights.iter().sum();
    let horizontal = Plane::from_fn(plane.width, plane.height, |x, y| {
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let xi = (x as isize + k as isize - radius).clamp(0, plane.width as isize - 1);
            acc += w * plane.at(xi as usize, y);
        }
        acc / wsum
    });
    Plane::from_fn(plane.width, plane.height, |x, y| {
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let yi = (y as isize + k as isize - radius).clamp(0, plane.height as isize - 1);
            acc += w * horizontal.at(x, yi as usize);
        }
        acc / wsum
    })
}

/// Color texture assembled from three phase-shifted natural planes, in
/// linear RGB.
pub fn natural_color(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let base = natural(width, height, seed);
    let tint_a = natural(width, height, seed.wrapping_add(101));
    let tint_b = natural(width, height, seed.wrapping_add(202));
    let r = Plane {
        width,
        height,
        data: base
            .data
            .iter()
            .zip(&tint_a.data)
            .map(|(b, t)| (0.65 * b + 0.35 * t).clamp(0.0, 1.0))
            .collect(),
    };
    let g = Plane {
        width,
        height,
        data: base
            .data
            .iter()
            .zip(&tint_b.data)
            .map(|(b, t)| (0.7 * b + 0.3 * t).clamp(0.0, 1.0))
            .collect(),
    };
    let b = Plane {
        width,
        height,
        data: base
            .data
            .iter()
            .zip(&tint_a.data)
            .zip(&tint_b.data)
            .map(|((b, t1), t2)| (0.5 * b + 0.25 * t1 + 0.25 * t2).clamp(0.0, 1.0))
            .collect(),
    };
    ImageBuffer::new(ColorSpace::LinearRgb, vec![r, g, b])
}
