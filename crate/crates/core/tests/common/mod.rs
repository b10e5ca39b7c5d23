//! Seeded synthetic fixtures shared by the integration suites.
#![allow(dead_code)]

use gsti::video_io::{FrameRate, LumaVideo, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

pub fn fps(n: u64) -> FrameRate {
    FrameRate::integer(n).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth random texture: coarse uniform noise bilinearly upsampled by `cell`.
pub fn texture(width: usize, height: usize, cell: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let (gw, gh) = (width / cell + 2, height / cell + 2);
    let grid: Vec<f64> = (0..gw * gh).map(|_| r.gen_range(16.0..240.0)).collect();
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64 / cell as f64, y as f64 / cell as f64);
            let (ix, iy) = (fx as usize, fy as usize);
            let (ax, ay) = (fx - ix as f64, fy - iy as f64);
            let g = |i: usize, j: usize| grid[j * gw + i];
            let top = g(ix, iy) * (1.0 - ax) + g(ix + 1, iy) * ax;
            let bottom = g(ix, iy + 1) * (1.0 - ax) + g(ix + 1, iy + 1) * ax;
            out.push(top * (1.0 - ay) + bottom * ay);
        }
    }
    out
}

/// A texture panning right by `speed` pixels per frame (wrapping).
pub fn moving_texture(width: usize, height: usize, frames: usize, rate: u64, speed: usize, seed: u64) -> LumaVideo<f64> {
    panning_texture(width, height, frames, rate, speed, 6, seed)
}

/// [`moving_texture`] with an explicit texture cell size.
pub fn panning_texture(width: usize, height: usize, frames: usize, rate: u64, speed: usize, cell: usize, seed: u64) -> LumaVideo<f64> {
    let tw = width + speed * frames;
    let tex = texture(tw, height, cell, seed);
    let frames = (0..frames)
        .map(|t| Plane::from_fn(width, height, |x, y| tex[y * tw + (x + t * speed) % tw]))
        .collect();
    LumaVideo::new(frames, fps(rate)).unwrap()
}

/// Horizontal gradient with a bright bar sweeping across.
pub fn moving_gradient(width: usize, height: usize, frames: usize, rate: u64) -> LumaVideo<f64> {
    let frames = (0..frames)
        .map(|t| {
            Plane::from_fn(width, height, |x, y| {
                let bar = ((x + 3 * t) % width) < width / 6;
                let base = 40.0 + 150.0 * x as f64 / width as f64 + 10.0 * (y as f64 / height as f64);
                if bar { base + 50.0 } else { base }
            })
        })
        .collect();
    LumaVideo::new(frames, fps(rate)).unwrap()
}

/// Each frame repeated `r` times (frame `t` shows source frame `r*floor(t/r)`),
/// emulating a lower capture rate inside the same container rate.
pub fn hold_frames(video: &LumaVideo<f64>, r: usize) -> LumaVideo<f64> {
    let frames = (0..video.frame_count()).map(|t| video.frames()[t / r * r].clone()).collect();
    LumaVideo::new(frames, video.fps()).unwrap()
}

pub fn add_noise(video: &LumaVideo<f64>, sigma: f64, seed: u64) -> LumaVideo<f64> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let frames = video
        .frames()
        .iter()
        .map(|f| f.map(|v| v + normal.sample(&mut r)))
        .collect();
    LumaVideo::new(frames, video.fps()).unwrap()
}

pub fn offset(video: &LumaVideo<f64>, delta: f64) -> LumaVideo<f64> {
    let frames = video.frames().iter().map(|f| f.map(|v| v + delta)).collect();
    LumaVideo::new(frames, video.fps()).unwrap()
}

/// Zero-mean GGD samples: `α · sign · G^(1/β)` with `G ~ Gamma(1/β, 1)`.
pub fn ggd_samples(alpha: f64, beta: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let gamma = Gamma::new(1.0 / beta, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let mag = alpha * gamma.sample(&mut r).powf(1.0 / beta);
            if r.gen::<bool>() { mag } else { -mag }
        })
        .collect()
}

pub fn gaussian_samples(sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| normal.sample(&mut r)).collect()
}

/// Encodes 8-bit luma frames as a 4:2:0 Y4M stream with neutral chroma.
pub fn y4m_bytes(video: &LumaVideo<f64>) -> Vec<u8> {
    let (w, h) = (video.width(), video.height());
    let fps = video.fps();
    let mut out = format!("YUV4MPEG2 W{w} H{h} F{}:{} Ip A1:1 C420jpeg\n", fps.numer(), fps.denom()).into_bytes();
    let chroma = 2 * w.div_ceil(2) * h.div_ceil(2);
    for f in video.frames() {
        out.extend_from_slice(b"FRAME\n");
        out.extend(f.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
        out.extend(std::iter::repeat_n(128u8, chroma));
    }
    out
}

/// Raw yuv420p bytes of the same frames.
pub fn yuv_bytes(video: &LumaVideo<f64>) -> Vec<u8> {
    let (w, h) = (video.width(), video.height());
    let chroma = 2 * w.div_ceil(2) * h.div_ceil(2);
    let mut out = Vec::new();
    for f in video.frames() {
        out.extend(f.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
        out.extend(std::iter::repeat_n(128u8, chroma));
    }
    out
}

/// Rounds samples to 8-bit integers, as they would be after a file round trip.
pub fn quantize(video: &LumaVideo<f64>) -> LumaVideo<f64> {
    let frames = video.frames().iter().map(|f| f.map(|v| v.round().clamp(0.0, 255.0))).collect();
    LumaVideo::new(frames, video.fps()).unwrap()
}
