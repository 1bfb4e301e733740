//! Synthetic vessel imagery with analytic ground truth.
//!
//! Every generator is deterministic: the same parameters (and seed, where one
//! applies) always produce the same rasters, so pipelines can be exercised
//! and regression-tested without clinical data.

use crate::imgio::{BinaryMask, GrayImage};

/// A generated grayscale image paired with its analytic vessel mask.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub image: GrayImage,
    pub mask: BinaryMask,
}

/// SplitMix64 generator; tiny, seedable and stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Vertical ridge with Gaussian cross-section `exp(-d^2 / (2 sigma^2))`
/// centred on column `center`.
pub fn ridge(width: usize, height: usize, center: f64, sigma: f64) -> GrayImage {
    GrayImage::from_fn(width, height, |_, col| {
        let d = col as f64 - center;
        (-d * d / (2.0 * sigma * sigma)).exp()
    })
}

/// Vertical solid tube of half-width `radius` with a half-pixel anti-aliased
/// edge; mask is the analytic `|d| <= radius` region.
pub fn tube(
    width: usize,
    height: usize,
    center: f64,
    radius: f64,
    foreground: f64,
    background: f64,
) -> Phantom {
    let image = GrayImage::from_fn(width, height, |_, col| {
        let d = (col as f64 - center).abs();
        let coverage = (radius + 0.5 - d).clamp(0.0, 1.0);
        background + (foreground - background) * coverage
    });
    let mask = BinaryMask::from_fn(width, height, |_, col| {
        (col as f64 - center).abs() <= radius
    });
    Phantom { image, mask }
}

/// Square ring of line thickness `thickness` whose outer edge is inset by
/// `margin` pixels from the raster border.
pub fn square_ring(side: usize, margin: usize, thickness: usize) -> BinaryMask {
    let hi = side - 1 - margin;
    BinaryMask::from_fn(side, side, |r, c| {
        let inside = r >= margin && r <= hi && c >= margin && c <= hi;
        let core = r >= margin + thickness
            && r + thickness <= hi
            && c >= margin + thickness
            && c + thickness <= hi;
        inside && !core
    })
}

/// Circle ring (annulus) centred in the raster.
pub fn circle_ring(side: usize, radius: f64, thickness: f64) -> BinaryMask {
    let c = (side as f64 - 1.0) / 2.0;
    BinaryMask::from_fn(side, side, |r, col| {
        let dy = r as f64 - c;
        let dx = col as f64 - c;
        let d = (dy * dy + dx * dx).sqrt();
        (d - radius).abs() <= thickness / 2.0
    })
}

/// Grid of horizontal and vertical vessel lines with the given cell
/// `spacing` and line `thickness`, inset by `offset` from the border.
pub fn grid(
    width: usize,
    height: usize,
    spacing: usize,
    thickness: usize,
    offset: usize,
) -> BinaryMask {
    BinaryMask::from_fn(width, height, |r, c| {
        let on = |v: usize| v >= offset && (v - offset) % spacing < thickness;
        let in_row_band = r >= offset && r < height.saturating_sub(offset);
        let in_col_band = c >= offset && c < width.saturating_sub(offset);
        (on(r) && in_col_band) || (on(c) && in_row_band)
    })
}

/// Deterministic branching vessel tree with anti-aliased intensity and an
/// analytic mask. `root_radius` sets the trunk half-width; children shrink
/// geometrically until the radius drops below half a pixel or `depth` runs
/// out.
pub fn tree(
    size: usize,
    depth: usize,
    root_radius: f64,
    foreground: f64,
    background: f64,
) -> Phantom {
    let mut segments: Vec<(f64, f64, f64, f64, f64)> = Vec::new();
    let trunk_len = size as f64 * 0.28;
    let start = (size as f64 * 0.92, size as f64 * 0.5);
    grow(
        &mut segments,
        start,
        -std::f64::consts::FRAC_PI_2,
        trunk_len,
        root_radius,
        depth,
    );

    // signed distance to the nearest segment surface
    let dist = |row: f64, col: f64| -> f64 {
        let mut best = f64::INFINITY;
        for &(r0, c0, r1, c1, rad) in &segments {
            let vy = r1 - r0;
            let vx = c1 - c0;
            let len2 = vy * vy + vx * vx;
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((row - r0) * vy + (col - c0) * vx) / len2).clamp(0.0, 1.0)
            };
            let dy = row - (r0 + t * vy);
            let dx = col - (c0 + t * vx);
            let d = (dy * dy + dx * dx).sqrt() - rad;
            if d < best {
                best = d;
            }
        }
        best
    };

    let image = GrayImage::from_fn(size, size, |r, c| {
        let d = dist(r as f64, c as f64);
        let coverage = (0.5 - d).clamp(0.0, 1.0);
        background + (foreground - background) * coverage
    });
    let mask = BinaryMask::from_fn(size, size, |r, c| dist(r as f64, c as f64) <= 0.0);
    Phantom { image, mask }
}

fn grow(
    segments: &mut Vec<(f64, f64, f64, f64, f64)>,
    from: (f64, f64),
    angle: f64,
    length: f64,
    radius: f64,
    depth: usize,
) {
    if depth == 0 || radius < 0.5 || length < 2.0 {
        return;
    }
    let to = (from.0 + angle.sin() * length, from.1 + angle.cos() * length);
    segments.push((from.0, from.1, to.0, to.1, radius));
    let spread = 0.55;
    grow(
        segments,
        to,
        angle - spread,
        length * 0.72,
        radius * 0.78,
        depth - 1,
    );
    grow(
        segments,
        to,
        angle + spread,
        length * 0.72,
        radius * 0.78,
        depth - 1,
    );
}

/// Bernoulli mask: each pixel independently foreground with probability
/// `density`.
pub fn random_mask(width: usize, height: usize, density: f64, seed: u64) -> BinaryMask {
    let mut rng = Rng::new(seed);
    let data = (0..width * height)
        .map(|_| rng.next_f64() < density)
        .collect();
    BinaryMask::new(width, height, data).expect("random mask")
}

/// Blobby mask: thresholded box-smoothed noise. Produces organic connected
/// regions with holes, useful for topology fuzzing.
pub fn random_blobs(width: usize, height: usize, seed: u64) -> BinaryMask {
    let mut rng = Rng::new(seed);
    let mut field: Vec<u32> = (0..width * height)
        .map(|_| (rng.next_u64() % 1000) as u32)
        .collect();
    for _ in 0..3 {
        let src = field.clone();
        for r in 0..height {
            for c in 0..width {
                let mut sum = 0u32;
                let mut n = 0u32;
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let rr = r as i64 + dr;
                        let cc = c as i64 + dc;
                        if rr >= 0 && rr < height as i64 && cc >= 0 && cc < width as i64 {
                            sum += src[rr as usize * width + cc as usize];
                            n += 1;
                        }
                    }
                }
                field[r * width + c] = sum / n;
            }
        }
    }
    let data = field.iter().map(|&v| v > 499).collect();
    BinaryMask::new(width, height, data).expect("blob mask")
}

/// Adds uniform noise of the given amplitude to an image, clamped to `[0, 1]`.
pub fn with_noise(img: &GrayImage, amplitude: f64, seed: u64) -> GrayImage {
    let mut rng = Rng::new(seed);
    let data = img
        .data()
        .iter()
        .map(|&v| (v + amplitude * (rng.next_f64() * 2.0 - 1.0)).clamp(0.0, 1.0))
        .collect();
    GrayImage::new(img.width(), img.height(), data).expect("noisy image")
}
