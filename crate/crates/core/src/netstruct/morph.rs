//! Disc dilation and erosion.

use crate::imgio::BinaryMask;

/// Integer offsets of the discrete Euclidean disc `dy^2 + dx^2 <= radius^2`.
fn disc_offsets(radius: f64) -> Vec<(i64, i64)> {
    assert!(radius >= 0.0, "disc radius must be non-negative");
    let r = radius.floor() as i64;
    let r2 = radius * radius;
    let mut offsets = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if (dy * dy + dx * dx) as f64 <= r2 {
                offsets.push((dy, dx));
            }
        }
    }
    offsets
}

/// Dilates by the discrete Euclidean disc of the given radius.
///
/// Radius 1 is the 4-neighbour cross plus centre; radius 0 is the identity.
pub fn dilate_disc(mask: &BinaryMask, radius: f64) -> BinaryMask {
    let offsets = disc_offsets(radius);
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut out = vec![false; mask.len()];
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r as usize, c as usize) {
                continue;
            }
            for &(dy, dx) in &offsets {
                let rr = r + dy;
                let cc = c + dx;
                if rr >= 0 && rr < h && cc >= 0 && cc < w {
                    out[(rr * w + cc) as usize] = true;
                }
            }
        }
    }
    BinaryMask::new(mask.width(), mask.height(), out).expect("dilate")
}

/// Erodes by the discrete Euclidean disc; pixels outside the raster count as
/// background, so foreground touching the border erodes away.
pub fn erode_disc(mask: &BinaryMask, radius: f64) -> BinaryMask {
    let offsets = disc_offsets(radius);
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let out = BinaryMask::from_fn(mask.width(), mask.height(), |r, c| {
        offsets.iter().all(|&(dy, dx)| {
            let rr = r as i64 + dy;
            let cc = c as i64 + dx;
            rr >= 0
                && rr < h
                && cc >= 0
                && cc < w
                && mask.get(rr as usize, cc as usize)
        })
    });
    out
}
