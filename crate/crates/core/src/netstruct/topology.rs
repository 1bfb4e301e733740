//! Betti numbers of binary rasters.
//!
//! Convention throughout: 8-connected foreground, 4-connected background.
//! `b0` counts foreground components; `b1` counts holes, i.e. bounded
//! background components fully enclosed by foreground. The Jordan-consistent
//! duality makes `b0 - b1` equal the Euler characteristic of the digital
//! image, a fact the test suite exploits as an independent oracle.

use crate::imgio::BinaryMask;

use super::components::{connected_components, Connectivity};

/// Component and hole counts of a binary raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BettiPair {
    /// Number of 8-connected foreground components.
    pub b0: usize,
    /// Number of 1-dimensional holes (bounded 4-connected background
    /// components).
    pub b1: usize,
}

/// Computes both Betti numbers.
pub fn betti_numbers(mask: &BinaryMask) -> BettiPair {
    let b0 = connected_components(mask, Connectivity::Eight).count;
    let (w, h) = (mask.width(), mask.height());
    let background = BinaryMask::from_fn(w, h, |r, c| !mask.get(r, c));
    let bg_labels = connected_components(&background, Connectivity::Four);

    let mut touches_border = vec![false; bg_labels.count + 1];
    for r in 0..h {
        for c in 0..w {
            if r == 0 || r == h - 1 || c == 0 || c == w - 1 {
                touches_border[bg_labels.label(r, c) as usize] = true;
            }
        }
    }
    let b1 = (1..=bg_labels.count)
        .filter(|&l| !touches_border[l])
        .count();
    BettiPair { b0, b1 }
}
