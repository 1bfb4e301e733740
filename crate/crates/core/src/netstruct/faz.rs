//! Foveal avascular zone detection: the largest bounded face of a skeleton.

use serde::Serialize;
use thiserror::Error;

use crate::imgio::BinaryMask;

use super::components::{connected_components, Connectivity};
use super::skeleton::Skeleton;

/// The largest interior face of a vessel skeleton.
///
/// `area` is the face's pixel count; `perimeter` is the chain-code length of
/// the traced outer contour (axis steps count 1, diagonal steps sqrt(2));
/// `boundary` is the closed contour pixel sequence without a closing repeat.
#[derive(Debug, Clone, Serialize)]
pub struct FazRegion {
    pub area: usize,
    pub perimeter: f64,
    pub boundary: Vec<(usize, usize)>,
    pub face_id: usize,
}

impl FazRegion {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("faz serialisation")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FazError {
    #[error("skeleton has no bounded face")]
    NoBoundedFace,
}

/// Finds the largest bounded face of the skeleton raster.
///
/// Faces are 4-connected background components; components touching the
/// raster border are unbounded and discarded. A skeleton whose boundary is
/// disconnected merges its face with a neighbour; the merged face is still
/// returned as long as it stays bounded.
pub fn detect_faz(skel: &Skeleton) -> Result<FazRegion, FazError> {
    let mask = skel.as_mask();
    let (w, h) = (mask.width(), mask.height());
    let background = BinaryMask::from_fn(w, h, |r, c| !mask.get(r, c));
    let labels = connected_components(&background, Connectivity::Four);

    let mut touches_border = vec![false; labels.count + 1];
    for r in 0..h {
        for c in 0..w {
            if r == 0 || r == h - 1 || c == 0 || c == w - 1 {
                touches_border[labels.label(r, c) as usize] = true;
            }
        }
    }

    let sizes = labels.sizes();
    let best = (1..=labels.count)
        .filter(|&l| !touches_border[l])
        .max_by_key(|&l| (sizes[l - 1], std::cmp::Reverse(l)));
    let Some(face_label) = best else {
        return Err(FazError::NoBoundedFace);
    };

    let region = BinaryMask::from_fn(w, h, |r, c| labels.label(r, c) == face_label as u32);
    let boundary = trace_contour(&region);
    let perimeter = contour_length(&boundary);
    Ok(FazRegion {
        area: sizes[face_label - 1],
        perimeter,
        boundary,
        face_id: face_label,
    })
}

/// Moore-neighbour contour tracing, starting from the topmost-leftmost
/// region pixel. The walk stops when it is about to retraverse its first
/// directed step, so pinched contours that revisit pixels terminate
/// correctly.
fn trace_contour(region: &BinaryMask) -> Vec<(usize, usize)> {
    let (w, h) = (region.width() as i64, region.height() as i64);
    let at =
        |r: i64, c: i64| r >= 0 && r < h && c >= 0 && c < w && region.get(r as usize, c as usize);

    let mut start = None;
    'outer: for r in 0..h {
        for c in 0..w {
            if at(r, c) {
                start = Some((r, c));
                break 'outer;
            }
        }
    }
    let start = start.expect("contour tracing requires a non-empty region");

    // Moore neighbourhood in rotation order beginning west
    const DIRS: [(i64, i64); 8] = [
        (0, -1),
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
        (1, 0),
        (1, -1),
    ];

    let scan = |p: (i64, i64), from: usize| -> Option<usize> {
        (0..8).map(|s| (from + s) % 8).find(|&dir| {
            let (dy, dx) = DIRS[dir];
            at(p.0 + dy, p.1 + dx)
        })
    };

    // start is topmost-leftmost: both W and N are background, so scanning
    // from NW covers every neighbour
    let Some(first_dir) = scan(start, 1) else {
        return vec![(start.0 as usize, start.1 as usize)];
    };

    let mut contour = vec![(start.0 as usize, start.1 as usize)];
    let mut pos = (start.0 + DIRS[first_dir].0, start.1 + DIRS[first_dir].1);
    let mut entry = first_dir;
    let cap = (w * h * 8) as usize;

    for _ in 0..cap {
        // resume scanning just past the backtrack position
        let from = (entry + 5) % 8;
        let dir = scan(pos, from).expect("contour pixel lost its neighbours");
        if pos == start && dir == first_dir {
            return contour;
        }
        contour.push((pos.0 as usize, pos.1 as usize));
        pos = (pos.0 + DIRS[dir].0, pos.1 + DIRS[dir].1);
        entry = dir;
    }
    unreachable!("contour walk failed to close");
}

fn contour_length(contour: &[(usize, usize)]) -> f64 {
    if contour.len() < 2 {
        return 0.0;
    }
    let mut length = 0.0;
    for i in 0..contour.len() {
        let (r0, c0) = contour[i];
        let (r1, c1) = contour[(i + 1) % contour.len()];
        let diag = r0 != r1 && c0 != c1;
        length += if diag { std::f64::consts::SQRT_2 } else { 1.0 };
    }
    length
}
