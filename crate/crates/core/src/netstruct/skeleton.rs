//! Homotopy-preserving thinning to a 1-pixel-wide skeleton.
//!
//! Pixels are deleted sequentially, one border direction per subiteration,
//! and only when they are *simple*: deleting a simple pixel changes neither
//! the 8-connected foreground components nor the 4-connected background
//! components, so both Betti numbers of the mask are preserved at every
//! step. Endpoints (single-neighbour pixels) and isolated pixels are kept,
//! which preserves open curve geometry. The process runs to fixpoint, so
//! re-thinning a skeleton is the identity.

use std::ops::Deref;
use std::sync::OnceLock;

use crate::imgio::BinaryMask;

/// A thinning-stable, 1-px-wide centerline mask produced by [`skeletonize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton(BinaryMask);

impl Skeleton {
    pub fn as_mask(&self) -> &BinaryMask {
        &self.0
    }

    pub fn into_mask(self) -> BinaryMask {
        self.0
    }
}

impl Deref for Skeleton {
    type Target = BinaryMask;

    fn deref(&self) -> &BinaryMask {
        &self.0
    }
}

/// Neighbour offsets indexed by the bit layout of the simple-point table:
///
/// ```text
/// 0 1 2
/// 3 . 4
/// 5 6 7
/// ```
const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// `SIMPLE[config]` is true when the centre pixel of the 3x3 neighbourhood
/// encoded by `config` can be deleted without changing local topology.
fn simple_table() -> &'static [bool; 256] {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [false; 256];
        for (config, entry) in table.iter_mut().enumerate() {
            *entry = is_simple_config(config as u8);
        }
        table
    })
}

/// Topological characterisation of a simple pixel (8-connected foreground,
/// 4-connected background): exactly one foreground component in the
/// punctured neighbourhood and exactly one background component 4-adjacent
/// to the centre.
fn is_simple_config(config: u8) -> bool {
    let fg: Vec<usize> = (0..8).filter(|&i| config >> i & 1 == 1).collect();
    if fg.is_empty() {
        return false; // isolated pixel: deletion removes a component
    }
    let fg_components = count_components(&fg, |a, b| {
        let (ay, ax) = NEIGHBOURS[a];
        let (by, bx) = NEIGHBOURS[b];
        (ay - by).abs() <= 1 && (ax - bx).abs() <= 1
    });
    if fg_components != 1 {
        return false;
    }
    // background components within N8, 4-connected, that touch an edge
    // position (1, 3, 4, 6) and therefore are 4-adjacent to the centre
    let bg: Vec<usize> = (0..8).filter(|&i| config >> i & 1 == 0).collect();
    let bg_sets = component_sets(&bg, |a, b| {
        let (ay, ax) = NEIGHBOURS[a];
        let (by, bx) = NEIGHBOURS[b];
        (ay - by).abs() + (ax - bx).abs() == 1
    });
    let touching = bg_sets
        .iter()
        .filter(|set| set.iter().any(|&i| matches!(i, 1 | 3 | 4 | 6)))
        .count();
    touching == 1
}

fn count_components(items: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> usize {
    component_sets(items, adjacent).len()
}

fn component_sets(
    items: &[usize],
    adjacent: impl Fn(usize, usize) -> bool,
) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; items.len()];
    for start in 0..items.len() {
        if assigned[start] {
            continue;
        }
        let mut stack = vec![start];
        assigned[start] = true;
        let mut set = Vec::new();
        while let Some(i) = stack.pop() {
            set.push(items[i]);
            for j in 0..items.len() {
                if !assigned[j] && adjacent(items[i], items[j]) {
                    assigned[j] = true;
                    stack.push(j);
                }
            }
        }
        sets.push(set);
    }
    sets
}

fn neighbour_config(data: &[bool], w: i64, h: i64, r: i64, c: i64) -> u8 {
    let mut config = 0u8;
    for (bit, &(dy, dx)) in NEIGHBOURS.iter().enumerate() {
        let rr = r + dy;
        let cc = c + dx;
        if rr >= 0 && rr < h && cc >= 0 && cc < w && data[(rr * w + cc) as usize] {
            config |= 1 << bit;
        }
    }
    config
}

/// Thins a mask to its skeleton.
pub fn skeletonize(mask: &BinaryMask) -> Skeleton {
    let table = simple_table();
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut data = mask.data().to_vec();

    // bg-neighbour directions gating each subiteration: north, south, east, west
    let borders: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, 1), (0, -1)];
    loop {
        let mut changed = false;
        for &(bdy, bdx) in &borders {
            for r in 0..h {
                for c in 0..w {
                    if !data[(r * w + c) as usize] {
                        continue;
                    }
                    let br = r + bdy;
                    let bc = c + bdx;
                    let border = br < 0
                        || br >= h
                        || bc < 0
                        || bc >= w
                        || !data[(br * w + bc) as usize];
                    if !border {
                        continue;
                    }
                    let config = neighbour_config(&data, w, h, r, c);
                    if config.count_ones() == 1 {
                        continue; // endpoint
                    }
                    if table[config as usize] {
                        data[(r * w + c) as usize] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    Skeleton(BinaryMask::new(mask.width(), mask.height(), data).expect("skeleton"))
}

/// Pixel count of the largest 8-connected component of a skeleton; 0 when
/// the skeleton is empty.
pub fn largest_component_length(skel: &Skeleton) -> usize {
    super::components::connected_components(
        skel.as_mask(),
        super::components::Connectivity::Eight,
    )
    .sizes()
    .into_iter()
    .max()
    .unwrap_or(0)
}
