//! Connected-component labelling on binary rasters.

use crate::imgio::BinaryMask;

/// Pixel adjacency convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

/// Per-pixel component labels plus the component count.
///
/// Labels run `1..=count` in order of first encounter (row-major scan);
/// background pixels carry label 0.
#[derive(Debug, Clone)]
pub struct Labels {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl Labels {
    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Pixel count of every component, indexed by `label - 1`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &l in &self.labels {
            if l > 0 {
                sizes[(l - 1) as usize] += 1;
            }
        }
        sizes
    }
}

/// Labels foreground components under the stated connectivity (BFS fill).
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Labels {
    let (w, h) = (mask.width(), mask.height());
    let data = mask.data();
    let mut labels = vec![0u32; w * h];
    let mut count = 0u32;
    let mut queue: Vec<usize> = Vec::new();
    let offsets = connectivity.offsets();

    for start in 0..w * h {
        if !data[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.clear();
        queue.push(start);
        while let Some(idx) = queue.pop() {
            let r = (idx / w) as i64;
            let c = (idx % w) as i64;
            for &(dr, dc) in offsets {
                let rr = r + dr;
                let cc = c + dc;
                if rr < 0 || rr >= h as i64 || cc < 0 || cc >= w as i64 {
                    continue;
                }
                let nidx = rr as usize * w + cc as usize;
                if data[nidx] && labels[nidx] == 0 {
                    labels[nidx] = count;
                    queue.push(nidx);
                }
            }
        }
    }

    Labels {
        width: w,
        height: h,
        labels,
        count: count as usize,
    }
}

/// Number of foreground components.
pub fn component_count(mask: &BinaryMask, connectivity: Connectivity) -> usize {
    connected_components(mask, connectivity).count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom;

    /// Independent oracle: recursive flood fill.
    fn flood_count(mask: &BinaryMask, connectivity: Connectivity) -> usize {
        fn fill(
            mask: &BinaryMask,
            seen: &mut Vec<bool>,
            r: i64,
            c: i64,
            offsets: &[(i64, i64)],
        ) {
            if r < 0 || r >= mask.height() as i64 || c < 0 || c >= mask.width() as i64 {
                return;
            }
            let idx = r as usize * mask.width() + c as usize;
            if seen[idx] || !mask.get(r as usize, c as usize) {
                return;
            }
            seen[idx] = true;
            for &(dr, dc) in offsets {
                fill(mask, seen, r + dr, c + dc, offsets);
            }
        }
        let mut seen = vec![false; mask.len()];
        let mut count = 0;
        for r in 0..mask.height() {
            for c in 0..mask.width() {
                if mask.get(r, c) && !seen[r * mask.width() + c] {
                    count += 1;
                    fill(mask, &mut seen, r as i64, c as i64, connectivity.offsets());
                }
            }
        }
        count
    }

    #[test]
    fn empty_mask_has_zero_components() {
        let mask = BinaryMask::filled(8, 8, false);
        assert_eq!(component_count(&mask, Connectivity::Eight), 0);
        assert_eq!(component_count(&mask, Connectivity::Four), 0);
    }

    #[test]
    fn checkerboard_connectivity() {
        let mask = BinaryMask::new(2, 2, vec![true, false, false, true]).unwrap();
        assert_eq!(component_count(&mask, Connectivity::Eight), 1);
        assert_eq!(component_count(&mask, Connectivity::Four), 2);
    }

    #[test]
    fn labels_are_scan_ordered() {
        let mask = BinaryMask::new(4, 1, vec![true, false, true, true]).unwrap();
        let labels = connected_components(&mask, Connectivity::Four);
        assert_eq!(labels.count, 2);
        assert_eq!(labels.labels, vec![1, 0, 2, 2]);
        assert_eq!(labels.sizes(), vec![1, 2]);
    }

    #[test]
    fn random_masks_match_flood_fill_oracle() {
        for seed in 0..40 {
            let density = 0.1 + 0.8 * (seed as f64 / 39.0);
            let mask = phantom::random_mask(32, 32, density, seed);
            for conn in [Connectivity::Four, Connectivity::Eight] {
                assert_eq!(
                    component_count(&mask, conn),
                    flood_count(&mask, conn),
                    "seed {seed}"
                );
            }
        }
    }

    #[test]
    fn labels_partition_equivalence_classes() {
        let mask = phantom::random_blobs(24, 24, 5);
        let labels = connected_components(&mask, Connectivity::Eight);
        // every fg pixel labelled, every bg pixel zero
        for r in 0..24 {
            for c in 0..24 {
                assert_eq!(labels.label(r, c) > 0, mask.get(r, c));
            }
        }
        // adjacent fg pixels share the label
        for r in 0..24 {
            for c in 0..24 {
                if !mask.get(r, c) {
                    continue;
                }
                for &(dr, dc) in Connectivity::Eight.offsets() {
                    let rr = r as i64 + dr;
                    let cc = c as i64 + dc;
                    if (0..24).contains(&rr) && (0..24).contains(&cc) {
                        let (rr, cc) = (rr as usize, cc as usize);
                        if mask.get(rr, cc) {
                            assert_eq!(labels.label(r, c), labels.label(rr, cc));
                        }
                    }
                }
            }
        }
    }
}
