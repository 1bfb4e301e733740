//! Skeleton-to-graph conversion.
//!
//! Nodes sit at skeleton pixels of 8-neighbour degree 1 (endpoints) or >= 3
//! (junctions). Where several junction pixels touch, as rasterised
//! crossings force them to, the 8-connected cluster merges into a single
//! junction node whose representative coordinate is its first pixel in scan
//! order. Edges are the maximal degree-2 pixel chains between node pixels;
//! each chain includes one pixel of each terminal node, so its length counts
//! the full polyline. Isolated cycles have no natural node and get their
//! smallest (row, col) pixel promoted to a junction anchoring a self-loop;
//! such cycle chains omit the closing repeat of the anchor.

use serde::Serialize;

use super::skeleton::Skeleton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Endpoint,
    Junction,
}

/// Graph node with a representative pixel plus every skeleton pixel it
/// covers (junction clusters span more than one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub row: usize,
    pub col: usize,
    pub kind: NodeKind,
    pub pixels: Vec<(usize, usize)>,
}

/// Undirected multigraph edge with its full pixel polyline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub chain: Vec<(usize, usize)>,
    pub length: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VesselGraph {
    pub width: usize,
    pub height: usize,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl VesselGraph {
    /// Number of connected graph components (isolated nodes count).
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for edge in &self.edges {
            let ra = find(&mut parent, edge.a);
            let rb = find(&mut parent, edge.b);
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..self.nodes.len())
            .map(|i| find(&mut parent, i))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Cycle rank `E - N + C`; equals the skeleton's first Betti number.
    pub fn cycle_rank(&self) -> usize {
        (self.edges.len() + self.component_count()).saturating_sub(self.nodes.len())
    }

    /// Serialises nodes and edges (with full polylines) to JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialisation")
    }
}

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

/// First Betti number of a junction cluster viewed as its own tiny raster.
fn cluster_holes(pixels: &[(usize, usize)]) -> usize {
    let r0 = pixels.iter().map(|p| p.0).min().unwrap();
    let c0 = pixels.iter().map(|p| p.1).min().unwrap();
    let r1 = pixels.iter().map(|p| p.0).max().unwrap();
    let c1 = pixels.iter().map(|p| p.1).max().unwrap();
    // one-pixel margin so the exterior background touches the border
    let h = r1 - r0 + 3;
    let w = c1 - c0 + 3;
    let mut data = vec![false; w * h];
    for &(r, c) in pixels {
        data[(r - r0 + 1) * w + (c - c0 + 1)] = true;
    }
    let mask = crate::imgio::BinaryMask::new(w, h, data).expect("cluster raster");
    super::topology::betti_numbers(&mask).b1
}

/// Converts a skeleton raster into its vessel graph.
pub fn skeleton_to_graph(skel: &Skeleton) -> VesselGraph {
    let mask = skel.as_mask();
    let (w, h) = (mask.width(), mask.height());
    let idx = |(r, c): (usize, usize)| r * w + c;

    let fg_neighbours = |r: usize, c: usize| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(dy, dx) in &NEIGHBOURS {
            let rr = r as i64 + dy;
            let cc = c as i64 + dx;
            if rr >= 0
                && rr < h as i64
                && cc >= 0
                && cc < w as i64
                && mask.get(rr as usize, cc as usize)
            {
                out.push((rr as usize, cc as usize));
            }
        }
        out
    };

    let mut degree = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            if mask.get(r, c) {
                degree[r * w + c] = fg_neighbours(r, c).len() as u8;
            }
        }
    }

    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut node_at = vec![usize::MAX; w * h];

    // endpoints and isolated pixels: one node per pixel
    for r in 0..h {
        for c in 0..w {
            if mask.get(r, c) && degree[r * w + c] <= 1 {
                node_at[r * w + c] = nodes.len();
                nodes.push(GraphNode {
                    row: r,
                    col: c,
                    kind: NodeKind::Endpoint,
                    pixels: vec![(r, c)],
                });
            }
        }
    }

    // junction pixels: merge 8-connected clusters into one node each
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) || degree[r * w + c] < 3 || node_at[r * w + c] != usize::MAX {
                continue;
            }
            let node_id = nodes.len();
            let mut pixels = Vec::new();
            let mut stack = vec![(r, c)];
            node_at[r * w + c] = node_id;
            while let Some(p) = stack.pop() {
                pixels.push(p);
                for q in fg_neighbours(p.0, p.1) {
                    if degree[idx(q)] >= 3 && node_at[idx(q)] == usize::MAX {
                        node_at[idx(q)] = node_id;
                        stack.push(q);
                    }
                }
            }
            pixels.sort_unstable();
            nodes.push(GraphNode {
                row: pixels[0].0,
                col: pixels[0].1,
                kind: NodeKind::Junction,
                pixels,
            });
        }
    }

    let mut edges: Vec<GraphEdge> = Vec::new();

    // A cluster can itself enclose holes (e.g. a diamond of junction pixels
    // with arms). Collapsing it to one node would drop those loops from the
    // cycle rank, so each internal hole becomes a synthetic self-loop whose
    // chain is just the representative pixel.
    for (node_id, node) in nodes.iter().enumerate() {
        if node.pixels.len() < 4 {
            continue;
        }
        for _ in 0..cluster_holes(&node.pixels) {
            edges.push(GraphEdge {
                a: node_id,
                b: node_id,
                chain: vec![(node.row, node.col)],
                length: 1,
            });
        }
    }

    // directed arcs already consumed by a walk, keyed (from pixel, to pixel)
    let mut used = std::collections::HashSet::new();
    let mut in_chain = vec![false; w * h];

    let node_pixel_list: Vec<(usize, usize)> = {
        let mut v: Vec<(usize, usize)> = Vec::new();
        for node in &nodes {
            v.extend_from_slice(&node.pixels);
        }
        v.sort_unstable();
        v
    };

    for &(nr, nc) in &node_pixel_list {
        let node_id = node_at[nr * w + nc];
        for (sr, sc) in fg_neighbours(nr, nc) {
            if used.contains(&(idx((nr, nc)), idx((sr, sc)))) {
                continue;
            }
            let start_is_node = node_at[sr * w + sc] != usize::MAX;
            if start_is_node && node_at[sr * w + sc] == node_id {
                continue; // internal cluster adjacency
            }
            used.insert((idx((nr, nc)), idx((sr, sc))));
            let mut chain = vec![(nr, nc)];
            let mut prev = (nr, nc);
            let mut cur = (sr, sc);
            while node_at[idx(cur)] == usize::MAX {
                in_chain[idx(cur)] = true;
                chain.push(cur);
                let next = fg_neighbours(cur.0, cur.1)
                    .into_iter()
                    .find(|&p| p != prev)
                    .expect("degree-2 pixel must have a second neighbour");
                prev = cur;
                cur = next;
            }
            used.insert((idx(cur), idx(prev)));
            chain.push(cur);
            let b = node_at[idx(cur)];
            let length = chain.len();
            edges.push(GraphEdge {
                a: node_id,
                b,
                chain,
                length,
            });
        }
    }

    // leftover degree-2 pixels form isolated cycles
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) || in_chain[r * w + c] || node_at[r * w + c] != usize::MAX {
                continue;
            }
            let anchor_id = nodes.len();
            node_at[r * w + c] = anchor_id;
            nodes.push(GraphNode {
                row: r,
                col: c,
                kind: NodeKind::Junction,
                pixels: vec![(r, c)],
            });
            let mut chain = vec![(r, c)];
            let mut prev = (r, c);
            let mut cur = fg_neighbours(r, c)[0];
            while cur != (r, c) {
                in_chain[idx(cur)] = true;
                chain.push(cur);
                let next = fg_neighbours(cur.0, cur.1)
                    .into_iter()
                    .find(|&p| p != prev)
                    .expect("cycle pixel must have a second neighbour");
                prev = cur;
                cur = next;
            }
            let length = chain.len();
            edges.push(GraphEdge {
                a: anchor_id,
                b: anchor_id,
                chain,
                length,
            });
        }
    }

    VesselGraph {
        width: w,
        height: h,
        nodes,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgio::BinaryMask;
    use crate::netstruct::{betti_numbers, skeletonize};
    use crate::phantom;

    fn graph_of(mask: BinaryMask) -> VesselGraph {
        // masks in these tests are already thin; skeletonize is the identity
        let skel = skeletonize(&mask);
        assert_eq!(skel.as_mask(), &mask, "test mask must be thinning-stable");
        skeleton_to_graph(&skel)
    }

    #[test]
    fn straight_chain() {
        let mask = BinaryMask::from_fn(14, 5, |r, c| r == 2 && (2..12).contains(&c));
        let graph = graph_of(mask);
        assert_eq!(graph.nodes.len(), 2);
        assert!(graph.nodes.iter().all(|n| n.kind == NodeKind::Endpoint));
        assert_eq!(graph.edges.len(), 1);
        assert_eq!(graph.edges[0].length, 10);
        assert_eq!(graph.edges[0].chain.len(), 10);
        assert_eq!(graph.edges[0].chain[0], (2, 2));
        assert_eq!(graph.edges[0].chain[9], (2, 11));
    }

    #[test]
    fn plus_sign() {
        let mask = BinaryMask::from_fn(11, 11, |r, c| {
            (r == 5 && (2..9).contains(&c)) || (c == 5 && (2..9).contains(&r))
        });
        let graph = graph_of(mask);
        let junctions: Vec<_> = graph
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Junction)
            .collect();
        let endpoints = graph
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Endpoint)
            .count();
        assert_eq!(junctions.len(), 1);
        assert_eq!(endpoints, 4);
        assert_eq!(graph.edges.len(), 4);
        // the crossing merges the five centre pixels into one junction node
        assert_eq!(junctions[0].pixels.len(), 5);
        assert_eq!(graph.cycle_rank(), 0);
    }

    #[test]
    fn isolated_cycle_becomes_self_loop() {
        // thinning shaves the ring corners; the remaining octagonal loop is
        // pure degree-2
        let skel = skeletonize(&phantom::square_ring(9, 2, 1));
        let graph = skeleton_to_graph(&skel);
        assert_eq!(graph.nodes.len(), 1);
        assert_eq!(graph.edges.len(), 1);
        let edge = &graph.edges[0];
        assert_eq!(edge.a, edge.b);
        assert_eq!(edge.length, skel.count_foreground());
        assert_eq!(graph.cycle_rank(), 1);
    }

    #[test]
    fn isolated_pixel_is_a_bare_node() {
        let mask = BinaryMask::from_fn(5, 5, |r, c| (r, c) == (2, 2));
        let graph = graph_of(mask);
        assert_eq!(graph.nodes.len(), 1);
        assert_eq!(graph.nodes[0].kind, NodeKind::Endpoint);
        assert!(graph.edges.is_empty());
        assert_eq!(graph.component_count(), 1);
        assert_eq!(graph.cycle_rank(), 0);
    }

    #[test]
    fn every_pixel_is_node_or_in_one_chain() {
        for seed in 0..20 {
            let skel = skeletonize(&phantom::random_blobs(32, 32, seed + 11));
            let graph = skeleton_to_graph(&skel);
            let mut interior_hits = vec![0usize; skel.len()];
            let node_pixels: std::collections::HashSet<(usize, usize)> = graph
                .nodes
                .iter()
                .flat_map(|n| n.pixels.iter().copied())
                .collect();
            for edge in &graph.edges {
                assert_eq!(edge.length, edge.chain.len());
                assert!(node_pixels.contains(&edge.chain[0]));
                let last = *edge.chain.last().unwrap();
                if !node_pixels.contains(&last) {
                    // isolated-cycle chain: the tail closes back onto the anchor
                    let (ar, ac) = edge.chain[0];
                    let adj = last.0.abs_diff(ar) <= 1 && last.1.abs_diff(ac) <= 1;
                    assert!(adj, "open chain tail at {last:?}");
                }
                for &(r, c) in &edge.chain {
                    if !node_pixels.contains(&(r, c)) {
                        interior_hits[r * 32 + c] += 1;
                    }
                }
            }
            for r in 0..32 {
                for c in 0..32 {
                    if !skel.get(r, c) {
                        assert_eq!(interior_hits[r * 32 + c], 0);
                    } else if !node_pixels.contains(&(r, c)) {
                        assert_eq!(
                            interior_hits[r * 32 + c],
                            1,
                            "seed {seed}: pixel ({r},{c}) hit {} times",
                            interior_hits[r * 32 + c]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn junction_cluster_enclosing_a_hole_keeps_its_loop() {
        // diamond of four junction pixels, each with an orthogonal arm
        let mask = BinaryMask::from_fn(9, 9, |r, c| {
            matches!((r, c), (3, 4) | (4, 3) | (4, 5) | (5, 4))
                || (c == 4 && r < 3)
                || (c == 4 && r > 5)
                || (r == 4 && c < 3)
                || (r == 4 && c > 5)
        });
        let graph = graph_of(mask.clone());
        assert_eq!(betti_numbers(&mask).b1, 1);
        assert_eq!(graph.cycle_rank(), 1);
    }

    #[test]
    fn cycle_rank_matches_first_betti_number() {
        for seed in 0..30 {
            let skel = skeletonize(&phantom::random_blobs(32, 32, seed * 7 + 3));
            let graph = skeleton_to_graph(&skel);
            let betti = betti_numbers(skel.as_mask());
            assert_eq!(graph.cycle_rank(), betti.b1, "seed {seed}");
        }
    }

    #[test]
    fn graph_serialises_to_json() {
        let mask = BinaryMask::from_fn(14, 5, |r, c| r == 2 && (2..12).contains(&c));
        let graph = graph_of(mask);
        let json = graph.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["nodes"].as_array().unwrap().len(), 2);
        assert_eq!(parsed["edges"][0]["length"], 10);
    }
}
