//! Skeletonization, connectivity, topology and vessel-graph extraction.
//!
//! Connectivity convention throughout: 8-connected foreground, 4-connected
//! background (the Jordan-consistent duality that makes hole counts well
//! defined).

mod components;
mod faz;
mod graph;
mod morph;
mod skeleton;
mod topology;

pub use components::{component_count, connected_components, Connectivity, Labels};
pub use faz::{detect_faz, FazError, FazRegion};
pub use graph::{skeleton_to_graph, GraphEdge, GraphNode, NodeKind, VesselGraph};
pub use morph::{dilate_disc, erode_disc};
pub use skeleton::{largest_component_length, skeletonize, Skeleton};
pub use topology::{betti_numbers, BettiPair};
