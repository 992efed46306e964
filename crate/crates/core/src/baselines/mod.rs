//! Comparison algorithms: bounded Voronoi cells, the mobile-sensor bidding
//! protocol and force-based self-spreading.

pub mod bidding;
pub mod dss;
pub mod voronoi;

pub use bidding::{bid_value, mobiles_after, run_bidding, BidMessage, BiddingOutcome, BiddingRound, MobileSensor};
pub use dss::{dss_run, DssOutcome, DssParams, DssTermination};
pub use voronoi::{farthest_vertex, voronoi_cells, voronoi_cells_of, VoronoiCell};
