//! Mobile-sensor bidding protocol.
//!
//! Static sensors look for coverage holes at the farthest vertex of their
//! Voronoi cell and advertise the hole size `π (d - r_s)²` to the nearest
//! mobile sensor whose base price is lower. Each mobile takes its highest
//! offer, moves to the hole and adopts the bid as its new base price.
//!
//! Rounds are synchronous: bids are computed on a frozen snapshot and all
//! moves are applied together. Mobiles that accepted a bid become Voronoi
//! sites in later rounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::voronoi::{farthest_vertex, voronoi_cells_of};
use crate::error::{Error, Result};
use crate::geometry::{Deployment, Point, Sensor};

const HOLE_EPS: f64 = 1e-6;

/// Hole size advertised for a vertex at distance `d`; `None` when the vertex is covered.
pub fn bid_value(d: f64, r_s: f64) -> Option<f64> {
    (d > r_s).then_some(PI * (d - r_s) * (d - r_s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobileSensor {
    pub sensor: Sensor,
    pub base_price: f64,
    /// Has accepted at least one bid.
    pub settled: bool,
}

impl MobileSensor {
    pub fn new(sensor: Sensor) -> Self {
        MobileSensor {
            sensor,
            base_price: 0.0,
            settled: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidMessage {
    /// Id of the static sensor making the offer.
    pub bidder: u32,
    /// Id of the mobile sensor receiving it.
    pub mobile: u32,
    pub value: f64,
    pub target: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiddingRound {
    pub bids: Vec<BidMessage>,
    /// Accepted bids, highest first.
    pub accepted: Vec<BidMessage>,
}

impl BiddingRound {
    pub fn max_bid(&self) -> Option<f64> {
        self.bids.iter().map(|b| b.value).reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiddingOutcome {
    /// Static sensors followed by the mobiles at their final positions.
    pub deployment: Deployment,
    pub mobiles: Vec<MobileSensor>,
    pub rounds: Vec<BiddingRound>,
}

/// Bids of one round on a frozen snapshot.
pub fn collect_bids(statics: &[Sensor], mobiles: &[MobileSensor], rect: &crate::geometry::Rect) -> Result<Vec<BidMessage>> {
    let settled: Vec<&MobileSensor> = mobiles.iter().filter(|m| m.settled).collect();
    let mut ids: Vec<u32> = statics.iter().map(|s| s.id).collect();
    let mut sites: Vec<Point> = statics.iter().map(|s| s.pos).collect();
    ids.extend(settled.iter().map(|m| m.sensor.id));
    sites.extend(settled.iter().map(|m| m.sensor.pos));
    let cells = voronoi_cells_of(&ids, &sites, rect)?;

    let mut bids: Vec<BidMessage> = Vec::new();
    for (s, cell) in statics.iter().zip(&cells) {
        let Some((target, d)) = farthest_vertex(cell, s.pos) else {
            continue;
        };
        let Some(value) = bid_value(d, s.r_s) else {
            continue;
        };
        // A Voronoi vertex is shared by neighbouring cells; it is one hole and
        // the first static (in id order) to find it advertises it.
        if bids.iter().any(|b| b.target.dist2(&target) <= HOLE_EPS * HOLE_EPS) {
            continue;
        }
        let nearest = mobiles
            .iter()
            .filter(|m| m.base_price < value)
            .min_by(|a, b| {
                a.sensor
                    .pos
                    .dist2(&s.pos)
                    .total_cmp(&b.sensor.pos.dist2(&s.pos))
                    .then(a.sensor.id.cmp(&b.sensor.id))
            });
        if let Some(m) = nearest {
            bids.push(BidMessage {
                bidder: s.id,
                mobile: m.sensor.id,
                value,
                target,
            });
        }
    }
    Ok(bids)
}

/// Each mobile's best offer (ties to the lowest bidder id), highest first.
pub fn accept_bids(bids: &[BidMessage]) -> Vec<BidMessage> {
    let mut best: Vec<BidMessage> = Vec::new();
    for b in bids {
        match best.iter_mut().find(|x| x.mobile == b.mobile) {
            Some(x) => {
                if b.value > x.value || (b.value == x.value && b.bidder < x.bidder) {
                    *x = *b;
                }
            }
            None => best.push(*b),
        }
    }
    best.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.mobile.cmp(&b.mobile)));
    best
}

/// Runs synchronous bidding rounds until no bids are sent or `max_rounds` is hit.
///
/// Static sensors keep their ids; mobile ids must continue the sequence so that
/// the merged deployment is numbered `1..=n`.
pub fn run_bidding(statics: &Deployment, mobiles: Vec<MobileSensor>, max_rounds: usize) -> Result<BiddingOutcome> {
    if max_rounds < 1 {
        return Err(Error::InvalidArgument("max_rounds must be at least 1".into()));
    }
    if statics.is_empty() {
        return Err(Error::InvalidArgument("bidding needs at least one static sensor".into()));
    }
    let field = *statics.field();
    let rect = field.rect();
    let mut mobiles = mobiles;
    let mut rounds = Vec::new();

    for _ in 0..max_rounds {
        let bids = collect_bids(statics.sensors(), &mobiles, &rect)?;
        if bids.is_empty() {
            break;
        }
        let accepted = accept_bids(&bids);
        for a in &accepted {
            let m = mobiles.iter_mut().find(|m| m.sensor.id == a.mobile).expect("bid addressed to a known mobile");
            m.sensor.pos = a.target;
            m.base_price = a.value;
            m.settled = true;
        }
        rounds.push(BiddingRound { bids, accepted });
    }

    let mut sensors = statics.sensors().to_vec();
    sensors.extend(mobiles.iter().map(|m| m.sensor));
    let deployment = Deployment::new(field, sensors)?;
    Ok(BiddingOutcome {
        deployment,
        mobiles,
        rounds,
    })
}

/// Mobiles for `positions`, numbered after the static sensors.
pub fn mobiles_after(statics: &Deployment, positions: &[Point], r_s: f64) -> Vec<MobileSensor> {
    let first = statics.len() as u32 + 1;
    positions
        .iter()
        .enumerate()
        .map(|(k, &p)| MobileSensor::new(Sensor::new(first + k as u32, p, r_s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::union_coverage;
    use crate::deploy::{deploy_uniform, uniform_positions, Seed};
    use crate::geometry::Field;
    use approx::assert_relative_eq;

    #[test]
    fn bid_values() {
        assert_eq!(bid_value(5.0, 5.0), None);
        assert_eq!(bid_value(4.5, 5.0), None);
        assert_relative_eq!(bid_value(10.0, 5.0).unwrap(), 25.0 * PI);
    }

    #[test]
    fn dense_static_layout_has_no_holes() {
        let field = Field::centered(20.0, 20.0).unwrap();
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(Point::new(2.0 + 4.0 * i as f64, 2.0 + 4.0 * j as f64));
            }
        }
        let statics = Deployment::from_positions(field, &pts, 5.0).unwrap();
        let mobiles = mobiles_after(&statics, &[Point::new(1.0, 1.0), Point::new(19.0, 3.0)], 5.0);
        let out = run_bidding(&statics, mobiles.clone(), 10).unwrap();
        assert!(out.rounds.is_empty());
        assert_eq!(out.mobiles, mobiles);
    }

    #[test]
    fn lone_static_sends_mobile_to_a_corner() {
        let field = Field::centered(100.0, 100.0).unwrap();
        let statics = Deployment::from_positions(field, &[Point::new(50.0, 50.0)], 5.0).unwrap();
        let mobiles = mobiles_after(&statics, &[Point::new(70.0, 20.0)], 5.0);
        let out = run_bidding(&statics, mobiles, 1).unwrap();
        // All four corners are equidistant; the tie-break picks the origin.
        assert_eq!(out.mobiles[0].sensor.pos, Point::new(0.0, 0.0));
        assert!(out.mobiles[0].settled);
        assert_relative_eq!(out.mobiles[0].base_price, PI * (50.0 * 2f64.sqrt() - 5.0).powi(2));
    }

    #[test]
    fn prices_never_decrease_and_first_accept_is_global_max() {
        let field = Field::centered(113.0, 113.0).unwrap();
        let statics = deploy_uniform(&field, 20, 5.0, Seed(3)).unwrap();
        let pos = uniform_positions(&field.rect(), 5, &mut Seed(103).rng());
        let mobiles = mobiles_after(&statics, &pos, 5.0);
        let mut prices: Vec<f64> = vec![0.0; 5];
        let mut state = mobiles.clone();
        for _ in 0..20 {
            let bids = collect_bids(statics.sensors(), &state, &field.rect()).unwrap();
            if bids.is_empty() {
                break;
            }
            let acc = accept_bids(&bids);
            let max = bids.iter().map(|b| b.value).fold(0.0, f64::max);
            assert_eq!(acc[0].value, max);
            for a in &acc {
                let m = state.iter_mut().find(|m| m.sensor.id == a.mobile).unwrap();
                m.sensor.pos = a.target;
                m.base_price = a.value;
                m.settled = true;
            }
            for (k, m) in state.iter().enumerate() {
                assert!(m.base_price >= prices[k]);
                prices[k] = m.base_price;
            }
        }
        let out = run_bidding(&statics, mobiles, 20).unwrap();
        assert_eq!(out.mobiles, state);
    }

    #[test]
    fn accepted_total_is_maximum_matching() {
        // Every static sends at most one message, so a matching picks at most one
        // bid per mobile; enumerate all such choices.
        let field = Field::centered(113.0, 113.0).unwrap();
        for seed in 0..5 {
            let statics = deploy_uniform(&field, 12, 5.0, Seed(seed)).unwrap();
            let pos = uniform_positions(&field.rect(), 3, &mut Seed(seed + 50).rng());
            let mobiles = mobiles_after(&statics, &pos, 5.0);
            let bids = collect_bids(statics.sensors(), &mobiles, &field.rect()).unwrap();
            let accepted: f64 = accept_bids(&bids).iter().map(|b| b.value).sum();
            let mut best = 0.0f64;
            for mask in 0u32..(1 << bids.len()) {
                let chosen: Vec<&BidMessage> = (0..bids.len()).filter(|k| mask >> k & 1 == 1).map(|k| &bids[k]).collect();
                let mut used: Vec<u32> = chosen.iter().map(|b| b.mobile).collect();
                used.sort_unstable();
                let before = used.len();
                used.dedup();
                if used.len() == before {
                    best = best.max(chosen.iter().map(|b| b.value).sum());
                }
            }
            assert_relative_eq!(accepted, best, max_relative = 1e-12);
        }
    }

    #[test]
    fn redundant_mobile_moves_into_a_hole() {
        // Statics on a 10-unit lattice leave holes at the lattice-cell corners;
        // the mobile starts on top of the centre static, contributing nothing.
        let field = Field::centered(30.0, 30.0).unwrap();
        let mut pts = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                pts.push(Point::new(5.0 + 10.0 * i as f64, 5.0 + 10.0 * j as f64));
            }
        }
        let statics = Deployment::from_positions(field, &pts, 5.0).unwrap();
        let mobiles = mobiles_after(&statics, &[Point::new(15.0, 15.0)], 5.0);
        let mut before = statics.sensors().to_vec();
        before.extend(mobiles.iter().map(|m| m.sensor));
        let before = Deployment::new(field, before).unwrap();

        let out = run_bidding(&statics, mobiles, 10).unwrap();
        assert!(!out.rounds.is_empty());
        // Every lattice vertex is shared by up to four cells but is advertised once.
        let first = &out.rounds[0];
        for (k, a) in first.bids.iter().enumerate() {
            for b in &first.bids[k + 1..] {
                assert!(a.target.dist(&b.target) > 1e-6);
            }
        }
        let c0 = union_coverage(&before, 0.25).unwrap().union_fraction;
        let c1 = union_coverage(&out.deployment, 0.25).unwrap().union_fraction;
        assert!(c1 > c0, "{c1} <= {c0}");
    }

    #[test]
    fn rejects_zero_rounds() {
        let field = Field::centered(10.0, 10.0).unwrap();
        let statics = Deployment::from_positions(field, &[Point::new(5.0, 5.0)], 1.0).unwrap();
        assert!(run_bidding(&statics, vec![], 0).is_err());
    }
}
