//! Scenario sampling and the line-oriented scenario file format.
//!
//! Format (version 1):
//!
//! ```text
//! dpdp-scenario v1
//! horizon_s=28800
//! ...one key=value line per ScenarioConfig field...
//! stores=<count>
//! store <x> <y>
//! orders=<count>
//! order <arrival_ms> <1toN|Nto1> <size> <coords...>
//! ```
//!
//! For `1toN` the coordinates are the store followed by `size` customers; for
//! `Nto1` they are `size` stores followed by the customer. Request ids are
//! assigned sequentially in file order. Floats use shortest round-trip
//! formatting, so write/read/write is byte-identical.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{KindDraw, ScenarioConfig};
use crate::model::{Location, Order, OrderKind, PenaltySpec, Request, RequestId, Time};

const MAGIC: &str = "dpdp-scenario v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub stores: Vec<Location>,
    /// Sorted by arrival time, then order id.
    pub orders: Vec<Order>,
}

impl Scenario {
    pub fn num_requests(&self) -> usize {
        self.orders.iter().map(|o| o.requests.len()).sum()
    }

    pub fn requests(&self) -> impl Iterator<Item = &Request> {
        self.orders.iter().flat_map(|o| o.requests.iter())
    }
}

fn uniform_point(rng: &mut impl Rng, side: f64) -> Location {
    Location::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side))
}

/// Samples one realization of the order stream. Deterministic in `config.seed`.
pub fn generate_scenario(config: &ScenarioConfig) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let side = config.square_side;
    let stores: Vec<Location> = (0..config.num_stores).map(|_| uniform_point(&mut rng, side)).collect();

    let horizon = config.horizon().millis();
    let interval = config.interval().millis().max(1);
    let mut drafts: Vec<(Time, OrderKind, Vec<(Location, Location)>)> = Vec::new();
    let mut start = 0;
    while start < horizon {
        let end = (start + interval).min(horizon);
        let kinds: &[OrderKind] = match config.kind_draw {
            KindDraw::PerKind => &[OrderKind::OneToN, OrderKind::NToOne],
            KindDraw::Shared => &[OrderKind::OneToN],
        };
        for &kind in kinds {
            if !rng.gen_bool(config.arrival_prob) {
                continue;
            }
            let kind = match config.kind_draw {
                KindDraw::PerKind => kind,
                KindDraw::Shared if rng.gen_bool(0.5) => OrderKind::OneToN,
                KindDraw::Shared => OrderKind::NToOne,
            };
            let at = Time::from_millis(rng.gen_range(start + 1..=end));
            let size = rng.gen_range(1..=config.max_order_size);
            let pairs = match kind {
                OrderKind::OneToN => {
                    let store = stores[rng.gen_range(0..stores.len())];
                    (0..size).map(|_| (store, uniform_point(&mut rng, side))).collect()
                }
                OrderKind::NToOne => {
                    let customer = uniform_point(&mut rng, side);
                    (0..size).map(|_| (stores[rng.gen_range(0..stores.len())], customer)).collect()
                }
            };
            drafts.push((at, kind, pairs));
        }
        start = end;
    }
    // Stable: same-time orders keep their draw order.
    drafts.sort_by_key(|d| d.0);
    let orders = build_orders(config, drafts);
    Scenario { config: config.clone(), stores, orders }
}

fn build_orders(config: &ScenarioConfig, drafts: Vec<(Time, OrderKind, Vec<(Location, Location)>)>) -> Vec<Order> {
    let window = config.deadline_window();
    let mut next_request = 0u32;
    drafts
        .into_iter()
        .enumerate()
        .map(|(oid, (at, kind, pairs))| {
            let id = oid as u32;
            let requests = pairs
                .into_iter()
                .map(|(store, customer)| {
                    let r = Request {
                        id: RequestId(next_request),
                        order_id: id,
                        store,
                        customer,
                        order_time: at,
                        deadline: at + window,
                    };
                    next_request += 1;
                    r
                })
                .collect();
            Order { id, kind, arrival_time: at, requests }
        })
        .collect()
}

pub fn write_scenario(s: &Scenario) -> String {
    let c = &s.config;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "horizon_s={}", c.horizon_s);
    let _ = writeln!(out, "interval_min={}", c.interval_min);
    let _ = writeln!(out, "arrival_prob={}", c.arrival_prob);
    let _ = writeln!(out, "kind_draw={}", c.kind_draw.as_str());
    let _ = writeln!(out, "max_order_size={}", c.max_order_size);
    let _ = writeln!(out, "deadline_s={}", c.deadline_s);
    let _ = writeln!(out, "num_stores={}", c.num_stores);
    let _ = writeln!(out, "num_vehicles={}", c.num_vehicles);
    let _ = writeln!(out, "depot={},{}", c.depot.x, c.depot.y);
    let _ = writeln!(out, "square_side={}", c.square_side);
    let _ = writeln!(out, "speed={}", c.speed);
    let _ = writeln!(out, "penalty_fixed={}", c.penalty.fixed);
    let _ = writeln!(out, "penalty_rate={}", c.penalty.rate);
    let _ = writeln!(out, "epoch_min_gap_s={}", c.epoch_min_gap_s);
    let _ = writeln!(out, "epoch_max_gap_s={}", c.epoch_max_gap_s);
    let _ = writeln!(out, "seed={}", c.seed);
    let _ = writeln!(out, "stores={}", s.stores.len());
    for st in &s.stores {
        let _ = writeln!(out, "store {} {}", st.x, st.y);
    }
    let _ = writeln!(out, "orders={}", s.orders.len());
    for o in &s.orders {
        let _ = write!(out, "order {} {} {}", o.arrival_time.millis(), o.kind.as_str(), o.requests.len());
        let mut pt = |l: &Location| {
            let _ = write!(out, " {} {}", l.x, l.y);
        };
        match o.kind {
            OrderKind::OneToN => {
                pt(&o.requests[0].store);
                o.requests.iter().for_each(|r| pt(&r.customer));
            }
            OrderKind::NToOne => {
                o.requests.iter().for_each(|r| pt(&r.store));
                pt(&o.requests[0].customer);
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, PartialEq)]
#[error("scenario line {line}: {msg}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub msg: String,
}

pub fn read_scenario(text: &str) -> Result<Scenario, ScenarioParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: String| ScenarioParseError { line, msg };

    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((n, l)) => return Err(err(n, format!("expected header {MAGIC:?}, found {l:?}"))),
        None => return Err(err(0, "empty input".into())),
    }

    fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ScenarioParseError> {
        s.parse().map_err(|_| ScenarioParseError { line, msg: format!("cannot parse {s:?}") })
    }

    let mut c = ScenarioConfig::default();
    let mut penalty = PenaltySpec::BASE;
    let store_count;
    loop {
        let (n, l) = lines.next().ok_or_else(|| err(0, "missing stores= line".into()))?;
        let (k, v) = l.split_once('=').ok_or_else(|| err(n, format!("expected key=value, found {l:?}")))?;
        match k {
            "horizon_s" => c.horizon_s = num(n, v)?,
            "interval_min" => c.interval_min = num(n, v)?,
            "arrival_prob" => c.arrival_prob = num(n, v)?,
            "kind_draw" => {
                c.kind_draw = KindDraw::parse(v).ok_or_else(|| err(n, format!("unknown kind_draw {v:?}")))?
            }
            "max_order_size" => c.max_order_size = num(n, v)?,
            "deadline_s" => c.deadline_s = num(n, v)?,
            "num_stores" => c.num_stores = num(n, v)?,
            "num_vehicles" => c.num_vehicles = num(n, v)?,
            "depot" => {
                let (x, y) = v.split_once(',').ok_or_else(|| err(n, "depot must be x,y".into()))?;
                c.depot = Location::new(num(n, x)?, num(n, y)?);
            }
            "square_side" => c.square_side = num(n, v)?,
            "speed" => c.speed = num(n, v)?,
            "penalty_fixed" => penalty.fixed = num(n, v)?,
            "penalty_rate" => penalty.rate = num(n, v)?,
            "epoch_min_gap_s" => c.epoch_min_gap_s = num(n, v)?,
            "epoch_max_gap_s" => c.epoch_max_gap_s = num(n, v)?,
            "seed" => c.seed = num(n, v)?,
            "stores" => {
                store_count = num::<usize>(n, v)?;
                break;
            }
            other => return Err(err(n, format!("unknown key {other:?}"))),
        }
    }
    c.penalty = penalty;
    c.validate().map_err(|m| err(0, m))?;

    let mut stores = Vec::with_capacity(store_count);
    for _ in 0..store_count {
        let (n, l) = lines.next().ok_or_else(|| err(0, "truncated store list".into()))?;
        let mut it = l.split_whitespace();
        if it.next() != Some("store") {
            return Err(err(n, format!("expected store line, found {l:?}")));
        }
        let x = num(n, it.next().unwrap_or(""))?;
        let y = num(n, it.next().unwrap_or(""))?;
        stores.push(Location::new(x, y));
    }

    let (n, l) = lines.next().ok_or_else(|| err(0, "missing orders= line".into()))?;
    let order_count: usize = match l.split_once('=') {
        Some(("orders", v)) => num(n, v)?,
        _ => return Err(err(n, format!("expected orders=, found {l:?}"))),
    };
    let mut drafts = Vec::with_capacity(order_count);
    for _ in 0..order_count {
        let (n, l) = lines.next().ok_or_else(|| err(0, "truncated order list".into()))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() < 4 || f[0] != "order" {
            return Err(err(n, format!("malformed order line {l:?}")));
        }
        let at = Time::from_millis(num(n, f[1])?);
        let kind = OrderKind::parse(f[2]).ok_or_else(|| err(n, format!("unknown order kind {:?}", f[2])))?;
        let size: usize = num(n, f[3])?;
        if size == 0 || f.len() != 4 + 2 * (size + 1) {
            return Err(err(n, format!("order of size {size} needs {} coordinates", 2 * (size + 1))));
        }
        let pts: Vec<Location> = f[4..]
            .chunks(2)
            .map(|p| Ok(Location::new(num(n, p[0])?, num(n, p[1])?)))
            .collect::<Result<_, ScenarioParseError>>()?;
        let pairs = match kind {
            OrderKind::OneToN => pts[1..].iter().map(|cust| (pts[0], *cust)).collect(),
            OrderKind::NToOne => pts[..size].iter().map(|st| (*st, pts[size])).collect(),
        };
        drafts.push((at, kind, pairs));
    }
    if let Some((n, l)) = lines.next() {
        return Err(err(n, format!("trailing content {l:?}")));
    }
    if drafts.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(err(0, "orders must be sorted by arrival time".into()));
    }
    let orders = build_orders(&c, drafts);
    Ok(Scenario { config: c, stores, orders })
}
