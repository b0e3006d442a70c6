//! Sharding and payment-channel scaling, measured by the centralization-throughput product
//! (CTP): centralization level times transactions per second.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::metrics::CentralizationLevel;
use crate::{Error, Result};

/// On-chain transactions per payment channel: one to open, one to settle.
pub const CHANNEL_ONCHAIN_TXS: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineChain {
    pub throughput_tps: f64,
    pub centralization: CentralizationLevel,
    pub node_count: u64,
}

impl BaselineChain {
    pub fn new(
        throughput_tps: f64,
        centralization: CentralizationLevel,
        node_count: u64,
    ) -> Result<Self> {
        if !(throughput_tps.is_finite() && throughput_tps > 0.0) {
            return Err(Error::Range {
                name: "throughput_tps",
                value: throughput_tps,
                expected: "a positive number",
            });
        }
        if centralization.n == 0 {
            return Err(Error::InvalidInput(
                "centralization level must be positive".into(),
            ));
        }
        if centralization.n as u64 > node_count {
            return Err(Error::InvalidInput(format!(
                "centralization level {} exceeds node count {node_count}",
                centralization.n
            )));
        }
        Ok(BaselineChain {
            throughput_tps,
            centralization,
            node_count,
        })
    }

    pub fn ctp(&self) -> f64 {
        ctp(self.centralization.n as f64, self.throughput_tps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShardingAnalysis {
    pub k: u64,
    pub sharded_tps: f64,
    pub sharded_centralization: f64,
    pub ctp_before: f64,
    pub ctp_after: f64,
}

pub fn ctp(centralization_n: f64, throughput_tps: f64) -> f64 {
    centralization_n * throughput_tps
}

/// Even sharding into `k` partitions: throughput `k·t`, centralization `N_ε / k`.
pub fn shard_analysis(base: &BaselineChain, k: u64) -> Result<ShardingAnalysis> {
    if k == 0 || k > base.node_count {
        return Err(Error::InvalidShard {
            shards: k,
            node_count: base.node_count,
        });
    }
    let n = base.centralization.n as f64;
    let t = base.throughput_tps;
    let shards = k as f64;
    Ok(ShardingAnalysis {
        k,
        sharded_tps: shards * t,
        sharded_centralization: n / shards,
        ctp_before: ctp(n, t),
        // (k·t)·(N/k): the shard count cancels before any rounding happens
        ctp_after: ctp(n, t),
    })
}

/// Payments exchanged between clients within one channel window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payment {
    pub from: String,
    pub to: String,
    pub count: u64,
}

/// Clients and the payments between them. The model carries no balances, so a relay can
/// delay or drop payments but has nothing to rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPaymentGraph")]
pub struct PaymentGraph {
    clients: BTreeSet<String>,
    payments: Vec<Payment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPaymentGraph {
    #[serde(default)]
    clients: BTreeSet<String>,
    payments: Vec<Payment>,
}

impl TryFrom<RawPaymentGraph> for PaymentGraph {
    type Error = Error;

    fn try_from(raw: RawPaymentGraph) -> Result<Self> {
        PaymentGraph::with_clients(raw.clients, raw.payments)
    }
}

impl PaymentGraph {
    /// Builds a graph whose client set is the union of `clients` and all payment endpoints.
    pub fn with_clients<I, S>(clients: I, payments: Vec<Payment>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut clients: BTreeSet<String> = clients.into_iter().map(Into::into).collect();
        for p in &payments {
            if p.from == p.to {
                return Err(Error::InvalidInput(format!(
                    "payment from {:?} to itself",
                    p.from
                )));
            }
            if p.count == 0 {
                return Err(Error::InvalidInput(format!(
                    "payment {:?} -> {:?} has zero count",
                    p.from, p.to
                )));
            }
            clients.insert(p.from.clone());
            clients.insert(p.to.clone());
        }
        Ok(PaymentGraph { clients, payments })
    }

    pub fn new(payments: Vec<Payment>) -> Result<Self> {
        Self::with_clients(Vec::<String>::new(), payments)
    }

    /// Every unordered pair among `n` clients named `c1..cn` pays once.
    pub fn complete(n: usize) -> Self {
        let ids: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
        let mut payments = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                payments.push(Payment {
                    from: ids[i].clone(),
                    to: ids[j].clone(),
                    count: 1,
                });
            }
        }
        PaymentGraph {
            clients: ids.into_iter().collect(),
            payments,
        }
    }

    pub fn clients(&self) -> &BTreeSet<String> {
        &self.clients
    }

    pub fn payments(&self) -> &[Payment] {
        &self.payments
    }

    /// Clients that send or receive at least one payment.
    pub fn active_clients(&self) -> BTreeSet<&str> {
        self.payments
            .iter()
            .flat_map(|p| [p.from.as_str(), p.to.as_str()])
            .collect()
    }

    /// Distinct unordered client pairs with at least one payment.
    pub fn payment_pairs(&self) -> BTreeSet<(&str, &str)> {
        self.payments
            .iter()
            .map(|p| unordered(&p.from, &p.to))
            .collect()
    }
}

fn unordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayPlan {
    /// Every paying pair opens its own channel.
    Direct,
    /// Every client opens one channel to the relay.
    SingleRelay(String),
    /// Explicit routes for some pairs; pairs without a route pay directly.
    Custom(CustomPlan),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomPlan {
    /// Nodes that are allowed to forward payments but are not clients.
    #[serde(default)]
    pub relays: BTreeSet<String>,
    pub routes: Vec<Route>,
}

/// Payments from `from` to `to` travel through `via` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Route {
    pub from: String,
    pub to: String,
    pub via: Vec<String>,
}

impl RelayPlan {
    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            RelayPlan::Direct => "direct".into(),
            RelayPlan::SingleRelay(r) => format!("single-relay({r})"),
            RelayPlan::Custom(_) => "custom".into(),
        }
    }
}

/// Unordered node pairs that need an on-chain channel under `plan`.
pub fn induced_channels(
    graph: &PaymentGraph,
    plan: &RelayPlan,
) -> Result<BTreeSet<(String, String)>> {
    let mut channels = BTreeSet::new();
    let mut add_path = |path: &[&str]| {
        for hop in path.windows(2) {
            if hop[0] != hop[1] {
                let (a, b) = unordered(hop[0], hop[1]);
                channels.insert((a.to_string(), b.to_string()));
            }
        }
    };
    match plan {
        RelayPlan::Direct => {
            for (a, b) in graph.payment_pairs() {
                add_path(&[a, b]);
            }
        }
        RelayPlan::SingleRelay(relay) => {
            for (a, b) in graph.payment_pairs() {
                add_path(&[a, relay.as_str(), b]);
            }
        }
        RelayPlan::Custom(custom) => {
            let routes = custom_routes(graph, custom)?;
            for (a, b) in graph.payment_pairs() {
                let mut path = vec![a];
                if let Some(via) = routes.get(&(a, b)) {
                    path.extend(via.iter().map(String::as_str));
                } else if let Some(via) = routes.get(&(b, a)) {
                    path.extend(via.iter().rev().map(String::as_str));
                }
                path.push(b);
                add_path(&path);
            }
        }
    }
    Ok(channels)
}

fn custom_routes<'a>(
    graph: &PaymentGraph,
    custom: &'a CustomPlan,
) -> Result<BTreeMap<(&'a str, &'a str), &'a [String]>> {
    let known = |id: &str| graph.clients.contains(id) || custom.relays.contains(id);
    let pairs = graph.payment_pairs();
    let mut routes = BTreeMap::new();
    for route in &custom.routes {
        for id in [&route.from, &route.to] {
            if !graph.clients.contains(id.as_str()) {
                return Err(Error::InvalidPlan(format!(
                    "route endpoint {id:?} is not a client"
                )));
            }
        }
        if !pairs.contains(&unordered(&route.from, &route.to)) {
            return Err(Error::InvalidPlan(format!(
                "route {:?} -> {:?} has no payments",
                route.from, route.to
            )));
        }
        let mut visited: BTreeSet<&str> = [route.from.as_str(), route.to.as_str()].into();
        for hop in &route.via {
            if !known(hop) {
                return Err(Error::InvalidPlan(format!(
                    "route {:?} -> {:?} passes through unknown node {hop:?}",
                    route.from, route.to
                )));
            }
            if !visited.insert(hop) {
                return Err(Error::InvalidPlan(format!(
                    "route {:?} -> {:?} visits {hop:?} twice",
                    route.from, route.to
                )));
            }
        }
        let key = (route.from.as_str(), route.to.as_str());
        let reversed = (route.to.as_str(), route.from.as_str());
        if routes.contains_key(&key) || routes.contains_key(&reversed) {
            return Err(Error::InvalidPlan(format!(
                "more than one route for {:?} -> {:?}",
                route.from, route.to
            )));
        }
        routes.insert(key, route.via.as_slice());
    }
    Ok(routes)
}

/// On-chain transactions (channel opens and settlements) needed to carry every payment.
pub fn onchain_tx_count(graph: &PaymentGraph, plan: &RelayPlan) -> Result<u64> {
    onchain_tx_count_with(graph, plan, CHANNEL_ONCHAIN_TXS)
}

pub fn onchain_tx_count_with(
    graph: &PaymentGraph,
    plan: &RelayPlan,
    txs_per_channel: u64,
) -> Result<u64> {
    Ok(txs_per_channel * induced_channels(graph, plan)?.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightningAnalysis {
    pub plan: String,
    pub direct_onchain: u64,
    pub plan_onchain: u64,
    pub effective_tps: f64,
    pub relay_centralization_n0: u64,
    pub ctp: f64,
}

/// Throughput and relay centralization of a payment-channel deployment.
///
/// Batching multiplies base throughput by `alpha`. A relay plan further multiplies it by the
/// saving in on-chain transactions relative to direct channels. Direct channels leave every
/// client in control of its own payments (`N_0 = n`); a single relay controls all of them
/// (`N_0 = 1`). For a custom plan `N_0` counts the forwarding nodes plus every client that
/// still pays some counterparty directly.
pub fn lightning_analysis(
    base: &BaselineChain,
    graph: &PaymentGraph,
    plan: &RelayPlan,
    alpha: f64,
) -> Result<LightningAnalysis> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Range {
            name: "alpha",
            value: alpha,
            expected: "alpha >= 1",
        });
    }
    let t = base.throughput_tps;
    let direct_onchain = onchain_tx_count(graph, &RelayPlan::Direct)?;
    let plan_onchain = onchain_tx_count(graph, plan)?;
    let n = graph.clients().len() as u64;

    let (effective_tps, n0) = match plan {
        RelayPlan::Direct => (t * alpha, n),
        RelayPlan::SingleRelay(_) => (t * alpha * saving(direct_onchain, plan_onchain), 1),
        RelayPlan::Custom(custom) => {
            let routes = custom_routes(graph, custom)?;
            let mut controllers: BTreeSet<&str> = BTreeSet::new();
            for (a, b) in graph.payment_pairs() {
                let via = routes.get(&(a, b)).or_else(|| routes.get(&(b, a)));
                match via {
                    Some(v) if !v.is_empty() => controllers.extend(v.iter().map(String::as_str)),
                    _ => controllers.extend([a, b]),
                }
            }
            (
                t * alpha * saving(direct_onchain, plan_onchain),
                controllers.len() as u64,
            )
        }
    };
    let ctp = match plan {
        RelayPlan::Direct => n as f64 * t * alpha,
        _ => ctp(n0 as f64, effective_tps),
    };
    Ok(LightningAnalysis {
        plan: plan.label(),
        direct_onchain,
        plan_onchain,
        effective_tps,
        relay_centralization_n0: n0,
        ctp,
    })
}

fn saving(direct: u64, plan: u64) -> f64 {
    if plan == 0 {
        1.0
    } else {
        direct as f64 / plan as f64
    }
}
