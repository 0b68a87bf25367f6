//! Deterministic in-memory cluster: nodes hold shares, fail, get rebuilt
//! through [`codec::repair`](crate::codec::repair), and keep a ledger of every
//! symbol moved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{encode, reconstruct, repair, DiskShare, ShareSet};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// Every live node holds exactly its originally encoded share.
    StateIntact,
    /// No node is down.
    AllUp,
    /// At most `n - k` nodes are down.
    Durable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Fail(u32),
    Repair(u32),
    /// Read from these nodes; an empty list reads from every live node.
    Read(Vec<u32>),
    Assert(Predicate),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub events: Vec<Event>,
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Scenario> {
        serde_json::from_str(s).map_err(|e| Error::Scenario(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventOutcome {
    pub index: usize,
    pub event: Event,
    pub ok: bool,
    pub detail: String,
    /// Symbols transferred, for repairs that ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbols_moved: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub node: u32,
    pub sent: u64,
    pub received: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub events: Vec<EventOutcome>,
    pub ledger: Vec<LedgerEntry>,
    pub repairs: usize,
    pub total_moved: u64,
    /// Symbols one repair should move: `d·β` when `t = 2`, else `γ`.
    pub expected_per_repair: u64,
    /// Events that did not succeed (failed reads, refused repairs, false asserts).
    pub failed_events: usize,
    /// Soak cycles after which the cluster differed from the encoded state.
    pub mismatches: usize,
    pub final_state_intact: bool,
}

/// Simulated cluster of `n` nodes.
pub struct Cluster<'a> {
    spec: &'a CodeSpec,
    msg: Vec<u64>,
    original: ShareSet,
    nodes: Vec<Option<DiskShare>>,
    ledger: Vec<LedgerEntry>,
    log: Vec<EventOutcome>,
}

impl<'a> Cluster<'a> {
    pub fn provision(spec: &'a CodeSpec, msg: &[u64]) -> Result<Cluster<'a>> {
        let original = encode(spec, msg)?;
        let nodes = original.shares.iter().cloned().map(Some).collect();
        let ledger = (1..=spec.params.n)
            .map(|node| LedgerEntry {
                node,
                ..Default::default()
            })
            .collect();
        Ok(Cluster {
            spec,
            msg: msg.to_vec(),
            original,
            nodes,
            ledger,
            log: Vec::new(),
        })
    }

    pub fn expected_per_repair(&self) -> u64 {
        let p = &self.spec.params;
        match p.beta {
            Some(beta) => p.d as u64 * beta,
            None => p.gamma,
        }
    }

    pub fn is_up(&self, node: u32) -> bool {
        self.nodes[node as usize - 1].is_some()
    }

    pub fn down_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_none()).count()
    }

    pub fn state_intact(&self) -> bool {
        self.nodes
            .iter()
            .zip(&self.original.shares)
            .all(|(n, orig)| n.as_ref().is_none_or(|s| s == orig))
    }

    /// All nodes up and identical to the encoded shares.
    pub fn fully_restored(&self) -> bool {
        self.down_count() == 0 && self.state_intact()
    }

    fn check_node(&self, node: u32) -> Result<()> {
        if node == 0 || node > self.spec.params.n {
            return Err(Error::Scenario(format!(
                "node {node} does not exist (cluster has {} nodes)",
                self.spec.params.n
            )));
        }
        Ok(())
    }

    fn record(&mut self, event: Event, ok: bool, detail: String, moved: Option<usize>) -> bool {
        self.log.push(EventOutcome {
            index: self.log.len(),
            event,
            ok,
            detail,
            symbols_moved: moved,
        });
        ok
    }

    pub fn fail(&mut self, node: u32) -> Result<bool> {
        self.check_node(node)?;
        let slot = &mut self.nodes[node as usize - 1];
        let ok = slot.take().is_some();
        let detail = if ok { "node down".into() } else { "node was already down".into() };
        Ok(self.record(Event::Fail(node), ok, detail, None))
    }

    pub fn repair(&mut self, node: u32) -> Result<bool> {
        self.check_node(node)?;
        if self.is_up(node) {
            return Ok(self.record(Event::Repair(node), false, "node is not down".into(), None));
        }
        let helpers: Vec<DiskShare> = self.nodes.iter().flatten().cloned().collect();
        match repair(self.spec, node, &helpers) {
            Ok((share, transcript)) => {
                for t in &transcript.transfers {
                    self.ledger[t.helper as usize - 1].sent += t.symbols.len() as u64;
                }
                self.ledger[node as usize - 1].received += transcript.total_symbols as u64;
                self.nodes[node as usize - 1] = Some(share);
                let detail = format!("{} helpers", transcript.transfers.len());
                Ok(self.record(Event::Repair(node), true, detail, Some(transcript.total_symbols)))
            }
            Err(e) => Ok(self.record(Event::Repair(node), false, e.to_string(), None)),
        }
    }

    pub fn read(&mut self, from: &[u32]) -> Result<bool> {
        for &node in from {
            self.check_node(node)?;
        }
        let wanted: Vec<u32> = if from.is_empty() {
            (1..=self.spec.params.n).collect()
        } else {
            from.to_vec()
        };
        let live: Vec<DiskShare> = wanted
            .iter()
            .filter_map(|&n| self.nodes[n as usize - 1].clone())
            .collect();
        let k = self.spec.params.k as usize;
        let event = Event::Read(from.to_vec());
        if live.len() < k {
            let detail = format!(
                "durability violation: {} of the requested nodes are live, need {k}",
                live.len()
            );
            return Ok(self.record(event, false, detail, None));
        }
        match reconstruct(self.spec, &live) {
            Ok(msg) if msg == self.msg => Ok(self.record(event, true, "message intact".into(), None)),
            Ok(_) => Ok(self.record(event, false, "durability violation: wrong message".into(), None)),
            Err(e) => Ok(self.record(event, false, format!("durability violation: {e}"), None)),
        }
    }

    pub fn assert(&mut self, pred: Predicate) -> bool {
        let ok = match pred {
            Predicate::StateIntact => self.state_intact(),
            Predicate::AllUp => self.down_count() == 0,
            Predicate::Durable => self.down_count() <= (self.spec.params.n - self.spec.params.k) as usize,
        };
        let detail = if ok { "holds" } else { "violated" };
        self.record(Event::Assert(pred), ok, detail.into(), None)
    }

    pub fn apply(&mut self, event: &Event) -> Result<bool> {
        match event {
            Event::Fail(n) => self.fail(*n),
            Event::Repair(n) => self.repair(*n),
            Event::Read(nodes) => self.read(nodes),
            Event::Assert(p) => Ok(self.assert(*p)),
        }
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    fn report(self, mismatches: usize) -> SimulationReport {
        let repairs = self.log.iter().filter(|e| e.symbols_moved.is_some()).count();
        let total_moved = self.ledger.iter().map(|l| l.sent).sum();
        SimulationReport {
            failed_events: self.log.iter().filter(|e| !e.ok).count(),
            expected_per_repair: self.expected_per_repair(),
            final_state_intact: self.fully_restored(),
            events: self.log,
            ledger: self.ledger,
            repairs,
            total_moved,
            mismatches,
        }
    }
}

/// Replays a scenario in order. Node ids are validated before anything runs.
pub fn run_scenario(spec: &CodeSpec, msg: &[u64], sc: &Scenario) -> Result<SimulationReport> {
    let mut cluster = Cluster::provision(spec, msg)?;
    for event in &sc.events {
        let nodes: &[u32] = match event {
            Event::Fail(n) | Event::Repair(n) => std::slice::from_ref(n),
            Event::Read(ns) => ns,
            Event::Assert(_) => &[],
        };
        for &n in nodes {
            cluster.check_node(n)?;
        }
    }
    for event in &sc.events {
        cluster.apply(event)?;
    }
    Ok(cluster.report(0))
}

/// `steps` seeded fail-one/repair-one cycles, comparing the whole cluster
/// against the encoded state after each.
pub fn random_failure_soak(spec: &CodeSpec, msg: &[u64], steps: usize, seed: u64) -> Result<SimulationReport> {
    let mut cluster = Cluster::provision(spec, msg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..steps {
        let node = rng.gen_range(1..=spec.params.n);
        cluster.fail(node)?;
        cluster.repair(node)?;
        if !cluster.fully_restored() {
            mismatches += 1;
        }
    }
    Ok(cluster.report(mismatches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::testing::golden_spec;
    use crate::construction::{build_code, BuildOptions};
    use crate::designs::gen_complete_design;

    fn msg23() -> Vec<u64> {
        (0..23).map(|i| (i * 2 + 1) % 3).collect()
    }

    #[test]
    fn scenario_json_shape() {
        let sc = Scenario::from_json(
            r#"{"events":[{"fail":1},{"repair":1},{"read":[2,3,4,5,6,7,8]},{"assert":"state_intact"}]}"#,
        )
        .unwrap();
        assert_eq!(sc.events[0], Event::Fail(1));
        assert_eq!(sc.events[3], Event::Assert(Predicate::StateIntact));
        assert!(Scenario::from_json(r#"{"events":[{"explode":1}]}"#).is_err());
    }

    #[test]
    fn each_node_in_turn() {
        let spec = golden_spec();
        let mut events = Vec::new();
        for n in 1..=9 {
            events.push(Event::Fail(n));
            events.push(Event::Read(vec![]));
            events.push(Event::Repair(n));
            events.push(Event::Assert(Predicate::StateIntact));
        }
        let report = run_scenario(&spec, &msg23(), &Scenario { events }).unwrap();
        assert_eq!(report.failed_events, 0);
        assert_eq!(report.repairs, 9);
        assert!(report
            .events
            .iter()
            .filter_map(|e| e.symbols_moved)
            .all(|m| m == 8));
        assert_eq!(report.total_moved, 72);
        // conservation: received equals sent overall
        let recv: u64 = report.ledger.iter().map(|l| l.received).sum();
        assert_eq!(recv, report.total_moved);
        assert!(report.final_state_intact);
    }

    #[test]
    fn empty_scenario() {
        let report = run_scenario(&golden_spec(), &msg23(), &Scenario::default()).unwrap();
        assert!(report.events.is_empty());
        assert_eq!(report.total_moved, 0);
        assert!(report.final_state_intact);
    }

    #[test]
    fn three_failures_break_durability() {
        let spec = golden_spec();
        let sc = Scenario {
            events: vec![
                Event::Fail(1),
                Event::Fail(2),
                Event::Read(vec![]),
                Event::Fail(3),
                Event::Read(vec![]),
                Event::Assert(Predicate::Durable),
                Event::Repair(3),
            ],
        };
        let report = run_scenario(&spec, &msg23(), &sc).unwrap();
        let ok: Vec<bool> = report.events.iter().map(|e| e.ok).collect();
        assert_eq!(ok, vec![true, true, true, true, false, false, false]);
        assert!(report.events[4].detail.contains("durability violation"));
    }

    #[test]
    fn invalid_nodes_rejected_up_front() {
        let sc = Scenario {
            events: vec![Event::Fail(1), Event::Fail(10)],
        };
        assert!(matches!(run_scenario(&golden_spec(), &msg23(), &sc), Err(Error::Scenario(_))));
    }

    #[test]
    fn soak_small() {
        let spec = golden_spec();
        let report = random_failure_soak(&spec, &msg23(), 50, 4).unwrap();
        assert_eq!(report.mismatches, 0);
        assert_eq!(report.repairs, 50);
        assert_eq!(report.total_moved, 50 * 8);
        let zero = random_failure_soak(&spec, &msg23(), 0, 4).unwrap();
        assert!(zero.events.is_empty() && zero.final_state_intact);
    }

    #[test]
    fn soak_complete_design() {
        let design = gen_complete_design(2, 3, 9).unwrap();
        let spec = build_code(&design, 7, &BuildOptions { q: Some(40577), ..Default::default() }).unwrap();
        let msg: Vec<u64> = (0..spec.params.m as u64).map(|i| i * 977 % 40577).collect();
        let report = random_failure_soak(&spec, &msg, 20, 1).unwrap();
        assert_eq!(report.expected_per_repair, 56);
        assert!(report.events.iter().filter_map(|e| e.symbols_moved).all(|m| m == 56));
        assert_eq!(report.mismatches, 0);
    }
}
