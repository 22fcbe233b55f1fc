use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::channel::{secs_to_ms, Channel};
use super::population::expand;
use super::report::{LogEntry, SimReport};
use super::scenario::{ModelKind, Scenario, ScenarioError};
use crate::baselines::{
    majority_vote, peer_auth_decide, peer_rating_plan, reputation_decide, sample_reputations, BaselineOutcome,
};
use crate::central::Registry;
use crate::crypto::{EgGroup, SsKeyPair, SsPublicKey, SymmetricKey};
use crate::edge::{Decision, EdgeAction, EdgeConfig, EdgeServer, Verdict};
use crate::ids::{Event, VehicleId};
use crate::messages::{Message, PlainReport, Rating, Wire};
use crate::metrics::{detection_accuracy, ModelPath};
use crate::road::{Corridor, MPH_TO_MPS};
use crate::rsu::{Collected, RsuState};
use crate::vehicle::{answer_challenge, build_packets, make_enc_id, record_event, BehaviorKind, VehicleState};

const TICK_MS: u64 = 1000;

// Ordering of simultaneous events: deliveries, then the mobility tick, then timers.
const DELIVERY: u8 = 0;
const TICK: u8 = 1;
const TIMER: u8 = 2;

mod streams {
    pub const POPULATION: u64 = 0;
    pub const EDGE_KEYS: u64 = 1;
    pub const REGISTRY: u64 = 2;
    pub const CHANNEL: u64 = 3;
    pub const RSU: u64 = 4;
    pub const REPUTATION: u64 = 5;
    pub const VEHICLE_BASE: u64 = 1 << 16;
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    t: u64,
    class: u8,
    seq: u64,
}

#[derive(Debug)]
enum Ev {
    Tick,
    ToVehicle { v: usize, from: Option<usize>, frame: Vec<u8> },
    ToRsu { r: usize, frame: Vec<u8> },
    ToEdge { frame: Vec<u8> },
    RsuDeadline { r: usize, epoch: u64 },
    RelayDeadline { r: usize, epoch: u64 },
    RsuBroadcast { r: usize, at: u64 },
    RsuClose { r: usize, at: u64 },
}

struct Veh {
    st: VehicleState,
    group: Option<String>,
    has_key: bool,
    sent_enc_id: bool,
    reported: bool,
    exited: bool,
    heard: Vec<(usize, BigUint)>,
    rng: ChaCha8Rng,
    broadcasts: u64,
}

impl Veh {
    fn finished(&self) -> bool {
        self.exited || self.reported
    }
}

#[derive(Default)]
struct Relay {
    buf: Vec<Message>,
    epoch: u64,
}

enum Mode {
    Proposed {
        edge: Box<EdgeServer>,
        registry: Registry,
        pk: SsPublicKey,
    },
    Baseline {
        reports: BTreeMap<VehicleId, Event>,
        ratings: BTreeMap<VehicleId, Vec<bool>>,
        relays: Vec<Relay>,
        plan: Vec<Vec<(usize, bool)>>,
    },
}

struct Sim<'a> {
    s: &'a Scenario,
    corridor: Corridor,
    now: u64,
    seq: u64,
    queue: BTreeMap<Key, Ev>,
    pending: usize,
    vehicles: Vec<Veh>,
    rsus: Vec<RsuState>,
    channel: Channel,
    backhaul_ms: u64,
    sigma_ms: u64,
    rsu_rng: ChaCha8Rng,
    rsu_tx: u64,
    edge_tx: u64,
    log: Vec<LogEntry>,
    mode: Mode,
    group_sizes: BTreeMap<String, usize>,
    tamper: BTreeSet<VehicleId>,
}

/// Runs one scenario to completion.
pub fn run(s: &Scenario) -> Result<SimReport, ScenarioError> {
    s.validate()?;
    let mut sim = Sim::new(s)?;
    sim.main_loop();
    Ok(sim.finish())
}

impl<'a> Sim<'a> {
    fn new(s: &'a Scenario) -> Result<Self, ScenarioError> {
        let corridor = s.corridor();
        let specs = expand(s, &mut stream(s.seed, streams::POPULATION))?;
        let n = specs.len();
        let sigma_ms = secs_to_ms(s.sigma_s);
        let rsus: Vec<RsuState> = corridor
            .rsus()
            .iter()
            .map(|site| RsuState::new(site.id.clone(), site.location_m, corridor.range_m(), sigma_ms, s.threshold))
            .collect();

        let mut registry = Registry::new(EgGroup::standard());
        let mut reg_rng = stream(s.seed, streams::REGISTRY);
        let mut vehicles = Vec::with_capacity(n);
        let mut group_sizes: BTreeMap<String, usize> = BTreeMap::new();
        for (i, (id, spec)) in specs.into_iter().enumerate() {
            let mut rng = stream(s.seed, streams::VEHICLE_BASE + i as u64);
            let eg_keys = if s.model == ModelKind::Proposed {
                registry.register(id.clone(), &mut reg_rng).map_err(|e| ScenarioError::Invalid(e.to_string()))?
            } else {
                crate::crypto::EgKeyPair::generate(&EgGroup::standard(), &mut rng)
            };
            let group = spec.behavior.collusion_group().map(str::to_string);
            if let Some(g) = &group {
                *group_sizes.entry(g.clone()).or_default() += 1;
            }
            let sym_key = SymmetricKey::generate(&mut rng);
            vehicles.push(Veh {
                st: VehicleState {
                    id,
                    eg_keys,
                    position_m: spec.position_m,
                    velocity_mph: spec.velocity_mph,
                    trajectory: corridor.trajectory_from(spec.position_m),
                    behavior: spec.behavior,
                    sym_key,
                },
                group,
                has_key: false,
                sent_enc_id: false,
                reported: false,
                exited: false,
                heard: Vec::new(),
                rng,
                broadcasts: 0,
            });
        }

        let mode = match s.model {
            ModelKind::Proposed => {
                let keys = SsKeyPair::generate(s.prime_bits, &mut stream(s.seed, streams::EDGE_KEYS));
                let pk = keys.public_key();
                let cfg = EdgeConfig {
                    threshold: s.threshold,
                    scrutiny: s.scrutiny,
                    t_max: s.t_max_s,
                    corridor: corridor.clone(),
                };
                Mode::Proposed { edge: Box::new(EdgeServer::new(keys, cfg)), registry, pk }
            }
            _ => {
                let events: Vec<Event> = vehicles.iter().map(|v| record_event(&v.st, &s.scrutiny)).collect();
                Mode::Baseline {
                    reports: BTreeMap::new(),
                    ratings: BTreeMap::new(),
                    relays: (0..rsus.len()).map(|_| Relay::default()).collect(),
                    plan: peer_rating_plan(&events, s.threshold),
                }
            }
        };

        Ok(Self {
            s,
            channel: Channel::new(s.channel, n + rsus.len(), stream(s.seed, streams::CHANNEL)),
            corridor,
            now: 0,
            seq: 0,
            queue: BTreeMap::new(),
            pending: 0,
            vehicles,
            rsus,
            backhaul_ms: secs_to_ms(s.channel.backhaul_latency_s),
            sigma_ms,
            rsu_rng: stream(s.seed, streams::RSU),
            rsu_tx: 0,
            edge_tx: 0,
            log: Vec::new(),
            mode,
            group_sizes,
            tamper: s.tamper.iter().cloned().collect(),
        })
    }

    fn push(&mut self, t: u64, class: u8, ev: Ev) {
        if !matches!(ev, Ev::Tick) {
            self.pending += 1;
        }
        self.seq += 1;
        self.queue.insert(Key { t, class, seq: self.seq }, ev);
    }

    fn note(&mut self, entity: impl Into<String>, event: impl Into<String>) {
        self.log.push(LogEntry { t_ms: self.now, entity: entity.into(), event: event.into() });
    }

    fn main_loop(&mut self) {
        let horizon = secs_to_ms(self.s.horizon_s);
        self.push(0, TICK, Ev::Tick);
        while let Some((key, ev)) = self.queue.pop_first() {
            if key.t > horizon {
                self.note("engine", "horizon reached");
                break;
            }
            self.now = key.t;
            if !matches!(ev, Ev::Tick) {
                self.pending -= 1;
            }
            match ev {
                Ev::Tick => {
                    if self.on_tick() {
                        break;
                    }
                    self.push(self.now + TICK_MS, TICK, Ev::Tick);
                }
                Ev::ToVehicle { v, from, frame } => self.vehicle_rx(v, from, &frame),
                Ev::ToRsu { r, frame } => self.rsu_rx(r, &frame),
                Ev::ToEdge { frame } => self.edge_rx(&frame),
                Ev::RsuDeadline { r, epoch } => {
                    if let Some(agg) = self.rsus[r].on_deadline(epoch) {
                        self.rsu_to_edge(r, Message::Aggregate(agg));
                    }
                }
                Ev::RelayDeadline { r, epoch } => self.relay_flush(r, Some(epoch)),
                Ev::RsuBroadcast { r, at } => {
                    if let Some(frame) = self.rsus[r].challenge_frame(at) {
                        let id = self.rsus[r].id.clone();
                        self.note(id.as_str(), format!("broadcast {} challenge(s)", frame.challenges.len()));
                        self.rsu_broadcast(r, Message::CryptoChallenge(frame));
                    }
                    self.push(at + self.sigma_ms, TIMER, Ev::RsuClose { r, at });
                }
                Ev::RsuClose { r, at } => {
                    for search in self.rsus[r].close_window(at) {
                        let id = self.rsus[r].id.clone();
                        self.note(id.as_str(), format!("search {} {:?}", search.cv, search.response));
                        self.rsu_to_edge(r, Message::Search(search));
                    }
                }
            }
        }
    }

    /// Mobility and per-vehicle polling. Returns true once the run is quiescent.
    fn on_tick(&mut self) -> bool {
        if self.now > 0 {
            for v in self.vehicles.iter_mut().filter(|v| !v.exited) {
                v.st.position_m += v.st.velocity_mph * MPH_TO_MPS * (TICK_MS as f64 / 1000.0);
                if v.st.position_m > self.s.corridor_length_m {
                    v.exited = true;
                }
            }
        }
        for i in 0..self.vehicles.len() {
            self.poll_vehicle(i);
        }
        let awaiting = match &self.mode {
            Mode::Proposed { edge, .. } => edge.awaiting_challenge(),
            Mode::Baseline { .. } => false,
        };
        self.pending == 0 && !awaiting && self.vehicles.iter().all(Veh::finished)
    }

    fn poll_vehicle(&mut self, i: usize) {
        if self.vehicles[i].exited {
            return;
        }
        let pos = self.vehicles[i].st.position_m;
        let nearest = self.corridor.nearest_in_range(pos).and_then(|site| self.corridor.index_of(&site.id));
        if nearest.is_some() {
            self.vehicles[i].has_key = true;
        }
        let dropper = self.vehicles[i].st.behavior.kind == BehaviorKind::DropPackets;
        match self.s.model {
            ModelKind::Proposed => {
                let Mode::Proposed { pk, .. } = &self.mode else { unreachable!() };
                let v = &self.vehicles[i];
                if v.has_key && !v.sent_enc_id {
                    let enc = make_enc_id(&v.st, pk).expect("encoded ids fit the plaintext space");
                    self.vehicles[i].sent_enc_id = true;
                    self.broadcast_v2v(i, Message::EncodedId(enc));
                    if dropper {
                        self.vehicles[i].reported = true;
                    }
                    return;
                }
                if !v.sent_enc_id || v.reported {
                    return;
                }
                let (Some(r), Some(ids)) = (nearest, self.select_enc_ids(i)) else { return };
                let trajectory = self.corridor.trajectory_from(pos);
                let v = &mut self.vehicles[i];
                v.st.trajectory = trajectory;
                v.st.new_round(&mut v.rng);
                let built = build_packets(&v.st, &ids, self.s.threshold, pk, &self.s.scrutiny, &mut v.rng)
                    .expect("neighbour ids were selected");
                v.reported = true;
                if v.st.behavior.slow_to_prove {
                    v.st.velocity_mph = v.st.reported_velocity();
                }
                if let Some(packet) = built {
                    let id = v.st.id.clone();
                    self.note(id.as_str(), format!("report to {}", self.rsus[r].id));
                    self.send_to_rsu(i, r, Message::Encrypted(packet));
                }
            }
            model => {
                let Some(r) = nearest else { return };
                if self.vehicles[i].reported {
                    return;
                }
                self.vehicles[i].reported = true;
                if dropper {
                    return;
                }
                let st = &self.vehicles[i].st;
                let event = record_event(st, &self.s.scrutiny);
                let frames: Vec<Message> = if model == ModelKind::PeerAuth {
                    let Mode::Baseline { plan, .. } = &self.mode else { unreachable!() };
                    plan[i]
                        .iter()
                        .map(|&(about, positive)| {
                            Message::Rating(Rating {
                                rater: st.id.clone(),
                                rater_event: event,
                                about: self.vehicles[about].st.id.clone(),
                                positive,
                            })
                        })
                        .collect()
                } else {
                    vec![Message::Report(PlainReport { v_id: st.id.clone(), event })]
                };
                for f in frames {
                    self.send_to_rsu(i, r, f);
                }
            }
        }
    }

    fn select_enc_ids(&self, i: usize) -> Option<Vec<BigUint>> {
        let need = self.s.threshold;
        let v = &self.vehicles[i];
        let Some(g) = &v.group else {
            return (v.heard.len() >= need).then(|| v.heard[..need].iter().map(|(_, c)| c.clone()).collect());
        };
        let in_group = |s: usize| self.vehicles[s].group.as_deref() == Some(g.as_str());
        let mut members: Vec<&(usize, BigUint)> = v.heard.iter().filter(|(s, _)| in_group(*s)).collect();
        members.sort_by(|a, b| self.vehicles[a.0].st.id.cmp(&self.vehicles[b.0].st.id));
        let mut picked: Vec<BigUint> = members.iter().map(|(_, c)| c.clone()).collect();
        if self.group_sizes[g] <= need {
            picked.extend(v.heard.iter().filter(|(s, _)| !in_group(*s)).map(|(_, c)| c.clone()));
        }
        (picked.len() >= need).then(|| picked[..need].to_vec())
    }

    fn broadcast_v2v(&mut self, i: usize, msg: Message) {
        self.vehicles[i].broadcasts += 1;
        let frame = msg.to_bytes();
        let at = self.channel.transmit(i, self.now);
        let src = self.vehicles[i].st.position_m;
        for j in 0..self.vehicles.len() {
            if j == i || self.vehicles[j].exited {
                continue;
            }
            if self.channel.reaches(src, self.vehicles[j].st.position_m) && self.channel.survives() {
                self.push(at, DELIVERY, Ev::ToVehicle { v: j, from: Some(i), frame: frame.clone() });
            }
        }
    }

    fn send_to_rsu(&mut self, i: usize, r: usize, msg: Message) {
        self.vehicles[i].broadcasts += 1;
        let mut frame = msg.to_bytes();
        if matches!(msg, Message::Encrypted(_)) && self.tamper.contains(&self.vehicles[i].st.id) {
            if let Some(last) = frame.last_mut() {
                *last ^= 0x01;
            }
        }
        let at = self.channel.transmit(i, self.now);
        if self.channel.reaches(self.vehicles[i].st.position_m, self.rsus[r].location_m) && self.channel.survives() {
            self.push(at, DELIVERY, Ev::ToRsu { r, frame });
        }
    }

    fn rsu_broadcast(&mut self, r: usize, msg: Message) {
        self.rsu_tx += 1;
        let frame = msg.to_bytes();
        let at = self.channel.transmit(self.vehicles.len() + r, self.now);
        let src = self.rsus[r].location_m;
        for j in 0..self.vehicles.len() {
            if !self.vehicles[j].exited
                && self.channel.reaches(src, self.vehicles[j].st.position_m)
                && self.channel.survives()
            {
                self.push(at, DELIVERY, Ev::ToVehicle { v: j, from: None, frame: frame.clone() });
            }
        }
    }

    fn rsu_to_edge(&mut self, _r: usize, msg: Message) {
        self.rsu_tx += 1;
        self.push(self.now + self.backhaul_ms, DELIVERY, Ev::ToEdge { frame: msg.to_bytes() });
    }

    fn edge_to_rsus(&mut self, msg: Message) {
        self.edge_tx += 1;
        let frame = msg.to_bytes();
        for r in 0..self.rsus.len() {
            self.push(self.now + self.backhaul_ms, DELIVERY, Ev::ToRsu { r, frame: frame.clone() });
        }
    }

    fn vehicle_rx(&mut self, i: usize, from: Option<usize>, frame: &[u8]) {
        if self.vehicles[i].exited {
            return;
        }
        match Message::from_bytes(frame) {
            Ok(Message::EncodedId(c)) => {
                if let Some(s) = from {
                    let heard = &mut self.vehicles[i].heard;
                    if !heard.iter().any(|(_, h)| *h == c) {
                        heard.push((s, c));
                    }
                }
            }
            Ok(Message::CryptoChallenge(ch)) => {
                let Some(resp) = answer_challenge(&self.vehicles[i].st, &ch) else { return };
                if let Some(r) = self.corridor.index_of(&ch.rsu_id) {
                    self.send_to_rsu(i, r, Message::CryptoResponse(resp));
                }
            }
            _ => {}
        }
    }

    fn rsu_rx(&mut self, r: usize, frame: &[u8]) {
        let msg = match Message::from_bytes(frame) {
            Ok(m) => m,
            Err(e) => {
                let id = self.rsus[r].id.clone();
                self.note(id.as_str(), format!("dropped frame: {e}"));
                return;
            }
        };
        match msg {
            Message::Encrypted(p) => match self.rsus[r].collect(p, self.now) {
                Collected::Flushed(agg) => self.rsu_to_edge(r, Message::Aggregate(agg)),
                Collected::TimerArmed { deadline_ms, epoch } => {
                    self.push(deadline_ms, TIMER, Ev::RsuDeadline { r, epoch })
                }
                Collected::Buffered => {}
            },
            Message::Challenge(cp) => {
                for at in self.rsus[r].on_challenge(&cp, self.now, &mut self.rsu_rng) {
                    self.push(at, TIMER, Ev::RsuBroadcast { r, at });
                }
            }
            Message::CryptoResponse(resp) => self.rsus[r].on_response(&resp, self.now),
            m @ (Message::Report(_) | Message::Rating(_)) => {
                let Mode::Baseline { relays, .. } = &mut self.mode else { return };
                let relay = &mut relays[r];
                relay.buf.push(m);
                if relay.buf.len() >= self.s.threshold {
                    self.relay_flush(r, None);
                } else if relay.buf.len() == 1 {
                    let epoch = relay.epoch;
                    self.push(self.now + self.sigma_ms, TIMER, Ev::RelayDeadline { r, epoch });
                }
            }
            _ => {}
        }
    }

    fn relay_flush(&mut self, r: usize, epoch: Option<u64>) {
        let Mode::Baseline { relays, .. } = &mut self.mode else { return };
        let relay = &mut relays[r];
        if epoch.is_some_and(|e| e != relay.epoch) || relay.buf.is_empty() {
            return;
        }
        relay.epoch += 1;
        let batch = std::mem::take(&mut relay.buf);
        self.rsu_tx += 1;
        for m in batch {
            self.push(self.now + self.backhaul_ms, DELIVERY, Ev::ToEdge { frame: m.to_bytes() });
        }
    }

    fn edge_rx(&mut self, frame: &[u8]) {
        let Ok(msg) = Message::from_bytes(frame) else {
            self.note("edge", "dropped undecodable frame");
            return;
        };
        let actions = match (&mut self.mode, msg) {
            (Mode::Proposed { edge, registry, .. }, Message::Aggregate(agg)) => {
                edge.on_aggregate(&agg, registry, self.now)
            }
            (Mode::Proposed { edge, .. }, Message::Search(s)) => edge.on_search(&s, self.now),
            (Mode::Baseline { reports, .. }, Message::Report(rep)) => {
                reports.insert(rep.v_id, rep.event);
                Vec::new()
            }
            (Mode::Baseline { reports, ratings, .. }, Message::Rating(rt)) => {
                reports.insert(rt.rater, rt.rater_event);
                ratings.entry(rt.about).or_default().push(rt.positive);
                Vec::new()
            }
            _ => Vec::new(),
        };
        for a in actions {
            match a {
                EdgeAction::Challenge(cp) => {
                    let who: Vec<String> = cp.entries.iter().map(|e| format!("{}@{}s", e.cv, e.time_s)).collect();
                    self.note("edge", format!("challenge {}", who.join(" ")));
                    self.edge_to_rsus(Message::Challenge(cp));
                }
                EdgeAction::Decided { verdict, basis } => self.note("edge", format!("verdict {verdict} by {basis}")),
            }
        }
    }

    fn finish(mut self) -> SimReport {
        let truth = self.s.ground_truth;
        let n = self.vehicles.len();
        let malicious = self.vehicles.iter().filter(|v| v.st.behavior.is_malicious()).count();
        let per_vehicle_broadcasts: Vec<u64> = self.vehicles.iter().map(|v| v.broadcasts).collect();
        let now = self.now;
        let (path, verdict, conditional, basis, accuracy, decision, decision_time_ms) = match &mut self.mode {
            Mode::Proposed { edge, .. } => {
                let d = edge.finalize(now);
                let path =
                    if edge.challenges_issued() > 0 { ModelPath::ProposedUpper } else { ModelPath::ProposedLower };
                let correct = proposed_correct(&d, edge, &self.vehicles, truth);
                let acc = detection_accuracy(correct, false);
                (path, d.verdict, false, d.basis.as_str().to_string(), acc, Some(d), edge.decided_at_ms())
            }
            Mode::Baseline { reports, ratings, .. } => {
                let ids: Vec<&VehicleId> = reports.keys().collect();
                let events: Vec<Event> = reports.values().copied().collect();
                let (path, outcome, basis) = match self.s.model {
                    ModelKind::Reputation => {
                        let reps = sample_reputations(events.len(), &mut stream(self.s.seed, streams::REPUTATION));
                        (ModelPath::Reputation, reputation_decide(&events, &reps), "reputation_weighted")
                    }
                    ModelKind::PeerAuth => {
                        let r: Vec<Vec<bool>> =
                            ids.iter().map(|id| ratings.get(*id).cloned().unwrap_or_default()).collect();
                        (ModelPath::PeerAuth, peer_auth_decide(&events, &r, self.s.threshold), "peer_endorsed")
                    }
                    _ => (ModelPath::Majority, majority_vote(&events), "majority"),
                };
                let outcome = outcome.unwrap_or(BaselineOutcome { winner: None, conditional: false });
                let verdict = outcome.winner.map(Verdict::from).unwrap_or(Verdict::Undetermined);
                let acc = detection_accuracy(outcome.winner == Some(truth), outcome.conditional);
                let at = (!reports.is_empty()).then_some(now);
                (path, verdict, outcome.conditional, basis.to_string(), acc, None, at)
            }
        };
        self.note("engine", format!("finished: {verdict}"));
        SimReport {
            model: self.s.model,
            path,
            n,
            threshold: self.s.threshold,
            n_rsu: self.rsus.len(),
            malicious,
            ground_truth: truth,
            verdict,
            conditional,
            basis,
            accuracy,
            decision,
            per_vehicle_broadcasts,
            rsu_transmissions: self.rsu_tx,
            edge_transmissions: self.edge_tx,
            decision_time_ms,
            end_time_ms: now,
            log: self.log,
        }
    }
}

/// Correct verdict, no honest vehicle flagged, and every accepted report of
/// the wrong event flagged.
fn proposed_correct(d: &Decision, edge: &EdgeServer, vehicles: &[Veh], truth: Event) -> bool {
    if d.verdict != Verdict::from(truth) {
        return false;
    }
    let honest_flagged = vehicles.iter().any(|v| !v.st.behavior.is_malicious() && d.mal_list.contains(&v.st.id));
    let liar_missed = edge.dsg().vertices().any(|(id, vx)| vx.event != truth && !d.mal_list.contains(id));
    !honest_flagged && !liar_missed
}
