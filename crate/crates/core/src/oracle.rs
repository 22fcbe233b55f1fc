//! Brute-force reference implementations and instance generators used to
//! cross-check conflict detection and graph filtering.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crypto::{
    decode_id, decode_key, encode_id, encode_key, make_crypto_challenge, make_crypto_response, match_response, EgGroup,
    EgKeyPair, SsKeyPair, SymmetricKey,
};
use crate::edge::{detect_poc_excluding, filter_dsg, Dsg, Poc, PocPass};
use crate::ids::{Event, RsuId, VehicleId};

/// Raw reporter labels and neighbour claims.
#[derive(Debug, Clone)]
pub struct Instance {
    pub vertices: Vec<(VehicleId, Event, RsuId)>,
    pub claims: Vec<(VehicleId, VehicleId)>,
}

impl Instance {
    pub fn dsg(&self) -> Dsg {
        Dsg::from_parts(self.vertices.iter().cloned(), self.claims.iter().cloned())
    }

    fn sorted(&self) -> Vec<&(VehicleId, Event, RsuId)> {
        let mut v: Vec<_> = self.vertices.iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Symmetric adjacency over [`Self::sorted`] order.
    fn matrix(&self, order: &[&(VehicleId, Event, RsuId)]) -> Vec<Vec<bool>> {
        let pos = |id: &VehicleId| order.iter().position(|v| &v.0 == id);
        let mut m = vec![vec![false; order.len()]; order.len()];
        for (a, b) in &self.claims {
            if let (Some(i), Some(j)) = (pos(a), pos(b)) {
                if i != j {
                    m[i][j] = true;
                    m[j][i] = true;
                }
            }
        }
        m
    }
}

/// First conflicting pair in lexicographic order: adjacent pairs first, then
/// pairs sharing an RSU.
pub fn oracle_poc(inst: &Instance, excluded: &BTreeSet<VehicleId>) -> Option<Poc> {
    let order = inst.sorted();
    let adj = inst.matrix(&order);
    let n = order.len();
    let live = |i: usize| !excluded.contains(&order[i].0);
    let hit = |i: usize, j: usize, pass| Poc { cv1: order[i].0.clone(), cv2: order[j].0.clone(), pass };
    for i in 0..n {
        for j in i + 1..n {
            if live(i) && live(j) && adj[i][j] && order[i].1 != order[j].1 {
                return Some(hit(i, j, PocPass::Adjacency));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if live(i) && live(j) && order[i].2 == order[j].2 && order[i].1 != order[j].1 {
                return Some(hit(i, j, PocPass::SameRsu));
            }
        }
    }
    None
}

/// Reachability closure from `mal` plus everything under its RSU, split by
/// agreement with `mal`'s event.
pub fn oracle_filter(inst: &Instance, mal: &VehicleId) -> (BTreeSet<VehicleId>, BTreeSet<VehicleId>) {
    let order = inst.sorted();
    let n = order.len();
    let Some(s) = order.iter().position(|v| &v.0 == mal) else {
        return (BTreeSet::new(), BTreeSet::new());
    };
    let mut reach = inst.matrix(&order);
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let (mut bad, mut good) = (BTreeSet::new(), BTreeSet::new());
    for j in 0..n {
        if reach[s][j] || order[j].2 == order[s].2 {
            if order[j].1 == order[s].1 {
                bad.insert(order[j].0.clone());
            } else {
                good.insert(order[j].0.clone());
            }
        }
    }
    (bad, good)
}

fn random_event(rng: &mut ChaCha8Rng) -> Event {
    if rng.gen() {
        Event::Congested
    } else {
        Event::NonCongested
    }
}

/// Random labelled graph with up to `max_vertices` reporters, shuffled names
/// and occasional claims naming absent ids.
pub fn random_instance(rng: &mut ChaCha8Rng, max_vertices: usize) -> Instance {
    let n = rng.gen_range(1..=max_vertices);
    let mut names: Vec<usize> = (0..100).choose_multiple(rng, n);
    names.shuffle(rng);
    let ids: Vec<VehicleId> = names.iter().map(|k| VehicleId::new(format!("V{k:02}")).unwrap()).collect();
    let rsus = rng.gen_range(1..=3);
    let vertices =
        ids.iter().map(|id| (id.clone(), random_event(rng), RsuId::numbered(rng.gen_range(0..rsus)))).collect();
    let mut claims = Vec::new();
    for id in &ids {
        for _ in 0..rng.gen_range(0..=3) {
            let target =
                if rng.gen_ratio(1, 10) { VehicleId::new("GHOST").unwrap() } else { ids[rng.gen_range(0..n)].clone() };
            claims.push((id.clone(), target));
        }
    }
    Instance { vertices, claims }
}

/// Generated collusion scenario on honest reporters and a colluding group.
#[derive(Debug, Clone)]
pub struct CollusionCase {
    pub instance: Instance,
    pub threshold: usize,
    pub colluders: BTreeSet<VehicleId>,
    /// Colluders and honest reporters only name their own side.
    pub internal_only: bool,
}

impl CollusionCase {
    pub fn expected_pass(&self) -> PocPass {
        if self.internal_only {
            PocPass::SameRsu
        } else {
            PocPass::Adjacency
        }
    }

    /// A conflict of the expected kind between a colluder and an honest reporter.
    pub fn detected_by(&self, poc: Option<&Poc>) -> bool {
        poc.is_some_and(|p| {
            p.pass == self.expected_pass() && (self.colluders.contains(&p.cv1) != self.colluders.contains(&p.cv2))
        })
    }
}

/// With `internal_only` false the group is no larger than the threshold, so
/// every colluder must name an honest reporter. With it true the group exceeds
/// the threshold and the two sides never name each other, but one honest
/// reporter shares an RSU with a colluder.
pub fn collusion_case(rng: &mut ChaCha8Rng, internal_only: bool) -> CollusionCase {
    let (m, threshold, h) = if internal_only {
        let t = rng.gen_range(1..=4);
        (rng.gen_range(t + 1..=t + 4), t, rng.gen_range(t + 1..=t + 3))
    } else {
        let m = rng.gen_range(1..=5);
        let t = rng.gen_range(m..=m + 3);
        (m, t, rng.gen_range(1..=6).max(t + 1 - m))
    };
    let truth = random_event(rng);
    let mut names: Vec<usize> = (0..m + h).collect();
    names.shuffle(rng);
    let ids: Vec<VehicleId> = names.iter().map(|k| VehicleId::new(format!("C{k:02}")).unwrap()).collect();
    let (bad, good) = ids.split_at(m);
    let rsus = rng.gen_range(1..=3);
    let mut vertices: Vec<(VehicleId, Event, RsuId)> = Vec::new();
    for id in bad {
        vertices.push((id.clone(), truth.opposite(), RsuId::numbered(rng.gen_range(0..rsus))));
    }
    for id in good {
        vertices.push((id.clone(), truth, RsuId::numbered(rng.gen_range(0..rsus))));
    }
    if internal_only {
        let shared = vertices[rng.gen_range(0..m)].2.clone();
        vertices[m].2 = shared;
    }

    let mut claims = Vec::new();
    for id in bad {
        if internal_only {
            pick(&mut claims, id, bad, threshold, rng);
        } else {
            for other in bad.iter().filter(|o| *o != id) {
                claims.push((id.clone(), other.clone()));
            }
            pick(&mut claims, id, good, threshold + 1 - m, rng);
        }
    }
    for id in good {
        let pool = if internal_only { good } else { &ids[..] };
        pick(&mut claims, id, pool, threshold, rng);
    }
    CollusionCase {
        instance: Instance { vertices, claims },
        threshold,
        colluders: bad.iter().cloned().collect(),
        internal_only,
    }
}

fn pick(claims: &mut Vec<(VehicleId, VehicleId)>, me: &VehicleId, pool: &[VehicleId], k: usize, rng: &mut ChaCha8Rng) {
    let others: Vec<&VehicleId> = pool.iter().filter(|p| *p != me).collect();
    for t in others.choose_multiple(rng, k) {
        claims.push((me.clone(), (*t).clone()));
    }
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

pub type PocFn<'a> = &'a dyn Fn(&Dsg, &BTreeSet<VehicleId>) -> Option<Poc>;
pub type FilterFn<'a> = &'a dyn Fn(&Dsg, &VehicleId) -> (BTreeSet<VehicleId>, BTreeSet<VehicleId>);

pub fn verify_poc(cases: usize, seed: u64, max_vertices: usize, detect: PocFn<'_>) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("poc");
    for _ in 0..cases {
        let inst = random_instance(&mut rng, max_vertices);
        let excluded: BTreeSet<VehicleId> =
            inst.vertices.iter().filter(|_| rng.gen_ratio(1, 5)).map(|v| v.0.clone()).collect();
        let want = oracle_poc(&inst, &excluded);
        let got = detect(&inst.dsg(), &excluded);
        report.record(got == want, || format!("{inst:?} excluding {excluded:?}: got {got:?}, want {want:?}"));
    }
    report
}

pub fn verify_filter(cases: usize, seed: u64, max_vertices: usize, filter: FilterFn<'_>) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("filter");
    for _ in 0..cases {
        let inst = random_instance(&mut rng, max_vertices);
        let mal = inst.vertices[rng.gen_range(0..inst.vertices.len())].0.clone();
        let want = oracle_filter(&inst, &mal);
        let got = filter(&inst.dsg(), &mal);
        report.record(got == want, || format!("{inst:?} seed {mal}: got {got:?}, want {want:?}"));
    }
    report
}

/// Half the cases exercise each collusion regime.
pub fn verify_collusion(cases: usize, seed: u64, detect: PocFn<'_>) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("collusion");
    for i in 0..cases {
        let case = collusion_case(&mut rng, i % 2 == 1);
        let got = detect(&case.instance.dsg(), &BTreeSet::new());
        report.record(case.detected_by(got.as_ref()), || format!("{case:?}: got {got:?}"));
    }
    report
}

/// Id and key round trips through public-key encryption, signature tampering
/// and challenge matching.
pub fn verify_crypto(cases: usize, seed: u64) -> SuiteReport {
    const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("crypto");
    let ss = SsKeyPair::generate(128, &mut rng);
    let pk = ss.public_key();
    let group = EgGroup::standard();
    let signer = EgKeyPair::generate(&group, &mut rng);
    for i in 0..cases {
        let len = rng.gen_range(1..=16);
        let raw: String = (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char).collect();
        let id = VehicleId::new(raw).unwrap();
        let id_ok = pk
            .encrypt(&encode_id(&id))
            .ok()
            .and_then(|c| decode_id(&ss.decrypt(&c)).ok())
            .is_some_and(|back| back == id);
        report.record(id_ok, || format!("id round trip for {id}"));

        let key = SymmetricKey::generate(&mut rng);
        let key_ok = pk
            .encrypt(&encode_key(&key))
            .ok()
            .and_then(|c| decode_key(&ss.decrypt(&c)).ok())
            .is_some_and(|back| back.as_bytes() == key.as_bytes());
        report.record(key_ok, || format!("key round trip {i}"));

        let msg = id.as_bytes().to_vec();
        let sig = signer.sign(&msg, &mut rng).to_bytes();
        let mut forged = sig.clone();
        let at = rng.gen_range(0..forged.len());
        forged[at] ^= 1 << rng.gen_range(0..8);
        let sig_ok = signer.public().verify_bytes(&msg, &sig) && !signer.public().verify_bytes(&msg, &forged);
        report.record(sig_ok, || format!("signature case {i}"));

        let cv: [u8; 8] = rng.gen();
        let tw: [u8; 8] = rng.gen();
        let v: [u8; 8] = if i % 2 == 0 { cv } else { rng.gen() };
        let left = rng.gen_range(0..128);
        let matched = make_crypto_challenge(&cv, &tw, left)
            .and_then(|ch| make_crypto_response(&v, &ch))
            .is_ok_and(|resp| match_response(&resp, &tw, left));
        report.record(matched == (v == cv), || format!("challenge case {i}"));
    }
    report
}

/// Every suite against the shipped implementations.
pub fn verify_all(cases: usize, seed: u64) -> Vec<SuiteReport> {
    let detect = |g: &Dsg, ex: &BTreeSet<VehicleId>| detect_poc_excluding(g, ex);
    vec![
        verify_poc(cases, seed, 12, &detect),
        verify_filter(cases, seed.wrapping_add(1), 12, &filter_dsg),
        verify_collusion(cases, seed.wrapping_add(2), &detect),
        verify_crypto(cases, seed.wrapping_add(3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_implementations_pass() {
        for r in verify_all(200, 11) {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn filter_without_rsu_sweep_is_caught() {
        let component_only = |g: &Dsg, mal: &VehicleId| {
            let (bad, good) = filter_dsg(g, mal);
            let rsu = g.rsu_of(mal).cloned();
            let mut seen = BTreeSet::from([mal.clone()]);
            let mut stack = vec![mal.clone()];
            while let Some(v) = stack.pop() {
                for n in g.neighbors(&v) {
                    if seen.insert(n.clone()) {
                        stack.push(n.clone());
                    }
                }
            }
            let keep = |id: &VehicleId| seen.contains(id) || g.rsu_of(id) != rsu.as_ref();
            (bad.into_iter().filter(|i| keep(i)).collect(), good.into_iter().filter(|i| keep(i)).collect())
        };
        assert!(!verify_filter(200, 3, 12, &component_only).passed());
    }

    #[test]
    fn poc_ignoring_same_rsu_is_caught() {
        let adjacency_only =
            |g: &Dsg, ex: &BTreeSet<VehicleId>| detect_poc_excluding(g, ex).filter(|p| p.pass == PocPass::Adjacency);
        assert!(!verify_poc(200, 3, 12, &adjacency_only).passed());
        assert!(!verify_collusion(50, 3, &adjacency_only).passed());
    }
}
