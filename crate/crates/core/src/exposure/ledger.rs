//! The expose ledger H: which r-sets have been exposed, with per-tuple
//! degree counters and per-phase snapshots.
//!
//! Storage is keyed by packed canonical sets. Exposures performed "at a
//! tuple" (and one-off window exposures) are recorded individually; the
//! leaf-pair unions added wholesale after a connection phase are recorded
//! lazily as (leaf set, leaf set) pairs with exact membership testing, since
//! materializing all r-subsets of every pair union is memory-prohibitive.
//! Degree counters track individually exposed r-sets only; lazily recorded
//! blanket sets contribute to membership but not to degrees.

use super::{ExposureConfig, ExposureError};
use crate::set::{pack_set, pack_sorted, FastMap, FastSet, SetKey, Vertex, MAX_SET_ARITY};
use crate::set::binomial;

#[derive(Debug, Clone, Copy)]
struct ExpRec {
    tag: u8,
    epoch: u32,
}

impl ExpRec {
    fn new(round: usize, appeared: bool, epoch: u32) -> Self {
        debug_assert!(round < 128);
        ExpRec {
            tag: (round as u8) | if appeared { 0x80 } else { 0 },
            epoch,
        }
    }
    fn round(self) -> usize {
        (self.tag & 0x7f) as usize
    }
    fn appeared(self) -> bool {
        self.tag & 0x80 != 0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct DegEntry {
    total: u32,
    snap: u32,
    epoch: u32,
}

type RecordMask = Vec<u64>;

fn set_bit(mask: &mut RecordMask, id: usize) {
    let word = id / 64;
    if mask.len() <= word {
        mask.resize(word + 1, 0);
    }
    mask[word] |= 1 << (id % 64);
}

fn masks_intersect(a: &RecordMask, b: &RecordMask) -> bool {
    a.iter().zip(b.iter()).any(|(x, y)| x & y != 0)
}

/// One recorded leaf-pair blanket: after phase i every r-subset of
/// `x ∪ y` for leaves x, y counts as exposed.
#[derive(Debug, Clone)]
pub struct LeafPairRecord {
    pub leaves_u: usize,
    pub leaves_v: usize,
}

#[derive(Debug)]
pub struct ExposureLedger {
    r: usize,
    exposed: FastMap<SetKey, ExpRec>,
    deg: FastMap<SetKey, DegEntry>,
    epoch: u32,
    hot_watermark: u32,
    hot: FastSet<SetKey>,
    pair_records: Vec<LeafPairRecord>,
    pair_epochs: Vec<u32>,
    pair_u_subsets: FastMap<SetKey, RecordMask>,
    pair_v_subsets: FastMap<SetKey, RecordMask>,
    pair_vertices: FastMap<Vertex, RecordMask>,
    blanket_upper: u128,
    exposed_per_round: Vec<u64>,
    appeared_per_round: Vec<u64>,
    already_exposed_attempts: u64,
}

impl ExposureLedger {
    /// `hot_watermark` sets the degree level from which (r-1)-sets are
    /// mirror-indexed for fast dangerous-set enumeration; queries below the
    /// watermark fall back to a full scan.
    pub fn new(r: usize, n_rounds: usize, hot_watermark: u32) -> Self {
        assert!(n_rounds < 128, "round tag is 7 bits");
        ExposureLedger {
            r,
            exposed: FastMap::default(),
            deg: FastMap::default(),
            epoch: 0,
            hot_watermark: hot_watermark.max(1),
            hot: FastSet::default(),
            pair_records: Vec::new(),
            pair_epochs: Vec::new(),
            pair_u_subsets: FastMap::default(),
            pair_v_subsets: FastMap::default(),
            pair_vertices: FastMap::default(),
            blanket_upper: 0,
            exposed_per_round: vec![0; n_rounds + 1],
            appeared_per_round: vec![0; n_rounds + 1],
            already_exposed_attempts: 0,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Individually exposed r-sets (blanket records not included).
    pub fn exposed_count(&self) -> u64 {
        self.exposed.len() as u64
    }

    pub fn exposures_per_round(&self) -> (&[u64], &[u64]) {
        (&self.exposed_per_round, &self.appeared_per_round)
    }

    pub fn already_exposed_attempts(&self) -> u64 {
        self.already_exposed_attempts
    }

    /// Upper bound on e(H) including blanket records (pairs may overlap, so
    /// this over-counts; used by the strict-mode bookkeeping diagnostic).
    pub fn edge_count_upper(&self) -> u128 {
        self.exposed.len() as u128 + self.blanket_upper
    }

    pub fn pair_records(&self) -> &[LeafPairRecord] {
        &self.pair_records
    }

    fn bump_deg(&mut self, key: SetKey, by: u32) {
        let e = self.deg.entry(key).or_default();
        if e.epoch < self.epoch {
            e.snap = e.total;
            e.epoch = self.epoch;
        }
        e.total += by;
        if e.total >= self.hot_watermark {
            self.hot.insert(key);
        }
    }

    fn bump_all_subsets(&mut self, sorted: &[Vertex]) {
        let r = self.r;
        let mut sub = [0u32; MAX_SET_ARITY];
        for skip in 0..r {
            let mut m = 0;
            for (i, &v) in sorted.iter().enumerate() {
                if i != skip {
                    sub[m] = v;
                    m += 1;
                }
            }
            self.bump_deg(pack_sorted(&sub[..m]), 1);
        }
    }

    /// Whether the r-set is considered exposed: individually exposed, or
    /// inside some recorded leaf-pair union.
    pub fn is_exposed(&self, e: &[Vertex]) -> bool {
        let mut sorted = [0u32; MAX_SET_ARITY];
        sorted[..e.len()].copy_from_slice(e);
        sorted[..e.len()].sort_unstable();
        let key = pack_sorted(&sorted[..e.len()]);
        self.exposed.contains_key(&key) || self.blanket_contains(&sorted[..e.len()], None)
    }

    /// Whether the r-set was already exposed at the start of the current
    /// phase (i.e. is in the snapshot H_i).
    pub fn is_exposed_snapshot(&self, e: &[Vertex]) -> bool {
        let mut sorted = [0u32; MAX_SET_ARITY];
        sorted[..e.len()].copy_from_slice(e);
        sorted[..e.len()].sort_unstable();
        let key = pack_sorted(&sorted[..e.len()]);
        if self
            .exposed
            .get(&key)
            .is_some_and(|rec| rec.epoch < self.epoch)
        {
            return true;
        }
        self.blanket_contains(&sorted[..e.len()], Some(self.epoch))
    }

    /// Exposed with an appearing coin. Blanket records never appear.
    pub fn appeared(&self, e: &[Vertex]) -> bool {
        self.appeared_key(pack_set(e))
    }

    pub fn appeared_key(&self, key: SetKey) -> bool {
        self.exposed.get(&key).is_some_and(|rec| rec.appeared())
    }

    /// All appeared r-sets, ascending; the edge universe for final
    /// self-verification.
    pub fn appeared_keys(&self) -> Vec<SetKey> {
        let mut out: Vec<SetKey> = self
            .exposed
            .iter()
            .filter(|(_, rec)| rec.appeared())
            .map(|(&k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }

    /// `before_epoch = Some(e)` restricts to records created before epoch e.
    fn blanket_contains(&self, sorted: &[Vertex], before_epoch: Option<u32>) -> bool {
        if self.pair_records.is_empty() {
            return false;
        }
        // quick reject: every vertex must occur in a common record
        let mut acc: Option<RecordMask> = None;
        for v in sorted {
            match self.pair_vertices.get(v) {
                None => return false,
                Some(mask) => {
                    acc = Some(match acc {
                        None => mask.clone(),
                        Some(a) => {
                            let mut out = vec![0u64; a.len().min(mask.len())];
                            for (i, slot) in out.iter_mut().enumerate() {
                                *slot = a[i] & mask[i];
                            }
                            out
                        }
                    });
                }
            }
        }
        if acc.as_ref().is_none_or(|m| m.iter().all(|&w| w == 0)) {
            return false;
        }
        // exact split test: e = e_u ⊔ e_v with e_u inside a u-leaf and e_v
        // inside a v-leaf of the same record
        let k = sorted.len();
        let mut e_u = [0u32; MAX_SET_ARITY];
        let mut e_v = [0u32; MAX_SET_ARITY];
        for split in 1..(1u32 << k) - 1 {
            let mut nu = 0;
            let mut nv = 0;
            for (i, &v) in sorted.iter().enumerate() {
                if split >> i & 1 == 1 {
                    e_u[nu] = v;
                    nu += 1;
                } else {
                    e_v[nv] = v;
                    nv += 1;
                }
            }
            if nu >= self.r || nv >= self.r {
                continue;
            }
            let (Some(mu), Some(mv)) = (
                self.pair_u_subsets.get(&pack_sorted(&e_u[..nu])),
                self.pair_v_subsets.get(&pack_sorted(&e_v[..nv])),
            ) else {
                continue;
            };
            match before_epoch {
                None => {
                    if masks_intersect(mu, mv) {
                        return true;
                    }
                }
                Some(cut) => {
                    for (w, (a, b)) in mu.iter().zip(mv.iter()).enumerate() {
                        let mut bits = a & b;
                        while bits != 0 {
                            let id = w * 64 + bits.trailing_zeros() as usize;
                            if self.pair_epochs[id] < cut {
                                return true;
                            }
                            bits &= bits - 1;
                        }
                    }
                }
            }
        }
        false
    }

    /// Current degree of `s`: the number of individually exposed r-sets
    /// containing it.
    pub fn deg_h(&self, s: &[Vertex]) -> u32 {
        self.deg.get(&pack_set(s)).map_or(0, |e| e.total)
    }

    /// Degree of `s` in the phase snapshot H_i.
    pub fn deg_snapshot(&self, s: &[Vertex]) -> u32 {
        self.deg_snapshot_key(pack_set(s))
    }

    pub fn deg_snapshot_key(&self, key: SetKey) -> u32 {
        match self.deg.get(&key) {
            None => 0,
            Some(e) => {
                if e.epoch == self.epoch {
                    e.snap
                } else {
                    e.total
                }
            }
        }
    }

    /// Marks the start of a phase: subsequent deg_snapshot queries answer
    /// with the state frozen here.
    pub fn snapshot_phase(&mut self) {
        self.epoch += 1;
    }

    /// (key, snapshot degree) for every set with snapshot degree >= tau,
    /// ascending by key. Uses the hot mirror when tau clears the watermark.
    pub fn snapshot_deg_at_least(&self, tau: u32) -> Vec<(SetKey, u32)> {
        let tau = tau.max(1);
        let mut out: Vec<(SetKey, u32)> = if tau >= self.hot_watermark {
            self.hot
                .iter()
                .filter_map(|&k| {
                    let d = self.deg_snapshot_key(k);
                    (d >= tau).then_some((k, d))
                })
                .collect()
        } else {
            self.deg
                .keys()
                .filter_map(|&k| {
                    let d = self.deg_snapshot_key(k);
                    (d >= tau).then_some((k, d))
                })
                .collect()
        };
        out.sort_unstable();
        out
    }

    /// Exposes one r-set; errors if it was ever exposed before (in any
    /// round) or lies in a recorded blanket.
    pub fn expose(
        &mut self,
        cfg: &ExposureConfig,
        round: usize,
        e: &[Vertex],
    ) -> Result<bool, ExposureError> {
        if e.len() != self.r {
            return Err(ExposureError::WrongArity {
                expected: self.r,
                got: e.len(),
            });
        }
        if round == 0 || round > cfg.n_rounds() {
            return Err(ExposureError::BadRound {
                round,
                rounds: cfg.n_rounds(),
            });
        }
        let mut sorted = [0u32; MAX_SET_ARITY];
        sorted[..e.len()].copy_from_slice(e);
        sorted[..e.len()].sort_unstable();
        let sorted = &sorted[..e.len()];
        let key = pack_sorted(sorted);
        if let Some(rec) = self.exposed.get(&key) {
            self.already_exposed_attempts += 1;
            return Err(ExposureError::AlreadyExposed {
                set: sorted.to_vec(),
                prev_round: rec.round(),
            });
        }
        if self.blanket_contains(sorted, None) {
            self.already_exposed_attempts += 1;
            return Err(ExposureError::AlreadyExposed {
                set: sorted.to_vec(),
                prev_round: 0,
            });
        }
        let appeared = cfg.coin_key(round, key);
        self.exposed
            .insert(key, ExpRec::new(round, appeared, self.epoch));
        self.exposed_per_round[round] += 1;
        if appeared {
            self.appeared_per_round[round] += 1;
        }
        self.bump_all_subsets(sorted);
        Ok(appeared)
    }

    /// Exposes all r-sets `tuple + {c}` for `c` in `candidates`; returns the
    /// appearing completions in candidate order. All sets must be fresh.
    pub fn expose_at(
        &mut self,
        cfg: &ExposureConfig,
        round: usize,
        tuple: &[Vertex],
        candidates: &[Vertex],
    ) -> Result<Vec<Vertex>, ExposureError> {
        if tuple.len() != self.r - 1 {
            return Err(ExposureError::WrongArity {
                expected: self.r - 1,
                got: tuple.len(),
            });
        }
        let mut appearing = Vec::new();
        for &c in candidates {
            debug_assert!(!tuple.contains(&c));
            let mut e = [0u32; MAX_SET_ARITY];
            e[..tuple.len()].copy_from_slice(tuple);
            e[tuple.len()] = c;
            if self.expose(cfg, round, &e[..self.r])? {
                appearing.push(c);
            }
        }
        Ok(appearing)
    }

    /// Records the phase's leaf-pair blanket: every r-subset of `x ∪ y`
    /// for x in `leaves_u`, y in `leaves_v` counts as exposed from now on.
    /// Leaves are (r-1)-sets given in any order.
    pub fn record_leaf_pairs(&mut self, leaves_u: &[Vec<Vertex>], leaves_v: &[Vec<Vertex>]) {
        if leaves_u.is_empty() || leaves_v.is_empty() {
            return;
        }
        let id = self.pair_records.len();
        self.pair_records.push(LeafPairRecord {
            leaves_u: leaves_u.len(),
            leaves_v: leaves_v.len(),
        });
        self.pair_epochs.push(self.epoch);
        let index_side =
            |leaves: &[Vec<Vertex>], subsets: &mut FastMap<SetKey, RecordMask>,
             vertices: &mut FastMap<Vertex, RecordMask>| {
                for leaf in leaves {
                    let mut sorted = leaf.clone();
                    sorted.sort_unstable();
                    for &v in &sorted {
                        set_bit(vertices.entry(v).or_default(), id);
                    }
                    let k = sorted.len();
                    let mut buf = [0u32; MAX_SET_ARITY];
                    for mask in 1u32..(1 << k) {
                        let mut m = 0;
                        for (i, &v) in sorted.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                buf[m] = v;
                                m += 1;
                            }
                        }
                        set_bit(subsets.entry(pack_sorted(&buf[..m])).or_default(), id);
                    }
                }
            };
        index_side(leaves_u, &mut self.pair_u_subsets, &mut self.pair_vertices);
        index_side(leaves_v, &mut self.pair_v_subsets, &mut self.pair_vertices);
        self.blanket_upper += leaves_u.len() as u128
            * leaves_v.len() as u128
            * binomial(2 * (self.r as u64 - 1), self.r as u64);
    }
}
