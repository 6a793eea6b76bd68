//! Fan growth, bridging and the per-pair connection loop.

use super::danger::{compute_danger_sets, compute_temp_danger, DangerRegistry, TempDanger};
use super::fan::{Fan, LeafRef};
use super::{
    ConnectError, ConnectMode, ConnectionRequest, ConnectionResult, ConnectorConfig, PhaseStats,
};
use crate::exposure::{ExposureConfig, ExposureLedger};
use crate::oracle::verify_tight_path_in;
use crate::set::{pack_sorted_with, FastMap, FastSet, SetKey, Vertex, MAX_SET_ARITY};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Seeded equipartition of X into 4r parts with sizes differing by at most
/// one; parts are internally ascending.
pub fn partition_x(x: &[Vertex], r: usize, seed: u64) -> Result<Vec<Vec<Vertex>>, ConnectError> {
    let parts_total = 4 * r;
    let mut pool: Vec<Vertex> = x.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() < parts_total {
        return Err(ConnectError::XTooSmall {
            got: pool.len(),
            need: parts_total,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let base = pool.len() / parts_total;
    let extra = pool.len() % parts_total;
    let mut parts = Vec::with_capacity(parts_total);
    let mut at = 0;
    for i in 0..parts_total {
        let len = base + usize::from(i < extra);
        let mut part = pool[at..at + len].to_vec();
        part.sort_unstable();
        parts.push(part);
        at += len;
    }
    Ok(parts)
}

/// Bad vertices for the end tuple `a`: candidates c from `pool` failing
/// condition (i) ({a,c} already exposed), (ii) (suffix set dangerous or
/// temporarily dangerous) or (iii) (used-multiset cap exceeded).
#[allow(clippy::too_many_arguments)]
pub fn bad_vertices(
    ledger: &ExposureLedger,
    cfg: &ConnectorConfig,
    danger: &DangerRegistry,
    temp: Option<&mut TempDanger>,
    used_multi: &FastMap<SetKey, u32>,
    a: &[Vertex],
    pool: &[Vertex],
) -> Vec<Vertex> {
    let mut temp = temp;
    pool.iter()
        .copied()
        .filter(|&c| {
            candidate_is_bad(
                ledger,
                cfg,
                danger,
                temp.as_deref_mut(),
                used_multi,
                a,
                c,
            )
        })
        .collect()
}

fn candidate_is_bad(
    ledger: &ExposureLedger,
    cfg: &ConnectorConfig,
    danger: &DangerRegistry,
    mut temp: Option<&mut TempDanger>,
    used_multi: &FastMap<SetKey, u32>,
    a: &[Vertex],
    c: Vertex,
) -> bool {
    let r = cfg.r;
    // (i) the extension window is already exposed
    let mut window = [0u32; MAX_SET_ARITY];
    window[..r - 1].copy_from_slice(a);
    window[r - 1] = c;
    if ledger.is_exposed(&window[..r]) {
        return true;
    }
    // (ii) + (iii) on {a_{j-1}, c} for j in [r-1]
    let mut suffix_sorted: Vec<Vertex> = Vec::with_capacity(r - 1);
    for j in 1..r {
        suffix_sorted.clear();
        suffix_sorted.extend_from_slice(&a[a.len() - (j - 1)..]);
        suffix_sorted.sort_unstable();
        let key = pack_sorted_with(&suffix_sorted, c);
        if danger.contains(j, key) {
            return true;
        }
        if let Some(t) = temp.as_deref_mut() {
            let hit = if j == r - 1 {
                t.top_dangerous(ledger, a, c)
            } else {
                t.lower_contains(j, key)
            };
            if hit {
                return true;
            }
        }
        let mult = used_multi.get(&key).copied().unwrap_or(0);
        if mult as f64 > cfg.mult_cap(j) {
            return true;
        }
    }
    false
}

struct PhaseCtx<'a> {
    cfg: &'a ConnectorConfig,
    exposure: &'a ExposureConfig,
    round: usize,
    phase: usize,
    used: &'a FastSet<Vertex>,
    danger: &'a DangerRegistry,
    used_multi: &'a mut FastMap<SetKey, u32>,
    temp: Option<&'a mut TempDanger>,
}

/// Grows one fan. `parts` rotate cyclically per level. With
/// `exact_levels = Some(s)` the fan runs exactly s full levels (pruning
/// dead paths, capping width); otherwise it stops as soon as the width
/// target is reached, checked after each processed path.
fn grow_fan(
    ledger: &mut ExposureLedger,
    ctx: &mut PhaseCtx,
    root: Vec<Vertex>,
    parts: &[Vec<Vertex>],
    exact_levels: Option<usize>,
) -> Result<Fan, ConnectError> {
    let cfg = ctx.cfg;
    let r = cfg.r;
    let mut fan = Fan::new(root);
    if parts.is_empty() {
        return Ok(fan); // degenerate working set: root-only fan
    }
    let width_cap = (2.0 * cfg.width_target).ceil().max(2.0) as usize;
    let mut level = 0usize;
    loop {
        if let Some(s) = exact_levels {
            if level == s {
                return Ok(fan);
            }
        } else if fan.width() as f64 >= cfg.width_target {
            return Ok(fan);
        }
        if level >= cfg.level_budget {
            return Err(ConnectError::LevelBudgetExceeded {
                phase: ctx.phase,
                budget: cfg.level_budget,
            });
        }
        let part = &parts[level % parts.len()];
        let queue: Vec<LeafRef> = fan.leaves.clone();
        let mut new_leaves: Vec<LeafRef> = Vec::new();
        for (qi, &leaf) in queue.iter().enumerate() {
            let a = fan.end_tuple(leaf, r);
            let path_verts = fan.path_of(leaf);
            // C' = Y_t minus path vertices, used vertices and bad vertices
            let mut candidates: Vec<Vertex> = Vec::new();
            for &c in part {
                if ctx.used.contains(&c) || path_verts.contains(&c) {
                    continue;
                }
                if candidate_is_bad(
                    ledger,
                    cfg,
                    ctx.danger,
                    ctx.temp.as_deref_mut(),
                    ctx.used_multi,
                    &a,
                    c,
                ) {
                    continue;
                }
                candidates.push(c);
            }
            let mut appeared = ledger.expose_at(ctx.exposure, ctx.round, &a, &candidates)?;
            match cfg.mode {
                ConnectMode::Strict => {
                    let got = appeared.len();
                    if (got as f64) < cfg.c_min || (got as f64) > cfg.c_max {
                        return Err(ConnectError::WidthWindowFailure {
                            phase: ctx.phase,
                            got,
                            lo: cfg.c_min,
                            hi: cfg.c_max,
                            level,
                        });
                    }
                }
                ConnectMode::Practical => {
                    let cap = cfg.c_max.floor().max(1.0) as usize;
                    if appeared.len() > cap && cfg.truncate_overflow {
                        appeared.truncate(cap);
                    }
                    // an unextendable path is pruned rather than fatal
                }
            }
            for &c in &appeared {
                let child = fan.extend(leaf, c);
                new_leaves.push(child);
                // used-set bookkeeping: {c} and every {a_j, c}, j in [r-2]
                *ctx.used_multi
                    .entry(pack_sorted_with(&[], c))
                    .or_insert(0) += 1;
                let mut suf: Vec<Vertex> = Vec::with_capacity(r - 2);
                for j in 1..=r - 2 {
                    suf.clear();
                    suf.extend_from_slice(&a[a.len() - j..]);
                    suf.sort_unstable();
                    *ctx.used_multi
                        .entry(pack_sorted_with(&suf, c))
                        .or_insert(0) += 1;
                }
            }
            if exact_levels.is_none() {
                let width_now = new_leaves.len() + (queue.len() - qi - 1);
                if width_now as f64 >= cfg.width_target {
                    let mut leaves = new_leaves;
                    leaves.extend_from_slice(&queue[qi + 1..]);
                    fan.leaves = leaves;
                    return Ok(fan);
                }
            }
        }
        if exact_levels.is_some() && new_leaves.len() > width_cap {
            new_leaves.truncate(width_cap);
        }
        if new_leaves.is_empty() {
            return Err(ConnectError::WidthWindowFailure {
                phase: ctx.phase,
                got: 0,
                lo: cfg.c_min,
                hi: cfg.c_max,
                level,
            });
        }
        fan.leaves = new_leaves;
        level += 1;
    }
}

struct BridgeOutcome {
    path: Vec<Vertex>,
    pairs: usize,
    unblocked: usize,
    windows_exposed: usize,
}

/// Exposes the unblocked length-2(r-1) bridges between the leaf sets and
/// assembles the connection through the first pair that appears.
fn connect_pair(
    ledger: &mut ExposureLedger,
    ctx: &mut PhaseCtx,
    fan_u: &Fan,
    fan_v: &Fan,
) -> Result<BridgeOutcome, ConnectError> {
    let cfg = ctx.cfg;
    let r = cfg.r;
    let leaves_u = fan_u.leaf_tuples(r);
    let leaves_v = fan_v.leaf_tuples(r);
    let pairs_total = leaves_u.len() * leaves_v.len();
    let mut unblocked = 0usize;
    let mut windows_exposed = 0usize;
    let mut chosen: Option<(LeafRef, LeafRef)> = None;

    let bridge_windows = |x: &[Vertex], vtilde: &[Vertex]| -> Vec<Vec<Vertex>> {
        let concat: Vec<Vertex> = x.iter().chain(vtilde.iter()).copied().collect();
        concat.windows(r).map(|w| w.to_vec()).collect()
    };

    if cfg.early_exit_bridge {
        // batch-local outcomes so shared windows stay usable
        let mut batch: FastMap<SetKey, bool> = FastMap::default();
        'scan: for (xt, xref) in &leaves_u {
            for (wt, wref) in &leaves_v {
                if xt.iter().any(|v| wt.contains(v)) {
                    continue;
                }
                let vtilde: Vec<Vertex> = wt.iter().rev().copied().collect();
                let windows = bridge_windows(xt, &vtilde);
                let mut all_appeared = true;
                let mut fresh: Vec<(SetKey, Vec<Vertex>)> = Vec::new();
                for w in &windows {
                    let key = crate::set::pack_set(w);
                    if let Some(&ap) = batch.get(&key) {
                        all_appeared &= ap;
                    } else if ledger.is_exposed(w) {
                        all_appeared = false; // blocked by pre-batch exposure
                    } else {
                        fresh.push((key, w.clone()));
                    }
                }
                if !all_appeared {
                    continue;
                }
                unblocked += 1;
                for (key, w) in fresh {
                    let ap = ledger.expose(ctx.exposure, ctx.round, &w)?;
                    windows_exposed += 1;
                    batch.insert(key, ap);
                    all_appeared &= ap;
                }
                if all_appeared {
                    chosen = Some((*xref, *wref));
                    break 'scan;
                }
            }
        }
    } else {
        // expose all unblocked bridges first, then pick the first appearing
        let mut candidates: Vec<(LeafRef, LeafRef, Vec<SetKey>)> = Vec::new();
        let mut fresh_order: Vec<Vec<Vertex>> = Vec::new();
        let mut seen: FastSet<SetKey> = FastSet::default();
        for (xt, xref) in &leaves_u {
            for (wt, wref) in &leaves_v {
                if xt.iter().any(|v| wt.contains(v)) {
                    continue;
                }
                let vtilde: Vec<Vertex> = wt.iter().rev().copied().collect();
                let windows = bridge_windows(xt, &vtilde);
                if windows.iter().any(|w| ledger.is_exposed(w)) {
                    continue; // blocked
                }
                unblocked += 1;
                let mut keys = Vec::with_capacity(windows.len());
                for w in windows {
                    let key = crate::set::pack_set(&w);
                    if seen.insert(key) {
                        fresh_order.push(w);
                    }
                    keys.push(key);
                }
                candidates.push((*xref, *wref, keys));
            }
        }
        for w in &fresh_order {
            ledger.expose(ctx.exposure, ctx.round, w)?;
            windows_exposed += 1;
        }
        for (xref, wref, keys) in &candidates {
            if keys.iter().all(|&k| ledger.appeared_key(k)) {
                chosen = Some((*xref, *wref));
                break;
            }
        }
    }

    let Some((xref, wref)) = chosen else {
        return Err(ConnectError::BridgeFailure {
            phase: ctx.phase,
            pairs: pairs_total,
            unblocked,
        });
    };
    let mut path = fan_u.path_of(xref);
    let mut back = fan_v.path_of(wref);
    back.reverse();
    path.extend(back);
    Ok(BridgeOutcome {
        path,
        pairs: pairs_total,
        unblocked,
        windows_exposed,
    })
}

fn validate_request(
    cfg: &ConnectorConfig,
    request: &ConnectionRequest,
) -> Result<(), ConnectError> {
    let r = cfg.r;
    let k = request.pairs.len();
    if k == 0 {
        return Ok(());
    }
    if k > cfg.max_pairs() {
        return Err(ConnectError::TooManyPairs {
            k,
            max: cfg.max_pairs(),
        });
    }
    let mut seen: FastSet<Vertex> = FastSet::default();
    for (u, v) in &request.pairs {
        for t in [u, v] {
            if t.len() != r - 1 {
                return Err(ConnectError::BadRequest(format!(
                    "tuple {:?} has arity {}, expected {}",
                    t,
                    t.len(),
                    r - 1
                )));
            }
            for &x in t {
                if x as usize >= cfg.n {
                    return Err(ConnectError::BadRequest(format!("vertex {x} out of range")));
                }
                if !seen.insert(x) {
                    return Err(ConnectError::BadRequest(format!(
                        "request tuples are not pairwise disjoint at vertex {x}"
                    )));
                }
            }
        }
    }
    if let Some(targets) = &request.target_lengths {
        if targets.len() != k {
            return Err(ConnectError::BadRequest(
                "target_lengths must match pair count".into(),
            ));
        }
    }
    Ok(())
}

/// Connects every requested pair by a tight path with interior inside
/// `request.x`, spending only round-`round` coins. Paths are produced in
/// request order; vertices of earlier paths are off-limits to later ones.
pub fn connect_all(
    cfg: &ConnectorConfig,
    exposure: &ExposureConfig,
    ledger: &mut ExposureLedger,
    round: usize,
    request: &ConnectionRequest,
    seed: u64,
) -> Result<ConnectionResult, ConnectError> {
    validate_request(cfg, request)?;
    let r = cfg.r;
    let mut x_sorted: Vec<Vertex> = request.x.clone();
    x_sorted.sort_unstable();
    x_sorted.dedup();
    let x_set: FastSet<Vertex> = x_sorted.iter().copied().collect();

    if cfg.mode == ConnectMode::Strict && (x_sorted.len() as f64) < cfg.delta * cfg.n as f64 {
        return Err(ConnectError::XTooSmall {
            got: x_sorted.len(),
            need: (cfg.delta * cfg.n as f64).ceil() as usize,
        });
    }
    let degenerate = x_sorted.len() < cfg.min_x;
    if degenerate && cfg.mode == ConnectMode::Strict {
        return Err(ConnectError::XTooSmall {
            got: x_sorted.len(),
            need: cfg.min_x,
        });
    }
    let (parts_y, parts_yp): (Vec<Vec<Vertex>>, Vec<Vec<Vertex>>) = if degenerate {
        (Vec::new(), Vec::new())
    } else {
        let parts = partition_x(&x_sorted, r, seed)?;
        let (a, b) = parts.split_at(2 * r);
        (a.to_vec(), b.to_vec())
    };
    let y_prime_pool: Vec<Vertex> = {
        let mut p: Vec<Vertex> = parts_yp.iter().flatten().copied().collect();
        p.sort_unstable();
        p
    };

    let mut used: FastSet<Vertex> = FastSet::default();
    for (u, v) in &request.pairs {
        used.extend(u.iter().copied());
        used.extend(v.iter().copied());
    }

    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    let mut stats: Vec<PhaseStats> = Vec::new();
    for (phase, (u_tuple, v_tuple)) in request.pairs.iter().enumerate() {
        ledger.snapshot_phase();
        let danger = compute_danger_sets(ledger, &x_sorted, cfg.xi, cfg.n);
        let mut used_multi: FastMap<SetKey, u32> = FastMap::default();

        let (levels_u, levels_v) = match &request.target_lengths {
            None => (None, None),
            Some(targets) => {
                let t = targets[phase];
                if t < 2 * (r - 1) {
                    return Err(ConnectError::LengthUnattainable {
                        phase,
                        target: t,
                        reason: format!("below minimum 2(r-1) = {}", 2 * (r - 1)),
                    });
                }
                let interior = t - 2 * (r - 1);
                (Some(interior / 2), Some(interior - interior / 2))
            }
        };

        let fan_u = {
            let mut ctx = PhaseCtx {
                cfg,
                exposure,
                round,
                phase,
                used: &used,
                danger: &danger,
                used_multi: &mut used_multi,
                temp: None,
            };
            grow_fan(ledger, &mut ctx, u_tuple.clone(), &parts_y, levels_u)?
        };
        let leaves_u_sets: Vec<Vec<Vertex>> = fan_u
            .leaf_tuples(r)
            .into_iter()
            .map(|(t, _)| t)
            .collect();

        let mut temp = match cfg.mode {
            ConnectMode::Strict => TempDanger::exhaustive(compute_temp_danger(
                ledger,
                &leaves_u_sets,
                cfg.xi_prime,
                cfg.n,
                &y_prime_pool,
            )),
            ConnectMode::Practical => {
                TempDanger::lazy(ledger, &leaves_u_sets, cfg.xi_prime, &y_prime_pool)
            }
        };

        let root_v: Vec<Vertex> = v_tuple.iter().rev().copied().collect();
        let fan_v = {
            let mut ctx = PhaseCtx {
                cfg,
                exposure,
                round,
                phase,
                used: &used,
                danger: &danger,
                used_multi: &mut used_multi,
                temp: Some(&mut temp),
            };
            grow_fan(ledger, &mut ctx, root_v, &parts_yp, levels_v)?
        };

        let outcome = {
            let mut ctx = PhaseCtx {
                cfg,
                exposure,
                round,
                phase,
                used: &used,
                danger: &danger,
                used_multi: &mut used_multi,
                temp: None,
            };
            connect_pair(ledger, &mut ctx, &fan_u, &fan_v)?
        };
        let path = outcome.path;

        // contract checks: endpoints, interior containment, tightness under
        // appeared edges, disjointness from earlier paths
        if path[..r - 1] != u_tuple[..] || path[path.len() - (r - 1)..] != v_tuple[..] {
            return Err(ConnectError::Internal(format!(
                "phase {phase}: endpoint tuples do not match request"
            )));
        }
        if let Some(t) = request.target_lengths.as_ref().map(|ts| ts[phase]) {
            if path.len() != t {
                return Err(ConnectError::LengthUnattainable {
                    phase,
                    target: t,
                    reason: format!("assembled path has {} vertices", path.len()),
                });
            }
        }
        for &v in &path[r - 1..path.len() - (r - 1)] {
            if !x_set.contains(&v) {
                return Err(ConnectError::Internal(format!(
                    "phase {phase}: interior vertex {v} outside X"
                )));
            }
        }
        for &v in &path {
            let endpoint = u_tuple.contains(&v) || v_tuple.contains(&v);
            if !endpoint && used.contains(&v) {
                return Err(ConnectError::Internal(format!(
                    "phase {phase}: vertex {v} reused across paths"
                )));
            }
        }
        let verdict = verify_tight_path_in(&|k| ledger.appeared_key(k), r, &path);
        if !verdict.accepted {
            return Err(ConnectError::Internal(format!(
                "phase {phase}: assembled path not tight under appeared edges: {}",
                verdict.first_violation.unwrap_or_default()
            )));
        }

        used.extend(path.iter().copied());
        let leaves_v_sets: Vec<Vec<Vertex>> = fan_v
            .leaf_tuples(r)
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        ledger.record_leaf_pairs(&leaves_u_sets, &leaves_v_sets);

        // bookkeeping bound e(H_{i+1}) <= 2^{2r+1} (i+1) n^{r-1-eps/2}
        let bound = (2.0f64).powi(2 * r as i32 + 1)
            * (phase as f64 + 2.0)
            * (cfg.n as f64).powf(r as f64 - 1.0 - cfg.eps / 2.0);
        let ledger_bound_ok = (ledger.edge_count_upper() as f64) <= bound;

        stats.push(PhaseStats {
            fan_u_width: fan_u.width(),
            fan_u_levels: fan_u.levels(),
            fan_v_width: fan_v.width(),
            fan_v_levels: fan_v.levels(),
            bridge_pairs: outcome.pairs,
            bridge_unblocked: outcome.unblocked,
            bridge_windows_exposed: outcome.windows_exposed,
            path_len: path.len(),
            ledger_bound_ok,
        });
        paths.push(path);
    }
    Ok(ConnectionResult { paths, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exposure::{ExposureConfig, ExposureLedger};

    fn practical(n: usize) -> ConnectorConfig {
        ConnectorConfig::practical(n, 3, 0.5, 0.5)
    }

    #[test]
    fn partition_sizes_and_determinism() {
        let x: Vec<Vertex> = (0..49).collect();
        let parts = partition_x(&x, 3, 7).unwrap();
        assert_eq!(parts.len(), 12);
        let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 49);
        assert_eq!(*sizes.iter().max().unwrap(), 5);
        assert_eq!(*sizes.iter().min().unwrap(), 4);
        // exact multiples give equal parts
        let x2: Vec<Vertex> = (0..48).collect();
        let parts2 = partition_x(&x2, 3, 7).unwrap();
        assert!(parts2.iter().all(|p| p.len() == 4));
        // determinism
        assert_eq!(partition_x(&x, 3, 7).unwrap(), parts);
        assert_ne!(partition_x(&x, 3, 8).unwrap(), parts);
        // too small
        assert!(matches!(
            partition_x(&x[..11], 3, 7),
            Err(ConnectError::XTooSmall { .. })
        ));
    }

    #[test]
    fn bad_vertices_conditions() {
        let cfg = practical(100);
        let exposure = ExposureConfig::lazy(100, 3, 1, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, 1);
        ledger.snapshot_phase();
        let danger = DangerRegistry::empty(3);
        let mut used_multi: FastMap<SetKey, u32> = FastMap::default();
        let pool: Vec<Vertex> = (10..20).collect();

        // fresh phase: nothing bad
        let bad = bad_vertices(&ledger, &cfg, &danger, None, &used_multi, &[0, 1], &pool);
        assert!(bad.is_empty());

        // condition (i): exposed window
        ledger.expose(&exposure, 1, &[0, 1, 12]).unwrap();
        let bad = bad_vertices(&ledger, &cfg, &danger, None, &used_multi, &[0, 1], &pool);
        assert_eq!(bad, vec![12]);

        // condition (iii): pair-level sets are single-use in practical mode
        *used_multi
            .entry(pack_sorted_with(&[1], 15))
            .or_insert(0) += 1;
        let bad = bad_vertices(&ledger, &cfg, &danger, None, &used_multi, &[0, 1], &pool);
        assert_eq!(bad, vec![12, 15]);
    }

    #[test]
    fn connect_all_k0_is_noop() {
        let cfg = practical(100);
        let exposure = ExposureConfig::lazy(100, 3, 1, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, 1);
        let req = ConnectionRequest {
            pairs: vec![],
            x: (10..60).collect(),
            target_lengths: None,
        };
        let res = connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5).unwrap();
        assert!(res.paths.is_empty());
        assert_eq!(ledger.exposed_count(), 0);
    }

    #[test]
    fn connect_single_pair_probability_one() {
        let n = 120;
        let cfg = practical(n);
        let exposure = ExposureConfig::lazy(n, 3, 1, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, u32::MAX);
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![2, 3])],
            x: (10..110).collect(),
            target_lengths: None,
        };
        let res = connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5).unwrap();
        assert_eq!(res.paths.len(), 1);
        let p = &res.paths[0];
        assert_eq!(&p[..2], &[0, 1]);
        assert_eq!(&p[p.len() - 2..], &[2, 3]);
        for &v in &p[2..p.len() - 2] {
            assert!((10..110).contains(&v));
        }
        assert_eq!(ledger.already_exposed_attempts(), 0);
    }

    #[test]
    fn two_pairs_yield_disjoint_paths() {
        let n = 200;
        let cfg = practical(n);
        let exposure = ExposureConfig::lazy(n, 3, 9, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, u32::MAX);
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![2, 3]), (vec![4, 5], vec![6, 7])],
            x: (20..180).collect(),
            target_lengths: None,
        };
        let res = connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5).unwrap();
        assert_eq!(res.paths.len(), 2);
        let mut seen: FastSet<Vertex> = FastSet::default();
        for p in &res.paths {
            for &v in p {
                assert!(seen.insert(v), "vertex {v} reused");
            }
        }
    }

    #[test]
    fn overlapping_tuples_rejected() {
        let cfg = practical(100);
        let exposure = ExposureConfig::lazy(100, 3, 1, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, 1);
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![1, 2])],
            x: (10..60).collect(),
            target_lengths: None,
        };
        assert!(matches!(
            connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5),
            Err(ConnectError::BadRequest(_))
        ));
    }

    #[test]
    fn probability_zero_round_fails_at_fan() {
        let cfg = practical(100);
        let exposure = ExposureConfig::lazy(100, 3, 1, &[0.0]);
        let mut ledger = ExposureLedger::new(3, 1, 1);
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![2, 3])],
            x: (10..90).collect(),
            target_lengths: None,
        };
        let err = connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5).unwrap_err();
        assert!(matches!(err, ConnectError::WidthWindowFailure { .. }));
        assert_eq!(err.phase(), Some(0));
    }

    #[test]
    fn degenerate_x_uses_direct_bridge() {
        // |X| below 4r: fans stay at the roots; at p = 1 the single bridge
        // (u, reversed v) appears
        let cfg = practical(50);
        let exposure = ExposureConfig::lazy(50, 3, 1, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, 1);
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![2, 3])],
            x: vec![10, 11, 12],
            target_lengths: None,
        };
        let res = connect_all(&cfg, &exposure, &mut ledger, 1, &req, 5).unwrap();
        // path = u followed by the bridge back into v's order
        assert_eq!(res.paths[0], vec![0, 1, 2, 3]);
        assert_eq!(res.stats[0].fan_u_levels, 0);
    }

    #[test]
    fn exact_length_paths() {
        let n = 200;
        let cfg = practical(n);
        let exposure = ExposureConfig::lazy(n, 3, 3, &[1.0]);
        let mut ledger = ExposureLedger::new(3, 1, u32::MAX);
        for target in [4usize, 5, 6, 9] {
            let req = ConnectionRequest {
                pairs: vec![(vec![0, 1], vec![2, 3])],
                x: (20..180).collect(),
                target_lengths: Some(vec![target]),
            };
            let mut fresh = ExposureLedger::new(3, 1, u32::MAX);
            let res = connect_all(&cfg, &exposure, &mut fresh, 1, &req, 5).unwrap();
            assert_eq!(res.paths[0].len(), target, "target {target}");
            let _ = &mut ledger;
        }
        // below the bridge floor
        let req = ConnectionRequest {
            pairs: vec![(vec![0, 1], vec![2, 3])],
            x: (20..180).collect(),
            target_lengths: Some(vec![3]),
        };
        let mut fresh = ExposureLedger::new(3, 1, u32::MAX);
        assert!(matches!(
            connect_all(&cfg, &exposure, &mut fresh, 1, &req, 5),
            Err(ConnectError::LengthUnattainable { .. })
        ));
    }
}
