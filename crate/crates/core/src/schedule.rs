//! Exchange schedules: representation, validity checking, schedulers and the
//! packet-level exchange simulator.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{Factorization, WordList};

/// Times assigned to each (word, position) occurrence. `None` is unassigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    times: Vec<Vec<Option<u32>>>,
}

impl Schedule {
    pub fn from_times(times: Vec<Vec<u32>>) -> Self {
        Schedule {
            times: times
                .into_iter()
                .map(|row| row.into_iter().map(Some).collect())
                .collect(),
        }
    }

    pub fn from_partial(times: Vec<Vec<Option<u32>>>) -> Self {
        Schedule { times }
    }

    /// Builds a schedule shaped like `wl` from wire entries.
    pub fn from_entries(wl: &WordList, entries: &[ScheduleEntry]) -> Result<Self> {
        let mut times: Vec<Vec<Option<u32>>> = wl.words().iter().map(|w| vec![None; w.len()]).collect();
        for e in entries {
            let slot = times
                .get_mut(e.word)
                .and_then(|row| row.get_mut(e.pos))
                .ok_or_else(|| {
                    Error::InvalidSchedule(format!("entry ({}, {}) is outside the word list", e.word, e.pos))
                })?;
            if slot.replace(e.time).is_some() {
                return Err(Error::InvalidSchedule(format!(
                    "entry ({}, {}) assigned twice",
                    e.word, e.pos
                )));
            }
        }
        Ok(Schedule { times })
    }

    pub fn time(&self, word: usize, pos: usize) -> Option<u32> {
        self.times.get(word)?.get(pos).copied().flatten()
    }

    pub fn word_times(&self, word: usize) -> &[Option<u32>] {
        &self.times[word]
    }

    pub fn set(&mut self, word: usize, pos: usize, time: u32) {
        self.times[word][pos] = Some(time);
    }

    /// Largest assigned time (0 when nothing is assigned).
    pub fn makespan(&self) -> u32 {
        self.times.iter().flatten().flatten().copied().max().unwrap_or(0)
    }

    /// Assigned entries sorted by (word, pos).
    pub fn entries(&self) -> Vec<ScheduleEntry> {
        self.times
            .iter()
            .enumerate()
            .flat_map(|(word, row)| {
                row.iter()
                    .enumerate()
                    .filter_map(move |(pos, t)| t.map(|time| ScheduleEntry { word, pos, time }))
            })
            .collect()
    }
}

/// One wire entry; `word` and `pos` are 0-based, `time` starts at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub word: usize,
    pub pos: usize,
    pub time: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    DuplicateFactorTime,
    NonIncreasingWord,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub makespan: u32,
    pub max_count: u64,
    /// Makespan equals the largest per-factor occurrence count.
    pub is_minimum: bool,
}

fn violation(kind: ViolationKind, detail: String) -> Violation {
    Violation { kind, detail }
}

/// Checks the three schedule rules: every occurrence timed (times ≥ 1),
/// times increasing along each word, and no factor used twice at one time.
pub fn verify_schedule(wl: &WordList, s: &Schedule) -> Result<ScheduleCheck, Violation> {
    if s.times.len() != wl.len() {
        return Err(violation(
            ViolationKind::Unassigned,
            format!("schedule covers {} words, list has {}", s.times.len(), wl.len()),
        ));
    }
    let mut used: HashMap<(usize, u32), (usize, usize)> = HashMap::new();
    for (wi, (word, row)) in wl.words().iter().zip(&s.times).enumerate() {
        if row.len() != word.len() {
            return Err(violation(
                ViolationKind::Unassigned,
                format!("word {wi} has {} letters but {} times", word.len(), row.len()),
            ));
        }
        let mut prev = 0u32;
        for (pos, (&letter, t)) in word.letters().iter().zip(row).enumerate() {
            let t = match t {
                Some(t) if *t >= 1 => *t,
                _ => {
                    return Err(violation(
                        ViolationKind::Unassigned,
                        format!("word {wi} position {pos} has no valid time"),
                    ))
                }
            };
            if t <= prev {
                return Err(violation(
                    ViolationKind::NonIncreasingWord,
                    format!("word {wi} position {pos}: time {t} after {prev}"),
                ));
            }
            prev = t;
            if let Some((w0, p0)) = used.insert((letter, t), (wi, pos)) {
                return Err(violation(
                    ViolationKind::DuplicateFactorTime,
                    format!(
                        "F{} at time {t} used by ({w0}, {p0}) and ({wi}, {pos})",
                        letter + 1
                    ),
                ));
            }
        }
    }
    let max_count = wl.factor_counts().into_iter().max().unwrap_or(0);
    let makespan = s.makespan();
    Ok(ScheduleCheck {
        makespan,
        max_count,
        is_minimum: u64::from(makespan) == max_count,
    })
}

/// Time-stepped list scheduling. At each step every factor fires for at most
/// one ready occurrence, chosen by the smallest `key(word, pos)`.
fn list_schedule<K: Ord>(wl: &WordList, key: impl Fn(usize, usize) -> K) -> Schedule {
    let words = wl.words();
    let mut times: Vec<Vec<Option<u32>>> = words.iter().map(|w| vec![None; w.len()]).collect();
    let mut next = vec![0usize; words.len()];
    let mut last = vec![0u32; words.len()];
    let mut active: Vec<usize> = (0..words.len()).filter(|&w| !words[w].is_empty()).collect();
    let mut t = 0u32;
    while !active.is_empty() {
        t += 1;
        let mut pick: Vec<Option<(K, usize)>> = (0..wl.d()).map(|_| None).collect();
        for &w in &active {
            if last[w] >= t {
                continue;
            }
            let pos = next[w];
            let f = words[w].letters()[pos];
            let k = key(w, pos);
            if pick[f].as_ref().is_none_or(|(best, _)| k < *best) {
                pick[f] = Some((k, w));
            }
        }
        for (_, w) in pick.into_iter().flatten() {
            times[w][next[w]] = Some(t);
            next[w] += 1;
            last[w] = t;
        }
        active.retain(|&w| next[w] < words[w].len());
    }
    Schedule { times }
}

/// List scheduling with longest-remaining-suffix priority, ties broken by
/// (word index, position).
pub fn greedy_schedule(wl: &WordList) -> Schedule {
    let words = wl.words();
    list_schedule(wl, |w, pos| (std::cmp::Reverse(words[w].len() - pos), w, pos))
}

/// List scheduling with word priorities drawn from a seeded shuffle.
pub fn greedy_schedule_shuffled(wl: &WordList, seed: u64) -> Schedule {
    let mut rank: Vec<usize> = (0..wl.len()).collect();
    rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    list_schedule(wl, |w, _| rank[w])
}

/// Target makespan for a word list with words of length at most two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diam2Target {
    pub max_count: u64,
    /// 1-based indices of maximal factors that are never a one-letter word
    /// and never occur in one of the two positions of two-letter words.
    pub exceptional_factors: Vec<usize>,
    pub target: u32,
}

pub fn diam2_target(wl: &WordList) -> Result<Diam2Target> {
    if let Some((i, w)) = wl.words().iter().enumerate().find(|(_, w)| w.len() > 2) {
        return Err(Error::WordsTooLong { word: i, len: w.len() });
    }
    let d = wl.d();
    let counts = wl.factor_counts();
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let mut single = vec![false; d];
    let mut first = vec![false; d];
    let mut second = vec![false; d];
    for w in wl.words() {
        match w.letters() {
            [a] => single[*a] = true,
            [a, b] => {
                first[*a] = true;
                second[*b] = true;
            }
            _ => {}
        }
    }
    let exceptional_factors: Vec<usize> = (0..d)
        .filter(|&f| counts[f] == max_count && max_count > 0)
        .filter(|&f| !single[f] && (!first[f] || !second[f]))
        .map(|f| f + 1)
        .collect();
    let bump = u64::from(!exceptional_factors.is_empty());
    Ok(Diam2Target {
        max_count,
        exceptional_factors,
        target: (max_count + bump) as u32,
    })
}

/// Default node budget for [`diam2_schedule`].
pub const DIAM2_NODE_BUDGET: u64 = 20_000_000;

pub fn diam2_schedule(wl: &WordList) -> Result<Schedule> {
    diam2_schedule_with_budget(wl, DIAM2_NODE_BUDGET)
}

/// Schedule of makespan [`diam2_target`] for a word list of words of length
/// at most two.
///
/// Two-letter words are placed by depth-first search in order of decreasing
/// factor usage. First letters take the earliest free slot of their factor
/// and second letters the latest, which settles most instances without
/// backtracking. One-letter words fill the remaining slots.
pub fn diam2_schedule_with_budget(wl: &WordList, budget: u64) -> Result<Schedule> {
    let target = diam2_target(wl)?;
    let horizon = target.target;
    let counts = wl.factor_counts();
    let d = wl.d();

    let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
    let mut singles: Vec<(usize, usize)> = Vec::new();
    let mut state = SlotState::new(d, horizon);
    for (w, word) in wl.words().iter().enumerate() {
        match word.letters() {
            [a] => {
                singles.push((w, *a));
                state.need_single[*a] += 1;
            }
            [a, b] => {
                jobs.push((w, *a, *b));
                state.need_first[*a] += 1;
                state.need_second[*b] += 1;
            }
            _ => {}
        }
    }
    for (f, count) in counts.iter().enumerate().take(d) {
        if !state.feasible(f) {
            return Err(Error::InternalInconsistency(format!(
                "F{} cannot fit its {} occurrences into {} slots",
                f + 1,
                count,
                horizon
            )));
        }
    }
    jobs.sort_by_key(|&(w, a, b)| {
        let hi = counts[a].max(counts[b]);
        (std::cmp::Reverse(hi), std::cmp::Reverse(counts[a] + counts[b]), w)
    });

    let mut placed = vec![(0u32, 0u32); jobs.len()];
    let mut nodes = 0u64;
    match place_jobs(&jobs, 0, &mut state, &mut placed, &mut nodes, budget) {
        Search::Found => {}
        Search::Exhausted => {
            return Err(Error::InternalInconsistency(format!(
                "no schedule of makespan {horizon} exists for this word list"
            )))
        }
        Search::OutOfBudget => {
            return Err(Error::SearchBudgetExceeded {
                budget,
                makespan: horizon,
            })
        }
    }

    let mut times: Vec<Vec<Option<u32>>> = wl.words().iter().map(|w| vec![None; w.len()]).collect();
    for (&(w, _, _), &(s, e)) in jobs.iter().zip(&placed) {
        times[w][0] = Some(s);
        times[w][1] = Some(e);
    }
    for (w, f) in singles {
        let slot = (1..=horizon)
            .find(|&t| !state.used(f, t))
            .ok_or_else(|| Error::InternalInconsistency(format!("no free slot left for F{}", f + 1)))?;
        state.take(f, slot);
        times[w][0] = Some(slot);
    }
    Ok(Schedule { times })
}

enum Search {
    Found,
    Exhausted,
    OutOfBudget,
}

struct SlotState {
    horizon: u32,
    used: Vec<Vec<bool>>,
    need_first: Vec<u32>,
    need_second: Vec<u32>,
    need_single: Vec<u32>,
}

impl SlotState {
    fn new(d: usize, horizon: u32) -> Self {
        SlotState {
            horizon,
            used: vec![vec![false; horizon as usize + 1]; d],
            need_first: vec![0; d],
            need_second: vec![0; d],
            need_single: vec![0; d],
        }
    }

    fn used(&self, f: usize, t: u32) -> bool {
        self.used[f][t as usize]
    }

    fn take(&mut self, f: usize, t: u32) {
        self.used[f][t as usize] = true;
    }

    fn release(&mut self, f: usize, t: u32) {
        self.used[f][t as usize] = false;
    }

    /// Counting bound: first letters need a free slot before the horizon,
    /// second letters a free slot after time 1.
    fn feasible(&self, f: usize) -> bool {
        let h = self.horizon;
        let free_early = (1..h).filter(|&t| !self.used(f, t)).count() as u32;
        let free_late = (2..=h).filter(|&t| !self.used(f, t)).count() as u32;
        let free = (1..=h).filter(|&t| !self.used(f, t)).count() as u32;
        self.need_first[f] <= free_early
            && self.need_second[f] <= free_late
            && self.need_first[f] + self.need_second[f] + self.need_single[f] <= free
    }
}

fn place_jobs(
    jobs: &[(usize, usize, usize)],
    idx: usize,
    state: &mut SlotState,
    placed: &mut [(u32, u32)],
    nodes: &mut u64,
    budget: u64,
) -> Search {
    if idx == jobs.len() {
        return Search::Found;
    }
    let (_, a, b) = jobs[idx];
    let h = state.horizon;
    state.need_first[a] -= 1;
    state.need_second[b] -= 1;
    let mut outcome = Search::Exhausted;
    'outer: for s in 1..h {
        if state.used(a, s) {
            continue;
        }
        for e in (s + 1..=h).rev() {
            if state.used(b, e) {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                outcome = Search::OutOfBudget;
                break 'outer;
            }
            state.take(a, s);
            state.take(b, e);
            if state.feasible(a) && state.feasible(b) {
                placed[idx] = (s, e);
                match place_jobs(jobs, idx + 1, state, placed, nodes, budget) {
                    Search::Found => return Search::Found,
                    Search::OutOfBudget => {
                        state.release(a, s);
                        state.release(b, e);
                        outcome = Search::OutOfBudget;
                        break 'outer;
                    }
                    Search::Exhausted => {}
                }
            }
            state.release(a, s);
            state.release(b, e);
        }
    }
    state.need_first[a] += 1;
    state.need_second[b] += 1;
    outcome
}

/// A packet is identified by its source and destination vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packet {
    pub source: usize,
    pub destination: usize,
}

/// Two packets on the same link at the same time. `factor` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub factor: usize,
    pub tail: usize,
    pub head: usize,
    pub time: u32,
    pub first: Packet,
    pub second: Packet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub vertices: usize,
    pub packets_delivered: u64,
    pub expected_packets: u64,
    /// Sources whose packets did not reach pairwise distinct destinations.
    pub duplicate_destination_sources: usize,
    pub conflict_count: u64,
    /// At most [`MAX_RECORDED_CONFLICTS`] conflicts are listed.
    pub conflicts: Vec<Conflict>,
    pub makespan_observed: u32,
    pub per_time_link_load: u32,
}

pub const MAX_RECORDED_CONFLICTS: usize = 1000;

impl ExchangeReport {
    pub fn conflict_free(&self) -> bool {
        self.conflict_count == 0
    }

    /// Conflict-free and every ordered pair of distinct vertices served once.
    pub fn complete(&self) -> bool {
        self.conflict_free()
            && self.duplicate_destination_sources == 0
            && self.packets_delivered == self.expected_packets
    }
}

/// Sends one packet from every vertex along every non-empty word, each hop at
/// its scheduled time, and records every link used twice at the same time.
///
/// A link is a (factor, tail) pair, which identifies a physical edge even in
/// a multigraph.
pub fn simulate_exchange(f: &Factorization, wl: &WordList, s: &Schedule) -> Result<ExchangeReport> {
    if wl.d() != f.d() || wl.len() != s.times.len() {
        return Err(Error::InvalidSchedule("inputs do not describe the same exchange".into()));
    }
    let n = f.n();
    for (w, (word, row)) in wl.words().iter().zip(&s.times).enumerate() {
        if row.len() != word.len() || row.iter().any(Option::is_none) {
            return Err(Error::InvalidSchedule(format!("word {w} is not fully scheduled")));
        }
    }
    let horizon = s.makespan() as usize;
    let d = f.d();
    let dense = d.saturating_mul(n).saturating_mul(horizon) <= 64_000_000;
    let mut occupancy_dense: Vec<u64> = if dense { vec![0; d * n * horizon] } else { Vec::new() };
    let mut occupancy_sparse: HashMap<(usize, usize, u32), u64> = HashMap::new();
    let mut load_dense: Vec<u32> = if dense { vec![0; d * n * horizon] } else { Vec::new() };
    let mut load_sparse: HashMap<(usize, usize, u32), u32> = HashMap::new();

    let encode = |p: Packet| (p.source as u64) * (n as u64) + p.destination as u64 + 1;
    let decode = |code: u64| Packet {
        source: ((code - 1) / n as u64) as usize,
        destination: ((code - 1) % n as u64) as usize,
    };

    let mut report = ExchangeReport {
        vertices: n,
        packets_delivered: 0,
        expected_packets: (n as u64) * (n as u64 - 1),
        duplicate_destination_sources: 0,
        conflict_count: 0,
        conflicts: Vec::new(),
        makespan_observed: 0,
        per_time_link_load: 0,
    };
    let mut reached = vec![usize::MAX; n];
    for source in 0..n {
        let mut duplicate = false;
        reached[source] = source;
        for (w, word) in wl.words().iter().enumerate().skip(1) {
            if word.is_empty() {
                duplicate = true;
                continue;
            }
            let destination = word.letters().iter().fold(source, |v, &l| f.step(l, v));
            if reached[destination] == source {
                duplicate = true;
            }
            reached[destination] = source;
            let packet = Packet { source, destination };
            let code = encode(packet);
            let mut cur = source;
            for (pos, &letter) in word.letters().iter().enumerate() {
                let time = s.times[w][pos].unwrap_or(0);
                let head = f.step(letter, cur);
                report.makespan_observed = report.makespan_observed.max(time);
                let (occupant, load) = if dense {
                    let slot = (letter * n + cur) * horizon + (time as usize - 1);
                    let occ = occupancy_dense[slot];
                    if occ == 0 {
                        occupancy_dense[slot] = code;
                    }
                    load_dense[slot] += 1;
                    (occ, load_dense[slot])
                } else {
                    let key = (letter, cur, time);
                    let occ = *occupancy_sparse.entry(key).or_insert(code);
                    let l = load_sparse.entry(key).or_insert(0);
                    *l += 1;
                    (if occ == code { 0 } else { occ }, *l)
                };
                report.per_time_link_load = report.per_time_link_load.max(load);
                if occupant != 0 {
                    report.conflict_count += 1;
                    if report.conflicts.len() < MAX_RECORDED_CONFLICTS {
                        report.conflicts.push(Conflict {
                            factor: letter + 1,
                            tail: cur,
                            head,
                            time,
                            first: decode(occupant),
                            second: packet,
                        });
                    }
                }
                cur = head;
            }
            report.packets_delivered += 1;
        }
        if duplicate {
            report.duplicate_destination_sources += 1;
        }
    }
    Ok(report)
}
