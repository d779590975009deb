//! Turing machines compiled to puzzles, and the machine simulators.
//!
//! Row `n` of the compiled tiling holds the tape after `n - 1` steps, cell
//! `m` in column `m`. The left border acts as an end marker: a left move on
//! cell 1 leaves the head in place. A head in the halting state turns into
//! `OK` on the next row and `OK` then persists.

use proptest::prelude::*;

use mints::models::{BranchingPuzzle, Tile, TilingPuzzle};

pub const E: Tile = 0;
pub const OK: Tile = 1;

/// Target state, written symbol, and whether the head moves right.
pub type Action = (usize, u8, bool);

/// States `0..states` run, state `states` halts; the start state is 0.
#[derive(Clone, Debug)]
pub struct Tm {
    pub states: usize,
    pub delta: Vec<[Action; 2]>,
}

impl Tm {
    pub fn halt(&self) -> usize {
        self.states
    }
}

pub fn tm(states: usize, halt_weight: u32) -> impl Strategy<Value = Tm> {
    let target = prop_oneof![halt_weight => Just(states), 10 => 0..states];
    let action = (target, 0u8..2, any::<bool>());
    prop::collection::vec([action.clone(), action], states).prop_map(move |delta| Tm { states, delta })
}

fn sym(s: u8) -> Tile {
    2 + s as Tile
}

fn head(q: usize, s: u8) -> Tile {
    4 + 2 * q + s as Tile
}

fn tile_count(states: usize) -> usize {
    4 + 2 * (states + 1)
}

fn names(states: usize) -> Vec<String> {
    let mut v: Vec<String> = ["E", "OK", "0", "1"].iter().map(|s| s.to_string()).collect();
    for q in 0..=states {
        for s in 0..2 {
            v.push(format!("q{q}s{s}"));
        }
    }
    v
}

/// The symbol under a tile, and the head state if there is one.
fn decode(t: Tile) -> (u8, Option<usize>) {
    match t {
        2 | 3 => ((t - 2) as u8, None),
        _ if t >= 4 => (((t - 4) % 2) as u8, Some((t - 4) / 2)),
        _ => (0, None),
    }
}

/// New tile for the middle cell of `(l, mid, r)` under `tm`.
fn update(tm: &Tm, k: Tile, l: Tile, mid: Tile, r: Tile) -> Tile {
    if mid == E {
        // First row: the head starts on cell 1.
        return if k == E { head(0, 0) } else { sym(0) };
    }
    if mid == OK {
        return OK;
    }
    let (s, q) = decode(mid);
    if let Some(q) = q {
        if q == tm.halt() {
            return OK;
        }
        let (q2, w, right) = tm.delta[q][s as usize];
        return if !right && l == E { head(q2, w) } else { sym(w) };
    }
    if let (_, Some(q)) = decode(l) {
        if q != tm.halt() {
            let (q2, _, right) = tm.delta[q][decode(l).0 as usize];
            if right {
                return head(q2, s);
            }
        }
    }
    if let (_, Some(q)) = decode(r) {
        if q != tm.halt() {
            let (q2, _, right) = tm.delta[q][decode(r).0 as usize];
            if !right {
                return head(q2, s);
            }
        }
    }
    sym(s)
}

pub fn compile_tiling(tm: &Tm) -> TilingPuzzle {
    TilingPuzzle::new(names(tm.states), E, OK, |[k, l, m, n]| update(tm, k, l, m, n)).unwrap()
}

/// Two machines over the same states; branch `i` steps with `tms[i]`.
pub fn compile_branching(tms: &[Tm; 2]) -> BranchingPuzzle {
    assert_eq!(tms[0].states, tms[1].states);
    let ntiles = tile_count(tms[0].states);
    assert_eq!(names(tms[0].states).len(), ntiles);
    BranchingPuzzle::new(names(tms[0].states), E, OK, |[k, l, m, n]| [update(&tms[0], k, l, m, n), update(&tms[1], k, l, m, n)]).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub tape: Vec<u8>,
    pub pos: usize,
    pub state: usize,
    /// Set once a step is taken from a halting state.
    pub done: bool,
}

impl Config {
    pub fn initial() -> Config {
        Config { tape: vec![0], pos: 0, state: 0, done: false }
    }

    pub fn step(&mut self, tm: &Tm) {
        if self.state == tm.halt() {
            self.done = true;
            return;
        }
        let (q, w, right) = tm.delta[self.state][self.tape[self.pos] as usize];
        self.tape[self.pos] = w;
        self.state = q;
        if right {
            self.pos += 1;
            if self.pos == self.tape.len() {
                self.tape.push(0);
            }
        } else {
            self.pos = self.pos.saturating_sub(1);
        }
    }

    /// The expected tile in column `m >= 1`.
    pub fn tile(&self, m: usize) -> Tile {
        let s = self.tape.get(m - 1).copied().unwrap_or(0);
        if m - 1 != self.pos {
            sym(s)
        } else if self.done {
            OK
        } else {
            head(self.state, s)
        }
    }
}

/// Step at which the machine first sits in the halting state, if within
/// `limit` steps.
pub fn halting_step(tm: &Tm, limit: usize) -> Option<(usize, usize)> {
    let mut c = Config::initial();
    for t in 0..=limit {
        if c.state == tm.halt() {
            return Some((t, c.pos));
        }
        c.step(tm);
    }
    None
}
