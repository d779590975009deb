//! Branching tiling puzzles: rows are indexed by binary words, and a rule
//! yields one tile for each child.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tiling::{random_output, random_tile_names};
use super::{check_tiles, invalid, sha256_hex, tile_index, ModelError, Tile};

/// A binary word; every entry is 0 or 1.
pub type Word = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingPuzzle {
    pub tiles: Vec<String>,
    pub e: Tile,
    pub ok: Tile,
    table: Vec<[Tile; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    k: String,
    l: String,
    m: String,
    n: String,
    out: [String; 2],
}

#[derive(Serialize, Deserialize)]
struct BranchingJson {
    tiles: Vec<String>,
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "OK")]
    ok: String,
    #[serde(default)]
    rules: Vec<RuleJson>,
    #[serde(rename = "default-out", default, skip_serializing_if = "Option::is_none")]
    default_out: Option<[String; 2]>,
}

fn quad(i: usize, t: usize) -> [Tile; 4] {
    [i / (t * t * t), i / (t * t) % t, i / t % t, i % t]
}

impl BranchingPuzzle {
    pub fn new(tiles: Vec<String>, e: Tile, ok: Tile, rule: impl Fn([Tile; 4]) -> [Tile; 2]) -> Result<BranchingPuzzle, ModelError> {
        check_tiles(&tiles)?;
        let t = tiles.len();
        if e >= t || ok >= t {
            return invalid("E or OK is not a tile");
        }
        if e == ok {
            return invalid("E and OK must differ");
        }
        let mut table = Vec::with_capacity(t.pow(4));
        for i in 0..t.pow(4) {
            let out = rule(quad(i, t));
            if out.iter().any(|&o| o >= t) {
                return invalid(format!("rule output {out:?} is not a pair of tiles"));
            }
            table.push(out);
        }
        Ok(BranchingPuzzle { tiles, e, ok, table })
    }

    pub fn rule(&self, k: Tile, l: Tile, m: Tile, n: Tile) -> [Tile; 2] {
        let t = self.tiles.len();
        self.table[((k * t + l) * t + m) * t + n]
    }

    /// Every `(K, L, M, N)` with its output pair.
    pub fn rules(&self) -> impl Iterator<Item = ([Tile; 4], [Tile; 2])> + '_ {
        let t = self.tiles.len();
        self.table.iter().enumerate().map(move |(i, &o)| (quad(i, t), o))
    }

    pub fn from_json(text: &str) -> Result<BranchingPuzzle, ModelError> {
        let j: BranchingJson = serde_json::from_str(text)?;
        let idx = |x: &String| tile_index(&j.tiles, x);
        let e = idx(&j.e)?;
        let ok = idx(&j.ok)?;
        let t = j.tiles.len();
        let default = match &j.default_out {
            Some([a, b]) => Some([idx(a)?, idx(b)?]),
            None => None,
        };
        let mut table: Vec<Option<[Tile; 2]>> = vec![default; t.pow(4)];
        for r in &j.rules {
            let (k, l, m, n) = (idx(&r.k)?, idx(&r.l)?, idx(&r.m)?, idx(&r.n)?);
            table[((k * t + l) * t + m) * t + n] = Some([idx(&r.out[0])?, idx(&r.out[1])?]);
        }
        if table.iter().any(Option::is_none) {
            return invalid("rule table is not total and there is no default-out");
        }
        BranchingPuzzle::new(j.tiles.clone(), e, ok, |[k, l, m, n]| table[((k * t + l) * t + m) * t + n].unwrap())
    }

    pub fn to_json(&self) -> String {
        let t = self.tiles.len();
        let mut freq: HashMap<[Tile; 2], usize> = HashMap::new();
        for &o in &self.table {
            *freq.entry(o).or_default() += 1;
        }
        let default = *freq.iter().max_by_key(|(o, c)| (**c, std::cmp::Reverse(**o))).unwrap().0;
        let name = |x: usize| self.tiles[x].clone();
        let rules = self
            .table
            .iter()
            .enumerate()
            .filter(|(_, &o)| o != default)
            .map(|(i, &o)| {
                let [k, l, m, n] = quad(i, t);
                RuleJson { k: name(k), l: name(l), m: name(m), n: name(n), out: o.map(name) }
            })
            .collect();
        let j = BranchingJson { tiles: self.tiles.clone(), e: name(self.e), ok: name(self.ok), rules, default_out: Some(default.map(name)) };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// Same tile naming and output distribution as the deterministic
    /// generator, drawn independently for both children.
    pub fn random<R: Rng>(rng: &mut R, ntiles: usize, ok_weight: f64) -> BranchingPuzzle {
        let tiles = random_tile_names(ntiles.max(2));
        let t = tiles.len();
        let table: Vec<[Tile; 2]> = (0..t.pow(4)).map(|_| [random_output(rng, t, ok_weight), random_output(rng, t, ok_weight)]).collect();
        BranchingPuzzle::new(tiles, 0, 1, |[k, l, m, n]| table[((k * t + l) * t + m) * t + n]).unwrap()
    }
}

/// Memoized tiling function on `(column, word)`.
#[derive(Clone, Debug)]
pub struct BranchingTiler<'a> {
    g: &'a BranchingPuzzle,
    memo: HashMap<(usize, Word), Tile>,
}

impl<'a> BranchingTiler<'a> {
    pub fn new(g: &'a BranchingPuzzle) -> BranchingTiler<'a> {
        BranchingTiler { g, memo: HashMap::new() }
    }

    pub fn tile(&mut self, m: usize, w: &[u8]) -> Tile {
        if m == 0 || w.is_empty() {
            return self.g.e;
        }
        if let Some(&t) = self.memo.get(&(m, w.to_vec())) {
            return t;
        }
        let (v, i) = (&w[..w.len() - 1], w[w.len() - 1] as usize);
        let k = self.tile(m - 1, w);
        let l = self.tile(m - 1, v);
        let mm = self.tile(m, v);
        let n = self.tile(m + 1, v);
        let t = self.g.rule(k, l, mm, n)[i];
        self.memo.insert((m, w.to_vec()), t);
        t
    }
}

pub fn btile_at(g: &BranchingPuzzle, m: usize, w: &[u8]) -> Tile {
    BranchingTiler::new(g).tile(m, w)
}

/// Parses a word such as `"0110"`.
pub fn parse_word(s: &str) -> Option<Word> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

/// Whether every extension `w` of `v` with `|w| = s` has a prefix `w'` and a
/// column `m <= s` with an `OK` tile at `(m, w')`. Expects `|v| <= s`.
pub fn s_solvable(g: &BranchingPuzzle, s: usize, v: &[u8]) -> bool {
    debug_assert!(v.len() <= s);
    let mut t = BranchingTiler::new(g);
    let hit = (0..=v.len().min(s)).any(|j| (0..=s).any(|m| t.tile(m, &v[..j]) == g.ok));
    if hit {
        return true;
    }
    let mut w = v.to_vec();
    below(&mut t, s, &mut w)
}

// Prefixes of `w` are known to hold no OK tile within the column bound.
fn below(t: &mut BranchingTiler<'_>, s: usize, w: &mut Word) -> bool {
    if w.len() >= s {
        return false;
    }
    for b in 0..2 {
        w.push(b);
        let ok = (1..=s).any(|m| t.tile(m, w) == t.g.ok) || below(t, s, w);
        w.pop();
        if !ok {
            return false;
        }
    }
    true
}
