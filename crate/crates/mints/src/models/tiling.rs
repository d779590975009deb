//! Deterministic tiling puzzles over the quarter plane.
//!
//! Column `m`, row `n`. Row 0 and column 0 hold `E`; an interior tile is
//! `R(K, L, M, N)` of its left neighbour `K`, and the three tiles below it
//! starting one column to the left:
//!
//! ```text
//!   K  T
//!   L  M  N
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_tiles, invalid, sha256_hex, tile_index, ModelError, Tile};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingPuzzle {
    pub tiles: Vec<String>,
    pub e: Tile,
    pub ok: Tile,
    /// Dense rule table indexed by `((k * t + l) * t + m) * t + n`.
    table: Vec<Tile>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    k: String,
    l: String,
    m: String,
    n: String,
    out: String,
}

#[derive(Serialize, Deserialize)]
struct TilingJson {
    tiles: Vec<String>,
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "OK")]
    ok: String,
    #[serde(default)]
    rules: Vec<RuleJson>,
    #[serde(rename = "default-out", default, skip_serializing_if = "Option::is_none")]
    default_out: Option<String>,
}

impl TilingPuzzle {
    pub fn new(tiles: Vec<String>, e: Tile, ok: Tile, rule: impl Fn([Tile; 4]) -> Tile) -> Result<TilingPuzzle, ModelError> {
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
            let q = [i / (t * t * t), i / (t * t) % t, i / t % t, i % t];
            let out = rule(q);
            if out >= t {
                return invalid(format!("rule output {out} is not a tile"));
            }
            table.push(out);
        }
        Ok(TilingPuzzle { tiles, e, ok, table })
    }

    pub fn rule(&self, k: Tile, l: Tile, m: Tile, n: Tile) -> Tile {
        let t = self.tiles.len();
        self.table[((k * t + l) * t + m) * t + n]
    }

    pub fn from_json(text: &str) -> Result<TilingPuzzle, ModelError> {
        let j: TilingJson = serde_json::from_str(text)?;
        let e = tile_index(&j.tiles, &j.e)?;
        let ok = tile_index(&j.tiles, &j.ok)?;
        let t = j.tiles.len();
        let default = j.default_out.as_deref().map(|d| tile_index(&j.tiles, d)).transpose()?;
        let mut table: Vec<Option<Tile>> = vec![default; t.pow(4)];
        for r in &j.rules {
            let idx = |x: &String| tile_index(&j.tiles, x);
            let (k, l, m, n) = (idx(&r.k)?, idx(&r.l)?, idx(&r.m)?, idx(&r.n)?);
            table[((k * t + l) * t + m) * t + n] = Some(tile_index(&j.tiles, &r.out)?);
        }
        if table.iter().any(Option::is_none) {
            return invalid("rule table is not total and there is no default-out");
        }
        TilingPuzzle::new(j.tiles, e, ok, |[k, l, m, n]| table[((k * t + l) * t + m) * t + n].unwrap())
    }

    /// Sparse form: the most frequent output becomes `default-out`.
    pub fn to_json(&self) -> String {
        let t = self.tiles.len();
        let mut freq = vec![0usize; t];
        for &o in &self.table {
            freq[o] += 1;
        }
        let default = (0..t).max_by_key(|&i| (freq[i], std::cmp::Reverse(i))).unwrap();
        let rules = self
            .table
            .iter()
            .enumerate()
            .filter(|(_, &o)| o != default)
            .map(|(i, &o)| {
                let name = |x: usize| self.tiles[x].clone();
                RuleJson { k: name(i / (t * t * t)), l: name(i / (t * t) % t), m: name(i / t % t), n: name(i % t), out: name(o) }
            })
            .collect();
        let j = TilingJson {
            tiles: self.tiles.clone(),
            e: self.tiles[self.e].clone(),
            ok: self.tiles[self.ok].clone(),
            rules,
            default_out: Some(self.tiles[default].clone()),
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// Tiles `E`, `OK`, then `a`, `b`, ...; each rule output is `OK` with
    /// probability `ok_weight`, otherwise uniform over the other tiles.
    pub fn random<R: Rng>(rng: &mut R, ntiles: usize, ok_weight: f64) -> TilingPuzzle {
        let tiles = random_tile_names(ntiles.max(2));
        let t = tiles.len();
        let table: Vec<Tile> = (0..t.pow(4)).map(|_| random_output(rng, t, ok_weight)).collect();
        TilingPuzzle::new(tiles, 0, 1, |[k, l, m, n]| table[((k * t + l) * t + m) * t + n]).unwrap()
    }

    /// The tiles that can occur anywhere in the tiling: the closure of
    /// `{E}` under `R`, plus the seed tiles.
    pub fn reachable_tiles(&self, seed: &[Tile]) -> Vec<bool> {
        let t = self.tiles.len();
        let mut reach = vec![false; t];
        reach[self.e] = true;
        for &s in seed {
            reach[s] = true;
        }
        loop {
            let mut changed = false;
            for (i, &o) in self.table.iter().enumerate() {
                let q = [i / (t * t * t), i / (t * t) % t, i / t % t, i % t];
                if !reach[o] && q.iter().all(|&x| reach[x]) {
                    reach[o] = true;
                    changed = true;
                }
            }
            if !changed {
                return reach;
            }
        }
    }
}

pub(crate) fn random_tile_names(n: usize) -> Vec<String> {
    let mut tiles = vec!["E".to_string(), "OK".to_string()];
    tiles.extend((0..n.saturating_sub(2)).map(|i| ((b'a' + i as u8) as char).to_string()));
    tiles
}

pub(crate) fn random_output<R: Rng>(rng: &mut R, t: usize, ok_weight: f64) -> Tile {
    if rng.gen_bool(ok_weight.clamp(0.0, 1.0)) {
        1
    } else {
        let x = rng.gen_range(0..t - 1);
        if x >= 1 {
            x + 1
        } else {
            x
        }
    }
}

/// Lazily computed tiling, optionally with row 0 seeded by an input word
/// (`T(i, 0) = input[i-1]` for `1 <= i <= |input|`).
#[derive(Clone, Debug)]
pub struct TilingGrid<'a> {
    g: &'a TilingPuzzle,
    seed: Vec<Tile>,
    rows: Vec<Vec<Tile>>,
}

impl<'a> TilingGrid<'a> {
    pub fn new(g: &'a TilingPuzzle) -> TilingGrid<'a> {
        TilingGrid { g, seed: Vec::new(), rows: Vec::new() }
    }

    pub fn seeded(g: &'a TilingPuzzle, input: &[Tile]) -> TilingGrid<'a> {
        TilingGrid { g, seed: input.to_vec(), rows: Vec::new() }
    }

    pub fn get(&mut self, m: usize, n: usize) -> Tile {
        // Row r below n is needed up to column m + (n - r).
        while self.rows.len() <= n {
            self.rows.push(Vec::new());
        }
        for r in 0..=n {
            let want = m + (n - r) + 1;
            let have = self.rows[r].len();
            for c in have..want {
                let tile = if r == 0 {
                    if c >= 1 && c <= self.seed.len() {
                        self.seed[c - 1]
                    } else {
                        self.g.e
                    }
                } else if c == 0 {
                    self.g.e
                } else {
                    let below = &self.rows[r - 1];
                    self.g.rule(self.rows[r][c - 1], below[c - 1], below[c], below[c + 1])
                };
                self.rows[r].push(tile);
            }
        }
        self.rows[n][m]
    }
}

pub fn tile_at(g: &TilingPuzzle, m: usize, n: usize) -> Tile {
    TilingGrid::new(g).get(m, n)
}

/// `(m, n) ≼ (k, l)`, i.e. `L(m, n) ⊆ L(k, l)`.
pub fn location_le(a: (usize, usize), b: (usize, usize)) -> bool {
    a.1 <= b.1 && a.0 + a.1 <= b.0 + b.1
}

/// `|L(m, n)|` where `L(m, n) = {(k, l) | l <= n, k <= m + n - l}`.
pub fn location_count(m: usize, n: usize) -> usize {
    (0..=n).map(|l| m + n - l + 1).sum()
}

/// First `OK` location with both coordinates within `bound`, scanning in
/// the order `(m + n, n)`, which extends `≼`.
pub fn solvable_within(g: &TilingPuzzle, bound: usize) -> Option<(usize, usize)> {
    let mut grid = TilingGrid::new(g);
    for d in 0..=2 * bound {
        for n in d.saturating_sub(bound)..=d.min(bound) {
            let m = d - n;
            if grid.get(m, n) == g.ok {
                return Some((m, n));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn border_and_constant_rule() {
        let g = TilingPuzzle::new(names(&["E", "OK", "T"]), 0, 1, |_| 2).unwrap();
        assert_eq!(tile_at(&g, 0, 7), 0);
        assert_eq!(tile_at(&g, 4, 0), 0);
        assert_eq!(tile_at(&g, 1, 1), 2);
        assert_eq!(solvable_within(&g, 5), None);
        let g = TilingPuzzle::new(names(&["E", "OK"]), 0, 1, |_| 1).unwrap();
        assert_eq!(solvable_within(&g, 3), Some((1, 1)));
    }

    #[test]
    fn neighbourhood_convention() {
        // T(m+1, n+1) is OK exactly when the tile right of M below is OK.
        let g = TilingPuzzle::new(names(&["E", "OK", "X"]), 0, 1, |[k, l, _, n]| if n == 1 || (k == 0 && l == 0) { 2 } else { 0 }).unwrap();
        let mut grid = TilingGrid::new(&g);
        assert_eq!(grid.get(1, 1), 2);
        assert_eq!(grid.get(2, 1), 0);
        let seeded = TilingPuzzle::new(names(&["E", "OK", "X"]), 0, 1, |[_, _, _, n]| n).unwrap();
        let mut grid = TilingGrid::seeded(&seeded, &[2, 1]);
        assert_eq!(grid.get(1, 1), 1);
        assert_eq!(grid.get(2, 1), 0);
        assert_eq!(grid.get(0, 1), 0);
    }

    #[test]
    fn location_order() {
        assert!(location_le((0, 0), (3, 2)));
        assert!(location_le((1, 1), (2, 1)));
        assert!(location_le((2, 0), (1, 1)));
        assert!(!location_le((0, 2), (3, 1)));
        assert_eq!(location_count(1, 1), 5);
        assert_eq!(location_count(0, 0), 1);
    }

    #[test]
    fn json_roundtrip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = TilingPuzzle::random(&mut rng, 3, 0.2);
        let back = TilingPuzzle::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        let text = r#"{"tiles":["E","OK"],"E":"E","OK":"OK","rules":[{"k":"E","l":"E","m":"E","n":"E","out":"OK"}]}"#;
        assert!(matches!(TilingPuzzle::from_json(text), Err(ModelError::Invalid(_))));
    }
}
