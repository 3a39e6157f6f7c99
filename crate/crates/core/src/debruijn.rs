//! De Bruijn (Rauzy) graphs built from consecutive factor sets, their
//! right-special vertices, reflection symmetry and palindrome counts.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::coding::Coding;
use crate::complexity::{alpha_size, ell, ind, min_level};
use crate::error::{Error, Result};
use crate::language::{language, LanguageSet};
use crate::words::Subshift;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// The length-`L+1` factor the edge stands for.
    pub word: Vec<u8>,
}

/// Distinguished words of the governing block `p(k)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Landmarks {
    pub k: usize,
    pub u1: Vec<u8>,
    pub v1: Vec<u8>,
    pub u2: Option<Vec<u8>>,
    pub v2: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnGraph {
    pub len: usize,
    pub vertices: LanguageSet,
    pub edges: Vec<Edge>,
    pub landmarks: Option<Landmarks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RightSpecial {
    pub vertex: usize,
    pub out_degree: usize,
}

impl DeBruijnGraph {
    /// Graph on `vertices` whose edges are the given length-`len+1` words.
    /// Edge words whose prefix or suffix is not a vertex are rejected.
    pub fn from_words(len: usize, vertices: LanguageSet, edge_words: &LanguageSet) -> Result<Self> {
        if vertices.length != len || edge_words.length != len + 1 {
            return Err(Error::InvalidArgument("word lengths do not match L".into()));
        }
        let edges = edge_words
            .iter()
            .map(|w| {
                let from = vertices
                    .index_of(&w[..len])
                    .ok_or(Error::WordNotInLanguage)?;
                let to = vertices.index_of(&w[1..]).ok_or(Error::WordNotInLanguage)?;
                Ok(Edge {
                    from,
                    to,
                    word: w.to_vec(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DeBruijnGraph {
            len,
            vertices,
            edges,
            landmarks: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for e in &self.edges {
            deg[e.from] += 1;
        }
        deg
    }

    fn adjacency(&self, reverse: bool) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            if reverse {
                adj[e.to].push(e.from);
            } else {
                adj[e.from].push(e.to);
            }
        }
        adj
    }

    /// Vertices with at least two outgoing edges.
    pub fn right_special_report(&self) -> Vec<RightSpecial> {
        self.out_degrees()
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d >= 2)
            .map(|(vertex, out_degree)| RightSpecial { vertex, out_degree })
            .collect()
    }

    /// `sum (out_degree - 1)` over right-special vertices.
    pub fn branching_excess(&self) -> usize {
        self.right_special_report()
            .iter()
            .map(|r| r.out_degree - 1)
            .sum()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let reaches_all = |adj: Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            let mut count = 1;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
            count == n
        };
        reaches_all(self.adjacency(false)) && reaches_all(self.adjacency(true))
    }

    /// Index of `reverse(v)` for each vertex, if the vertex set is closed
    /// under reversal.
    pub fn reflection_map(&self) -> Option<Vec<usize>> {
        self.vertices
            .iter()
            .map(|w| {
                let rev: Vec<u8> = w.iter().rev().copied().collect();
                self.vertices.index_of(&rev)
            })
            .collect()
    }

    /// True iff reversal maps vertices onto vertices and `(u, v)` is an
    /// edge exactly when `(rev v, rev u)` is.
    pub fn reflection_check(&self) -> bool {
        let Some(map) = self.reflection_map() else {
            return false;
        };
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.from, e.to)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut mirrored: Vec<(usize, usize)> =
            pairs.iter().map(|&(u, v)| (map[v], map[u])).collect();
        mirrored.sort_unstable();
        pairs == mirrored
    }

    /// Vertices fixed by reversal.
    pub fn palindromic_vertices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, w)| w.iter().eq(w.iter().rev()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Shortest directed distance between two vertices.
    pub fn distance(&self, from: usize, to: usize) -> Option<usize> {
        let adj = self.adjacency(false);
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return Some(dist[v]);
            }
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Graphviz rendering. Right-special vertices are doubled and filled;
    /// each vertex shares a rank with its reversal.
    pub fn to_dot(&self, sub: &Subshift) -> String {
        let special: Vec<bool> = self.out_degrees().into_iter().map(|d| d >= 2).collect();
        let mut out = String::new();
        let _ = writeln!(out, "digraph G{} {{", self.len);
        let _ = writeln!(out, "  rankdir=TB;");
        let _ = writeln!(out, "  node [shape=ellipse];");
        for (i, w) in self.vertices.iter().enumerate() {
            let style = if special[i] {
                ", peripheries=2, style=filled, fillcolor=lightgray"
            } else {
                ""
            };
            let _ = writeln!(out, "  v{i} [label=\"{}\"{style}];", escape(&sub.render(w)));
        }
        if let Some(map) = self.reflection_map() {
            for (i, &j) in map.iter().enumerate() {
                if i < j {
                    let _ = writeln!(out, "  {{ rank=same; v{i}; v{j}; }}");
                }
            }
        }
        for e in &self.edges {
            let label = sub.render(&e.word[self.len..]);
            let _ = writeln!(
                out,
                "  v{} -> v{} [label=\"{}\"];",
                e.from,
                e.to,
                escape(&label)
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, sub: &Subshift) -> serde_json::Value {
        let render = |w: &[u8]| sub.render(w);
        let degrees = self.out_degrees();
        serde_json::json!({
            "L": self.len,
            "vertices": self.vertices.iter().map(render).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "from": render(self.vertices.words[e.from].as_slice()),
                "to": render(self.vertices.words[e.to].as_slice()),
                "word": render(&e.word),
                "label": render(&e.word[self.len..]),
            })).collect::<Vec<_>>(),
            "right_special": self.right_special_report().iter().map(|r| serde_json::json!({
                "vertex": render(self.vertices.words[r.vertex].as_slice()),
                "out_degree": degrees[r.vertex],
            })).collect::<Vec<_>>(),
            "landmarks": self.landmarks.as_ref().map(|m| serde_json::json!({
                "k": m.k,
                "u1": render(&m.u1),
                "v1": render(&m.v1),
                "u2": m.u2.as_deref().map(render),
                "v2": m.v2.as_deref().map(render),
            })),
            "strongly_connected": self.is_strongly_connected(),
            "reflection_symmetric": self.reflection_check(),
            "palindromes": self.palindromic_vertices().into_iter()
                .map(|i| render(self.vertices.words[i].as_slice())).collect::<Vec<_>>(),
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// `L`-th de Bruijn graph with its landmark words.
pub fn build_graph(sub: &Subshift, len: usize) -> Result<DeBruijnGraph> {
    let vertices = language(sub, len)?;
    let edge_words = language(sub, len + 1)?;
    let mut graph = DeBruijnGraph::from_words(len, vertices, &edge_words)?;
    if len >= 1 {
        graph.landmarks = Some(landmarks(sub, len)?);
    }
    Ok(graph)
}

/// The level `k` with `|p(k-1)| + 1 <= L <= |p(k)|` (`k = 0` for `L <= |p(0)|`).
pub fn graph_level(c: &Coding, len: usize) -> Result<usize> {
    min_level(c, &BigInt::from(len + 1))
}

fn small(v: BigInt) -> Result<usize> {
    v.to_usize()
        .ok_or_else(|| Error::Overflow(format!("length {v}")))
}

/// `u1, v1` (prefix and suffix of `p(k)`) and, when present, `u2, v2`
/// (prefix and suffix of `p(k-1) a_{k-1} p(k-1)`).
pub fn landmarks(sub: &Subshift, len: usize) -> Result<Landmarks> {
    let c = sub.coding();
    let k = graph_level(c, len)?;
    let block = sub.block(k)?;
    let u1 = block[..len].to_vec();
    let v1 = block[block.len() - len..].to_vec();
    let (mut u2, mut v2) = (None, None);
    if k >= 1 && has_second_branch(c, k, len)? {
        let inner = sub.block(k - 1)?;
        let mut w = inner.to_vec();
        w.push(c.letter(k - 1)?.0);
        w.extend_from_slice(&inner);
        u2 = Some(w[..len].to_vec());
        v2 = Some(w[w.len() - len..].to_vec());
    }
    Ok(Landmarks { k, u1, v1, u2, v2 })
}

/// `a_{k-1} in A_k` and `L <= 2|p(k-1)| - |p(k-2)|`.
fn has_second_branch(c: &Coding, k: usize, len: usize) -> Result<bool> {
    let ki = k as i64;
    let bound = BigInt::from(2) * ell(c, ki - 1)? - ell(c, ki - 2)?;
    Ok(!ind(c, k, k - 1)?.is_zero() && BigInt::from(len) <= bound)
}

/// Result of comparing a graph with the structural description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LandmarkCheck {
    pub v1_out_degree: usize,
    pub v1_expected: usize,
    pub v2_out_degree: Option<usize>,
    pub v2_expected: Option<usize>,
    /// All other vertices have a single successor.
    pub others_unbranched: bool,
    /// Distance from `u1` to `v1` equals `|p(k)| - L`; advisory only.
    pub arc_u1_v1: bool,
}

impl LandmarkCheck {
    /// The hard part of the check; arc lengths are reported but not required.
    pub fn passes(&self) -> bool {
        self.v1_out_degree == self.v1_expected
            && self.v2_out_degree == self.v2_expected
            && self.others_unbranched
    }
}

pub fn check_landmarks(sub: &Subshift, graph: &DeBruijnGraph) -> Result<LandmarkCheck> {
    let c = sub.coding();
    let m = graph
        .landmarks
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("graph has no landmarks".into()))?;
    let len = graph.len;
    let ki = m.k as i64;
    let (lk, lk1) = (small(ell(c, ki)?)?, small(ell(c, ki - 1)?)?);
    let v1_expected = if len + lk1 < lk {
        alpha_size(c, m.k)?
    } else {
        alpha_size(c, m.k + 1)?
    };
    let v1_expected = small(v1_expected)?;
    let degrees = graph.out_degrees();
    let idx = |w: &[u8]| graph.vertices.index_of(w).ok_or(Error::WordNotInLanguage);
    let v1 = idx(&m.v1)?;
    let v2 = match &m.v2 {
        Some(w) if *w != m.v1 => Some(idx(w)?),
        _ => None,
    };
    let others_unbranched = degrees
        .iter()
        .enumerate()
        .all(|(i, &d)| i == v1 || Some(i) == v2 || d == 1);
    let arc = graph.distance(idx(&m.u1)?, v1) == Some(lk - len);
    Ok(LandmarkCheck {
        v1_out_degree: degrees[v1],
        v1_expected,
        v2_out_degree: v2.map(|i| degrees[i]),
        v2_expected: v2.map(|_| 2),
        others_unbranched,
        arc_u1_v1: arc,
    })
}

/// Closed form for the number of palindromic factors of length `L >= 1`.
pub fn palindrome_formula(c: &Coding, len: &BigUint) -> Result<BigUint> {
    let l = BigInt::from(len.clone());
    if l.is_zero() {
        return Err(Error::InvalidArgument(
            "palindrome count needs L >= 1".into(),
        ));
    }
    let two = BigInt::from(2);
    let parity = |v: &BigInt| -> BigInt { ((v % &two) + &two) % &two };
    let l0 = ell(c, 0)?;
    let value = if l <= l0 {
        (alpha_size(c, 0)? - 1) * parity(&l) + 1
    } else {
        palindrome_level_formula(c, &l)?
    };
    value
        .to_biguint()
        .ok_or_else(|| Error::InvalidArgument(format!("negative palindrome count {value}")))
}

fn palindrome_level_formula(c: &Coding, l: &BigInt) -> Result<BigInt> {
    let two = BigInt::from(2);
    let parity = |v: &BigInt| -> BigInt { ((v % &two) + &two) % &two };
    let k = min_level(c, &(l + 1))?;
    let ki = k as i64;
    let (lk, lk1, lk2) = (ell(c, ki)?, ell(c, ki - 1)?, ell(c, ki - 2)?);
    let r = l % (&lk1 + 1);
    let rt = l % (&lk2 + 1);
    let mut value = (alpha_size(c, k)? - 1) * parity(l) + parity(&(&lk1 + 1 - &r));
    let middle = if *l < &lk - &lk1 {
        BigInt::from(1)
    } else {
        ind(c, k + 1, k)?
    };
    value += parity(&r) * middle;
    if !ind(c, k, k - 1)?.is_zero() && *l <= &two * &lk1 - &lk2 {
        value += parity(&rt) + parity(&(&lk2 + 1 - &rt)) - parity(l);
    }
    Ok(value)
}

pub fn palindromes(c: &Coding, len: u64) -> Result<BigUint> {
    palindrome_formula(c, &BigUint::from(len))
}

/// Number of palindromes in `language(L)`.
pub fn palindrome_oracle(sub: &Subshift, len: usize) -> Result<usize> {
    Ok(language(sub, len)?
        .iter()
        .filter(|w| w.iter().eq(w.iter().rev()))
        .count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PalindromeRecord {
    #[serde(rename = "L")]
    pub len: u64,
    pub formula: String,
    pub oracle: Option<usize>,
}

/// Formula (and optionally oracle) palindrome counts for `1 <= L <= max_len`.
pub fn palindrome_profile(
    sub: &Subshift,
    max_len: u64,
    with_oracle: bool,
) -> Result<Vec<PalindromeRecord>> {
    use rayon::prelude::*;
    (1..=max_len)
        .into_par_iter()
        .map(|len| {
            let oracle = if with_oracle {
                let l = len
                    .to_usize()
                    .ok_or_else(|| Error::Overflow(format!("length {len}")))?;
                Some(palindrome_oracle(sub, l)?)
            } else {
                None
            };
            Ok(PalindromeRecord {
                len,
                formula: palindromes(sub.coding(), len)?.to_string(),
                oracle,
            })
        })
        .collect()
}
