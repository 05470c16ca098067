//! UPGMA agglomerative clustering over a distance matrix, with Newick
//! serialization and a small Newick reader.
//!
//! Linkage is the canonical size-weighted average; merge height is half the
//! cluster distance, so the result is ultrametric. Ties in the minimum
//! pairwise distance break toward the lexicographically smallest pair of
//! cluster leaf labels, which makes tree output deterministic.

use std::collections::BTreeSet;

use crate::metric::DistanceMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Leaf label; internal nodes have none.
    pub label: Option<String>,
    /// Ultrametric height above the leaves.
    pub height: f64,
    pub children: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl PhyloTree {
    pub fn leaf_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_leaves(self.root, &mut out);
        out
    }

    fn collect_leaves(&self, idx: usize, out: &mut Vec<String>) {
        match self.nodes[idx].children {
            Some((a, b)) => {
                self.collect_leaves(a, out);
                self.collect_leaves(b, out);
            }
            None => out.push(self.nodes[idx].label.clone().unwrap_or_default()),
        }
    }

    fn leaf_set(&self, idx: usize) -> BTreeSet<String> {
        let mut out = Vec::new();
        self.collect_leaves(idx, &mut out);
        out.into_iter().collect()
    }

    /// True when some subtree's leaf set equals `labels` exactly.
    pub fn has_clade(&self, labels: &[&str]) -> bool {
        let want: BTreeSet<String> = labels.iter().map(|s| s.to_string()).collect();
        (0..self.nodes.len()).any(|i| self.leaf_set(i) == want)
    }

    /// Root-to-leaf path lengths, one per leaf (for ultrametricity checks).
    pub fn root_to_leaf_lengths(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.walk_depth(self.root, 0.0, &mut out);
        out
    }

    fn walk_depth(&self, idx: usize, acc: f64, out: &mut Vec<f64>) {
        match self.nodes[idx].children {
            Some((a, b)) => {
                for c in [a, b] {
                    let bl = self.nodes[idx].height - self.nodes[c].height;
                    self.walk_depth(c, acc + bl, out);
                }
            }
            None => out.push(acc),
        }
    }

    /// Smallest leaf label under a node; used for deterministic ordering.
    fn min_leaf(&self, idx: usize) -> String {
        self.leaf_set(idx).into_iter().next().unwrap_or_default()
    }
}

pub fn upgma(matrix: &DistanceMatrix) -> Result<PhyloTree> {
    matrix.validate()?;
    let n = matrix.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "UPGMA needs at least 2 taxa".into(),
        ));
    }
    let mut nodes: Vec<Node> = matrix
        .labels
        .iter()
        .map(|l| Node {
            label: Some(l.clone()),
            height: 0.0,
            children: None,
        })
        .collect();

    struct Cluster {
        node: usize,
        size: usize,
        min_label: String,
    }
    let mut clusters: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            node: i,
            size: 1,
            min_label: matrix.labels[i].clone(),
        })
        .collect();
    // dist[i][j] over active clusters, kept square for simplicity (n is small)
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| matrix.get(i, j)).collect())
        .collect();

    while clusters.len() > 1 {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let d = dist[i][j];
                        let bd = dist[bi][bj];
                        if d < bd {
                            true
                        } else if d > bd {
                            false
                        } else {
                            pair_key(&clusters[i].min_label, &clusters[j].min_label)
                                < pair_key(&clusters[bi].min_label, &clusters[bj].min_label)
                        }
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.unwrap();
        let d = dist[i][j];
        let merged = Node {
            label: None,
            height: d / 2.0,
            children: Some((clusters[i].node, clusters[j].node)),
        };
        let merged_idx = nodes.len();
        nodes.push(merged);
        let (si, sj) = (clusters[i].size as f64, clusters[j].size as f64);
        // size-weighted average distance to every other cluster
        let updated: Vec<f64> = (0..clusters.len())
            .map(|k| (si * dist[i][k] + sj * dist[j][k]) / (si + sj))
            .collect();
        let new_cluster = Cluster {
            node: merged_idx,
            size: clusters[i].size + clusters[j].size,
            min_label: std::cmp::min(clusters[i].min_label.clone(), clusters[j].min_label.clone()),
        };
        // remove j first (j > i), then i; then append the merged cluster
        let keep: Vec<usize> = (0..clusters.len()).filter(|&k| k != i && k != j).collect();
        let mut new_dist: Vec<Vec<f64>> = keep
            .iter()
            .map(|&a| keep.iter().map(|&b| dist[a][b]).collect())
            .collect();
        for (row, &a) in new_dist.iter_mut().zip(&keep) {
            row.push(updated[a]);
        }
        let mut last: Vec<f64> = keep.iter().map(|&a| updated[a]).collect();
        last.push(0.0);
        new_dist.push(last);
        dist = new_dist;
        let mut new_clusters: Vec<Cluster> = Vec::with_capacity(keep.len() + 1);
        for &a in &keep {
            let c = &clusters[a];
            new_clusters.push(Cluster {
                node: c.node,
                size: c.size,
                min_label: c.min_label.clone(),
            });
        }
        new_clusters.push(new_cluster);
        clusters = new_clusters;
    }
    Ok(PhyloTree {
        root: clusters[0].node,
        nodes,
    })
}

fn pair_key<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Newick with branch lengths, children ordered by smallest leaf label.
pub fn to_newick(tree: &PhyloTree, decimals: usize) -> String {
    let mut out = String::new();
    write_node(tree, tree.root, None, decimals, &mut out);
    out.push(';');
    out
}

fn write_node(
    tree: &PhyloTree,
    idx: usize,
    parent_height: Option<f64>,
    decimals: usize,
    out: &mut String,
) {
    let node = &tree.nodes[idx];
    match node.children {
        Some((a, b)) => {
            let (first, second) = if tree.min_leaf(a) <= tree.min_leaf(b) {
                (a, b)
            } else {
                (b, a)
            };
            out.push('(');
            write_node(tree, first, Some(node.height), decimals, out);
            out.push(',');
            write_node(tree, second, Some(node.height), decimals, out);
            out.push(')');
        }
        None => out.push_str(node.label.as_deref().unwrap_or("")),
    }
    if let Some(ph) = parent_height {
        out.push(':');
        out.push_str(&format_branch(ph - node.height, decimals));
    }
}

fn format_branch(len: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, len);
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t.is_empty() || t == "-" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

/// Minimal Newick reader for round-trip checks and matrix-free tree input.
/// Heights are reconstructed bottom-up from branch lengths (leaves at 0).
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = NewickParser {
        bytes: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.parse_subtree(0)?;
    p.skip_ws();
    if p.peek() == Some(b';') {
        p.pos += 1;
    }
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::Parse {
            line: 1,
            msg: format!("trailing content at byte {}", p.pos),
        });
    }
    Ok(PhyloTree {
        nodes: p.nodes,
        root,
    })
}

struct NewickParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
}

const MAX_NEWICK_DEPTH: usize = 512;

impl<'a> NewickParser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            msg: format!("{} (byte {})", msg.into(), self.pos),
        }
    }

    /// Returns (node index). Branch length is attached by the caller.
    fn parse_subtree(&mut self, depth: usize) -> Result<usize> {
        if depth > MAX_NEWICK_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut children = Vec::new();
            loop {
                let child = self.parse_subtree(depth + 1)?;
                let bl = self.parse_branch_length()?;
                children.push((child, bl));
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
            // optional internal label, ignored
            let _ = self.parse_label();
            if children.len() < 2 {
                return Err(self.err("internal node needs at least 2 children"));
            }
            // fold multifurcations into nested binary nodes
            let mut it = children.into_iter();
            let (first, first_bl) = it.next().unwrap();
            let mut acc = first;
            let mut acc_bl = first_bl;
            for (child, bl) in it {
                let height = (self.nodes[acc].height + acc_bl)
                    .max(self.nodes[child].height + bl);
                self.nodes.push(Node {
                    label: None,
                    height,
                    children: Some((acc, child)),
                });
                acc = self.nodes.len() - 1;
                acc_bl = 0.0;
            }
            let _ = acc_bl;
            Ok(acc)
        } else {
            let label = self.parse_label();
            if label.is_empty() {
                return Err(self.err("expected leaf label or '('"));
            }
            self.nodes.push(Node {
                label: Some(label),
                height: 0.0,
                children: None,
            });
            Ok(self.nodes.len() - 1)
        }
    }

    fn parse_label(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if matches!(c, b'(' | b')' | b',' | b':' | b';') || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn parse_branch_length(&mut self) -> Result<f64> {
        self.skip_ws();
        if self.peek() != Some(b':') {
            return Ok(0.0);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if matches!(c, b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| self.err("invalid branch length"))?;
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(format!("invalid branch length '{text}'")))?;
        if !v.is_finite() {
            return Err(self.err("non-finite branch length"));
        }
        Ok(v)
    }
}
