use serde::{Deserialize, Serialize};

use super::pcamix::ClusterGram;
use crate::data::{Dataset, Partition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One agglomeration step. Leaves are nodes `0..p`; the node created at
/// step `s` is `p + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaf_names: Vec<String>,
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.leaf_names.len()
    }
}

struct Slot<T> {
    members: Vec<usize>,
    node: usize,
    homogeneity: T,
}

/// Agglomerative clustering of the variables of `d`: repeatedly merge the
/// pair of clusters with the smallest dissimilarity. Ties go to the pair
/// whose smallest leaves are lowest.
pub fn hierarchical_cluster<T: Scalar>(d: &Dataset<T>) -> Result<Dendrogram> {
    let p = d.p();
    if p < 2 {
        return Err(Error::Invalid("clustering needs at least 2 variables".into()));
    }
    let gram = ClusterGram::from_dataset(d)?;
    cluster_with(&gram, d.names().to_vec())
}

pub(crate) fn cluster_with<T: Scalar>(gram: &ClusterGram<T>, leaf_names: Vec<String>) -> Result<Dendrogram> {
    let p = gram.variables();
    // Slot i holds the cluster whose smallest leaf is i.
    let mut slots: Vec<Option<Slot<T>>> = Vec::with_capacity(p);
    for v in 0..p {
        slots.push(Some(Slot {
            members: vec![v],
            node: v,
            homogeneity: gram.homogeneity(&[v])?,
        }));
    }
    let mut dist = vec![T::zero(); p * p];
    for i in 0..p {
        for j in i + 1..p {
            let h = pair_distance(gram, slots[i].as_ref().unwrap(), slots[j].as_ref().unwrap())?;
            dist[i * p + j] = h;
        }
    }
    let mut merges = Vec::with_capacity(p - 1);
    for step in 0..p - 1 {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..p {
            if slots[i].is_none() {
                continue;
            }
            for j in i + 1..p {
                if slots[j].is_none() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if dist[i * p + j] >= dist[bi * p + bj] => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let (i, j) = best.expect("at least two active clusters");
        let right = slots[j].take().unwrap();
        let left = slots[i].take().unwrap();
        let mut members = left.members;
        members.extend(right.members);
        members.sort_unstable();
        let merged = Slot {
            homogeneity: gram.homogeneity(&members)?,
            members,
            node: p + step,
        };
        merges.push(Merge {
            left: left.node,
            right: right.node,
            height: dist[i * p + j].to_f64_lossy(),
            size: merged.members.len(),
        });
        for k in 0..p {
            if k == i {
                continue;
            }
            if let Some(other) = &slots[k] {
                let h = pair_distance(gram, &merged, other)?;
                let (a, b) = if k < i { (k, i) } else { (i, k) };
                dist[a * p + b] = h;
            }
        }
        slots[i] = Some(merged);
    }
    Ok(Dendrogram { merges, leaf_names })
}

fn pair_distance<T: Scalar>(gram: &ClusterGram<T>, a: &Slot<T>, b: &Slot<T>) -> Result<T> {
    let union: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
    Ok((a.homogeneity + b.homogeneity - gram.homogeneity(&union)?).max(T::zero()))
}

/// Partition obtained by undoing the last `m − 1` merges.
pub fn cut_tree(dend: &Dendrogram, m: usize) -> Result<Partition> {
    let p = dend.leaves();
    if m < 1 || m > p {
        return Err(Error::OutOfRange {
            what: "cluster count",
            value: m as i64,
            min: 1,
            max: p as i64,
        });
    }
    let mut parent: Vec<usize> = (0..2 * p).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, mg) in dend.merges.iter().take(p - m).enumerate() {
        let node = p + s;
        let a = find(&mut parent, mg.left);
        let b = find(&mut parent, mg.right);
        parent[a] = node;
        parent[b] = node;
    }
    let roots: Vec<usize> = (0..p).map(|v| find(&mut parent, v)).collect();
    Ok(Partition::from_labels(&roots))
}
