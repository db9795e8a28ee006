//! Dense tensor-network evaluation of small diagrams.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Color, EdgeType, ZxDiagram};
use crate::error::{Error, Result};

/// Default limit on `|inputs| + |outputs|`.
pub const DEFAULT_LEG_CAP: usize = 12;

/// Largest intermediate tensor rank the contraction will build.
const MAX_RANK: usize = 24;

/// Matrix with `2^outputs` rows and `2^inputs` columns, row-major. Input and
/// output 0 are the most significant bits of their index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMap {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl DenseMap {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.norm() <= tol)
    }
}

struct Tensor {
    labels: Vec<u32>,
    data: Vec<Complex64>,
}

impl Tensor {
    fn spider(color: Color, phase: u8, labels: Vec<u32>) -> Tensor {
        let k = labels.len();
        let phase = Complex64::from_polar(1.0, phase as f64 * std::f64::consts::FRAC_PI_2);
        let mut data = vec![Complex64::new(0.0, 0.0); 1 << k];
        match color {
            Color::Z => {
                data[0] += 1.0;
                data[(1 << k) - 1] += phase;
            }
            Color::X => {
                for (idx, v) in data.iter_mut().enumerate() {
                    let sign = if idx.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    *v = Complex64::new(1.0, 0.0) + phase * sign;
                }
            }
        }
        Tensor { labels, data }
    }

    fn wire(ty: EdgeType, a: u32, b: u32) -> Tensor {
        let data = match ty {
            EdgeType::Plain => vec![1.0, 0.0, 0.0, 1.0],
            EdgeType::Hadamard => vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        };
        Tensor {
            labels: vec![a, b],
            data: data.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Bit of `label` inside an index of this tensor (first label = most
    /// significant).
    fn stride(&self, label: u32) -> Option<usize> {
        let k = self.labels.len();
        self.labels.iter().position(|&l| l == label).map(|p| 1 << (k - 1 - p))
    }

    fn contract(&self, other: &Tensor) -> Tensor {
        let shared: Vec<u32> = self.labels.iter().copied().filter(|l| other.labels.contains(l)).collect();
        let mut out_labels: Vec<u32> = self.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
        out_labels.extend(other.labels.iter().copied().filter(|l| !shared.contains(l)));
        let all: Vec<u32> = out_labels.iter().chain(&shared).copied().collect();
        let sa: Vec<usize> = all.iter().map(|&l| self.stride(l).unwrap_or(0)).collect();
        let sb: Vec<usize> = all.iter().map(|&l| other.stride(l).unwrap_or(0)).collect();
        let n_out = out_labels.len();
        let n_all = all.len();
        let mut data = vec![Complex64::new(0.0, 0.0); 1 << n_out];
        for idx in 0..(1usize << n_all) {
            let (mut ia, mut ib) = (0, 0);
            for j in 0..n_all {
                if idx >> (n_all - 1 - j) & 1 == 1 {
                    ia += sa[j];
                    ib += sb[j];
                }
            }
            data[idx >> shared.len()] += self.data[ia] * other.data[ib];
        }
        Tensor {
            labels: out_labels,
            data,
        }
    }
}

/// Contracts the diagram into the linear map from its inputs to its outputs.
///
/// Every spider contributes its defining tensor, every wire an identity or a
/// Hadamard matrix, and each boundary an open leg. Refuses diagrams with more
/// than `leg_cap` open legs.
pub fn evaluate_dense(d: &ZxDiagram, leg_cap: usize) -> Result<DenseMap> {
    let n_in = d.inputs().len();
    let n_out = d.outputs().len();
    if n_in + n_out > leg_cap {
        return Err(Error::TooLarge(format!(
            "{n_in} inputs + {n_out} outputs exceed the cap of {leg_cap} legs"
        )));
    }
    // one label per wire end; open legs get labels above the wire ends
    let mut next = 0u32;
    let mut end_labels: Vec<Vec<u32>> = vec![Vec::new(); d.capacity()];
    let mut tensors = Vec::new();
    for (a, b, ty) in d.wires() {
        let (la, lb) = (next, next + 1);
        next += 2;
        end_labels[a as usize].push(la);
        end_labels[b as usize].push(lb);
        tensors.push(Tensor::wire(ty, la, lb));
    }
    let mut open = Vec::with_capacity(n_in + n_out);
    for v in d.spider_ids() {
        let s = d.spider(v).expect("live");
        let mut labels = std::mem::take(&mut end_labels[v as usize]);
        if s.is_boundary() {
            let leg = next;
            next += 1;
            labels.push(leg);
            open.push((v, leg));
            tensors.push(Tensor::spider(Color::Z, 0, labels));
        } else {
            if labels.len() > MAX_RANK {
                return Err(Error::TooLarge(format!("spider {v} has degree {}", labels.len())));
            }
            tensors.push(Tensor::spider(s.color, s.phase, labels));
        }
    }

    while tensors.len() > 1 {
        // cheapest pair sharing a label, else the two smallest tensors
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..tensors.len() {
            for j in i + 1..tensors.len() {
                let shared = tensors[i]
                    .labels
                    .iter()
                    .filter(|l| tensors[j].labels.contains(l))
                    .count();
                if shared == 0 {
                    continue;
                }
                let rank = tensors[i].labels.len() + tensors[j].labels.len() - 2 * shared;
                if best.is_none_or(|b| rank < b.2) {
                    best = Some((i, j, rank));
                }
            }
        }
        let (i, j) = match best {
            Some((i, j, _)) => (i, j),
            None => {
                let mut order: Vec<usize> = (0..tensors.len()).collect();
                order.sort_by_key(|&k| tensors[k].labels.len());
                let (a, b) = (order[0].min(order[1]), order[0].max(order[1]));
                (a, b)
            }
        };
        let tb = tensors.swap_remove(j);
        let ta = tensors.swap_remove(i);
        let merged = ta.contract(&tb);
        if merged.labels.len() > MAX_RANK {
            return Err(Error::TooLarge(format!("intermediate tensor of rank {}", merged.labels.len())));
        }
        tensors.push(merged);
    }
    let result = tensors.pop().unwrap_or(Tensor {
        labels: Vec::new(),
        data: vec![Complex64::new(1.0, 0.0)],
    });

    let leg_of = |v: u32| open.iter().find(|&&(w, _)| w == v).map(|&(_, l)| l).expect("open leg");
    let out_legs: Vec<u32> = d.outputs().iter().map(|&v| leg_of(v)).collect();
    let in_legs: Vec<u32> = d.inputs().iter().map(|&v| leg_of(v)).collect();
    let rows = 1usize << n_out;
    let cols = 1usize << n_in;
    let strides: Vec<usize> = out_legs
        .iter()
        .chain(&in_legs)
        .map(|&l| result.stride(l).expect("open leg survives"))
        .collect();
    let total = n_out + n_in;
    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    for (idx, slot) in data.iter_mut().enumerate() {
        let mut src = 0;
        for (j, s) in strides.iter().enumerate() {
            if idx >> (total - 1 - j) & 1 == 1 {
                src += s;
            }
        }
        *slot = result.data[src];
    }
    Ok(DenseMap { rows, cols, data })
}

/// Whether `a` and `b` agree up to a nonzero scalar: both are divided by
/// their entry at the position of `a`'s largest-magnitude element and the
/// largest remaining difference must stay below `tol`.
pub fn proportional(a: &DenseMap, b: &DenseMap, tol: f64) -> bool {
    if a.rows != b.rows || a.cols != b.cols {
        return false;
    }
    let Some((k, pivot)) = a
        .data
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(k, v)| (k, *v))
    else {
        return true;
    };
    let a_max = pivot.norm();
    let b_max = b.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if a_max <= 1e-12 || b_max <= 1e-12 {
        return a_max <= 1e-12 && b_max <= 1e-12;
    }
    let bk = b.data[k];
    if bk.norm() <= 1e-12 * b_max {
        return false;
    }
    a.data
        .iter()
        .zip(&b.data)
        .all(|(x, y)| (x / pivot - y / bk).norm() < tol)
}
