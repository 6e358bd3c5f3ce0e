//! Immutable data containers shared by every other module.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;

use crate::error::{invalid, Error, Result};
use crate::seed;

/// An `n × p` covariate matrix stored row-major, binary labels and
/// feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<u8>,
    names: Vec<String>,
    n: usize,
    p: usize,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<u8>, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        let p = names.len();
        if n == 0 {
            return invalid("dataset has no rows");
        }
        if p == 0 {
            return invalid("dataset has no features");
        }
        if x.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                found: x.len(),
            });
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return invalid(format!(
                "non-finite covariate at row {}, column {}",
                pos / p,
                pos % p
            ));
        }
        if let Some(i) = y.iter().position(|&v| v > 1) {
            return invalid(format!("label at row {i} is {} (expected 0 or 1)", y[i]));
        }
        let mut seen = HashSet::with_capacity(p);
        for name in &names {
            if !seen.insert(name.as_str()) {
                return invalid(format!("duplicate feature name '{name}'"));
            }
        }
        Ok(Self { x, y, names, n, p })
    }

    /// Builds a dataset with feature names `f0..f{p-1}`.
    pub fn with_default_names(x: Vec<f64>, y: Vec<u8>, p: usize) -> Result<Self> {
        Self::new(x, y, default_names(p))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn label(&self, i: usize) -> f64 {
        f64::from(self.y[i])
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.p + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v == 1).count()
    }

    /// Copy of the rows at `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return invalid("cannot restrict to an empty row set");
        }
        let mut x = Vec::with_capacity(indices.len() * self.p);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n {
                return invalid(format!("row index {i} out of range for n={}", self.n));
            }
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Ok(Self {
            x,
            y,
            names: self.names.clone(),
            n: indices.len(),
            p: self.p,
        })
    }

    /// Copy keeping only the listed columns, in that order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return invalid("cannot select zero columns");
        }
        if let Some(&j) = columns.iter().find(|&&j| j >= self.p) {
            return invalid(format!("column index {j} out of range for p={}", self.p));
        }
        let mut x = Vec::with_capacity(self.n * columns.len());
        for i in 0..self.n {
            let row = self.row(i);
            x.extend(columns.iter().map(|&j| row[j]));
        }
        let names = columns.iter().map(|&j| self.names[j].clone()).collect();
        Self::new(x, self.y.clone(), names)
    }
}

pub fn default_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("f{j}")).collect()
}

/// A subset of the `p` features, stored as a bit vector with a cached
/// popcount.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparsityPattern {
    len: usize,
    words: Vec<u64>,
    count: usize,
}

impl SparsityPattern {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
            count: 0,
        }
    }

    pub fn full(len: usize) -> Self {
        Self::from_indices(len, &(0..len).collect::<Vec<_>>()).expect("indices in range")
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut pattern = Self::empty(len);
        for &j in indices {
            if j >= len {
                return invalid(format!("feature index {j} out of range for p={len}"));
            }
            if !pattern.contains(j) {
                pattern.toggle(j);
            }
        }
        Ok(pattern)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut pattern = Self::empty(bits.len());
        for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            pattern.toggle(j);
        }
        pattern
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of active features.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn contains(&self, j: usize) -> bool {
        j < self.len && self.words[j / 64] >> (j % 64) & 1 == 1
    }

    /// Copy of this pattern with feature `j` switched.
    pub fn flipped(&self, j: usize) -> Self {
        let mut next = self.clone();
        next.toggle(j);
        next
    }

    fn toggle(&mut self, j: usize) {
        assert!(j < self.len, "feature index {j} out of range for p={}", self.len);
        let mask = 1u64 << (j % 64);
        let word = &mut self.words[j / 64];
        if *word & mask == 0 {
            self.count += 1;
        } else {
            self.count -= 1;
        }
        *word ^= mask;
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.indices().collect()
    }
}

impl fmt::Debug for SparsityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsityPattern(p={}, {:?})", self.len, self.to_indices())
    }
}

/// Partition of the rows into an estimation and an aggregation subsample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub seed: u64,
}

/// Random partition of the rows; `first` gets `⌊n·ratio⌋` of them.
///
/// With `stratified`, each class is split separately so its share in the
/// first subsample is within one observation of `ratio`.
pub fn split(data: &Dataset, ratio: f64, seed: u64, stratified: bool) -> Result<SplitSpec> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return invalid(format!("split ratio {ratio} must lie in (0, 1)"));
    }
    let n = data.n();
    let n_first = (n as f64 * ratio).floor() as usize;
    if n_first == 0 || n_first == n {
        return invalid(format!(
            "split ratio {ratio} leaves an empty subsample for n={n}"
        ));
    }
    let mut rng = seed::rng(seed);
    let (mut first, mut second) = if stratified {
        let classes: [Vec<usize>; 2] = [0u8, 1].map(|c| (0..n).filter(|&i| data.y()[i] == c).collect());
        for (c, members) in classes.iter().enumerate() {
            if members.len() < 2 {
                return invalid(format!(
                    "class {c} has {} member(s); stratified split needs at least 2",
                    members.len()
                ));
            }
        }
        // largest-remainder allocation so the class quotas add up to n_first
        let exact = classes.clone().map(|m| m.len() as f64 * ratio);
        let mut quota = exact.map(|e| e.floor() as usize);
        let mut order = [0usize, 1];
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        let mut k = 0;
        while quota.iter().sum::<usize>() < n_first {
            quota[order[k % 2]] += 1;
            k += 1;
        }
        let mut first = Vec::with_capacity(n_first);
        let mut second = Vec::with_capacity(n - n_first);
        for (c, mut members) in classes.into_iter().enumerate() {
            members.shuffle(&mut rng);
            second.extend_from_slice(&members[quota[c]..]);
            members.truncate(quota[c]);
            first.extend(members);
        }
        (first, second)
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        let second = rows.split_off(n_first);
        (rows, second)
    };
    first.sort_unstable();
    second.sort_unstable();
    Ok(SplitSpec {
        first,
        second,
        seed,
    })
}

/// Free-function form of [`Dataset::restrict`].
pub fn restrict(data: &Dataset, indices: &[usize]) -> Result<Dataset> {
    data.restrict(indices)
}
