//! Dense tensors over labelled spaces.
//!
//! Every space carries a fixed orthonormal basis, so a space is identified
//! with its dual and the cup and cap are both the identity pairing. The
//! Frobenius operations copy (`frob_delta`), merge (`frob_mu`), delete
//! (`frob_iota`) and create (`frob_zeta`) basis vectors; `spider` is their
//! common generalisation.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("space `{0}` must have at least one basis vector")]
    EmptySpace(String),
    #[error("space `{space}` repeats basis label `{label}`")]
    DuplicateLabel { space: String, label: String },
    #[error("data has {got} entries but the axes need {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("axis {axis} out of range for an order-{order} tensor")]
    AxisOutOfRange { axis: usize, order: usize },
    #[error("cannot contract axis {0} with itself")]
    SameAxis(usize),
    #[error("axis mismatch: {left} vs {right}")]
    AxisMismatch { left: String, right: String },
    #[error("expected an order-{expected} tensor, got order {got}")]
    WrongOrder { expected: usize, got: usize },
    #[error("a spider needs at least one leg")]
    EmptySpider,
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
}

#[derive(Debug)]
struct SpaceInner {
    name: String,
    labels: Vec<String>,
}

/// A finite-dimensional space with a named, labelled basis.
#[derive(Clone)]
pub struct Space(Arc<SpaceInner>);

impl Space {
    pub fn new<I, S>(name: impl Into<String>, labels: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(TensorError::EmptySpace(name));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(TensorError::DuplicateLabel {
                    space: name,
                    label: l.clone(),
                });
            }
        }
        Ok(Space(Arc::new(SpaceInner { name, labels })))
    }

    /// A space whose basis vectors are labelled `e0, e1, ...`.
    pub fn numbered(name: impl Into<String>, dim: usize) -> Result<Self, TensorError> {
        Self::new(name, (0..dim).map(|i| format!("e{i}")))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.name == other.0.name && self.0.labels == other.0.labels)
    }
}

impl Eq for Space {}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name(), self.dim())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Entrywise comparison tolerance: `|a - b| <= max(rel * max(|a|, |b|), abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { rel: 1e-9, abs: 1e-12 };

    pub fn close(&self, a: f64, b: f64) -> bool {
        let scale = a.abs().max(b.abs());
        (a - b).abs() <= (self.rel * scale).max(self.abs)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Dense row-major tensor.
#[derive(Clone, PartialEq)]
pub struct Tensor {
    axes: Vec<Space>,
    data: Vec<f64>,
}

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

impl Tensor {
    pub fn new(axes: Vec<Space>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected: usize = axes.iter().map(Space::dim).product();
        if expected != data.len() {
            return Err(TensorError::DataLength {
                expected,
                got: data.len(),
            });
        }
        Ok(Tensor { axes, data })
    }

    pub fn zeros(axes: Vec<Space>) -> Self {
        let len = axes.iter().map(Space::dim).product();
        Tensor {
            axes,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(x: f64) -> Self {
        Tensor {
            axes: Vec::new(),
            data: vec![x],
        }
    }

    pub fn vector(space: &Space, data: Vec<f64>) -> Result<Self, TensorError> {
        Self::new(vec![space.clone()], data)
    }

    pub fn from_fn(axes: Vec<Space>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let shape: Vec<usize> = axes.iter().map(Space::dim).collect();
        let len = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Tensor { axes, data }
    }

    /// Identity matrix on `space`.
    pub fn identity(space: &Space) -> Self {
        Self::from_fn(vec![space.clone(), space.clone()], |i| (i[0] == i[1]) as u8 as f64)
    }

    pub fn axes(&self) -> &[Space] {
        &self.axes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn order(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Space::dim).collect()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.shape())
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order(), "index arity");
        idx.iter()
            .zip(self.strides())
            .zip(self.axes.iter())
            .map(|((&i, s), ax)| {
                assert!(i < ax.dim(), "index {i} out of range for {ax:?}");
                i * s
            })
            .sum()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Value of an order-0 tensor.
    pub fn value(&self) -> Option<f64> {
        (self.order() == 0).then(|| self.data[0])
    }

    fn expect_order(&self, expected: usize) -> Result<(), TensorError> {
        if self.order() != expected {
            return Err(TensorError::WrongOrder {
                expected,
                got: self.order(),
            });
        }
        Ok(())
    }

    fn check_axis(&self, axis: usize) -> Result<(), TensorError> {
        if axis >= self.order() {
            return Err(TensorError::AxisOutOfRange {
                axis,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// Reorders axes so that new axis `k` is old axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor, TensorError> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::BadPermutation(perm.to_vec()));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let old_strides = self.strides();
        let axes: Vec<Space> = perm.iter().map(|&p| self.axes[p].clone()).collect();
        let shape: Vec<usize> = axes.iter().map(Space::dim).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; n];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            for k in (0..n).rev() {
                idx[k] += 1;
                src += src_strides[k];
                if idx[k] < shape[k] {
                    break;
                }
                src -= src_strides[k] * shape[k];
                idx[k] = 0;
            }
        }
        Ok(Tensor { axes, data })
    }

    pub fn scale(&self, factor: f64) -> Tensor {
        Tensor {
            axes: self.axes.clone(),
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    fn same_axes(&self, other: &Tensor) -> Result<(), TensorError> {
        if self.axes != other.axes {
            return Err(TensorError::AxisMismatch {
                left: format!("{:?}", self.axes),
                right: format!("{:?}", other.axes),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_axes(other)?;
        Ok(Tensor {
            axes: self.axes.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_axes(other)?;
        Ok(Tensor {
            axes: self.axes.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn dot(&self, other: &Tensor) -> Result<f64, TensorError> {
        self.same_axes(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> Option<f64> {
        (self.axes == other.axes).then(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn approx_eq(&self, other: &Tensor, tol: Tolerance) -> bool {
        self.axes == other.axes && self.data.iter().zip(&other.data).all(|(&a, &b)| tol.close(a, b))
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor{:?}{:?}", self.axes, self.data)
    }
}

pub fn tensor_product(a: &Tensor, b: &Tensor) -> Tensor {
    let mut axes = a.axes.clone();
    axes.extend(b.axes.iter().cloned());
    let mut data = Vec::with_capacity(a.data.len() * b.data.len());
    for &x in &a.data {
        data.extend(b.data.iter().map(|&y| x * y));
    }
    Tensor { axes, data }
}

/// Contracts axis pairs `(axis of a, axis of b)`; the result carries the
/// remaining axes of `a` followed by the remaining axes of `b`.
pub fn tensordot(a: &Tensor, b: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor, TensorError> {
    for &(i, j) in pairs {
        a.check_axis(i)?;
        b.check_axis(j)?;
        if a.axes[i] != b.axes[j] {
            return Err(TensorError::AxisMismatch {
                left: format!("{:?}", a.axes[i]),
                right: format!("{:?}", b.axes[j]),
            });
        }
    }
    let a_contr: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let b_contr: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let dup = |v: &[usize]| v.iter().enumerate().any(|(k, x)| v[..k].contains(x));
    if dup(&a_contr) || dup(&b_contr) {
        return Err(TensorError::BadPermutation(if dup(&a_contr) {
            a_contr
        } else {
            b_contr
        }));
    }
    let a_free: Vec<usize> = (0..a.order()).filter(|k| !a_contr.contains(k)).collect();
    let b_free: Vec<usize> = (0..b.order()).filter(|k| !b_contr.contains(k)).collect();

    let a_perm: Vec<usize> = a_free.iter().chain(&a_contr).copied().collect();
    let b_perm: Vec<usize> = b_contr.iter().chain(&b_free).copied().collect();
    let ap = a.permute(&a_perm)?;
    let bp = b.permute(&b_perm)?;

    let m: usize = a_free.iter().map(|&k| a.axes[k].dim()).product();
    let inner: usize = a_contr.iter().map(|&k| a.axes[k].dim()).product();
    let n: usize = b_free.iter().map(|&k| b.axes[k].dim()).product();

    let mut data = vec![0.0; m * n];
    for r in 0..m {
        let arow = &ap.data[r * inner..(r + 1) * inner];
        let out = &mut data[r * n..(r + 1) * n];
        for (q, &x) in arow.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let brow = &bp.data[q * n..(q + 1) * n];
            for (o, &y) in out.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    let axes = a_free
        .iter()
        .map(|&k| a.axes[k].clone())
        .chain(b_free.iter().map(|&k| b.axes[k].clone()))
        .collect();
    Ok(Tensor { axes, data })
}

/// Sums over the diagonal of axes `i` and `j` (the cup on those legs).
pub fn contract(t: &Tensor, i: usize, j: usize) -> Result<Tensor, TensorError> {
    t.check_axis(i)?;
    t.check_axis(j)?;
    if i == j {
        return Err(TensorError::SameAxis(i));
    }
    if t.axes[i].dim() != t.axes[j].dim() {
        return Err(TensorError::AxisMismatch {
            left: format!("{:?}", t.axes[i]),
            right: format!("{:?}", t.axes[j]),
        });
    }
    let strides = t.strides();
    let keep: Vec<usize> = (0..t.order()).filter(|&k| k != i && k != j).collect();
    let axes: Vec<Space> = keep.iter().map(|&k| t.axes[k].clone()).collect();
    let diag_stride = strides[i] + strides[j];
    let d = t.axes[i].dim();
    let out = Tensor::from_fn(axes, |idx| {
        let base: usize = idx.iter().zip(&keep).map(|(&x, &k)| x * strides[k]).sum();
        (0..d).map(|q| t.data[base + q * diag_stride]).sum()
    });
    Ok(out)
}

/// The cap: `sum_i e_i (x) e_i`.
pub fn eta(sp: &Space) -> Tensor {
    Tensor::identity(sp)
}

/// Copies a vector onto the diagonal.
pub fn frob_delta(v: &Tensor) -> Result<Tensor, TensorError> {
    v.expect_order(1)?;
    let sp = v.axes[0].clone();
    Ok(Tensor::from_fn(vec![sp.clone(), sp], |i| {
        if i[0] == i[1] {
            v.data[i[0]]
        } else {
            0.0
        }
    }))
}

/// Keeps the diagonal of a square matrix.
pub fn frob_mu(w: &Tensor) -> Result<Tensor, TensorError> {
    w.expect_order(2)?;
    if w.axes[0] != w.axes[1] {
        return Err(TensorError::AxisMismatch {
            left: format!("{:?}", w.axes[0]),
            right: format!("{:?}", w.axes[1]),
        });
    }
    let d = w.axes[0].dim();
    Ok(Tensor {
        axes: vec![w.axes[0].clone()],
        data: (0..d).map(|i| w.data[i * d + i]).collect(),
    })
}

pub fn frob_iota(v: &Tensor) -> Result<f64, TensorError> {
    v.expect_order(1)?;
    Ok(v.data.iter().sum())
}

pub fn frob_zeta(sp: &Space) -> Tensor {
    Tensor {
        axes: vec![sp.clone()],
        data: vec![1.0; sp.dim()],
    }
}

/// The `(m, n)` spider: entry 1 where all `m + n` indices coincide.
pub fn spider(sp: &Space, inputs: usize, outputs: usize) -> Result<Tensor, TensorError> {
    let legs = inputs + outputs;
    if legs == 0 {
        return Err(TensorError::EmptySpider);
    }
    let mut t = Tensor::zeros(vec![sp.clone(); legs]);
    let d = sp.dim();
    let diag: usize = (0..legs).map(|k| d.pow(k as u32)).sum();
    for i in 0..d {
        t.data[i * diag] = 1.0;
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    /// Set when either argument has zero norm; `value` is then 0.
    pub zero_norm: bool,
}

pub fn cosine(a: &Tensor, b: &Tensor) -> Result<Cosine, TensorError> {
    a.expect_order(1)?;
    b.expect_order(1)?;
    let dot = a.dot(b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            zero_norm: true,
        });
    }
    Ok(Cosine {
        value: dot / (na * nb),
        zero_norm: false,
    })
}
