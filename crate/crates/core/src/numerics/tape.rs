//! Reverse-mode differentiation over [`Tensor2`] values.
//!
//! A [`Tape`] records every operation in execution order. Nodes are
//! addressed by [`Var`] handles; parameters enter the tape through
//! [`Tape::param`] and receive their gradients in the [`ParamStore`] when
//! [`Tape::backward`] runs.

use super::params::{ParamId, ParamStore};
use super::tensor::{softmax_rows_plain, Tensor2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Op<T> {
    Leaf,
    Param(ParamId),
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Div(Var, Var),
    Scale(Var, T),
    AddScalar(Var, T),
    Relu(Var),
    Softplus(Var),
    Exp(Var),
    Ln(Var),
    Square(Var),
    Recip(Var),
    SumAll(Var),
    MeanAll(Var),
    MeanRows(Var),
    RowSum(Var),
    TileRows(Var, usize),
    RepeatEachRow(Var, usize),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    GatherRows(Var, Vec<usize>),
    SoftmaxRows(Var),
    CrossEntropy(Var, Vec<usize>, T),
    Attention(Var, Var),
}

#[derive(Clone, Debug)]
struct Node<T> {
    value: Tensor2<T>,
    op: Op<T>,
    requires_grad: bool,
}

/// Operation recorder for one forward/backward pass.
#[derive(Clone, Debug, Default)]
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
    param_cache: Vec<Option<Var>>,
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            param_cache: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor2<T> {
        &self.nodes[v.0].value
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn push(&mut self, value: Tensor2<T>, op: Op<T>, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn rg(&self, vs: &[Var]) -> bool {
        vs.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    /// Constant input; gradients never flow into it.
    pub fn constant(&mut self, value: Tensor2<T>) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn scalar(&mut self, v: T) -> Var {
        self.constant(Tensor2::scalar(v))
    }

    /// Registers a parameter. Repeated calls for the same id share one node.
    pub fn param(&mut self, store: &ParamStore<T>, id: ParamId) -> Var {
        let k = id.index();
        if self.param_cache.len() <= k {
            self.param_cache.resize(k + 1, None);
        }
        if let Some(v) = self.param_cache[k] {
            return v;
        }
        let v = self.push(store.value(id).clone(), Op::Param(id), true);
        self.param_cache[k] = Some(v);
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).matmul(self.value(b))?;
        let rg = self.rg(&[a, b]);
        Ok(self.push(value, Op::MatMul(a, b), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "add", |x, y| x + y)?;
        let rg = self.rg(&[a, b]);
        Ok(self.push(value, Op::Add(a, b), rg))
    }

    /// Adds a 1 x d row to every row of an n x d tensor.
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        let (av, rv) = (self.value(a), self.value(row));
        if rv.rows() != 1 || rv.cols() != av.cols() {
            return Err(Error::shape(
                "add_row",
                format!(
                    "{}x{} plus row {}x{}",
                    av.rows(),
                    av.cols(),
                    rv.rows(),
                    rv.cols()
                ),
            ));
        }
        let mut value = av.clone();
        let r = rv.row(0).to_vec();
        for i in 0..value.rows() {
            for (x, &b) in value.row_mut(i).iter_mut().zip(&r) {
                *x = *x + b;
            }
        }
        let rg = self.rg(&[a, row]);
        Ok(self.push(value, Op::AddRow(a, row), rg))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "sub", |x, y| x - y)?;
        let rg = self.rg(&[a, b]);
        Ok(self.push(value, Op::Sub(a, b), rg))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "mul", |x, y| x * y)?;
        let rg = self.rg(&[a, b]);
        Ok(self.push(value, Op::Mul(a, b), rg))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "div", |x, y| x / y)?;
        self.check_finite(&value, "div")?;
        let rg = self.rg(&[a, b]);
        Ok(self.push(value, Op::Div(a, b), rg))
    }

    pub fn scale(&mut self, a: Var, s: T) -> Var {
        let value = self.value(a).scale(s);
        let rg = self.rg(&[a]);
        self.push(value, Op::Scale(a, s), rg)
    }

    pub fn add_scalar(&mut self, a: Var, s: T) -> Var {
        let value = self.value(a).map(|x| x + s);
        let rg = self.rg(&[a]);
        self.push(value, Op::AddScalar(a, s), rg)
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let value = self.value(a).map(|x| x.max(T::zero()));
        let rg = self.rg(&[a]);
        self.push(value, Op::Relu(a), rg)
    }

    /// `ln(1 + e^x)`, evaluated without overflow.
    pub fn softplus(&mut self, a: Var) -> Var {
        let value = self.value(a).map(softplus);
        let rg = self.rg(&[a]);
        self.push(value, Op::Softplus(a), rg)
    }

    pub fn exp(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(T::exp);
        self.check_finite(&value, "exp")?;
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::Exp(a), rg))
    }

    pub fn ln(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(T::ln);
        self.check_finite(&value, "ln")?;
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::Ln(a), rg))
    }

    pub fn square(&mut self, a: Var) -> Var {
        let value = self.value(a).map(|x| x * x);
        let rg = self.rg(&[a]);
        self.push(value, Op::Square(a), rg)
    }

    pub fn recip(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).map(T::recip);
        self.check_finite(&value, "recip")?;
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::Recip(a), rg))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let value = Tensor2::scalar(self.value(a).sum());
        let rg = self.rg(&[a]);
        self.push(value, Op::SumAll(a), rg)
    }

    pub fn mean_all(&mut self, a: Var) -> Result<Var> {
        let av = self.value(a);
        if av.is_empty() {
            return Err(Error::Empty("mean_all"));
        }
        let value = Tensor2::scalar(av.sum() / T::from_usize_lossy(av.len()));
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::MeanAll(a), rg))
    }

    /// Mean over the batch (row) dimension: n x d to 1 x d.
    pub fn mean_rows(&mut self, a: Var) -> Result<Var> {
        let value = self.value(a).mean_rows()?;
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::MeanRows(a), rg))
    }

    /// Per-row sum: n x d to n x 1.
    pub fn row_sum(&mut self, a: Var) -> Var {
        let av = self.value(a);
        let data = av.iter_rows().map(|r| r.iter().copied().sum()).collect();
        let value = Tensor2::new(av.rows(), 1, data).expect("row_sum shape");
        let rg = self.rg(&[a]);
        self.push(value, Op::RowSum(a), rg)
    }

    /// Stacks `k` copies of the whole tensor: row `t*n + i` is row `i`.
    pub fn tile_rows(&mut self, a: Var, k: usize) -> Var {
        let av = self.value(a);
        let mut data = Vec::with_capacity(av.len() * k);
        for _ in 0..k {
            data.extend_from_slice(av.data());
        }
        let value = Tensor2::new(av.rows() * k, av.cols(), data).expect("tile shape");
        let rg = self.rg(&[a]);
        self.push(value, Op::TileRows(a, k), rg)
    }

    /// Repeats each row `k` times consecutively: row `t*k + i` is row `t`.
    pub fn repeat_each_row(&mut self, a: Var, k: usize) -> Var {
        let av = self.value(a);
        let mut data = Vec::with_capacity(av.len() * k);
        for r in av.iter_rows() {
            for _ in 0..k {
                data.extend_from_slice(r);
            }
        }
        let value = Tensor2::new(av.rows() * k, av.cols(), data).expect("repeat shape");
        let rg = self.rg(&[a]);
        self.push(value, Op::RepeatEachRow(a, k), rg)
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let vals: Vec<&Tensor2<T>> = parts.iter().map(|&p| self.value(p)).collect();
        let value = Tensor2::concat_cols(&vals)?;
        let rg = self.rg(parts);
        Ok(self.push(value, Op::ConcatCols(parts.to_vec()), rg))
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        let vals: Vec<&Tensor2<T>> = parts.iter().map(|&p| self.value(p)).collect();
        let value = Tensor2::concat_rows(&vals)?;
        let rg = self.rg(parts);
        Ok(self.push(value, Op::ConcatRows(parts.to_vec()), rg))
    }

    pub fn gather_rows(&mut self, a: Var, idx: &[usize]) -> Result<Var> {
        let av = self.value(a);
        if let Some(&bad) = idx.iter().find(|&&i| i >= av.rows()) {
            return Err(Error::shape(
                "gather_rows",
                format!("row {bad} out of {}", av.rows()),
            ));
        }
        let value = av.gather_rows(idx);
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::GatherRows(a, idx.to_vec()), rg))
    }

    /// Row-wise softmax with max subtraction.
    pub fn softmax_rows(&mut self, a: Var) -> Result<Var> {
        let value = softmax_rows_plain(self.value(a))?;
        let rg = self.rg(&[a]);
        Ok(self.push(value, Op::SoftmaxRows(a), rg))
    }

    /// Mean over rows of `-ln max(p[label], eps)`.
    pub fn cross_entropy(&mut self, probs: Var, labels: &[usize], eps: T) -> Result<Var> {
        let pv = self.value(probs);
        if labels.len() != pv.rows() {
            return Err(Error::shape(
                "cross_entropy",
                format!("{} labels for {} rows", labels.len(), pv.rows()),
            ));
        }
        if pv.rows() == 0 {
            return Err(Error::Empty("cross_entropy"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= pv.cols()) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for {} classes",
                pv.cols()
            )));
        }
        let n = T::from_usize_lossy(pv.rows());
        let total: T = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| -pv[(i, l)].max(eps).ln())
            .sum();
        let value = Tensor2::scalar(total / n);
        let rg = self.rg(&[probs]);
        Ok(self.push(value, Op::CrossEntropy(probs, labels.to_vec(), eps), rg))
    }

    /// Distance-softmax attention of query rows over center rows.
    ///
    /// `out[i] = Σ_l softmax_l(-‖q_i - c_l‖) c_l`
    pub fn attention(&mut self, queries: Var, centers: Var) -> Result<Var> {
        let (qv, cv) = (self.value(queries), self.value(centers));
        let value = attention_forward(qv, cv)?.0;
        let rg = self.rg(&[queries, centers]);
        Ok(self.push(value, Op::Attention(queries, centers), rg))
    }

    fn check_finite(&self, t: &Tensor2<T>, op: &'static str) -> Result<()> {
        if t.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(op))
        }
    }

    /// Back-propagates from a scalar loss and accumulates parameter
    /// gradients into `store`. Gradients add to whatever is already there.
    pub fn backward(&self, loss: Var, store: &mut ParamStore<T>) -> Result<()> {
        let lv = self.value(loss);
        if lv.shape() != (1, 1) {
            return Err(Error::NonScalarLoss {
                rows: lv.rows(),
                cols: lv.cols(),
            });
        }
        if !self.requires_grad(loss) {
            return Err(Error::Detached);
        }
        let mut grads: Vec<Option<Tensor2<T>>> = vec![None; loss.0 + 1];
        grads[loss.0] = Some(Tensor2::scalar(T::one()));

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else {
                continue;
            };
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            if let Op::Param(id) = node.op {
                store.accumulate_grad(id, &g)?;
                continue;
            }
            self.propagate(idx, &g, &mut grads)?;
        }
        Ok(())
    }

    fn propagate(&self, idx: usize, g: &Tensor2<T>, grads: &mut [Option<Tensor2<T>>]) -> Result<()> {
        let node = &self.nodes[idx];
        let out = &node.value;
        let mut send = |v: Var, delta: Tensor2<T>| -> Result<()> {
            if !self.nodes[v.0].requires_grad {
                return Ok(());
            }
            match &mut grads[v.0] {
                Some(acc) => acc.add_assign(&delta),
                slot @ None => {
                    *slot = Some(delta);
                    Ok(())
                }
            }
        };
        match &node.op {
            Op::Leaf | Op::Param(_) => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                if self.requires_grad(*a) {
                    send(*a, g.matmul_t(bv))?;
                }
                if self.requires_grad(*b) {
                    send(*b, av.t_matmul(g))?;
                }
            }
            Op::Add(a, b) => {
                send(*a, g.clone())?;
                send(*b, g.clone())?;
            }
            Op::AddRow(a, row) => {
                send(*a, g.clone())?;
                if self.requires_grad(*row) {
                    let mut acc = Tensor2::zeros(1, g.cols());
                    for r in g.iter_rows() {
                        for (o, &x) in acc.row_mut(0).iter_mut().zip(r) {
                            *o = *o + x;
                        }
                    }
                    send(*row, acc)?;
                }
            }
            Op::Sub(a, b) => {
                send(*a, g.clone())?;
                send(*b, g.scale(-T::one()))?;
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                if self.requires_grad(*a) {
                    send(*a, g.zip_map(bv, "mul'", |x, y| x * y)?)?;
                }
                if self.requires_grad(*b) {
                    send(*b, g.zip_map(av, "mul'", |x, y| x * y)?)?;
                }
            }
            Op::Div(a, b) => {
                let bv = self.value(*b);
                if self.requires_grad(*a) {
                    send(*a, g.zip_map(bv, "div'", |x, y| x / y)?)?;
                }
                if self.requires_grad(*b) {
                    // d(a/b)/db = -(a/b)/b
                    let t = out.zip_map(bv, "div'", |q, y| q / y)?;
                    send(*b, g.zip_map(&t, "div'", |x, y| -x * y)?)?;
                }
            }
            Op::Scale(a, s) => send(*a, g.scale(*s))?,
            Op::AddScalar(a, _) => send(*a, g.clone())?,
            Op::Relu(a) => {
                let av = self.value(*a);
                send(
                    *a,
                    g.zip_map(av, "relu'", |x, y| if y > T::zero() { x } else { T::zero() })?,
                )?;
            }
            Op::Softplus(a) => {
                let av = self.value(*a);
                send(*a, g.zip_map(av, "softplus'", |x, y| x * sigmoid(y))?)?;
            }
            Op::Exp(a) => send(*a, g.zip_map(out, "exp'", |x, y| x * y)?)?,
            Op::Ln(a) => {
                let av = self.value(*a);
                send(*a, g.zip_map(av, "ln'", |x, y| x / y)?)?;
            }
            Op::Square(a) => {
                let av = self.value(*a);
                let two = T::lit(2.0);
                send(*a, g.zip_map(av, "square'", |x, y| two * x * y)?)?;
            }
            Op::Recip(a) => {
                send(*a, g.zip_map(out, "recip'", |x, y| -x * y * y)?)?;
            }
            Op::SumAll(a) => {
                let (r, c) = self.value(*a).shape();
                send(*a, Tensor2::full(r, c, g.data()[0]))?;
            }
            Op::MeanAll(a) => {
                let (r, c) = self.value(*a).shape();
                let n = T::from_usize_lossy(r * c);
                send(*a, Tensor2::full(r, c, g.data()[0] / n))?;
            }
            Op::MeanRows(a) => {
                let (r, c) = self.value(*a).shape();
                let n = T::from_usize_lossy(r);
                let row: Vec<T> = g.row(0).iter().map(|&x| x / n).collect();
                send(*a, Tensor2::from_fn(r, c, |_, j| row[j]))?;
            }
            Op::RowSum(a) => {
                let (r, c) = self.value(*a).shape();
                send(*a, Tensor2::from_fn(r, c, |i, _| g[(i, 0)]))?;
            }
            Op::TileRows(a, k) => {
                let (r, c) = self.value(*a).shape();
                let mut acc = Tensor2::zeros(r, c);
                for t in 0..*k {
                    for i in 0..r {
                        for (o, &x) in acc.row_mut(i).iter_mut().zip(g.row(t * r + i)) {
                            *o = *o + x;
                        }
                    }
                }
                send(*a, acc)?;
            }
            Op::RepeatEachRow(a, k) => {
                let (r, c) = self.value(*a).shape();
                let mut acc = Tensor2::zeros(r, c);
                for t in 0..r {
                    for i in 0..*k {
                        for (o, &x) in acc.row_mut(t).iter_mut().zip(g.row(t * k + i)) {
                            *o = *o + x;
                        }
                    }
                }
                send(*a, acc)?;
            }
            Op::ConcatCols(parts) => {
                let mut off = 0;
                for &p in parts {
                    let (r, c) = self.value(p).shape();
                    if self.requires_grad(p) {
                        send(p, Tensor2::from_fn(r, c, |i, j| g[(i, off + j)]))?;
                    }
                    off += c;
                }
            }
            Op::ConcatRows(parts) => {
                let mut off = 0;
                for &p in parts {
                    let (r, c) = self.value(p).shape();
                    if self.requires_grad(p) {
                        send(p, Tensor2::from_fn(r, c, |i, j| g[(off + i, j)]))?;
                    }
                    off += r;
                }
            }
            Op::GatherRows(a, idx_list) => {
                let (r, c) = self.value(*a).shape();
                let mut acc = Tensor2::zeros(r, c);
                for (k, &i) in idx_list.iter().enumerate() {
                    for (o, &x) in acc.row_mut(i).iter_mut().zip(g.row(k)) {
                        *o = *o + x;
                    }
                }
                send(*a, acc)?;
            }
            Op::SoftmaxRows(a) => {
                let mut d = Tensor2::zeros(out.rows(), out.cols());
                for i in 0..out.rows() {
                    let (y, gy) = (out.row(i), g.row(i));
                    let dot: T = y.iter().zip(gy).map(|(&p, &q)| p * q).sum();
                    for (j, o) in d.row_mut(i).iter_mut().enumerate() {
                        *o = y[j] * (gy[j] - dot);
                    }
                }
                send(*a, d)?;
            }
            Op::CrossEntropy(p, labels, eps) => {
                let pv = self.value(*p);
                let n = T::from_usize_lossy(pv.rows());
                let mut d = Tensor2::zeros(pv.rows(), pv.cols());
                for (i, &l) in labels.iter().enumerate() {
                    let pi = pv[(i, l)];
                    if pi > *eps {
                        d[(i, l)] = -g.data()[0] / (n * pi);
                    }
                }
                send(*p, d)?;
            }
            Op::Attention(q, c) => {
                let (qv, cv) = (self.value(*q), self.value(*c));
                let (dq, dc) = attention_backward(qv, cv, g)?;
                if self.requires_grad(*q) {
                    send(*q, dq)?;
                }
                if self.requires_grad(*c) {
                    send(*c, dc)?;
                }
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn softplus<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Returns the aggregated rows plus the (n x L) attention weights and distances.
pub(crate) fn attention_forward<T: Scalar>(
    q: &Tensor2<T>,
    c: &Tensor2<T>,
) -> Result<(Tensor2<T>, Tensor2<T>, Tensor2<T>)> {
    if c.rows() == 0 {
        return Err(Error::Empty("attention centers"));
    }
    if q.cols() != c.cols() {
        return Err(Error::shape(
            "attention",
            format!("query dim {} vs center dim {}", q.cols(), c.cols()),
        ));
    }
    let (n, l, d) = (q.rows(), c.rows(), q.cols());
    let dist = Tensor2::from_fn(n, l, |i, k| {
        q.row(i)
            .iter()
            .zip(c.row(k))
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    });
    let weights = softmax_rows_plain(&dist.map(|x| -x))?;
    let mut out = Tensor2::zeros(n, d);
    for i in 0..n {
        for k in 0..l {
            let w = weights[(i, k)];
            for (o, &cv) in out.row_mut(i).iter_mut().zip(c.row(k)) {
                *o = *o + w * cv;
            }
        }
    }
    Ok((out, weights, dist))
}

fn attention_backward<T: Scalar>(
    q: &Tensor2<T>,
    c: &Tensor2<T>,
    g: &Tensor2<T>,
) -> Result<(Tensor2<T>, Tensor2<T>)> {
    let (_, w, dist) = attention_forward(q, c)?;
    let (n, l, d) = (q.rows(), c.rows(), q.cols());
    let mut dq = Tensor2::zeros(n, d);
    let mut dc = Tensor2::zeros(l, d);
    for i in 0..n {
        // g_il = G_i . c_l
        let gdot: Vec<T> = (0..l)
            .map(|k| g.row(i).iter().zip(c.row(k)).map(|(&a, &b)| a * b).sum())
            .collect();
        let mean: T = (0..l).map(|k| w[(i, k)] * gdot[k]).sum();
        for k in 0..l {
            let wk = w[(i, k)];
            // direct path through the weighted sum
            for (o, &gv) in dc.row_mut(k).iter_mut().zip(g.row(i)) {
                *o = *o + wk * gv;
            }
            let d_dist = -wk * (gdot[k] - mean);
            let dk = dist[(i, k)];
            if dk > T::zero() {
                for j in 0..d {
                    let u = (q[(i, j)] - c[(k, j)]) / dk;
                    dq[(i, j)] = dq[(i, j)] + d_dist * u;
                    dc[(k, j)] = dc[(k, j)] - d_dist * u;
                }
            }
        }
    }
    Ok((dq, dc))
}
