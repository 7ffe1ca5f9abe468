use super::mlp::{Activation, Mlp, MlpSpec};
use super::tensor::{matmul_acc, matmul_into};
use super::{NdError, NdResult, Tensor};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    /// `a[m,k] * b[k,n]`
    MatMul { a: Node, b: Node },
    Transpose { a: Node },
    /// Row-broadcast add of a `1 x n` bias to an `m x n` matrix.
    AddRow { a: Node, bias: Node },
    Add { a: Node, b: Node },
    Sub { a: Node, b: Node },
    Mul { a: Node, b: Node },
    /// `mul * a + add`, elementwise; only `mul` matters to the gradient.
    Affine { a: Node, mul: f64 },
    Ln { a: Node },
    Act { a: Node, kind: Activation },
    /// First derivative of an activation, as a value. Its own derivative is
    /// the activation's second derivative: exactly zero for ReLU (a.e.
    /// convention) and identity, analytic for tanh. This is what makes the
    /// gradient penalty differentiable by a single reverse pass.
    ActPrime { a: Node, kind: Activation },
    Sum { a: Node },
    Mean { a: Node },
    /// `m x m` matrix of squared euclidean distances between the rows of `a`.
    PairSqDist { a: Node },
}

struct Slot {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    op: Op,
}

/// Append-only computation record. Node ids are topologically ordered, so a
/// single reverse sweep propagates gradients. A tape lives for one minibatch.
pub struct Tape {
    slots: Vec<Slot>,
    trainable: Vec<Node>,
}

/// One network's parameter leaves on a tape. Binding the same [`Mlp`] once
/// and reusing the handle makes gradients accumulate across every place the
/// network appears in the graph.
#[derive(Debug, Clone)]
pub struct BoundMlp {
    pub spec: MlpSpec,
    weights: Vec<Node>,
    biases: Vec<Node>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            slots: Vec::new(),
            trainable: Vec::new(),
        }
    }

    fn push(&mut self, rows: usize, cols: usize, data: Vec<f64>, op: Op) -> Node {
        debug_assert_eq!(data.len(), rows * cols);
        self.slots.push(Slot {
            rows,
            cols,
            data,
            op,
        });
        Node(self.slots.len() - 1)
    }

    pub fn constant(&mut self, t: &Tensor) -> Node {
        self.push(t.rows(), t.cols(), t.data().to_vec(), Op::Leaf)
    }

    pub fn constant_owned(&mut self, rows: usize, cols: usize, data: Vec<f64>) -> Node {
        self.push(rows, cols, data, Op::Leaf)
    }

    /// Trainable leaf; registration order defines the layout of
    /// [`Gradients::flat_params`].
    pub fn param(&mut self, rows: usize, cols: usize, data: Vec<f64>) -> Node {
        let n = self.push(rows, cols, data, Op::Leaf);
        self.trainable.push(n);
        n
    }

    pub fn shape(&self, n: Node) -> (usize, usize) {
        let s = &self.slots[n.0];
        (s.rows, s.cols)
    }

    pub fn values(&self, n: Node) -> &[f64] {
        &self.slots[n.0].data
    }

    pub fn to_tensor(&self, n: Node) -> Tensor {
        let s = &self.slots[n.0];
        Tensor::new(s.rows, s.cols, s.data.clone()).expect("slot shape is consistent")
    }

    pub fn scalar(&self, n: Node) -> NdResult<f64> {
        let s = &self.slots[n.0];
        if s.rows * s.cols != 1 {
            return Err(NdError::Contract(format!(
                "expected scalar node, found {}x{}",
                s.rows, s.cols
            )));
        }
        Ok(s.data[0])
    }

    fn binary_shape(&self, a: Node, b: Node, context: &'static str) -> NdResult<(usize, usize)> {
        let (ar, ac) = self.shape(a);
        let (br, bc) = self.shape(b);
        if ar != br || ac != bc {
            return Err(NdError::ShapeMismatch {
                context,
                got_rows: br,
                got_cols: bc,
                want_rows: ar,
                want_cols: ac,
            });
        }
        Ok((ar, ac))
    }

    pub fn matmul(&mut self, a: Node, b: Node) -> NdResult<Node> {
        let (m, k) = self.shape(a);
        let (k2, n) = self.shape(b);
        if k != k2 {
            return Err(NdError::ShapeMismatch {
                context: "tape matmul inner dimension",
                got_rows: k2,
                got_cols: n,
                want_rows: k,
                want_cols: n,
            });
        }
        let mut out = vec![0.0; m * n];
        matmul_into(&self.slots[a.0].data, &self.slots[b.0].data, m, k, n, &mut out);
        Ok(self.push(m, n, out, Op::MatMul { a, b }))
    }

    pub fn transpose(&mut self, a: Node) -> Node {
        let (r, c) = self.shape(a);
        let src = &self.slots[a.0].data;
        let mut out = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = src[i * c + j];
            }
        }
        self.push(c, r, out, Op::Transpose { a })
    }

    pub fn add_row(&mut self, a: Node, bias: Node) -> NdResult<Node> {
        let (m, n) = self.shape(a);
        let (br, bc) = self.shape(bias);
        if br != 1 || bc != n {
            return Err(NdError::ShapeMismatch {
                context: "row-broadcast bias",
                got_rows: br,
                got_cols: bc,
                want_rows: 1,
                want_cols: n,
            });
        }
        let mut out = self.slots[a.0].data.clone();
        let b = &self.slots[bias.0].data;
        for row in out.chunks_mut(n) {
            for (o, &bv) in row.iter_mut().zip(b) {
                *o += bv;
            }
        }
        Ok(self.push(m, n, out, Op::AddRow { a, bias }))
    }

    pub fn add(&mut self, a: Node, b: Node) -> NdResult<Node> {
        let (r, c) = self.binary_shape(a, b, "elementwise add")?;
        let out = zip_map(&self.slots[a.0].data, &self.slots[b.0].data, |x, y| x + y);
        Ok(self.push(r, c, out, Op::Add { a, b }))
    }

    pub fn sub(&mut self, a: Node, b: Node) -> NdResult<Node> {
        let (r, c) = self.binary_shape(a, b, "elementwise sub")?;
        let out = zip_map(&self.slots[a.0].data, &self.slots[b.0].data, |x, y| x - y);
        Ok(self.push(r, c, out, Op::Sub { a, b }))
    }

    pub fn mul(&mut self, a: Node, b: Node) -> NdResult<Node> {
        let (r, c) = self.binary_shape(a, b, "elementwise mul")?;
        let out = zip_map(&self.slots[a.0].data, &self.slots[b.0].data, |x, y| x * y);
        Ok(self.push(r, c, out, Op::Mul { a, b }))
    }

    pub fn affine(&mut self, a: Node, mul: f64, add: f64) -> Node {
        let (r, c) = self.shape(a);
        let out: Vec<f64> = self.slots[a.0].data.iter().map(|&x| mul * x + add).collect();
        self.push(r, c, out, Op::Affine { a, mul })
    }

    pub fn ln(&mut self, a: Node) -> Node {
        let (r, c) = self.shape(a);
        let out: Vec<f64> = self.slots[a.0].data.iter().map(|&x| x.ln()).collect();
        self.push(r, c, out, Op::Ln { a })
    }

    pub fn act(&mut self, a: Node, kind: Activation) -> Node {
        if kind == Activation::Identity {
            return a;
        }
        let (r, c) = self.shape(a);
        let out: Vec<f64> = self.slots[a.0].data.iter().map(|&x| kind.apply(x)).collect();
        self.push(r, c, out, Op::Act { a, kind })
    }

    pub fn act_prime(&mut self, a: Node, kind: Activation) -> Node {
        let (r, c) = self.shape(a);
        let out: Vec<f64> = self.slots[a.0].data.iter().map(|&x| kind.prime(x)).collect();
        self.push(r, c, out, Op::ActPrime { a, kind })
    }

    pub fn sum(&mut self, a: Node) -> Node {
        let total: f64 = self.slots[a.0].data.iter().sum();
        self.push(1, 1, vec![total], Op::Sum { a })
    }

    pub fn mean(&mut self, a: Node) -> Node {
        let len = self.slots[a.0].data.len();
        let total: f64 = self.slots[a.0].data.iter().sum();
        self.push(1, 1, vec![total / len as f64], Op::Mean { a })
    }

    pub fn pair_sqdist(&mut self, a: Node) -> Node {
        let (m, d) = self.shape(a);
        let src = &self.slots[a.0].data;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let (ri, rj) = (&src[i * d..(i + 1) * d], &src[j * d..(j + 1) * d]);
                let sq: f64 = ri.iter().zip(rj).map(|(x, y)| (x - y) * (x - y)).sum();
                out[i * m + j] = sq;
                out[j * m + i] = sq;
            }
        }
        self.push(m, m, out, Op::PairSqDist { a })
    }

    /// Registers one leaf pair `(W, b)` per layer. `W` is `in x out`
    /// row-major, `b` is `1 x out`; the network's flat parameter vector is
    /// the concatenation `W1, b1, W2, b2, ...`.
    pub fn bind(&mut self, mlp: &Mlp) -> BoundMlp {
        let spec = mlp.spec().clone();
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut offset = 0usize;
        for l in 0..spec.layer_count() {
            let (fan_in, fan_out) = spec.layer_dims(l);
            let w = mlp.params()[offset..offset + fan_in * fan_out].to_vec();
            offset += fan_in * fan_out;
            let b = mlp.params()[offset..offset + fan_out].to_vec();
            offset += fan_out;
            weights.push(self.param(fan_in, fan_out, w));
            biases.push(self.param(1, fan_out, b));
        }
        BoundMlp {
            spec,
            weights,
            biases,
        }
    }

    /// Forward pass `x[m, in] -> [m, out]`, recording every layer.
    pub fn forward(&mut self, net: &BoundMlp, x: Node) -> NdResult<Node> {
        let (out, _) = self.forward_layers(net, x)?;
        let slot = &self.slots[out.0];
        if slot.data.iter().any(|v| !v.is_finite()) {
            return Err(NdError::NonFinite {
                context: "mlp forward output",
            });
        }
        Ok(out)
    }

    fn forward_layers(&mut self, net: &BoundMlp, x: Node) -> NdResult<(Node, Vec<Node>)> {
        let (_, in_w) = self.shape(x);
        if in_w != net.spec.input_width() {
            return Err(NdError::ShapeMismatch {
                context: "mlp input width",
                got_rows: self.shape(x).0,
                got_cols: in_w,
                want_rows: self.shape(x).0,
                want_cols: net.spec.input_width(),
            });
        }
        let mut a = x;
        let mut pre_acts = Vec::with_capacity(net.spec.layer_count());
        for l in 0..net.spec.layer_count() {
            let zw = self.matmul(a, net.weights[l])?;
            let z = self.add_row(zw, net.biases[l])?;
            pre_acts.push(z);
            a = self.act(z, net.spec.activation(l));
        }
        Ok((a, pre_acts))
    }

    /// Records `grad_x psi(x)` for a scalar-output network as tape
    /// operations, so downstream values of it stay differentiable in the
    /// parameters. Row `i` of the result is the input gradient at `x_i`.
    pub fn input_gradient(&mut self, net: &BoundMlp, x: Node) -> NdResult<Node> {
        if net.spec.output_width() != 1 {
            return Err(NdError::Contract(
                "input_gradient requires a scalar-output network".into(),
            ));
        }
        let (m, _) = self.shape(x);
        let (_, pre_acts) = self.forward_layers(net, x)?;
        // Reverse sweep written as forward ops: u_l = (u_{l+1} . act'(z_l)) W_l^T
        let mut u = self.constant_owned(m, 1, vec![1.0; m]);
        for l in (0..net.spec.layer_count()).rev() {
            let mask = self.act_prime(pre_acts[l], net.spec.activation(l));
            let v = self.mul(u, mask)?;
            let wt = self.transpose(net.weights[l]);
            u = self.matmul(v, wt)?;
        }
        Ok(u)
    }

    /// Reverse pass from a scalar root.
    pub fn backward(&self, root: Node) -> NdResult<Gradients> {
        {
            let s = &self.slots[root.0];
            if s.rows * s.cols != 1 {
                return Err(NdError::Contract(format!(
                    "backward root must be scalar, found {}x{}",
                    s.rows, s.cols
                )));
            }
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.slots.len()];
        grads[root.0] = Some(vec![1.0]);

        for id in (0..=root.0).rev() {
            let Some(g) = grads[id].take() else {
                continue;
            };
            let slot = &self.slots[id];
            match slot.op {
                Op::Leaf => {
                    grads[id] = Some(g);
                    continue;
                }
                Op::MatMul { a, b } => {
                    let (m, k) = self.shape(a);
                    let (_, n) = self.shape(b);
                    // dA += g * B^T
                    let bt = transposed(&self.slots[b.0].data, k, n);
                    matmul_acc(&g, &bt, m, n, k, self.grad_buf(&mut grads, a));
                    // dB += A^T * g
                    let at = transposed(&self.slots[a.0].data, m, k);
                    matmul_acc(&at, &g, k, m, n, self.grad_buf(&mut grads, b));
                }
                Op::Transpose { a } => {
                    let (r, c) = self.shape(a);
                    let da = self.grad_buf(&mut grads, a);
                    for i in 0..r {
                        for j in 0..c {
                            da[i * c + j] += g[j * r + i];
                        }
                    }
                }
                Op::AddRow { a, bias } => {
                    let (_, n) = self.shape(a);
                    accumulate(self.grad_buf(&mut grads, a), &g);
                    let db = self.grad_buf(&mut grads, bias);
                    for row in g.chunks(n) {
                        for (d, &gv) in db.iter_mut().zip(row) {
                            *d += gv;
                        }
                    }
                }
                Op::Add { a, b } => {
                    accumulate(self.grad_buf(&mut grads, a), &g);
                    accumulate(self.grad_buf(&mut grads, b), &g);
                }
                Op::Sub { a, b } => {
                    accumulate(self.grad_buf(&mut grads, a), &g);
                    let db = self.grad_buf(&mut grads, b);
                    for (d, &gv) in db.iter_mut().zip(&g) {
                        *d -= gv;
                    }
                }
                Op::Mul { a, b } => {
                    {
                        let bv = &self.slots[b.0].data;
                        let da = self.grad_buf(&mut grads, a);
                        for ((d, &gv), &x) in da.iter_mut().zip(&g).zip(bv) {
                            *d += gv * x;
                        }
                    }
                    let av = &self.slots[a.0].data;
                    let db = self.grad_buf(&mut grads, b);
                    for ((d, &gv), &x) in db.iter_mut().zip(&g).zip(av) {
                        *d += gv * x;
                    }
                }
                Op::Affine { a, mul } => {
                    let da = self.grad_buf(&mut grads, a);
                    for (d, &gv) in da.iter_mut().zip(&g) {
                        *d += mul * gv;
                    }
                }
                Op::Ln { a } => {
                    let av = &self.slots[a.0].data;
                    let da = self.grad_buf(&mut grads, a);
                    for ((d, &gv), &x) in da.iter_mut().zip(&g).zip(av) {
                        *d += gv / x;
                    }
                }
                Op::Act { a, kind } => {
                    let av = &self.slots[a.0].data;
                    let da = self.grad_buf(&mut grads, a);
                    for ((d, &gv), &x) in da.iter_mut().zip(&g).zip(av) {
                        *d += gv * kind.prime(x);
                    }
                }
                Op::ActPrime { a, kind } => {
                    if kind == Activation::Tanh {
                        let av = &self.slots[a.0].data;
                        let da = self.grad_buf(&mut grads, a);
                        for ((d, &gv), &x) in da.iter_mut().zip(&g).zip(av) {
                            *d += gv * kind.second(x);
                        }
                    }
                    // ReLU and identity: second derivative is zero, nothing flows.
                }
                Op::Sum { a } => {
                    let da = self.grad_buf(&mut grads, a);
                    for d in da.iter_mut() {
                        *d += g[0];
                    }
                }
                Op::Mean { a } => {
                    let len = self.slots[a.0].data.len() as f64;
                    let da = self.grad_buf(&mut grads, a);
                    for d in da.iter_mut() {
                        *d += g[0] / len;
                    }
                }
                Op::PairSqDist { a } => {
                    let (m, d_w) = self.shape(a);
                    let av = &self.slots[a.0].data;
                    let da = self.grad_buf(&mut grads, a);
                    for i in 0..m {
                        for j in 0..m {
                            if i == j {
                                continue;
                            }
                            let gv = g[i * m + j];
                            if gv == 0.0 {
                                continue;
                            }
                            for t in 0..d_w {
                                let diff = av[i * d_w + t] - av[j * d_w + t];
                                da[i * d_w + t] += 2.0 * gv * diff;
                                da[j * d_w + t] -= 2.0 * gv * diff;
                            }
                        }
                    }
                }
            }
            grads[id] = None;
        }

        Ok(Gradients { grads })
    }

    #[allow(clippy::mut_from_ref)]
    fn grad_buf<'g>(&self, grads: &'g mut [Option<Vec<f64>>], n: Node) -> &'g mut Vec<f64> {
        let slot = &self.slots[n.0];
        grads[n.0].get_or_insert_with(|| vec![0.0; slot.rows * slot.cols])
    }

    pub fn trainable_nodes(&self) -> &[Node] {
        &self.trainable
    }
}

fn zip_map(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn transposed(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

fn accumulate(dst: &mut [f64], src: &[f64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Per-node gradient buffers produced by [`Tape::backward`]. Nodes off the
/// path from the root carry a zero gradient.
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn node(&self, n: Node, tape: &Tape) -> Vec<f64> {
        let (r, c) = tape.shape(n);
        match &self.grads[n.0] {
            Some(g) => g.clone(),
            None => vec![0.0; r * c],
        }
    }

    /// Gradient of every trainable leaf, concatenated in registration order.
    pub fn flat_params(&self, tape: &Tape) -> Vec<f64> {
        let mut out = Vec::new();
        for &n in tape.trainable_nodes() {
            out.extend(self.node(n, tape));
        }
        out
    }

    /// Gradient with respect to one bound network's flat parameter vector.
    pub fn of_net(&self, net: &BoundMlp, tape: &Tape) -> Vec<f64> {
        let mut out = Vec::with_capacity(net.spec.param_count());
        for l in 0..net.spec.layer_count() {
            out.extend(self.node(net.weights[l], tape));
            out.extend(self.node(net.biases[l], tape));
        }
        out
    }
}
