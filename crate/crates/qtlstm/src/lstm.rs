//! Classical LSTM regressor driven entirely by a flat parameter vector.
//!
//! A single LSTM layer (sigmoid gates, tanh cell nonlinearities, zero initial
//! hidden and cell state) reads a T×F window and a dense head maps the final
//! hidden state to one scalar prediction. Nothing here owns trainable state:
//! every weight comes in through the flat vector θ, so the same code serves
//! both the directly-trained baseline and the generated-weight model.
//!
//! # Flat layout
//!
//! θ is sliced in this fixed order, gate by gate:
//!
//! ```text
//! [ input gate   : W_x (H×F row-major) | W_h (H×H row-major) | b (H) ]
//! [ forget gate  : W_x | W_h | b ]
//! [ cell cand.   : W_x | W_h | b ]
//! [ output gate  : W_x | W_h | b ]
//! [ head         : W (out×H row-major) | b (out) ]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the LSTM plus dense head. `output_dim` is 1 for the scalar
/// forecasting target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LstmSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
}

impl LstmSpec {
    pub fn new(input_dim: usize, hidden_dim: usize) -> Self {
        LstmSpec {
            input_dim,
            hidden_dim,
            output_dim: 1,
        }
    }

    /// Total scalar weight count M = 4·(F·H + H·H + H) + (H·out + out).
    pub fn param_count(&self) -> usize {
        let (f, h, out) = (self.input_dim, self.hidden_dim, self.output_dim);
        4 * (f * h + h * h + h) + (h * out + out)
    }

    /// Qubits needed to index at least `param_count` basis states,
    /// ⌈log₂ M⌉ (minimum 1).
    pub fn required_qubits(&self) -> usize {
        required_qubits(self.param_count())
    }
}

/// ⌈log₂ m⌉ clamped to at least one qubit.
pub fn required_qubits(m: usize) -> usize {
    assert!(m >= 1);
    (usize::BITS - (m - 1).leading_zeros()).max(1) as usize
}

/// Flat weight vector matching an [`LstmSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlatParams {
    theta: Vec<f64>,
}

impl FlatParams {
    pub fn new(theta: Vec<f64>, spec: &LstmSpec) -> Result<Self> {
        if theta.len() != spec.param_count() {
            return Err(Error::Shape {
                what: "flat LSTM parameters",
                expected: spec.param_count(),
                actual: theta.len(),
            });
        }
        Ok(FlatParams { theta })
    }

    pub fn zeros(spec: &LstmSpec) -> Self {
        FlatParams {
            theta: vec![0.0; spec.param_count()],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.theta
    }
}

/// Index ranges of every weight block inside θ.
#[derive(Debug, Clone, Copy)]
struct Layout {
    f: usize,
    h: usize,
    out: usize,
}

/// Gate order inside θ.
const GATE_INPUT: usize = 0;
const GATE_FORGET: usize = 1;
const GATE_CANDIDATE: usize = 2;
const GATE_OUTPUT: usize = 3;

impl Layout {
    fn of(spec: &LstmSpec) -> Self {
        Layout {
            f: spec.input_dim,
            h: spec.hidden_dim,
            out: spec.output_dim,
        }
    }

    fn gate_size(&self) -> usize {
        self.f * self.h + self.h * self.h + self.h
    }

    fn wx(&self, gate: usize) -> std::ops::Range<usize> {
        let base = gate * self.gate_size();
        base..base + self.f * self.h
    }

    fn wh(&self, gate: usize) -> std::ops::Range<usize> {
        let base = gate * self.gate_size() + self.f * self.h;
        base..base + self.h * self.h
    }

    fn bias(&self, gate: usize) -> std::ops::Range<usize> {
        let base = gate * self.gate_size() + self.f * self.h + self.h * self.h;
        base..base + self.h
    }

    fn head_w(&self) -> std::ops::Range<usize> {
        let base = 4 * self.gate_size();
        base..base + self.h * self.out
    }

    fn head_b(&self) -> std::ops::Range<usize> {
        let base = 4 * self.gate_size() + self.h * self.out;
        base..base + self.out
    }
}

/// Borrowed view of one gate's weight blocks.
#[derive(Debug, Clone, Copy)]
pub struct GateView<'a> {
    /// H×F input weights, row-major.
    pub w_x: &'a [f64],
    /// H×H recurrent weights, row-major.
    pub w_h: &'a [f64],
    /// H biases.
    pub b: &'a [f64],
}

/// Structured view of θ; slicing is a bijection, so concatenating the views
/// in layout order reproduces θ exactly.
#[derive(Debug, Clone, Copy)]
pub struct LstmWeights<'a> {
    pub input_gate: GateView<'a>,
    pub forget_gate: GateView<'a>,
    pub cell_candidate: GateView<'a>,
    pub output_gate: GateView<'a>,
    /// out×H head weights, row-major.
    pub head_w: &'a [f64],
    pub head_b: &'a [f64],
}

/// Slices θ into the documented weight blocks.
pub fn unflatten<'a>(theta: &'a FlatParams, spec: &LstmSpec) -> Result<LstmWeights<'a>> {
    if theta.as_slice().len() != spec.param_count() {
        return Err(Error::Shape {
            what: "flat LSTM parameters",
            expected: spec.param_count(),
            actual: theta.as_slice().len(),
        });
    }
    let lay = Layout::of(spec);
    let t = theta.as_slice();
    let gate = |g: usize| GateView {
        w_x: &t[lay.wx(g)],
        w_h: &t[lay.wh(g)],
        b: &t[lay.bias(g)],
    };
    Ok(LstmWeights {
        input_gate: gate(GATE_INPUT),
        forget_gate: gate(GATE_FORGET),
        cell_candidate: gate(GATE_CANDIDATE),
        output_gate: gate(GATE_OUTPUT),
        head_w: &t[lay.head_w()],
        head_b: &t[lay.head_b()],
    })
}

/// A batch of feature windows with one scalar target each, stored flat in
/// B×T×F row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBatch {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    steps: usize,
    features: usize,
}

impl SequenceBatch {
    pub fn new(inputs: Vec<f64>, targets: Vec<f64>, steps: usize, features: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Argument("empty batch".into()));
        }
        if inputs.len() != targets.len() * steps * features {
            return Err(Error::Shape {
                what: "sequence batch inputs",
                expected: targets.len() * steps * features,
                actual: inputs.len(),
            });
        }
        if inputs.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value in sequence batch".into()));
        }
        Ok(SequenceBatch {
            inputs,
            targets,
            steps,
            features,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Feature row of sample `b` at time step `t`.
    pub fn step_input(&self, b: usize, t: usize) -> &[f64] {
        let start = (b * self.steps + t) * self.features;
        &self.inputs[start..start + self.features]
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn check_shapes(theta: &FlatParams, spec: &LstmSpec, batch: &SequenceBatch) -> Result<()> {
    if spec.output_dim != 1 {
        return Err(Error::Argument(
            "forecasting head supports a single output".into(),
        ));
    }
    if batch.features() != spec.input_dim {
        return Err(Error::Shape {
            what: "batch feature width",
            expected: spec.input_dim,
            actual: batch.features(),
        });
    }
    if theta.as_slice().len() != spec.param_count() {
        return Err(Error::Shape {
            what: "flat LSTM parameters",
            expected: spec.param_count(),
            actual: theta.as_slice().len(),
        });
    }
    Ok(())
}

/// Scratch space for one sample's recurrence, reused across the batch.
struct Trace {
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
}

impl Trace {
    fn new(steps: usize, hidden: usize) -> Self {
        let zeros = || vec![0.0; steps * hidden];
        Trace {
            i: zeros(),
            f: zeros(),
            g: zeros(),
            o: zeros(),
            c: zeros(),
            h: zeros(),
        }
    }
}

/// Runs the recurrence for one sample, filling `trace`, and returns the head
/// output.
fn run_sample(weights: &LstmWeights, batch: &SequenceBatch, b: usize, trace: &mut Trace) -> f64 {
    let h_dim = weights.input_gate.b.len();
    let f_dim = batch.features();
    let steps = batch.steps();

    let gate_pre = |gate: &GateView, x: &[f64], h_prev: &[f64], r: usize| -> f64 {
        let mut z = gate.b[r];
        let wx_row = &gate.w_x[r * f_dim..(r + 1) * f_dim];
        for (w, v) in wx_row.iter().zip(x) {
            z += w * v;
        }
        let wh_row = &gate.w_h[r * h_dim..(r + 1) * h_dim];
        for (w, v) in wh_row.iter().zip(h_prev) {
            z += w * v;
        }
        z
    };

    let mut h_prev = vec![0.0; h_dim];
    let mut c_prev = vec![0.0; h_dim];
    for t in 0..steps {
        let x = batch.step_input(b, t);
        let row = t * h_dim;
        for (r, &cp) in c_prev.iter().enumerate() {
            let i = sigmoid(gate_pre(&weights.input_gate, x, &h_prev, r));
            let f = sigmoid(gate_pre(&weights.forget_gate, x, &h_prev, r));
            let g = gate_pre(&weights.cell_candidate, x, &h_prev, r).tanh();
            let o = sigmoid(gate_pre(&weights.output_gate, x, &h_prev, r));
            let c = f * cp + i * g;
            trace.i[row + r] = i;
            trace.f[row + r] = f;
            trace.g[row + r] = g;
            trace.o[row + r] = o;
            trace.c[row + r] = c;
            trace.h[row + r] = o * c.tanh();
        }
        h_prev.copy_from_slice(&trace.h[row..row + h_dim]);
        c_prev.copy_from_slice(&trace.c[row..row + h_dim]);
    }

    let mut y = weights.head_b[0];
    for (w, v) in weights.head_w.iter().zip(&h_prev) {
        y += w * v;
    }
    y
}

/// Evaluates the LSTM on every sample of the batch.
pub fn forward(theta: &FlatParams, spec: &LstmSpec, batch: &SequenceBatch) -> Result<Vec<f64>> {
    check_shapes(theta, spec, batch)?;
    let weights = unflatten(theta, spec)?;
    let mut trace = Trace::new(batch.steps(), spec.hidden_dim);
    Ok((0..batch.len())
        .map(|b| run_sample(&weights, batch, b, &mut trace))
        .collect())
}

/// Mean squared error (1/N)·Σ(y − ŷ)².
pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::Argument("mse of an empty batch".into()));
    }
    if preds.len() != targets.len() {
        return Err(Error::Shape {
            what: "mse operands",
            expected: targets.len(),
            actual: preds.len(),
        });
    }
    let n = preds.len() as f64;
    Ok(preds
        .iter()
        .zip(targets)
        .map(|(p, y)| (y - p) * (y - p))
        .sum::<f64>()
        / n)
}

/// MSE loss over the batch together with its exact gradient with respect to
/// every entry of θ, via backpropagation through time.
pub fn backward(
    theta: &FlatParams,
    spec: &LstmSpec,
    batch: &SequenceBatch,
) -> Result<(f64, Vec<f64>)> {
    check_shapes(theta, spec, batch)?;
    let weights = unflatten(theta, spec)?;
    let lay = Layout::of(spec);
    let h_dim = spec.hidden_dim;
    let f_dim = spec.input_dim;
    let steps = batch.steps();
    let n = batch.len() as f64;

    let mut d_theta = vec![0.0; spec.param_count()];
    let mut loss = 0.0;
    let mut trace = Trace::new(steps, h_dim);

    // Per-step cotangent scratch.
    let mut dh = vec![0.0; h_dim];
    let mut dc = vec![0.0; h_dim];
    let mut dh_next = vec![0.0; h_dim];
    let mut da = vec![0.0; 4 * h_dim]; // pre-activation gradients, gate-major

    for b in 0..batch.len() {
        let pred = run_sample(&weights, batch, b, &mut trace);
        let residual = pred - batch.targets()[b];
        loss += residual * residual / n;
        let dy = 2.0 * residual / n;

        // Head.
        let last = (steps - 1) * h_dim;
        for r in 0..h_dim {
            d_theta[lay.head_w().start + r] += dy * trace.h[last + r];
            dh[r] = weights.head_w[r] * dy;
        }
        d_theta[lay.head_b().start] += dy;
        dc.iter_mut().for_each(|v| *v = 0.0);

        for t in (0..steps).rev() {
            let row = t * h_dim;
            let x = batch.step_input(b, t);
            for r in 0..h_dim {
                let (i, f, g, o) = (
                    trace.i[row + r],
                    trace.f[row + r],
                    trace.g[row + r],
                    trace.o[row + r],
                );
                let tc = trace.c[row + r].tanh();
                let c_prev = if t > 0 { trace.c[row - h_dim + r] } else { 0.0 };
                let d_o = dh[r] * tc;
                let d_c = dc[r] + dh[r] * o * (1.0 - tc * tc);
                let d_i = d_c * g;
                let d_g = d_c * i;
                let d_f = d_c * c_prev;
                da[GATE_INPUT * h_dim + r] = d_i * i * (1.0 - i);
                da[GATE_FORGET * h_dim + r] = d_f * f * (1.0 - f);
                da[GATE_CANDIDATE * h_dim + r] = d_g * (1.0 - g * g);
                da[GATE_OUTPUT * h_dim + r] = d_o * o * (1.0 - o);
                dc[r] = d_c * f;
            }

            let h_prev = if t > 0 {
                &trace.h[row - h_dim..row]
            } else {
                &[][..]
            };
            dh_next.iter_mut().for_each(|v| *v = 0.0);
            for gate in 0..4 {
                let wx_base = lay.wx(gate).start;
                let wh_base = lay.wh(gate).start;
                let b_base = lay.bias(gate).start;
                let wh = &theta.as_slice()[lay.wh(gate)];
                for r in 0..h_dim {
                    let d = da[gate * h_dim + r];
                    if d == 0.0 {
                        continue;
                    }
                    d_theta[b_base + r] += d;
                    let wx_row = wx_base + r * f_dim;
                    for (c, xv) in x.iter().enumerate() {
                        d_theta[wx_row + c] += d * xv;
                    }
                    if t > 0 {
                        let wh_row = wh_base + r * h_dim;
                        for (c, hv) in h_prev.iter().enumerate() {
                            d_theta[wh_row + c] += d * hv;
                        }
                    }
                    for c in 0..h_dim {
                        dh_next[c] += wh[r * h_dim + c] * d;
                    }
                }
            }
            dh.copy_from_slice(&dh_next);
        }
    }

    Ok((loss, d_theta))
}
