use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(T::zero()),
        }
    }

    #[inline]
    fn derivative<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

fn uniform_matrix<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bound: f64,
) -> Matrix<T> {
    let data = (0..rows * cols)
        .map(|_| T::lit(rng.random_range(-bound..bound)))
        .collect();
    Matrix::new(rows, cols, data).expect("shape matches")
}

/// Fully connected layer: `y = act(x Wᵀ + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    /// `[out, in]`
    pub weight: Matrix<T>,
    pub bias: Vec<T>,
    pub activation: Activation,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(weight: Matrix<T>, bias: Vec<T>, activation: Activation) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::ShapeMismatch(format!(
                "dense bias has {} entries for {} outputs",
                bias.len(),
                weight.rows()
            )));
        }
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    /// Xavier-uniform weights, zero bias.
    pub fn xavier<R: Rng + ?Sized>(
        rng: &mut R,
        inputs: usize,
        outputs: usize,
        activation: Activation,
    ) -> Self {
        let bound = (6.0 / (inputs + outputs) as f64).sqrt();
        Self {
            weight: uniform_matrix(rng, outputs, inputs, bound),
            bias: vec![T::zero(); outputs],
            activation,
        }
    }
}

/// Neural accumulator: `y = x Wᵀ` with `W = tanh(Ŵ) ⊙ σ(M̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NacCell<T> {
    /// `[out, in]`
    pub w_hat: Matrix<T>,
    /// `[out, in]`
    pub m_hat: Matrix<T>,
}

pub const ARITHMETIC_INIT_BOUND: f64 = 0.5;

impl<T: Scalar> NacCell<T> {
    pub fn new(w_hat: Matrix<T>, m_hat: Matrix<T>) -> Result<Self> {
        if w_hat.shape() != m_hat.shape() {
            return Err(Error::ShapeMismatch(format!(
                "NAC W_hat {:?} vs M_hat {:?}",
                w_hat.shape(),
                m_hat.shape()
            )));
        }
        Ok(Self { w_hat, m_hat })
    }

    pub fn init<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Self {
        Self {
            w_hat: uniform_matrix(rng, outputs, inputs, ARITHMETIC_INIT_BOUND),
            m_hat: uniform_matrix(rng, outputs, inputs, ARITHMETIC_INIT_BOUND),
        }
    }

    /// Returns `(W, tanh(Ŵ), σ(M̂))`.
    fn effective(&self) -> (Matrix<T>, Matrix<T>, Matrix<T>) {
        let tanh_w = self.w_hat.map(T::tanh);
        let sig_m = self.m_hat.map(T::sigmoid);
        let data = tanh_w
            .as_slice()
            .iter()
            .zip(sig_m.as_slice())
            .map(|(&t, &s)| t * s)
            .collect();
        let w = Matrix::new(self.w_hat.rows(), self.w_hat.cols(), data).unwrap();
        (w, tanh_w, sig_m)
    }

    pub fn effective_weight(&self) -> Matrix<T> {
        self.effective().0
    }

    /// Chain `∂L/∂W` back onto `Ŵ` and `M̂`, appending both to `out`.
    fn reparam_grads(d_w: &Matrix<T>, tanh_w: &Matrix<T>, sig_m: &Matrix<T>, out: &mut Vec<T>) {
        let one = T::one();
        let n = d_w.len();
        let (dw, t, s) = (d_w.as_slice(), tanh_w.as_slice(), sig_m.as_slice());
        out.extend((0..n).map(|i| dw[i] * (one - t[i] * t[i]) * s[i]));
        out.extend((0..n).map(|i| dw[i] * t[i] * s[i] * (one - s[i])));
    }
}

/// Neural arithmetic logic unit:
/// `y = g ⊙ a + (1 − g) ⊙ m`, `a = x Wᵀ`, `m = exp(log(|x| + ε) Wᵀ)`, `g = σ(x Gᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaluCell<T> {
    pub nac: NacCell<T>,
    /// Gate logits `[out, in]`.
    pub gate: Matrix<T>,
    pub log_eps: T,
}

pub const DEFAULT_LOG_EPS: f64 = 1e-10;

impl<T: Scalar> NaluCell<T> {
    pub fn new(nac: NacCell<T>, gate: Matrix<T>, log_eps: T) -> Result<Self> {
        if gate.shape() != nac.w_hat.shape() {
            return Err(Error::ShapeMismatch(format!(
                "NALU gate {:?} vs NAC {:?}",
                gate.shape(),
                nac.w_hat.shape()
            )));
        }
        if log_eps.is_nan() || log_eps <= T::zero() {
            return Err(Error::InvalidParameter("NALU log_eps must be positive".into()));
        }
        Ok(Self { nac, gate, log_eps })
    }

    pub fn init<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Self {
        let nac = NacCell::init(rng, inputs, outputs);
        let gate = uniform_matrix(rng, outputs, inputs, ARITHMETIC_INIT_BOUND);
        Self {
            nac,
            gate,
            log_eps: T::lit(DEFAULT_LOG_EPS),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer<T> {
    Dense(DenseLayer<T>),
    Nac(NacCell<T>),
    Nalu(NaluCell<T>),
}

#[derive(Debug, Clone)]
pub(crate) enum LayerCache<T> {
    Dense {
        x: Matrix<T>,
        z: Matrix<T>,
    },
    Nac {
        x: Matrix<T>,
        w: Matrix<T>,
        tanh_w: Matrix<T>,
        sig_m: Matrix<T>,
    },
    Nalu {
        x: Matrix<T>,
        log_x: Matrix<T>,
        w: Matrix<T>,
        tanh_w: Matrix<T>,
        sig_m: Matrix<T>,
        a: Matrix<T>,
        m: Matrix<T>,
        g: Matrix<T>,
    },
}

impl<T: Scalar> Layer<T> {
    pub fn inputs(&self) -> usize {
        match self {
            Layer::Dense(l) => l.weight.cols(),
            Layer::Nac(l) => l.w_hat.cols(),
            Layer::Nalu(l) => l.gate.cols(),
        }
    }

    pub fn outputs(&self) -> usize {
        match self {
            Layer::Dense(l) => l.weight.rows(),
            Layer::Nac(l) => l.w_hat.rows(),
            Layer::Nalu(l) => l.gate.rows(),
        }
    }

    pub fn param_count(&self) -> usize {
        let k = self.inputs() * self.outputs();
        match self {
            Layer::Dense(_) => k + self.outputs(),
            Layer::Nac(_) => 2 * k,
            Layer::Nalu(_) => 3 * k,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Layer::Dense(_) => "dense",
            Layer::Nac(_) => "nac",
            Layer::Nalu(_) => "nalu",
        }
    }

    /// Parameter slices in canonical order:
    /// dense `W, b`; NAC `Ŵ, M̂`; NALU `Ŵ, M̂, G`.
    pub fn param_slices(&self) -> Vec<&[T]> {
        match self {
            Layer::Dense(l) => vec![l.weight.as_slice(), &l.bias],
            Layer::Nac(l) => vec![l.w_hat.as_slice(), l.m_hat.as_slice()],
            Layer::Nalu(l) => vec![
                l.nac.w_hat.as_slice(),
                l.nac.m_hat.as_slice(),
                l.gate.as_slice(),
            ],
        }
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [T]> {
        match self {
            Layer::Dense(l) => vec![l.weight.as_mut_slice(), &mut l.bias],
            Layer::Nac(l) => vec![l.w_hat.as_mut_slice(), l.m_hat.as_mut_slice()],
            Layer::Nalu(l) => vec![
                l.nac.w_hat.as_mut_slice(),
                l.nac.m_hat.as_mut_slice(),
                l.gate.as_mut_slice(),
            ],
        }
    }

    pub(crate) fn forward(&self, x: &Matrix<T>) -> (Matrix<T>, LayerCache<T>) {
        match self {
            Layer::Dense(l) => {
                let mut z = x.matmul_t(&l.weight);
                for r in 0..z.rows() {
                    for (v, &b) in z.row_mut(r).iter_mut().zip(&l.bias) {
                        *v += b;
                    }
                }
                let act = l.activation;
                let y = z.map(|v| act.apply(v));
                (y, LayerCache::Dense { x: x.clone(), z })
            }
            Layer::Nac(l) => {
                let (w, tanh_w, sig_m) = l.effective();
                let y = x.matmul_t(&w);
                let cache = LayerCache::Nac {
                    x: x.clone(),
                    w,
                    tanh_w,
                    sig_m,
                };
                (y, cache)
            }
            Layer::Nalu(l) => {
                let (w, tanh_w, sig_m) = l.nac.effective();
                let eps = l.log_eps;
                let a = x.matmul_t(&w);
                let log_x = x.map(|v| (v.abs() + eps).ln());
                let m = log_x.matmul_t(&w).map(T::exp);
                let g = x.matmul_t(&l.gate).map(T::sigmoid);
                let one = T::one();
                let y_data = (0..a.len())
                    .map(|i| {
                        let gi = g.as_slice()[i];
                        gi * a.as_slice()[i] + (one - gi) * m.as_slice()[i]
                    })
                    .collect();
                let y = Matrix::new(a.rows(), a.cols(), y_data).unwrap();
                let cache = LayerCache::Nalu {
                    x: x.clone(),
                    log_x,
                    w,
                    tanh_w,
                    sig_m,
                    a,
                    m,
                    g,
                };
                (y, cache)
            }
        }
    }

    /// Returns `∂L/∂x` and appends parameter gradients in canonical order.
    pub(crate) fn backward(
        &self,
        cache: &LayerCache<T>,
        up: &Matrix<T>,
        param_grads: &mut Vec<T>,
    ) -> Matrix<T> {
        let one = T::one();
        match (self, cache) {
            (Layer::Dense(l), LayerCache::Dense { x, z }) => {
                let act = l.activation;
                let delta = Matrix::new(
                    up.rows(),
                    up.cols(),
                    up.as_slice()
                        .iter()
                        .zip(z.as_slice())
                        .map(|(&u, &zv)| u * act.derivative(zv))
                        .collect(),
                )
                .unwrap();
                let d_w = delta.t_matmul(x);
                param_grads.extend_from_slice(d_w.as_slice());
                let mut d_b = vec![T::zero(); delta.cols()];
                for r in 0..delta.rows() {
                    for (acc, &v) in d_b.iter_mut().zip(delta.row(r)) {
                        *acc += v;
                    }
                }
                param_grads.extend(d_b);
                delta.matmul(&l.weight)
            }
            (Layer::Nac(_), LayerCache::Nac { x, w, tanh_w, sig_m }) => {
                let d_w = up.t_matmul(x);
                NacCell::reparam_grads(&d_w, tanh_w, sig_m, param_grads);
                up.matmul(w)
            }
            (
                Layer::Nalu(l),
                LayerCache::Nalu {
                    x,
                    log_x,
                    w,
                    tanh_w,
                    sig_m,
                    a,
                    m,
                    g,
                },
            ) => {
                let n = up.len();
                let (u, gs, av, mv) = (up.as_slice(), g.as_slice(), a.as_slice(), m.as_slice());
                // Additive path, multiplicative path (through exp), and gate logits.
                let d_a: Vec<T> = (0..n).map(|i| u[i] * gs[i]).collect();
                let d_mz: Vec<T> = (0..n).map(|i| u[i] * (one - gs[i]) * mv[i]).collect();
                let d_gz: Vec<T> = (0..n)
                    .map(|i| u[i] * (av[i] - mv[i]) * gs[i] * (one - gs[i]))
                    .collect();
                let shape = (up.rows(), up.cols());
                let d_a = Matrix::new(shape.0, shape.1, d_a).unwrap();
                let d_mz = Matrix::new(shape.0, shape.1, d_mz).unwrap();
                let d_gz = Matrix::new(shape.0, shape.1, d_gz).unwrap();

                let mut d_w = d_a.t_matmul(x);
                let d_w_mul = d_mz.t_matmul(log_x);
                for (acc, &v) in d_w.as_mut_slice().iter_mut().zip(d_w_mul.as_slice()) {
                    *acc += v;
                }
                NacCell::reparam_grads(&d_w, tanh_w, sig_m, param_grads);
                param_grads.extend_from_slice(d_gz.t_matmul(x).as_slice());

                let mut d_x = d_a.matmul(w);
                let d_x_gate = d_gz.matmul(&l.gate);
                let d_log = d_mz.matmul(w);
                let eps = l.log_eps;
                for i in 0..d_x.len() {
                    let xv = x.as_slice()[i];
                    d_x.as_mut_slice()[i] +=
                        d_x_gate.as_slice()[i] + d_log.as_slice()[i] * xv.sign0() / (xv.abs() + eps);
                }
                d_x
            }
            _ => unreachable!("layer cache kind always matches its layer"),
        }
    }
}

impl<T> From<DenseLayer<T>> for Layer<T> {
    fn from(l: DenseLayer<T>) -> Self {
        Layer::Dense(l)
    }
}

impl<T> From<NacCell<T>> for Layer<T> {
    fn from(l: NacCell<T>) -> Self {
        Layer::Nac(l)
    }
}

impl<T> From<NaluCell<T>> for Layer<T> {
    fn from(l: NaluCell<T>) -> Self {
        Layer::Nalu(l)
    }
}
