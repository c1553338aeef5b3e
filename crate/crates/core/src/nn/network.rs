use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::layer::{Layer, LayerCache};

/// Gradients produced by [`Network::backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    /// Parameter gradients in the order of [`Network::params`].
    pub params: Vec<T>,
    /// `∂L/∂x`, shaped like the forward input.
    pub input: Matrix<T>,
}

/// Ordered stack of layers with a flat parameter view.
///
/// The parameter view concatenates each layer's parameters (in layer order)
/// using the per-layer canonical order of [`Layer::param_slices`].
#[derive(Debug, Clone)]
pub struct Network<T> {
    layers: Vec<Layer<T>>,
    cache: Option<ForwardCache<T>>,
}

#[derive(Debug, Clone)]
struct ForwardCache<T> {
    layers: Vec<LayerCache<T>>,
    output_shape: (usize, usize),
}

impl<T: Scalar> PartialEq for Network<T> {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

impl<T: Scalar> Network<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::ShapeMismatch("network needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {i} emits {} values but layer {} expects {}",
                    pair[0].outputs(),
                    i + 1,
                    pair[1].inputs()
                )));
            }
        }
        for layer in &layers {
            if layer.param_slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
                return Err(Error::NonFinite("layer parameters"));
            }
        }
        Ok(Self {
            layers,
            cache: None,
        })
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn outputs(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            for s in layer.param_slices() {
                out.extend_from_slice(s);
            }
        }
        out
    }

    /// Overwrites every parameter from a flat vector. Invalidates the forward cache.
    pub fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} parameters",
                values.len(),
                self.param_count()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for s in layer.param_slices_mut() {
                s.copy_from_slice(&values[offset..offset + s.len()]);
                offset += s.len();
            }
        }
        self.cache = None;
        Ok(())
    }

    fn check_input(&self, x: &Matrix<T>) -> Result<()> {
        if x.cols() != self.inputs() {
            return Err(Error::ShapeMismatch(format!(
                "input has {} columns, network expects {}",
                x.cols(),
                self.inputs()
            )));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("network input"));
        }
        Ok(())
    }

    /// Forward pass that caches intermediates for [`Network::backward`].
    pub fn forward(&mut self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_input(x)?;
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        for layer in &self.layers {
            let (y, cache) = layer.forward(&h);
            caches.push(cache);
            h = y;
        }
        self.cache = Some(ForwardCache {
            layers: caches,
            output_shape: h.shape(),
        });
        Ok(h)
    }

    /// Forward pass without caching.
    pub fn predict(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_input(x)?;
        let mut h = x.clone();
        for layer in &self.layers {
            h = layer.forward(&h).0;
        }
        Ok(h)
    }

    /// Backpropagates `upstream = ∂L/∂output` through the last cached forward pass.
    pub fn backward(&self, upstream: &Matrix<T>) -> Result<Gradients<T>> {
        let cache = self.cache.as_ref().ok_or(Error::MissingCache)?;
        if upstream.shape() != cache.output_shape {
            return Err(Error::ShapeMismatch(format!(
                "upstream {:?} vs forward output {:?}",
                upstream.shape(),
                cache.output_shape
            )));
        }
        // Walk backwards, collecting per-layer gradients, then restore forward order.
        let mut per_layer: Vec<Vec<T>> = Vec::with_capacity(self.layers.len());
        let mut up = upstream.clone();
        for (layer, lc) in self.layers.iter().zip(&cache.layers).rev() {
            let mut g = Vec::with_capacity(layer.param_count());
            up = layer.backward(lc, &up, &mut g);
            per_layer.push(g);
        }
        let params = per_layer.into_iter().rev().flatten().collect();
        Ok(Gradients { params, input: up })
    }
}
