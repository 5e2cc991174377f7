use super::ComplexityError;

/// Delay-coordinate point cloud stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub dim: usize,
    pub lag: usize,
    pub coords: Vec<f64>,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Points `(x_t, x_{t+lag}, …, x_{t+(dim−1)·lag})`.
pub fn delay_embed(signal: &[f64], dim: usize, lag: usize) -> Result<Embedding, ComplexityError> {
    if dim == 0 {
        return Err(ComplexityError::InvalidInput("embedding dimension must be >= 1".into()));
    }
    if dim > 1 && lag == 0 {
        return Err(ComplexityError::InvalidInput("embedding lag must be >= 1".into()));
    }
    let span = (dim - 1) * lag;
    if signal.len() <= span {
        return Err(ComplexityError::TooShort { len: signal.len(), needed: span + 1 });
    }
    let count = signal.len() - span;
    let mut coords = Vec::with_capacity(count * dim);
    for t in 0..count {
        for j in 0..dim {
            coords.push(signal[t + j * lag]);
        }
    }
    Ok(Embedding { dim, lag, coords })
}
