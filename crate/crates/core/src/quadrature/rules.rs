use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub(crate) struct Rule {
    nodes: Vec<(f64, f64)>,
}

impl Rule {
    pub fn new(n: usize) -> Result<Self> {
        let gl = GaussLegendre::new(n).map_err(|e| Error::domain(format!("Gauss-Legendre rule of order {n}: {e}")))?;
        let mut nodes = gl.into_node_weight_pairs();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.nodes.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
    }
}
