use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::gsp::graph::Graph;
use crate::scalar::Real;

/// Which matrix of the graph is used as the shift operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    /// `S = A`.
    Adjacency,
    /// `S = D^{-1/2} A D^{-1/2}` with `D = diag(A·1)`.
    NormalizedAdjacency,
    /// `S = D - A`. Some texts write the Laplacian as `A - D`; the two differ
    /// by a sign, which flips the ordering of the spectrum.
    CombinatorialLaplacian,
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftKind::Adjacency => "adj",
            ShiftKind::NormalizedAdjacency => "norm-adj",
            ShiftKind::CombinatorialLaplacian => "laplacian",
        })
    }
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adj" | "adjacency" => Ok(ShiftKind::Adjacency),
            "norm-adj" | "normalized-adjacency" => Ok(ShiftKind::NormalizedAdjacency),
            "laplacian" | "combinatorial-laplacian" => Ok(ShiftKind::CombinatorialLaplacian),
            other => Err(Error::Domain(format!("unknown shift kind {other:?}"))),
        }
    }
}

/// Symmetric graph-shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator<T> {
    matrix: Array2<T>,
    kind: ShiftKind,
}

impl<T: Real> ShiftOperator<T> {
    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_gso<T: Real>(graph: &Graph<T>, kind: ShiftKind) -> Result<ShiftOperator<T>> {
    let a = graph.adjacency();
    let matrix = match kind {
        ShiftKind::Adjacency => a.clone(),
        ShiftKind::NormalizedAdjacency => {
            let degrees = graph.degrees();
            if let Some(node) = degrees.iter().position(|&d| d <= T::zero()) {
                return Err(Error::DegenerateDegree { node });
            }
            let inv_sqrt: Vec<T> = degrees.iter().map(|d| d.sqrt().recip()).collect();
            Array2::from_shape_fn(a.dim(), |(i, j)| a[[i, j]] * inv_sqrt[i] * inv_sqrt[j])
        }
        ShiftKind::CombinatorialLaplacian => {
            let mut l = a.mapv(|w| -w);
            for (i, d) in graph.degrees().into_iter().enumerate() {
                l[[i, i]] = d;
            }
            l
        }
    };
    Ok(ShiftOperator { matrix, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn pair() -> Graph<f64> {
        Graph::from_adjacency(array![[0.0, 1.0], [1.0, 0.0]]).unwrap()
    }

    #[test]
    fn two_node_operators() {
        let s = build_gso(&pair(), ShiftKind::NormalizedAdjacency).unwrap();
        assert_eq!(s.matrix(), &array![[0.0, 1.0], [1.0, 0.0]]);
        let l = build_gso(&pair(), ShiftKind::CombinatorialLaplacian).unwrap();
        assert_eq!(l.matrix(), &array![[1.0, -1.0], [-1.0, 1.0]]);
        let a = build_gso(&pair(), ShiftKind::Adjacency).unwrap();
        assert_eq!(a.matrix(), pair().adjacency());
    }

    #[test]
    fn isolated_node_rejected_for_normalized() {
        let g: Graph<f64> = Graph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(
            build_gso(&g, ShiftKind::NormalizedAdjacency).unwrap_err(),
            Error::DegenerateDegree { node: 2 }
        );
        assert!(build_gso(&g, ShiftKind::Adjacency).is_ok());
    }

    #[test]
    fn kind_names_roundtrip() {
        for kind in [
            ShiftKind::Adjacency,
            ShiftKind::NormalizedAdjacency,
            ShiftKind::CombinatorialLaplacian,
        ] {
            assert_eq!(kind.to_string().parse::<ShiftKind>().unwrap(), kind);
        }
        assert!("nope".parse::<ShiftKind>().is_err());
    }
}
