use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("row {row} has no nonzero entries")]
    ZeroRow { row: usize },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("exactly singular pivot at step {step} of a dense LU")]
    SingularPivot { step: usize },

    #[error("singular HODLR leaf covering local rows {start}..{end}")]
    SingularLeaf { start: usize, end: usize },

    #[error("singular Woodbury core at HODLR node {node}")]
    SingularCore { node: usize },

    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("vertex {vertex} is not in the graph ({n_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("global index {index} is not part of the update")]
    MissingIndex { index: usize },

    #[error("update index {index} is not present in the parent front")]
    StructuralMismatch { index: usize },

    #[error("non-finite residual at GMRES iteration {iteration}")]
    NonFiniteResidual { iteration: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("front {node}: {source}")]
    Front {
        node: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_front(self, node: usize) -> Self {
        match self {
            e @ Error::Front { .. } => e,
            e => Error::Front {
                node,
                source: Box::new(e),
            },
        }
    }
}
