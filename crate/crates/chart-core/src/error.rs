use thiserror::Error;

/// Which projection kernel a brane failed to be transverse to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Source,
    Target,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Source => write!(f, "ker(ds)"),
            Kernel::Target => write!(f, "ker(dt)"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum GkError {
    #[error("non-finite value near coordinate {index} ({detail})")]
    Domain { index: usize, detail: String },
    #[error("point outside the chart domain: {0}")]
    OutsideDomain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("not an almost-complex structure: |I^2 + 1| = {residual:.3e}")]
    NotComplex { residual: f64 },
    #[error("ill-conditioned jacobian, condition estimate {cond:.3e}")]
    Conditioning { cond: f64 },
    #[error("tangent projections are not transverse (rank {rank}, need {needed})")]
    Transversality { rank: usize, needed: usize },
    #[error("brane is not transverse to {kernel} (min principal angle {angle:.3e})")]
    DegenerateConfiguration { kernel: Kernel, angle: f64 },
    #[error("form is not closed: residual {residual:.3e}")]
    NotClosed { residual: f64 },
    #[error("bivector is not of type (2,0): residual {residual:.3e}")]
    NotType20 { residual: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("rank deficient basis: rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("argument out of range: {0}")]
    InvalidArgument(String),
    #[error("trajectory left the domain at t = {time:.6}")]
    FlowEscape { time: f64 },
    #[error("integrator error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    IntegratorTolerance { estimate: f64, tolerance: f64 },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("membership check failed: residual {residual:.3e}")]
    Membership { residual: f64 },
    #[error("brane lost the graph property at parameter {point:?}")]
    Fold { point: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, GkError>;
