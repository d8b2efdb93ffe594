use symcore::SymError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("third y-derivative vanishes identically")]
    DegenerateThirdDerivative,
    #[error("right-hand side is linear in y")]
    DegenerateLinear,
    #[error("right-hand side is not quadratic in y")]
    NotRiccati,
    #[error("Riccati ODE with vanishing f0 (Bernoulli)")]
    DegenerateBernoulli,
    #[error("constant invariant: defer to Chini")]
    ChiniDeferral,
    #[error("forward map has vanishing y-derivative")]
    SingularTransform,
    #[error("pulled-back symmetry is not linear in y")]
    PullbackNotLinear,
    #[error("symmetry orbits coincide with solution curves")]
    InvariantSolutionDegenerate,
    #[error("implicit solution failed its check")]
    SolutionCheckFailed,
    #[error("y' appears to degree {0}; at most 2 is supported")]
    UnsupportedDegree(usize),
    #[error("statement does not contain y'")]
    NotAnOde,
    #[error("problem file: {0}")]
    Problem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
