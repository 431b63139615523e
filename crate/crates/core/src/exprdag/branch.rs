use num_traits::Signed;

use super::{DagError, ExprDag};
use crate::arith::{Field, FloatCtx, Rational};
use crate::poly::SparsePoly;

/// Conjunction of non-strict sign conditions `g(x) >= 0`, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub conditions: Vec<SparsePoly>,
}

impl Guard {
    pub fn new(conditions: Vec<SparsePoly>) -> Self {
        Guard { conditions }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        self.conditions.iter().all(|g| !g.eval_rational(x).is_negative())
    }
}

/// Guarded choice between DAGs that all compute the same polynomial. The
/// first branch whose guard holds is used.
#[derive(Clone, Debug)]
pub struct BranchEvaluator {
    target: SparsePoly,
    branches: Vec<(Guard, ExprDag)>,
}

impl BranchEvaluator {
    /// Checks that every branch expands symbolically to `target`.
    pub fn new(target: SparsePoly, branches: Vec<(Guard, ExprDag)>) -> Result<Self, DagError> {
        for (i, (_, dag)) in branches.iter().enumerate() {
            if dag.nvars() != target.nvars() || dag.to_poly()? != target {
                return Err(DagError::SymbolicMismatch { branch: i });
            }
        }
        Ok(BranchEvaluator { target, branches })
    }

    pub fn target(&self) -> &SparsePoly {
        &self.target
    }

    pub fn branches(&self) -> &[(Guard, ExprDag)] {
        &self.branches
    }

    pub fn select(&self, x: &[Rational]) -> Option<usize> {
        self.branches.iter().position(|(g, _)| g.holds(x))
    }

    /// Chooses the branch from the exact input values, then evaluates it in `T`.
    pub fn eval<T: Field>(&self, x: &[T], ctx: &FloatCtx) -> Result<T, DagError> {
        let xr: Vec<Rational> = x.iter().map(Field::to_rational).collect();
        let i = self.select(&xr).ok_or(DagError::NoBranch)?;
        self.branches[i].1.eval_float(x, ctx)
    }
}
