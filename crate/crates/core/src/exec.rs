//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] dispatches to
//! rayon; without it every call runs sequentially. Output order always matches
//! input order, so results are identical under both strategies.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this build can actually run work in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

impl std::str::FromStr for Execution {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(Execution::Sequential),
            "parallel" => Ok(Execution::Parallel),
            other => Err(crate::error::Error::InvalidParameter(format!("unknown execution mode `{other}`"))),
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<U, F>(exec: Execution, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(map_range(Execution::Parallel, 5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }
}
