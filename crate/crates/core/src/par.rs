//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they fall back to plain iterators with identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub(crate) fn flat_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().flat_map_iter(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().flat_map(f).collect()
    }
}

/// True iff `pred` holds for every index in `0..len`.
pub(crate) fn all_indices<F>(len: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).all(pred)
    }
}

pub(crate) fn count_indices<F>(len: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().filter(|&i| pred(i)).count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).filter(|&i| pred(i)).count()
    }
}

/// Whether the crate was built with the rayon backend.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
