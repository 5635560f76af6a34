//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! global pool; without it they fall back to plain iterators. Results are
//! always returned in input order.

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;

    pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        F: Fn(usize, &T) -> R,
    {
        items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
}

pub use imp::map_collect;

/// Fallible map; the first error in input order wins.
pub fn try_map_collect<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(usize, &T) -> Result<R, E> + Sync + Send,
{
    map_collect(items, f).into_iter().collect()
}

/// Maximum of `f` over `items`. NaN propagates; ties and order do not matter.
pub fn try_max<T, E, F>(items: &[T], f: F) -> Result<f64, E>
where
    T: Sync,
    E: Send,
    F: Fn(usize, &T) -> Result<f64, E> + Sync + Send,
{
    let values = try_map_collect(items, f)?;
    Ok(values
        .into_iter()
        .fold(f64::NEG_INFINITY, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) }))
}

/// True when the crate was built with rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
