//! Deterministic reductions and the worker-pool switch.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool;
//! without it every helper here runs the same chunking sequentially. Chunk
//! boundaries and the order in which chunk partials are combined never depend
//! on the number of workers, so results are bit-identical either way.

use num_complex::Complex64;

use crate::vector::CVec3;

/// Source elements per reduction chunk.
pub const CHUNK: usize = 2048;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "RIMSTEER_WORKERS";

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CVec3Sum {
    x: ComplexSum,
    y: ComplexSum,
    z: ComplexSum,
}

impl CVec3Sum {
    #[inline]
    pub fn add(&mut self, v: CVec3) {
        self.x.add(v.x);
        self.y.add(v.y);
        self.z.add(v.z);
    }

    pub fn value(&self) -> CVec3 {
        CVec3::new(self.x.value(), self.y.value(), self.z.value())
    }
}

/// Compensated sum of `f(item)` over `items`, reduced chunk by chunk in a
/// fixed order.
pub fn chunked_sum<T, F>(items: &[T], f: F) -> CVec3
where
    T: Sync,
    F: Fn(&T) -> CVec3 + Sync + Send,
{
    let partials = map_chunks(items, CHUNK, |chunk| {
        let mut acc = CVec3Sum::default();
        for item in chunk {
            acc.add(f(item));
        }
        acc.value()
    });
    combine(&partials)
}

/// Same reduction as [`chunked_sum`] but always on the calling thread.
pub fn chunked_sum_sequential<T, F>(items: &[T], f: F) -> CVec3
where
    F: Fn(&T) -> CVec3,
{
    let partials: Vec<CVec3> = items
        .chunks(CHUNK)
        .map(|chunk| {
            let mut acc = CVec3Sum::default();
            for item in chunk {
                acc.add(f(item));
            }
            acc.value()
        })
        .collect();
    combine(&partials)
}

fn combine(partials: &[CVec3]) -> CVec3 {
    let mut acc = CVec3Sum::default();
    for p in partials {
        acc.add(*p);
    }
    acc.value()
}

fn map_chunks<T, R, F>(items: &[T], size: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_chunks(size).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(size).map(f).collect()
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Worker count from [`WORKERS_ENV`], falling back to the available
/// parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f` with at most `workers` threads. Sequential builds ignore the
/// count.
pub fn with_workers<R, F>(workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("could not build a {workers}-thread pool ({e}); using the global pool");
                f()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}
