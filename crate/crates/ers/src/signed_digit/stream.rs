use std::fmt;
use std::sync::Arc;

use parking_lot::Mutex;

type Producer<T> = Box<dyn FnMut() -> T + Send>;

struct Inner<T> {
    cache: Vec<T>,
    next: Producer<T>,
}

/// A lazily produced, memoised infinite sequence.
///
/// Elements are produced in order by a stateful producer and cached; `at`
/// is idempotent. Cloning shares the cache. The producer runs under the
/// stream's lock, so a producer must never read its own stream.
pub struct Stream<T> {
    inner: Arc<Mutex<Inner<T>>>,
    offset: usize,
}

impl<T> Clone for Stream<T> {
    fn clone(&self) -> Self {
        Stream {
            inner: Arc::clone(&self.inner),
            offset: self.offset,
        }
    }
}

impl<T: Clone + Send + 'static> Stream<T> {
    /// Stream whose elements are the successive results of `next`.
    pub fn unfold(next: impl FnMut() -> T + Send + 'static) -> Self {
        Stream {
            inner: Arc::new(Mutex::new(Inner {
                cache: Vec::new(),
                next: Box::new(next),
            })),
            offset: 0,
        }
    }

    /// Stream whose `n`-th element is `f(n)`.
    pub fn from_fn(f: impl Fn(usize) -> T + Send + 'static) -> Self {
        let mut i = 0usize;
        Self::unfold(move || {
            let v = f(i);
            i += 1;
            v
        })
    }

    pub fn repeat(v: T) -> Self
    where
        T: Sync,
    {
        Self::unfold(move || v.clone())
    }

    /// Finite prefix followed by `tail` repeated.
    pub fn with_tail(prefix: Vec<T>, tail: T) -> Self
    where
        T: Sync,
    {
        Self::from_fn(move |i| prefix.get(i).cloned().unwrap_or_else(|| tail.clone()))
    }

    pub fn at(&self, n: usize) -> T {
        let idx = self.offset + n;
        let mut g = self.inner.lock();
        while g.cache.len() <= idx {
            let v = (g.next)();
            g.cache.push(v);
        }
        g.cache[idx].clone()
    }

    pub fn head(&self) -> T {
        self.at(0)
    }

    /// The stream without its first `k` elements.
    pub fn skip(&self, k: usize) -> Self {
        Stream {
            inner: Arc::clone(&self.inner),
            offset: self.offset + k,
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.at(i)).collect()
    }

    pub fn map<U: Clone + Send + 'static>(&self, f: impl Fn(T) -> U + Send + 'static) -> Stream<U> {
        let s = self.clone();
        Stream::from_fn(move |i| f(s.at(i)))
    }

    pub fn zip_with<U, V>(
        &self,
        other: &Stream<U>,
        f: impl Fn(T, U) -> V + Send + 'static,
    ) -> Stream<V>
    where
        U: Clone + Send + 'static,
        V: Clone + Send + 'static,
    {
        let a = self.clone();
        let b = other.clone();
        Stream::from_fn(move |i| f(a.at(i), b.at(i)))
    }
}

impl<T: Clone + Send + fmt::Debug + 'static> fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stream{:?}..", self.prefix(8))
    }
}
