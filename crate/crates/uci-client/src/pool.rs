//! A pool of identical engine instances for parallel branch evaluation.
//! Handles are single-owner while checked out; acquisition blocks when the
//! pool is exhausted.

use std::sync::{Arc, Condvar, Mutex};

use crate::{EngineConfig, EngineError, EngineHandle};

#[derive(Clone)]
pub struct EnginePool {
    inner: Arc<Inner>,
}

struct Inner {
    slots: Mutex<Vec<EngineHandle>>,
    available: Condvar,
    size: usize,
}

impl EnginePool {
    /// Launch `size` identical engines from one config.
    pub fn launch(config: &EngineConfig, size: usize) -> Result<EnginePool, EngineError> {
        assert!(size >= 1, "a pool needs at least one engine");
        let mut slots = Vec::with_capacity(size);
        for _ in 0..size {
            slots.push(EngineHandle::launch(config.clone())?);
        }
        Ok(EnginePool {
            inner: Arc::new(Inner {
                slots: Mutex::new(slots),
                available: Condvar::new(),
                size,
            }),
        })
    }

    pub fn size(&self) -> usize {
        self.inner.size
    }

    /// Run `f` with exclusive use of one engine, blocking until one is
    /// free. The handle returns to the pool afterwards, even on panic.
    pub fn with_engine<T>(&self, f: impl FnOnce(&mut EngineHandle) -> T) -> T {
        let mut checkout = self.acquire();
        f(checkout.0.as_mut().expect("guard holds a handle"))
    }

    fn acquire(&self) -> Checkout<'_> {
        let mut slots = self.inner.slots.lock().unwrap();
        loop {
            if let Some(handle) = slots.pop() {
                return Checkout(Some(handle), &self.inner);
            }
            slots = self.inner.available.wait(slots).unwrap();
        }
    }

    /// Quit every engine. Blocks until all handles are back in the pool.
    pub fn shutdown(&self) {
        let mut slots = self.inner.slots.lock().unwrap();
        loop {
            if slots.len() == self.inner.size {
                break;
            }
            slots = self.inner.available.wait(slots).unwrap();
        }
        for handle in slots.iter_mut() {
            handle.shutdown();
        }
    }
}

struct Checkout<'a>(Option<EngineHandle>, &'a Inner);

impl Drop for Checkout<'_> {
    fn drop(&mut self) {
        if let Some(handle) = self.0.take() {
            self.1.slots.lock().unwrap().push(handle);
            self.1.available.notify_one();
        }
    }
}
