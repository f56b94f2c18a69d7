//! Bounded-concurrency gate for provider calls.
//!
//! A plain counting semaphore over `Mutex` + `Condvar`. Shared across every
//! task that talks to a provider so the whole process never has more than the
//! configured number of requests in flight.

use std::sync::{Arc, Condvar, Mutex};

#[derive(Clone)]
pub struct ConcurrencyGate {
    inner: Arc<GateInner>,
}

struct GateInner {
    available: Mutex<usize>,
    cv: Condvar,
}

/// RAII permit; releases its slot on drop.
pub struct Permit {
    inner: Arc<GateInner>,
}

impl ConcurrencyGate {
    /// A gate admitting up to `max_in_flight` concurrent holders (min 1).
    pub fn new(max_in_flight: usize) -> Self {
        ConcurrencyGate {
            inner: Arc::new(GateInner {
                available: Mutex::new(max_in_flight.max(1)),
                cv: Condvar::new(),
            }),
        }
    }

    pub fn acquire(&self) -> Permit {
        let mut available = self.inner.available.lock().unwrap();
        while *available == 0 {
            available = self.inner.cv.wait(available).unwrap();
        }
        *available -= 1;
        Permit { inner: Arc::clone(&self.inner) }
    }
}

impl Drop for Permit {
    fn drop(&mut self) {
        let mut available = self.inner.available.lock().unwrap();
        *available += 1;
        self.inner.cv.notify_one();
    }
}
