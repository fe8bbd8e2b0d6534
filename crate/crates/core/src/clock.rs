//! Timing that degrades to no-ops on targets without a clock.

#[cfg(not(target_arch = "wasm32"))]
mod imp {
    use std::time::{Duration, Instant};

    #[derive(Debug, Clone, Copy)]
    pub struct Stopwatch(Instant);

    impl Stopwatch {
        pub fn start() -> Self {
            Stopwatch(Instant::now())
        }

        pub fn seconds(&self) -> f64 {
            self.0.elapsed().as_secs_f64()
        }
    }

    #[derive(Debug, Clone, Copy)]
    pub struct Deadline(Option<Instant>);

    impl Deadline {
        pub fn none() -> Self {
            Deadline(None)
        }

        /// Infinite or unrepresentable limits mean no deadline.
        pub fn after_secs(secs: f64) -> Self {
            let d = Duration::try_from_secs_f64(secs.max(0.0)).ok();
            Deadline(d.and_then(|d| Instant::now().checked_add(d)))
        }

        pub fn expired(&self) -> bool {
            self.0.is_some_and(|d| Instant::now() >= d)
        }
    }
}

#[cfg(target_arch = "wasm32")]
mod imp {
    #[derive(Debug, Clone, Copy)]
    pub struct Stopwatch;

    impl Stopwatch {
        pub fn start() -> Self {
            Stopwatch
        }

        pub fn seconds(&self) -> f64 {
            0.0
        }
    }

    #[derive(Debug, Clone, Copy)]
    pub struct Deadline;

    impl Deadline {
        pub fn none() -> Self {
            Deadline
        }

        pub fn after_secs(_secs: f64) -> Self {
            Deadline
        }

        pub fn expired(&self) -> bool {
            false
        }
    }
}

pub use imp::{Deadline, Stopwatch};

#[cfg(all(test, not(target_arch = "wasm32")))]
mod tests {
    use super::Deadline;

    #[test]
    fn limits() {
        assert!(Deadline::after_secs(0.0).expired());
        assert!(!Deadline::after_secs(f64::INFINITY).expired());
        assert!(!Deadline::after_secs(1e300).expired());
        assert!(!Deadline::none().expired());
    }
}
