use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Time source for rate limiting and the run budget.
pub trait Clock {
    /// Time elapsed since the clock was created.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

#[derive(Debug)]
pub struct SystemClock {
    start: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock { start: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Simulated time: sleeping advances the clock instantly. Runs against
/// the in-process mock use it so their outcome depends only on the seed.
#[derive(Debug, Default)]
pub struct VirtualClock {
    nanos: AtomicU64,
}

impl VirtualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, d: Duration) {
        self.nanos.fetch_add(d.as_nanos() as u64, Ordering::Relaxed);
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        Duration::from_nanos(self.nanos.load(Ordering::Relaxed))
    }

    fn sleep(&self, d: Duration) {
        self.advance(d);
    }
}

/// Token bucket holding at most one token, refilled at `per_minute / 60`
/// tokens per second.
#[derive(Debug, Clone)]
pub struct TokenBucket {
    per_second: f64,
    tokens: f64,
    last: Option<Duration>,
}

impl TokenBucket {
    pub fn per_minute(rate: u32) -> Self {
        TokenBucket {
            per_second: f64::from(rate.max(1)) / 60.0,
            tokens: 1.0,
            last: None,
        }
    }

    fn refill(&mut self, now: Duration) {
        if let Some(last) = self.last {
            let dt = now.saturating_sub(last).as_secs_f64();
            self.tokens = (self.tokens + dt * self.per_second).min(1.0);
        }
        self.last = Some(now);
    }

    /// Blocks on `clock` until a token is available and takes it.
    pub fn acquire(&mut self, clock: &dyn Clock) {
        self.refill(clock.now());
        while self.tokens < 1.0 - 1e-9 {
            let wait = (1.0 - self.tokens) / self.per_second;
            clock.sleep(Duration::from_secs_f64(wait).max(Duration::from_nanos(1)));
            self.refill(clock.now());
        }
        self.tokens = (self.tokens - 1.0).max(0.0);
    }
}
