//! Placeholder, implemented next.
