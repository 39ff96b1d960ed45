//! Discrete cross-check (stub).
