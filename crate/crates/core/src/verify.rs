//! Verification checks (stub).
