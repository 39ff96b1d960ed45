//! Conditioned samplers (stub).
