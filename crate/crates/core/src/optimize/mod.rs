//! Sizing optimization.
