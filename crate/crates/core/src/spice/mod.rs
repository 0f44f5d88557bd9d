//! External-simulator adapter.
