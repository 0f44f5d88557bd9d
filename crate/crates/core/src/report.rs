//! Run manifests and report emission.
