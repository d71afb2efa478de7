//! Normalization pipeline (in progress).
