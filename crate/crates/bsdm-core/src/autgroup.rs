//! Model automorphisms (in progress).
