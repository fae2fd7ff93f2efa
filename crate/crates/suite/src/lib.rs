//! Holds the acceptance suite (`tests/acceptance.rs`). The checks themselves
//! live in `choquard_cli::verify`; this package runs after the unit and
//! integration tests of the other crates.
