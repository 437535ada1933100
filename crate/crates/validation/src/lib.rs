//! Acceptance criteria for the compacton workspace; see `tests/acceptance.rs`.
