//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use hopfcert_core::field::Field;
use hopfcert_core::hopf::{build_group_algebra, build_sweedler, cyclic_table};
use hopfcert_core::rep::HopfRef;

pub fn sweedler_q() -> HopfRef {
    Arc::new(build_sweedler(Field::Rational).expect("Sweedler over Q"))
}

pub fn f2c2() -> HopfRef {
    Arc::new(
        build_group_algebra(&cyclic_table(2), Field::prime(2).expect("2 is prime"))
            .expect("k[C2] over F2"),
    )
}
