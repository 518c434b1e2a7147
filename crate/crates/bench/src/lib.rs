//! Fixtures shared by the benchmarks.

use omega_core::algebra::{build_modular_linear_family, min_operation};
use omega_core::functions::{FunctionTable, LinearRange};
use omega_core::lp::{LinearProgram, Relation, Sense};
use omega_core::rational::{int, ratio};
use omega_core::support::SupportInstance;
use omega_core::{Carrier, Limits, OperationFamily, Subset};

/// The single binary operation `(x, y) ↦ (3x + 3y) mod m`.
pub fn modular_family(m: u64) -> OperationFamily {
    build_modular_linear_family(m, &[vec![3, 3]], &Limits::default()).expect("valid modulus")
}

pub fn min_chain(size: usize) -> OperationFamily {
    OperationFamily::new(Carrier::new(size).expect("nonempty")).with("min2", min_operation(size)).expect("fresh name")
}

/// Support on a min-chain with `f(x) = x²/4`, anchored at the bottom.
pub fn min_chain_support(size: usize) -> SupportInstance<LinearRange> {
    let range = LinearRange::scalar(vec![("min2".into(), vec![ratio(1, 3), ratio(2, 3)])]).expect("scalar range");
    let f = FunctionTable::new((0..size as i64).map(|x| vec![ratio(x * x, 4)]).collect());
    SupportInstance::new(min_chain(size), range, f, Subset::singleton(size, 0))
}

/// A dense feasible program: maximize `Σ xᵢ` under `Σ_j (1 + (i·j mod 5)) x_j ≤ 10 + i`, `x ≥ 0`.
pub fn dense_lp(n: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(n);
    for i in 0..n {
        let row = (0..n).map(|j| int(1 + ((i * j) % 5) as i64)).collect();
        lp.add_row(row, Relation::Le, int(10 + i as i64)).expect("row width");
        lp.set_nonnegative(i);
    }
    lp.set_objective(Sense::Maximize, vec![int(1); n]).expect("objective width");
    lp
}
