//! Shared inputs for the planner benchmarks in `benches/`.

use std::sync::Arc;

use qcc_core::problem::{build_problem, generate_instance, Assignment, CompilationProblem};
use qcc_core::preset;

/// The benchmark instance of `chip` at utilization `u` for `seed`.
pub fn instance(chip: &str, u: f64, p: u32, seed: u64) -> CompilationProblem {
    let hw = Arc::new(preset(chip).expect("known preset"));
    let inst = generate_instance(hw.len(), u, seed).expect("feasible instance");
    build_problem(inst, hw, p, Assignment::Random, seed).expect("fits the chip")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_match_chip_size() {
        for (chip, n) in [("N8", 8), ("N21", 21), ("N40", 40)] {
            let p = instance(chip, 1.0, 1, 0);
            assert_eq!(p.instance.edges.len(), n);
            assert_eq!(p.instance.n_states, n);
        }
    }
}
