//! Fixtures shared by the criterion benchmarks in `benches/`.

use kaczmarz_core::gen::{generate, Instance, InstanceKind, InstanceSpec};

pub fn sparse(m: usize, n: usize, density: f64, seed: u64) -> Instance {
    let mut spec = InstanceSpec::new(InstanceKind::SparseGaussian, m, n, seed);
    spec.density = density;
    generate(&spec).expect("valid benchmark spec")
}

pub fn dense(m: usize, n: usize, seed: u64) -> Instance {
    generate(&InstanceSpec::new(InstanceKind::DenseGaussian, m, n, seed)).expect("valid benchmark spec")
}
