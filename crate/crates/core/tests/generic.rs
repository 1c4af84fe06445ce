//! The numerical core instantiated at `f32` agrees with the `f64` aliases.

use std::sync::Arc;

use grapde::continuation::max_abs_difference;
use grapde::nonlinearity::{builtin, BuiltinParams};
use grapde::solvers::{mountain_pass_solve, SolverConfig};
use grapde::{laplacian, GraphData, VertexFunction, WeightedGraph};

#[test]
fn laplacian_in_single_precision() {
    let data = GraphData::complete(4);
    let g32 = WeightedGraph::<f32>::from_data(&data).unwrap();
    let g64 = WeightedGraph::<f64>::from_data(&data).unwrap();
    let u = [0.3, -1.2, 2.0, 0.7];
    let a = laplacian(&g32, &VertexFunction::new(u.iter().map(|&x| x as f32).collect())).unwrap();
    let b = laplacian(&g64, &VertexFunction::new(u.to_vec())).unwrap();
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((f64::from(*x) - y).abs() < 1e-5);
    }
}

#[test]
fn mountain_pass_in_single_precision() {
    let data = GraphData::path(2);
    let g32 = Arc::new(WeightedGraph::<f32>::from_data(&data).unwrap());
    let g64 = Arc::new(WeightedGraph::<f64>::from_data(&data).unwrap());
    let def = builtin("mp-example", &g64, &BuiltinParams::default()).unwrap();
    let cfg = SolverConfig { tol: 1e-3, ..Default::default() };
    let r32 = mountain_pass_solve(&def.instance(g32, 0.5f32).unwrap(), &cfg).unwrap();
    let r64 = mountain_pass_solve(&def.instance(g64, 0.5).unwrap(), &SolverConfig::default()).unwrap();
    assert!(r32.converged && r32.energy > 0.0, "{:?}", r32.flags);
    let widened = grapde::StatePair::new(
        VertexFunction::new(r32.state.u.iter().map(|&x| f64::from(x)).collect()),
        VertexFunction::new(r32.state.v.iter().map(|&x| f64::from(x)).collect()),
    )
    .unwrap();
    assert!(max_abs_difference(&widened, &r64.state) < 1e-2);
}
