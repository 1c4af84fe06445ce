//! Property tests of the graph calculus and the norms on random weighted graphs.

mod common;

use grapde::calculus::OperatorOrder;
use grapde::graph::Potential;
use grapde::{
    gradient_form, integral, laplacian, polylap_apply, polylap_weak_form, w_norm, SpaceSpec, VertexFunction,
    WeightedGraph,
};
use proptest::prelude::*;

fn graph_and_functions() -> impl Strategy<Value = (WeightedGraph<f64>, Vec<f64>, Vec<f64>)> {
    (any::<u64>(), 2usize..=8).prop_flat_map(|(seed, n)| {
        let g = WeightedGraph::from_data(&common::random_graph_data(&mut common::rng(seed), n)).unwrap();
        let values = proptest::collection::vec(-3.0f64..3.0, n);
        (Just(g), values.clone(), values)
    })
}

fn vf(v: &[f64]) -> VertexFunction<f64> {
    VertexFunction::new(v.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_kills_constants((g, _, _) in graph_and_functions(), c in -5.0f64..5.0) {
        let lc = laplacian(&g, &VertexFunction::constant(g.len(), c)).unwrap();
        prop_assert!(lc.max_abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn gradient_form_is_symmetric_and_nonnegative((g, u, v) in graph_and_functions()) {
        let (u, v) = (vf(&u), vf(&v));
        let uv = gradient_form(&g, &u, &v).unwrap();
        let vu = gradient_form(&g, &v, &u).unwrap();
        for (a, b) in uv.iter().zip(vu.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        prop_assert!(gradient_form(&g, &u, &u).unwrap().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn laplacian_is_self_adjoint((g, u, v) in graph_and_functions()) {
        let (u, v) = (vf(&u), vf(&v));
        let lu = laplacian(&g, &u).unwrap();
        let lv = laplacian(&g, &v).unwrap();
        let a = integral(&g, &VertexFunction::new(lu.iter().zip(v.iter()).map(|(x, y)| x * y).collect())).unwrap();
        let b = integral(&g, &VertexFunction::new(lv.iter().zip(u.iter()).map(|(x, y)| x * y).collect())).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn norm_is_absolutely_homogeneous((g, u, _) in graph_and_functions(), t in -4.0f64..4.0, m in 1u32..=3, s in 2.0f64..4.5) {
        let spec = SpaceSpec::new(m, s, Potential::H2).unwrap();
        let u = vf(&u);
        let a = w_norm(&g, &u.scale(t), &spec).unwrap();
        let b = t.abs() * w_norm(&g, &u, &spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
    }

    #[test]
    fn weak_form_is_linear_in_the_test_function((g, u, phi) in graph_and_functions(), m in 1u32..=3, s in 2.0f64..4.0, t in -2.0f64..2.0) {
        let ord = OperatorOrder::new(m, s).unwrap();
        let (u, phi) = (vf(&u), vf(&phi));
        let a = polylap_weak_form(&g, &u, &phi.scale(t), &ord).unwrap();
        let b = t * polylap_weak_form(&g, &u, &phi, &ord).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
    }

    #[test]
    fn poly_laplacian_pairs_to_the_norm_power((g, u, _) in graph_and_functions(), m in 1u32..=3, s in 2.0f64..4.0) {
        // <L u, u> = integral |grad^m u|^s, i.e. the gradient part of the norm power.
        let ord = OperatorOrder::new(m, s).unwrap();
        let u = vf(&u);
        let lu = polylap_apply(&g, &u, &ord).unwrap();
        let pairing = integral(&g, &VertexFunction::new(lu.iter().zip(u.iter()).map(|(a, b)| a * b).collect())).unwrap();
        let spec = SpaceSpec::new(m, s, Potential::H1).unwrap();
        let full = w_norm(&g, &u, &spec).unwrap().powf(s);
        let potential_part: f64 = (0..g.len())
            .map(|x| g.mu()[x] * g.potential(Potential::H1)[x] * u.as_slice()[x].abs().powf(s))
            .sum();
        let gradient_part = full - potential_part;
        prop_assert!((pairing - gradient_part).abs() <= 1e-9 * full.max(1.0));
    }
}
