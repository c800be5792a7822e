//! Lifted operators on the product space.
//!
//! Position-side projectors act as `W (x) 1`, auxiliary-side detectors as
//! `1 (x) X`; complements are `1 - P`.

use crate::block::{Cavity, CavityDecomposition, SlitLayout};
use crate::linalg::{tensor_product, ComplexMatrix, LinalgError};

/// The full operator set of an experiment on `H1 (x) H2`.
///
/// `property` / `property_comp` are present only when a candidate property
/// projector was supplied.
#[derive(Debug, Clone)]
pub struct LiftedOperators {
    /// E = L (x) 1: the which-slit property.
    pub ws_property: ComplexMatrix,
    /// 1 - E.
    pub ws_property_comp: ComplexMatrix,
    /// T = 1 (x) (A + B): the non-disturbing which-slit detector.
    pub ws_detector: ComplexMatrix,
    /// 1 - T.
    pub ws_detector_comp: ComplexMatrix,
    /// Y = 1 (x) (A + C): the non-disturbing property detector.
    pub property_detector: ComplexMatrix,
    /// 1 - Y.
    pub property_detector_comp: ComplexMatrix,
    /// G = K (x) 1 for the candidate property projector K.
    pub property: Option<ComplexMatrix>,
    /// 1 - G.
    pub property_comp: Option<ComplexMatrix>,
}

fn complement(p: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(p.rows()).sub(p).expect("same dims")
}

/// Builds all lifted operators for a layout/decomposition pair.
///
/// `property_projector`, when given, must be a square matrix on H1.
pub fn lift_operators(
    layout: SlitLayout,
    decomp: CavityDecomposition,
    property_projector: Option<&ComplexMatrix>,
) -> Result<LiftedOperators, LinalgError> {
    let dim1 = layout.dim1();
    let i1 = ComplexMatrix::identity(dim1);
    let i2 = ComplexMatrix::identity(decomp.dim2());

    let ws_property = tensor_product(&layout.slit_projector(), &i2)?;
    let ws_detector = tensor_product(&i1, &decomp.ws_marker())?;
    let property_detector = tensor_product(&i1, &decomp.property_marker())?;

    let property = match property_projector {
        Some(k) => {
            if !k.is_square() || k.rows() != dim1 {
                return Err(LinalgError::DimMismatch(format!(
                    "property projector is {}x{}, layout needs {dim1}x{dim1}",
                    k.rows(),
                    k.cols()
                )));
            }
            Some(tensor_product(k, &i2)?)
        }
        None => None,
    };

    Ok(LiftedOperators {
        ws_property_comp: complement(&ws_property),
        ws_detector_comp: complement(&ws_detector),
        property_detector_comp: complement(&property_detector),
        property_comp: property.as_ref().map(complement),
        ws_property,
        ws_detector,
        property_detector,
        property,
    })
}

/// 1 (x) P_cavity: the lifted projector onto one cavity outcome.
pub fn lift_cavity(
    layout: SlitLayout,
    decomp: CavityDecomposition,
    cavity: Cavity,
) -> ComplexMatrix {
    tensor_product(
        &ComplexMatrix::identity(layout.dim1()),
        &decomp.cavity_projector(cavity),
    )
    .expect("desk-scale dims")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, is_projector, projector_rank, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_square(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..n * n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::new(n, n, entries).unwrap()
    }

    #[test]
    fn ws_property_is_expected_diagonal() {
        let layout = SlitLayout::new(1).unwrap();
        let decomp = CavityDecomposition::uniform();
        let ops = lift_operators(layout, decomp, None).unwrap();
        let expect = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(ops.ws_property, expect);
    }

    #[test]
    fn detectors_commute_by_construction() {
        for (ra, rb, rc, rd) in [(1, 1, 1, 1), (2, 1, 3, 2), (1, 0, 0, 1), (3, 2, 1, 1)] {
            let layout = SlitLayout::new(2).unwrap();
            let decomp = CavityDecomposition::new(ra, rb, rc, rd).unwrap();
            let ops = lift_operators(layout, decomp, None).unwrap();
            let comm = commutator(&ops.ws_detector, &ops.property_detector).unwrap();
            assert_eq!(comm.frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn lifted_projector_ranks() {
        let layout = SlitLayout::new(2).unwrap();
        let decomp = CavityDecomposition::new(2, 1, 1, 2).unwrap();
        let ops = lift_operators(layout, decomp, None).unwrap();
        for p in [&ops.ws_property, &ops.ws_detector, &ops.property_detector] {
            assert!(is_projector(p, 1e-13).pass);
        }
        assert_eq!(
            projector_rank(&ops.ws_property, 1e-10).unwrap(),
            layout.m() * decomp.dim2()
        );
        assert_eq!(
            projector_rank(&ops.ws_detector, 1e-10).unwrap(),
            layout.dim1() * (decomp.r_a + decomp.r_b)
        );
        assert_eq!(
            projector_rank(&ops.property_detector, 1e-10).unwrap(),
            layout.dim1() * (decomp.r_a + decomp.r_c)
        );
    }

    #[test]
    fn factor_separated_operators_commute_for_random_property() {
        // [T, G] = 0 and [Y, E] = 0 hold exactly: the factors never mix.
        let layout = SlitLayout::new(3).unwrap();
        let decomp = CavityDecomposition::uniform();
        for seed in 0..5 {
            let k = random_square(layout.dim1(), seed);
            let ops = lift_operators(layout, decomp, Some(&k)).unwrap();
            let g = ops.property.as_ref().unwrap();
            assert!(commutator(&ops.ws_detector, g).unwrap().frobenius_norm() < 1e-13);
            assert!(
                commutator(&ops.property_detector, &ops.ws_property)
                    .unwrap()
                    .frobenius_norm()
                    < 1e-13
            );
        }
    }

    #[test]
    fn detector_actions_equal_the_componentwise_masks() {
        // for any detector-compatible state, T psi is exactly the ws mask and
        // Y psi exactly the property mask, component by component
        use crate::block::{assemble_state, CavityDecomposition, SlitLayout};
        use crate::linalg::ComplexVector;
        let layout = SlitLayout::new(3).unwrap();
        let decomp = CavityDecomposition::new(2, 1, 1, 2).unwrap();
        let dim2 = decomp.dim2();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let mut mk_side = |allowed: [std::ops::Range<usize>; 2]| {
                (0..3)
                    .map(|_| {
                        let mut v = ComplexVector::zeros(dim2);
                        for range in allowed.clone() {
                            for i in range {
                                v.set(
                                    i,
                                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                                );
                            }
                        }
                        v
                    })
                    .collect::<Vec<_>>()
            };
            let x = mk_side([
                decomp.range(crate::block::Cavity::A),
                decomp.range(crate::block::Cavity::B),
            ]);
            let y = mk_side([
                decomp.range(crate::block::Cavity::C),
                decomp.range(crate::block::Cavity::D),
            ]);
            let psi = assemble_state(layout, decomp, x, y, true).unwrap();
            let ops = lift_operators(layout, decomp, None).unwrap();
            let full = psi.to_vector();
            let t_psi = ops.ws_detector.apply(&full).unwrap();
            let y_psi = ops.property_detector.apply(&full).unwrap();
            assert_eq!(t_psi.entries(), psi.ws_image().entries());
            assert_eq!(y_psi.entries(), psi.property_image().entries());
        }
    }

    #[test]
    fn property_dim_mismatch_rejected() {
        let layout = SlitLayout::new(2).unwrap();
        let decomp = CavityDecomposition::uniform();
        let k = ComplexMatrix::identity(6);
        assert!(lift_operators(layout, decomp, Some(&k)).is_err());
    }

    #[test]
    fn cavity_lift_resolves_identity() {
        let layout = SlitLayout::new(2).unwrap();
        let decomp = CavityDecomposition::new(1, 2, 1, 1).unwrap();
        let mut sum = ComplexMatrix::zeros(20, 20);
        for cav in Cavity::ALL {
            sum = sum.add(&lift_cavity(layout, decomp, cav)).unwrap();
        }
        assert_eq!(sum, ComplexMatrix::identity(20));
    }
}
