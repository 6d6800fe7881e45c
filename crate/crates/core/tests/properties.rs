use infospec_core::analysis::{
    condition_probability, condition_row, default_t_grid, extract_separation_point, separation_verdict,
    shift_property_check, ConditionKind, GammaSchedule, InputCandidate, SeparationOptions, SeparationOutcome,
    Sign,
};
use infospec_core::coding::{random_code_ensemble_error, EnsembleMode, EnsembleOptions};
use infospec_core::models::{ChannelModel, InputCoupling, JointModel, SourceModel};
use infospec_core::spectra::{exact_joint_law, ExactOptions, ExactRoute, JointEval, JointLaw};
use infospec_core::Error;
use proptest::prelude::*;

fn pmf(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

/// Rows may contain exact zeros so that `-inf` information densities occur.
fn kernel(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.05f64..1.0], cols).prop_map(|mut r| {
            if r.iter().all(|&x| x == 0.0) {
                r[0] = 1.0;
            }
            let s: f64 = r.iter().sum();
            r.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        }),
        rows,
    )
}

#[derive(Debug, Clone)]
struct Instance {
    source: Vec<f64>,
    coupling: Vec<Vec<f64>>,
    channel: Vec<Vec<f64>>,
    n: usize,
}

impl Instance {
    fn model(&self) -> JointModel {
        JointModel::new(
            SourceModel::iid(self.source.clone()).unwrap(),
            InputCoupling::kernel(self.coupling.clone()).unwrap(),
            ChannelModel::dmc(self.channel.clone()).unwrap(),
        )
    }

    fn joint(&self) -> JointLaw {
        let law = self.model().resolve(self.n).unwrap();
        exact_joint_law(&law, &ExactOptions::route(ExactRoute::Enumeration)).unwrap()
    }
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 2usize..=3, 2usize..=3, 1usize..=3).prop_flat_map(|(v, x, y, n)| {
        (pmf(v), kernel(v, x), kernel(x, y), Just(n)).prop_map(|(source, coupling, channel, n)| Instance {
            source,
            coupling,
            channel,
            n,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plus_dominates_minus(inst in instance(), gamma in 0.01f64..1.0) {
        let j = inst.joint();
        prop_assert!(condition_probability(&j, gamma, Sign::Plus) >= condition_probability(&j, gamma, Sign::Minus));
    }

    #[test]
    fn split_sums_cover_their_condition(inst in instance(), gamma in 0.01f64..1.0, c in -0.5f64..2.0) {
        let j = inst.joint();
        let alpha = condition_probability(&j, gamma, Sign::Plus);
        let strict = condition_row(&j, ConditionKind::Strict, gamma, Some(c)).unwrap();
        prop_assert!(strict.combined >= alpha - 1e-12, "{} < {}", strict.combined, alpha);
        let beta = condition_probability(&j, gamma, Sign::Minus);
        let dom = condition_row(&j, ConditionKind::Domination, gamma, Some(c)).unwrap();
        prop_assert!(dom.combined >= beta - 1e-12, "{} < {}", dom.combined, beta);
    }

    #[test]
    fn shift_property_holds(inst in instance(), gamma in 0.01f64..1.0) {
        let j = inst.joint();
        let report = shift_property_check(&j, gamma, &default_t_grid(&j, gamma, 64));
        prop_assert!(report.passes(), "worst slack {}", report.worst_slack);
    }

    #[test]
    fn extraction_is_certified(inst in instance(), gamma in 0.05f64..1.5) {
        let law = inst.model().resolve(inst.n).unwrap();
        match extract_separation_point(&law, gamma, 1e6) {
            Ok(e) => {
                prop_assert!((e.lambda1 + e.lambda2 - 1.0).abs() < 1e-12);
                prop_assert!(e.certified(), "{e:?}");
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn ensemble_error_within_feinstein_bound(inst in instance(), gamma in prop::sample::select(vec![0.1, 0.3, 0.7])) {
        prop_assume!(inst.n <= 2);
        let law = inst.model().resolve(inst.n).unwrap();
        let r = random_code_ensemble_error(&law, gamma, EnsembleMode::Exact, &EnsembleOptions::default()).unwrap();
        prop_assert_eq!(r.certified(1e-10), Some(true));
    }

    #[test]
    fn mid_quantile_is_monotone(inst in instance(), q1 in 0.0f64..=1.0, q2 in 0.0f64..=1.0) {
        let s = inst.joint().entropy_marginal();
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let (a, b) = (s.mid_quantile(lo).unwrap(), s.mid_quantile(hi).unwrap());
        prop_assert!(a <= b + 1e-15);
        prop_assert!(a >= s.min() && b <= s.max());
    }

    #[test]
    fn inverse_sqrt_schedule_is_valid(mut grid in prop::collection::btree_set(1usize..5000, 2..12)) {
        let grid: Vec<usize> = std::mem::take(&mut grid).into_iter().collect();
        let g = GammaSchedule::InverseSqrt.sweep_values(&grid).unwrap();
        prop_assert!(g.iter().all(|&x| x > 0.0));
        prop_assert!(g.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(grid.iter().zip(&g).collect::<Vec<_>>().windows(2).all(|w| (*w[1].0 as f64) * w[1].1 > (*w[0].0 as f64) * w[0].1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn alternating_is_never_not_transmissible(start in 1usize..6, len in 2usize..5, p in 0.05f64..0.95) {
        let grid: Vec<usize> = (start..start + len).collect();
        let cands = [
            InputCandidate::new("identity", InputCoupling::identity()),
            InputCandidate::new("biased", InputCoupling::independent(vec![p, 1.0 - p]).unwrap()),
        ];
        let opts = SeparationOptions {
            eval: JointEval::Exact(ExactOptions::default()),
            ..Default::default()
        };
        let r = separation_verdict(&SourceModel::alternating(), &ChannelModel::alternating(), &cands, &grid, &opts).unwrap();
        prop_assert_ne!(r.outcome, SeparationOutcome::NotTransmissible);
    }
}
