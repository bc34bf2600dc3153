use bell_monogamy::bounds::sample_ns_behavior;
use bell_monogamy::cloning::{mean_shrink_bound, shrinking_factors, ValueSource};
use bell_monogamy::fixtures;
use bell_monogamy::monogamy::{extend_scenario, MonogamySetup};
use bell_monogamy::rational::{int, ratio, Rational};
use bell_monogamy::{Behavior, Error};
use num_traits::Zero;

fn chsh() -> MonogamySetup {
    extend_scenario(&fixtures::chsh_prob()).unwrap()
}

/// Alice uniform, each Bob a PR box partner: `b_j = a xor (x and y_j)`.
fn double_pr() -> Behavior {
    Behavior::from_fn(chsh().extended().clone(), |s, o| {
        let ok = (1..3).all(|j| o[j] == o[0] ^ (s[0] & s[j]));
        if ok {
            ratio(1, 2)
        } else {
            Rational::zero()
        }
    })
}

#[test]
fn double_pr_violates_and_signals() {
    let setup = chsh();
    let p = double_pr();
    p.validate().unwrap();
    let report = setup.monogamy_check(&p).unwrap();
    assert_eq!(report.per_pair, vec![int(4), int(4)]);
    assert_eq!(report.sum, int(8));
    assert!(!report.holds);
    let w = report.signaling.expect("double PR must signal");
    assert_ne!(w.difference, Rational::zero());
    assert!(matches!(setup.pair_value(&p, 1), Err(Error::Signaling(_))));
}

#[test]
fn chain_terms_biject_with_base_terms() {
    for f in [fixtures::chsh_prob(), fixtures::chained3_prob()] {
        let setup = extend_scenario(&f).unwrap();
        for m in 1..=setup.n() {
            let terms = setup.chain_terms(m).unwrap();
            assert_eq!(terms.len(), f.num_terms());
            let settings = setup.chain_settings(m).unwrap();
            for t in &terms {
                assert_eq!(settings[t.bob], t.bob_setting);
            }
        }
    }
}

#[test]
fn chains_decompose_the_pair_sum() {
    let setup = chsh();
    for seed in 0..40 {
        let p = sample_ns_behavior(setup.extended(), seed, 1 + (seed as usize % 4)).unwrap();
        let pairs: Rational = (1..=2).map(|m| setup.pair_value(&p, m).unwrap()).sum();
        let chains: Vec<Rational> = (1..=2)
            .map(|m| setup.chain_functional(m).unwrap().evaluate(&p).unwrap())
            .collect();
        assert_eq!(pairs, chains.iter().sum::<Rational>());
        for c in &chains {
            assert!(c <= setup.base().bound());
        }
        for m in 1..=2 {
            let model = setup.fixed_setting_lhv(&p, m).unwrap();
            model.validate().unwrap();
            let slice = setup.fixed_setting_slice(&p, m).unwrap();
            assert_eq!(model.to_behavior(), slice);
            assert_eq!(setup.collapsed_chain(m).unwrap().evaluate(&slice).unwrap(), chains[m - 1]);
        }
    }
}

#[test]
fn cloned_local_optimum_saturates() {
    for f in [fixtures::chsh_prob(), fixtures::chained3_prob()] {
        let setup = extend_scenario(&f).unwrap();
        let p = setup.cloned_local_optimum().unwrap();
        let report = setup.monogamy_check(&p).unwrap();
        assert_eq!(report.sum, setup.bound());
        assert!(report.holds && report.signaling.is_none());
    }
}

#[test]
fn preconditions() {
    assert!(extend_scenario(&fixtures::chsh_corr()).is_err());
    assert!(extend_scenario(&fixtures::mermin()).is_err());
    let setup = chsh();
    assert!(setup.chain_settings(0).is_err());
    assert!(setup.chain_settings(3).is_err());
    assert!(setup.monogamy_check(&fixtures::pr_box()).is_err());
}

#[test]
fn shrinking_factors_of_ns_samples_respect_the_bound() {
    let setup = chsh();
    let f = setup.base().clone();
    for seed in 0..30 {
        let p = sample_ns_behavior(setup.extended(), 1000 + seed, 2).unwrap();
        let clones: Vec<ValueSource> = (1..=2).map(|m| setup.pair_value(&p, m).unwrap().into()).collect();
        for base in [int(3), ratio(7, 2), int(4)] {
            let r = shrinking_factors(&f, &base.clone().into(), &clones).unwrap();
            assert!(r.mean_eta <= r.bound);
            assert_eq!(r.bound, mean_shrink_bound(&f, &base).unwrap().bound);
        }
    }
}
