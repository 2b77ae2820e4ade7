use menger_core::dyadic::Dyadic;
use menger_core::fixtures::{ell, l_prefix};
use menger_core::metric::{norm_bounds, rho, weigh_level1, weigh_sequence, RhoStatus};
use menger_core::sequences::CoherentSequence;

fn l(i: usize, depth: usize) -> CoherentSequence {
    CoherentSequence::new(l_prefix(i, depth).unwrap(), format!("L{i}"))
}

#[test]
fn ell_one_has_length_31_over_32() {
    assert_eq!(weigh_level1(&ell(1).unwrap()).length(), Dyadic::new(31, 5));
}

#[test]
fn last_weight_follows_lambda_recursion() {
    let levels = weigh_sequence(&l_prefix(1, 7).unwrap()).unwrap();
    for n in 1..=6usize {
        let last = levels[n].weights.last().unwrap().clone();
        let lambda = 3 * (1i64 << n) - 2;
        assert_eq!(last, Dyadic::new(lambda, 2 * n as u32 + 5), "n = {n}");
    }
}

#[test]
fn lengths_strictly_decrease() {
    let levels = weigh_sequence(&l_prefix(1, 8).unwrap()).unwrap();
    for p in levels.windows(2) {
        assert!(p[1].length() < p[0].length());
    }
}

#[test]
fn l1_norm_brackets_eleven_twelfths() {
    let b = norm_bounds(&l(1, 12)).unwrap();
    let target = 11.0 / 12.0;
    eprintln!("{:?} width {}", (b.interval.lo.to_f64(), b.interval.hi.to_f64()), b.interval.width().to_f64());
    assert!(b.interval.contains_f64(target, 0.0));
    assert!(b.interval.width().to_f64() < 1e-3);
}

#[test]
fn rho_from_empty_to_shifted_ells() {
    for i in 1..=4usize {
        let depth = 16;
        let r = rho(&CoherentSequence::empty(depth), &l(i, depth), 1e-4).unwrap();
        let target = (11.0 / 12.0) / (1u64 << (i - 1)) as f64;
        eprintln!("i={i} {:?} est {:?} width {:?}", r.status, r.estimate(), r.width());
        assert_eq!(r.status, RhoStatus::Converged);
        assert!(r.interval.as_ref().unwrap().contains_f64(target, 0.0));
        assert!((r.estimate().unwrap() - target).abs() <= 1e-4);
    }
}
