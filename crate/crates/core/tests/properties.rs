use proptest::prelude::*;

use dynatomic::arith::intpoly::{IntPoly, Var};
use dynatomic::arith::roots::ModPoly;
use dynatomic::budget::Budget;
use dynatomic::kneading::{angle_of_maximal, kneading_sequence, word_period, Angle, Itinerary, KneadingSequence};
use dynatomic::monodromy::{branch_permutation, infinity_permutation, sheets};

fn aperiodic_word(max: usize) -> impl Strategy<Value = Itinerary> {
    prop::collection::vec(0u8..=1, 2..=max).prop_filter_map("exact period", |bits| Itinerary::new(bits).ok())
}

proptest! {
    #[test]
    fn shifts_and_complements(v in aperiodic_word(30), k in 0usize..64) {
        let n = v.n();
        prop_assert_eq!(v.shift_by(k).shift_by(n - k % n), v.clone());
        prop_assert_eq!(v.shift_by(k).disparity(), v.disparity());
        prop_assert_eq!(v.complement().disparity(), -v.disparity());
        let (m, s) = v.maximal_shift();
        prop_assert_eq!(v.shift_by(s), m.clone());
        prop_assert!(m.is_maximal());
        prop_assert!((0..n).all(|j| v.shift_by(j) <= m));
    }

    #[test]
    fn successor_raises_disparity(v in aperiodic_word(30)) {
        let n = v.n() as i64;
        if v.disparity() < n - 2 {
            let s = v.successor().unwrap();
            prop_assert_eq!(s.disparity(), v.disparity() + 2);
            prop_assert!(s.is_maximal());
        }
    }

    #[test]
    fn maximal_words_are_their_angles(v in aperiodic_word(24)) {
        let (m, _) = v.maximal_shift();
        let theta = angle_of_maximal(&m).unwrap();
        prop_assert_eq!(theta.period as usize, m.n());
        prop_assert_eq!(kneading_sequence(theta), m.star());
    }

    #[test]
    fn kneading_sequences_are_admissible(n in 2u32..=16, a in 1u64..65535) {
        let d = (1u64 << n) - 1;
        let theta = Angle::new(a % (d - 1) + 1, n).unwrap();
        let k = kneading_sequence(theta);
        prop_assert_eq!(k.n() as u32, theta.period);
        prop_assert!(k.is_admissible());
        let parsed: KneadingSequence = k.to_string().parse().unwrap();
        prop_assert_eq!(parsed, k.clone());
        // the internal address ends at the period
        prop_assert_eq!(*k.internal_address().last().unwrap(), k.n());
    }

    #[test]
    fn rho_is_increasing(bits in prop::collection::vec(0u8..=1, 1..12), k in 1usize..30) {
        if let Some(r) = dynatomic::kneading::rho_periodic(&bits, k) {
            prop_assert!(r > k);
            prop_assert!(bits[(r - 1) % bits.len()] != bits[(r - 1 - k) % bits.len()]);
        } else {
            prop_assert_eq!(k % word_period(&bits), 0);
        }
    }

    #[test]
    fn branch_permutations_are_bijections(n in 3u32..=8, a in 1u64..255) {
        let d = (1u64 << n) - 1;
        let theta = Angle::new(a % (d - 1) + 1, n).unwrap();
        prop_assume!(theta.period == n);
        let p = branch_permutation(theta).unwrap();
        let mut seen = p.images.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..p.images.len()).collect::<Vec<_>>());
        let o = p.order();
        prop_assert!(o == 2 || n as u64 % o == 0);
    }

    #[test]
    fn int_poly_text_round_trip(c in prop::collection::vec(-1_000_000i64..1_000_000, 0..12)) {
        let p = IntPoly::from_i64(Var::C, &c);
        prop_assert_eq!(p.to_string().parse::<IntPoly>().unwrap(), p);
    }

    #[test]
    fn mod_poly_text_round_trip(c in prop::collection::vec(0u64..10_007, 0..12)) {
        let p = ModPoly::new(10_007, Var::C, c);
        prop_assert_eq!(p.to_string().parse::<ModPoly>().unwrap(), p);
    }
}

#[test]
fn infinity_is_a_fixed_point_free_involution() {
    for n in 2..=10 {
        let p = infinity_permutation(n).unwrap();
        for (i, &j) in p.images.iter().enumerate() {
            assert_ne!(i, j);
            assert_eq!(p.images[j], i);
        }
        assert_eq!(sheets(n).unwrap().len() as u64, dynatomic::dynatomic::Family::quadratic().nu(n as u64));
    }
}

#[test]
fn graph_budget_abort() {
    assert!(dynatomic::monodromy::build_graph(8, &Budget::new(10)).is_err());
}
