mod common;

use common::oracle;
use pospopcnt::accum::{flush_fw, transpose_nibbles, CounterVectors};
use pospopcnt::csa::{csa15, csa16_4, Accumulators, BitVector};
use pospopcnt::{pospopcnt, scalar_pospopcnt, total_popcount_of, CounterArray, WordWidth};
use proptest::prelude::*;

fn width() -> impl Strategy<Value = WordWidth> {
    prop::sample::select(WordWidth::ALL.to_vec())
}

/// Random bytes trimmed to whole words of `width`.
fn input() -> impl Strategy<Value = (WordWidth, Vec<u8>)> {
    (width(), prop::collection::vec(any::<u8>(), 0..3000)).prop_map(|(w, mut v)| {
        v.truncate(v.len() / w.bytes() * w.bytes());
        (w, v)
    })
}

fn count(bytes: &[u8], width: WordWidth) -> CounterArray {
    let mut c = CounterArray::new(width);
    pospopcnt(bytes, &mut c).unwrap();
    c
}

fn accumulators() -> impl Strategy<Value = Accumulators<u64>> {
    any::<[u64; 4]>().prop_map(|[a8, a4, a2, a1]| Accumulators { a8, a4, a2, a1 })
}

proptest! {
    #[test]
    fn conservation((w, bytes) in input()) {
        let c = count(&bytes, w);
        let ones: u64 = bytes.iter().map(|b| u64::from(b.count_ones())).sum();
        prop_assert_eq!(total_popcount_of(&c), ones);
        let words = (bytes.len() / w.bytes()) as u64;
        prop_assert!(c.as_slice().iter().all(|&n| n <= words));
    }

    #[test]
    fn matches_oracle((w, bytes) in input()) {
        let got = count(&bytes, w);
        prop_assert_eq!(got.as_slice(), &oracle(&bytes, w)[..]);
        let mut scalar = CounterArray::new(w);
        scalar_pospopcnt(&bytes, &mut scalar).unwrap();
        prop_assert_eq!(scalar.as_slice(), &oracle(&bytes, w)[..]);
    }

    #[test]
    fn additivity((w, bytes) in input(), split in any::<prop::sample::Index>()) {
        let words = bytes.len() / w.bytes();
        let cut = split.index(words + 1) * w.bytes();
        let mut c = CounterArray::new(w);
        pospopcnt(&bytes[..cut], &mut c).unwrap();
        pospopcnt(&bytes[cut..], &mut c).unwrap();
        prop_assert_eq!(c, count(&bytes, w));
    }

    #[test]
    fn width_refinement(bytes in prop::collection::vec(any::<u8>(), 0..3000)) {
        for w in [WordWidth::W8, WordWidth::W16, WordWidth::W32] {
            let wide = WordWidth::from_bits(2 * w.bits() as u32).unwrap();
            let bytes = &bytes[..bytes.len() / wide.bytes() * wide.bytes()];
            let coarse = count(bytes, wide);
            let fine = count(bytes, w);
            for j in 0..w.bits() {
                prop_assert_eq!(coarse[j] + coarse[j + w.bits()], fine[j]);
            }
        }
    }

    #[test]
    fn full_adder_conservation(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (carry, sum) = u64::full_adder(a, b, c);
        for p in 0..64 {
            let bit = |x: u64| x >> p & 1;
            prop_assert_eq!(bit(a) + bit(b) + bit(c), 2 * bit(carry) + bit(sum));
        }
    }

    #[test]
    fn csa15_conservation(v in any::<[u64; 15]>()) {
        let acc = csa15(&v);
        for p in 0..64 {
            let n = v.iter().filter(|x| *x >> p & 1 == 1).count() as u32;
            prop_assert_eq!(acc.value_at(p), n);
        }
    }

    #[test]
    fn csa16_4_conservation(acc in accumulators(), v in any::<[u64; 16]>()) {
        let (a16, out) = csa16_4(&acc, &v);
        for p in 0..64 {
            let n = v.iter().filter(|x| *x >> p & 1 == 1).count() as u32;
            prop_assert_eq!(16 * (a16 >> p & 1) as u32 + out.value_at(p), acc.value_at(p) + n);
        }
    }

    #[test]
    fn positional_independence(v in any::<[u64; 16]>(), acc in accumulators(), i in 0..16usize, p in 0..64u32) {
        let mut flipped = v;
        flipped[i] ^= 1 << p;
        let (a16, out) = csa16_4(&acc, &v);
        let (b16, flip_out) = csa16_4(&acc, &flipped);
        let outside = !(1u64 << p);
        prop_assert_eq!(a16 & outside, b16 & outside);
        prop_assert_eq!(out.a8 & outside, flip_out.a8 & outside);
        prop_assert_eq!(out.a4 & outside, flip_out.a4 & outside);
        prop_assert_eq!(out.a2 & outside, flip_out.a2 & outside);
        prop_assert_eq!(out.a1 & outside, flip_out.a1 & outside);

        let mut head = [0u64; 15];
        head.copy_from_slice(&v[..15]);
        let mut head_flipped = head;
        head_flipped[i % 15] ^= 1 << p;
        let x = csa15(&head);
        let y = csa15(&head_flipped);
        prop_assert_eq!(x.a8 & outside, y.a8 & outside);
        prop_assert_eq!(x.a1 & outside, y.a1 & outside);
    }

    #[test]
    fn transpose_round_trip(acc in accumulators()) {
        let planes = transpose_nibbles(&acc);
        for p in 0..64 {
            let nibble = (planes[p % 4] >> (4 * (p / 4)) & 0xf) as u32;
            prop_assert_eq!(nibble, acc.value_at(p));
        }
    }

    #[test]
    fn flush_linearity(w in width(), a in any::<[u16; 64]>(), b in any::<[u16; 64]>()) {
        let (a, b) = (a.map(|x| x / 2), b.map(|x| x / 2));
        let mut sum = [0u16; 64];
        for i in 0..64 {
            sum[i] = a[i] + b[i];
        }
        let mut twice = CounterArray::new(w);
        flush_fw(&mut twice, &CounterVectors::from_array(a));
        flush_fw(&mut twice, &CounterVectors::from_array(b));
        let mut once = CounterArray::new(w);
        flush_fw(&mut once, &CounterVectors::from_array(sum));
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn oracle_is_deterministic((w, bytes) in input(), init in any::<[u32; 64]>()) {
        let mut a = CounterArray::new(w);
        for (x, y) in a.as_mut_slice().iter_mut().zip(init) {
            *x = u64::from(y);
        }
        let mut b = a.clone();
        scalar_pospopcnt(&bytes, &mut a).unwrap();
        scalar_pospopcnt(&bytes, &mut b).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn full_adder_truth_table() {
    for bits in 0..8u64 {
        let (a, b, c) = (bits & 1, bits >> 1 & 1, bits >> 2 & 1);
        let (carry, sum) = u64::full_adder(a, b, c);
        assert_eq!(sum, (a + b + c) % 2);
        assert_eq!(carry, u64::from(a + b + c >= 2));
    }
}
