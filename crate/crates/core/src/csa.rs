//! Bit-parallel full adders and the two carry-save adder networks.
//!
//! Every operation here is positionwise: bit `p` of an output depends only on
//! bit `p` of the inputs.

/// A vector of bits supporting the bitwise operations the CSA networks need.
pub trait BitVector: Copy {
    fn zero() -> Self;
    fn and(self, other: Self) -> Self;
    fn or(self, other: Self) -> Self;
    fn xor(self, other: Self) -> Self;

    /// Returns `(carry, sum)` where `sum` is the parity and `carry` the
    /// majority of the three inputs at each position.
    #[inline(always)]
    fn full_adder(a: Self, b: Self, c: Self) -> (Self, Self) {
        let ab = a.xor(b);
        let sum = ab.xor(c);
        let carry = a.and(b).or(ab.and(c));
        (carry, sum)
    }
}

impl BitVector for u64 {
    #[inline(always)]
    fn zero() -> Self {
        0
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        self & other
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        self | other
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        self ^ other
    }
}

/// A 4-bit counter per bit position, split into planes of place value
/// 8, 4, 2 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Accumulators<V> {
    pub a8: V,
    pub a4: V,
    pub a2: V,
    pub a1: V,
}

impl<V: BitVector> Accumulators<V> {
    #[inline(always)]
    pub fn zero() -> Self {
        Accumulators { a8: V::zero(), a4: V::zero(), a2: V::zero(), a1: V::zero() }
    }
}

impl Accumulators<u64> {
    /// The 4-bit count held at bit position `p`.
    pub fn value_at(&self, p: usize) -> u32 {
        let bit = |v: u64| (v >> p & 1) as u32;
        8 * bit(self.a8) + 4 * bit(self.a4) + 2 * bit(self.a2) + bit(self.a1)
    }
}

/// Compresses 15 input vectors into a 4-bit count per position using 11 full
/// adders on a critical path of 5.
#[inline(always)]
pub fn csa15<V: BitVector>(v: &[V; 15]) -> Accumulators<V> {
    let fa = V::full_adder;

    // weight 1: 15 -> 1, yielding 7 carries of weight 2
    let (c0, s0) = fa(v[0], v[1], v[2]);
    let (c1, s1) = fa(v[3], v[4], v[5]);
    let (c2, s2) = fa(v[6], v[7], v[8]);
    let (c3, s3) = fa(v[9], v[10], v[11]);
    let (c4, s4) = fa(v[12], v[13], v[14]);
    let (c5, t0) = fa(s0, s1, s2);
    let (c6, a1) = fa(t0, s3, s4);

    // weight 2: 7 -> 1, yielding 3 carries of weight 4
    let (d0, u0) = fa(c0, c1, c2);
    let (d1, u1) = fa(c3, c4, c5);
    let (d2, a2) = fa(u0, u1, c6);

    // weight 4: 3 -> 1, carry is the weight 8 plane
    let (a8, a4) = fa(d0, d1, d2);

    Accumulators { a8, a4, a2, a1 }
}

/// Adds 16 input vectors to `acc` using 15 full adders. Returns the skimmed
/// weight 16 plane and the updated accumulators.
#[inline(always)]
pub fn csa16_4<V: BitVector>(acc: &Accumulators<V>, v: &[V; 16]) -> (V, Accumulators<V>) {
    let fa = V::full_adder;

    // weight 1: a1 and 16 inputs -> 1, yielding 8 carries
    let (c0, s0) = fa(v[0], v[1], v[2]);
    let (c1, s1) = fa(v[3], v[4], v[5]);
    let (c2, s2) = fa(v[6], v[7], v[8]);
    let (c3, s3) = fa(v[9], v[10], v[11]);
    let (c4, s4) = fa(v[12], v[13], v[14]);
    let (c5, t0) = fa(acc.a1, v[15], s0);
    let (c6, t1) = fa(s1, s2, s3);
    let (c7, a1) = fa(t0, t1, s4);

    // weight 2: a2 and 8 carries -> 1, yielding 4 carries
    let (d0, u0) = fa(c0, c1, c2);
    let (d1, u1) = fa(c3, c4, c5);
    let (d2, u2) = fa(c6, c7, acc.a2);
    let (d3, a2) = fa(u0, u1, u2);

    // weight 4: a4 and 4 carries -> 1, yielding 2 carries
    let (e0, x0) = fa(d0, d1, d2);
    let (e1, a4) = fa(acc.a4, d3, x0);

    // weight 8
    let (a16, a8) = fa(acc.a8, e0, e1);

    (a16, Accumulators { a8, a4, a2, a1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_bits(s: &str) -> u64 {
        u64::from_str_radix(s, 2).unwrap()
    }

    #[test]
    fn four_bit_example() {
        let (carry, sum) = u64::full_adder(from_bits("1001"), from_bits("1001"), from_bits("0101"));
        assert_eq!(carry, from_bits("1001"));
        assert_eq!(sum, from_bits("0101"));
    }

    #[test]
    fn zero_inputs() {
        assert_eq!(u64::full_adder(0, 0, 0), (0, 0));
    }

    #[test]
    fn csa15_all_ones() {
        let acc = csa15(&[!0u64; 15]);
        assert_eq!(acc, Accumulators { a8: !0, a4: !0, a2: !0, a1: !0 });
    }

    #[test]
    fn csa15_single_input() {
        let mut v = [0u64; 15];
        v[0] = 1 << 17;
        let acc = csa15(&v);
        assert_eq!(acc, Accumulators { a8: 0, a4: 0, a2: 0, a1: 1 << 17 });
    }

    #[test]
    fn csa16_4_rolls_over() {
        let full = Accumulators { a8: !0u64, a4: !0, a2: !0, a1: !0 };
        let mut v = [0u64; 16];
        v[9] = 1 << 5;
        let (a16, acc) = csa16_4(&full, &v);
        assert_eq!(a16, 1 << 5);
        assert_eq!(acc.value_at(5), 0);
        assert_eq!(acc.value_at(6), 15);
    }

    #[test]
    fn csa16_4_zero() {
        let (a16, acc) = csa16_4(&Accumulators::<u64>::zero(), &[0; 16]);
        assert_eq!(a16, 0);
        assert_eq!(acc, Accumulators::zero());
    }
}
