//! A bijection between ℕ and finite sequences of naturals.
//!
//! `μ(0)` is the empty sequence. For `m ≥ 1`, `m - 1` is the Cantor code of
//! the pair `(len - 1, c)`, and `c` packs the entries right to left:
//! `c = ⟨t0, ⟨t1, … ⟨t_{k-2}, t_{k-1}⟩…⟩⟩`, with a single entry standing for itself.

use super::BorelError;
use crate::structures::Element;

/// Cantor's pairing `⟨a, b⟩ = (a+b)(a+b+1)/2 + b`; `None` on overflow.
pub fn cantor_pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)?;
    let tri = if s % 2 == 0 {
        (s / 2).checked_mul(s.checked_add(1)?)?
    } else {
        s.checked_mul(s.div_ceil(2))?
    };
    tri.checked_add(b)
}

pub fn cantor_unpair(z: u64) -> (u64, u64) {
    let w = (((8 * z as u128 + 1).isqrt() - 1) / 2) as u64;
    let tri = (w as u128 * (w as u128 + 1) / 2) as u64;
    let b = z - tri;
    (w - b, b)
}

/// The sequence with code `m`.
pub fn mu(m: u64) -> Vec<Element> {
    if m == 0 {
        return Vec::new();
    }
    let (len_minus_one, mut code) = cantor_unpair(m - 1);
    let mut out = Vec::with_capacity(len_minus_one as usize + 1);
    for _ in 0..len_minus_one {
        let (head, rest) = cantor_unpair(code);
        out.push(head as Element);
        code = rest;
    }
    out.push(code as Element);
    out
}

/// The code of `t`, or `CodeOverflow` when it does not fit in a `u64`.
pub fn mu_inv(t: &[Element]) -> Result<u64, BorelError> {
    let overflow = || BorelError::CodeOverflow(t.to_vec());
    let Some((&last, init)) = t.split_last() else {
        return Ok(0);
    };
    let mut code = last as u64;
    for &e in init.iter().rev() {
        code = cantor_pair(e as u64, code).ok_or_else(overflow)?;
    }
    cantor_pair(init.len() as u64, code)
        .and_then(|c| c.checked_add(1))
        .ok_or_else(overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_codes() {
        assert_eq!(mu(0), Vec::<Element>::new());
        assert_eq!(mu(1), vec![0]);
        // ⟨1,0⟩ = 1, so code 2 is the length-2 sequence with packed code 0 = ⟨0,0⟩
        assert_eq!(mu(2), vec![0, 0]);
        assert_eq!(mu(3), vec![1]);
    }

    #[test]
    fn pairing_inverts() {
        for z in 0..5000 {
            let (a, b) = cantor_unpair(z);
            assert_eq!(cantor_pair(a, b), Some(z));
        }
        let big = u64::MAX - 7;
        let (a, b) = cantor_unpair(big);
        assert_eq!(cantor_pair(a, b), Some(big));
        assert_eq!(cantor_pair(u64::MAX, 1), None);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(mu_inv(&[usize::MAX, 3]), Err(BorelError::CodeOverflow(_))));
        assert!(mu_inv(&[5; 3]).is_ok());
    }

    #[test]
    fn round_trips() {
        for m in 0..20_000 {
            assert_eq!(mu_inv(&mu(m)).unwrap(), m);
        }
        for len in 0..4u32 {
            for code in 0..6usize.pow(len) {
                let t: Vec<Element> = (0..len).map(|i| code / 6usize.pow(i) % 6).collect();
                assert_eq!(mu(mu_inv(&t).unwrap()), t);
            }
        }
    }
}
