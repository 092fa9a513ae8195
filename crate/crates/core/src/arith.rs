//! Small exact number-theory helpers shared by the group and construction code.

use num_integer::{Integer, Roots};

/// Prime factorization by trial division, primes ascending.
/// Inputs are bounded by the group-order ceiling, so this stays cheap.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// `Some(e)` when `n == 2^e`.
pub fn log2_exact(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

pub fn smallest_odd_prime_factor(n: u64) -> Option<u64> {
    factorize(n).into_iter().map(|(p, _)| p).find(|&p| p != 2)
}

/// Modular inverse of `a` modulo `m` (`m >= 1`), when `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Smallest `x` in `[0, m)` with `a * x ≡ b (mod m)`, or `None` when
/// `gcd(a, m)` does not divide `b`.
pub fn solve_linear_congruence(a: u64, b: u64, m: u64) -> Option<u64> {
    let a = a % m;
    let b = b % m;
    let g = a.gcd(&m);
    if b % g != 0 {
        return None;
    }
    let m_red = m / g;
    let inv = mod_inverse(a / g, m_red)?;
    Some(((b / g) as u128 * inv as u128 % m_red as u128) as u64)
}

/// Combine residues `r_i mod q_i` with pairwise coprime `q_i` into the unique
/// residue modulo their product.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut acc: u128 = 0;
    let mut modulus: u128 = 1;
    for &(r, q) in parts {
        let q = q as u128;
        let r = r as u128 % q;
        // acc + modulus * t ≡ r (mod q)
        let diff = (r + q - acc % q) % q;
        let inv = mod_inverse((modulus % q) as u64, q as u64)
            .expect("crt moduli must be pairwise coprime") as u128;
        let t = diff * inv % q;
        acc += modulus * t;
        modulus *= q;
    }
    acc as u64
}

/// All partitions of `n` into positive parts, each listed in ascending order.
/// The list itself is ordered lexicographically, starting with all ones.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, min_part: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in min_part..=remaining {
            if remaining - part != 0 && remaining - part < part {
                continue;
            }
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_roots() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(exact_sqrt(144), Some(12));
        assert_eq!(exact_sqrt(143), None);
        assert_eq!(log2_exact(64), Some(6));
        assert_eq!(log2_exact(48), None);
        assert_eq!(smallest_odd_prime_factor(20), Some(5));
        assert_eq!(smallest_odd_prime_factor(32), None);
    }

    #[test]
    fn congruences() {
        // 3x ≡ 6 (mod 9): x ∈ {2, 5, 8}
        assert_eq!(solve_linear_congruence(3, 6, 9), Some(2));
        // 4x ≡ 2 (mod 8) has no solution
        assert_eq!(solve_linear_congruence(4, 2, 8), None);
        assert_eq!(solve_linear_congruence(4, 0, 8), Some(0));
        assert_eq!(crt(&[(1, 4), (7, 9)]), 25);
        assert_eq!(crt(&[]), 0);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11]);
        assert_eq!(partitions(4), vec![vec![1, 1, 1, 1], vec![1, 1, 2], vec![1, 3], vec![2, 2], vec![4]]);
    }
}
