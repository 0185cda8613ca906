//! Residue arithmetic mod a small prime q. Everything here assumes q is prime
//! and small enough that products fit in u64 (q < 2^31), which constructors
//! validate once so the hot paths don't have to.

pub(crate) fn add(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

pub(crate) fn sub(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub(crate) fn neg(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

pub(crate) fn mul(a: u64, b: u64, q: u64) -> u64 {
    a * b % q
}

pub(crate) fn pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, q);
        }
        base = mul(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat; panics on zero (caller's invariant).
pub(crate) fn inv(a: u64, q: u64) -> u64 {
    assert!(a % q != 0, "inverse of zero residue");
    pow(a, q - 2, q)
}

/// Is `a` a square residue? Zero counts as square.
pub(crate) fn is_square(a: u64, q: u64) -> bool {
    if a % q == 0 {
        return true;
    }
    pow(a, (q - 1) / 2, q) == 1
}

/// Deterministic square root mod q: brute sweep, fine for the small q used
/// throughout (q is a CLI-level parameter, never large).
pub(crate) fn sqrt(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    (0..q).find(|&r| mul(r, r, q) == a)
}

pub(crate) fn validate_prime(q: u64) -> bool {
    if q < 2 || q >= (1 << 31) {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f3_arithmetic() {
        assert_eq!(add(2, 2, 3), 1);
        assert_eq!(inv(2, 3), 2);
        assert_eq!(neg(1, 3), 2);
    }

    #[test]
    fn squares_mod_5() {
        let squares: Vec<u64> = (1..5).filter(|&a| is_square(a, 5)).collect();
        assert_eq!(squares, vec![1, 4]);
        assert_eq!(sqrt(4, 5), Some(2));
        assert_eq!(sqrt(2, 5), None);
    }

    #[test]
    fn primality() {
        assert!(validate_prime(3));
        assert!(validate_prime(5));
        assert!(!validate_prime(9));
        assert!(!validate_prime(1));
    }
}
