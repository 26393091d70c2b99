//! Exact Bernoulli numbers from tangent numbers.
//!
//! B_{2k} = (-1)^(k-1) 2k T_k / (4^k (4^k - 1)), where T_k is the k-th tangent
//! number, generated with the all-integer Knuth-Buckholtz recurrence.

use std::sync::{OnceLock, RwLock};

use rug::{Integer, Rational};

static EVEN_CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();

fn cache() -> &'static RwLock<Vec<Rational>> {
    EVEN_CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1)]))
}

/// Tangent numbers T_1..=T_m (T_1 = 1, T_2 = 2, T_3 = 16, ...).
fn tangent_numbers(m: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); m + 1];
    if m == 0 {
        return t;
    }
    t[1] = Integer::from(1);
    for k in 2..=m {
        let prev = Integer::from(&t[k - 1] * (k as u64 - 1));
        t[k] = prev;
    }
    for k in 2..=m {
        for j in k..=m {
            let a = Integer::from(&t[j - 1] * (j - k) as u64);
            let b = Integer::from(&t[j] * (j - k + 2) as u64);
            t[j] = a + b;
        }
    }
    t
}

fn even_bernoulli_upto(m: usize) -> Vec<Rational> {
    let t = tangent_numbers(m);
    let mut out = Vec::with_capacity(m + 1);
    out.push(Rational::from(1));
    for (k, tk) in t.iter().enumerate().skip(1) {
        let four_k = Integer::from(1) << (2 * k as u32);
        let den = Integer::from(&four_k - 1u32) * &four_k;
        let num = Integer::from(tk * (2 * k as u64));
        let mut b = Rational::from((num, den));
        if k % 2 == 0 {
            b = -b;
        }
        out.push(b);
    }
    out
}

fn ensure(m: usize) {
    if cache().read().expect("bernoulli cache poisoned").len() > m {
        return;
    }
    let mut guard = cache().write().expect("bernoulli cache poisoned");
    if guard.len() > m {
        return;
    }
    let target = m.max(2 * guard.len());
    *guard = even_bernoulli_upto(target);
}

/// Exact B_n for even n (B_0 = 1, B_2 = 1/6, ...).
///
/// # Panics
/// If `n` is odd.
pub fn bernoulli(n: usize) -> Rational {
    assert!(n.is_multiple_of(2), "bernoulli: only even indices are supported, got {n}");
    let m = n / 2;
    ensure(m);
    cache().read().expect("bernoulli cache poisoned")[m].clone()
}

/// B_n for any n with the B_1 = -1/2 convention (values of B_n(0)).
pub fn bernoulli_any(n: usize) -> Rational {
    match n {
        1 => Rational::from((-1, 2)),
        n if n % 2 == 1 => Rational::new(),
        n => bernoulli(n),
    }
}

/// [B_0, B_1, ..., B_n] with B_1 = -1/2.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    ensure(n / 2 + 1);
    let guard = cache().read().expect("bernoulli cache poisoned");
    (0..=n)
        .map(|j| match j {
            1 => Rational::from((-1, 2)),
            j if j % 2 == 1 => Rational::new(),
            j => guard[j / 2].clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u32, k: u32) -> Integer {
        Integer::from(Integer::binomial_u(n, k))
    }

    /// Independent route: sum_{j=0}^{n} C(n+1, j) B_j = 0.
    fn by_recurrence(n: usize) -> Vec<Rational> {
        let mut b: Vec<Rational> = vec![Rational::from(1)];
        for m in 1..=n {
            let mut s = Rational::new();
            for (j, bj) in b.iter().enumerate() {
                s += Rational::from(bj * binomial(m as u32 + 1, j as u32));
            }
            b.push(-s / Rational::from(m as u32 + 1));
        }
        b
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn agrees_with_defining_recurrence() {
        let oracle = by_recurrence(80);
        let table = bernoulli_table(80);
        assert_eq!(oracle, table);
    }

    #[test]
    fn recurrence_holds_for_large_indices() {
        let n = 300;
        let b = bernoulli_table(n);
        let mut s = Rational::new();
        for (j, bj) in b.iter().enumerate().take(n) {
            s += Rational::from(bj * binomial(n as u32 + 1, j as u32));
        }
        s += Rational::from(&b[n] * (n as u32 + 1));
        assert_eq!(s, Rational::new());
    }

    #[test]
    #[should_panic]
    fn odd_index_panics() {
        bernoulli(3);
    }

    #[test]
    fn concurrent_access_is_consistent() {
        let handles: Vec<_> = (0..4)
            .map(|i| std::thread::spawn(move || bernoulli(100 + 20 * i)))
            .collect();
        let got: Vec<Rational> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let table = bernoulli_table(160);
        for (i, b) in got.iter().enumerate() {
            assert_eq!(b, &table[100 + 20 * i]);
        }
    }
}
