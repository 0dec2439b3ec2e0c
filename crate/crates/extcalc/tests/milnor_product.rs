//! Independent cross-checks of the Milnor product.
//!
//! The Adem oracle below reduces products of pure powers to the admissible
//! basis using the odd-primary Adem relation, coded with its own binomial
//! arithmetic. It shares no code with the Milnor-matrix product it checks.

use extcalc::milnor::{Algebra, AlgebraElement, MilnorElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reduce `P^a P^b` (a < pb) to the admissible basis over F_p.
///
/// Adem relation: P^a P^b = sum_t (-1)^{a+t} C((p-1)(b-t)-1, a-pt)
/// P^{a+b-t} P^t, the t = 0 term having no second factor.
mod adem_oracle {
    /// Binomial coefficient mod p by direct expansion of Pascal's rule with
    /// memoization-free recursion on digits (independent of the library's
    /// Lucas implementation).
    fn binom_mod(n: i64, k: i64, p: u32) -> u32 {
        if k < 0 || n < 0 || k > n {
            return 0;
        }
        if n == 0 {
            return 1;
        }
        let (nd, kd) = (n % p as i64, k % p as i64);
        // one digit: multiplicative formula, exact in u128
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        if kd > nd {
            return 0;
        }
        for i in 0..kd {
            num *= (nd - i) as u128;
            den *= (i + 1) as u128;
        }
        let digit = ((num / den) % p as u128) as u32;
        let rest = binom_mod(n / p as i64, k / p as i64, p);
        ((digit as u64 * rest as u64) % p as u64) as u32
    }

    /// Formal sums of admissible words `[i1, i2, ...]` with coefficients.
    pub type Sum = std::collections::BTreeMap<Vec<u32>, u32>;

    fn add_into(sum: &mut Sum, word: Vec<u32>, c: u32, p: u32) {
        if c == 0 {
            return;
        }
        let e = sum.entry(word).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            let key: Vec<Vec<u32>> = sum
                .iter()
                .filter(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                sum.remove(&k);
            }
        }
    }

    /// Rewrite the leftmost inadmissible adjacent pair until every word is
    /// admissible (i_k >= p * i_{k+1}).
    pub fn reduce(word: &[u32], p: u32) -> Sum {
        let mut pending: Vec<(Vec<u32>, u32)> = vec![(word.to_vec(), 1)];
        let mut done: Sum = Sum::new();
        while let Some((w, c)) = pending.pop() {
            let bad = w.windows(2).position(|pair| pair[0] < p * pair[1]);
            match bad {
                None => add_into(&mut done, w, c, p),
                Some(i) => {
                    let (a, b) = (w[i] as i64, w[i + 1] as i64);
                    let pi = p as i64;
                    for t in 0..=(a / pi) {
                        let coeff = binom_mod((pi - 1) * (b - t) - 1, a - pi * t, p);
                        if coeff == 0 {
                            continue;
                        }
                        let sign_pos = (a + t) % 2 == 0;
                        let c2 = if sign_pos { coeff } else { (p - coeff) % p };
                        let c2 = ((c as u64 * c2 as u64) % p as u64) as u32;
                        if c2 == 0 {
                            continue;
                        }
                        let mut w2: Vec<u32> = w[..i].to_vec();
                        w2.push((a + b - t) as u32);
                        if t > 0 {
                            w2.push(t as u32);
                        }
                        w2.extend_from_slice(&w[i + 2..]);
                        pending.push((w2, c2));
                    }
                }
            }
        }
        done
    }
}

#[test]
fn milnor_matches_adem_oracle_for_pure_powers() {
    // All P(a) * P(b) with total degree <= 5q at p = 5. In this window every
    // admissible word is a single power, which is the Milnor element P(n),
    // so the comparison needs no basis conversion.
    let alg = Algebra::new(5);
    for a in 1u32..=4 {
        for b in 1u32..=4 {
            if a + b > 5 {
                continue;
            }
            let milnor = alg
                .multiply(
                    &alg.element_from_basis(MilnorElement::p(&[a])),
                    &alg.element_from_basis(MilnorElement::p(&[b])),
                )
                .unwrap();
            let adem = adem_oracle::reduce(&[a, b], 5);
            let mut expected = AlgebraElement::zero(5, ((a + b) * 8) as i64);
            for (word, c) in &adem {
                assert_eq!(word.len(), 1, "unexpected length-2 admissible in window");
                alg.accumulate(
                    &mut expected,
                    &alg.element_from_basis(MilnorElement::p(&[word[0]])),
                    *c,
                );
            }
            assert_eq!(
                milnor, expected,
                "P({a}) * P({b}) disagrees with Adem oracle"
            );
        }
    }
}

fn random_basis_element(alg: &Algebra, rng: &mut ChaCha8Rng, max_t: i64) -> AlgebraElement {
    loop {
        let t = rng.gen_range(0..=max_t);
        let basis = alg.basis_in_degree(t);
        if basis.is_empty() {
            continue;
        }
        let m = basis[rng.gen_range(0..basis.len())].clone();
        return alg.element_from_basis(m);
    }
}

#[test]
fn associativity_random_triples() {
    // (ab)c = a(bc) for random homogeneous triples of total degree <= 60
    for p in [3u32, 5] {
        let alg = Algebra::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + p as u64);
        for _ in 0..300 {
            let a = random_basis_element(&alg, &mut rng, 30);
            let b = random_basis_element(&alg, &mut rng, (60 - a.degree()).min(30));
            let c = random_basis_element(&alg, &mut rng, 60 - a.degree() - b.degree());
            let ab_c = alg.multiply(&alg.multiply(&a, &b).unwrap(), &c).unwrap();
            let a_bc = alg.multiply(&a, &alg.multiply(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc, "associativity failed at p={p}: ({a})({b})({c})");
        }
    }
}

#[test]
fn degree_additivity_random_pairs() {
    for p in [3u32, 5] {
        let alg = Algebra::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(0xadd + p as u64);
        for _ in 0..200 {
            let a = random_basis_element(&alg, &mut rng, 40);
            let b = random_basis_element(&alg, &mut rng, 40);
            let ab = alg.multiply(&a, &b).unwrap();
            assert_eq!(ab.degree(), a.degree() + b.degree());
            for (m, _) in ab.terms() {
                assert_eq!(alg.degree_of(m), ab.degree());
            }
        }
    }
}
