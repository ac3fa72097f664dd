use num::traits::{Signed, Zero};
use num::BigInt;

use super::{BigRat, ExactError, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalRoot {
    pub value: BigRat,
    pub multiplicity: usize,
}

/// All rational roots of `p` with multiplicities, via the rational root
/// theorem on the primitive integer form of `p`.
pub fn rational_roots(p: &UniPoly) -> Result<Vec<RationalRoot>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::RootsOfZero);
    }
    // Clear denominators and content.
    let mut ints: Vec<BigInt> = {
        let mut lcm = BigInt::from(1);
        for c in p.coeffs() {
            lcm = num::integer::lcm(lcm, c.denom().clone());
        }
        p.coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect()
    };
    // Strip powers of z: each contributes a root 0.
    let mut zero_mult = 0;
    while ints.first().is_some_and(|c| c.is_zero()) {
        ints.remove(0);
        zero_mult += 1;
    }
    let mut roots = Vec::new();
    if zero_mult > 0 {
        roots.push(RationalRoot {
            value: BigRat::zero(),
            multiplicity: zero_mult,
        });
    }
    if ints.len() <= 1 {
        return Ok(roots);
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let reduced = UniPoly::from_coeffs(ints.iter().map(|n| BigRat::from_integer(n.clone())).collect());
    let mut candidates = match (divisors(&a0), divisors(&an)) {
        (Ok(num_divs), Ok(den_divs)) => {
            let mut cands = Vec::new();
            for p_div in &num_divs {
                for q_div in &den_divs {
                    let r = BigRat::new(p_div.clone(), q_div.clone());
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
            cands
        }
        // Coefficients too large to factor: switch to modular root
        // lifting, which needs no integer factorization.
        _ => lifted_candidates(&reduced)?,
    };
    candidates.sort();
    candidates.dedup();
    for cand in candidates {
        if !reduced.eval(&cand).is_zero() {
            continue;
        }
        // Deflate to count multiplicity.
        let linear = UniPoly::from_coeffs(vec![-cand.clone(), BigRat::from_integer(1.into())]);
        let mut q = reduced.clone();
        let mut mult = 0;
        loop {
            match q.exact_div(&linear)? {
                Some(next) => {
                    mult += 1;
                    q = next;
                }
                None => break,
            }
        }
        roots.push(RationalRoot {
            value: cand,
            multiplicity: mult,
        });
    }
    roots.sort_by(|a, b| a.value.cmp(&b.value));
    Ok(roots)
}

/// Candidate rational roots of `p` without factoring any integers: take
/// the squarefree part S, scan a prime field for roots of S mod q, lift
/// each simple root q-adically (Newton doubling) past 2·|S(0)|·|lc(S)|,
/// and reconstruct u/v by the extended Euclidean algorithm. Every true
/// rational root u/v reduces to a root of S mod q (v | lc(S) is a unit
/// mod q) and is recovered; spurious candidates are weeded out by the
/// exact evaluation in the caller.
fn lifted_candidates(p: &UniPoly) -> Result<Vec<BigRat>, ExactError> {
    let g = p.gcd(&p.derivative())?;
    let s = if g.is_constant() {
        p.clone()
    } else {
        p.exact_div(&g)?.expect("gcd divides")
    };
    // primitive integer coefficients of the squarefree part
    let sints: Vec<BigInt> = {
        let mut lcm = BigInt::from(1);
        for c in s.coeffs() {
            lcm = num::integer::lcm(lcm, c.denom().clone());
        }
        let raw: Vec<BigInt> = s.coeffs().iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let content = raw
            .iter()
            .fold(BigInt::zero(), |acc, c| num::integer::gcd(acc, c.clone()));
        raw.iter().map(|c| c / &content).collect()
    };
    if sints.len() <= 1 {
        return Ok(Vec::new());
    }
    let lead = sints.last().unwrap().abs();
    let s0 = sints[0].abs();
    // unique reconstruction needs modulus > 2·numerator·denominator bounds
    let target = BigInt::from(2) * &s0 * &lead + 1;
    let sderiv: Vec<BigInt> = sints
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i as u64))
        .collect();
    // primes large enough that a residue scan is cheap but a fixed list
    // almost surely misses the (finitely many) primes dividing lc·disc
    const PRIMES: [u64; 12] = [
        100003, 100019, 100043, 100057, 100069, 100103, 100109, 100129, 100151, 100153, 100169,
        100183,
    ];
    'primes: for &q in &PRIMES {
        let smod = reduce_mod(&sints, q);
        if *smod.last().unwrap_or(&0) == 0 {
            continue; // leading coefficient vanished
        }
        if !squarefree_mod(&smod, q) {
            continue 'primes;
        }
        let mut candidates = Vec::new();
        for r in 0..q {
            if eval_mod(&smod, r, q) != 0 {
                continue;
            }
            let Some(lifted) = lift_root(&sints, &sderiv, r, q, &target) else {
                continue;
            };
            if let Some(c) = rational_reconstruct(&lifted, &modulus_past(q, &target), &s0, &lead) {
                candidates.push(c);
            }
        }
        return Ok(candidates);
    }
    Err(ExactError::DivisorEnumeration)
}

fn reduce_mod(ints: &[BigInt], q: u64) -> Vec<u64> {
    let m = BigInt::from(q);
    ints.iter()
        .map(|c| {
            let r = ((c % &m) + &m) % &m;
            num::traits::ToPrimitive::to_u64(&r).expect("residue fits")
        })
        .collect()
}

fn eval_mod(coeffs: &[u64], x: u64, q: u64) -> u64 {
    let mut acc: u64 = 0;
    for c in coeffs.iter().rev() {
        acc = ((u128::from(acc) * u128::from(x) + u128::from(*c)) % u128::from(q)) as u64;
    }
    acc
}

/// gcd(S, S') = 1 in F_q[x], i.e. S mod q is squarefree.
fn squarefree_mod(coeffs: &[u64], q: u64) -> bool {
    let deriv: Vec<u64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| ((u128::from(*c) * (i as u128 % u128::from(q))) % u128::from(q)) as u64)
        .collect();
    gcd_mod(coeffs.to_vec(), deriv, q).len() == 1
}

fn trim_mod(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn gcd_mod(a: Vec<u64>, b: Vec<u64>, q: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim_mod(a), trim_mod(b));
    while !b.is_empty() {
        let r = rem_mod(&a, &b, q);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return vec![0];
    }
    a
}

fn rem_mod(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lead = mod_pow(b[db], q - 2, q);
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = ((u128::from(r[dr]) * u128::from(inv_lead)) % u128::from(q)) as u64;
        for (i, bc) in b.iter().enumerate() {
            let sub = (u128::from(factor) * u128::from(*bc)) % u128::from(q);
            let idx = dr - db + i;
            r[idx] = ((u128::from(r[idx]) + u128::from(q) - sub) % u128::from(q)) as u64;
        }
        r = trim_mod(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn mod_pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((u128::from(acc) * u128::from(base)) % u128::from(q)) as u64;
        }
        base = ((u128::from(base) * u128::from(base)) % u128::from(q)) as u64;
        exp >>= 1;
    }
    acc
}

/// The modulus `lift_root` ends at: q squared repeatedly until ≥ target.
fn modulus_past(q: u64, target: &BigInt) -> BigInt {
    let mut m = BigInt::from(q);
    while &m < target {
        m = &m * &m;
    }
    m
}

fn eval_int_mod(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c) % m;
    }
    ((acc % m) + m) % m
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = num::Integer::extended_gcd(&(((a % m) + m) % m), m);
    if e.gcd != BigInt::from(1) {
        return None;
    }
    Some(((e.x % m) + m) % m)
}

/// Newton (q-adic) lifting of a simple root mod q to modulus ≥ target.
fn lift_root(
    sints: &[BigInt],
    sderiv: &[BigInt],
    r0: u64,
    q: u64,
    target: &BigInt,
) -> Option<BigInt> {
    let mut m = BigInt::from(q);
    let mut r = BigInt::from(r0);
    while &m < target {
        let m2 = &m * &m;
        let fr = eval_int_mod(sints, &r, &m2);
        let dfr = eval_int_mod(sderiv, &r, &m2);
        let inv = mod_inverse(&dfr, &m2)?;
        r = ((&r - fr * inv) % &m2 + &m2) % &m2;
        m = m2;
    }
    Some(r)
}

/// Wang-style rational reconstruction: the unique u/v with |u| ≤ nbound,
/// 0 < v ≤ dbound and u ≡ r·v (mod m), provided m > 2·nbound·dbound.
fn rational_reconstruct(
    r: &BigInt,
    m: &BigInt,
    nbound: &BigInt,
    dbound: &BigInt,
) -> Option<BigRat> {
    let (mut r0, mut r1) = (m.clone(), ((r % m) + m) % m);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::from(1));
    while &r1 > nbound {
        let quo = &r0 / &r1;
        let r2 = &r0 - &quo * &r1;
        let t2 = &t0 - &quo * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *dbound {
        return None;
    }
    Some(BigRat::new(r1, t1))
}

// Trial division; bails out on absurdly large inputs rather than spinning.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>, ExactError> {
    let n = n.abs();
    if n.is_zero() {
        return Ok(vec![BigInt::from(1)]);
    }
    let mut divs = Vec::new();
    let mut i = BigInt::from(1);
    let cap = BigInt::from(2_000_000u64);
    loop {
        let sq = &i * &i;
        if sq > n {
            break;
        }
        if i > cap {
            return Err(ExactError::DivisorEnumeration);
        }
        if (&n % &i).is_zero() {
            divs.push(i.clone());
            let other = &n / &i;
            if other != i {
                divs.push(other);
            }
        }
        i += 1;
    }
    divs.sort();
    Ok(divs)
}
