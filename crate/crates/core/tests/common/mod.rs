// SPDX-License-Identifier: Apache-2.0

//! Big-integer reference model, written straight from the equations and
//! sharing no code with the library's fixed-width arithmetic.

#![allow(dead_code)]

use num_bigint::BigUint;
use umap::Word96;

pub struct Big {
    modulus: BigUint,
}

pub type B = BigUint;

impl Big {
    pub fn new() -> Self {
        Big {
            modulus: BigUint::from(1u8) << 96usize,
        }
    }

    pub fn pi(&self) -> B {
        BigUint::parse_bytes(b"3243F6A8885A308D313198A2", 16).unwrap()
    }

    pub fn of(&self, w: Word96) -> B {
        BigUint::parse_bytes(w.to_hex().as_bytes(), 16).unwrap()
    }

    pub fn word(&self, b: &B) -> Word96 {
        let hex = format!("{:0>24}", b.to_str_radix(16));
        hex.parse().unwrap()
    }

    pub fn add(&self, xs: &[&B]) -> B {
        let mut s = BigUint::from(0u8);
        for x in xs {
            s += *x;
        }
        s % &self.modulus
    }

    pub fn sub(&self, a: &B, b: &B) -> B {
        (a + &self.modulus - (b % &self.modulus)) % &self.modulus
    }

    pub fn rot(&self, x: &B, y: &B) -> B {
        let r = (y % 96u32).to_u32_digits().first().copied().unwrap_or(0) as usize;
        if r == 0 {
            return x.clone();
        }
        ((x << r) % &self.modulus) + (x >> (96 - r))
    }

    pub fn rotr(&self, x: &B, y: &B) -> B {
        let r = (y % 96u32).to_u32_digits().first().copied().unwrap_or(0) as usize;
        if r == 0 {
            return x.clone();
        }
        ((x << (96 - r)) % &self.modulus) + (x >> r)
    }

    pub fn mix_orig(&self, x: &B, y: &B) -> B {
        let mut z = x.clone();
        for _ in 0..32 {
            z = ((&z >> 1usize) + &z + &z + y) % &self.modulus;
        }
        z
    }

    pub fn mix_mod(&self, x: &B, y: &B) -> B {
        let mut z = x.clone();
        for i in 0..32u32 {
            z = ((&z + BigUint::from(i)) + &z + &z + y) % &self.modulus;
        }
        z
    }
}

pub struct RefSession {
    pub a: Word96,
    pub b: Word96,
    pub c: Word96,
    pub d: Word96,
    pub n3: Word96,
    pub n1p: Word96,
    pub n2p: Word96,
    pub k1s: Word96,
    pub k2s: Word96,
    pub ids_next: Word96,
    pub k1_next: Word96,
    pub k2_next: Word96,
}

/// Gossamer (either variant) as written, one equation per line.
#[allow(clippy::too_many_arguments)]
pub fn gossamer_ref(
    ids: Word96,
    k1: Word96,
    k2: Word96,
    id: Word96,
    n1: Word96,
    n2: Word96,
    modified: bool,
) -> RefSession {
    let m = Big::new();
    let (ids, k1, k2, id, n1, n2) = (m.of(ids), m.of(k1), m.of(k2), m.of(id), m.of(n1), m.of(n2));
    let pi = m.pi();
    let mix = |x: &B, y: &B| {
        if modified {
            m.mix_mod(x, y)
        } else {
            m.mix_orig(x, y)
        }
    };

    let (a_amt, b_amt) = if modified { (&n2, &n1) } else { (&k1, &k2) };
    let a = m.rot(
        &m.add(&[&m.rot(&m.add(&[&ids, &k1, &pi, &n1]), &k2), &k1]),
        a_amt,
    );
    let b = m.rot(
        &m.add(&[&m.rot(&m.add(&[&ids, &k2, &pi, &n2]), &k1), &k2]),
        b_amt,
    );
    let n3 = mix(&n1, &n2);
    let (ra, rb) = if modified { (&k1, &k2) } else { (&n1, &n2) };
    let k1s = m.rot(
        &(m.add(&[&m.rot(&m.add(&[&n2, &k1, &pi, &n3]), &n2), &k2]) ^ &n3),
        ra,
    ) ^ &n3;
    let k2s = m.add(&[
        &m.rot(
            &m.add(&[&m.rot(&m.add(&[&n1, &k2, &pi, &n3]), &n1), &k1, &n3]),
            rb,
        ),
        &n3,
    ]);
    let n1p = mix(&n3, &n2);
    let rc = if modified { &k2s } else { &n2 };
    let c = m.rot(
        &(m.add(&[&m.rot(&m.add(&[&n3, &k1s, &pi, &n1p]), &n3), &k2s]) ^ &n1p),
        rc,
    ) ^ &n1p;
    let rd = if modified { &k1s } else { &n3 };
    let d = m.add(&[
        &m.rot(
            &m.add(&[&m.rot(&m.add(&[&n2, &k2s, &id, &n1p]), &n2), &k1s, &n1p]),
            rd,
        ),
        &n1p,
    ]);
    let n2p = mix(&n1p, &n3);
    let (r_ids, r_k1, r_k2) = if modified {
        (&k1s, &k1s, &k2s)
    } else {
        (&n3, &n2, &n1p)
    };
    let ids_next = m.rot(
        &(m.add(&[&m.rot(&m.add(&[&n1p, &k1s, &ids, &n2p]), &n1p), &k2s]) ^ &n2p),
        r_ids,
    ) ^ &n2p;
    let k1_next = m.add(&[
        &m.rot(
            &m.add(&[&m.rot(&m.add(&[&n3, &k2s, &pi, &n2p]), &n3), &k1s, &n2p]),
            r_k1,
        ),
        &n2p,
    ]);
    let k2_next = m.add(&[
        &m.rot(
            &m.add(&[
                &m.rot(&m.add(&[&ids_next, &k2s, &pi, &k1_next]), &ids_next),
                &k1s,
                &k1_next,
            ]),
            r_k2,
        ),
        &k1_next,
    ]);
    RefSession {
        a: m.word(&a),
        b: m.word(&b),
        c: m.word(&c),
        d: m.word(&d),
        n3: m.word(&n3),
        n1p: m.word(&n1p),
        n2p: m.word(&n2p),
        k1s: m.word(&k1s),
        k2s: m.word(&k2s),
        ids_next: m.word(&ids_next),
        k1_next: m.word(&k1_next),
        k2_next: m.word(&k2_next),
    }
}

pub struct SasiRef {
    pub a: Word96,
    pub b: Word96,
    pub c: Word96,
    pub d: Word96,
    pub k1p: Word96,
    pub k2p: Word96,
    pub ids_next: Word96,
}

pub fn sasi_ref(
    ids: Word96,
    k1: Word96,
    k2: Word96,
    id: Word96,
    n1: Word96,
    n2: Word96,
) -> SasiRef {
    let m = Big::new();
    let (ids, k1, k2, id, n1, n2) = (m.of(ids), m.of(k1), m.of(k2), m.of(id), m.of(n1), m.of(n2));
    let a = &ids ^ &k1 ^ &n1;
    let b = m.add(&[&(&ids | &k2), &n2]);
    let k1p = m.rot(&(&k1 ^ &n2), &k1);
    let k2p = m.rot(&(&k2 ^ &n1), &k2);
    let c = m.add(&[&(&k1 ^ &k2p), &(&k2 ^ &k1p)]);
    let d = m.add(&[&k2p, &id]) ^ ((&k1 ^ &k2) | &k1p);
    let ids_next = m.add(&[&ids, &id]) ^ (&n2 ^ &k1p);
    SasiRef {
        a: m.word(&a),
        b: m.word(&b),
        c: m.word(&c),
        d: m.word(&d),
        k1p: m.word(&k1p),
        k2p: m.word(&k2p),
        ids_next: m.word(&ids_next),
    }
}
