// SPDX-License-Identifier: Apache-2.0

use umap::simulator::{streams, NonceStream};

#[test]
fn word_residues_are_uniform_mod_96() {
    let mut rng = NonceStream::with_stream(20_240_601, streams::NONCES);
    let n = 1_000_000u64;
    let mut counts = [0u64; 96];
    for _ in 0..n {
        counts[rng.next_word().mod96() as usize] += 1;
    }
    let expected = n as f64 / 96.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = 95.0f64;
    let sigma = (2.0 * dof).sqrt();
    assert!(
        (chi2 - dof).abs() <= 3.0 * sigma,
        "chi2 = {chi2:.1}, dof = {dof}"
    );
}

#[test]
fn multiples_of_96_are_multiples() {
    let mut rng = NonceStream::new(7);
    assert!((0..10_000).all(|_| rng.multiple_of_96().mod96() == 0));
}

#[test]
fn streams_are_independent() {
    let a: Vec<_> = NonceStream::with_stream(1, streams::NONCES)
        .take(4)
        .collect();
    let b: Vec<_> = NonceStream::with_stream(1, streams::PROVISION)
        .take(4)
        .collect();
    assert_ne!(a, b);
    let again: Vec<_> = NonceStream::with_stream(1, streams::NONCES)
        .take(4)
        .collect();
    assert_eq!(a, again);
}
