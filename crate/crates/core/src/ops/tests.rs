// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::synth;

#[test]
fn sampling_is_deterministic_per_seed() {
    assert_eq!(sample_operator(42), sample_operator(42));
    assert_eq!(sample_operator(42).rng_seed, 42);
}

#[test]
fn sampling_covers_operators_uniformly() {
    let mut counts = std::collections::BTreeMap::new();
    let n = 10_000u64;
    for seed in 0..n {
        *counts.entry(sample_operator(seed).id).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 10);
    for (id, c) in counts {
        let freq = c as f64 / n as f64;
        // 3-sigma binomial band around 10%, widened to the spec's 1.2%.
        assert!((freq - 0.1).abs() < 0.012, "{id}: {freq}");
    }
}

#[test]
fn sampled_parameters_stay_in_table() {
    for seed in 0..2_000u64 {
        let spec = sample_operator(seed);
        assert!(
            spec.id.parameter_set().contains(&spec.parameter),
            "{spec:?}"
        );
        if spec.id == OperatorId::A01 {
            assert!([74.0, 76.0, 78.0, 80.0, 82.0, 84.0, 86.0, 88.0]
                .contains(&spec.parameter));
        }
    }
}

#[test]
fn out_of_table_parameter_is_rejected() {
    let img = synth::flat(512, 512, 100);
    let spec = OperatorSpec { id: OperatorId::A01, parameter: 75.0, rng_seed: 0 };
    assert!(matches!(
        apply(&img, &spec),
        Err(Error::InvalidParameter { .. })
    ));
    assert!(OperatorSpec::new(OperatorId::A04, 0.8, 0).is_err());
    assert!(OperatorSpec::new(OperatorId::A04, 0.9, 0).is_ok());
}

#[test]
fn non_square_input_is_rejected() {
    let img = synth::flat(256, 256, 10);
    let spec = OperatorSpec { id: OperatorId::A03, parameter: 7.0, rng_seed: 0 };
    assert!(matches!(apply(&img, &spec), Err(Error::GeometryMismatch(_))));
}

#[test]
fn quantization_bits7_fixes_even_values() {
    let mut img = synth::flat(512, 512, 0);
    for (i, b) in img.data_mut().iter_mut().enumerate() {
        *b = ((i % 128) * 2) as u8; // all multiples of 2
    }
    let spec = OperatorSpec { id: OperatorId::A03, parameter: 7.0, rng_seed: 0 };
    assert_eq!(apply(&img, &spec).unwrap(), img);
}

#[test]
fn crop_zero_is_identity() {
    let img = synth::textured(512, 512, 11);
    let spec = OperatorSpec { id: OperatorId::A07, parameter: 0.0, rng_seed: 0 };
    assert_eq!(apply(&img, &spec).unwrap(), img);
}

#[test]
fn blur_on_impulse_matches_direct_convolution() {
    let img = synth::impulse(512, 512, 40, 255);
    let sigma = 1.35;
    let spec = OperatorSpec { id: OperatorId::A04, parameter: sigma, rng_seed: 0 };
    let fast = apply(&img, &spec).unwrap();

    // Independent oracle: brute-force 2D convolution with the sampled
    // Gaussian kernel (outer product of the 1D kernel).
    let k1 = filters::gaussian_kernel(sigma);
    let radius = (k1.len() / 2) as i64;
    let (w, h) = (img.width(), img.height());
    let reflect = |i: i64, n: usize| -> usize {
        let n = n as i64;
        let mut i = i;
        loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= n {
                i = 2 * n - i - 1;
            } else {
                return i as usize;
            }
        }
    };
    // The impulse sits at the center; checking a window around it covers
    // every nonzero response plus flat background.
    let cx = (w / 2) as i64;
    let cy = (h / 2) as i64;
    for c in 0..3 {
        let plane = img.channel_f64(c);
        for y in cy - 8..=cy + 8 {
            for x in cx - 8..=cx + 8 {
                let mut acc = 0.0;
                for (ky, &wy) in k1.iter().enumerate() {
                    for (kx, &wx) in k1.iter().enumerate() {
                        let sx = reflect(x + kx as i64 - radius, w);
                        let sy = reflect(y + ky as i64 - radius, h);
                        acc += wy * wx * plane[sy * w + sx];
                    }
                }
                let expected = acc.round().clamp(0.0, 255.0) as i16;
                let got = fast.get(x as usize, y as usize, c) as i16;
                assert!(
                    (expected - got).abs() <= 1,
                    "({x},{y},{c}): {expected} vs {got}"
                );
            }
        }
    }
}

#[test]
fn all_operators_preserve_geometry_and_are_deterministic() {
    let img = synth::textured(512, 512, 21);
    for id in ALL_OPERATORS {
        let parameter = id.parameter_set()[0];
        let spec = OperatorSpec { id, parameter, rng_seed: 5 };
        let a = apply(&img, &spec).unwrap();
        assert_eq!(a.width(), 512, "{id}");
        assert_eq!(a.height(), 512, "{id}");
        let b = apply(&img, &spec).unwrap();
        assert_eq!(a, b, "{id} not deterministic");
    }
}

#[test]
fn operators_are_lightweight_on_natural_fixture() {
    let img = synth::textured(512, 512, 33);
    for id in ALL_OPERATORS {
        let parameter = *id.parameter_set().last().unwrap();
        let spec = OperatorSpec { id, parameter, rng_seed: 5 };
        let out = apply(&img, &spec).unwrap();
        let stats = distortion_stats(&img, &out).unwrap();
        assert!(stats.psnr.is_finite(), "{id}");
        assert!(stats.psnr > 15.0, "{id}: psnr {}", stats.psnr);
    }
}

#[test]
fn jpeg_quality_ladder_is_monotone() {
    let img = synth::textured(512, 512, 13);
    let mut last = f64::INFINITY;
    for q in [88.0, 82.0, 76.0, 74.0] {
        let spec = OperatorSpec { id: OperatorId::A01, parameter: q, rng_seed: 0 };
        let out = apply(&img, &spec).unwrap();
        let psnr = distortion_stats(&img, &out).unwrap().psnr;
        assert!(psnr <= last, "q={q}: {psnr} > {last}");
        last = psnr;
    }
}

#[test]
fn grayscale_probe_is_identity_on_gray() {
    let img = color::grayscale_bt601(&synth::textured(512, 512, 7));
    let probed = apply_probe(&img, ChannelProbe::Grayscale).unwrap();
    assert_eq!(probed, img);
}

#[test]
fn container_probes_do_not_touch_pixels() {
    let img = synth::textured(512, 512, 8);
    assert_eq!(apply_probe(&img, ChannelProbe::Bmp).unwrap(), img);
    assert_eq!(apply_probe(&img, ChannelProbe::CanonicalPng).unwrap(), img);
    // Re-encoded BMP size is a constant of geometry.
    let n1 = crate::imageio::encode_bmp(&img).len();
    let n2 = crate::imageio::encode_bmp(&synth::flat(512, 512, 3)).len();
    assert_eq!(n1, n2);
}

#[test]
fn social_media_probe_is_gentle_on_flat_gray() {
    let img = synth::flat(512, 512, 128);
    let probed = apply_probe(&img, ChannelProbe::SocialMedia).unwrap();
    let stats = distortion_stats(&img, &probed).unwrap();
    assert!(stats.psnr > 45.0, "psnr {}", stats.psnr);
}

#[test]
fn distortion_stats_identity_and_counting() {
    let img = synth::textured(512, 512, 3);
    let stats = distortion_stats(&img, &img).unwrap();
    assert!(stats.psnr.is_infinite());
    assert_eq!(stats.mean_abs_diff, 0.0);
    assert_eq!(stats.changed_fraction, 0.0);

    let mut tweaked = img.clone();
    let old = tweaked.get(100, 200, 1);
    tweaked.set(100, 200, 1, old.wrapping_add(1));
    let stats = distortion_stats(&img, &tweaked).unwrap();
    assert_eq!(stats.changed_fraction, 1.0 / (512.0 * 512.0));

    let small = synth::flat(16, 16, 0);
    assert!(matches!(
        distortion_stats(&img, &small),
        Err(Error::GeometryMismatch(_))
    ));
}
