use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texstego::io::png::quantize;
use texstego::io::{
    decode_key, decode_matrix, decode_stego, encode_key, encode_matrix, encode_stego, export_png,
    import_png, PngDepth,
};
use texstego::{
    dwt2, embed, idwt2, pack_texture, psnr, unpack_texture, EmbedParams, FloatImage, FloatImage32,
    Image, Mat,
};

fn random_image(h: usize, w: usize, peak: f64, seed: u64) -> FloatImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..h * w * 3).map(|_| rng.gen_range(0.0..=peak)).collect();
    Image::from_interleaved(h, w, &samples, peak).unwrap()
}

fn energy(img: &FloatImage) -> f64 {
    img.to_interleaved().iter().map(|v| v * v).sum()
}

fn rel_diff(a: &FloatImage, b: &FloatImage) -> f64 {
    let num: f64 = a
        .to_interleaved()
        .iter()
        .zip(b.to_interleaved())
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    (num / energy(b).max(f64::MIN_POSITIVE)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wavelet_perfect_reconstruction_and_energy(hh in 1usize..=32, hw in 1usize..=32, seed in any::<u64>()) {
        let img = random_image(2 * hh, 2 * hw, 255.0, seed);
        let bands = dwt2(&img).unwrap();
        prop_assert_eq!(bands.dims(), (hh, hw));
        let back = idwt2(&bands).unwrap();
        prop_assert!(rel_diff(&back, &img) < 1e-12);
        let e = energy(&img);
        prop_assert!((bands.energy() - e).abs() <= 1e-10 * e);
    }

    #[test]
    fn wavelet_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let x = random_image(8, 6, 1.0, seed);
        let y = random_image(8, 6, 1.0, seed.wrapping_add(1));
        let mix: Vec<f64> = x.to_interleaved().iter().zip(y.to_interleaved()).map(|(p, q)| a * p + b * q).collect();
        let mixed = Image::from_interleaved(8, 6, &mix, 1.0).unwrap();
        let lhs = dwt2(&mixed).unwrap();
        let (bx, by) = (dwt2(&x).unwrap(), dwt2(&y).unwrap());
        for ch in 0..3 {
            for (l, (p, q)) in lhs.diagonal[ch].as_slice().iter()
                .zip(bx.diagonal[ch].as_slice().iter().zip(by.diagonal[ch].as_slice()))
            {
                prop_assert!((l - (a * p + b * q)).abs() < 1e-12);
            }
            for (l, (p, q)) in lhs.approx[ch].as_slice().iter()
                .zip(bx.approx[ch].as_slice().iter().zip(by.approx[ch].as_slice()))
            {
                prop_assert!((l - (a * p + b * q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pack_unpack_identity(n in 1usize..100_000, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Mat::from_fn(n, 3, |_, _| rng.gen_range(-1e3..1e3));
        let packed = pack_texture(&t).unwrap();
        prop_assert_eq!(packed.side * packed.side, n + packed.pad_count);
        prop_assert!(packed.pad_count < 2 * packed.side - 1 || packed.side == 1);
        prop_assert_eq!(unpack_texture(&packed).unwrap(), t);
    }

    #[test]
    fn packed_planes_are_finite(n in 1usize..200, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specials = [f64::NAN, f64::INFINITY, f64::NEG_INFINITY];
        let t = Mat::from_fn(n, 3, |_, _| if rng.gen_bool(0.2) { specials[rng.gen_range(0..3)] } else { rng.gen() });
        let packed = pack_texture(&t).unwrap();
        prop_assert!(packed.planes.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn matrix_file_round_trip(rows in 1usize..20, cols in 1usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Arbitrary bit patterns, NaN payloads included; compare bytes.
        let m = Mat::from_fn(rows, cols, |_, _| f64::from_bits(rng.gen()));
        let bytes = encode_matrix(&m).unwrap();
        let back = decode_matrix(&bytes).unwrap();
        prop_assert_eq!(encode_matrix(&back).unwrap(), bytes);
    }

    #[test]
    fn stego_container_round_trip(h in 1usize..12, w in 1usize..12, seed in any::<u64>()) {
        let img = random_image(h, w, 65535.0, seed).map(|v| v / 3.0 - 7.0);
        let bytes = encode_stego(&img);
        let back = decode_stego(&bytes).unwrap();
        prop_assert_eq!(encode_stego(&back), bytes);
        prop_assert_eq!(back, img);
    }

    #[test]
    fn psnr_symmetric_and_scale_invariant(seed in any::<u64>(), k in 0.01f64..100.0) {
        let a = random_image(6, 4, 255.0, seed);
        let b = random_image(6, 4, 255.0, seed ^ 0xdead);
        let ab = psnr(&a, &b).unwrap();
        prop_assert_eq!(ab, psnr(&b, &a).unwrap());
        let sa = a.map(|v| v * k).with_peak(255.0 * k).unwrap();
        let sb = b.map(|v| v * k).with_peak(255.0 * k).unwrap();
        prop_assert!((psnr(&sa, &sb).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn png_export_error_within_half_step(seed in any::<u64>(), sixteen in any::<bool>()) {
        let depth = if sixteen { PngDepth::Sixteen } else { PngDepth::Eight };
        let peak = depth.max_value();
        let img = random_image(3, 5, peak, seed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        export_png(&img, depth, &path).unwrap();
        let back = import_png(&path).unwrap();
        for (a, b) in img.to_interleaved().iter().zip(back.to_interleaved()) {
            prop_assert!((a - b).abs() <= 0.5);
            prop_assert_eq!(quantize(*a, peak, depth), b);
        }
    }
}

#[test]
fn key_file_round_trip() {
    let cover = random_image(12, 12, 255.0, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = Mat::from_fn(33, 3, |_, _| rng.gen_range(0.0..255.0));
    let key = embed(&cover, &t, EmbedParams::default()).unwrap().key;
    let bytes = encode_key(&key);
    let back = decode_key(&bytes).unwrap();
    assert_eq!(encode_key(&back), bytes);
    assert_eq!(back, key);
}

#[test]
fn single_precision_wavelet_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<f32> = (0..16 * 16 * 3).map(|_| rng.gen_range(0.0..1.0)).collect();
    let img = FloatImage32::from_interleaved(16, 16, &samples, 1.0).unwrap();
    let back = idwt2(&dwt2(&img).unwrap()).unwrap();
    for (a, b) in back.to_interleaved().iter().zip(&samples) {
        assert!((a - b).abs() < 1e-6);
    }
}
