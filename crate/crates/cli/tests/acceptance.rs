//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness, so the lines are always shown:
//! `cargo test -p texstego-cli --test acceptance`.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texstego::morphable::vectorize;
use texstego::texture_codec::plane_side;
use texstego::{
    build_basis, combine_average, combine_faces, dwt2, embed, extract, idwt2, linear_combine,
    pack_texture, pca_fit, psnr, reexpress, svd, synth_dataset, unpack_texture, AlsOptions,
    EmbedParams, FloatImage, Image, Mat, MissingPolicy,
};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_image(h: usize, w: usize, peak: f64, rng: &mut ChaCha8Rng) -> FloatImage {
    let samples: Vec<f64> = (0..h * w * 3).map(|_| rng.gen_range(0.0..=peak)).collect();
    Image::from_interleaved(h, w, &samples, peak).unwrap()
}

fn random_texture(rows: usize, scale: f64, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(rows, 3, |_, _| rng.gen_range(0.0..=scale))
}

fn worst_plane_error(got: &Mat, want: &Mat) -> f64 {
    (0..3)
        .map(|ch| {
            let (g, w) = (got.column(ch), want.column(ch));
            let num: f64 = g.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum();
            let den: f64 = w.iter().map(|b| b * b).sum();
            (num / den).sqrt()
        })
        .fold(0.0, f64::max)
}

fn image_rel_diff(a: &FloatImage, b: &FloatImage) -> f64 {
    let (a, b) = (a.to_interleaved(), b.to_interleaved());
    let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// 16-bit cover whose diagonal subband is `Q1·diag(40·(side − k))·Q2ᵀ` in
/// every channel: consecutive singular values 40 apart.
fn gap_dominant_cover(side: usize, rng: &mut ChaCha8Rng) -> FloatImage {
    let mut orth = || svd(&Mat::from_fn(side, side, |_, _| rng.gen_range(-1.0..1.0))).unwrap().u;
    let (q1, q2) = (orth(), orth());
    let sigma: Vec<f64> = (0..side).map(|k| 40.0 * (side - k) as f64).collect();
    let cd = Mat::from_svd_parts(&q1, &sigma, &q2);
    let flat = Image::filled(2 * side, 2 * side, 32768.0, 65535.0).unwrap();
    let mut bands = dwt2(&flat).unwrap();
    for ch in 0..3 {
        bands.diagonal[ch] = cd.clone();
    }
    idwt2(&bands).unwrap()
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let side = 232;
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for trial in 0..3 {
        let cover = gap_dominant_cover(side, &mut rng);
        let texture = random_texture(53490, 1.0, &mut rng);
        let start = Instant::now();
        let res = embed(&cover, &texture, EmbedParams::default()).map_err(|e| e.to_string())?;
        let back = extract(&res.stego, &res.key).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        if !res.warnings.is_empty() {
            return Err(format!("trial {trial}: fixture not gap-dominant: {:?}", res.warnings[0]));
        }
        worst = worst.max(worst_plane_error(&back, &texture));
    }
    ensure(
        worst <= 1e-8 && slowest <= Duration::from_secs(5),
        format!("3 gap-dominant 464x464 fixtures, max plane error {worst:.2e} (<= 1e-8), slowest embed+extract {slowest:.2?} (<= 5 s)"),
    )
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let texture = random_texture(53490, 255.0, &mut rng);
    let covers: Vec<FloatImage> = (0..3).map(|_| random_image(464, 464, 65535.0, &mut rng)).collect();
    let mut values = Vec::new();
    for cover in &covers {
        let res = embed(cover, &texture, EmbedParams::default()).map_err(|e| e.to_string())?;
        values.push(res.psnr_db);
    }
    let mut by_alpha = Vec::new();
    for alpha in [0.01, 0.05, 0.1, 0.5] {
        let res = embed(&covers[0], &texture, EmbedParams::with_alpha(alpha)).map_err(|e| e.to_string())?;
        by_alpha.push(res.psnr_db);
    }
    // Reported only: the same texture in an 8-bit cover.
    let eight_bit = random_image(464, 464, 255.0, &mut rng);
    let reference = embed(&eight_bit, &texture, EmbedParams::default()).map_err(|e| e.to_string())?.psnr_db;
    let monotone = by_alpha.windows(2).all(|w| w[0] > w[1]);
    let floor = values.iter().all(|&v| v >= 70.0);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ");
    ensure(
        floor && monotone,
        format!(
            "16-bit covers, [0,255] texture, alpha 0.1: PSNR [{}] dB (>= 70); alpha 0.01..0.5: [{}] dB, strictly decreasing: {monotone}; 8-bit cover for reference {reference:.2} dB",
            fmt(&values),
            fmt(&by_alpha)
        ),
    )
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for peak in [255.0, 65535.0] {
        let cover = random_image(464, 464, peak, &mut rng);
        let zero = Mat::zeros(53490, 3);
        let res = embed(&cover, &zero, EmbedParams::default()).map_err(|e| e.to_string())?;
        worst = worst.max(image_rel_diff(&res.stego, &cover));
    }
    ensure(worst <= 1e-12, format!("all-zero texture, relative stego-cover difference {worst:.2e} (<= 1e-12)"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let images: Vec<FloatImage> = (0..100)
        .map(|_| {
            let h = 2 * rng.gen_range(1..=32);
            let w = 2 * rng.gen_range(1..=32);
            random_image(h, w, 255.0, &mut rng)
        })
        .collect();
    let start = Instant::now();
    let (mut recon, mut energy) = (0.0f64, 0.0f64);
    for img in &images {
        let bands = dwt2(img).map_err(|e| e.to_string())?;
        let back = idwt2(&bands).map_err(|e| e.to_string())?;
        recon = recon.max(image_rel_diff(&back, img));
        let e: f64 = img.to_interleaved().iter().map(|v| v * v).sum();
        energy = energy.max((bands.energy() - e).abs() / e);
    }
    let elapsed = start.elapsed();
    ensure(
        recon <= 1e-12 && energy <= 1e-10 && elapsed <= Duration::from_secs(2),
        format!("100 images 2..64: reconstruction {recon:.2e} (<= 1e-12), energy {energy:.2e} (<= 1e-10), {elapsed:.2?} (<= 2 s)"),
    )
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    // Samples in [0, 254] so that a + 1 stays in range at S = 255.
    let a = random_image(16, 16, 254.0, &mut rng).map(f64::round).with_peak(255.0).unwrap();
    let b = a.map(|v| v + 1.0);
    let got = psnr(&a, &b).map_err(|e| e.to_string())?;
    let want = 20.0 * 255.0f64.log10();
    ensure(
        (got - want).abs() <= 1e-3 && (got - 48.1308).abs() <= 1e-3,
        format!("unit difference at S=255: {got:.6} dB vs 20*log10(255) = {want:.6} (tol 1e-3)"),
    )
}

fn criterion_6() -> Check {
    let t = Mat::zeros(53490, 3);
    let packed = pack_texture(&t).map_err(|e| e.to_string())?;
    if packed.side != 232 || packed.pad_count != 334 {
        return Err(format!("N=53490 gave side {} pad {}", packed.side, packed.pad_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=60_000);
        let t = Mat::from_fn(n, 3, |_, _| rng.gen_range(-1e3..1e3));
        let p = pack_texture(&t).map_err(|e| e.to_string())?;
        if p.side != plane_side(n) || p.side * p.side != n + p.pad_count {
            return Err(format!("N={n}: side {} pad {}", p.side, p.pad_count));
        }
        if unpack_texture(&p).map_err(|e| e.to_string())? != t {
            return Err(format!("N={n}: round trip differs"));
        }
    }
    Ok("N=53490 -> side 232, pad 334; 1000 random N in 1..=60000 round-trip exactly".into())
}

fn covariance_eigenvalues(samples: &[Mat]) -> Vec<f64> {
    let m = samples.len();
    let vecs: Vec<Vec<f64>> = samples.iter().map(vectorize).collect();
    let len = vecs[0].len();
    let mean: Vec<f64> = (0..len).map(|r| vecs.iter().map(|v| v[r]).sum::<f64>() / m as f64).collect();
    let a = DMatrix::from_fn(len, m, |r, c| vecs[c][r] - mean[r]);
    let cov = &a * a.transpose() / m as f64;
    let mut eig: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().copied().collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut recon, mut self_map) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = rng.gen_range(3..200);
        let data = Mat::from_fn(n, 3, |_, _| rng.gen_range(-100.0..100.0));
        let model = pca_fit(&data, MissingPolicy::None).map_err(|e| e.to_string())?;
        let norm = data.frobenius_norm();
        recon = recon.max(model.reconstruct().sub(&data).unwrap().frobenius_norm() / norm);
        let back = reexpress(&model, &model).map_err(|e| e.to_string())?;
        self_map = self_map.max(back.sub(&data).unwrap().frobenius_norm() / norm);
    }

    let mut eig = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(2..=8);
        let samples: Vec<Mat> = (0..m).map(|_| Mat::from_fn(n, 3, |_, _| rng.gen_range(-10.0..10.0))).collect();
        let ours = build_basis(&samples).map_err(|e| e.to_string())?.eigenvalues();
        for (i, want) in covariance_eigenvalues(&samples).iter().enumerate() {
            eig = eig.max((ours.get(i).copied().unwrap_or(0.0) - want).abs());
        }
    }

    let mut als = 0.0f64;
    for _ in 0..5 {
        let left = Mat::from_fn(300, 2, |_, _| rng.gen_range(-5.0..5.0));
        let right = Mat::from_fn(2, 3, |_, _| rng.gen_range(-2.0..2.0));
        let truth = left.matmul(&right).unwrap().map(|v| v + 7.0);
        let mut masked = truth.clone();
        for v in masked.as_mut_slice() {
            if rng.gen_bool(0.05) {
                *v = f64::NAN;
            }
        }
        let model = pca_fit(&masked, MissingPolicy::Als(AlsOptions::default())).map_err(|e| e.to_string())?;
        let fit = model.reconstruct();
        for (i, m) in masked.as_slice().iter().enumerate() {
            if m.is_finite() {
                als = als.max((fit.as_slice()[i] - truth.as_slice()[i]).abs());
            }
        }
    }

    ensure(
        recon <= 1e-9 && self_map <= 1e-9 && eig <= 1e-9 && als <= 1e-6,
        format!(
            "reconstruction {recon:.2e}, reexpress-to-self {self_map:.2e} (<= 1e-9); eigenvalues vs dense covariance {eig:.2e} (<= 1e-9); ALS observed entries {als:.2e} (<= 1e-6)"
        ),
    )
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..100 {
        let n = rng.gen_range(1..500);
        let a = Mat::from_fn(n, 3, |_, _| rng.gen_range(-300.0..300.0));
        let b = Mat::from_fn(n, 3, |_, _| rng.gen_range(-300.0..300.0));
        let avg = combine_average(&a, &b).map_err(|e| e.to_string())?;
        let lin = linear_combine(&[a, b], &[0.5, 0.5]).map_err(|e| e.to_string())?;
        if avg != lin {
            return Err("combine_average differs from linear_combine(1/2, 1/2)".into());
        }
    }
    let mut details = Vec::new();
    for seed in [1, 2, 3] {
        let faces = synth_dataset::<f64>(seed, 2000, 2).map_err(|e| e.to_string())?;
        let (a, b) = (&faces[0].texture, &faces[1].texture);
        let c = combine_faces(a, b, MissingPolicy::None).map_err(|e| e.to_string())?.combined;
        let dist = |x: &Mat, y: &Mat| x.sub(y).unwrap().frobenius_norm();
        let (da, db, dab) = (dist(&c, a), dist(&c, b), dist(a, b));
        if !(da < dab && db < dab) {
            return Err(format!("seed {seed}: d(c,a) {da:.1}, d(c,b) {db:.1}, d(a,b) {dab:.1}"));
        }
        details.push(format!("{da:.0}/{db:.0} < {dab:.0}"));
    }
    Ok(format!(
        "average == linear_combine(1/2,1/2) exactly on 100 pairs; synthetic faces d(c,a)/d(c,b) < d(a,b): {}",
        details.join(", ")
    ))
}

/// Runs a fixed CLI session in `dir`; returns stdout and every file written.
fn cli_session(dir: &Path) -> (Vec<String>, Vec<(String, Vec<u8>)>) {
    let d = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let data = d("data");
    let sessions: Vec<Vec<String>> = vec![
        vec!["--seed", "42", "synth", "--vertices", "2000", "--samples", "3", "--cover", "--out", &data],
        vec!["embed", "--cover", &format!("{data}/cover.png"), "--texture", &format!("{data}/texture_000.txm"), "--out", &d("s.stg"), "--key", &d("k.key")],
        vec!["extract", "--stego", &d("s.stg"), "--key", &d("k.key"), "--out", &d("t.txm")],
        vec!["combine", "--texture", &format!("{data}/texture_000.txm"), "--texture", &format!("{data}/texture_001.txm"), "--out", &d("comb")],
        vec!["pca-fit", "--texture", &format!("{data}/texture_002.txm"), "--out", &d("m.pca")],
        vec!["psnr", "--a", &format!("{data}/cover.png"), "--b", &d("s.stg")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(str::to_owned).collect())
    .collect();

    let mut stdout = Vec::new();
    for args in sessions {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("texstego".to_owned()).chain(args);
        let code = texstego_cli::run_with_config_env(argv, None, &mut out, &mut err);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        stdout.push(String::from_utf8(out).unwrap().replace(dir.to_str().unwrap(), "<dir>"));
    }

    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        for entry in std::fs::read_dir(&p).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    (stdout, files)
}

fn criterion_9() -> Check {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = cli_session(a.path());
    let second = cli_session(b.path());
    let bytes: usize = first.1.iter().map(|(_, b)| b.len()).sum();
    ensure(
        first == second,
        format!("two seeded runs of synth/embed/extract/combine/pca-fit/psnr: {} files, {bytes} bytes, stdout and files identical: {}", first.1.len(), first == second),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("round-trip fidelity", criterion_1),
        ("PSNR magnitude", criterion_2),
        ("zero-texture neutrality", criterion_3),
        ("wavelet correctness", criterion_4),
        ("PSNR formula", criterion_5),
        ("packing", criterion_6),
        ("PCA suite", criterion_7),
        ("combination behaviour", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {} FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
