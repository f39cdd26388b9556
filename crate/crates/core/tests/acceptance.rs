//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every oracle here is written independently of the library internals:
//! rasterization by point-in-polygon, distances by brute force, smoothing by
//! a dense 2-D kernel.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use eff_core::blend::{blend, ResizePolicy};
use eff_core::eval::{
    aggregate_corpus, evaluate_scene, spillover_decision, text_similarity, OcrMode, SceneReport,
    SpillWeighting,
};
use eff_core::field::{build_decay, build_field, distance_transform, FidelityField};
use eff_core::harness::{
    cmd_run, cmd_sweep, generate_corpus, generate_synthetic, write_corpus, CorpusSpec,
    PipelineOptions, SweepSpec, SyntheticSceneSpec,
};
use eff_core::scene::{
    pad_mask, rasterize_quad, BinaryMask, FieldConfig, Manifest, Quad, RasterImage, Role,
    SceneSpec, TextRegion,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    check(
        elapsed < limit,
        String::new(),
        format!("took {elapsed:.2?}, limit {limit:?}"),
    )
}

// ---------------------------------------------------------------------------
// oracles

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    cross.abs() <= 1e-9 * len.max(1.0)
        && p[0] >= a[0].min(b[0]) - 1e-9
        && p[0] <= a[0].max(b[0]) + 1e-9
        && p[1] >= a[1].min(b[1]) - 1e-9
        && p[1] <= a[1].max(b[1]) + 1e-9
}

fn inside_quad(q: &Quad, p: [f64; 2]) -> bool {
    let v: Vec<[f64; 2]> = q.points().iter().map(|pt| [pt.x, pt.y]).collect();
    if (0..4).any(|i| on_segment(v[i], v[(i + 1) % 4], p)) {
        return true;
    }
    let mut inside = false;
    let mut j = 3;
    for i in 0..4 {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1])
            && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn oracle_raster(q: &Quad, w: usize, h: usize) -> Vec<bool> {
    (0..w * h)
        .map(|i| inside_quad(q, [(i % w) as f64 + 0.5, (i / w) as f64 + 0.5]))
        .collect()
}

/// Distance from every pixel to the nearest set pixel, by exhaustive search.
fn brute_distance(bits: &[bool], w: usize, h: usize) -> Vec<f64> {
    let set: Vec<(f64, f64)> = (0..w * h)
        .filter(|&i| bits[i])
        .map(|i| ((i % w) as f64, (i / w) as f64))
        .collect();
    (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            set.iter()
                .map(|&(sx, sy)| ((x - sx).powi(2) + (y - sy).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn brute_pad(bits: &[bool], w: usize, h: usize, pad: f64) -> Vec<bool> {
    brute_distance(bits, w, h)
        .iter()
        .map(|&d| d <= pad + 1e-9)
        .collect()
}

/// Dense 2-D Gaussian with replicate edges.
fn dense_smooth(values: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return values.to_vec();
    }
    let r = (3.0 * sigma).ceil() as i64;
    let mut taps = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            taps.push((
                dx,
                dy,
                (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp(),
            ));
        }
    }
    let norm: f64 = taps.iter().map(|t| t.2).sum();
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for &(dx, dy, k) in &taps {
                let sx = (x + dx).clamp(0, w as i64 - 1) as usize;
                let sy = (y + dy).clamp(0, h as i64 - 1) as usize;
                acc += k * values[sy * w + sx];
            }
            out[y as usize * w + x as usize] = acc / norm;
        }
    }
    out
}

fn naive_field(scene: &SceneSpec, cfg: &FieldConfig, w: usize, h: usize) -> Vec<f64> {
    let target = scene
        .regions
        .iter()
        .find(|r| r.role == Role::Target)
        .unwrap();
    let core = brute_pad(&oracle_raster(&target.quad, w, h), w, h, cfg.pad_core);
    let dist = brute_distance(&core, w, h);
    let diag = ((w * w + h * h) as f64).sqrt();

    let mut locked = vec![false; w * h];
    for r in scene.regions.iter().filter(|r| r.role == Role::NonTarget) {
        let padded = brute_pad(&oracle_raster(&r.quad, w, h), w, h, cfg.pad_protect);
        for (l, p) in locked.iter_mut().zip(padded) {
            *l |= p;
        }
    }
    let combined: Vec<f64> = (0..w * h)
        .map(|i| {
            let core_w = if core[i] { 1.0 } else { 0.0 };
            let decay = (-dist[i] / (cfg.sigma * diag)).exp();
            let protect = if locked[i] { 0.0 } else { 1.0 };
            f64::max(core_w, decay) * protect
        })
        .collect();
    dense_smooth(&combined, w, h, cfg.smooth_sigma)
        .into_iter()
        .zip(&locked)
        .map(|(v, &l)| if l { 0.0 } else { v.clamp(0.0, 1.0) })
        .collect()
}

fn random_quad(rng: &mut ChaCha8Rng, w: f64, h: f64) -> Quad {
    let cx = rng.random_range(8.0..w - 8.0);
    let cy = rng.random_range(8.0..h - 8.0);
    let hw = rng.random_range(2.0..7.0);
    let hh = rng.random_range(1.5..5.0);
    let t: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let (s, c) = t.sin_cos();
    let corners = [[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]];
    Quad::new(corners.map(|[x, y]| [cx + x * c - y * s, cy + x * s + y * c]))
}

fn scene_with(regions: Vec<(Quad, Role)>) -> SceneSpec {
    SceneSpec {
        scene_id: "s".into(),
        category: "fixture".into(),
        source_ref: "s.png".into(),
        regions: regions
            .into_iter()
            .enumerate()
            .map(|(i, (quad, role))| TextRegion {
                id: format!("r{i}"),
                quad,
                text: format!("word{i}"),
                role,
            })
            .collect(),
        target_text: "edited".into(),
        edited_ref: None,
        edited_ocr: None,
    }
}

// ---------------------------------------------------------------------------
// criteria

fn field_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let scenes = 24;
    for k in 0..scenes {
        let w = rng.random_range(32..=64usize);
        let h = rng.random_range(32..=64usize);
        let n = rng.random_range(2..=5usize);
        let regions = (0..n)
            .map(|i| {
                let role = if i == 0 {
                    Role::Target
                } else {
                    Role::NonTarget
                };
                (random_quad(&mut rng, w as f64, h as f64), role)
            })
            .collect();
        let scene = scene_with(regions);
        let cfg = FieldConfig {
            sigma: rng.random_range(0.03..0.3),
            pad_core: rng.random_range(0.0..6.0),
            pad_protect: rng.random_range(0.0..4.0),
            smooth_sigma: [0.0, 1.0, 1.7, 3.0][k % 4],
            ..FieldConfig::default()
        };
        let got = build_field(&scene, &cfg, w as u32, h as u32).map_err(|e| e.to_string())?;
        let want = naive_field(&scene, &cfg, w, h);
        for (g, e) in got.weights().iter().zip(&want) {
            worst = worst.max((*g as f64 - e).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-5,
        format!("{scenes} scenes, max |diff| {worst:.2e} <= 1e-5"),
        format!("max |diff| {worst:.3e} > 1e-5"),
    )?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "{scenes} scenes, max |diff| {worst:.2e} <= 1e-5, {elapsed:.2?}"
    ))
}

fn distance_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let w = rng.random_range(1..=64usize);
        let h = rng.random_range(1..=64usize);
        let density = rng.random_range(0.001..0.3);
        let mut bits: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
        let seed_px = rng.random_range(0..w * h);
        bits[seed_px] = true;
        let mask = BinaryMask::from_bits(w as u32, h as u32, bits.clone());
        let got = distance_transform(&mask).map_err(|e| e.to_string())?;
        for (g, e) in got.distances().iter().zip(brute_distance(&bits, w, h)) {
            worst = worst.max((g - e).abs());
        }
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-6, "", format!("max |diff| {worst:.3e} > 1e-6"))?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "100 masks, max |diff| {worst:.2e} <= 1e-6, {elapsed:.2?}"
    ))
}

struct RunFixture {
    _corpus: tempfile::TempDir,
    manifest: Manifest,
    out: tempfile::TempDir,
    report: eff_core::harness::RunReport,
    elapsed: Duration,
}

fn corpus_run() -> Result<RunFixture, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = CorpusSpec::default();
    let start = Instant::now();
    let corpus = generate_corpus(&spec, 2024).map_err(|e| e.to_string())?;
    let manifest_path = write_corpus(dir.path(), &corpus).map_err(|e| e.to_string())?;
    let manifest = Manifest::load(&manifest_path).map_err(|e| e.to_string())?;
    let report =
        cmd_run(&manifest, &PipelineOptions::default(), out.path()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    Ok(RunFixture {
        _corpus: dir,
        manifest,
        out,
        report,
        elapsed,
    })
}

fn protected_bit_exact(run: &RunFixture) -> Outcome {
    let cfg = FieldConfig::default();
    let mut pixels = 0usize;
    let mut regions = 0usize;
    for scene in &run.manifest.scenes {
        let src = RasterImage::load_png(&scene.source_path(&run.manifest.base_dir))
            .map_err(|e| e.to_string())?;
        let out_path = run
            .out
            .path()
            .join("scenes")
            .join(&scene.scene_id)
            .join("output.png");
        let out = RasterImage::load_png(&out_path).map_err(|e| e.to_string())?;
        let (w, h) = src.dims();
        for r in scene.non_targets() {
            let padded = pad_mask(
                &rasterize_quad(&r.quad, w, h).map_err(|e| e.to_string())?,
                cfg.pad_protect,
            );
            for i in padded.indices() {
                let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
                if src.pixel(x, y) != out.pixel(x, y) {
                    return Err(format!(
                        "{} region {} pixel ({x},{y}) differs",
                        scene.scene_id, r.id
                    ));
                }
                pixels += 1;
            }
        }
    }
    for outcome in &run.report.scenes {
        for r in &outcome.eff.region_reports {
            if r.region_psnr != cfg.psnr_cap || r.spillover {
                return Err(format!(
                    "{} region {}: psnr {} spillover {}",
                    outcome.scene_id, r.region_id, r.region_psnr, r.spillover
                ));
            }
            regions += 1;
        }
    }
    check(
        regions > 0 && run.report.errors.is_empty(),
        format!("{pixels} protected pixels verbatim, {regions} regions at 150 dB, none flagged"),
        format!("scene errors: {:?}", run.report.errors),
    )
}

fn end_to_end(run: &RunFixture) -> Outcome {
    let base = run
        .report
        .baseline
        .as_ref()
        .ok_or("no baseline corpus")?
        .overall
        .clone();
    let eff = run
        .report
        .eff
        .as_ref()
        .ok_or("no eff corpus")?
        .overall
        .clone();
    check(
        run.report.scenes.len() == 50 && run.report.errors.is_empty(),
        "",
        format!(
            "{} scenes, errors {:?}",
            run.report.scenes.len(),
            run.report.errors
        ),
    )?;
    check(
        base.spill_rate == Some(1.0)
            && eff.spill_rate == Some(0.0)
            && base.evaluated_regions == 150,
        "",
        format!(
            "baseline spill {:?}, eff spill {:?}, {} regions",
            base.spill_rate, eff.spill_rate, base.evaluated_regions
        ),
    )?;
    within(run.elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "50 scenes x 4 regions: baseline spill {} -> eff spill {}, {:.2?}",
        base.spill_rate.unwrap(),
        eff.spill_rate.unwrap(),
        run.elapsed
    ))
}

fn blend_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for k in 0..10 {
        let w = rng.random_range(1..=48u32);
        let h = rng.random_range(1..=48u32);
        let n = (w * h * 3) as usize;
        let src = RasterImage::new(w, h, (0..n).map(|_| rng.random()).collect()).unwrap();
        let edited = RasterImage::new(w, h, (0..n).map(|_| rng.random()).collect()).unwrap();
        let random_field = FidelityField::new(
            w,
            h,
            (0..w * h).map(|_| rng.random_range(0.0..=1.0f32)).collect(),
        )
        .unwrap();
        let zeros = blend(
            &src,
            &edited,
            &FidelityField::constant(w, h, 0.0),
            ResizePolicy::Strict,
        );
        let ones = blend(
            &src,
            &edited,
            &FidelityField::constant(w, h, 1.0),
            ResizePolicy::Strict,
        );
        let same = blend(&src, &src, &random_field, ResizePolicy::Strict);
        let ok = matches!(zeros, Ok(ref z) if *z == src)
            && matches!(ones, Ok(ref o) if *o == edited)
            && matches!(same, Ok(ref s) if *s == src);
        check(
            ok,
            "",
            format!("fixture {k} ({w}x{h}) violates an identity"),
        )?;
    }
    Ok("10 fixtures: F=0 -> source, F=1 -> edited, blend(I,I,F) = I, bitwise".into())
}

fn boundary_semantics() -> Outcome {
    let cfg = FieldConfig::default();
    let cases = [
        (Some(0.84), 100.0, true),
        (Some(0.85), 100.0, false),
        (Some(1.0), 34.99, true),
        (Some(1.0), 35.0, false),
    ];
    for (sim, psnr, flagged) in cases {
        let got = spillover_decision(sim, psnr, &cfg).spillover;
        check(
            got == flagged,
            "",
            format!("sim {sim:?} psnr {psnr}: flagged {got}"),
        )?;
    }
    // the same boundary reached through real strings: 3 edits in 20 and 4 in 25
    let at = text_similarity("abcdefghijklmnopqrst", "xyzdefghijklmnopqrst");
    let below = text_similarity("abcdefghijklmnopqrstuvwxy", "zzzzefghijklmnopqrstuvwxy");
    check(
        !spillover_decision(Some(at), 100.0, &cfg).spillover
            && spillover_decision(Some(below), 100.0, &cfg).spillover,
        "",
        format!("string similarities {at} and {below} classified wrongly"),
    )?;
    Ok("sim 0.84 flags, 0.85 does not; PSNR 34.99 flags, 35.0 does not".into())
}

fn decay_spot_checks() -> Outcome {
    let (w, h) = (800u32, 600u32);
    let mut mask = BinaryMask::new(w, h);
    mask.set(0, 0, true);
    let dist = distance_transform(&mask).map_err(|e| e.to_string())?;
    let decay = build_decay(&dist, 0.12, w, h);
    let at_120 = decay.get(120, 0) as f64;
    let at_0 = decay.get(0, 0);
    let err = (at_120 - (-1.0f64).exp()).abs();
    check(
        err <= 1e-6 && at_0 == 1.0,
        format!("w(120) = {at_120:.9} (|err| {err:.1e}), w(0) = {at_0}"),
        format!("w(120) = {at_120}, w(0) = {at_0}"),
    )
}

fn fixture_scene() -> Result<(SceneSpec, u32, u32), String> {
    let spec = SyntheticSceneSpec::new("mono", 320, 240, 4);
    let s = generate_synthetic(&spec, 99).map_err(|e| e.to_string())?;
    Ok((s.scene, 320, 240))
}

fn sweep_csv(seed: u64) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = CorpusSpec {
        scenes: 4,
        ..CorpusSpec::default()
    };
    let corpus = generate_corpus(&spec, seed).map_err(|e| e.to_string())?;
    let manifest = Manifest::load(&write_corpus(dir.path(), &corpus).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let sweep = SweepSpec {
        sigma_values: vec![0.06, 0.12, 0.24],
        pad_core_values: vec![5.0, 15.0, 30.0],
        base: FieldConfig::default(),
    };
    let table =
        cmd_sweep(&manifest, &sweep, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    table.write_csv(&mut bytes).map_err(|e| e.to_string())?;
    Ok(bytes)
}

fn sweep_monotone() -> Outcome {
    let (scene, w, h) = fixture_scene()?;
    let mass = |cfg: FieldConfig| {
        build_field(&scene, &cfg, w, h)
            .map(|f| f.mass())
            .map_err(|e| e.to_string())
    };
    let base = FieldConfig::default();
    let by_pad = [5.0, 15.0, 30.0]
        .map(|p| {
            mass(FieldConfig {
                pad_core: p,
                ..base
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let by_sigma = [0.06, 0.12, 0.24]
        .map(|s| mass(FieldConfig { sigma: s, ..base }))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let strict = |v: &[f64]| v.windows(2).all(|p| p[0] < p[1]);
    check(
        strict(&by_pad) && strict(&by_sigma),
        "",
        format!("mass by pad_core {by_pad:?}, by sigma {by_sigma:?}"),
    )?;
    let a = sweep_csv(5)?;
    let b = sweep_csv(5)?;
    check(a == b, "", "sweep CSV bytes differ between runs")?;
    Ok(format!(
        "mass by pad_core {:.0} < {:.0} < {:.0}; by sigma {:.0} < {:.0} < {:.0}; sweep CSV identical ({} bytes)",
        by_pad[0], by_pad[1], by_pad[2], by_sigma[0], by_sigma[1], by_sigma[2],
        a.len()
    ))
}

fn hand_report(category: &str, evaluated: usize, flagged: usize) -> SceneReport {
    SceneReport {
        scene_id: format!("{category}-{evaluated}"),
        category: category.into(),
        target_found: None,
        target_text_out: None,
        spill_rate: Some(flagged as f64 / evaluated as f64),
        flagged_regions: flagged,
        evaluated_regions: evaluated,
        avg_region_psnr: Some(40.0),
        min_region_psnr: Some(30.0),
        bg_psnr: None,
        region_reports: Vec::new(),
        warnings: Vec::new(),
    }
}

fn aggregation_exact() -> Outcome {
    let (w, h) = (80u32, 40u32);
    let mut regions = vec![(Quad::rect(4.0, 4.0, 20.0, 12.0), Role::Target)];
    for i in 0..4 {
        let x = 4.0 + 18.0 * i as f64;
        regions.push((Quad::rect(x, 24.0, x + 12.0, 34.0), Role::NonTarget));
    }
    let scene = scene_with(regions);
    let src =
        RasterImage::new(w, h, (0..w * h * 3).map(|i| (i * 13 % 251) as u8).collect()).unwrap();
    let mut out = src.clone();
    for r in scene
        .regions
        .iter()
        .filter(|r| r.id == "r1" || r.id == "r3")
    {
        let m = rasterize_quad(&r.quad, w, h).map_err(|e| e.to_string())?;
        for i in m.indices() {
            out.put_pixel(i as u32 % w, i as u32 / w, [0, 0, 0]);
        }
    }
    let texts: BTreeMap<String, String> = scene
        .regions
        .iter()
        .map(|r| (r.id.clone(), r.text.clone()))
        .collect();
    let readout = eff_core::eval::TextReadout {
        mode: OcrMode::GroundTruth,
        texts,
    };
    let report = evaluate_scene(&scene, &src, &out, &FieldConfig::default(), Some(&readout))
        .map_err(|e| e.to_string())?;
    check(
        report.spill_rate == Some(0.5) && report.flagged_regions == 2,
        "",
        format!("2-of-4 scene gives {:?}", report.spill_rate),
    )?;

    let corpus = aggregate_corpus(
        &[hand_report("a", 4, 1), hand_report("b", 2, 2)],
        SpillWeighting::Region,
    )
    .map_err(|e| e.to_string())?;
    check(
        corpus.overall.spill_rate == Some(0.5)
            && corpus.overall.flagged_regions == 3
            && corpus.overall.evaluated_regions == 6,
        "",
        format!("mixed corpus gives {:?}", corpus.overall.spill_rate),
    )?;
    Ok("2-of-4 flagged -> 0.5; (4,1)+(2,2) -> 3/6 = 0.5".into())
}

fn tree_bytes(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.insert(rel, std::fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(files)
}

fn determinism(first: &RunFixture) -> Outcome {
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    cmd_run(&first.manifest, &PipelineOptions::default(), second.path())
        .map_err(|e| e.to_string())?;
    let a = tree_bytes(first.out.path())?;
    let b = tree_bytes(second.path())?;
    let count = |ext: &str| a.keys().filter(|k| k.ends_with(ext)).count();
    if a.keys().ne(b.keys()) {
        return Err("runs wrote different file sets".into());
    }
    if let Some(name) = a.keys().find(|k| a[*k] != b[*k]) {
        return Err(format!("{name} differs between runs"));
    }
    Ok(format!(
        "{} files identical ({} PNG, {} PFM, {} JSON)",
        a.len(),
        count(".png"),
        count(".pfm"),
        count(".json")
    ))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 field oracle equivalence", field_oracle()),
        ("2 distance transform exactness", distance_exactness()),
    ];
    let run = corpus_run();
    let on_run = |f: fn(&RunFixture) -> Outcome| match &run {
        Ok(r) => f(r),
        Err(e) => Err(format!("corpus run failed: {e}")),
    };
    results.push((
        "3 protected-zone bit-exactness",
        on_run(protected_bit_exact),
    ));
    results.push(("4 end-to-end spillover 1.0 -> 0.0", on_run(end_to_end)));
    results.push(("5 blend identities", blend_identities()));
    results.push(("6 metric boundary semantics", boundary_semantics()));
    results.push(("7 decay closed form", decay_spot_checks()));
    results.push(("8 sweep monotonicity and determinism", sweep_monotone()));
    results.push(("9 aggregation exactness", aggregation_exact()));
    results.push(("10 run determinism", on_run(determinism)));

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  [{name}] {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
