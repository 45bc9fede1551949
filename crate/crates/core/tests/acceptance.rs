//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test fails if any does.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use humanscore::aggregation::{aggregate_rsp, final_score, AggregationWeights, FrameSignals, MetricId};
use humanscore::analysis::{
    build_leaderboard, leaderboard_from_model_scores, spearman_rho, ternary_sweep, tolerance_sweep,
    write_leaderboard_csv, DEFAULT_SCALES,
};
use humanscore::engine::Engine;
use humanscore::geometry::{adjacent_faces, colliding_faces, tri_tri_intersect, NonLocalFilter};
use humanscore::linalg::Vec3;
use humanscore::motion::{default_limits, default_skeleton, MeshFrame};
use humanscore::synthetic::{reference_corpus, BaselineSpec, CorruptionKind, Synthesizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOL: f64 = 0.1;
const BASELINE_TOL: f64 = 0.5;
const SWEEP_STEPS: usize = 10;
const MIN_DROP: f64 = 20.0;
const MONOTONE_SLACK: f64 = 1e-9;
const SEPARATION: f64 = 4.0;
const FIXTURE_TOL: f64 = 1e-9;
const SPEARMAN_TOL: f64 = 1e-12;

const FRAMES: usize = 60;
const FPS: f64 = 30.0;

type Outcome = Result<String, String>;

fn engine() -> Engine<f64> {
    Engine::with_defaults()
}

fn synth() -> Synthesizer<f64> {
    Synthesizer::new(default_skeleton(), default_limits()).unwrap()
}

fn within(label: &str, elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed > budget {
        return Err(format!("{label} took {elapsed:.2?}, budget {budget:?}"));
    }
    Ok(())
}

/// Published rows: I, II, anatomy, III, IV, kinematic, V, VI, kinetic, overall.
const TABLE_1: [(&str, [f64; 10]); 14] = [
    ("Seedance 1.0 Pro fast", [94.2, 93.6, 93.9, 83.6, 85.8, 84.7, 94.5, 94.2, 94.3, 91.1]),
    ("KlingAI 2.5 Turbo Pro", [89.3, 92.6, 91.0, 82.4, 90.3, 86.4, 95.2, 94.9, 95.1, 90.8]),
    ("Ray 3.0", [80.5, 92.8, 86.7, 76.0, 89.0, 82.5, 93.9, 93.6, 93.8, 87.7]),
    ("Sora-2", [91.9, 89.7, 90.8, 72.5, 83.8, 78.2, 90.9, 87.9, 89.4, 86.1]),
    ("Veo 3.1 fast", [78.4, 90.8, 84.6, 72.0, 87.5, 79.8, 93.8, 92.8, 93.3, 85.9]),
    ("Hailuo 02", [85.6, 92.5, 89.1, 71.3, 82.8, 77.1, 91.9, 90.6, 91.2, 85.8]),
    ("PixVerse 5.5", [82.9, 91.0, 87.0, 71.3, 85.9, 78.6, 91.3, 90.7, 91.0, 85.5]),
    ("Wan 2.6", [85.8, 93.3, 89.6, 68.1, 87.9, 78.0, 88.6, 84.9, 86.8, 84.8]),
    ("Pika v2.2", [86.0, 90.3, 88.2, 67.0, 82.5, 74.8, 83.1, 80.6, 81.8, 81.6]),
    ("HunyuanVideo 1.5", [95.6, 94.9, 95.3, 80.8, 85.2, 83.0, 95.1, 94.8, 94.9, 91.1]),
    ("Kandinsky 5.0 pro", [81.8, 91.6, 86.7, 75.7, 85.6, 80.7, 92.8, 91.4, 92.1, 86.5]),
    ("Wan 2.2", [96.1, 91.9, 94.0, 71.8, 85.7, 78.8, 87.9, 83.3, 85.6, 86.1]),
    ("CogVideoX-5B", [88.5, 59.1, 73.8, 58.9, 69.7, 64.3, 80.1, 92.5, 86.3, 74.8]),
    ("Real Videos", [100.0, 92.0, 96.0, 89.6, 89.1, 89.4, 99.0, 96.2, 97.6, 94.3]),
];

fn table_arithmetic() -> Outcome {
    let start = Instant::now();
    let models: BTreeMap<String, [f64; 6]> = TABLE_1
        .iter()
        .map(|(m, r)| (m.to_string(), [r[0], r[1], r[3], r[4], r[6], r[7]]))
        .collect();
    let board = leaderboard_from_model_scores(&models).map_err(|e| e.to_string())?;
    let mut misses = Vec::new();
    let mut cells = 0;
    for (name, row) in TABLE_1 {
        let e = board.iter().find(|e| e.model_id == name).unwrap();
        for (label, got, published) in [
            ("anatomy", e.anatomy_avg, row[2]),
            ("kinematic", e.kinematic_avg, row[5]),
            ("kinetic", e.kinetic_avg, row[8]),
            ("overall", e.overall, row[9]),
        ] {
            cells += 1;
            if (got - published).abs() > TABLE_TOL + 1e-9 {
                misses.push(format!("{name} {label}: computed {got:.3}, published {published}"));
            }
        }
    }
    within("table", start.elapsed(), Duration::from_secs(1))?;
    if misses.is_empty() {
        Ok(format!("{cells} cells within ±{TABLE_TOL}"))
    } else {
        Err(format!("{} of {cells} cells off by more than ±{TABLE_TOL}: {}", misses.len(), misses.join("; ")))
    }
}

fn baseline_ceiling() -> Outcome {
    let start = Instant::now();
    let (s, e) = (synth(), engine());
    let mut worst = f64::INFINITY;
    for seed in 0..20 {
        let b = s.generate_baseline(&BaselineSpec::new(format!("clean_{seed}"), FRAMES, FPS, seed)).unwrap();
        let score = e.score(&b).map_err(|e| e.to_string())?;
        for (m, x) in MetricId::ALL.iter().zip(score.scores()) {
            if (x - 100.0).abs() > BASELINE_TOL {
                return Err(format!("seed {seed} metric {m} scored {x:.3}"));
            }
            worst = worst.min(x);
        }
    }
    within("baselines", start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("20 seeds, lowest metric score {worst:.4}"))
}

/// Scores of every metric along the reference sweep of `kind`, levels 0..=SWEEP_STEPS.
fn sweep(kind: CorruptionKind) -> Vec<[f64; 6]> {
    let (s, e) = (synth(), engine());
    let base = s.generate_baseline(&BaselineSpec::new("sweep", FRAMES, FPS, 1)).unwrap();
    (0..=SWEEP_STEPS)
        .map(|k| {
            let spec = kind.reference(k as f64 / SWEEP_STEPS as f64, FRAMES);
            e.score(&s.inject(&base, &spec).unwrap()).unwrap().scores()
        })
        .collect()
}

fn corruption_sweeps() -> BTreeMap<CorruptionKind, Vec<[f64; 6]>> {
    CorruptionKind::ALL.iter().map(|&k| (k, sweep(k))).collect()
}

fn monotonicity(sweeps: &BTreeMap<CorruptionKind, Vec<[f64; 6]>>) -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (kind, rows) in sweeps {
        let t = kind.target_metric() as usize;
        let series: Vec<f64> = rows.iter().map(|r| r[t]).collect();
        let rises: Vec<usize> = (1..series.len()).filter(|&i| series[i] > series[i - 1] + MONOTONE_SLACK).collect();
        let drop = series[0] - series[series.len() - 1];
        let summary = format!("{kind:?} {}: {:.1} -> {:.1}", kind.target_metric(), series[0], series[series.len() - 1]);
        if !rises.is_empty() {
            failures.push(format!("{summary} rises at steps {rises:?} ({series:.1?})"));
        } else if drop < MIN_DROP {
            failures.push(format!("{summary} drops only {drop:.1}"));
        }
        lines.push(summary);
    }
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn hierarchy(sweeps: &BTreeMap<CorruptionKind, Vec<[f64; 6]>>) -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (kind, rows) in sweeps {
        let t = kind.target_metric() as usize;
        let outside: Vec<usize> = MetricId::ALL
            .iter()
            .filter(|m| !kind.affected_metrics().contains(m))
            .map(|&m| m as usize)
            .collect();
        let mut worst_leak = 0.0f64;
        for (k, row) in rows.iter().enumerate().skip(1) {
            let moved = (row[t] - rows[0][t]).abs();
            let leak = outside.iter().map(|&o| (row[o] - rows[0][o]).abs()).fold(0.0, f64::max);
            worst_leak = worst_leak.max(leak);
            if moved < SEPARATION * leak {
                failures.push(format!("{kind:?} level {k}: target moved {moved:.3}, outside metric moved {leak:.3}"));
            }
        }
        lines.push(format!("{kind:?} max leak {worst_leak:.2e}"));
    }
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn random_mesh(rng: &mut ChaCha8Rng) -> MeshFrame<f64> {
    let faces_wanted = rng.gen_range(20..=200);
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut faces = Vec::new();
    while faces.len() < faces_wanted {
        // Reuse an existing vertex a third of the time so adjacency exclusion is exercised.
        let mut tri = [0usize; 3];
        for slot in tri.iter_mut() {
            if !vertices.is_empty() && rng.gen_bool(1.0 / 3.0) {
                *slot = rng.gen_range(0..vertices.len());
            } else {
                let c = 0.35;
                vertices.push([rng.gen_range(-c..c), rng.gen_range(-c..c), rng.gen_range(-c..c)]);
                *slot = vertices.len() - 1;
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            continue;
        }
        let p = tri.map(|v| Vec3::from_array(vertices[v]));
        if (p[1] - p[0]).cross(p[2] - p[0]).norm() < 1e-4 {
            continue;
        }
        faces.push(tri);
    }
    MeshFrame { vertices, faces }
}

fn brute_force_faces(mesh: &MeshFrame<f64>) -> Vec<usize> {
    let tri = |f: usize| mesh.faces[f].map(|v| Vec3::from_array(mesh.vertices[v]));
    let mut hit = vec![false; mesh.faces.len()];
    for a in 0..mesh.faces.len() {
        for b in a + 1..mesh.faces.len() {
            if !adjacent_faces(&mesh.faces[a], &mesh.faces[b]) && tri_tri_intersect(&tri(a), &tri(b)).unwrap() {
                hit[a] = true;
                hit[b] = true;
            }
        }
    }
    (0..hit.len()).filter(|&f| hit[f]).collect()
}

fn geometry_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let unfiltered = NonLocalFilter { min_pairs: 0, min_fraction: 0.0 };
    let mut colliding = 0;
    for i in 0..100 {
        let mesh = random_mesh(&mut rng);
        let got = colliding_faces(&mesh, &unfiltered).map_err(|e| format!("mesh {i}: {e}"))?;
        let want = brute_force_faces(&mesh);
        if got.faces != want {
            return Err(format!("mesh {i} ({} faces): hierarchy found {}, brute force {}", mesh.faces.len(), got.faces.len(), want.len()));
        }
        colliding += want.len();
    }
    within("geometry", start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("100 meshes, {colliding} colliding faces in total, sets equal"))
}

fn aggregation_fixtures() -> Outcome {
    let w = AggregationWeights::<f64>::standard();
    let sig = FrameSignals::new(
        [0, 0, 1, 1, 1, 0, 0, 1, 0, 0].iter().map(|&b| b == 1).collect(),
        vec![0.0, 0.0, 0.2, 0.5, 0.3, 0.0, 0.0, 0.4, 0.0, 0.0],
    )
    .unwrap();
    let rsp = aggregate_rsp(&sig, &[true; 10]).map_err(|e| e.to_string())?;
    let scored = final_score(MetricId::III, rsp, &w, None).map_err(|e| e.to_string())?;
    let mut checks = vec![
        ("r", rsp.r, 0.4),
        ("s", rsp.s, 0.35),
        ("p", rsp.p, 0.3),
        ("D", scored.d, 0.365),
        ("score", scored.score, 63.5),
    ];
    let rsp_of = |r, s, p| humanscore::aggregation::Rsp { r, s, p };
    let zero = final_score(MetricId::III, rsp_of(0.0, 0.0, 0.0), &w, None).unwrap();
    let one = final_score(MetricId::III, rsp_of(1.0, 1.0, 1.0), &w, None).unwrap();
    checks.push(("clean score", zero.score, 100.0));
    checks.push(("saturated D", one.d, 1.0));
    checks.push(("saturated score", one.score, 0.0));
    // Collision form: 0.45*0.2 + 0.25*0.5 + 0.15*0.3 + 0.15 = 0.41.
    let iv = final_score(MetricId::IV, rsp_of(0.4, 0.5, 0.3), &AggregationWeights::collision(), Some(0.2)).unwrap();
    checks.push(("collision D", iv.d, 0.41));
    checks.push(("collision score", iv.score, 59.0));
    for (label, got, want) in &checks {
        if (got - want).abs() > FIXTURE_TOL {
            return Err(format!("{label}: {got} != {want}"));
        }
    }
    Ok(format!("{} values within {FIXTURE_TOL:e}", checks.len()))
}

fn tolerance_invariance() -> Outcome {
    let corpus = reference_corpus(&synth(), 4, 3, FRAMES, FPS).map_err(|e| e.to_string())?;
    let sweep = tolerance_sweep(&engine(), &corpus, &DEFAULT_SCALES).map_err(|e| e.to_string())?;
    let rankings: Vec<String> = sweep.rows.iter().map(|r| format!("{}: {}", r.scale, r.ranking.join(">"))).collect();
    if sweep.invariant {
        Ok(format!("{} scales, ranking {}", sweep.rows.len(), sweep.rows[0].ranking.join(">")))
    } else {
        Err(format!("ranking changes: {}", rankings.join("; ")))
    }
}

fn ternary_stability() -> Outcome {
    let corpus = reference_corpus(&synth(), 4, 3, FRAMES, FPS).map_err(|e| e.to_string())?;
    let sweep = ternary_sweep(&engine(), &corpus, 0.1).map_err(|e| e.to_string())?;
    if sweep.points.len() != 66 {
        return Err(format!("{} simplex points instead of 66", sweep.points.len()));
    }
    if !sweep.is_stable() {
        return Err(format!("{} distinct rankings, modal share {:.2}", sweep.distinct_rankings, sweep.modal_share));
    }
    Ok(format!("66 points, single ranking {}", sweep.modal_ranking.join(">")))
}

fn spearman_fixtures() -> Outcome {
    let a = [1.0f64, 2.0, 3.0, 4.0];
    for (label, y, want) in [
        ("identical", [1.0, 2.0, 3.0, 4.0], 1.0),
        ("reversed", [4.0, 3.0, 2.0, 1.0], -1.0),
        ("one swap", [1.0, 3.0, 2.0, 4.0], 0.8),
    ] {
        let got = spearman_rho(&a, &y).map_err(|e| e.to_string())?;
        if (got - want).abs() > SPEARMAN_TOL {
            return Err(format!("{label}: {got} != {want}"));
        }
    }
    Ok(format!("3 fixtures within {SPEARMAN_TOL:e}"))
}

/// Full pipeline from synthesis to the leaderboard, serialized.
fn pipeline_bytes() -> Vec<u8> {
    let corpus = reference_corpus(&synth(), 3, 3, FRAMES, FPS).unwrap();
    let mut scores: Vec<_> = engine().score_all(&corpus).into_iter().map(Result::unwrap).collect();
    scores.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    let mut out = Vec::new();
    for s in &scores {
        out.extend(s.to_json_string().unwrap().into_bytes());
        out.push(b'\n');
    }
    write_leaderboard_csv(&build_leaderboard(&scores).unwrap(), &mut out).unwrap();
    out
}

fn determinism() -> Outcome {
    let (a, b) = (pipeline_bytes(), pipeline_bytes());
    if a == b {
        Ok(format!("{} bytes identical across two runs", a.len()))
    } else {
        Err("two runs produced different bytes".into())
    }
}

#[test]
fn acceptance() {
    let sweep_start = Instant::now();
    let sweeps = corruption_sweeps();
    let sweep_time = sweep_start.elapsed();
    let monotone = monotonicity(&sweeps).and_then(|ok| {
        within("sweeps", sweep_time, Duration::from_secs(120))?;
        Ok(ok)
    });
    let results: Vec<(&str, Outcome)> = vec![
        ("table arithmetic", table_arithmetic()),
        ("clean-baseline ceiling", baseline_ceiling()),
        ("corruption monotonicity", monotone),
        ("hierarchy separation", hierarchy(&sweeps)),
        ("geometry oracle", geometry_oracle()),
        ("aggregation fixtures", aggregation_fixtures()),
        ("tolerance-sweep rank invariance", tolerance_invariance()),
        ("ternary sweep", ternary_stability()),
        ("spearman fixtures", spearman_fixtures()),
        ("determinism", determinism()),
    ];
    let mut failed = Vec::new();
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
