use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use humanscore::analysis::{
    build_leaderboard, difficulty_breakdown, pairwise_from_scores, spearman_rho, ternary_sweep, tolerance_sweep,
    win_ratios, write_leaderboard_csv, write_ternary_csv, write_tolerance_csv, PairwiseComparison,
};
use humanscore::motion::{parse_motion_bundle, write_motion_bundle, SkeletonDefinition};
use humanscore::synthetic::{reference_corpus, SynthSpec, Synthesizer};
use humanscore::{Bundle, Record};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{CorrelateArgs, EngineArgs, LeaderboardArgs, ScoreArgs, SweepKind, SynthArgs};
use crate::config;

/// `*.json` files of a directory in name order, or the path itself if it is a file.
fn json_inputs(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).with_context(|| format!("reading {}", path.display()))? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "json") && p.is_file() {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn load_bundles(paths: &[PathBuf], skeleton: &SkeletonDefinition<f64>) -> Result<Vec<Bundle>> {
    let mut files = Vec::new();
    for p in paths {
        files.extend(json_inputs(p)?);
    }
    if files.is_empty() {
        bail!(humanscore::Error::NoData("no bundle files found".into()));
    }
    files
        .par_iter()
        .map(|f| parse_motion_bundle(f, skeleton).with_context(|| format!("reading bundle {}", f.display())))
        .collect()
}

fn load_records(path: &Path) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for f in json_inputs(path)? {
        let text = fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
        let parsed = if text.trim_start().starts_with('[') {
            serde_json::from_str::<Vec<Record>>(&text)
        } else {
            serde_json::from_str::<Record>(&text).map(|r| vec![r])
        };
        records.extend(parsed.with_context(|| format!("parsing score record {}", f.display()))?);
    }
    if records.is_empty() {
        bail!(humanscore::Error::NoData(format!("no score records in {}", path.display())));
    }
    records.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    Ok(records)
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = std::io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?);
            write(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let engine = config::engine(&args.engine)?;
    let bundles = load_bundles(&args.bundles, engine.skeleton())?;
    let mut records = bundles
        .par_iter()
        .map(|b| engine.score(b).with_context(|| format!("scoring {}", b.video_id)))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for r in &records {
                let path = dir.join(format!("{}.json", r.video_id));
                fs::write(&path, r.to_json_string()? + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("scored {} bundles into {}", records.len(), dir.display());
        }
        None => emit(None, |w| {
            serde_json::to_writer_pretty(&mut *w, &records)?;
            writeln!(w)?;
            Ok(())
        })?,
    }
    Ok(())
}

pub fn leaderboard(args: &LeaderboardArgs) -> Result<()> {
    let records = load_records(&args.scores)?;
    let board = build_leaderboard(&records)?;
    emit(args.out.as_deref(), |w| Ok(write_leaderboard_csv(&board, w)?))?;
    if let Some(path) = &args.difficulty {
        let breakdown = difficulty_breakdown(&records)?;
        emit(Some(path), |w| {
            serde_json::to_writer_pretty(&mut *w, &breakdown)?;
            writeln!(w)?;
            Ok(())
        })?;
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let skeleton = config::skeleton(args.skeleton.as_deref())?;
    let limits = config::limits(args.limits.as_deref())?;
    let synth = Synthesizer::new(skeleton, limits)?;
    if let Some(spec_path) = &args.spec {
        let text = fs::read_to_string(spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
        let spec: SynthSpec = serde_json::from_str(&text)
            .map_err(|e| humanscore::Error::Validation(format!("synthesis spec {}: {e}", spec_path.display())))?;
        let bundle = synth.synthesize(&spec)?;
        match &args.out {
            Some(out) => write_motion_bundle(&bundle, out).with_context(|| format!("writing {}", out.display()))?,
            None => emit(None, |w| Ok(writeln!(w, "{}", bundle.to_json_string()?)?))?,
        }
        return Ok(());
    }
    let dir = args.corpus.as_ref().expect("clap requires --spec or --corpus");
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let corpus = reference_corpus(&synth, args.models, args.videos, args.frames, args.fps)?;
    for b in &corpus {
        let path = dir.join(format!("{}.json", b.video_id));
        write_motion_bundle(b, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("wrote {} bundles into {}", corpus.len(), dir.display());
    Ok(())
}

fn sweep_inputs(corpus: &Path, engine_args: &EngineArgs) -> Result<(humanscore::Scorer, Vec<Bundle>)> {
    let engine = config::engine(engine_args)?;
    let bundles = load_bundles(&[corpus.to_path_buf()], engine.skeleton())?;
    Ok((engine, bundles))
}

pub fn sweep(kind: &SweepKind) -> Result<()> {
    match kind {
        SweepKind::Tolerance { corpus, grid, engine, out } => {
            let (engine, bundles) = sweep_inputs(corpus, engine)?;
            let result = tolerance_sweep(&engine, &bundles, grid)?;
            emit(out.as_deref(), |w| Ok(write_tolerance_csv(&result, w)?))?;
            match result.crossing_scale {
                None => eprintln!("ranking invariant across {} scales", result.rows.len()),
                Some(k) => eprintln!("ranking changes first at scale {k}"),
            }
        }
        SweepKind::Ternary { corpus, step, engine, out } => {
            let (engine, bundles) = sweep_inputs(corpus, engine)?;
            let result = ternary_sweep(&engine, &bundles, *step)?;
            emit(out.as_deref(), |w| Ok(write_ternary_csv(&result, w)?))?;
            eprintln!(
                "{} points, {} distinct rankings, modal ranking {} at {:.1}% of points",
                result.points.len(),
                result.distinct_rankings,
                result.modal_ranking.join(">"),
                100.0 * result.modal_share
            );
        }
    }
    Ok(())
}

pub fn correlate(args: &CorrelateArgs) -> Result<()> {
    let records = load_records(&args.scores)?;
    let text = fs::read_to_string(&args.preferences).with_context(|| format!("reading {}", args.preferences.display()))?;
    let human: Vec<PairwiseComparison> = serde_json::from_str(&text)
        .map_err(|e| humanscore::Error::Validation(format!("preferences {}: {e}", args.preferences.display())))?;
    let human_ratio: BTreeMap<String, f64> = win_ratios(&human)?;
    let score_ratio: BTreeMap<String, f64> = win_ratios(&pairwise_from_scores(&records, args.tie_margin))?;
    let overall: BTreeMap<String, f64> =
        build_leaderboard(&records)?.into_iter().map(|e| (e.model_id, e.overall)).collect();

    let models: Vec<&String> = human_ratio.keys().filter(|m| overall.contains_key(*m)).collect();
    let pick = |m: &BTreeMap<String, f64>| models.iter().map(|k| m.get(*k).copied().unwrap_or(0.0)).collect::<Vec<_>>();
    let h = pick(&human_ratio);
    let rho_overall = spearman_rho(&pick(&overall), &h)?;
    let rho_win = spearman_rho(&pick(&score_ratio), &h)?;
    let report = json!({
        "models": models,
        "human_win_ratio": human_ratio,
        "score_win_ratio": score_ratio,
        "overall": overall,
        "spearman_overall_vs_human": rho_overall,
        "spearman_score_win_ratio_vs_human": rho_win,
    });
    emit(args.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })
}
