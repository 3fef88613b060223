//! Trace directories.
//!
//! ```text
//! <out>/trace.txt              procedure, stage count
//! <out>/spec.json              the diffeomorphism, with its truncation
//! <out>/Trem.tsv, trem.tsv     (Dulac.tsv, dulac.tsv for the Poincaré path)
//! <out>/final.tsv              jet of the final form
//! <out>/final_operator.tsv     P of the final form F_lin P
//! <out>/normalizer.tsv         jet of the composed change of variables
//! <out>/report.txt
//! <out>/stage-<i>/             stage.txt, B.tsv, D.tsv, Dem/Sem/sem.tsv
//!                              (Den/Poin/poin.tsv), operator.tsv,
//!                              generator.tsv, map.tsv, normalizer.tsv
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::alphabet::{Letter, TruncationContext};
use crate::diffeo::PreparedDiffeo;
use crate::error::{Error, Result};
use crate::io::spec::{parse_spec, spec_path, write_spec};
use crate::io::tsv::{
    parse_letters, parse_mould, parse_operator, write_jet, write_letters, write_mould,
    write_operator,
};
use crate::prenormal::{stage_contexts, NormalizationTrace, Procedure, Selection, Stage};

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn stage_dir(out: &Path, i: usize) -> PathBuf {
    out.join(format!("stage-{i}"))
}

/// Creates `out` and removes stage directories left by an earlier run.
pub fn prepare_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let entries = fs::read_dir(out).map_err(|e| Error::io(out, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(out, e))?;
        let name = entry.file_name();
        if name.to_string_lossy().starts_with("stage-") && entry.path().is_dir() {
            fs::remove_dir_all(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
        }
    }
    Ok(())
}

fn fmt_selection(s: Selection) -> String {
    match s {
        Selection::AllNonresonant => "selection\tall".into(),
        Selection::Weight(k) => format!("selection\tweight {k}"),
    }
}

fn parse_selection(text: &str, path: &Path) -> Result<Selection> {
    let bad = || {
        Error::parse(
            path.display().to_string(),
            "expected `selection\\tall` or `selection\\tweight K`",
        )
    };
    let line = text
        .lines()
        .find(|l| l.starts_with("selection\t"))
        .ok_or_else(bad)?;
    match line.trim_start_matches("selection\t") {
        "all" => Ok(Selection::AllNonresonant),
        rest => rest
            .strip_prefix("weight ")
            .and_then(|k| k.parse().ok())
            .map(Selection::Weight)
            .ok_or_else(bad),
    }
}

/// Writes every stage, the universal moulds and the final form. The
/// report is written separately.
pub fn dump_trace(trace: &NormalizationTrace, out: &Path) -> Result<()> {
    prepare_dir(out)?;
    let f = &trace.diffeo;
    let mu = f.mu();
    write_file(
        &out.join("trace.txt"),
        &format!(
            "procedure\t{}\nstages\t{}\nstationary\t{}\n",
            trace.procedure.name(),
            trace.stages.len(),
            trace.stationary
        ),
    )?;
    write_file(&spec_path(out), &write_spec(f))?;
    let [big, small] = trace.procedure.universal_names();
    write_file(
        &out.join(format!("{big}.tsv")),
        &write_mould(&trace.universal_d, big),
    )?;
    write_file(
        &out.join(format!("{small}.tsv")),
        &write_mould(&trace.universal_b, small),
    )?;
    write_file(&out.join("final.tsv"), &write_jet(&trace.final_map()?))?;
    write_file(
        &out.join("final_operator.tsv"),
        &write_operator(&trace.final_operator),
    )?;
    write_file(
        &out.join("normalizer.tsv"),
        &write_jet(&trace.normalizer()?.images()),
    )?;
    let [gen, sim_d, sim_b] = trace.procedure.stage_mould_names();
    for s in &trace.stages {
        let dir = stage_dir(out, s.index);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        write_file(
            &dir.join("stage.txt"),
            &format!("{}\n", fmt_selection(s.selection)),
        )?;
        write_file(
            &dir.join("B.tsv"),
            &write_letters(&s.operator.raising_part().letters(), mu)?,
        )?;
        write_file(
            &dir.join("D.tsv"),
            &write_letters(&s.operator.log()?.letters(), mu)?,
        )?;
        write_file(
            &dir.join(format!("{gen}.tsv")),
            &write_mould(&s.generator, gen),
        )?;
        write_file(
            &dir.join(format!("{sim_d}.tsv")),
            &write_mould(&s.simplified_d, sim_d),
        )?;
        write_file(
            &dir.join(format!("{sim_b}.tsv")),
            &write_mould(&s.simplified_b, sim_b),
        )?;
        write_file(&dir.join("operator.tsv"), &write_operator(&s.operator))?;
        write_file(&dir.join("generator.tsv"), &write_operator(&s.vector_field))?;
        write_file(&dir.join("map.tsv"), &write_jet(&s.operator.to_map(mu)?))?;
        write_file(
            &dir.join("normalizer.tsv"),
            &write_jet(&s.normalizer()?.images()),
        )?;
    }
    Ok(())
}

fn context(f: &PreparedDiffeo, letters: &[Letter]) -> Result<Arc<TruncationContext>> {
    Ok(Arc::new(TruncationContext::new(
        f.mu().clone(),
        f.max_weight(),
        letters,
    )?))
}

/// Reads a trace directory back. Nothing is recomputed except the
/// alphabets, which are rebuilt from the stored letter listings and, for
/// the universal moulds, from `spec.json`.
pub fn load_trace(dir: &Path) -> Result<NormalizationTrace> {
    let f = parse_spec(&spec_path(dir), None)?;
    let meta_path = dir.join("trace.txt");
    let meta = read_file(&meta_path)?;
    let field = |key: &str| -> Result<&str> {
        meta.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
            .ok_or_else(|| {
                Error::parse(meta_path.display().to_string(), format!("missing `{key}`"))
            })
    };
    let procedure = match field("procedure")? {
        "trim" => Procedure::Trim,
        "dulac" => Procedure::Dulac,
        other => return Err(Error::parse(other, "unknown procedure")),
    };
    let count: usize = field("stages")?
        .parse()
        .map_err(|_| Error::parse(meta_path.display().to_string(), "bad stage count"))?;
    let stationary = field("stationary")? == "true";
    let space = f.space();
    let [gen, sim_d, sim_b] = procedure.stage_mould_names();
    let mut stages = Vec::with_capacity(count);
    for index in 0..count {
        let sd = stage_dir(dir, index);
        let stage_txt = sd.join("stage.txt");
        let selection = parse_selection(&read_file(&stage_txt)?, &stage_txt)?;
        let b_ctx = context(&f, &parse_letters(&read_file(&sd.join("B.tsv"))?)?)?;
        let d_ctx = context(&f, &parse_letters(&read_file(&sd.join("D.tsv"))?)?)?;
        let mould = |name: &str, ctx: &Arc<TruncationContext>| {
            parse_mould(&read_file(&sd.join(format!("{name}.tsv")))?, ctx)
        };
        stages.push(Stage {
            index,
            selection,
            generator: mould(gen, &d_ctx)?,
            simplified_d: mould(sim_d, &d_ctx)?,
            simplified_b: mould(sim_b, &b_ctx)?,
            b_ctx,
            d_ctx,
            operator: parse_operator(&read_file(&sd.join("operator.tsv"))?, space)?,
            vector_field: parse_operator(&read_file(&sd.join("generator.tsv"))?, space)?,
        });
    }
    let (d_ctx, b_ctx) = stage_contexts(f.mu(), &f.substitution()?, f.max_weight())?;
    let [big, small] = procedure.universal_names();
    let universal_d = parse_mould(&read_file(&dir.join(format!("{big}.tsv")))?, &d_ctx)?;
    let universal_b = parse_mould(&read_file(&dir.join(format!("{small}.tsv")))?, &b_ctx)?;
    let final_operator = parse_operator(&read_file(&dir.join("final_operator.tsv"))?, space)?;
    Ok(NormalizationTrace {
        procedure,
        diffeo: f,
        stages,
        final_operator,
        universal_d,
        universal_b,
        stationary,
    })
}
