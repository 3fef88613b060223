//! The batch commands behind the `mouldkit` binary.

use std::path::Path;

use crate::error::Result;
use crate::io::spec::{parse_spec, spec_path, write_spec};
use crate::io::trace::{dump_trace, load_trace, prepare_dir, read_file, write_file};
use crate::io::tsv::{parse_jet, write_jet, write_mould};
use crate::prenormal::{
    dulac_iterate, linearize, trim_iterate, verify_prenormal, NamedMould, NormalizationTrace,
    Report,
};

fn finish(trace: &NormalizationTrace, out: &Path) -> Result<Report> {
    let report = verify_prenormal(trace, &trace.diffeo);
    dump_trace(trace, out)?;
    write_file(&out.join("report.txt"), &report.to_string())?;
    Ok(report)
}

/// Trims the spec's diffeomorphism and writes the trace to `out`.
pub fn run_trim(spec: &Path, degree: Option<u32>, out: &Path) -> Result<Report> {
    let f = parse_spec(spec, degree)?;
    finish(&trim_iterate(&f)?, out)
}

/// Runs the Poincaré procedure and writes the trace to `out`.
pub fn run_dulac(spec: &Path, degree: Option<u32>, out: &Path) -> Result<Report> {
    let f = parse_spec(spec, degree)?;
    finish(&dulac_iterate(&f)?, out)
}

/// Linearizes with the universal mould; writes `spec.json`,
/// `LinearizationTheta.tsv`, `normalizer.tsv`, `final.tsv` and `report.txt`.
pub fn run_linearize(spec: &Path, degree: Option<u32>, out: &Path) -> Result<Report> {
    let f = parse_spec(spec, degree)?;
    let lin = linearize(&f)?;
    prepare_dir(out)?;
    write_file(&spec_path(out), &write_spec(&f))?;
    let name = NamedMould::LinearizationTheta.name();
    write_file(
        &out.join(format!("{name}.tsv")),
        &write_mould(&lin.theta, name),
    )?;
    write_file(
        &out.join("normalizer.tsv"),
        &write_jet(&lin.normalizer.images()),
    )?;
    let map = lin.conjugated.to_map(f.mu())?;
    write_file(&out.join("final.tsv"), &write_jet(&map))?;
    let mut report = Report::default();
    report.push("conjugate is F_lin", lin.check, "");
    let linear = crate::diffeo::PreparedDiffeo::linear(f.mu().clone(), f.degree())?.map()?;
    report.push("final map is linear", map == linear, "");
    write_file(&out.join("report.txt"), &report.to_string())?;
    Ok(report)
}

/// The TSV table of a named mould on the spec's alphabets.
pub fn mould_table(
    spec: &Path,
    name: &str,
    max_weight: u32,
    degree: Option<u32>,
) -> Result<String> {
    let f = parse_spec(spec, degree)?;
    let which: NamedMould = name.parse()?;
    Ok(write_mould(&which.compute(&f, max_weight)?, which.name()))
}

/// Reloads a trace directory and checks it, including that the stored
/// jets match the stored operators.
pub fn run_verify(dir: &Path) -> Result<Report> {
    let trace = load_trace(dir)?;
    let f = &trace.diffeo;
    let mut report = verify_prenormal(&trace, f);
    let (nu, n) = (f.nu(), f.degree());
    report.record(
        "final jet",
        (|| Ok(parse_jet(&read_file(&dir.join("final.tsv"))?, nu, n)? == trace.final_map()?))(),
    );
    report.record(
        "normalizer jet",
        (|| {
            Ok(parse_jet(&read_file(&dir.join("normalizer.tsv"))?, nu, n)?
                == trace.normalizer()?.images())
        })(),
    );
    Ok(report)
}
