use std::collections::HashSet;

use qchannel::bases::{
    bell_basis, convert_dense_to_teleport, ghz_class_basis, nparty_teleport_basis, teleport_basis_ghz, BasisResiduals,
    BitString, ProjectiveBasis,
};
use qchannel::capacity::{capacity_sweep, CapacityRow, CAPACITY_TOL};
use qchannel::locc::ProtocolTranscript;
use qchannel::protocols::{
    dense_code_ghz, dense_code_ghz_converted, dense_code_ghz_from_epr, dense_code_nparty, dense_code_tight,
    general_two_qubit_negative_check, min_fidelity, modified_dense_scheme, onebit_basis, teleclone as run_teleclone, teleport_ghz,
    teleport_ghz_nonlocal_variant, teleport_ghz_over, teleport_nparty, teleport_onebit_style, teleport_tight,
    CorrectionSource, DenseCodingReport, ExecMode, NegativeCheckReport, UnknownState,
};
use qchannel::qla::{DensityMatrix, StateVector, TOL};
use qchannel::verify::run_all;
use serde::Serialize;

use crate::input::{parse_amplitude, parse_state};
use crate::output::{destination, emit, emit_json};
use crate::{
    BasisArgs, BasisKind, CapacityArgs, DenseScheme, DensecodeArgs, Failure, Format, Mode, TelecloneArgs,
    TeleportArgs, TeleportScheme, VerifyArgs,
};

fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn warn_rescaled(rescaled: bool) {
    if rescaled {
        eprintln!("warning: amplitudes were renormalized to unit norm");
    }
}

fn teleport_state(a: &TeleportArgs) -> Result<UnknownState, Failure> {
    let ghz_qubits = match a.scheme {
        TeleportScheme::Nparty => a.n.saturating_sub(1),
        _ => 2,
    };
    if let Some(text) = &a.state {
        let (state, rescaled) = parse_state(text, ghz_qubits).map_err(validation)?;
        warn_rescaled(rescaled);
        return Ok(state);
    }
    let (Some(alpha), Some(beta)) = (&a.alpha, &a.beta) else {
        return Err(validation("supply --alpha and --beta, or --state"));
    };
    let kind = match a.scheme {
        TeleportScheme::Tight => "single",
        TeleportScheme::Ghz => "epr",
        TeleportScheme::Nparty | TeleportScheme::Onebit => "ghz",
    };
    // reject malformed numbers before they are joined into one list
    parse_amplitude(alpha).and_then(|_| parse_amplitude(beta)).map_err(validation)?;
    let (state, rescaled) = parse_state(&format!("{kind}:{alpha},{beta}"), ghz_qubits).map_err(validation)?;
    warn_rescaled(rescaled);
    Ok(state)
}

#[derive(Serialize)]
struct TeleportOutput {
    scheme: &'static str,
    state: String,
    mode: &'static str,
    seed: Option<u64>,
    correction_source: CorrectionSource,
    branches: usize,
    min_fidelity: f64,
    transcripts: Vec<ProtocolTranscript>,
    negative_check: Option<NegativeCheckReport>,
}

pub fn teleport(a: &TeleportArgs) -> Result<(), Failure> {
    let unknown = teleport_state(a)?;
    let general = match &unknown {
        UnknownState::GeneralTwoQubit(amps) => Some(*amps),
        _ => None,
    };
    if a.nonlocal_allowed && a.scheme != TeleportScheme::Ghz {
        return Err(validation("--nonlocal-allowed applies to the ghz scheme only"));
    }
    let (scheme, protocol) = match a.scheme {
        TeleportScheme::Tight => ("tight", teleport_tight(&unknown)?),
        TeleportScheme::Ghz if general.is_some() => ("ghz", teleport_ghz_over(&unknown, StateVector::ghz(3)?)?),
        TeleportScheme::Ghz if a.nonlocal_allowed => ("ghz", teleport_ghz_nonlocal_variant(&unknown, true)?),
        TeleportScheme::Ghz => ("ghz", teleport_ghz(&unknown)?),
        TeleportScheme::Nparty => ("nparty", teleport_nparty(&unknown, a.n)?),
        TeleportScheme::Onebit => ("onebit", teleport_onebit_style(&unknown)?),
    };
    let (mode, seed, exec) = match a.mode {
        Mode::Exhaustive => ("exhaustive", None, ExecMode::Exhaustive),
        Mode::Sample => {
            let seed = a.seed.ok_or_else(|| validation("sample mode requires --seed"))?;
            ("sample", Some(seed), ExecMode::Sample { seed })
        }
    };
    let transcripts = protocol.run(exec)?;
    let min = min_fidelity(&transcripts);
    let negative_check = general.map(general_two_qubit_negative_check).transpose()?;
    let output = TeleportOutput {
        scheme,
        state: unknown.to_string(),
        mode,
        seed,
        correction_source: protocol.source,
        branches: transcripts.len(),
        min_fidelity: min,
        transcripts,
        negative_check,
    };
    emit_json(&a.output, "teleport", &output)?;
    eprintln!("{} branch(es), minimum fidelity {min:.12}", output.branches);
    if 1.0 - min > TOL {
        return Err(Failure::Check(format!("minimum branch fidelity {min:.12} is below 1")));
    }
    Ok(())
}

#[derive(Serialize)]
struct DenseOutput {
    scheme: &'static str,
    n: usize,
    bijective: bool,
    reports: Vec<DenseCodingReport>,
}

pub fn densecode(a: &DensecodeArgs) -> Result<(), Failure> {
    let width = match a.scheme {
        DenseScheme::Tight => 2,
        DenseScheme::Ghz | DenseScheme::GhzConverted | DenseScheme::GhzFromEpr => 3,
        DenseScheme::Nparty | DenseScheme::Modified => a.n,
    };
    let messages: Vec<BitString> = match &a.message {
        Some(m) => vec![BitString::parse(m)?],
        None => BitString::all(width).collect(),
    };
    let run = |m: BitString| match a.scheme {
        DenseScheme::Tight => dense_code_tight(m),
        DenseScheme::Ghz => dense_code_ghz(m),
        DenseScheme::GhzConverted => dense_code_ghz_converted(m),
        DenseScheme::GhzFromEpr => dense_code_ghz_from_epr(m),
        DenseScheme::Nparty => dense_code_nparty(a.n, m),
        DenseScheme::Modified => modified_dense_scheme(a.n, a.k, a.width, m),
    };
    let reports = messages.into_iter().map(run).collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    let bijective = reports.iter().all(|r| r.round_trips() && seen.insert(r.outcome));
    let scheme = match a.scheme {
        DenseScheme::Tight => "tight",
        DenseScheme::Ghz => "ghz",
        DenseScheme::GhzConverted => "ghz-converted",
        DenseScheme::GhzFromEpr => "ghz-from-epr",
        DenseScheme::Nparty => "nparty",
        DenseScheme::Modified => "modified",
    };
    for r in &reports {
        eprintln!("{} -> {}", r.message, r.decoded);
    }
    emit_json(
        &a.output,
        "densecode",
        DenseOutput {
            scheme,
            n: width,
            bijective,
            reports,
        },
    )?;
    if !bijective {
        return Err(Failure::Check("decoding is not a bijection on the messages sent".into()));
    }
    Ok(())
}

pub fn teleclone(a: &TelecloneArgs) -> Result<(), Failure> {
    let report = run_teleclone(&UnknownState::mixed_diagonal(a.lambda0))?;
    emit_json(&a.output, "teleclone", &report)?;
    let input = DensityMatrix::from_diagonal(&[report.lambda0, report.lambda1])?;
    let gap = report
        .rho_b
        .max_abs_diff(&input)?
        .max(report.rho_c.max_abs_diff(&input)?)
        .max(report.max_off_diagonal);
    eprintln!("copy deviation {gap:.3e}");
    if gap > TOL {
        return Err(Failure::Check(format!("copies deviate from the input by {gap:.3e}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct BasisOutput<'a> {
    residuals: BasisResiduals,
    residual_norm: f64,
    basis: &'a ProjectiveBasis,
}

pub fn basis(a: &BasisArgs) -> Result<(), Failure> {
    let b = match a.kind {
        BasisKind::Bell => bell_basis(),
        BasisKind::GhzClass => ghz_class_basis(a.n)?,
        BasisKind::PiBell => teleport_basis_ghz(),
        BasisKind::Nparty => nparty_teleport_basis(a.n)?,
        BasisKind::PiZ => onebit_basis(),
        BasisKind::Converted => ProjectiveBasis::new(
            "converted",
            BitString::all(3).map(convert_dense_to_teleport).collect::<Result<Vec<_>, _>>()?,
        )?,
    };
    let residuals = b.residuals();
    let residual_norm = residuals.orthonormality.max(residuals.completeness);
    emit_json(
        &a.output,
        "basis",
        BasisOutput {
            residuals,
            residual_norm,
            basis: &b,
        },
    )?;
    eprintln!("{}: {} elements, residual {residual_norm:.3e}", b.label(), b.len());
    if residual_norm > TOL {
        return Err(Failure::Check(format!("basis residual {residual_norm:.3e}")));
    }
    Ok(())
}

fn capacity_csv(rows: &[CapacityRow]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["N", "alpha_sq", "E", "holevo", "c", "c_closed_form", "abs_diff"])
        .map_err(io)?;
    for r in rows {
        let f = |v: f64| format!("{v:.16e}");
        w.write_record([
            r.n.to_string(),
            f(r.alpha_sq),
            f(r.e),
            f(r.holevo),
            f(r.c),
            f(r.c_closed_form),
            f(r.abs_diff),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

pub fn capacity(a: &CapacityArgs) -> Result<(), Failure> {
    if a.alpha_grid < 2 {
        return Err(validation("--alpha-grid needs at least 2 points"));
    }
    let rows = capacity_sweep(&a.n, a.alpha_grid)?;
    match a.format {
        Format::Csv => emit(&a.output, "capacity", "csv", &capacity_csv(&rows)?)?,
        Format::Json => emit_json(&a.output, "capacity", &rows)?,
    }
    let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    eprintln!("{} rows, worst disagreement {worst:.3e}", rows.len());
    if worst > CAPACITY_TOL {
        return Err(Failure::Check(format!("Holevo and closed form differ by {worst:.3e}")));
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let report = run_all(a.seed);
    let width = report.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let mut table = String::new();
    for c in &report.checks {
        let name_pad = width - c.name.chars().count();
        table.push_str(&format!(
            "{}  {:<9} {}{}  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.module,
            c.name,
            " ".repeat(name_pad),
            c.detail
        ));
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    table.push_str(&format!(
        "{} checks, {failed} failed, {:.2}s\n",
        report.checks.len(),
        report.seconds
    ));
    print!("{table}");
    if destination(&a.output, "verify", "json").is_some() {
        emit_json(&a.output, "verify", &report.checks)?;
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} invariant check(s) failed")));
    }
    Ok(())
}
