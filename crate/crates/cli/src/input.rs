//! Amplitude and state parsing for command-line arguments.

use qchannel::protocols::UnknownState;
use qchannel::qla::C64;

/// Normalization error below which inputs are rescaled with a warning.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

/// Normalization error accepted silently.
const EXACT: f64 = 1e-12;

/// Parses `re`, `re+imi` or `re-imi`.
pub fn parse_amplitude(text: &str) -> Result<C64, String> {
    let t = text.trim();
    let bad = || format!("cannot parse amplitude '{text}', expected re or re+imi");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|r| C64::new(r, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im = body[split..].parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

pub fn parse_list(text: &str) -> Result<Vec<C64>, String> {
    text.split(',').map(parse_amplitude).collect()
}

/// Rescales `amps` to unit norm. Errors past [`RENORMALIZE_LIMIT`]; the
/// returned flag is set when a rescale happened.
pub fn normalize(amps: &mut [C64]) -> Result<bool, String> {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > RENORMALIZE_LIMIT {
        return Err(format!("amplitudes have norm {norm}, expected 1"));
    }
    if (norm - 1.0).abs() <= EXACT {
        return Ok(false);
    }
    for z in amps.iter_mut() {
        *z /= norm;
    }
    Ok(true)
}

/// State argument forms: `single:a,b`, `epr:a,b`, `ghz:a,b`,
/// `general:a00,a01,a10,a11`, `mixed:lambda0`.
pub fn parse_state(text: &str, ghz_qubits: usize) -> Result<(UnknownState, bool), String> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| format!("state '{text}' needs a kind prefix such as epr:"))?;
    if kind == "mixed" {
        let l0: f64 = rest.trim().parse().map_err(|_| format!("bad lambda0 '{rest}'"))?;
        return Ok((UnknownState::mixed_diagonal(l0), false));
    }
    let mut amps = parse_list(rest)?;
    let want = if kind == "general" { 4 } else { 2 };
    if amps.len() != want {
        return Err(format!("{kind} state takes {want} amplitudes, got {}", amps.len()));
    }
    let rescaled = normalize(&mut amps)?;
    let (alpha, beta) = (amps[0], amps[1]);
    let state = match kind {
        "single" => UnknownState::SingleQubit { alpha, beta },
        "epr" => UnknownState::EprForm { alpha, beta },
        "ghz" => UnknownState::GhzForm {
            qubits: ghz_qubits,
            alpha,
            beta,
        },
        "general" => UnknownState::GeneralTwoQubit([amps[0], amps[1], amps[2], amps[3]]),
        other => return Err(format!("unknown state kind '{other}'")),
    };
    Ok((state, rescaled))
}
