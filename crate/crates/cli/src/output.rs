use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::{Failure, OutputArgs};

/// Directory used when `--out` is absent.
pub const OUT_DIR_ENV: &str = "QCHANNEL_OUT_DIR";

/// Resolved destination: `--out`, else `$QCHANNEL_OUT_DIR/<stem>.<ext>`,
/// else `None` for stdout.
pub fn destination(args: &OutputArgs, stem: &str, ext: &str) -> Option<PathBuf> {
    if let Some(p) = &args.out {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{stem}.{ext}")))
}

pub fn emit(args: &OutputArgs, stem: &str, ext: &str, text: &str) -> Result<(), Failure> {
    match destination(args, stem, ext) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
            }
            fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

pub fn emit_json<T: serde::Serialize>(args: &OutputArgs, stem: &str, data: T) -> Result<(), Failure> {
    let text = qchannel::json::document(stem, data).map_err(|e| Failure::Io(e.to_string()))?;
    emit(args, stem, "json", &text)
}
