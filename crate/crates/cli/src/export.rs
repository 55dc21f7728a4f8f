//! The `export` subcommand: deterministic artifact files for the local
//! operator, the product eigenvector, and the numeric sector generators.

use qexch_core::statespace::SectorLabel;
use qexch_core::transforms::{assert_constant_row_sums, ground_state_conjugate, to_ctmc};
use qexch_core::weights::{build_w_l, global_hamiltonian};

use crate::config::ModelConfig;
use crate::opfile;
use crate::suites::{local_hamiltonian, weight_spec, SuiteError};

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("{0}")]
    Build(String),
}

/// Renders the requested artifact as text; writing is the caller's job so
/// stdout and `--out` behave identically.
pub fn cmd_export(what: &str, cfg: &ModelConfig) -> Result<String, ExportError> {
    match what {
        "operator" => {
            let h = local_hamiltonian(cfg)?;
            Ok(opfile::write_operator(&h))
        }
        "eigenvector" => {
            let spec = weight_spec(cfg);
            let w = build_w_l(&spec, cfg.l);
            Ok(opfile::write_eigenvector(&w.coeffs))
        }
        "generator" => {
            let spec = weight_spec(cfg);
            let h = local_hamiltonian(cfg)?;
            let h_global =
                global_hamiltonian(&h, cfg.l).map_err(|e| ExportError::Build(e.to_string()))?;
            let w = build_w_l(&spec, cfg.l);
            let m = ground_state_conjugate(&h_global, &w)
                .map_err(|e| ExportError::Build(e.to_string()))?;
            let shift =
                assert_constant_row_sums(&m).map_err(|e| ExportError::Build(e.to_string()))?;
            let q0 = cfg.q0[0];
            let gens = to_ctmc(&m, &shift, q0, cfg.n, cfg.j, cfg.l)
                .map_err(|e| ExportError::Build(e.to_string()))?;
            let mut out = String::new();
            for gen in &gens {
                if let Some(wanted) = &cfg.sector {
                    if gen.sector != SectorLabel(wanted.clone()) {
                        continue;
                    }
                }
                out.push_str(&opfile::write_generator(gen));
            }
            if out.is_empty() {
                return Err(ExportError::Build(
                    "no sector matched the requested configuration".into(),
                ));
            }
            Ok(out)
        }
        other => Err(SuiteError::Unsupported(format!(
            "unknown export target `{other}` (expected operator, eigenvector, or generator)"
        ))
        .into()),
    }
}
