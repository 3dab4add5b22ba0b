use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SearchConfig, SearchError, SearchState, StepRecord};
use crate::auxfun::AuxFunction;
use crate::catalog::{parse_catalog, serialize_catalog, Catalog, CatalogError};

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("history sidecar: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    config: Option<SearchConfig>,
    m: f64,
    history: Vec<StepRecord>,
}

/// Render a state as catalog text plus a JSON history sidecar.
///
/// Weights use the shortest round-trip decimal form, so reloading gives
/// back the same doubles.
pub fn save_state(state: &SearchState, cfg: Option<&SearchConfig>) -> (String, String) {
    let entries = state
        .af
        .terms()
        .iter()
        .map(|(q, c)| (q.clone(), format!("{c}")))
        .collect::<Vec<_>>();
    let bound = format!("{}", state.m);
    let cat = Catalog::from_entries(
        "search-state",
        Some(&bound),
        entries
            .iter()
            .map(|(q, w)| (q.clone(), w.as_str()))
            .collect(),
    )
    .expect("finite nonnegative weights render as decimals");
    let sidecar = Sidecar {
        config: cfg.cloned(),
        m: state.m,
        history: state.history.clone(),
    };
    (
        serialize_catalog(&cat),
        serde_json::to_string_pretty(&sidecar).expect("history serializes"),
    )
}

/// Rebuild a state from `save_state` output. Without a sidecar the history
/// starts empty. The minimum is always recomputed from the weights.
pub fn load_state(
    catalog: &str,
    sidecar: Option<&str>,
) -> Result<(SearchState, Option<SearchConfig>), StateFileError> {
    let cat = parse_catalog(catalog)?;
    let af = AuxFunction::new(
        cat.entries
            .iter()
            .map(|e| (e.poly.clone(), e.weight.to_f64()))
            .collect(),
    )
    .map_err(CatalogError::from)?;
    let mut state = SearchState::from_aux(af)?;
    let mut cfg = None;
    if let Some(text) = sidecar {
        let side: Sidecar = serde_json::from_str(text)?;
        state.history = side.history;
        cfg = side.config;
    }
    Ok((state, cfg))
}
