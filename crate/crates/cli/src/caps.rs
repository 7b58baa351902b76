//! Cap defaults, the `FREEISO_CAPS` override and the command-line flags.

use freeiso::isogroup::Caps;
use freeiso::{Error, Result};
use serde_json::{json, Value};

use crate::Global;

pub fn resolve(g: &Global) -> Result<Caps> {
    let mut caps = Caps::default();
    if let Ok(spec) = std::env::var("FREEISO_CAPS") {
        apply_env(&mut caps, &spec)?;
    }
    if let Some(v) = g.max_cycles {
        caps.max_cycles = v;
    }
    if let Some(v) = g.max_cycle_len {
        caps.max_cycle_len = Some(v);
    }
    if let Some(v) = g.cap_search {
        caps.search_nodes = v;
    }
    Ok(caps)
}

fn apply_env(caps: &mut Caps, spec: &str) -> Result<()> {
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Input(format!("FREEISO_CAPS: cannot read {item:?}"));
        let (key, value) = item.split_once('=').ok_or_else(bad)?;
        let n: u64 = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "max_cycles" => caps.max_cycles = n as usize,
            "max_cycle_len" => caps.max_cycle_len = Some(n as usize),
            "search_nodes" => caps.search_nodes = n,
            "closure_limit" => caps.closure_limit = n as usize,
            _ => return Err(bad()),
        }
    }
    Ok(())
}

pub fn to_json(c: &Caps) -> Value {
    json!({
        "max_cycles": c.max_cycles,
        "max_cycle_len": c.max_cycle_len,
        "search_nodes": c.search_nodes,
        "closure_limit": c.closure_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_spec_sets_fields() {
        let mut caps = Caps::default();
        apply_env(&mut caps, "max_cycles=10, max_cycle_len=4,search_nodes=99").unwrap();
        assert_eq!((caps.max_cycles, caps.max_cycle_len, caps.search_nodes), (10, Some(4), 99));
        assert!(apply_env(&mut caps, "nodes=1").is_err());
        assert!(apply_env(&mut caps, "max_cycles").is_err());
    }
}
