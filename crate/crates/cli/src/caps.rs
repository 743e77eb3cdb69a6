//! Oracle caps from `--caps` and the `CORRKO_MAX_*` environment variables.

use anyhow::{bail, Context, Result};
use corrko_core::OracleCaps;

/// Parses `vertices=8,w=64,states=2000000`; omitted keys keep `base`.
pub fn parse_caps(spec: &str, base: OracleCaps) -> Result<OracleCaps> {
    let mut caps = base;
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').with_context(|| format!("cap `{part}` is not key=value"))?;
        let v = v.trim();
        match k.trim() {
            "vertices" => caps.max_vertices = v.parse().with_context(|| format!("bad vertex cap `{v}`"))?,
            "w" => caps.max_w = v.parse().with_context(|| format!("bad W cap `{v}`"))?,
            "states" => caps.max_states = v.parse().with_context(|| format!("bad state cap `{v}`"))?,
            other => bail!("unknown cap `{other}`; expected vertices, w or states"),
        }
    }
    Ok(caps)
}

/// Applies `CORRKO_MAX_VERTICES`, `CORRKO_MAX_W` and `CORRKO_MAX_STATES`.
pub fn env_caps(base: OracleCaps, get: impl Fn(&str) -> Option<String>) -> Result<OracleCaps> {
    let mut caps = base;
    if let Some(v) = get("CORRKO_MAX_VERTICES") {
        caps.max_vertices = v.parse().context("CORRKO_MAX_VERTICES")?;
    }
    if let Some(v) = get("CORRKO_MAX_W") {
        caps.max_w = v.parse().context("CORRKO_MAX_W")?;
    }
    if let Some(v) = get("CORRKO_MAX_STATES") {
        caps.max_states = v.parse().context("CORRKO_MAX_STATES")?;
    }
    Ok(caps)
}

/// Defaults, then the environment, then `--caps`.
pub fn resolve_caps(flag: Option<&str>) -> Result<OracleCaps> {
    let caps = env_caps(OracleCaps::default(), |k| std::env::var(k).ok())?;
    match flag {
        Some(s) => parse_caps(s, caps),
        None => Ok(caps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_overrides_environment() {
        let env = env_caps(OracleCaps::default(), |k| (k == "CORRKO_MAX_W").then(|| "10".to_string())).unwrap();
        assert_eq!(env.max_w, 10);
        let c = parse_caps("vertices=5, states=7", env).unwrap();
        assert_eq!((c.max_vertices, c.max_w, c.max_states), (5, 10, 7));
        assert!(parse_caps("depth=3", env).is_err());
        assert!(parse_caps("w=x", env).is_err());
    }
}
