//! Line-oriented key=value config files. Flags given on the command line
//! take precedence; config values only fill fields that were not set.

use netecc_core::error::{Error, Result};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

fn parse_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected key=value", lineno + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn fill<T: std::str::FromStr>(slot: &mut Option<T>, map: &HashMap<String, String>, key: &str) -> Result<()> {
    if slot.is_none() {
        if let Some(raw) = map.get(key) {
            let parsed = raw
                .parse()
                .map_err(|_| Error::Parse(format!("config key '{key}': bad value '{raw}'")))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

fn fill_flag(slot: &mut bool, map: &HashMap<String, String>, key: &str) -> Result<()> {
    if !*slot {
        if let Some(raw) = map.get(key) {
            *slot = raw
                .parse()
                .map_err(|_| Error::Parse(format!("config key '{key}': bad bool '{raw}'")))?;
        }
    }
    Ok(())
}

fn fill_path(slot: &mut Option<PathBuf>, map: &HashMap<String, String>, key: &str) {
    if slot.is_none() {
        if let Some(raw) = map.get(key) {
            *slot = Some(PathBuf::from(raw));
        }
    }
}

pub fn merge_bounds(args: &mut crate::BoundsArgs, config: Option<&Path>) -> Result<()> {
    let Some(path) = config else { return Ok(()) };
    let map = parse_file(path)?;
    fill(&mut args.c, &map, "c")?;
    fill(&mut args.e, &map, "e")?;
    fill(&mut args.m, &map, "m")?;
    fill(&mut args.n, &map, "n")?;
    fill(&mut args.p_max, &map, "p_max")?;
    fill(&mut args.steps, &map, "steps")?;
    fill_flag(&mut args.classical, &map, "classical")?;
    fill_path(&mut args.out, &map, "out");
    Ok(())
}

pub fn merge_construct(args: &mut crate::ConstructArgs, config: Option<&Path>) -> Result<()> {
    let Some(path) = config else { return Ok(()) };
    let map = parse_file(path)?;
    fill_path(&mut args.topology, &map, "topology");
    fill(&mut args.m, &map, "m")?;
    fill(&mut args.n, &map, "n")?;
    fill(&mut args.p, &map, "p")?;
    fill(&mut args.construction, &map, "construction")?;
    fill(&mut args.seed, &map, "seed")?;
    fill(&mut args.network_seed, &map, "network_seed")?;
    fill_flag(&mut args.repair, &map, "repair")?;
    fill(&mut args.sampling, &map, "sampling")?;
    fill(&mut args.epsilon, &map, "epsilon")?;
    fill(&mut args.attempts, &map, "attempts")?;
    fill_path(&mut args.out, &map, "out");
    Ok(())
}

pub fn merge_simulate(args: &mut crate::SimulateArgs, config: Option<&Path>) -> Result<()> {
    let Some(path) = config else { return Ok(()) };
    let map = parse_file(path)?;
    fill_path(&mut args.topology, &map, "topology");
    fill_path(&mut args.codebook, &map, "codebook");
    fill(&mut args.network_seed, &map, "network_seed")?;
    fill(&mut args.noise, &map, "noise")?;
    fill(&mut args.budget, &map, "budget")?;
    fill(&mut args.trials, &map, "trials")?;
    fill(&mut args.strategy, &map, "strategy")?;
    fill(&mut args.seed, &map, "seed")?;
    fill_flag(&mut args.repair, &map, "repair")?;
    fill_path(&mut args.out, &map, "out");
    Ok(())
}

pub fn merge_concat(args: &mut crate::ConcatArgs, config: Option<&Path>) -> Result<()> {
    let Some(path) = config else { return Ok(()) };
    let map = parse_file(path)?;
    fill_path(&mut args.topology, &map, "topology");
    fill(&mut args.m, &map, "m")?;
    fill(&mut args.b, &map, "b")?;
    fill(&mut args.n_out, &map, "n_out")?;
    fill(&mut args.k_out, &map, "k_out")?;
    fill(&mut args.p_inner, &map, "p_inner")?;
    fill(&mut args.w_max, &map, "w_max")?;
    fill(&mut args.mode, &map, "mode")?;
    fill(&mut args.trials, &map, "trials")?;
    fill(&mut args.budget, &map, "budget")?;
    fill(&mut args.network_seed, &map, "network_seed")?;
    fill(&mut args.seed, &map, "seed")?;
    fill_flag(&mut args.repair, &map, "repair")?;
    fill_path(&mut args.out, &map, "out");
    Ok(())
}
