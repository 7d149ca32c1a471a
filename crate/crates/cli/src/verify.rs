use anyhow::{anyhow, bail, Context};
use mfd::{verify_decomposition, Formulation};

use crate::input::read_instances;
use crate::record::{InstanceRecord, ResultFile};
use crate::{VerifyArgs, EXIT_INFEASIBLE};

pub fn run(args: &VerifyArgs) -> anyhow::Result<u8> {
    let instances = read_instances(&args.graph)?;
    let text = std::fs::read_to_string(&args.json).with_context(|| format!("reading {}", args.json.display()))?;
    let file = ResultFile::parse(&text)?;
    let mut failures = 0;
    let mut checked = 0;
    for rec in &file.instances {
        let Some(violations) = check_record(rec, &instances, args.variant)? else {
            println!("{}: skipped ({})", rec.name, rec.status);
            continue;
        };
        checked += 1;
        if violations.is_empty() {
            println!("{}: ok", rec.name);
        } else {
            failures += 1;
            println!("{}: {} violation(s)", rec.name, violations.len());
            for v in violations {
                println!("  {v}");
            }
        }
    }
    if checked == 0 {
        bail!("{} holds no decompositions to check", args.json.display());
    }
    Ok(if failures > 0 { EXIT_INFEASIBLE } else { 0 })
}

/// Violation messages for one record, or `None` when it carries no witness.
fn check_record(
    rec: &InstanceRecord,
    instances: &[crate::input::Instance],
    variant: Option<Formulation>,
) -> anyhow::Result<Option<Vec<String>>> {
    if rec.status != "feasible" && rec.status != "generated" {
        return Ok(None);
    }
    let inst = instances
        .iter()
        .find(|i| i.name == rec.name)
        .ok_or_else(|| anyhow!("instance '{}' is not in the graph file", rec.name))?;
    let network = inst.network.as_ref().map_err(|e| anyhow!("instance '{}': {e}", rec.name))?;
    let formulation = match variant {
        Some(f) => f,
        None => rec.variant.parse().map_err(|e: String| anyhow!("instance '{}': {e}", rec.name))?,
    };
    let dec = rec.decomposition(network, formulation.problem()).with_context(|| format!("instance '{}'", rec.name))?;
    let k = rec.k_star.as_ref().and_then(|k| k.value());
    let mut out: Vec<String> = match verify_decomposition(network, &dec, formulation.problem(), k) {
        Ok(()) => Vec::new(),
        Err(vs) => vs.iter().map(ToString::to_string).collect(),
    };
    if rec.mode == "exactly_k" && rec.k.is_some_and(|k| k != dec.size()) {
        out.push(format!("{} elements but exactly {} were requested", dec.size(), rec.k.unwrap()));
    }
    Ok(Some(out))
}
