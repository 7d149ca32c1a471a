use std::path::PathBuf;

use anyhow::{bail, Context};
use mfd::graph::{generate_instance, serialize_graph_file};

use crate::record::{InstanceRecord, ResultFile};
use crate::GenArgs;

/// Where the generating decompositions of `out` are written.
pub fn sidecar_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn run(args: &GenArgs) -> anyhow::Result<u8> {
    if args.nodes < 3 {
        bail!("--nodes must be at least 3");
    }
    if args.elements == 0 || args.count == 0 {
        bail!("--elements and --count must be positive");
    }
    let problem = args.variant.problem();
    let mut networks = Vec::with_capacity(args.count);
    let mut records = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let inst = generate_instance(args.nodes, args.elements, problem, seed)
            .with_context(|| format!("generating instance with seed {seed}"))?;
        let name = format!("gen-{}-n{}-k{}-s{seed}", args.variant.flag(), args.nodes, args.elements);
        let network = inst.network.with_name(name.clone());
        let mut rec = InstanceRecord::blank(&name, args.variant.flag(), "generated");
        rec.status = "generated".into();
        rec.set_elements(&inst.decomposition);
        networks.push(network);
        records.push(rec);
    }
    std::fs::write(&args.out, serialize_graph_file(&networks))
        .with_context(|| format!("writing {}", args.out.display()))?;
    let sidecar = sidecar_path(&args.out);
    let text = serde_json::to_string_pretty(&ResultFile::new(records))? + "\n";
    std::fs::write(&sidecar, text).with_context(|| format!("writing {}", sidecar.display()))?;
    eprintln!("wrote {} instances to {} and {}", args.count, args.out.display(), sidecar.display());
    Ok(0)
}
