//! Reading graph files instance by instance, and the pieces shared by the
//! solving commands.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::Context;
use mfd::graph::parse_graph_file;
use mfd::milp::{backend_from_env, Backend};
use mfd::search::{Budget, SearchOptions};
use mfd::FlowNetwork;

use crate::SolveArgs;

/// One `# name` block of a graph file, parsed on its own so that a bad
/// instance does not hide the others.
pub struct Instance {
    pub name: String,
    pub network: Result<FlowNetwork, String>,
}

pub fn read_instances(path: &Path) -> anyhow::Result<Vec<Instance>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(split_instances(&text))
}

pub fn split_instances(text: &str) -> Vec<Instance> {
    let mut blocks: Vec<(usize, Vec<&str>)> = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.starts_with('#') || blocks.is_empty() {
            blocks.push((i, Vec::new()));
        }
        blocks.last_mut().unwrap().1.push(line);
    }
    let mut out = Vec::new();
    for (start, lines) in blocks {
        if lines.iter().all(|l| l.trim().is_empty()) {
            continue;
        }
        let name = lines[0].strip_prefix('#').map(|n| n.trim().to_string()).unwrap_or_default();
        // pad with blank lines so reported line numbers match the file
        let padded = "\n".repeat(start) + &lines.join("\n");
        let network = match parse_graph_file(&padded) {
            Ok(mut nets) if nets.len() == 1 => Ok(nets.remove(0)),
            Ok(_) => Err("expected one instance".to_string()),
            Err(e) => Err(e.to_string()),
        };
        out.push(Instance { name, network });
    }
    out
}

pub fn search_options(args: &SolveArgs) -> SearchOptions {
    let secs = |s: f64| (s > 0.0).then(|| Duration::from_secs_f64(s));
    SearchOptions {
        budget: Budget { per_probe: secs(args.timeout), total: secs(args.total_timeout) },
        seed: args.seed,
        ..SearchOptions::default()
    }
}

/// The configured backend, or the message for exit code 3.
pub fn backend() -> Result<Box<dyn Backend>, String> {
    backend_from_env().map_err(|e| e.to_string())
}

/// Applies `f` to every item on up to `jobs` threads; results keep input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_instance_does_not_hide_others() {
        let text = "# good\n2\n0 1 3\n# bad\n3\n0 1 2\n1 2 1\n# also good\n2\n0 1 1\n";
        let got = split_instances(text);
        assert_eq!(got.iter().map(|i| i.name.as_str()).collect::<Vec<_>>(), ["good", "bad", "also good"]);
        assert!(got[0].network.is_ok());
        let err = got[1].network.as_ref().unwrap_err();
        assert!(err.contains("line 4"), "{err}");
        assert!(got[2].network.is_ok());
    }

    #[test]
    fn leading_garbage_is_an_instance_error() {
        let got = split_instances("oops\n# a\n2\n0 1 1\n");
        assert_eq!(got.len(), 2);
        assert!(got[0].network.is_err());
    }

    #[test]
    fn parallel_keeps_order() {
        let items: Vec<u64> = (0..50).collect();
        assert_eq!(parallel_map(&items, 4, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
