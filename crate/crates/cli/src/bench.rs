use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mfd::Formulation;

use crate::decompose::{error_record, solve_instance, Task};
use crate::input::{backend, parallel_map, read_instances, search_options};
use crate::record::InstanceRecord;
use crate::{BenchArgs, EXIT_BACKEND};

/// Inclusive k range; `hi = None` is open-ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bucket {
    pub lo: usize,
    pub hi: Option<usize>,
}

impl Bucket {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let t = text.trim();
        let bad = || anyhow::anyhow!("bad bucket '{t}' (expected like 4-10 or 21+)");
        if let Some(lo) = t.strip_suffix('+') {
            return Ok(Bucket { lo: lo.parse().map_err(|_| bad())?, hi: None });
        }
        let (lo, hi) = t.split_once('-').ok_or_else(bad)?;
        let (lo, hi): (usize, usize) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
        if lo > hi {
            return Err(bad());
        }
        Ok(Bucket { lo, hi: Some(hi) })
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= self.lo && self.hi.is_none_or(|hi| k <= hi)
    }

    pub fn label(&self) -> String {
        match self.hi {
            Some(hi) => format!("{}-{hi}", self.lo),
            None => format!("{}+", self.lo),
        }
    }
}

/// One instance solved under every benchmarked variant.
#[derive(Clone, Debug)]
pub struct Row {
    pub file: String,
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    /// Parallel to the benchmarked variants.
    pub results: Vec<InstanceRecord>,
}

impl Row {
    /// k* of paths-or-cycles when benchmarked and found, else of the first variant with a k*.
    fn bucket_key(&self, variants: &[Formulation]) -> Option<usize> {
        let k_of = |i: usize| self.results[i].k_star.as_ref().and_then(|k| k.value());
        let pc = variants.iter().position(|&v| v == Formulation::PathsOrCycles).and_then(k_of);
        pc.or_else(|| (0..variants.len()).find_map(k_of))
    }
}

fn cg_total(rec: &InstanceRecord) -> usize {
    rec.probes.iter().map(|p| p.cg_iterations).sum()
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

fn push_stats(out: &mut Vec<String>, values: &[f64]) {
    match mean_std(values) {
        Some((m, s)) => {
            out.push(format!("{m:.3}"));
            out.push(format!("{s:.3}"));
        }
        None => out.extend([String::new(), String::new()]),
    }
}

pub fn summary_header(variants: &[Formulation]) -> Vec<String> {
    let mut h: Vec<String> = ["bucket", "instances", "n_mean", "n_std", "m_mean", "m_std"].map(String::from).into();
    for v in variants {
        for col in ["k_mean", "k_std", "time_mean", "time_std", "feasible_pct", "cg_mean"] {
            h.push(format!("{}_{col}", v.flag()));
        }
    }
    h
}

fn summary_row(label: &str, rows: &[&Row], variants: &[Formulation]) -> Vec<String> {
    let mut out = vec![label.to_string(), rows.len().to_string()];
    push_stats(&mut out, &rows.iter().map(|r| r.nodes as f64).collect::<Vec<_>>());
    push_stats(&mut out, &rows.iter().map(|r| r.edges as f64).collect::<Vec<_>>());
    for i in 0..variants.len() {
        let recs: Vec<&InstanceRecord> = rows.iter().map(|r| &r.results[i]).collect();
        let ks: Vec<f64> = recs.iter().filter_map(|r| r.k_star.as_ref()?.value()).map(|k| k as f64).collect();
        push_stats(&mut out, &ks);
        push_stats(&mut out, &recs.iter().map(|r| r.timings.total_seconds).collect::<Vec<_>>());
        if recs.is_empty() {
            out.extend([String::new(), String::new()]);
        } else {
            let feasible = recs.iter().filter(|r| r.status == "feasible").count();
            out.push(format!("{:.1}", 100.0 * feasible as f64 / recs.len() as f64));
            let cg: Vec<f64> = recs.iter().map(|r| cg_total(r) as f64).collect();
            out.push(format!("{:.3}", mean_std(&cg).unwrap().0));
        }
    }
    out
}

/// Summary table: one row per bucket, an `unbucketed` row when some
/// instance has no k*, and a `total` row over all instances.
pub fn summarize(rows: &[Row], variants: &[Formulation], buckets: &[Bucket]) -> Vec<Vec<String>> {
    let mut table = vec![summary_header(variants)];
    let keys: Vec<Option<usize>> = rows.iter().map(|r| r.bucket_key(variants)).collect();
    let mut placed = vec![false; rows.len()];
    for b in buckets {
        let mut members: Vec<&Row> = Vec::new();
        for (i, (r, k)) in rows.iter().zip(&keys).enumerate() {
            if !placed[i] && k.is_some_and(|k| b.contains(k)) {
                placed[i] = true;
                members.push(r);
            }
        }
        table.push(summary_row(&b.label(), &members, variants));
    }
    let rest: Vec<&Row> = rows.iter().zip(&placed).filter(|(_, &p)| !p).map(|(r, _)| r).collect();
    if !rest.is_empty() {
        table.push(summary_row("unbucketed", &rest, variants));
    }
    table.push(summary_row("total", &rows.iter().collect::<Vec<_>>(), variants));
    table
}

pub fn records_table(rows: &[Row], variants: &[Formulation], buckets: &[Bucket]) -> Vec<Vec<String>> {
    let mut h: Vec<String> = ["file", "name", "n", "m", "bucket"].map(String::from).into();
    for v in variants {
        for col in ["status", "k", "seconds", "cg_iterations"] {
            h.push(format!("{}_{col}", v.flag()));
        }
    }
    let mut table = vec![h];
    for r in rows {
        let bucket = r
            .bucket_key(variants)
            .and_then(|k| buckets.iter().find(|b| b.contains(k)))
            .map(Bucket::label)
            .unwrap_or_else(|| "unbucketed".into());
        let mut line = vec![r.file.clone(), r.name.clone(), r.nodes.to_string(), r.edges.to_string(), bucket];
        for rec in &r.results {
            line.push(rec.status.clone());
            line.push(rec.k_star.as_ref().and_then(|k| k.value()).map(|k| k.to_string()).unwrap_or_default());
            line.push(format!("{:.6}", rec.timings.total_seconds));
            line.push(cg_total(rec).to_string());
        }
        table.push(line);
    }
    table
}

fn write_csv(table: &[Vec<String>], path: Option<&Path>) -> anyhow::Result<()> {
    let sink: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in table {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn graph_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "graph"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn run(args: &BenchArgs) -> anyhow::Result<u8> {
    let buckets = args.buckets.iter().map(|b| Bucket::parse(b)).collect::<anyhow::Result<Vec<_>>>()?;
    if args.variants.is_empty() {
        bail!("--variants is empty");
    }
    let backend = match backend() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return Ok(EXIT_BACKEND);
        }
    };
    let mut jobs = Vec::new();
    for file in graph_files(&args.dir)? {
        let label = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
        for inst in read_instances(&file)? {
            jobs.push((label.clone(), inst));
        }
    }
    if jobs.is_empty() {
        bail!("no instances in {} (expected *.graph files)", args.dir.display());
    }
    let options = search_options(&args.solve);
    let missing = std::sync::atomic::AtomicBool::new(false);
    let rows: Vec<Row> = parallel_map(&jobs, args.solve.jobs, |(file, inst)| {
        let results = args
            .variants
            .iter()
            .map(|&formulation| {
                let task = Task { formulation, strategy: args.solve.strategy, exactly_k: None };
                match &inst.network {
                    Ok(net) => {
                        let solved = solve_instance(backend.as_ref(), net, task, &options);
                        if solved.backend_missing {
                            missing.store(true, std::sync::atomic::Ordering::Relaxed);
                        }
                        solved.record
                    }
                    Err(msg) => error_record(&inst.name, task, msg.clone()),
                }
            })
            .collect();
        let (nodes, edges) = inst.network.as_ref().map(|n| (n.node_count(), n.edge_count())).unwrap_or((0, 0));
        Row { file: file.clone(), name: inst.name.clone(), nodes, edges, results }
    });
    if missing.into_inner() {
        eprintln!("error: the MILP backend is unavailable");
        return Ok(EXIT_BACKEND);
    }
    for r in &rows {
        for rec in r.results.iter().filter(|rec| rec.status == "error" || rec.status == "budget_exceeded") {
            eprintln!("{} [{}]: {}: {}", r.name, rec.variant, rec.status, rec.error.as_deref().unwrap_or(""));
        }
    }
    write_csv(&summarize(&rows, &args.variants, &buckets), args.out.as_deref())?;
    if let Some(path) = &args.records {
        write_csv(&records_table(&rows, &args.variants, &buckets), Some(path))?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{KStar, ProbeRecord};

    fn rec(variant: &str, status: &str, k: Option<usize>, secs: f64, cg: usize) -> InstanceRecord {
        let mut r = InstanceRecord::blank("x", variant, "min");
        r.status = status.into();
        r.k_star = k.map(KStar::Value).or((status == "infeasible").then(KStar::infeasible));
        r.timings.total_seconds = secs;
        r.probes = vec![ProbeRecord { k: 1, verdict: status.into(), seconds: secs, cg_iterations: cg, rounds: cg + 1 }];
        r
    }

    fn row(n: usize, pc: Option<usize>, trail: Option<usize>) -> Row {
        let status = |k: Option<usize>| if k.is_some() { "feasible" } else { "infeasible" };
        Row {
            file: "f.graph".into(),
            name: format!("n{n}"),
            nodes: n,
            edges: 2 * n,
            results: vec![rec("pc", status(pc), pc, 1.0, 0), rec("trail-cg", status(trail), trail, 2.0, 3)],
        }
    }

    #[test]
    fn bucket_parsing() {
        assert_eq!(Bucket::parse("4-10").unwrap(), Bucket { lo: 4, hi: Some(10) });
        assert_eq!(Bucket::parse("21+").unwrap(), Bucket { lo: 21, hi: None });
        assert!(Bucket::parse("10-4").is_err());
        assert!(Bucket::parse("x").is_err());
        assert!(Bucket::parse("21+").unwrap().contains(400));
        assert!(!Bucket::parse("4-10").unwrap().contains(3));
    }

    #[test]
    fn summary_counts_add_up() {
        let variants = [Formulation::PathsOrCycles, Formulation::TrailsCg];
        let buckets = [Bucket::parse("1-3").unwrap(), Bucket::parse("4+").unwrap()];
        let rows = vec![row(5, Some(2), None), row(7, Some(3), Some(2)), row(9, Some(5), Some(4))];
        let t = summarize(&rows, &variants, &buckets);
        assert_eq!(t[0].len(), 6 + 2 * 6);
        assert_eq!(t.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["bucket", "1-3", "4+", "total"]);
        assert_eq!(t[1][1], "2");
        assert_eq!(t[2][1], "1");
        assert_eq!(t[3][1], "3");
        // bucket 1-3: n = 5, 7
        assert_eq!(t[1][2], "6.000");
        assert_eq!(t[1][3], "1.000");
        // trails feasible in one of the two small instances
        let pct = summary_header(&variants).iter().position(|h| h == "trail-cg_feasible_pct").unwrap();
        assert_eq!(t[1][pct], "50.0");
        assert_eq!(t[3][pct], "66.7");
        let cg = summary_header(&variants).iter().position(|h| h == "trail-cg_cg_mean").unwrap();
        assert_eq!(t[3][cg], "3.000");
    }

    #[test]
    fn unbucketed_row_when_no_k() {
        let variants = [Formulation::TrailsCg];
        let buckets = [Bucket::parse("1-3").unwrap()];
        let mut r = row(4, None, None);
        r.results.remove(0);
        let t = summarize(&[r], &variants, &buckets);
        assert_eq!(t.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["bucket", "1-3", "unbucketed", "total"]);
        assert_eq!(t[1][1], "0");
        assert_eq!(t[1][2], "");
    }

    #[test]
    fn records_follow_rows() {
        let variants = [Formulation::PathsOrCycles, Formulation::TrailsCg];
        let buckets = [Bucket::parse("1-3").unwrap()];
        let t = records_table(&[row(5, Some(2), None)], &variants, &buckets);
        assert_eq!(t[1][..5], ["f.graph", "n5", "5", "10", "1-3"].map(String::from));
        assert_eq!(t[1][5], "feasible");
        assert_eq!(t[1][9], "infeasible");
        assert_eq!(t[1][10], "");
    }
}
