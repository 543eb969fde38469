//! Level-by-level census of relevant pairs and the files it produces.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::catalog::{CatalogError, CatalogGroup};
use crate::cover::{derived_cover, quotient, translation_action};
use crate::error::{CoverError, GraphError};
use crate::homology::{minimal_admissible_covers, AdmissibleCover, CoverOptions};
use crate::io::format_graph;
use crate::symmetry::{
    aut_group, certificate, is_relevant_pair, transitivity_profile, Classification,
    GraphCertificate,
};
use crate::universal::{dedupe_pairs, epimorphism_search, Provenance, RelevantPair};

/// The order bound below which the full census has been carried out.
pub const DEFAULT_MAX_ORDER: usize = 10752;

#[derive(Debug, thiserror::Error)]
pub enum CensusError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bookkeeping check failed on a cover of pair {parent}: {reason}")]
    Bookkeeping { parent: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub max_order: usize,
    pub catalog: Vec<CatalogGroup>,
    pub primes: Option<Vec<u32>>,
    pub dim: Option<usize>,
    /// Deepest cover level to compute; `None` runs until a level is empty.
    pub max_level: Option<usize>,
    pub seed: u64,
    /// Run the round-trip and order checks on every cover as it is built.
    pub check_covers: bool,
}

impl CensusConfig {
    pub fn new(max_order: usize, catalog: Vec<CatalogGroup>) -> Self {
        CensusConfig {
            max_order,
            catalog,
            primes: None,
            dim: None,
            max_level: None,
            seed: 0,
            check_covers: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub id: usize,
    pub order: usize,
    /// Vertex-stabiliser order in the full automorphism group.
    pub stabiliser_order: u128,
    pub arc_transitive: bool,
}

impl CensusRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.id, self.order, self.stabiliser_order, self.arc_transitive
        )
    }
}

pub const CSV_HEADER: &str = "ID,|V|,|A_v|,AT";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CensusSummary {
    pub witness_classes: usize,
    /// Pairs per level, level 0 first.
    pub level_pairs: Vec<usize>,
    pub graphs: usize,
    pub arc_transitive: usize,
    pub covers_checked: usize,
    pub skipped_groups: Vec<String>,
}

impl CensusSummary {
    pub fn pairs(&self) -> usize {
        self.level_pairs.iter().sum()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "witness_classes={}", self.witness_classes).unwrap();
        for (i, n) in self.level_pairs.iter().enumerate() {
            writeln!(s, "level {i} pairs={n}").unwrap();
        }
        writeln!(s, "pairs={}", self.pairs()).unwrap();
        writeln!(s, "graphs={}", self.graphs).unwrap();
        writeln!(s, "arc_transitive={}", self.arc_transitive).unwrap();
        writeln!(
            s,
            "half_arc_transitive={}",
            self.graphs - self.arc_transitive
        )
        .unwrap();
        if self.covers_checked > 0 {
            writeln!(s, "covers_checked={}", self.covers_checked).unwrap();
        }
        if !self.skipped_groups.is_empty() {
            writeln!(s, "skipped_groups={}", self.skipped_groups.join(",")).unwrap();
        }
        // catalog groups are taken to be semisimple without a radical test
        writeln!(s, "catalog_semisimple=trusted").unwrap();
        s
    }
}

#[derive(Clone, Debug)]
pub struct Census {
    /// Every pair of every level, level 0 first; cover provenance refers
    /// to indices into this list.
    pub pairs: Vec<RelevantPair>,
    /// One pair per isomorphism class of graphs, in record order.
    pub graphs: Vec<RelevantPair>,
    pub certificates: Vec<GraphCertificate>,
    pub records: Vec<CensusRecord>,
    pub witness_lines: Vec<String>,
    pub cover_lines: Vec<String>,
    pub summary: CensusSummary,
}

impl Census {
    pub fn level(&self, i: usize) -> impl Iterator<Item = (usize, &RelevantPair)> {
        self.pairs
            .iter()
            .enumerate()
            .filter(move |(_, p)| pair_level(p) == i)
    }
}

pub fn pair_level(p: &RelevantPair) -> usize {
    match p.provenance {
        Provenance::Base { .. } => 0,
        Provenance::Cover { level, .. } => level,
    }
}

/// Checks the order and round-trip bookkeeping of one admissible cover of
/// `(base, action)`, whose graph certificate is `base_cert`.
pub fn check_cover(
    base: &RelevantPair,
    base_cert: &GraphCertificate,
    c: &AdmissibleCover,
) -> Result<(), String> {
    let q = c.degree();
    if q != (c.p as usize).pow(c.d as u32) {
        return Err(format!("fibre size {q} is not {}^{}", c.p, c.d));
    }
    let cover = &c.lift.cover;
    if cover.vertex_count() != q * base.graph.vertex_count() {
        return Err(format!(
            "cover has {} vertices, expected {}",
            cover.vertex_count(),
            q * base.graph.vertex_count()
        ));
    }
    if c.lift.action.order() != q as u128 * base.action.order() {
        return Err(format!(
            "lifted group has order {}, expected {}",
            c.lift.action.order(),
            q as u128 * base.action.order()
        ));
    }
    let proj = &c.lift.projection;
    if !proj.is_covering() || proj.constant_fibre_size() != Some(q) {
        return Err("projection is not a covering with constant fibres".into());
    }
    let (rebuilt, _) = derived_cover(&c.voltage).map_err(|e| e.to_string())?;
    if &rebuilt != cover {
        return Err("derived cover of the voltage differs from the lifted cover".into());
    }
    let t = translation_action(cover, c.p, c.d).map_err(|e| e.to_string())?;
    let (q_graph, _) = quotient(cover, &t).map_err(|e| e.to_string())?;
    if &certificate(&q_graph).map_err(|e| e.to_string())? != base_cert {
        return Err("quotient by the translations is not the base graph".into());
    }
    if !is_relevant_pair(cover, &c.lift.action) {
        return Err("lifted pair is not relevant".into());
    }
    Ok(())
}

fn base_level(
    cfg: &CensusConfig,
    summary: &mut CensusSummary,
    witness_lines: &mut Vec<String>,
) -> Result<Vec<RelevantPair>, CensusError> {
    let bound = 8 * cfg.max_order as u128;
    let mut pairs = Vec::new();
    for cg in &cfg.catalog {
        if cg.group.order() > bound {
            summary.skipped_groups.push(cg.name.clone());
            continue;
        }
        let witnesses = epimorphism_search(&cg.group);
        summary.witness_classes += witnesses.len();
        let mut found = Vec::new();
        for (i, w) in witnesses.iter().enumerate() {
            let Ok((graph, action)) = w.coset_graph(&cg.group) else {
                continue;
            };
            if graph.vertex_count() > cfg.max_order {
                continue;
            }
            witness_lines.push(w.record(&cg.name, graph.vertex_count()));
            let pair = RelevantPair {
                graph,
                action,
                provenance: Provenance::Base {
                    group: cg.name.clone(),
                    witness: i,
                },
            };
            if pair.is_relevant() {
                found.push(pair);
            }
        }
        // witnesses of one group giving the same graph give the same pair
        let mut kept: Vec<RelevantPair> =
            dedupe_pairs(found)?.into_iter().map(|(_, p)| p).collect();
        kept.sort_by_key(|p| match p.provenance {
            Provenance::Base { witness, .. } => witness,
            _ => unreachable!(),
        });
        pairs.extend(kept);
    }
    Ok(pairs)
}

// what one parent contributes to a level
type LevelBatch = (Vec<RelevantPair>, Vec<String>, usize);

pub fn run_census(cfg: &CensusConfig) -> Result<Census, CensusError> {
    let mut summary = CensusSummary::default();
    let mut witness_lines = Vec::new();
    let mut pairs = base_level(cfg, &mut summary, &mut witness_lines)?;
    summary.level_pairs.push(pairs.len());
    let opts = CoverOptions {
        primes: cfg.primes.clone(),
        dim: cfg.dim,
        seed: cfg.seed,
    };
    let mut cover_lines = Vec::new();
    let mut frontier: Vec<usize> = (0..pairs.len()).collect();
    let mut level = 0;
    while cfg.max_level.is_none_or(|m| level < m) {
        let parents: Vec<usize> = frontier
            .into_iter()
            .filter(|&i| 2 * pairs[i].graph.vertex_count() <= cfg.max_order)
            .collect();
        if parents.is_empty() {
            break;
        }
        level += 1;
        let results: Vec<Result<LevelBatch, CensusError>> = parents
            .par_iter()
            .map(|&i| {
                let base = &pairs[i];
                let covers =
                    minimal_admissible_covers(&base.graph, &base.action, cfg.max_order, &opts)?;
                let base_cert = if cfg.check_covers {
                    Some(certificate(&base.graph)?)
                } else {
                    None
                };
                let mut out = Vec::new();
                let mut lines = Vec::new();
                for c in covers {
                    if let Some(cert) = &base_cert {
                        check_cover(base, cert, &c)
                            .map_err(|reason| CensusError::Bookkeeping { parent: i, reason })?;
                    }
                    lines.push(c.record(&format!("P{i}")));
                    out.push(RelevantPair {
                        graph: c.lift.cover,
                        action: c.lift.action,
                        provenance: Provenance::Cover {
                            parent: i,
                            level,
                            p: c.p,
                            d: c.d,
                            kernel_hash: c.kernel.hash_hex(),
                        },
                    });
                }
                let checked = if base_cert.is_some() { out.len() } else { 0 };
                Ok((out, lines, checked))
            })
            .collect();
        frontier = Vec::new();
        let mut count = 0;
        for r in results {
            let (new, lines, checked) = r?;
            summary.covers_checked += checked;
            count += new.len();
            cover_lines.extend(lines);
            for p in new {
                frontier.push(pairs.len());
                pairs.push(p);
            }
        }
        summary.level_pairs.push(count);
        if count == 0 {
            break;
        }
    }
    let deduped = dedupe_pairs(pairs.clone())?;
    let (certificates, graphs): (Vec<_>, Vec<_>) = deduped.into_iter().unzip();
    let records = graphs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let aut = aut_group(&p.graph)?;
            let at = transitivity_profile(&p.graph, &aut).classification
                == Classification::ArcTransitive;
            Ok(CensusRecord {
                id: i + 1,
                order: p.graph.vertex_count(),
                stabiliser_order: aut.order() / p.graph.vertex_count() as u128,
                arc_transitive: at,
            })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    summary.graphs = records.len();
    summary.arc_transitive = records.iter().filter(|r| r.arc_transitive).count();
    Ok(Census {
        pairs,
        graphs,
        certificates,
        records,
        witness_lines,
        cover_lines,
        summary,
    })
}

pub fn render_csv(records: &[CensusRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn emit_csv(records: &[CensusRecord], path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, render_csv(records))
}

pub fn graph_file_name(id: usize) -> String {
    format!("graph_{id:04}.txt")
}

/// One dart-table file per graph, named by 1-based record ID.
pub fn emit_graphs(graphs: &[RelevantPair], dir: impl AsRef<Path>) -> std::io::Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for (i, p) in graphs.iter().enumerate() {
        std::fs::write(dir.join(graph_file_name(i + 1)), format_graph(&p.graph))?;
    }
    Ok(())
}

/// Writes `census.csv`, `graphs/`, `witnesses.txt`, `covers.txt` and
/// `summary.txt` under `dir`.
pub fn write_census(c: &Census, dir: impl AsRef<Path>) -> std::io::Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    emit_csv(&c.records, dir.join("census.csv"))?;
    emit_graphs(&c.graphs, dir.join("graphs"))?;
    let lines = |v: &[String]| v.iter().map(|l| format!("{l}\n")).collect::<String>();
    std::fs::write(dir.join("witnesses.txt"), lines(&c.witness_lines))?;
    std::fs::write(dir.join("covers.txt"), lines(&c.cover_lines))?;
    std::fs::write(dir.join("summary.txt"), c.summary.render())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_catalog_gives_empty_census() {
        let c = run_census(&CensusConfig::new(1000, Vec::new())).unwrap();
        assert!(c.pairs.is_empty() && c.records.is_empty());
        assert_eq!(render_csv(&c.records), "ID,|V|,|A_v|,AT\n");
    }

    #[test]
    fn csv_row_format() {
        let r = CensusRecord {
            id: 1,
            order: 42,
            stabiliser_order: 16,
            arc_transitive: true,
        };
        assert_eq!(r.csv_row(), "1,42,16,true");
    }
}
