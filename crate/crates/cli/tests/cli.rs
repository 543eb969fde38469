use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hatc_core::catalog::format_group;
use hatc_core::io::{format_graph, read_graph};
use hatc_core::{Graph, Perm, PermGroup};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn hatc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hatc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_holt() {
    let holt = fixtures().join("graphs/holt.graph");
    let o = hatc(&["classify", path(&holt)]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("|V|=27 |D|=108 simple=true"));
    assert!(s.contains("|Aut|=54"));
    assert!(s.contains("arc_transitive=false"));
    assert!(s.contains("classification=HalfArcTransitive"));
}

#[test]
fn classify_doubled_cycle_reports_its_form() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("d5.graph");
    std::fs::write(&f, format_graph(&Graph::doubled_cycle(5).unwrap())).unwrap();
    let s = stdout(&hatc(&["classify", path(&f)]));
    assert!(s.contains("form=doubled_cycle(5)"), "{s}");
}

#[test]
fn autgroup_round_trips_as_a_catalog_file() {
    let holt = fixtures().join("graphs/holt.graph");
    let o = hatc(&["autgroup", path(&holt)]);
    assert!(o.status.success());
    let g = hatc_core::catalog::parse_group(&stdout(&o)).unwrap();
    assert_eq!(g.group.order(), 54);
    assert_eq!(g.group.degree(), 27);
}

#[test]
fn quotient_of_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    let edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    let g = dir.path().join("c6.graph");
    std::fs::write(
        &g,
        format_graph(&Graph::from_simple_edges(6, &edges).unwrap()),
    )
    .unwrap();
    let half = Perm::from_images((0..6).map(|i| (i + 3) % 6).collect()).unwrap();
    let n = dir.path().join("n.grp");
    std::fs::write(
        &n,
        format_group("Half", &PermGroup::new(6, vec![half]).unwrap()),
    )
    .unwrap();
    let o = hatc(&["quotient", path(&g), path(&n)]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# semiregular=true valence_preserving=true covering=true\n"));
    let q = hatc_core::io::parse_graph(&s).unwrap();
    assert_eq!((q.vertex_count(), q.dart_count()), (3, 6));
    // wrong degree
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, format_group("Bad", &PermGroup::trivial(5))).unwrap();
    assert_eq!(
        hatc(&["quotient", path(&g), path(&bad)]).status.code(),
        Some(1)
    );
}

#[test]
fn episearch_pgl27() {
    let o = hatc(&[
        "episearch",
        path(&fixtures().join("catalog/small/PGL2_7.grp")),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("witnesses=2"));
    assert_eq!(
        s.lines()
            .filter(|l| l.starts_with("epi group=PGL2_7 ") && l.ends_with("coset_order=42"))
            .count(),
        2
    );
    let o = hatc(&["episearch", path(&fixtures().join("catalog/small/A5.grp"))]);
    assert!(stdout(&o).contains("witnesses=0"));
}

#[test]
fn census_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat");
    std::fs::create_dir(&cat).unwrap();
    for name in ["PSL2_7", "PGL2_7"] {
        let f = format!("{name}.grp");
        std::fs::copy(fixtures().join("catalog/small").join(&f), cat.join(&f)).unwrap();
    }
    let out = dir.path().join("out");
    let o = hatc(&[
        "census",
        "--catalog",
        path(&cat),
        "--max-order",
        "336",
        "--levels",
        "1",
        "--check",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("level 0 pairs=1"));
    let csv = std::fs::read_to_string(out.join("census.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("ID,|V|,|A_v|,AT"));
    assert_eq!(lines.next(), Some("1,42,16,true"));
    let g1 = read_graph(out.join("graphs/graph_0001.txt")).unwrap();
    assert_eq!(g1.vertex_count(), 42);
    let covers = std::fs::read_to_string(out.join("covers.txt")).unwrap();
    assert!(covers
        .lines()
        .all(|l| l.starts_with("cover p=") && l.contains("base_id=P0")));
    assert_eq!(std::fs::read_to_string(out.join("summary.txt")).unwrap(), s);
    assert_eq!(
        std::fs::read_to_string(out.join("witnesses.txt"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn covers_of_the_order_42_pair() {
    let dir = tempfile::tempdir().unwrap();
    let pair = {
        let cg =
            hatc_core::catalog::read_group(fixtures().join("catalog/small/PGL2_7.grp")).unwrap();
        hatc_core::universal::base_pairs(&cg.name, &cg.group)
            .remove(0)
            .1
    };
    let gf = dir.path().join("id1.graph");
    std::fs::write(&gf, format_graph(&pair.graph)).unwrap();
    let grp = dir.path().join("id1.grp");
    let vg = PermGroup::with_order(42, pair.action.vertex_perms().to_vec(), 336).unwrap();
    std::fs::write(&grp, format_group("G", &vg)).unwrap();
    let o = hatc(&["covers", path(&gf), path(&grp), "--max-order", "700"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let n: usize = s
        .lines()
        .last()
        .unwrap()
        .strip_prefix("covers=")
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(
        s.lines()
            .filter(|l| l.starts_with("cover p=") && l.contains("base_id=id1"))
            .count(),
        n
    );
    assert!(s.contains("cover p=2 d=1 base_id=id1"));
    let o = hatc(&[
        "covers",
        path(&gf),
        path(&grp),
        "--max-order",
        "700",
        "--prime",
        "3",
        "--dim",
        "1",
    ]);
    assert!(stdout(&o)
        .lines()
        .all(|l| l.starts_with("cover p=3 d=1") || l.starts_with("covers=")));
    // the full automorphism group is not half-arc-transitive
    let full = dir.path().join("aut.grp");
    std::fs::write(&full, stdout(&hatc(&["autgroup", path(&gf)]))).unwrap();
    assert_eq!(
        hatc(&["covers", path(&gf), path(&full), "--max-order", "700"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_budgets() {
    let o = hatc(&["verify", "--budget", "small"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("table 1 row  1: pass"));
    assert!(s.lines().last().unwrap().starts_with("1 passed, 0 failed"));
    assert_eq!(
        hatc(&["verify", "--budget", "nonsense"]).status.code(),
        Some(1)
    );
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "graph 2 2\n0 0 1\n1 1 1\n").unwrap();
    let o = hatc(&["classify", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(
        hatc(&["classify", path(&dir.path().join("missing"))])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hatc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hatc(&[
            "census",
            "--catalog",
            path(dir.path()),
            "--max-order",
            "0",
            "--out",
            path(dir.path())
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(hatc(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_count_is_validated() {
    let holt = fixtures().join("graphs/holt.graph");
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_hatc"))
            .env("HATC_THREADS", v)
            .args(["classify", path(&holt)])
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}
