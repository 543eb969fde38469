//! Group files and catalogs (directories of group files).
//!
//! ```text
//! group PGL2_7
//! degree 8
//! order 336
//! gen 0 2 3 4 5 6 7 1
//! gen 0 1 3 5 7 2 4 6
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{GroupError, ParseError};
use crate::group::PermGroup;
use crate::io::{content_lines, parse_usize};
use crate::perm::Perm;

#[derive(Clone, Debug)]
pub struct CatalogGroup {
    pub name: String,
    pub group: PermGroup,
}

pub fn parse_group(text: &str) -> Result<CatalogGroup, ParseError> {
    let mut name = None;
    let mut degree = None;
    let mut order: Option<u128> = None;
    let mut gens = Vec::new();
    for (ln, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        let key = toks.next().expect("non-empty line");
        let rest: Vec<&str> = toks.collect();
        match key {
            "group" => {
                if rest.len() != 1 {
                    return Err(ParseError::at(ln, "expected `group <name>`"));
                }
                name = Some(rest[0].to_string());
            }
            "degree" => {
                if rest.len() != 1 {
                    return Err(ParseError::at(ln, "expected `degree <k>`"));
                }
                degree = Some(parse_usize(rest[0], ln)?);
            }
            "order" => {
                let n = rest.first().and_then(|t| t.parse::<u128>().ok());
                if rest.len() != 1 || n.is_none() {
                    return Err(ParseError::at(ln, "expected `order <n>`"));
                }
                order = n;
            }
            "gen" => {
                let k = degree.ok_or_else(|| ParseError::at(ln, "`gen` before `degree`"))?;
                if rest.len() != k {
                    return Err(ParseError::at(
                        ln,
                        format!("generator has {} images, degree is {k}", rest.len()),
                    ));
                }
                let images = rest
                    .iter()
                    .map(|t| parse_usize(t, ln))
                    .collect::<Result<Vec<_>, _>>()?;
                gens.push(
                    Perm::from_images(images).map_err(|e| ParseError::at(ln, e.to_string()))?,
                );
            }
            other => return Err(ParseError::at(ln, format!("unknown keyword `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| ParseError::Format("missing `group <name>` line".into()))?;
    let degree = degree.ok_or_else(|| ParseError::Format("missing `degree <k>` line".into()))?;
    let group = PermGroup::new(degree, gens)?;
    if let Some(declared) = order {
        let computed = group.order();
        if computed != declared {
            return Err(GroupError::OrderMismatch { declared, computed }.into());
        }
    }
    Ok(CatalogGroup { name, group })
}

pub fn format_group(name: &str, g: &PermGroup) -> String {
    let mut out = format!("group {name}\ndegree {}\norder {}\n", g.degree(), g.order());
    for p in g.generators() {
        let images: Vec<String> = p.images().iter().map(usize::to_string).collect();
        let _ = writeln!(out, "gen {}", images.join(" "));
    }
    out
}

pub fn read_group(path: impl AsRef<Path>) -> Result<CatalogGroup, ParseError> {
    parse_group(&std::fs::read_to_string(path)?)
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct CatalogError {
    pub path: PathBuf,
    #[source]
    pub source: ParseError,
}

/// Reads every `*.grp` file of a directory, in file-name order.
pub fn read_catalog(dir: impl AsRef<Path>) -> Result<Vec<CatalogGroup>, CatalogError> {
    let dir = dir.as_ref();
    let wrap = |path: &Path, e: ParseError| CatalogError {
        path: path.to_path_buf(),
        source: e,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| wrap(dir, e.into()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "grp"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| read_group(p).map_err(|e| wrap(p, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_verify_order() {
        let g = parse_group("group S3\ndegree 3\norder 6\ngen 1 0 2\ngen 1 2 0\n").unwrap();
        assert_eq!(g.name, "S3");
        assert_eq!(g.group.order(), 6);
        assert!(parse_group("group S3\ndegree 3\norder 5\ngen 1 0 2\ngen 1 2 0\n").is_err());
        assert!(parse_group("group X\ndegree 3\ngen 1 1 2\n").is_err());
        assert!(parse_group("degree 3\ngen 1 0 2\n").is_err());
    }

    #[test]
    fn round_trip() {
        let g = parse_group("group C4\ndegree 4\ngen 1 2 3 0\n").unwrap();
        let again = parse_group(&format_group(&g.name, &g.group)).unwrap();
        assert_eq!(again.group.generators(), g.group.generators());
    }
}
