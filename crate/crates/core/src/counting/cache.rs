//! JSON persistence of built tables. Numbers are decimal strings.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{CountingError, Grid, StackSizes, StackTable};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TableFile {
    format_version: u32,
    n: usize,
    k: usize,
    stack_sizes: StackSizes,
    count: Vec<Vec<String>>,
    excluded: Vec<Vec<String>>,
    free: Vec<Vec<String>>,
    free_ext: Vec<Vec<String>>,
}

pub fn cache_file_name(n: usize, k: usize, sizes: StackSizes) -> String {
    let kind = match sizes {
        StackSizes::Single => "core".to_string(),
        StackSizes::AtLeast(sigma) => format!("sigma{sigma}"),
    };
    format!("tables-v{FORMAT_VERSION}-n{n}-k{k}-{kind}.json")
}

/// Loads the table from `dir` if a cache file exists, otherwise builds it
/// and, when `dir` is given, writes the cache. A cache file that does not
/// match the requested parameters or format is an error.
pub fn load_or_build(
    dir: Option<&Path>,
    n: usize,
    k: usize,
    sizes: StackSizes,
) -> Result<StackTable, CountingError> {
    let Some(dir) = dir else {
        return StackTable::build(n, k, sizes);
    };
    let path = dir.join(cache_file_name(n, k, sizes));
    if path.exists() {
        return StackTable::load(&path, n, k, sizes);
    }
    let table = StackTable::build(n, k, sizes)?;
    fs::create_dir_all(dir)?;
    table.save(&path)?;
    Ok(table)
}

fn encode(grid: &Grid) -> Vec<Vec<String>> {
    grid.rows()
        .iter()
        .map(|r| r.iter().map(BigUint::to_string).collect())
        .collect()
}

fn decode(rows: Vec<Vec<String>>, like: &Grid, name: &str) -> Result<Grid, CountingError> {
    let bad = || CountingError::Cache(format!("grid `{name}` has the wrong layout"));
    if rows.len() != like.rows().len() {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(rows.len());
    for (row, want) in rows.into_iter().zip(like.rows()) {
        if row.len() != want.len() {
            return Err(bad());
        }
        let parsed = row
            .iter()
            .map(|s| {
                s.parse::<BigUint>().map_err(|_| {
                    CountingError::Cache(format!("grid `{name}` holds a non-integer `{s}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(parsed);
    }
    Ok(Grid { rows: out })
}

impl StackTable {
    pub fn save(&self, path: &Path) -> Result<(), CountingError> {
        let file = TableFile {
            format_version: FORMAT_VERSION,
            n: self.n,
            k: self.k(),
            stack_sizes: self.sizes,
            count: encode(&self.count),
            excluded: encode(&self.excluded),
            free: encode(&self.free),
            free_ext: encode(&self.free_ext),
        };
        let tmp: PathBuf = path.with_extension("json.tmp");
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        serde_json::to_writer(&mut w, &file)?;
        w.flush()?;
        drop(w);
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Reads a cache file and checks that it holds tables for exactly
    /// `(n, k, sizes)` in the current format. Values are taken as stored;
    /// [`StackTable::check_recurrences`] verifies them.
    pub fn load(path: &Path, n: usize, k: usize, sizes: StackSizes) -> Result<Self, CountingError> {
        let file: TableFile = serde_json::from_reader(BufReader::new(fs::File::open(path)?))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CountingError::Cache(format!(
                "format version {} found, {FORMAT_VERSION} expected",
                file.format_version
            )));
        }
        if (file.n, file.k, file.stack_sizes) != (n, k, sizes) {
            return Err(CountingError::Cache(format!(
                "file holds tables for n = {}, k = {}, {:?}",
                file.n, file.k, file.stack_sizes
            )));
        }
        let mut table = StackTable::empty(n, k, sizes)?;
        table.count = decode(file.count, &table.count, "count")?;
        table.excluded = decode(file.excluded, &table.excluded, "excluded")?;
        table.free = decode(file.free, &table.free, "free")?;
        table.free_ext = decode(file.free_ext, &table.free_ext, "free_ext")?;
        for i in 0..table.count.rows.len() {
            for ord in 0..table.count.rows[i].len() {
                let c = &table.count.rows[i][ord];
                let ex = table.excluded.at(i as isize, ord);
                if ex > c {
                    return Err(CountingError::NegativeResidual {
                        len: i,
                        shape: table.space.shape(ord).clone(),
                    });
                }
                table.residual.rows[i][ord] = c - ex;
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_cache() {
        let dir = tempfile::tempdir().unwrap();
        let sizes = StackSizes::AtLeast(2);
        let built = load_or_build(Some(dir.path()), 12, 3, sizes).unwrap();
        let path = dir.path().join(cache_file_name(12, 3, sizes));
        assert!(path.exists());
        let loaded = load_or_build(Some(dir.path()), 12, 3, sizes).unwrap();
        assert_eq!(loaded.count, built.count);
        assert_eq!(loaded.residual, built.residual);
        assert_eq!(loaded.free_ext, built.free_ext);
        assert_eq!(loaded.check_recurrences(), 0);
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let table = StackTable::build(6, 2, StackSizes::Single).unwrap();
        let path = dir.path().join("t.json");
        table.save(&path).unwrap();
        assert!(matches!(
            StackTable::load(&path, 6, 3, StackSizes::Single),
            Err(CountingError::Cache(_))
        ));
        let text = fs::read_to_string(&path)
            .unwrap()
            .replace("\"format_version\":1", "\"format_version\":0");
        fs::write(&path, text).unwrap();
        assert!(matches!(
            StackTable::load(&path, 6, 2, StackSizes::Single),
            Err(CountingError::Cache(_))
        ));
    }
}
