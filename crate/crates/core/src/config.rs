//! Network configurations and their counting summaries.
//!
//! A configuration lists, for every cell, the number of base-station
//! antennas and, for every user of that cell, its receive antennas and the
//! number of streams it expects. Cells and users are indexed from zero in
//! the order they appear in the document.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserConfig {
    pub rx_antennas: usize,
    pub streams: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellConfig {
    pub tx_antennas: usize,
    pub users: Vec<UserConfig>,
}

impl CellConfig {
    /// Total number of streams the base station sends (`d_i`).
    pub fn streams(&self) -> usize {
        self.users.iter().map(|u| u.streams).sum()
    }
}

/// A validated MIMO interference broadcast channel configuration.
///
/// Infeasible configurations are valid values; only structural emptiness and
/// zero counts are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NetworkConfig {
    cells: Vec<CellConfig>,
}

/// Parameters of a configuration in which every cell and every user is
/// identical: `G` cells of `K` users, `M` transmit and `N` receive antennas,
/// `d` streams per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetricParams {
    #[serde(rename = "G")]
    pub cells: usize,
    #[serde(rename = "K")]
    pub users: usize,
    #[serde(rename = "M")]
    pub tx_antennas: usize,
    #[serde(rename = "N")]
    pub rx_antennas: usize,
    pub d: usize,
}

impl SymmetricParams {
    pub fn new(cells: usize, users: usize, tx_antennas: usize, rx_antennas: usize, d: usize) -> Self {
        Self {
            cells,
            users,
            tx_antennas,
            rx_antennas,
            d,
        }
    }

    pub fn to_config(&self) -> Result<NetworkConfig> {
        NetworkConfig::symmetric(
            self.cells,
            self.users,
            self.tx_antennas,
            self.rx_antennas,
            self.d,
        )
    }
}

impl NetworkConfig {
    pub fn new(cells: Vec<CellConfig>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Structure("at least one cell is required".into()));
        }
        for (i, cell) in cells.iter().enumerate() {
            if cell.tx_antennas == 0 {
                return Err(Error::InvalidCount {
                    path: format!("cells[{i}].tx_antennas"),
                    value: 0,
                });
            }
            if cell.users.is_empty() {
                return Err(Error::Structure(format!("cells[{i}].users is empty")));
            }
            for (k, user) in cell.users.iter().enumerate() {
                if user.rx_antennas == 0 {
                    return Err(Error::InvalidCount {
                        path: format!("cells[{i}].users[{k}].rx_antennas"),
                        value: 0,
                    });
                }
                if user.streams == 0 {
                    return Err(Error::InvalidCount {
                        path: format!("cells[{i}].users[{k}].streams"),
                        value: 0,
                    });
                }
            }
        }
        Ok(Self { cells })
    }

    pub fn symmetric(g: usize, k: usize, m: usize, n: usize, d: usize) -> Result<Self> {
        let checks = [("G", g), ("K", k), ("M", m), ("N", n), ("d", d)];
        if let Some((name, _)) = checks.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidCount {
                path: format!("symmetric.{name}"),
                value: 0,
            });
        }
        let cell = CellConfig {
            tx_antennas: m,
            users: vec![
                UserConfig {
                    rx_antennas: n,
                    streams: d,
                };
                k
            ],
        };
        Self::new(vec![cell; g])
    }

    pub fn cells(&self) -> &[CellConfig] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &CellConfig {
        &self.cells[i]
    }

    pub fn user(&self, i: usize, k: usize) -> &UserConfig {
        &self.cells[i].users[k]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_users(&self, i: usize) -> usize {
        self.cells[i].users.len()
    }

    /// `d_i`, the streams sent by base station `i`.
    pub fn cell_streams(&self, i: usize) -> usize {
        self.cells[i].streams()
    }

    /// Iterates over `(cell, user, &UserConfig)` in document order.
    pub fn users(&self) -> impl Iterator<Item = (usize, usize, &UserConfig)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.users.iter().enumerate().map(move |(k, u)| (i, k, u)))
    }

    pub fn total_users(&self) -> usize {
        self.cells.iter().map(|c| c.users.len()).sum()
    }

    /// Returns the symmetric parameters when all cells and users are identical.
    pub fn symmetric_params(&self) -> Option<SymmetricParams> {
        let first = &self.cells[0];
        let user = first.users[0];
        let same = self.cells.iter().all(|c| {
            c.tx_antennas == first.tx_antennas
                && c.users.len() == first.users.len()
                && c.users.iter().all(|u| *u == user)
        });
        same.then(|| {
            SymmetricParams::new(
                self.cells.len(),
                first.users.len(),
                first.tx_antennas,
                user.rx_antennas,
                user.streams,
            )
        })
    }

    /// Common per-user stream count, if every user expects the same number.
    pub fn common_streams(&self) -> Option<usize> {
        let d = self.cells[0].users[0].streams;
        self.users().all(|(_, _, u)| u.streams == d).then_some(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

impl<'de> Deserialize<'de> for NetworkConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        from_value(&value).map_err(serde::de::Error::custom)
    }
}

/// Parses a configuration document in either the explicit `cells` form or
/// the `symmetric` shorthand.
pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_value(&value)
}

fn from_value(value: &Value) -> Result<NetworkConfig> {
    let root = value
        .as_object()
        .ok_or_else(|| Error::Structure("document must be a JSON object".into()))?;
    match (root.get("cells"), root.get("symmetric")) {
        (Some(cells), None) if root.len() == 1 => parse_cells(cells),
        (None, Some(sym)) if root.len() == 1 => parse_symmetric(sym),
        _ => Err(Error::Structure(
            "expected exactly one of the keys `cells` or `symmetric`".into(),
        )),
    }
}

fn parse_cells(value: &Value) -> Result<NetworkConfig> {
    let cells = value
        .as_array()
        .ok_or_else(|| Error::Structure("`cells` must be an array".into()))?;
    let mut out = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        let path = format!("cells[{i}]");
        let obj = object(cell, &path, &["tx_antennas", "users"])?;
        let tx_antennas = count(obj, "tx_antennas", &path)?;
        let users = obj
            .get("users")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Structure(format!("`{path}.users` must be an array")))?;
        let mut parsed_users = Vec::with_capacity(users.len());
        for (k, user) in users.iter().enumerate() {
            let upath = format!("{path}.users[{k}]");
            let uobj = object(user, &upath, &["rx_antennas", "streams"])?;
            parsed_users.push(UserConfig {
                rx_antennas: count(uobj, "rx_antennas", &upath)?,
                streams: count(uobj, "streams", &upath)?,
            });
        }
        out.push(CellConfig {
            tx_antennas,
            users: parsed_users,
        });
    }
    NetworkConfig::new(out)
}

fn parse_symmetric(value: &Value) -> Result<NetworkConfig> {
    let obj = object(value, "symmetric", &["G", "K", "M", "N", "d"])?;
    NetworkConfig::symmetric(
        count(obj, "G", "symmetric")?,
        count(obj, "K", "symmetric")?,
        count(obj, "M", "symmetric")?,
        count(obj, "N", "symmetric")?,
        count(obj, "d", "symmetric")?,
    )
}

fn object<'a>(value: &'a Value, path: &str, keys: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Structure(format!("`{path}` must be an object")))?;
    if let Some(extra) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(Error::Structure(format!("unknown key `{path}.{extra}`")));
    }
    Ok(obj)
}

fn count(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    let full = format!("{path}.{key}");
    let value = obj
        .get(key)
        .ok_or_else(|| Error::Structure(format!("missing key `{full}`")))?;
    let n = value
        .as_i64()
        .ok_or_else(|| Error::Structure(format!("`{full}` must be an integer")))?;
    if n <= 0 {
        return Err(Error::InvalidCount {
            path: full,
            value: n,
        });
    }
    usize::try_from(n).map_err(|_| Error::Structure(format!("`{full}` is out of range")))
}

/// Counting quantities derived from a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountSummary {
    /// `d_i` for every cell.
    pub cell_streams: Vec<usize>,
    pub total_streams: usize,
    /// Scalar variables `L_v` of the effective transmit and receive matrices.
    pub variables: usize,
    /// Scalar inter-cell interference equations `L_e`.
    pub equations: usize,
    pub symmetric: Option<SymmetricParams>,
}

/// Computes `d_i`, `d_tot`, `L_v` and `L_e`.
///
/// A base station or user without spare antennas contributes no variables;
/// the count never goes negative.
pub fn derived_counts(config: &NetworkConfig) -> CountSummary {
    let cell_streams: Vec<usize> = (0..config.num_cells()).map(|i| config.cell_streams(i)).collect();
    let total_streams = cell_streams.iter().sum();
    let tx_vars: usize = config
        .cells()
        .iter()
        .zip(&cell_streams)
        .map(|(c, &d)| c.tx_antennas.saturating_sub(d) * d)
        .sum();
    let rx_vars: usize = config
        .users()
        .map(|(_, _, u)| u.rx_antennas.saturating_sub(u.streams) * u.streams)
        .sum();
    let equations = config
        .users()
        .map(|(i, _, u)| u.streams * (total_streams - cell_streams[i]))
        .sum();
    CountSummary {
        cell_streams,
        total_streams,
        variables: tx_vars + rx_vars,
        equations,
        symmetric: config.symmetric_params(),
    }
}
