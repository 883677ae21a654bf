//! Explicit construction of an invertible Jacobian at a structured channel.
//!
//! At the channel point where every inter-cell link is block anti-diagonal
//! (`H1 = 0`, `H4 = 0`), `V = [I; 0]` and `U = [I; 0]` already align all
//! interference and the zero-forcing map is linear in the effective
//! variables. Its Jacobian is filled as follows for single-stream users:
//!
//! * receive columns carry the 0/1 pattern of a perfect matching of the
//!   trimmed equation/variable graph;
//! * the transmit block of every stream group of cell `j` is the same real
//!   Vandermonde block, one row per interfered user with a distinct positive
//!   node, so every square row/column selection of it is nonsingular.
//!
//! Multi-stream configurations whose antenna counts are multiples of the
//! common stream count `d` reuse the single-stream matrix through
//! `J = J1 ⊗ I_{d²}`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::bipartite::{build_bipartite, BipartiteSystem, EquationIndex, VariableIndex};
use super::matching::{maximum_matching, trim_to_square};
use super::rank::{numeric_rank, RankReport, RankTolerance};
use crate::config::{derived_counts, CellConfig, NetworkConfig, UserConfig};
use crate::error::{Error, Result};

/// Largest Jacobian dimension the dense pipeline accepts.
pub const MAX_CERTIFIED_DIM: usize = 4096;

/// A constructed Jacobian together with the labels of its rows and columns.
#[derive(Debug, Clone)]
pub struct JacobianMatrix {
    pub matrix: DMatrix<f64>,
    pub rows: Vec<EquationIndex>,
    pub cols: Vec<VariableIndex>,
    /// `(row, col)` positions of the perfect matching used for the receive
    /// columns, extended to every pair of the square system.
    pub matching: Vec<(usize, usize)>,
}

impl JacobianMatrix {
    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn tx_columns(&self) -> Vec<usize> {
        (0..self.cols.len()).filter(|&c| self.cols[c].is_tx()).collect()
    }

    pub fn rx_columns(&self) -> Vec<usize> {
        (0..self.cols.len()).filter(|&c| self.cols[c].is_rx()).collect()
    }

    /// Row positions of the equations generated by stream group `(cell, user)`.
    pub fn row_block(&self, cell: usize, user: usize) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| self.rows[r].tx_cell == cell && self.rows[r].tx_user == user)
            .collect()
    }

    /// Row-major CSV dump of the entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            let line: Vec<String> = (0..self.matrix.ncols())
                .map(|c| format!("{}", self.matrix[(r, c)]))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Returns the common stream count `d` when the configuration belongs to the
/// class where every user has `d` streams and all antenna counts are
/// multiples of `d`.
pub fn divisible_stream_count(config: &NetworkConfig) -> std::result::Result<usize, String> {
    let d = config
        .common_streams()
        .ok_or_else(|| "users do not share a common stream count".to_string())?;
    for (i, cell) in config.cells().iter().enumerate() {
        if cell.tx_antennas % d != 0 {
            return Err(format!("M_{i} = {} is not divisible by d = {d}", cell.tx_antennas));
        }
    }
    for (i, k, u) in config.users() {
        if u.rx_antennas % d != 0 {
            return Err(format!("N_{i},{k} = {} is not divisible by d = {d}", u.rx_antennas));
        }
    }
    Ok(d)
}

/// Divides every antenna count by `d` and sets every user to one stream.
pub fn divide_by_streams(config: &NetworkConfig, d: usize) -> Result<NetworkConfig> {
    let cells = config
        .cells()
        .iter()
        .map(|c| CellConfig {
            tx_antennas: c.tx_antennas / d,
            users: c
                .users
                .iter()
                .map(|u| UserConfig {
                    rx_antennas: u.rx_antennas / d,
                    streams: 1,
                })
                .collect(),
        })
        .collect();
    NetworkConfig::new(cells)
}

fn check_separable(config: &NetworkConfig) -> Result<()> {
    for (i, cell) in config.cells().iter().enumerate() {
        if cell.tx_antennas < cell.streams() {
            return Err(Error::Separability { cell: i, user: None });
        }
    }
    for (i, k, u) in config.users() {
        if u.rx_antennas < u.streams {
            return Err(Error::Separability {
                cell: i,
                user: Some(k),
            });
        }
    }
    Ok(())
}

/// Vandermonde node of interfered user `(i, k)` within the block of cell `j`:
/// users of the other cells are numbered 1, 2, ... in document order.
fn node(config: &NetworkConfig, j: usize, i: usize, k: usize) -> f64 {
    let before: usize = (0..i).filter(|&c| c != j).map(|c| config.num_users(c)).sum();
    (before + k + 1) as f64
}

fn tx_value(config: &NetworkConfig, j: usize, i: usize, k: usize, t: usize) -> f64 {
    node(config, j, i, k).powi(t as i32)
}

/// Single-stream construction: the full system with a saturating matching
/// and its square trim.
struct SingleStream {
    full: BipartiteSystem,
    square: BipartiteSystem,
}

fn single_stream(config: &NetworkConfig) -> Result<SingleStream> {
    if config.users().any(|(_, _, u)| u.streams != 1) {
        return Err(Error::Precondition(
            "single-stream construction requires every user to have one stream".into(),
        ));
    }
    check_separable(config)?;
    let l_e = derived_counts(config).equations;
    if l_e > MAX_CERTIFIED_DIM {
        return Err(Error::TooLarge {
            what: "dense Jacobian",
            size: l_e as u128,
            limit: MAX_CERTIFIED_DIM as u128,
        });
    }
    let mut full = build_bipartite(config);
    let outcome = maximum_matching(&full);
    if let Some(witness) = outcome.witness {
        return Err(Error::NotProper {
            witness: Box::new(witness),
        });
    }
    full.matching = Some(outcome.matching);
    let square = trim_to_square(&full)?;
    Ok(SingleStream { full, square })
}

/// Builds the square Jacobian for a proper configuration in which every user
/// has a single stream.
pub fn construct_jacobian_d1(config: &NetworkConfig) -> Result<JacobianMatrix> {
    let SingleStream { square, .. } = single_stream(config)?;
    let n = square.equations.len();
    let matching = square.matching.as_ref().expect("trimmed system is matched");
    let mut matrix = DMatrix::zeros(n, square.variables.len());
    for (e, eq) in square.equations.iter().enumerate() {
        for &v in &square.adjacency[e] {
            matrix[(e, v)] = match square.variables[v] {
                VariableIndex::Tx { row, .. } => tx_value(config, eq.tx_cell, eq.rx_cell, eq.rx_user, row),
                VariableIndex::Rx { .. } => {
                    if matching.eq_to_var[e] == Some(v) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }
    Ok(JacobianMatrix {
        matrix,
        rows: square.equations.clone(),
        cols: square.variables.clone(),
        matching: matching.pairs(),
    })
}

/// Lifts a single-stream Jacobian to `d` streams per user: `J1 ⊗ I_{d²}`.
///
/// Row and column labels are rewritten to the multi-stream indices. The
/// ordering is base-major: each base row/column expands into `d²`
/// consecutive entries, enumerated column-major over the `d × d` block.
pub fn lift_kronecker(base: &JacobianMatrix, d: usize) -> Result<JacobianMatrix> {
    if d == 0 {
        return Err(Error::Precondition("stream count must be positive".into()));
    }
    let single_stream_labels = base.rows.iter().all(|e| e.row == 0 && e.col == 0)
        && base.cols.iter().all(|v| match *v {
            VariableIndex::Tx { col, .. } | VariableIndex::Rx { col, .. } => col == 0,
        });
    if !single_stream_labels {
        return Err(Error::Precondition(
            "lift expects a Jacobian built from a single-stream configuration".into(),
        ));
    }
    if d == 1 {
        return Ok(base.clone());
    }
    let dd = d * d;
    let mut rows = Vec::with_capacity(base.rows.len() * dd);
    for eq in &base.rows {
        for p in 0..dd {
            rows.push(EquationIndex {
                row: p % d,
                col: p / d,
                ..*eq
            });
        }
    }
    let mut cols = Vec::with_capacity(base.cols.len() * dd);
    for var in &base.cols {
        for q in 0..dd {
            let (r, c) = (q % d, q / d);
            cols.push(match *var {
                VariableIndex::Tx { cell, user, row, .. } => VariableIndex::Tx {
                    cell,
                    user,
                    row: row * d + r,
                    col: c,
                },
                // Entry (r, s*d + c) of the conjugate-transposed receive block
                // is entry (s*d + c, r) of the receive matrix.
                VariableIndex::Rx { cell, user, row, .. } => VariableIndex::Rx {
                    cell,
                    user,
                    row: row * d + c,
                    col: r,
                },
            });
        }
    }
    let matrix = base.matrix.kronecker(&DMatrix::<f64>::identity(dd, dd));
    let matching = base
        .matching
        .iter()
        .flat_map(|&(r, c)| (0..dd).map(move |p| (r * dd + p, c * dd + p)))
        .collect();
    Ok(JacobianMatrix {
        matrix,
        rows,
        cols,
        matching,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    #[serde(rename = "L_e")]
    pub l_e: usize,
    #[serde(rename = "L_v_kept")]
    pub l_v_kept: usize,
    pub rank: usize,
    pub pass: bool,
    pub matching: Vec<[usize; 2]>,
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub certificate: Certificate,
    pub jacobian: JacobianMatrix,
    pub rank: RankReport,
}

/// Runs divide → match → trim → construct → lift → rank for a configuration
/// with a common stream count dividing every antenna count.
pub fn certify_feasibility(config: &NetworkConfig, tolerance: RankTolerance) -> Result<Certification> {
    let d = divisible_stream_count(config).map_err(Error::NotApplicable)?;
    check_separable(config)?;
    let l_e = derived_counts(config).equations;
    if l_e > MAX_CERTIFIED_DIM {
        return Err(Error::TooLarge {
            what: "dense Jacobian",
            size: l_e as u128,
            limit: MAX_CERTIFIED_DIM as u128,
        });
    }
    let divided = divide_by_streams(config, d)?;
    let base = construct_jacobian_d1(&divided)?;
    let jacobian = lift_kronecker(&base, d)?;
    let rank = numeric_rank(&jacobian.matrix, tolerance)?;
    let certificate = Certificate {
        l_e,
        l_v_kept: jacobian.cols.len(),
        rank: rank.rank,
        pass: rank.rank == l_e && jacobian.cols.len() == l_e,
        matching: jacobian.matching.iter().map(|&(r, c)| [r, c]).collect(),
    };
    Ok(Certification {
        certificate,
        jacobian,
        rank,
    })
}

/// Real inter-cell channels `H̄_{i_k, j}` of the construction point, indexed
/// `[i][k][j]`, with the interfering blocks `H2 = [h_t I_d]` and
/// `H3 = [h_{s,l} I_d]` taken from the single-stream construction and
/// `H1 = H4 = 0`. Own-cell links keep `H1 = 0` and have ones elsewhere.
pub fn construction_channels(config: &NetworkConfig) -> Result<Vec<Vec<Vec<DMatrix<f64>>>>> {
    let d = divisible_stream_count(config).map_err(Error::NotApplicable)?;
    check_separable(config)?;
    let divided = divide_by_streams(config, d)?;
    let SingleStream { full, .. } = single_stream(&divided)?;
    let matching = full.matching.as_ref().expect("matched");

    // h3[(i, k, s, j, l)] = 1 when receive variable s of user (i, k) is
    // matched to the equation of stream group (j, l).
    let mut h3: HashMap<(usize, usize, usize, usize, usize), f64> = HashMap::new();
    for (e, v) in matching.pairs() {
        if let VariableIndex::Rx { cell, user, row, .. } = full.variables[v] {
            let eq = full.equations[e];
            h3.insert((cell, user, row, eq.tx_cell, eq.tx_user), 1.0);
        }
    }

    let g = config.num_cells();
    let mut links = Vec::with_capacity(g);
    for i in 0..g {
        let mut per_user = Vec::new();
        for k in 0..config.num_users(i) {
            let n = config.user(i, k).rx_antennas;
            let mut per_tx = Vec::new();
            for j in 0..g {
                let m = config.cell(j).tx_antennas;
                let d_j = config.cell_streams(j);
                let mut h = DMatrix::zeros(n, m);
                if i == j {
                    for r in 0..n {
                        for c in 0..m {
                            if r >= d || c >= d_j {
                                h[(r, c)] = 1.0;
                            }
                        }
                    }
                } else {
                    for t in 0..(m - d_j) / d {
                        let value = tx_value(&divided, j, i, k, t);
                        for a in 0..d {
                            h[(a, d_j + t * d + a)] = value;
                        }
                    }
                    for s in 0..(n - d) / d {
                        for l in 0..config.num_users(j) {
                            let value = h3.get(&(i, k, s, j, l)).copied().unwrap_or(0.0);
                            for a in 0..d {
                                h[(d + s * d + a, l * d + a)] = value;
                            }
                        }
                    }
                }
                per_tx.push(h);
            }
            per_user.push(per_tx);
        }
        links.push(per_user);
    }
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(g: usize, k: usize, m: usize, n: usize, d: usize) -> NetworkConfig {
        NetworkConfig::symmetric(g, k, m, n, d).unwrap()
    }

    #[test]
    fn square_three_cell_construction() {
        let j = construct_jacobian_d1(&sym(3, 2, 4, 3, 1)).unwrap();
        assert_eq!(j.shape(), (24, 24));
        // Each stream-group block has sum_i K_i - M_j receive ones.
        for cell in 0..3 {
            for user in 0..2 {
                let ones: usize = j
                    .row_block(cell, user)
                    .iter()
                    .map(|&r| j.rx_columns().iter().filter(|&&c| j.matrix[(r, c)] != 0.0).count())
                    .sum();
                assert_eq!(ones, 6 - 4);
            }
        }
        assert_eq!(numeric_rank(&j.matrix, RankTolerance::Default).unwrap().rank, 24);
    }

    #[test]
    fn reference_construction_is_trimmed_and_invertible() {
        let j = construct_jacobian_d1(&sym(2, 2, 3, 3, 1)).unwrap();
        assert_eq!(j.shape(), (8, 8));
        assert_eq!(numeric_rank(&j.matrix, RankTolerance::Default).unwrap().rank, 8);
    }

    #[test]
    fn single_cell_gives_empty_matrix() {
        let j = construct_jacobian_d1(&sym(1, 2, 3, 3, 1)).unwrap();
        assert_eq!(j.shape(), (0, 0));
    }

    #[test]
    fn construction_preconditions() {
        assert!(matches!(
            construct_jacobian_d1(&sym(3, 2, 3, 3, 1)),
            Err(Error::NotProper { .. })
        ));
        assert!(matches!(
            construct_jacobian_d1(&sym(2, 2, 6, 4, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lift_by_one_is_identity() {
        let j = construct_jacobian_d1(&sym(2, 2, 3, 3, 1)).unwrap();
        let lifted = lift_kronecker(&j, 1).unwrap();
        assert_eq!(lifted.matrix, j.matrix);
        assert_eq!(lifted.cols, j.cols);
    }

    #[test]
    fn lift_of_zero_row_gives_zero_rows() {
        let mut j = construct_jacobian_d1(&sym(2, 2, 3, 3, 1)).unwrap();
        j.matrix.row_mut(3).fill(0.0);
        let lifted = lift_kronecker(&j, 2).unwrap();
        for p in 0..4 {
            assert!(lifted.matrix.row(3 * 4 + p).iter().all(|&x| x == 0.0));
        }
        assert_eq!(lifted.shape(), (32, 32));
    }

    #[test]
    fn certifies_multi_stream_reference() {
        let cert = certify_feasibility(&sym(2, 2, 6, 4, 2), RankTolerance::Default).unwrap();
        assert!(cert.certificate.pass);
        assert_eq!(cert.certificate.l_e, 32);
        assert_eq!(cert.certificate.rank, 32);
    }

    #[test]
    fn certify_reports_not_applicable_and_not_proper() {
        assert!(matches!(
            certify_feasibility(&sym(2, 1, 3, 2, 2), RankTolerance::Default),
            Err(Error::NotApplicable(_))
        ));
        match certify_feasibility(&sym(3, 2, 3, 3, 1), RankTolerance::Default) {
            Err(Error::NotProper { witness }) => assert!(witness.deficiency >= 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            certify_feasibility(&sym(2, 3, 2, 4, 1), RankTolerance::Default),
            Err(Error::Separability { cell: 0, user: None })
        ));
    }

    #[test]
    fn divisibility_detection() {
        assert_eq!(divisible_stream_count(&sym(2, 2, 6, 4, 2)), Ok(2));
        assert!(divisible_stream_count(&sym(2, 1, 3, 2, 2)).is_err());
    }
}
