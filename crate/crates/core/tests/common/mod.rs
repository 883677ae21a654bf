//! Independent re-evaluation of violation witnesses and Jacobian structure,
//! written directly from the configuration without the library's checkers.

#![allow(dead_code)]

use ibc_feasibility::classify::{FeasibilityVerdict, VerdictWitness};
use ibc_feasibility::conditions::{IrreducibleWitness, ProperWitness};
use ibc_feasibility::config::NetworkConfig;
use ibc_feasibility::jacobian::{EquationIndex, HallWitness, JacobianMatrix, VariableIndex};

/// Every scalar variable of the effective transmit and receive matrices.
pub fn all_variables(config: &NetworkConfig) -> Vec<VariableIndex> {
    let mut vars = Vec::new();
    for (j, cell) in config.cells().iter().enumerate() {
        let d_j: usize = cell.users.iter().map(|u| u.streams).sum();
        for (l, u) in cell.users.iter().enumerate() {
            for row in 0..cell.tx_antennas.saturating_sub(d_j) {
                for col in 0..u.streams {
                    vars.push(VariableIndex::Tx { cell: j, user: l, row, col });
                }
            }
        }
        for (k, u) in cell.users.iter().enumerate() {
            for row in 0..u.rx_antennas.saturating_sub(u.streams) {
                for col in 0..u.streams {
                    vars.push(VariableIndex::Rx { cell: j, user: k, row, col });
                }
            }
        }
    }
    vars
}

/// Whether a scalar variable enters the linearised equation: transmit
/// entries through the equation's column, receive entries through its row.
pub fn involves(eq: &EquationIndex, var: &VariableIndex) -> bool {
    match *var {
        VariableIndex::Tx { cell, user, col, .. } => {
            cell == eq.tx_cell && user == eq.tx_user && col == eq.col
        }
        VariableIndex::Rx { cell, user, col, .. } => {
            cell == eq.rx_cell && user == eq.rx_user && col == eq.row
        }
    }
}

fn equation_in_range(config: &NetworkConfig, eq: &EquationIndex) -> bool {
    eq.rx_cell != eq.tx_cell
        && eq.rx_cell < config.num_cells()
        && eq.tx_cell < config.num_cells()
        && eq.rx_user < config.num_users(eq.rx_cell)
        && eq.tx_user < config.num_users(eq.tx_cell)
        && eq.row < config.user(eq.rx_cell, eq.rx_user).streams
        && eq.col < config.user(eq.tx_cell, eq.tx_user).streams
}

pub fn hall_violated(config: &NetworkConfig, w: &HallWitness) -> bool {
    let mut eqs = w.equations.clone();
    eqs.sort();
    eqs.dedup();
    if eqs.is_empty() || !eqs.iter().all(|e| equation_in_range(config, e)) {
        return false;
    }
    let neighbours = all_variables(config)
        .iter()
        .filter(|v| eqs.iter().any(|e| involves(e, v)))
        .count();
    neighbours < eqs.len()
}

pub fn proper_violated(config: &NetworkConfig, w: &ProperWitness) -> bool {
    let streams = |i: usize| -> i64 { config.cell(i).users.iter().map(|u| u.streams as i64).sum() };
    let subset = |i: usize| w.user_subsets.iter().find(|c| c.cell == i).map(|c| c.users.clone());
    let mut lhs = 0i64;
    let mut tx: Vec<usize> = w.pairs.iter().map(|p| p.1).collect();
    tx.sort_unstable();
    tx.dedup();
    for j in tx {
        lhs += (config.cell(j).tx_antennas as i64 - streams(j)) * streams(j);
    }
    let mut rx: Vec<usize> = w.pairs.iter().map(|p| p.0).collect();
    rx.sort_unstable();
    rx.dedup();
    for &i in &rx {
        let Some(users) = subset(i) else { return false };
        for k in users {
            let u = config.user(i, k);
            lhs += (u.rx_antennas as i64 - u.streams as i64) * u.streams as i64;
        }
    }
    let mut rhs = 0i64;
    for &(i, j) in &w.pairs {
        if i == j {
            return false;
        }
        let received: i64 = subset(i).unwrap().iter().map(|&k| config.user(i, k).streams as i64).sum();
        rhs += streams(j) * received;
    }
    lhs < rhs
}

pub fn irreducible_violated(config: &NetworkConfig, w: &IrreducibleWitness) -> bool {
    if w.cluster_a.is_empty() || w.cluster_b.is_empty() {
        return false;
    }
    if w.cluster_b.iter().any(|c| w.cluster_a.contains(&c.cell) || c.users.is_empty()) {
        return false;
    }
    let m_a: usize = w.cluster_a.iter().map(|&j| config.cell(j).tx_antennas).sum();
    let d_a: usize = w
        .cluster_a
        .iter()
        .map(|&j| config.cell(j).users.iter().map(|u| u.streams).sum::<usize>())
        .sum();
    let mut n_b = 0;
    let mut d_b = 0;
    for c in &w.cluster_b {
        for &k in &c.users {
            n_b += config.user(c.cell, k).rx_antennas;
            d_b += config.user(c.cell, k).streams;
        }
    }
    m_a.max(n_b) < d_a + d_b
}

/// Whether the witness attached to a negative verdict is strictly violated.
pub fn verdict_witness_holds(config: &NetworkConfig, v: &FeasibilityVerdict) -> bool {
    match &v.witness {
        VerdictWitness::Separability(e) => {
            let (antennas, streams) = match e.user {
                None => (
                    config.cell(e.cell).tx_antennas,
                    config.cell(e.cell).users.iter().map(|u| u.streams).sum(),
                ),
                Some(k) => (config.user(e.cell, k).rx_antennas, config.user(e.cell, k).streams),
            };
            antennas < streams
        }
        VerdictWitness::Hall(w) => hall_violated(config, w),
        VerdictWitness::Irreducible(w) => irreducible_violated(config, w),
        _ => false,
    }
}

/// Row and column sums of the receive-column submatrix are 0 or 1 and its
/// entries are 0 or 1.
pub fn rule1_holds(j: &JacobianMatrix) -> bool {
    let rx: Vec<usize> = (0..j.cols.len()).filter(|&c| j.cols[c].is_rx()).collect();
    let entries_ok = rx
        .iter()
        .all(|&c| j.matrix.column(c).iter().all(|&x| x == 0.0 || x == 1.0));
    let rows_ok = (0..j.matrix.nrows()).all(|r| {
        let s: f64 = rx.iter().map(|&c| j.matrix[(r, c)]).sum();
        s == 0.0 || s == 1.0
    });
    let cols_ok = rx.iter().all(|&c| {
        let s: f64 = j.matrix.column(c).sum();
        s == 0.0 || s == 1.0
    });
    entries_ok && rows_ok && cols_ok
}

/// Every entry whose equation does not involve its variable is exactly zero.
pub fn sparse_pattern_holds(j: &JacobianMatrix) -> bool {
    (0..j.rows.len()).all(|r| {
        (0..j.cols.len()).all(|c| involves(&j.rows[r], &j.cols[c]) || j.matrix[(r, c)] == 0.0)
    })
}

/// Transmit blocks of different users in one cell carry identical values
/// wherever both columns are kept.
pub fn repeated_blocks_hold(j: &JacobianMatrix) -> bool {
    use std::collections::HashMap;
    let row_of: HashMap<EquationIndex, usize> = j.rows.iter().enumerate().map(|(r, e)| (*e, r)).collect();
    let col_of: HashMap<VariableIndex, usize> = j.cols.iter().enumerate().map(|(c, v)| (*v, c)).collect();
    for (r, eq) in j.rows.iter().enumerate() {
        for (c, var) in j.cols.iter().enumerate() {
            let VariableIndex::Tx { cell, user, row, col } = *var else { continue };
            if cell != eq.tx_cell || user != eq.tx_user {
                continue;
            }
            for (other_eq, &r2) in &row_of {
                if other_eq.tx_cell != cell || other_eq.tx_user == user {
                    continue;
                }
                let same_slot = other_eq.rx_cell == eq.rx_cell
                    && other_eq.rx_user == eq.rx_user
                    && other_eq.row == eq.row
                    && other_eq.col == eq.col;
                if !same_slot {
                    continue;
                }
                let twin = VariableIndex::Tx { cell, user: other_eq.tx_user, row, col };
                if let Some(&c2) = col_of.get(&twin) {
                    if j.matrix[(r, c)] != j.matrix[(r2, c2)] {
                        return false;
                    }
                }
            }
        }
    }
    true
}
