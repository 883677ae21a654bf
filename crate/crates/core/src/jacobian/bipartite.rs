use serde::Serialize;

use crate::config::NetworkConfig;

/// One scalar inter-cell interference equation: entry `(row, col)` of the
/// interference block from stream group `tx_user` of cell `tx_cell` to user
/// `rx_user` of cell `rx_cell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EquationIndex {
    pub rx_cell: usize,
    pub rx_user: usize,
    pub tx_cell: usize,
    pub tx_user: usize,
    pub row: usize,
    pub col: usize,
}

/// One scalar unknown of the effective transmit or receive matrices.
///
/// `Tx` addresses entry `(row, col)` of the effective transmit matrix of user
/// `user` in cell `cell`, with `row < M_j - d_j`. `Rx` addresses entry
/// `(row, col)` of the effective receive matrix of that user, with
/// `row < N_{i_k} - d_{i_k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "side", rename_all = "lowercase")]
pub enum VariableIndex {
    Tx {
        cell: usize,
        user: usize,
        row: usize,
        col: usize,
    },
    Rx {
        cell: usize,
        user: usize,
        row: usize,
        col: usize,
    },
}

impl VariableIndex {
    pub fn is_tx(&self) -> bool {
        matches!(self, VariableIndex::Tx { .. })
    }

    pub fn is_rx(&self) -> bool {
        matches!(self, VariableIndex::Rx { .. })
    }
}

/// Whether `var` appears in the linearised equation `eq`.
///
/// A transmit entry enters every equation in the same column of its
/// stream group; a receive entry enters every equation in the row given by
/// its column index.
pub fn adjacent(eq: &EquationIndex, var: &VariableIndex) -> bool {
    match *var {
        VariableIndex::Tx { cell, user, col, .. } => {
            cell == eq.tx_cell && user == eq.tx_user && col == eq.col
        }
        VariableIndex::Rx { cell, user, col, .. } => {
            cell == eq.rx_cell && user == eq.rx_user && col == eq.row
        }
    }
}

/// Equation/variable incidence structure of the zero-forcing system.
#[derive(Debug, Clone)]
pub struct BipartiteSystem {
    pub equations: Vec<EquationIndex>,
    pub variables: Vec<VariableIndex>,
    /// For every equation, the sorted indices of the variables it contains.
    pub adjacency: Vec<Vec<usize>>,
    pub matching: Option<Matching>,
}

/// A matching stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub eq_to_var: Vec<Option<usize>>,
    pub var_to_eq: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(equations: usize, variables: usize) -> Self {
        Self {
            eq_to_var: vec![None; equations],
            var_to_eq: vec![None; variables],
        }
    }

    pub fn size(&self) -> usize {
        self.eq_to_var.iter().flatten().count()
    }

    /// Matched `(equation, variable)` pairs in equation order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.eq_to_var
            .iter()
            .enumerate()
            .filter_map(|(e, v)| v.map(|v| (e, v)))
            .collect()
    }

    pub fn saturates_equations(&self) -> bool {
        self.eq_to_var.iter().all(Option::is_some)
    }
}

impl BipartiteSystem {
    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }
}

/// Builds the scalar system in canonical order.
///
/// Equations are grouped by the interfering stream group `(j, l)`, then by
/// the interfered user `(i, k)`, then column-major over the block. Transmit
/// variables come first, grouped by `(j, l)` and column-major; receive
/// variables follow, grouped by `(i, k)` and ordered by `(row, col)`.
pub fn build_bipartite(config: &NetworkConfig) -> BipartiteSystem {
    let g = config.num_cells();
    let mut equations = Vec::new();
    for j in 0..g {
        for (l, tx) in config.cell(j).users.iter().enumerate() {
            for i in (0..g).filter(|&i| i != j) {
                for (k, rx) in config.cell(i).users.iter().enumerate() {
                    for col in 0..tx.streams {
                        for row in 0..rx.streams {
                            equations.push(EquationIndex {
                                rx_cell: i,
                                rx_user: k,
                                tx_cell: j,
                                tx_user: l,
                                row,
                                col,
                            });
                        }
                    }
                }
            }
        }
    }

    let mut variables = Vec::new();
    for j in 0..g {
        let spare = config.cell(j).tx_antennas.saturating_sub(config.cell_streams(j));
        for (l, tx) in config.cell(j).users.iter().enumerate() {
            for col in 0..tx.streams {
                for row in 0..spare {
                    variables.push(VariableIndex::Tx {
                        cell: j,
                        user: l,
                        row,
                        col,
                    });
                }
            }
        }
    }
    for (i, k, rx) in config.users() {
        let spare = rx.rx_antennas.saturating_sub(rx.streams);
        for row in 0..spare {
            for col in 0..rx.streams {
                variables.push(VariableIndex::Rx {
                    cell: i,
                    user: k,
                    row,
                    col,
                });
            }
        }
    }

    let adjacency = adjacency_for(&equations, &variables);
    BipartiteSystem {
        equations,
        variables,
        adjacency,
        matching: None,
    }
}

pub(crate) fn adjacency_for(equations: &[EquationIndex], variables: &[VariableIndex]) -> Vec<Vec<usize>> {
    use std::collections::HashMap;

    // Group variables by the (stream group, column) or (user, column) they serve.
    let mut tx_groups: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    let mut rx_groups: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    for (idx, var) in variables.iter().enumerate() {
        match *var {
            VariableIndex::Tx { cell, user, col, .. } => {
                tx_groups.entry((cell, user, col)).or_default().push(idx)
            }
            VariableIndex::Rx { cell, user, col, .. } => {
                rx_groups.entry((cell, user, col)).or_default().push(idx)
            }
        }
    }
    equations
        .iter()
        .map(|eq| {
            let mut adj: Vec<usize> = tx_groups
                .get(&(eq.tx_cell, eq.tx_user, eq.col))
                .into_iter()
                .chain(rx_groups.get(&(eq.rx_cell, eq.rx_user, eq.row)))
                .flatten()
                .copied()
                .collect();
            adj.sort_unstable();
            adj
        })
        .collect()
}
