use std::collections::VecDeque;

use serde::Serialize;

use super::bipartite::{adjacency_for, BipartiteSystem, EquationIndex, Matching};
use crate::error::{Error, Result};

/// A set of equations whose combined neighbourhood is smaller than the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallWitness {
    pub equations: Vec<EquationIndex>,
    pub neighbor_count: usize,
    pub deficiency: usize,
}

#[derive(Debug, Clone)]
pub struct MatchingOutcome {
    pub matching: Matching,
    pub saturated: bool,
    pub witness: Option<HallWitness>,
}

const FREE: usize = usize::MAX;

/// Maximum-cardinality matching (Hopcroft-Karp).
///
/// When some equation stays unmatched, the witness is the set of equations
/// reachable from unmatched equations along alternating paths; its
/// neighbourhood is fully matched back into the set, so it falls short by
/// exactly the number of unmatched equations.
pub fn maximum_matching(sys: &BipartiteSystem) -> MatchingOutcome {
    let n_eq = sys.equations.len();
    let n_var = sys.variables.len();
    let adj = &sys.adjacency;
    let mut eq_match = vec![FREE; n_eq];
    let mut var_match = vec![FREE; n_var];
    let mut dist = vec![usize::MAX; n_eq];

    loop {
        // Layer equations by alternating distance from the free ones.
        let mut queue = VecDeque::new();
        for e in 0..n_eq {
            if eq_match[e] == FREE {
                dist[e] = 0;
                queue.push_back(e);
            } else {
                dist[e] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(e) = queue.pop_front() {
            for &v in &adj[e] {
                let next = var_match[v];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[e] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; n_eq];
        for e in 0..n_eq {
            if eq_match[e] == FREE {
                augment(e, adj, &mut eq_match, &mut var_match, &mut dist, &mut cursor);
            }
        }
    }

    let matching = Matching {
        eq_to_var: eq_match.iter().map(|&v| (v != FREE).then_some(v)).collect(),
        var_to_eq: var_match.iter().map(|&e| (e != FREE).then_some(e)).collect(),
    };
    let saturated = matching.saturates_equations();
    let witness = (!saturated).then(|| hall_witness(sys, &matching));
    MatchingOutcome {
        matching,
        saturated,
        witness,
    }
}

// Iterative DFS along the BFS layers; returns whether `root` was augmented.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    eq_match: &mut [usize],
    var_match: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&e) = stack.last() {
        if cursor[e] == adj[e].len() {
            dist[e] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[e][cursor[e]];
        cursor[e] += 1;
        let next = var_match[v];
        if next == FREE {
            // Flip the path: each equation on the stack takes the variable it
            // last advanced through.
            let mut var = v;
            while let Some(eq) = stack.pop() {
                let prev = eq_match[eq];
                eq_match[eq] = var;
                var_match[var] = eq;
                var = prev;
            }
            return true;
        }
        if dist[next] == dist[e] + 1 {
            stack.push(next);
        }
    }
    false
}

fn hall_witness(sys: &BipartiteSystem, matching: &Matching) -> HallWitness {
    let mut seen_eq = vec![false; sys.equations.len()];
    let mut seen_var = vec![false; sys.variables.len()];
    let mut queue: VecDeque<usize> = matching
        .eq_to_var
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(e, _)| e)
        .collect();
    for &e in &queue {
        seen_eq[e] = true;
    }
    while let Some(e) = queue.pop_front() {
        for &v in &sys.adjacency[e] {
            if !seen_var[v] {
                seen_var[v] = true;
                if let Some(next) = matching.var_to_eq[v] {
                    if !seen_eq[next] {
                        seen_eq[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    let equations: Vec<EquationIndex> = seen_eq
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(e, _)| sys.equations[e])
        .collect();
    let neighbor_count = seen_var.iter().filter(|&&s| s).count();
    HallWitness {
        deficiency: equations.len() - neighbor_count,
        equations,
        neighbor_count,
    }
}

/// Drops every unmatched variable, leaving a square system with a perfect
/// matching. Fails when the matching does not cover all equations.
pub fn trim_to_square(sys: &BipartiteSystem) -> Result<BipartiteSystem> {
    let outcome = match &sys.matching {
        Some(m) if m.saturates_equations() => MatchingOutcome {
            matching: m.clone(),
            saturated: true,
            witness: None,
        },
        _ => maximum_matching(sys),
    };
    if let Some(witness) = outcome.witness {
        return Err(Error::NotProper {
            witness: Box::new(witness),
        });
    }
    let matching = outcome.matching;
    let kept: Vec<usize> = (0..sys.variables.len())
        .filter(|&v| matching.var_to_eq[v].is_some())
        .collect();
    let mut new_index = vec![usize::MAX; sys.variables.len()];
    for (pos, &v) in kept.iter().enumerate() {
        new_index[v] = pos;
    }
    let variables: Vec<_> = kept.iter().map(|&v| sys.variables[v]).collect();
    let adjacency = adjacency_for(&sys.equations, &variables);
    let eq_to_var: Vec<Option<usize>> = matching
        .eq_to_var
        .iter()
        .map(|v| v.map(|v| new_index[v]))
        .collect();
    let mut var_to_eq = vec![None; variables.len()];
    for (e, v) in eq_to_var.iter().enumerate() {
        if let Some(v) = v {
            var_to_eq[*v] = Some(e);
        }
    }
    Ok(BipartiteSystem {
        equations: sys.equations.clone(),
        variables,
        adjacency,
        matching: Some(Matching {
            eq_to_var,
            var_to_eq,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;
    use crate::jacobian::build_bipartite;

    fn brute_force_max_matching(adj: &[Vec<usize>], n_var: usize) -> usize {
        fn go(e: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if e == adj.len() {
                return 0;
            }
            let mut best = go(e + 1, adj, used);
            for &v in &adj[e] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(e + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; n_var])
    }

    fn system_from(adj: Vec<Vec<usize>>, n_var: usize) -> BipartiteSystem {
        let equations = (0..adj.len())
            .map(|e| EquationIndex {
                rx_cell: e,
                rx_user: 0,
                tx_cell: 0,
                tx_user: 0,
                row: 0,
                col: 0,
            })
            .collect();
        let variables = (0..n_var)
            .map(|v| super::super::VariableIndex::Tx {
                cell: 0,
                user: 0,
                row: v,
                col: 0,
            })
            .collect();
        BipartiteSystem {
            equations,
            variables,
            adjacency: adj,
            matching: None,
        }
    }

    #[test]
    fn reference_system_saturates() {
        let sys = build_bipartite(&NetworkConfig::symmetric(2, 2, 3, 3, 1).unwrap());
        let out = maximum_matching(&sys);
        assert!(out.saturated);
        assert_eq!(out.matching.size(), 8);
        for (e, v) in out.matching.pairs() {
            assert!(sys.adjacency[e].contains(&v));
        }
    }

    #[test]
    fn undersized_system_yields_deficient_hall_set() {
        let sys = build_bipartite(&NetworkConfig::symmetric(3, 2, 3, 3, 1).unwrap());
        let out = maximum_matching(&sys);
        assert!(!out.saturated);
        let w = out.witness.unwrap();
        assert!(w.equations.len() <= 24);
        assert!(w.deficiency >= 6);
        assert_eq!(w.neighbor_count + w.deficiency, w.equations.len());
        assert_eq!(w.deficiency, 24 - out.matching.size());
    }

    #[test]
    fn empty_graph_is_saturated() {
        let sys = build_bipartite(&NetworkConfig::symmetric(1, 2, 3, 3, 1).unwrap());
        let out = maximum_matching(&sys);
        assert!(out.saturated);
        assert_eq!(out.matching.size(), 0);
        assert!(out.witness.is_none());
    }

    #[test]
    fn trim_keeps_matched_variables() {
        let sys = build_bipartite(&NetworkConfig::symmetric(2, 2, 3, 3, 1).unwrap());
        let square = trim_to_square(&sys).unwrap();
        assert_eq!(square.variables.len(), 8);
        let m = square.matching.as_ref().unwrap();
        assert!(m.saturates_equations());
        assert!(m.var_to_eq.iter().all(Option::is_some));

        let again = trim_to_square(&square).unwrap();
        assert_eq!(again.variables, square.variables);
    }

    #[test]
    fn trim_rejects_improper_system() {
        let sys = build_bipartite(&NetworkConfig::symmetric(3, 2, 3, 3, 1).unwrap());
        assert!(matches!(trim_to_square(&sys), Err(Error::NotProper { .. })));
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force_on_small_graphs(
            n_var in 1usize..6,
            rows in proptest::collection::vec(proptest::collection::vec(0usize..6, 0..4), 1..6),
        ) {
            let adj: Vec<Vec<usize>> = rows
                .into_iter()
                .map(|mut r| { r.retain(|&v| v < n_var); r.sort_unstable(); r.dedup(); r })
                .collect();
            let expected = brute_force_max_matching(&adj, n_var);
            let sys = system_from(adj, n_var);
            let out = maximum_matching(&sys);
            proptest::prop_assert_eq!(out.matching.size(), expected);
            if let Some(w) = out.witness {
                // Recount the neighbourhood directly from the adjacency lists.
                let members: Vec<usize> = (0..sys.equations.len())
                    .filter(|&e| w.equations.contains(&sys.equations[e]))
                    .collect();
                let mut nbrs: Vec<usize> = members.iter().flat_map(|&e| sys.adjacency[e].clone()).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                proptest::prop_assert!(nbrs.len() < members.len());
                proptest::prop_assert_eq!(nbrs.len(), w.neighbor_count);
            }
        }
    }
}
