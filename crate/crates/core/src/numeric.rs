//! Empirical feasibility oracle: random channels and alternating
//! interference-leakage minimization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Channel matrices `H[i][k][j]` from base station `j` to user `k` of cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub seed: Option<u64>,
    links: Vec<Vec<Vec<CMatrix>>>,
}

impl ChannelSet {
    /// Wraps explicit channels after checking their shapes against `config`.
    pub fn from_links(config: &NetworkConfig, links: Vec<Vec<Vec<CMatrix>>>) -> Result<Self> {
        let g = config.num_cells();
        if links.len() != g {
            return Err(Error::ShapeMismatch(format!("expected {g} receiving cells, got {}", links.len())));
        }
        for (i, per_user) in links.iter().enumerate() {
            if per_user.len() != config.num_users(i) {
                return Err(Error::ShapeMismatch(format!("cell {i}: wrong user count")));
            }
            for (k, per_tx) in per_user.iter().enumerate() {
                if per_tx.len() != g {
                    return Err(Error::ShapeMismatch(format!("user ({i},{k}): wrong transmitter count")));
                }
                for (j, h) in per_tx.iter().enumerate() {
                    let want = (config.user(i, k).rx_antennas, config.cell(j).tx_antennas);
                    if h.shape() != want {
                        return Err(Error::ShapeMismatch(format!(
                            "H[{i}][{k}][{j}] is {:?}, expected {want:?}",
                            h.shape()
                        )));
                    }
                    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                        return Err(Error::NonFinite);
                    }
                }
            }
        }
        Ok(Self { seed: None, links })
    }

    pub fn link(&self, cell: usize, user: usize, tx_cell: usize) -> &CMatrix {
        &self.links[cell][user][tx_cell]
    }

    pub fn num_matrices(&self) -> usize {
        self.links.iter().flatten().map(Vec::len).sum()
    }
}

/// Transmit matrices `tx[j][l]` (`M_j × d_{j_l}`) and receive matrices
/// `rx[i][k]` (`N_{i_k} × d_{i_k}`).
#[derive(Debug, Clone, PartialEq)]
pub struct IASolution {
    pub tx: Vec<Vec<CMatrix>>,
    pub rx: Vec<Vec<CMatrix>>,
}

impl IASolution {
    /// `V_j = [I; 0]` split by user and `U_{i_k} = [I; 0]`.
    pub fn identity_start(config: &NetworkConfig) -> Self {
        let mut tx = Vec::new();
        for cell in config.cells() {
            let mut offset = 0;
            let mut per_user = Vec::new();
            for u in &cell.users {
                per_user.push(CMatrix::from_fn(cell.tx_antennas, u.streams, |r, c| {
                    if r == offset + c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }));
                offset += u.streams;
            }
            tx.push(per_user);
        }
        let rx = config
            .cells()
            .iter()
            .map(|cell| {
                cell.users
                    .iter()
                    .map(|u| CMatrix::identity(u.rx_antennas, u.streams))
                    .collect()
            })
            .collect();
        Self { tx, rx }
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}

/// I.i.d. `CN(0, 1)` channels, deterministic in `seed`.
pub fn sample_channels(config: &NetworkConfig, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = config.num_cells();
    let links = (0..g)
        .map(|i| {
            (0..config.num_users(i))
                .map(|k| {
                    let n = config.user(i, k).rx_antennas;
                    (0..g)
                        .map(|j| complex_gaussian(&mut rng, n, config.cell(j).tx_antennas))
                        .collect()
                })
                .collect()
        })
        .collect();
    ChannelSet { seed: Some(seed), links }
}

/// Number of scalar zero-forcing constraints across all MUI and ICI terms.
pub fn constraint_count(config: &NetworkConfig) -> usize {
    config
        .users()
        .map(|(i, k, u)| {
            let mui: usize = (0..config.num_users(i))
                .filter(|&l| l != k)
                .map(|l| config.user(i, l).streams)
                .sum();
            let ici: usize = (0..config.num_cells()).filter(|&j| j != i).map(|j| config.cell_streams(j)).sum();
            u.streams * (mui + ici)
        })
        .sum()
}

fn check_shapes(config: &NetworkConfig, channels: &ChannelSet, sol: &IASolution) -> Result<()> {
    if channels.links.len() != config.num_cells() || sol.tx.len() != config.num_cells() || sol.rx.len() != config.num_cells() {
        return Err(Error::ShapeMismatch("cell count differs from configuration".into()));
    }
    for (i, cell) in config.cells().iter().enumerate() {
        if sol.tx[i].len() != cell.users.len() || sol.rx[i].len() != cell.users.len() {
            return Err(Error::ShapeMismatch(format!("cell {i}: user count differs")));
        }
        for (k, u) in cell.users.iter().enumerate() {
            if sol.tx[i][k].shape() != (cell.tx_antennas, u.streams) {
                return Err(Error::ShapeMismatch(format!("V[{i}][{k}] has shape {:?}", sol.tx[i][k].shape())));
            }
            if sol.rx[i][k].shape() != (u.rx_antennas, u.streams) {
                return Err(Error::ShapeMismatch(format!("U[{i}][{k}] has shape {:?}", sol.rx[i][k].shape())));
            }
        }
    }
    Ok(())
}

/// Sum of `|U^H H V|²` over every interference term, divided by the number
/// of scalar constraints (0 when there are none).
pub fn leakage(config: &NetworkConfig, channels: &ChannelSet, sol: &IASolution) -> Result<f64> {
    check_shapes(config, channels, sol)?;
    Ok(raw_leakage(config, channels, sol) / constraint_count(config).max(1) as f64)
}

fn raw_leakage(config: &NetworkConfig, channels: &ChannelSet, sol: &IASolution) -> f64 {
    let mut total = 0.0;
    for (i, k, _) in config.users() {
        let u_h = sol.rx[i][k].adjoint();
        for j in 0..config.num_cells() {
            let projected = &u_h * channels.link(i, k, j);
            for (l, v) in sol.tx[j].iter().enumerate() {
                if j == i && l == k {
                    continue;
                }
                total += (&projected * v).norm_squared();
            }
        }
    }
    total
}

/// Eigenvectors of the `count` smallest eigenvalues of a Hermitian matrix.
fn least_eigenvectors(q: CMatrix, count: usize) -> CMatrix {
    let eig = SymmetricEigen::new(q);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    CMatrix::from_fn(eig.eigenvectors.nrows(), count, |r, c| eig.eigenvectors[(r, order[c])])
}

fn update_receivers(config: &NetworkConfig, channels: &ChannelSet, sol: &mut IASolution) {
    for (i, k, u) in config.users() {
        let mut q = CMatrix::zeros(u.rx_antennas, u.rx_antennas);
        for j in 0..config.num_cells() {
            let h = channels.link(i, k, j);
            for (l, v) in sol.tx[j].iter().enumerate() {
                if j == i && l == k {
                    continue;
                }
                let hv = h * v;
                q += &hv * hv.adjoint();
            }
        }
        sol.rx[i][k] = least_eigenvectors(q, u.streams);
    }
}

fn update_transmitters(config: &NetworkConfig, channels: &ChannelSet, sol: &mut IASolution) {
    for (j, cell) in config.cells().iter().enumerate() {
        for (l, u) in cell.users.iter().enumerate() {
            let mut q = CMatrix::zeros(cell.tx_antennas, cell.tx_antennas);
            for (i, k, _) in config.users() {
                if i == j && k == l {
                    continue;
                }
                let hu = channels.link(i, k, j).adjoint() * &sol.rx[i][k];
                q += &hu * hu.adjoint();
            }
            sol.tx[j][l] = least_eigenvectors(q, u.streams);
        }
    }
}

fn orthonormal_columns(m: CMatrix) -> CMatrix {
    let cols = m.ncols();
    let q = m.qr().q();
    q.columns(0, cols).into_owned()
}

fn random_start(config: &NetworkConfig, rng: &mut ChaCha8Rng) -> IASolution {
    let tx = config
        .cells()
        .iter()
        .map(|cell| {
            cell.users
                .iter()
                .map(|u| orthonormal_columns(complex_gaussian(rng, cell.tx_antennas, u.streams)))
                .collect()
        })
        .collect();
    let rx = config
        .cells()
        .iter()
        .map(|cell| {
            cell.users
                .iter()
                .map(|u| orthonormal_columns(complex_gaussian(rng, u.rx_antennas, u.streams)))
                .collect()
        })
        .collect();
    IASolution { tx, rx }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignOptions {
    pub max_iters: usize,
    pub eps: f64,
    pub restarts: usize,
    pub seed: u64,
    pub tol_rank: f64,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            eps: 1e-9,
            restarts: 5,
            seed: 0,
            tol_rank: 1e-6,
        }
    }
}

/// Result of one alternating-minimization run.
#[derive(Debug, Clone)]
pub struct AlignRun {
    pub solution: IASolution,
    /// Normalized leakage at the start and after every half-iteration
    /// (receive update, then transmit update).
    pub trace: Vec<f64>,
    /// Full iterations performed.
    pub iterations: usize,
    /// Index of the initialization that produced this run.
    pub restart: usize,
}

impl AlignRun {
    pub fn final_leakage(&self) -> f64 {
        *self.trace.last().expect("trace holds the initial value")
    }

    pub fn trace_csv(&self) -> String {
        trace_csv(&self.trace)
    }
}

/// `iter,leakage` CSV of a trace, one row per half-iteration.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iter,leakage\n");
    for (idx, value) in trace.iter().enumerate() {
        out.push_str(&format!("{idx},{}\n", format_sig(*value, 12)));
    }
    out
}

/// Formats with a fixed number of significant digits in scientific notation.
pub fn format_sig(value: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), value)
}

fn single_run(config: &NetworkConfig, channels: &ChannelSet, opts: &AlignOptions, restart: usize) -> AlignRun {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(1 + restart as u64);
    let mut solution = random_start(config, &mut rng);
    let norm = constraint_count(config).max(1) as f64;
    let mut trace = vec![raw_leakage(config, channels, &solution) / norm];
    let mut iterations = 0;
    while iterations < opts.max_iters && *trace.last().unwrap() > opts.eps {
        update_receivers(config, channels, &mut solution);
        trace.push(raw_leakage(config, channels, &solution) / norm);
        update_transmitters(config, channels, &mut solution);
        trace.push(raw_leakage(config, channels, &solution) / norm);
        iterations += 1;
    }
    AlignRun {
        solution,
        trace,
        iterations,
        restart,
    }
}

/// Alternating leakage minimization from up to `restarts` seeded starts.
/// Stops at the first run reaching `eps`; otherwise returns the run with the
/// lowest final leakage.
pub fn alternating_min(
    config: &NetworkConfig,
    channels: &ChannelSet,
    opts: &AlignOptions,
) -> Result<AlignRun> {
    if opts.eps.is_nan() || opts.eps <= 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    for (i, cell) in config.cells().iter().enumerate() {
        if cell.users.iter().any(|u| u.streams > cell.tx_antennas) {
            return Err(Error::Separability { cell: i, user: None });
        }
    }
    for (i, k, u) in config.users() {
        if u.rx_antennas < u.streams {
            return Err(Error::Separability { cell: i, user: Some(k) });
        }
    }
    let probe = IASolution::identity_start(config);
    check_shapes(config, channels, &probe)?;

    let mut best: Option<AlignRun> = None;
    for restart in 0..opts.restarts.max(1) {
        let run = single_run(config, channels, opts, restart);
        let done = run.final_leakage() <= opts.eps;
        if best.as_ref().is_none_or(|b| run.final_leakage() < b.final_leakage()) {
            best = Some(run);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one run"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserRank {
    pub cell: usize,
    pub user: usize,
    /// The `d_{i_k}`-th singular value of the effective desired channel.
    pub sigma: f64,
    pub ok: bool,
}

/// Checks that every user's effective desired channel `U^H H V` keeps full
/// rank `d_{i_k}`.
pub fn rank_condition(
    config: &NetworkConfig,
    channels: &ChannelSet,
    sol: &IASolution,
    tol: f64,
) -> Result<Vec<UserRank>> {
    check_shapes(config, channels, sol)?;
    Ok(config
        .users()
        .map(|(i, k, u)| {
            let effective = sol.rx[i][k].adjoint() * channels.link(i, k, i) * &sol.tx[i][k];
            let mut sv: Vec<f64> = effective.singular_values().iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            let sigma = sv.get(u.streams - 1).copied().unwrap_or(0.0);
            UserRank {
                cell: i,
                user: k,
                sigma,
                ok: sigma > tol,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmpiricalDecision {
    EmpiricallyFeasible,
    EmpiricallyInfeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub final_leakage: f64,
    pub iterations: usize,
    pub restart: usize,
    pub converged: bool,
    pub rank_ok: bool,
    #[serde(skip)]
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalVerdict {
    pub decision: EmpiricalDecision,
    pub trials: Vec<TrialRecord>,
    pub options: AlignOptions,
}

/// Runs `trials` independent channel draws (seeds `seed, seed + 1, ...`).
///
/// Feasible when at least half the trials reach `eps` with the rank
/// condition intact; infeasible when every trial ends at or above
/// `100 eps`; inconclusive otherwise.
pub fn empirical_feasibility(
    config: &NetworkConfig,
    trials: usize,
    opts: &AlignOptions,
) -> Result<EmpiricalVerdict> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let mut records = Vec::with_capacity(trials);
    for t in 0..trials {
        let seed = opts.seed.wrapping_add(t as u64);
        let channels = sample_channels(config, seed);
        let run = alternating_min(config, &channels, &AlignOptions { seed, ..*opts })?;
        let final_leakage = run.final_leakage();
        let rank_ok = rank_condition(config, &channels, &run.solution, opts.tol_rank)?
            .iter()
            .all(|r| r.ok);
        records.push(TrialRecord {
            seed,
            final_leakage,
            iterations: run.iterations,
            restart: run.restart,
            converged: final_leakage <= opts.eps,
            rank_ok,
            trace: run.trace,
        });
    }
    Ok(EmpiricalVerdict {
        decision: decide(&records, opts.eps),
        trials: records,
        options: *opts,
    })
}

fn decide(records: &[TrialRecord], eps: f64) -> EmpiricalDecision {
    let good = records.iter().filter(|r| r.converged && r.rank_ok).count();
    if good >= records.len().div_ceil(2) {
        EmpiricalDecision::EmpiricallyFeasible
    } else if records.iter().all(|r| r.final_leakage >= 100.0 * eps) {
        EmpiricalDecision::EmpiricallyInfeasible
    } else {
        EmpiricalDecision::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(g: usize, k: usize, m: usize, n: usize, d: usize) -> NetworkConfig {
        NetworkConfig::symmetric(g, k, m, n, d).unwrap()
    }

    #[test]
    fn channels_are_deterministic_and_shaped() {
        let cfg = sym(2, 2, 3, 3, 1);
        let a = sample_channels(&cfg, 7);
        assert_eq!(a, sample_channels(&cfg, 7));
        assert_ne!(a, sample_channels(&cfg, 8));
        assert_eq!(a.num_matrices(), 8);
        assert_eq!(a.link(1, 0, 0).shape(), (3, 3));

        let single = sample_channels(&sym(1, 3, 4, 2, 1), 1);
        assert_eq!(single.num_matrices(), 3);
    }

    #[test]
    fn constraint_counts() {
        assert_eq!(constraint_count(&sym(2, 2, 3, 3, 1)), 4 * 3);
        assert_eq!(constraint_count(&sym(1, 1, 2, 2, 1)), 0);
    }

    #[test]
    fn leakage_is_zero_without_constraints_and_positive_at_random() {
        let cfg = sym(1, 1, 2, 2, 1);
        let ch = sample_channels(&cfg, 1);
        assert_eq!(leakage(&cfg, &ch, &IASolution::identity_start(&cfg)).unwrap(), 0.0);

        let cfg = sym(2, 2, 3, 3, 1);
        let ch = sample_channels(&cfg, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(leakage(&cfg, &ch, &random_start(&cfg, &mut rng)).unwrap() > 0.0);
    }

    #[test]
    fn leakage_rejects_wrong_shapes() {
        let cfg = sym(2, 2, 3, 3, 1);
        let ch = sample_channels(&cfg, 3);
        let wrong = IASolution::identity_start(&sym(2, 2, 4, 3, 1));
        assert!(matches!(leakage(&cfg, &ch, &wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn zero_iterations_returns_the_start() {
        let cfg = sym(2, 2, 3, 3, 1);
        let ch = sample_channels(&cfg, 2);
        let opts = AlignOptions { max_iters: 0, restarts: 1, seed: 4, ..Default::default() };
        let run = alternating_min(&cfg, &ch, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        rng.set_stream(1);
        assert_eq!(run.solution, random_start(&cfg, &mut rng));
        assert_eq!(run.trace.len(), 1);
    }

    #[test]
    fn updates_keep_orthonormal_frames() {
        let cfg = sym(2, 1, 4, 4, 2);
        let ch = sample_channels(&cfg, 5);
        let opts = AlignOptions { max_iters: 3, restarts: 1, ..Default::default() };
        let run = alternating_min(&cfg, &ch, &opts).unwrap();
        for m in run.solution.tx.iter().chain(&run.solution.rx).flatten() {
            let gram = m.adjoint() * m;
            assert!((gram - CMatrix::identity(m.ncols(), m.ncols())).norm() < 1e-10);
        }
    }

    #[test]
    fn decision_rule() {
        let rec = |leak: f64, rank_ok: bool| TrialRecord {
            seed: 0,
            final_leakage: leak,
            iterations: 1,
            restart: 0,
            converged: leak <= 1e-9,
            rank_ok,
            trace: vec![],
        };
        assert_eq!(decide(&[rec(1e-12, true)], 1e-9), EmpiricalDecision::EmpiricallyFeasible);
        assert_eq!(decide(&[rec(1e-8, true)], 1e-9), EmpiricalDecision::Inconclusive);
        assert_eq!(decide(&[rec(2e-7, true)], 1e-9), EmpiricalDecision::EmpiricallyInfeasible);
        assert_eq!(
            decide(&[rec(1e-12, false), rec(1e-3, true)], 1e-9),
            EmpiricalDecision::Inconclusive
        );
        assert_eq!(
            decide(&[rec(1e-12, true), rec(1e-3, true), rec(1e-12, true)], 1e-9),
            EmpiricalDecision::EmpiricallyFeasible
        );
    }

    #[test]
    fn zero_trials_is_rejected() {
        assert!(empirical_feasibility(&sym(2, 2, 3, 3, 1), 0, &AlignOptions::default()).is_err());
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.5, 12), "5.00000000000e-1");
        assert_eq!(format_sig(0.0, 3), "0.00e0");
    }
}
