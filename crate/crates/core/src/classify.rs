//! Feasibility verdicts and region sweeps for MIMO-IBC configurations.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::conditions::{
    check_irreducible, check_proper_matching, check_separability, cluster_witness, IrreducibleWitness,
    SeparabilityEntry,
};
use crate::config::{derived_counts, CellConfig, NetworkConfig, UserConfig};
use crate::error::{Error, Result};
use crate::jacobian::{divide_by_streams, divisible_stream_count, HallWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictClass {
    Improper,
    ProperInfeasible,
    Feasible,
    ProperUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    Separability,
    Proper,
    #[serde(rename = "irreducible-caseI")]
    IrreducibleCaseI,
    #[serde(rename = "irreducible-caseII")]
    IrreducibleCaseII,
    /// A cluster split outside the two symmetric cases, or any split of an
    /// asymmetric configuration.
    Irreducible,
    Theorem2,
    Corollary2,
    OutOfTheoremScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictWitness {
    Separability(SeparabilityEntry),
    Hall(HallWitness),
    Irreducible(IrreducibleWitness),
    Corollary2 { p: usize },
    Theorem2 { d: usize },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityVerdict {
    pub class: VerdictClass,
    pub reason: Reason,
    pub witness: VerdictWitness,
}

impl FeasibilityVerdict {
    /// `p` when the verdict comes from the symmetric boundary family.
    pub fn p_witness(&self) -> Option<usize> {
        match self.witness {
            VerdictWitness::Corollary2 { p } => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Theorem2Outcome {
    Feasible { d: usize },
    Infeasible { d: usize, reason: String },
    NotApplicable { reason: String },
}

/// Decides feasibility exactly for configurations in which every user has
/// the same stream count `d` and every antenna count is a multiple of `d`.
pub fn check_theorem2(config: &NetworkConfig) -> Theorem2Outcome {
    let d = match divisible_stream_count(config) {
        Ok(d) => d,
        Err(reason) => return Theorem2Outcome::NotApplicable { reason },
    };
    for (i, cell) in config.cells().iter().enumerate() {
        if cell.tx_antennas < cell.users.len() * d {
            return Theorem2Outcome::Infeasible {
                d,
                reason: format!("M_{i} = {} < K_{i} d = {}", cell.tx_antennas, cell.users.len() * d),
            };
        }
    }
    // Receive separability holds by divisibility: N is a positive multiple of d.
    let divided = divide_by_streams(config, d).expect("divided counts stay positive");
    match check_proper_matching(&divided) {
        None => Theorem2Outcome::Feasible { d },
        Some(w) => Theorem2Outcome::Infeasible {
            d,
            reason: format!(
                "stream-divided system is not proper (Hall deficiency {})",
                w.deficiency
            ),
        },
    }
}

fn require_separable(g: usize, k: usize, m: usize, n: usize, d: usize) -> Result<()> {
    if g == 0 || k == 0 || d == 0 {
        return Err(Error::Precondition("G, K and d must be positive".into()));
    }
    if m < k * d || n < d {
        return Err(Error::Precondition(format!(
            "symmetric checks need M >= K d and N >= d (M = {m}, N = {n}, K d = {}, d = {d})",
            k * d
        )));
    }
    Ok(())
}

/// Symmetric proper condition: `M + N >= (G K + 1) d`.
pub fn symmetric_proper(g: usize, k: usize, m: usize, n: usize, d: usize) -> Result<bool> {
    require_separable(g, k, m, n, d)?;
    Ok(m + n >= (g * k + 1) * d)
}

/// Smallest `p` in `0..=(G-1)K` with `M >= (K + p) d` and
/// `N >= ((G-1)K + 1 - p) d`.
pub fn symmetric_feasible_p(g: usize, k: usize, m: usize, n: usize, d: usize) -> Option<usize> {
    if g == 0 {
        return None;
    }
    let others = (g - 1) * k;
    (0..=others).find(|&p| m >= (k + p) * d && n >= (others + 1 - p) * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfeasibleCase {
    CaseI,
    CaseII,
}

/// The two symmetric proper-but-infeasible cases. Case I is reported when
/// both hold.
pub fn symmetric_infeasible_case(
    g: usize,
    k: usize,
    m: usize,
    n: usize,
    d: usize,
) -> Result<Option<InfeasibleCase>> {
    if !symmetric_proper(g, k, m, n, d)? {
        return Ok(None);
    }
    if g < 2 {
        return Ok(None);
    }
    let case1 = m.max((g - 1) * k * n) < g * k * d;
    let case2 = ((g - 1) * m).max(n) < ((g - 1) * k + 1) * d;
    Ok(if case1 {
        Some(InfeasibleCase::CaseI)
    } else if case2 {
        Some(InfeasibleCase::CaseII)
    } else {
        None
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma3Witness {
    pub cell: usize,
    pub user: usize,
    /// `N_{i_k} - d_{i_k}`.
    pub spare: usize,
    /// Achievable interfering stream totals from subsets of the other cells.
    pub reachable: Vec<usize>,
}

/// Detects the class in which no permutation-structured Jacobian exists:
/// variables equal equations, the stream-divided conditions hold, and some
/// user's spare receive dimension lies between 1 and the total interfering
/// streams without being a sum of whole interfering cells.
pub fn lemma3_applies(config: &NetworkConfig) -> Option<Lemma3Witness> {
    let d = config.common_streams()?;
    let counts = derived_counts(config);
    if counts.variables != counts.equations {
        return None;
    }
    for cell in config.cells() {
        if cell.tx_antennas < cell.users.len() * d {
            return None;
        }
    }
    if config.users().any(|(_, _, u)| u.rx_antennas < d) || check_proper_matching(config).is_some() {
        return None;
    }
    let g = config.num_cells();
    for (i, k, u) in config.users() {
        let others: Vec<usize> = (0..g).filter(|&j| j != i).map(|j| config.cell_streams(j)).collect();
        let total: usize = others.iter().sum();
        let spare = u.rx_antennas - u.streams;
        if spare == 0 || spare > total {
            continue;
        }
        let mut reachable: Vec<usize> = (1u64..1u64 << others.len())
            .map(|mask| (0..others.len()).filter(|&b| mask >> b & 1 == 1).map(|b| others[b]).sum())
            .collect();
        reachable.sort_unstable();
        reachable.dedup();
        if !reachable.contains(&spare) {
            return Some(Lemma3Witness {
                cell: i,
                user: k,
                spare,
                reachable,
            });
        }
    }
    None
}

/// One cell of an interference channel: a transmitter sending `streams`
/// single-stream messages to one multi-antenna receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IcCell {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub streams: usize,
}

/// Splits each receiver of an interference channel into single-stream users
/// with `N_i - K_i + 1` antennas each.
pub fn lift_ic_to_ibc(ic: &[IcCell]) -> Result<NetworkConfig> {
    let cells = ic
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.rx_antennas < c.streams {
                return Err(Error::Precondition(format!(
                    "cell {i}: N = {} < K = {}",
                    c.rx_antennas, c.streams
                )));
            }
            Ok(CellConfig {
                tx_antennas: c.tx_antennas,
                users: vec![
                    UserConfig {
                        rx_antennas: c.rx_antennas - c.streams + 1,
                        streams: 1,
                    };
                    c.streams
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkConfig::new(cells)
}

/// Classification with precedence improper, proper-infeasible, feasible,
/// unknown.
pub fn classify(config: &NetworkConfig) -> Result<FeasibilityVerdict> {
    let verdict = |class, reason, witness| FeasibilityVerdict {
        class,
        reason,
        witness,
    };
    let sep = check_separability(config);
    if let Some(w) = sep.witness {
        return Ok(verdict(VerdictClass::Improper, Reason::Separability, VerdictWitness::Separability(w)));
    }
    if let Some(w) = check_proper_matching(config) {
        return Ok(verdict(VerdictClass::Improper, Reason::Proper, VerdictWitness::Hall(w)));
    }
    let sym = config.symmetric_params();
    if let Some(p) = &sym {
        let (g, k, m, n, d) = (p.cells, p.users, p.tx_antennas, p.rx_antennas, p.d);
        match symmetric_infeasible_case(g, k, m, n, d)? {
            Some(InfeasibleCase::CaseI) => {
                return Ok(verdict(
                    VerdictClass::ProperInfeasible,
                    Reason::IrreducibleCaseI,
                    VerdictWitness::Irreducible(cluster_witness(config, 1, (g - 1) * k, k)),
                ))
            }
            Some(InfeasibleCase::CaseII) => {
                return Ok(verdict(
                    VerdictClass::ProperInfeasible,
                    Reason::IrreducibleCaseII,
                    VerdictWitness::Irreducible(cluster_witness(config, g - 1, 1, k)),
                ))
            }
            None => {}
        }
    }
    if let Some(w) = check_irreducible(config)? {
        return Ok(verdict(VerdictClass::ProperInfeasible, Reason::Irreducible, VerdictWitness::Irreducible(w)));
    }
    if let Some(p) = &sym {
        if let Some(pw) = symmetric_feasible_p(p.cells, p.users, p.tx_antennas, p.rx_antennas, p.d) {
            return Ok(verdict(VerdictClass::Feasible, Reason::Corollary2, VerdictWitness::Corollary2 { p: pw }));
        }
    }
    match check_theorem2(config) {
        Theorem2Outcome::Feasible { d } => Ok(verdict(VerdictClass::Feasible, Reason::Theorem2, VerdictWitness::Theorem2 { d })),
        // Not reachable for separable proper configurations; reported as
        // unknown rather than asserting.
        Theorem2Outcome::Infeasible { .. } | Theorem2Outcome::NotApplicable { .. } => Ok(verdict(
            VerdictClass::ProperUnknown,
            Reason::OutOfTheoremScope,
            VerdictWitness::None,
        )),
    }
}

/// Class label of one region cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionClass {
    Improper,
    ProperInfeasibleCase1,
    ProperInfeasibleCase2,
    /// Proper but violating a cluster split outside the two symmetric cases.
    ProperInfeasible,
    Feasible,
    Unknown,
}

impl RegionClass {
    pub fn label(self) -> &'static str {
        match self {
            RegionClass::Improper => "improper",
            RegionClass::ProperInfeasibleCase1 => "proper_infeasible_case1",
            RegionClass::ProperInfeasibleCase2 => "proper_infeasible_case2",
            RegionClass::ProperInfeasible => "proper_infeasible",
            RegionClass::Feasible => "feasible",
            RegionClass::Unknown => "unknown",
        }
    }

    pub fn from_verdict(v: &FeasibilityVerdict) -> Self {
        match (v.class, v.reason) {
            (VerdictClass::Improper, _) => RegionClass::Improper,
            (VerdictClass::ProperInfeasible, Reason::IrreducibleCaseI) => RegionClass::ProperInfeasibleCase1,
            (VerdictClass::ProperInfeasible, Reason::IrreducibleCaseII) => RegionClass::ProperInfeasibleCase2,
            (VerdictClass::ProperInfeasible, _) => RegionClass::ProperInfeasible,
            (VerdictClass::Feasible, _) => RegionClass::Feasible,
            (VerdictClass::ProperUnknown, _) => RegionClass::Unknown,
        }
    }

    fn color(self) -> &'static str {
        match self {
            RegionClass::Improper => "#9e9e9e",
            RegionClass::ProperInfeasibleCase1 => "#c62828",
            RegionClass::ProperInfeasibleCase2 => "#ef9a9a",
            RegionClass::ProperInfeasible => "#e57373",
            RegionClass::Feasible => "#43a047",
            RegionClass::Unknown => "#fdd835",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionCell {
    pub m: usize,
    pub n: usize,
    pub class: RegionClass,
    pub p_witness: Option<usize>,
    pub verdict: FeasibilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionGrid {
    pub cells: usize,
    pub users: usize,
    pub d: usize,
    pub m_range: (usize, usize),
    pub n_range: (usize, usize),
    /// Ordered by `M`, then `N`.
    pub entries: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn get(&self, m: usize, n: usize) -> Option<&RegionCell> {
        self.entries.iter().find(|c| c.m == m && c.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,N,class,p_witness\n");
        for c in &self.entries {
            let p = c.p_witness.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", c.m, c.n, c.class.label(), p);
        }
        out
    }

    /// Static heatmap with `M` on the horizontal axis and `N` growing upward.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 24;
        const MARGIN: usize = 48;
        const LEGEND: usize = 220;
        let cols = self.m_range.1 - self.m_range.0 + 1;
        let rows = self.n_range.1 - self.n_range.0 + 1;
        let width = MARGIN * 2 + cols * CELL + LEGEND;
        let height = MARGIN * 2 + rows * CELL;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="20" font-size="13">G={} K={} d={}</text>"#,
            self.cells, self.users, self.d
        );
        for c in &self.entries {
            let x = MARGIN + (c.m - self.m_range.0) * CELL;
            let y = MARGIN + (self.n_range.1 - c.n) * CELL;
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#ffffff"><title>M={} N={} {}</title></rect>"##,
                c.class.color(),
                c.m,
                c.n,
                c.class.label()
            );
        }
        for m in self.m_range.0..=self.m_range.1 {
            let x = MARGIN + (m - self.m_range.0) * CELL + CELL / 2;
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="middle">{m}</text>"#,
                MARGIN + rows * CELL + 14
            );
        }
        for n in self.n_range.0..=self.n_range.1 {
            let y = MARGIN + (self.n_range.1 - n) * CELL + CELL / 2 + 4;
            let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{n}</text>"#, MARGIN - 6);
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">M</text>"#,
            MARGIN + cols * CELL / 2,
            MARGIN + rows * CELL + 32
        );
        let _ = writeln!(s, r#"<text x="14" y="{}">N</text>"#, MARGIN + rows * CELL / 2);
        let legend_x = MARGIN * 2 + cols * CELL;
        let classes = [
            RegionClass::Feasible,
            RegionClass::Improper,
            RegionClass::ProperInfeasibleCase1,
            RegionClass::ProperInfeasibleCase2,
            RegionClass::ProperInfeasible,
            RegionClass::Unknown,
        ];
        for (idx, class) in classes.iter().enumerate() {
            let y = MARGIN + idx * 22;
            let _ = writeln!(
                s,
                r##"<rect x="{legend_x}" y="{y}" width="16" height="16" fill="{}" stroke="#000000"/>"##,
                class.color()
            );
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, legend_x + 22, y + 12, class.label());
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Classifies every symmetric configuration `(G, K, M, N, d)` over the given
/// inclusive antenna ranges.
pub fn sweep_region(
    g: usize,
    k: usize,
    d: usize,
    m_range: RangeInclusive<usize>,
    n_range: RangeInclusive<usize>,
) -> Result<RegionGrid> {
    if m_range.is_empty() || n_range.is_empty() {
        return Err(Error::Precondition("sweep ranges must be nonempty".into()));
    }
    if *m_range.start() == 0 || *n_range.start() == 0 {
        return Err(Error::Precondition("antenna counts start at 1".into()));
    }
    let mut entries = Vec::with_capacity(m_range.clone().count() * n_range.clone().count());
    for m in m_range.clone() {
        for n in n_range.clone() {
            let config = NetworkConfig::symmetric(g, k, m, n, d)?;
            let verdict = classify(&config)?;
            entries.push(RegionCell {
                m,
                n,
                class: RegionClass::from_verdict(&verdict),
                p_witness: verdict.p_witness(),
                verdict,
            });
        }
    }
    Ok(RegionGrid {
        cells: g,
        users: k,
        d,
        m_range: (*m_range.start(), *m_range.end()),
        n_range: (*n_range.start(), *n_range.end()),
        entries,
    })
}
