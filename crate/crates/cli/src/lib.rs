//! Command-line front end for the `qwalk` library.
//!
//! Every subcommand writes data to stdout (or `--out`) and diagnostics to
//! stderr. With `--check` the subcommands that have built-in assertions
//! report them, and [`run`] returns `false` if any fails.

pub mod figures;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qwalk::bounds::{
    bounds_report, quantum_mixing_threshold_with, QuantumMixingOptions, MIXING_THRESHOLD,
};
use qwalk::classical::{classical_mixing_time, ClassicalWalk};
use qwalk::ctqw::{convergence_to_limit, QuantumWalk};
use qwalk::error::check_order;
use qwalk::group::{cayley_graph, pair_class, phi_inverse};
use qwalk::sampler::{empirical_check, SamplerConfig};
use qwalk::spectral::{classical_lower_bound, EigenIndex, Spectrum};
use qwalk::{limiting_distribution, NormKind, VertexIndex};

use figures::{
    default_horizon_grid, log_grid, run_conjecture_figures, run_figure_1b, run_speedup_table,
};
use output::{svg_plot, write_csv, write_json, Axes, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum NormArg {
    #[default]
    Induced,
    Entrywise,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Induced => NormKind::Induced,
            NormArg::Entrywise => NormKind::Entrywise,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Quantum and classical walks on dihedral Cayley graphs"
)]
pub struct Cli {
    /// Polygon order (odd, at least 3).
    #[arg(long, global = true, default_value_t = 101)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Mixing tolerance in (0, 1/2); defaults to 1/2e.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Averaging horizon.
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    /// Measured steps per sampler run.
    #[arg(long = "T-prime", global = true)]
    pub t_prime: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Evaluate the subcommand's assertions and fail the exit code on a miss.
    #[arg(long, global = true)]
    pub check: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Edge list of the Cayley graph in vertex labels.
    Graph,
    /// Eigenvalues of the normalized adjacency.
    Spectrum,
    /// `P_t(start, ·)`.
    Walk {
        #[arg(long, default_value_t = 1)]
        start: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// `P̄_T(start, ·)` next to the limit `Π(start, ·)`.
    Average {
        #[arg(long, default_value_t = 1)]
        start: usize,
    },
    /// The limiting distribution and the distance to it over a horizon grid.
    Limit {
        /// Comma-separated horizons; decades 1e1..1e6 by default.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<f64>>,
    },
    /// `Ā^t(start, ·)`.
    Classical {
        #[arg(long, default_value_t = 1)]
        start: usize,
        #[arg(long, default_value_t = 10)]
        t: u64,
    },
    /// Classical mixing time `τ_mix(ε)`.
    ClassicalMix {
        #[arg(long, value_enum, default_value_t = NormArg::Induced)]
        norm: NormArg,
    },
    /// Quantum mixing threshold `T*`.
    Mix {
        #[arg(long, value_enum, default_value_t = NormArg::Induced)]
        norm: NormArg,
    },
    /// Eigengap sums and the analytic bounds on them.
    Bounds,
    /// `f(n)` against `100 n² (ln n)^5` and `100 n² ln n`.
    Conjecture {
        #[arg(long, default_value_t = 2001)]
        n_max: usize,
        /// 1 or 3; both when omitted.
        #[arg(long)]
        residue: Option<usize>,
    },
    /// Histogram of repeated-measurement sampler outputs.
    Sample {
        #[arg(long, default_value_t = 1)]
        start: usize,
        /// TV-to-uniform tolerance used by `--check`.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// `P̄_T(1,15)` against `Ā^t(1,15)` and the reference `1/2n`.
    #[command(name = "figure-1b")]
    Figure1b {
        #[arg(long, default_value_t = 400)]
        t_max: u64,
        /// Largest horizon is `10^T-exp`.
        #[arg(long = "T-exp", default_value_t = 6)]
        horizon_exp: i32,
        #[arg(long, default_value_t = 25)]
        per_decade: usize,
    },
    /// Classical against quantum mixing for several `n`.
    Speedup {
        #[arg(long, value_delimiter = ',', default_value = "21,41,81,101,149")]
        n_list: Vec<usize>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub vertex: usize,
    pub probability: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AverageRow {
    pub vertex: usize,
    pub averaged: f64,
    pub limit: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleRow {
    pub vertex: usize,
    pub count: u64,
    pub empirical_prob: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SeriesRow {
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Serialize)]
struct EdgeRow {
    source: usize,
    target: usize,
    source_element: String,
    target_element: String,
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    index: usize,
    m: usize,
    branch: char,
    eigenvalue: f64,
    multiplicity: usize,
}

#[derive(Debug, Serialize)]
struct QuantityRow {
    quantity: &'static str,
    value: f64,
}

#[derive(Debug, Serialize)]
struct LimitRow {
    #[serde(rename = "T")]
    horizon: f64,
    distance: f64,
    diagonal: String,
    offdiagonal: String,
}

/// Sets the rayon pool size from `QWALK_THREADS` when present.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QWALK_THREADS") {
        let k: usize = v.parse().with_context(|| format!("QWALK_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()?;
    }
    Ok(())
}

struct Sink {
    out: Box<dyn Write>,
    format: Format,
    provenance: String,
}

impl Sink {
    fn csv<T: Serialize>(&mut self, rows: &[T]) -> Result<()> {
        write_csv(&mut self.out, &self.provenance, rows)
    }

    fn json<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<()> {
        write_json(&mut self.out, value)
    }

    fn svg(&mut self, doc: String) -> Result<()> {
        self.out.write_all(doc.as_bytes())?;
        Ok(())
    }

    fn comment<T: Serialize>(&mut self, value: &T) -> Result<()> {
        writeln!(self.out, "# {}", serde_json::to_string(value)?)?;
        Ok(())
    }

    /// CSV rows or the JSON value; SVG is rejected.
    fn table<T: Serialize, J: Serialize + ?Sized>(&mut self, rows: &[T], json: &J) -> Result<()> {
        match self.format {
            Format::Csv => self.csv(rows),
            Format::Json => self.json(json),
            Format::Svg => {
                bail!("svg output is only available for figure-1b, conjecture and limit")
            }
        }
    }
}

fn check(ok: bool, what: &str, passed: &mut bool) {
    eprintln!("[{}] {what}", if ok { "PASS" } else { "FAIL" });
    *passed &= ok;
}

fn vertex(n: usize, label: usize) -> Result<VertexIndex> {
    Ok(VertexIndex::from_label(n, label)?)
}

/// Runs one parsed command; `Ok(false)` means a requested check failed.
pub fn run(cli: &Cli, invocation: &str) -> Result<bool> {
    let n = cli.n;
    check_order(n)?;
    let epsilon = cli.epsilon.unwrap_or(MIXING_THRESHOLD);
    if !(epsilon > 0.0 && epsilon < 0.5) {
        bail!("epsilon must lie in (0, 1/2), got {epsilon}");
    }
    let out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut sink = Sink {
        out,
        format: cli.format,
        provenance: invocation.to_string(),
    };
    let mut passed = true;

    match &cli.command {
        Command::Graph => {
            let g = cayley_graph(n)?;
            let rows: Vec<EdgeRow> = g
                .edges()
                .into_iter()
                .map(|(a, b)| {
                    let (va, vb) = (VertexIndex::new(n, a)?, VertexIndex::new(n, b)?);
                    Ok(EdgeRow {
                        source: va.label(),
                        target: vb.label(),
                        source_element: phi_inverse(&va).to_string(),
                        target_element: phi_inverse(&vb).to_string(),
                    })
                })
                .collect::<Result<_>>()?;
            let json = serde_json::json!({
                "n": n,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "connected": g.is_connected(),
                "edge_list": rows,
            });
            sink.table(&rows, &json)?;
        }
        Command::Spectrum => {
            let spec = Spectrum::new(n)?;
            let rows: Vec<SpectrumRow> = (0..2 * n)
                .map(|j| {
                    let idx = EigenIndex::from_flat(n, j)?;
                    Ok(SpectrumRow {
                        index: j,
                        m: idx.m,
                        branch: idx.branch.symbol(),
                        eigenvalue: spec.value_flat(j),
                        multiplicity: if idx.m == 0 { 1 } else { 2 },
                    })
                })
                .collect::<Result<_>>()?;
            sink.table(&rows, &rows)?;
        }
        Command::Walk { start, t } => {
            let v = vertex(n, *start)?;
            let row = QuantumWalk::new(n)?.transition_row(v.index(), *t)?;
            let rows = probability_rows(&row);
            let sum: f64 = row.iter().sum();
            if cli.check {
                check((sum - 1.0).abs() < 1e-9, "row sums to 1", &mut passed);
            }
            sink.table(
                &rows,
                &serde_json::json!({ "n": n, "start": start, "t": t, "rows": rows, "sum": sum }),
            )?;
        }
        Command::Average { start } => {
            let v = vertex(n, *start)?;
            let horizon = cli.horizon.unwrap_or(100.0);
            let avg = QuantumWalk::new(n)?.averaged_matrix(horizon)?;
            let limit = limiting_distribution(n)?;
            let rows: Vec<AverageRow> = (0..2 * n)
                .map(|j| AverageRow {
                    vertex: j + 1,
                    averaged: avg.entry(v.index(), j),
                    limit: limit.entry(v.index(), j),
                })
                .collect();
            if cli.check {
                check(
                    (avg.row_sum() - 1.0).abs() < 1e-9,
                    "row sums to 1",
                    &mut passed,
                );
            }
            sink.table(
                &rows,
                &serde_json::json!({ "n": n, "start": start, "T": horizon, "rows": rows }),
            )?;
        }
        Command::Limit { horizons } => {
            let grid = horizons.clone().unwrap_or_else(|| log_grid(1, 6, 1));
            let series = convergence_to_limit(n, &grid)?;
            let limit = limiting_distribution(n)?;
            if cli.check {
                check(
                    limit.row_sum_exact() == 1.into(),
                    "limit rows sum to exactly 1",
                    &mut passed,
                );
                let floor = num_floor(n);
                check(
                    limit.min_entry_exact() >= floor,
                    "limit entries at least 1/(2n)^2",
                    &mut passed,
                );
            }
            let rows: Vec<LimitRow> = series
                .iter()
                .map(|&(h, d)| LimitRow {
                    horizon: h,
                    distance: d,
                    diagonal: limit.diagonal().to_string(),
                    offdiagonal: limit.offdiagonal().to_string(),
                })
                .collect();
            match cli.format {
                Format::Svg => sink.svg(svg_plot(
                    &format!("distance to the limit, n = {n}"),
                    &[Series {
                        label: "|P_T - Pi|_1",
                        points: series.clone(),
                    }],
                    Axes {
                        log_x: true,
                        log_y: true,
                    },
                ))?,
                _ => sink.table(
                    &rows,
                    &serde_json::json!({
                        "n": n,
                        "diagonal": limit.diagonal().to_string(),
                        "offdiagonal": limit.offdiagonal().to_string(),
                        "series": series,
                    }),
                )?,
            }
        }
        Command::Classical { start, t } => {
            let v = vertex(n, *start)?;
            let walk = ClassicalWalk::new(n)?;
            let col = walk.column(*t);
            let row: Vec<f64> = (0..2 * n)
                .map(|j| {
                    let (d, e) = pair_class(n, v.index(), j);
                    col[if e == 1 { d } else { d + n }]
                })
                .collect();
            let rows = probability_rows(&row);
            sink.table(
                &rows,
                &serde_json::json!({ "n": n, "start": start, "t": t, "rows": rows }),
            )?;
        }
        Command::ClassicalMix { norm } => {
            let report = classical_mixing_time(n, epsilon, (*norm).into())?;
            if cli.check {
                let lb = classical_lower_bound(n, epsilon)?;
                check(
                    report.threshold_time >= lb.exact,
                    "tau_mix at least the spectral lower bound",
                    &mut passed,
                );
            }
            emit_series(&mut sink, &report.distance_series, &report)?;
        }
        Command::Mix { norm } => {
            let q = quantum_mixing_threshold_with(
                n,
                QuantumMixingOptions {
                    target: epsilon,
                    norm_kind: (*norm).into(),
                    ..Default::default()
                },
            )?;
            if cli.check && n >= 100 {
                check(
                    q.within_horizon_bound,
                    "T* within 4800 n (ln n)^5",
                    &mut passed,
                );
            }
            emit_series(&mut sink, &q.report.distance_series, &q)?;
        }
        Command::Bounds => {
            let r = bounds_report(n)?;
            if cli.check {
                let f = &r.bound_flags;
                check(
                    f.su1 && f.su2 && f.su4,
                    "quadrant bounds Su1, Su2, Su4",
                    &mut passed,
                );
                check(
                    f.case5_c1 && f.case5_c2,
                    "within-branch bounds",
                    &mut passed,
                );
                check(
                    f.weighted_identity,
                    "multiplicity-weighted decomposition",
                    &mut passed,
                );
                check(
                    f.quadrant_partition,
                    "quadrants partition the cross term",
                    &mut passed,
                );
            }
            let mut rows = vec![
                QuantityRow {
                    quantity: "total_sum",
                    value: r.total_sum,
                },
                QuantityRow {
                    quantity: "cross",
                    value: r.decomposition.cross,
                },
                QuantityRow {
                    quantity: "within_c1",
                    value: r.decomposition.within_c1,
                },
                QuantityRow {
                    quantity: "within_c2",
                    value: r.decomposition.within_c2,
                },
                QuantityRow {
                    quantity: "decomposition_8_4_4",
                    value: r.decomposition.total,
                },
                QuantityRow {
                    quantity: "decomposition_weighted",
                    value: r.decomposition.multiplicity_weighted_total,
                },
                QuantityRow {
                    quantity: "su1",
                    value: r.su.su1,
                },
                QuantityRow {
                    quantity: "su2",
                    value: r.su.su2,
                },
                QuantityRow {
                    quantity: "su3",
                    value: r.su.su3,
                },
                QuantityRow {
                    quantity: "su4",
                    value: r.su.su4,
                },
                QuantityRow {
                    quantity: "case3_raw",
                    value: r.case3_raw,
                },
            ];
            if let Some(f) = r.f_n {
                rows.push(QuantityRow {
                    quantity: "f_n",
                    value: f,
                });
            }
            sink.table(&rows, &r)?;
        }
        Command::Conjecture { n_max, residue } => {
            let rows = run_conjecture_figures(*n_max, *residue)?;
            if cli.check {
                check(
                    rows.iter().all(|r| r.f_n <= r.envelope_ln5),
                    "f(n) <= 100 n^2 (ln n)^5 on every row",
                    &mut passed,
                );
            }
            match cli.format {
                Format::Svg => {
                    let pts = |g: fn(&figures::ConjectureRow) -> f64| {
                        rows.iter().map(|r| (r.n as f64, g(r))).collect()
                    };
                    sink.svg(svg_plot(
                        "f(n) against 100 n^2 (ln n)^5 and 100 n^2 ln n",
                        &[
                            Series {
                                label: "f(n)",
                                points: pts(|r| r.f_n),
                            },
                            Series {
                                label: "100 n^2 (ln n)^5",
                                points: pts(|r| r.envelope_ln5),
                            },
                            Series {
                                label: "100 n^2 ln n",
                                points: pts(|r| r.envelope_ln),
                            },
                        ],
                        Axes {
                            log_x: false,
                            log_y: true,
                        },
                    ))?
                }
                _ => sink.table(&rows, &rows)?,
            }
        }
        Command::Sample { start, tolerance } => {
            let config = SamplerConfig {
                n,
                start: vertex(n, *start)?,
                horizon: cli.horizon.unwrap_or(500.0),
                t_prime: cli.t_prime.unwrap_or(20),
                trials: cli.trials.unwrap_or(20000),
                seed: cli.seed,
            };
            let h = empirical_check(&config)?;
            if cli.check {
                check(
                    h.tv_to_uniform <= *tolerance,
                    "empirical TV to uniform within tolerance",
                    &mut passed,
                );
            }
            let rows: Vec<SampleRow> = h
                .counts
                .iter()
                .zip(h.probabilities())
                .enumerate()
                .map(|(j, (&count, p))| SampleRow {
                    vertex: j + 1,
                    count,
                    empirical_prob: p,
                })
                .collect();
            let summary = serde_json::json!({
                "tv_to_uniform": h.tv_to_uniform,
                "stderr_envelope": h.stderr_envelope,
            });
            match cli.format {
                Format::Csv => {
                    sink.csv(&rows)?;
                    sink.comment(&summary)?;
                }
                _ => sink.table(
                    &rows,
                    &serde_json::json!({ "config": config, "rows": rows, "summary": summary }),
                )?,
            }
        }
        Command::Figure1b {
            t_max,
            horizon_exp,
            per_decade,
        } => {
            let t_grid: Vec<u64> = (0..=*t_max).collect();
            let horizon_grid = if (*horizon_exp, *per_decade) == (6, 25) {
                default_horizon_grid()
            } else {
                log_grid(0, *horizon_exp, *per_decade)
            };
            let fig = run_figure_1b(n, &t_grid, &horizon_grid)?;
            if cli.check {
                let reference = 1.0 / (2 * n) as f64;
                check(
                    fig.quantum_endpoint_deviation <= 0.1 * reference,
                    "quantum endpoint within 10% of 1/2n",
                    &mut passed,
                );
                check(
                    fig.classical_early_swing > fig.quantum_endpoint_deviation,
                    "classical swing over t <= 200 exceeds the quantum endpoint deviation",
                    &mut passed,
                );
            }
            match cli.format {
                Format::Svg => {
                    let q = fig
                        .rows
                        .iter()
                        .filter_map(|r| Some((r.horizon?, r.quantum?)))
                        .collect();
                    let c = fig
                        .rows
                        .iter()
                        .filter_map(|r| Some((r.t? as f64, r.classical?)))
                        .collect();
                    let reference = fig.rows[0].reference;
                    let last = horizon_grid.iter().cloned().fold(1.0, f64::max);
                    sink.svg(svg_plot(
                        &format!("P(1,15), n = {n}"),
                        &[
                            Series {
                                label: "quantum, averaged over [0, T]",
                                points: q,
                            },
                            Series {
                                label: "classical, t steps",
                                points: c,
                            },
                            Series {
                                label: "1/2n",
                                points: vec![(1.0, reference), (last, reference)],
                            },
                        ],
                        Axes {
                            log_x: true,
                            log_y: false,
                        },
                    ))?
                }
                _ => sink.table(&fig.rows, &fig)?,
            }
        }
        Command::Speedup { n_list } => {
            for &m in n_list {
                check_order(m)?;
            }
            let rows = run_speedup_table(n_list, epsilon)?;
            if cli.check {
                check(
                    rows.iter()
                        .all(|r| r.classical_measured >= r.classical_lower_bound),
                    "classical tau_mix at least the lower bound",
                    &mut passed,
                );
                check(
                    rows.iter()
                        .filter(|r| r.n >= 100)
                        .all(|r| r.quantum_measured <= r.quantum_cap),
                    "quantum T* within 4800 n (ln n)^5 for n >= 100",
                    &mut passed,
                );
                check(
                    rows.iter().all(|r| r.ratio > 0.0),
                    "positive ratio",
                    &mut passed,
                );
            }
            sink.table(&rows, &rows)?;
        }
    }
    sink.out.flush()?;
    Ok(passed)
}

fn num_floor(n: usize) -> num_rational::Ratio<i128> {
    num_rational::Ratio::new(1, (4 * n * n) as i128)
}

fn probability_rows(row: &[f64]) -> Vec<ProbabilityRow> {
    row.iter()
        .enumerate()
        .map(|(j, &p)| ProbabilityRow {
            vertex: j + 1,
            probability: p,
        })
        .collect()
}

fn emit_series<T: Serialize>(sink: &mut Sink, series: &[(f64, f64)], summary: &T) -> Result<()> {
    let mut rows: Vec<SeriesRow> = series
        .iter()
        .map(|&(time, distance)| SeriesRow { time, distance })
        .collect();
    rows.sort_by(|a, b| a.time.total_cmp(&b.time));
    match sink.format {
        Format::Csv => {
            sink.csv(&rows)?;
            sink.comment(summary)
        }
        _ => sink.table(&rows, summary),
    }
}
