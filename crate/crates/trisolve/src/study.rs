//! Convergence studies over a doubling sequence of grids, the two observed
//! order formulas, and the CSV table format used by the command line tool.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::triharmonic::{solve, ProblemSpec, SolverConfig, StopRule, Termination};

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    /// Grid intervals per side of the unit square.
    pub n: usize,
    /// Sweeps performed by the solver.
    pub k: usize,
    /// Final error metric (exact error or successive difference).
    pub error: f64,
    /// Observed convergence order; absent where the tail rows of the table
    /// leave the formula without data.
    pub order: Option<f64>,
}

/// Observed orders from exact errors on grids `N, 2N, 4N, ...`:
/// `order_i = log2(error_i / error_{i+1})`.
pub fn compute_order_exact(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidStudyInput("need errors from at least two grids".into()));
    }
    if let Some(bad) = errors.iter().copied().find(|e| !e.is_finite() || *e <= 0.0) {
        return Err(Error::NonPositiveError(bad));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Observed order from three solutions on nested grids `N, 2N, 4N`:
/// `log2(max|U_N - U_2N| / max|U_2N - U_4N|)` with each difference taken on
/// the coarser grid's nodes. Identical successive solutions leave the order
/// undefined (`None`).
pub fn compute_order_successive(
    u_n: &GridFunction,
    u_2n: &GridFunction,
    u_4n: &GridFunction,
) -> Result<Option<f64>> {
    let d1 = u_n.diff_norm(&u_2n.restrict_to_coarse(u_n.grid())?)?;
    let d2 = u_2n.diff_norm(&u_4n.restrict_to_coarse(u_2n.grid())?)?;
    if d1 == 0.0 || d2 == 0.0 {
        return Ok(None);
    }
    Ok(Some((d1 / d2).log2()))
}

/// Result of [`run_convergence_study`]. When a solve diverges the study
/// stops and keeps only the rows completed before it.
#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub rows: Vec<StudyRow>,
    /// Grid size whose solve diverged, if any.
    pub diverged_at: Option<usize>,
    /// Solution on the finest completed grid, for plotting dumps.
    pub finest_u: Option<GridFunction>,
}

/// Parses a comma-separated list of grid sizes, e.g. `8,16,32`.
pub fn parse_grid_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidStudyInput(format!("bad entry {tok:?}: {e}")))
        })
        .collect()
}

/// A study needs strictly doubling sizes, all at least the stencil minimum.
pub fn validate_grid_list(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidStudyInput("list is empty".into()));
    }
    if sizes[0] < crate::grid::MIN_INTERVALS {
        return Err(Error::InvalidStudyInput(format!(
            "grid size {} is below the minimum {}",
            sizes[0],
            crate::grid::MIN_INTERVALS
        )));
    }
    for w in sizes.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidStudyInput(format!(
                "sizes must double: {} is not twice {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Solves the problem on the unit square for every size in `sizes` and
/// assembles the table. Orders come from the exact-error formula under
/// [`StopRule::ExactError`] and from solution triples under
/// [`StopRule::SuccessiveDiff`]. With `parallel` set, the grids are solved
/// on separate threads; row assembly is ordered by size either way.
pub fn run_convergence_study(
    problem: &ProblemSpec,
    sizes: &[usize],
    config: &SolverConfig,
    parallel: bool,
) -> Result<StudyOutcome> {
    validate_grid_list(sizes)?;
    config.validate()?;

    let mut solves = Vec::with_capacity(sizes.len());
    if parallel {
        let results = std::thread::scope(|scope| {
            let handles: Vec<_> = sizes
                .iter()
                .map(|&n| {
                    scope.spawn(move || -> Result<_> {
                        let grid = Grid::unit_square(n)?;
                        solve(problem, &grid, config)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("study worker panicked")).collect::<Vec<_>>()
        });
        for (&n, result) in sizes.iter().zip(results) {
            solves.push((n, result?));
        }
    } else {
        for &n in sizes {
            let grid = Grid::unit_square(n)?;
            solves.push((n, solve(problem, &grid, config)?));
        }
    }

    let mut diverged_at = None;
    let mut kept: Vec<(usize, crate::triharmonic::Solution)> = Vec::new();
    for (n, solution) in solves {
        if solution.report.termination == Termination::Diverged {
            diverged_at = Some(n);
            break;
        }
        kept.push((n, solution));
    }

    let errors: Vec<f64> = kept.iter().map(|(_, s)| s.report.final_error).collect();
    let mut orders: Vec<Option<f64>> = vec![None; kept.len()];
    match config.stop {
        StopRule::ExactError => {
            if kept.len() >= 2 && errors.iter().all(|&e| e > 0.0 && e.is_finite()) {
                for (i, order) in compute_order_exact(&errors)?.into_iter().enumerate() {
                    orders[i] = Some(order);
                }
            }
        }
        StopRule::SuccessiveDiff => {
            for i in 0..kept.len().saturating_sub(2) {
                orders[i] =
                    compute_order_successive(&kept[i].1.u, &kept[i + 1].1.u, &kept[i + 2].1.u)?;
            }
        }
    }

    let rows = kept
        .iter()
        .zip(orders)
        .map(|((n, solution), order)| StudyRow {
            n: *n,
            k: solution.report.iterations,
            error: solution.report.final_error,
            order,
        })
        .collect();
    let finest_u = kept.pop().map(|(_, solution)| solution.u);
    Ok(StudyOutcome { rows, diverged_at, finest_u })
}

/// Formats a float with the given number of significant digits in
/// scientific notation.
pub fn format_float(value: f64, significant_digits: usize) -> String {
    format!("{:.*e}", significant_digits.saturating_sub(1), value)
}

fn csv_error(e: csv::Error) -> Error {
    Error::MalformedTable(e.to_string())
}

/// Writes the table as CSV with the fixed header `N,K,error,order`; rows
/// without an order get an empty last field.
pub fn write_study_csv<W: Write>(rows: &[StudyRow], significant_digits: usize, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["N", "K", "error", "order"]).map_err(csv_error)?;
    for row in rows {
        writer
            .write_record([
                row.n.to_string(),
                row.k.to_string(),
                format_float(row.error, significant_digits),
                row.order.map_or_else(String::new, |o| format_float(o, significant_digits)),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parses a table produced by [`write_study_csv`].
pub fn parse_study_csv(data: &[u8]) -> Result<Vec<StudyRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(data);
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if idx == 0 {
            if record.iter().ne(["N", "K", "error", "order"]) {
                return Err(Error::MalformedTable("unexpected header".into()));
            }
            saw_header = true;
            continue;
        }
        if record.len() != 4 {
            return Err(Error::MalformedTable(format!(
                "row {idx} has {} fields, expected 4",
                record.len()
            )));
        }
        let n = record[0]
            .parse::<usize>()
            .map_err(|e| Error::MalformedTable(format!("row {idx} N: {e}")))?;
        let k = record[1]
            .parse::<usize>()
            .map_err(|e| Error::MalformedTable(format!("row {idx} K: {e}")))?;
        let error = record[2]
            .parse::<f64>()
            .map_err(|e| Error::MalformedTable(format!("row {idx} error: {e}")))?;
        let order = if record[3].is_empty() {
            None
        } else {
            Some(
                record[3]
                    .parse::<f64>()
                    .map_err(|e| Error::MalformedTable(format!("row {idx} order: {e}")))?,
            )
        };
        if !error.is_finite() || order.is_some_and(|o| !o.is_finite()) {
            return Err(Error::MalformedTable(format!("row {idx} has a non-finite value")));
        }
        rows.push(StudyRow { n, k, error, order });
    }
    if !saw_header {
        return Err(Error::MalformedTable("missing header".into()));
    }
    Ok(rows)
}

/// Writes `x1,x2,U` triples for every closed-grid node, row by row.
pub fn write_solution_csv<W: Write>(u: &GridFunction, significant_digits: usize, mut out: W) -> Result<()> {
    let grid = *u.grid();
    writeln!(out, "x1,x2,U")?;
    for i in 0..=grid.m() {
        for j in 0..=grid.n() {
            writeln!(
                out,
                "{},{},{}",
                format_float(grid.x1(i), significant_digits),
                format_float(grid.x2(j), significant_digits),
                format_float(u.get(i, j), significant_digits)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triharmonic::ProblemSpec;

    #[test]
    fn exact_orders_match_the_log_ratio() {
        let orders = compute_order_exact(&[4.5234e-4, 2.8102e-5]).unwrap();
        assert_eq!(orders.len(), 1);
        assert!((orders[0] - 4.0086).abs() < 5e-4, "got {}", orders[0]);

        assert_eq!(compute_order_exact(&[3.0, 3.0]).unwrap(), vec![0.0]);
        assert_eq!(compute_order_exact(&[1.6e-2, 1.0e-3]).unwrap(), vec![4.0]);
    }

    #[test]
    fn exact_orders_reject_bad_input() {
        assert!(matches!(
            compute_order_exact(&[1.0]),
            Err(Error::InvalidStudyInput(_))
        ));
        assert!(matches!(
            compute_order_exact(&[1.0, 0.0]),
            Err(Error::NonPositiveError(_))
        ));
        assert!(matches!(
            compute_order_exact(&[1.0, -2.0]),
            Err(Error::NonPositiveError(_))
        ));
    }

    #[test]
    fn successive_order_is_exact_on_a_model_expansion() {
        // Solutions of the form u + C h^4 on nested binary grids: every
        // difference of samples is exact in floating point, and the order
        // comes out as exactly 4.
        let smooth = |x1: f64, x2: f64| (x1 - 0.5) * x2;
        let c = 2.0;
        let make = |n: usize| {
            let grid = Grid::unit_square(n).unwrap();
            let h = grid.h1();
            GridFunction::sample(&grid, |x1, x2| smooth(x1, x2) + c * h.powi(4))
        };
        let (u8v, u16v, u32v) = (make(8), make(16), make(32));
        let order = compute_order_successive(&u8v, &u16v, &u32v).unwrap().unwrap();
        assert_eq!(order, 4.0);
    }

    #[test]
    fn successive_order_degenerates_to_none() {
        let g8 = Grid::unit_square(8).unwrap();
        let g16 = Grid::unit_square(16).unwrap();
        let g32 = Grid::unit_square(32).unwrap();
        let a = GridFunction::sample(&g8, |x1, _| x1);
        let b = GridFunction::sample(&g16, |x1, _| x1);
        let c = GridFunction::sample(&g32, |x1, _| x1);
        // Linear data restricts exactly, so both differences vanish.
        assert_eq!(compute_order_successive(&a, &b, &c).unwrap(), None);
    }

    #[test]
    fn grid_list_parsing_and_validation() {
        assert_eq!(parse_grid_list("8,16,32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_grid_list(" 8 , 16 ").unwrap(), vec![8, 16]);
        assert!(parse_grid_list("8,,16").is_err());
        assert!(parse_grid_list("8,x").is_err());
        assert!(parse_grid_list("-8").is_err());

        assert!(validate_grid_list(&[8, 16, 32]).is_ok());
        assert!(validate_grid_list(&[]).is_err());
        assert!(validate_grid_list(&[4, 8]).is_err());
        assert!(validate_grid_list(&[8, 24]).is_err());
    }

    #[test]
    fn zero_problem_study_has_zero_errors_and_no_orders() {
        let problem = ProblemSpec::new(|_, _, _, _, _| 0.0).with_exact_solution(|_, _| 0.0);
        let outcome =
            run_convergence_study(&problem, &[8, 16], &SolverConfig::default(), false).unwrap();
        assert!(outcome.diverged_at.is_none());
        assert_eq!(outcome.rows.len(), 2);
        for row in &outcome.rows {
            assert_eq!(row.error, 0.0);
            assert_eq!(row.order, None);
            assert_eq!(row.k, 1);
        }
    }

    #[test]
    fn csv_round_trips_at_full_precision() {
        let rows = vec![
            StudyRow { n: 8, k: 7, error: 4.5234e-4, order: Some(4.0086) },
            StudyRow { n: 16, k: 14, error: 2.8102e-5, order: None },
        ];
        let mut buf = Vec::new();
        write_study_csv(&rows, 17, &mut buf).unwrap();
        let parsed = parse_study_csv(&buf).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn csv_emission_is_deterministic_and_idempotent() {
        let rows = vec![
            StudyRow { n: 8, k: 7, error: 1.0 / 3.0, order: Some(1.0 / 7.0) },
            StudyRow { n: 16, k: 14, error: 2.0 / 3.0, order: None },
        ];
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_study_csv(&rows, 6, &mut a).unwrap();
        write_study_csv(&rows, 6, &mut b).unwrap();
        assert_eq!(a, b);

        // Re-emitting what was parsed reproduces the same bytes.
        let parsed = parse_study_csv(&a).unwrap();
        let mut c = Vec::new();
        write_study_csv(&parsed, 6, &mut c).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn csv_parser_rejects_malformed_tables() {
        assert!(parse_study_csv(b"").is_err());
        assert!(parse_study_csv(b"bogus,header,x,y\n1,2,3,\n").is_err());
        assert!(parse_study_csv(b"N,K,error,order\n1,2\n").is_err());
        assert!(parse_study_csv(b"N,K,error,order\nx,2,3.0,\n").is_err());
        assert!(parse_study_csv(b"N,K,error,order\n8,7,NaN,\n").is_err());
        assert!(parse_study_csv(b"N,K,error,order\n8,7,1.0,inf\n").is_err());
    }

    #[test]
    fn float_formatting_uses_significant_digits() {
        assert_eq!(format_float(4.5234e-4, 6), "4.52340e-4");
        assert_eq!(format_float(-1.0, 3), "-1.00e0");
        assert_eq!(format_float(0.0, 6), "0.00000e0");
    }

    #[test]
    fn solution_dump_covers_every_node() {
        let grid = Grid::unit_square(5).unwrap();
        let u = GridFunction::sample(&grid, |x1, x2| x1 + x2);
        let mut buf = Vec::new();
        write_solution_csv(&u, 6, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,U");
        assert_eq!(lines.len(), 1 + 36);
    }
}
