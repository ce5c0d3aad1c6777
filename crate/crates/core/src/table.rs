//! The affine map from the unknown clearance-time vector to every scheduled
//! signal time, plus separation checking of evaluated timetables.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Signal names and positions (m), strictly increasing from the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Track {
    pub names: Vec<String>,
    pub positions: Vec<f64>,
}

impl Track {
    pub fn new(names: Vec<String>, positions: Vec<f64>) -> Result<Self> {
        if names.len() != positions.len() || names.len() < 2 {
            return Err(Error::Config("track needs matching names and positions".into()));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("track positions must be strictly increasing".into()));
        }
        Ok(Track { names, positions })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A scheduled time: either a constant or an offset from one unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeExpr {
    Fixed(f64),
    /// `h[index] + offset`, with `index` 1-based to match the usual naming
    /// of the unknowns (`h1`, `h2`, ...).
    Affine { index: usize, offset: f64 },
}

impl TimeExpr {
    pub fn eval(&self, h: &[f64]) -> f64 {
        match *self {
            TimeExpr::Fixed(c) => c,
            TimeExpr::Affine { index, offset } => h[index - 1] + offset,
        }
    }

    pub fn shifted(&self, delta: f64) -> TimeExpr {
        match *self {
            TimeExpr::Fixed(c) => TimeExpr::Fixed(c + delta),
            TimeExpr::Affine { index, offset } => TimeExpr::Affine { index, offset: offset + delta },
        }
    }

    /// Serialized cell form: `fixed:<seconds>`, `h<k>`, `h<k>+<offset>` or
    /// `h<k>-<offset>`.
    pub fn to_cell(&self) -> String {
        match *self {
            TimeExpr::Fixed(c) => format!("fixed:{}", fmt_num(c)),
            TimeExpr::Affine { index, offset } => {
                if offset == 0.0 {
                    format!("h{index}")
                } else if offset > 0.0 {
                    format!("h{index}+{}", fmt_num(offset))
                } else {
                    format!("h{index}-{}", fmt_num(-offset))
                }
            }
        }
    }

    pub fn parse_cell(s: &str) -> Result<Option<TimeExpr>> {
        let s = s.trim();
        if s == "-" {
            return Ok(None);
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let c: f64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad fixed cell '{s}'")))?;
            return Ok(Some(TimeExpr::Fixed(c)));
        }
        if let Some(rest) = s.strip_prefix('h') {
            let (idx_str, offset) = if let Some(plus) = rest.find('+') {
                (&rest[..plus], rest[plus + 1..].parse::<f64>().map_err(|_| {
                    Error::Config(format!("bad offset in cell '{s}'"))
                })?)
            } else if let Some(minus) = rest.find('-') {
                (&rest[..minus], -rest[minus + 1..].parse::<f64>().map_err(|_| {
                    Error::Config(format!("bad offset in cell '{s}'"))
                })?)
            } else {
                (rest, 0.0)
            };
            let index: usize = idx_str
                .parse()
                .map_err(|_| Error::Config(format!("bad unknown index in cell '{s}'")))?;
            if index == 0 {
                return Err(Error::Config(format!("unknown indices are 1-based: '{s}'")));
            }
            return Ok(Some(TimeExpr::Affine { index, offset }));
        }
        Err(Error::Config(format!("unrecognised cell '{s}'")))
    }
}

fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// One train's scheduled row: a cell per table column. `None` marks a
/// signal the timetable does not time for this train (its pass-through
/// time is interpolated when the grid is evaluated).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub train: String,
    pub cells: Vec<Option<TimeExpr>>,
}

/// The full constraint table: columns name a subset of the track's
/// signals; rows map the unknown vector to each train's scheduled times.
/// `cycle` adds a wrap-around copy of the first train, shifted by the
/// cycle length, behind the last row for separation purposes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintTable {
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    pub cycle: Option<f64>,
}

impl ConstraintTable {
    /// Number of distinct unknowns referenced (the highest `h` index).
    pub fn unknowns(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().flatten())
            .filter_map(|e| match e {
                TimeExpr::Affine { index, .. } => Some(*index),
                TimeExpr::Fixed(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            if row.cells.len() != self.columns.len() {
                return Err(Error::Incomplete(format!(
                    "row {} has {} cells for {} columns",
                    row.train,
                    row.cells.len(),
                    self.columns.len()
                )));
            }
            if row.cells.first().map_or(true, |c| c.is_none())
                || row.cells.last().map_or(true, |c| c.is_none())
            {
                return Err(Error::Incomplete(format!(
                    "row {} must time its first and last columns",
                    row.train
                )));
            }
        }
        // every index between 1 and the max must be referenced somewhere
        let k = self.unknowns();
        let mut seen = vec![false; k];
        for row in &self.rows {
            for cell in row.cells.iter().flatten() {
                if let TimeExpr::Affine { index, .. } = cell {
                    seen[*index - 1] = true;
                }
            }
        }
        if let Some(miss) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("unknown h{} is never referenced", miss + 1)));
        }
        Ok(())
    }

    /// The wrap-around row, when a cycle is configured.
    pub fn wrap_row(&self) -> Option<TableRow> {
        let cycle = self.cycle?;
        let first = self.rows.first()?;
        Some(TableRow {
            train: format!("{}*", first.train),
            cells: first.cells.iter().map(|c| c.map(|e| e.shifted(cycle))).collect(),
        })
    }

    /// Rows including the wrap-around copy.
    pub fn rows_with_wrap(&self) -> Vec<TableRow> {
        let mut rows = self.rows.clone();
        if let Some(w) = self.wrap_row() {
            rows.push(w);
        }
        rows
    }

    /// Numeric times per train per column. Untimed cells come back as NaN;
    /// use [`ConstraintTable::evaluate_interpolated`] to fill them.
    pub fn evaluate(&self, h: &[f64]) -> Result<Vec<Vec<f64>>> {
        let want = self.unknowns();
        if h.len() != want {
            return Err(Error::LengthMismatch { got: h.len(), want });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.cells
                    .iter()
                    .map(|c| c.map_or(f64::NAN, |e| e.eval(h)))
                    .collect()
            })
            .collect())
    }

    /// Numeric times with untimed cells filled by distance-proportional
    /// interpolation between the neighbouring timed cells, and the wrap row
    /// appended when a cycle is configured.
    pub fn evaluate_interpolated(&self, track: &Track, h: &[f64]) -> Result<Vec<Vec<f64>>> {
        let want = self.unknowns();
        if h.len() != want {
            return Err(Error::LengthMismatch { got: h.len(), want });
        }
        let cols = self.column_positions(track)?;
        let mut out = Vec::new();
        for row in self.rows_with_wrap() {
            let raw: Vec<f64> = row.cells.iter().map(|c| c.map_or(f64::NAN, |e| e.eval(h))).collect();
            out.push(interpolate_row(&raw, &cols));
        }
        Ok(out)
    }

    /// Track positions of the table's columns.
    pub fn column_positions(&self, track: &Track) -> Result<Vec<f64>> {
        self.columns
            .iter()
            .map(|name| {
                track
                    .index_of(name)
                    .map(|i| track.positions[i])
                    .ok_or_else(|| Error::Config(format!("table column '{name}' not on the track")))
            })
            .collect()
    }

    /// Serializes the table to its keyed text form.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "columns = [{}]\n",
            self.columns.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(", ")
        ));
        if let Some(c) = self.cycle {
            s.push_str(&format!("cycle = {}\n", fmt_num(c)));
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str("[[row]]\n");
            s.push_str(&format!("train = {:?}\n", row.train));
            let cells: Vec<String> = row
                .cells
                .iter()
                .map(|c| format!("{:?}", c.map_or("-".to_string(), |e| e.to_cell())))
                .collect();
            s.push_str(&format!("cells = [{}]\n\n", cells.join(", ")));
        }
        s
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct RawRow {
            train: String,
            cells: Vec<String>,
        }
        #[derive(Deserialize)]
        struct Raw {
            columns: Vec<String>,
            cycle: Option<f64>,
            #[serde(default)]
            row: Vec<RawRow>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Config(format!("table spec: {e}")))?;
        let rows = raw
            .row
            .into_iter()
            .map(|r| {
                let cells = r
                    .cells
                    .iter()
                    .map(|c| TimeExpr::parse_cell(c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TableRow { train: r.train, cells })
            })
            .collect::<Result<Vec<_>>>()?;
        let table = ConstraintTable { columns: raw.columns, rows, cycle: raw.cycle };
        table.validate()?;
        Ok(table)
    }
}

fn interpolate_row(raw: &[f64], pos: &[f64]) -> Vec<f64> {
    let mut out = raw.to_vec();
    for j in 0..raw.len() {
        if !raw[j].is_nan() {
            continue;
        }
        let left = (0..j).rev().find(|&i| !raw[i].is_nan());
        let right = (j + 1..raw.len()).find(|&i| !raw[i].is_nan());
        if let (Some(a), Some(b)) = (left, right) {
            let frac = (pos[j] - pos[a]) / (pos[b] - pos[a]);
            out[j] = raw[a] + frac * (raw[b] - raw[a]);
        }
    }
    out
}

/// Builds the fully-chained constraint pattern for `m` trains over `n + 1`
/// signals: the first train's interior times are the unknowns, each later
/// train enters a signal segment as its leader (plus buffer) leaves, one
/// fresh unknown appears per extra train at the second-to-last signal, and
/// every train repeats the first train's journey time.
pub fn build_full_table(
    m: usize,
    n: usize,
    departure: f64,
    total_time: f64,
    buffers: &[f64],
) -> Result<ConstraintTable> {
    if m == 0 || n < 2 {
        return Err(Error::Config("need at least one train and three signals".into()));
    }
    if m > n / 2 {
        return Err(Error::Unsupported { m, n });
    }
    if !buffers.is_empty() && buffers.len() != m.saturating_sub(1) {
        return Err(Error::Config(format!(
            "need {} buffer entries, got {}",
            m - 1,
            buffers.len()
        )));
    }
    let buffer = |i: usize| if buffers.is_empty() { 0.0 } else { buffers[i] };
    let columns: Vec<String> = (0..=n).map(|j| format!("S{j}")).collect();
    let mut rows: Vec<Vec<TimeExpr>> = Vec::with_capacity(m);
    let mut first = Vec::with_capacity(n + 1);
    first.push(TimeExpr::Fixed(departure));
    for j in 1..n {
        first.push(TimeExpr::Affine { index: j, offset: 0.0 });
    }
    first.push(TimeExpr::Fixed(departure + total_time));
    rows.push(first);
    let mut next_unknown = n; // h_n is the first fresh follower unknown
    for i in 1..m {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(n + 1);
        // chained entries: this train reaches signal j-1 as the leader
        // (already buffered) leaves j+1
        for j in 0..=n - 2 {
            row.push(prev[j + 2].shifted(buffer(i - 1)));
        }
        row.push(TimeExpr::Affine { index: next_unknown, offset: 0.0 });
        next_unknown += 1;
        // equal journey time, anchored to this train's own departure
        row.push(row[0].shifted(total_time));
        rows.push(row);
    }
    let table = ConstraintTable {
        columns,
        rows: rows
            .into_iter()
            .enumerate()
            .map(|(i, cells)| TableRow {
                train: format!("T{}", i + 1),
                cells: cells.into_iter().map(Some).collect(),
            })
            .collect(),
        cycle: None,
    };
    table.validate()?;
    Ok(table)
}

/// Builds a table from per-cell expressions (the key-location form used
/// for custom separation schemes).
pub fn build_custom_table(
    columns: Vec<String>,
    rows: Vec<TableRow>,
    cycle: Option<f64>,
) -> Result<ConstraintTable> {
    let table = ConstraintTable { columns, rows, cycle };
    table.validate()?;
    Ok(table)
}

/// One violated or tight separation constraint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationSlack {
    /// Index of the following train (0-based, wrap row included).
    pub follower: usize,
    /// Interior signal index on the evaluated grid.
    pub signal: usize,
    /// `t_follower(x_{j-1}) - t_leader(x_{j+1})`; negative means the
    /// follower is scheduled into an occupied segment.
    pub slack: f64,
}

/// Separation report over an evaluated grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    pub violations: Vec<SeparationSlack>,
    pub min_slack: f64,
    pub min_at: Option<SeparationSlack>,
}

/// Checks every leader/follower pair on every signal segment of the grid:
/// the leader must leave segment `[x_{j-1}, x_{j+1}]` before the follower
/// enters. Rows are consecutive trains (a wrap row, if present, last).
pub fn check_separation(grid: &[Vec<f64>], threshold: f64) -> SeparationReport {
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut min_at = None;
    if grid.len() < 2 {
        return SeparationReport { violations, min_slack, min_at };
    }
    let cols = grid[0].len();
    for i in 0..grid.len() - 1 {
        for j in 1..cols - 1 {
            let slack = grid[i + 1][j - 1] - grid[i][j + 1];
            let at = SeparationSlack { follower: i + 1, signal: j, slack };
            if slack < min_slack {
                min_slack = slack;
                min_at = Some(at.clone());
            }
            if slack < threshold {
                violations.push(at);
            }
        }
    }
    SeparationReport { violations, min_slack, min_at }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_table_two_trains() {
        let t = build_full_table(2, 8, 0.0, 3000.0, &[]).unwrap();
        let r2 = &t.rows[1].cells;
        assert_eq!(r2[0], Some(TimeExpr::Affine { index: 2, offset: 0.0 }));
        assert_eq!(r2[7], Some(TimeExpr::Affine { index: 8, offset: 0.0 }));
        assert_eq!(r2[8], Some(TimeExpr::Affine { index: 2, offset: 3000.0 }));
        assert_eq!(t.unknowns(), 8);
    }

    #[test]
    fn full_table_chain_equalities_hold_exactly() {
        let t = build_full_table(4, 9, 0.0, 2500.0, &[]).unwrap();
        let h: Vec<f64> = (1..=t.unknowns()).map(|k| 217.3 * k as f64).collect();
        let g = t.evaluate(&h).unwrap();
        for i in 0..3 {
            for j in 1..=8 {
                assert_eq!(g[i][j + 1], g[i + 1][j - 1], "chain broken at i={i} j={j}");
            }
        }
        // spot check of the three-deep chain
        assert_eq!(g[0][4], g[1][2]);
        assert_eq!(g[1][2], g[2][0]);
    }

    #[test]
    fn full_table_buffers_translate_rows() {
        let base = build_full_table(3, 8, 0.0, 2400.0, &[]).unwrap();
        let buffered = build_full_table(3, 8, 0.0, 2400.0, &[60.0, 45.0]).unwrap();
        let h: Vec<f64> = (1..=base.unknowns()).map(|k| 200.0 * k as f64).collect();
        let g0 = base.evaluate(&h).unwrap();
        let g1 = buffered.evaluate(&h).unwrap();
        let shifts = [0.0, 60.0, 105.0];
        for i in 0..3 {
            for j in 0..=8 {
                assert_eq!(g1[i][j], g0[i][j] + shifts[i], "row {i} col {j}");
            }
        }
    }

    #[test]
    fn full_table_single_train_degenerates() {
        let t = build_full_table(1, 6, 0.0, 1000.0, &[]).unwrap();
        assert_eq!(t.unknowns(), 5);
        for j in 1..6 {
            assert_eq!(t.rows[0].cells[j], Some(TimeExpr::Affine { index: j, offset: 0.0 }));
        }
    }

    #[test]
    fn full_table_rejects_too_many_trains() {
        assert!(matches!(
            build_full_table(5, 8, 0.0, 1000.0, &[]),
            Err(Error::Unsupported { m: 5, n: 8 })
        ));
    }

    #[test]
    fn cell_round_trip() {
        for s in ["fixed:900", "h3", "h3+60", "h12+3540", "h2-15"] {
            let e = TimeExpr::parse_cell(s).unwrap().unwrap();
            assert_eq!(e.to_cell(), s);
        }
        assert!(TimeExpr::parse_cell("-").unwrap().is_none());
        assert!(TimeExpr::parse_cell("junk").is_err());
    }

    #[test]
    fn fixed_table_ignores_h() {
        let rows = vec![TableRow {
            train: "T1".into(),
            cells: vec![Some(TimeExpr::Fixed(0.0)), Some(TimeExpr::Fixed(100.0))],
        }];
        let t = build_custom_table(vec!["A".into(), "B".into()], rows, None).unwrap();
        assert_eq!(t.unknowns(), 0);
        let g = t.evaluate(&[]).unwrap();
        assert_eq!(g[0], vec![0.0, 100.0]);
    }

    #[test]
    fn separation_flags_early_follower() {
        // leader exits segment around signal 1 at t=300, follower enters at 250
        let grid = vec![vec![0.0, 150.0, 300.0, 450.0], vec![250.0, 400.0, 550.0, 700.0]];
        let rep = check_separation(&grid, 0.0);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].signal, 1);
        assert_eq!(rep.violations[0].slack, -50.0);
        assert_eq!(rep.min_slack, -50.0);
    }

    #[test]
    fn single_train_has_no_violations() {
        let grid = vec![vec![0.0, 10.0, 20.0]];
        let rep = check_separation(&grid, 0.0);
        assert!(rep.violations.is_empty());
        assert!(rep.min_slack.is_infinite());
    }
}
