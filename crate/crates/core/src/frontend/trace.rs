use crate::machine::{RunResult, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceStyle {
    /// Render counter changes as `0->1` instead of `0→1`.
    pub ascii: bool,
}

fn counter_cell(before: i64, after: i64, arrow: &str) -> String {
    if before == after {
        before.to_string()
    } else {
        format!("{before}{arrow}{after}")
    }
}

fn row_cells(row: &TraceRow, arrow: &str) -> [String; 5] {
    [
        row.step.to_string(),
        row.instruction_tag.clone(),
        format!("q{}", row.state_before),
        counter_cell(row.config_before.a, row.config_after.a, arrow),
        counter_cell(row.config_before.b, row.config_after.b, arrow),
    ]
}

/// Renders the captured trace as a fixed-width table with columns
/// `Step | Instr | St | A | B`. Returns an empty string when the run was made
/// without trace capture.
pub fn format_trace(result: &RunResult, style: TraceStyle) -> String {
    let Some(rows) = result.trace.as_ref() else {
        return String::new();
    };
    let arrow = if style.ascii { "->" } else { "→" };
    let header = ["Step", "Instr", "St", "A", "B"].map(String::from);
    let body: Vec<[String; 5]> = rows.iter().map(|r| row_cells(r, arrow)).collect();

    let mut widths = header.each_ref().map(|h| h.chars().count());
    for cells in &body {
        for (w, cell) in widths.iter_mut().zip(cells) {
            *w = (*w).max(cell.chars().count());
        }
    }

    let line = |cells: &[String; 5]| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join(" | ").trim_end().to_string()
    };

    let mut out = line(&header);
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for cells in &body {
        out.push_str(&line(cells));
        out.push('\n');
    }
    if result.trace_truncated {
        out.push_str(&format!(
            "... trace truncated after {} rows ({} steps executed)\n",
            rows.len(),
            result.machine_steps
        ));
    }
    out
}

/// Splits a rendered table row back into trimmed cells.
pub fn table_cells(line: &str) -> Vec<&str> {
    line.split('|').map(str::trim).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::fig1;
    use crate::machine::{run, Counter, Instruction, Program, RunOptions};

    #[test]
    fn fig1_table_matches_execution_table() {
        let result = run(&fig1(), 1_000_000, RunOptions::traced()).unwrap();
        let table = format_trace(&result, TraceStyle::default());
        let rows: Vec<Vec<&str>> = table.lines().skip(2).map(table_cells).collect();
        let expected = [
            ["0", "INC(A)", "q0", "0→1", "0"],
            ["1", "JZDEC(B), B=0", "q1", "1", "0"],
            ["2", "INC(B)", "q2", "1", "0→1"],
            ["3", "INC(A)", "q0", "1→2", "1"],
            ["4", "JZDEC(B), B>0", "q1", "2", "1→0"],
            ["5", "HALT", "q3", "2", "0"],
        ];
        assert_eq!(rows.len(), 6);
        for (row, want) in rows.iter().zip(expected) {
            assert_eq!(row.as_slice(), want.as_slice());
        }
    }

    #[test]
    fn halt_only_table() {
        let p = Program::new(vec![Instruction::Halt]).unwrap();
        let result = run(&p, 10, RunOptions::traced()).unwrap();
        let table = format_trace(&result, TraceStyle::default());
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(table_cells(lines[2]), ["0", "HALT", "q0", "0", "0"]);
    }

    #[test]
    fn ascii_arrows() {
        let result = run(&fig1(), 10, RunOptions::traced()).unwrap();
        let table = format_trace(&result, TraceStyle { ascii: true });
        assert!(table.contains("0->1"));
        assert!(table.is_ascii());
    }

    #[test]
    fn truncated_trace_has_footer() {
        let p = Program::new(vec![Instruction::Inc { counter: Counter::A, next: 0 }]).unwrap();
        let options = RunOptions { capture_trace: true, trace_cap: 4 };
        let result = run(&p, 9, options).unwrap();
        let table = format_trace(&result, TraceStyle::default());
        assert_eq!(table.lines().count(), 2 + 4 + 1);
        assert_eq!(table.lines().last().unwrap(), "... trace truncated after 4 rows (9 steps executed)");
    }
}
