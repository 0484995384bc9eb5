use std::fmt::Write;

use super::{CostMatrix, InstanceError};

fn parse_err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the plain-text instance format: a line holding `n`, then `n` rows
/// of `n` whitespace-separated decimal costs. Lines starting with `#` before
/// the header are ignored, as are trailing blank lines.
pub fn parse_instance(text: &str) -> Result<CostMatrix, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .skip_while(|(_, l)| l.is_empty() || l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n: usize = header.parse().map_err(|_| {
        parse_err(
            header_line,
            format!("expected vertex count, got `{header}`"),
        )
    })?;
    let mut rows = Vec::with_capacity(n);
    for (line, content) in lines.by_ref() {
        if rows.len() == n {
            if content.is_empty() {
                continue;
            }
            return Err(parse_err(line, format!("expected {n} rows, found more")));
        }
        let row = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("bad cost `{tok}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(parse_err(
                line,
                format!("expected {n} costs, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_err(
            header_line + rows.len() + 1,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    CostMatrix::from_rows(rows)
}

/// Writes the plain-text format using the shortest decimal representation
/// that round-trips each `f64`.
pub fn serialize_instance(m: &CostMatrix) -> String {
    let mut out = format!("{}\n", m.n());
    for row in m.rows() {
        for (j, c) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads a TSPLIB instance with `EDGE_WEIGHT_TYPE: EXPLICIT` and
/// `EDGE_WEIGHT_FORMAT: FULL_MATRIX`. Diagonal entries (often a large
/// sentinel in ATSP files) are replaced by zero. The matrix is returned as
/// read; it is up to the caller to validate or close it.
pub fn parse_tsplib(text: &str) -> Result<CostMatrix, InstanceError> {
    let mut dimension: Option<usize> = None;
    let mut weights: Vec<f64> = Vec::new();
    let mut in_section = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_section {
            for tok in line.split_whitespace() {
                weights.push(
                    tok.parse()
                        .map_err(|_| parse_err(line_no, format!("bad weight `{tok}`")))?,
                );
            }
            continue;
        }
        if line.starts_with("EDGE_WEIGHT_SECTION") {
            in_section = true;
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(parse_err(line_no, format!("unexpected line `{line}`"))),
        };
        match key {
            "DIMENSION" => {
                dimension = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, "bad DIMENSION"))?,
                )
            }
            "EDGE_WEIGHT_TYPE" if value != "EXPLICIT" => {
                return Err(parse_err(
                    line_no,
                    format!("unsupported EDGE_WEIGHT_TYPE {value}"),
                ))
            }
            "EDGE_WEIGHT_FORMAT" if value != "FULL_MATRIX" => {
                return Err(parse_err(
                    line_no,
                    format!("unsupported EDGE_WEIGHT_FORMAT {value}"),
                ))
            }
            "TYPE" if value != "ATSP" && value != "TSP" => {
                return Err(parse_err(line_no, format!("unsupported TYPE {value}")))
            }
            _ => {}
        }
    }
    let n = dimension.ok_or_else(|| parse_err(1, "missing DIMENSION"))?;
    if !in_section {
        return Err(parse_err(1, "missing EDGE_WEIGHT_SECTION"));
    }
    if weights.len() != n * n {
        return Err(parse_err(
            1,
            format!("expected {} weights, found {}", n * n, weights.len()),
        ));
    }
    CostMatrix::from_rows(
        weights
            .chunks(n)
            .enumerate()
            .map(|(i, row)| {
                let mut row = row.to_vec();
                row[i] = 0.0;
                row
            })
            .collect(),
    )
}
