//! Tabular results rendered as an aligned text table, CSV or JSON.
//!
//! Machine formats print every float with 17 significant digits in
//! scientific notation, independent of locale.

use clap::ValueEnum;
use fockport::state::fmt_sig17;
use fockport::NoiseProfile;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Debug)]
enum Cell {
    Text(String),
    Num(f64),
}

#[derive(Clone, Debug)]
enum ConfigValue {
    Num(f64),
    Int(u64),
    Text(String),
}

#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
    config: Vec<(String, ConfigValue)>,
    summary: Vec<(String, f64)>,
}

fn json_number(x: f64) -> Value {
    Value::Number(
        fmt_sig17(x)
            .parse::<Number>()
            .expect("finite float renders as a JSON number"),
    )
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            ..Table::default()
        }
    }

    /// Leading text cells followed by numeric cells.
    pub fn row_mixed(&mut self, text: Vec<String>, numbers: &[f64]) {
        let mut row: Vec<Cell> = text.into_iter().map(Cell::Text).collect();
        row.extend(numbers.iter().map(|&x| Cell::Num(x)));
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Angles are recorded in radians.
    pub fn config_angle(&mut self, name: &str, radians: f64) {
        self.config.push((name.into(), ConfigValue::Num(radians)));
    }

    pub fn config_int(&mut self, name: &str, value: u64) {
        self.config.push((name.into(), ConfigValue::Int(value)));
    }

    pub fn config_text(&mut self, name: &str, value: &str) {
        self.config
            .push((name.into(), ConfigValue::Text(value.into())));
    }

    pub fn config_noise(&mut self, noise: &NoiseProfile) {
        for (name, v) in [
            ("kappa", noise.kappa),
            ("eta", noise.eta),
            ("epsilon", noise.epsilon),
            ("varkappa", noise.varkappa),
        ] {
            self.config.push((name.into(), ConfigValue::Num(v)));
        }
    }

    pub fn summary(&mut self, name: &str, value: f64) {
        self.summary.push((name.into(), value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Text(s) => s.clone(),
                        Cell::Num(x) => format!("{x:.6}"),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .header
            .iter()
            .enumerate()
            .map(|(i, h)| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([h.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&self.header));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        for (name, value) in &self.summary {
            out.push_str(&format!("{name}: {value:.6}\n"));
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Num(x) => fmt_sig17(*x),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    ConfigValue::Num(x) => json_number(*x),
                    ConfigValue::Int(n) => Value::from(*n),
                    ConfigValue::Text(s) => Value::from(s.as_str()),
                };
                (k.clone(), v)
            })
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Text(s) => Value::from(s.as_str()),
                            Cell::Num(x) => json_number(*x),
                        };
                        (h.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut results = Map::new();
        results.insert("rows".into(), Value::Array(rows));
        for (name, value) in &self.summary {
            results.insert(name.clone(), json_number(*value));
        }
        let mut root = Map::new();
        root.insert("config".into(), Value::Object(config));
        root.insert("results".into(), Value::Object(results));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}
