use clap::ValueEnum;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
    Csv,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// A command's primary output: ordered key-value fields and an optional table.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub fields: Vec<(String, String)>,
    pub table: Option<Table>,
    /// Verbatim text that replaces the rendered fields in text format.
    pub text_override: Option<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Self {
            title: title.to_string(),
            ..Self::default()
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(self.render_text()),
            Format::Kv => Ok(self.render_kv()),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        if let Some(t) = &self.text_override {
            return t.clone();
        }
        let mut out = format!("{}\n", self.title);
        let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.fields {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        if let Some(t) = &self.table {
            let widths: Vec<usize> = (0..t.headers.len())
                .map(|j| {
                    t.rows
                        .iter()
                        .map(|r| r[j].len())
                        .chain(std::iter::once(t.headers[j].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                format!("  {}\n", padded.join("  ").trim_end())
            };
            out.push_str(&format!("{}:\n", t.name));
            out.push_str(&line(&t.headers));
            for r in &t.rows {
                out.push_str(&line(r));
            }
        }
        out
    }

    fn render_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if let Some(t) = &self.table {
            for (i, r) in t.rows.iter().enumerate() {
                for (h, c) in t.headers.iter().zip(r) {
                    out.push_str(&format!("{}.{i}.{h} = {c}\n", t.name));
                }
            }
        }
        out
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.headers)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["key", "value"])?;
                for (k, v) in &self.fields {
                    w.write_record([k, v])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.field("a", 1).field("b.c", "x y");
        let mut t = Table::new("rows", &["u", "s"]);
        t.push(vec!["6".into(), "-0.67".into()]);
        t.push(vec!["10".into(), "-0.66,5".into()]);
        r.table = Some(t);
        r
    }

    #[test]
    fn kv_flattens_table() {
        let kv = sample().render(Format::Kv).unwrap();
        assert!(kv.starts_with("a = 1\nb.c = x y\n"));
        assert!(kv.contains("rows.1.s = -0.66,5\n"));
    }

    #[test]
    fn csv_quotes_when_needed() {
        let csv = sample().render(Format::Csv).unwrap();
        assert_eq!(csv, "u,s\n6,-0.67\n10,\"-0.66,5\"\n");
        let mut bare = Report::new("x");
        bare.field("k", "v");
        assert_eq!(bare.render(Format::Csv).unwrap(), "key,value\nk,v\n");
    }

    #[test]
    fn text_aligns_columns() {
        let text = sample().render(Format::Text).unwrap();
        assert!(text.contains("  u   s\n"));
        assert!(text.contains("  10  -0.66,5\n"));
    }
}
