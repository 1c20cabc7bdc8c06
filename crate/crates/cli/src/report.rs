use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Machine-readable name, unique within the report.
    pub key: String,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub heading: String,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(heading: impl Into<String>) -> Self {
        Self {
            heading: heading.into(),
            ..Self::default()
        }
    }

    pub fn row(&mut self, key: impl Into<String>, label: impl Into<String>, value: f64) -> &mut Self {
        self.rows.push(Row {
            key: key.into(),
            label: label.into(),
            value,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }
}

/// Analytic results of one experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
    /// Extra CSV files, `(file name, contents)`.
    pub attachments: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.sections
            .iter()
            .flat_map(|s| &s.rows)
            .find(|r| r.key == key)
            .map(|r| r.value)
    }

    pub fn to_text(&self) -> String {
        let width = self
            .sections
            .iter()
            .flat_map(|s| &s.rows)
            .map(|r| r.label.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        writeln!(out, "{}", self.title).unwrap();
        writeln!(out, "{}", "=".repeat(self.title.chars().count())).unwrap();
        for s in &self.sections {
            writeln!(out, "\n{}", s.heading).unwrap();
            writeln!(out, "{}", "-".repeat(s.heading.chars().count())).unwrap();
            for r in &s.rows {
                let pad = width - r.label.chars().count();
                writeln!(out, "  {}{} = {}", r.label, " ".repeat(pad), format_value(r.value)).unwrap();
            }
            for n in &s.notes {
                writeln!(out, "  * {n}").unwrap();
            }
        }
        out
    }

    /// `quantity,value` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for r in self.sections.iter().flat_map(|s| &s.rows) {
            writeln!(out, "{},{:.16e}", r.key, r.value).unwrap();
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12}")
    } else {
        format!("{v}")
    }
}
