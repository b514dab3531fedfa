use std::time::Duration;

/// Pass/fail rows printed as an aligned table.
#[derive(Debug, Default)]
pub struct Table {
    rows: Vec<Row>,
}

#[derive(Debug)]
struct Row {
    name: String,
    pass: bool,
    detail: String,
    elapsed: Option<Duration>,
}

impl Table {
    pub fn row(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.rows.push(Row {
            name: name.into(),
            pass,
            detail: detail.into(),
            elapsed: None,
        });
    }

    pub fn timed(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>, elapsed: Duration) {
        self.row(name, pass, detail);
        self.rows.last_mut().expect("row just pushed").elapsed = Some(elapsed);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
        let mut s = String::new();
        for r in &self.rows {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let time = r.elapsed.map(|d| format!(" [{:.2}s]", d.as_secs_f64())).unwrap_or_default();
            let pad = width - r.name.chars().count();
            s.push_str(&format!("{status}  {}{}  {}{time}\n", r.name, " ".repeat(pad), r.detail));
        }
        let failed = self.rows.iter().filter(|r| !r.pass).count();
        s.push_str(&format!("{} checks, {failed} failed\n", self.rows.len()));
        s
    }
}
