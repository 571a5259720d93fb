//! Artifact writers: CSV with `#` headers, versioned JSON, SVG pole plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cauchy_approx::kernel::scalar::Cplx;
use cauchy_approx::{Error, Result};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Full-precision decimal pair `[re, im]`.
pub fn cplx_json(z: &Cplx) -> Value {
    json!([z.re().to_decimal(), z.im().to_decimal()])
}

pub fn cplx_list(zs: &[Cplx]) -> Value {
    Value::Array(zs.iter().map(cplx_json).collect())
}

pub struct Writer {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        Ok(Writer { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn put(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// `header` lines are written with a `#` prefix; the last one names the columns.
    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        for r in rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        self.put(name, &out)
    }

    pub fn json(&mut self, name: &str, mut body: Value) -> Result<()> {
        if let Value::Object(map) = &mut body {
            map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        }
        let text = serde_json::to_string_pretty(&body).expect("values serialize");
        self.put(name, &(text + "\n"))
    }

    pub fn svg(&mut self, name: &str, text: &str) -> Result<()> {
        self.put(name, text)
    }
}

/// Scatter of poles as circles with the support `[c, d]` drawn as a segment.
pub fn pole_plot(c: f64, d: f64, poles: &[(f64, f64)], title: &str) -> String {
    let mut xs = vec![c, d];
    let mut ys = vec![0.0];
    for &(x, y) in poles {
        xs.push(x);
        ys.push(y);
    }
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let span = (x1 - x0).max(y1 - y0).max(1e-3) * 1.1;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let size = 600.0;
    let map = |x: f64, y: f64| ((x - cx) / span * size + size / 2.0, size / 2.0 - (y - cy) / span * size);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(out, r#"<title>{title}</title>"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax, ay) = map(c, 0.0);
    let (bx, by) = map(d, 0.0);
    let _ = writeln!(out, r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="black" stroke-width="2"/>"#);
    for &(x, y) in poles {
        let (px, py) = map(x, y);
        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="none" stroke="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let finite = v.iter().copied().filter(|x| x.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
