//! Output formats and the reproducibility header.

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use dehnlab::presentation::AbelianPresentation;

use crate::{Command, Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emit {
    Csv,
    Json,
}

/// Locale-free shortest round-trip form.
pub fn float(x: f64) -> String {
    format!("{x}")
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
    presentation: String,
    config_sha256: String,
}

impl<'a> Header<'a> {
    fn new(cmd: &'a Command, p: &AbelianPresentation) -> Outcome<Self> {
        let config = serde_json::to_string(cmd).map_err(|e| Failure::Other(e.to_string()))?;
        let presentation = p.to_text();
        let mut h = Sha256::new();
        h.update(config.as_bytes());
        h.update(b"\n");
        h.update(presentation.as_bytes());
        Ok(Header {
            tool: "dehnlab",
            version: env!("CARGO_PKG_VERSION"),
            config: cmd,
            presentation,
            config_sha256: hex::encode(h.finalize()),
        })
    }

    fn comment_block(&self) -> Outcome<String> {
        let config =
            serde_json::to_string(self.config).map_err(|e| Failure::Other(e.to_string()))?;
        let mut s = format!("# {} {}\n# config: {config}\n", self.tool, self.version);
        for line in self.presentation.lines() {
            s.push_str(&format!("# presentation: {line}\n"));
        }
        s.push_str(&format!("# config-sha256: {}\n", self.config_sha256));
        Ok(s)
    }
}

/// Buffers one artifact and writes it to a file or standard output.
pub struct Sink {
    path: Option<PathBuf>,
    buf: String,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        Sink {
            path,
            buf: String::new(),
        }
    }

    pub fn csv(
        &mut self,
        cmd: &Command,
        p: &AbelianPresentation,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Outcome<()> {
        self.buf.push_str(&Header::new(cmd, p)?.comment_block()?);
        self.buf.push_str(&columns.join(","));
        self.buf.push('\n');
        for r in rows {
            self.buf.push_str(&r.join(","));
            self.buf.push('\n');
        }
        Ok(())
    }

    pub fn json<T: Serialize>(
        &mut self,
        cmd: &Command,
        p: &AbelianPresentation,
        data: &T,
    ) -> Outcome<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: Header<'a>,
            data: &'a T,
        }
        let doc = Doc {
            header: Header::new(cmd, p)?,
            data,
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Other(e.to_string()))?;
        self.buf.push_str(&text);
        self.buf.push('\n');
        Ok(())
    }

    pub fn finish(self) -> Outcome<()> {
        match &self.path {
            Some(p) => std::fs::write(p, self.buf.as_bytes())
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.buf.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}
