use std::time::Duration;

use sha2::{Digest, Sha256};

/// Provenance of one run. Everything except `wall_time` is a function of the
/// configuration, so equal configurations give equal digests.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub version: &'static str,
    pub wall_time: Duration,
    pub digest: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Vec<(String, String)>, output: &[u8], wall_time: Duration) -> Self {
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION"),
            wall_time,
            digest: format!("sha256:{:x}", Sha256::digest(output)),
        }
    }

    /// Key-value lines, one per entry.
    pub fn to_kv(&self) -> String {
        let mut out = format!("manifest.command = {}\nmanifest.version = {}\n", self.command, self.version);
        for (k, v) in &self.config {
            out.push_str(&format!("manifest.config.{k} = {v}\n"));
        }
        out.push_str(&format!("manifest.wall_seconds = {:.3}\n", self.wall_time.as_secs_f64()));
        out.push_str(&format!("manifest.output_digest = {}\n", self.digest));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_only_on_output() {
        let a = RunManifest::new("eval", vec![], b"abc", Duration::from_millis(5));
        let b = RunManifest::new("eval", vec![], b"abc", Duration::from_millis(9));
        assert_eq!(a.digest, b.digest);
        assert_eq!(
            a.digest,
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert!(a.to_kv().contains("manifest.command = eval\n"));
    }
}
