//! Download of a user-supplied snapshot URL to a local file. No parsing.

use std::fs;
use std::io;
use std::path::Path;

use crate::experiment::ExperimentError;

/// Streams `url` to `destination` and returns the number of bytes written.
///
/// `file://` URLs are copied locally; `http://` and `https://` URLs are
/// fetched. An existing destination is left alone unless `overwrite` is
/// set. Transport and HTTP status failures are returned verbatim.
pub fn fetch_snapshot(url: &str, destination: &Path, overwrite: bool) -> Result<u64, ExperimentError> {
    if destination.exists() && !overwrite {
        return Err(ExperimentError::Fetch(format!(
            "{} already exists (pass overwrite to replace it)",
            destination.display()
        )));
    }
    let partial = destination.with_extension("part");
    let written = if let Some(path) = url.strip_prefix("file://") {
        fs::copy(path, &partial).map_err(|e| ExperimentError::Fetch(format!("{url}: {e}")))?
    } else if url.starts_with("http://") || url.starts_with("https://") {
        let response = ureq::get(url)
            .call()
            .map_err(|e| ExperimentError::Fetch(format!("{url}: {e}")))?;
        let mut reader = response.into_body().into_reader();
        let mut file = fs::File::create(&partial)?;
        io::copy(&mut reader, &mut file).map_err(|e| ExperimentError::Fetch(format!("{url}: {e}")))?
    } else {
        return Err(ExperimentError::Fetch(format!("unsupported URL scheme: {url}")));
    };
    fs::rename(&partial, destination)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Write};
    use std::net::TcpListener;

    /// Serves exactly one canned HTTP response on a loopback port.
    fn serve_once(status: &'static str, body: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 0 && line != "\r\n" {
                line.clear();
            }
            write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        });
        format!("http://{addr}/snapshot.txt")
    }

    #[test]
    fn file_url_copy_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("src.txt");
        fs::write(&src, b"1 2\n2 3\n").unwrap();
        let dst = dir.path().join("dst.txt");
        let n = fetch_snapshot(&format!("file://{}", src.display()), &dst, false).unwrap();
        assert_eq!(n, 8);
        assert_eq!(fs::read(&dst).unwrap(), b"1 2\n2 3\n");
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("src.txt");
        fs::write(&src, b"new").unwrap();
        let dst = dir.path().join("dst.txt");
        fs::write(&dst, b"old").unwrap();
        let url = format!("file://{}", src.display());
        assert!(fetch_snapshot(&url, &dst, false).is_err());
        assert_eq!(fs::read(&dst).unwrap(), b"old");
        fetch_snapshot(&url, &dst, true).unwrap();
        assert_eq!(fs::read(&dst).unwrap(), b"new");
    }

    #[test]
    fn http_success() {
        let url = serve_once("200 OK", "7 8\n");
        let dir = tempfile::tempdir().unwrap();
        let dst = dir.path().join("snap.txt");
        assert_eq!(fetch_snapshot(&url, &dst, false).unwrap(), 4);
        assert_eq!(fs::read_to_string(&dst).unwrap(), "7 8\n");
    }

    #[test]
    fn http_404_carries_status() {
        let url = serve_once("404 Not Found", "missing");
        let dir = tempfile::tempdir().unwrap();
        let dst = dir.path().join("snap.txt");
        let err = fetch_snapshot(&url, &dst, false).unwrap_err().to_string();
        assert!(err.contains("404"), "{err}");
        assert!(!dst.exists());
    }

    #[test]
    fn unknown_scheme() {
        let dir = tempfile::tempdir().unwrap();
        assert!(fetch_snapshot("ftp://x/y", &dir.path().join("o"), false).is_err());
    }
}
