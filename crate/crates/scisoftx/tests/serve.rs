use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};
use std::time::Duration;

use scisoftx::formats::import_xml;
use scisoftx::synth::corpus::{generate_document, write_document};

fn request(port: u16, method: &str, path: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(20))).unwrap();
    write!(stream, "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Length: 0\r\nConnection: close\r\n\r\n").unwrap();
    let mut text = String::new();
    stream.read_to_string(&mut text).unwrap();
    let status = text.split_whitespace().nth(1).unwrap().parse().unwrap();
    (status, text)
}

#[cfg(unix)]
#[test]
fn serve_uses_the_port_variable_and_flushes_on_shutdown() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_document(d, &generate_document(0, 13)).unwrap();
    std::fs::write(
        d.join("project.json"),
        r#"{"pdf_path": "paper.pdf", "repo_path": "repo", "links_path": "links.xml"}"#,
    )
    .unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_scisoftx"))
        .args(["--config", "project.json", "serve"])
        .env("SCISOFTX_PORT", port.to_string())
        .current_dir(d)
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    assert!(line.contains(&format!(":{port}")), "{line}");

    assert_eq!(request(port, "GET", "/api/links").0, 200);
    assert_eq!(request(port, "POST", "/api/links/auto").0, 200);
    assert!(!d.join("links.xml").exists());

    let killed = Command::new("kill").args(["-TERM", &child.id().to_string()]).status().unwrap();
    assert!(killed.success());
    let status = child.wait().unwrap();
    assert!(status.success(), "{status:?}");
    let saved = import_xml(&std::fs::read(d.join("links.xml")).unwrap()).unwrap();
    assert!(!saved.is_empty());
}
