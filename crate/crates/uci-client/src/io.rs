//! Line transports: a subprocess with a pump thread, the in-process stub
//! over channels, and a recording wrapper for wire-conformance tests.

use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use stub_engine::{spawn_in_process, InProcessStub, StubParams};

pub enum RecvResult {
    Line(String),
    /// The engine closed its side (process exit / thread end).
    Eof,
    Timeout,
}

/// A line-oriented duplex connection to an engine.
pub trait EngineIo: Send {
    fn send_line(&mut self, line: &str) -> io::Result<()>;
    fn recv_line(&mut self, timeout: Duration) -> RecvResult;
    /// Reap the engine, forcefully if needed. Returns the exit code when
    /// there is a process and it exited normally.
    fn terminate(&mut self, grace: Duration) -> Option<i32>;
}

pub struct ChildIo {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
}

impl ChildIo {
    pub fn spawn(path: &Path) -> io::Result<ChildIo> {
        let mut child = Command::new(path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, rx) = channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });
        Ok(ChildIo {
            child,
            stdin,
            lines: rx,
        })
    }
}

impl EngineIo for ChildIo {
    fn send_line(&mut self, line: &str) -> io::Result<()> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| io::Error::new(io::ErrorKind::BrokenPipe, "stdin closed"))?;
        writeln!(stdin, "{line}")?;
        stdin.flush()
    }

    fn recv_line(&mut self, timeout: Duration) -> RecvResult {
        match self.lines.recv_timeout(timeout) {
            Ok(line) => RecvResult::Line(line),
            Err(RecvTimeoutError::Timeout) => RecvResult::Timeout,
            Err(RecvTimeoutError::Disconnected) => RecvResult::Eof,
        }
    }

    fn terminate(&mut self, grace: Duration) -> Option<i32> {
        // Closing stdin is the polite nudge after `quit`.
        self.stdin.take();
        let deadline = std::time::Instant::now() + grace;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return status.code(),
                Ok(None) => {
                    if std::time::Instant::now() >= deadline {
                        let _ = self.child.kill();
                        return self.child.wait().ok().and_then(|s| s.code());
                    }
                    thread::sleep(Duration::from_millis(20));
                }
                Err(_) => return None,
            }
        }
    }
}

impl Drop for ChildIo {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct StubIo {
    stub: InProcessStub,
}

impl StubIo {
    pub fn spawn(params: StubParams) -> StubIo {
        StubIo {
            stub: spawn_in_process(params),
        }
    }
}

impl EngineIo for StubIo {
    fn send_line(&mut self, line: &str) -> io::Result<()> {
        if self.stub.send(line) {
            Ok(())
        } else {
            Err(io::Error::new(
                io::ErrorKind::BrokenPipe,
                "stub thread exited",
            ))
        }
    }

    fn recv_line(&mut self, timeout: Duration) -> RecvResult {
        match self.stub.recv_timeout(timeout) {
            Ok(line) => RecvResult::Line(line),
            Err(RecvTimeoutError::Timeout) => RecvResult::Timeout,
            Err(RecvTimeoutError::Disconnected) => RecvResult::Eof,
        }
    }

    fn terminate(&mut self, _grace: Duration) -> Option<i32> {
        let _ = self.stub.send("quit");
        Some(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireDirection {
    Sent,
    Received,
}

#[derive(Debug, Clone)]
pub struct WireEvent {
    pub direction: WireDirection,
    pub line: String,
}

/// Shared capture of everything that crossed the wire.
#[derive(Debug, Clone, Default)]
pub struct WireLog {
    events: Arc<Mutex<Vec<WireEvent>>>,
}

impl WireLog {
    pub fn new() -> WireLog {
        WireLog::default()
    }

    pub fn events(&self) -> Vec<WireEvent> {
        self.events.lock().unwrap().clone()
    }

    pub fn sent_lines(&self) -> Vec<String> {
        self.events()
            .into_iter()
            .filter(|e| e.direction == WireDirection::Sent)
            .map(|e| e.line)
            .collect()
    }

    pub fn clear(&self) {
        self.events.lock().unwrap().clear();
    }

    fn push(&self, direction: WireDirection, line: &str) {
        self.events.lock().unwrap().push(WireEvent {
            direction,
            line: line.to_string(),
        });
    }
}

/// Wraps a transport, mirroring traffic into a [`WireLog`].
pub struct RecordingIo {
    inner: Box<dyn EngineIo>,
    log: WireLog,
}

impl RecordingIo {
    pub fn new(inner: Box<dyn EngineIo>, log: WireLog) -> RecordingIo {
        RecordingIo { inner, log }
    }
}

impl EngineIo for RecordingIo {
    fn send_line(&mut self, line: &str) -> io::Result<()> {
        self.log.push(WireDirection::Sent, line);
        self.inner.send_line(line)
    }

    fn recv_line(&mut self, timeout: Duration) -> RecvResult {
        let result = self.inner.recv_line(timeout);
        if let RecvResult::Line(line) = &result {
            self.log.push(WireDirection::Received, line);
        }
        result
    }

    fn terminate(&mut self, grace: Duration) -> Option<i32> {
        self.inner.terminate(grace)
    }
}
