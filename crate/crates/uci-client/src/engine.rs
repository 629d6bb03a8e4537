//! One live engine: handshake, budgeted search queries, terminal
//! short-circuit evaluation, shutdown.

use std::time::{Duration, Instant};

use game_core::chess::{ChessMove, ChessState, Color, START_FEN};
use game_core::{GameState, Status, Trajectory};

use crate::io::{ChildIo, EngineIo, RecordingIo, RecvResult, StubIo, WireLog};
use crate::{Budget, EngineConfig, EngineError, Executable, ResetPolicy, Score};

const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(15);
const READY_TIMEOUT: Duration = Duration::from_secs(15);
const SHUTDOWN_GRACE: Duration = Duration::from_secs(2);
/// Extra wall time on top of a movetime budget before a search counts as
/// hung; depth/node budgets have no intrinsic wall bound, so they get the
/// whole window.
const BUDGET_GRACE: Duration = Duration::from_secs(10);
const FIXED_BUDGET_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best_move: ChessMove,
    /// Perspective: side to move of the searched position.
    pub score: Score<Color>,
    pub depth: u32,
    pub nodes: u64,
    pub pv: Vec<ChessMove>,
}

pub struct EngineHandle {
    io: Box<dyn EngineIo>,
    config: EngineConfig,
    name: String,
    declared_options: Vec<String>,
    alive: bool,
}

impl EngineHandle {
    /// Spawn and handshake: `uci` → `uciok`, apply options, `isready` →
    /// `readyok`.
    pub fn launch(config: EngineConfig) -> Result<EngineHandle, EngineError> {
        let io = open_io(&config.executable)?;
        Self::launch_with_io(config, io)
    }

    /// Like [`launch`](Self::launch) but with the wire mirrored into a log,
    /// for conformance tests.
    pub fn launch_recorded(config: EngineConfig) -> Result<(EngineHandle, WireLog), EngineError> {
        let log = WireLog::new();
        let io = Box::new(RecordingIo::new(open_io(&config.executable)?, log.clone()));
        Ok((Self::launch_with_io(config, io)?, log))
    }

    pub fn launch_with_io(
        config: EngineConfig,
        io: Box<dyn EngineIo>,
    ) -> Result<EngineHandle, EngineError> {
        let mut handle = EngineHandle {
            io,
            config,
            name: String::new(),
            declared_options: Vec::new(),
            alive: true,
        };
        handle.handshake()?;
        Ok(handle)
    }

    /// Engine identification from the `uci` handshake.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn handshake(&mut self) -> Result<(), EngineError> {
        self.io.send_line("uci")?;
        let deadline = Instant::now() + HANDSHAKE_TIMEOUT;
        loop {
            match self.recv_until(deadline, "uciok")? {
                HandshakeLine::Done => break,
                HandshakeLine::Other(line) => {
                    if let Some(rest) = line.strip_prefix("id name ") {
                        self.name = rest.to_string();
                    } else if let Some(rest) = line.strip_prefix("option name ") {
                        // `option name <N> type ...`
                        let name = rest.split(" type").next().unwrap_or(rest).trim();
                        self.declared_options.push(name.to_string());
                    }
                }
            }
        }

        let options = self.config.options.clone();
        for (name, value) in &options {
            if !self.declared_options.iter().any(|o| o == name) {
                return Err(EngineError::UnsupportedOption(name.clone()));
            }
            self.io
                .send_line(&format!("setoption name {name} value {value}"))?;
        }
        self.await_ready()?;
        Ok(())
    }

    fn await_ready(&mut self) -> Result<(), EngineError> {
        self.io.send_line("isready")?;
        let deadline = Instant::now() + READY_TIMEOUT;
        loop {
            if let HandshakeLine::Done = self.recv_until(deadline, "readyok")? {
                return Ok(());
            }
        }
    }

    fn recv_until(
        &mut self,
        deadline: Instant,
        terminator: &str,
    ) -> Result<HandshakeLine, EngineError> {
        let now = Instant::now();
        if now >= deadline {
            return Err(EngineError::HandshakeTimeout(terminator.to_string()));
        }
        match self.io.recv_line(deadline - now) {
            RecvResult::Line(line) if line.trim() == terminator => Ok(HandshakeLine::Done),
            RecvResult::Line(line) => Ok(HandshakeLine::Other(line)),
            RecvResult::Eof => {
                self.alive = false;
                Err(EngineError::EngineCrashed("eof during handshake".into()))
            }
            RecvResult::Timeout => Err(EngineError::HandshakeTimeout(terminator.to_string())),
        }
    }

    /// Search the final position of `trajectory`, communicated to the
    /// engine as start-plus-move-list so its repetition bookkeeping sees
    /// the same history we do. The final state must be ongoing.
    pub fn search(
        &mut self,
        trajectory: &Trajectory<ChessState>,
        budget_override: Option<Budget>,
    ) -> Result<SearchResult, EngineError> {
        let state = trajectory.current();
        assert!(
            !state.status().is_terminal(),
            "search requires an ongoing position"
        );

        match self.config.reset_policy {
            ResetPolicy::NewgamePerQuery => {
                self.io.send_line("ucinewgame")?;
                self.await_ready()?;
            }
            ResetPolicy::RestartPerQuery => self.relaunch()?,
            ResetPolicy::Persistent => {}
        }

        self.io.send_line(&position_command(trajectory))?;
        let budget = budget_override.unwrap_or(self.config.budget);
        self.io.send_line(&budget.go_command())?;

        let deadline = Instant::now()
            + match budget {
                Budget::Movetime(ms) => Duration::from_millis(ms) + BUDGET_GRACE,
                Budget::Depth(_) | Budget::Nodes(_) => FIXED_BUDGET_TIMEOUT,
            };
        let mut last_info = InfoLine::default();
        loop {
            let now = Instant::now();
            if now >= deadline {
                return Err(EngineError::Timeout(deadline - now));
            }
            match self.io.recv_line(deadline - now) {
                RecvResult::Line(line) => {
                    let line = line.trim().to_string();
                    if let Some(rest) = line.strip_prefix("bestmove") {
                        return self.finish_search(rest.trim(), &last_info, state);
                    }
                    if line.starts_with("info") {
                        last_info.absorb(&line);
                    }
                }
                RecvResult::Eof => {
                    self.alive = false;
                    return Err(EngineError::EngineCrashed("eof during search".into()));
                }
                RecvResult::Timeout => {
                    return Err(EngineError::Timeout(
                        deadline.saturating_duration_since(Instant::now()),
                    ))
                }
            }
        }
    }

    fn finish_search(
        &mut self,
        bestmove_rest: &str,
        info: &InfoLine,
        state: &ChessState,
    ) -> Result<SearchResult, EngineError> {
        let token = bestmove_rest
            .split_whitespace()
            .next()
            .ok_or_else(|| EngineError::ProtocolViolation("empty bestmove".into()))?;
        let mv: ChessMove = token.parse().map_err(|_| {
            EngineError::ProtocolViolation(format!("unparseable bestmove {token:?}"))
        })?;
        if !state.legal_moves().contains(&mv) {
            return Err(EngineError::IllegalBestMove {
                notation: token.to_string(),
                fen: state.to_fen(),
            });
        }
        let (kind, value) = info.score.clone().ok_or_else(|| {
            EngineError::ProtocolViolation("no score reported before bestmove".into())
        })?;
        let score = Score::from_uci(&kind, value, state.side_to_move()).ok_or_else(|| {
            EngineError::ProtocolViolation(format!("bad score kind {kind:?}"))
        })?;
        Ok(SearchResult {
            best_move: mv,
            score,
            depth: info.depth,
            nodes: info.nodes,
            pv: info.pv.clone(),
        })
    }

    /// Evaluation of the trajectory's final position: terminal positions
    /// get the canonical terminal score without consulting the engine
    /// (engines cannot search them); anything else is a search.
    pub fn evaluate_position(
        &mut self,
        trajectory: &Trajectory<ChessState>,
    ) -> Result<Score<Color>, EngineError> {
        let state = trajectory.current();
        match state.status() {
            Status::Win(winner) => Ok(Score::terminal_win(winner)),
            Status::Draw(_) => Ok(Score::draw(state.side_to_move())),
            Status::Ongoing => Ok(self.search(trajectory, None)?.score),
        }
    }

    /// `quit`, then reap within a grace period, force-killing if needed.
    /// Best-effort and idempotent.
    pub fn shutdown(&mut self) -> Option<i32> {
        if !self.alive {
            return None;
        }
        self.alive = false;
        let _ = self.io.send_line("quit");
        self.io.terminate(SHUTDOWN_GRACE)
    }

    fn relaunch(&mut self) -> Result<(), EngineError> {
        let _ = self.io.send_line("quit");
        self.io.terminate(SHUTDOWN_GRACE);
        self.io = open_io(&self.config.executable)?;
        self.name.clear();
        self.declared_options.clear();
        self.alive = true;
        self.handshake()
    }
}

impl Drop for EngineHandle {
    fn drop(&mut self) {
        self.shutdown();
    }
}

enum HandshakeLine {
    Done,
    Other(String),
}

fn open_io(executable: &Executable) -> Result<Box<dyn EngineIo>, EngineError> {
    match executable {
        Executable::Path(path) => {
            let io = ChildIo::spawn(path).map_err(|source| EngineError::SpawnFailed {
                path: path.display().to_string(),
                source,
            })?;
            Ok(Box::new(io))
        }
        Executable::BuiltinStub(params) => Ok(Box::new(StubIo::spawn(*params))),
    }
}

fn position_command(trajectory: &Trajectory<ChessState>) -> String {
    let start_fen = trajectory.start().to_fen();
    let mut cmd = if start_fen == START_FEN {
        "position startpos".to_string()
    } else {
        format!("position fen {start_fen}")
    };
    if !trajectory.moves().is_empty() {
        cmd.push_str(" moves");
        for mv in trajectory.moves() {
            cmd.push(' ');
            cmd.push_str(&mv.to_string());
        }
    }
    cmd
}

#[derive(Default)]
struct InfoLine {
    score: Option<(String, i64)>,
    depth: u32,
    nodes: u64,
    pv: Vec<ChessMove>,
}

impl InfoLine {
    /// Keep the latest values seen across `info` lines; `info string`
    /// chatter is ignored.
    fn absorb(&mut self, line: &str) {
        let mut tokens = line.split_whitespace().skip(1).peekable();
        while let Some(tok) = tokens.next() {
            match tok {
                "string" => return,
                "depth" => {
                    if let Some(d) = tokens.peek().and_then(|v| v.parse().ok()) {
                        self.depth = d;
                        tokens.next();
                    }
                }
                "nodes" => {
                    if let Some(n) = tokens.peek().and_then(|v| v.parse().ok()) {
                        self.nodes = n;
                        tokens.next();
                    }
                }
                "score" => {
                    let kind = tokens.next().unwrap_or_default().to_string();
                    if let Some(v) = tokens.peek().and_then(|v| v.parse().ok()) {
                        self.score = Some((kind, v));
                        tokens.next();
                    }
                }
                "pv" => {
                    self.pv = tokens.by_ref().map_while(|t| t.parse().ok()).collect();
                    return;
                }
                _ => {}
            }
        }
    }
}
