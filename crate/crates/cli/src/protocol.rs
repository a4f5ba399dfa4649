//! Line-delimited JSON session protocol.
//!
//! Each inbound line is one message; each yields exactly one outbound line.
//! Malformed input is answered with an error message and the connection
//! stays open.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vinelock_core::kinematics::DEFAULT_SAMPLES_PER_MM;
use vinelock_core::{new_session, Command, DesignParams, Event, Polyline, Pose, SimError, Tension, VineState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Inbound {
    Command {
        seq: u64,
        cmd: Command,
    },
    /// Starts a fresh session; omitted fields fall back to the connection's
    /// configured design and pressure.
    Reset {
        #[serde(default)]
        seq: Option<u64>,
        #[serde(default)]
        design: Option<DesignParams>,
        #[serde(default)]
        pressure: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotView {
    pub centerline: Polyline,
    pub lock_boundary_index: usize,
    pub everted_len: f64,
    pub pressure: f64,
    pub tension: Tension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Outbound {
    State { seq: Option<u64>, snapshot: SnapshotView, events: Vec<Event> },
    Error { seq: Option<u64>, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub design: DesignParams,
    pub pressure: f64,
    pub disturbance: bool,
    pub samples_per_mm: f64,
    pub base: Pose,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            design: DesignParams::default(),
            pressure: 7.0,
            disturbance: false,
            samples_per_mm: DEFAULT_SAMPLES_PER_MM,
            base: Pose::origin(),
        }
    }
}

/// One simulator session bound to one connection.
pub struct Session {
    config: SessionConfig,
    state: VineState,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Self, SimError> {
        let state = new_session(config.design, config.pressure)?.with_disturbance(config.disturbance);
        Ok(Self { config, state })
    }

    pub fn state(&self) -> &VineState {
        &self.state
    }

    fn view(&self, seq: Option<u64>, events: Vec<Event>) -> Outbound {
        match self.state.snapshot(self.config.base, self.config.samples_per_mm) {
            Ok(snap) => Outbound::State {
                seq,
                snapshot: SnapshotView {
                    centerline: snap.centerline,
                    lock_boundary_index: snap.lock_boundary_index,
                    everted_len: self.state.everted_len,
                    pressure: self.state.pressure,
                    tension: self.state.tension,
                },
                events,
            },
            Err(e) => Outbound::Error { seq, message: e.to_string() },
        }
    }

    pub fn handle(&mut self, msg: Inbound) -> Outbound {
        match msg {
            Inbound::Command { seq, cmd } => match self.state.apply(&cmd) {
                Ok(events) => self.view(Some(seq), events),
                Err(e) => Outbound::Error { seq: Some(seq), message: e.to_string() },
            },
            Inbound::Reset { seq, design, pressure } => {
                let design = design.unwrap_or(self.config.design);
                let pressure = pressure.unwrap_or(self.config.pressure);
                match new_session(design, pressure) {
                    Ok(state) => {
                        self.state = state.with_disturbance(self.config.disturbance);
                        self.view(seq, Vec::new())
                    }
                    Err(e) => Outbound::Error { seq, message: e.to_string() },
                }
            }
        }
    }

    /// Parses and answers one inbound line.
    pub fn handle_line(&mut self, line: &str) -> Outbound {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return Outbound::Error { seq: None, message: format!("malformed JSON: {e}") },
        };
        let seq = value.get("seq").and_then(Value::as_u64);
        match serde_json::from_value::<Inbound>(value) {
            Ok(msg) => self.handle(msg),
            Err(e) => Outbound::Error { seq, message: format!("invalid message: {e}") },
        }
    }
}

/// Answers every line of `reader` on `writer` until end of input. Blank
/// lines are skipped.
pub fn serve_stream(reader: impl BufRead, mut writer: impl Write, config: SessionConfig) -> io::Result<()> {
    let mut session = Session::new(config).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let mut reader = reader;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        let reply = match std::str::from_utf8(&buf) {
            Ok(text) => {
                let text = text.trim_end_matches(['\n', '\r']);
                if text.trim().is_empty() {
                    continue;
                }
                session.handle_line(text)
            }
            Err(_) => Outbound::Error { seq: None, message: "line is not valid UTF-8".into() },
        };
        serde_json::to_writer(&mut writer, &reply)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
}

fn serve_connection(stream: TcpStream, config: SessionConfig) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(reader, stream, config)
}

/// Accepts connections forever, one thread and one fresh session each.
pub fn serve_tcp(listener: TcpListener, config: SessionConfig) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        thread::spawn(move || {
            let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
            if let Err(e) = serve_connection(stream, config) {
                eprintln!("connection {peer}: {e}");
            }
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(SessionConfig::default()).unwrap()
    }

    #[test]
    fn grow_returns_state() {
        let mut s = session();
        match s.handle_line(r#"{"type":"command","seq":1,"cmd":{"Grow":{"delta_len":100}}}"#) {
            Outbound::State { seq, snapshot, events } => {
                assert_eq!(seq, Some(1));
                assert_eq!(snapshot.everted_len, 100.0);
                assert!(events.is_empty());
                assert!((snapshot.centerline.length() - 100.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json_gets_null_seq() {
        let reply = session().handle_line("{not json");
        assert!(matches!(reply, Outbound::Error { seq: None, .. }));
        let text = serde_json::to_string(&reply).unwrap();
        assert!(text.contains(r#""type":"error""#) && text.contains(r#""seq":null"#));
    }

    #[test]
    fn invalid_command_echoes_seq_and_keeps_state() {
        let mut s = session();
        s.handle_line(r#"{"type":"command","seq":1,"cmd":{"Grow":{"delta_len":50}}}"#);
        let reply = s.handle_line(r#"{"type":"command","seq":2,"cmd":{"Grow":{"delta_len":-1}}}"#);
        assert!(matches!(reply, Outbound::Error { seq: Some(2), .. }));
        let reply = s.handle_line(r#"{"type":"command","seq":3,"cmd":{"Fly":{}}}"#);
        assert!(matches!(reply, Outbound::Error { seq: Some(3), .. }));
        assert_eq!(s.state().everted_len, 50.0);
    }

    #[test]
    fn reset_restores_a_fresh_session() {
        let mut s = session();
        s.handle_line(r#"{"type":"command","seq":1,"cmd":{"Grow":{"delta_len":50}}}"#);
        match s.handle_line(r#"{"type":"reset","pressure":3.5}"#) {
            Outbound::State { seq: None, snapshot, .. } => {
                assert_eq!(snapshot.everted_len, 0.0);
                assert_eq!(snapshot.pressure, 3.5);
                assert_eq!(snapshot.centerline.len(), 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(s.handle_line(r#"{"type":"reset","pressure":-2}"#), Outbound::Error { .. }));
    }

    #[test]
    fn stream_answers_every_line() {
        let input = "{\"type\":\"command\",\"seq\":1,\"cmd\":{\"Grow\":{\"delta_len\":10}}}\n\ngarbage\n\
                     {\"type\":\"command\",\"seq\":2,\"cmd\":{\"SetPressure\":{\"gauge\":5}}}\r\n";
        let mut out = Vec::new();
        serve_stream(input.as_bytes(), &mut out, SessionConfig::default()).unwrap();
        let replies: Vec<Outbound> =
            String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(replies.len(), 3);
        assert!(matches!(replies[1], Outbound::Error { seq: None, .. }));
        assert!(matches!(replies[2], Outbound::State { seq: Some(2), .. }));
    }
}
