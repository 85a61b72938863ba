//! Remote-annealer wire protocol: a single POST-style exchange carrying the
//! QUBO interchange document, plus a bundled mock server for integration
//! testing. Energies from the wire are re-validated locally before use.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{energy, Qubo, Selection};
use crate::solvers::{solve_exact, solve_sa, AnnealParams, QuboSampler, Sample, SampleSet};

/// Request payload: the QUBO interchange document plus the read count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRequest {
    pub qubo: Qubo,
    pub num_reads: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireSample {
    pub bits: Vec<u8>,
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireTiming {
    pub access_seconds: f64,
}

/// Response payload: candidate samples and the reported access time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleResponse {
    pub samples: Vec<WireSample>,
    pub timing: WireTiming,
}

/// Submit a QUBO to a remote sampler endpoint and return the re-validated,
/// re-sorted sample set. The reported access time lands in `solver_time`.
pub fn submit_remote(
    q: &Qubo,
    reads: usize,
    endpoint: SocketAddr,
    timeout: Duration,
) -> Result<SampleSet> {
    let start = Instant::now();
    let request = SampleRequest {
        qubo: q.clone(),
        num_reads: reads,
    };
    let body = serde_json::to_vec(&request)?;

    let mut stream = TcpStream::connect_timeout(&endpoint, timeout)
        .map_err(|e| Error::Transport(format!("connect to {endpoint}: {e}")))?;
    stream
        .set_read_timeout(Some(timeout))
        .map_err(|e| Error::Transport(e.to_string()))?;
    stream
        .set_write_timeout(Some(timeout))
        .map_err(|e| Error::Transport(e.to_string()))?;

    let header = format!(
        "POST /sample HTTP/1.1\r\nHost: {endpoint}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream
        .write_all(header.as_bytes())
        .and_then(|_| stream.write_all(&body))
        .map_err(|e| Error::Transport(format!("send request: {e}")))?;

    let mut raw = Vec::new();
    stream
        .read_to_end(&mut raw)
        .map_err(|e| Error::Transport(format!("read response: {e}")))?;
    let response_body = http_body(&raw)?;
    let response: SampleResponse = serde_json::from_slice(response_body)?;
    if response.samples.is_empty() {
        return Err(Error::Transport("server returned no samples".into()));
    }

    // Re-validate every reported energy against local evaluation.
    let mut samples = Vec::with_capacity(response.samples.len());
    for (index, ws) in response.samples.into_iter().enumerate() {
        let selection = Selection::new(ws.bits);
        let local = energy(q, &selection)?;
        if (local - ws.energy).abs() > 1e-6 {
            return Err(Error::Integrity {
                index,
                reported: ws.energy,
                local,
            });
        }
        samples.push(Sample {
            selection,
            energy: local,
            occurrences: ws.occurrences,
        });
    }
    samples.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.selection.bits.cmp(&b.selection.bits))
    });

    Ok(SampleSet {
        samples,
        solver_name: "remote".to_string(),
        wall_time: start.elapsed().as_secs_f64(),
        solver_time: response.timing.access_seconds,
    })
}

/// Remote sampler behind the common sampler contract.
#[derive(Debug, Clone)]
pub struct RemoteSampler {
    pub endpoint: SocketAddr,
    pub reads: usize,
    pub timeout: Duration,
}

impl QuboSampler for RemoteSampler {
    fn name(&self) -> &str {
        "remote"
    }

    fn sample(&self, q: &Qubo) -> Result<SampleSet> {
        submit_remote(q, self.reads, self.endpoint, self.timeout)
    }
}

fn http_body(raw: &[u8]) -> Result<&[u8]> {
    let sep = raw
        .windows(4)
        .position(|w| w == b"\r\n\r\n")
        .ok_or_else(|| Error::Transport("malformed HTTP response".into()))?;
    Ok(&raw[sep + 4..])
}

/// What the mock server runs behind the protocol.
#[derive(Debug, Clone)]
pub enum MockBackend {
    Exact,
    Sa(AnnealParams),
}

/// Fault injection knobs for protocol integrity tests.
#[derive(Debug, Clone, Default)]
pub struct MockFaults {
    /// Add this to every reported energy (integrity violations when != 0).
    pub energy_offset: f64,
}

/// A bundled mock annealer server implementing the wire protocol on a local
/// TCP port, backed by the exhaustive or SA sampler.
pub struct MockServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl MockServer {
    pub fn spawn(backend: MockBackend, faults: MockFaults) -> Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let stop_flag = stop.clone();
        // Short accept timeout so the loop notices the stop flag promptly.
        listener.set_nonblocking(true)?;
        let handle = std::thread::spawn(move || {
            while !stop_flag.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let _ = handle_connection(stream, &backend, &faults);
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                        std::thread::sleep(Duration::from_millis(2));
                    }
                    Err(_) => break,
                }
            }
        });
        Ok(Self {
            addr,
            stop,
            handle: Some(handle),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(
    mut stream: TcpStream,
    backend: &MockBackend,
    faults: &MockFaults,
) -> Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let body = read_http_request(&mut stream)?;
    let request: SampleRequest = serde_json::from_slice(&body)?;

    let started = Instant::now();
    let set = match backend {
        MockBackend::Exact => solve_exact(&request.qubo)?,
        MockBackend::Sa(params) => {
            let mut p = params.clone();
            p.num_reads = request.num_reads.max(1);
            solve_sa(&request.qubo, &p)?
        }
    };
    let response = SampleResponse {
        samples: set
            .samples
            .iter()
            .map(|s| WireSample {
                bits: s.selection.bits.clone(),
                energy: s.energy + faults.energy_offset,
                occurrences: s.occurrences,
            })
            .collect(),
        timing: WireTiming {
            access_seconds: started.elapsed().as_secs_f64(),
        },
    };
    let body = serde_json::to_vec(&response)?;
    let header = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(header.as_bytes())?;
    stream.write_all(&body)?;
    Ok(())
}

fn read_http_request(stream: &mut TcpStream) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let header_end;
    loop {
        let k = stream.read(&mut chunk)?;
        if k == 0 {
            return Err(Error::Transport("client closed before headers".into()));
        }
        buf.extend_from_slice(&chunk[..k]);
        if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
            header_end = pos + 4;
            break;
        }
        if buf.len() > 1 << 20 {
            return Err(Error::Transport("oversized request headers".into()));
        }
    }
    let headers = String::from_utf8_lossy(&buf[..header_end]).to_lowercase();
    let content_length: usize = headers
        .lines()
        .find_map(|l| l.strip_prefix("content-length:"))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Transport("missing content-length".into()))?;
    let mut body = buf[header_end..].to_vec();
    while body.len() < content_length {
        let k = stream.read(&mut chunk)?;
        if k == 0 {
            return Err(Error::Transport("client closed mid-body".into()));
        }
        body.extend_from_slice(&chunk[..k]);
    }
    body.truncate(content_length);
    Ok(body)
}
