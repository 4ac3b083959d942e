use std::io;

use serde::{Deserialize, Serialize};

use crate::time::{SimDuration, SimTime};

/// One delivered data frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatencyRecord {
    pub flow_id: String,
    pub seq: u64,
    pub send_time: SimTime,
    pub recv_time: SimTime,
}

impl LatencyRecord {
    pub fn latency(&self) -> SimDuration {
        self.recv_time - self.send_time
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    flow_id: String,
    seq: u64,
    send_ns: u64,
    recv_ns: u64,
    latency_ns: u64,
}

pub const TRACE_HEADER: &str = "flow_id,seq,send_ns,recv_ns,latency_ns";

/// Write records in the order given (the simulator produces them in
/// receive order).
pub fn write_trace<W: io::Write>(records: &[LatencyRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(Row {
            flow_id: r.flow_id.clone(),
            seq: r.seq,
            send_ns: r.send_time.as_nanos(),
            recv_ns: r.recv_time.as_nanos(),
            latency_ns: r.latency().as_nanos(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Read a trace back. Rows whose latency column disagrees with
/// `recv_ns - send_ns` are rejected.
pub fn read_trace<R: io::Read>(input: R) -> Result<Vec<LatencyRecord>, String> {
    let mut out = Vec::new();
    for (i, row) in csv::Reader::from_reader(input)
        .deserialize::<Row>()
        .enumerate()
    {
        let row = row.map_err(|e| e.to_string())?;
        if row.recv_ns < row.send_ns || row.recv_ns - row.send_ns != row.latency_ns {
            return Err(format!("row {}: inconsistent latency", i + 1));
        }
        out.push(LatencyRecord {
            flow_id: row.flow_id,
            seq: row.seq,
            send_time: SimTime(row.send_ns),
            recv_time: SimTime(row.recv_ns),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let records = vec![
            LatencyRecord {
                flow_id: "host3".into(),
                seq: 0,
                send_time: SimTime(0),
                recv_time: SimTime(1_009_760),
            },
            LatencyRecord {
                flow_id: "host4".into(),
                seq: 0,
                send_time: SimTime(4_000_000_000),
                recv_time: SimTime(4_000_039_680),
            },
        ];
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "flow_id,seq,send_ns,recv_ns,latency_ns\nhost3,0,0,1009760,1009760\nhost4,0,4000000000,4000039680,39680\n"
        );
        assert_eq!(read_trace(&buf[..]).unwrap(), records);
        assert!(
            read_trace("flow_id,seq,send_ns,recv_ns,latency_ns\nf,0,5,9,3\n".as_bytes()).is_err()
        );
    }
}
