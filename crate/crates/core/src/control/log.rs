use std::io;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;

pub const DIR_TO_SWITCH: &str = "c2s";
pub const DIR_TO_CONTROLLER: &str = "s2c";
pub const DIR_INJECT: &str = "inject";

/// One line of the control log. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlLogEntry {
    pub time_ns: u64,
    pub direction: String,
    pub peer: String,
    pub kind: String,
    pub detail: String,
    pub outcome: String,
}

impl ControlLogEntry {
    pub fn time(&self) -> SimTime {
        SimTime(self.time_ns)
    }
}

pub fn write_control_log<W: io::Write>(entries: &[ControlLogEntry], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in entries {
        w.serialize(e)?;
    }
    if entries.is_empty() {
        w.write_record(["time_ns", "direction", "peer", "kind", "detail", "outcome"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_control_log<R: io::Read>(input: R) -> csv::Result<Vec<ControlLogEntry>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_round_trip() {
        let entries = vec![ControlLogEntry {
            time_ns: 2_000_000_000,
            direction: DIR_TO_SWITCH.into(),
            peer: "s1".into(),
            kind: "nc-edit-config".into(),
            detail: "id=3 datastore=running ports=1 2".into(),
            outcome: "-".into(),
        }];
        let mut buf = Vec::new();
        write_control_log(&entries, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time_ns,direction,peer,kind,detail,outcome\n"));
        assert_eq!(read_control_log(&buf[..]).unwrap(), entries);

        let mut empty = Vec::new();
        write_control_log(&[], &mut empty).unwrap();
        assert_eq!(
            String::from_utf8(empty).unwrap(),
            "time_ns,direction,peer,kind,detail,outcome\n"
        );
    }
}
