//! Messages exchanged over controller <-> switch channels.

use crate::ethernet::Frame;
use crate::switch::FlowSpec;

/// The OpenFlow subset the simulator speaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpenFlowMsg {
    Hello,
    FeaturesRequest,
    FeaturesReply {
        ports: Vec<u16>,
    },
    /// Carries the whole frame; there are no buffer ids.
    PacketIn {
        frame: Frame,
        in_port: u16,
    },
    PacketOut {
        frame: Frame,
        in_port: Option<u16>,
        out_port: u16,
    },
    FlowMod(FlowSpec),
}

impl OpenFlowMsg {
    pub fn kind(&self) -> &'static str {
        match self {
            OpenFlowMsg::Hello => "of-hello",
            OpenFlowMsg::FeaturesRequest => "of-features-request",
            OpenFlowMsg::FeaturesReply { .. } => "of-features-reply",
            OpenFlowMsg::PacketIn { .. } => "of-packet-in",
            OpenFlowMsg::PacketOut { .. } => "of-packet-out",
            OpenFlowMsg::FlowMod(_) => "of-flow-mod",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetconfOp {
    GetConfig { datastore: String },
    EditConfig { datastore: String, payload: String },
}

impl NetconfOp {
    pub fn name(&self) -> &'static str {
        match self {
            NetconfOp::GetConfig { .. } => "get-config",
            NetconfOp::EditConfig { .. } => "edit-config",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RpcResult {
    Ok,
    Data(String),
    Error(String),
}

impl RpcResult {
    pub fn is_ok(&self) -> bool {
        !matches!(self, RpcResult::Error(_))
    }
}

/// The NetConf subset: session hello, `get-config` and `edit-config`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetconfMsg {
    Hello,
    Rpc { id: u64, op: NetconfOp },
    RpcReply { id: u64, result: RpcResult },
}

impl NetconfMsg {
    pub fn kind(&self) -> &'static str {
        match self {
            NetconfMsg::Hello => "nc-hello",
            NetconfMsg::Rpc { op, .. } => match op {
                NetconfOp::GetConfig { .. } => "nc-get-config",
                NetconfOp::EditConfig { .. } => "nc-edit-config",
            },
            NetconfMsg::RpcReply { .. } => "nc-rpc-reply",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlMsg {
    OpenFlow(OpenFlowMsg),
    Netconf(NetconfMsg),
}

impl ControlMsg {
    pub fn kind(&self) -> &'static str {
        match self {
            ControlMsg::OpenFlow(m) => m.kind(),
            ControlMsg::Netconf(m) => m.kind(),
        }
    }

    /// Short, comma-free description for the control log.
    pub fn detail(&self) -> String {
        match self {
            ControlMsg::OpenFlow(OpenFlowMsg::FeaturesReply { ports }) => {
                let ports: Vec<String> = ports.iter().map(u16::to_string).collect();
                format!("ports={}", ports.join(" "))
            }
            ControlMsg::OpenFlow(OpenFlowMsg::PacketIn { frame, in_port }) => {
                format!("in_port={in_port} {}", frame_summary(frame))
            }
            ControlMsg::OpenFlow(OpenFlowMsg::PacketOut {
                frame, out_port, ..
            }) => format!("out_port={out_port} {}", frame_summary(frame)),
            ControlMsg::OpenFlow(OpenFlowMsg::FlowMod(spec)) => spec.to_string(),
            ControlMsg::Netconf(NetconfMsg::Rpc { id, op }) => match op {
                NetconfOp::GetConfig { datastore } => format!("id={id} datastore={datastore}"),
                NetconfOp::EditConfig { datastore, payload } => {
                    let ports: Vec<&str> = payload
                        .lines()
                        .filter_map(|l| l.split_once('=').map(|(p, _)| p.trim()))
                        .collect();
                    format!("id={id} datastore={datastore} ports={}", ports.join(" "))
                }
            },
            ControlMsg::Netconf(NetconfMsg::RpcReply { id, .. }) => format!("id={id}"),
            _ => String::new(),
        }
    }

    /// `ok` / `error:<reason>` for RPC replies, `-` for everything else.
    pub fn outcome(&self) -> String {
        match self {
            ControlMsg::Netconf(NetconfMsg::RpcReply { result, .. }) => match result {
                RpcResult::Ok | RpcResult::Data(_) => "ok".to_string(),
                RpcResult::Error(reason) => format!("error:{}", reason.replace(',', ";")),
            },
            _ => "-".to_string(),
        }
    }
}

fn frame_summary(frame: &Frame) -> String {
    match frame.srp() {
        Some(msg) => format!("srp={} stream={}", msg.kind(), msg.stream()),
        None => format!("flow={} seq={}", frame.flow_id, frame.seq),
    }
}
