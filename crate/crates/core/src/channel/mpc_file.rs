//! Text format for externally traced multipath components.
//!
//! ```text
//! # comment
//! link pbs sbs
//! gain_mag phase_rad delay_s dod_rad doa_rad
//! link pbs ue0
//! gain_mag phase_rad delay_s dod_rad
//! ```
//!
//! Base-station to base-station links carry a DoA column, UE links do not.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{MultipathComponent, Scenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Pbs,
    Sbs,
    Ue(usize),
}

impl Node {
    fn is_bs(&self) -> bool {
        !matches!(self, Node::Ue(_))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Pbs => f.write_str("pbs"),
            Node::Sbs => f.write_str("sbs"),
            Node::Ue(u) => write!(f, "ue{u}"),
        }
    }
}

impl FromStr for Node {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pbs" => Ok(Node::Pbs),
            "sbs" => Ok(Node::Sbs),
            _ => s
                .strip_prefix("ue")
                .and_then(|idx| idx.parse().ok())
                .map(Node::Ue)
                .ok_or_else(|| format!("unknown node `{s}` (expected pbs, sbs or ue<index>)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub tx: Node,
    pub rx: Node,
    pub mpcs: Vec<MultipathComponent>,
}

/// Parses an MPC file into its links, in file order.
pub fn import_mpcs(source: &str) -> Result<Vec<Link>> {
    let mut links: Vec<Link> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "link" {
            if fields.len() != 3 {
                return Err(Error::parse(line_no, "expected `link <tx> <rx>`"));
            }
            let tx: Node = fields[1].parse().map_err(|e| Error::parse(line_no, e))?;
            let rx: Node = fields[2].parse().map_err(|e| Error::parse(line_no, e))?;
            if !tx.is_bs() {
                return Err(Error::parse(
                    line_no,
                    format!("transmitter `{tx}` must be a base station"),
                ));
            }
            if tx == rx {
                return Err(Error::parse(line_no, "link endpoints must differ"));
            }
            if links.iter().any(|l| l.tx == tx && l.rx == rx) {
                return Err(Error::parse(line_no, format!("duplicate link {tx} -> {rx}")));
            }
            links.push(Link {
                tx,
                rx,
                mpcs: Vec::new(),
            });
            continue;
        }

        let link = links
            .last_mut()
            .ok_or_else(|| Error::parse(line_no, "MPC row before any `link` header"))?;
        let want = if link.rx.is_bs() { 5 } else { 4 };
        if fields.len() != want {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected {want} fields for a {} -> {} MPC, found {}",
                    link.tx,
                    link.rx,
                    fields.len()
                ),
            ));
        }
        let mut values = [0.0; 5];
        for (slot, text) in values.iter_mut().zip(&fields) {
            *slot = text
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("`{text}` is not a number")))?;
            if !slot.is_finite() {
                return Err(Error::parse(line_no, format!("`{text}` is not finite")));
            }
        }
        let [gain_mag, phase, delay, dod, doa] = values;
        if gain_mag < 0.0 {
            return Err(Error::parse(line_no, format!("negative gain magnitude {gain_mag}")));
        }
        if delay < 0.0 {
            return Err(Error::parse(line_no, format!("negative delay {delay}")));
        }
        link.mpcs.push(MultipathComponent {
            gain_mag,
            phase,
            delay,
            dod,
            doa: (want == 5).then_some(doa),
        });
    }
    Ok(links)
}

/// Writes a scenario's links in canonical order. Numbers use Rust's shortest
/// round-trip decimal form, so a re-import is lossless.
pub fn export_mpcs(scenario: &Scenario) -> String {
    let mut out = String::from("# gain_mag phase_rad delay_s dod_rad [doa_rad]\n");
    let mut section = |tx: Node, rx: Node, mpcs: &[MultipathComponent]| {
        let _ = writeln!(out, "link {tx} {rx}");
        for m in mpcs {
            let _ = write!(out, "{} {} {} {}", m.gain_mag, m.phase, m.delay, m.dod);
            if let Some(doa) = m.doa {
                let _ = write!(out, " {doa}");
            }
            out.push('\n');
        }
    };
    section(Node::Pbs, Node::Sbs, &scenario.pbs_to_sbs);
    for (u, mpcs) in scenario.pbs_to_ue.iter().enumerate() {
        section(Node::Pbs, Node::Ue(u), mpcs);
    }
    for (u, mpcs) in scenario.sbs_to_ue.iter().enumerate() {
        section(Node::Sbs, Node::Ue(u), mpcs);
    }
    out
}

/// The links a [`Scenario`] needs, assembled from imported [`Link`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkSet {
    pub pbs_to_sbs: Vec<MultipathComponent>,
    pub pbs_to_ue: Vec<Vec<MultipathComponent>>,
    pub sbs_to_ue: Vec<Vec<MultipathComponent>>,
}

impl LinkSet {
    /// UE indices must be contiguous from zero; a missing link is empty.
    pub fn from_links(links: Vec<Link>) -> Result<Self> {
        let num_ues = links
            .iter()
            .filter_map(|l| match l.rx {
                Node::Ue(u) => Some(u + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut set = LinkSet {
            pbs_to_sbs: Vec::new(),
            pbs_to_ue: vec![Vec::new(); num_ues],
            sbs_to_ue: vec![Vec::new(); num_ues],
        };
        let mut seen = vec![false; num_ues];
        for link in links {
            match (link.tx, link.rx) {
                (Node::Pbs, Node::Sbs) => set.pbs_to_sbs = link.mpcs,
                (Node::Pbs, Node::Ue(u)) => {
                    seen[u] = true;
                    set.pbs_to_ue[u] = link.mpcs;
                }
                (Node::Sbs, Node::Ue(u)) => {
                    seen[u] = true;
                    set.sbs_to_ue[u] = link.mpcs;
                }
                (tx, rx) => {
                    return Err(Error::config(format!("unsupported link {tx} -> {rx}")));
                }
            }
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::config(format!(
                "UE indices must be contiguous: ue{u} has no links"
            )));
        }
        Ok(set)
    }
}
