//! Node/element/port circuit description shared by synthesis and simulation.
//!
//! Node `0` is ground; nodes `1..=node_count` are named so emitted designs
//! stay readable in the JSON report.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GROUND: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    /// Value in Ω.
    Resistor,
    /// Value in H.
    Inductor,
    /// Value in F.
    Capacitor,
    /// Ideal admittance inverter, value in S.
    Inverter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub nodes: (usize, usize),
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Port {
    pub node: usize,
    pub z_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawNetlist {
    node_names: Vec<String>,
    elements: Vec<Element>,
    ports: [Port; 2],
}

/// A validated two-port linear circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetlist", into = "RawNetlist")]
pub struct Netlist {
    node_names: Vec<String>,
    elements: Vec<Element>,
    ports: [Port; 2],
}

impl From<Netlist> for RawNetlist {
    fn from(n: Netlist) -> Self {
        RawNetlist {
            node_names: n.node_names,
            elements: n.elements,
            ports: n.ports,
        }
    }
}

impl TryFrom<RawNetlist> for Netlist {
    type Error = Error;

    fn try_from(raw: RawNetlist) -> Result<Self> {
        Netlist::new(raw.node_names, raw.elements, raw.ports)
    }
}

impl Netlist {
    /// Builds a netlist, checking values, node references and port
    /// connectivity.
    pub fn new(node_names: Vec<String>, elements: Vec<Element>, ports: [Port; 2]) -> Result<Self> {
        let node_count = node_names.len();
        for (idx, e) in elements.iter().enumerate() {
            let (a, b) = e.nodes;
            if !(e.value.is_finite() && e.value > 0.0) {
                return Err(Error::Netlist(format!(
                    "element {idx} ({:?}) has non-positive value {}",
                    e.kind, e.value
                )));
            }
            if a > node_count || b > node_count {
                return Err(Error::Netlist(format!(
                    "element {idx} references node outside 0..={node_count}"
                )));
            }
            if a == b {
                return Err(Error::Netlist(format!(
                    "element {idx} connects node {a} to itself"
                )));
            }
            if e.kind == ElementKind::Inverter && (a == GROUND || b == GROUND) {
                return Err(Error::Netlist(format!(
                    "inverter {idx} must join two non-ground nodes"
                )));
            }
        }
        for p in &ports {
            if p.node == GROUND || p.node > node_count {
                return Err(Error::Netlist(format!(
                    "port node {} does not exist",
                    p.node
                )));
            }
            if !(p.z_ref.is_finite() && p.z_ref > 0.0) {
                return Err(Error::Netlist(format!(
                    "port reference impedance {} must be > 0",
                    p.z_ref
                )));
            }
        }
        if ports[0].node == ports[1].node {
            return Err(Error::Netlist("ports share a node".into()));
        }

        let net = Netlist {
            node_names,
            elements,
            ports,
        };
        if !net.component_of_ports()[net.ports[1].node] {
            return Err(Error::Netlist("ports are not connected".into()));
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    /// Id of the node with the given name.
    pub fn node(&self, name: &str) -> Option<usize> {
        self.node_names
            .iter()
            .position(|n| n == name)
            .map(|i| i + 1)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn ports(&self) -> &[Port; 2] {
        &self.ports
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    pub fn is_lossless(&self) -> bool {
        self.count(ElementKind::Resistor) == 0
    }

    /// Marks nodes reachable from port 1 through non-ground branches.
    /// Index 0 (ground) is never marked.
    pub(crate) fn component_of_ports(&self) -> Vec<bool> {
        let n = self.node_count();
        let mut adj = vec![Vec::new(); n + 1];
        for e in &self.elements {
            let (a, b) = e.nodes;
            if a != GROUND && b != GROUND {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n + 1];
        let mut queue = VecDeque::new();
        let start = self.ports[0].node;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// Incremental construction of a [`Netlist`].
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    node_names: Vec<String>,
    elements: Vec<Element>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: impl Into<String>) -> usize {
        self.node_names.push(name.into());
        self.node_names.len()
    }

    pub fn element(&mut self, kind: ElementKind, a: usize, b: usize, value: f64) -> &mut Self {
        self.elements.push(Element {
            kind,
            nodes: (a, b),
            value,
        });
        self
    }

    pub fn resistor(&mut self, a: usize, b: usize, ohms: f64) -> &mut Self {
        self.element(ElementKind::Resistor, a, b, ohms)
    }

    pub fn inductor(&mut self, a: usize, b: usize, henry: f64) -> &mut Self {
        self.element(ElementKind::Inductor, a, b, henry)
    }

    pub fn capacitor(&mut self, a: usize, b: usize, farad: f64) -> &mut Self {
        self.element(ElementKind::Capacitor, a, b, farad)
    }

    pub fn inverter(&mut self, a: usize, b: usize, siemens: f64) -> &mut Self {
        self.element(ElementKind::Inverter, a, b, siemens)
    }

    pub fn build(self, port1: Port, port2: Port) -> Result<Netlist> {
        Netlist::new(self.node_names, self.elements, [port1, port2])
    }
}
