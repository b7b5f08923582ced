use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::network::{check, Network};
use super::rat::{fmt_rat, parse_rat, Rat};
use super::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub cap: Value,
    pub len: Value,
}

/// JSON shape of a network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub directed: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub monotone: bool,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub supplies: BTreeMap<String, Value>,
    pub sinks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_caps: Option<BTreeMap<String, Value>>,
}

fn value_rat(v: &Value, what: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rat(&n.to_string()),
        _ => Err(Error::Parse(format!(
            "{what}: expected an integer or \"num/den\" string, got {v}"
        ))),
    }
}

fn value_len(v: &Value) -> Result<u64> {
    match v {
        Value::Number(n) if n.is_u64() => Ok(n.as_u64().unwrap()),
        Value::String(s) => {
            let r = parse_rat(s)?;
            if !r.is_integer() || r.is_negative() {
                return Err(Error::Parse(format!(
                    "edge length must be a non-negative integer, got {s}"
                )));
            }
            r.to_integer()
                .to_string()
                .parse()
                .map_err(|_| Error::Parse("length too large".into()))
        }
        _ => Err(Error::Parse(format!(
            "edge length must be a non-negative integer, got {v}"
        ))),
    }
}

impl NetworkDoc {
    pub fn into_network(self) -> Result<Network> {
        let mut g = Network::new(self.directed);
        g.monotone = self.monotone;
        for name in &self.nodes {
            if g.id(name).is_some() {
                return Err(Error::Invalid(format!("duplicate node {name}")));
            }
            g.add_node(name);
        }
        let id = |g: &Network, name: &str| {
            g.id(name)
                .ok_or_else(|| Error::Invalid(format!("unknown node {name}")))
        };
        for e in &self.edges {
            let u = id(&g, &e.u)?;
            let v = id(&g, &e.v)?;
            let cap = value_rat(&e.cap, "cap")?;
            let len = value_len(&e.len)?;
            g.add_edge(u, v, cap, len);
        }
        for (name, d) in &self.supplies {
            let v = id(&g, name)?;
            g.supply[v] = value_rat(d, "supply")?;
        }
        for name in &self.sinks {
            let v = id(&g, name)?;
            g.add_sink(v);
        }
        if let Some(caps) = &self.node_caps {
            for (name, c) in caps {
                let v = id(&g, name)?;
                g.set_node_cap(v, value_rat(c, "node cap")?);
            }
        }
        check(&g)?;
        Ok(g)
    }

    pub fn from_network(g: &Network) -> NetworkDoc {
        let edges = g
            .edges
            .iter()
            .map(|e| EdgeDoc {
                u: g.nodes[e.u].clone(),
                v: g.nodes[e.v].clone(),
                cap: Value::String(fmt_rat(&e.cap)),
                len: Value::from(e.len),
            })
            .collect();
        let supplies = (0..g.n())
            .filter(|&v| !g.supply[v].is_zero())
            .map(|v| (g.nodes[v].clone(), Value::String(fmt_rat(&g.supply[v]))))
            .collect();
        let node_caps = g.node_caps.as_ref().map(|caps| {
            caps.iter()
                .enumerate()
                .filter_map(|(v, c)| {
                    c.as_ref()
                        .map(|c| (g.nodes[v].clone(), Value::String(fmt_rat(c))))
                })
                .collect()
        });
        NetworkDoc {
            directed: g.directed,
            monotone: g.monotone,
            nodes: g.nodes.clone(),
            edges,
            supplies,
            sinks: g.sinks.iter().map(|&s| g.nodes[s].clone()).collect(),
            node_caps,
        }
    }
}

pub fn read_network(text: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    doc.into_network()
}

pub fn write_network(g: &Network) -> String {
    serde_json::to_string_pretty(&NetworkDoc::from_network(g)).expect("network serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"directed":true,"nodes":["s","a","t"],
        "edges":[{"u":"s","v":"a","cap":"3/2","len":2},{"u":"a","v":"t","cap":1,"len":0}],
        "supplies":{"s":"1/3"},"sinks":["t"]}"#;

    #[test]
    fn round_trip() {
        let g = read_network(DOC).unwrap();
        assert_eq!(g.kappa(), 1);
        let text = write_network(&g);
        let h = read_network(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(write_network(&h), text);
    }

    #[test]
    fn fractional_length_rejected() {
        let bad = DOC.replace("\"len\":2", "\"len\":\"3/2\"");
        assert!(read_network(&bad).is_err());
        let bad = DOC.replace("\"len\":2", "\"len\":2.5");
        assert!(read_network(&bad).is_err());
    }

    #[test]
    fn sink_with_supply_rejected() {
        let bad = DOC.replace("{\"s\":\"1/3\"}", "{\"t\":\"1\"}");
        assert!(matches!(read_network(&bad), Err(Error::Invalid(_))));
    }
}
