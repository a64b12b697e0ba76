//! Graph encoding: each edge binds its endpoint vectors (directed edges
//! shift the target first) and the graph is the bundle of its edges.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{HdcError, Result};
use crate::hv::{Accumulator, Domain, Hypervector, TieRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEncoderConfig {
    pub directed: bool,
    pub direction_shift: i64,
    pub tie: TieRule,
}

impl Default for GraphEncoderConfig {
    fn default() -> Self {
        GraphEncoderConfig {
            directed: false,
            direction_shift: 1,
            tie: TieRule::default(),
        }
    }
}

impl GraphEncoderConfig {
    pub fn directed() -> Self {
        GraphEncoderConfig {
            directed: true,
            ..Default::default()
        }
    }
}

/// `a * b` for undirected edges, `src * rho^shift(dst)` for directed ones.
pub fn edge_hv(cfg: &GraphEncoderConfig, src: &Hypervector, dst: &Hypervector) -> Result<Hypervector> {
    if cfg.directed {
        if cfg.direction_shift.rem_euclid(dst.dim() as i64) == 0 {
            return Err(HdcError::InvalidConfig(
                "direction_shift must be nonzero modulo dim for directed graphs".into(),
            ));
        }
        src.bind(&dst.permute(cfg.direction_shift))
    } else {
        src.bind(dst)
    }
}

pub fn encode_graph<N: AsRef<str>, E: AsRef<str>>(
    cfg: &GraphEncoderConfig,
    nodes: &[(N, Hypervector)],
    edges: &[(E, E)],
) -> Result<Hypervector> {
    if edges.is_empty() {
        return Err(HdcError::EmptyEdgeList);
    }
    let lookup: HashMap<&str, &Hypervector> = nodes.iter().map(|(id, hv)| (id.as_ref(), hv)).collect();
    let node = |id: &E| {
        lookup
            .get(id.as_ref())
            .copied()
            .ok_or_else(|| HdcError::UnknownEndpoint(id.as_ref().to_owned()))
    };
    let mut acc: Option<Accumulator> = None;
    for (a, b) in edges {
        let (ha, hb) = (node(a)?, node(b)?);
        if a.as_ref() == b.as_ref() && ha.domain() != Domain::Real {
            return Err(HdcError::SelfLoopUnsupported(a.as_ref().to_owned()));
        }
        let e = edge_hv(cfg, ha, hb)?;
        let acc = match &mut acc {
            Some(acc) => acc,
            None => acc.insert(Accumulator::new(e.dim(), e.domain())?),
        };
        acc.add(&e)?;
    }
    acc.expect("at least one edge").bundle(cfg.tie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn nodes(domain: Domain, n: usize) -> Vec<(String, Hypervector)> {
        let mut rng = seed::rng(21);
        (0..n)
            .map(|i| (format!("n{i}"), Hypervector::random(1024, domain, &mut rng).unwrap()))
            .collect()
    }

    #[test]
    fn undirected_edge_is_orientation_free() {
        let ns = nodes(Domain::Binary, 2);
        let cfg = GraphEncoderConfig::default();
        let ab = encode_graph(&cfg, &ns, &[("n0", "n1")]).unwrap();
        let ba = encode_graph(&cfg, &ns, &[("n1", "n0")]).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab, ns[0].1.bind(&ns[1].1).unwrap());
    }

    #[test]
    fn directed_edge_shifts_target() {
        let ns = nodes(Domain::Bipolar, 2);
        let g = encode_graph(&GraphEncoderConfig::directed(), &ns, &[("n0", "n1")]).unwrap();
        assert_eq!(g, ns[0].1.bind(&ns[1].1.permute(1)).unwrap());
    }

    #[test]
    fn errors() {
        let ns = nodes(Domain::Binary, 3);
        let cfg = GraphEncoderConfig::default();
        assert!(matches!(encode_graph::<_, &str>(&cfg, &ns, &[]), Err(HdcError::EmptyEdgeList)));
        assert!(matches!(encode_graph(&cfg, &ns, &[("n0", "zz")]), Err(HdcError::UnknownEndpoint(s)) if s == "zz"));
        assert!(matches!(encode_graph(&cfg, &ns, &[("n1", "n1")]), Err(HdcError::SelfLoopUnsupported(_))));
        let bad = GraphEncoderConfig {
            directed: true,
            direction_shift: 0,
            ..Default::default()
        };
        assert!(matches!(encode_graph(&bad, &ns, &[("n0", "n1")]), Err(HdcError::InvalidConfig(_))));
        let real = nodes(Domain::Real, 2);
        assert!(encode_graph(&cfg, &real, &[("n0", "n0"), ("n0", "n1")]).is_ok());
    }

    #[test]
    fn edge_order_and_relabeling_do_not_matter() {
        let ns = nodes(Domain::Binary, 6);
        let cfg = GraphEncoderConfig::directed();
        let edges = [("n0", "n1"), ("n1", "n2"), ("n3", "n4"), ("n5", "n0")];
        let g = encode_graph(&cfg, &ns, &edges).unwrap();
        let mut rev = edges;
        rev.reverse();
        assert_eq!(g, encode_graph(&cfg, &ns, &rev).unwrap());
        let relabeled: Vec<(String, Hypervector)> =
            ns.iter().map(|(id, hv)| (format!("node-{id}"), hv.clone())).collect();
        let redges: Vec<(String, String)> = edges
            .iter()
            .map(|(a, b)| (format!("node-{a}"), format!("node-{b}")))
            .collect();
        assert_eq!(g, encode_graph(&cfg, &relabeled, &redges).unwrap());
    }
}
