use super::NavGraph;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::world::io::fmt_f64;
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<[usize; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: usize,
    x: f64,
    y: f64,
    z: f64,
}

/// Canonical text: nodes in id order, edges sorted, fixed float format.
pub fn save_graph(graph: &NavGraph) -> String {
    let mut out = String::from("{\n\"edges\":[");
    for (k, (a, b)) in graph.edges().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&format!("[{a},{b}]"));
    }
    out.push_str("],\n\"nodes\":[");
    for (id, p) in graph.nodes().iter().enumerate() {
        if id > 0 {
            out.push(',');
        }
        out.push_str(&format!("\n{{\"id\":{id},\"x\":"));
        fmt_f64(&mut out, p.x);
        out.push_str(",\"y\":");
        fmt_f64(&mut out, p.y);
        out.push_str(",\"z\":");
        fmt_f64(&mut out, p.z);
        out.push('}');
    }
    out.push_str("\n]\n}\n");
    out
}

pub fn load_graph(bytes: &[u8]) -> Result<NavGraph> {
    let file: GraphFile = serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut nodes = vec![None; file.nodes.len()];
    for n in file.nodes {
        if !(n.x.is_finite() && n.y.is_finite() && n.z.is_finite()) {
            return Err(Error::Malformed(format!("node {} has non-finite coordinates", n.id)));
        }
        let slot = nodes
            .get_mut(n.id)
            .ok_or_else(|| Error::Malformed(format!("node ids must be 0..n, got {}", n.id)))?;
        if slot.is_some() {
            return Err(Error::Malformed(format!("duplicate node id {}", n.id)));
        }
        *slot = Some(Point3::new(n.x, n.y, n.z));
    }
    let nodes: Vec<Point3> = nodes.into_iter().map(Option::unwrap).collect();
    NavGraph::new(nodes, file.edges.into_iter().map(|[a, b]| (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let g = NavGraph::new(
            vec![Point3::new(0.125, 1.0, 0.0), Point3::new(2.0, -0.0, 1.2), Point3::new(3.5, 1.0, 1.2)],
            [(1, 0), (2, 1)],
        )
        .unwrap();
        let text = save_graph(&g);
        let back = load_graph(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(save_graph(&back), text);
    }

    #[test]
    fn rejects_gapped_ids() {
        let text = r#"{"nodes":[{"id":0,"x":0,"y":0,"z":0},{"id":2,"x":1,"y":0,"z":0}],"edges":[]}"#;
        assert!(matches!(load_graph(text.as_bytes()), Err(Error::Malformed(_))));
    }

    #[test]
    fn rejects_dangling_edge() {
        let text = r#"{"nodes":[{"id":0,"x":0,"y":0,"z":0}],"edges":[[0,3]]}"#;
        assert!(matches!(load_graph(text.as_bytes()), Err(Error::UnknownNode(3))));
    }
}
