//! File formats: the JSON map/angle document, the JSON metric document, and
//! the CSV tables (layout, dual points, traces, histograms, solver logs).
//!
//! The JSON documents are written in a canonical form: vertex labels sorted
//! ascending define the internal indexing, theta entries are sorted by
//! normalized endpoints, and floats use the shortest round-trip
//! representation. Writing what was read reproduces a canonical document
//! byte for byte.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angle::AngleAssignment;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::layout::{Frame, Layout};
use crate::map::{PlanarMap, Topology, VertexId};
use crate::packing::{IterationRecord, PackingMetric};
use crate::walk::{DecaySeries, ExitHistogram, WalkTrace};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaEntry {
    /// Edge endpoints as external vertex labels.
    pub edge: [u64; 2],
    /// Angle in radians.
    pub value: f64,
}

/// The structured map document: topology, root, face cycles over external
/// vertex labels, and optionally the edge angles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapDocument {
    pub topology: String,
    pub root: u64,
    pub faces: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<ThetaEntry>>,
}

/// A parsed document: the dense-index map plus the external labels
/// (`labels[internal] = external`) and the optional angle assignment.
#[derive(Debug, Clone)]
pub struct MapBundle {
    pub map: PlanarMap,
    pub labels: Vec<u64>,
    pub theta: Option<AngleAssignment>,
}

impl MapBundle {
    pub fn theta_or_err(&self) -> Result<&AngleAssignment> {
        self.theta
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("document carries no theta field".into()))
    }
}

pub fn parse_document(doc: &MapDocument) -> Result<MapBundle> {
    let topology = match doc.topology.as_str() {
        "disk-patch" => Topology::DiskPatch,
        "torus" => Topology::Torus,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown topology {other:?} (expected \"disk-patch\" or \"torus\")"
            )))
        }
    };
    let mut labels: Vec<u64> = doc.faces.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let index: HashMap<u64, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let faces: Vec<Vec<VertexId>> = doc
        .faces
        .iter()
        .map(|cycle| cycle.iter().map(|l| index[l]).collect())
        .collect();
    let root = *index
        .get(&doc.root)
        .ok_or_else(|| Error::InvalidInput(format!("root {} not on any face", doc.root)))?;
    let map = PlanarMap::build_from_faces(&faces, root, topology)?;
    let theta = match &doc.theta {
        None => None,
        Some(entries) => {
            let mut values = vec![f64::NAN; map.edge_count()];
            for entry in entries {
                let u = *index.get(&entry.edge[0]).ok_or_else(|| {
                    Error::InvalidInput(format!("theta references unknown vertex {}", entry.edge[0]))
                })?;
                let v = *index.get(&entry.edge[1]).ok_or_else(|| {
                    Error::InvalidInput(format!("theta references unknown vertex {}", entry.edge[1]))
                })?;
                let e = map.edge_between(u, v).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "theta references non-edge ({}, {})",
                        entry.edge[0], entry.edge[1]
                    ))
                })?;
                values[e] = entry.value;
            }
            if let Some(e) = values.iter().position(|v| v.is_nan()) {
                let (u, v) = map.edge_endpoints(e);
                return Err(Error::MissingAngle(labels[u] as usize, labels[v] as usize));
            }
            Some(AngleAssignment::from_values(&map, values)?)
        }
    };
    Ok(MapBundle { map, labels, theta })
}

/// Canonical document for a map (labels default to the identity `0..n`).
pub fn document_from_parts(
    map: &PlanarMap,
    labels: Option<&[u64]>,
    theta: Option<&AngleAssignment>,
) -> MapDocument {
    let ident: Vec<u64> = (0..map.vertex_count() as u64).collect();
    let labels = labels.unwrap_or(&ident);
    let faces: Vec<Vec<u64>> = (0..map.face_count())
        .map(|f| map.face_cycle(f).iter().map(|&v| labels[v]).collect())
        .collect();
    let theta = theta.map(|assignment| {
        let mut entries: Vec<ThetaEntry> = map
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| {
                let (a, b) = (labels[u].min(labels[v]), labels[u].max(labels[v]));
                ThetaEntry {
                    edge: [a, b],
                    value: assignment.get(e),
                }
            })
            .collect();
        entries.sort_by_key(|t| t.edge);
        entries
    });
    MapDocument {
        topology: match map.topology() {
            Topology::DiskPatch => "disk-patch".to_string(),
            Topology::Torus => "torus".to_string(),
        },
        root: labels[map.root()],
        faces,
        theta,
    }
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_map_file(path: &Path) -> Result<MapBundle> {
    let text = std::fs::read_to_string(path)?;
    let doc: MapDocument = serde_json::from_str(&text)?;
    parse_document(&doc)
}

pub fn write_map_file(path: &Path, doc: &MapDocument) -> Result<()> {
    std::fs::write(path, to_canonical_json(doc)?)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub vertex: u64,
    pub r: f64,
}

/// Metric document: vertex label to radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricDocument {
    pub radii: Vec<RadiusEntry>,
}

pub fn metric_document(metric: &PackingMetric, labels: &[u64]) -> MetricDocument {
    MetricDocument {
        radii: metric
            .values()
            .iter()
            .enumerate()
            .map(|(v, &r)| RadiusEntry {
                vertex: labels[v],
                r,
            })
            .collect(),
    }
}

pub fn parse_metric(doc: &MetricDocument, map: &PlanarMap, labels: &[u64]) -> Result<PackingMetric> {
    let index: HashMap<u64, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let mut values = vec![f64::NAN; map.vertex_count()];
    for entry in &doc.radii {
        let v = *index.get(&entry.vertex).ok_or_else(|| {
            Error::InvalidInput(format!("metric references unknown vertex {}", entry.vertex))
        })?;
        values[v] = entry.r;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("metric misses some vertices".into()));
    }
    PackingMetric::from_values(map, values)
}

pub fn read_metric_file(path: &Path, map: &PlanarMap, labels: &[u64]) -> Result<PackingMetric> {
    let text = std::fs::read_to_string(path)?;
    let doc: MetricDocument = serde_json::from_str(&text)?;
    parse_metric(&doc, map, labels)
}

pub fn write_metric_file(path: &Path, metric: &PackingMetric, labels: &[u64]) -> Result<()> {
    std::fs::write(path, to_canonical_json(&metric_document(metric, labels))?)?;
    Ok(())
}

/// Layout CSV: a comment header carrying frame and root, then
/// `vertex,x,y,r` rows. Floats use the shortest round-trip form.
pub fn layout_to_csv(layout: &Layout, labels: &[u64]) -> String {
    let frame = match layout.frame {
        Frame::Plane => "plane",
        Frame::UnitDisk => "unit-disk",
    };
    let mut s = format!("# frame={} root={}\n", frame, labels[layout.root]);
    s.push_str("vertex,x,y,r\n");
    for (v, z) in layout.center.iter().enumerate() {
        s.push_str(&format!("{},{},{},{}\n", labels[v], z.x, z.y, layout.radius[v]));
    }
    s
}

pub fn dual_points_to_csv(layout: &Layout) -> String {
    let mut s = String::from("face,x,y\n");
    for (f, p) in layout.dual_point.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", f, p.x, p.y));
    }
    s
}

/// Reads a layout CSV back; dual points are not part of the CSV format and
/// come back empty.
pub fn layout_from_csv(text: &str, map: &PlanarMap, labels: &[u64]) -> Result<Layout> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty layout CSV".into()))?;
    let mut frame = None;
    let mut root_label = None;
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some(f) = token.strip_prefix("frame=") {
            frame = Some(match f {
                "plane" => Frame::Plane,
                "unit-disk" => Frame::UnitDisk,
                other => {
                    return Err(Error::InvalidInput(format!("unknown frame {other:?}")))
                }
            });
        }
        if let Some(r) = token.strip_prefix("root=") {
            root_label = Some(r.parse::<u64>().map_err(|_| {
                Error::InvalidInput("bad root in layout header".into())
            })?);
        }
    }
    let frame =
        frame.ok_or_else(|| Error::InvalidInput("layout CSV misses frame header".into()))?;
    let index: HashMap<u64, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let root = root_label
        .and_then(|l| index.get(&l).copied())
        .unwrap_or(map.root());
    let mut center = vec![None; map.vertex_count()];
    let mut radius = vec![f64::NAN; map.vertex_count()];
    for line in lines {
        if line.starts_with("vertex") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::InvalidInput(format!("bad layout row {line:?}")));
        }
        let label: u64 = fields[0]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad vertex {:?}", fields[0])))?;
        let v = *index
            .get(&label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {label}")))?;
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("bad float {s:?}")))
        };
        center[v] = Some(Point::new(parse(fields[1])?, parse(fields[2])?));
        radius[v] = parse(fields[3])?;
    }
    let center: Vec<Point> = center
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::InvalidInput("layout misses some vertices".into())))
        .collect::<Result<_>>()?;
    if radius.iter().any(|r| r.is_nan()) {
        return Err(Error::InvalidInput("layout misses some radii".into()));
    }
    Ok(Layout {
        frame,
        root,
        center,
        radius,
        dual_point: Vec::new(),
    })
}

/// Trace CSV: `step,vertex,r,abs_z,d_hyp` with empty fields for observables
/// that were not recorded.
pub fn trace_to_csv(trace: &WalkTrace, labels: &[u64]) -> String {
    let mut s = format!(
        "# rng={} seed={} stream={} stopped_at_boundary={}\n",
        crate::walk::RNG_ALGORITHM,
        trace.seed,
        trace.stream,
        trace.stopped_at_boundary
    );
    s.push_str("step,vertex,r,abs_z,d_hyp\n");
    for (i, &v) in trace.steps.iter().enumerate() {
        let opt = |o: &Option<Vec<f64>>| match o {
            Some(vals) => vals[i].to_string(),
            None => String::new(),
        };
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            i,
            labels[v],
            opt(&trace.radii),
            opt(&trace.abs_z),
            opt(&trace.hyp_dist)
        ));
    }
    s
}

pub fn histogram_to_csv(hist: &ExitHistogram) -> String {
    let mut s = format!(
        "# rng={} samples={} absorbed={}\n",
        hist.rng, hist.sample_count, hist.absorbed_count
    );
    s.push_str("bin_low,bin_high,count\n");
    let tau = std::f64::consts::TAU;
    for (b, &count) in hist.bins.iter().enumerate() {
        let low = tau * b as f64 / hist.bin_count as f64;
        let high = tau * (b + 1) as f64 / hist.bin_count as f64;
        s.push_str(&format!("{low},{high},{count}\n"));
    }
    s
}

pub fn solver_log_to_csv(log: &[IterationRecord]) -> String {
    let mut s = String::from("iteration,max_abs_k,step,elapsed_ms\n");
    for rec in log {
        s.push_str(&format!(
            "{},{},{},{:.3}\n",
            rec.iteration, rec.max_abs_k, rec.step, rec.elapsed_ms
        ));
    }
    s
}

pub fn decay_series_to_csv(series: &DecaySeries) -> String {
    let mut s = String::from("step,alive,mean_log_r,q25,q50,q75\n");
    for i in 0..series.step.len() {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            series.step[i],
            series.alive[i],
            series.mean_log_r[i],
            series.q25[i],
            series.q50[i],
            series.q75[i]
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{generate_regular_patch, generate_torus_quotient};
    use std::f64::consts::PI;

    #[test]
    fn canonical_roundtrip_is_stable() {
        let m = generate_torus_quotient(3, 6, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        let perturbed = crate::angle::perturb_theta_on_c1(&m, &theta, 0.05, 3).unwrap();
        let doc = document_from_parts(&m, None, Some(&perturbed));
        let text = to_canonical_json(&doc).unwrap();
        let bundle = parse_document(&serde_json::from_str(&text).unwrap()).unwrap();
        let doc2 = document_from_parts(&bundle.map, Some(&bundle.labels), bundle.theta.as_ref());
        let text2 = to_canonical_json(&doc2).unwrap();
        assert_eq!(text, text2, "write(read(x)) must reproduce canonical docs");
        assert_eq!(bundle.map.canonical_code(), m.canonical_code());
    }

    #[test]
    fn sparse_labels_are_remapped() {
        // Labels 5, 10, 20, 30 instead of 0..4.
        let doc = MapDocument {
            topology: "disk-patch".into(),
            root: 10,
            faces: vec![vec![5, 10, 20], vec![5, 20, 30]],
            theta: None,
        };
        let bundle = parse_document(&doc).unwrap();
        assert_eq!(bundle.map.vertex_count(), 4);
        assert_eq!(bundle.labels, vec![5, 10, 20, 30]);
        assert_eq!(bundle.labels[bundle.map.root()], 10);
        let out = document_from_parts(&bundle.map, Some(&bundle.labels), None);
        assert_eq!(out.root, 10);
        assert!(out.faces.iter().flatten().all(|l| bundle.labels.contains(l)));
    }

    #[test]
    fn theta_errors() {
        let doc = MapDocument {
            topology: "disk-patch".into(),
            root: 0,
            faces: vec![vec![0, 1, 2]],
            theta: Some(vec![ThetaEntry {
                edge: [0, 1],
                value: 1.0,
            }]),
        };
        assert!(matches!(
            parse_document(&doc),
            Err(Error::MissingAngle(_, _))
        ));
    }

    #[test]
    fn metric_document_roundtrip() {
        let m = generate_regular_patch(3, 6, 2).unwrap();
        let labels: Vec<u64> = (0..m.vertex_count() as u64).collect();
        let metric = PackingMetric::from_values(
            &m,
            (0..m.vertex_count()).map(|v| 1.0 + v as f64 * 0.01).collect(),
        )
        .unwrap();
        let doc = metric_document(&metric, &labels);
        let text = to_canonical_json(&doc).unwrap();
        let back: MetricDocument = serde_json::from_str(&text).unwrap();
        let parsed = parse_metric(&back, &m, &labels).unwrap();
        assert_eq!(parsed.values(), metric.values());
    }

    #[test]
    fn layout_csv_roundtrip() {
        let m = generate_regular_patch(4, 4, 1).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        let metric = PackingMetric::uniform(&m, 1.0).unwrap();
        let layout =
            crate::layout::normalize_to_disk(&crate::layout::layout_embed(&m, &theta, &metric).unwrap());
        let labels: Vec<u64> = (0..m.vertex_count() as u64).collect();
        let csv = layout_to_csv(&layout, &labels);
        let back = layout_from_csv(&csv, &m, &labels).unwrap();
        assert_eq!(back.frame, Frame::UnitDisk);
        assert_eq!(back.root, layout.root);
        for v in m.vertices() {
            assert_eq!(back.center[v].x.to_bits(), layout.center[v].x.to_bits());
            assert_eq!(back.radius[v].to_bits(), layout.radius[v].to_bits());
        }
    }
}
