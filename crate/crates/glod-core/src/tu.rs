//! TU graph-classification text format: `<name>_A.txt` holds 1-based
//! "row, col" edge pairs (each undirected edge listed in both directions),
//! `<name>_graph_indicator.txt` maps each node line to a 1-based graph id,
//! `<name>_graph_labels.txt` has one integer per graph, and the optional
//! `<name>_node_labels.txt` one integer per node.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{degree_labeling, Graph, GraphDataset};

fn open_required(path: &Path) -> Result<BufReader<File>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(BufReader::new(File::open(path)?))
}

fn parse_int_lines(path: &Path) -> Result<Vec<i64>> {
    let reader = open_required(path)?;
    let file = path.display().to_string();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        // Some TU files carry extra comma-separated columns; the label is the last.
        let token = trimmed.rsplit(',').next().unwrap_or(trimmed).trim();
        let value = token.parse::<i64>().map_err(|_| Error::Format {
            file: file.clone(),
            line: idx + 1,
            message: format!("expected an integer, found `{trimmed}`"),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Loads `<directory>/<name>_*.txt` into a dataset with 0-based indexing.
///
/// Duplicate and reciprocal edge lines collapse into one undirected edge.
/// Node labels are compacted to `0..d-1` by sorted value; datasets without a
/// node-label file are labeled by node degree. Graph class labels are mapped
/// to `0..c-1` by sorted value (so e.g. {-1, 1} and {1, 2} both become {0, 1}).
pub fn load_tu_dataset(directory: impl AsRef<Path>, name: &str) -> Result<GraphDataset> {
    let dir = directory.as_ref();
    let a_path = dir.join(format!("{name}_A.txt"));
    let indicator_path = dir.join(format!("{name}_graph_indicator.txt"));
    let labels_path = dir.join(format!("{name}_graph_labels.txt"));
    let node_labels_path = dir.join(format!("{name}_node_labels.txt"));

    let indicator = parse_int_lines(&indicator_path)?;
    let total_nodes = indicator.len();
    let graph_count = match indicator.iter().max() {
        Some(&m) if m >= 1 => m as usize,
        _ => 0,
    };
    let mut node_graph = vec![0usize; total_nodes];
    for (i, &g) in indicator.iter().enumerate() {
        if g < 1 || g as usize > graph_count {
            return Err(Error::Format {
                file: indicator_path.display().to_string(),
                line: i + 1,
                message: format!("graph id {g} out of range 1..{graph_count}"),
            });
        }
        node_graph[i] = g as usize - 1;
    }

    // Local node index within its graph, in file order.
    let mut node_local = vec![0u32; total_nodes];
    let mut graph_sizes = vec![0usize; graph_count];
    for (global, &g) in node_graph.iter().enumerate() {
        node_local[global] = graph_sizes[g] as u32;
        graph_sizes[g] += 1;
    }

    let raw_graph_labels = parse_int_lines(&labels_path)?;
    if raw_graph_labels.len() != graph_count {
        return Err(Error::Format {
            file: labels_path.display().to_string(),
            line: raw_graph_labels.len(),
            message: format!(
                "{} graph labels for {} graphs",
                raw_graph_labels.len(),
                graph_count
            ),
        });
    }

    // Edges.
    let a_file = a_path.display().to_string();
    let reader = open_required(&a_path)?;
    let mut edge_sets: Vec<HashSet<(u32, u32)>> = graph_sizes
        .iter()
        .map(|&s| HashSet::with_capacity(s * 2))
        .collect();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let parse = |tok: Option<&str>| -> Result<usize> {
            let tok = tok.map(str::trim).unwrap_or("");
            tok.parse::<usize>().map_err(|_| Error::Format {
                file: a_file.clone(),
                line: idx + 1,
                message: format!("expected `row, col`, found `{trimmed}`"),
            })
        };
        let row = parse(parts.next())?;
        let col = parse(parts.next())?;
        if row < 1 || row > total_nodes || col < 1 || col > total_nodes {
            return Err(Error::Format {
                file: a_file.clone(),
                line: idx + 1,
                message: format!("edge ({row}, {col}) references an unknown node"),
            });
        }
        let (u, v) = (row - 1, col - 1);
        if node_graph[u] != node_graph[v] {
            return Err(Error::Format {
                file: a_file.clone(),
                line: idx + 1,
                message: format!("edge ({row}, {col}) spans two graphs"),
            });
        }
        if u == v {
            return Err(Error::Format {
                file: a_file.clone(),
                line: idx + 1,
                message: format!("self-loop at node {row}"),
            });
        }
        let g = node_graph[u];
        let (a, b) = (node_local[u].min(node_local[v]), node_local[u].max(node_local[v]));
        edge_sets[g].insert((a, b));
    }

    // Node labels (optional) with dataset-wide compaction.
    let has_node_labels = node_labels_path.is_file();
    let node_labels: Vec<u32> = if has_node_labels {
        let raw = parse_int_lines(&node_labels_path)?;
        if raw.len() != total_nodes {
            return Err(Error::Format {
                file: node_labels_path.display().to_string(),
                line: raw.len(),
                message: format!("{} node labels for {} nodes", raw.len(), total_nodes),
            });
        }
        let mut distinct: Vec<i64> = raw.iter().copied().collect::<HashSet<_>>().into_iter().collect();
        distinct.sort_unstable();
        raw.iter()
            .map(|v| distinct.binary_search(v).unwrap() as u32)
            .collect()
    } else {
        vec![0; total_nodes]
    };
    let alphabet = if has_node_labels {
        node_labels.iter().copied().max().map_or(1, |m| m as usize + 1)
    } else {
        1
    };

    let mut per_graph_labels: Vec<Vec<u32>> = graph_sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut per_graph_original: Vec<Vec<u32>> = graph_sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (global, &g) in node_graph.iter().enumerate() {
        per_graph_labels[g].push(node_labels[global]);
        per_graph_original[g].push(global as u32 + 1);
    }

    let mut graphs = Vec::with_capacity(graph_count);
    for (g, (labels, original)) in per_graph_labels
        .into_iter()
        .zip(per_graph_original)
        .enumerate()
    {
        let edges: Vec<(u32, u32)> = edge_sets[g].iter().copied().collect();
        graphs.push(Graph::new(graph_sizes[g], edges, labels)?.with_original_ids(original));
    }

    let mut distinct_classes: Vec<i64> = raw_graph_labels
        .iter()
        .copied()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    distinct_classes.sort_unstable();
    let class_labels = raw_graph_labels
        .iter()
        .map(|v| distinct_classes.binary_search(v).unwrap() as u32)
        .collect();

    let dataset = GraphDataset::new(name, graphs, class_labels, alphabet)?;
    if has_node_labels {
        Ok(dataset)
    } else {
        Ok(degree_labeling(&dataset))
    }
}

/// Writes the dataset back out in TU layout with LF line endings.
///
/// Nodes are renumbered sequentially (1-based) in dataset order and each
/// undirected edge is listed in both directions, ascending by source node.
pub fn write_tu_dataset(dataset: &GraphDataset, directory: impl AsRef<Path>) -> Result<()> {
    let dir = directory.as_ref();
    std::fs::create_dir_all(dir)?;
    let name = &dataset.name;

    let mut a = String::new();
    let mut indicator = String::new();
    let mut node_labels = String::new();
    let mut graph_labels = String::new();

    let mut base = 0usize;
    for (gi, graph) in dataset.graphs.iter().enumerate() {
        let adj = graph.adjacency();
        for (u, nbrs) in adj.iter().enumerate() {
            for &v in nbrs {
                a.push_str(&format!("{}, {}\n", base + u + 1, base + v as usize + 1));
            }
        }
        for &l in graph.node_labels() {
            indicator.push_str(&format!("{}\n", gi + 1));
            node_labels.push_str(&format!("{l}\n"));
        }
        graph_labels.push_str(&format!("{}\n", dataset.class_labels[gi]));
        base += graph.node_count();
    }

    let write = |suffix: &str, contents: &str| -> Result<()> {
        let mut f = File::create(dir.join(format!("{name}_{suffix}.txt")))?;
        f.write_all(contents.as_bytes())?;
        Ok(())
    };
    write("A", &a)?;
    write("graph_indicator", &indicator)?;
    write("graph_labels", &graph_labels)?;
    write("node_labels", &node_labels)?;
    Ok(())
}
