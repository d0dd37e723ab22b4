use commgraph_core::{Class, DenseMatrix, HeteroGraph};

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// `node_id,kind,d0..d{dim-1}` with one row per graph node (or per listed
/// node).
pub fn format_embeddings(graph: &HeteroGraph, vectors: &DenseMatrix, nodes: Option<&[usize]>) -> String {
    let mut w = writer();
    let mut header = vec!["node_id".to_string(), "kind".to_string()];
    header.extend((0..vectors.cols()).map(|j| format!("d{j}")));
    w.write_record(&header).expect("in-memory write");
    let all: Vec<usize> = (0..graph.n_nodes()).collect();
    for &i in nodes.unwrap_or(&all) {
        let (id, kind) = graph.node(i);
        let mut rec = vec![id.to_string(), kind.as_str().to_string()];
        rec.extend(vectors.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

/// One prediction row.
pub struct PredictionRow<'a> {
    pub doc_id: &'a str,
    pub gold: Option<Class>,
    pub predicted: Class,
    pub probs: &'a [f64],
}

pub fn prediction_header(prefix: &[&str]) -> Vec<String> {
    prefix
        .iter()
        .copied()
        .chain(["doc_id", "gold", "predicted", "p_racism", "p_sexism", "p_clean"])
        .map(String::from)
        .collect()
}

/// `doc_id,gold,predicted,p_racism,p_sexism,p_clean`, optionally preceded
/// by extra key columns (e.g. run and method).
pub fn format_predictions<'a>(prefix: &[&str], rows: impl IntoIterator<Item = (Vec<String>, PredictionRow<'a>)>) -> String {
    let mut w = writer();
    w.write_record(prediction_header(prefix)).expect("in-memory write");
    for (keys, r) in rows {
        let mut rec = keys;
        rec.push(r.doc_id.to_string());
        rec.push(r.gold.map_or(String::new(), |c| c.as_str().to_string()));
        rec.push(r.predicted.as_str().to_string());
        rec.extend(r.probs.iter().map(|p| p.to_string()));
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}
