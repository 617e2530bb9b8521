use serde::Serialize;

use super::Graph;

#[derive(Clone, Debug, Serialize)]
pub struct ComponentLabeling {
    /// Component id of every node. Ids are assigned in order of each
    /// component's smallest node index.
    pub label: Vec<u32>,
    pub sizes: Vec<usize>,
    /// Largest component; ties go to the smallest id.
    pub giant_id: usize,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_size(&self) -> usize {
        self.sizes.get(self.giant_id).copied().unwrap_or(0)
    }

    pub fn giant_fraction(&self) -> f64 {
        if self.label.is_empty() {
            return 0.0;
        }
        self.giant_size() as f64 / self.label.len() as f64
    }
}

pub fn connected_components(graph: &Graph) -> ComponentLabeling {
    let n = graph.node_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    for start in 0..n {
        if label[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        label[start] = id;
        stack.push(start as u32);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in graph.neighbors(v as usize) {
                if label[w as usize] == u32::MAX {
                    label[w as usize] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let mut giant_id = 0;
    for (id, &s) in sizes.iter().enumerate() {
        if s > sizes[giant_id] {
            giant_id = id;
        }
    }
    ComponentLabeling {
        label,
        sizes,
        giant_id,
    }
}

/// Induced subgraph on the largest connected component.
pub fn giant_component(graph: &Graph) -> Graph {
    let comps = connected_components(graph);
    let keep: Vec<bool> = comps
        .label
        .iter()
        .map(|&l| l as usize == comps.giant_id)
        .collect();
    graph.induced_subgraph(&keep)
}
