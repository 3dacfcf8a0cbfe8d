//! Call-graph cycle detection. Recursion (direct or mutual) is not allowed.

/// Adjacency list over user functions: `callees[f]` are the functions `f`
/// calls directly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallGraph {
    pub names: Vec<String>,
    pub callees: Vec<Vec<usize>>,
}

impl CallGraph {
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        CallGraph { names, callees: vec![Vec::new(); n] }
    }

    pub fn add_call(&mut self, caller: usize, callee: usize) {
        if !self.callees[caller].contains(&callee) {
            self.callees[caller].push(callee);
        }
    }

    /// Functions reachable from `root`, including `root`.
    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![root];
        while let Some(f) = stack.pop() {
            if std::mem::replace(&mut seen[f], true) {
                continue;
            }
            stack.extend(self.callees[f].iter().copied());
        }
        seen
    }
}

/// Ok if the graph is acyclic; otherwise one cycle as the list of function
/// indices along it, starting from the first function (in index order) that
/// lies on a cycle.
pub fn detect_recursion(graph: &CallGraph) -> Result<(), Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    fn visit(g: &CallGraph, f: usize, marks: &mut [Mark], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        marks[f] = Mark::Grey;
        path.push(f);
        for &c in &g.callees[f] {
            match marks[c] {
                Mark::Grey => {
                    let start = path.iter().position(|&p| p == c).unwrap();
                    return Some(path[start..].to_vec());
                }
                Mark::White => {
                    if let Some(cycle) = visit(g, c, marks, path) {
                        return Some(cycle);
                    }
                }
                Mark::Black => {}
            }
        }
        path.pop();
        marks[f] = Mark::Black;
        None
    }
    let mut marks = vec![Mark::White; graph.names.len()];
    for f in 0..graph.names.len() {
        if marks[f] == Mark::White {
            if let Some(cycle) = visit(graph, f, &mut marks, &mut Vec::new()) {
                return Err(cycle);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> CallGraph {
        let mut g = CallGraph::new((0..n).map(|i| format!("f{i}")).collect());
        for &(a, b) in edges {
            g.add_call(a, b);
        }
        g
    }

    #[test]
    fn mutual_recursion() {
        assert_eq!(detect_recursion(&graph(2, &[(0, 1), (1, 0)])), Err(vec![0, 1]));
    }

    #[test]
    fn self_loop() {
        assert_eq!(detect_recursion(&graph(3, &[(0, 1), (2, 2)])), Err(vec![2]));
    }

    #[test]
    fn straight_line_and_empty() {
        assert!(detect_recursion(&graph(3, &[(0, 1), (1, 2), (0, 2)])).is_ok());
        assert!(detect_recursion(&graph(2, &[])).is_ok());
        assert!(detect_recursion(&CallGraph::default()).is_ok());
    }

    #[test]
    fn reachability() {
        let g = graph(4, &[(0, 1), (1, 2)]);
        assert_eq!(g.reachable_from(0), vec![true, true, true, false]);
    }
}
