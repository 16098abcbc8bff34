use rand::seq::SliceRandom;

use crate::circuit::{Circuit, CircuitBuilder, CouplingGraph, GateOp};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A routed circuit on physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub circuit: Circuit,
    /// `initial_layout[logical] = physical` before the first gate.
    pub initial_layout: Vec<usize>,
    /// Where each logical qubit ends up after the inserted SWAPs.
    pub final_layout: Vec<usize>,
    pub swaps: usize,
}

/// Insert SWAPs so that every two-qubit gate acts on a coupling edge.
///
/// Each step moves one endpoint of the blocked gate one hop closer to the
/// other; among such moves the one that also brings the next two-qubit gate
/// closest wins, with seeded random tie-breaks.
pub fn route(
    c: &Circuit,
    coupling: &CouplingGraph,
    initial_layout: Option<&[usize]>,
    seed: u64,
) -> Result<Routed> {
    let np = coupling.n();
    if c.n() > np {
        return Err(Error::InvalidArgument(format!(
            "circuit width {} exceeds coupling graph size {np}",
            c.n()
        )));
    }
    let mut phys: Vec<usize> = match initial_layout {
        Some(l) => {
            let mut l = l.to_vec();
            let mut used = vec![false; np];
            for &p in &l {
                if p >= np || std::mem::replace(&mut used[p], true) {
                    return Err(Error::InvalidArgument(format!("invalid initial layout {l:?}")));
                }
            }
            l.extend((0..np).filter(|p| !used[*p]));
            if l.len() != np {
                return Err(Error::InvalidArgument("initial layout longer than coupling graph".into()));
            }
            l
        }
        None => (0..np).collect(),
    };
    let initial = phys.clone();
    let mut logical = vec![0usize; np];
    for (l, &p) in phys.iter().enumerate() {
        logical[p] = l;
    }

    let gates: Vec<GateOp> = c.gates().copied().collect();
    let two_q: Vec<usize> = (0..gates.len()).filter(|&i| gates[i].arity() == 2).collect();
    let mut rng = rng_from_seed(seed);
    let mut b = CircuitBuilder::new(np);
    let mut swaps = 0usize;
    let mut next_2q = 0usize;

    for g in &gates {
        if g.arity() == 1 {
            b.push(g.remapped(|q| phys[q]))?;
            continue;
        }
        next_2q += 1;
        let lookahead = two_q.get(next_2q).map(|&j| gates[j]);
        let (la, lb) = (g.qubits()[0], g.qubits()[1]);
        while coupling.distance(phys[la], phys[lb]) > 1 {
            let (pa, pb) = (phys[la], phys[lb]);
            let d = coupling.distance(pa, pb);
            let mut cands: Vec<(usize, usize)> = Vec::new();
            for (from, other) in [(pa, pb), (pb, pa)] {
                for &x in coupling.neighbors(from) {
                    if coupling.distance(x, other) < d {
                        cands.push((from, x));
                    }
                }
            }
            let score = |&(u, v): &(usize, usize)| -> usize {
                let Some(n) = lookahead else { return 0 };
                let map = |p: usize| if p == u { v } else if p == v { u } else { p };
                coupling.distance(map(phys[n.qubits()[0]]), map(phys[n.qubits()[1]]))
            };
            let best = cands.iter().map(score).min().expect("a shortest-path move exists");
            let ties: Vec<_> = cands.iter().filter(|c| score(c) == best).copied().collect();
            let &(u, v) = ties.choose(&mut rng).expect("non-empty");
            b.push(GateOp::swap(u, v))?;
            swaps += 1;
            let (lu, lv) = (logical[u], logical[v]);
            logical.swap(u, v);
            phys[lu] = v;
            phys[lv] = u;
        }
        b.push(g.remapped(|q| phys[q]))?;
    }
    Ok(Routed {
        circuit: b.finish().with_id(c.id.clone()),
        initial_layout: initial,
        final_layout: phys,
        swaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_gates_need_no_swaps() {
        let c = Circuit::from_gates(3, [GateOp::cz(0, 1), GateOp::cz(1, 2)]).unwrap();
        let r = route(&c, &CouplingGraph::line(3), None, 0).unwrap();
        assert_eq!(r.swaps, 0);
        assert_eq!(r.circuit, c);
    }

    #[test]
    fn distant_gate_gets_a_swap_and_is_deterministic() {
        let c = Circuit::from_gates(3, [GateOp::cz(0, 2)]).unwrap();
        let g = CouplingGraph::line(3);
        let r = route(&c, &g, None, 5).unwrap();
        assert!(r.swaps >= 1);
        for op in r.circuit.gates().filter(|o| o.arity() == 2) {
            assert!(g.is_edge(op.qubits()[0], op.qubits()[1]));
        }
        assert_eq!(r, route(&c, &g, None, 5).unwrap());
    }
}
