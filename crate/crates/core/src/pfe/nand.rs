//! Rewriting circuits into NAND gates only.

use crate::circuit::{Circuit, TruthTable, WireId};

// Gadget steps: 0 and 1 are the gate inputs, 2 + i is helper i. The last
// step drives the gate's own output wire.
const fn gadget(bits: u8) -> &'static [(u8, u8)] {
    match bits {
        0b0000 => &[(0, 0), (0, 2), (3, 3)],
        0b0001 => &[(0, 0), (1, 1), (2, 3), (4, 4)],
        0b0010 => &[(0, 0), (2, 1), (3, 3)],
        0b0011 => &[(0, 0)],
        0b0100 => &[(1, 1), (0, 2), (3, 3)],
        0b0101 => &[(1, 1)],
        0b0110 => &[(0, 1), (0, 2), (1, 2), (3, 4)],
        0b0111 => &[(0, 1)],
        0b1000 => &[(0, 1), (2, 2)],
        0b1001 => &[(0, 1), (0, 2), (1, 2), (3, 4), (5, 5)],
        0b1010 => &[(1, 1), (2, 2)],
        0b1011 => &[(1, 1), (0, 2)],
        0b1100 => &[(0, 0), (2, 2)],
        0b1101 => &[(0, 0), (2, 1)],
        0b1110 => &[(0, 0), (1, 1), (2, 3)],
        _ => &[(0, 0), (0, 2)],
    }
}

/// NAND gates needed for one gate with `table`.
pub fn nand_cost(table: TruthTable) -> usize {
    gadget(table.bits()).len()
}

/// Equivalent circuit whose gates are all NAND. Helper gates of output gates
/// are emitted before the first output so outputs remain the last `m` wires.
pub fn nand_normalize(c: &Circuit) -> Circuit {
    let n = c.n();
    let mut gates: Vec<(WireId, WireId)> = Vec::new();
    let mut map: Vec<WireId> = (0..n).collect();
    let mut finals = Vec::with_capacity(c.m());

    let emit = |gates: &mut Vec<(WireId, WireId)>, a: WireId, b: WireId| {
        gates.push((a.min(b), a.max(b)));
        n + gates.len() - 1
    };
    for (g, spec) in c.gates().iter().enumerate() {
        let steps = gadget(spec.truth_table.bits());
        let mut src = vec![map[spec.in_a], map[spec.in_b]];
        let (helpers, last) = steps.split_at(steps.len() - 1);
        for &(x, y) in helpers {
            let w = emit(&mut gates, src[x as usize], src[y as usize]);
            src.push(w);
        }
        let (x, y) = last[0];
        if c.is_output(n + g) {
            finals.push((src[x as usize], src[y as usize]));
            map.push(usize::MAX);
        } else {
            map.push(emit(&mut gates, src[x as usize], src[y as usize]));
        }
    }
    for (a, b) in finals {
        emit(&mut gates, a, b);
    }
    Circuit::from_gates(n, c.m(), gates.into_iter().map(|(a, b)| (a, b, TruthTable::NAND))).expect("normalized circuit is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_gadget() {
        for bits in 0..16u8 {
            let tt = TruthTable::from_bits(bits);
            let c = Circuit::from_gates(2, 1, [(0, 1, tt)]).unwrap();
            let nc = nand_normalize(&c);
            assert_eq!(nc.q(), nand_cost(tt));
            for x in 0..4 {
                let (a, b) = (x & 2 != 0, x & 1 != 0);
                assert_eq!(crate::circuit::evaluate_plain(&nc, &[a, b]).unwrap(), vec![tt.eval(a, b)], "table {tt}");
            }
        }
        assert_eq!(nand_cost(TruthTable::AND), 2);
        assert_eq!(nand_cost(TruthTable::OR), 3);
        assert_eq!(nand_cost(TruthTable::XOR), 4);
        assert_eq!(nand_cost(TruthTable::XNOR), 5);
    }
}
