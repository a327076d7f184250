use crate::circuit::{Circuit, GateKind};

/// Offset classes as assigned by the FleXOR garbler.
///
/// Inputs and the outputs of non-XOR gates each open a new class. An XOR
/// whose inputs share a class keeps it for free; otherwise wire `a` is
/// translated onto `b`'s offset with one ciphertext and the output joins
/// `b`'s class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OffsetClasses {
    /// Class id per wire.
    pub class: Vec<usize>,
    /// Ciphertext cost per gate; only XOR and XNOR gates appear.
    pub xor_cost: Vec<(usize, u8)>,
}

impl OffsetClasses {
    pub fn total_cost(&self) -> usize {
        self.xor_cost.iter().map(|(_, c)| *c as usize).sum()
    }

    pub fn class_count(&self) -> usize {
        self.class.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn flexor_offset_classes(c: &Circuit) -> OffsetClasses {
    let mut class: Vec<usize> = (0..c.n()).collect();
    let mut next = c.n();
    let mut xor_cost = Vec::new();
    for (g, spec) in c.gates().iter().enumerate() {
        let (ca, cb) = (class[spec.in_a], class[spec.in_b]);
        if let GateKind::Xor { .. } = spec.truth_table.kind() {
            let cost = (ca != cb) as u8;
            xor_cost.push((g, cost));
            class.push(cb);
        } else {
            class.push(next);
            next += 1;
        }
    }
    OffsetClasses { class, xor_cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::TruthTable;

    #[test]
    fn shared_and_split_classes() {
        // XOR of two inputs costs one; XORing that result with input b again is free.
        let c = Circuit::from_gates(2, 1, [(0, 1, TruthTable::XOR), (1, 2, TruthTable::XOR)]).unwrap();
        let oc = flexor_offset_classes(&c);
        assert_eq!(oc.xor_cost, vec![(0, 1), (1, 0)]);
        assert_eq!(oc.class[2], oc.class[1]);
    }
}
