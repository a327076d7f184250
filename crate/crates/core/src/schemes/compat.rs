//! Pairwise compatibility of the garbling optimizations.

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Technique {
    PointPermute,
    Grr3,
    FreeXor,
    Grr2,
    FleXor,
    HalfGates,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::PointPermute,
        Technique::Grr3,
        Technique::FreeXor,
        Technique::Grr2,
        Technique::FleXor,
        Technique::HalfGates,
    ];
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Compat {
    Yes,
    /// Compatible once pointer bits become external values.
    ViaExternalValue,
    No,
}

impl Compat {
    pub fn is_compatible(self) -> bool {
        self != Compat::No
    }
}

/// Compatibility of two distinct techniques; a technique is trivially
/// compatible with itself.
pub fn compatibility(a: Technique, b: Technique) -> Compat {
    use Technique::*;
    if a == b {
        return Compat::Yes;
    }
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    match (x, y) {
        (PointPermute, Grr2) | (PointPermute, FleXor) => Compat::ViaExternalValue,
        (PointPermute, _) => Compat::Yes,
        (Grr3, Grr2) => Compat::No,
        (Grr3, _) => Compat::Yes,
        (FreeXor, HalfGates) => Compat::Yes,
        (FreeXor, _) => Compat::No,
        (Grr2, FleXor) => Compat::Yes,
        (Grr2, HalfGates) | (FleXor, HalfGates) => Compat::No,
        _ => unreachable!("pairs are ordered"),
    }
}

/// Whether every pair in the set can be combined.
pub fn compatible(techniques: &[Technique]) -> bool {
    techniques
        .iter()
        .enumerate()
        .all(|(i, a)| techniques[i + 1..].iter().all(|b| compatibility(*a, *b).is_compatible()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric() {
        for a in Technique::ALL {
            for b in Technique::ALL {
                assert_eq!(compatibility(a, b), compatibility(b, a));
            }
        }
    }

    #[test]
    fn examples() {
        use Technique::*;
        assert!(!compatible(&[FreeXor, Grr2]));
        assert!(compatible(&[FreeXor, HalfGates]));
        assert!(compatible(&[Grr2, FleXor]));
        assert!(compatible(&[PointPermute, Grr3, FreeXor]));
        assert!(!compatible(&[PointPermute, Grr2, FreeXor]));
    }
}
