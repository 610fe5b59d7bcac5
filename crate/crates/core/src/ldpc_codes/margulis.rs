//! The algebraic (2640, 1320) code built on the group SL(2, Z₁₁).
//!
//! The group has 11·(11² − 1) = 1320 elements. Checks are indexed by group
//! elements; variables come in two classes of 1320, one per generator. With
//!
//! ```text
//! S₁ = [1 2; 0 1],   S₂ = [1 0; 2 1]
//! ```
//!
//! class-1 variable g is joined to the checks {g, S₁g, S₁S₂g} and class-2
//! variable g to {g, S₂g, S₂S₁g}. Every check is then used by exactly three
//! class-1 and three class-2 variables (each word pattern is a bijection of
//! the group), giving a (3,6)-regular Tanner graph.

use super::ParityCheckMatrix;

const P: u16 = 11;
const ORDER: usize = 1320; // 11·(11² − 1)

/// Row-major 2×2 matrix over Z₁₁.
type Mat = [u16; 4];

const IDENT: Mat = [1, 0, 0, 1];
const S1: Mat = [1, 2, 0, 1];
const S2: Mat = [1, 0, 2, 1];

fn mul(x: Mat, y: Mat) -> Mat {
    [
        (x[0] * y[0] + x[1] * y[2]) % P,
        (x[0] * y[1] + x[1] * y[3]) % P,
        (x[2] * y[0] + x[3] * y[2]) % P,
        (x[2] * y[1] + x[3] * y[3]) % P,
    ]
}

fn flat(m: Mat) -> usize {
    ((m[0] as usize * P as usize + m[1] as usize) * P as usize + m[2] as usize) * P as usize
        + m[3] as usize
}

/// Enumerates SL(2, Z₁₁) and an inverse lookup from matrix to index.
fn group_table() -> (Vec<Mat>, Vec<u16>) {
    let mut elements = Vec::with_capacity(ORDER);
    let mut index = vec![u16::MAX; (P as usize).pow(4)];
    for a in 0..P {
        for b in 0..P {
            for c in 0..P {
                for d in 0..P {
                    if (a * d % P + P - b * c % P) % P == 1 {
                        let m = [a, b, c, d];
                        index[flat(m)] = elements.len() as u16;
                        elements.push(m);
                    }
                }
            }
        }
    }
    debug_assert_eq!(elements.len(), ORDER);
    (elements, index)
}

/// Connects class-1 variable g to checks {w·g : w ∈ words1} and class-2
/// variable g to {w·g : w ∈ words2}. Panics if a word pair coincides on
/// some g (which would mean a doubled incidence); the callers' word sets
/// are fixed and known not to.
fn build_from_left_words(words1: &[Mat; 3], words2: &[Mat; 3]) -> ParityCheckMatrix {
    let (elements, index) = group_table();
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(2 * ORDER);
    for words in [words1, words2] {
        for g in &elements {
            let col = words
                .iter()
                .map(|w| index[flat(mul(*w, *g))] as u32)
                .collect();
            cols.push(col);
        }
    }
    ParityCheckMatrix::from_column_adjacency(ORDER, cols)
        .expect("word triples act freely, so no column can repeat a check")
}

/// Builds the (2640, 1320) group-based code: 1320 checks (group elements),
/// two variable classes joined via the {g, S₁g, S₁S₂g} / {g, S₂g, S₂S₁g}
/// patterns. Deterministic; always (3,6)-regular and 4-cycle-free.
pub fn construct_margulis() -> ParityCheckMatrix {
    build_from_left_words(&[IDENT, S1, mul(S1, S2)], &[IDENT, S2, mul(S2, S1)])
}
