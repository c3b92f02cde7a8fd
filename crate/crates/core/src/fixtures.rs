//! The two worked instances used throughout the docs and tests.

use crate::pattern::PatternMatrix;

/// 5-state, 1-input pair with an unreachable self-loop at `x5`.
pub fn example1() -> (PatternMatrix, PatternMatrix) {
    let a = PatternMatrix::from_one_based(
        5,
        5,
        [
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 1),
            (2, 4),
            (3, 4),
            (3, 5),
            (5, 5),
        ],
    )
    .expect("static pattern");
    let b = PatternMatrix::from_one_based(5, 1, [(4, 1)]).expect("static pattern");
    (a, b)
}

/// 11-state autonomous system with four cyclic components.
pub fn example2() -> PatternMatrix {
    PatternMatrix::from_one_based(
        11,
        11,
        [
            (1, 3),
            (1, 4),
            (2, 1),
            (2, 6),
            (3, 2),
            (3, 5),
            (4, 4),
            (5, 5),
            (5, 8),
            (6, 7),
            (7, 6),
            (7, 8),
            (8, 9),
            (8, 10),
            (8, 11),
        ],
    )
    .expect("static pattern")
}
